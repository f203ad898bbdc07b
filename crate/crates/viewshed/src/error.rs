//! Error types shared across the crate.

use std::path::PathBuf;

use thiserror::Error;

/// Errors from grid construction, indexing, and interpolation.
#[derive(Debug, Error)]
pub enum GridError {
    #[error("grid axis {axis}: lower bound {lo} must lie strictly below upper bound {hi}")]
    EmptyAxis { axis: usize, lo: f64, hi: f64 },
    #[error("grid axis {axis}: need at least 2 nodes per axis, got {n}")]
    TooFewNodes { axis: usize, n: usize },
    #[error("point {point:?} lies outside the grid box")]
    OutsideDomain { point: Vec<f64> },
    #[error("ray foot requested at the viewpoint itself")]
    DegenerateRay,
    #[error("field has {len} values but the grid has {expected} nodes")]
    LengthMismatch { len: usize, expected: usize },
    #[error("non-finite value at flat node index {index}")]
    NonFinite { index: usize },
    #[error("fields live on different grids")]
    GridMismatch,
}

/// Errors from point-cloud construction.
#[derive(Debug, Error)]
pub enum CloudError {
    #[error("point cloud is empty")]
    Empty,
    #[error("point cloud entry {index} is not finite")]
    NonFinitePoint { index: usize },
    #[error("inflation radius must be positive and finite, got {radius}")]
    BadRadius { radius: f64 },
}

/// Errors from the sweeping solver.
#[derive(Debug, Error)]
pub enum SolveError {
    #[error("viewpoint {point:?} lies outside the grid box")]
    ViewpointOutsideBox { point: Vec<f64> },
    #[error("obstacle field contains a non-finite value at flat node index {index}")]
    NonFiniteObstacle { index: usize },
    #[error("ray sampling step must be positive and finite, got {step}")]
    BadOracleStep { step: f64 },
    #[error("ray sampling step {step} exceeds the minimum grid spacing {min_spacing}")]
    OracleStepTooCoarse { step: f64, min_spacing: f64 },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Errors from multi-viewpoint composition.
#[derive(Debug, Error)]
pub enum ComposeError {
    #[error("viewpoint set is empty")]
    EmptyViewpoints,
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("composition refers to field {index} but only {len} fields were given")]
    LeafOutOfRange { index: usize, len: usize },
    #[error("at-least-{k} requires between 1 and {len} fields")]
    BadCount { k: usize, len: usize },
    #[error("composition tree node has no children")]
    EmptyNode,
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Errors from reading or writing field and point-cloud files.
#[derive(Debug, Error)]
pub enum FieldIoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
}

/// Errors from scene configuration files.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("config field `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error(transparent)]
    FieldIo(#[from] FieldIoError),
}

impl ConfigError {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
