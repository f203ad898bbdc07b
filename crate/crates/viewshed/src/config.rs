//! Scene configuration files.
//!
//! Scenes are described in TOML with explicit keys: the grid box, an
//! obstacle tree, viewpoints, composition semantics, the level `alpha`, the
//! envelope, and an optional ray-sampling step. Parsing and serialization
//! round-trip; dimension-specific validation happens when the untyped
//! configuration is turned into typed values.
//!
//! ```toml
//! dim = 2
//! viewpoints = [[-1.0, -1.0]]
//! alpha = 0.0
//!
//! [grid]
//! lo = [-1.0, -1.0]
//! hi = [1.0, 1.0]
//! n = [129, 129]
//!
//! [obstacle]
//! kind = "cone"
//! apex = [0.0, 0.0]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::grid::{Grid, Viewpoint};
use crate::multiview::{ComposeExpr, ViewpointSet};
use crate::obstacle::{ObstacleSpec, PointCloud};
use crate::sweep::Envelope;

/// Untyped scene description, as read from a file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub dim: usize,
    pub grid: GridConfig,
    pub obstacle: ObstacleConfig,
    pub viewpoints: Vec<Vec<f64>>,
    #[serde(default)]
    pub semantics: Semantics,
    /// Required when `semantics = "at-least"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at_least_k: Option<usize>,
    /// Required when `semantics = "custom"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compose: Option<ComposeExpr>,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub envelope: Envelope,
    /// Ray-sampling step for reference computations; defaults to an eighth
    /// of the smallest grid spacing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub n: Vec<usize>,
}

/// How multiple viewpoints combine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Semantics {
    /// Visible if seen from any viewpoint (nodewise minimum).
    #[default]
    Any,
    /// Visible only if seen from every viewpoint (nodewise maximum).
    All,
    /// Visible if seen from at least `at_least_k` viewpoints.
    AtLeast,
    /// Evaluate the `compose` tree over the per-viewpoint solutions.
    Custom,
}

/// Obstacle tree as written in configuration files. Mirrors
/// [`ObstacleSpec`], with point clouds referenced by file path and no
/// analytic callbacks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ObstacleConfig {
    Constant {
        value: f64,
    },
    Cone {
        apex: Vec<f64>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Box {
        center: Vec<f64>,
        half_extent: Vec<f64>,
    },
    Halfspace {
        normal: Vec<f64>,
        offset: f64,
    },
    PointCloud {
        path: String,
        radius: f64,
    },
    Negate {
        child: std::boxed::Box<ObstacleConfig>,
    },
    Min {
        children: Vec<ObstacleConfig>,
    },
    Max {
        children: Vec<ObstacleConfig>,
    },
    Scale {
        factor: f64,
        child: std::boxed::Box<ObstacleConfig>,
    },
    Offset {
        shift: f64,
        child: std::boxed::Box<ObstacleConfig>,
    },
}

impl SceneConfig {
    /// Parse and validate a scene from TOML text.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let config: SceneConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Canonical TOML form; `parse(to_toml())` reproduces the config.
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("scene configs are serializable")
    }

    /// Dimension-independent validation with field-level messages.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.dim != 2 && self.dim != 3 {
            return Err(ConfigError::invalid(
                "dim",
                format!("must be 2 or 3, got {}", self.dim),
            ));
        }
        for (name, len) in [
            ("grid.lo", self.grid.lo.len()),
            ("grid.hi", self.grid.hi.len()),
            ("grid.n", self.grid.n.len()),
        ] {
            if len != self.dim {
                return Err(ConfigError::invalid(
                    name,
                    format!("expected {} entries, got {len}", self.dim),
                ));
            }
        }
        for (k, (lo, hi)) in self.grid.lo.iter().zip(&self.grid.hi).enumerate() {
            if !(lo < hi) {
                return Err(ConfigError::invalid(
                    "grid",
                    format!("axis {k}: lo {lo} must lie below hi {hi}"),
                ));
            }
        }
        if let Some(k) = self.grid.n.iter().position(|&n| n < 2) {
            return Err(ConfigError::invalid(
                "grid.n",
                format!("axis {k}: need at least 2 nodes"),
            ));
        }
        if self.viewpoints.is_empty() {
            return Err(ConfigError::invalid("viewpoints", "must not be empty"));
        }
        for (i, vp) in self.viewpoints.iter().enumerate() {
            if vp.len() != self.dim {
                return Err(ConfigError::invalid(
                    format!("viewpoints[{i}]"),
                    format!("expected {} coordinates, got {}", self.dim, vp.len()),
                ));
            }
            for (k, c) in vp.iter().enumerate() {
                if !(self.grid.lo[k] <= *c && *c <= self.grid.hi[k]) {
                    return Err(ConfigError::invalid(
                        format!("viewpoints[{i}]"),
                        format!("coordinate {k} = {c} lies outside the grid box"),
                    ));
                }
            }
        }
        match self.semantics {
            Semantics::AtLeast => {
                let k = self.at_least_k.ok_or_else(|| {
                    ConfigError::invalid("at_least_k", "required when semantics = \"at-least\"")
                })?;
                if k < 1 || k > self.viewpoints.len() {
                    return Err(ConfigError::invalid(
                        "at_least_k",
                        format!("must lie in 1..={}", self.viewpoints.len()),
                    ));
                }
            }
            Semantics::Custom => {
                if self.compose.is_none() {
                    return Err(ConfigError::invalid(
                        "compose",
                        "required when semantics = \"custom\"",
                    ));
                }
            }
            Semantics::Any | Semantics::All => {}
        }
        if !self.alpha.is_finite() {
            return Err(ConfigError::invalid("alpha", "must be finite"));
        }
        if let Some(step) = self.oracle_step {
            if !(step > 0.0) || !step.is_finite() {
                return Err(ConfigError::invalid(
                    "oracle_step",
                    format!("must be positive and finite, got {step}"),
                ));
            }
        }
        self.obstacle.validate(self.dim, "obstacle")
    }

    /// The typed grid. `D` must equal `dim`; callers dispatch on `dim` first.
    pub fn typed_grid<const D: usize>(&self) -> Result<Grid<D>, ConfigError> {
        assert_eq!(D, self.dim, "dispatch on `dim` before calling typed_grid");
        Grid::new(
            to_array::<D>(&self.grid.lo, "grid.lo")?,
            to_array::<D>(&self.grid.hi, "grid.hi")?,
            std::array::from_fn(|k| self.grid.n[k]),
        )
        .map_err(|e| ConfigError::invalid("grid", e.to_string()))
    }

    /// The typed obstacle tree, loading any point-cloud files relative to
    /// `base_dir`.
    pub fn typed_obstacle<const D: usize>(
        &self,
        base_dir: &Path,
    ) -> Result<ObstacleSpec<D>, ConfigError> {
        assert_eq!(D, self.dim, "dispatch on `dim` before calling typed_obstacle");
        self.obstacle.build(base_dir, "obstacle")
    }

    pub fn typed_viewpoints<const D: usize>(&self) -> Result<ViewpointSet<D>, ConfigError> {
        let mut vps = Vec::with_capacity(self.viewpoints.len());
        for (i, vp) in self.viewpoints.iter().enumerate() {
            vps.push(Viewpoint::new(to_array::<D>(
                vp,
                &format!("viewpoints[{i}]"),
            )?));
        }
        ViewpointSet::new(vps).map_err(|e| ConfigError::invalid("viewpoints", e.to_string()))
    }

    /// The composition implied by the semantics, over `len` viewpoints.
    pub fn compose_expr(&self) -> ComposeExpr {
        let len = self.viewpoints.len();
        match self.semantics {
            Semantics::Any => ComposeExpr::min_of_all(len),
            Semantics::All => ComposeExpr::max_of_all(len),
            Semantics::AtLeast => {
                ComposeExpr::at_least_of_all(self.at_least_k.expect("validated"), len)
            }
            Semantics::Custom => self.compose.clone().expect("validated"),
        }
    }
}

fn to_array<const D: usize>(v: &[f64], field: &str) -> Result<[f64; D], ConfigError> {
    if v.len() != D {
        return Err(ConfigError::invalid(
            field,
            format!("expected {D} entries, got {}", v.len()),
        ));
    }
    Ok(std::array::from_fn(|k| v[k]))
}

impl ObstacleConfig {
    fn validate(&self, dim: usize, path: &str) -> Result<(), ConfigError> {
        let check_len = |v: &[f64], field: &str| -> Result<(), ConfigError> {
            if v.len() != dim {
                return Err(ConfigError::invalid(
                    format!("{path}.{field}"),
                    format!("expected {dim} entries, got {}", v.len()),
                ));
            }
            Ok(())
        };
        match self {
            ObstacleConfig::Constant { .. } => Ok(()),
            ObstacleConfig::Cone { apex } => check_len(apex, "apex"),
            ObstacleConfig::Ball { center, .. } => check_len(center, "center"),
            ObstacleConfig::Box {
                center,
                half_extent,
            } => {
                check_len(center, "center")?;
                check_len(half_extent, "half_extent")
            }
            ObstacleConfig::Halfspace { normal, .. } => check_len(normal, "normal"),
            ObstacleConfig::PointCloud { radius, .. } => {
                if !(*radius > 0.0) {
                    return Err(ConfigError::invalid(
                        format!("{path}.radius"),
                        format!("must be positive, got {radius}"),
                    ));
                }
                Ok(())
            }
            ObstacleConfig::Negate { child } => child.validate(dim, &format!("{path}.negate")),
            ObstacleConfig::Min { children } | ObstacleConfig::Max { children } => {
                if children.is_empty() {
                    return Err(ConfigError::invalid(
                        path,
                        "min/max needs at least one child",
                    ));
                }
                for (i, c) in children.iter().enumerate() {
                    c.validate(dim, &format!("{path}.children[{i}]"))?;
                }
                Ok(())
            }
            ObstacleConfig::Scale { child, .. } => child.validate(dim, &format!("{path}.scale")),
            ObstacleConfig::Offset { child, .. } => child.validate(dim, &format!("{path}.offset")),
        }
    }

    fn build<const D: usize>(
        &self,
        base_dir: &Path,
        path: &str,
    ) -> Result<ObstacleSpec<D>, ConfigError> {
        Ok(match self {
            ObstacleConfig::Constant { value } => ObstacleSpec::Constant(*value),
            ObstacleConfig::Cone { apex } => ObstacleSpec::Cone {
                apex: to_array::<D>(apex, &format!("{path}.apex"))?,
            },
            ObstacleConfig::Ball { center, radius } => ObstacleSpec::Ball {
                center: to_array::<D>(center, &format!("{path}.center"))?,
                radius: *radius,
            },
            ObstacleConfig::Box {
                center,
                half_extent,
            } => ObstacleSpec::Box {
                center: to_array::<D>(center, &format!("{path}.center"))?,
                half_extent: to_array::<D>(half_extent, &format!("{path}.half_extent"))?,
            },
            ObstacleConfig::Halfspace { normal, offset } => ObstacleSpec::Halfspace {
                normal: to_array::<D>(normal, &format!("{path}.normal"))?,
                offset: *offset,
            },
            ObstacleConfig::PointCloud { path: file, radius } => {
                let full = base_dir.join(file);
                let points = crate::io::read_point_cloud::<D>(&full)?;
                let cloud = PointCloud::new(points, *radius)
                    .map_err(|e| ConfigError::invalid(format!("{path}"), e.to_string()))?;
                ObstacleSpec::Cloud(cloud)
            }
            ObstacleConfig::Negate { child } => ObstacleSpec::Negate(std::boxed::Box::new(
                child.build(base_dir, &format!("{path}.negate"))?,
            )),
            ObstacleConfig::Min { children } => ObstacleSpec::Min(
                children
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c.build(base_dir, &format!("{path}.children[{i}]")))
                    .collect::<Result<_, _>>()?,
            ),
            ObstacleConfig::Max { children } => ObstacleSpec::Max(
                children
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c.build(base_dir, &format!("{path}.children[{i}]")))
                    .collect::<Result<_, _>>()?,
            ),
            ObstacleConfig::Scale { factor, child } => ObstacleSpec::Scale {
                factor: *factor,
                child: std::boxed::Box::new(child.build(base_dir, &format!("{path}.scale"))?),
            },
            ObstacleConfig::Offset { shift, child } => ObstacleSpec::Offset {
                shift: *shift,
                child: std::boxed::Box::new(child.build(base_dir, &format!("{path}.offset"))?),
            },
        })
    }
}
