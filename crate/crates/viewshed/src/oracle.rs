//! Ray-sampled reference envelopes: classic ray tracing against the obstacle
//! function, used as the independent check for the sweeping solver.
//!
//! The upper envelope at `x` is the maximum of the obstacle along the segment
//! from the viewpoint to `x`; the lower envelope is the minimum along the ray
//! leaving `x` away from the viewpoint until it exits the box. Both are
//! evaluated by uniform arc-length sampling with the segment endpoints forced
//! exactly, so the ordering `lower <= g <= upper` holds without tolerance.

use rayon::prelude::*;

use crate::error::SolveError;
use crate::grid::{box_exit, dist, Grid, Point, ScalarField, Viewpoint};
use crate::obstacle::ObstacleSpec;
use crate::sweep::Envelope;

/// Arc-length step used to discretize the ray extrema.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaySampling {
    step: f64,
}

impl RaySampling {
    /// A positive, finite sampling step.
    pub fn new(step: f64) -> Result<Self, SolveError> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(SolveError::BadOracleStep { step });
        }
        Ok(RaySampling { step })
    }

    /// Default resolution for a grid: an eighth of the smallest spacing.
    pub fn for_grid<const D: usize>(grid: &Grid<D>) -> Self {
        RaySampling {
            step: grid.min_spacing() / 8.0,
        }
    }

    pub fn step(&self) -> f64 {
        self.step
    }
}

/// Sample `g` along the segment from `a` to `b` (endpoints forced exactly)
/// and fold the values with `combine`.
fn fold_segment<const D: usize>(
    g: &ObstacleSpec<D>,
    a: Point<D>,
    b: Point<D>,
    step: f64,
    init: f64,
    combine: fn(f64, f64) -> f64,
) -> f64 {
    let len = dist(a, b);
    if len == 0.0 {
        return combine(init, g.eval(a));
    }
    let m = (len / step).ceil().max(1.0) as usize;
    let mut acc = combine(init, g.eval(a));
    for j in 1..m {
        let t = j as f64 / m as f64;
        let y = std::array::from_fn(|k| a[k] + t * (b[k] - a[k]));
        acc = combine(acc, g.eval(y));
    }
    combine(acc, g.eval(b))
}

/// Maximum of the obstacle along the segment from the viewpoint to `x`.
pub fn upper_envelope_at<const D: usize>(
    g: &ObstacleSpec<D>,
    vp: &Viewpoint<D>,
    x: Point<D>,
    cfg: &RaySampling,
) -> f64 {
    fold_segment(g, vp.point(), x, cfg.step, f64::NEG_INFINITY, f64::max)
}

/// Minimum of the obstacle along the ray from `x` away from the viewpoint,
/// up to the box boundary. At the viewpoint itself this degenerates to the
/// minimum over the whole box, scanned at the sampling resolution.
pub fn lower_envelope_at<const D: usize>(
    g: &ObstacleSpec<D>,
    vp: &Viewpoint<D>,
    x: Point<D>,
    grid: &Grid<D>,
    cfg: &RaySampling,
) -> f64 {
    let v = vp.point();
    if x == v {
        return box_minimum(g, grid, cfg);
    }
    let d = crate::grid::sub(x, v);
    let (exit, len) = box_exit(x, d, grid.lo(), grid.hi());
    if len == 0.0 {
        return g.eval(x);
    }
    fold_segment(g, x, exit, cfg.step, f64::INFINITY, f64::min)
}

/// Minimum of the obstacle over a lattice of the box at the sampling
/// resolution.
fn box_minimum<const D: usize>(g: &ObstacleSpec<D>, grid: &Grid<D>, cfg: &RaySampling) -> f64 {
    let counts: [usize; D] = std::array::from_fn(|k| {
        (((grid.hi()[k] - grid.lo()[k]) / cfg.step).ceil() as usize + 1).max(2)
    });
    let scan = Grid::new(grid.lo(), grid.hi(), counts).expect("box is non-degenerate");
    (0..scan.len())
        .into_par_iter()
        .map(|f| g.eval(scan.node_coord(scan.unflat(f))))
        .reduce(|| f64::INFINITY, f64::min)
}

/// The chosen envelope evaluated at every grid node.
pub fn oracle_field<const D: usize>(
    g: &ObstacleSpec<D>,
    vp: &Viewpoint<D>,
    grid: &Grid<D>,
    cfg: &RaySampling,
    which: Envelope,
) -> Result<ScalarField<D>, SolveError> {
    if !grid.contains(vp.point()) {
        return Err(SolveError::ViewpointOutsideBox {
            point: vp.point().to_vec(),
        });
    }
    if cfg.step > grid.min_spacing() {
        return Err(SolveError::OracleStepTooCoarse {
            step: cfg.step,
            min_spacing: grid.min_spacing(),
        });
    }
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|f| {
            let x = grid.node_coord(grid.unflat(f));
            match which {
                Envelope::Upper => upper_envelope_at(g, vp, x, cfg),
                Envelope::Lower => lower_envelope_at(g, vp, x, grid, cfg),
            }
        })
        .collect();
    Ok(ScalarField::from_raw(*grid, values))
}
