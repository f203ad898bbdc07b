//! Single-pass sweeping solver for the envelope equations.
//!
//! For the upper envelope the discrete operator at a node `x` is
//!
//! ```text
//! F[u](x) = min{ u(x) - g(x), (u(x) - I u(foot(x))) / |x - foot(x)| }
//! ```
//!
//! where `foot(x)` is the first intersection of the segment from `x` toward
//! the viewpoint with the boundary of `x`'s neighbor box, and `I` is the
//! multilinear interpolant. Solving `F[u](x) = 0` for `u(x)` gives the update
//!
//! ```text
//! u(x) = max{ g(x), I u(foot(x)) }
//! ```
//!
//! Because the interpolation stencil of `foot(x)` always lies strictly closer
//! to the viewpoint (ring-wise) than `x`, sweeping nodes in order of their
//! per-axis ring distances from the viewpoint cell finalizes every stencil
//! before it is read. One pass over the grid therefore lands exactly on the
//! fixpoint: every update is also the equation it solves, so the residual of
//! the returned solution is zero to round-off.
//!
//! The lower envelope mirrors this with `w(x) = min{ g(x), I w(foot_out(x)) }`
//! where `foot_out` points away from the viewpoint, swept in the reverse
//! order; nodes whose outward ray leaves the domain keep `w = g`.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::SolveError;
use crate::grid::{dist, Foot, Grid, NodeIndex, OutwardFoot, ScalarField};

pub use crate::grid::Viewpoint;

/// Which star-shaped envelope to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Envelope {
    /// Smallest function above the obstacle that increases along rays from
    /// the viewpoint; its sublevel sets are visibility sets.
    #[default]
    Upper,
    /// Largest function below the obstacle that increases along those rays.
    Lower,
}

/// Everything a solve needs besides the obstacle field itself.
#[derive(Debug, Clone)]
pub struct SolverConfig<const D: usize> {
    pub envelope: Envelope,
    pub viewpoint: Viewpoint<D>,
    /// Obstacle value pinned at the viewpoint. `None` interpolates the
    /// obstacle field there; pass the exact value when the obstacle has a
    /// closed form, or a solved field's own viewpoint value when re-solving.
    pub viewpoint_value: Option<f64>,
}

impl<const D: usize> SolverConfig<D> {
    pub fn upper(viewpoint: Viewpoint<D>) -> Self {
        SolverConfig {
            envelope: Envelope::Upper,
            viewpoint,
            viewpoint_value: None,
        }
    }

    pub fn lower(viewpoint: Viewpoint<D>) -> Self {
        SolverConfig {
            envelope: Envelope::Lower,
            viewpoint,
            viewpoint_value: None,
        }
    }

    pub fn with_viewpoint_value(mut self, value: f64) -> Self {
        self.viewpoint_value = Some(value);
        self
    }
}

/// Solution field plus diagnostics from one sweep.
#[derive(Debug, Clone)]
pub struct SolveReport<const D: usize> {
    pub solution: ScalarField<D>,
    /// Largest `|F[u]|` over all nodes, from a full post-pass.
    pub max_abs_residual: f64,
    /// Number of node visits; always equals the node count.
    pub sweep_node_count: usize,
    pub wall_time: Duration,
    /// The value actually pinned at the viewpoint.
    pub viewpoint_value: f64,
}

/// Visit order for the sweep: nodes sorted lexicographically by their
/// per-axis ring distances from the cell containing the viewpoint.
///
/// Ring 0 on an axis is the pair of node layers enclosing the viewpoint;
/// ring `r` adds the layers `r` steps below and above that pair. Every upwind
/// stencil lies in a lexicographically smaller ring tuple, so this order is a
/// topological order of the dependency graph — including viewpoints that are
/// off-grid, where the two enclosing layers feed on each other row by row and
/// plain quadrant-by-quadrant sweeping would read unfinished values. Within
/// any orthant around the viewpoint the visited indices move monotonically
/// away from it along every axis. Each node appears exactly once.
pub fn sweep_order<const D: usize>(grid: &Grid<D>, vp: &Viewpoint<D>) -> Vec<NodeIndex<D>> {
    let anchor = grid.anchor_cell(vp.point());
    let n = grid.node_counts();
    let max_ring: [usize; D] = std::array::from_fn(|k| anchor[k].max(n[k] - 2 - anchor[k]));
    let mut order = Vec::with_capacity(grid.len());
    let mut ring = [0usize; D];
    loop {
        // Lattice layers per axis at this ring: both enclosing layers at ring
        // 0, otherwise the in-range members of (anchor - r, anchor + 1 + r).
        let mut layers = [[None, None]; D];
        for k in 0..D {
            let r = ring[k];
            layers[k] = if r == 0 {
                [Some(anchor[k]), Some(anchor[k] + 1)]
            } else {
                [
                    anchor[k].checked_sub(r),
                    Some(anchor[k] + 1 + r).filter(|&i| i < n[k]),
                ]
            };
        }
        'sel: for sel in 0..(1usize << D) {
            let mut idx = [0; D];
            for k in 0..D {
                match layers[k][(sel >> k) & 1] {
                    Some(i) => idx[k] = i,
                    None => continue 'sel,
                }
            }
            order.push(idx);
        }
        // Odometer over ring tuples, last axis fastest.
        let mut k = D;
        loop {
            if k == 0 {
                return order;
            }
            k -= 1;
            if ring[k] < max_ring[k] {
                ring[k] += 1;
                break;
            }
            ring[k] = 0;
        }
    }
}

fn viewpoint_value<const D: usize>(g: &ScalarField<D>, cfg: &SolverConfig<D>) -> f64 {
    cfg.viewpoint_value
        .unwrap_or_else(|| g.interp_inside(cfg.viewpoint.point()))
}

/// Solve the configured envelope equation over the obstacle field `g` in a
/// single sweep.
pub fn solve<const D: usize>(
    g: &ScalarField<D>,
    cfg: &SolverConfig<D>,
) -> Result<SolveReport<D>, SolveError> {
    let start = Instant::now();
    let grid = *g.grid();
    let vp = cfg.viewpoint.point();
    if !grid.contains(vp) {
        return Err(SolveError::ViewpointOutsideBox { point: vp.to_vec() });
    }
    if let Some(index) = g.values().iter().position(|v| !v.is_finite()) {
        return Err(SolveError::NonFiniteObstacle { index });
    }
    let vp_value = viewpoint_value(g, cfg);
    let order = sweep_order(&grid, &cfg.viewpoint);
    let sweep_node_count = order.len();
    let mut u = g.clone();
    match cfg.envelope {
        Envelope::Upper => {
            for &idx in &order {
                let upwind = match grid.ray_foot(idx, vp) {
                    Ok(Foot::Target) | Err(_) => vp_value,
                    Ok(Foot::Point { point, .. }) => u.interp_inside(point),
                };
                u.set(idx, g.at(idx).max(upwind));
            }
        }
        Envelope::Lower => {
            let g_min = g.min();
            for &idx in order.iter().rev() {
                let downwind = match grid.outward_foot(idx, vp) {
                    // Outward ray leaves the domain: boundary condition w = g.
                    Ok(OutwardFoot::Outflow) => f64::INFINITY,
                    Ok(OutwardFoot::Point { point, .. }) => u.interp_inside(point),
                    // The node at the viewpoint takes the whole-domain minimum.
                    Err(_) => g_min,
                };
                u.set(idx, g.at(idx).min(downwind));
            }
        }
    }
    let max_abs_residual = max_abs_residual(&u, g, cfg)?;
    Ok(SolveReport {
        solution: u,
        max_abs_residual,
        sweep_node_count,
        wall_time: start.elapsed(),
        viewpoint_value: vp_value,
    })
}

/// The discrete operator at one node of a candidate solution.
///
/// Zero at every node exactly when `u` is the sweep's fixpoint. At the node
/// coinciding with the viewpoint the transport term degenerates and the
/// residual reduces to the deviation from the pinned boundary value.
pub fn residual_at<const D: usize>(
    u: &ScalarField<D>,
    g: &ScalarField<D>,
    cfg: &SolverConfig<D>,
    idx: NodeIndex<D>,
) -> f64 {
    let grid = u.grid();
    let vp = cfg.viewpoint.point();
    let vp_value = viewpoint_value(g, cfg);
    let x = grid.node_coord(idx);
    let ux = u.at(idx);
    let diff = ux - g.at(idx);
    let eps = 1e-14 * grid.min_spacing();
    match cfg.envelope {
        Envelope::Upper => {
            let transport = if dist(x, vp) < eps {
                ux - vp_value
            } else {
                match grid.ray_foot(idx, vp).expect("ray is nondegenerate") {
                    Foot::Target => (ux - vp_value) / dist(x, vp),
                    Foot::Point { point, distance } => (ux - u.interp_inside(point)) / distance,
                }
            };
            diff.min(transport)
        }
        Envelope::Lower => {
            if dist(x, vp) < eps {
                return ux - g.at(idx).min(g.min());
            }
            match grid.outward_foot(idx, vp).expect("ray is nondegenerate") {
                OutwardFoot::Outflow => diff,
                OutwardFoot::Point { point, distance } => {
                    diff.max((ux - u.interp_inside(point)) / distance)
                }
            }
        }
    }
}

/// Largest `|F[u]|` over all nodes.
pub fn max_abs_residual<const D: usize>(
    u: &ScalarField<D>,
    g: &ScalarField<D>,
    cfg: &SolverConfig<D>,
) -> Result<f64, SolveError> {
    let grid = u.grid();
    if grid != g.grid() {
        return Err(crate::error::GridError::GridMismatch.into());
    }
    Ok((0..grid.len())
        .into_par_iter()
        .map(|f| residual_at(u, g, cfg, grid.unflat(f)).abs())
        .reduce(|| 0.0, f64::max))
}
