//! Visibility sets on uniform grids.
//!
//! Given an obstacle function `g` (positive inside obstacle material,
//! negative outside) and a viewpoint, this crate computes the upper
//! star-shaped envelope of `g`: the smallest function above `g` that is
//! nondecreasing along rays leaving the viewpoint. Points where the envelope
//! stays at or below a level `alpha` are exactly the points visible past the
//! `alpha` superlevel set of `g`, so one solve answers visibility queries for
//! every level at once.
//!
//! The envelope solves the obstacle equation
//! `min{ u(x) - g(x), (x - x*) . grad u(x) } = 0` with `u(x*) = g(x*)`. The
//! solver discretizes the directional derivative with an upwind foot point on
//! each node's neighbor box and sweeps the grid once in an order aligned with
//! the rays, so every node is written exactly once and the discrete equation
//! is satisfied to round-off. A ray-sampling reference implementation, the
//! mirrored lower envelope, multi-viewpoint composition, file formats, and a
//! convergence harness round out the crate.
//!
//! ```
//! use viewshed::grid::Grid;
//! use viewshed::obstacle::scenes;
//! use viewshed::sweep::{solve, SolverConfig, Viewpoint};
//!
//! let grid = Grid::<2>::centered_cube(1.0, 65)?;
//! let g = scenes::cone::<2>().sample(&grid);
//! let report = solve(&g, &SolverConfig::upper(Viewpoint::new([-1.0, -1.0])))?;
//! assert!(report.max_abs_residual <= 1e-12);
//! let visible = viewshed::mask::sublevel(&report.solution, -0.5);
//! assert!(visible.count_true() > 0);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod config;
pub mod convergence;
mod error;
pub mod grid;
pub mod io;
pub mod mask;
pub mod multiview;
pub mod obstacle;
pub mod oracle;
pub mod sweep;

mod book;

pub use error::{CloudError, ComposeError, ConfigError, FieldIoError, GridError, SolveError};
