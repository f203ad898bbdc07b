//! Grid-refinement error studies against the ray-sampled reference.

use crate::error::SolveError;
use crate::grid::{Grid, Point, Viewpoint};
use crate::obstacle::ObstacleSpec;
use crate::oracle::{oracle_field, RaySampling};
use crate::sweep::{solve, Envelope, SolverConfig};

/// One refinement level of a study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    /// Nodes per axis.
    pub n: usize,
    /// Largest grid spacing.
    pub h: f64,
    /// Sup-norm difference between the sweep solution and the reference.
    pub error: f64,
    /// Observed order `ln(e_prev / e) / ln(h_prev / h)`; `None` on the first
    /// row.
    pub order: Option<f64>,
}

/// Solve the upper envelope on `[lo, hi]` with `n` nodes per axis for each
/// entry of `ns`, comparing each solution to the ray-sampled reference on the
/// same nodes.
///
/// The reference step is `oracle_step` when given, otherwise an eighth of the
/// grid spacing at each level.
pub fn convergence_study<const D: usize>(
    obstacle: &ObstacleSpec<D>,
    lo: Point<D>,
    hi: Point<D>,
    viewpoint: Viewpoint<D>,
    ns: &[usize],
    oracle_step: Option<f64>,
) -> Result<Vec<ConvergenceRow>, SolveError> {
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(ns.len());
    for &n in ns {
        let grid = Grid::new(lo, hi, [n; D])?;
        let g = obstacle.sample(&grid);
        let cfg = SolverConfig::upper(viewpoint)
            .with_viewpoint_value(obstacle.eval(viewpoint.point()));
        let report = solve(&g, &cfg)?;
        let sampling = match oracle_step {
            Some(step) => RaySampling::new(step)?,
            None => RaySampling::for_grid(&grid),
        };
        let reference = oracle_field(obstacle, &viewpoint, &grid, &sampling, Envelope::Upper)?;
        let error = report.solution.sup_distance(&reference)?;
        let h = grid.max_spacing();
        let order = rows.last().map(|prev| {
            (prev.error / error).ln() / (prev.h / h).ln()
        });
        rows.push(ConvergenceRow { n, h, error, order });
    }
    Ok(rows)
}

/// Render rows as an aligned text table, one line per refinement level.
pub fn format_rows(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("N h error order\n");
    for row in rows {
        let order = row
            .order
            .map(|o| format!("{o:.2}"))
            .unwrap_or_else(|| "-".to_string());
        out.push_str(&format!(
            "{} {:.2e} {:.2e} {}\n",
            row.n, row.h, row.error, order
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::obstacle::scenes;

    #[test]
    fn single_level_has_no_order() {
        let rows = convergence_study(
            &scenes::cone::<2>(),
            [-1.0, -1.0],
            [1.0, 1.0],
            Viewpoint::new([-1.0, -1.0]),
            &[16],
            None,
        )
        .unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].n, 16);
        assert_eq!(rows[0].order, None);
        assert!(rows[0].error > 0.0);
        let table = format_rows(&rows);
        assert!(table.lines().count() == 2);
        assert!(table.contains(" -"));
    }

    #[test]
    fn affine_obstacle_from_a_corner_is_solved_exactly() {
        // With the viewpoint at the low corner, an affine obstacle with
        // nonnegative gradient already increases along every ray, so the
        // sweep reproduces it to round-off and only the reference sampling
        // grain remains.
        let obstacle = ObstacleSpec::<2>::analytic(|p| 0.4 * p[0] + 0.7 * p[1]);
        let rows = convergence_study(
            &obstacle,
            [-1.0, -1.0],
            [1.0, 1.0],
            Viewpoint::new([-1.0, -1.0]),
            &[16, 32],
            None,
        )
        .unwrap();
        for row in rows {
            assert!(row.error <= 1e-12, "error {} at N = {}", row.error, row.n);
        }
    }

    #[test]
    fn cone_errors_shrink_at_first_order() {
        let rows = convergence_study(
            &scenes::cone::<2>(),
            [-1.0, -1.0],
            [1.0, 1.0],
            Viewpoint::new([-1.0, -1.0]),
            &[16, 32, 64],
            None,
        )
        .unwrap();
        assert!(rows[1].error < rows[0].error);
        assert!(rows[2].error < rows[1].error);
        let order = rows[2].order.unwrap();
        assert!((0.7..=1.3).contains(&order), "order {order}");
    }
}
