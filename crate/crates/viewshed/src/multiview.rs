//! Visibility from several viewpoints at once.
//!
//! Per-viewpoint solves are independent, and set semantics reduce to
//! nodewise combinations: "seen by any viewpoint" is the nodewise minimum of
//! the individual envelopes, "seen by all" the maximum, and "seen by at least
//! k" the k-th smallest. No single-viewpoint equation exists for the latter
//! two, but their sublevel sets are exactly the intended intersections.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::ComposeError;
use crate::grid::{ScalarField, Viewpoint};
use crate::sweep::{solve, SolveReport, SolverConfig};

/// A non-empty list of viewpoints. Duplicates are allowed; composition is
/// idempotent over them.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewpointSet<const D: usize> {
    viewpoints: Vec<Viewpoint<D>>,
}

impl<const D: usize> ViewpointSet<D> {
    pub fn new(viewpoints: Vec<Viewpoint<D>>) -> Result<Self, ComposeError> {
        if viewpoints.is_empty() {
            return Err(ComposeError::EmptyViewpoints);
        }
        Ok(ViewpointSet { viewpoints })
    }

    pub fn viewpoints(&self) -> &[Viewpoint<D>] {
        &self.viewpoints
    }

    pub fn len(&self) -> usize {
        self.viewpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Upper-envelope solve for each viewpoint, run concurrently.
///
/// `viewpoint_values` optionally pins the exact obstacle value at each
/// viewpoint, in the same order as the set.
pub fn solve_each<const D: usize>(
    g: &ScalarField<D>,
    vps: &ViewpointSet<D>,
    viewpoint_values: Option<&[f64]>,
) -> Result<Vec<SolveReport<D>>, ComposeError> {
    if let Some(values) = viewpoint_values {
        if values.len() != vps.len() {
            return Err(ComposeError::BadCount {
                k: values.len(),
                len: vps.len(),
            });
        }
    }
    vps.viewpoints
        .par_iter()
        .enumerate()
        .map(|(i, vp)| {
            let mut cfg = SolverConfig::upper(*vp);
            if let Some(values) = viewpoint_values {
                cfg = cfg.with_viewpoint_value(values[i]);
            }
            solve(g, &cfg).map_err(ComposeError::from)
        })
        .collect()
}

/// Envelope whose sublevel sets are visible from *any* of the viewpoints:
/// the nodewise minimum of the per-viewpoint solutions.
pub fn solve_any<const D: usize>(
    g: &ScalarField<D>,
    vps: &ViewpointSet<D>,
) -> Result<ScalarField<D>, ComposeError> {
    let fields: Vec<_> = solve_each(g, vps, None)?
        .into_iter()
        .map(|r| r.solution)
        .collect();
    compose(&fields, &ComposeExpr::min_of_all(fields.len()))
}

/// Envelope whose sublevel sets are visible from *all* viewpoints: the
/// nodewise maximum of the per-viewpoint solutions.
pub fn solve_all<const D: usize>(
    g: &ScalarField<D>,
    vps: &ViewpointSet<D>,
) -> Result<ScalarField<D>, ComposeError> {
    let fields: Vec<_> = solve_each(g, vps, None)?
        .into_iter()
        .map(|r| r.solution)
        .collect();
    compose(&fields, &ComposeExpr::max_of_all(fields.len()))
}

/// Nodewise min/max expression over a list of fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum ComposeExpr {
    /// The i-th input field.
    Leaf { index: usize },
    Min { children: Vec<ComposeExpr> },
    Max { children: Vec<ComposeExpr> },
    /// k-th smallest of the children per node; its sublevel set is the region
    /// covered by at least k of the children's sublevel sets.
    AtLeast { k: usize, children: Vec<ComposeExpr> },
}

impl ComposeExpr {
    pub fn min_of_all(len: usize) -> Self {
        ComposeExpr::Min {
            children: (0..len).map(|index| ComposeExpr::Leaf { index }).collect(),
        }
    }

    pub fn max_of_all(len: usize) -> Self {
        ComposeExpr::Max {
            children: (0..len).map(|index| ComposeExpr::Leaf { index }).collect(),
        }
    }

    pub fn at_least_of_all(k: usize, len: usize) -> Self {
        ComposeExpr::AtLeast {
            k,
            children: (0..len).map(|index| ComposeExpr::Leaf { index }).collect(),
        }
    }

    fn validate(&self, len: usize) -> Result<(), ComposeError> {
        match self {
            ComposeExpr::Leaf { index } => {
                if *index >= len {
                    return Err(ComposeError::LeafOutOfRange { index: *index, len });
                }
            }
            ComposeExpr::Min { children } | ComposeExpr::Max { children } => {
                if children.is_empty() {
                    return Err(ComposeError::EmptyNode);
                }
                for c in children {
                    c.validate(len)?;
                }
            }
            ComposeExpr::AtLeast { k, children } => {
                if children.is_empty() {
                    return Err(ComposeError::EmptyNode);
                }
                if *k < 1 || *k > children.len() {
                    return Err(ComposeError::BadCount {
                        k: *k,
                        len: children.len(),
                    });
                }
                for c in children {
                    c.validate(len)?;
                }
            }
        }
        Ok(())
    }

    fn eval(&self, per_field: &[f64]) -> f64 {
        match self {
            ComposeExpr::Leaf { index } => per_field[*index],
            ComposeExpr::Min { children } => children
                .iter()
                .map(|c| c.eval(per_field))
                .fold(f64::INFINITY, f64::min),
            ComposeExpr::Max { children } => children
                .iter()
                .map(|c| c.eval(per_field))
                .fold(f64::NEG_INFINITY, f64::max),
            ComposeExpr::AtLeast { k, children } => {
                let mut vals: Vec<f64> = children.iter().map(|c| c.eval(per_field)).collect();
                let (_, kth, _) = vals.select_nth_unstable_by(*k - 1, f64::total_cmp);
                *kth
            }
        }
    }
}

/// Evaluate a composition tree nodewise over fields on a common grid.
pub fn compose<const D: usize>(
    fields: &[ScalarField<D>],
    expr: &ComposeExpr,
) -> Result<ScalarField<D>, ComposeError> {
    let first = fields.first().ok_or(ComposeError::EmptyViewpoints)?;
    let grid = *first.grid();
    if fields.iter().any(|f| f.grid() != &grid) {
        return Err(ComposeError::GridMismatch);
    }
    expr.validate(fields.len())?;
    let mut scratch = vec![0.0; fields.len()];
    let values = (0..grid.len())
        .map(|flat| {
            for (s, f) in scratch.iter_mut().zip(fields) {
                *s = f.values()[flat];
            }
            expr.eval(&scratch)
        })
        .collect();
    Ok(ScalarField::from_raw(grid, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::obstacle::scenes;
    use proptest::prelude::*;

    fn set<const D: usize>(points: &[[f64; D]]) -> ViewpointSet<D> {
        ViewpointSet::new(points.iter().copied().map(Viewpoint::new).collect()).unwrap()
    }

    #[test]
    fn empty_viewpoint_set_is_rejected() {
        assert!(matches!(
            ViewpointSet::<2>::new(vec![]),
            Err(ComposeError::EmptyViewpoints)
        ));
    }

    #[test]
    fn single_viewpoint_matches_plain_solve() {
        let grid = Grid::<2>::centered_cube(1.0, 17).unwrap();
        let g = scenes::cone::<2>().sample(&grid);
        let vp = [-0.7, 0.2];
        let direct = solve(&g, &SolverConfig::upper(Viewpoint::new(vp)))
            .unwrap()
            .solution;
        let any = solve_any(&g, &set(&[vp])).unwrap();
        let all = solve_all(&g, &set(&[vp])).unwrap();
        assert_eq!(direct.values(), any.values());
        assert_eq!(direct.values(), all.values());
    }

    #[test]
    fn duplicate_viewpoints_change_nothing() {
        let grid = Grid::<2>::centered_cube(1.0, 13).unwrap();
        let g = scenes::four_obstacles().sample(&grid);
        let vp = [0.4, -0.9];
        let once = solve_any(&g, &set(&[vp])).unwrap();
        let twice = solve_any(&g, &set(&[vp, vp])).unwrap();
        assert_eq!(once.values(), twice.values());
    }

    #[test]
    fn any_is_min_and_all_is_max_of_individual_solves() {
        let grid = Grid::<2>::centered_cube(2.0, 21).unwrap();
        let g = scenes::four_obstacles().sample(&grid);
        let vps = set(&[[-1.5, -1.4], [1.5, -0.3]]);
        let each: Vec<_> = solve_each(&g, &vps, None)
            .unwrap()
            .into_iter()
            .map(|r| r.solution)
            .collect();
        let any = solve_any(&g, &vps).unwrap();
        let all = solve_all(&g, &vps).unwrap();
        for flat in 0..grid.len() {
            let a = each[0].values()[flat];
            let b = each[1].values()[flat];
            assert_eq!(any.values()[flat], a.min(b));
            assert_eq!(all.values()[flat], a.max(b));
            assert!(any.values()[flat] <= a && a <= all.values()[flat]);
        }
    }

    #[test]
    fn adding_a_viewpoint_grows_any_and_shrinks_all() {
        let grid = Grid::<2>::centered_cube(2.0, 17).unwrap();
        let g = scenes::four_obstacles().sample(&grid);
        let two = set(&[[-1.5, -1.4], [1.5, -0.3]]);
        let three = set(&[[-1.5, -1.4], [1.5, -0.3], [0.0, 1.8]]);
        let any2 = solve_any(&g, &two).unwrap();
        let any3 = solve_any(&g, &three).unwrap();
        let all2 = solve_all(&g, &two).unwrap();
        let all3 = solve_all(&g, &three).unwrap();
        for flat in 0..grid.len() {
            assert!(any3.values()[flat] <= any2.values()[flat]);
            assert!(all3.values()[flat] >= all2.values()[flat]);
        }
    }

    #[test]
    fn leaf_composition_is_identity() {
        let grid = Grid::<2>::centered_cube(1.0, 5).unwrap();
        let f = ScalarField::from_fn(grid, |p| p[0] - 2.0 * p[1]);
        let out = compose(
            &[f.clone()],
            &ComposeExpr::Leaf { index: 0 },
        )
        .unwrap();
        assert_eq!(out.values(), f.values());
    }

    #[test]
    fn mixed_tree_hand_evaluation() {
        // min{u1, max{u2, u3}} at a node with values (-1, 1, -1) gives -1.
        let grid = Grid::new([0.0], [1.0], [2]).unwrap();
        let fields = [
            ScalarField::constant(grid, -1.0),
            ScalarField::constant(grid, 1.0),
            ScalarField::constant(grid, -1.0),
        ];
        let expr = ComposeExpr::Min {
            children: vec![
                ComposeExpr::Leaf { index: 0 },
                ComposeExpr::Max {
                    children: vec![
                        ComposeExpr::Leaf { index: 1 },
                        ComposeExpr::Leaf { index: 2 },
                    ],
                },
            ],
        };
        let out = compose(&fields, &expr).unwrap();
        assert_eq!(out.values(), &[-1.0, -1.0]);
    }

    #[test]
    fn compose_validates_inputs() {
        let grid = Grid::<2>::centered_cube(1.0, 3).unwrap();
        let other = Grid::<2>::centered_cube(1.0, 4).unwrap();
        let f = ScalarField::constant(grid, 0.0);
        let g = ScalarField::constant(other, 0.0);
        assert!(matches!(
            compose(&[f.clone(), g], &ComposeExpr::min_of_all(2)),
            Err(ComposeError::GridMismatch)
        ));
        assert!(matches!(
            compose(&[f.clone()], &ComposeExpr::Leaf { index: 3 }),
            Err(ComposeError::LeafOutOfRange { index: 3, len: 1 })
        ));
        assert!(matches!(
            compose(&[f.clone()], &ComposeExpr::at_least_of_all(2, 1)),
            Err(ComposeError::BadCount { k: 2, len: 1 })
        ));
        assert!(matches!(
            compose(&[f], &ComposeExpr::Min { children: vec![] }),
            Err(ComposeError::EmptyNode)
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn at_least_two_of_three_is_min_of_pairwise_maxes(
            a in -5.0f64..5.0,
            b in -5.0f64..5.0,
            c in -5.0f64..5.0,
        ) {
            let grid = Grid::new([0.0], [1.0], [2]).unwrap();
            let fields = [
                ScalarField::constant(grid, a),
                ScalarField::constant(grid, b),
                ScalarField::constant(grid, c),
            ];
            let direct = compose(&fields, &ComposeExpr::at_least_of_all(2, 3)).unwrap();
            let pairwise = a.max(b).min(a.max(c)).min(b.max(c));
            prop_assert_eq!(direct.values()[0], pairwise);
        }

        #[test]
        fn permutation_invariant_trees_ignore_field_order(
            a in -5.0f64..5.0,
            b in -5.0f64..5.0,
            c in -5.0f64..5.0,
        ) {
            let grid = Grid::new([0.0], [1.0], [2]).unwrap();
            let make = |x: f64| ScalarField::constant(grid, x);
            let abc = [make(a), make(b), make(c)];
            let cab = [make(c), make(a), make(b)];
            for expr in [
                ComposeExpr::min_of_all(3),
                ComposeExpr::max_of_all(3),
                ComposeExpr::at_least_of_all(2, 3),
            ] {
                let one = compose(&abc, &expr).unwrap();
                let two = compose(&cab, &expr).unwrap();
                prop_assert_eq!(one.values(), two.values());
            }
        }
    }
}
