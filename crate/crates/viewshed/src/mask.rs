//! Boolean fields over a grid and a few set-level queries on them.

use std::collections::VecDeque;

use crate::grid::{Grid, NodeIndex, ScalarField};

/// One boolean per grid node, row-major like [`ScalarField`].
#[derive(Debug, Clone, PartialEq)]
pub struct Mask<const D: usize> {
    grid: Grid<D>,
    values: Vec<bool>,
}

impl<const D: usize> Mask<D> {
    pub fn grid(&self) -> &Grid<D> {
        &self.grid
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn at(&self, idx: NodeIndex<D>) -> bool {
        self.values[self.grid.flat(idx)]
    }

    pub fn count_true(&self) -> usize {
        self.values.iter().filter(|&&v| v).count()
    }
}

/// The visibility mask at level `alpha`: true where `u <= alpha`.
pub fn sublevel<const D: usize>(u: &ScalarField<D>, alpha: f64) -> Mask<D> {
    Mask {
        grid: *u.grid(),
        values: u.values().iter().map(|&v| v <= alpha).collect(),
    }
}

/// Number of face-connected components of the true region.
pub fn connected_components<const D: usize>(mask: &Mask<D>) -> usize {
    let grid = &mask.grid;
    let n = grid.node_counts();
    let mut seen = vec![false; grid.len()];
    let mut components = 0;
    let mut queue = VecDeque::new();
    for start in 0..grid.len() {
        if !mask.values[start] || seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(flat) = queue.pop_front() {
            let idx = grid.unflat(flat);
            for k in 0..D {
                for step in [-1isize, 1] {
                    let j = idx[k] as isize + step;
                    if j < 0 || j >= n[k] as isize {
                        continue;
                    }
                    let mut nb = idx;
                    nb[k] = j as usize;
                    let f = grid.flat(nb);
                    if mask.values[f] && !seen[f] {
                        seen[f] = true;
                        queue.push_back(f);
                    }
                }
            }
        }
    }
    components
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_fields_are_all_or_nothing() {
        let grid = Grid::<2>::centered_cube(1.0, 4).unwrap();
        let u = ScalarField::constant(grid, 0.5);
        assert_eq!(sublevel(&u, 0.5).count_true(), grid.len());
        assert_eq!(sublevel(&u, 0.49).count_true(), 0);
    }

    #[test]
    fn components_of_a_split_stripe() {
        // True on the left and right thirds, false in the middle.
        let grid = Grid::new([-1.0, -1.0], [1.0, 1.0], [9, 9]).unwrap();
        let u = ScalarField::from_fn(grid, |p| if p[0].abs() < 0.3 { 1.0 } else { -1.0 });
        let mask = sublevel(&u, 0.0);
        assert_eq!(connected_components(&mask), 2);
    }

    #[test]
    fn empty_mask_has_no_components() {
        let grid = Grid::<2>::centered_cube(1.0, 3).unwrap();
        let u = ScalarField::constant(grid, 1.0);
        assert_eq!(connected_components(&sublevel(&u, 0.0)), 0);
    }

    #[test]
    fn diagonal_touch_does_not_connect() {
        let grid = Grid::new([0.0, 0.0], [1.0, 1.0], [2, 2]).unwrap();
        let u = ScalarField::from_values(grid, vec![-1.0, 1.0, 1.0, -1.0]).unwrap();
        assert_eq!(connected_components(&sublevel(&u, 0.0)), 2);
    }
}
