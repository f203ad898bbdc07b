//! Uniform Cartesian grids, grid-sampled scalar fields, and the piecewise
//! multilinear interpolation used by every other module.
//!
//! A [`Grid`] is an axis-aligned box `[lo, hi]` discretized with `n[k]` nodes
//! per axis. Node coordinates are always computed directly from the
//! multi-index (never by accumulation), so they are bit-stable across calls,
//! and the last node of each axis is pinned to `hi[k]` exactly.

use crate::error::GridError;

/// A point in `D`-dimensional space.
pub type Point<const D: usize> = [f64; D];

/// A multi-index addressing one grid node.
pub type NodeIndex<const D: usize> = [usize; D];

pub(crate) fn sub<const D: usize>(a: Point<D>, b: Point<D>) -> Point<D> {
    std::array::from_fn(|k| a[k] - b[k])
}

pub(crate) fn dist<const D: usize>(a: Point<D>, b: Point<D>) -> f64 {
    sub(a, b).iter().map(|d| d * d).sum::<f64>().sqrt()
}

/// A viewpoint somewhere in the grid box, not necessarily on a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewpoint<const D: usize> {
    point: Point<D>,
}

impl<const D: usize> Viewpoint<D> {
    pub fn new(point: Point<D>) -> Self {
        Viewpoint { point }
    }

    pub fn point(&self) -> Point<D> {
        self.point
    }
}

/// Uniform Cartesian lattice over an axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid<const D: usize> {
    lo: [f64; D],
    hi: [f64; D],
    n: [usize; D],
    h: [f64; D],
}

impl<const D: usize> Grid<D> {
    /// Build a grid over `[lo, hi]` with `n[k] >= 2` nodes per axis.
    pub fn new(lo: [f64; D], hi: [f64; D], n: [usize; D]) -> Result<Self, GridError> {
        let mut h = [0.0; D];
        for k in 0..D {
            if !(lo[k] < hi[k]) || !lo[k].is_finite() || !hi[k].is_finite() {
                return Err(GridError::EmptyAxis {
                    axis: k,
                    lo: lo[k],
                    hi: hi[k],
                });
            }
            if n[k] < 2 {
                return Err(GridError::TooFewNodes { axis: k, n: n[k] });
            }
            h[k] = (hi[k] - lo[k]) / (n[k] - 1) as f64;
        }
        Ok(Grid { lo, hi, n, h })
    }

    /// Square grid over `[-half, half]^D` with `n` nodes per axis.
    pub fn centered_cube(half: f64, n: usize) -> Result<Self, GridError> {
        Self::new([-half; D], [half; D], [n; D])
    }

    pub fn lo(&self) -> [f64; D] {
        self.lo
    }

    pub fn hi(&self) -> [f64; D] {
        self.hi
    }

    pub fn node_counts(&self) -> [usize; D] {
        self.n
    }

    /// Node spacing per axis.
    pub fn spacing(&self) -> [f64; D] {
        self.h
    }

    pub fn min_spacing(&self) -> f64 {
        self.h.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_spacing(&self) -> f64 {
        self.h.iter().copied().fold(0.0, f64::max)
    }

    /// Total number of nodes.
    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of node `i` along `axis`. The last node is pinned to
    /// `hi[axis]` so the box corners are reproduced exactly even when the
    /// spacing is not representable.
    #[inline]
    pub fn axis_coord(&self, axis: usize, i: usize) -> f64 {
        debug_assert!(i < self.n[axis]);
        if i == self.n[axis] - 1 {
            self.hi[axis]
        } else {
            self.lo[axis] + i as f64 * self.h[axis]
        }
    }

    /// Coordinate of the node with multi-index `idx`.
    ///
    /// Panics if any component of `idx` is out of range.
    #[inline]
    pub fn node_coord(&self, idx: NodeIndex<D>) -> Point<D> {
        for k in 0..D {
            assert!(
                idx[k] < self.n[k],
                "node index {} out of range on axis {k} (n = {})",
                idx[k],
                self.n[k]
            );
        }
        std::array::from_fn(|k| self.axis_coord(k, idx[k]))
    }

    /// Flat offset of `idx` in row-major order (last axis varies fastest).
    #[inline]
    pub fn flat(&self, idx: NodeIndex<D>) -> usize {
        let mut f = 0;
        for k in 0..D {
            debug_assert!(idx[k] < self.n[k]);
            f = f * self.n[k] + idx[k];
        }
        f
    }

    /// Inverse of [`Grid::flat`].
    #[inline]
    pub fn unflat(&self, mut flat: usize) -> NodeIndex<D> {
        let mut idx = [0; D];
        for k in (0..D).rev() {
            idx[k] = flat % self.n[k];
            flat /= self.n[k];
        }
        idx
    }

    /// All node multi-indices in row-major order.
    pub fn indices(&self) -> impl Iterator<Item = NodeIndex<D>> + '_ {
        (0..self.len()).map(|f| self.unflat(f))
    }

    /// Whether `p` lies in the closed box.
    pub fn contains(&self, p: Point<D>) -> bool {
        (0..D).all(|k| p[k] >= self.lo[k] && p[k] <= self.hi[k])
    }

    /// Multi-index of the node that coincides with `p` bit-exactly, if any.
    pub fn node_at(&self, p: Point<D>) -> Option<NodeIndex<D>> {
        let mut idx = [0; D];
        for k in 0..D {
            let s = ((p[k] - self.lo[k]) / self.h[k]).round();
            if !(s >= 0.0 && s <= (self.n[k] - 1) as f64) {
                return None;
            }
            let i = s as usize;
            if self.axis_coord(k, i) != p[k] {
                return None;
            }
            idx[k] = i;
        }
        Some(idx)
    }

    /// Cell index and in-cell fraction bracketing `p` along one axis.
    ///
    /// The floating-point estimate `(p - lo) / h` can land one cell off when
    /// `p` sits on (or within an ulp of) a node plane, so the result is
    /// corrected against the exact node coordinates until
    /// `coord(c) <= p < coord(c + 1)` (top cell clamped). Getting this exact
    /// matters: an off-by-one cell hands the interpolation a stray corner
    /// with ulp-sized weight on the wrong side of the sweep front.
    pub(crate) fn axis_cell(&self, axis: usize, p: f64) -> (usize, f64) {
        let s = ((p - self.lo[axis]) / self.h[axis]).floor();
        let mut c = (s as isize).clamp(0, self.n[axis] as isize - 2) as usize;
        while c > 0 && p < self.axis_coord(axis, c) {
            c -= 1;
        }
        while c + 2 < self.n[axis] && p >= self.axis_coord(axis, c + 1) {
            c += 1;
        }
        let t = ((p - self.axis_coord(axis, c)) / self.h[axis]).clamp(0.0, 1.0);
        (c, t)
    }

    /// Lower corner of the cell containing `p`, clamped so the cell always
    /// has an upper neighbor.
    pub fn anchor_cell(&self, p: Point<D>) -> NodeIndex<D> {
        std::array::from_fn(|k| self.axis_cell(k, p[k]).0)
    }

    /// The axis-aligned box spanned by the immediate neighbors of `idx`,
    /// clipped to the domain at boundary nodes.
    pub fn neighbor_box(&self, idx: NodeIndex<D>) -> (Point<D>, Point<D>) {
        let bl = std::array::from_fn(|k| self.axis_coord(k, idx[k].saturating_sub(1)));
        let bh = std::array::from_fn(|k| self.axis_coord(k, (idx[k] + 1).min(self.n[k] - 1)));
        (bl, bh)
    }

    /// Foot point of the ray from node `idx` toward `target`: the first
    /// intersection of the segment with the neighbor-box boundary, or the
    /// target itself when it already lies inside the neighbor box.
    ///
    /// Ties (the segment leaving through an edge or corner of the box) resolve
    /// to the lowest axis, which leaves the interpolated value unchanged.
    pub fn ray_foot(&self, idx: NodeIndex<D>, target: Point<D>) -> Result<Foot<D>, GridError> {
        let x = self.node_coord(idx);
        if x == target {
            return Err(GridError::DegenerateRay);
        }
        let (bl, bh) = self.neighbor_box(idx);
        if (0..D).all(|k| target[k] >= bl[k] && target[k] <= bh[k]) {
            return Ok(Foot::Target);
        }
        let d = sub(target, x);
        let (point, distance) = box_exit(x, d, bl, bh);
        Ok(Foot::Point { point, distance })
    }

    /// Foot point of the ray leaving node `idx` directly away from `source`:
    /// the first intersection of `x + t (x - source)`, `t > 0`, with the
    /// neighbor-box boundary. Returns [`OutwardFoot::Outflow`] when the ray
    /// immediately leaves the domain.
    pub fn outward_foot(
        &self,
        idx: NodeIndex<D>,
        source: Point<D>,
    ) -> Result<OutwardFoot<D>, GridError> {
        let x = self.node_coord(idx);
        if x == source {
            return Err(GridError::DegenerateRay);
        }
        let (bl, bh) = self.neighbor_box(idx);
        let d = sub(x, source);
        let (point, distance) = box_exit(x, d, bl, bh);
        if distance == 0.0 {
            return Ok(OutwardFoot::Outflow);
        }
        Ok(OutwardFoot::Point { point, distance })
    }
}

/// First exit of the ray `x + t d`, `t > 0`, from the box `[bl, bh]`
/// containing `x`. The exit coordinate on the crossed face is set to the face
/// value exactly; the remaining coordinates are clamped into the box.
pub(crate) fn box_exit<const D: usize>(
    x: Point<D>,
    d: Point<D>,
    bl: Point<D>,
    bh: Point<D>,
) -> (Point<D>, f64) {
    let mut t_min = f64::INFINITY;
    let mut axis = usize::MAX;
    for k in 0..D {
        let t = if d[k] > 0.0 {
            (bh[k] - x[k]) / d[k]
        } else if d[k] < 0.0 {
            (bl[k] - x[k]) / d[k]
        } else {
            continue;
        };
        if t < t_min {
            t_min = t;
            axis = k;
        }
    }
    debug_assert!(axis != usize::MAX, "ray direction must be nonzero");
    let mut p: Point<D> = std::array::from_fn(|k| (x[k] + t_min * d[k]).clamp(bl[k], bh[k]));
    p[axis] = if d[axis] > 0.0 { bh[axis] } else { bl[axis] };
    (p, dist(x, p))
}

/// Result of [`Grid::ray_foot`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Foot<const D: usize> {
    /// The target point lies inside the neighbor box; the upwind value is the
    /// value stored for the target itself.
    Target,
    /// Exit point through the neighbor-box boundary and its distance from the
    /// node. `distance >= min_k h_k` always holds here, since the exit lies on
    /// a face of the box around the node.
    Point { point: Point<D>, distance: f64 },
}

/// Result of [`Grid::outward_foot`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OutwardFoot<const D: usize> {
    /// The outward ray leaves the domain immediately; no upwind neighbor
    /// exists and the boundary condition applies.
    Outflow,
    Point { point: Point<D>, distance: f64 },
}

/// Real values attached to every node of a grid, stored in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField<const D: usize> {
    grid: Grid<D>,
    values: Vec<f64>,
}

impl<const D: usize> ScalarField<D> {
    /// Sample `f` at every node.
    pub fn from_fn(grid: Grid<D>, mut f: impl FnMut(Point<D>) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|flat| f(grid.node_coord(grid.unflat(flat))))
            .collect();
        ScalarField { grid, values }
    }

    /// Wrap values produced by in-crate sampling, which already match the
    /// grid layout.
    pub(crate) fn from_raw(grid: Grid<D>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        ScalarField { grid, values }
    }

    /// Wrap existing row-major values; the length must match the grid and all
    /// values must be finite.
    pub fn from_values(grid: Grid<D>, values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::LengthMismatch {
                len: values.len(),
                expected: grid.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(GridError::NonFinite { index });
        }
        Ok(ScalarField { grid, values })
    }

    pub fn constant(grid: Grid<D>, c: f64) -> Self {
        let values = vec![c; grid.len()];
        ScalarField { grid, values }
    }

    pub fn grid(&self) -> &Grid<D> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn at(&self, idx: NodeIndex<D>) -> f64 {
        self.values[self.grid.flat(idx)]
    }

    #[inline]
    pub(crate) fn set(&mut self, idx: NodeIndex<D>, v: f64) {
        let f = self.grid.flat(idx);
        self.values[f] = v;
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| v.abs().max(m))
    }

    /// Largest absolute nodewise difference. Errors if the grids differ.
    pub fn sup_distance(&self, other: &Self) -> Result<f64, GridError> {
        if self.grid != other.grid {
            return Err(GridError::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| (a - b).abs().max(m)))
    }

    /// Apply `f` nodewise.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Combine two fields nodewise. Errors if the grids differ.
    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self, GridError> {
        if self.grid != other.grid {
            return Err(GridError::GridMismatch);
        }
        Ok(ScalarField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Piecewise multilinear interpolation at `p`. Exact at nodes; on a cell
    /// face it reduces to the multilinear interpolation of that face's
    /// corners. Errors if `p` lies outside the closed box.
    pub fn interp(&self, p: Point<D>) -> Result<f64, GridError> {
        if !self.grid.contains(p) {
            return Err(GridError::OutsideDomain {
                point: p.to_vec(),
            });
        }
        Ok(self.interp_inside(p))
    }

    /// Interpolation for points already known to lie in the closed box.
    ///
    /// The result is clamped to the hull of the corner values that carry
    /// nonzero weight, so it never escapes the range of the values it reads,
    /// even under floating-point rounding.
    pub(crate) fn interp_inside(&self, p: Point<D>) -> f64 {
        let g = &self.grid;
        if let Some(idx) = g.node_at(p) {
            return self.at(idx);
        }
        let mut cell = [0usize; D];
        let mut frac = [0.0f64; D];
        for k in 0..D {
            let (c, t) = g.axis_cell(k, p[k]);
            cell[k] = c;
            frac[k] = t;
        }
        let mut sum = 0.0;
        let mut lo_v = f64::INFINITY;
        let mut hi_v = f64::NEG_INFINITY;
        for corner in 0..(1usize << D) {
            let mut w = 1.0;
            let mut idx = cell;
            for k in 0..D {
                if corner >> k & 1 == 1 {
                    idx[k] += 1;
                    w *= frac[k];
                } else {
                    w *= 1.0 - frac[k];
                }
            }
            if w > 0.0 {
                let v = self.at(idx);
                sum += w * v;
                lo_v = lo_v.min(v);
                hi_v = hi_v.max(v);
            }
        }
        sum.clamp(lo_v, hi_v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid2(n: usize) -> Grid<2> {
        Grid::<2>::centered_cube(1.0, n).unwrap()
    }

    #[test]
    fn node_coords_at_corners_and_center() {
        let g = grid2(3);
        assert_eq!(g.node_coord([0, 0]), [-1.0, -1.0]);
        assert_eq!(g.node_coord([1, 1]), [0.0, 0.0]);
        assert_eq!(g.node_coord([2, 2]), [1.0, 1.0]);
    }

    #[test]
    fn node_coord_matches_direct_formula_on_32_grid() {
        let g = grid2(32);
        let h = 2.0 / 31.0;
        assert_eq!(g.spacing(), [h, h]);
        // Direct evaluation of lo + i*h lands exactly on the box corner here.
        assert_eq!(-1.0 + 31.0 * h, 1.0);
        assert_eq!(g.node_coord([31, 0]), [1.0, -1.0]);
        assert_eq!(g.node_coord([7, 20]), [-1.0 + 7.0 * h, -1.0 + 20.0 * h]);
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn node_coord_rejects_out_of_range() {
        let g = grid2(3);
        let _ = g.node_coord([3, 0]);
    }

    #[test]
    fn flat_round_trips_row_major() {
        let g = Grid::new([0.0, 0.0], [1.0, 1.0], [3, 4]).unwrap();
        // Row-major: last axis fastest.
        assert_eq!(g.flat([0, 0]), 0);
        assert_eq!(g.flat([0, 1]), 1);
        assert_eq!(g.flat([1, 0]), 4);
        assert_eq!(g.flat([2, 3]), 11);
        for f in 0..g.len() {
            assert_eq!(g.flat(g.unflat(f)), f);
        }
    }

    #[test]
    fn interp_is_exact_at_nodes() {
        let g = grid2(5);
        let field = ScalarField::from_fn(g, |p| (3.1 * p[0]).sin() + p[1] * p[1]);
        for idx in g.indices() {
            let p = g.node_coord(idx);
            assert_eq!(field.interp(p).unwrap(), field.at(idx));
        }
    }

    #[test]
    fn interp_of_affine_sum_at_sample_point() {
        let g = grid2(7);
        let field = ScalarField::from_fn(g, |p| p[0] + p[1]);
        let v = field.interp([0.3, -0.2]).unwrap();
        assert!((v - 0.1).abs() < 1e-15, "got {v}");
    }

    #[test]
    fn interp_of_product_on_single_cell_is_corner_average() {
        // Bilinear through corners (+1, -1, -1, +1) of x*y on [-1,1]^2
        // evaluates to (1 - 1 - 1 + 1)/4 = 0 at the cell center.
        let g = grid2(2);
        let field = ScalarField::from_fn(g, |p| p[0] * p[1]);
        assert_eq!(field.interp([0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn interp_rejects_outside_points() {
        let g = grid2(3);
        let field = ScalarField::constant(g, 1.0);
        assert!(matches!(
            field.interp([1.5, 0.0]),
            Err(GridError::OutsideDomain { .. })
        ));
    }

    #[test]
    fn ray_foot_axis_aligned() {
        let g = Grid::new([-4.0, -4.0], [4.0, 4.0], [9, 9]).unwrap();
        // h = 1; node (4,4) sits at the origin.
        let foot = g.ray_foot([4, 4], [-5.0, 0.0]).unwrap();
        assert_eq!(
            foot,
            Foot::Point {
                point: [-1.0, 0.0],
                distance: 1.0
            }
        );
    }

    #[test]
    fn ray_foot_returns_target_inside_neighbor_box() {
        let g = Grid::new([-4.0, -4.0], [4.0, 4.0], [9, 9]).unwrap();
        let foot = g.ray_foot([4, 4], [-0.5, -0.5]).unwrap();
        assert_eq!(foot, Foot::Target);
    }

    #[test]
    fn ray_foot_oblique_exit() {
        let g = Grid::new([-4.0, -4.0], [4.0, 4.0], [9, 9]).unwrap();
        let foot = g.ray_foot([4, 4], [-2.0, -1.0]).unwrap();
        match foot {
            Foot::Point { point, .. } => assert_eq!(point, [-1.0, -0.5]),
            other => panic!("unexpected foot {other:?}"),
        }
    }

    #[test]
    fn ray_foot_rejects_degenerate_ray() {
        let g = grid2(3);
        assert!(matches!(
            g.ray_foot([1, 1], [0.0, 0.0]),
            Err(GridError::DegenerateRay)
        ));
    }

    #[test]
    fn ray_foot_through_diagonal_node_interpolates_consistently() {
        // The segment passes exactly through the corner neighbor; whichever
        // face the tie resolves to, interpolation there returns the corner
        // node's value.
        let g = Grid::new([-4.0, -4.0], [4.0, 4.0], [9, 9]).unwrap();
        let field = ScalarField::from_fn(g, |p| p[0] * 2.0 + p[1] * 7.0 + 0.5);
        let foot = g.ray_foot([4, 4], [-3.0, -3.0]).unwrap();
        match foot {
            Foot::Point { point, .. } => {
                assert_eq!(point, [-1.0, -1.0]);
                assert_eq!(field.interp(point).unwrap(), field.at([3, 3]));
            }
            other => panic!("unexpected foot {other:?}"),
        }
    }

    #[test]
    fn outward_foot_flows_out_at_the_boundary() {
        let g = grid2(5);
        // Corner node with the source inside: the outward ray leaves at once.
        let foot = g.outward_foot([0, 0], [0.1, 0.2]).unwrap();
        assert_eq!(foot, OutwardFoot::Outflow);
        // Same node, source on the same boundary face: the ray runs along the
        // face and has a proper foot.
        let foot = g.outward_foot([0, 2], [-1.0, 0.9]).unwrap();
        match foot {
            OutwardFoot::Point { point, .. } => assert_eq!(point, [-1.0, -0.5]),
            other => panic!("unexpected foot {other:?}"),
        }
    }

    #[test]
    fn node_at_detects_exact_nodes_only() {
        let g = grid2(32);
        assert_eq!(g.node_at([1.0, -1.0]), Some([31, 0]));
        assert_eq!(g.node_at([1.0 - 1e-13, -1.0]), None);
        assert_eq!(g.node_at([2.0, 0.0]), None);
    }

    proptest! {
        #[test]
        fn interp_reproduces_affine_functions(
            a in -5.0f64..5.0,
            b in -5.0f64..5.0,
            c in -5.0f64..5.0,
            px in -1.0f64..1.0,
            py in -1.0f64..1.0,
            n in 2usize..12,
        ) {
            let g = grid2(n);
            let f = |p: [f64; 2]| a * p[0] + b * p[1] + c;
            let field = ScalarField::from_fn(g, f);
            let exact = f([px, py]);
            let got = field.interp([px, py]).unwrap();
            let scale = 1.0 + exact.abs();
            prop_assert!((got - exact).abs() <= 1e-12 * scale,
                "interp {got} vs exact {exact}");
        }

        #[test]
        fn ray_foot_lies_on_segment_inside_neighbor_box(
            ix in 0usize..9,
            iy in 0usize..9,
            tx in -4.0f64..4.0,
            ty in -4.0f64..4.0,
        ) {
            let g = Grid::new([-4.0, -4.0], [4.0, 4.0], [9, 9]).unwrap();
            let x = g.node_coord([ix, iy]);
            prop_assume!(x != [tx, ty]);
            match g.ray_foot([ix, iy], [tx, ty]).unwrap() {
                Foot::Target => {
                    prop_assert!((x[0] - tx).abs() <= 1.0 && (x[1] - ty).abs() <= 1.0);
                }
                Foot::Point { point, distance } => {
                    prop_assert!(distance > 0.0);
                    prop_assert!(distance <= 2.0f64.sqrt() * 1.0 + 1e-12);
                    // Collinearity: (foot - x) x (target - x) = 0.
                    let u = sub(point, x);
                    let v = sub([tx, ty], x);
                    let cross = u[0] * v[1] - u[1] * v[0];
                    prop_assert!(cross.abs() <= 1e-12 * (1.0 + v[0].abs() + v[1].abs()));
                    // Between x and the target.
                    let dot = u[0] * v[0] + u[1] * v[1];
                    prop_assert!(dot >= 0.0);
                    prop_assert!(u[0].abs() <= v[0].abs() + 1e-12 && u[1].abs() <= v[1].abs() + 1e-12);
                }
            }
        }

        #[test]
        fn node_coord_is_bit_stable(ix in 0usize..32, iy in 0usize..32) {
            let g = grid2(32);
            let a = g.node_coord([ix, iy]);
            let b = g.node_coord([ix, iy]);
            prop_assert_eq!(a, b);
            prop_assert!(g.contains(a));
        }
    }
}
