//! Obstacle functions with the sign convention used throughout the crate:
//! positive strictly inside obstacle material, negative strictly outside.
//!
//! Obstacles are declarative trees of primitives and pointwise combinators,
//! evaluable anywhere, plus inflated point clouds with an exact
//! nearest-neighbor distance.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::CloudError;
use crate::grid::{dist, Grid, Point, ScalarField};

fn dot<const D: usize>(a: Point<D>, b: Point<D>) -> f64 {
    (0..D).map(|k| a[k] * b[k]).sum()
}

fn dist_sq<const D: usize>(a: Point<D>, b: Point<D>) -> f64 {
    (0..D).map(|k| (a[k] - b[k]) * (a[k] - b[k])).sum()
}

/// A user-supplied obstacle function.
#[derive(Clone)]
pub struct AnalyticFn<const D: usize>(pub Arc<dyn Fn(Point<D>) -> f64 + Send + Sync>);

impl<const D: usize> fmt::Debug for AnalyticFn<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("AnalyticFn")
    }
}

/// Declarative description of an obstacle function.
///
/// Primitives follow the inside-positive convention; combinators apply
/// pointwise. `Min` and `Max` require at least one child.
#[derive(Debug, Clone)]
pub enum ObstacleSpec<const D: usize> {
    /// The constant function.
    Constant(f64),
    /// `-|p - apex|`: zero at the apex, negative elsewhere. Its superlevel
    /// sets are balls around the apex.
    Cone { apex: Point<D> },
    /// `radius - |p - center|`: positive inside the ball.
    Ball { center: Point<D>, radius: f64 },
    /// `min_k (half_extent[k] - |p[k] - center[k]|)`: positive inside the
    /// axis-aligned box, zero on its boundary.
    Box {
        center: Point<D>,
        half_extent: [f64; D],
    },
    /// `offset - normal . p`: positive on the inner side of the plane.
    Halfspace { normal: Point<D>, offset: f64 },
    /// Inflated point cloud: `radius - dist(p, nearest cloud point)`.
    Cloud(PointCloud<D>),
    /// Arbitrary callback; not expressible in configuration files.
    Analytic(AnalyticFn<D>),
    Negate(std::boxed::Box<ObstacleSpec<D>>),
    Min(Vec<ObstacleSpec<D>>),
    Max(Vec<ObstacleSpec<D>>),
    Scale {
        factor: f64,
        child: std::boxed::Box<ObstacleSpec<D>>,
    },
    Offset {
        shift: f64,
        child: std::boxed::Box<ObstacleSpec<D>>,
    },
}

impl<const D: usize> ObstacleSpec<D> {
    pub fn analytic(f: impl Fn(Point<D>) -> f64 + Send + Sync + 'static) -> Self {
        ObstacleSpec::Analytic(AnalyticFn(Arc::new(f)))
    }

    /// Evaluate the obstacle function at `p`.
    pub fn eval(&self, p: Point<D>) -> f64 {
        match self {
            ObstacleSpec::Constant(c) => *c,
            ObstacleSpec::Cone { apex } => -dist(p, *apex),
            ObstacleSpec::Ball { center, radius } => radius - dist(p, *center),
            ObstacleSpec::Box {
                center,
                half_extent,
            } => (0..D)
                .map(|k| half_extent[k] - (p[k] - center[k]).abs())
                .fold(f64::INFINITY, f64::min),
            ObstacleSpec::Halfspace { normal, offset } => offset - dot(*normal, p),
            ObstacleSpec::Cloud(cloud) => cloud.radius() - cloud.nearest_distance(p),
            ObstacleSpec::Analytic(f) => (f.0)(p),
            ObstacleSpec::Negate(child) => -child.eval(p),
            ObstacleSpec::Min(children) => children
                .iter()
                .map(|c| c.eval(p))
                .fold(f64::INFINITY, f64::min),
            ObstacleSpec::Max(children) => children
                .iter()
                .map(|c| c.eval(p))
                .fold(f64::NEG_INFINITY, f64::max),
            ObstacleSpec::Scale { factor, child } => factor * child.eval(p),
            ObstacleSpec::Offset { shift, child } => child.eval(p) + shift,
        }
    }

    /// Sample the obstacle at every node of `grid`.
    pub fn sample(&self, grid: &Grid<D>) -> ScalarField<D> {
        let values: Vec<f64> = (0..grid.len())
            .into_par_iter()
            .map(|f| self.eval(grid.node_coord(grid.unflat(f))))
            .collect();
        ScalarField::from_raw(*grid, values)
    }
}

/// Finite point set inflated to balls of a common radius.
///
/// The nearest-neighbor search is accelerated with uniform binning but always
/// returns exactly the brute-force nearest distance.
#[derive(Debug, Clone)]
pub struct PointCloud<const D: usize> {
    points: Vec<Point<D>>,
    radius: f64,
    bins: Bins<D>,
}

impl<const D: usize> PointCloud<D> {
    /// Build a cloud from a non-empty list of finite points and a positive
    /// inflation radius.
    pub fn new(points: Vec<Point<D>>, radius: f64) -> Result<Self, CloudError> {
        if points.is_empty() {
            return Err(CloudError::Empty);
        }
        if let Some(index) = points
            .iter()
            .position(|p| p.iter().any(|v| !v.is_finite()))
        {
            return Err(CloudError::NonFinitePoint { index });
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(CloudError::BadRadius { radius });
        }
        let bins = Bins::build(&points);
        Ok(PointCloud {
            points,
            radius,
            bins,
        })
    }

    pub fn points(&self) -> &[Point<D>] {
        &self.points
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Euclidean distance from `p` to the nearest cloud point, exactly as a
    /// brute-force scan would compute it.
    pub fn nearest_distance(&self, p: Point<D>) -> f64 {
        self.bins.nearest_sq(p, &self.points).sqrt()
    }

    /// `radius - nearest_distance` at every node: positive within `radius` of
    /// the cloud, negative beyond.
    pub fn to_field(&self, grid: &Grid<D>) -> ScalarField<D> {
        let values: Vec<f64> = (0..grid.len())
            .into_par_iter()
            .map(|f| self.radius - self.nearest_distance(grid.node_coord(grid.unflat(f))))
            .collect();
        ScalarField::from_raw(*grid, values)
    }
}

/// Uniform spatial bins over the cloud's bounding box.
#[derive(Debug, Clone)]
struct Bins<const D: usize> {
    lo: Point<D>,
    cell: f64,
    counts: [usize; D],
    cells: Vec<Vec<u32>>,
}

impl<const D: usize> Bins<D> {
    fn build(points: &[Point<D>]) -> Self {
        let mut lo = points[0];
        let mut hi = points[0];
        for p in points {
            for k in 0..D {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let per_axis = (points.len() as f64)
            .powf(1.0 / D as f64)
            .ceil()
            .clamp(1.0, 128.0) as usize;
        let span = (0..D).map(|k| hi[k] - lo[k]).fold(0.0, f64::max);
        let cell = if span > 0.0 {
            span / per_axis as f64
        } else {
            1.0
        };
        let counts: [usize; D] =
            std::array::from_fn(|k| (((hi[k] - lo[k]) / cell).floor() as usize + 1).max(1));
        let total: usize = counts.iter().product();
        let mut cells = vec![Vec::new(); total];
        for (i, p) in points.iter().enumerate() {
            let c = Self::cell_of(lo, cell, counts, *p);
            cells[Self::flat(counts, c)].push(i as u32);
        }
        Bins {
            lo,
            cell,
            counts,
            cells,
        }
    }

    fn cell_of(lo: Point<D>, cell: f64, counts: [usize; D], p: Point<D>) -> [usize; D] {
        std::array::from_fn(|k| {
            (((p[k] - lo[k]) / cell).floor() as isize).clamp(0, counts[k] as isize - 1) as usize
        })
    }

    fn flat(counts: [usize; D], idx: [usize; D]) -> usize {
        let mut f = 0;
        for k in 0..D {
            f = f * counts[k] + idx[k];
        }
        f
    }

    /// Squared distance to the nearest point. Bins are scanned in expanding
    /// Chebyshev shells; a shell at distance `r` cells can only contain points
    /// at least `(r-1) * cell` away, which bounds the search exactly.
    fn nearest_sq(&self, p: Point<D>, points: &[Point<D>]) -> f64 {
        let center = Self::cell_of(self.lo, self.cell, self.counts, p);
        let max_ring = (0..D)
            .map(|k| center[k].max(self.counts[k] - 1 - center[k]))
            .max()
            .unwrap_or(0);
        let mut best = f64::INFINITY;
        for ring in 0..=max_ring {
            if best.is_finite() && ring >= 1 {
                let gap = (ring - 1) as f64 * self.cell;
                if gap * gap >= best {
                    break;
                }
            }
            self.scan_ring(center, ring, |cell_idx| {
                for &pi in &self.cells[Self::flat(self.counts, cell_idx)] {
                    let d2 = dist_sq(p, points[pi as usize]);
                    if d2 < best {
                        best = d2;
                    }
                }
            });
        }
        best
    }

    /// Visit every in-range cell whose Chebyshev distance from `center` is
    /// exactly `ring`.
    fn scan_ring(&self, center: [usize; D], ring: usize, mut visit: impl FnMut([usize; D])) {
        let r = ring as isize;
        let mut offset = [-r; D];
        'outer: loop {
            if offset.iter().any(|o| o.abs() == r) {
                let mut idx = [0usize; D];
                let mut ok = true;
                for k in 0..D {
                    let v = center[k] as isize + offset[k];
                    if v < 0 || v >= self.counts[k] as isize {
                        ok = false;
                        break;
                    }
                    idx[k] = v as usize;
                }
                if ok {
                    visit(idx);
                }
            }
            for k in (0..D).rev() {
                offset[k] += 1;
                if offset[k] <= r {
                    continue 'outer;
                }
                offset[k] = -r;
            }
            break;
        }
    }
}

/// Ready-made obstacle scenes used by the examples, tests, and shipped
/// configuration files.
pub mod scenes {
    use super::ObstacleSpec;

    /// Cone with apex at the origin: every level set is a circle around the
    /// origin, which makes exact errors easy to compute.
    pub fn cone<const D: usize>() -> ObstacleSpec<D> {
        ObstacleSpec::Cone { apex: [0.0; D] }
    }

    /// Two axis-aligned squares and two disks in the plane.
    ///
    /// The field is the max of four negated distance-like primitives, so the
    /// squares (sides 0.5 and 1) and disks (radius 0.5) appear as the -0.5
    /// superlevel set; pass `alpha = -0.5` to look at visibility past them.
    pub fn four_obstacles() -> ObstacleSpec<2> {
        ObstacleSpec::Max(vec![
            ObstacleSpec::Scale {
                factor: 2.0,
                child: std::boxed::Box::new(ObstacleSpec::Box {
                    center: [-1.5, -0.2],
                    half_extent: [0.0, 0.0],
                }),
            },
            ObstacleSpec::Box {
                center: [0.0, 0.3],
                half_extent: [0.0, 0.0],
            },
            ObstacleSpec::Ball {
                center: [-0.3, 1.5],
                radius: 0.0,
            },
            ObstacleSpec::Ball {
                center: [-0.3, -1.4],
                radius: 0.0,
            },
        ])
    }

    /// Axis slab `half - |p[axis] - center|` assembled from two halfspaces.
    fn slab<const D: usize>(axis: usize, center: f64, half: f64) -> ObstacleSpec<D> {
        let mut plus = [0.0; D];
        plus[axis] = 1.0;
        let mut minus = [0.0; D];
        minus[axis] = -1.0;
        ObstacleSpec::Min(vec![
            ObstacleSpec::Halfspace {
                normal: plus,
                offset: center + half,
            },
            ObstacleSpec::Halfspace {
                normal: minus,
                offset: half - center,
            },
        ])
    }

    /// Halfspace `top - p[axis]`, positive below the given height.
    fn below<const D: usize>(axis: usize, top: f64) -> ObstacleSpec<D> {
        let mut normal = [0.0; D];
        normal[axis] = 1.0;
        ObstacleSpec::Halfspace {
            normal,
            offset: top,
        }
    }

    /// Two box-shaped buildings standing on the ground plane, sized so a
    /// camera placed between them sees around and over both.
    ///
    /// Building one occupies `[-3,-1] x [-1,1]` up to height 1; building two
    /// occupies `[1,5] x [2,6]` up to height 2. Obstacle material is the
    /// subzero superlevel set.
    pub fn two_buildings() -> ObstacleSpec<3> {
        let one = ObstacleSpec::Min(vec![slab(0, -2.0, 1.0), slab(1, 0.0, 1.0), below(2, 1.0)]);
        let two = ObstacleSpec::Min(vec![slab(0, 3.0, 2.0), slab(1, 4.0, 2.0), below(2, 2.0)]);
        ObstacleSpec::Max(vec![one, two])
    }

    /// A thin vertical wall through the origin, for the two-viewpoint
    /// disconnection example.
    pub fn wall() -> ObstacleSpec<2> {
        ObstacleSpec::Box {
            center: [0.0, 0.0],
            half_extent: [0.1, 1.0],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng as _, SeedableRng as _};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cone_values() {
        let cone = scenes::cone::<2>();
        assert_eq!(cone.eval([0.0, 0.0]), 0.0);
        assert_eq!(cone.eval([1.0, 0.0]), -1.0);
    }

    #[test]
    fn constant_everywhere() {
        let c = ObstacleSpec::<3>::Constant(4.25);
        assert_eq!(c.eval([0.0, 1.0, -7.0]), 4.25);
        assert_eq!(c.eval([100.0, 0.0, 0.0]), 4.25);
    }

    #[test]
    fn four_obstacle_scene_is_zero_at_a_disk_center() {
        // At (-0.3, 1.5) the first disk's distance term vanishes while the
        // other three primitives are strictly negative, so the max is 0.
        let g = scenes::four_obstacles();
        assert_eq!(g.eval([-0.3, 1.5]), 0.0);
        assert!(g.eval([-3.0, -3.0]) < 0.0);
        // Inside the side-1 square centered at (0, 0.3).
        assert!(g.eval([0.0, 0.3]) > -0.5);
    }

    #[test]
    fn four_obstacle_scene_keeps_the_written_scale_factor() {
        // The first square's primitive carries a factor 2, so its boundary at
        // the -0.5 level has side 0.5: eval at a side midpoint 0.25 away.
        let g = scenes::four_obstacles();
        assert_eq!(g.eval([-1.25, -0.2]), -0.5);
        assert_eq!(g.eval([-1.5, -0.2]), 0.0);
    }

    #[test]
    fn sign_convention_inside_positive_outside_negative() {
        let ball = ObstacleSpec::<2>::Ball {
            center: [0.5, 0.0],
            radius: 0.25,
        };
        assert!(ball.eval([0.5, 0.0]) > 0.0);
        assert!(ball.eval([2.0, 0.0]) < 0.0);

        let bx = ObstacleSpec::<2>::Box {
            center: [0.0, 0.0],
            half_extent: [0.5, 0.25],
        };
        assert!(bx.eval([0.1, 0.1]) > 0.0);
        assert!(bx.eval([0.9, 0.0]) < 0.0);

        let half = ObstacleSpec::<2>::Halfspace {
            normal: [1.0, 0.0],
            offset: 0.0,
        };
        assert!(half.eval([-1.0, 3.0]) > 0.0);
        assert!(half.eval([1.0, -3.0]) < 0.0);

        let cloud =
            ObstacleSpec::Cloud(PointCloud::new(vec![[0.0, 0.0], [1.0, 0.0]], 0.5).unwrap());
        assert!(cloud.eval([0.0, 0.1]) > 0.0);
        assert!(cloud.eval([0.5, 2.0]) < 0.0);
    }

    #[test]
    fn cone_sampled_on_coarse_grid() {
        let grid = Grid::<2>::centered_cube(1.0, 3).unwrap();
        let field = scenes::cone::<2>().sample(&grid);
        assert_eq!(field.at([1, 1]), 0.0);
        assert_eq!(field.at([0, 0]), -2.0f64.sqrt());
        assert_eq!(field.at([2, 0]), -2.0f64.sqrt());
    }

    #[test]
    fn two_buildings_matches_closed_form_at_spot_points() {
        let g = scenes::two_buildings();
        let closed = |p: [f64; 3]| {
            let g1 = (p[0] + 2.0).abs().max(p[1].abs()).max(p[2]) - 1.0;
            let g2 = (p[0] - 3.0).abs().max((p[1] - 4.0).abs()).max(p[2]) - 2.0;
            -g1.min(g2)
        };
        for p in [
            [0.0, 0.0, 0.0],
            [-2.0, 0.0, 0.5],
            [3.0, 4.0, 1.0],
            [1.4, 2.2, 0.3],
            [-0.7, -1.9, 2.8],
        ] {
            assert_eq!(g.eval(p), closed(p), "mismatch at {p:?}");
        }
    }

    #[test]
    fn min_max_combinators_commute_with_sampling() {
        let grid = Grid::new([-1.0, -1.0], [1.0, 2.0], [7, 5]).unwrap();
        let a = ObstacleSpec::Ball {
            center: [0.2, 0.4],
            radius: 0.7,
        };
        let b = ObstacleSpec::Box {
            center: [-0.3, 0.9],
            half_extent: [0.5, 0.8],
        };
        let combo = ObstacleSpec::Min(vec![a.clone(), b.clone()]);
        let sampled = combo.sample(&grid);
        let pointwise = a.sample(&grid).zip_with(&b.sample(&grid), f64::min).unwrap();
        assert_eq!(sampled.values(), pointwise.values());

        let combo = ObstacleSpec::Max(vec![a.clone(), b.clone()]);
        let sampled = combo.sample(&grid);
        let pointwise = a.sample(&grid).zip_with(&b.sample(&grid), f64::max).unwrap();
        assert_eq!(sampled.values(), pointwise.values());
    }

    #[test]
    fn single_point_cloud_distances() {
        let cloud = PointCloud::new(vec![[0.0, 0.0, 0.0]], 0.5).unwrap();
        let grid = Grid::<3>::centered_cube(1.0, 3).unwrap();
        let field = cloud.to_field(&grid);
        assert_eq!(field.at([1, 1, 1]), 0.5);
        assert_eq!(cloud.radius() - cloud.nearest_distance([0.5, 0.0, 0.0]), 0.0);
        assert_eq!(
            cloud.radius() - cloud.nearest_distance([1.0, 0.0, 0.0]),
            -0.5
        );
    }

    #[test]
    fn equidistant_query_uses_shared_distance() {
        let cloud = PointCloud::new(vec![[-1.0, 0.0], [1.0, 0.0]], 0.25).unwrap();
        assert_eq!(cloud.nearest_distance([0.0, 1.0]), 2.0f64.sqrt());
    }

    #[test]
    fn cloud_rejects_bad_input() {
        assert!(matches!(
            PointCloud::<2>::new(vec![], 0.5),
            Err(CloudError::Empty)
        ));
        assert!(matches!(
            PointCloud::new(vec![[f64::NAN, 0.0]], 0.5),
            Err(CloudError::NonFinitePoint { index: 0 })
        ));
        assert!(matches!(
            PointCloud::new(vec![[0.0, 0.0]], 0.0),
            Err(CloudError::BadRadius { .. })
        ));
    }

    #[test]
    fn binned_nearest_matches_brute_force_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let points: Vec<[f64; 3]> = (0..1000)
            .map(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0)))
            .collect();
        let cloud = PointCloud::new(points.clone(), 0.3).unwrap();
        let grid = Grid::<3>::centered_cube(1.5, 9).unwrap();
        let field = cloud.to_field(&grid);
        for idx in grid.indices() {
            let p = grid.node_coord(idx);
            let brute = points
                .iter()
                .map(|q| dist_sq(p, *q))
                .fold(f64::INFINITY, f64::min)
                .sqrt();
            assert_eq!(field.at(idx), 0.3 - brute, "node {idx:?}");
        }
    }

    proptest! {
        #[test]
        fn combinator_algebra_evaluates_pointwise(
            px in -2.0f64..2.0,
            py in -2.0f64..2.0,
            s in -3.0f64..3.0,
            c in -3.0f64..3.0,
        ) {
            let p = [px, py];
            let ball = ObstacleSpec::Ball { center: [0.1, -0.2], radius: 0.6 };
            let base = ball.eval(p);
            prop_assert_eq!(ObstacleSpec::Negate(std::boxed::Box::new(ball.clone())).eval(p), -base);
            prop_assert_eq!(
                ObstacleSpec::Scale { factor: s, child: std::boxed::Box::new(ball.clone()) }.eval(p),
                s * base
            );
            prop_assert_eq!(
                ObstacleSpec::Offset { shift: c, child: std::boxed::Box::new(ball.clone()) }.eval(p),
                base + c
            );
        }

        #[test]
        fn binned_nearest_matches_brute_force_2d(
            seed in 0u64..32,
            n_points in 1usize..40,
            qx in -3.0f64..3.0,
            qy in -3.0f64..3.0,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let points: Vec<[f64; 2]> = (0..n_points)
                .map(|_| std::array::from_fn(|_| rng.gen_range(-2.0..2.0)))
                .collect();
            let cloud = PointCloud::new(points.clone(), 1.0).unwrap();
            let brute = points
                .iter()
                .map(|q| dist_sq([qx, qy], *q))
                .fold(f64::INFINITY, f64::min)
                .sqrt();
            prop_assert_eq!(cloud.nearest_distance([qx, qy]), brute);
        }
    }
}
