use viewshed::convergence::convergence_study;
use viewshed::grid::Viewpoint;
use viewshed::obstacle::{scenes, ObstacleSpec};

fn show<const D: usize>(name: &str, spec: &ObstacleSpec<D>, lo: [f64; D], hi: [f64; D], vp: [f64; D], ns: &[usize]) {
    let rows = convergence_study(spec, lo, hi, Viewpoint::new(vp), ns, None).unwrap();
    print!("{name:18}");
    let cs: Vec<f64> = rows.iter().map(|r| r.error / r.h).collect();
    for (i, c) in cs.iter().enumerate() {
        if i > 0 { print!("  ratio={:.3}", c / cs[i-1]); }
        print!("  C={c:.4}");
    }
    println!();
}

fn main() {
    show("four-obstacles", &scenes::four_obstacles(), [-2.0, -2.0], [2.0, 2.0], [-1.5, -1.4], &[64, 128, 256, 512]);
    // Square-only variant: corners but no tangency.
    let squares = ObstacleSpec::Max(vec![
        ObstacleSpec::Scale { factor: 2.0, child: Box::new(ObstacleSpec::Box { center: [-1.5, -0.2], half_extent: [0.0, 0.0] }) },
        ObstacleSpec::Box { center: [0.0, 0.3], half_extent: [0.0, 0.0] },
    ]);
    show("two-squares", &squares, [-2.0, -2.0], [2.0, 2.0], [-1.5, -1.4], &[32, 64, 128, 256]);
    // Cone off-center, off-grid viewpoint.
    show("cone-offgrid", &ObstacleSpec::Cone { apex: [0.23, -0.11] }, [-2.0, -2.0], [2.0, 2.0], [-1.37, 0.81], &[32, 64, 128, 256]);
    // Asymmetric wedge of halfspaces.
    let wedge = ObstacleSpec::Min(vec![
        ObstacleSpec::Halfspace { normal: [0.6, 0.8], offset: 0.3 },
        ObstacleSpec::Halfspace { normal: [-0.8, 0.6], offset: 0.1 },
    ]);
    show("wedge", &wedge, [-1.0, -1.0], [1.0, 1.0], [-0.9, -0.85], &[32, 64, 128, 256]);
    show("two-buildings", &scenes::two_buildings(), [-6.0, -4.0, 0.0], [8.0, 8.0, 5.0], [0.5, 2.0, 0.5], &[12, 24, 48, 96]);
}
