//! Command-line front end for the viewshed solver.
//!
//! Subcommands: `solve` (single-viewpoint envelope), `oracle` (ray-sampled
//! reference), `multiview` (composed multi-viewpoint visibility), and
//! `converge` (grid-refinement error study). Scenes come from TOML
//! configuration files; fields go to the text format or legacy ASCII
//! structured points.
//!
//! Exit codes: 0 success, 2 parse errors, 3 invalid configurations or solver
//! errors, 4 I/O failures.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use viewshed::config::SceneConfig;
use viewshed::convergence::{convergence_study, format_rows};
use viewshed::grid::ScalarField;
use viewshed::io;
use viewshed::mask::sublevel;
use viewshed::multiview::{compose, solve_each};
use viewshed::oracle::{oracle_field, RaySampling};
use viewshed::sweep::{solve, SolverConfig};
use viewshed::{ComposeError, ConfigError, FieldIoError, SolveError};

#[derive(Parser)]
#[command(
    name = "viewshed",
    version,
    about = "Grid-based visibility via an obstacle equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the envelope equation for a single-viewpoint scene
    Solve(RunArgs),
    /// Evaluate the ray-sampled reference envelope for the scene
    Oracle(RunArgs),
    /// Solve per viewpoint and compose per the scene's semantics
    Multiview(RunArgs),
    /// Refine the grid over a list of sizes and tabulate errors
    Converge(ConvergeArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scene configuration file
    config: PathBuf,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Visibility level for the mask; overrides the config
    #[arg(long)]
    alpha: Option<f64>,
    /// Field output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Ray-sampling step for reference computations; overrides the config
    #[arg(long)]
    oracle_step: Option<f64>,
}

#[derive(Args)]
struct ConvergeArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Comma-separated nodes-per-axis, strictly increasing, each at least 8
    #[arg(long = "N", value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    VtkAscii,
}

/// Everything that can go wrong, mapped onto the documented exit codes.
enum CliError {
    Parse(String),
    Invalid(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Invalid(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::Invalid(m) | CliError::Io(m) => m,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Parse(_) => CliError::Parse(e.to_string()),
            ConfigError::Invalid { .. } => CliError::Invalid(e.to_string()),
            ConfigError::FieldIo(inner) => inner.into(),
        }
    }
}

impl From<FieldIoError> for CliError {
    fn from(e: FieldIoError) -> Self {
        match e {
            FieldIoError::Parse { .. } => CliError::Parse(e.to_string()),
            FieldIoError::Io { .. } => CliError::Io(e.to_string()),
        }
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<ComposeError> for CliError {
    fn from(e: ComposeError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let args = match &cli.command {
        Command::Solve(a) | Command::Oracle(a) | Command::Multiview(a) => a,
        Command::Converge(c) => &c.run,
    };
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.config.display())))?;
    let config = SceneConfig::parse(&text)?;
    let base = args
        .config
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."))
        .to_path_buf();
    match config.dim {
        2 => dispatch::<2>(&cli.command, &config, &base),
        3 => dispatch::<3>(&cli.command, &config, &base),
        other => Err(CliError::Invalid(format!("unsupported dimension {other}"))),
    }
}

fn dispatch<const D: usize>(
    command: &Command,
    config: &SceneConfig,
    base: &Path,
) -> Result<(), CliError> {
    match command {
        Command::Solve(args) => run_solve::<D>(config, base, args),
        Command::Oracle(args) => run_oracle::<D>(config, base, args),
        Command::Multiview(args) => run_multiview::<D>(config, base, args),
        Command::Converge(args) => run_converge::<D>(config, base, args),
    }
}

struct Scene<const D: usize> {
    grid: viewshed::grid::Grid<D>,
    spec: viewshed::obstacle::ObstacleSpec<D>,
    viewpoints: viewshed::multiview::ViewpointSet<D>,
    alpha: f64,
}

fn load_scene<const D: usize>(
    config: &SceneConfig,
    base: &Path,
    args: &RunArgs,
) -> Result<Scene<D>, CliError> {
    Ok(Scene {
        grid: config.typed_grid::<D>()?,
        spec: config.typed_obstacle::<D>(base)?,
        viewpoints: config.typed_viewpoints::<D>()?,
        alpha: args.alpha.unwrap_or(config.alpha),
    })
}

fn single_viewpoint<const D: usize>(
    scene: &Scene<D>,
    subcommand: &str,
) -> Result<viewshed::grid::Viewpoint<D>, CliError> {
    if scene.viewpoints.len() != 1 {
        return Err(CliError::Invalid(format!(
            "`{subcommand}` needs exactly one viewpoint; use `multiview` for {}",
            scene.viewpoints.len()
        )));
    }
    Ok(scene.viewpoints.viewpoints()[0])
}

fn write_outputs<const D: usize>(
    args: &RunArgs,
    named: &[(&str, &ScalarField<D>)],
    mask_of: &ScalarField<D>,
    alpha: f64,
) -> Result<(), CliError> {
    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.out.display())))?;
    for (name, field) in named {
        match args.format {
            Format::Text => io::export_field(field, &io::output_path(&args.out, name, "txt"))?,
            Format::VtkAscii => {
                io::export_vtk(field, &io::output_path(&args.out, name, "vtk"), name)?
            }
        }
    }
    let mask = sublevel(mask_of, alpha);
    io::export_mask(&mask, &io::output_path(&args.out, "visible", "txt"))?;
    println!(
        "visible nodes: {} of {} at alpha = {alpha}",
        mask.count_true(),
        mask.values().len()
    );
    Ok(())
}

fn run_solve<const D: usize>(
    config: &SceneConfig,
    base: &Path,
    args: &RunArgs,
) -> Result<(), CliError> {
    let scene = load_scene::<D>(config, base, args)?;
    let vp = single_viewpoint(&scene, "solve")?;
    let g = scene.spec.sample(&scene.grid);
    let cfg = SolverConfig {
        envelope: config.envelope,
        viewpoint: vp,
        viewpoint_value: Some(scene.spec.eval(vp.point())),
    };
    let report = solve(&g, &cfg)?;
    println!(
        "swept {} nodes in {:.3} s, max |residual| = {:.3e}",
        report.sweep_node_count,
        report.wall_time.as_secs_f64(),
        report.max_abs_residual
    );
    write_outputs(
        args,
        &[("solution", &report.solution), ("obstacle", &g)],
        &report.solution,
        scene.alpha,
    )
}

fn run_oracle<const D: usize>(
    config: &SceneConfig,
    base: &Path,
    args: &RunArgs,
) -> Result<(), CliError> {
    let scene = load_scene::<D>(config, base, args)?;
    let g = scene.spec.sample(&scene.grid);
    let sampling = match args.oracle_step.or(config.oracle_step) {
        Some(step) => RaySampling::new(step)?,
        None => RaySampling::for_grid(&scene.grid),
    };
    let fields: Result<Vec<ScalarField<D>>, SolveError> = scene
        .viewpoints
        .viewpoints()
        .iter()
        .map(|vp| oracle_field(&scene.spec, vp, &scene.grid, &sampling, config.envelope))
        .collect();
    let fields = fields?;
    let combined = compose(&fields, &config.compose_expr())?;
    println!(
        "sampled {} viewpoint(s) at step {:.3e}",
        fields.len(),
        sampling.step()
    );
    write_outputs(
        args,
        &[("oracle", &combined), ("obstacle", &g)],
        &combined,
        scene.alpha,
    )
}

fn run_multiview<const D: usize>(
    config: &SceneConfig,
    base: &Path,
    args: &RunArgs,
) -> Result<(), CliError> {
    let scene = load_scene::<D>(config, base, args)?;
    let g = scene.spec.sample(&scene.grid);
    let values: Vec<f64> = scene
        .viewpoints
        .viewpoints()
        .iter()
        .map(|vp| scene.spec.eval(vp.point()))
        .collect();
    let reports = solve_each(&g, &scene.viewpoints, Some(&values))?;
    let worst = reports
        .iter()
        .map(|r| r.max_abs_residual)
        .fold(0.0, f64::max);
    let fields: Vec<ScalarField<D>> = reports.into_iter().map(|r| r.solution).collect();
    let combined = compose(&fields, &config.compose_expr())?;
    println!(
        "solved {} viewpoint(s), worst max |residual| = {worst:.3e}",
        fields.len()
    );
    write_outputs(
        args,
        &[("solution", &combined), ("obstacle", &g)],
        &combined,
        scene.alpha,
    )
}

fn run_converge<const D: usize>(
    config: &SceneConfig,
    base: &Path,
    args: &ConvergeArgs,
) -> Result<(), CliError> {
    let sizes = &args.sizes;
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Invalid(
            "--N sizes must be strictly increasing".into(),
        ));
    }
    if sizes.iter().any(|&n| n < 8) {
        return Err(CliError::Invalid("--N sizes must be at least 8".into()));
    }
    let scene = load_scene::<D>(config, base, &args.run)?;
    let vp = single_viewpoint(&scene, "converge")?;
    let rows = convergence_study(
        &scene.spec,
        scene.grid.lo(),
        scene.grid.hi(),
        vp,
        sizes,
        args.run.oracle_step.or(config.oracle_step),
    )?;
    let table = format_rows(&rows);
    print!("{table}");
    std::fs::create_dir_all(&args.run.out)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.run.out.display())))?;
    let path = io::output_path(&args.run.out, "convergence", "txt");
    std::fs::write(&path, table).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(())
}
