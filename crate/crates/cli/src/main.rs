//! Batch front end: sweep execution, weight-space analysis, and exact
//! diagonalization at a single coupling.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or config error,
//! 3 analysis ran but found no interior extremum (the transition signature
//! is absent, which is the expected outcome for independent sweeps).

use clap::{Args, Parser, Subcommand, ValueEnum};
use nqs_core::error::Error;
use nqs_core::pca::{detect_transition, pca};
use nqs_core::report::{
    load_config_file, load_manifest, load_weights_csv, write_analysis_outputs,
    write_sweep_outputs, GridSpec, RunConfig, TransitionReport,
};
use nqs_core::scalar::{Field, FieldKind};
use nqs_core::spin::{build_j1j2, build_tfim, Boundary};
use nqs_core::sweep::{
    run_adiabatic, run_independent, ChainDirection, Strategy, SweepResult,
};
use nqs_core::train::OptimizerKind;
use nqs_core::{Complex64, RealScalar};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "nqs", version, about = "Spin-chain wavefunction sweeps and weight-space transition detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a full coupling sweep and write its file set.
    Sweep(SweepArgs),
    /// Run PCA over a sweep directory and locate the transition.
    Analyze(AnalyzeArgs),
    /// Print the exact ground-state energy at one coupling.
    Ed(EdArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Tfim,
    J1j2,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Independent,
    AdiabaticForward,
    AdiabaticBackward,
}

impl From<StrategyArg> for Strategy {
    fn from(value: StrategyArg) -> Self {
        match value {
            StrategyArg::Independent => Strategy::Independent,
            StrategyArg::AdiabaticForward => Strategy::AdiabaticForward,
            StrategyArg::AdiabaticBackward => Strategy::AdiabaticBackward,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OptimizerArg {
    Sgd,
    Adam,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundaryArg {
    Periodic,
    Open,
}

impl From<BoundaryArg> for Boundary {
    fn from(value: BoundaryArg) -> Self {
        match value {
            BoundaryArg::Periodic => Boundary::Periodic,
            BoundaryArg::Open => Boundary::Open,
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    /// Run config JSON (a bare config or a previous manifest.json).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for the sweep file set.
    #[arg(long)]
    out: PathBuf,
    /// Model whose reference defaults seed the config (required without --config).
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
    /// Base seed; independent sweeps use base_seed + grid index per point.
    #[arg(long)]
    seed: Option<u64>,
    /// Coupling grid as MIN:MAX:STEP.
    #[arg(long, value_parser = parse_grid_spec)]
    grid: Option<GridSpec>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    lr: Option<f64>,
    #[arg(long, value_enum)]
    optimizer: Option<OptimizerArg>,
    #[arg(long, value_enum)]
    boundary: Option<BoundaryArg>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Sweep directory holding weights.csv and manifest.json.
    dir: PathBuf,
    /// Number of principal components to fit and export.
    #[arg(long, default_value_t = 3)]
    components: usize,
}

#[derive(Args)]
struct EdArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Chain length.
    #[arg(long)]
    sites: usize,
    /// Swept coupling value: the field h (tfim) or the ratio J2/J1 (j1j2).
    #[arg(long, allow_negative_numbers = true)]
    coupling: f64,
    /// Fixed coupling: J for tfim (default −1), J1 for j1j2 (default 1).
    #[arg(long, allow_negative_numbers = true)]
    j: Option<f64>,
    #[arg(long, value_enum, default_value = "periodic")]
    boundary: BoundaryArg,
    /// Also write the ground-state amplitudes, one per line.
    #[arg(long)]
    dump_state: Option<PathBuf>,
}

fn parse_grid_spec(text: &str) -> Result<GridSpec, String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err("expected MIN:MAX:STEP".into());
    }
    let parse = |s: &str| -> Result<f64, String> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| format!("invalid number {s:?} in grid spec"))
    };
    Ok(GridSpec {
        min: parse(parts[0])?,
        max: parse(parts[1])?,
        step: parse(parts[2])?,
    })
}

fn exit_code_for(error: &Error) -> u8 {
    match error {
        Error::Config(_) | Error::Parameter(_) | Error::InvalidSystem(_) => 2,
        Error::NoInteriorExtremum { .. } => 3,
        _ => 1,
    }
}

fn fail(error: &Error) -> ExitCode {
    eprintln!("error: {error}");
    ExitCode::from(exit_code_for(error))
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Sweep(args) => cmd_sweep(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Ed(args) => cmd_ed(args),
    }
}

fn resolve_config(args: &SweepArgs) -> Result<RunConfig, Error> {
    let mut config = match (&args.config, args.model) {
        (Some(path), model) => {
            let loaded = load_config_file(path)?;
            if let Some(model) = model {
                let matches = matches!(
                    (model, &loaded.model),
                    (ModelArg::Tfim, nqs_core::sweep::SweepModel::Tfim { .. })
                        | (ModelArg::J1j2, nqs_core::sweep::SweepModel::J1j2 { .. })
                );
                if !matches {
                    return Err(Error::Config(
                        "--model disagrees with the model in --config".into(),
                    ));
                }
            }
            loaded
        }
        (None, Some(ModelArg::Tfim)) => RunConfig::tfim_defaults(),
        (None, Some(ModelArg::J1j2)) => RunConfig::j1j2_defaults(),
        (None, None) => {
            return Err(Error::Config(
                "either --config or --model is required".into(),
            ))
        }
    };
    if let Some(strategy) = args.strategy {
        config.strategy = strategy.into();
    }
    if let Some(seed) = args.seed {
        config.base_seed = seed;
        config.training.seed = seed;
    }
    if let Some(grid) = args.grid {
        config.grid = grid;
    }
    if let Some(steps) = args.steps {
        config.training.steps = steps;
    }
    if let Some(lr) = args.lr {
        config.training.learning_rate = lr;
    }
    if let Some(optimizer) = args.optimizer {
        config.training.optimizer = match optimizer {
            OptimizerArg::Sgd => OptimizerKind::Sgd,
            OptimizerArg::Adam => OptimizerKind::default_adam(),
        };
    }
    if let Some(boundary) = args.boundary {
        config.boundary = boundary.into();
    }
    config.validate()?;
    Ok(config)
}

fn run_sweep<F>(config: &RunConfig) -> Result<SweepResult<F>, Error>
where
    F: Field,
    F::Real: nalgebra_real::RealFieldLike,
{
    let grid = config.build_grid()?;
    match config.strategy {
        Strategy::Independent => {
            run_independent::<F>(&grid, config.alpha, &config.training, config.base_seed)
        }
        Strategy::AdiabaticForward => run_adiabatic::<F>(
            &grid,
            config.alpha,
            &config.training,
            ChainDirection::Forward,
            config.base_seed,
        ),
        Strategy::AdiabaticBackward => run_adiabatic::<F>(
            &grid,
            config.alpha,
            &config.training,
            ChainDirection::Backward,
            config.base_seed,
        ),
    }
}

/// Local alias trait so the generic dispatch below stays readable.
mod nalgebra_real {
    pub trait RealFieldLike: nqs_core::RealScalar + nalgebra::RealField {}
    impl<T: nqs_core::RealScalar + nalgebra::RealField> RealFieldLike for T {}
}

fn cmd_sweep(args: SweepArgs) -> ExitCode {
    let config = match resolve_config(&args) {
        Ok(config) => config,
        Err(e) => return fail(&e),
    };
    let outcome = match config.field {
        FieldKind::Real => run_sweep::<f64>(&config)
            .and_then(|result| write_sweep_outputs(&args.out, &config, &result).map(|()| {
                (result.is_complete(), result.missing_couplings())
            })),
        FieldKind::Complex => run_sweep::<Complex64>(&config)
            .and_then(|result| write_sweep_outputs(&args.out, &config, &result).map(|()| {
                (result.is_complete(), result.missing_couplings())
            })),
    };
    match outcome {
        Ok((true, _)) => {
            println!(
                "sweep complete: {} {} points -> {}",
                config.build_grid().map(|g| g.len()).unwrap_or(0),
                config.model,
                args.out.display()
            );
            ExitCode::SUCCESS
        }
        Ok((false, missing)) => {
            eprintln!(
                "sweep incomplete: {} couplings failed or were skipped: {missing:?}",
                missing.len()
            );
            ExitCode::from(1)
        }
        Err(e) => fail(&e),
    }
}

fn cmd_analyze(args: AnalyzeArgs) -> ExitCode {
    let result = (|| -> Result<Option<f64>, Error> {
        let manifest = load_manifest(&args.dir)?;
        let grid = manifest.config.build_grid()?;
        let (weights, columns) = load_weights_csv(&args.dir)?;
        if weights.nrows() != grid.len() {
            return Err(Error::Input(format!(
                "weights.csv has {} rows, the manifest grid has {}",
                weights.nrows(),
                grid.len()
            )));
        }
        let analysis = pca(&weights, args.components)?;
        let explained: Vec<f64> = analysis.explained_variance.clone();
        match detect_transition(&analysis, grid.couplings(), 1) {
            Ok(estimate) => {
                let report = TransitionReport::detected(&estimate, &explained);
                write_analysis_outputs(&args.dir, &analysis, grid.couplings(), &columns, &report)?;
                Ok(Some(estimate.coupling_at_extremum))
            }
            Err(Error::NoInteriorExtremum { component_index }) => {
                let report = TransitionReport::absent(
                    component_index,
                    &explained,
                    "no interior extremum".into(),
                );
                write_analysis_outputs(&args.dir, &analysis, grid.couplings(), &columns, &report)?;
                Err(Error::NoInteriorExtremum { component_index })
            }
            Err(e) => Err(e),
        }
    })();
    match result {
        Ok(Some(coupling)) => {
            println!("critical coupling = {}", format_sig15(coupling));
            ExitCode::SUCCESS
        }
        Ok(None) => unreachable!("detected estimates always carry a coupling"),
        Err(e) => fail(&e),
    }
}

fn format_sig15(x: f64) -> String {
    format!("{x:.14e}")
}

fn cmd_ed(args: EdArgs) -> ExitCode {
    let result = (|| -> Result<(), Error> {
        let boundary: Boundary = args.boundary.into();
        let op = match args.model {
            ModelArg::Tfim => {
                let j = args.j.unwrap_or(-1.0);
                build_tfim::<f64>(args.sites, j, args.coupling, boundary)?
            }
            ModelArg::J1j2 => {
                let j1 = args.j.unwrap_or(1.0);
                build_j1j2::<f64>(args.sites, j1, j1 * args.coupling, boundary)?
            }
        };
        let solution = op.exact_ground_state()?;
        println!("{}", format_sig15(solution.energy()));
        if let Some(path) = args.dump_state {
            let mut text = String::new();
            for &a in solution.amplitudes() {
                text.push_str(&nqs_core::report::format_value(a));
                text.push('\n');
            }
            std::fs::write(&path, text).map_err(Error::Io)?;
            eprintln!(
                "wrote {} amplitudes to {} (ground-space degeneracy {})",
                solution.amplitudes().len(),
                path.display(),
                solution.degeneracy()
            );
        }
        Ok(())
    })();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

// Keep the unused-import lint honest about RealScalar: it is used through
// format_value's bound in cmd_ed.
#[allow(unused)]
fn _assert_real_scalar_in_scope(x: f64) -> f64 {
    RealScalar::as_f64(x)
}
