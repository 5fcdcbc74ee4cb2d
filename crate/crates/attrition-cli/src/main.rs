//! Command-line front end: solve, compare, sweep, simulate, and verify the
//! equilibria of reputational wars of attrition on star networks.
//!
//! Configuration comes from an optional TOML file (`--config`) overridden by
//! flags; `ATTRITION_THREADS` caps the worker count (0 or unset = automatic).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod config;
mod output;
mod run;

use config::{CommandKind, FormatKind, ModelKind, OutputSpec, RunConfig, SweepAxis};
use run::RunError;

#[derive(Parser)]
#[command(
    name = "attrition",
    about = "Solver, verifier, and simulator for reputational wars of attrition on star networks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Solve a model and optionally emit trajectories or the equilibrium.
    Solve(CommonArgs),
    /// Compare equilibrium payoffs with isolated bilateral negotiations.
    Compare(CommonArgs),
    /// Solve across a parameter range and tabulate the results.
    Sweep(SweepArgs),
    /// Monte Carlo simulation of the concession protocol.
    Simulate(CommonArgs),
    /// Numerical best-response / indifference verification.
    Verify(CommonArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Model: bilateral | trilateral | sequential | partial | star4.
    #[arg(long, value_enum)]
    model: Option<ModelKind>,
    /// Discount rate per unit time.
    #[arg(long)]
    r: Option<f64>,
    /// Winner share, in (1/2, 1).
    #[arg(long)]
    alpha: Option<f64>,
    /// Surplus of the first peripheral's negotiation.
    #[arg(long = "pi-ac")]
    pi_ac: Option<f64>,
    /// Surplus of the second peripheral's negotiation.
    #[arg(long = "pi-bc")]
    pi_bc: Option<f64>,
    /// Prior commitment probabilities, comma separated. Length: 2 for
    /// bilateral, 3 for trilateral/sequential, 1 for partial, 4 for star4
    /// (three peripherals then the center).
    #[arg(long = "z", value_delimiter = ',', allow_hyphen_values = true)]
    z: Option<Vec<f64>>,
    /// Output file path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv | json.
    #[arg(long, value_enum)]
    format: Option<FormatKind>,
    /// Root seed for simulation.
    #[arg(long)]
    seed: Option<u64>,
    /// Replication count (simulate only).
    #[arg(long)]
    n: Option<u64>,
    /// Grid size for trajectories and verification.
    #[arg(long)]
    grid: Option<usize>,
    /// Verification tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// TOML configuration file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Swept parameter: r | alpha | pi_ac | pi_bc | z_a | z_b | z_c | z_center.
    #[arg(long)]
    param: Option<String>,
    /// Inclusive range lo:hi.
    #[arg(long)]
    range: Option<String>,
    /// Number of grid points.
    #[arg(long)]
    steps: Option<usize>,
}

fn build_config(kind: CommandKind, common: &CommonArgs) -> Result<RunConfig, String> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            let mut parsed: RunConfig =
                toml::from_str(&text).map_err(|e| format!("config parse error: {e}"))?;
            parsed.command = kind;
            parsed
        }
        None => RunConfig::new(kind, ModelKind::Trilateral),
    };
    if let Some(m) = common.model {
        cfg.model = m;
    }
    if let Some(v) = common.r {
        cfg.params.r = v;
    }
    if let Some(v) = common.alpha {
        cfg.params.alpha = v;
    }
    if let Some(v) = common.pi_ac {
        cfg.params.pi_ac = v;
    }
    if let Some(v) = common.pi_bc {
        cfg.params.pi_bc = v;
    }
    if let Some(z) = &common.z {
        cfg.priors = vec![z.clone()];
    }
    if let Some(v) = common.seed {
        cfg.seed = v;
    }
    if let Some(v) = common.n {
        cfg.n = v;
    }
    if let Some(v) = common.grid {
        cfg.grid = v;
    }
    if let Some(v) = common.tol {
        cfg.tol = v;
    }
    match (&common.out, common.format) {
        (Some(path), fmt) => {
            let format = fmt.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
                Some("json") => FormatKind::Json,
                _ => FormatKind::Csv,
            });
            cfg.output = Some(OutputSpec {
                path: path.clone(),
                format,
            });
        }
        (None, Some(_)) => {
            // Format without a path is allowed only for sweep's stdout table.
        }
        (None, None) => {}
    }
    Ok(cfg)
}

fn apply_sweep_flags(cfg: &mut RunConfig, args: &SweepArgs) -> Result<(), String> {
    let mut axis = cfg.sweep.clone();
    if let Some(param) = &args.param {
        let (start, stop) = match axis.as_ref() {
            Some(a) => (a.start, a.stop),
            None => (0.0, 0.0),
        };
        let steps = axis.as_ref().map(|a| a.steps).unwrap_or(0);
        axis = Some(SweepAxis {
            parameter: param.clone(),
            start,
            stop,
            steps,
        });
    }
    if let Some(range) = &args.range {
        let axis = axis
            .as_mut()
            .ok_or("--range needs --param (or a config sweep axis)")?;
        let (lo, hi) = range.split_once(':').ok_or("--range expects lo:hi")?;
        axis.start = lo
            .trim()
            .parse()
            .map_err(|_| format!("bad range start '{lo}'"))?;
        axis.stop = hi
            .trim()
            .parse()
            .map_err(|_| format!("bad range stop '{hi}'"))?;
    }
    if let Some(steps) = args.steps {
        let axis = axis
            .as_mut()
            .ok_or("--steps needs --param (or a config sweep axis)")?;
        axis.steps = steps;
    }
    cfg.sweep = axis;
    Ok(())
}

fn init_threads() {
    if let Ok(raw) = std::env::var("ATTRITION_THREADS") {
        if let Ok(k) = raw.trim().parse::<usize>() {
            if k > 0 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build_global();
            }
        }
    }
}

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();
    let built = match &cli.command {
        CliCommand::Solve(c) => build_config(CommandKind::Solve, c),
        CliCommand::Compare(c) => build_config(CommandKind::Compare, c),
        CliCommand::Sweep(s) => build_config(CommandKind::Sweep, &s.common).and_then(|mut cfg| {
            apply_sweep_flags(&mut cfg, s)?;
            Ok(cfg)
        }),
        CliCommand::Simulate(c) => build_config(CommandKind::Simulate, c),
        CliCommand::Verify(c) => build_config(CommandKind::Verify, c),
    };
    let cfg = match built {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match run::execute(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(RunError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
