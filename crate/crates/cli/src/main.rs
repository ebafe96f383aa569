use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dqd_sim::{PropagatorConfig, Stepping};
use dqd_sim_cli::config::{validate_config, Layer, RunConfig, SweepLayer};
use dqd_sim_cli::{execute, threads_from_env, CliError};

/// Charge-qubit teleportation on coupled double quantum dots.
#[derive(Parser, Debug)]
#[command(name = "dqd-sim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Prepare |alpha| on a single double dot with a tunneling pulse.
    Encode(Common),
    /// Adiabatically entangle the support pair.
    Entangle(Common),
    /// Couple the encoded qubit to the support pair.
    Couple(Common),
    /// Run the Bell-stage evolution and report Alice's outcome probabilities.
    Bell(Common),
    /// Full three-qubit teleportation.
    Teleport(Common),
    /// Teleportation across a chain of `--n-support` support qubits.
    Chain(Common),
    /// Repeat an experiment over values of one parameter.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SteppingArg {
    Fixed,
    Adaptive,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output stem: writes `<stem>.csv` and `<stem>.manifest.json`.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    w: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<f64>,
    #[arg(long = "U-max", allow_hyphen_values = true)]
    u_max: Option<f64>,
    /// Defaults to U_max.
    #[arg(long = "Uprime-max", allow_hyphen_values = true)]
    uprime_max: Option<f64>,
    #[arg(long = "T-ent", allow_hyphen_values = true)]
    t_ent: Option<f64>,
    /// Defaults to a ramp scaled to the support's energy gap.
    #[arg(long = "T-couple", allow_hyphen_values = true)]
    t_couple: Option<f64>,
    /// Defaults to U_max.
    #[arg(long = "bell-U", allow_hyphen_values = true)]
    bell_u: Option<f64>,
    #[arg(long = "wait-angle", allow_hyphen_values = true)]
    wait_angle: Option<f64>,
    #[arg(long = "alpha-abs", allow_hyphen_values = true)]
    alpha_abs: Option<f64>,
    #[arg(long = "n-support")]
    n_support: Option<usize>,
    /// Sampled readouts (bell only); needs a seed.
    #[arg(long)]
    shots: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// full or effective.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long, value_enum)]
    stepping: Option<SteppingArg>,
    #[arg(long, allow_hyphen_values = true)]
    dt: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    tolerance: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct SweepArgs {
    /// Experiment run at every point (default teleport).
    #[arg(long)]
    experiment: Option<String>,
    /// Parameter name, e.g. U_max.
    #[arg(long)]
    axis: Option<String>,
    /// Comma-separated values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    values: Option<Vec<f64>>,
    #[command(flatten)]
    common: Common,
}

impl Common {
    fn layer(&self, experiment: &str) -> Layer {
        let mut params = std::collections::BTreeMap::new();
        for (name, v) in [
            ("w", self.w),
            ("phi", self.phi),
            ("U_max", self.u_max),
            ("Uprime_max", self.uprime_max),
            ("T_ent", self.t_ent),
            ("T_couple", self.t_couple),
            ("bell_U", self.bell_u),
            ("wait_angle", self.wait_angle),
        ] {
            if let Some(v) = v {
                params.insert(name.to_string(), v);
            }
        }
        Layer {
            experiment: Some(experiment.to_string()),
            params,
            propagator: None,
            alpha_abs: self.alpha_abs,
            n_support: self.n_support,
            shots: self.shots,
            seed: self.seed,
            mode: self.mode.clone(),
            sweep: None,
            output: self.output.clone(),
        }
    }

    /// Applies `--stepping`, `--dt` and `--tolerance` on top of whatever propagator the file chose.
    fn propagator(&self, base: Option<PropagatorConfig>) -> Option<PropagatorConfig> {
        if self.stepping.is_none() && self.dt.is_none() && self.tolerance.is_none() {
            return base;
        }
        let mut p = base.unwrap_or_else(dqd_sim::protocol::default_propagator);
        if let Some(s) = self.stepping {
            p.stepping = match s {
                SteppingArg::Fixed => Stepping::Fixed,
                SteppingArg::Adaptive => Stepping::Adaptive,
            };
        }
        if let Some(dt) = self.dt {
            p.dt = dt;
        }
        if let Some(tol) = self.tolerance {
            p.tolerance = tol;
        }
        Some(p)
    }
}

fn resolve(cli: Cli) -> Result<RunConfig, CliError> {
    let (name, common, sweep) = match cli.command {
        Command::Encode(c) => ("encode", c, None),
        Command::Entangle(c) => ("entangle", c, None),
        Command::Couple(c) => ("couple", c, None),
        Command::Bell(c) => ("bell", c, None),
        Command::Teleport(c) => ("teleport", c, None),
        Command::Chain(c) => ("chain", c, None),
        Command::Sweep(s) => {
            let layer = SweepLayer { experiment: s.experiment, axis: s.axis, values: s.values };
            ("sweep", s.common, Some(layer))
        }
    };
    let file = match &common.config {
        Some(path) => Layer::from_file(path)?,
        None => Layer::default(),
    };
    let mut flags = common.layer(name);
    flags.sweep = sweep;
    let mut merged = file.overlay(flags);
    merged.propagator = common.propagator(merged.propagator);
    if name == "sweep" && merged.sweep.is_none() {
        merged.sweep = Some(SweepLayer::default());
    }
    Ok(RunConfig::from_layer(merged))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = resolve(cli).and_then(|cfg| {
        let threads = threads_from_env()?;
        for w in validate_config(&cfg).map_err(CliError::Config)? {
            eprintln!("warning: {w}");
        }
        execute(&cfg, threads)
    });
    match outcome {
        Ok(summary) => {
            println!("wrote {} row(s) to {}", summary.rows, summary.csv.display());
            println!("manifest: {}", summary.manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
