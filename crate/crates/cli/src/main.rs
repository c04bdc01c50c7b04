//! `esdlab`: concurrence curves, sudden-death tables, noise spectra and
//! figure data for two qubits under 1/f and quantum noise.

mod commands;
mod config;
mod csv_out;
mod error;
mod figures;
mod presets;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::config::ScenarioConfig;
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "esdlab", version = env!("ESDLAB_VERSION"), about)]
struct Cli {
    /// More log output; repeat for debug.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    /// Worker threads (ESDLAB_THREADS caps this).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Concurrence against Ω_A·t for one channel.
    Concurrence {
        #[arg(long, value_enum)]
        channel: ChannelArg,
        /// Output CSV; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Sudden-death times over a purity or amplitude grid.
    Esd {
        #[arg(long, value_enum)]
        sweep: SweepArg,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 60)]
        points: usize,
        /// Search horizon as Ω_A·t; later deaths are reported as `inf`.
        #[arg(long, default_value_t = 1e8)]
        search_max_omega: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Spectrum of qubit A's fluctuator ensemble against the 1/f target.
    Psd {
        #[arg(long, default_value_t = 500)]
        realizations: usize,
        #[arg(long, default_value_t = 1.0)]
        record_seconds: f64,
        /// Time bins per record; a power of two.
        #[arg(long, default_value_t = 1 << 18)]
        grid_points: usize,
        #[arg(long, default_value_t = 10)]
        bins_per_decade: usize,
        /// Fit band in rad/s.
        #[arg(long, default_value_t = 10.0)]
        fit_from: f64,
        #[arg(long, default_value_t = 1e5)]
        fit_to: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Writes the data behind one figure plus a manifest.
    Figure {
        name: String,
        #[arg(long)]
        out_dir: PathBuf,
        /// Also write a gnuplot script next to each CSV.
        #[arg(long)]
        gnuplot: bool,
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ChannelArg {
    Adiabatic,
    Interplay,
    Quantum,
    Montecarlo,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SweepArg {
    R,
    A2,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum CoherenceArg {
    #[default]
    Factorized,
    CrossTerm,
}

/// Config sources and per-field overrides shared by all subcommands.
#[derive(Debug, Clone, Default, Args)]
struct ScenarioArgs {
    /// JSON scenario file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Start from a figure's parameters.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    flavor: Option<String>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    a2: Option<f64>,
    #[arg(long)]
    phase: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    gamma_min: Option<f64>,
    #[arg(long)]
    gamma_max: Option<f64>,
    #[arg(long)]
    omega_b: Option<f64>,
    #[arg(long)]
    theta_b: Option<f64>,
    #[arg(long)]
    sigma_b: Option<f64>,
    #[arg(long, value_enum)]
    quantum: Option<OnOff>,
    #[arg(long)]
    s_white: Option<f64>,
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    trajectories: Option<usize>,
    #[arg(long)]
    t_max_omega: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    fluctuators: Option<usize>,
    #[arg(long, value_enum, default_value_t)]
    coherence_model: CoherenceArg,
}

impl ScenarioArgs {
    fn flag_layer(&self) -> Value {
        let mut root = Map::new();
        let mut set = |section: &str, key: &str, v: Option<Value>| {
            if let Some(v) = v {
                let entry = root.entry(section).or_insert_with(|| json!({}));
                entry[key] = v;
            }
        };
        set("state", "flavor", self.flavor.clone().map(Value::from));
        set("state", "r", self.r.map(Value::from));
        set("state", "a2", self.a2.map(Value::from));
        set("state", "phase", self.phase.map(Value::from));
        set("qubit_a", "omega_rad_s", self.omega.map(Value::from));
        set("qubit_a", "theta_rad", self.theta.map(Value::from));
        set("qubit_a", "sigma_rad_s", self.sigma.map(Value::from));
        set("qubit_a", "gamma_min_hz", self.gamma_min.map(Value::from));
        set("qubit_a", "gamma_max_hz", self.gamma_max.map(Value::from));
        set("qubit_b", "omega_rad_s", self.omega_b.map(Value::from));
        set("qubit_b", "theta_rad", self.theta_b.map(Value::from));
        set("qubit_b", "sigma_rad_s", self.sigma_b.map(Value::from));
        set("quantum", "enabled", self.quantum.map(|q| Value::from(matches!(q, OnOff::On))));
        set("quantum", "s_white_per_s", self.s_white.map(Value::from));
        set("quantum", "temperature_k", self.temperature.map(Value::from));
        set("coupling", "g_rad_s", self.g.map(Value::from));
        set("sim", "trajectories", self.trajectories.map(Value::from));
        set("sim", "t_max_omega", self.t_max_omega.map(Value::from));
        set("sim", "samples", self.samples.map(Value::from));
        set("sim", "seed", self.seed.map(Value::from));
        set("sim", "fluctuators", self.fluctuators.map(Value::from));
        Value::Object(root)
    }

    /// Preset (or `base_preset`), then the config file, then flags.
    fn resolve(&self, base_preset: Option<&str>) -> CliResult<ScenarioConfig> {
        let mut layers = Vec::new();
        if let Some(name) = self.preset.as_deref().or(base_preset) {
            layers.push(presets::preset(name)?);
        }
        if let Some(path) = &self.config {
            layers.push(config::read_file(path)?);
        }
        layers.push(self.flag_layer());
        ScenarioConfig::from_layers(layers)
    }
}

fn thread_cap(flag: Option<usize>) -> CliResult<Option<usize>> {
    let env = match std::env::var("ESDLAB_THREADS") {
        Ok(s) if !s.trim().is_empty() => Some(
            s.trim()
                .parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| CliError::Config(format!("ESDLAB_THREADS must be a positive integer, got {s:?}")))?,
        ),
        _ => None,
    };
    if flag == Some(0) {
        return Err(CliError::Config("--threads must be positive".into()));
    }
    Ok(match (flag, env) {
        (Some(f), Some(e)) => Some(f.min(e)),
        (f, e) => f.or(e),
    })
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = thread_cap(cli.threads)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(CliError::runtime)?;
    }
    match cli.command {
        Command::Concurrence { channel, out, scenario } => {
            let cfg = scenario.resolve(None)?;
            commands::concurrence(&cfg, channel, scenario.coherence_model, out.as_deref())
        }
        Command::Esd {
            sweep,
            from,
            to,
            points,
            search_max_omega,
            out,
            scenario,
        } => {
            let cfg = scenario.resolve(None)?;
            let grid = commands::linear_grid(from, to, points)?;
            commands::esd(&cfg, sweep, &grid, search_max_omega, scenario.coherence_model, out.as_deref())
        }
        Command::Psd {
            realizations,
            record_seconds,
            grid_points,
            bins_per_decade,
            fit_from,
            fit_to,
            out,
            scenario,
        } => {
            let cfg = scenario.resolve(None)?;
            let opts = commands::PsdArgs {
                realizations,
                record_seconds,
                grid_points,
                bins_per_decade,
                fit_band: (fit_from, fit_to),
            };
            commands::psd(&cfg, &opts, out.as_deref())
        }
        Command::Figure {
            name,
            out_dir,
            gnuplot,
            scenario,
        } => {
            let name = name.to_ascii_lowercase();
            presets::preset(&name)?;
            if scenario.preset.is_some() {
                return Err(CliError::Config("figure takes its preset from the figure name".into()));
            }
            let cfg = scenario.resolve(Some(&name))?;
            figures::figure(&name, &cfg, scenario.coherence_model, &out_dir, gnuplot)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("esdlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
