//! The `concurrence`, `esd` and `psd` subcommands.

use std::io::Write;
use std::path::Path;

use esdlab_core::analysis::{sweep, Channel, EsdSearch, Scenario, SweepAxis};
use esdlab_core::markov::CoherenceModel;
use esdlab_core::states::{EwlParams, Flavor};
use esdlab_core::stochastic::{one_over_f_target, psd_estimate_with, sample_ensemble, PsdOptions};
use log::{info, warn};

use crate::config::ScenarioConfig;
use crate::csv_out::{format_esd, Table};
use crate::error::{CliError, CliResult};
use crate::{ChannelArg, CoherenceArg, SweepArg};

impl From<ChannelArg> for Channel {
    fn from(c: ChannelArg) -> Self {
        match c {
            ChannelArg::Adiabatic => Channel::Adiabatic,
            ChannelArg::Interplay => Channel::Interplay,
            ChannelArg::Quantum => Channel::Quantum,
            ChannelArg::Montecarlo => Channel::MonteCarlo,
        }
    }
}

impl From<CoherenceArg> for CoherenceModel {
    fn from(c: CoherenceArg) -> Self {
        match c {
            CoherenceArg::Factorized => CoherenceModel::Factorized,
            CoherenceArg::CrossTerm => CoherenceModel::CrossTerm,
        }
    }
}

/// Writes to `out`, or standard output when absent.
pub fn emit(table: &Table, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => table.write(path),
        None => {
            let bytes = table.to_bytes()?;
            std::io::stdout().lock().write_all(&bytes).map_err(CliError::runtime)
        }
    }
}

/// `points` evenly spaced values from `from` to `to` inclusive.
pub fn linear_grid(from: f64, to: f64, points: usize) -> CliResult<Vec<f64>> {
    if !(from.is_finite() && to.is_finite()) || points == 0 {
        return Err(CliError::Config(format!(
            "grid needs finite bounds and at least one point, got [{from}, {to}] × {points}"
        )));
    }
    if points == 1 {
        return Ok(vec![from]);
    }
    // Rounded to 12 significant digits so 0.3 + 0.1·k prints as typed.
    let n = (points - 1) as f64;
    Ok((0..points)
        .map(|k| {
            let v = from + (to - from) * k as f64 / n;
            format!("{v:.11e}").parse().unwrap_or(v)
        })
        .collect())
}

/// Rejects channel and config combinations the core cannot evaluate.
pub fn check_channel(cfg: &ScenarioConfig, channel: Channel) -> CliResult<()> {
    let quantum_on = cfg.quantum.enabled && cfg.quantum.s_white_per_s > 0.0;
    match channel {
        Channel::MonteCarlo if quantum_on => Err(CliError::Config(
            "the montecarlo channel simulates classical noise only; pass --quantum off".into(),
        )),
        Channel::MonteCarlo => Ok(()),
        _ if cfg.coupling.g_rad_s != 0.0 => Err(CliError::Config(format!(
            "the {} channel covers uncoupled qubits only; use montecarlo or --g 0",
            channel.name()
        ))),
        _ => Ok(()),
    }
}

/// Concurrence on the config's Ω_A·t grid, with standard errors for
/// Monte Carlo.
pub fn concurrence_table(cfg: &ScenarioConfig, sc: &Scenario, channel: Channel) -> CliResult<Table> {
    check_channel(cfg, channel)?;
    let omega_a = cfg.qubit_a.omega_rad_s;
    let grid = cfg.omega_t_grid();
    let times: Vec<f64> = grid.iter().map(|wt| wt / omega_a).collect();
    let mc = cfg.mc_settings();
    let curve = sc.curve(channel, &times, Some(&mc))?;
    let mut table = match curve.stderr() {
        Some(_) => Table::new(["omega_t", "concurrence", "stderr"]),
        None => Table::new(["omega_t", "concurrence"]),
    };
    for (k, &wt) in grid.iter().enumerate() {
        match curve.stderr() {
            Some(se) => table.push_values(&[wt, curve.values()[k], se[k]]),
            None => table.push_values(&[wt, curve.values()[k]]),
        }
    }
    Ok(table)
}

pub fn concurrence(
    cfg: &ScenarioConfig,
    channel: ChannelArg,
    model: CoherenceArg,
    out: Option<&Path>,
) -> CliResult<()> {
    let sc = cfg.scenario()?.with_coherence_model(model.into());
    let table = concurrence_table(cfg, &sc, channel.into())?;
    info!("{} rows of {} concurrence", table.len(), Channel::from(channel).name());
    emit(&table, out)
}

fn with_flavor(sc: &Scenario, flavor: Flavor) -> Scenario {
    sc.with_state(sc.state.with_flavor(flavor))
}

/// ESD columns in Ω_A·t: combined noise per flavor, then adiabatic-only and
/// quantum-only for the configured flavor.
pub fn esd_table(
    cfg: &ScenarioConfig,
    sc: &Scenario,
    axis: SweepAxis,
    grid: &[f64],
    search_max_omega: f64,
) -> CliResult<Table> {
    check_channel(cfg, Channel::Interplay)?;
    if !(search_max_omega > 0.0 && search_max_omega.is_finite()) {
        return Err(CliError::Config(format!(
            "--search-max-omega must be positive, got {search_max_omega}"
        )));
    }
    // Probe the grid once so bad sweep values are reported as config errors.
    for &v in grid {
        let s = &sc.state;
        match axis {
            SweepAxis::Purity => EwlParams::new(v, s.a(), s.flavor()).map(|_| ())?,
            _ => EwlParams::from_a2(s.r(), v, s.flavor()).map(|_| ())?,
        }
    }
    let omega_a = cfg.qubit_a.omega_rad_s;
    let search = EsdSearch::new(sc.time_unit());
    let t_max = search_max_omega / omega_a;
    let runs = [
        (with_flavor(sc, Flavor::Phi), Channel::Interplay),
        (with_flavor(sc, Flavor::Psi), Channel::Interplay),
        (*sc, Channel::Adiabatic),
        (*sc, Channel::Quantum),
    ];
    let columns = runs
        .iter()
        .map(|(s, ch)| sweep(s, axis, grid, *ch, t_max, &search, None))
        .collect::<Result<Vec<_>, _>>()?;

    let mut table = Table::new([
        "sweep_value",
        "omega_t_esd_phi",
        "omega_t_esd_psi",
        "omega_t_esd_adiabatic",
        "omega_t_esd_quantum",
    ]);
    for (k, &v) in grid.iter().enumerate() {
        let mut row = vec![crate::csv_out::format_f64(v)];
        for col in &columns {
            let esd = col[k].esd.expect("parameter sweeps fill esd");
            row.push(format_esd(esd.time.scaled(omega_a)));
        }
        table.push_row(row);
    }
    Ok(table)
}

pub fn esd(
    cfg: &ScenarioConfig,
    axis: SweepArg,
    grid: &[f64],
    search_max_omega: f64,
    model: CoherenceArg,
    out: Option<&Path>,
) -> CliResult<()> {
    let sc = cfg.scenario()?.with_coherence_model(model.into());
    let axis = match axis {
        SweepArg::R => SweepAxis::Purity,
        SweepArg::A2 => SweepAxis::AmplitudeSquared,
    };
    emit(&esd_table(cfg, &sc, axis, grid, search_max_omega)?, out)
}

pub struct PsdArgs {
    pub realizations: usize,
    pub record_seconds: f64,
    pub grid_points: usize,
    pub bins_per_decade: usize,
    /// Regression band in rad/s.
    pub fit_band: (f64, f64),
}

pub fn psd(cfg: &ScenarioConfig, args: &PsdArgs, out: Option<&Path>) -> CliResult<()> {
    let q = &cfg.qubit_a;
    let ens = sample_ensemble(cfg.sim.fluctuators, q.gamma_min_hz, q.gamma_max_hz, q.sigma_rad_s, cfg.sim.seed)?;
    let opts = PsdOptions {
        n_grid: args.grid_points,
        bins_per_decade: args.bins_per_decade,
        threads: None,
    };
    let est = psd_estimate_with(&ens, args.record_seconds, args.realizations, cfg.sim.seed, &opts)?;

    let mut table = Table::new(["omega_rad_s", "s_estimated", "s_target"]);
    for (&w, &s) in est.omega.iter().zip(&est.s) {
        let target = one_over_f_target(w, q.sigma_rad_s, q.gamma_min_hz, q.gamma_max_hz);
        table.push_values(&[w, s, target]);
    }

    let (lo, hi) = args.fit_band;
    match est.fit(lo, hi, q.sigma_rad_s, q.gamma_min_hz, q.gamma_max_hz) {
        Ok(fit) => eprintln!(
            "fit over [{lo}, {hi}] rad/s: slope {:.4}, amplitude ratio {:.4}, max deviation {:.3} ({} bins)",
            fit.slope, fit.amplitude_ratio, fit.max_deviation, fit.points
        ),
        Err(e) => warn!("no fit: {e}"),
    }
    emit(&table, out)
}
