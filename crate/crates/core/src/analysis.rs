//! ESD-time extraction and parameter sweeps over the noise channels.

use log::warn;
use rayon::prelude::*;

use crate::adiabatic::{adiabatic_signed, AdiabaticParams};
use crate::consts::BELL_THRESHOLD;
use crate::markov::{composed_signed, CoherenceModel, QuantumNoiseParams, QubitNoise};
use crate::states::{ewl_state, EwlParams};
use crate::stochastic::{monte_carlo_concurrence, McCurve, McSettings, SimConfig};
use crate::{Error, Result};

/// When entanglement is lost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EsdTime {
    Finite(f64),
    Infinite,
}

impl EsdTime {
    pub fn finite(self) -> Option<f64> {
        match self {
            EsdTime::Finite(t) => Some(t),
            EsdTime::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, EsdTime::Finite(_))
    }

    /// Seconds to `f64`, with `Infinite` as `f64::INFINITY`.
    pub fn as_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    pub fn scaled(self, factor: f64) -> Self {
        match self {
            EsdTime::Finite(t) => EsdTime::Finite(t * factor),
            EsdTime::Infinite => EsdTime::Infinite,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EsdMethod {
    ClosedForm,
    Bisection,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EsdResult {
    pub time: EsdTime,
    /// `(t_lo, t_hi)` with the concurrence positive at `t_lo` and gone by
    /// `t_hi`. For noisy curves this is where mean ± 2·stderr cross zero.
    pub bracket: (f64, f64),
    pub method: EsdMethod,
    /// The state had no entanglement to lose; `time` is then zero.
    pub never_entangled: bool,
    /// Entanglement came back after the reported zero.
    pub revival_detected: bool,
}

impl EsdResult {
    pub fn finite(t: f64, method: EsdMethod) -> Self {
        Self {
            time: EsdTime::Finite(t),
            bracket: (t, t),
            method,
            never_entangled: false,
            revival_detected: false,
        }
    }

    /// No zero up to `searched_to`.
    pub fn infinite(searched_to: f64, method: EsdMethod) -> Self {
        Self {
            time: EsdTime::Infinite,
            bracket: (searched_to, f64::INFINITY),
            method,
            never_entangled: false,
            revival_detected: false,
        }
    }

    pub fn never_entangled(method: EsdMethod) -> Self {
        Self {
            time: EsdTime::Finite(0.0),
            bracket: (0.0, 0.0),
            method,
            never_entangled: true,
            revival_detected: false,
        }
    }

    /// Times multiplied by `factor`, e.g. Ω to report Ωt.
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            time: self.time.scaled(factor),
            bracket: (self.bracket.0 * factor, self.bracket.1 * factor),
            ..self
        }
    }
}

/// Sampled concurrence with optional per-point standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcurrenceCurve {
    times: Vec<f64>,
    values: Vec<f64>,
    stderr: Option<Vec<f64>>,
}

const CURVE_SLACK: f64 = 1e-9;

impl ConcurrenceCurve {
    /// Values slightly outside [0, 1] (by ≤ 1e-9) are clamped; larger
    /// excursions are rejected.
    pub fn new(times: Vec<f64>, values: Vec<f64>, stderr: Option<Vec<f64>>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::param(
                "curve",
                format!("{} times for {} values", times.len(), values.len()),
            ));
        }
        if stderr.as_ref().is_some_and(|s| s.len() != times.len()) {
            return Err(Error::param("stderr", "length differs from times"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("times", "must be strictly increasing"));
        }
        if let Some(v) = values
            .iter()
            .find(|v| !(-CURVE_SLACK..=1.0 + CURVE_SLACK).contains(*v))
        {
            return Err(Error::param("values", format!("concurrence {v} outside [0, 1]")));
        }
        let values = values.into_iter().map(|v| v.clamp(0.0, 1.0)).collect();
        Ok(Self {
            times,
            values,
            stderr,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn stderr(&self) -> Option<&[f64]> {
        self.stderr.as_deref()
    }

    /// First ESD on the sampled mean, linearly interpolated.
    pub fn esd(&self) -> EsdResult {
        if self.values[0] <= 0.0 {
            return EsdResult::never_entangled(EsdMethod::Grid);
        }
        let Some(t) = first_crossing(&self.times, &self.values, 0.0) else {
            return EsdResult::infinite(*self.times.last().unwrap(), EsdMethod::Grid);
        };
        let mut res = EsdResult::finite(t, EsdMethod::Grid);
        if let Some(se) = &self.stderr {
            let shifted = |sign: f64| -> Vec<f64> {
                self.values.iter().zip(se).map(|(v, s)| v + sign * 2.0 * s).collect()
            };
            let lo = first_crossing(&self.times, &shifted(-1.0), 0.0).unwrap_or(t);
            let hi = first_crossing(&self.times, &shifted(1.0), 0.0).unwrap_or(f64::INFINITY);
            res.bracket = (lo.min(t), hi.max(t));
        }
        let k = self.times.partition_point(|&s| s <= t);
        res.revival_detected = self.values[k..].iter().any(|&v| v > 0.0);
        res
    }

    /// First time the mean falls to `level` (`Infinite` if it never does).
    pub fn crossing(&self, level: f64) -> EsdTime {
        match first_crossing(&self.times, &self.values, level) {
            Some(t) => EsdTime::Finite(t),
            None => EsdTime::Infinite,
        }
    }
}

impl TryFrom<&McCurve> for ConcurrenceCurve {
    type Error = Error;

    fn try_from(mc: &McCurve) -> Result<Self> {
        ConcurrenceCurve::new(mc.times.clone(), mc.concurrence.clone(), Some(mc.stderr.clone()))
    }
}

/// First time the samples fall to `level` or below, interpolating linearly
/// between the last sample above and the first at or below.
pub fn first_crossing(times: &[f64], values: &[f64], level: f64) -> Option<f64> {
    let k = values.iter().position(|&v| v <= level)?;
    if k == 0 {
        return Some(times[0]);
    }
    let (t0, t1) = (times[k - 1], times[k]);
    let (v0, v1) = (values[k - 1], values[k]);
    Some(t0 + (t1 - t0) * (v0 - level) / (v0 - v1))
}

/// Root-finder settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EsdSearch {
    /// Scan points between `time_unit` and `t_max`.
    pub n_grid: usize,
    /// Bisection stops once the bracket is this small relative to its end.
    pub rel_tol: f64,
    /// The scan is linear below this time and logarithmic above; 1/Ω
    /// makes it logarithmic beyond Ωt = 1.
    pub time_unit: f64,
}

impl EsdSearch {
    pub fn new(time_unit: f64) -> Self {
        Self {
            n_grid: 10_000,
            rel_tol: 1e-13,
            time_unit,
        }
    }

    fn grid(&self, t_max: f64) -> Vec<f64> {
        let n = self.n_grid.max(2);
        let unit = self.time_unit.min(t_max);
        let mut g = Vec::with_capacity(n + 2);
        g.push(0.0);
        if unit < t_max {
            g.push(unit);
            let ratio = (t_max / unit).ln();
            g.extend((1..=n).map(|k| unit * (ratio * k as f64 / n as f64).exp()));
        } else {
            g.extend((1..=n).map(|k| t_max * k as f64 / n as f64));
        }
        *g.last_mut().unwrap() = t_max;
        g
    }
}

/// First zero of a signed concurrence function (K-type: positive while
/// entangled, non-positive once entanglement is gone).
///
/// Scans a grid, bisects the first sign change down to `rel_tol`, then
/// checks the remaining grid for revivals.
pub fn find_esd_time<F>(mut f: F, t_max: f64, search: &EsdSearch) -> Result<EsdResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    find_level_crossing(&mut f, 0.0, t_max, search)
}

/// First time `f` falls to `level`; `never_entangled` is set when `f(0)`
/// is already at or below it.
pub fn find_level_crossing<F>(mut f: F, level: f64, t_max: f64, search: &EsdSearch) -> Result<EsdResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::param("t_max", format!("must be positive, got {t_max}")));
    }
    if !(search.time_unit > 0.0) || !(search.rel_tol > 0.0) {
        return Err(Error::param("search", "time_unit and rel_tol must be positive"));
    }
    let mut g = |t: f64| f(t).map(|v| v - level);
    if g(0.0)? <= 0.0 {
        return Ok(EsdResult::never_entangled(EsdMethod::Grid));
    }
    let grid = search.grid(t_max);
    let mut prev = 0.0;
    for (i, &t) in grid.iter().enumerate().skip(1) {
        if g(t)? > 0.0 {
            prev = t;
            continue;
        }
        let (mut lo, mut hi) = (prev, t);
        while hi - lo > search.rel_tol * hi {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid)? > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut res = EsdResult::finite(0.5 * (lo + hi), EsdMethod::Bisection);
        res.bracket = (lo, hi);
        for &s in &grid[i + 1..] {
            if g(s)? > 0.0 {
                warn!("function turns positive again at t = {s} after a zero at {hi}");
                res.revival_detected = true;
                break;
            }
        }
        return Ok(res);
    }
    Ok(EsdResult::infinite(t_max, EsdMethod::Grid))
}

/// Which noise model produces the concurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    /// Static-path 1/f noise only.
    Adiabatic,
    /// Static-path 1/f noise combined with Markovian quantum noise.
    Interplay,
    /// Markovian quantum noise only.
    Quantum,
    /// Random-telegraph trajectories, averaged.
    MonteCarlo,
}

impl Channel {
    pub fn name(self) -> &'static str {
        match self {
            Channel::Adiabatic => "adiabatic",
            Channel::Interplay => "interplay",
            Channel::Quantum => "quantum",
            Channel::MonteCarlo => "montecarlo",
        }
    }
}

impl std::str::FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "adiabatic" => Ok(Channel::Adiabatic),
            "interplay" => Ok(Channel::Interplay),
            "quantum" => Ok(Channel::Quantum),
            "montecarlo" | "monte_carlo" => Ok(Channel::MonteCarlo),
            other => Err(Error::param("channel", format!("unknown channel {other:?}"))),
        }
    }
}

/// Initial state plus everything acting on the two qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub state: EwlParams,
    pub qubit_a: AdiabaticParams,
    pub qubit_b: AdiabaticParams,
    /// Applied identically to both qubits by the interplay and quantum channels.
    pub quantum: QuantumNoiseParams,
    /// Only the Monte Carlo channel supports g ≠ 0.
    pub coupling_g: f64,
    pub coherence_model: CoherenceModel,
}

impl Scenario {
    pub fn new(state: EwlParams, qubit_a: AdiabaticParams, qubit_b: AdiabaticParams) -> Self {
        Self {
            state,
            qubit_a,
            qubit_b,
            quantum: QuantumNoiseParams::off(),
            coupling_g: 0.0,
            coherence_model: CoherenceModel::default(),
        }
    }

    pub fn with_quantum(mut self, quantum: QuantumNoiseParams) -> Self {
        self.quantum = quantum;
        self
    }

    pub fn with_coupling(mut self, g: f64) -> Self {
        self.coupling_g = g;
        self
    }

    pub fn with_state(mut self, state: EwlParams) -> Self {
        self.state = state;
        self
    }

    pub fn with_coherence_model(mut self, model: CoherenceModel) -> Self {
        self.coherence_model = model;
        self
    }

    /// 1/Ω_A, the unit behind every Ωt axis.
    pub fn time_unit(&self) -> f64 {
        1.0 / self.qubit_a.omega
    }

    fn require_analytic(&self, channel: Channel) -> Result<()> {
        if channel == Channel::MonteCarlo {
            return Err(Error::param("channel", "montecarlo has no analytic form"));
        }
        if self.coupling_g != 0.0 {
            return Err(Error::param(
                "coupling_g",
                format!("the {} channel only covers uncoupled qubits", channel.name()),
            ));
        }
        Ok(())
    }

    /// Signed concurrence 2·max(K1, K2) of an analytic channel at time `t`.
    pub fn signed(&self, channel: Channel, t: f64) -> Result<f64> {
        self.require_analytic(channel)?;
        let rho0 = ewl_state(&self.state)?;
        self.signed_from(channel, t, &rho0)
    }

    fn signed_from(&self, channel: Channel, t: f64, rho0: &crate::qmath::DensityMatrix4) -> Result<f64> {
        let noise = |ad: AdiabaticParams| match channel {
            Channel::Quantum => QubitNoise::new(ad.with_sigma(0.0), self.quantum),
            _ => QubitNoise::new(ad, self.quantum),
        };
        match channel {
            Channel::Adiabatic => adiabatic_signed(t, &self.qubit_a, &self.qubit_b, &self.state),
            _ => composed_signed(
                t,
                rho0,
                &noise(self.qubit_a),
                &noise(self.qubit_b),
                self.coherence_model,
            ),
        }
    }

    pub fn concurrence(&self, channel: Channel, t: f64) -> Result<f64> {
        Ok(self.signed(channel, t)?.clamp(0.0, 1.0))
    }

    /// Trajectory settings for this scenario sampled at `times`.
    pub fn sim_config(&self, mc: &McSettings, times: Vec<f64>) -> SimConfig {
        let t_max = times.last().copied().unwrap_or(0.0);
        let quantum = (!self.quantum.is_off()).then_some(self.quantum);
        SimConfig::new(self.qubit_a, self.qubit_b, mc.n_trajectories, t_max, times.len(), mc.seed)
            .with_coupling(self.coupling_g)
            .with_fluctuators(mc.n_fluctuators)
            .with_threads(mc.threads)
            .with_quantum(quantum)
            .with_times(times)
    }

    /// Concurrence sampled at ascending `times`. Monte Carlo curves carry
    /// standard errors.
    pub fn curve(&self, channel: Channel, times: &[f64], mc: Option<&McSettings>) -> Result<ConcurrenceCurve> {
        if channel == Channel::MonteCarlo {
            let mc = mc.ok_or_else(|| {
                Error::param("montecarlo", "the montecarlo channel needs simulation settings")
            })?;
            let rho0 = ewl_state(&self.state)?;
            let run = monte_carlo_concurrence(&rho0, &self.sim_config(mc, times.to_vec()))?;
            return ConcurrenceCurve::try_from(&run);
        }
        self.require_analytic(channel)?;
        let rho0 = ewl_state(&self.state)?;
        let values = times
            .iter()
            .map(|&t| self.signed_from(channel, t, &rho0).map(|v| v.clamp(0.0, 1.0)))
            .collect::<Result<Vec<_>>>()?;
        ConcurrenceCurve::new(times.to_vec(), values, None)
    }

    fn mc_curve(&self, mc: &McSettings, t_max: f64) -> Result<ConcurrenceCurve> {
        let n = mc.n_samples.max(2);
        let times: Vec<f64> = (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect();
        self.curve(Channel::MonteCarlo, &times, Some(mc))
    }

    /// ESD time in seconds, searched up to `t_max`.
    pub fn esd(&self, channel: Channel, t_max: f64, search: &EsdSearch, mc: Option<&McSettings>) -> Result<EsdResult> {
        match channel {
            Channel::MonteCarlo => {
                let mc = mc.ok_or_else(|| {
                    Error::param("montecarlo", "the montecarlo channel needs simulation settings")
                })?;
                Ok(self.mc_curve(mc, t_max)?.esd())
            }
            _ => {
                self.require_analytic(channel)?;
                let rho0 = ewl_state(&self.state)?;
                find_esd_time(|t| self.signed_from(channel, t, &rho0), t_max, search)
            }
        }
    }

    /// First time the concurrence falls to 1/√2 (zero if it starts there).
    pub fn bell_crossing(
        &self,
        channel: Channel,
        t_max: f64,
        search: &EsdSearch,
        mc: Option<&McSettings>,
    ) -> Result<EsdTime> {
        self.level_crossing(channel, BELL_THRESHOLD, t_max, search, mc)
    }

    pub fn level_crossing(
        &self,
        channel: Channel,
        level: f64,
        t_max: f64,
        search: &EsdSearch,
        mc: Option<&McSettings>,
    ) -> Result<EsdTime> {
        match channel {
            Channel::MonteCarlo => {
                let mc = mc.ok_or_else(|| {
                    Error::param("montecarlo", "the montecarlo channel needs simulation settings")
                })?;
                Ok(self.mc_curve(mc, t_max)?.crossing(level))
            }
            _ => {
                self.require_analytic(channel)?;
                let rho0 = ewl_state(&self.state)?;
                let res = find_level_crossing(
                    |t| self.signed_from(channel, t, &rho0).map(|v| v.clamp(0.0, 1.0)),
                    level,
                    t_max,
                    search,
                )?;
                Ok(res.time)
            }
        }
    }
}

/// Parameter varied by [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Purity r.
    Purity,
    /// |a|², with b real and positive.
    AmplitudeSquared,
    /// Time in seconds.
    Time,
}

/// One grid value of a sweep. Parameter sweeps fill `esd` and
/// `bell_crossing`; time sweeps fill `concurrence` (and `stderr` for Monte
/// Carlo).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub esd: Option<EsdResult>,
    pub bell_crossing: Option<EsdTime>,
    pub concurrence: Option<f64>,
    pub stderr: Option<f64>,
}

/// Evaluates `channel` for every grid value, rows in grid order. Analytic
/// rows run in parallel.
pub fn sweep(
    base: &Scenario,
    axis: SweepAxis,
    grid: &[f64],
    channel: Channel,
    t_max: f64,
    search: &EsdSearch,
    mc: Option<&McSettings>,
) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::param("grid", "sweep grid is empty"));
    }
    if channel == Channel::MonteCarlo && mc.is_none() {
        return Err(Error::param(
            "montecarlo",
            "the montecarlo channel needs simulation settings",
        ));
    }

    if axis == SweepAxis::Time {
        let curve = base.curve(channel, grid, mc)?;
        return Ok(grid
            .iter()
            .enumerate()
            .map(|(k, &value)| SweepRow {
                value,
                esd: None,
                bell_crossing: None,
                concurrence: Some(curve.values()[k]),
                stderr: curve.stderr().map(|s| s[k]),
            })
            .collect());
    }

    let scenario_at = |value: f64| -> Result<Scenario> {
        let s = &base.state;
        let state = match axis {
            SweepAxis::Purity => EwlParams::new(value, s.a(), s.flavor())?.with_b_phase(s.b_phase()),
            _ => EwlParams::from_a2(s.r(), value, s.flavor())?.with_b_phase(s.b_phase()),
        };
        Ok(base.with_state(state))
    };
    let row = |value: f64| -> Result<SweepRow> {
        let sc = scenario_at(value)?;
        Ok(SweepRow {
            value,
            esd: Some(sc.esd(channel, t_max, search, mc)?),
            bell_crossing: Some(sc.bell_crossing(channel, t_max, search, mc)?),
            concurrence: None,
            stderr: None,
        })
    };
    if channel == Channel::MonteCarlo {
        grid.iter().map(|&v| row(v)).collect()
    } else {
        grid.par_iter().map(|&v| row(v)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adiabatic::esd_time_optimal;
    use crate::states::Flavor;

    const OMEGA: f64 = 1e11;

    fn fig2(flavor: Flavor, r: f64) -> Scenario {
        let ad = AdiabaticParams::optimal_point(OMEGA, 0.02 * OMEGA).unwrap();
        Scenario::new(EwlParams::bell_like(r, flavor).unwrap(), ad, ad)
            .with_quantum(QuantumNoiseParams::new(2e6, 0.04).unwrap())
    }

    fn search() -> EsdSearch {
        EsdSearch::new(1.0 / OMEGA)
    }

    #[test]
    fn root_finder_matches_closed_form() {
        let sc = fig2(Flavor::Phi, 0.9);
        let found = sc.esd(Channel::Adiabatic, 1e6 / OMEGA, &search(), None).unwrap();
        let exact = esd_time_optimal(&sc.state, 0.02 * OMEGA, OMEGA).unwrap();
        let (a, b) = (found.time.finite().unwrap(), exact.time.finite().unwrap());
        assert!((a / b - 1.0).abs() < 1e-9, "{a} vs {b}");
        assert_eq!(found.method, EsdMethod::Bisection);
        let (lo, hi) = found.bracket;
        assert!(sc.signed(Channel::Adiabatic, lo).unwrap() > 0.0);
        assert!(sc.signed(Channel::Adiabatic, hi).unwrap() <= 0.0);
    }

    #[test]
    fn constant_curve_never_dies() {
        let res = find_esd_time(|_| Ok(0.5), 1.0, &EsdSearch::new(1e-3)).unwrap();
        assert_eq!(res.time, EsdTime::Infinite);
        let curve = ConcurrenceCurve::new(vec![0.0, 1.0, 2.0], vec![0.5; 3], None).unwrap();
        assert_eq!(curve.esd().time, EsdTime::Infinite);
    }

    #[test]
    fn zero_start_is_never_entangled() {
        let res = find_esd_time(|_| Ok(0.0), 1.0, &EsdSearch::new(1e-3)).unwrap();
        assert!(res.never_entangled);
        assert_eq!(res.time, EsdTime::Finite(0.0));
    }

    #[test]
    fn revival_is_flagged() {
        let res = find_esd_time(|t| Ok((10.0 * t).cos()), 1.0, &EsdSearch::new(1e-3)).unwrap();
        assert!(res.revival_detected);
        assert!((res.time.finite().unwrap() - std::f64::consts::FRAC_PI_2 / 10.0).abs() < 1e-12);
    }

    #[test]
    fn experimental_point() {
        for (flavor, target) in [(Flavor::Phi, 18e3), (Flavor::Psi, 14e3)] {
            let esd = fig2(flavor, 0.91)
                .esd(Channel::Interplay, 1e6 / OMEGA, &search(), None)
                .unwrap();
            let wt = esd.time.finite().unwrap() * OMEGA;
            assert!((wt / target - 1.0).abs() < 0.1, "{flavor}: {wt}");
        }
    }

    #[test]
    fn curve_esd_interpolates_and_brackets() {
        let times = vec![0.0, 1.0, 2.0, 3.0];
        let curve = ConcurrenceCurve::new(
            times,
            vec![0.6, 0.2, 0.0, 0.0],
            Some(vec![0.0, 0.05, 0.05, 0.0]),
        )
        .unwrap();
        let res = curve.esd();
        assert_eq!(res.time, EsdTime::Finite(2.0));
        assert!(res.bracket.0 < 2.0 && res.bracket.1 > 2.0);
        assert!((curve.crossing(0.4).finite().unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bad_curves_rejected() {
        assert!(ConcurrenceCurve::new(vec![0.0, 0.0], vec![0.1, 0.1], None).is_err());
        assert!(ConcurrenceCurve::new(vec![0.0, 1.0], vec![0.1, 1.1], None).is_err());
        assert!(ConcurrenceCurve::new(vec![0.0], vec![0.1, 0.2], None).is_err());
    }

    #[test]
    fn purity_sweep_is_monotone_and_ends_infinite() {
        let base = fig2(Flavor::Phi, 0.9);
        let grid: Vec<f64> = (0..=12).map(|k| 0.4 + 0.05 * k as f64).collect();
        let rows = sweep(&base, SweepAxis::Purity, &grid, Channel::Adiabatic, 1e9 / OMEGA, &search(), None)
            .unwrap();
        let times: Vec<EsdTime> = rows.iter().map(|r| r.esd.unwrap().time).collect();
        assert_eq!(*times.last().unwrap(), EsdTime::Infinite);
        for w in times[..times.len() - 1].windows(2) {
            assert!(w[1].as_f64() > w[0].as_f64());
        }
    }

    #[test]
    fn product_row_is_never_entangled() {
        let base = fig2(Flavor::Psi, 0.9);
        let rows = sweep(
            &base,
            SweepAxis::AmplitudeSquared,
            &[0.0, 0.5],
            Channel::Interplay,
            1e6 / OMEGA,
            &search(),
            None,
        )
        .unwrap();
        assert!(rows[0].esd.unwrap().never_entangled);
        assert!(!rows[1].esd.unwrap().never_entangled);
    }

    #[test]
    fn montecarlo_without_settings_is_an_error() {
        let base = fig2(Flavor::Psi, 0.9).with_quantum(QuantumNoiseParams::off());
        let err = sweep(&base, SweepAxis::Purity, &[0.9], Channel::MonteCarlo, 1e-8, &search(), None);
        assert!(matches!(err, Err(Error::Parameter { .. })));
    }

    #[test]
    fn analytic_channels_reject_coupling() {
        let sc = fig2(Flavor::Psi, 0.9).with_coupling(1e9);
        assert!(sc.concurrence(Channel::Interplay, 1e-9).is_err());
    }

    #[test]
    fn time_sweep_reports_concurrence() {
        let base = fig2(Flavor::Phi, 0.9);
        let rows = sweep(&base, SweepAxis::Time, &[0.0, 1e-8], Channel::Adiabatic, 1.0, &search(), None).unwrap();
        assert!((rows[0].concurrence.unwrap() - 0.85).abs() < 1e-15);
        assert!(rows[1].concurrence.unwrap() < 0.85);
    }
}
