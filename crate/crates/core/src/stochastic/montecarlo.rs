use rand::Rng;
use rayon::prelude::*;

use super::ensemble::sample_ensemble_on;
use super::propagate::propagators;
use super::rtn::draw_paths;
use super::{stream_rng, FluctuatorEnsemble};
use crate::adiabatic::AdiabaticParams;
use crate::markov::QuantumNoiseParams;
use crate::qmath::{conjugate_by, wootters_concurrence, DensityMatrix4, Mat4, ZERO};
use crate::{Error, Result};

/// Fluctuators per qubit unless configured otherwise.
pub const DEFAULT_FLUCTUATORS: usize = 250;

/// Trajectories are split into this many fixed index ranges. The split
/// depends only on `n_trajectories`, which keeps sums bit-identical for
/// any worker count and gives the jackknife its blocks.
const BATCHES: usize = 20;

const ENSEMBLE_STREAM_A: u64 = u64::MAX;
const ENSEMBLE_STREAM_B: u64 = u64::MAX - 1;

/// Monte Carlo run description.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub qubit_a: AdiabaticParams,
    pub qubit_b: AdiabaticParams,
    pub n_trajectories: usize,
    /// Last sample time, seconds.
    pub t_max: f64,
    /// Points on the uniform grid `[0, t_max]`.
    pub n_samples: usize,
    pub seed: u64,
    /// Strength of −(g/2) σ_z^A σ_z^B in rad/s; 0 leaves the qubits uncoupled.
    pub coupling_g: f64,
    /// Must be `None` or switched off: trajectories carry classical noise only.
    pub quantum: Option<QuantumNoiseParams>,
    pub n_fluctuators: usize,
    /// Worker cap; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Explicit ascending sample times replacing the uniform grid.
    pub times: Option<Vec<f64>>,
}

impl SimConfig {
    pub fn new(
        qubit_a: AdiabaticParams,
        qubit_b: AdiabaticParams,
        n_trajectories: usize,
        t_max: f64,
        n_samples: usize,
        seed: u64,
    ) -> Self {
        Self {
            qubit_a,
            qubit_b,
            n_trajectories,
            t_max,
            n_samples,
            seed,
            coupling_g: 0.0,
            quantum: None,
            n_fluctuators: DEFAULT_FLUCTUATORS,
            threads: None,
            times: None,
        }
    }

    /// Samples at `times` instead of the uniform grid; `t_max` and
    /// `n_samples` follow from them.
    pub fn with_times(mut self, times: Vec<f64>) -> Self {
        self.t_max = times.last().copied().unwrap_or(0.0);
        self.n_samples = times.len();
        self.times = Some(times);
        self
    }

    pub fn with_coupling(mut self, g: f64) -> Self {
        self.coupling_g = g;
        self
    }

    pub fn with_fluctuators(mut self, n: usize) -> Self {
        self.n_fluctuators = n;
        self
    }

    pub fn with_threads(mut self, threads: Option<usize>) -> Self {
        self.threads = threads;
        self
    }

    pub fn with_quantum(mut self, quantum: Option<QuantumNoiseParams>) -> Self {
        self.quantum = quantum;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.qubit_a.validate()?;
        self.qubit_b.validate()?;
        if self.n_trajectories == 0 {
            return Err(Error::param("n_trajectories", "need at least one trajectory"));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::param("t_max", format!("must be positive, got {}", self.t_max)));
        }
        if self.n_samples < 2 {
            return Err(Error::param("n_samples", format!("need at least 2, got {}", self.n_samples)));
        }
        if !self.coupling_g.is_finite() {
            return Err(Error::param("coupling_g", "must be finite"));
        }
        if self.n_fluctuators == 0 {
            return Err(Error::param("n_fluctuators", "need at least one fluctuator"));
        }
        if self.threads == Some(0) {
            return Err(Error::param("threads", "worker count must be positive"));
        }
        if let Some(times) = &self.times {
            if times[0] < 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::param("times", "must be non-negative and strictly increasing"));
            }
        }
        if self.quantum.is_some_and(|q| !q.is_off()) {
            return Err(Error::param(
                "quantum",
                "quantum noise is not simulated in trajectories; use the interplay channel",
            ));
        }
        Ok(())
    }

    /// Uniform grid t_k = k·t_max/(n_samples − 1).
    pub fn sample_times(&self) -> Vec<f64> {
        if let Some(times) = &self.times {
            return times.clone();
        }
        let last = (self.n_samples - 1) as f64;
        (0..self.n_samples)
            .map(|k| self.t_max * k as f64 / last)
            .collect()
    }

    fn ensemble(&self, p: &AdiabaticParams, stream: u64) -> Result<FluctuatorEnsemble> {
        if p.sigma == 0.0 {
            return Ok(FluctuatorEnsemble::empty());
        }
        sample_ensemble_on(self.n_fluctuators, p.gamma_min, p.gamma_max, p.sigma, self.seed, stream)
    }
}

/// Monte Carlo knobs used when a scenario is routed through trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McSettings {
    pub n_trajectories: usize,
    pub n_samples: usize,
    pub seed: u64,
    pub n_fluctuators: usize,
    pub threads: Option<usize>,
}

impl Default for McSettings {
    fn default() -> Self {
        Self {
            n_trajectories: 2000,
            n_samples: 201,
            seed: 0,
            n_fluctuators: DEFAULT_FLUCTUATORS,
            threads: None,
        }
    }
}

/// Averaged state and its concurrence on the sample grid.
#[derive(Debug, Clone, PartialEq)]
pub struct McCurve {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix4>,
    pub concurrence: Vec<f64>,
    /// Jackknife standard error over the trajectory batches; zero for a
    /// single trajectory.
    pub stderr: Vec<f64>,
}

fn batch_ranges(n: usize) -> Vec<(usize, usize)> {
    let b = BATCHES.min(n);
    (0..b).map(|k| (k * n / b, (k + 1) * n / b)).collect()
}

fn random_signs<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<i8> {
    (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect()
}

struct Run<'a> {
    cfg: &'a SimConfig,
    rho0: &'a Mat4,
    ens_a: FluctuatorEnsemble,
    ens_b: FluctuatorEnsemble,
    times: Vec<f64>,
}

impl Run<'_> {
    /// Σ_i U_i(t_k) ρ0 U_i(t_k)† over trajectories `lo..hi`.
    fn batch_sum(&self, (lo, hi): (usize, usize)) -> Vec<Mat4> {
        let mut acc = vec![[[ZERO; 4]; 4]; self.times.len()];
        for i in lo..hi {
            let mut rng = stream_rng(self.cfg.seed, i as u64);
            let mut path = |ens: &FluctuatorEnsemble| {
                let signs = random_signs(ens.len(), &mut rng);
                draw_paths(ens.rates(), signs, self.cfg.t_max, &mut rng).noise_path(ens.couplings())
            };
            let xa = path(&self.ens_a);
            let xb = path(&self.ens_b);
            let us = propagators(
                &self.cfg.qubit_a,
                &self.cfg.qubit_b,
                self.cfg.coupling_g,
                &xa,
                &xb,
                &self.times,
            );
            for (sum, u) in acc.iter_mut().zip(&us) {
                add_into(sum, &conjugate_by(u, self.rho0));
            }
        }
        acc
    }
}

fn mean_state(sum: &Mat4, count: usize) -> Result<DensityMatrix4> {
    let w = 1.0 / count as f64;
    let mut m = [[ZERO; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            // averaging with the adjoint removes round-off anti-Hermitian parts
            m[r][c] = (sum[r][c] + sum[c][r].conj()) * (0.5 * w);
        }
    }
    DensityMatrix4::new(m)
}

fn add_into(acc: &mut Mat4, m: &Mat4) {
    for r in 0..4 {
        for c in 0..4 {
            acc[r][c] += m[r][c];
        }
    }
}

fn sub(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut m = *a;
    for r in 0..4 {
        for c in 0..4 {
            m[r][c] -= b[r][c];
        }
    }
    m
}

/// Trajectory-averaged ρ(t) and its Wootters concurrence.
///
/// Each qubit gets its own fluctuator ensemble, drawn once per run. Every
/// trajectory then starts from fresh equiprobable fluctuator signs and new
/// switching histories taken from a random stream indexed by the
/// trajectory number, so results depend on `(seed, n_trajectories)` only.
pub fn monte_carlo_concurrence(rho0: &DensityMatrix4, cfg: &SimConfig) -> Result<McCurve> {
    cfg.validate()?;
    let run = Run {
        cfg,
        rho0: rho0.elements(),
        ens_a: cfg.ensemble(&cfg.qubit_a, ENSEMBLE_STREAM_A)?,
        ens_b: cfg.ensemble(&cfg.qubit_b, ENSEMBLE_STREAM_B)?,
        times: cfg.sample_times(),
    };
    let ranges = batch_ranges(cfg.n_trajectories);
    let work = || -> Vec<Vec<Mat4>> { ranges.par_iter().map(|&r| run.batch_sum(r)).collect() };
    let batches = match cfg.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::Diagnostic(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };

    let n = cfg.n_trajectories;
    let nb = ranges.len();
    let mut states = Vec::with_capacity(run.times.len());
    let mut concurrence = Vec::with_capacity(run.times.len());
    let mut stderr = Vec::with_capacity(run.times.len());
    for k in 0..run.times.len() {
        let mut total = [[ZERO; 4]; 4];
        for b in &batches {
            add_into(&mut total, &b[k]);
        }
        let mean = mean_state(&total, n)?;
        concurrence.push(wootters_concurrence(&mean));
        states.push(mean);

        let se = if nb < 2 {
            0.0
        } else {
            let loo: Vec<f64> = batches
                .iter()
                .zip(&ranges)
                .map(|(b, &(lo, hi))| {
                    mean_state(&sub(&total, &b[k]), n - (hi - lo)).map(|s| wootters_concurrence(&s))
                })
                .collect::<Result<_>>()?;
            let avg = loo.iter().sum::<f64>() / nb as f64;
            let ss: f64 = loo.iter().map(|c| (c - avg).powi(2)).sum();
            ((nb - 1) as f64 / nb as f64 * ss).sqrt()
        };
        stderr.push(se);
    }
    Ok(McCurve {
        times: run.times,
        states,
        concurrence,
        stderr,
    })
}
