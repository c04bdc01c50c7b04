//! Periodogram estimate of the fluctuator-ensemble spectrum.
//!
//! Each realisation of X(t) is reduced to exact averages over N equal time
//! bins without materialising event lists: a switch at s inside bin k adds
//! its jump to a level-change array and jump·(t_{k+1} − s) to a partial
//! array, so bin averages follow from one running sum. The averages are
//! mean-subtracted, Hann-windowed and transformed; the box average is
//! undone by dividing by sinc²(ω dt/2). The result is the two-sided
//! spectrum S(ω) = ∫ e^{iωτ} ⟨X(0)X(τ)⟩ dτ.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use rustfft::{num_complex::Complex64, Fft, FftPlanner};

use super::{stream_rng, FluctuatorEnsemble};
use crate::{Error, Result};

/// Fewest realisations accepted by [`psd_estimate`].
pub const MIN_REALIZATIONS: usize = 100;

const BATCHES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdOptions {
    /// Time bins per realisation; a power of two.
    pub n_grid: usize,
    /// Logarithmic averaging bins per decade of ω.
    pub bins_per_decade: usize,
    pub threads: Option<usize>,
}

impl Default for PsdOptions {
    fn default() -> Self {
        Self {
            n_grid: 1 << 18,
            bins_per_decade: 10,
            threads: None,
        }
    }
}

/// Realisation-averaged spectrum, log-binned in ω (rad/s).
#[derive(Debug, Clone, PartialEq)]
pub struct PsdEstimate {
    /// Geometric bin centres.
    pub omega: Vec<f64>,
    pub s: Vec<f64>,
    /// Fundamental 2π/t_max; fit bands must start at or above it.
    pub resolution: f64,
    pub nyquist: f64,
    pub n_realizations: usize,
}

/// Log-log regression of an estimate against the 1/f target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdFit {
    pub slope: f64,
    /// Geometric mean of S_est/S_target over the band.
    pub amplitude_ratio: f64,
    /// Largest |S_est/S_target − 1| over the band.
    pub max_deviation: f64,
    pub points: usize,
}

/// πΣ² / (ln(γ_M/γ_m) ω).
pub fn one_over_f_target(omega: f64, sigma: f64, gamma_min: f64, gamma_max: f64) -> f64 {
    PI * sigma * sigma / ((gamma_max / gamma_min).ln() * omega)
}

impl PsdEstimate {
    /// Fits log S against log ω on `[omega_lo, omega_hi]` and compares with
    /// the 1/f target for variance `sigma²` and band `[gamma_min, gamma_max]`.
    pub fn fit(
        &self,
        omega_lo: f64,
        omega_hi: f64,
        sigma: f64,
        gamma_min: f64,
        gamma_max: f64,
    ) -> Result<PsdFit> {
        if !(omega_lo > 0.0 && omega_hi >= 10.0 * omega_lo) {
            return Err(Error::Diagnostic(format!(
                "fit band [{omega_lo}, {omega_hi}] spans less than a decade"
            )));
        }
        if omega_lo < self.resolution || omega_hi > self.nyquist {
            return Err(Error::Diagnostic(format!(
                "fit band [{omega_lo}, {omega_hi}] exceeds the resolved range [{}, {}]",
                self.resolution, self.nyquist
            )));
        }
        let pts: Vec<(f64, f64, f64)> = self
            .omega
            .iter()
            .zip(&self.s)
            .filter(|(w, _)| (omega_lo..=omega_hi).contains(*w))
            .map(|(&w, &s)| (w.ln(), s.ln(), s / one_over_f_target(w, sigma, gamma_min, gamma_max)))
            .collect();
        if pts.len() < 3 {
            return Err(Error::Diagnostic(format!(
                "only {} spectral bins inside the fit band",
                pts.len()
            )));
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Ok(PsdFit {
            slope: sxy / sxx,
            amplitude_ratio: (pts.iter().map(|p| p.2.ln()).sum::<f64>() / n).exp(),
            max_deviation: pts.iter().map(|p| (p.2 - 1.0).abs()).fold(0.0, f64::max),
            points: pts.len(),
        })
    }
}

struct Periodogram<'a> {
    ens: &'a FluctuatorEnsemble,
    n: usize,
    dt: f64,
    seed: u64,
    window: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl Periodogram<'_> {
    /// Exact bin averages of one realisation with fresh stationary signs.
    fn bin_averages(&self, index: u64) -> Vec<f64> {
        // Records hold ~10⁷ switches, so they draw from a fast generator
        // seeded off the per-record stream.
        let mut rng = SmallRng::from_rng(&mut stream_rng(self.seed, index));
        let t_max = self.n as f64 * self.dt;
        let inv_dt = 1.0 / self.dt;
        let last = self.n - 1;
        let mut steps = vec![0.0; self.n];
        let mut partial = vec![0.0; self.n];
        let mut x0 = 0.0;
        for (&gamma, &v) in self.ens.rates().iter().zip(self.ens.couplings()) {
            let mean_gap = 1.0 / gamma;
            let mut jump = if rng.random::<bool>() { -2.0 * v } else { 2.0 * v };
            x0 -= 0.5 * jump;
            let mut t = 0.0;
            loop {
                let gap: f64 = Exp1.sample(&mut rng);
                t += gap * mean_gap;
                if t >= t_max {
                    break;
                }
                let k = ((t * inv_dt) as usize).min(last);
                steps[k] += jump;
                partial[k] += jump * ((k + 1) as f64 * self.dt - t);
                jump = -jump;
            }
        }
        let mut level = x0;
        steps
            .iter()
            .zip(&partial)
            .map(|(d, p)| {
                let avg = level + p / self.dt;
                level += d;
                avg
            })
            .collect()
    }

    /// |FFT|² of the windowed, mean-free bin averages for k = 0..=n/2.
    fn power(&self, index: u64) -> Vec<f64> {
        let x = self.bin_averages(index);
        let mean = x.iter().sum::<f64>() / self.n as f64;
        let mut buf: Vec<Complex64> = x
            .iter()
            .zip(&self.window)
            .map(|(v, w)| Complex64::new((v - mean) * w, 0.0))
            .collect();
        self.fft.process(&mut buf);
        buf[..=self.n / 2].iter().map(|z| z.norm_sqr()).collect()
    }
}

/// [`psd_estimate_with`] using default options.
pub fn psd_estimate(
    ens: &FluctuatorEnsemble,
    t_max: f64,
    n_realizations: usize,
    seed: u64,
) -> Result<PsdEstimate> {
    psd_estimate_with(ens, t_max, n_realizations, seed, &PsdOptions::default())
}

/// Average periodogram over `n_realizations` records of length `t_max`.
///
/// Realisation i draws from random stream i of `seed`; the reduction runs
/// over fixed index batches so the result does not depend on thread count.
pub fn psd_estimate_with(
    ens: &FluctuatorEnsemble,
    t_max: f64,
    n_realizations: usize,
    seed: u64,
    opts: &PsdOptions,
) -> Result<PsdEstimate> {
    if n_realizations < MIN_REALIZATIONS {
        return Err(Error::param(
            "n_realizations",
            format!("need at least {MIN_REALIZATIONS}, got {n_realizations}"),
        ));
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::param("t_max", format!("must be positive, got {t_max}")));
    }
    if !opts.n_grid.is_power_of_two() || opts.n_grid < 16 {
        return Err(Error::param(
            "n_grid",
            format!("must be a power of two ≥ 16, got {}", opts.n_grid),
        ));
    }
    if opts.bins_per_decade == 0 {
        return Err(Error::param("bins_per_decade", "must be positive"));
    }
    if opts.threads == Some(0) {
        return Err(Error::param("threads", "worker count must be positive"));
    }

    let n = opts.n_grid;
    let dt = t_max / n as f64;
    let window: Vec<f64> = (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
        .collect();
    let w2: f64 = window.iter().map(|w| w * w).sum();
    let pg = Periodogram {
        ens,
        n,
        dt,
        seed,
        window,
        fft: FftPlanner::new().plan_fft_forward(n),
    };

    let nb = BATCHES.min(n_realizations);
    let ranges: Vec<(usize, usize)> = (0..nb)
        .map(|k| (k * n_realizations / nb, (k + 1) * n_realizations / nb))
        .collect();
    let work = || -> Vec<Vec<f64>> {
        ranges
            .par_iter()
            .map(|&(lo, hi)| {
                let mut acc = vec![0.0; n / 2 + 1];
                for i in lo..hi {
                    for (a, p) in acc.iter_mut().zip(pg.power(i as u64)) {
                        *a += p;
                    }
                }
                acc
            })
            .collect()
    };
    let batches = match opts.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::Diagnostic(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    let mut total = vec![0.0; n / 2 + 1];
    for b in &batches {
        for (t, v) in total.iter_mut().zip(b) {
            *t += v;
        }
    }

    let d_omega = 2.0 * PI / t_max;
    let norm = dt / (w2 * n_realizations as f64);
    // Skip the lowest bins: mean removal and the window main lobe bias them.
    let raw: Vec<(f64, f64)> = (2..=n / 2)
        .map(|k| {
            let w = k as f64 * d_omega;
            let h = 0.5 * w * dt;
            let sinc2 = (h.sin() / h).powi(2);
            (w, total[k] * norm / sinc2)
        })
        .collect();

    let (omega, s) = log_bin(&raw, opts.bins_per_decade);
    Ok(PsdEstimate {
        omega,
        s,
        resolution: d_omega,
        nyquist: PI / dt,
        n_realizations,
    })
}

fn log_bin(raw: &[(f64, f64)], per_decade: usize) -> (Vec<f64>, Vec<f64>) {
    let key = |w: f64| (w.log10() * per_decade as f64).floor() as i64;
    let mut omega = Vec::new();
    let mut s = Vec::new();
    let mut i = 0;
    while i < raw.len() {
        let b = key(raw[i].0);
        let j = i + raw[i..].iter().take_while(|p| key(p.0) == b).count();
        let m = (j - i) as f64;
        omega.push((raw[i..j].iter().map(|p| p.0.ln()).sum::<f64>() / m).exp());
        s.push(raw[i..j].iter().map(|p| p.1).sum::<f64>() / m);
        i = j;
    }
    (omega, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> PsdOptions {
        PsdOptions {
            n_grid: 1 << 12,
            ..PsdOptions::default()
        }
    }

    #[test]
    fn single_fluctuator_is_lorentzian() {
        let gamma = 200.0;
        let ens = FluctuatorEnsemble::new(vec![gamma], vec![1.0], vec![1]).unwrap();
        let est = psd_estimate_with(&ens, 1.0, 400, 3, &small()).unwrap();
        for (&w, &s) in est.omega.iter().zip(&est.s) {
            if !(20.0..=4000.0).contains(&w) {
                continue;
            }
            let lorentz = 4.0 * gamma / (4.0 * gamma * gamma + w * w);
            assert!((s / lorentz - 1.0).abs() < 0.15, "ω={w}: {s} vs {lorentz}");
        }
    }

    #[test]
    fn doubling_couplings_quadruples_spectrum() {
        let ens = super::super::sample_ensemble(20, 1.0, 1e3, 1.0, 4).unwrap();
        let a = psd_estimate_with(&ens, 1.0, 100, 9, &small()).unwrap();
        let b = psd_estimate_with(&ens.scaled(2.0), 1.0, 100, 9, &small()).unwrap();
        for (x, y) in a.s.iter().zip(&b.s) {
            assert!((y / x - 4.0).abs() < 1e-9);
        }
    }

    #[test]
    fn too_few_realizations_rejected() {
        let ens = FluctuatorEnsemble::new(vec![1.0], vec![1.0], vec![1]).unwrap();
        assert!(psd_estimate(&ens, 1.0, 99, 0).is_err());
    }

    #[test]
    fn narrow_band_is_a_diagnostic() {
        let ens = FluctuatorEnsemble::new(vec![50.0], vec![1.0], vec![1]).unwrap();
        let est = psd_estimate_with(&ens, 1.0, 100, 1, &small()).unwrap();
        assert!(matches!(
            est.fit(100.0, 500.0, 1.0, 1.0, 100.0),
            Err(Error::Diagnostic(_))
        ));
        assert!(matches!(
            est.fit(100.0, 1e6, 1.0, 1.0, 100.0),
            Err(Error::Diagnostic(_))
        ));
    }

    #[test]
    fn thread_count_irrelevant() {
        let ens = super::super::sample_ensemble(10, 1.0, 1e3, 1.0, 4).unwrap();
        let one = PsdOptions { threads: Some(1), ..small() };
        let two = PsdOptions { threads: Some(2), ..small() };
        assert_eq!(
            psd_estimate_with(&ens, 1.0, 100, 2, &one).unwrap(),
            psd_estimate_with(&ens, 1.0, 100, 2, &two).unwrap()
        );
    }
}
