use rand::Rng;

use super::stream_rng;
use crate::{Error, Result};

/// Bistable fluctuators with switching rates, couplings and initial signs.
#[derive(Debug, Clone, PartialEq)]
pub struct FluctuatorEnsemble {
    rates: Vec<f64>,
    couplings: Vec<f64>,
    initial_states: Vec<i8>,
}

impl FluctuatorEnsemble {
    pub fn new(rates: Vec<f64>, couplings: Vec<f64>, initial_states: Vec<i8>) -> Result<Self> {
        if rates.len() != couplings.len() || rates.len() != initial_states.len() {
            return Err(Error::param(
                "ensemble",
                format!(
                    "length mismatch: {} rates, {} couplings, {} initial states",
                    rates.len(),
                    couplings.len(),
                    initial_states.len()
                ),
            ));
        }
        if let Some(bad) = rates.iter().find(|g| !(**g > 0.0 && g.is_finite())) {
            return Err(Error::param("rates", format!("switching rate {bad} is not positive")));
        }
        if let Some(bad) = couplings.iter().find(|v| !v.is_finite()) {
            return Err(Error::param("couplings", format!("coupling {bad} is not finite")));
        }
        if let Some(bad) = initial_states.iter().find(|s| **s != 1 && **s != -1) {
            return Err(Error::param("initial_states", format!("sign {bad} is not ±1")));
        }
        Ok(Self {
            rates,
            couplings,
            initial_states,
        })
    }

    pub fn empty() -> Self {
        Self {
            rates: Vec::new(),
            couplings: Vec::new(),
            initial_states: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn initial_states(&self) -> &[i8] {
        &self.initial_states
    }

    /// Σ_j v_j², the variance of X in the stationary state.
    pub fn variance(&self) -> f64 {
        self.couplings.iter().map(|v| v * v).sum()
    }

    /// Same rates and signs, couplings multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            couplings: self.couplings.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }

    /// Errors unless every rate lies in `[gamma_min, gamma_max]`.
    pub fn check_band(&self, gamma_min: f64, gamma_max: f64) -> Result<()> {
        match self.rates.iter().find(|g| !(gamma_min..=gamma_max).contains(*g)) {
            Some(g) => Err(Error::param(
                "rates",
                format!("rate {g} outside [{gamma_min}, {gamma_max}]"),
            )),
            None => Ok(()),
        }
    }
}

/// `n` fluctuators with γ = γ_m (γ_M/γ_m)^u, u ~ U[0, 1), equal couplings
/// Σ/√n and equiprobable initial signs.
pub fn sample_ensemble(
    n: usize,
    gamma_min: f64,
    gamma_max: f64,
    sigma: f64,
    seed: u64,
) -> Result<FluctuatorEnsemble> {
    sample_ensemble_on(n, gamma_min, gamma_max, sigma, seed, 0)
}

/// As [`sample_ensemble`] but drawing from an explicit random stream.
pub(crate) fn sample_ensemble_on(
    n: usize,
    gamma_min: f64,
    gamma_max: f64,
    sigma: f64,
    seed: u64,
    stream: u64,
) -> Result<FluctuatorEnsemble> {
    if n == 0 {
        return Err(Error::param("n", "need at least one fluctuator"));
    }
    if !(gamma_min > 0.0 && gamma_min < gamma_max && gamma_max.is_finite()) {
        return Err(Error::param(
            "gamma",
            format!("need 0 < gamma_min < gamma_max, got [{gamma_min}, {gamma_max}]"),
        ));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::param("sigma", format!("must be non-negative, got {sigma}")));
    }
    let mut rng = stream_rng(seed, stream);
    let log_span = (gamma_max / gamma_min).ln();
    let mut rates = Vec::with_capacity(n);
    let mut initial_states = Vec::with_capacity(n);
    for _ in 0..n {
        let u: f64 = rng.random();
        // exp/ln rounding can land a hair outside the band
        rates.push((gamma_min * (u * log_span).exp()).clamp(gamma_min, gamma_max));
        initial_states.push(if rng.random::<bool>() { 1 } else { -1 });
    }
    let v = sigma / (n as f64).sqrt();
    FluctuatorEnsemble::new(rates, vec![v; n], initial_states)
}
