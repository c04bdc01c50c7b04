use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::{stream_rng, FluctuatorEnsemble};
use crate::{Error, Result};

/// Switch times of every fluctuator on `[0, t_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RtnPaths {
    t_max: f64,
    initial: Vec<i8>,
    switches: Vec<Vec<f64>>,
}

impl RtnPaths {
    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn len(&self) -> usize {
        self.initial.len()
    }

    pub fn is_empty(&self) -> bool {
        self.initial.is_empty()
    }

    /// Ascending switch times of fluctuator `j`.
    pub fn switches(&self, j: usize) -> &[f64] {
        &self.switches[j]
    }

    pub fn initial(&self, j: usize) -> i8 {
        self.initial[j]
    }

    /// ξ_j(t).
    pub fn state_at(&self, j: usize, t: f64) -> i8 {
        let flips = self.switches[j].partition_point(|&s| s <= t);
        if flips % 2 == 0 {
            self.initial[j]
        } else {
            -self.initial[j]
        }
    }

    /// Piecewise-constant X(t) = Σ_j v_j ξ_j(t).
    pub fn noise_path(&self, couplings: &[f64]) -> NoisePath {
        assert_eq!(couplings.len(), self.len(), "one coupling per fluctuator");
        let mut x0 = 0.0;
        let mut jumps: Vec<(f64, f64)> = Vec::new();
        for (j, times) in self.switches.iter().enumerate() {
            let v = couplings[j];
            let mut sign = f64::from(self.initial[j]);
            x0 += v * sign;
            for &t in times {
                jumps.push((t, -2.0 * v * sign));
                sign = -sign;
            }
        }
        jumps.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut x = x0;
        let events = jumps
            .into_iter()
            .map(|(t, dx)| {
                x += dx;
                (t, x)
            })
            .collect();
        NoisePath {
            t_max: self.t_max,
            x0,
            events,
        }
    }
}

/// Draws switch times for each rate on `[0, t_max]`; every fluctuator flips
/// as a Poisson process of rate γ_j, so ⟨ξ(0)ξ(τ)⟩ = e^{−2γ|τ|}.
pub(crate) fn draw_paths<R: Rng + ?Sized>(
    rates: &[f64],
    initial: Vec<i8>,
    t_max: f64,
    rng: &mut R,
) -> RtnPaths {
    let switches = rates
        .iter()
        .map(|&gamma| {
            let mut times = Vec::new();
            let mut t = 0.0;
            loop {
                let gap: f64 = Exp1.sample(rng);
                t += gap / gamma;
                if t > t_max {
                    break;
                }
                times.push(t);
            }
            times
        })
        .collect();
    RtnPaths {
        t_max,
        initial,
        switches,
    }
}

/// Random-telegraph realisation of an ensemble starting from its stored
/// initial signs; deterministic given `seed`.
pub fn rtn_paths(ens: &FluctuatorEnsemble, t_max: f64, seed: u64) -> Result<RtnPaths> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::param("t_max", format!("must be positive, got {t_max}")));
    }
    let mut rng = stream_rng(seed, 1);
    Ok(draw_paths(
        ens.rates(),
        ens.initial_states().to_vec(),
        t_max,
        &mut rng,
    ))
}

/// X(t) as an initial value and a list of (time, new value) jumps.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePath {
    t_max: f64,
    x0: f64,
    events: Vec<(f64, f64)>,
}

impl NoisePath {
    /// X(t) = x on all of `[0, t_max]`.
    pub fn constant(x: f64, t_max: f64) -> Self {
        Self {
            t_max,
            x0: x,
            events: Vec::new(),
        }
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn initial_value(&self) -> f64 {
        self.x0
    }

    pub fn events(&self) -> &[(f64, f64)] {
        &self.events
    }

    pub fn value_at(&self, t: f64) -> f64 {
        match self.events.partition_point(|e| e.0 <= t) {
            0 => self.x0,
            k => self.events[k - 1].1,
        }
    }
}
