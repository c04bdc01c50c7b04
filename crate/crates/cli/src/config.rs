//! JSON scenario configuration, layered as defaults < preset < file < flags.

use std::path::Path;

use esdlab_core::adiabatic::AdiabaticParams;
use esdlab_core::analysis::Scenario;
use esdlab_core::markov::QuantumNoiseParams;
use esdlab_core::states::{EwlParams, Flavor};
use esdlab_core::stochastic::{McSettings, DEFAULT_FLUCTUATORS};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StateSection {
    pub flavor: String,
    pub r: f64,
    pub a2: f64,
    /// Phase of the second amplitude, radians.
    pub phase: f64,
}

impl Default for StateSection {
    fn default() -> Self {
        Self {
            flavor: "phi".into(),
            r: 0.91,
            a2: 0.5,
            phase: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QubitSection {
    pub omega_rad_s: f64,
    pub theta_rad: f64,
    pub sigma_rad_s: f64,
    pub gamma_min_hz: f64,
    pub gamma_max_hz: f64,
}

impl Default for QubitSection {
    fn default() -> Self {
        Self {
            omega_rad_s: 1e11,
            theta_rad: std::f64::consts::FRAC_PI_2,
            sigma_rad_s: 2e9,
            gamma_min_hz: 1.0,
            gamma_max_hz: 1e6,
        }
    }
}

/// Qubit B; every missing field is taken from qubit A.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartialQubitSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_rad_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_rad: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_rad_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_min_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_max_hz: Option<f64>,
}

impl PartialQubitSection {
    pub fn resolve(&self, a: &QubitSection) -> QubitSection {
        QubitSection {
            omega_rad_s: self.omega_rad_s.unwrap_or(a.omega_rad_s),
            theta_rad: self.theta_rad.unwrap_or(a.theta_rad),
            sigma_rad_s: self.sigma_rad_s.unwrap_or(a.sigma_rad_s),
            gamma_min_hz: self.gamma_min_hz.unwrap_or(a.gamma_min_hz),
            gamma_max_hz: self.gamma_max_hz.unwrap_or(a.gamma_max_hz),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuantumSection {
    pub s_white_per_s: f64,
    pub temperature_k: f64,
    pub enabled: bool,
}

impl Default for QuantumSection {
    fn default() -> Self {
        Self {
            s_white_per_s: 2e6,
            temperature_k: 0.04,
            enabled: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CouplingSection {
    pub g_rad_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub trajectories: usize,
    /// End of the sample grid as Ω_A·t.
    pub t_max_omega: f64,
    pub samples: usize,
    pub seed: u64,
    pub fluctuators: usize,
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            trajectories: 2000,
            t_max_omega: 2e4,
            samples: 201,
            seed: 0,
            fluctuators: DEFAULT_FLUCTUATORS,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub state: StateSection,
    pub qubit_a: QubitSection,
    pub qubit_b: PartialQubitSection,
    pub quantum: QuantumSection,
    pub coupling: CouplingSection,
    pub sim: SimSection,
}

/// Recursively overlays `top` onto `base`; objects merge, anything else replaces.
pub fn merge(base: &mut Value, top: Value) {
    match (base, top) {
        (Value::Object(b), Value::Object(t)) => {
            for (k, v) in t {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

pub fn read_file(path: &Path) -> CliResult<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if !v.is_object() {
        return Err(CliError::Config(format!("{}: top level must be an object", path.display())));
    }
    Ok(v)
}

fn positive(name: &str, v: f64) -> CliResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {v}")))
    }
}

impl ScenarioConfig {
    /// Builds the config from layered JSON values, lowest precedence first.
    pub fn from_layers(layers: Vec<Value>) -> CliResult<Self> {
        let mut v = serde_json::to_value(Self::default()).map_err(CliError::runtime)?;
        for layer in layers {
            merge(&mut v, layer);
        }
        let cfg: Self = serde_json::from_value(v).map_err(CliError::config)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn qubit_b(&self) -> QubitSection {
        self.qubit_b.resolve(&self.qubit_a)
    }

    pub fn flavor(&self) -> CliResult<Flavor> {
        self.state.flavor.parse().map_err(CliError::config)
    }

    pub fn validate(&self) -> CliResult<()> {
        self.flavor()?;
        self.ewl()?;
        self.adiabatic()?;
        self.quantum()?;
        let s = &self.sim;
        positive("sim.t_max_omega", s.t_max_omega)?;
        if s.samples < 2 {
            return Err(CliError::Config(format!("sim.samples must be at least 2, got {}", s.samples)));
        }
        if s.trajectories == 0 || s.fluctuators == 0 {
            return Err(CliError::Config("sim.trajectories and sim.fluctuators must be positive".into()));
        }
        if !self.coupling.g_rad_s.is_finite() {
            return Err(CliError::Config("coupling.g_rad_s must be finite".into()));
        }
        Ok(())
    }

    pub fn ewl(&self) -> CliResult<EwlParams> {
        let st = &self.state;
        Ok(EwlParams::from_a2(st.r, st.a2, self.flavor()?)
            .map_err(CliError::config)?
            .with_b_phase(st.phase))
    }

    pub fn adiabatic(&self) -> CliResult<(AdiabaticParams, AdiabaticParams)> {
        let build = |q: &QubitSection| {
            positive("omega_rad_s", q.omega_rad_s)?;
            AdiabaticParams::new(q.omega_rad_s, q.theta_rad, q.sigma_rad_s, q.gamma_min_hz, q.gamma_max_hz)
                .map_err(CliError::config)
        };
        Ok((build(&self.qubit_a)?, build(&self.qubit_b())?))
    }

    /// Quantum noise as seen by the analytic channels; off when disabled.
    pub fn quantum(&self) -> CliResult<QuantumNoiseParams> {
        let q = &self.quantum;
        let params = QuantumNoiseParams::new(q.s_white_per_s, q.temperature_k).map_err(CliError::config)?;
        Ok(if q.enabled { params } else { QuantumNoiseParams::off() })
    }

    pub fn scenario(&self) -> CliResult<Scenario> {
        let (a, b) = self.adiabatic()?;
        Ok(Scenario::new(self.ewl()?, a, b)
            .with_quantum(self.quantum()?)
            .with_coupling(self.coupling.g_rad_s))
    }

    pub fn mc_settings(&self) -> McSettings {
        McSettings {
            n_trajectories: self.sim.trajectories,
            n_samples: self.sim.samples,
            seed: self.sim.seed,
            n_fluctuators: self.sim.fluctuators,
            threads: None,
        }
    }

    /// Uniform Ω_A·t grid from 0 to `sim.t_max_omega`.
    pub fn omega_t_grid(&self) -> Vec<f64> {
        let n = self.sim.samples;
        (0..n)
            .map(|k| self.sim.t_max_omega * k as f64 / (n - 1) as f64)
            .collect()
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }
}
