//! Parameter sets of the published figures, as config layers.
//!
//! All panels share Ω = 10¹¹ rad/s, θ = π/2, Σ = 0.02 Ω and 1/f noise in
//! [1, 10⁶] Hz, which are also the config defaults.

use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

pub const NAMES: [&str; 6] = ["fig1a", "fig1b", "fig2", "fig3", "fig4a", "fig4b"];

pub fn preset(name: &str) -> CliResult<Value> {
    let v = match name {
        // adiabatic noise only
        "fig1a" | "fig1b" => json!({
            "state": {"r": 0.9, "a2": 0.5},
            "quantum": {"enabled": false},
            "sim": {"t_max_omega": 1e5, "samples": 501}
        }),
        // S_f = 2×10⁶ s⁻¹ at T = 0.04 K on top of the 1/f noise
        "fig2" => json!({
            "state": {"r": 0.91, "a2": 0.5},
            "quantum": {"s_white_per_s": 2e6, "temperature_k": 0.04, "enabled": true},
            "sim": {"t_max_omega": 4e4, "samples": 401}
        }),
        "fig3" => json!({
            "state": {"r": 0.95, "a2": 0.5},
            "quantum": {"s_white_per_s": 2e6, "temperature_k": 0.04, "enabled": true},
            "sim": {"t_max_omega": 1e4, "samples": 1001}
        }),
        // Ω₂ = 1.2 Ω₁, classical noise simulated by trajectories
        "fig4a" => json!({
            "state": {"flavor": "psi", "r": 1.0, "a2": 0.5},
            "qubit_b": {"omega_rad_s": 1.2e11},
            "quantum": {"enabled": false},
            "sim": {"trajectories": 2000, "t_max_omega": 5e3, "samples": 101, "seed": 1}
        }),
        "fig4b" => json!({
            "state": {"flavor": "psi", "r": 1.0, "a2": 0.5},
            "qubit_b": {"omega_rad_s": 1.2e11},
            "quantum": {"enabled": false},
            "coupling": {"g_rad_s": 1e9},
            "sim": {"trajectories": 2000, "t_max_omega": 5e3, "samples": 101, "seed": 2}
        }),
        other => {
            return Err(CliError::Config(format!(
                "unknown preset {other:?}; expected one of {}",
                NAMES.join(", ")
            )))
        }
    };
    Ok(v)
}
