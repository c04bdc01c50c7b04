//! Born–Markov quantum noise, the combined single-qubit channel and
//! two-qubit composition.
//!
//! Populations relax towards the Gibbs values with T1 = 2/S_f(Ω) and are
//! untouched by the slow noise. The coherence ⟨1|ρ|0⟩ is multiplied by
//! e^{−iΩt} · z(t) · e^{−t/2T1}, with z the static-path factor of the
//! adiabatic module. At θ = π/2 the alternative [`CoherenceModel::CrossTerm`]
//! keeps the 1/T1 correction inside the logarithm,
//! (1 + (iΩ + 1/T1) Σ² t/Ω²)^{-1/2}.

use std::f64::consts::FRAC_PI_2;

use crate::adiabatic::{spa_coherence, AdiabaticParams};
use crate::consts::{HBAR, K_B};
use crate::qmath::{DensityMatrix4, Mat4, SingleQubitMap, C64, ZERO};
use crate::states::{xstate_signed, Flavor};
use crate::{Error, Result};

/// White-noise level at the qubit frequency and bath temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumNoiseParams {
    /// S_f(Ω) in 1/s. Zero switches quantum noise off.
    pub s_white: f64,
    /// Bath temperature in kelvin.
    pub temperature: f64,
}

impl QuantumNoiseParams {
    pub fn new(s_white: f64, temperature: f64) -> Result<Self> {
        if !(s_white >= 0.0 && s_white.is_finite()) {
            return Err(Error::param("s_white", format!("must be non-negative, got {s_white}")));
        }
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(Error::param(
                "temperature",
                format!("must be positive, got {temperature}"),
            ));
        }
        Ok(Self {
            s_white,
            temperature,
        })
    }

    /// No relaxation; the temperature only matters once s_white > 0.
    pub fn off() -> Self {
        Self {
            s_white: 0.0,
            temperature: 1.0,
        }
    }

    pub fn is_off(&self) -> bool {
        self.s_white == 0.0
    }

    /// 1/T1 = S_f(Ω)/2.
    pub fn relaxation_rate(&self) -> f64 {
        0.5 * self.s_white
    }

    /// T1 in seconds; infinite when quantum noise is off.
    pub fn t1(&self) -> f64 {
        2.0 / self.s_white
    }

    /// T2 = 2 T1.
    pub fn t2(&self) -> f64 {
        2.0 * self.t1()
    }
}

/// Asymptotic single-qubit populations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsPopulations {
    pub p0_inf: f64,
    pub p1_inf: f64,
}

/// p1 − p0 = −tanh(ħΩ/2k_BT), p0 + p1 = 1.
pub fn gibbs_populations(omega: f64, temperature: f64) -> Result<GibbsPopulations> {
    if !(omega > 0.0) {
        return Err(Error::param("omega", format!("must be positive, got {omega}")));
    }
    if !(temperature > 0.0) {
        return Err(Error::param(
            "temperature",
            format!("must be positive, got {temperature}"),
        ));
    }
    // Logistic form avoids cancellation in 1 − tanh for large arguments.
    let x = HBAR * omega / (K_B * temperature);
    Ok(GibbsPopulations {
        p0_inf: 1.0 / (1.0 + (-x).exp()),
        p1_inf: 1.0 / (1.0 + x.exp()),
    })
}

/// How slow and fast noise combine in the coherence factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoherenceModel {
    /// z(t) · e^{−t/2T1} at any θ.
    #[default]
    Factorized,
    /// (1 + (iΩ + 1/T1)Σ²t/Ω²)^{-1/2} e^{−t/2T1} at θ = π/2; other angles
    /// fall back to [`CoherenceModel::Factorized`].
    CrossTerm,
}

/// Noise acting on one qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitNoise {
    pub adiabatic: AdiabaticParams,
    pub quantum: QuantumNoiseParams,
}

impl QubitNoise {
    pub fn new(adiabatic: AdiabaticParams, quantum: QuantumNoiseParams) -> Self {
        Self { adiabatic, quantum }
    }

    pub fn adiabatic_only(adiabatic: AdiabaticParams) -> Self {
        Self::new(adiabatic, QuantumNoiseParams::off())
    }

    pub fn map(&self, t: f64, model: CoherenceModel) -> Result<SingleQubitMap> {
        single_qubit_map_with(t, &self.adiabatic, &self.quantum, model)
    }
}

fn is_optimal_point(theta: f64) -> bool {
    (theta - FRAC_PI_2).abs() <= 1e-12
}

/// Complex multiplier of ⟨1|ρ|0⟩ after time t.
pub fn coherence_factor(
    t: f64,
    ad: &AdiabaticParams,
    qn: &QuantumNoiseParams,
    model: CoherenceModel,
) -> Result<C64> {
    let rotation = C64::from_polar(1.0, -ad.omega * t);
    let rate = qn.relaxation_rate();
    let slow = match model {
        CoherenceModel::CrossTerm if is_optimal_point(ad.theta) => {
            if !(t >= 0.0) {
                return Err(Error::param("t", format!("time must be non-negative, got {t}")));
            }
            let x = ad.sigma * ad.sigma * t / (ad.omega * ad.omega);
            C64::new(1.0 + rate * x, ad.omega * x).sqrt().inv()
        }
        _ => spa_coherence(t, ad)?,
    };
    Ok(rotation * slow * (-0.5 * rate * t).exp())
}

/// Combined adiabatic + quantum channel of one qubit, factorized coherence.
pub fn single_qubit_map(t: f64, ad: &AdiabaticParams, qn: &QuantumNoiseParams) -> Result<SingleQubitMap> {
    single_qubit_map_with(t, ad, qn, CoherenceModel::Factorized)
}

pub fn single_qubit_map_with(
    t: f64,
    ad: &AdiabaticParams,
    qn: &QuantumNoiseParams,
    model: CoherenceModel,
) -> Result<SingleQubitMap> {
    let coh = coherence_factor(t, ad, qn, model)?;
    let pop = if qn.is_off() {
        [[1.0, 0.0], [0.0, 1.0]]
    } else {
        let g = gibbs_populations(ad.omega, qn.temperature)?;
        let e = (-qn.relaxation_rate() * t).exp();
        let inf = [g.p0_inf, g.p1_inf];
        // pop[i][l] = P(l → i)
        let mut p = [[0.0; 2]; 2];
        for (i, row) in p.iter_mut().enumerate() {
            for (l, v) in row.iter_mut().enumerate() {
                *v = (1.0 - e) * inf[i] + if i == l { e } else { 0.0 };
            }
        }
        p
    };
    SingleQubitMap::secular(pop, coh)
}

/// ⟨ij|ρ(t)|i'j'⟩ = Σ A_{ii'}^{ll'} B_{jj'}^{mm'} ⟨lm|ρ(0)|l'm'⟩.
pub fn compose_two_qubit(
    rho0: &DensityMatrix4,
    map_a: &SingleQubitMap,
    map_b: &SingleQubitMap,
) -> Result<DensityMatrix4> {
    let r0 = rho0.elements();
    let mut out: Mat4 = [[ZERO; 4]; 4];
    for i in 0..2 {
        for ip in 0..2 {
            for l in 0..2 {
                for lp in 0..2 {
                    let a = map_a.coefficient(i, ip, l, lp);
                    if a == ZERO {
                        continue;
                    }
                    for j in 0..2 {
                        for jp in 0..2 {
                            let mut acc = ZERO;
                            for m in 0..2 {
                                for mp in 0..2 {
                                    acc += map_b.coefficient(j, jp, m, mp) * r0[2 * l + m][2 * lp + mp];
                                }
                            }
                            out[2 * i + j][2 * ip + jp] += a * acc;
                        }
                    }
                }
            }
        }
    }
    DensityMatrix4::new(out)
}

/// Two-qubit state after time t under independent noise on each qubit.
pub fn evolve_state(
    t: f64,
    rho0: &DensityMatrix4,
    qubit_a: &QubitNoise,
    qubit_b: &QubitNoise,
    model: CoherenceModel,
) -> Result<DensityMatrix4> {
    compose_two_qubit(rho0, &qubit_a.map(t, model)?, &qubit_b.map(t, model)?)
}

/// 2·max(K1, K2) of the composed channel, unclamped.
pub fn composed_signed(
    t: f64,
    rho0: &DensityMatrix4,
    qubit_a: &QubitNoise,
    qubit_b: &QubitNoise,
    model: CoherenceModel,
) -> Result<f64> {
    xstate_signed(&evolve_state(t, rho0, qubit_a, qubit_b, model)?)
}

fn check_bell_preconditions(ad: &AdiabaticParams, qn: &QuantumNoiseParams) -> Result<()> {
    if !is_optimal_point(ad.theta) {
        return Err(Error::param(
            "theta",
            format!("closed-form Bell concurrence needs θ = π/2, got {}", ad.theta),
        ));
    }
    if qn.is_off() {
        return Err(Error::param(
            "s_white",
            "closed-form Bell concurrence needs quantum noise (s_white > 0)",
        ));
    }
    Ok(())
}

/// K1^Φ or K2^Ψ for Bell initial states (r = 1, a = 1/√2) on resonant,
/// identical qubits at θ = π/2.
pub fn interplay_k_bell(
    t: f64,
    flavor: Flavor,
    ad: &AdiabaticParams,
    qn: &QuantumNoiseParams,
) -> Result<f64> {
    check_bell_preconditions(ad, qn)?;
    if !(t >= 0.0) {
        return Err(Error::param("t", format!("time must be non-negative, got {t}")));
    }
    let g = gibbs_populations(ad.omega, qn.temperature)?;
    let (p0, p1) = (g.p0_inf, g.p1_inf);
    let e = (-t / qn.t1()).exp();
    let s2 = ad.sigma * ad.sigma;
    let coherence = 0.5 * e / (1.0 + s2 * s2 * (t / ad.omega).powi(2)).sqrt();
    let sq = p0 * p0 + p1 * p1;
    let k = match flavor {
        Flavor::Phi => {
            coherence
                - (p1 * p0).sqrt() * (1.0 - e) * (sq * e + p0 * p1 * (1.0 + e * e)).sqrt()
        }
        Flavor::Psi => coherence - 0.5 * (1.0 - e) * (sq * e + 2.0 * p0 * p1),
    };
    Ok(k)
}

/// Closed-form interplay concurrence for Bell initial states.
pub fn interplay_concurrence_bell(
    t: f64,
    flavor: Flavor,
    ad: &AdiabaticParams,
    qn: &QuantumNoiseParams,
) -> Result<f64> {
    Ok((2.0 * interplay_k_bell(t, flavor, ad, qn)?).clamp(0.0, 1.0))
}
