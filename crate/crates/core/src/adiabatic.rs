//! Static-path treatment of low-frequency (1/f) noise.
//!
//! Slow noise X enters each qubit as −½ X σ_z in the lab frame. Frozen over
//! one run, it shifts the splitting to |Ω⃗ + X ẑ| ≈ Ω + cX + s²X²/(2Ω)
//! (c = cos θ, s = sin θ). Averaging the resulting phase over a Gaussian
//! X of width Σ gives the coherence factor
//!
//! z(t) = (1 + iκ)^{-1/2} · exp[−(cΣt)² / (2(1 + iκ))],  κ = s²Σ²t/Ω,
//!
//! whose modulus is the product term of the adiabatic concurrence. The
//! phase of z drops out of the concurrence but is kept for the composed
//! channel so that it produces a complete density matrix.

use log::warn;

use crate::analysis::{EsdMethod, EsdResult};
use crate::consts::SPA_SIGMA_OVER_OMEGA_WARN;
use crate::qmath::C64;
use crate::states::{critical_purity, EwlParams};
use crate::{Error, Result};

/// Per-qubit splitting, operating point and 1/f noise description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticParams {
    /// Qubit splitting Ω in rad/s.
    pub omega: f64,
    /// Angle θ between ẑ and Ω⃗, in radians.
    pub theta: f64,
    /// Standard deviation Σ of the slow noise, rad/s.
    pub sigma: f64,
    /// Lower 1/f band edge γ_m, 1/s.
    pub gamma_min: f64,
    /// Upper 1/f band edge γ_M, 1/s.
    pub gamma_max: f64,
}

impl AdiabaticParams {
    pub fn new(omega: f64, theta: f64, sigma: f64, gamma_min: f64, gamma_max: f64) -> Result<Self> {
        let p = Self {
            omega,
            theta,
            sigma,
            gamma_min,
            gamma_max,
        };
        p.validate()?;
        if p.outside_adiabatic_regime() {
            warn!(
                "Σ/Ω = {:.3} exceeds {SPA_SIGMA_OVER_OMEGA_WARN}; static-path results may be unreliable",
                sigma / omega
            );
        }
        Ok(p)
    }

    /// Optimal operating point θ = π/2 with the 1/f band [1, 10⁶] s⁻¹.
    pub fn optimal_point(omega: f64, sigma: f64) -> Result<Self> {
        Self::new(omega, std::f64::consts::FRAC_PI_2, sigma, 1.0, 1e6)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::param("omega", format!("must be positive, got {}", self.omega)));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::param("sigma", format!("must be non-negative, got {}", self.sigma)));
        }
        if !(0.0..=std::f64::consts::PI).contains(&self.theta) {
            return Err(Error::param("theta", format!("must lie in [0, π], got {}", self.theta)));
        }
        if !(self.gamma_min > 0.0 && self.gamma_min < self.gamma_max && self.gamma_max.is_finite()) {
            return Err(Error::param(
                "gamma",
                format!(
                    "need 0 < gamma_min < gamma_max, got [{}, {}]",
                    self.gamma_min, self.gamma_max
                ),
            ));
        }
        Ok(())
    }

    /// Σ/Ω above the static-path validity heuristic.
    pub fn outside_adiabatic_regime(&self) -> bool {
        self.sigma / self.omega > SPA_SIGMA_OVER_OMEGA_WARN
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    /// κ = s²Σ²t/Ω.
    fn kappa(&self, t: f64) -> f64 {
        let s = self.theta.sin();
        s * s * self.sigma * self.sigma * t / self.omega
    }

    /// Splitting shift δω(X) = cX + s²X²/(2Ω) to second order in X.
    pub fn splitting_shift(&self, x: f64) -> f64 {
        let (s, c) = self.theta.sin_cos();
        c * x + s * s * x * x / (2.0 * self.omega)
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) {
        return Err(Error::param("t", format!("time must be non-negative, got {t}")));
    }
    Ok(())
}

/// |z(t)| = exp{−½(cΣt)²/(1+κ²)} / (1+κ²)^{1/4}.
pub fn spa_coherence_modulus(t: f64, p: &AdiabaticParams) -> Result<f64> {
    check_time(t)?;
    Ok(modulus_unchecked(t, p))
}

fn modulus_unchecked(t: f64, p: &AdiabaticParams) -> f64 {
    let c = p.theta.cos();
    let k2 = 1.0 + p.kappa(t).powi(2);
    let g = c * p.sigma * t;
    (-0.5 * g * g / k2).exp() / k2.powf(0.25)
}

/// Complex static-path factor z(t), excluding the bare e^{−iΩt} rotation.
pub fn spa_coherence(t: f64, p: &AdiabaticParams) -> Result<C64> {
    check_time(t)?;
    let c = p.theta.cos();
    let one_ik = C64::new(1.0, p.kappa(t));
    let g = c * p.sigma * t;
    Ok((-(0.5 * g * g) / one_ik).exp() / one_ik.sqrt())
}

/// 2r|ab| |z_A||z_B| − (1 − r)/2, i.e. the adiabatic concurrence before
/// clamping at zero.
pub fn adiabatic_signed(t: f64, pa: &AdiabaticParams, pb: &AdiabaticParams, state: &EwlParams) -> Result<f64> {
    check_time(t)?;
    let r = state.r();
    Ok(2.0 * r * state.abs_ab() * modulus_unchecked(t, pa) * modulus_unchecked(t, pb) - 0.5 * (1.0 - r))
}

/// Concurrence of either EWL flavor under adiabatic noise alone.
pub fn adiabatic_concurrence(
    t: f64,
    pa: &AdiabaticParams,
    pb: &AdiabaticParams,
    state: &EwlParams,
) -> Result<f64> {
    Ok(adiabatic_signed(t, pa, pb, state)?.clamp(0.0, 1.0))
}

/// Shared r ≤ r* and r = 1 handling for the closed-form ESD times.
fn esd_edge_cases(state: &EwlParams) -> Result<Option<EsdResult>> {
    let r = state.r();
    let r_star = critical_purity(state.a())?;
    if r <= r_star {
        return Ok(Some(EsdResult::never_entangled(EsdMethod::ClosedForm)));
    }
    if r >= 1.0 {
        return Ok(Some(EsdResult::infinite(f64::INFINITY, EsdMethod::ClosedForm)));
    }
    Ok(None)
}

/// t_ESD = (Ω/Σ²)·√(16|ab|² r²/(1−r)² − 1) for identical qubits at θ = π/2.
pub fn esd_time_optimal(state: &EwlParams, sigma: f64, omega: f64) -> Result<EsdResult> {
    if !(sigma > 0.0) || !(omega > 0.0) {
        return Err(Error::param("sigma/omega", "both must be positive"));
    }
    if let Some(edge) = esd_edge_cases(state)? {
        return Ok(edge);
    }
    let r = state.r();
    let ab = state.abs_ab();
    let ratio = r / (1.0 - r);
    // r > r* already guarantees a positive radicand.
    let radicand = 16.0 * ab * ab * ratio * ratio - 1.0;
    Ok(EsdResult::finite(
        omega / (sigma * sigma) * radicand.sqrt(),
        EsdMethod::ClosedForm,
    ))
}

/// t_ESD = (1/Σ)·√(ln[4|ab| r/(1−r)]) for identical qubits at θ = 0.
pub fn esd_time_dephasing(state: &EwlParams, sigma: f64) -> Result<EsdResult> {
    if !(sigma > 0.0) {
        return Err(Error::param("sigma", "must be positive"));
    }
    if let Some(edge) = esd_edge_cases(state)? {
        return Ok(edge);
    }
    let r = state.r();
    let arg = 4.0 * state.abs_ab() * r / (1.0 - r);
    Ok(EsdResult::finite(arg.ln().max(0.0).sqrt() / sigma, EsdMethod::ClosedForm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::EsdTime;
    use crate::states::Flavor;
    use std::f64::consts::{FRAC_PI_2, PI};

    const OMEGA: f64 = 1e11;

    fn optimal(sigma_ratio: f64) -> AdiabaticParams {
        AdiabaticParams::optimal_point(OMEGA, sigma_ratio * OMEGA).unwrap()
    }

    #[test]
    fn unity_at_time_zero() {
        for theta in [0.0, 0.4, FRAC_PI_2, PI] {
            let p = optimal(0.02).with_theta(theta);
            assert_eq!(spa_coherence_modulus(0.0, &p).unwrap(), 1.0);
            assert_eq!(spa_coherence(0.0, &p).unwrap(), C64::new(1.0, 0.0));
        }
    }

    #[test]
    fn pure_dephasing_is_gaussian() {
        let p = optimal(0.02).with_theta(0.0);
        for omega_t in [1.0, 10.0, 50.0, 120.0] {
            let t = omega_t / OMEGA;
            let st = p.sigma * t;
            let expected = (-0.5 * st * st).exp();
            assert!((spa_coherence_modulus(t, &p).unwrap() - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn modulus_matches_complex_factor() {
        for theta in [0.0, 0.3, 1.2, FRAC_PI_2] {
            let p = optimal(0.03).with_theta(theta);
            for omega_t in [0.0, 3.0, 300.0, 4e4] {
                let t = omega_t / OMEGA;
                let m = spa_coherence_modulus(t, &p).unwrap();
                assert!((spa_coherence(t, &p).unwrap().norm() - m).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn monotone_non_increasing() {
        for theta in [0.0, 0.7, FRAC_PI_2] {
            let p = optimal(0.02).with_theta(theta);
            let mut last = 1.0;
            for k in 0..2000 {
                let t = (k as f64 * 50.0) / OMEGA;
                let v = spa_coherence_modulus(t, &p).unwrap();
                assert!(v <= last + 1e-15);
                last = v;
            }
        }
    }

    #[test]
    fn negative_time_rejected() {
        assert!(spa_coherence_modulus(-1.0, &optimal(0.02)).is_err());
    }

    #[test]
    fn initial_concurrence_and_flavor_independence() {
        let p = optimal(0.02);
        for flavor in Flavor::ALL {
            let s = EwlParams::bell_like(0.9, flavor).unwrap();
            assert!((adiabatic_concurrence(0.0, &p, &p, &s).unwrap() - 0.85).abs() < 1e-15);
        }
    }

    #[test]
    fn pure_states_never_die() {
        let p = optimal(0.02);
        for a2 in [0.05, 0.5, 0.9] {
            let s = EwlParams::from_a2(1.0, a2, Flavor::Psi).unwrap();
            for omega_t in [1e3, 1e6, 1e9, 1e12] {
                assert!(adiabatic_concurrence(omega_t / OMEGA, &p, &p, &s).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn optimal_esd_reference_point() {
        let s = EwlParams::bell_like(0.9, Flavor::Phi).unwrap();
        let esd = esd_time_optimal(&s, 0.02 * OMEGA, OMEGA).unwrap();
        let expected = 2500.0 * 323f64.sqrt();
        let got = esd.time.finite().unwrap() * OMEGA;
        assert!((got / expected - 1.0).abs() < 1e-12);
        let at_root = adiabatic_signed(got / OMEGA, &optimal(0.02), &optimal(0.02), &s).unwrap();
        assert!(at_root.abs() < 1e-9 * s.initial_concurrence());
    }

    #[test]
    fn dephasing_esd_reference_point() {
        let s = EwlParams::bell_like(0.9, Flavor::Psi).unwrap();
        let sigma = 0.02 * OMEGA;
        let esd = esd_time_dephasing(&s, sigma).unwrap();
        assert!((esd.time.finite().unwrap() * sigma / 18f64.ln().sqrt() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn esd_edge_cases_handled() {
        let sigma = 0.02 * OMEGA;
        let pure = EwlParams::bell_like(1.0, Flavor::Phi).unwrap();
        assert_eq!(esd_time_optimal(&pure, sigma, OMEGA).unwrap().time, EsdTime::Infinite);
        assert_eq!(esd_time_dephasing(&pure, sigma).unwrap().time, EsdTime::Infinite);

        let boundary = EwlParams::bell_like(1.0 / 3.0, Flavor::Phi).unwrap();
        for esd in [
            esd_time_optimal(&boundary, sigma, OMEGA).unwrap(),
            esd_time_dephasing(&boundary, sigma).unwrap(),
        ] {
            assert_eq!(esd.time, EsdTime::Finite(0.0));
            assert!(esd.never_entangled);
        }
        let product = EwlParams::from_a2(0.95, 0.0, Flavor::Psi).unwrap();
        assert!(esd_time_optimal(&product, sigma, OMEGA).unwrap().never_entangled);
    }

    #[test]
    fn log_argument_one_gives_zero() {
        // 4|ab| r/(1−r) = 1 with |ab| = 1/2 means r = 1/3 = r*, handled as never entangled;
        // slightly above it the time is tiny and finite.
        let s = EwlParams::bell_like(1.0 / 3.0 + 1e-9, Flavor::Phi).unwrap();
        let t = esd_time_dephasing(&s, 1.0).unwrap().time.finite().unwrap();
        assert!(t > 0.0 && t < 1e-3);
    }

    #[test]
    fn optimal_point_outlives_dephasing() {
        let s = EwlParams::bell_like(0.9, Flavor::Phi).unwrap();
        let sigma = 0.02 * OMEGA;
        let opt = esd_time_optimal(&s, sigma, OMEGA).unwrap().time.finite().unwrap();
        let deph = esd_time_dephasing(&s, sigma).unwrap().time.finite().unwrap();
        assert!(OMEGA * opt > OMEGA * deph);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(AdiabaticParams::new(-1.0, 0.0, 1.0, 1.0, 10.0).is_err());
        assert!(AdiabaticParams::new(1.0, 4.0, 1.0, 1.0, 10.0).is_err());
        assert!(AdiabaticParams::new(1.0, 0.0, -1.0, 1.0, 10.0).is_err());
        assert!(AdiabaticParams::new(1.0, 0.0, 1.0, 10.0, 1.0).is_err());
        assert!(AdiabaticParams::new(1.0, 0.0, 1.0, 0.0, 1.0).is_err());
        // large Σ/Ω only warns
        let p = AdiabaticParams::new(1.0, 0.0, 0.5, 1.0, 10.0).unwrap();
        assert!(p.outside_adiabatic_regime());
    }
}
