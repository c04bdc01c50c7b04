//! Extended Werner-like initial states and the X-state concurrence.

use std::fmt;
use std::str::FromStr;

use crate::consts::X_STATE_TOL;
use crate::qmath::{DensityMatrix4, C64, ZERO};
use crate::{Error, Result};

/// Which Bell-like pure part an EWL state mixes in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    /// One-excitation: a|01⟩ + b|10⟩.
    Phi,
    /// Two-excitation: a|00⟩ + b|11⟩.
    Psi,
}

impl Flavor {
    pub const ALL: [Flavor; 2] = [Flavor::Phi, Flavor::Psi];

    pub fn name(self) -> &'static str {
        match self {
            Flavor::Phi => "phi",
            Flavor::Psi => "psi",
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Flavor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "phi" => Ok(Flavor::Phi),
            "psi" => Ok(Flavor::Psi),
            other => Err(Error::param("flavor", format!("expected phi or psi, got {other:?}"))),
        }
    }
}

/// ρ = r |χ⟩⟨χ| + (1 − r)/4 · I with |χ⟩ the Bell-like state of `flavor`.
///
/// The second amplitude is b = √(1 − |a|²) e^{iφ_b}; only |a b| enters the
/// concurrence but the phase is kept so stochastic runs see the same state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EwlParams {
    r: f64,
    a: C64,
    b_phase: f64,
    flavor: Flavor,
}

impl EwlParams {
    pub fn new(r: f64, a: C64, flavor: Flavor) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::param("r", format!("purity must lie in [0, 1], got {r}")));
        }
        let mod_a = a.norm();
        if !(mod_a <= 1.0 + 1e-15) {
            return Err(Error::param("a", format!("|a| must not exceed 1, got {mod_a}")));
        }
        Ok(Self {
            r,
            a,
            b_phase: 0.0,
            flavor,
        })
    }

    /// Real non-negative a = √(|a|²).
    pub fn from_a2(r: f64, a2: f64, flavor: Flavor) -> Result<Self> {
        if !(0.0..=1.0).contains(&a2) {
            return Err(Error::param("a2", format!("|a|² must lie in [0, 1], got {a2}")));
        }
        Self::new(r, C64::new(a2.sqrt(), 0.0), flavor)
    }

    /// Bell-like state with a = 1/√2.
    pub fn bell_like(r: f64, flavor: Flavor) -> Result<Self> {
        Self::from_a2(r, 0.5, flavor)
    }

    pub fn with_b_phase(mut self, phase: f64) -> Self {
        self.b_phase = phase;
        self
    }

    pub fn with_flavor(mut self, flavor: Flavor) -> Self {
        self.flavor = flavor;
        self
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn a(&self) -> C64 {
        self.a
    }

    pub fn b(&self) -> C64 {
        let mod_b = (1.0 - self.a.norm_sqr()).max(0.0).sqrt();
        C64::from_polar(mod_b, self.b_phase)
    }

    pub fn b_phase(&self) -> f64 {
        self.b_phase
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn abs_ab(&self) -> f64 {
        self.a.norm() * (1.0 - self.a.norm_sqr()).max(0.0).sqrt()
    }

    /// Pure part as a state vector.
    pub fn pure_part(&self) -> [C64; 4] {
        let (a, b) = (self.a, self.b());
        match self.flavor {
            Flavor::Phi => [ZERO, a, b, ZERO],
            Flavor::Psi => [a, ZERO, ZERO, b],
        }
    }

    /// 2·max{0, (|ab| + 1/4) r − 1/4}.
    pub fn initial_concurrence(&self) -> f64 {
        2.0 * ((self.abs_ab() + 0.25) * self.r - 0.25).max(0.0)
    }
}

pub fn ewl_state(p: &EwlParams) -> Result<DensityMatrix4> {
    let chi = p.pure_part();
    let mix = (1.0 - p.r) / 4.0;
    let mut m = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = chi[i] * chi[j].conj() * p.r;
        }
        m[i][i] += mix;
    }
    DensityMatrix4::new(m)
}

/// (K1, K2) with K1 = |ρ12| − √(ρ00 ρ33) and K2 = |ρ03| − √(ρ11 ρ22).
pub fn xstate_k(rho: &DensityMatrix4) -> (f64, f64) {
    let p = |i: usize| rho.population(i).max(0.0);
    let k1 = rho.get(1, 2).norm() - (p(0) * p(3)).sqrt();
    let k2 = rho.get(0, 3).norm() - (p(1) * p(2)).sqrt();
    (k1, k2)
}

/// 2·max(K1, K2) without clamping; negative once entanglement is gone.
pub fn xstate_signed(rho: &DensityMatrix4) -> Result<f64> {
    require_x(rho)?;
    let (k1, k2) = xstate_k(rho);
    Ok(2.0 * k1.max(k2))
}

/// Concurrence of an X state, 2·max{0, K1, K2}.
pub fn xstate_concurrence(rho: &DensityMatrix4) -> Result<f64> {
    Ok(xstate_signed(rho)?.clamp(0.0, 1.0))
}

fn require_x(rho: &DensityMatrix4) -> Result<()> {
    let max_off_x = rho.max_off_x();
    if max_off_x > X_STATE_TOL {
        return Err(Error::NotXState { max_off_x });
    }
    Ok(())
}

/// r* = 1/(1 + 4|ab|): EWL states are entangled iff r > r*.
pub fn critical_purity(a: C64) -> Result<f64> {
    let mod_a = a.norm();
    if !(mod_a <= 1.0 + 1e-15) {
        return Err(Error::param("a", format!("|a| must not exceed 1, got {mod_a}")));
    }
    let ab = mod_a * (1.0 - mod_a * mod_a).max(0.0).sqrt();
    Ok(1.0 / (1.0 + 4.0 * ab))
}
