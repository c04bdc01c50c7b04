//! Shared numerical tolerances and physical constants.
//!
//! Library checks and tests read from here so both sides agree on what
//! "close enough" means.

/// Reduced Planck constant ħ in J·s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant k_B in J/K (CODATA 2018, exact).
pub const K_B: f64 = 1.380_649e-23;

/// Elementwise Hermiticity tolerance for a density matrix.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Hermiticity tolerance accepted by the eigensolver entry points.
pub const EIGEN_INPUT_HERMITIAN_TOL: f64 = 1e-10;

/// Allowed deviation of Tr ρ from one.
pub const TRACE_TOL: f64 = 1e-12;

/// Most negative eigenvalue tolerated before a state is rejected; values in
/// `[-PSD_TOL, 0)` are clamped to zero.
pub const PSD_TOL: f64 = 1e-10;

/// Trace- and hermiticity-preservation tolerance for single-qubit maps.
pub const MAP_TOL: f64 = 1e-12;

/// Off-X modulus below which a matrix counts as an X state in the fast
/// concurrence path.
pub const X_STATE_TOL: f64 = 1e-10;

/// Agreement required between the X-state and Wootters concurrences.
pub const CONCURRENCE_AGREEMENT_TOL: f64 = 1e-9;

/// Per-trajectory unitarity deviation bound, max |U†U - I|.
pub const UNITARITY_TOL: f64 = 1e-10;

/// Σ/Ω above which the static-path treatment is flagged as questionable.
pub const SPA_SIGMA_OVER_OMEGA_WARN: f64 = 0.2;

/// Concurrence threshold below which a CHSH violation is no longer
/// guaranteed.
pub const BELL_THRESHOLD: f64 = std::f64::consts::FRAC_1_SQRT_2;
