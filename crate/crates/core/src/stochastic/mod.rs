//! Monte Carlo engine built on ensembles of random-telegraph fluctuators.
//!
//! Each qubit sees a classical X(t) = Σ_j v_j ξ_j(t), ξ_j = ±1 switching at
//! rate γ_j in each direction, with γ log-uniform in [γ_m, γ_M]. Between
//! switches the two-qubit Hamiltonian is constant and is propagated
//! exactly; density matrices are averaged over trajectories before the
//! concurrence is taken.

mod ensemble;
mod montecarlo;
mod propagate;
mod psd;
mod rtn;

pub use ensemble::{sample_ensemble, FluctuatorEnsemble};
pub use montecarlo::{monte_carlo_concurrence, McCurve, McSettings, SimConfig, DEFAULT_FLUCTUATORS};
pub use propagate::{evolve_trajectory, Trajectory};
pub use psd::{
    one_over_f_target, psd_estimate, psd_estimate_with, PsdEstimate, PsdFit, PsdOptions, MIN_REALIZATIONS,
};
pub use rtn::{rtn_paths, NoisePath, RtnPaths};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent random stream for `(seed, stream)`.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
