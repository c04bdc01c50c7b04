//! Entanglement degradation of two uncoupled qubits under broadband
//! solid-state noise.
//!
//! The crate is layered bottom-up:
//!
//! * [`qmath`]: dense 2×2 / 4×4 complex algebra, a Hermitian Jacobi
//!   eigensolver and the Wootters concurrence.
//! * [`states`]: extended Werner-like initial states and the fast X-state
//!   concurrence.
//! * [`adiabatic`]: static-path treatment of 1/f noise, closed-form
//!   concurrence and sudden-death times.
//! * [`markov`]: Born–Markov relaxation, the combined single-qubit map and
//!   two-qubit composition.
//! * [`stochastic`]: random-telegraph fluctuator ensembles, exact
//!   trajectory propagation, Monte Carlo averaging and spectra.
//! * [`analysis`]: sudden-death extraction from arbitrary curves and
//!   parameter sweeps.

// `!(x > 0.0)` is used deliberately so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Explicit index loops read better for small dense matrices.
#![allow(clippy::needless_range_loop)]

pub mod adiabatic;
pub mod analysis;
pub mod consts;
mod error;
pub mod markov;
pub mod qmath;
pub mod states;
pub mod stochastic;

pub use error::{Error, Result};
