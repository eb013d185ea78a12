//! Exact quantum dynamics of the XXZ central spin model.
//!
//! A spin-1/2 (the central spin) interacts with `N` bath spins through
//!
//! ```text
//! H = B s0z + 2 Σ_j [ A_j (s0x sjx + s0y sjy) + Δ_j s0z sjz ].
//! ```
//!
//! For homogeneous couplings the bath collapses onto a collective spin and the
//! evolution from a spin coherent bath state is known in closed form
//! ([`closed_form`]). The large-bath, small-polarization limit of that result is
//! a generalized Jaynes–Cummings model ([`jc`]). The inhomogeneous model is
//! handled by exact diagonalization in fixed-magnetization sectors ([`ed`]),
//! which also serves as the brute-force oracle for the analytic paths.
//! [`analysis`] holds the time-series tooling (revival detection, comparison
//! metrics).
//!
//! Units: ħ = 1, energies in units of the transverse coupling `A` unless a
//! caller chooses otherwise.

pub mod analysis;
pub mod closed_form;
pub mod dicke;
pub mod ed;
mod error;
pub mod jc;

pub use error::{Error, Result};

/// Complex amplitude type used throughout.
pub type C64 = num_complex::Complex64;
