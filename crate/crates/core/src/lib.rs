//! Density-matrix simulation of layered circuits under Pauli, Kraus and
//! depolarizing noise, twirl-based depolarizing projection of Pauli noise,
//! and purity-based mitigation of noisy expectation values, with a
//! variational eigensolver for the transverse-field Ising model on top.
//!
//! Conventions used throughout:
//! - qubit 0 is the leftmost Kronecker factor (most significant index bit);
//! - rotations are `exp(-iθP/2)`;
//! - entropies are reported in base 2 unless a base is passed explicitly.

pub mod channels;
pub mod circuit;
pub mod clifford;
pub mod error;
pub mod linalg;
pub mod mitigation;
pub mod pauli;
pub mod projection;
pub mod rng;
pub mod state;
pub mod vqe;

pub use error::{Error, Result};
