//! Numerics for diagnosing coherent (unitary) errors in two-qubit controlled
//! gates.
//!
//! The crate compares two input-averaged figures of merit for a noisy gate
//! `V` against its ideal target `U`:
//!
//! - the average gate coherence fidelity, built on the ℓ1 coherence of the
//!   output states, which needs full state knowledge;
//! - the η_χ estimator, built on the coherence-dependent part of the
//!   end-point-measurement (EPM) characteristic function of the local energy
//!   `H = σz⊗I + I⊗σz`, which needs only local energy measurements.
//!
//! Everything here is `no_std` + `alloc`: dense complex matrices of
//! dimension 2 or 4, seeded Haar sampling, gate constructors, EPM statistics,
//! per-state kernels with Monte Carlo averages, measurement-only
//! reconstruction from outcome tables, and the sweep grid definitions.
//! File formats, the command line and the parallel sweep driver live in the
//! `coherdiag` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod energetics;
pub mod error;
pub mod gates;
pub mod linalg;
pub mod lstsq;
pub mod merit;
pub mod reconstruct;
pub mod rng;
pub mod sweep;

pub use error::{Error, Result};
pub use linalg::{C64, ComplexMatrix, DensityMatrix, Dim, PureState};
pub use rng::RngStream;
