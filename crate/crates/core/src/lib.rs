//! Bohr-Sommerfeld-Heisenberg quantization of the two dimensional harmonic
//! oscillator and of its reduced system on the coadjoint orbit `S²_e`.
//!
//! The crate builds every quantum operator of the construction as a finite
//! sparse matrix and checks the operator identities, spectra, decompositions
//! and classical geometry numerically. Each verification returns a
//! [`VerificationReport`] with one residual per named identity.
//!
//! Module map:
//!
//! * [`lattice`]: basis labels and Bohr-Sommerfeld sets.
//! * [`opcore`]: sparse complex operators, commutators, commutant dimension.
//! * [`osc_quant`]: the quantized oscillator and its `u(2)` representation.
//! * [`red_quant`]: quantization of the reduced sphere, `b_p` coefficients.
//! * [`qreduction`]: intertwiner between oscillator shells and reduced chains.
//! * [`classical`]: flows, invariants, Hopf fibration, reduced symplectic form.
//! * [`su2geo`]: `su(2) ≅ ℝ³`, Killing form, adjoint action, momentum map.

pub mod classical;
mod error;
pub mod lattice;
pub mod opcore;
pub mod osc_quant;
pub mod qreduction;
pub mod red_quant;
pub mod su2geo;

pub use error::{Error, Result};
pub use lattice::{FockIndex, Hbar, ReducedIndex};
pub use opcore::{SparseOperator, VerificationReport};
pub use osc_quant::OscillatorOperators;
pub use red_quant::ReducedOperators;
