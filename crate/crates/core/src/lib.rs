//! Neural-quantum-state toolkit for spin chains.
//!
//! Trains restricted-Boltzmann-machine wavefunctions over coupling grids of
//! the transverse-field Ising and J1-J2 Heisenberg chains, under independent
//! or adiabatic (warm-started) strategies, and analyzes the trained weight
//! vectors with PCA to locate the phase transition. Everything is evaluated
//! over the full computational basis against exact-diagonalization ground
//! states, so the system sizes are small and the results deterministic.
//!
//! The numeric core is generic over the scalar type ([`scalar::RealScalar`])
//! and over the wavefunction's number field ([`scalar::Field`]); the aliases
//! below pin the double-precision instantiations the rest of the toolkit
//! uses.

pub mod error;
pub mod pca;
pub mod rbm;
pub mod report;
pub mod scalar;
pub mod spin;
pub mod sweep;
pub mod train;

pub use error::{Error, Result};
pub use scalar::{Field, FieldKind, RealScalar};

/// Complex double-precision scalar.
pub type Complex64 = num_complex::Complex<f64>;

/// Double-precision Hamiltonian.
pub type Hamiltonian64 = spin::HamiltonianOperator<f64>;

/// Double-precision ground-state solution.
pub type GroundState64 = spin::GroundStateSolution<f64>;

/// Real-weight network parameters (double precision).
pub type RealRbm = rbm::RbmParameters<f64>;

/// Complex-weight network parameters (double precision).
pub type ComplexRbm = rbm::RbmParameters<Complex64>;

/// Double-precision flat weight vector.
pub type FlatWeights64 = rbm::FlatWeightVector<f64>;
