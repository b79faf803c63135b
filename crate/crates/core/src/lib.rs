//! Photon blockade with intracavity EIT in a blockaded Rydberg ensemble.
//!
//! The model lives in the polariton basis: a dark polariton b₀, two bright
//! polaritons b₁, b₂ at ±E₁, and a bosonized Rydberg pair mode that the
//! blockade interaction couples to polariton pairs. The crate builds the
//! interaction-picture Hamiltonians, integrates driven non-Hermitian
//! dynamics (with a Lindblad oracle), and extracts g²(0), populations and
//! transmission spectra.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which the CLI uses.

pub mod cli;
pub mod config;
pub mod csv;
pub mod dynamics;
pub mod error;
pub mod hamiltonian;
pub mod hilbert;
mod integrator;
pub mod model;
pub mod observables;
pub mod operator;
pub mod scalar;

pub use error::{Result, SimError};
pub use hamiltonian::HamiltonianKind;
pub use hilbert::{Basis, BasisState, Mode, Truncation};
pub use scalar::Real;

pub type Params = model::PhysicalParams<f64>;
pub type Derived = model::DerivedParams<f64>;
pub type Operator = operator::OperatorMatrix<f64>;
pub type Hamiltonian = hamiltonian::HamiltonianTerms<f64>;
pub type StateVector = Vec<scalar::C<f64>>;
pub type Trajectory = dynamics::Trajectory<f64>;
pub type DensityTrajectory = dynamics::DensityTrajectory<f64>;
pub type IntegratorConfig = dynamics::IntegratorConfig<f64>;
pub type RunSettings = observables::RunSettings<f64>;
pub type SpectrumSettings = observables::SpectrumSettings<f64>;
pub type SweepResult = observables::SweepResult<f64>;
