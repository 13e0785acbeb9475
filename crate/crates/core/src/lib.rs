// Copyright 2026 Dissipator Lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Numerical laboratory for the damped driven Jaynes–Cummings master equation
//! on a truncated field ⊗ spin Hilbert space.
//!
//! The crate builds the truncated ladder and Pauli operators ([`fock`]), the
//! real Hilbert–Schmidt space of Hermitian matrices ([`hs`]), the two
//! dissipation superoperators `D` and `Δ` ([`dissipator`]), the Hamiltonian
//! and Liouvillian ([`hamiltonian`]), a time integrator with conservation
//! diagnostics ([`evolution`]) and a certification suite producing
//! machine-readable reports ([`verification`]). The [`cli`] module backs the
//! `dissipator-lab` binary.

pub mod cli;
pub mod dissipator;
pub mod error;
pub mod evolution;
pub mod fock;
pub mod hamiltonian;
pub mod hs;
pub mod verification;

pub use dissipator::{DissipatorKind, SuperOperatorMatrix};
pub use error::{LabError, Result};
pub use evolution::{IntegratorConfig, Method, Trajectory};
pub use fock::{FieldOperator, LadderOps, SpinMatrix, SystemOperator, TruncationConfig};
pub use hamiltonian::{LiouvillianSpec, PhysicalParams, PumpingProfile};
pub use hs::{HSVector, HermitianBasis, HermitianPoint};
pub use verification::{PaddedSupportSpec, PropertyReport};

/// Complex scalar used for all operator storage.
pub type C64 = num_complex::Complex64;
