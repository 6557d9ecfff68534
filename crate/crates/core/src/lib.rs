// SPDX-License-Identifier: Apache-2.0

//! Statevector simulation and quantum subspace expansion for the honeycomb
//! Kitaev model.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`lattice`] builds the torus geometry, its stabilizers and the Kitaev
//!    Hamiltonian as a [`PauliSum`].
//! 2. [`vqe`] prepares the zero-field ground state with a symmetry-preserving
//!    ansatz.
//! 3. [`qse`] expands that reference in a multigrid family of time-evolved
//!    states and solves the generalized eigenproblem for the finite-field
//!    ground state.
//! 4. [`greens`] builds Krylov bases on top of excited states and evaluates
//!    Green's functions, spectral functions and the dynamical structure factor
//!    through continued fractions.
//!
//! [`oracle`] provides exact-diagonalization references for all of the above.

pub mod error;
pub mod greens;
pub mod lattice;
pub mod linalg;
pub mod optim;
pub mod oracle;
pub mod pauli;
pub mod qse;
pub mod simulator;
pub mod vqe;

pub use error::{Error, Result};
pub use greens::{
    ExcitationOperator, GreensFunctionSamples, KrylovBasisConfig, LanczosCoefficients,
};
pub use lattice::{HoneycombLattice, StabilizerGroup};
pub use oracle::SpectralDecomposition;
pub use pauli::{Pauli, PauliString, PauliSum, PauliTerm};
pub use qse::{MultigridIndex, QseGroundState, SubspaceBasis, SubspaceMatrices};
pub use simulator::{EvolutionMode, EvolutionOperator, StateVector};
pub use vqe::{AnsatzCircuit, VqeResult};

pub use num_complex::Complex64;
