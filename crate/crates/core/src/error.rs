// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised anywhere in the simulation stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("register size mismatch: {left} vs {right} sites")]
    SizeMismatch { left: usize, right: usize },

    #[error("{num_sites} sites exceeds the dense cap of {cap}")]
    TooManySites { num_sites: usize, cap: usize },

    #[error("Hamiltonian has no terms")]
    EmptyHamiltonian,

    #[error("operator is not Hermitian (max imaginary coefficient {0:e})")]
    NotHermitian(f64),

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("stabilizer sector is inconsistent: every basis state is annihilated")]
    InconsistentSector,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("ill-conditioned subspace: {0}")]
    IllConditioned(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("evaluation on the real axis hits a pole at z = {0}")]
    Pole(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
