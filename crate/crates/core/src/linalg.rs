// SPDX-License-Identifier: Apache-2.0

//! Dense Hermitian eigensolvers and canonical orthogonalization.

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::PauliSum;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone)]
pub enum Eigenvectors {
    Real(Mat<f64>),
    Complex(Mat<C64>),
}

/// Full eigendecomposition `H = U diag(λ) U†` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Eigenvectors,
}

impl HermitianEigen {
    /// Diagonalizes a Pauli sum densely, taking the real-symmetric path when
    /// all matrix elements are real.
    pub fn of_pauli_sum(h: &PauliSum) -> Result<Self> {
        h.ensure_hermitian()?;
        if h.is_real() {
            let m = h.to_real_matrix()?;
            let evd = m
                .self_adjoint_eigen(Side::Lower)
                .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
            let values = (0..m.nrows()).map(|i| evd.S()[i]).collect();
            Ok(Self { values, vectors: Eigenvectors::Real(evd.U().to_owned()) })
        } else {
            Self::of_matrix(&h.to_matrix()?)
        }
    }

    pub fn of_matrix(m: &Mat<C64>) -> Result<Self> {
        let evd = m
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
        let values = (0..m.nrows()).map(|i| evd.S()[i].re).collect();
        Ok(Self { values, vectors: Eigenvectors::Complex(evd.U().to_owned()) })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Column `k` of `U` as a complex vector.
    pub fn vector(&self, k: usize) -> Vec<C64> {
        match &self.vectors {
            Eigenvectors::Real(u) => (0..u.nrows()).map(|i| C64::new(u[(i, k)], 0.0)).collect(),
            Eigenvectors::Complex(u) => (0..u.nrows()).map(|i| u[(i, k)]).collect(),
        }
    }

    /// `U† v`.
    pub fn to_eigenbasis(&self, v: &[C64]) -> Vec<C64> {
        let cols = self.to_eigenbasis_many(&[v]);
        cols.into_iter().next().unwrap()
    }

    /// `U c`.
    pub fn from_eigenbasis(&self, c: &[C64]) -> Vec<C64> {
        self.from_eigenbasis_many(&[c]).into_iter().next().unwrap()
    }

    pub fn to_eigenbasis_many(&self, vs: &[&[C64]]) -> Vec<Vec<C64>> {
        match &self.vectors {
            Eigenvectors::Real(u) => {
                let x = split_real(vs);
                let y = u.transpose() * &x;
                join_real(&y, vs.len())
            }
            Eigenvectors::Complex(u) => {
                let x = to_mat(vs);
                let y = u.adjoint() * &x;
                from_mat(&y)
            }
        }
    }

    pub fn from_eigenbasis_many(&self, cs: &[&[C64]]) -> Vec<Vec<C64>> {
        match &self.vectors {
            Eigenvectors::Real(u) => {
                let x = split_real(cs);
                let y = u * &x;
                join_real(&y, cs.len())
            }
            Eigenvectors::Complex(u) => {
                let x = to_mat(cs);
                let y = u * &x;
                from_mat(&y)
            }
        }
    }
}

// Stores each complex column as a (re, im) pair of real columns.
fn split_real(vs: &[&[C64]]) -> Mat<f64> {
    let n = vs.first().map_or(0, |v| v.len());
    Mat::from_fn(n, 2 * vs.len(), |i, j| {
        let z = vs[j / 2][i];
        if j % 2 == 0 {
            z.re
        } else {
            z.im
        }
    })
}

fn join_real(m: &Mat<f64>, count: usize) -> Vec<Vec<C64>> {
    (0..count)
        .map(|k| {
            (0..m.nrows())
                .map(|i| C64::new(m[(i, 2 * k)], m[(i, 2 * k + 1)]))
                .collect()
        })
        .collect()
}

fn to_mat(vs: &[&[C64]]) -> Mat<C64> {
    let n = vs.first().map_or(0, |v| v.len());
    Mat::from_fn(n, vs.len(), |i, j| vs[j][i])
}

fn from_mat(m: &Mat<C64>) -> Vec<Vec<C64>> {
    (0..m.ncols())
        .map(|j| (0..m.nrows()).map(|i| m[(i, j)]).collect())
        .collect()
}

/// Eigendecomposition of a small dense Hermitian matrix.
pub fn hermitian_eigen(m: &Mat<C64>) -> Result<(Vec<f64>, Mat<C64>)> {
    let h = hermitize(m);
    let evd = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
    let values = (0..h.nrows()).map(|i| evd.S()[i].re).collect();
    Ok((values, evd.U().to_owned()))
}

/// `(M + M†) / 2`.
pub fn hermitize(m: &Mat<C64>) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)
}

/// Largest `|M_ij − conj(M_ji)|`.
pub fn hermiticity_defect(m: &Mat<C64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Result of discarding near-null directions of an overlap matrix `S`.
///
/// `transform` is `U_kept diag(s_kept^{-1/2})`, so `X† S X = 1` on the kept
/// space and `X X†` is the pseudo-inverse of `S`.
#[derive(Debug, Clone)]
pub struct CanonicalBasis {
    pub transform: Mat<C64>,
    pub kept_eigenvalues: Vec<f64>,
    pub discarded: usize,
    pub max_eigenvalue: f64,
    pub min_eigenvalue: f64,
    pub threshold: f64,
}

impl CanonicalBasis {
    pub fn rank(&self) -> usize {
        self.transform.ncols()
    }

    /// `X† M X`.
    pub fn project(&self, m: &Mat<C64>) -> Mat<C64> {
        let x = &self.transform;
        x.adjoint() * (m * x)
    }

    /// `S⁺ v = X X† v`.
    pub fn pseudo_inverse_apply(&self, v: &[C64]) -> Vec<C64> {
        let x = &self.transform;
        let col = Mat::from_fn(v.len(), 1, |i, _| v[i]);
        let y = x * (x.adjoint() * &col);
        (0..y.nrows()).map(|i| y[(i, 0)]).collect()
    }

    /// `X y` for coordinates `y` in the orthonormal kept space.
    pub fn lift(&self, y: &[C64]) -> Vec<C64> {
        mat_vec(&self.transform, y)
    }
}

/// Eigendecomposes `S` and keeps eigenpairs above `relative_threshold · λ_max`.
///
/// Eigenvalues below `-negative_tolerance · λ_max` mean `S` is not positive
/// semidefinite and are reported as an error.
pub fn canonical_orthogonalization(
    s: &Mat<C64>,
    relative_threshold: f64,
    negative_tolerance: f64,
) -> Result<CanonicalBasis> {
    let (values, vectors) = hermitian_eigen(s)?;
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if !(max > 0.0) || !max.is_finite() {
        return Err(Error::IllConditioned("overlap matrix has no positive eigenvalue".into()));
    }
    if min < -negative_tolerance * max.max(1.0) {
        return Err(Error::IllConditioned(format!(
            "overlap matrix is not positive semidefinite (min eigenvalue {min:e})"
        )));
    }
    let threshold = relative_threshold * max;
    let kept: Vec<usize> = (0..values.len()).filter(|&k| values[k] > threshold).collect();
    let n = s.nrows();
    let transform = Mat::from_fn(n, kept.len(), |i, j| {
        let k = kept[j];
        vectors[(i, k)] / values[k].sqrt()
    });
    Ok(CanonicalBasis {
        transform,
        kept_eigenvalues: kept.iter().map(|&k| values[k]).collect(),
        discarded: values.len() - kept.len(),
        max_eigenvalue: max,
        min_eigenvalue: min,
        threshold,
    })
}

pub fn mat_vec(m: &Mat<C64>, v: &[C64]) -> Vec<C64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}

/// `⟨a|b⟩ = Σ conj(a_i) b_i`.
pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `a† M b`.
pub fn sandwich(a: &[C64], m: &Mat<C64>, b: &[C64]) -> C64 {
    dot(a, &mat_vec(m, b))
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
