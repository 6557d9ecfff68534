// SPDX-License-Identifier: Apache-2.0

//! Quantum subspace expansion over a two-level multigrid of time-evolved
//! states.
//!
//! Basis states are `V(kΔt) V((n_k+1)Δt)^l |φ₀⟩` with `l ∈ [−n_l, n_l]` and
//! `k ∈ [0, n_k]` for `l > 0`, `[−n_k, 0]` for `l < 0`, `[−n_k, n_k]` for
//! `l = 0`, ordered by `l` then `k`. The states cover the contiguous time
//! grid `mΔt`, `|m| ≤ n_l(n_k+1) + n_k`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use faer::Mat;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{canonical_orthogonalization, hermitian_eigen, hermiticity_defect, hermitize, C64, ZERO};
use crate::pauli::PauliSum;
use crate::simulator::{EvolutionMode, EvolutionOperator, StateVector};

/// Default relative cut on overlap eigenvalues.
pub const DEFAULT_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultigridIndex {
    pub l: i64,
    pub k: i64,
}

impl MultigridIndex {
    /// Total evolution time in units of `Δt`.
    pub fn time_steps(&self, n_k: usize) -> i64 {
        self.l * (n_k as i64 + 1) + self.k
    }
}

/// `n_φ = 2(n_l+1)(n_k+1) − 1`.
pub fn basis_size(n_k: usize, n_l: usize) -> usize {
    2 * (n_l + 1) * (n_k + 1) - 1
}

pub fn multigrid_indices(n_k: usize, n_l: usize) -> Vec<MultigridIndex> {
    let (nk, nl) = (n_k as i64, n_l as i64);
    let mut out = Vec::with_capacity(basis_size(n_k, n_l));
    for l in -nl..=nl {
        let ks = match l.signum() {
            1 => 0..=nk,
            -1 => -nk..=0,
            _ => -nk..=nk,
        };
        out.extend(ks.map(|k| MultigridIndex { l, k }));
    }
    out
}

/// `Δt = 2π/κ`.
pub fn default_delta_t(h: &PauliSum) -> Result<f64> {
    Ok(2.0 * PI / h.gershgorin_kappa()?)
}

/// Ordered family of evolved states.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    pub reference: StateVector,
    pub n_k: usize,
    pub n_l: usize,
    pub indices: Vec<MultigridIndex>,
    pub states: Vec<StateVector>,
    pub delta_t: f64,
    pub evolution: EvolutionOperator,
}

impl SubspaceBasis {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn num_sites(&self) -> usize {
        self.reference.num_sites()
    }

    /// `Σ_a c_a |φ_a⟩`.
    pub fn combine(&self, coefficients: &[C64]) -> Result<StateVector> {
        if coefficients.len() != self.len() {
            return Err(Error::SizeMismatch { left: self.len(), right: coefficients.len() });
        }
        let dim = self.reference.dim();
        let mut amps = vec![ZERO; dim];
        for (c, s) in coefficients.iter().zip(&self.states) {
            for (a, x) in amps.iter_mut().zip(s.amplitudes()) {
                *a += c * x;
            }
        }
        StateVector::from_amplitudes(self.num_sites(), amps)
    }
}

/// Builds the multigrid basis on `reference` (normalized internally).
pub fn build_basis(
    reference: &StateVector,
    n_k: usize,
    n_l: usize,
    delta_t: f64,
    evolution: &EvolutionOperator,
) -> Result<SubspaceBasis> {
    if !(delta_t > 0.0) || !delta_t.is_finite() {
        return Err(Error::InvalidArgument(format!("time step must be positive, got {delta_t}")));
    }
    let mut reference = reference.clone();
    reference.normalize()?;
    let indices = multigrid_indices(n_k, n_l);
    let states = match evolution.mode() {
        EvolutionMode::Exact => {
            let times: Vec<f64> = indices
                .iter()
                .map(|ix| ix.time_steps(n_k) as f64 * delta_t)
                .collect();
            evolution.evolve_many(&reference, &times)?
        }
        EvolutionMode::Trotter2 { .. } => {
            let coarse = (n_k + 1) as f64 * delta_t;
            let mut states = Vec::with_capacity(indices.len());
            for l in -(n_l as i64)..=(n_l as i64) {
                let mut base = reference.clone();
                for _ in 0..l.unsigned_abs() {
                    base = evolution.evolve(&base, coarse * l.signum() as f64)?;
                }
                let ks: Vec<i64> = indices.iter().filter(|ix| ix.l == l).map(|ix| ix.k).collect();
                let evolved: Result<Vec<StateVector>> = ks
                    .par_iter()
                    .map(|&k| evolution.evolve(&base, k as f64 * delta_t))
                    .collect();
                states.extend(evolved?);
            }
            states
        }
    };
    Ok(SubspaceBasis {
        reference,
        n_k,
        n_l,
        indices,
        states,
        delta_t,
        evolution: evolution.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum AssemblyMode {
    /// `⟨φ_a|Ĥ|φ_b⟩` by direct operator application.
    Exact,
    /// Central sine difference of `V(±τ)` overlaps.
    Hoa { tau: f64 },
}

impl AssemblyMode {
    /// HOA with `τ = 0.1/κ`.
    pub fn default_hoa(h: &PauliSum) -> Result<Self> {
        Ok(AssemblyMode::Hoa { tau: 0.1 / h.gershgorin_kappa()? })
    }
}

#[derive(Debug, Clone)]
pub struct SubspaceMatrices {
    pub h: Mat<C64>,
    pub s: Mat<C64>,
    pub mode: AssemblyMode,
}

fn gram(left: &[StateVector], right: &[StateVector]) -> Mat<C64> {
    let rows: Vec<Vec<C64>> = left
        .par_iter()
        .map(|a| right.iter().map(|b| crate::linalg::dot(a.amplitudes(), b.amplitudes())).collect())
        .collect();
    Mat::from_fn(left.len(), right.len(), |i, j| rows[i][j])
}

/// Matrix of `⟨left_a| op |right_b⟩` for the given state lists.
pub fn transition_matrix(left: &[StateVector], op: &PauliSum, right: &[StateVector]) -> Result<Mat<C64>> {
    let applied: Result<Vec<StateVector>> = right.par_iter().map(|s| s.apply_pauli_sum(op)).collect();
    Ok(gram(left, &applied?))
}

/// Fills `H` and `S` for `basis`.
pub fn assemble_matrices(basis: &SubspaceBasis, h: &PauliSum, mode: AssemblyMode) -> Result<SubspaceMatrices> {
    h.ensure_hermitian()?;
    if h.is_empty() {
        return Err(Error::EmptyHamiltonian);
    }
    let s = gram(&basis.states, &basis.states);
    let hm = match mode {
        AssemblyMode::Exact => transition_matrix(&basis.states, h, &basis.states)?,
        AssemblyMode::Hoa { tau } => {
            let kappa = h.gershgorin_kappa()?;
            if !(tau > 0.0) {
                return Err(Error::InvalidArgument(format!("HOA time must be positive, got {tau}")));
            }
            if tau * kappa > 1.0 {
                return Err(Error::InvalidArgument(format!(
                    "HOA time {tau} too large for spectral scale {kappa} (τκ > 1)"
                )));
            }
            let evolution = if basis.evolution.hamiltonian() == h {
                basis.evolution.clone()
            } else {
                basis.evolution.with_hamiltonian(h)?
            };
            let fwd: Result<Vec<StateVector>> =
                basis.states.par_iter().map(|s| evolution.evolve(s, tau)).collect();
            let bwd: Result<Vec<StateVector>> =
                basis.states.par_iter().map(|s| evolution.evolve(s, -tau)).collect();
            let (mf, mb) = (gram(&basis.states, &fwd?), gram(&basis.states, &bwd?));
            let denom = C64::new(0.0, 2.0 * tau);
            hermitize(&Mat::from_fn(mf.nrows(), mf.ncols(), |i, j| (mb[(i, j)] - mf[(i, j)]) / denom))
        }
    };
    Ok(SubspaceMatrices { h: hm, s, mode })
}

impl SubspaceMatrices {
    pub fn dim(&self) -> usize {
        self.s.nrows()
    }

    /// Adds independent complex Gaussian noise of width `sigma` to every
    /// entry of `H` and `S`, then restores Hermiticity.
    pub fn perturb<R: Rng>(&mut self, sigma: f64, rng: &mut R) {
        let n = self.dim();
        let mut noise = |m: &Mat<C64>| {
            let noisy = Mat::from_fn(n, n, |i, j| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                m[(i, j)] + C64::new(re, im) * sigma
            });
            hermitize(&noisy)
        };
        self.h = noise(&self.h);
        self.s = noise(&self.s);
    }

    /// `−H` on the same overlaps.
    pub fn negated(&self) -> Self {
        Self { h: Mat::from_fn(self.dim(), self.dim(), |i, j| -self.h[(i, j)]), s: self.s.clone(), mode: self.mode }
    }

    pub fn to_json(&self) -> Result<String> {
        let n = self.dim();
        let part = |m: &Mat<C64>, f: fn(C64) -> f64| -> Vec<Vec<f64>> {
            (0..n).map(|i| (0..n).map(|j| f(m[(i, j)])).collect()).collect()
        };
        let doc = serde_json::json!({
            "dim": n,
            "assembly": self.mode,
            "h_re": part(&self.h, |z| z.re),
            "h_im": part(&self.h, |z| z.im),
            "s_re": part(&self.s, |z| z.re),
            "s_im": part(&self.s, |z| z.im),
        });
        Ok(serde_json::to_string_pretty(&doc)?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegularizationReport {
    pub threshold: f64,
    pub kept: usize,
    pub discarded: usize,
    pub s_max_eigenvalue: f64,
    pub s_min_eigenvalue: f64,
    pub hermiticity_defect: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QseGroundState {
    /// S-normalized expansion coefficients.
    pub coefficients: Vec<C64>,
    pub energy: f64,
    pub report: RegularizationReport,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub relative_threshold: f64,
    pub negative_tolerance: f64,
    pub hermiticity_tolerance: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { relative_threshold: DEFAULT_THRESHOLD, negative_tolerance: 1e-12, hermiticity_tolerance: 1e-8 }
    }
}

/// Lowest generalized eigenpair of `(H, S)` by canonical orthogonalization.
pub fn solve_ground_state(mats: &SubspaceMatrices) -> Result<QseGroundState> {
    solve_ground_state_with(mats, SolveOptions::default())
}

pub fn solve_ground_state_with(mats: &SubspaceMatrices, options: SolveOptions) -> Result<QseGroundState> {
    let scale = |m: &Mat<C64>| {
        let mut s: f64 = 1.0;
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                s = s.max(m[(i, j)].norm());
            }
        }
        s
    };
    let defect = hermiticity_defect(&mats.h).max(hermiticity_defect(&mats.s));
    if defect > options.hermiticity_tolerance * scale(&mats.h).max(scale(&mats.s)) {
        return Err(Error::NotHermitian(defect));
    }
    let s = hermitize(&mats.s);
    let cb = canonical_orthogonalization(&s, options.relative_threshold, options.negative_tolerance)?;
    if cb.rank() == 0 {
        return Err(Error::IllConditioned("overlap matrix is numerically rank 0".into()));
    }
    let reduced = cb.project(&hermitize(&mats.h));
    let (values, vectors) = hermitian_eigen(&reduced)?;
    let y: Vec<C64> = (0..reduced.nrows()).map(|i| vectors[(i, 0)]).collect();
    let coefficients = cb.lift(&y);
    if !values[0].is_finite() {
        return Err(Error::NonFinite("subspace ground energy".into()));
    }
    Ok(QseGroundState {
        coefficients,
        energy: values[0],
        report: RegularizationReport {
            threshold: cb.threshold,
            kept: cb.rank(),
            discarded: cb.discarded,
            s_max_eigenvalue: cb.max_eigenvalue,
            s_min_eigenvalue: cb.min_eigenvalue,
            hermiticity_defect: defect,
        },
    })
}

impl QseGroundState {
    pub fn state(&self, basis: &SubspaceBasis) -> Result<StateVector> {
        basis.combine(&self.coefficients)
    }
}

/// One row of an energy-distance sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurvePoint {
    pub n_l: usize,
    pub n_k: usize,
    pub n_phi: usize,
    pub steps: Option<usize>,
    pub mode: EvolutionMode,
    pub energy: f64,
    pub delta_e: f64,
}

/// Full expansion at one basis shape: builds, assembles and solves.
pub fn run_qse(
    reference: &StateVector,
    h: &PauliSum,
    evolution: &EvolutionOperator,
    n_k: usize,
    n_l: usize,
    delta_t: f64,
    assembly: AssemblyMode,
) -> Result<(SubspaceBasis, SubspaceMatrices, QseGroundState)> {
    let basis = build_basis(reference, n_k, n_l, delta_t, evolution)?;
    let mats = assemble_matrices(&basis, h, assembly)?;
    let gs = solve_ground_state(&mats)?;
    Ok((basis, mats, gs))
}

/// Energy distance `|E_QSE − exact|` over basis shapes and evolution modes.
///
/// `evolutions` pairs each mode with a prepared operator for `h`.
pub fn qse_energy_curve(
    reference: &StateVector,
    h: &PauliSum,
    exact_energy: f64,
    shapes: &[(usize, usize)],
    evolutions: &[EvolutionOperator],
    delta_t: f64,
) -> Result<Vec<CurvePoint>> {
    let mut out = Vec::new();
    for evolution in evolutions {
        for &(n_l, n_k) in shapes {
            let (_, _, gs) = run_qse(reference, h, evolution, n_k, n_l, delta_t, AssemblyMode::Exact)?;
            let steps = match evolution.mode() {
                EvolutionMode::Exact => None,
                EvolutionMode::Trotter2 { steps } => Some(steps),
            };
            out.push(CurvePoint {
                n_l,
                n_k,
                n_phi: basis_size(n_k, n_l),
                steps,
                mode: evolution.mode(),
                energy: gs.energy,
                delta_e: (gs.energy - exact_energy).abs(),
            });
        }
    }
    Ok(out)
}

/// CSV with columns `n_l,n_k,n_phi,r,mode,delta_E`.
pub fn curve_to_csv(points: &[CurvePoint]) -> String {
    let mut s = String::from("n_l,n_k,n_phi,r,mode,delta_E\n");
    for p in points {
        let (r, mode) = match p.mode {
            EvolutionMode::Exact => (String::new(), "exact"),
            EvolutionMode::Trotter2 { steps } => (steps.to_string(), "trotter2"),
        };
        let _ = writeln!(s, "{},{},{},{},{},{:.6e}", p.n_l, p.n_k, p.n_phi, r, mode, p.delta_e);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_lattice;

    #[test]
    fn index_law() {
        for (nk, nl) in [(0, 0), (3, 3), (0, 5), (5, 0), (1, 2), (2, 1), (4, 2)] {
            let ix = multigrid_indices(nk, nl);
            assert_eq!(ix.len(), basis_size(nk, nl));
            let m: Vec<i64> = ix.iter().map(|i| i.time_steps(nk)).collect();
            let top = (nl * (nk + 1) + nk) as i64;
            let want: Vec<i64> = (-top..=top).collect();
            assert_eq!(m, want);
        }
        for shape in [(0, 5), (1, 2), (2, 1), (5, 0)] {
            assert_eq!(basis_size(shape.1, shape.0), 11);
        }
        assert_eq!(basis_size(3, 3), 31);
        assert_eq!(multigrid_indices(0, 0), vec![MultigridIndex { l: 0, k: 0 }]);
    }

    #[test]
    fn single_state_gives_rayleigh_quotient() {
        let lat = build_lattice(2, 2).unwrap();
        let h = lat.isotropic_hamiltonian(-1.0, 0.1).unwrap();
        let ev = EvolutionOperator::trotter2(&h, 1).unwrap();
        let phi = StateVector::basis_state(8, 5).unwrap();
        let (_, mats, gs) = run_qse(&phi, &h, &ev, 0, 0, 0.2, AssemblyMode::Exact).unwrap();
        assert_eq!(mats.dim(), 1);
        assert!((gs.energy - phi.expectation(&h).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn overlap_diagonal_is_one() {
        let lat = build_lattice(2, 2).unwrap();
        let h = lat.isotropic_hamiltonian(-1.0, 0.1).unwrap();
        let ev = EvolutionOperator::trotter2(&h, 2).unwrap();
        let mut phi = StateVector::basis_state(8, 3).unwrap();
        phi.apply_pauli_rotation(&crate::pauli::PauliString::from_sparse(8, &[(0, crate::Pauli::X), (1, crate::Pauli::Y)]).unwrap(), 0.7).unwrap();
        let basis = build_basis(&phi, 1, 1, default_delta_t(&h).unwrap(), &ev).unwrap();
        let mats = assemble_matrices(&basis, &h, AssemblyMode::Exact).unwrap();
        for i in 0..mats.dim() {
            assert!((mats.s[(i, i)] - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
        assert!(hermiticity_defect(&mats.h) < 1e-10);
    }

    #[test]
    fn hoa_rejects_bad_tau() {
        let lat = build_lattice(2, 2).unwrap();
        let h = lat.isotropic_hamiltonian(-1.0, 0.1).unwrap();
        let ev = EvolutionOperator::trotter2(&h, 1).unwrap();
        let phi = StateVector::zero_state(8).unwrap();
        let basis = build_basis(&phi, 0, 0, 0.2, &ev).unwrap();
        assert!(assemble_matrices(&basis, &h, AssemblyMode::Hoa { tau: 0.0 }).is_err());
        assert!(assemble_matrices(&basis, &h, AssemblyMode::Hoa { tau: 1.0 }).is_err());
        assert!(build_basis(&phi, 0, 0, 0.0, &ev).is_err());
    }

    #[test]
    fn csv_layout() {
        let pts = vec![CurvePoint {
            n_l: 1,
            n_k: 2,
            n_phi: 11,
            steps: Some(3),
            mode: EvolutionMode::Trotter2 { steps: 3 },
            energy: -1.0,
            delta_e: 1e-3,
        }];
        let csv = curve_to_csv(&pts);
        assert_eq!(csv.lines().next().unwrap(), "n_l,n_k,n_phi,r,mode,delta_E");
        assert_eq!(csv.lines().nth(1).unwrap(), "1,2,11,3,trotter2,1.000000e-3");
    }
}
