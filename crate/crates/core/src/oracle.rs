// SPDX-License-Identifier: Apache-2.0

//! Exact-diagonalization references.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::greens::{structure_factor_seeds, DsfTable, FrequencyGrid, GfKind, GreensFunctionSamples};
use crate::lattice::HoneycombLattice;
use crate::linalg::{HermitianEigen, C64, ZERO};
use crate::pauli::{Pauli, PauliSum, DENSE_CAP};
use crate::simulator::{EvolutionOperator, StateVector};

/// Eigenvalues closer than this to `E₀` count as ground states.
pub const DEGENERACY_GAP: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub num_sites: usize,
    pub eigen: Arc<HermitianEigen>,
    pub ground_degeneracy: usize,
}

/// Full dense eigensolution.
pub fn diagonalize(h: &PauliSum) -> Result<SpectralDecomposition> {
    if h.num_sites() > DENSE_CAP {
        return Err(Error::TooManySites { num_sites: h.num_sites(), cap: DENSE_CAP });
    }
    let eigen = HermitianEigen::of_pauli_sum(h)?;
    let e0 = eigen.values[0];
    let ground_degeneracy = eigen.values.iter().take_while(|&&e| e - e0 < DEGENERACY_GAP).count();
    Ok(SpectralDecomposition { num_sites: h.num_sites(), eigen: Arc::new(eigen), ground_degeneracy })
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigen.values[0]
    }

    /// `E_{g} − E₀` for the first level above the ground space.
    pub fn gap(&self) -> Option<f64> {
        self.eigen.values.get(self.ground_degeneracy).map(|e| e - self.ground_energy())
    }

    pub fn width(&self) -> f64 {
        self.eigen.values[self.eigen.dim() - 1] - self.eigen.values[0]
    }

    pub fn eigenvector(&self, k: usize) -> Result<StateVector> {
        StateVector::from_amplitudes(self.num_sites, self.eigen.vector(k))
    }

    /// Squared norm of the projection of `state` onto the ground space.
    pub fn ground_space_weight(&self, state: &StateVector) -> Result<f64> {
        if state.num_sites() != self.num_sites {
            return Err(Error::SizeMismatch { left: self.num_sites, right: state.num_sites() });
        }
        let c = self.eigen.to_eigenbasis(state.amplitudes());
        Ok(c[..self.ground_degeneracy].iter().map(|z| z.norm_sqr()).sum())
    }

    /// Normalized projection of `reference` onto the ground space.
    pub fn matched_ground_state(&self, reference: &StateVector) -> Result<StateVector> {
        let mut c = self.eigen.to_eigenbasis(reference.amplitudes());
        for z in c[self.ground_degeneracy..].iter_mut() {
            *z = ZERO;
        }
        let mut gs = StateVector::from_amplitudes(self.num_sites, self.eigen.from_eigenbasis(&c))?;
        if gs.norm() < 1e-8 {
            return Err(Error::InvalidArgument("reference is orthogonal to the ground space".into()));
        }
        gs.normalize()?;
        Ok(gs)
    }

    /// Largest `‖Hv − λv‖` over all eigenpairs.
    pub fn max_residual(&self, h: &PauliSum) -> Result<f64> {
        (0..self.eigen.dim())
            .into_par_iter()
            .map(|k| {
                let v = self.eigenvector(k)?;
                let hv = v.apply_pauli_sum(h)?;
                let lam = self.eigen.values[k];
                Ok(hv
                    .amplitudes()
                    .iter()
                    .zip(v.amplitudes())
                    .map(|(a, b)| (a - b * lam).norm_sqr())
                    .sum::<f64>()
                    .sqrt())
            })
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
    }

    /// Exact `V(t)` sharing these eigenpairs.
    pub fn evolution(&self, h: &PauliSum) -> EvolutionOperator {
        EvolutionOperator::exact_with_eigen(h, Arc::clone(&self.eigen))
    }

    // Σ_n conj(L_n) R_n / (z ∓ E_n).
    fn lehmann(&self, left: &StateVector, right: &StateVector, grid: &FrequencyGrid, sign: f64) -> Vec<C64> {
        let l = self.eigen.to_eigenbasis(left.amplitudes());
        let r = self.eigen.to_eigenbasis(right.amplitudes());
        let w: Vec<C64> = l.iter().zip(&r).map(|(a, b)| a.conj() * b).collect();
        let pts: Vec<C64> = grid.points().collect();
        pts.par_iter()
            .map(|&z| {
                w.iter()
                    .zip(&self.eigen.values)
                    .map(|(wk, &e)| wk / (z - sign * e))
                    .sum()
            })
            .collect()
    }

    /// `⟨GS|a (z − Ĥ)⁻¹ b|GS⟩`.
    pub fn greater(&self, gs: &StateVector, a: &PauliSum, b: &PauliSum, grid: &FrequencyGrid) -> Result<Vec<C64>> {
        let left = gs.apply_pauli_sum(&adjoint(a)?)?;
        let right = gs.apply_pauli_sum(b)?;
        Ok(self.lehmann(&left, &right, grid, 1.0))
    }

    /// `⟨GS|a† (z + Ĥ)⁻¹ b†|GS⟩` for the pair `(a, b) = (ĉ_α, ĉ†_β)`.
    pub fn lesser(&self, gs: &StateVector, a: &PauliSum, b: &PauliSum, grid: &FrequencyGrid) -> Result<Vec<C64>> {
        let left = gs.apply_pauli_sum(a)?;
        let right = gs.apply_pauli_sum(&adjoint(b)?)?;
        Ok(self.lehmann(&left, &right, grid, -1.0))
    }
}

fn adjoint(op: &PauliSum) -> Result<PauliSum> {
    PauliSum::from_terms(op.num_sites(), op.terms().iter().map(|t| t.adjoint()))
}

/// Retarded `G = G^> + G^<` for `ĉ_α = σ^μ_α`, `ĉ†_β = σ^μ_β` by Lehmann sums.
pub fn exact_resolvent_gf(
    decomp: &SpectralDecomposition,
    gs: &StateVector,
    alpha: usize,
    beta: usize,
    mu: Pauli,
    grid: &FrequencyGrid,
) -> Result<GreensFunctionSamples> {
    let n = decomp.num_sites;
    let a = PauliSum::from_terms(n, [crate::pauli::PauliTerm::unit(n, &[(alpha, mu)])?])?;
    let b = PauliSum::from_terms(n, [crate::pauli::PauliTerm::unit(n, &[(beta, mu)])?])?;
    let g = decomp.greater(gs, &a, &b, grid)?;
    let l = decomp.lesser(gs, &a, &b, grid)?;
    Ok(GreensFunctionSamples {
        kind: GfKind::Retarded,
        alpha,
        beta,
        mu,
        omega: grid.omega.clone(),
        delta: grid.delta,
        values: g.iter().zip(&l).map(|(x, y)| x + y).collect(),
    })
}

/// Exact `S_{q=0}(h, ω)` with the ground state matched to `reference`.
pub fn exact_dynamical_structure_factor(
    lattice: &HoneycombLattice,
    coupling: f64,
    reference: &StateVector,
    q: [f64; 2],
    grid: &FrequencyGrid,
    fields: &[f64],
) -> Result<DsfTable> {
    let n = lattice.num_sites;
    let seeds = structure_factor_seeds(n, q)?;
    let mut raw = Vec::with_capacity(fields.len());
    for &hz in fields {
        let h = lattice.isotropic_hamiltonian(coupling, hz)?;
        let decomp = diagonalize(&h)?;
        let gs = decomp.matched_ground_state(reference)?;
        let mut row = vec![0.0; grid.len()];
        for op in &seeds {
            let g = decomp.greater(&gs, op, op, grid)?;
            let l = decomp.lesser(&gs, op, op, grid)?;
            for (i, r) in row.iter_mut().enumerate() {
                *r += (g[i] + l[i]).im / n as f64;
            }
        }
        raw.push(row);
    }
    Ok(DsfTable::from_raw(fields.to_vec(), grid.omega.clone(), raw))
}

/// Ground-state record for one lattice and coupling set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundStateFixture {
    pub rows: usize,
    pub cols: usize,
    pub num_sites: usize,
    pub coupling: f64,
    pub field_z: f64,
    pub ground_energy: f64,
    pub ground_degeneracy: usize,
    pub gap: Option<f64>,
    pub spectral_width: f64,
    pub kappa: f64,
}

pub fn ground_state_fixture(rows: usize, cols: usize, coupling: f64, field_z: f64) -> Result<GroundStateFixture> {
    let lat = crate::lattice::build_lattice(rows, cols)?;
    let h = lat.isotropic_hamiltonian(coupling, field_z)?;
    let d = diagonalize(&h)?;
    Ok(GroundStateFixture {
        rows,
        cols,
        num_sites: lat.num_sites,
        coupling,
        field_z,
        ground_energy: d.ground_energy(),
        ground_degeneracy: d.ground_degeneracy,
        gap: d.gap(),
        spectral_width: d.width(),
        kappa: h.gershgorin_kappa()?,
    })
}

/// JSON document `{ "version": 1, "instances": [...] }`.
pub fn emit_fixtures(instances: &[(usize, usize, f64, f64)]) -> Result<String> {
    let list: Result<Vec<GroundStateFixture>> = instances
        .iter()
        .map(|&(r, c, j, h)| ground_state_fixture(r, c, j, h))
        .collect();
    let doc = serde_json::json!({ "version": 1, "instances": list? });
    Ok(serde_json::to_string_pretty(&doc)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_z() {
        let h = PauliSum::parse("1 * Z1", 1).unwrap();
        let d = diagonalize(&h).unwrap();
        assert_eq!(d.eigenvalues(), &[-1.0, 1.0]);
        assert_eq!(d.ground_degeneracy, 1);
    }

    #[test]
    fn commuting_terms_add() {
        let h = PauliSum::parse("0.5 * Z1 Z2\n0.3 * Z2\n-0.2 * Z3", 3).unwrap();
        let d = diagonalize(&h).unwrap();
        let mut want = Vec::new();
        for b in 0..8u32 {
            let s = |i: u32| if b >> i & 1 == 1 { -1.0 } else { 1.0 };
            want.push(0.5 * s(0) * s(1) + 0.3 * s(1) - 0.2 * s(2));
        }
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in d.eigenvalues().iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_hamiltonian_gf_is_free() {
        let h = PauliSum::new(2);
        let d = diagonalize(&h).unwrap();
        assert_eq!(d.ground_degeneracy, 4);
        let gs = d.eigenvector(0).unwrap();
        let a = PauliSum::parse("1 * X2", 2).unwrap();
        let grid = FrequencyGrid::new(vec![-1.0, 0.5], 0.1).unwrap();
        for (g, z) in d.greater(&gs, &a, &a, &grid).unwrap().iter().zip(grid.points()) {
            assert!((g - z.inv()).norm() < 1e-14);
        }
    }

    #[test]
    fn resolvent_identity() {
        let h = PauliSum::parse("1 * X1 X2\n0.4 * Z1\n-0.7 * Y2 Y3\n0.2 * Z3", 3).unwrap();
        let d = diagonalize(&h).unwrap();
        let gs = d.eigenvector(0).unwrap();
        let a = PauliSum::parse("1 * Z1", 3).unwrap();
        let z1 = C64::new(0.3, 0.2);
        let z2 = C64::new(-1.1, 0.5);
        let grid1 = FrequencyGrid::new(vec![z1.re], z1.im).unwrap();
        let grid2 = FrequencyGrid::new(vec![z2.re], z2.im).unwrap();
        let g1 = d.greater(&gs, &a, &a, &grid1).unwrap()[0];
        let g2 = d.greater(&gs, &a, &a, &grid2).unwrap()[0];
        // G(z1) − G(z2) = (z2 − z1) ⟨a (z1−H)⁻¹ (z2−H)⁻¹ a⟩.
        let l = d.eigen.to_eigenbasis(gs.apply_pauli_sum(&a).unwrap().amplitudes());
        let cross: C64 = l
            .iter()
            .zip(d.eigenvalues())
            .map(|(c, &e)| c.norm_sqr() / ((z1 - e) * (z2 - e)))
            .sum();
        assert!((g1 - g2 - (z2 - z1) * cross).norm() < 1e-12);
    }

    #[test]
    fn large_broadening_decay() {
        let h = PauliSum::parse("1 * X1 X2\n0.4 * Z1", 2).unwrap();
        let d = diagonalize(&h).unwrap();
        let gs = d.eigenvector(0).unwrap();
        let a = PauliSum::parse("1 * Z2", 2).unwrap();
        let delta = 1e6;
        let grid = FrequencyGrid::new(vec![0.0], delta).unwrap();
        let g = d.greater(&gs, &a, &a, &grid).unwrap()[0];
        assert!((g * C64::new(0.0, delta) - 1.0).norm() < 1e-5);
    }
}
