// SPDX-License-Identifier: Apache-2.0

//! Statevector engine: Pauli rotations, inner products, expectation values and
//! time evolution (exact or second-order Trotter-Suzuki).
//!
//! Rotation convention: `apply_pauli_rotation(P, θ)` applies `exp(−iθP/2)`.
//! A Hamiltonian term `c·P` evolved for time `τ` is therefore a rotation by
//! `θ = 2cτ`.

use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, HermitianEigen, C64, ZERO};
use crate::pauli::{i_pow, Pauli, PauliString, PauliSum, PauliTerm, DENSE_CAP};

/// Largest register the statevector engine allocates.
pub const MAX_STATE_SITES: usize = 30;

/// `2^N` complex amplitudes. Unitary operations preserve the norm; vectors
/// produced by non-unitary maps (e.g. `H|ψ⟩`) carry whatever norm results.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_sites: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero_state(num_sites: usize) -> Result<Self> {
        Self::basis_state(num_sites, 0)
    }

    pub fn basis_state(num_sites: usize, index: usize) -> Result<Self> {
        if num_sites > MAX_STATE_SITES {
            return Err(Error::TooManySites { num_sites, cap: MAX_STATE_SITES });
        }
        let dim = 1usize << num_sites;
        if index >= dim {
            return Err(Error::InvalidArgument(format!("basis index {index} >= {dim}")));
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self { num_sites, amplitudes })
    }

    pub fn from_amplitudes(num_sites: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if num_sites > MAX_STATE_SITES {
            return Err(Error::TooManySites { num_sites, cap: MAX_STATE_SITES });
        }
        if amplitudes.len() != 1usize << num_sites {
            return Err(Error::InvalidArgument(format!(
                "expected {} amplitudes, got {}",
                1usize << num_sites,
                amplitudes.len()
            )));
        }
        Ok(Self { num_sites, amplitudes })
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.amplitudes)
    }

    /// Rescales to unit norm, returning the previous norm.
    pub fn normalize(&mut self) -> Result<f64> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::NonFinite(format!("cannot normalize a vector of norm {n}")));
        }
        let inv = 1.0 / n;
        self.amplitudes.iter_mut().for_each(|a| *a *= inv);
        Ok(n)
    }

    pub fn scale(&mut self, factor: Complex64) {
        self.amplitudes.iter_mut().for_each(|a| *a *= factor);
    }

    /// `self += factor · other`.
    pub fn add_scaled(&mut self, factor: Complex64, other: &StateVector) -> Result<()> {
        check(self.num_sites, other.num_sites)?;
        for (a, b) in self.amplitudes.iter_mut().zip(&other.amplitudes) {
            *a += factor * b;
        }
        Ok(())
    }

    /// Exact inner product `⟨self|other⟩`.
    pub fn overlap(&self, other: &StateVector) -> Result<Complex64> {
        check(self.num_sites, other.num_sites)?;
        Ok(linalg::dot(&self.amplitudes, &other.amplitudes))
    }

    /// `⟨ψ|H|ψ⟩` for Hermitian `H`.
    pub fn expectation(&self, h: &PauliSum) -> Result<f64> {
        check(self.num_sites, h.num_sites())?;
        h.ensure_hermitian()?;
        let hv = self.apply_pauli_sum(h)?;
        let e = linalg::dot(&self.amplitudes, &hv.amplitudes);
        debug_assert!(e.im.abs() <= 1e-10 * (1.0 + e.re.abs()));
        Ok(e.re)
    }

    /// `⟨ψ|P|ψ⟩` for a single Pauli string.
    pub fn pauli_expectation(&self, p: &PauliString) -> Result<f64> {
        let pv = self.apply_pauli_string(p)?;
        Ok(linalg::dot(&self.amplitudes, &pv.amplitudes).re)
    }

    /// `P|ψ⟩`.
    pub fn apply_pauli_string(&self, p: &PauliString) -> Result<StateVector> {
        check(self.num_sites, p.num_sites())?;
        let x = p.x_mask() as usize;
        let mut out = vec![ZERO; self.dim()];
        for (b, &a) in self.amplitudes.iter().enumerate() {
            out[b ^ x] = p.phase_on(b) * a;
        }
        Ok(StateVector { num_sites: self.num_sites, amplitudes: out })
    }

    pub fn apply_pauli_term(&self, t: &PauliTerm) -> Result<StateVector> {
        let mut out = self.apply_pauli_string(&t.string)?;
        out.scale(t.coefficient);
        Ok(out)
    }

    /// `H|ψ⟩`.
    pub fn apply_pauli_sum(&self, h: &PauliSum) -> Result<StateVector> {
        check(self.num_sites, h.num_sites())?;
        let mut out = vec![ZERO; self.dim()];
        h.apply_into(&self.amplitudes, &mut out);
        Ok(StateVector { num_sites: self.num_sites, amplitudes: out })
    }

    /// In place `|ψ⟩ ← exp(−iθP/2)|ψ⟩`.
    pub fn apply_pauli_rotation(&mut self, p: &PauliString, angle: f64) -> Result<()> {
        check(self.num_sites, p.num_sites())?;
        if angle == 0.0 {
            return Ok(());
        }
        let (s, c) = (angle / 2.0).sin_cos();
        let x = p.x_mask() as usize;
        let z = p.z_mask();
        if x == 0 {
            // Diagonal string: phase e^{∓iθ/2} by parity of b ∧ z.
            let plus = C64::new(c, -s);
            let minus = C64::new(c, s);
            for (b, a) in self.amplitudes.iter_mut().enumerate() {
                let odd = ((b as u64) & z).count_ones() & 1 == 1;
                *a *= if odd { minus } else { plus };
            }
            return Ok(());
        }
        let base = i_pow(p.y_count());
        let top = 1usize << (63 - (x as u64).leading_zeros());
        let minus_i_sin = C64::new(0.0, -s);
        for b in 0..self.amplitudes.len() {
            if b & top != 0 {
                continue;
            }
            let b2 = b ^ x;
            let pb = if ((b as u64) & z).count_ones() & 1 == 1 { -base } else { base };
            let pb2 = if ((b2 as u64) & z).count_ones() & 1 == 1 { -base } else { base };
            let a1 = self.amplitudes[b];
            let a2 = self.amplitudes[b2];
            // P|b⟩ = pb|b2⟩ and P|b2⟩ = pb2|b⟩.
            self.amplitudes[b] = c * a1 + minus_i_sin * pb2 * a2;
            self.amplitudes[b2] = c * a2 + minus_i_sin * pb * a1;
        }
        Ok(())
    }

    /// Applies a single-site Pauli gate.
    pub fn apply_single(&mut self, site: usize, p: Pauli) -> Result<()> {
        let s = PauliString::from_sparse(self.num_sites, &[(site, p)])?;
        *self = self.apply_pauli_string(&s)?;
        Ok(())
    }

    /// Little-endian `f64` pairs `(re, im)` per amplitude.
    pub fn write_amplitudes<W: Write>(&self, mut w: W) -> Result<()> {
        for a in &self.amplitudes {
            w.write_all(&a.re.to_le_bytes())?;
            w.write_all(&a.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_amplitudes<R: Read>(num_sites: usize, mut r: R) -> Result<Self> {
        let dim = 1usize << num_sites;
        let mut buf = [0u8; 8];
        let mut amplitudes = Vec::with_capacity(dim);
        for _ in 0..dim {
            r.read_exact(&mut buf)?;
            let re = f64::from_le_bytes(buf);
            r.read_exact(&mut buf)?;
            let im = f64::from_le_bytes(buf);
            amplitudes.push(C64::new(re, im));
        }
        Self::from_amplitudes(num_sites, amplitudes)
    }
}

fn check(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::SizeMismatch { left, right });
    }
    Ok(())
}

/// Free-function form of [`StateVector::overlap`].
pub fn overlap(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    a.overlap(b)
}

/// Free-function form of [`StateVector::expectation`].
pub fn expectation(state: &StateVector, h: &PauliSum) -> Result<f64> {
    state.expectation(h)
}

/// Free-function form of [`StateVector::apply_pauli_rotation`].
pub fn apply_pauli_rotation(state: &mut StateVector, term: &PauliTerm, angle: f64) -> Result<()> {
    state.apply_pauli_rotation(&term.string, angle)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum EvolutionMode {
    Exact,
    Trotter2 { steps: usize },
}

/// A set of mutually commuting terms exponentiated together.
#[derive(Debug, Clone)]
pub struct TermGroup {
    pub label: String,
    pub terms: Vec<PauliTerm>,
}

impl TermGroup {
    fn is_two_qubit(&self) -> bool {
        self.terms.iter().any(|t| t.string.weight() >= 2)
    }

    fn apply(&self, state: &mut StateVector, tau: f64) -> Result<()> {
        for t in &self.terms {
            state.apply_pauli_rotation(&t.string, 2.0 * t.coefficient.re * tau)?;
        }
        Ok(())
    }
}

/// Splits a Hamiltonian into the Trotter ordering `[XX bonds, YY bonds,
/// ZZ bonds, remaining terms]`. Remaining terms are partitioned greedily into
/// mutually commuting groups in order of appearance. Empty groups are
/// dropped.
pub fn default_grouping(h: &PauliSum) -> Vec<TermGroup> {
    let mut bonds: [Vec<PauliTerm>; 3] = Default::default();
    let mut rest: Vec<Vec<PauliTerm>> = Vec::new();
    for t in h.terms() {
        let s = t.string;
        if s.weight() == 2 {
            let axes: Vec<Pauli> = s.support().iter().map(|&i| s.get(i)).collect();
            if axes[0] == axes[1] && axes[0] != Pauli::I {
                let slot = match axes[0] {
                    Pauli::X => 0,
                    Pauli::Y => 1,
                    _ => 2,
                };
                bonds[slot].push(*t);
                continue;
            }
        }
        if s.is_identity() {
            // global phase only
            continue;
        }
        match rest
            .iter_mut()
            .find(|g| g.iter().all(|u| u.string.commutes_with(&s)))
        {
            Some(g) => g.push(*t),
            None => rest.push(vec![*t]),
        }
    }
    let mut groups = Vec::new();
    for (label, terms) in ["xx", "yy", "zz"].into_iter().zip(bonds) {
        if !terms.is_empty() {
            // Bonds of one kind commute only if they are disjoint or equal-axis; XX
            // strings always commute with each other.
            groups.push(TermGroup { label: label.to_string(), terms });
        }
    }
    for (k, terms) in rest.into_iter().enumerate() {
        groups.push(TermGroup { label: format!("rest{k}"), terms });
    }
    groups
}

/// Time-evolution operator `V(t) = exp(−itH)` in exact or Trotterized form.
#[derive(Debug, Clone)]
pub struct EvolutionOperator {
    hamiltonian: PauliSum,
    mode: EvolutionMode,
    groups: Vec<TermGroup>,
    eigen: Option<Arc<HermitianEigen>>,
}

impl EvolutionOperator {
    /// Exact evolution backed by a cached dense eigendecomposition.
    pub fn exact(hamiltonian: &PauliSum) -> Result<Self> {
        hamiltonian.ensure_hermitian()?;
        if hamiltonian.num_sites() > DENSE_CAP {
            return Err(Error::TooManySites { num_sites: hamiltonian.num_sites(), cap: DENSE_CAP });
        }
        let eigen = HermitianEigen::of_pauli_sum(hamiltonian)?;
        Ok(Self::exact_with_eigen(hamiltonian, Arc::new(eigen)))
    }

    /// Exact evolution reusing an existing decomposition of the same Hamiltonian.
    pub fn exact_with_eigen(hamiltonian: &PauliSum, eigen: Arc<HermitianEigen>) -> Self {
        Self {
            hamiltonian: hamiltonian.clone(),
            mode: EvolutionMode::Exact,
            groups: default_grouping(hamiltonian),
            eigen: Some(eigen),
        }
    }

    /// Second-order Trotter-Suzuki with `steps` repetitions and the default
    /// term ordering.
    pub fn trotter2(hamiltonian: &PauliSum, steps: usize) -> Result<Self> {
        Self::trotter2_with_groups(hamiltonian, steps, default_grouping(hamiltonian))
    }

    pub fn trotter2_with_groups(
        hamiltonian: &PauliSum,
        steps: usize,
        groups: Vec<TermGroup>,
    ) -> Result<Self> {
        hamiltonian.ensure_hermitian()?;
        if steps < 1 {
            return Err(Error::InvalidArgument("Trotter steps must be >= 1".into()));
        }
        for g in &groups {
            for (i, a) in g.terms.iter().enumerate() {
                for b in &g.terms[i + 1..] {
                    if !a.string.commutes_with(&b.string) {
                        return Err(Error::InvalidArgument(format!(
                            "group '{}' contains non-commuting terms {a} and {b}",
                            g.label
                        )));
                    }
                }
            }
        }
        Ok(Self {
            hamiltonian: hamiltonian.clone(),
            mode: EvolutionMode::Trotter2 { steps },
            groups,
            eigen: None,
        })
    }

    pub fn from_mode(hamiltonian: &PauliSum, mode: EvolutionMode) -> Result<Self> {
        match mode {
            EvolutionMode::Exact => Self::exact(hamiltonian),
            EvolutionMode::Trotter2 { steps } => Self::trotter2(hamiltonian, steps),
        }
    }

    /// Same mode and ordering for a different Hamiltonian (e.g. `−H`).
    pub fn with_hamiltonian(&self, hamiltonian: &PauliSum) -> Result<Self> {
        Self::from_mode(hamiltonian, self.mode)
    }

    pub fn hamiltonian(&self) -> &PauliSum {
        &self.hamiltonian
    }

    pub fn mode(&self) -> EvolutionMode {
        self.mode
    }

    pub fn groups(&self) -> &[TermGroup] {
        &self.groups
    }

    pub fn eigen(&self) -> Option<&Arc<HermitianEigen>> {
        self.eigen.as_ref()
    }

    /// Returns `V(t)|ψ⟩`.
    pub fn evolve(&self, state: &StateVector, t: f64) -> Result<StateVector> {
        check(state.num_sites(), self.hamiltonian.num_sites())?;
        if t == 0.0 {
            return Ok(state.clone());
        }
        match self.mode {
            EvolutionMode::Exact => {
                let eigen = self.eigen.as_ref().expect("exact mode carries eigenpairs");
                let mut c = eigen.to_eigenbasis(state.amplitudes());
                for (ck, &e) in c.iter_mut().zip(&eigen.values) {
                    *ck *= C64::from_polar(1.0, -t * e);
                }
                StateVector::from_amplitudes(state.num_sites(), eigen.from_eigenbasis(&c))
            }
            EvolutionMode::Trotter2 { steps } => {
                let mut out = state.clone();
                self.trotter_in_place(&mut out, t, steps)?;
                Ok(out)
            }
        }
    }

    /// `V(t_j)|ψ⟩` for each `t_j`; shares one basis change in exact mode.
    pub fn evolve_many(&self, state: &StateVector, times: &[f64]) -> Result<Vec<StateVector>> {
        check(state.num_sites(), self.hamiltonian.num_sites())?;
        match self.mode {
            EvolutionMode::Exact => {
                let eigen = self.eigen.as_ref().expect("exact mode carries eigenpairs");
                let c = eigen.to_eigenbasis(state.amplitudes());
                let cols: Vec<Vec<C64>> = times
                    .iter()
                    .map(|&t| {
                        c.iter()
                            .zip(&eigen.values)
                            .map(|(ck, &e)| ck * C64::from_polar(1.0, -t * e))
                            .collect()
                    })
                    .collect();
                let refs: Vec<&[C64]> = cols.iter().map(|v| v.as_slice()).collect();
                let mut out = Vec::with_capacity(times.len());
                for (amps, &t) in eigen.from_eigenbasis_many(&refs).into_iter().zip(times) {
                    if t == 0.0 {
                        out.push(state.clone());
                    } else {
                        out.push(StateVector::from_amplitudes(state.num_sites(), amps)?);
                    }
                }
                Ok(out)
            }
            EvolutionMode::Trotter2 { .. } => {
                times.iter().map(|&t| self.evolve(state, t)).collect()
            }
        }
    }

    // (Π_s e^{−iH_s τ/2} Π_s' e^{−iH_s' τ/2})^r with τ = t/r; the two middle
    // factors of the last group are merged into one of duration τ.
    fn trotter_in_place(&self, state: &mut StateVector, t: f64, steps: usize) -> Result<()> {
        let tau = t / steps as f64;
        let m = self.groups.len();
        if m == 0 {
            return Ok(());
        }
        for _ in 0..steps {
            for g in &self.groups[..m - 1] {
                g.apply(state, tau / 2.0)?;
            }
            self.groups[m - 1].apply(state, tau)?;
            for g in self.groups[..m - 1].iter().rev() {
                g.apply(state, tau / 2.0)?;
            }
        }
        Ok(())
    }

    /// CNOT-layer accounting for one application of `V(t)`.
    pub fn cnot_depth(&self, outer_levels: usize) -> Result<CircuitCost> {
        let steps = match self.mode {
            EvolutionMode::Exact => {
                return Err(Error::InvalidArgument(
                    "gate counts are only defined for Trotterized evolution".into(),
                ))
            }
            EvolutionMode::Trotter2 { steps } => steps,
        };
        // Symmetrized sequence of multi-qubit layers for one step. Adjacent
        // copies of the same group merge when everything between them commutes
        // with it (the single-qubit field commutes with ZZ bonds).
        let m = self.groups.len();
        let mut sequence: Vec<usize> = (0..m).collect();
        sequence.extend((0..m).rev());
        let mut layers: Vec<usize> = Vec::new();
        let mut pending_single: Vec<usize> = Vec::new();
        for g in sequence {
            if !self.groups[g].is_two_qubit() {
                pending_single.push(g);
                continue;
            }
            let mergeable = layers.last() == Some(&g)
                && pending_single.iter().all(|&s| groups_commute(&self.groups[s], &self.groups[g]));
            if !mergeable {
                layers.push(g);
            }
            pending_single.clear();
        }
        let mut rotation_layers = 0usize;
        let mut cnots_per_step = 0usize;
        let mut cnot_layers_per_step = 0usize;
        for &g in &layers {
            let group = &self.groups[g];
            let sub_layers = parallel_layers(&group.terms);
            rotation_layers += sub_layers;
            let max_weight = group.terms.iter().map(|t| t.string.weight()).max().unwrap_or(0);
            cnot_layers_per_step += sub_layers * 2 * (max_weight.saturating_sub(1));
            cnots_per_step += group
                .terms
                .iter()
                .map(|t| 2 * t.string.weight().saturating_sub(1))
                .sum::<usize>();
        }
        let depth = cnot_layers_per_step * steps;
        Ok(CircuitCost {
            rotation_layers: rotation_layers * steps,
            depth_per_evolution: depth,
            cnots_per_evolution: cnots_per_step * steps,
            max_multigrid_depth: depth * (outer_levels + 1),
        })
    }
}

fn groups_commute(a: &TermGroup, b: &TermGroup) -> bool {
    a.terms
        .iter()
        .all(|x| b.terms.iter().all(|y| x.string.commutes_with(&y.string)))
}

// Greedy packing of multi-qubit rotations into layers of disjoint support.
fn parallel_layers(terms: &[PauliTerm]) -> usize {
    let mut layers: Vec<u64> = Vec::new();
    for t in terms.iter().filter(|t| t.string.weight() >= 2) {
        let support = t.string.x_mask() | t.string.z_mask();
        match layers.iter_mut().find(|used| **used & support == 0) {
            Some(used) => *used |= support,
            None => layers.push(support),
        }
    }
    layers.len()
}

/// Gate resources of a Trotterized evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitCost {
    /// Layers of parallel multi-qubit rotations per `V(t)`.
    pub rotation_layers: usize,
    /// CNOT depth `d_v` of one `V(t)`.
    pub depth_per_evolution: usize,
    /// Total CNOT count of one `V(t)`.
    pub cnots_per_evolution: usize,
    /// Deepest multigrid circuit, `d_v (n_l + 1)`.
    pub max_multigrid_depth: usize,
}

/// Free-function form of [`EvolutionOperator::cnot_depth`].
pub fn cnot_depth(op: &EvolutionOperator, outer_levels: usize) -> Result<CircuitCost> {
    op.cnot_depth(outer_levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::parse_term;
    use faer::Mat;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    // Dense exp(−iθP/2) = cos(θ/2) 1 − i sin(θ/2) P, valid because P² = 1.
    fn dense_rotation(p: &PauliString, angle: f64) -> Mat<C64> {
        let m = PauliTerm::new(1.0, *p).to_matrix().unwrap();
        let (s, co) = (angle / 2.0).sin_cos();
        Mat::from_fn(m.nrows(), m.ncols(), |i, j| {
            let id = if i == j { co } else { 0.0 };
            c(id, 0.0) + c(0.0, -s) * m[(i, j)]
        })
    }

    fn random_state(n: usize, seed: u64) -> StateVector {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..1usize << n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let mut s = StateVector::from_amplitudes(n, amps).unwrap();
        s.normalize().unwrap();
        s
    }

    #[test]
    fn z_rotation_phase() {
        let mut s = StateVector::zero_state(1).unwrap();
        let z = parse_term("Z1", 1).unwrap();
        s.apply_pauli_rotation(&z.string, 0.7).unwrap();
        assert!((s.amplitudes()[0] - C64::from_polar(1.0, -0.35)).norm() < 1e-15);
        let mut t = StateVector::zero_state(1).unwrap();
        t.apply_pauli_rotation(&z.string, 0.0).unwrap();
        assert_eq!(t, StateVector::zero_state(1).unwrap());
    }

    #[test]
    fn xx_rotation_by_pi() {
        let mut s = StateVector::zero_state(2).unwrap();
        let xx = parse_term("X1 X2", 2).unwrap();
        s.apply_pauli_rotation(&xx.string, std::f64::consts::PI).unwrap();
        assert!(s.amplitudes()[0].norm() < 1e-15);
        assert!((s.amplitudes()[3] - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn rotations_match_dense_exponential_on_two_site_strings() {
        let n = 3;
        let axes = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        let psi = random_state(n, 3);
        for &a in &axes {
            for &b in &axes {
                for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                    let p = PauliString::from_sparse(n, &[(i, a), (j, b)]).unwrap();
                    let angle = 0.37 + i as f64 * 0.1;
                    let mut s = psi.clone();
                    s.apply_pauli_rotation(&p, angle).unwrap();
                    let want = linalg::mat_vec(&dense_rotation(&p, angle), psi.amplitudes());
                    for (x, y) in s.amplitudes().iter().zip(&want) {
                        assert!((x - y).norm() < 1e-13, "{p}");
                    }
                    assert!((s.norm() - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn overlap_and_expectation_basics() {
        let s = StateVector::zero_state(3).unwrap();
        assert!((s.overlap(&s).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let t = StateVector::basis_state(3, 5).unwrap();
        assert_eq!(s.overlap(&t).unwrap(), c(0.0, 0.0));
        for i in 1..=3 {
            let z = PauliSum::parse(&format!("Z{i}"), 3).unwrap();
            let x = PauliSum::parse(&format!("X{i}"), 3).unwrap();
            assert!((s.expectation(&z).unwrap() - 1.0).abs() < 1e-15);
            assert!(s.expectation(&x).unwrap().abs() < 1e-15);
        }
        let bad = PauliSum::parse("(0+1i) * X1", 3).unwrap();
        assert!(matches!(s.expectation(&bad), Err(Error::NotHermitian(_))));
        let other = StateVector::zero_state(2).unwrap();
        assert!(matches!(s.overlap(&other), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn amplitude_dump_round_trip() {
        let s = random_state(3, 9);
        let mut buf = Vec::new();
        s.write_amplitudes(&mut buf).unwrap();
        assert_eq!(buf.len(), 8 * 16);
        let back = StateVector::read_amplitudes(3, buf.as_slice()).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn evolution_at_zero_time_is_identity() {
        let h = PauliSum::parse("1 * X1 X2\n0.5 * Z1\n-0.3 * Y1 Y2", 2).unwrap();
        let psi = random_state(2, 1);
        for op in [EvolutionOperator::exact(&h).unwrap(), EvolutionOperator::trotter2(&h, 3).unwrap()] {
            assert_eq!(op.evolve(&psi, 0.0).unwrap(), psi);
        }
    }

    #[test]
    fn trotter_is_exact_for_commuting_terms() {
        let h = PauliSum::parse("0.7 * Z1 Z2\n-0.2 * Z2\n0.4 * Z1 Z3\n1.1 * Z3", 3).unwrap();
        let psi = random_state(3, 4);
        let exact = EvolutionOperator::exact(&h).unwrap().evolve(&psi, 1.3).unwrap();
        let trot = EvolutionOperator::trotter2(&h, 1).unwrap().evolve(&psi, 1.3).unwrap();
        for (a, b) in exact.amplitudes().iter().zip(trot.amplitudes()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn trotter_rejects_zero_steps_and_exact_has_no_cost() {
        let h = PauliSum::parse("1 * X1 X2", 2).unwrap();
        assert!(EvolutionOperator::trotter2(&h, 0).is_err());
        let ex = EvolutionOperator::exact(&h).unwrap();
        assert!(ex.cnot_depth(0).is_err());
    }

    #[test]
    fn non_commuting_group_rejected() {
        let h = PauliSum::parse("1 * X1\n1 * Z1", 1).unwrap();
        let g = vec![TermGroup { label: "bad".into(), terms: h.terms().to_vec() }];
        assert!(EvolutionOperator::trotter2_with_groups(&h, 1, g).is_err());
    }
}
