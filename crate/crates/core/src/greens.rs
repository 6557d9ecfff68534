// SPDX-License-Identifier: Apache-2.0

//! Green's functions from Krylov subspaces built on top of a QSE ground state.
//!
//! For an excitation `ĉ†` the reference `|χ₀⟩ = ĉ†|GS⟩` seeds a second
//! multigrid basis (the ψ-basis). Its coordinates are
//! `ψ⁰ = S_ψ⁺ S_{ψ,ĉ†φ} φ^GS`, and a Lanczos recursion in the metric `S_ψ`
//! yields the tridiagonal coefficients of `Ĥ` on the Krylov space of `χ₀`:
//!
//! ```text
//! G^>(z) = ‖χ₀‖² / (z − a₀ − b₁² / (z − a₁ − b₂² / …))
//! ```
//!
//! The lesser part uses the same seed with `Ĥ → −Ĥ`, so
//! `G = G^> + G^<` for single-site Pauli excitations.
//!
//! Seeds that are sums of Paulis (`ĉ_α + ĉ_β`, or `Σ_i σ_i^μ` for the
//! structure factor) are not unitary. The recursion runs on the normalized
//! seed and the result is multiplied by `‖χ₀‖²`, which is the `weight`
//! stored with the coefficients.

use std::f64::consts::PI;
use std::fmt::Write as _;

use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::HoneycombLattice;
use crate::linalg::{canonical_orthogonalization, dot, hermitize, mat_vec, C64, ZERO};
use crate::pauli::{Pauli, PauliString, PauliSum, PauliTerm};
use crate::qse::{
    assemble_matrices, build_basis, default_delta_t, run_qse, transition_matrix, AssemblyMode,
    QseGroundState, SubspaceBasis, SubspaceMatrices, DEFAULT_THRESHOLD,
};
use crate::simulator::{EvolutionMode, EvolutionOperator, StateVector};

/// Single-site Pauli used as both `ĉ_α` and `ĉ_α†`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcitationOperator {
    pub kind: Pauli,
    pub site: usize,
}

impl ExcitationOperator {
    pub fn new(kind: Pauli, site: usize) -> Result<Self> {
        if kind == Pauli::I {
            return Err(Error::InvalidArgument("excitation must be X, Y or Z".into()));
        }
        Ok(Self { kind, site })
    }

    pub fn to_term(&self, num_sites: usize) -> Result<PauliTerm> {
        PauliTerm::unit(num_sites, &[(self.site, self.kind)])
    }

    pub fn to_sum(&self, num_sites: usize) -> Result<PauliSum> {
        PauliSum::from_terms(num_sites, [self.to_term(num_sites)?])
    }
}

/// Parameters of the ψ-basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KrylovBasisConfig {
    pub n_k: usize,
    pub n_l: usize,
    /// `None` means `2π/κ`.
    pub delta_t: Option<f64>,
    pub evolution: EvolutionMode,
    pub assembly: AssemblyMode,
    pub threshold: f64,
}

impl Default for KrylovBasisConfig {
    fn default() -> Self {
        Self {
            n_k: 3,
            n_l: 3,
            delta_t: None,
            evolution: EvolutionMode::Exact,
            assembly: AssemblyMode::Exact,
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

/// Tridiagonal data of one Krylov run. `b[0] = 0`; `b[n]` couples `n − 1`
/// and `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LanczosCoefficients {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// Squared norm of the unnormalized seed.
    pub weight: f64,
    /// Number of recursion steps taken.
    pub termination_index: usize,
    /// `b²` at the step that ended the recursion.
    pub final_b2: f64,
}

impl LanczosCoefficients {
    pub fn depth(&self) -> usize {
        self.a.len()
    }

    /// Same recursion for `−H`.
    pub fn negated(&self) -> Self {
        Self { a: self.a.iter().map(|x| -x).collect(), ..self.clone() }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// `b_n² ≤ 1e-8 (κ/2)²`.
pub fn termination_tolerance(kappa: f64) -> f64 {
    1e-8 * (kappa / 2.0).powi(2)
}

/// Lanczos on `(H, S)` from coordinates `psi0`.
pub fn lanczos_iterate(mats: &SubspaceMatrices, psi0: &[C64], tolerance: f64) -> Result<LanczosCoefficients> {
    Ok(lanczos_with_vectors(mats, psi0, tolerance, DEFAULT_THRESHOLD)?.0)
}

/// Lanczos returning also the vectors `ψ^n` in basis coordinates.
///
/// Runs in the orthonormal coordinates of the canonical basis of `S` with
/// full reorthogonalization; `ψ^n = X q_n`.
pub fn lanczos_with_vectors(
    mats: &SubspaceMatrices,
    psi0: &[C64],
    tolerance: f64,
    relative_threshold: f64,
) -> Result<(LanczosCoefficients, Vec<Vec<C64>>)> {
    if psi0.len() != mats.dim() {
        return Err(Error::SizeMismatch { left: mats.dim(), right: psi0.len() });
    }
    let s = hermitize(&mats.s);
    let cb = canonical_orthogonalization(&s, relative_threshold, 1e-12)?;
    let x = &cb.transform;
    let ht = hermitize(&cb.project(&mats.h));
    let q0 = mat_vec(&x.adjoint().to_owned(), &mat_vec(&s, psi0));
    let weight = q0.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let empty = LanczosCoefficients { a: vec![], b: vec![], weight, termination_index: 0, final_b2: 0.0 };
    if weight <= 1e-28 {
        return Ok((empty, vec![]));
    }
    let nrm = weight.sqrt();
    let mut qs: Vec<Vec<C64>> = vec![q0.iter().map(|z| z / nrm).collect()];
    let (mut a, mut b) = (Vec::new(), vec![0.0]);
    let dim = ht.nrows();
    let scale = (0..dim).map(|i| ht[(i, i)].norm()).fold(1.0, f64::max);
    let final_b2;
    loop {
        let q = qs.last().unwrap();
        let mut r = mat_vec(&ht, q);
        let an = dot(q, &r);
        if an.im.abs() > 1e-8 * scale {
            return Err(Error::NonFinite(format!("Lanczos diagonal has imaginary part {:e}", an.im)));
        }
        a.push(an.re);
        let n = qs.len();
        for (i, ri) in r.iter_mut().enumerate() {
            *ri -= qs[n - 1][i] * an.re;
            if n > 1 {
                *ri -= qs[n - 2][i] * b[n - 1];
            }
        }
        for _ in 0..2 {
            for qq in &qs {
                let c = dot(qq, &r);
                for (ri, qi) in r.iter_mut().zip(qq) {
                    *ri -= c * qi;
                }
            }
        }
        let b2 = r.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if b2 < -1e-10 {
            return Err(Error::IllConditioned(format!("negative b² = {b2:e}")));
        }
        if b2 <= tolerance || qs.len() >= dim {
            final_b2 = b2;
            break;
        }
        let bn = b2.sqrt();
        b.push(bn);
        qs.push(r.iter().map(|z| z / bn).collect());
    }
    let vectors = qs.iter().map(|q| cb.lift(q)).collect();
    let termination_index = a.len();
    Ok((LanczosCoefficients { a, b, weight, termination_index, final_b2 }, vectors))
}

/// `weight / (z − a₀ − b₁² / (z − a₁ − …))`, evaluated bottom-up.
pub fn continued_fraction(coeffs: &LanczosCoefficients, z: C64) -> Result<C64> {
    let mut g = ZERO;
    for k in (0..coeffs.a.len()).rev() {
        let tail = if k + 1 < coeffs.b.len() { g * coeffs.b[k + 1].powi(2) } else { ZERO };
        let denom = z - coeffs.a[k] - tail;
        if denom == ZERO {
            return Err(Error::Pole(z.re));
        }
        g = denom.inv();
    }
    let out = g * coeffs.weight;
    if !out.re.is_finite() || !out.im.is_finite() {
        return Err(Error::Pole(z.re));
    }
    Ok(out)
}

/// `weight · [(z − T)⁻¹]₀₀` through the eigenpairs of the tridiagonal `T`.
pub fn tridiagonal_resolvent(coeffs: &LanczosCoefficients, z: C64) -> Result<C64> {
    let n = coeffs.a.len();
    if n == 0 {
        return Ok(ZERO);
    }
    let t = Mat::from_fn(n, n, |i, j| {
        if i == j {
            coeffs.a[i]
        } else if i + 1 == j {
            coeffs.b[j]
        } else if j + 1 == i {
            coeffs.b[i]
        } else {
            0.0
        }
    });
    let evd = t
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
    let u = evd.U();
    let mut g = ZERO;
    for k in 0..n {
        let w = u[(0, k)] * u[(0, k)];
        g += C64::new(w, 0.0) / (z - evd.S()[k]);
    }
    Ok(g * coeffs.weight)
}

/// Frequencies `ω` with broadening `δ`; evaluation points are
/// `z = ω + shift + iδ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub omega: Vec<f64>,
    pub delta: f64,
    pub shift: f64,
}

impl FrequencyGrid {
    pub fn new(omega: Vec<f64>, delta: f64) -> Result<Self> {
        if omega.is_empty() {
            return Err(Error::InvalidArgument("frequency grid is empty".into()));
        }
        if !(delta > 0.0) {
            return Err(Error::InvalidArgument(format!("broadening must be positive, got {delta}")));
        }
        Ok(Self { omega, delta, shift: 0.0 })
    }

    /// `n` evenly spaced points on `[lo, hi]`.
    pub fn linspace(lo: f64, hi: f64, n: usize, delta: f64) -> Result<Self> {
        let omega = match n {
            0 => vec![],
            1 => vec![lo],
            _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
        };
        Self::new(omega, delta)
    }

    pub fn with_shift(mut self, shift: f64) -> Self {
        self.shift = shift;
        self
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = C64> + '_ {
        self.omega.iter().map(move |&w| C64::new(w + self.shift, self.delta))
    }

    pub fn evaluate(&self, coeffs: &LanczosCoefficients) -> Result<Vec<C64>> {
        self.points().map(|z| continued_fraction(coeffs, z)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GfKind {
    Greater,
    Lesser,
    Retarded,
    Plus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreensFunctionSamples {
    pub kind: GfKind,
    pub alpha: usize,
    pub beta: usize,
    pub mu: Pauli,
    pub omega: Vec<f64>,
    pub delta: f64,
    pub values: Vec<C64>,
}

impl GreensFunctionSamples {
    /// `−Im G / π`.
    pub fn spectral_function(&self) -> Vec<f64> {
        self.values.iter().map(|g| -g.im / PI).collect()
    }

    /// Columns `omega,re,im,sf`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("omega,re,im,sf\n");
        for (w, g) in self.omega.iter().zip(&self.values) {
            let _ = writeln!(s, "{w:.6},{:.12e},{:.12e},{:.12e}", g.re, g.im, -g.im / PI);
        }
        s
    }
}

/// Coordinates of `ĉ†|GS⟩` in its own multigrid basis.
#[derive(Debug, Clone)]
pub struct KrylovSeed {
    pub basis: SubspaceBasis,
    pub matrices: SubspaceMatrices,
    pub psi0: Vec<C64>,
    /// `ψ⁰† S_ψ ψ⁰`.
    pub norm_sq: f64,
    /// `‖ĉ†|GS⟩‖` computed on the statevector.
    pub reference_norm: f64,
}

impl KrylovSeed {
    /// `Σ_a ψ⁰_a |ψ_a⟩`.
    pub fn state(&self) -> Result<StateVector> {
        self.basis.combine(&self.psi0)
    }
}

/// Builds the ψ-basis for `op` and projects `op|GS⟩` onto it.
pub fn krylov_seed(
    gs: &QseGroundState,
    gs_basis: &SubspaceBasis,
    op: &PauliSum,
    h: &PauliSum,
    cfg: &KrylovBasisConfig,
) -> Result<KrylovSeed> {
    let evolution = if cfg.evolution == gs_basis.evolution.mode() && gs_basis.evolution.hamiltonian() == h {
        gs_basis.evolution.clone()
    } else {
        EvolutionOperator::from_mode(h, cfg.evolution)?
    };
    krylov_seed_with(gs, gs_basis, op, h, cfg, &evolution)
}

fn krylov_seed_with(
    gs: &QseGroundState,
    gs_basis: &SubspaceBasis,
    op: &PauliSum,
    h: &PauliSum,
    cfg: &KrylovBasisConfig,
    evolution: &EvolutionOperator,
) -> Result<KrylovSeed> {
    let ground = gs.state(gs_basis)?;
    let chi = ground.apply_pauli_sum(op)?;
    let reference_norm = chi.norm();
    if reference_norm < 1e-12 {
        return Err(Error::InvalidArgument("excitation annihilates the ground state".into()));
    }
    let delta_t = match cfg.delta_t {
        Some(dt) => dt,
        None => default_delta_t(h)?,
    };
    let basis = build_basis(&chi, cfg.n_k, cfg.n_l, delta_t, evolution)?;
    let matrices = assemble_matrices(&basis, h, cfg.assembly)?;
    let cross = transition_matrix(&basis.states, op, &gs_basis.states)?;
    let cb = canonical_orthogonalization(&hermitize(&matrices.s), cfg.threshold, 1e-12)?;
    let psi0 = cb.pseudo_inverse_apply(&mat_vec(&cross, &gs.coefficients));
    let norm_sq = dot(&psi0, &mat_vec(&matrices.s, &psi0)).re;
    Ok(KrylovSeed { basis, matrices, psi0, norm_sq, reference_norm })
}

/// Green's functions for one Hamiltonian and QSE ground state.
#[derive(Debug, Clone)]
pub struct GreensSolver {
    pub hamiltonian: PauliSum,
    pub gs_basis: SubspaceBasis,
    pub ground_state: QseGroundState,
    pub config: KrylovBasisConfig,
    pub tolerance: f64,
    evolution: EvolutionOperator,
}

impl GreensSolver {
    pub fn new(
        hamiltonian: &PauliSum,
        gs_basis: SubspaceBasis,
        ground_state: QseGroundState,
        config: KrylovBasisConfig,
    ) -> Result<Self> {
        let evolution = if config.evolution == gs_basis.evolution.mode()
            && gs_basis.evolution.hamiltonian() == hamiltonian
        {
            gs_basis.evolution.clone()
        } else {
            EvolutionOperator::from_mode(hamiltonian, config.evolution)?
        };
        Ok(Self {
            tolerance: termination_tolerance(hamiltonian.gershgorin_kappa()?),
            hamiltonian: hamiltonian.clone(),
            gs_basis,
            ground_state,
            config,
            evolution,
        })
    }

    pub fn num_sites(&self) -> usize {
        self.hamiltonian.num_sites()
    }

    pub fn ground_energy(&self) -> f64 {
        self.ground_state.energy
    }

    pub fn seed(&self, op: &PauliSum) -> Result<KrylovSeed> {
        krylov_seed_with(&self.ground_state, &self.gs_basis, op, &self.hamiltonian, &self.config, &self.evolution)
    }

    /// Greater and lesser coefficients for a Hermitian seed operator.
    pub fn coefficients(&self, op: &PauliSum) -> Result<(LanczosCoefficients, LanczosCoefficients)> {
        op.ensure_hermitian()?;
        let seed = self.seed(op)?;
        let greater = lanczos_with_vectors(&seed.matrices, &seed.psi0, self.tolerance, self.config.threshold)?.0;
        let lesser =
            lanczos_with_vectors(&seed.matrices.negated(), &seed.psi0, self.tolerance, self.config.threshold)?.0;
        Ok((greater, lesser))
    }

    /// `G^>(z) + G^<(z)` for the seed `op`.
    pub fn retarded_for_operator(&self, op: &PauliSum, grid: &FrequencyGrid) -> Result<Vec<C64>> {
        let (g, l) = self.coefficients(op)?;
        let (vg, vl) = (grid.evaluate(&g)?, grid.evaluate(&l)?);
        Ok(vg.iter().zip(&vl).map(|(a, b)| a + b).collect())
    }

    fn site_op(&self, site: usize, mu: Pauli) -> Result<PauliSum> {
        ExcitationOperator::new(mu, site)?.to_sum(self.num_sites())
    }

    pub fn diagonal_gf(&self, alpha: usize, mu: Pauli, grid: &FrequencyGrid) -> Result<GreensFunctionSamples> {
        let values = self.retarded_for_operator(&self.site_op(alpha, mu)?, grid)?;
        Ok(samples(GfKind::Retarded, alpha, alpha, mu, grid, values))
    }

    /// `G⁺` seeded with `ĉ_α + ĉ_β`.
    pub fn plus_gf(&self, alpha: usize, beta: usize, mu: Pauli, grid: &FrequencyGrid) -> Result<GreensFunctionSamples> {
        let op = self.site_op(alpha, mu)?.add(&self.site_op(beta, mu)?)?;
        let values = self.retarded_for_operator(&op, grid)?;
        Ok(samples(GfKind::Plus, alpha, beta, mu, grid, values))
    }

    /// `G_αβ = (G⁺_αβ − G_αα − G_ββ) / 2`.
    pub fn off_diagonal_gf(&self, alpha: usize, beta: usize, mu: Pauli, grid: &FrequencyGrid) -> Result<GreensFunctionSamples> {
        if alpha == beta {
            return Err(Error::InvalidArgument("off-diagonal path needs two distinct sites".into()));
        }
        let plus = self.plus_gf(alpha, beta, mu, grid)?;
        let ga = self.diagonal_gf(alpha, mu, grid)?;
        let gb = self.diagonal_gf(beta, mu, grid)?;
        let values = (0..grid.len())
            .map(|i| (plus.values[i] - ga.values[i] - gb.values[i]) * 0.5)
            .collect();
        Ok(samples(GfKind::Retarded, alpha, beta, mu, grid, values))
    }

    pub fn retarded_gf(&self, alpha: usize, beta: usize, mu: Pauli, grid: &FrequencyGrid) -> Result<GreensFunctionSamples> {
        if alpha == beta {
            self.diagonal_gf(alpha, mu, grid)
        } else {
            self.off_diagonal_gf(alpha, beta, mu, grid)
        }
    }

    /// `S_q(ω) = (1/N) Σ_μ Σ_ij e^{−iq·(r_i − r_j)} Im G^{μμ}_ij(ω)` at `q = 0`.
    pub fn structure_factor(&self, q: [f64; 2], grid: &FrequencyGrid) -> Result<Vec<f64>> {
        let n = self.num_sites();
        let mut total = vec![0.0; grid.len()];
        for op in structure_factor_seeds(n, q)? {
            let g = self.retarded_for_operator(&op, grid)?;
            for (t, v) in total.iter_mut().zip(&g) {
                *t += v.im / n as f64;
            }
        }
        Ok(total)
    }
}

fn samples(kind: GfKind, alpha: usize, beta: usize, mu: Pauli, grid: &FrequencyGrid, values: Vec<C64>) -> GreensFunctionSamples {
    GreensFunctionSamples { kind, alpha, beta, mu, omega: grid.omega.clone(), delta: grid.delta, values }
}

/// `Σ_i σ_i^μ` for `μ = x, y, z`. With `q = 0` the double site sum of
/// `G^{μμ}_ij` is the Green's function of this single seed.
pub fn structure_factor_seeds(num_sites: usize, q: [f64; 2]) -> Result<Vec<PauliSum>> {
    if q != [0.0, 0.0] {
        return Err(Error::InvalidArgument("only q = 0 is supported".into()));
    }
    [Pauli::X, Pauli::Y, Pauli::Z]
        .into_iter()
        .map(|mu| {
            let terms: Result<Vec<PauliTerm>> = (0..num_sites)
                .map(|i| Ok(PauliTerm::new(1.0, PauliString::from_sparse(num_sites, &[(i, mu)])?)))
                .collect();
            PauliSum::from_terms(num_sites, terms?)
        })
        .collect()
}

/// `S(h, ω)` on a field sweep and its `[0, 1]` intensity map.
///
/// The raw values are non-positive for `δ > 0`; the intensity is `−S`
/// rescaled by the minimum and maximum over the whole table. A ridge is the
/// per-field `argmax` of the intensity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DsfTable {
    pub fields: Vec<f64>,
    pub omega: Vec<f64>,
    pub raw: Vec<Vec<f64>>,
    pub intensity: Vec<Vec<f64>>,
}

impl DsfTable {
    pub fn from_raw(fields: Vec<f64>, omega: Vec<f64>, raw: Vec<Vec<f64>>) -> Self {
        let flat = raw.iter().flatten().map(|v| -v);
        let (lo, hi) = flat.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        let span = hi - lo;
        let intensity = raw
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| if span > 0.0 { (-v - lo) / span } else { 0.0 })
                    .collect()
            })
            .collect();
        Self { fields, omega, raw, intensity }
    }

    pub fn ridge(&self) -> Vec<usize> {
        self.intensity
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best })
                    .0
            })
            .collect()
    }

    /// Columns `h,omega,S,intensity`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("h,omega,S,intensity\n");
        for (i, h) in self.fields.iter().enumerate() {
            for (j, w) in self.omega.iter().enumerate() {
                let _ = writeln!(s, "{h:.6},{w:.6},{:.12e},{:.9}", self.raw[i][j], self.intensity[i][j]);
            }
        }
        s
    }
}

/// Everything the structure-factor sweep needs besides the field values.
#[derive(Debug, Clone)]
pub struct DsfSetup {
    pub lattice: HoneycombLattice,
    pub coupling: f64,
    /// Zero-field reference `|φ₀⟩`.
    pub reference: StateVector,
    pub n_k: usize,
    pub n_l: usize,
    pub evolution: EvolutionMode,
    pub krylov: KrylovBasisConfig,
}

/// QSE structure factor over a uniform `h^z` sweep.
pub fn dynamical_structure_factor(setup: &DsfSetup, q: [f64; 2], grid: &FrequencyGrid, fields: &[f64]) -> Result<DsfTable> {
    structure_factor_seeds(setup.lattice.num_sites, q)?;
    let mut raw = Vec::with_capacity(fields.len());
    for &hz in fields {
        let h = setup.lattice.isotropic_hamiltonian(setup.coupling, hz)?;
        let evolution = EvolutionOperator::from_mode(&h, setup.evolution)?;
        let dt = default_delta_t(&h)?;
        let (basis, _, gs) = run_qse(&setup.reference, &h, &evolution, setup.n_k, setup.n_l, dt, AssemblyMode::Exact)?;
        let solver = GreensSolver::new(&h, basis, gs, setup.krylov)?;
        raw.push(solver.structure_factor(q, grid)?);
    }
    Ok(DsfTable::from_raw(fields.to_vec(), grid.omega.clone(), raw))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeffs(a: Vec<f64>, b: Vec<f64>) -> LanczosCoefficients {
        let n = a.len();
        LanczosCoefficients { a, b, weight: 1.0, termination_index: n, final_b2: 0.0 }
    }

    #[test]
    fn depth_one_is_a_simple_pole() {
        let c = coeffs(vec![0.7], vec![0.0]);
        let z = C64::new(0.3, 0.1);
        let g = continued_fraction(&c, z).unwrap();
        assert!((g - (z - 0.7).inv()).norm() < 1e-15);
    }

    #[test]
    fn semicircle_fixed_point() {
        let n = 4000;
        let c = coeffs(vec![0.0; n], std::iter::once(0.0).chain(std::iter::repeat(1.0)).take(n).collect());
        for z in [C64::new(0.5, 0.5), C64::new(-1.2, 0.3), C64::new(3.0, 0.2)] {
            let g = continued_fraction(&c, z).unwrap();
            // Branch with Im g < 0 for Im z > 0.
            let mut want = (z - (z * z - 4.0).sqrt()) / 2.0;
            if want.im > 0.0 {
                want = (z + (z * z - 4.0).sqrt()) / 2.0;
            }
            assert!((g - want).norm() < 1e-6, "{z} {g} {want}");
        }
    }

    #[test]
    fn continued_fraction_matches_tridiagonal_resolvent() {
        let c = LanczosCoefficients {
            a: vec![0.3, -1.2, 0.8, 2.0, -0.4],
            b: vec![0.0, 0.9, 0.4, 1.3, 0.2],
            weight: 1.7,
            termination_index: 5,
            final_b2: 0.0,
        };
        for w in [-3.0, -0.5, 0.0, 1.1, 2.5] {
            let z = C64::new(w, 0.05);
            let d = continued_fraction(&c, z).unwrap() - tridiagonal_resolvent(&c, z).unwrap();
            assert!(d.norm() < 1e-10);
        }
    }

    #[test]
    fn exact_pole_is_reported() {
        let c = coeffs(vec![0.5], vec![0.0]);
        assert!(matches!(continued_fraction(&c, C64::new(0.5, 0.0)), Err(Error::Pole(_))));
        assert!(continued_fraction(&c, C64::new(0.4, 0.0)).is_ok());
    }

    #[test]
    fn dsf_normalization_and_ridge() {
        let t = DsfTable::from_raw(vec![0.0, 0.1], vec![-1.0, 0.0, 1.0], vec![vec![-0.1, -2.0, -0.5], vec![-0.2, -0.3, -4.0]]);
        assert_eq!(t.ridge(), vec![1, 2]);
        assert!((t.intensity[1][2] - 1.0).abs() < 1e-15);
        assert!(t.intensity[0][0].abs() < 1e-15);
        assert!(structure_factor_seeds(8, [0.1, 0.0]).is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(FrequencyGrid::linspace(-1.0, 1.0, 0, 0.1).is_err());
        assert!(FrequencyGrid::linspace(-1.0, 1.0, 3, 0.0).is_err());
        let g = FrequencyGrid::linspace(-1.0, 1.0, 3, 0.1).unwrap().with_shift(2.0);
        let z: Vec<C64> = g.points().collect();
        assert_eq!(z[0], C64::new(1.0, 0.1));
    }
}
