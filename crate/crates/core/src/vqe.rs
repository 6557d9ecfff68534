// SPDX-License-Identifier: Apache-2.0

//! Symmetry-sector reference states and the bond-rotation ansatz.
//!
//! Every ansatz generator is a bond operator `σ^α_i σ^α_j`, which commutes
//! with all plaquette and loop operators, so training never leaves the sector
//! the initial state was prepared in.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{BondKind, HoneycombLattice, StabilizerGroup};
use crate::linalg::C64;
use crate::optim::{bfgs_minimize, Adam, BfgsOptions};
use crate::oracle::SpectralDecomposition;
use crate::pauli::{PauliString, PauliSum};
use crate::simulator::StateVector;

/// `d` layers of one rotation per bond, X-bonds then Y-bonds then Z-bonds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnsatzCircuit {
    pub num_sites: usize,
    pub layers: usize,
    pub bond_schedule: Vec<(BondKind, (usize, usize))>,
}

impl AnsatzCircuit {
    pub fn new(lat: &HoneycombLattice, layers: usize) -> Self {
        Self { num_sites: lat.num_sites, layers, bond_schedule: lat.all_bonds() }
    }

    pub fn num_parameters(&self) -> usize {
        self.layers * self.bond_schedule.len()
    }

    /// Generator string of parameter `k`.
    pub fn generator(&self, k: usize) -> PauliString {
        let (kind, (i, j)) = self.bond_schedule[k % self.bond_schedule.len()];
        let p = kind.pauli();
        PauliString::from_sparse(self.num_sites, &[(i, p), (j, p)]).expect("bond inside register")
    }

    pub fn generators(&self) -> Vec<PauliString> {
        (0..self.bond_schedule.len()).map(|k| self.generator(k)).collect()
    }

    fn check(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.num_parameters() {
            return Err(Error::SizeMismatch { left: self.num_parameters(), right: params.len() });
        }
        Ok(())
    }

    /// `U(θ)|init⟩` with `U(θ) = Π_k exp(−iθ_k P_k / 2)`, first parameter
    /// applied first.
    pub fn prepare(&self, init: &StateVector, params: &[f64]) -> Result<StateVector> {
        self.check(params)?;
        let gens = self.generators();
        let mut psi = init.clone();
        for (k, &t) in params.iter().enumerate() {
            psi.apply_pauli_rotation(&gens[k % gens.len()], t)?;
        }
        Ok(psi)
    }

    pub fn energy(&self, h: &PauliSum, init: &StateVector, params: &[f64]) -> Result<f64> {
        self.prepare(init, params)?.expectation(h)
    }

    /// Energy and its gradient by one forward and one backward sweep.
    pub fn energy_and_gradient(&self, h: &PauliSum, init: &StateVector, params: &[f64]) -> Result<(f64, Vec<f64>)> {
        let gens = self.generators();
        let mut phi = self.prepare(init, params)?;
        let mut lam = phi.apply_pauli_sum(h)?;
        let energy = phi.overlap(&lam)?.re;
        let mut grad = vec![0.0; params.len()];
        for k in (0..params.len()).rev() {
            let p = &gens[k % gens.len()];
            let x = p.x_mask() as usize;
            let (l, f) = (lam.amplitudes(), phi.amplitudes());
            let m: C64 = (0..f.len()).map(|b| l[b ^ x].conj() * p.phase_on(b) * f[b]).sum();
            grad[k] = m.im;
            phi.apply_pauli_rotation(p, -params[k])?;
            lam.apply_pauli_rotation(p, -params[k])?;
        }
        if !energy.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite("VQE loss or gradient".into()));
        }
        Ok((energy, grad))
    }
}

/// Eigenstate of every generator in `group` with the requested signs.
///
/// Applies `Π_g (1 + t_g g)/2` to computational basis states in order until
/// one survives.
pub fn prepare_sector_state(group: &StabilizerGroup, num_sites: usize) -> Result<StateVector> {
    if !group.is_consistent() {
        return Err(Error::InconsistentSector);
    }
    let dim = 1usize << num_sites;
    'basis: for b in 0..dim {
        let mut psi = StateVector::basis_state(num_sites, b)?;
        for (g, &t) in group.generators.iter().zip(&group.target_eigenvalues) {
            let gp = psi.apply_pauli_term(g)?;
            psi.scale(C64::new(0.5, 0.0));
            psi.add_scaled(C64::new(0.5 * t as f64, 0.0), &gp)?;
            if psi.norm() < 1e-8 {
                continue 'basis;
            }
            psi.normalize()?;
        }
        return Ok(psi);
    }
    Err(Error::InconsistentSector)
}

/// `⟨g⟩` for every generator.
pub fn sector_expectations(state: &StateVector, group: &StabilizerGroup) -> Result<Vec<f64>> {
    group
        .generators
        .iter()
        .map(|g| Ok(state.pauli_expectation(&g.string)? * g.coefficient.re))
        .collect()
}

/// Weight of `state` in the (possibly degenerate) exact ground space.
pub fn ground_state_fidelity(state: &StateVector, oracle: &SpectralDecomposition) -> Result<f64> {
    Ok(oracle.ground_space_weight(state)?.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectorLabel {
    pub plaquette: i8,
    pub loop_x: i8,
    pub loop_y: i8,
}

impl SectorLabel {
    pub fn all() -> Vec<SectorLabel> {
        let mut out = Vec::new();
        for plaquette in [1, -1] {
            for loop_x in [1, -1] {
                for loop_y in [1, -1] {
                    out.push(SectorLabel { plaquette, loop_x, loop_y });
                }
            }
        }
        out
    }

    pub fn group(&self, lat: &HoneycombLattice) -> Result<StabilizerGroup> {
        StabilizerGroup::uniform(lat, self.plaquette, self.loop_x, self.loop_y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VqeOptions {
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    /// Quasi-Newton refinement after the Adam epochs.
    pub polish: Option<BfgsOptions>,
    /// Convergence criterion on `E_θ − E_exact` when a target is known.
    pub tolerance: f64,
}

impl Default for VqeOptions {
    fn default() -> Self {
        Self {
            epochs: 500,
            learning_rate: 0.01,
            seed: 7,
            polish: Some(BfgsOptions { max_iterations: 300, gradient_tolerance: 1e-12 }),
            tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqeResult {
    pub layers: usize,
    pub sector: Option<SectorLabel>,
    pub optimal_parameters: Vec<f64>,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub exact_energy: Option<f64>,
    pub energy_distance: Option<f64>,
    pub infidelity: Option<f64>,
    /// Best energy reached after each epoch, then after the polish.
    pub training_history: Vec<f64>,
    pub polish_iterations: usize,
    pub converged: bool,
}

impl VqeResult {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Rebuilds `U(θ*)|ψ₀⟩` on `lat`.
    pub fn reference_state(&self, lat: &HoneycombLattice) -> Result<StateVector> {
        let sector = self
            .sector
            .ok_or_else(|| Error::InvalidArgument("result carries no sector label".into()))?;
        let init = prepare_sector_state(&sector.group(lat)?, lat.num_sites)?;
        AnsatzCircuit::new(lat, self.layers).prepare(&init, &self.optimal_parameters)
    }

    /// Fills the oracle comparison fields.
    pub fn attach_oracle(&mut self, state: &StateVector, oracle: &SpectralDecomposition) -> Result<()> {
        let e0 = oracle.ground_energy();
        self.exact_energy = Some(e0);
        self.energy_distance = Some((self.final_energy - e0).abs());
        self.infidelity = Some(1.0 - ground_state_fidelity(state, oracle)?);
        Ok(())
    }
}

/// Trains `ansatz` on `h0` from `init`. `target` is the exact energy when
/// known and only decides the `converged` flag.
pub fn train(
    h0: &PauliSum,
    ansatz: &AnsatzCircuit,
    init: &StateVector,
    options: &VqeOptions,
    target: Option<f64>,
) -> Result<VqeResult> {
    let initial_energy = init.expectation(h0)?;
    let n = ansatz.num_parameters();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut params: Vec<f64> = (0..n).map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)).collect();
    let mut history = Vec::with_capacity(options.epochs + 1);
    let mut best = (f64::INFINITY, params.clone());
    let mut polish_iterations = 0;
    if n > 0 {
        let mut adam = Adam::new(n, options.learning_rate);
        for _ in 0..options.epochs {
            let (e, g) = ansatz.energy_and_gradient(h0, init, &params)?;
            if e < best.0 {
                best = (e, params.clone());
            }
            history.push(best.0);
            adam.step(&mut params, &g);
        }
        let (e, _) = ansatz.energy_and_gradient(h0, init, &params)?;
        if e < best.0 {
            best = (e, params.clone());
        }
        if let Some(opts) = options.polish {
            let out = bfgs_minimize(|x| ansatz.energy_and_gradient(h0, init, x), &best.1, opts)?;
            polish_iterations = out.iterations;
            if out.value < best.0 {
                best = (out.value, out.x);
            }
            history.push(best.0);
        }
    } else {
        best.0 = initial_energy;
        history.push(initial_energy);
    }
    let converged = match target {
        Some(e0) => best.0 - e0 <= options.tolerance,
        None => true,
    };
    Ok(VqeResult {
        layers: ansatz.layers,
        sector: None,
        optimal_parameters: best.1,
        initial_energy,
        final_energy: best.0,
        exact_energy: target,
        energy_distance: target.map(|e0| (best.0 - e0).abs()),
        infidelity: None,
        training_history: history,
        polish_iterations,
        converged,
    })
}

#[derive(Debug, Clone)]
pub struct SectorScan {
    pub best: VqeResult,
    pub state: StateVector,
    pub runs: Vec<VqeResult>,
}

/// Trains in every consistent uniform-plaquette sector (both plaquette signs,
/// four loop-sign combinations) and keeps the lowest energy.
pub fn sector_scan(
    lat: &HoneycombLattice,
    h0: &PauliSum,
    layers: usize,
    options: &VqeOptions,
    oracle: Option<&SpectralDecomposition>,
) -> Result<SectorScan> {
    let ansatz = AnsatzCircuit::new(lat, layers);
    let target = oracle.map(|o| o.ground_energy());
    let mut runs = Vec::new();
    let mut best: Option<(VqeResult, StateVector)> = None;
    for (i, sector) in SectorLabel::all().into_iter().enumerate() {
        let init = match prepare_sector_state(&sector.group(lat)?, lat.num_sites) {
            Ok(s) => s,
            Err(Error::InconsistentSector) => continue,
            Err(e) => return Err(e),
        };
        let opts = VqeOptions { seed: options.seed.wrapping_add(i as u64), ..*options };
        let mut run = train(h0, &ansatz, &init, &opts, target)?;
        run.sector = Some(sector);
        let state = ansatz.prepare(&init, &run.optimal_parameters)?;
        if let Some(o) = oracle {
            run.infidelity = Some(1.0 - ground_state_fidelity(&state, o)?);
        }
        if best.as_ref().map_or(true, |(b, _)| run.final_energy < b.final_energy) {
            best = Some((run.clone(), state));
        }
        runs.push(run);
    }
    let (best, state) = best.ok_or(Error::InconsistentSector)?;
    Ok(SectorScan { best, state, runs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_lattice;

    #[test]
    fn generators_centralize_the_stabilizers() {
        let lat = build_lattice(3, 2).unwrap();
        let group = StabilizerGroup::uniform(&lat, 1, 1, 1).unwrap();
        let ansatz = AnsatzCircuit::new(&lat, 2);
        assert_eq!(ansatz.num_parameters(), 2 * 18);
        for g in ansatz.generators() {
            for s in &group.generators {
                assert!(g.commutes_with(&s.string));
            }
        }
    }

    #[test]
    fn sector_state_has_requested_signs() {
        let lat = build_lattice(2, 2).unwrap();
        for sector in SectorLabel::all() {
            let group = sector.group(&lat).unwrap();
            let psi = prepare_sector_state(&group, 8).unwrap();
            assert!((psi.norm() - 1.0).abs() < 1e-12);
            for (v, t) in sector_expectations(&psi, &group).unwrap().iter().zip(&group.target_eigenvalues) {
                assert!((v - *t as f64).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn inconsistent_sector_is_rejected() {
        let lat = build_lattice(2, 2).unwrap();
        let group = StabilizerGroup::new(&lat, &[-1, 1, 1, 1], [1, 1]).unwrap();
        assert!(matches!(prepare_sector_state(&group, 8), Err(Error::InconsistentSector)));
    }

    #[test]
    fn adjoint_gradient_matches_finite_differences() {
        let lat = build_lattice(2, 2).unwrap();
        let h = lat.isotropic_hamiltonian(-1.0, 0.0).unwrap();
        let init = prepare_sector_state(&SectorLabel { plaquette: 1, loop_x: 1, loop_y: 1 }.group(&lat).unwrap(), 8).unwrap();
        let ansatz = AnsatzCircuit::new(&lat, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let theta: Vec<f64> = (0..ansatz.num_parameters()).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let (_, g) = ansatz.energy_and_gradient(&h, &init, &theta).unwrap();
        let step = 1e-5;
        for k in 0..theta.len() {
            let mut tp = theta.clone();
            tp[k] += step;
            let mut tm = theta.clone();
            tm[k] -= step;
            let fd = (ansatz.energy(&h, &init, &tp).unwrap() - ansatz.energy(&h, &init, &tm).unwrap()) / (2.0 * step);
            assert!((fd - g[k]).abs() <= 1e-6 * g[k].abs().max(1.0), "{k}: {fd} vs {}", g[k]);
        }
    }

    #[test]
    fn zero_layers_keep_the_sector_energy() {
        let lat = build_lattice(2, 2).unwrap();
        let h = lat.isotropic_hamiltonian(-1.0, 0.0).unwrap();
        let init = prepare_sector_state(&SectorLabel { plaquette: -1, loop_x: 1, loop_y: 1 }.group(&lat).unwrap(), 8).unwrap();
        let r = train(&h, &AnsatzCircuit::new(&lat, 0), &init, &VqeOptions::default(), None).unwrap();
        assert!(r.optimal_parameters.is_empty());
        assert!((r.final_energy - init.expectation(&h).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn json_round_trip() {
        let r = VqeResult {
            layers: 1,
            sector: Some(SectorLabel { plaquette: -1, loop_x: 1, loop_y: -1 }),
            optimal_parameters: vec![0.1, -0.2],
            initial_energy: -4.0,
            final_energy: -6.9,
            exact_energy: Some(-6.92),
            energy_distance: Some(0.02),
            infidelity: None,
            training_history: vec![-5.0, -6.9],
            polish_iterations: 3,
            converged: false,
        };
        assert_eq!(VqeResult::from_json(&r.to_json().unwrap()).unwrap(), r);
    }
}
