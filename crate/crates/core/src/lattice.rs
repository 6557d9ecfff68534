// SPDX-License-Identifier: Apache-2.0

//! Honeycomb lattice on a torus, its stabilizers, and the Kitaev Hamiltonian.
//!
//! The lattice is a `rows × cols` array of two-site unit cells with lattice
//! vectors `a1` (along a row) and `a2` (to the next row). Site
//! `2·(r·cols + c) + s` is sublattice `s` (0 = A, 1 = B) of cell `(r, c)`.
//! Each A site has three neighbours:
//!
//! * `B(r, c)` through a z-bond,
//! * `B(r, c − 1)` through an x-bond,
//! * `B(r − 1, c)` through a y-bond,
//!
//! all indices periodic. Positions use unit bond length with
//! `a1 = (√3, 0)`, `a2 = (√3/2, 3/2)` and the B site offset by
//! `(√3/2, 1/2)` from its A partner.
//!
//! Plaquette `(r, c)` visits `A(r,c), B(r−1,c), A(r−1,c+1), B(r−1,c+1),
//! A(r,c+1), B(r,c)` counter-clockwise. The plaquette operator is the product
//! of the outward-bond Pauli at each corner, which comes out as
//! `X Z Y X Z Y` along that order and equals the ordered product of the
//! six bond operators `(YY)(XX)(ZZ)(YY)(XX)(ZZ)` exactly.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum, PauliTerm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BondKind {
    X,
    Y,
    Z,
}

impl BondKind {
    pub fn pauli(self) -> Pauli {
        match self {
            BondKind::X => Pauli::X,
            BondKind::Y => Pauli::Y,
            BondKind::Z => Pauli::Z,
        }
    }

    fn third(a: BondKind, b: BondKind) -> Option<BondKind> {
        [BondKind::X, BondKind::Y, BondKind::Z]
            .into_iter()
            .find(|&k| k != a && k != b && a != b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoneycombLattice {
    pub rows: usize,
    pub cols: usize,
    pub num_sites: usize,
    pub bonds_x: Vec<(usize, usize)>,
    pub bonds_y: Vec<(usize, usize)>,
    pub bonds_z: Vec<(usize, usize)>,
    /// Six-site loops in counter-clockwise order.
    pub plaquettes: Vec<Vec<usize>>,
    /// Closed path winding along `a1`.
    pub loop_x: Vec<usize>,
    /// Closed path winding along `a2`.
    pub loop_y: Vec<usize>,
    pub positions: Vec<[f64; 2]>,
}

fn site_index(rows: usize, cols: usize, r: isize, c: isize, sub: usize) -> usize {
    let r = r.rem_euclid(rows as isize) as usize;
    let c = c.rem_euclid(cols as isize) as usize;
    2 * (r * cols + c) + sub
}

/// Builds the `rows × cols` honeycomb torus (`N = 2·rows·cols`).
///
/// Wraps that would connect the same pair of sites by two bonds (any
/// dimension equal to 1) are rejected.
pub fn build_lattice(rows: usize, cols: usize) -> Result<HoneycombLattice> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidLattice("rows and cols must be >= 1".into()));
    }
    let n = 2 * rows * cols;
    if n > crate::pauli::MAX_SITES {
        return Err(Error::TooManySites { num_sites: n, cap: crate::pauli::MAX_SITES });
    }
    let idx = |r: usize, c: usize, s: usize, dr: isize, dc: isize| {
        site_index(rows, cols, r as isize + dr, c as isize + dc, s)
    };
    let (mut bx, mut by, mut bz) = (Vec::new(), Vec::new(), Vec::new());
    let mut plaquettes = Vec::new();
    let mut positions = vec![[0.0; 2]; n];
    let s3 = 3f64.sqrt();
    for r in 0..rows {
        for c in 0..cols {
            let a = idx(r, c, 0, 0, 0);
            let b = idx(r, c, 1, 0, 0);
            bz.push((a, b));
            bx.push((b, idx(r, c, 0, 0, 1)));
            by.push((b, idx(r, c, 0, 1, 0)));
            plaquettes.push(vec![
                a,
                idx(r, c, 1, -1, 0),
                idx(r, c, 0, -1, 1),
                idx(r, c, 1, -1, 1),
                idx(r, c, 0, 0, 1),
                b,
            ]);
            let (x, y) = (c as f64 * s3 + r as f64 * s3 / 2.0, r as f64 * 1.5);
            positions[a] = [x, y];
            positions[b] = [x + s3 / 2.0, y + 0.5];
        }
    }
    let mut seen = HashMap::new();
    for &(i, j) in bx.iter().chain(&by).chain(&bz) {
        let key = (i.min(j), i.max(j));
        if i == j || seen.insert(key, ()).is_some() {
            return Err(Error::InvalidLattice(format!(
                "{rows}x{cols} torus wraps onto a duplicate bond between sites {} and {}",
                key.0 + 1,
                key.1 + 1
            )));
        }
    }
    let loop_x = (0..cols).flat_map(|c| [idx(0, c, 0, 0, 0), idx(0, c, 1, 0, 0)]).collect();
    let loop_y = (0..rows).flat_map(|r| [idx(r, 0, 0, 0, 0), idx(r, 0, 1, 0, 0)]).collect();
    Ok(HoneycombLattice {
        rows,
        cols,
        num_sites: n,
        bonds_x: bx,
        bonds_y: by,
        bonds_z: bz,
        plaquettes,
        loop_x,
        loop_y,
        positions,
    })
}

impl HoneycombLattice {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        build_lattice(rows, cols)
    }

    pub fn bonds(&self, kind: BondKind) -> &[(usize, usize)] {
        match kind {
            BondKind::X => &self.bonds_x,
            BondKind::Y => &self.bonds_y,
            BondKind::Z => &self.bonds_z,
        }
    }

    /// All bonds tagged with their kind, in `x, y, z` order.
    pub fn all_bonds(&self) -> Vec<(BondKind, (usize, usize))> {
        [BondKind::X, BondKind::Y, BondKind::Z]
            .into_iter()
            .flat_map(|k| self.bonds(k).iter().map(move |&b| (k, b)))
            .collect()
    }

    pub fn bond_kind(&self, i: usize, j: usize) -> Option<BondKind> {
        self.all_bonds()
            .into_iter()
            .find(|&(_, (a, b))| (a, b) == (i, j) || (a, b) == (j, i))
            .map(|(k, _)| k)
    }

    /// Bond operator `σ^α_i σ^α_j` with unit coefficient.
    pub fn bond_operator(&self, kind: BondKind, (i, j): (usize, usize)) -> PauliTerm {
        let p = kind.pauli();
        PauliTerm::new(
            1.0,
            PauliString::from_sparse(self.num_sites, &[(i, p), (j, p)]).expect("bond inside lattice"),
        )
    }

    // Product of outward-bond Paulis around a closed path.
    fn loop_string(&self, cycle: &[usize]) -> Result<PauliTerm> {
        let len = cycle.len();
        let mut ops = Vec::with_capacity(len);
        for k in 0..len {
            let prev = cycle[(k + len - 1) % len];
            let here = cycle[k];
            let next = cycle[(k + 1) % len];
            let a = self.bond_kind(prev, here);
            let b = self.bond_kind(here, next);
            let outward = match (a, b) {
                (Some(a), Some(b)) => BondKind::third(a, b),
                _ => None,
            }
            .ok_or_else(|| Error::InvalidLattice(format!("path {cycle:?} is not a bond loop")))?;
            ops.push((here, outward.pauli()));
        }
        Ok(PauliTerm::new(1.0, PauliString::from_sparse(self.num_sites, &ops)?))
    }

    /// Product of bond operators along a closed path, in path order.
    pub fn bond_product(&self, cycle: &[usize]) -> Result<PauliTerm> {
        let len = cycle.len();
        let mut acc = PauliTerm::new(1.0, PauliString::identity(self.num_sites));
        for k in 0..len {
            let (i, j) = (cycle[k], cycle[(k + 1) % len]);
            let kind = self
                .bond_kind(i, j)
                .ok_or_else(|| Error::InvalidLattice(format!("{i}-{j} is not a bond")))?;
            acc = acc.multiply(&self.bond_operator(kind, (i, j)))?;
        }
        Ok(acc)
    }

    /// One `ŵ_p` per hexagon.
    pub fn plaquette_operators(&self) -> Vec<PauliTerm> {
        self.plaquettes
            .iter()
            .map(|p| self.loop_string(p).expect("plaquettes are bond loops"))
            .collect()
    }

    /// `(l̂_x, l̂_y)`.
    pub fn loop_operators(&self) -> (PauliTerm, PauliTerm) {
        (
            self.loop_string(&self.loop_x).expect("loop_x is a bond loop"),
            self.loop_string(&self.loop_y).expect("loop_y is a bond loop"),
        )
    }

    /// `Ĥ₀ + Ĥ_magn` with couplings `J = (J^x, J^y, J^z)` and per-site fields
    /// `h_i = (h^x, h^y, h^z)`. An empty `field` slice means zero field.
    pub fn kitaev_hamiltonian(&self, couplings: [f64; 3], field: &[[f64; 3]]) -> Result<PauliSum> {
        if !field.is_empty() && field.len() != self.num_sites {
            return Err(Error::SizeMismatch { left: self.num_sites, right: field.len() });
        }
        let mut terms = Vec::new();
        for (k, kind) in [BondKind::X, BondKind::Y, BondKind::Z].into_iter().enumerate() {
            for &b in self.bonds(kind) {
                terms.push(self.bond_operator(kind, b).scaled(couplings[k]));
            }
        }
        for (i, h) in field.iter().enumerate() {
            for (k, p) in [Pauli::X, Pauli::Y, Pauli::Z].into_iter().enumerate() {
                if h[k] != 0.0 {
                    terms.push(PauliTerm::new(h[k], PauliString::from_sparse(self.num_sites, &[(i, p)])?));
                }
            }
        }
        PauliSum::from_terms(self.num_sites, terms)
    }

    /// Isotropic couplings `J^α = J` with a uniform field along z.
    pub fn isotropic_hamiltonian(&self, coupling: f64, field_z: f64) -> Result<PauliSum> {
        let field = if field_z == 0.0 {
            Vec::new()
        } else {
            vec![[0.0, 0.0, field_z]; self.num_sites]
        };
        self.kitaev_hamiltonian([coupling; 3], &field)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Free-function form of [`HoneycombLattice::kitaev_hamiltonian`].
pub fn kitaev_hamiltonian(
    lat: &HoneycombLattice,
    couplings: [f64; 3],
    field: &[[f64; 3]],
) -> Result<PauliSum> {
    lat.kitaev_hamiltonian(couplings, field)
}

pub fn plaquette_operators(lat: &HoneycombLattice) -> Vec<PauliTerm> {
    lat.plaquette_operators()
}

pub fn loop_operators(lat: &HoneycombLattice) -> (PauliTerm, PauliTerm) {
    lat.loop_operators()
}

/// Commuting generators `{ŵ_p} ∪ {l̂_x, l̂_y}` with the ±1 eigenvalues that
/// select a symmetry sector.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilizerGroup {
    pub generators: Vec<PauliTerm>,
    pub target_eigenvalues: Vec<i8>,
}

impl StabilizerGroup {
    /// Plaquettes first (lattice order), then `l̂_x`, `l̂_y`.
    pub fn new(lat: &HoneycombLattice, plaquette_targets: &[i8], loop_targets: [i8; 2]) -> Result<Self> {
        if plaquette_targets.len() != lat.plaquettes.len() {
            return Err(Error::InvalidArgument(format!(
                "{} plaquette targets for {} plaquettes",
                plaquette_targets.len(),
                lat.plaquettes.len()
            )));
        }
        let mut target_eigenvalues: Vec<i8> = plaquette_targets.to_vec();
        target_eigenvalues.extend(loop_targets);
        if target_eigenvalues.iter().any(|&t| t != 1 && t != -1) {
            return Err(Error::InvalidArgument("stabilizer targets must be ±1".into()));
        }
        let mut generators = lat.plaquette_operators();
        let (lx, ly) = lat.loop_operators();
        generators.push(lx);
        generators.push(ly);
        Ok(Self { generators, target_eigenvalues })
    }

    /// Same sign on every plaquette.
    pub fn uniform(lat: &HoneycombLattice, plaquette: i8, loop_x: i8, loop_y: i8) -> Result<Self> {
        Self::new(lat, &vec![plaquette; lat.plaquettes.len()], [loop_x, loop_y])
    }

    pub fn num_plaquettes(&self) -> usize {
        self.generators.len() - 2
    }

    /// Every generator pair commutes.
    pub fn is_abelian(&self) -> bool {
        self.generators.iter().enumerate().all(|(i, a)| {
            self.generators[i + 1..]
                .iter()
                .all(|b| a.string.commutes_with(&b.string))
        })
    }

    /// Product of all plaquette operators, including its phase.
    pub fn plaquette_product(&self) -> PauliTerm {
        let plaquettes = &self.generators[..self.num_plaquettes()];
        let mut acc = PauliTerm::new(1.0, PauliString::identity(plaquettes[0].num_sites()));
        for p in plaquettes {
            acc = acc.multiply(p).expect("same register");
        }
        acc
    }

    /// Checks the one global relation among plaquettes: when their product is
    /// `±1`, the product of the targets must match the sign.
    pub fn is_consistent(&self) -> bool {
        let prod = self.plaquette_product();
        if !prod.string.is_identity() {
            return true;
        }
        let sign: i8 = self.target_eigenvalues[..self.num_plaquettes()].iter().product();
        (prod.coefficient.re - sign as f64).abs() < 1e-12
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_of_shipped_instances() {
        let l8 = build_lattice(2, 2).unwrap();
        assert_eq!(l8.num_sites, 8);
        assert_eq!((l8.bonds_x.len(), l8.bonds_y.len(), l8.bonds_z.len()), (4, 4, 4));
        assert_eq!(l8.plaquettes.len(), 4);
        let l12 = build_lattice(3, 2).unwrap();
        assert_eq!(l12.num_sites, 12);
        assert_eq!(l12.plaquettes.len(), 6);
    }

    #[test]
    fn degenerate_wraps_are_rejected() {
        assert!(matches!(build_lattice(1, 1), Err(Error::InvalidLattice(_))));
        assert!(matches!(build_lattice(1, 3), Err(Error::InvalidLattice(_))));
        assert!(matches!(build_lattice(3, 1), Err(Error::InvalidLattice(_))));
        assert!(matches!(build_lattice(0, 2), Err(Error::InvalidLattice(_))));
    }

    #[test]
    fn bond_coloring_is_a_partition() {
        for (r, c) in [(2, 2), (3, 2), (2, 3), (3, 3)] {
            let lat = build_lattice(r, c).unwrap();
            for kind in [BondKind::X, BondKind::Y, BondKind::Z] {
                let mut count = vec![0; lat.num_sites];
                for &(i, j) in lat.bonds(kind) {
                    count[i] += 1;
                    count[j] += 1;
                }
                assert!(count.iter().all(|&k| k == 1), "{r}x{c} {kind:?}");
            }
        }
    }

    #[test]
    fn bond_lengths_are_unit() {
        let lat = build_lattice(3, 3).unwrap();
        // Interior bonds (no wrap) have unit length in the embedding.
        let mut unit = 0;
        for (_, (i, j)) in lat.all_bonds() {
            let (a, b) = (lat.positions[i], lat.positions[j]);
            let d = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
            if (d - 1.0).abs() < 1e-12 {
                unit += 1;
            }
        }
        assert!(unit >= lat.num_sites);
    }

    #[test]
    fn plaquette_pattern_and_orientation() {
        let lat = build_lattice(3, 3).unwrap();
        for (p, w) in lat.plaquettes.iter().zip(lat.plaquette_operators()) {
            let pattern: String = p.iter().map(|&s| w.string.get(s).symbol()).collect();
            assert_eq!(pattern, "XZYXZY");
            assert_eq!(w.string.weight(), 6);
            // Bond product equals the operator exactly.
            let prod = lat.bond_product(p).unwrap();
            assert_eq!(prod.string, w.string);
            assert!((prod.coefficient.re - 1.0).abs() < 1e-15 && prod.coefficient.im == 0.0);
            // Counter-clockwise: positive signed area (interior plaquette only).
            let pts: Vec<[f64; 2]> = p.iter().map(|&s| lat.positions[s]).collect();
            let area: f64 = (0..6)
                .map(|k| {
                    let (a, b) = (pts[k], pts[(k + 1) % 6]);
                    a[0] * b[1] - b[0] * a[1]
                })
                .sum();
            let span = pts.iter().map(|q| q[0]).fold(f64::MIN, f64::max)
                - pts.iter().map(|q| q[0]).fold(f64::MAX, f64::min);
            if span < 2.0 {
                assert!(area > 0.0);
            }
        }
    }

    #[test]
    fn loops_are_proportional_to_bond_products() {
        let lat = build_lattice(3, 2).unwrap();
        let (lx, ly) = lat.loop_operators();
        for (path, op) in [(&lat.loop_x, lx), (&lat.loop_y, ly)] {
            let prod = lat.bond_product(path).unwrap();
            assert_eq!(prod.string, op.string);
            assert!((prod.coefficient.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn hamiltonian_term_counts() {
        let lat = build_lattice(2, 2).unwrap();
        let h0 = lat.isotropic_hamiltonian(-1.0, 0.0).unwrap();
        assert_eq!(h0.len(), 12);
        assert!(h0.is_hermitian());
        let h = lat.isotropic_hamiltonian(-1.0, 0.1).unwrap();
        assert_eq!(h.len(), 20);
        let k = h.gershgorin_kappa().unwrap();
        assert!((k - 25.6).abs() < 1e-12);
        assert!((2.0 * std::f64::consts::PI / k - 0.2454369260617026).abs() < 1e-12);
        let full = lat
            .kitaev_hamiltonian([1.0, 0.5, -0.2], &vec![[0.1, 0.2, 0.3]; 8])
            .unwrap();
        assert_eq!(full.len(), 12 + 24);
        let empty = lat.kitaev_hamiltonian([0.0; 3], &[]).unwrap();
        assert!(empty.is_empty());
        assert!(empty.gershgorin_kappa().is_err());
        assert!(lat.kitaev_hamiltonian([1.0; 3], &[[0.0; 3]; 3]).is_err());
    }

    #[test]
    fn stabilizers_commute_with_every_bond() {
        for (r, c) in [(2, 2), (3, 2)] {
            let lat = build_lattice(r, c).unwrap();
            let group = StabilizerGroup::uniform(&lat, 1, 1, 1).unwrap();
            assert!(group.is_abelian());
            for g in &group.generators {
                let sq = g.multiply(g).unwrap();
                assert!(sq.string.is_identity() && (sq.coefficient.re - 1.0).abs() < 1e-15);
                for (kind, b) in lat.all_bonds() {
                    assert!(g.commutes(&lat.bond_operator(kind, b)).unwrap());
                }
            }
        }
    }

    #[test]
    fn plaquette_product_relation() {
        for (r, c) in [(2, 2), (3, 2), (3, 3)] {
            let lat = build_lattice(r, c).unwrap();
            let group = StabilizerGroup::uniform(&lat, 1, 1, 1).unwrap();
            let prod = group.plaquette_product();
            let (lx, ly) = lat.loop_operators();
            let lxy = lx.multiply(&ly).unwrap();
            let allowed = [PauliString::identity(lat.num_sites), lx.string, ly.string, lxy.string];
            assert!(allowed.contains(&prod.string));
            assert!((prod.coefficient.norm() - 1.0).abs() < 1e-15);
        }
        let lat = build_lattice(2, 2).unwrap();
        let mut targets = vec![1i8; 4];
        targets[0] = -1;
        let odd = StabilizerGroup::new(&lat, &targets, [1, 1]).unwrap();
        assert!(!odd.is_consistent());
        assert!(StabilizerGroup::uniform(&lat, -1, 1, 1).unwrap().is_consistent());
    }

    #[test]
    fn json_round_trip() {
        let lat = build_lattice(2, 2).unwrap();
        let back = HoneycombLattice::from_json(&lat.to_json().unwrap()).unwrap();
        assert_eq!(lat, back);
    }
}
