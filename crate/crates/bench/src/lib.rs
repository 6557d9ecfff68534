// SPDX-License-Identifier: Apache-2.0

//! Shared inputs for the criterion benches.

use kitaev_qse::lattice::build_lattice;
use kitaev_qse::{Complex64, PauliSum, StateVector};

/// Field Hamiltonian at `J = -1`, `h^z = 0.1` on a `rows x cols` torus.
pub fn hamiltonian(rows: usize, cols: usize) -> PauliSum {
    build_lattice(rows, cols).unwrap().isotropic_hamiltonian(-1.0, 0.1).unwrap()
}

/// Normalized dense state with a fixed, non-trivial amplitude pattern.
pub fn spread_state(num_sites: usize) -> StateVector {
    let amps = (0..1usize << num_sites)
        .map(|i| {
            let t = i as f64 * 0.618_033_988_75;
            Complex64::new(t.sin(), (1.7 * t).cos())
        })
        .collect();
    let mut s = StateVector::from_amplitudes(num_sites, amps).unwrap();
    s.normalize().unwrap();
    s
}
