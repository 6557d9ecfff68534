// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use kitaev_qse::greens::{dynamical_structure_factor, DsfSetup, GreensSolver, KrylovBasisConfig};
use kitaev_qse::lattice::{build_lattice, HoneycombLattice};
use kitaev_qse::optim::BfgsOptions;
use kitaev_qse::oracle::{diagonalize, emit_fixtures, exact_dynamical_structure_factor, exact_resolvent_gf};
use kitaev_qse::qse::{
    basis_size, default_delta_t, run_qse, AssemblyMode, QseGroundState, SubspaceBasis,
};
use kitaev_qse::vqe::{sector_scan, VqeOptions};
use kitaev_qse::{EvolutionMode, EvolutionOperator, PauliSum, StateVector, VqeResult};
use serde::{Deserialize, Serialize};

use crate::config::{AssemblyName, RunConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Writes output files with a `#` metadata header.
pub struct Emitter {
    dir: PathBuf,
    header: String,
}

impl Emitter {
    pub fn new(cfg: &RunConfig, command: &str) -> Result<Self> {
        fs::create_dir_all(&cfg.output).with_context(|| format!("creating {}", cfg.output.display()))?;
        let mut header = String::new();
        writeln!(header, "# kitaev-qse {VERSION}")?;
        writeln!(header, "# command: {command}")?;
        writeln!(header, "# seed: {}", cfg.vqe.seed)?;
        writeln!(header, "# config: {}", serde_json::to_string(cfg)?)?;
        Ok(Self { dir: cfg.output.clone(), header })
    }

    pub fn csv(&self, name: &str, body: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, format!("{}{}", self.header, body)).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    pub fn json<T: Serialize>(&self, name: &str, cfg: &RunConfig, payload: &T) -> Result<PathBuf> {
        let doc = serde_json::json!({
            "meta": { "version": VERSION, "seed": cfg.vqe.seed, "config": cfg },
            "data": payload,
        });
        let path = self.dir.join(name);
        fs::write(&path, serde_json::to_string_pretty(&doc)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Envelope<T> {
    data: T,
}

fn read_envelope<T: for<'de> Deserialize<'de>>(path: &Path, what: &str) -> Result<T> {
    if !path.exists() {
        bail!("missing {what} {}; run the upstream stage first", path.display());
    }
    let text = fs::read_to_string(path)?;
    let env: Envelope<T> = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(env.data)
}

fn lattice(cfg: &RunConfig) -> Result<HoneycombLattice> {
    Ok(build_lattice(cfg.lattice.rows, cfg.lattice.cols)?)
}

fn field_hamiltonian(cfg: &RunConfig, lat: &HoneycombLattice) -> Result<PauliSum> {
    Ok(lat.isotropic_hamiltonian(cfg.coupling, cfg.field_z)?)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6e}")).unwrap_or_default()
}

pub fn cmd_vqe(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let out = Emitter::new(cfg, "vqe")?;
    let lat = lattice(cfg)?;
    let h0 = lat.isotropic_hamiltonian(cfg.coupling, 0.0)?;
    let ed = diagonalize(&h0)?;
    let opts = VqeOptions {
        epochs: cfg.vqe.epochs,
        learning_rate: cfg.vqe.learning_rate,
        seed: cfg.vqe.seed,
        polish: (cfg.vqe.polish_iterations > 0)
            .then_some(BfgsOptions { max_iterations: cfg.vqe.polish_iterations, gradient_tolerance: 1e-12 }),
        tolerance: 1e-8,
    };
    let mut files = Vec::new();
    let mut csv = String::from("d,plaquette,loop_x,loop_y,energy,delta_E,infidelity\n");
    let mut best: Option<VqeResult> = None;
    for &d in &cfg.vqe.layers {
        let scan = sector_scan(&lat, &h0, d, &opts, Some(&ed))?;
        let mut r = scan.best;
        r.attach_oracle(&scan.state, &ed)?;
        let s = r.sector.expect("scan labels sectors");
        writeln!(
            csv,
            "{d},{},{},{},{:.12},{},{}",
            s.plaquette,
            s.loop_x,
            s.loop_y,
            r.final_energy,
            fmt_opt(r.energy_distance),
            fmt_opt(r.infidelity)
        )?;
        files.push(out.json(&format!("vqe_params_d{d}.json"), cfg, &r)?);
        if best.as_ref().map_or(true, |b| r.final_energy < b.final_energy - 1e-12) {
            best = Some(r);
        }
    }
    files.push(out.csv("vqe_sweep.csv", &csv)?);
    files.push(out.json("vqe_reference.json", cfg, &best.expect("non-empty sweep"))?);
    Ok(files)
}

fn load_reference(cfg: &RunConfig, lat: &HoneycombLattice) -> Result<StateVector> {
    let r: VqeResult = read_envelope(&cfg.reference_path(), "reference file")?;
    Ok(r.reference_state(lat)?)
}

fn assembly(cfg: &RunConfig, h: &PauliSum) -> Result<AssemblyMode> {
    Ok(match (cfg.qse.assembly, cfg.qse.tau) {
        (AssemblyName::Exact, _) => AssemblyMode::Exact,
        (AssemblyName::Hoa, Some(tau)) => AssemblyMode::Hoa { tau },
        (AssemblyName::Hoa, None) => AssemblyMode::default_hoa(h)?,
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct QseArtifact {
    n_k: usize,
    n_l: usize,
    mode: EvolutionMode,
    delta_t: f64,
    energy: f64,
    exact_energy: f64,
    delta_e: f64,
    kept: usize,
    coefficients: Vec<[f64; 2]>,
}

fn ground_state(cfg: &RunConfig, h: &PauliSum, reference: &StateVector, mode: EvolutionMode, n_k: usize, n_l: usize)
    -> Result<(SubspaceBasis, QseGroundState)>
{
    let ev = EvolutionOperator::from_mode(h, mode)?;
    let dt = match cfg.qse.delta_t {
        Some(dt) => dt,
        None => default_delta_t(h)?,
    };
    let (basis, _, gs) = run_qse(reference, h, &ev, n_k, n_l, dt, assembly(cfg, h)?)?;
    Ok((basis, gs))
}

pub fn cmd_qse(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let lat = lattice(cfg)?;
    let reference = load_reference(cfg, &lat)?;
    let out = Emitter::new(cfg, "qse")?;
    let h = field_hamiltonian(cfg, &lat)?;
    let ed = diagonalize(&h)?;
    let e0 = ed.ground_energy();
    let exact = ed.evolution(&h);
    let dt = match cfg.qse.delta_t {
        Some(dt) => dt,
        None => default_delta_t(&h)?,
    };
    let asm = assembly(cfg, &h)?;

    let mut grid = String::from("n_l,n_k,n_phi,energy,delta_E\n");
    for n_l in 0..=cfg.qse.grid_max {
        for n_k in 0..=cfg.qse.grid_max {
            let (_, _, gs) = run_qse(&reference, &h, &exact, n_k, n_l, dt, asm)?;
            writeln!(grid, "{n_l},{n_k},{},{:.12},{:.6e}", basis_size(n_k, n_l), gs.energy, (gs.energy - e0).abs())?;
        }
    }
    let mut trot = String::from("r,n_l,n_k,energy,delta_E\n");
    for &r in &cfg.qse.trotter_steps {
        let ev = EvolutionOperator::trotter2(&h, r)?;
        let (_, _, gs) = run_qse(&reference, &h, &ev, cfg.qse.n_k, cfg.qse.n_l, dt, asm)?;
        writeln!(trot, "{r},{},{},{:.12},{:.6e}", cfg.qse.n_l, cfg.qse.n_k, gs.energy, (gs.energy - e0).abs())?;
    }
    let (_, gs) = ground_state(cfg, &h, &reference, cfg.qse_mode(), cfg.qse.n_k, cfg.qse.n_l)?;
    let artifact = QseArtifact {
        n_k: cfg.qse.n_k,
        n_l: cfg.qse.n_l,
        mode: cfg.qse_mode(),
        delta_t: dt,
        energy: gs.energy,
        exact_energy: e0,
        delta_e: (gs.energy - e0).abs(),
        kept: gs.report.kept,
        coefficients: gs.coefficients.iter().map(|c| [c.re, c.im]).collect(),
    };
    Ok(vec![
        out.csv("qse_basis_grid.csv", &grid)?,
        out.csv("qse_trotter.csv", &trot)?,
        out.json("qse_ground_state.json", cfg, &artifact)?,
    ])
}

fn require_qse_artifact(cfg: &RunConfig) -> Result<()> {
    let _: QseArtifact = read_envelope(&cfg.output.join("qse_ground_state.json"), "QSE ground-state artifact")?;
    Ok(())
}

fn krylov(cfg: &RunConfig) -> KrylovBasisConfig {
    KrylovBasisConfig {
        n_k: cfg.greens.n_k,
        n_l: cfg.greens.n_l,
        evolution: cfg.greens_mode(),
        ..KrylovBasisConfig::default()
    }
}

pub fn cmd_greens(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let lat = lattice(cfg)?;
    require_qse_artifact(cfg)?;
    let reference = load_reference(cfg, &lat)?;
    let out = Emitter::new(cfg, "greens")?;
    let h = field_hamiltonian(cfg, &lat)?;
    let (basis, gs) = ground_state(cfg, &h, &reference, cfg.greens_mode(), cfg.qse.n_k, cfg.qse.n_l)?;
    let solver = GreensSolver::new(&h, basis, gs, krylov(cfg))?;
    let ed = diagonalize(&h)?;
    let ed_gs = ed.matched_ground_state(&reference)?;
    let grid = cfg.greens_grid()?;
    let mut files = Vec::new();
    for mu in cfg.mus()? {
        for [a, b] in &cfg.greens.site_pairs {
            let q = solver.retarded_gf(*a, *b, mu, &grid)?;
            let e = exact_resolvent_gf(&ed, &ed_gs, *a, *b, mu, &grid)?;
            let (sq, se) = (q.spectral_function(), e.spectral_function());
            let mut csv = String::from("omega,re_G_qse,im_G_qse,A_qse,re_G_ed,im_G_ed,A_ed\n");
            for i in 0..grid.len() {
                writeln!(
                    csv,
                    "{:.6},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e}",
                    grid.omega[i], q.values[i].re, q.values[i].im, sq[i], e.values[i].re, e.values[i].im, se[i]
                )?;
            }
            files.push(out.csv(&format!("gf_{a}_{b}_{}.csv", mu.symbol()), &csv)?);
        }
    }
    Ok(files)
}

pub fn cmd_dsf(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let lat = lattice(cfg)?;
    require_qse_artifact(cfg)?;
    let reference = load_reference(cfg, &lat)?;
    let out = Emitter::new(cfg, "dsf")?;
    let grid = cfg.dsf_grid()?;
    let fields = cfg.dsf.fields.values();
    let setup = DsfSetup {
        lattice: lat.clone(),
        coupling: cfg.coupling,
        reference: reference.clone(),
        n_k: cfg.qse.n_k,
        n_l: cfg.qse.n_l,
        evolution: cfg.greens_mode(),
        krylov: krylov(cfg),
    };
    let q = dynamical_structure_factor(&setup, cfg.dsf.q, &grid, &fields)?;
    let e = exact_dynamical_structure_factor(&lat, cfg.coupling, &reference, cfg.dsf.q, &grid, &fields)?;
    Ok(vec![out.csv("dsf_qse.csv", &q.to_csv())?, out.csv("dsf_ed.csv", &e.to_csv())?])
}

pub fn cmd_ed_reference(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let out = Emitter::new(cfg, "ed-reference")?;
    let (r, c) = (cfg.lattice.rows, cfg.lattice.cols);
    let mut instances = vec![(r, c, cfg.coupling, 0.0)];
    if cfg.field_z != 0.0 {
        instances.push((r, c, cfg.coupling, cfg.field_z));
    }
    let doc: serde_json::Value = serde_json::from_str(&emit_fixtures(&instances)?)?;
    Ok(vec![out.json("ed_reference.json", cfg, &doc)?])
}

pub fn cmd_all(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let mut files = cmd_ed_reference(cfg)?;
    files.extend(cmd_vqe(cfg)?);
    files.extend(cmd_qse(cfg)?);
    files.extend(cmd_greens(cfg)?);
    files.extend(cmd_dsf(cfg)?);
    Ok(files)
}
