// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use kitaev_qse::greens::FrequencyGrid;
use kitaev_qse::{EvolutionMode, Pauli};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeConfig {
    pub rows: usize,
    pub cols: usize,
    /// Optional cross-check against `2 * rows * cols`.
    pub sites: Option<usize>,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self { rows: 2, cols: 2, sites: None }
    }
}

impl LatticeConfig {
    pub fn num_sites(&self) -> usize {
        2 * self.rows * self.cols
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VqeConfig {
    /// Ansatz depths to train. The lowest-energy run becomes the reference.
    pub layers: Vec<usize>,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub polish_iterations: usize,
}

impl Default for VqeConfig {
    fn default() -> Self {
        Self { layers: vec![0, 1, 2, 3, 4], epochs: 500, learning_rate: 0.01, seed: 7, polish_iterations: 300 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    Exact,
    Trotter2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssemblyName {
    Exact,
    Hoa,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QseConfig {
    pub n_k: usize,
    pub n_l: usize,
    pub mode: ModeName,
    pub steps: usize,
    pub assembly: AssemblyName,
    /// HOA finite-difference step; `0.1/κ` when absent.
    pub tau: Option<f64>,
    /// Time step; `2π/κ` when absent.
    pub delta_t: Option<f64>,
    /// Exact-evolution table over `n_l, n_k ∈ 0..=grid_max`.
    pub grid_max: usize,
    /// Trotter sweep at `(n_l, n_k)`.
    pub trotter_steps: Vec<usize>,
    /// Reference state file; `<out>/vqe_reference.json` when absent.
    pub reference: Option<PathBuf>,
}

impl Default for QseConfig {
    fn default() -> Self {
        Self {
            n_k: 3,
            n_l: 3,
            mode: ModeName::Exact,
            steps: 5,
            assembly: AssemblyName::Exact,
            tau: None,
            delta_t: None,
            grid_max: 5,
            trotter_steps: (1..=10).collect(),
            reference: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl GridConfig {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points).map(|i| self.min + step * i as f64).collect()
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { min: -10.0, max: 10.0, points: 2001 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GreensConfig {
    pub n_k: usize,
    pub n_l: usize,
    pub mode: ModeName,
    pub steps: usize,
    pub delta: f64,
    pub omega: GridConfig,
    pub site_pairs: Vec<[usize; 2]>,
    pub mu: Vec<String>,
}

impl Default for GreensConfig {
    fn default() -> Self {
        Self {
            n_k: 3,
            n_l: 3,
            mode: ModeName::Exact,
            steps: 5,
            delta: 0.1,
            omega: GridConfig::default(),
            site_pairs: vec![[0, 1]],
            mu: vec!["Z".into()],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DsfConfig {
    pub fields: GridConfig,
    pub omega: GridConfig,
    pub q: [f64; 2],
}

impl Default for DsfConfig {
    fn default() -> Self {
        Self {
            fields: GridConfig { min: 0.0, max: 1.0, points: 11 },
            omega: GridConfig { min: -10.0, max: 10.0, points: 201 },
            q: [0.0, 0.0],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub lattice: LatticeConfig,
    pub coupling: f64,
    pub field_z: f64,
    pub vqe: VqeConfig,
    pub qse: QseConfig,
    pub greens: GreensConfig,
    pub dsf: DsfConfig,
    pub output: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            lattice: LatticeConfig::default(),
            coupling: -1.0,
            field_z: 0.1,
            vqe: VqeConfig::default(),
            qse: QseConfig::default(),
            greens: GreensConfig::default(),
            dsf: DsfConfig::default(),
            output: PathBuf::from("out"),
        }
    }
}

fn mode(name: ModeName, steps: usize) -> EvolutionMode {
    match name {
        ModeName::Exact => EvolutionMode::Exact,
        ModeName::Trotter2 => EvolutionMode::Trotter2 { steps },
    }
}

pub fn parse_mu(s: &str) -> Result<Pauli> {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if matches!(c.to_ascii_uppercase(), 'X' | 'Y' | 'Z') => {
            Ok(Pauli::try_from(c.to_ascii_uppercase())?)
        }
        _ => bail!("greens.mu: `{s}` is not one of X, Y, Z"),
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let cfg: RunConfig =
            serde_json::from_str(&text).with_context(|| format!("{}: invalid config", path.display()))?;
        Ok(cfg)
    }

    pub fn qse_mode(&self) -> EvolutionMode {
        mode(self.qse.mode, self.qse.steps)
    }

    pub fn greens_mode(&self) -> EvolutionMode {
        mode(self.greens.mode, self.greens.steps)
    }

    pub fn mus(&self) -> Result<Vec<Pauli>> {
        self.greens.mu.iter().map(|m| parse_mu(m)).collect()
    }

    pub fn greens_grid(&self) -> Result<FrequencyGrid> {
        Ok(FrequencyGrid::new(self.greens.omega.values(), self.greens.delta)?)
    }

    pub fn dsf_grid(&self) -> Result<FrequencyGrid> {
        Ok(FrequencyGrid::new(self.dsf.omega.values(), self.greens.delta)?)
    }

    pub fn reference_path(&self) -> PathBuf {
        self.qse.reference.clone().unwrap_or_else(|| self.output.join("vqe_reference.json"))
    }

    pub fn validate(&self) -> Result<()> {
        let l = &self.lattice;
        if let Some(n) = l.sites {
            if n % 2 == 1 {
                bail!("lattice.sites: {n} is odd; a honeycomb torus has an even number of sites");
            }
            if n != l.num_sites() {
                bail!("lattice.sites: {n} does not match 2 * rows * cols = {}", l.num_sites());
            }
        }
        if l.rows < 2 || l.cols < 2 {
            bail!("lattice: rows and cols must both be at least 2 (got {} x {})", l.rows, l.cols);
        }
        if l.num_sites() > 24 {
            bail!("lattice: {} sites exceed the statevector limit", l.num_sites());
        }
        if !self.coupling.is_finite() || !self.field_z.is_finite() {
            bail!("coupling and field_z must be finite");
        }
        if self.vqe.layers.is_empty() {
            bail!("vqe.layers: empty");
        }
        if self.qse.mode == ModeName::Trotter2 && self.qse.steps == 0 {
            bail!("qse.steps: must be positive for trotter2");
        }
        if self.qse.trotter_steps.iter().any(|&r| r == 0) {
            bail!("qse.trotter_steps: entries must be positive");
        }
        if let Some(t) = self.qse.tau {
            if !(t > 0.0) {
                bail!("qse.tau: must be positive");
            }
        }
        if let Some(dt) = self.qse.delta_t {
            if !(dt > 0.0) {
                bail!("qse.delta_t: must be positive");
            }
        }
        if self.greens.mode == ModeName::Trotter2 && self.greens.steps == 0 {
            bail!("greens.steps: must be positive for trotter2");
        }
        if !(self.greens.delta > 0.0) {
            bail!("greens.delta: must be positive");
        }
        if self.greens.mu.is_empty() {
            bail!("greens.mu: empty operator set");
        }
        self.mus()?;
        if self.greens.site_pairs.is_empty() {
            bail!("greens.site_pairs: empty");
        }
        let n = l.num_sites();
        for (i, [a, b]) in self.greens.site_pairs.iter().enumerate() {
            if *a >= n || *b >= n {
                bail!("greens.site_pairs[{i}]: ({a}, {b}) out of range for {n} sites");
            }
        }
        for (name, g) in [("greens.omega", &self.greens.omega), ("dsf.omega", &self.dsf.omega), ("dsf.fields", &self.dsf.fields)]
        {
            if g.points == 0 {
                bail!("{name}.points: grid is empty");
            }
            if !(g.max >= g.min) {
                bail!("{name}: max < min");
            }
        }
        if self.dsf.q != [0.0, 0.0] {
            bail!("dsf.q: only q = (0, 0) is supported");
        }
        Ok(())
    }
}
