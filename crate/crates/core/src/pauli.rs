// SPDX-License-Identifier: Apache-2.0

//! Pauli-string algebra.
//!
//! A Pauli string on `N` sites is stored in symplectic form as two bit masks:
//! bit `i` of `x` is set for `X` or `Y` on site `i`, bit `i` of `z` for `Z` or
//! `Y`. Site `i` maps to bit `i` of a computational-basis index, so the dense
//! matrix of `P_0 P_1 ... P_{N-1}` is the Kronecker product
//! `P_{N-1} ⊗ ... ⊗ P_0`.
//!
//! Acting on a basis state, `P|b⟩ = i^{n_y} (-1)^{|b ∧ z|} |b ⊕ x⟩` where
//! `n_y` counts the `Y` factors (`Y = iXZ`).
//!
//! The textual form used in config files is `coeff * X1 Y3 Z4` with 1-based
//! site labels; a bare identity is written `coeff * I`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register converted to a dense matrix.
pub const DENSE_CAP: usize = 14;

/// Largest register representable by the bit-mask encoding.
pub const MAX_SITES: usize = 63;

/// Coefficients below this magnitude are dropped when merging.
pub const PRUNE_TOL: f64 = 1e-14;

const I_POW: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

/// `i^k` for any integer `k`.
#[inline]
pub fn i_pow(k: u32) -> Complex64 {
    I_POW[(k & 3) as usize]
}

/// Single-site Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

impl TryFrom<char> for Pauli {
    type Error = Error;

    fn try_from(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(Error::Parse(format!("unknown Pauli symbol '{other}'"))),
        }
    }
}

/// Phase-free Pauli string over a fixed register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    num_sites: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(num_sites: usize) -> Self {
        assert!(num_sites <= MAX_SITES, "register too large for bit masks");
        Self { num_sites, x: 0, z: 0 }
    }

    /// Builds a string from `(site, axis)` pairs; later pairs on the same site
    /// overwrite earlier ones.
    pub fn from_sparse(num_sites: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        if num_sites > MAX_SITES {
            return Err(Error::TooManySites { num_sites, cap: MAX_SITES });
        }
        let mut s = Self::identity(num_sites);
        for &(site, p) in ops {
            if site >= num_sites {
                return Err(Error::InvalidArgument(format!(
                    "site {site} outside register of {num_sites}"
                )));
            }
            s.set(site, p);
        }
        Ok(s)
    }

    pub fn from_axes(axes: &[Pauli]) -> Result<Self> {
        let ops: Vec<_> = axes.iter().copied().enumerate().collect();
        Self::from_sparse(axes.len(), &ops)
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn get(&self, site: usize) -> Pauli {
        Pauli::from_bits(self.x >> site & 1 == 1, self.z >> site & 1 == 1)
    }

    pub fn set(&mut self, site: usize, p: Pauli) {
        let (bx, bz) = p.bits();
        let m = 1u64 << site;
        self.x = if bx { self.x | m } else { self.x & !m };
        self.z = if bz { self.z | m } else { self.z & !m };
    }

    pub fn axes(&self) -> Vec<Pauli> {
        (0..self.num_sites).map(|i| self.get(i)).collect()
    }

    /// Sites carrying a non-identity factor.
    pub fn support(&self) -> Vec<usize> {
        (0..self.num_sites)
            .filter(|&i| (self.x | self.z) >> i & 1 == 1)
            .collect()
    }

    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    /// Number of `Y` factors.
    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Amplitude factor in `P|b⟩ = phase(b) |b ⊕ x⟩`.
    #[inline]
    pub fn phase_on(&self, basis: usize) -> Complex64 {
        let sign = ((basis as u64) & self.z).count_ones();
        i_pow(self.y_count() + 2 * sign)
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Product `self · other` as `(i^k, string)`.
    pub fn mul(&self, other: &Self) -> (Complex64, PauliString) {
        // P = i^{y} X^x Z^z. Moving Z^{z1} past X^{x2} costs (-1)^{|z1 ∧ x2|}.
        let y1 = self.y_count();
        let y2 = other.y_count();
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let y3 = (x & z).count_ones();
        let swap = (self.z & other.x).count_ones();
        let k = (y1 + y2 + 2 * swap + 4 * 64 - y3) & 3;
        (
            i_pow(k),
            PauliString { num_sites: self.num_sites, x, z },
        )
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let support = self.support();
        if support.is_empty() {
            return write!(f, "I");
        }
        let mut first = true;
        for i in support {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{}{}", self.get(i).symbol(), i + 1)?;
        }
        Ok(())
    }
}

/// Coefficient-weighted Pauli string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTerm {
    pub coefficient: Complex64,
    pub string: PauliString,
}

impl PauliTerm {
    pub fn new(coefficient: impl Into<Complex64>, string: PauliString) -> Self {
        Self { coefficient: coefficient.into(), string }
    }

    /// Unit-coefficient term from `(site, axis)` pairs.
    pub fn unit(num_sites: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        Ok(Self::new(1.0, PauliString::from_sparse(num_sites, ops)?))
    }

    pub fn num_sites(&self) -> usize {
        self.string.num_sites()
    }

    pub fn axes(&self) -> Vec<Pauli> {
        self.string.axes()
    }

    pub fn scaled(&self, factor: impl Into<Complex64>) -> Self {
        Self::new(self.coefficient * factor.into(), self.string)
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.coefficient.conj(), self.string)
    }

    /// Exact operator product with accumulated phase.
    pub fn multiply(&self, other: &PauliTerm) -> Result<PauliTerm> {
        check_sizes(self.num_sites(), other.num_sites())?;
        let (phase, string) = self.string.mul(&other.string);
        Ok(PauliTerm::new(self.coefficient * other.coefficient * phase, string))
    }

    pub fn commutes(&self, other: &PauliTerm) -> Result<bool> {
        check_sizes(self.num_sites(), other.num_sites())?;
        Ok(self.string.commutes_with(&other.string))
    }

    pub fn to_matrix(&self) -> Result<Mat<Complex64>> {
        PauliSum::from_terms(self.num_sites(), [*self])?.to_matrix()
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} * {}", format_coefficient(self.coefficient), self.string)
    }
}

fn format_coefficient(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else {
        format!("({}{:+}i)", c.re, c.im)
    }
}

fn check_sizes(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::SizeMismatch { left, right });
    }
    Ok(())
}

/// Parses one term such as `-1 * X1 X2`, `0.5*Z3`, `(0.5-2i) * Y1` or `2 * I`.
pub fn parse_term(text: &str, num_sites: usize) -> Result<PauliTerm> {
    let (coeff_text, ops_text) = match text.split_once('*') {
        Some((c, o)) => (c.trim(), o.trim()),
        None => ("1", text.trim()),
    };
    let coefficient = parse_coefficient(coeff_text)?;
    let mut ops = Vec::new();
    for token in ops_text.split_whitespace() {
        let mut chars = token.chars();
        let symbol = chars
            .next()
            .ok_or_else(|| Error::Parse("empty Pauli token".into()))?;
        let pauli = Pauli::try_from(symbol)?;
        let rest = chars.as_str();
        if pauli == Pauli::I && rest.is_empty() {
            continue;
        }
        let site: usize = rest
            .parse()
            .map_err(|_| Error::Parse(format!("bad site label in '{token}'")))?;
        if site == 0 {
            return Err(Error::Parse(format!("site labels are 1-based: '{token}'")));
        }
        ops.push((site - 1, pauli));
    }
    let mut seen = 0u64;
    for &(site, _) in &ops {
        if site < 64 && seen >> site & 1 == 1 {
            return Err(Error::Parse(format!("site {} repeated in '{text}'", site + 1)));
        }
        if site < 64 {
            seen |= 1 << site;
        }
    }
    Ok(PauliTerm::new(coefficient, PauliString::from_sparse(num_sites, &ops)?))
}

fn parse_coefficient(text: &str) -> Result<Complex64> {
    let t = text.trim().trim_start_matches('(').trim_end_matches(')');
    if let Ok(v) = t.parse::<f64>() {
        return Ok(Complex64::new(v, 0.0));
    }
    Complex64::from_str(t).map_err(|_| Error::Parse(format!("bad coefficient '{text}'")))
}

/// Sum of Pauli terms in canonical merged form: no two terms share a string,
/// and coefficients below [`PRUNE_TOL`] are removed. First-insertion order is
/// preserved.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    num_sites: usize,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn new(num_sites: usize) -> Self {
        Self { num_sites, terms: Vec::new() }
    }

    pub fn from_terms(
        num_sites: usize,
        terms: impl IntoIterator<Item = PauliTerm>,
    ) -> Result<Self> {
        let mut raw = Vec::new();
        for t in terms {
            check_sizes(num_sites, t.num_sites())?;
            raw.push(t);
        }
        Ok(Self { num_sites, terms: merge(raw) })
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, term: PauliTerm) -> Result<()> {
        check_sizes(self.num_sites, term.num_sites())?;
        let mut raw = std::mem::take(&mut self.terms);
        raw.push(term);
        self.terms = merge(raw);
        Ok(())
    }

    pub fn scaled(&self, factor: impl Into<Complex64>) -> Self {
        let f = factor.into();
        Self {
            num_sites: self.num_sites,
            terms: merge(self.terms.iter().map(|t| t.scaled(f)).collect()),
        }
    }

    pub fn add(&self, other: &PauliSum) -> Result<Self> {
        check_sizes(self.num_sites, other.num_sites)?;
        Self::from_terms(
            self.num_sites,
            self.terms.iter().chain(other.terms.iter()).copied(),
        )
    }

    /// Largest |Im c| over the terms. Every Pauli string is self-adjoint, so the
    /// sum is Hermitian iff all coefficients are real.
    pub fn max_imaginary(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coefficient.im.abs())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self) -> bool {
        self.max_imaginary() <= 1e-12
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        if self.is_hermitian() {
            Ok(())
        } else {
            Err(Error::NotHermitian(self.max_imaginary()))
        }
    }

    /// True when every coefficient is real and every string has an even
    /// number of `Y` factors, i.e. the dense matrix is real.
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|t| {
            let ph = t.coefficient * i_pow(t.string.y_count());
            ph.im == 0.0
        })
    }

    /// Dense matrix `Σ c_k P_k` for registers up to [`DENSE_CAP`] sites.
    pub fn to_matrix(&self) -> Result<Mat<Complex64>> {
        self.to_matrix_with_cap(DENSE_CAP)
    }

    pub fn to_matrix_with_cap(&self, cap: usize) -> Result<Mat<Complex64>> {
        if self.num_sites > cap {
            return Err(Error::TooManySites { num_sites: self.num_sites, cap });
        }
        let dim = 1usize << self.num_sites;
        let mut m = Mat::<Complex64>::zeros(dim, dim);
        for t in &self.terms {
            let x = t.string.x_mask() as usize;
            for b in 0..dim {
                m[(b ^ x, b)] += t.coefficient * t.string.phase_on(b);
            }
        }
        Ok(m)
    }

    /// Real dense matrix; fails if the sum has complex matrix elements.
    pub fn to_real_matrix(&self) -> Result<Mat<f64>> {
        if !self.is_real() {
            return Err(Error::InvalidArgument("operator has complex matrix elements".into()));
        }
        if self.num_sites > DENSE_CAP {
            return Err(Error::TooManySites { num_sites: self.num_sites, cap: DENSE_CAP });
        }
        let dim = 1usize << self.num_sites;
        let mut m = Mat::<f64>::zeros(dim, dim);
        for t in &self.terms {
            let x = t.string.x_mask() as usize;
            for b in 0..dim {
                m[(b ^ x, b)] += (t.coefficient * t.string.phase_on(b)).re;
            }
        }
        Ok(m)
    }

    /// Spectral-width estimate `κ = 2 Σ |c_k|`.
    ///
    /// Each Pauli string has spectrum `{±1}`, so `‖H‖ ≤ Σ |c_k|` and the full
    /// width `λ_max − λ_min` is bounded by twice that.
    pub fn gershgorin_kappa(&self) -> Result<f64> {
        if self.terms.is_empty() {
            return Err(Error::EmptyHamiltonian);
        }
        Ok(2.0 * self.terms.iter().map(|t| t.coefficient.norm()).sum::<f64>())
    }

    /// Applies the sum to `input`, accumulating into `out` (overwritten).
    pub fn apply_into(&self, input: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(input.len(), 1 << self.num_sites);
        out.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for t in &self.terms {
            let x = t.string.x_mask() as usize;
            let z = t.string.z_mask();
            let base = t.coefficient * i_pow(t.string.y_count());
            for (b, &a) in input.iter().enumerate() {
                let c = if ((b as u64) & z).count_ones() & 1 == 1 { -base } else { base };
                out[b ^ x] += c * a;
            }
        }
    }

    /// One term per line in the textual format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for t in &self.terms {
            s.push_str(&t.to_string());
            s.push('\n');
        }
        s
    }

    /// Parses one term per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str, num_sites: usize) -> Result<Self> {
        let mut terms = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let t = parse_term(line, num_sites)
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            terms.push(t);
        }
        Self::from_terms(num_sites, terms)
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

fn merge(raw: Vec<PauliTerm>) -> Vec<PauliTerm> {
    let mut index: HashMap<PauliString, usize> = HashMap::new();
    let mut out: Vec<PauliTerm> = Vec::with_capacity(raw.len());
    for t in raw {
        match index.get(&t.string) {
            Some(&i) => out[i].coefficient += t.coefficient,
            None => {
                index.insert(t.string, out.len());
                out.push(t);
            }
        }
    }
    out.retain(|t| t.coefficient.norm() >= PRUNE_TOL);
    out
}

/// Free-function form of [`PauliTerm::multiply`].
pub fn multiply(a: &PauliTerm, b: &PauliTerm) -> Result<PauliTerm> {
    a.multiply(b)
}

/// Free-function form of [`PauliTerm::commutes`].
pub fn commutes(a: &PauliTerm, b: &PauliTerm) -> Result<bool> {
    a.commutes(b)
}
