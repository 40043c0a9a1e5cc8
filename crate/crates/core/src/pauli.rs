//! n-qubit Pauli strings, complex-weighted Pauli sums, and the one-qubit
//! ladder/projector operators used to assemble grid Hamiltonians.
//!
//! Tensor-factor ordering: symbol 0 of a string is the leftmost factor of
//! the `⊗` chain and acts on the most significant bit of a basis index.
//! For an `n`-qubit string, symbol `j` therefore owns bit `n - 1 - j`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{QnuteError, Result};
use crate::linalg::Matrix;
use crate::scalar::{c, cr, i_pow, Real, C};

/// Largest register for which dense `2^n × 2^n` matrices are built.
pub const DENSE_QUBIT_LIMIT: usize = 14;
/// Largest register a [`PauliString`] can describe.
pub const MAX_STRING_QUBITS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PauliSymbol {
    I,
    X,
    Y,
    Z,
}

impl PauliSymbol {
    pub const ALL: [PauliSymbol; 4] = [PauliSymbol::I, PauliSymbol::X, PauliSymbol::Y, PauliSymbol::Z];

    /// (x, z) bits of the symbol in the `X^x Z^z` representation.
    fn bits(self) -> (bool, bool) {
        match self {
            PauliSymbol::I => (false, false),
            PauliSymbol::X => (true, false),
            PauliSymbol::Y => (true, true),
            PauliSymbol::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliSymbol::I,
            (true, false) => PauliSymbol::X,
            (true, true) => PauliSymbol::Y,
            (false, true) => PauliSymbol::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            PauliSymbol::I => 'I',
            PauliSymbol::X => 'X',
            PauliSymbol::Y => 'Y',
            PauliSymbol::Z => 'Z',
        }
    }

    pub fn from_char(ch: char) -> Option<Self> {
        match ch {
            'I' => Some(PauliSymbol::I),
            'X' => Some(PauliSymbol::X),
            'Y' => Some(PauliSymbol::Y),
            'Z' => Some(PauliSymbol::Z),
            _ => None,
        }
    }
}

/// A tensor product of `n` single-qubit Pauli symbols, stored as x/z bit masks.
///
/// `Y` is both an x-bit and a z-bit; as an operator a string equals
/// `i^{|x ∧ z|} X^x Z^z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_STRING_QUBITS, "Pauli strings are limited to {MAX_STRING_QUBITS} qubits");
        Self { n, x: 0, z: 0 }
    }

    pub fn from_symbols(symbols: &[PauliSymbol]) -> Self {
        let n = symbols.len();
        let mut s = Self::identity(n);
        for (j, sym) in symbols.iter().enumerate() {
            s.set(j, *sym);
        }
        s
    }

    /// Builds a string from raw masks in basis-index bit order.
    pub fn from_masks(n: usize, x: u64, z: u64) -> Self {
        assert!(n <= MAX_STRING_QUBITS, "Pauli strings are limited to {MAX_STRING_QUBITS} qubits");
        let keep = mask_for(n);
        Self { n, x: x & keep, z: z & keep }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    #[inline]
    fn bit(&self, j: usize) -> u64 {
        1u64 << (self.n - 1 - j)
    }

    pub fn symbol(&self, j: usize) -> PauliSymbol {
        let b = self.bit(j);
        PauliSymbol::from_bits(self.x & b != 0, self.z & b != 0)
    }

    pub fn set(&mut self, j: usize, sym: PauliSymbol) {
        let b = self.bit(j);
        let (xb, zb) = sym.bits();
        self.x = if xb { self.x | b } else { self.x & !b };
        self.z = if zb { self.z | b } else { self.z & !b };
    }

    pub fn symbols(&self) -> Vec<PauliSymbol> {
        (0..self.n).map(|j| self.symbol(j)).collect()
    }

    /// Positions (symbol indices) carrying a non-identity symbol, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&j| self.symbol(j) != PauliSymbol::I).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn y_count(&self) -> usize {
        (self.x & self.z).count_ones() as usize
    }

    /// Lexicographic key over symbols with `I < X < Y < Z`.
    fn sort_key(&self) -> u128 {
        (0..self.n).fold(0u128, |acc, j| acc * 4 + self.symbol(j) as u128)
    }

    /// `P|k⟩ = phase · |k'⟩`; returns `(i`-exponent of the phase, `k')`.
    #[inline]
    pub fn act_on_basis(&self, k: usize) -> (u32, usize) {
        let sign = ((k as u64 & self.z).count_ones() & 1) * 2;
        ((self.x & self.z).count_ones() + sign, k ^ self.x as usize)
    }

    /// Writes `P|ψ⟩` into `out`. Panics if lengths differ from `2^n`.
    pub fn apply_into<T: Real>(&self, psi: &[C<T>], out: &mut [C<T>]) {
        assert_eq!(psi.len(), 1usize << self.n);
        assert_eq!(out.len(), psi.len());
        let base = (self.x & self.z).count_ones();
        let phases = [i_pow::<T>(base), i_pow::<T>(base + 2)];
        let x = self.x as usize;
        let z = self.z;
        for (k, amp) in psi.iter().enumerate() {
            let parity = ((k as u64 & z).count_ones() & 1) as usize;
            out[k ^ x] = phases[parity] * amp;
        }
    }

    pub fn apply<T: Real>(&self, psi: &[C<T>]) -> Vec<C<T>> {
        let mut out = vec![C::zero(); psi.len()];
        self.apply_into(psi, &mut out);
        out
    }

    /// Dense `2^n × 2^n` matrix of the string.
    pub fn dense_matrix<T: Real>(&self) -> Result<Matrix<C<T>>> {
        PauliSum::from_string(cr(T::one()), *self).dense_matrix()
    }

    /// Concatenation: `self ⊗ other`.
    pub fn tensor(&self, other: &PauliString) -> PauliString {
        let n = self.n + other.n;
        PauliString::from_masks(n, (self.x << other.n) | other.x, (self.z << other.n) | other.z)
    }
}

fn mask_for(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.n.cmp(&other.n).then_with(|| self.sort_key().cmp(&other.sort_key()))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.n {
            write!(f, "{}", self.symbol(j).as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = QnuteError;

    fn from_str(s: &str) -> Result<Self> {
        let symbols = s
            .trim()
            .chars()
            .map(|ch| PauliSymbol::from_char(ch).ok_or_else(|| QnuteError::Parse(format!("invalid Pauli symbol {ch:?} in {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if symbols.len() > MAX_STRING_QUBITS {
            return Err(QnuteError::Capacity { what: format!("Pauli string of length {}", symbols.len()), limit: MAX_STRING_QUBITS });
        }
        Ok(PauliString::from_symbols(&symbols))
    }
}

/// Exponent `k` such that `P·Q = i^k R`.
#[inline]
fn product_phase_exp(p: &PauliString, q: &PauliString) -> (u32, PauliString) {
    let x = p.x ^ q.x;
    let z = p.z ^ q.z;
    let k = (p.x & p.z).count_ones() + (q.x & q.z).count_ones() + 2 * (p.z & q.x).count_ones() + 4 * 64
        - (x & z).count_ones();
    (k % 4, PauliString { n: p.n, x, z })
}

/// `matrix(p) · matrix(q) = phase · matrix(r)` with `phase ∈ {±1, ±i}`.
pub fn multiply_strings<T: Real>(p: &PauliString, q: &PauliString) -> Result<(C<T>, PauliString)> {
    if p.n != q.n {
        return Err(QnuteError::Dimension(format!("cannot multiply {}-qubit and {}-qubit strings", p.n, q.n)));
    }
    let (k, r) = product_phase_exp(p, q);
    Ok((i_pow(k), r))
}

/// The four one-qubit matrices with a single unit entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LadderOp {
    /// `|0⟩⟨0| = (I + Z)/2`
    NW,
    /// `|1⟩⟨1| = (I − Z)/2`
    SE,
    /// `|0⟩⟨1| = (X + iY)/2`
    NE,
    /// `|1⟩⟨0| = (X − iY)/2`
    SW,
}

pub fn ladder_as_pauli<T: Real>(op: LadderOp) -> PauliSum<T> {
    let h = T::lit(0.5);
    let (a, b, bc) = match op {
        LadderOp::NW => (PauliSymbol::I, PauliSymbol::Z, c(h, T::zero())),
        LadderOp::SE => (PauliSymbol::I, PauliSymbol::Z, c(-h, T::zero())),
        LadderOp::NE => (PauliSymbol::X, PauliSymbol::Y, c(T::zero(), h)),
        LadderOp::SW => (PauliSymbol::X, PauliSymbol::Y, c(T::zero(), -h)),
    };
    PauliSum::from_terms(
        1,
        [(c(h, T::zero()), PauliString::from_symbols(&[a])), (bc, PauliString::from_symbols(&[b]))],
    )
    .expect("one-qubit ladder strings")
}

/// `op^{⊗n}`, e.g. `NW^{⊗n} = |0…0⟩⟨0…0|`.
pub fn ladder_power<T: Real>(op: LadderOp, n: usize) -> PauliSum<T> {
    let one = ladder_as_pauli::<T>(op);
    let mut acc = PauliSum::identity(0);
    for _ in 0..n {
        acc = acc.tensor(&one);
    }
    acc
}

/// A canonical complex-weighted sum of equal-length Pauli strings.
///
/// Terms are sorted by string, duplicates are merged, and coefficients
/// whose modulus is below [`Real::PRUNE`] are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum<T> {
    n: usize,
    terms: Vec<(C<T>, PauliString)>,
}

impl<T: Real> PauliSum<T> {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_string(cr(T::one()), PauliString::identity(n))
    }

    pub fn from_string(coef: C<T>, s: PauliString) -> Self {
        Self::canonical(s.num_qubits(), std::iter::once((coef, s)))
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (C<T>, PauliString)>) -> Result<Self> {
        let terms: Vec<_> = terms.into_iter().collect();
        if let Some((_, bad)) = terms.iter().find(|(_, s)| s.num_qubits() != n) {
            return Err(QnuteError::Dimension(format!(
                "string {bad} has {} qubits, expected {n}",
                bad.num_qubits()
            )));
        }
        Ok(Self::canonical(n, terms))
    }

    fn canonical(n: usize, terms: impl IntoIterator<Item = (C<T>, PauliString)>) -> Self {
        let mut acc: BTreeMap<PauliString, C<T>> = BTreeMap::new();
        for (coef, s) in terms {
            *acc.entry(s).or_insert_with(C::zero) += coef;
        }
        let terms = acc.into_iter().filter(|(_, coef)| coef.norm() >= T::PRUNE).map(|(s, coef)| (coef, s)).collect();
        Self { n, terms }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(C<T>, PauliString)] {
        &self.terms
    }

    pub fn coefficient(&self, s: &PauliString) -> C<T> {
        self.terms.binary_search_by(|(_, t)| t.cmp(s)).map(|i| self.terms[i].0).unwrap_or_else(|_| C::zero())
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(QnuteError::Dimension(format!("{}-qubit sum combined with {}-qubit sum", self.n, other.n)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self::canonical(self.n, self.terms.iter().chain(&other.terms).copied()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(cr(-T::one())))
    }

    pub fn scale(&self, k: C<T>) -> Self {
        Self::canonical(self.n, self.terms.iter().map(|&(coef, s)| (coef * k, s)))
    }

    pub fn scale_real(&self, k: T) -> Self {
        self.scale(cr(k))
    }

    /// Operator product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Vec::with_capacity(self.len() * other.len());
        for (a, p) in &self.terms {
            for (b, q) in &other.terms {
                let (k, r) = product_phase_exp(p, q);
                out.push((*a * *b * i_pow::<T>(k), r));
            }
        }
        Ok(Self::canonical(self.n, out))
    }

    /// `self ⊗ other`, with `self` on the left (more significant) factors.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.len() * other.len());
        for (a, p) in &self.terms {
            for (b, q) in &other.terms {
                out.push((*a * *b, p.tensor(q)));
            }
        }
        Self::canonical(self.n + other.n, out)
    }

    /// Formal adjoint: conjugates every coefficient.
    pub fn adjoint(&self) -> Self {
        Self { n: self.n, terms: self.terms.iter().map(|&(coef, s)| (coef.conj(), s)).collect() }
    }

    /// True when every coefficient is real within `tol`, i.e. the sum equals its adjoint.
    pub fn is_hermitian(&self, tol: T) -> bool {
        self.terms.iter().all(|(coef, _)| coef.im.abs() <= tol)
    }

    /// True when every coefficient and every string is real-valued as a matrix.
    pub fn is_real_matrix(&self, tol: T) -> bool {
        self.terms.iter().all(|(coef, s)| {
            if s.y_count() % 2 == 0 {
                coef.im.abs() <= tol
            } else {
                coef.re.abs() <= tol
            }
        })
    }

    /// Sorted union of the supports of all strings.
    pub fn support(&self) -> Vec<usize> {
        let mut mask = 0u64;
        for (_, s) in &self.terms {
            mask |= s.x | s.z;
        }
        (0..self.n).filter(|&j| mask & (1u64 << (self.n - 1 - j)) != 0).collect()
    }

    pub fn dense_matrix(&self) -> Result<Matrix<C<T>>> {
        if self.n > DENSE_QUBIT_LIMIT {
            return Err(QnuteError::Capacity { what: format!("dense matrix for {} qubits", self.n), limit: DENSE_QUBIT_LIMIT });
        }
        let dim = 1usize << self.n;
        let mut m = Matrix::zeros(dim, dim);
        for (coef, s) in &self.terms {
            for col in 0..dim {
                let (k, row) = s.act_on_basis(col);
                m[(row, col)] += *coef * i_pow::<T>(k);
            }
        }
        Ok(m)
    }

    /// `Σ_t c_t P_t |ψ⟩`. Panics if `psi.len() != 2^n`.
    pub fn apply(&self, psi: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(psi.len(), 1usize << self.n, "state length does not match the operator");
        let mut out = vec![C::zero(); psi.len()];
        for (coef, s) in &self.terms {
            let base = (s.x & s.z).count_ones();
            let phases = [*coef * i_pow::<T>(base), *coef * i_pow::<T>(base + 2)];
            let x = s.x as usize;
            for (k, amp) in psi.iter().enumerate() {
                let parity = ((k as u64 & s.z).count_ones() & 1) as usize;
                out[k ^ x] += phases[parity] * amp;
            }
        }
        out
    }

    /// Groups the sum by x-mask for repeated application.
    pub fn compile(&self) -> CompiledOperator<T> {
        let dim = 1usize << self.n;
        let mut groups: BTreeMap<u64, Vec<C<T>>> = BTreeMap::new();
        for (coef, s) in &self.terms {
            let diag = groups.entry(s.x).or_insert_with(|| vec![C::zero(); dim]);
            for (k, d) in diag.iter_mut().enumerate() {
                let (e, _) = s.act_on_basis(k);
                *d += *coef * i_pow::<T>(e);
            }
        }
        let groups = groups
            .into_iter()
            .filter(|(_, d)| d.iter().any(|z| z.norm() >= T::PRUNE))
            .map(|(x, d)| (x as usize, d))
            .collect();
        CompiledOperator { n: self.n, groups }
    }
}

/// Decomposes a `2^n × 2^n` matrix into Pauli strings.
///
/// Coefficients are normalized Hilbert-Schmidt products `Tr(P† M) / 2^n`,
/// evaluated for each x-mask with a Walsh-Hadamard transform over z-masks.
pub fn decompose_dense<T: Real>(m: &Matrix<C<T>>) -> Result<PauliSum<T>> {
    let dim = m.rows();
    if !m.is_square() || dim == 0 || !dim.is_power_of_two() {
        return Err(QnuteError::Dimension(format!("{}x{} is not a square power-of-two matrix", m.rows(), m.cols())));
    }
    let n = dim.trailing_zeros() as usize;
    if n > DENSE_QUBIT_LIMIT {
        return Err(QnuteError::Capacity { what: format!("dense decomposition for {n} qubits"), limit: DENSE_QUBIT_LIMIT });
    }
    let inv_dim = T::one() / T::from_usize(dim).unwrap();
    let mut terms = Vec::new();
    let mut f = vec![C::<T>::zero(); dim];
    for x in 0..dim {
        for (j, fj) in f.iter_mut().enumerate() {
            *fj = m[(j ^ x, j)];
        }
        walsh_hadamard(&mut f);
        for (z, &g) in f.iter().enumerate() {
            if g.norm() * inv_dim < T::PRUNE {
                continue;
            }
            let s = PauliString::from_masks(n, x as u64, z as u64);
            let phase = i_pow::<T>((x & z).count_ones()).conj();
            terms.push((phase * g * inv_dim, s));
        }
    }
    PauliSum::from_terms(n, terms)
}

fn walsh_hadamard<T: Real>(f: &mut [C<T>]) {
    let mut h = 1;
    while h < f.len() {
        for i in (0..f.len()).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (f[j], f[j + h]);
                f[j] = a + b;
                f[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// A Pauli sum regrouped as `Σ_x X^x · diag(d_x)` for fast repeated matvecs.
#[derive(Debug, Clone)]
pub struct CompiledOperator<T> {
    n: usize,
    groups: Vec<(usize, Vec<C<T>>)>,
}

impl<T: Real> CompiledOperator<T> {
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Panics if `psi.len() != 2^n`.
    pub fn apply(&self, psi: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(psi.len(), 1usize << self.n, "state length does not match the operator");
        let mut out = vec![C::zero(); psi.len()];
        for (x, diag) in &self.groups {
            for (k, (amp, d)) in psi.iter().zip(diag).enumerate() {
                out[k ^ x] += *d * amp;
            }
        }
        out
    }
}

fn fmt_complex<T: Real>(z: &C<T>) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("({}{}{}i)", z.re, sign, z.im.abs())
}

impl<T: Real> fmt::Display for PauliSum<T> {
    /// One term per line: `(re±imi) STRING`. The empty sum prints `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (coef, s)) in self.terms.iter().enumerate() {
            if idx > 0 {
                writeln!(f)?;
            }
            write!(f, "{} {}", fmt_complex(coef), s)?;
        }
        Ok(())
    }
}

impl<T: Real> PauliSum<T> {
    /// Parses the text format: one `coefficient STRING` term per line (or
    /// separated by `;`), where the coefficient is a real number or a
    /// parenthesized complex number such as `(0.5-0.25i)`.
    ///
    /// `n` fixes the register size so that the empty sum (`0` or blank)
    /// is representable.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let mut terms = Vec::new();
        for raw in text.split(['\n', ';']) {
            let line = raw.trim();
            if line.is_empty() || line == "0" {
                continue;
            }
            let (coef_txt, string_txt) = line
                .rsplit_once(char::is_whitespace)
                .ok_or_else(|| QnuteError::Parse(format!("expected `coefficient STRING`, got {line:?}")))?;
            let coef_txt = coef_txt.trim().trim_start_matches('(').trim_end_matches(')');
            let coef = Complex::<T>::from_str(coef_txt)
                .map_err(|_| QnuteError::Parse(format!("invalid coefficient {coef_txt:?}")))?;
            let s: PauliString = string_txt.parse()?;
            terms.push((coef, s));
        }
        Self::from_terms(n, terms)
    }
}
