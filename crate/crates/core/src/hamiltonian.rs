//! Black-Scholes generator on a `2^n`-point grid, as a tridiagonal matrix and
//! as a Pauli sum, plus the split of a Pauli sum into Trotter terms.
//!
//! Everything here stores the real evolution generator `L = −iH` (so that
//! `∂u/∂τ = L u`), never `H` itself.

use crate::error::{QnuteError, Result};
use crate::linalg::Matrix;
use crate::pauli::{ladder_as_pauli, ladder_power, LadderOp, PauliString, PauliSum};
use crate::scalar::{cr, Real};

/// `2^n` equally spaced asset prices on `[x0, xN]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid<T> {
    x0: T,
    xn: T,
    n: usize,
}

impl<T: Real> Grid<T> {
    pub fn new(x0: T, xn: T, n: usize) -> Result<Self> {
        if !(x0 >= T::zero()) || !(xn > x0) || !xn.is_finite() {
            return Err(QnuteError::InvalidArgument(format!("grid needs 0 <= x0 < xN, got [{x0}, {xn}]")));
        }
        if n == 0 || n > crate::pauli::DENSE_QUBIT_LIMIT {
            return Err(QnuteError::InvalidArgument(format!(
                "grid qubit count must be in 1..={}, got {n}",
                crate::pauli::DENSE_QUBIT_LIMIT
            )));
        }
        Ok(Self { x0, xn, n })
    }

    pub fn x0(&self) -> T {
        self.x0
    }

    pub fn xn(&self) -> T {
        self.xn
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn num_points(&self) -> usize {
        1usize << self.n
    }

    pub fn spacing(&self) -> T {
        (self.xn - self.x0) / T::from_usize(self.num_points() - 1).unwrap()
    }

    pub fn point(&self, k: usize) -> T {
        if k == self.num_points() - 1 {
            return self.xn;
        }
        self.x0 + T::from_usize(k).unwrap() * self.spacing()
    }

    pub fn points(&self) -> Vec<T> {
        (0..self.num_points()).map(|k| self.point(k)).collect()
    }
}

/// Constant risk-free rate and volatility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BSParams<T> {
    pub r: T,
    pub sigma: T,
}

impl<T: Real> BSParams<T> {
    /// `sigma = 0` is accepted; it degenerates the operator to pure drift.
    pub fn new(r: T, sigma: T) -> Result<Self> {
        if !(r >= T::zero()) || !r.is_finite() {
            return Err(QnuteError::InvalidArgument(format!("rate must be finite and >= 0, got {r}")));
        }
        if !(sigma >= T::zero()) || !sigma.is_finite() {
            return Err(QnuteError::InvalidArgument(format!("volatility must be finite and >= 0, got {sigma}")));
        }
        Ok(Self { r, sigma })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// Plain truncation of the central-difference stencil.
    Central,
    /// First and last rows replaced by one-sided first-order differences
    /// with the second-derivative term dropped.
    Linear,
}

impl std::str::FromStr for Boundary {
    type Err = QnuteError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "central" => Ok(Boundary::Central),
            "linear" => Ok(Boundary::Linear),
            other => Err(QnuteError::Parse(format!("unknown boundary mode {other:?} (expected central|linear)"))),
        }
    }
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Boundary::Central => "central",
            Boundary::Linear => "linear",
        })
    }
}

/// Tridiagonal generator. `alpha[k - 1]` is the sub-diagonal entry of row
/// `k`, `beta[k]` the super-diagonal entry of row `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator<T> {
    pub alpha: Vec<T>,
    pub gamma: Vec<T>,
    pub beta: Vec<T>,
    pub boundary: Boundary,
}

impl<T: Real> TridiagonalOperator<T> {
    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    pub fn dense(&self) -> Matrix<T> {
        let dim = self.dim();
        let mut m = Matrix::zeros(dim, dim);
        for k in 0..dim {
            m[(k, k)] = self.gamma[k];
            if k > 0 {
                m[(k, k - 1)] = self.alpha[k - 1];
            }
            if k + 1 < dim {
                m[(k, k + 1)] = self.beta[k];
            }
        }
        m
    }

    pub fn matvec(&self, u: &[T]) -> Vec<T> {
        let dim = self.dim();
        (0..dim)
            .map(|k| {
                let mut acc = self.gamma[k] * u[k];
                if k > 0 {
                    acc += self.alpha[k - 1] * u[k - 1];
                }
                if k + 1 < dim {
                    acc += self.beta[k] * u[k + 1];
                }
                acc
            })
            .collect()
    }
}

fn coefficients_at<T: Real>(x: T, h: T, p: &BSParams<T>) -> (T, T, T) {
    let two = T::lit(2.0);
    let diffusion = p.sigma * p.sigma * x * x / (two * h * h);
    let drift = p.r * x / (two * h);
    let alpha = diffusion - drift;
    let beta = diffusion + drift;
    (alpha, beta, -p.r - alpha - beta)
}

/// Central-difference Black-Scholes generator:
/// `α_k = σ²x_k²/2h² − r x_k/2h`, `β_k = σ²x_k²/2h² + r x_k/2h`,
/// `γ_k = −r − α_k − β_k`.
pub fn bs_coefficients<T: Real>(grid: &Grid<T>, p: &BSParams<T>) -> TridiagonalOperator<T> {
    let dim = grid.num_points();
    let h = grid.spacing();
    let mut alpha = Vec::with_capacity(dim - 1);
    let mut beta = Vec::with_capacity(dim - 1);
    let mut gamma = Vec::with_capacity(dim);
    for k in 0..dim {
        let (a, b, g) = coefficients_at(grid.point(k), h, p);
        if k > 0 {
            alpha.push(a);
        }
        if k + 1 < dim {
            beta.push(b);
        }
        gamma.push(g);
    }
    TridiagonalOperator { alpha, gamma, beta, boundary: Boundary::Central }
}

/// The four replaced boundary entries `(γ₀′, β₀′, α′_N, γ′_N)`.
pub fn linear_bc_entries<T: Real>(grid: &Grid<T>, p: &BSParams<T>) -> (T, T, T, T) {
    let h = grid.spacing();
    let left = p.r * grid.x0() / h;
    let right = p.r * grid.xn() / h;
    (-p.r - left, left, -right, -p.r + right)
}

/// Replaces rows 0 and `2^n − 1` with the linear-boundary rows. Already
/// linear input is returned unchanged.
pub fn apply_linear_bc<T: Real>(t: &TridiagonalOperator<T>, grid: &Grid<T>, p: &BSParams<T>) -> TridiagonalOperator<T> {
    if t.boundary == Boundary::Linear {
        return t.clone();
    }
    let mut out = t.clone();
    let last = out.dim() - 1;
    let (g0, b0, an, gn) = linear_bc_entries(grid, p);
    out.gamma[0] = g0;
    out.gamma[last] = gn;
    if last > 0 {
        out.beta[0] = b0;
        out.alpha[last - 1] = an;
    }
    out.boundary = Boundary::Linear;
    out
}

/// Tridiagonal generator for the chosen boundary mode.
pub fn bs_tridiagonal<T: Real>(grid: &Grid<T>, p: &BSParams<T>, boundary: Boundary) -> TridiagonalOperator<T> {
    let central = bs_coefficients(grid, p);
    match boundary {
        Boundary::Central => central,
        Boundary::Linear => apply_linear_bc(&central, grid, p),
    }
}

/// `diag(0, 1, …, 2^n − 1)` via `χ⁽ⁿ⁾ = I ⊗ χ⁽ⁿ⁻¹⁾ + 2^{n−1} (SE ⊗ I^{⊗n−1})`.
pub fn chi_matrix<T: Real>(n: usize) -> PauliSum<T> {
    assert!(n >= 1, "chi_matrix needs at least one qubit");
    let se = ladder_as_pauli::<T>(LadderOp::SE);
    let mut chi = se.clone();
    for m in 2..=n {
        let shift = T::lit(2f64.powi(m as i32 - 1));
        let lifted = PauliSum::identity(1).tensor(&chi);
        let top = se.tensor(&PauliSum::identity(m - 1)).scale_real(shift);
        chi = lifted.add(&top).expect("equal register sizes");
    }
    chi
}

/// `diag(0, 1, 4, …, (2^n − 1)²)` via the squared recursion
/// `(χ⁽ⁿ⁾)² = I ⊗ (χ⁽ⁿ⁻¹⁾)² + SE ⊗ (2^n χ⁽ⁿ⁻¹⁾ + 2^{2(n−1)} I^{⊗n−1})`.
pub fn chi_squared_matrix<T: Real>(n: usize) -> PauliSum<T> {
    assert!(n >= 1, "chi_squared_matrix needs at least one qubit");
    let se = ladder_as_pauli::<T>(LadderOp::SE);
    // SE² = SE.
    let mut chi = se.clone();
    let mut chi_sq = se.clone();
    for m in 2..=n {
        let inner = chi
            .scale_real(T::lit(2f64.powi(m as i32)))
            .add(&PauliSum::identity(m - 1).scale_real(T::lit(2f64.powi(2 * (m as i32 - 1)))))
            .expect("equal register sizes");
        chi_sq = PauliSum::identity(1).tensor(&chi_sq).add(&se.tensor(&inner)).expect("equal register sizes");
        chi = PauliSum::identity(1)
            .tensor(&chi)
            .add(&se.tensor(&PauliSum::identity(m - 1)).scale_real(T::lit(2f64.powi(m as i32 - 1))))
            .expect("equal register sizes");
    }
    chi_sq
}

fn difference_matrix<T: Real>(n: usize, lower_sign: T, base: PauliSum<T>) -> PauliSum<T> {
    let ne = ladder_as_pauli::<T>(LadderOp::NE);
    let sw = ladder_as_pauli::<T>(LadderOp::SW);
    let mut d = base;
    for m in 2..=n {
        let upper = ne.tensor(&ladder_power(LadderOp::SW, m - 1));
        let lower = sw.tensor(&ladder_power(LadderOp::NE, m - 1)).scale_real(lower_sign);
        d = PauliSum::identity(1).tensor(&d).add(&upper).and_then(|s| s.add(&lower)).expect("equal register sizes");
    }
    d
}

/// Central first difference `tridiag(−1, 0, 1)`: `D₁⁽¹⁾ = iY`,
/// `D₁⁽ⁿ⁾ = I ⊗ D₁⁽ⁿ⁻¹⁾ + NE ⊗ SW^{⊗n−1} − SW ⊗ NE^{⊗n−1}`.
pub fn d1_matrix<T: Real>(n: usize) -> PauliSum<T> {
    assert!(n >= 1, "d1_matrix needs at least one qubit");
    let iy = PauliSum::from_string(crate::scalar::c(T::zero(), T::one()), "Y".parse().unwrap());
    difference_matrix(n, -T::one(), iy)
}

/// Central second difference `tridiag(1, −2, 1)`: `D₂⁽¹⁾ = −2I + X`,
/// `D₂⁽ⁿ⁾ = I ⊗ D₂⁽ⁿ⁻¹⁾ + NE ⊗ SW^{⊗n−1} + SW ⊗ NE^{⊗n−1}`.
pub fn d2_matrix<T: Real>(n: usize) -> PauliSum<T> {
    assert!(n >= 1, "d2_matrix needs at least one qubit");
    let base = PauliSum::from_terms(
        1,
        [(cr(T::lit(-2.0)), PauliString::identity(1)), (cr(T::one()), "X".parse().unwrap())],
    )
    .expect("one-qubit strings");
    difference_matrix(n, T::one(), base)
}

/// Pauli form of the generator:
/// `σ²/(2h²) X² D₂ + r/(2h) X D₁ − r I`, with the four boundary entries
/// patched through ladder strings in linear mode.
pub fn build_bs_pauli<T: Real>(grid: &Grid<T>, p: &BSParams<T>, boundary: Boundary) -> Result<PauliSum<T>> {
    let n = grid.num_qubits();
    if boundary == Boundary::Linear && n < 2 {
        return Err(QnuteError::UnsupportedSize(format!("linear boundary conditions need at least 2 qubits, got {n}")));
    }
    let h = grid.spacing();
    let x0 = grid.x0();
    let two = T::lit(2.0);
    let id = PauliSum::identity(n);
    let chi = chi_matrix::<T>(n);
    let x_op = id.scale_real(x0).add(&chi.scale_real(h))?;
    let x_sq = id
        .scale_real(x0 * x0)
        .add(&chi.scale_real(two * x0 * h))?
        .add(&chi_squared_matrix::<T>(n).scale_real(h * h))?;

    let diffusion = x_sq.mul(&d2_matrix(n))?.scale_real(p.sigma * p.sigma / (two * h * h));
    let drift = x_op.mul(&d1_matrix(n))?.scale_real(p.r / (two * h));
    let mut gen = diffusion.add(&drift)?.sub(&id.scale_real(p.r))?;

    if boundary == Boundary::Linear {
        let central = bs_coefficients(grid, p);
        let last = central.dim() - 1;
        let (g0, b0, an, gn) = linear_bc_entries(grid, p);
        let corner = |op_rest: LadderOp, op_last: LadderOp| ladder_power::<T>(op_rest, n - 1).tensor(&ladder_as_pauli(op_last));
        let patches = [
            (g0 - central.gamma[0], ladder_power::<T>(LadderOp::NW, n)),
            (b0 - central.beta[0], corner(LadderOp::NW, LadderOp::NE)),
            (an - central.alpha[last - 1], corner(LadderOp::SE, LadderOp::SW)),
            (gn - central.gamma[last], ladder_power::<T>(LadderOp::SE, n)),
        ];
        for (delta, op) in patches {
            gen = gen.add(&op.scale_real(delta))?;
        }
    }
    Ok(gen)
}

/// One Trotter factor `ĥ_m` and the qubits it is assigned to.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianTerm<T> {
    pub pauli: PauliSum<T>,
    /// Ascending qubit indices.
    pub support: Vec<usize>,
}

impl<T: Real> HamiltonianTerm<T> {
    /// A term acting on the whole register.
    pub fn full(pauli: PauliSum<T>) -> Self {
        let support = (0..pauli.num_qubits()).collect();
        Self { pauli, support }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TermStrategy {
    /// A single term over all qubits.
    #[default]
    Single,
    /// Strings grouped into windows of `size` adjacent qubits whose start
    /// positions advance by `stride`.
    Windows { size: usize, stride: usize },
}

impl std::fmt::Display for TermStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TermStrategy::Single => f.write_str("single"),
            TermStrategy::Windows { size, stride } => write!(f, "windows({size},{stride})"),
        }
    }
}

impl std::str::FromStr for TermStrategy {
    type Err = QnuteError;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "single" {
            return Ok(TermStrategy::Single);
        }
        let bad = || QnuteError::Parse(format!("unknown term strategy {s:?} (expected single or windows(D,stride))"));
        let inner = t.strip_prefix("windows(").and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
        let (d, stride) = inner.split_once(',').ok_or_else(bad)?;
        Ok(TermStrategy::Windows {
            size: d.trim().parse().map_err(|_| bad())?,
            stride: stride.trim().parse().map_err(|_| bad())?,
        })
    }
}

/// Start positions of the windows, always including the rightmost one.
fn window_starts(n: usize, size: usize, stride: usize) -> Vec<usize> {
    let mut starts: Vec<usize> = (0..=n - size).step_by(stride).collect();
    if *starts.last().unwrap() != n - size {
        starts.push(n - size);
    }
    starts
}

/// Window (by start index) a string with support `[lo, hi]` is assigned to.
///
/// Windows that contain the support are preferred; among the candidates
/// the one whose centre is nearest the support midpoint wins, ties going to
/// the lower start.
fn place_window(starts: &[usize], size: usize, lo: usize, hi: usize) -> usize {
    let mid2 = (lo + hi) as i64;
    let dist = |s: usize| ((2 * s + size - 1) as i64 - mid2).abs();
    let containing: Vec<usize> = starts.iter().copied().filter(|&s| s <= lo && s + size > hi).collect();
    let pool = if containing.is_empty() { starts.to_vec() } else { containing };
    // `pool` is ascending, so min_by_key keeps the lowest start on ties.
    pool.into_iter().min_by_key(|&s| dist(s)).expect("at least one window")
}

/// Splits a generator into Trotter terms. Summing the returned terms
/// reproduces `hsum` exactly.
pub fn split_terms<T: Real>(hsum: &PauliSum<T>, strategy: TermStrategy) -> Result<Vec<HamiltonianTerm<T>>> {
    let n = hsum.num_qubits();
    match strategy {
        TermStrategy::Single => Ok(vec![HamiltonianTerm::full(hsum.clone())]),
        TermStrategy::Windows { size, stride } => {
            if size == 0 || size > n {
                return Err(QnuteError::InvalidDomain(format!("window size {size} is not in 1..={n}")));
            }
            if stride == 0 {
                return Err(QnuteError::InvalidDomain("window stride must be positive".into()));
            }
            let starts = window_starts(n, size, stride);
            let mut buckets: Vec<Vec<_>> = vec![Vec::new(); starts.len()];
            for &(coef, s) in hsum.terms() {
                let support = s.support();
                let idx = match (support.first(), support.last()) {
                    (Some(&lo), Some(&hi)) => {
                        let start = place_window(&starts, size, lo, hi);
                        starts.iter().position(|&st| st == start).unwrap()
                    }
                    // The identity string goes with the first window.
                    _ => 0,
                };
                buckets[idx].push((coef, s));
            }
            let mut terms = Vec::new();
            for (start, bucket) in starts.iter().zip(buckets) {
                if bucket.is_empty() {
                    continue;
                }
                terms.push(HamiltonianTerm { pauli: PauliSum::from_terms(n, bucket)?, support: (*start..start + size).collect() });
            }
            Ok(terms)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    fn reference_grid(n: usize) -> Grid<f64> {
        Grid::new(0.0, 150.0, n).unwrap()
    }

    fn reference_params() -> BSParams<f64> {
        BSParams::new(0.04, 0.2).unwrap()
    }

    fn real_dense(p: &PauliSum<f64>) -> Matrix<f64> {
        let m = p.dense_matrix().unwrap();
        assert!(m.as_slice().iter().all(|z| z.im.abs() < 1e-12), "expected a real matrix");
        m.real_part()
    }

    #[test]
    fn grid_geometry() {
        let g = reference_grid(2);
        assert_eq!(g.spacing(), 50.0);
        assert_eq!(g.points(), vec![0.0, 50.0, 100.0, 150.0]);
        assert!(Grid::new(10.0, 5.0, 2).is_err());
        assert!(Grid::new(-1.0, 5.0, 2).is_err());
        assert!(Grid::new(0.0, 5.0, 0).is_err());
    }

    #[test]
    fn coefficient_examples() {
        let t = bs_coefficients(&reference_grid(2), &reference_params());
        // x_0 = 0.
        assert_eq!(t.beta[0], 0.0);
        assert_eq!(t.gamma[0], -0.04);
        // k = 1, x = 50, h = 50.
        assert!((t.alpha[0] - 0.0).abs() < 1e-15);
        assert!((t.beta[1] - 0.04).abs() < 1e-15);
        assert!((t.gamma[1] + 0.08).abs() < 1e-15);
        for k in 1..3 {
            assert!((t.alpha[k - 1] + t.beta[k] + t.gamma[k] + 0.04).abs() < 1e-14);
        }
    }

    #[test]
    fn linear_bc_examples() {
        let g = reference_grid(2);
        let p = reference_params();
        let lin = apply_linear_bc(&bs_coefficients(&g, &p), &g, &p);
        assert_eq!(lin.gamma[0], -0.04);
        assert_eq!(lin.beta[0], 0.0);
        assert!((lin.alpha[2] + 0.12).abs() < 1e-15);
        assert!((lin.gamma[3] - 0.08).abs() < 1e-15);
        // Interior rows untouched.
        let central = bs_coefficients(&g, &p);
        assert_eq!(lin.gamma[1..3], central.gamma[1..3]);
        assert_eq!(apply_linear_bc(&lin, &g, &p), lin);
        let ones = lin.matvec(&[1.0; 4]);
        assert!((ones[0] + 0.04).abs() < 1e-15);
        assert!((ones[3] + 0.04).abs() < 1e-14);
    }

    #[test]
    fn chi_recursion() {
        let chi1 = chi_matrix::<f64>(1);
        assert_eq!(chi1, PauliSum::parse("0.5 I\n-0.5 Z", 1).unwrap());
        for n in 2..=4 {
            let m = real_dense(&chi_matrix::<f64>(n));
            let sq = real_dense(&chi_squared_matrix::<f64>(n));
            let dim = 1 << n;
            let diag = Matrix::from_fn(dim, dim, |i, j| if i == j { i as f64 } else { 0.0 });
            let diag_sq = Matrix::from_fn(dim, dim, |i, j| if i == j { (i * i) as f64 } else { 0.0 });
            assert!(m.sub(&diag).max_abs() < 1e-12);
            assert!(sq.sub(&diag_sq).max_abs() < 1e-10);
        }
    }

    #[test]
    fn difference_matrices() {
        assert_eq!(d1_matrix::<f64>(1), PauliSum::parse("(0+1i) Y", 1).unwrap());
        assert_eq!(d2_matrix::<f64>(1), PauliSum::parse("-2 I\n1 X", 1).unwrap());
        for n in 2..=4 {
            let dim = 1 << n;
            let d1 = Matrix::from_fn(dim, dim, |i, j| {
                if j == i + 1 {
                    1.0
                } else if i == j + 1 {
                    -1.0
                } else {
                    0.0
                }
            });
            let d2 = Matrix::from_fn(dim, dim, |i, j| {
                if i == j {
                    -2.0
                } else if i.abs_diff(j) == 1 {
                    1.0
                } else {
                    0.0
                }
            });
            assert!(real_dense(&d1_matrix(n)).sub(&d1).max_abs() < 1e-14);
            assert!(real_dense(&d2_matrix(n)).sub(&d2).max_abs() < 1e-14);
        }
    }

    #[test]
    fn pauli_form_matches_tridiagonal() {
        let p = reference_params();
        for n in 2..=4 {
            let g = reference_grid(n);
            for boundary in [Boundary::Central, Boundary::Linear] {
                let pauli = real_dense(&build_bs_pauli(&g, &p, boundary).unwrap());
                let tri = bs_tridiagonal(&g, &p, boundary).dense();
                assert!(pauli.sub(&tri).max_abs() < 1e-10, "n={n} {boundary}");
            }
        }
    }

    #[test]
    fn pauli_form_on_shifted_grid() {
        let g = Grid::new(20.0, 90.0, 3).unwrap();
        let p = BSParams::new(0.07, 0.35).unwrap();
        let pauli = real_dense(&build_bs_pauli(&g, &p, Boundary::Linear).unwrap());
        let tri = bs_tridiagonal(&g, &p, Boundary::Linear);
        assert!(pauli.sub(&tri.dense()).max_abs() < 1e-10);
        let (g0, b0, an, gn) = linear_bc_entries(&g, &p);
        assert!((pauli[(0, 0)] - g0).abs() < 1e-10);
        assert!((pauli[(0, 1)] - b0).abs() < 1e-10);
        assert!((pauli[(7, 6)] - an).abs() < 1e-10);
        assert!((pauli[(7, 7)] - gn).abs() < 1e-10);
    }

    #[test]
    fn linear_mode_needs_two_qubits() {
        let err = build_bs_pauli(&reference_grid(1), &reference_params(), Boundary::Linear).unwrap_err();
        assert!(matches!(err, QnuteError::UnsupportedSize(_)));
        assert!(build_bs_pauli(&reference_grid(1), &reference_params(), Boundary::Central).is_ok());
    }

    #[test]
    fn zero_params_give_zero_operator() {
        let zero = BSParams::new(0.0, 0.0).unwrap();
        for n in 2..=4 {
            for b in [Boundary::Central, Boundary::Linear] {
                assert!(build_bs_pauli(&reference_grid(n), &zero, b).unwrap().is_empty());
            }
        }
    }

    #[test]
    fn linear_generator_is_not_normal() {
        let h = build_bs_pauli(&reference_grid(3), &reference_params(), Boundary::Linear).unwrap().dense_matrix().unwrap();
        let hd = h.adjoint();
        let comm = h.matmul(&hd).sub(&hd.matmul(&h));
        assert!(comm.frobenius_norm() > 1e-3);
    }

    #[test]
    fn split_single_and_full_window() {
        let h = build_bs_pauli(&reference_grid(2), &reference_params(), Boundary::Linear).unwrap();
        let single = split_terms(&h, TermStrategy::Single).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].pauli, h);
        assert_eq!(single[0].support, vec![0, 1]);
        let win = split_terms(&h, TermStrategy::Windows { size: 2, stride: 1 }).unwrap();
        assert_eq!(win.len(), 1);
        assert_eq!(win[0].support, vec![0, 1]);
    }

    #[test]
    fn split_places_strings_by_support() {
        let h = PauliSum::<f64>::parse("1 IXXI\n2 XIII\n3 IIIZ\n4 XIIZ\n5 IIII", 4).unwrap();
        let terms = split_terms(&h, TermStrategy::Windows { size: 2, stride: 1 }).unwrap();
        let window_of = |s: &str| {
            let s: PauliString = s.parse().unwrap();
            terms.iter().find(|t| t.pauli.coefficient(&s).norm() > 0.0).map(|t| t.support.clone()).unwrap()
        };
        assert_eq!(window_of("IXXI"), vec![1, 2]);
        assert_eq!(window_of("XIII"), vec![0, 1]);
        assert_eq!(window_of("IIIZ"), vec![2, 3]);
        // Support {0,3}, midpoint 1.5: centred window is {1,2}.
        assert_eq!(window_of("XIIZ"), vec![1, 2]);
        assert_eq!(window_of("IIII"), vec![0, 1]);
        for t in &terms {
            for (_, s) in t.pauli.terms() {
                let sup = s.support();
                if !sup.is_empty() && sup[sup.len() - 1] - sup[0] < 2 {
                    assert!(sup.iter().all(|q| t.support.contains(q)));
                }
            }
        }
    }

    #[test]
    fn split_reconstructs_input() {
        let h = build_bs_pauli(&reference_grid(4), &reference_params(), Boundary::Linear).unwrap();
        for strategy in [
            TermStrategy::Single,
            TermStrategy::Windows { size: 2, stride: 1 },
            TermStrategy::Windows { size: 3, stride: 2 },
            TermStrategy::Windows { size: 4, stride: 1 },
        ] {
            let terms = split_terms(&h, strategy).unwrap();
            let total = terms.iter().fold(PauliSum::zero(4), |acc, t| acc.add(&t.pauli).unwrap());
            assert_eq!(total.len(), h.len());
            assert!(total.sub(&h).unwrap().is_empty(), "{strategy}");
        }
    }

    #[test]
    fn split_rejects_bad_windows() {
        let h = PauliSum::<f64>::identity(2);
        assert!(matches!(split_terms(&h, TermStrategy::Windows { size: 3, stride: 1 }), Err(QnuteError::InvalidDomain(_))));
        assert!(matches!(split_terms(&h, TermStrategy::Windows { size: 1, stride: 0 }), Err(QnuteError::InvalidDomain(_))));
    }

    #[test]
    fn strategy_text_round_trip() {
        for s in [TermStrategy::Single, TermStrategy::Windows { size: 2, stride: 1 }] {
            assert_eq!(s.to_string().parse::<TermStrategy>().unwrap(), s);
        }
        assert!("windows(2)".parse::<TermStrategy>().is_err());
    }

    #[test]
    fn single_precision_build() {
        let g = Grid::new(0.0f32, 150.0, 3).unwrap();
        let p = BSParams::new(0.04f32, 0.2).unwrap();
        let pauli = build_bs_pauli(&g, &p, Boundary::Linear).unwrap().dense_matrix().unwrap().real_part();
        let tri = bs_tridiagonal(&g, &p, Boundary::Linear).dense();
        assert!(pauli.sub(&tri).max_abs() < 1e-3);
    }
}
