//! The QNUTE stepper.
//!
//! For one Trotter factor `e^{h Δt}` acting on `|ψ⟩` the stepper measures
//!
//! ```text
//! c   = sqrt(1 + 2Δt Re⟨ψ|h|ψ⟩)
//! S_IJ = ⟨ψ|σ_I σ_J|ψ⟩
//! b_I = (−2/c) Im⟨ψ|σ_I h|ψ⟩
//! ```
//!
//! solves `(S + Sᵀ) a = b` in the minimal-norm least-squares sense, applies
//! `Π_I e^{−i a_I σ_I Δt}` in ascending basis order and multiplies the running
//! scale by `c`.
//!
//! With `w_I = σ_I|ψ⟩` stacked as real columns `W = [Re w; Im w]`, the system
//! matrix is `S + Sᵀ = 2 WᵀW` and `b = Wᵀq` for a vector `q` built from `h|ψ⟩`.
//! Its minimal-norm solution is therefore also `a = ½ Wᵀ (W Wᵀ)⁺ q`, which
//! only needs an eigendecomposition of size `2·2^n`. The stepper picks
//! whichever of the two systems is smaller.

use std::ops::Range;

use crate::error::{QnuteError, Result};
use crate::hamiltonian::{HamiltonianTerm, TermStrategy};
use crate::linalg::{cdot, norm2, Matrix, SymmetricEigen};
use crate::pauli::{CompiledOperator, PauliString, PauliSum, PauliSymbol, DENSE_QUBIT_LIMIT};
use crate::scalar::{Real, C};
use crate::state::{ScaledState, StateVector};

/// Radicands of `c²` at or below this are rejected.
const RADICAND_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisMode {
    /// Every non-identity string on the domain.
    Full,
    /// Only strings with an odd number of `Y`; these generate real rotations.
    OddY,
}

/// Basis selection in a configuration; `Auto` resolves per run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BasisChoice {
    /// `OddY` when the initial state and every term are real, else `Full`.
    #[default]
    Auto,
    Fixed(BasisMode),
}

impl std::fmt::Display for BasisChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BasisChoice::Auto => "auto",
            BasisChoice::Fixed(BasisMode::Full) => "full",
            BasisChoice::Fixed(BasisMode::OddY) => "odd-y",
        })
    }
}

impl std::str::FromStr for BasisChoice {
    type Err = QnuteError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "auto" => Ok(BasisChoice::Auto),
            "full" => Ok(BasisChoice::Fixed(BasisMode::Full)),
            "odd-y" | "oddy" | "odd_y" => Ok(BasisChoice::Fixed(BasisMode::OddY)),
            other => Err(QnuteError::Parse(format!("unknown basis mode {other:?} (expected auto|full|odd-y)"))),
        }
    }
}

/// The Hermitian strings `σ_I` a fitted unitary is built from.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaBasis {
    pub domain: Range<usize>,
    pub mode: BasisMode,
    /// Full-register strings, identity outside `domain`, lexicographic order.
    pub strings: Vec<PauliString>,
}

impl SigmaBasis {
    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }
}

/// Builds the basis over a contiguous `domain` of an `n`-qubit register.
pub fn sigma_basis(n: usize, domain: &[usize], mode: BasisMode) -> Result<SigmaBasis> {
    let (Some(&lo), Some(&hi)) = (domain.first(), domain.last()) else {
        return Err(QnuteError::InvalidDomain("empty basis domain".into()));
    };
    if hi >= n || hi - lo + 1 != domain.len() || domain.windows(2).any(|w| w[1] != w[0] + 1) {
        return Err(QnuteError::InvalidDomain(format!("domain {domain:?} is not a contiguous range of 0..{n}")));
    }
    let d = domain.len();
    if d > 31 {
        return Err(QnuteError::Capacity { what: format!("basis over {d} qubits"), limit: 31 });
    }
    let mut strings = Vec::new();
    // Counting in base 4 with the most significant digit on `lo` visits the
    // strings in lexicographic order.
    for code in 1..4usize.pow(d as u32) {
        let mut s = PauliString::identity(n);
        let mut rest = code;
        for j in (0..d).rev() {
            s.set(lo + j, PauliSymbol::ALL[rest % 4]);
            rest /= 4;
        }
        if mode == BasisMode::OddY && s.y_count() % 2 == 0 {
            continue;
        }
        strings.push(s);
    }
    Ok(SigmaBasis { domain: lo..hi + 1, mode, strings })
}

/// `1e-8`, raised to `10·ε` for types too coarse to resolve it.
pub fn default_rel_tol<T: Real>() -> T {
    T::lit(1e-8).max(T::epsilon() * T::lit(10.0))
}

/// Run parameters shared by QNUTE and the exact reference evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct QnuteConfig<T> {
    pub delta_t: T,
    pub num_steps: usize,
    /// Number of adjacent qubits each fitted unitary may act on.
    pub domain_size: usize,
    pub basis: BasisChoice,
    /// Eigenvalues below `lstsq_rel_tol · λ_max` are discarded in the solve.
    pub lstsq_rel_tol: T,
    pub term_strategy: TermStrategy,
    /// Compare every step against the dense exact step (needs `n ≤ 14`).
    pub track_step_fidelity: bool,
}

impl<T: Real> QnuteConfig<T> {
    /// `num_steps` uniform steps over `total_time`, exact mode on `domain_size` qubits.
    pub fn new(total_time: T, num_steps: usize, domain_size: usize) -> Self {
        let delta_t = if num_steps == 0 { T::zero() } else { total_time / T::from_usize(num_steps).unwrap() };
        Self {
            delta_t,
            num_steps,
            domain_size,
            basis: BasisChoice::Auto,
            lstsq_rel_tol: default_rel_tol(),
            term_strategy: TermStrategy::Single,
            track_step_fidelity: true,
        }
    }

    pub fn total_time(&self) -> T {
        self.delta_t * T::from_usize(self.num_steps).unwrap()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.num_steps > 0 && !(self.delta_t > T::zero() && self.delta_t.is_finite()) {
            return Err(QnuteError::InvalidArgument(format!("time step must be positive, got {}", self.delta_t)));
        }
        if self.domain_size == 0 || self.domain_size > n {
            return Err(QnuteError::InvalidDomain(format!("domain size {} is not in 1..={n}", self.domain_size)));
        }
        if !(self.lstsq_rel_tol > T::zero() && self.lstsq_rel_tol < T::one()) {
            return Err(QnuteError::InvalidArgument(format!(
                "least-squares tolerance must lie in (0, 1), got {}",
                self.lstsq_rel_tol
            )));
        }
        Ok(())
    }
}

/// Diagnostics of one Trotter factor.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport<T> {
    pub c: T,
    pub a: Vec<T>,
    /// `‖(S + Sᵀ)a − b‖₂`
    pub residual: T,
    /// Fidelity against the exact normalized factor applied to the same input.
    pub step_fidelity: Option<T>,
}

/// States after each full time step (index 0 is the initial state) and
/// the per-factor reports, `terms_per_step` of them per time step.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub delta_t: T,
    pub states: Vec<ScaledState<T>>,
    pub reports: Vec<StepReport<T>>,
    pub terms_per_step: usize,
    /// `Σ_m ℐ_m²` per time step.
    pub measurements_per_step: usize,
}

/// Per-time-step aggregate of the factor reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSummary<T> {
    pub step: usize,
    pub tau: T,
    /// Product of the factor `c` values.
    pub c: T,
    pub cumulative_scale: T,
    /// Largest factor residual.
    pub residual: T,
    /// Smallest factor fidelity.
    pub step_fidelity: Option<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn num_steps(&self) -> usize {
        self.states.len() - 1
    }

    pub fn final_state(&self) -> &ScaledState<T> {
        self.states.last().expect("trajectory holds the initial state")
    }

    /// `N_T · Σ_m ℐ_m²`.
    pub fn measurement_count(&self) -> usize {
        self.num_steps() * self.measurements_per_step
    }

    /// One summary per time step, starting at step 1.
    pub fn summaries(&self) -> Vec<StepSummary<T>> {
        (1..self.states.len())
            .map(|step| {
                let m = self.terms_per_step;
                let reports = if m == 0 { &[][..] } else { &self.reports[(step - 1) * m..step * m] };
                let step_fidelity = reports
                    .iter()
                    .map(|r| r.step_fidelity)
                    .try_fold(T::one(), |acc, f| f.map(|f| acc.min(f)));
                StepSummary {
                    step,
                    tau: self.delta_t * T::from_usize(step).unwrap(),
                    c: reports.iter().fold(T::one(), |acc, r| acc * r.c),
                    cumulative_scale: self.states[step].scale,
                    residual: reports.iter().fold(T::zero(), |acc, r| acc.max(r.residual)),
                    step_fidelity,
                }
            })
            .collect()
    }
}

/// `c = sqrt(1 + 2Δt Re⟨ψ|h|ψ⟩)`.
pub fn measure_c<T: Real>(state: &StateVector<T>, h: &PauliSum<T>, delta_t: T) -> Result<T> {
    let e = state.expectation(h)?;
    scale_factor(e.re, delta_t)
}

fn scale_factor<T: Real>(re_expectation: T, delta_t: T) -> Result<T> {
    let radicand = T::one() + T::lit(2.0) * delta_t * re_expectation;
    if !(radicand > T::lit(RADICAND_FLOOR)) {
        return Err(QnuteError::StepSize { radicand: radicand.to_f64_lossy() });
    }
    Ok(radicand.sqrt())
}

fn basis_images<T: Real>(state: &StateVector<T>, basis: &SigmaBasis) -> Vec<Vec<C<T>>> {
    basis.strings.iter().map(|s| s.apply(state.amplitudes())).collect()
}

/// `S_IJ = ⟨ψ|σ_I σ_J|ψ⟩`.
pub fn measure_s<T: Real>(state: &StateVector<T>, basis: &SigmaBasis) -> Matrix<C<T>> {
    gram_from_images(&basis_images(state, basis))
}

fn gram_from_images<T: Real>(w: &[Vec<C<T>>]) -> Matrix<C<T>> {
    let k = w.len();
    let mut s = Matrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v = cdot(&w[i], &w[j]);
            s[(i, j)] = v;
            s[(j, i)] = v.conj();
        }
    }
    s
}

/// `b_I = (−2/c) Im⟨ψ|σ_I h|ψ⟩`.
pub fn measure_b<T: Real>(state: &StateVector<T>, basis: &SigmaBasis, h: &PauliSum<T>, c: T) -> Vec<T> {
    let hpsi = h.apply(state.amplitudes());
    b_from_images(&basis_images(state, basis), &hpsi, c)
}

fn b_from_images<T: Real>(w: &[Vec<C<T>>], hpsi: &[C<T>], c: T) -> Vec<T> {
    let k = T::lit(-2.0) / c;
    w.iter().map(|wi| k * cdot(wi, hpsi).im).collect()
}

/// Minimal-norm solution of `(S + Sᵀ) a = b` by symmetric eigendecomposition.
///
/// Returns `(a, ‖(S + Sᵀ)a − b‖₂)`.
pub fn solve_coefficients<T: Real>(s: &Matrix<C<T>>, b: &[T], rel_tol: T) -> Result<(Vec<T>, T)> {
    if !s.is_square() || s.rows() != b.len() {
        return Err(QnuteError::Dimension(format!("{}x{} system with {} right-hand sides", s.rows(), s.cols(), b.len())));
    }
    let k = s.rows();
    let m = Matrix::from_fn(k, k, |i, j| s[(i, j)].re + s[(j, i)].re);
    let a = pinv_apply(&m, b, rel_tol)?;
    let residual = residual_norm(&m, &a, b);
    Ok((a, residual))
}

fn residual_norm<T: Real>(m: &Matrix<T>, a: &[T], b: &[T]) -> T {
    let ma = m.matvec(a);
    norm2(&ma.iter().zip(b).map(|(x, y)| *x - *y).collect::<Vec<_>>())
}

/// `m⁺ v` for symmetric `m`, discarding eigenvalues at or below `rel_tol · max|λ|`.
fn pinv_apply<T: Real>(m: &Matrix<T>, v: &[T], rel_tol: T) -> Result<Vec<T>> {
    let eig = SymmetricEigen::new(m);
    let cutoff = rel_tol * eig.max_abs_value();
    let k = m.rows();
    let mut out = vec![T::zero(); k];
    let mut kept = 0;
    for (idx, &lambda) in eig.values.iter().enumerate() {
        if !(lambda > cutoff) {
            continue;
        }
        kept += 1;
        let proj = (0..k).map(|i| eig.vectors[(i, idx)] * v[i]).sum::<T>() / lambda;
        for (i, o) in out.iter_mut().enumerate() {
            *o += eig.vectors[(i, idx)] * proj;
        }
    }
    if kept == 0 {
        return Err(QnuteError::SingularSystem { cutoff: cutoff.to_f64_lossy() });
    }
    Ok(out)
}

/// Same solution as [`solve_coefficients`], computed through the `W Wᵀ` Gram matrix.
fn solve_via_gram<T: Real>(w: &[Vec<C<T>>], hpsi: &[C<T>], c: T, rel_tol: T) -> Result<(Vec<T>, T)> {
    let dim = hpsi.len();
    let k = w.len();
    // Rows of the stacked real matrix that vanish for every basis image
    // (e.g. all real parts when the images are purely imaginary) are dropped.
    let live: Vec<usize> = (0..2 * dim)
        .filter(|&r| w.iter().any(|wi| if r < dim { !wi[r].re.is_zero() } else { !wi[r - dim].im.is_zero() }))
        .collect();
    let entry = |wi: &Vec<C<T>>, r: usize| if r < dim { wi[r].re } else { wi[r - dim].im };
    let cols: Vec<Vec<T>> = w.iter().map(|wi| live.iter().map(|&r| entry(wi, r)).collect()).collect();
    let rows = live.len();

    // b = Wᵀq with q = (−2/c)(Im h|ψ⟩, −Re h|ψ⟩).
    let kq = T::lit(-2.0) / c;
    let q: Vec<T> = live.iter().map(|&r| if r < dim { kq * hpsi[r].im } else { -kq * hpsi[r - dim].re }).collect();

    let mut gram = Matrix::zeros(rows, rows);
    for col in &cols {
        for i in 0..rows {
            let ci = col[i];
            if ci.is_zero() {
                continue;
            }
            for j in 0..=i {
                gram[(i, j)] += ci * col[j];
            }
        }
    }
    for i in 0..rows {
        for j in 0..i {
            gram[(j, i)] = gram[(i, j)];
        }
    }
    // (S + Sᵀ) = 2 WᵀW has the eigenvalues of 2 W Wᵀ, so the relative cutoff carries over.
    let y = if rows == 0 {
        return Err(QnuteError::SingularSystem { cutoff: 0.0 });
    } else {
        pinv_apply(&gram, &q, rel_tol)?
    };
    let half = T::lit(0.5);
    let a: Vec<T> = cols.iter().map(|col| half * col.iter().zip(&y).map(|(x, y)| *x * *y).sum::<T>()).collect();

    // (S + Sᵀ)a − b = Wᵀ(2Wa − q)
    let mut wa = vec![T::zero(); rows];
    for (col, &ai) in cols.iter().zip(&a) {
        for (acc, &x) in wa.iter_mut().zip(col) {
            *acc += x * ai;
        }
    }
    let diff: Vec<T> = wa.iter().zip(&q).map(|(x, qi)| T::lit(2.0) * *x - *qi).collect();
    let residual = norm2(&cols.iter().map(|col| col.iter().zip(&diff).map(|(x, d)| *x * *d).sum::<T>()).collect::<Vec<_>>());
    debug_assert_eq!(a.len(), k);
    Ok((a, residual))
}

/// Contiguous window of `size` qubits centred on `support` and clipped to the register.
pub fn domain_for(support: &[usize], size: usize, n: usize) -> Vec<usize> {
    let size = size.min(n);
    let (lo, hi) = match (support.first(), support.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => (0, n - 1),
    };
    let span = hi - lo + 1;
    let start = if span >= size {
        // Window narrower than the support: centre it, ties to the lower index.
        lo + (span - size) / 2
    } else {
        let slack = size - span;
        lo.saturating_sub(slack / 2 + slack % 2)
    };
    let start = start.min(n - size);
    (start..start + size).collect()
}

/// Prepared state for repeatedly stepping one term.
#[derive(Debug, Clone)]
pub struct TermStepper<T> {
    term: HamiltonianTerm<T>,
    op: CompiledOperator<T>,
    basis: SigmaBasis,
    delta_t: T,
    rel_tol: T,
    propagator: Option<Matrix<C<T>>>,
}

impl<T: Real> TermStepper<T> {
    pub fn new(term: &HamiltonianTerm<T>, mode: BasisMode, cfg: &QnuteConfig<T>) -> Result<Self> {
        let n = term.pauli.num_qubits();
        cfg.validate(n)?;
        let domain = domain_for(&term.support, cfg.domain_size, n);
        let basis = sigma_basis(n, &domain, mode)?;
        let propagator = if cfg.track_step_fidelity {
            if n > DENSE_QUBIT_LIMIT {
                return Err(QnuteError::Capacity { what: format!("exact step for {n} qubits"), limit: DENSE_QUBIT_LIMIT });
            }
            Some(term.pauli.dense_matrix()?.scale(crate::scalar::cr(cfg.delta_t)).expm())
        } else {
            None
        };
        Ok(Self {
            term: term.clone(),
            op: term.pauli.compile(),
            basis,
            delta_t: cfg.delta_t,
            rel_tol: cfg.lstsq_rel_tol,
            propagator,
        })
    }

    pub fn basis(&self) -> &SigmaBasis {
        &self.basis
    }

    pub fn term(&self) -> &HamiltonianTerm<T> {
        &self.term
    }

    pub fn step(&self, input: &ScaledState<T>) -> Result<(ScaledState<T>, StepReport<T>)> {
        let psi = &input.state;
        if psi.num_qubits() != self.op.num_qubits() {
            return Err(QnuteError::Dimension(format!(
                "{}-qubit state stepped with a {}-qubit term",
                psi.num_qubits(),
                self.op.num_qubits()
            )));
        }
        let hpsi = self.op.apply(psi.amplitudes());
        let c = scale_factor(cdot(psi.amplitudes(), &hpsi).re, self.delta_t)?;
        let w = basis_images(psi, &self.basis);
        let (a, residual) = if self.basis.len() <= 2 * psi.dim() {
            let s = gram_from_images(&w);
            let b = b_from_images(&w, &hpsi, c);
            solve_coefficients(&s, &b, self.rel_tol)?
        } else {
            solve_via_gram(&w, &hpsi, c, self.rel_tol)?
        };

        let mut next = psi.clone();
        for (s, &ai) in self.basis.strings.iter().zip(&a) {
            next.rotate_in_place(s, ai * self.delta_t)?;
        }
        let drift = next.renormalize();
        let step_fidelity = match &self.propagator {
            Some(u) => {
                let exact = StateVector::from_amplitudes(u.matvec(psi.amplitudes()))?;
                Some(exact.fidelity(&next)?)
            }
            None => None,
        };
        let out = ScaledState::new(next, input.scale * c * drift)?;
        Ok((out, StepReport { c, a, residual, step_fidelity }))
    }
}

/// Resolves [`BasisChoice::Auto`] for an initial state and its terms.
pub fn resolve_basis<T: Real>(choice: BasisChoice, state: &StateVector<T>, terms: &[HamiltonianTerm<T>]) -> BasisMode {
    match choice {
        BasisChoice::Fixed(mode) => mode,
        BasisChoice::Auto => {
            if state.is_real(T::NORM_TOL) && terms.iter().all(|t| t.pauli.is_real_matrix(T::PRUNE)) {
                BasisMode::OddY
            } else {
                BasisMode::Full
            }
        }
    }
}

/// One QNUTE Trotter factor applied to `state`.
pub fn trotter_step<T: Real>(
    state: &ScaledState<T>,
    term: &HamiltonianTerm<T>,
    cfg: &QnuteConfig<T>,
) -> Result<(ScaledState<T>, StepReport<T>)> {
    let mode = resolve_basis(cfg.basis, &state.state, std::slice::from_ref(term));
    TermStepper::new(term, mode, cfg)?.step(state)
}

/// `num_steps` rounds of all terms in order.
pub fn evolve<T: Real>(initial: &ScaledState<T>, terms: &[HamiltonianTerm<T>], cfg: &QnuteConfig<T>) -> Result<Trajectory<T>> {
    let n = initial.state.num_qubits();
    if let Some(t) = terms.iter().find(|t| t.pauli.num_qubits() != n) {
        return Err(QnuteError::Dimension(format!("{}-qubit term for a {n}-qubit state", t.pauli.num_qubits())));
    }
    cfg.validate(n)?;
    let mode = resolve_basis(cfg.basis, &initial.state, terms);
    let steppers = terms.iter().map(|t| TermStepper::new(t, mode, cfg)).collect::<Result<Vec<_>>>()?;
    let measurements_per_step = steppers.iter().map(|s| s.basis.len() * s.basis.len()).sum();

    let mut states = Vec::with_capacity(cfg.num_steps + 1);
    let mut reports = Vec::with_capacity(cfg.num_steps * steppers.len());
    states.push(initial.clone());
    let mut current = initial.clone();
    for _ in 0..cfg.num_steps {
        for stepper in &steppers {
            let (next, report) = stepper.step(&current)?;
            current = next;
            reports.push(report);
        }
        states.push(current.clone());
    }
    Ok(Trajectory { delta_t: cfg.delta_t, states, reports, terms_per_step: steppers.len(), measurements_per_step })
}
