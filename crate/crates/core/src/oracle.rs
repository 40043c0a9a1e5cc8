//! Dense reference evolution used to judge QNUTE runs.

use crate::error::{QnuteError, Result};
use crate::hamiltonian::{build_bs_pauli, split_terms, BSParams, Boundary, Grid, HamiltonianTerm};
use crate::linalg::{cnorm2, Matrix};
use crate::market::{payoff_samples, OptionContract};
use crate::pauli::{PauliSum, DENSE_QUBIT_LIMIT};
use crate::qnute::{QnuteConfig, StepReport, Trajectory};
use crate::scalar::{cr, Real, C};
use crate::state::{ScaledState, StateVector};

fn propagator<T: Real>(h: &PauliSum<T>, delta_t: T) -> Result<Matrix<C<T>>> {
    let n = h.num_qubits();
    if n > DENSE_QUBIT_LIMIT {
        return Err(QnuteError::Capacity { what: format!("dense propagator on {n} qubits"), limit: DENSE_QUBIT_LIMIT });
    }
    Ok(h.dense_matrix()?.scale(cr(delta_t)).expm())
}

fn normalized<T: Real>(n: usize, v: Vec<C<T>>) -> Result<(StateVector<T>, T)> {
    let norm = cnorm2(&v);
    if !(norm > T::zero()) || !norm.is_finite() {
        return Err(QnuteError::DegenerateInput(format!("exact step produced norm {norm}")));
    }
    let inv = T::one() / norm;
    Ok((StateVector::from_normalized_unchecked(n, v.into_iter().map(|a| a * inv).collect()), norm))
}

/// `e^{hΔt}|ψ⟩` normalized, together with its norm.
pub fn exact_step<T: Real>(state: &StateVector<T>, h: &PauliSum<T>, delta_t: T) -> Result<(StateVector<T>, T)> {
    if h.num_qubits() != state.num_qubits() {
        return Err(QnuteError::Dimension(format!(
            "{}-qubit generator on a {}-qubit state",
            h.num_qubits(),
            state.num_qubits()
        )));
    }
    let u = propagator(h, delta_t)?;
    normalized(state.num_qubits(), u.matvec(state.amplitudes()))
}

/// The exact Trotter product `(Π_m e^{h_m Δt})^{N_T}` applied to `initial`.
///
/// Reports carry the true norm ratio of each factor as `c`, no coefficients
/// and unit fidelity.
pub fn exact_trajectory<T: Real>(
    initial: &ScaledState<T>,
    terms: &[HamiltonianTerm<T>],
    cfg: &QnuteConfig<T>,
) -> Result<Trajectory<T>> {
    let n = initial.state.num_qubits();
    if let Some(t) = terms.iter().find(|t| t.pauli.num_qubits() != n) {
        return Err(QnuteError::Dimension(format!("{}-qubit term for a {n}-qubit state", t.pauli.num_qubits())));
    }
    let props = terms.iter().map(|t| propagator(&t.pauli, cfg.delta_t)).collect::<Result<Vec<_>>>()?;
    let mut states = Vec::with_capacity(cfg.num_steps + 1);
    let mut reports = Vec::with_capacity(cfg.num_steps * props.len());
    states.push(initial.clone());
    let mut current = initial.clone();
    for _ in 0..cfg.num_steps {
        for u in &props {
            let (state, norm) = normalized(n, u.matvec(current.state.amplitudes()))?;
            current = ScaledState::new(state, current.scale * norm)?;
            reports.push(StepReport { c: norm, a: Vec::new(), residual: T::zero(), step_fidelity: Some(T::one()) });
        }
        states.push(current.clone());
    }
    Ok(Trajectory { delta_t: cfg.delta_t, states, reports, terms_per_step: props.len(), measurements_per_step: 0 })
}

/// Mean and population standard deviation of per-step fidelities.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityStats<T> {
    pub mean: T,
    pub std: T,
    pub per_step: Vec<T>,
}

/// Compares the states after each time step; the shared initial state is skipped.
pub fn fidelity_stats<T: Real>(qnute: &Trajectory<T>, exact: &Trajectory<T>) -> Result<FidelityStats<T>> {
    if qnute.states.len() != exact.states.len() {
        return Err(QnuteError::Dimension(format!(
            "trajectories have {} and {} states",
            qnute.states.len(),
            exact.states.len()
        )));
    }
    let per_step = qnute.states[1..]
        .iter()
        .zip(&exact.states[1..])
        .map(|(a, b)| a.state.fidelity(&b.state))
        .collect::<Result<Vec<_>>>()?;
    if per_step.is_empty() {
        return Ok(FidelityStats { mean: T::one(), std: T::zero(), per_step });
    }
    let count = T::from_usize(per_step.len()).unwrap();
    let mean = per_step.iter().copied().sum::<T>() / count;
    let var = per_step.iter().map(|&f| (f - mean) * (f - mean)).sum::<T>() / count;
    Ok(FidelityStats { mean, std: var.sqrt(), per_step })
}

/// Unnormalized payoff vector evolved by the dense linear-boundary generator
/// with the same Trotter split and step as a QNUTE run.
pub fn reference_pde_solution<T: Real>(
    contract: &OptionContract,
    grid: &Grid<T>,
    p: &BSParams<T>,
    cfg: &QnuteConfig<T>,
) -> Result<Vec<T>> {
    evolve_samples(&payoff_samples(contract, grid), grid, p, cfg)
}

/// [`reference_pde_solution`] for arbitrary initial samples.
pub fn evolve_samples<T: Real>(samples: &[T], grid: &Grid<T>, p: &BSParams<T>, cfg: &QnuteConfig<T>) -> Result<Vec<T>> {
    if samples.len() != grid.num_points() {
        return Err(QnuteError::Dimension(format!("{} samples for {} grid points", samples.len(), grid.num_points())));
    }
    let terms = split_terms(&build_bs_pauli(grid, p, Boundary::Linear)?, cfg.term_strategy)?;
    let props = terms.iter().map(|t| propagator(&t.pauli, cfg.delta_t)).collect::<Result<Vec<_>>>()?;
    let mut u: Vec<C<T>> = samples.iter().map(|&v| cr(v)).collect();
    for _ in 0..cfg.num_steps {
        for m in &props {
            u = m.matvec(&u);
        }
    }
    Ok(u.into_iter().map(|a| a.re).collect())
}
