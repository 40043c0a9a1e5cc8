//! Classical simulator for quantum non-unitary time evolution (QNUTE).
//!
//! Each first-order Trotter factor `e^{h Δt}` of a non-Hermitian evolution is
//! replaced by a unitary `e^{-i A Δt}` fitted from expectation values on the
//! current state, while a separate scale factor tracks the lost norm. The
//! crate ships the Black-Scholes pricing pipeline built on top of it.
//!
//! All numerics are generic over [`Real`] (`f64` or `f32`); the `*64`
//! aliases below fix the usual double-precision choice.

pub mod error;
pub mod hamiltonian;
pub mod linalg;
pub mod market;
pub mod oracle;
pub mod pauli;
pub mod qnute;
pub mod scalar;
pub mod state;

pub use error::{QnuteError, Result};
pub use hamiltonian::{
    apply_linear_bc, bs_coefficients, bs_tridiagonal, build_bs_pauli, chi_matrix, chi_squared_matrix, d1_matrix,
    d2_matrix, split_terms, BSParams, Boundary, Grid, HamiltonianTerm, TermStrategy, TridiagonalOperator,
};
pub use linalg::{Matrix, SymmetricEigen};
pub use market::{
    analytic_price, boundary_coefficients, boundary_value, norm_cdf, payoff_samples, price_curve, price_run,
    rescale_factor, BoundaryCoeffs, OptionContract, OptionKind, PriceRun, Side,
};
pub use oracle::{evolve_samples, exact_step, exact_trajectory, fidelity_stats, reference_pde_solution, FidelityStats};
pub use pauli::{decompose_dense, ladder_as_pauli, multiply_strings, LadderOp, PauliString, PauliSum, PauliSymbol};
pub use qnute::{
    default_rel_tol, domain_for, evolve, measure_b, measure_c, measure_s, resolve_basis, sigma_basis, solve_coefficients, trotter_step,
    BasisChoice, BasisMode, QnuteConfig, SigmaBasis, StepReport, StepSummary, TermStepper, Trajectory,
};
pub use scalar::{Real, C};
pub use state::{decode_nonnegative, encode_samples, ScaledState, StateVector};

pub type PauliSum64 = PauliSum<f64>;
pub type StateVector64 = StateVector<f64>;
pub type ScaledState64 = ScaledState<f64>;
pub type Grid64 = Grid<f64>;
pub type BSParams64 = BSParams<f64>;
pub type HamiltonianTerm64 = HamiltonianTerm<f64>;

pub type PauliSum32 = PauliSum<f32>;
pub type StateVector32 = StateVector<f32>;
pub type QnuteConfig64 = QnuteConfig<f64>;
pub type Trajectory64 = Trajectory<f64>;
