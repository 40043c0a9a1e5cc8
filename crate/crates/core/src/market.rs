//! European option payoffs, closed-form Black-Scholes prices and the boundary
//! rescaling that turns a normalized state back into currency values.

use std::fmt;
use std::str::FromStr;

use statrs::function::erf::erfc;

use crate::error::{QnuteError, Result};
use crate::hamiltonian::{build_bs_pauli, split_terms, BSParams, Boundary, Grid};
use crate::qnute::{evolve, QnuteConfig, Trajectory};
use crate::scalar::Real;
use crate::state::{decode_with_scale, encode_samples, StateVector};

/// Boundary amplitudes below this cannot be rescaled.
const MIN_BOUNDARY_AMPLITUDE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OptionKind {
    Call,
    Put,
    BullSpread,
    BearSpread,
    Straddle,
    Strangle,
    /// Long calls at `K1` and `K2`, two short calls at the midpoint.
    Butterfly,
}

impl OptionKind {
    pub const ALL: [OptionKind; 7] = [
        OptionKind::Call,
        OptionKind::Put,
        OptionKind::BullSpread,
        OptionKind::BearSpread,
        OptionKind::Straddle,
        OptionKind::Strangle,
        OptionKind::Butterfly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OptionKind::Call => "call",
            OptionKind::Put => "put",
            OptionKind::BullSpread => "bull-spread",
            OptionKind::BearSpread => "bear-spread",
            OptionKind::Straddle => "straddle",
            OptionKind::Strangle => "strangle",
            OptionKind::Butterfly => "butterfly",
        }
    }

    pub fn strike_count(self) -> usize {
        match self {
            OptionKind::Call | OptionKind::Put | OptionKind::Straddle => 1,
            _ => 2,
        }
    }

    /// Side whose boundary ODE fixes the price scale.
    pub fn rescale_side(self) -> Side {
        match self {
            OptionKind::Call | OptionKind::BullSpread => Side::Right,
            _ => Side::Left,
        }
    }

    fn default_strikes(self) -> Vec<f64> {
        if self.strike_count() == 1 {
            vec![75.0]
        } else {
            vec![50.0, 100.0]
        }
    }
}

impl fmt::Display for OptionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OptionKind {
    type Err = QnuteError;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        OptionKind::ALL
            .into_iter()
            .find(|k| k.name() == key || k.name().replace('-', "") == key)
            .ok_or_else(|| QnuteError::Parse(format!("unknown option kind {:?}", s.trim())))
    }
}

/// A contract: kind plus one strike (`K`) or two (`K1 < K2`).
#[derive(Debug, Clone, PartialEq)]
pub struct OptionContract {
    kind: OptionKind,
    strikes: Vec<f64>,
}

impl OptionContract {
    pub fn new(kind: OptionKind, strikes: &[f64]) -> Result<Self> {
        if strikes.len() != kind.strike_count() {
            return Err(QnuteError::InvalidArgument(format!(
                "{kind} takes {} strike(s), got {}",
                kind.strike_count(),
                strikes.len()
            )));
        }
        if strikes.iter().any(|k| !(k.is_finite() && *k > 0.0)) {
            return Err(QnuteError::InvalidArgument(format!("strikes must be positive, got {strikes:?}")));
        }
        if strikes.len() == 2 && strikes[0] >= strikes[1] {
            return Err(QnuteError::InvalidArgument(format!("{kind} needs K1 < K2, got {strikes:?}")));
        }
        Ok(Self { kind, strikes: strikes.to_vec() })
    }

    /// K=75 for single-strike kinds, (50, 100) otherwise.
    pub fn with_default_strikes(kind: OptionKind) -> Self {
        Self { kind, strikes: kind.default_strikes() }
    }

    pub fn kind(&self) -> OptionKind {
        self.kind
    }

    pub fn strikes(&self) -> &[f64] {
        &self.strikes
    }

    /// Payoff at maturity for one asset price.
    pub fn payoff(&self, x: f64) -> f64 {
        let call = |k: f64| (x - k).max(0.0);
        let put = |k: f64| (k - x).max(0.0);
        let s = &self.strikes;
        match self.kind {
            OptionKind::Call => call(s[0]),
            OptionKind::Put => put(s[0]),
            OptionKind::BullSpread => call(s[0]) - call(s[1]),
            OptionKind::BearSpread => put(s[1]) - put(s[0]),
            OptionKind::Straddle => call(s[0]) + put(s[0]),
            OptionKind::Strangle => put(s[0]) + call(s[1]),
            OptionKind::Butterfly => call(s[0]) - 2.0 * call(0.5 * (s[0] + s[1])) + call(s[1]),
        }
    }
}

impl fmt::Display for OptionContract {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.kind)?;
        for (i, k) in self.strikes.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}")?;
        }
        Ok(())
    }
}

/// `kind` alone (default strikes) or `kind:K` / `kind:K1,K2`.
impl FromStr for OptionContract {
    type Err = QnuteError;
    fn from_str(s: &str) -> Result<Self> {
        let (kind, strikes) = match s.split_once(':') {
            None => return Ok(Self::with_default_strikes(s.parse()?)),
            Some((kind, strikes)) => (kind.parse::<OptionKind>()?, strikes),
        };
        let strikes = strikes
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| QnuteError::Parse(format!("bad strike {:?} in contract {s:?}", t.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(kind, &strikes)
    }
}

/// Payoff sampled on every grid point.
pub fn payoff_samples<T: Real>(contract: &OptionContract, grid: &Grid<T>) -> Vec<T> {
    grid.points().into_iter().map(|x| T::lit(contract.payoff(x.to_f64_lossy()))).collect()
}

/// Standard normal CDF.
pub fn norm_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

fn call_price(x: f64, k: f64, tau: f64, r: f64, sigma: f64) -> f64 {
    let disc = k * (-r * tau).exp();
    if x == 0.0 {
        return 0.0;
    }
    let vol = sigma * tau.sqrt();
    if vol == 0.0 {
        return (x - disc).max(0.0);
    }
    let d1 = ((x / k).ln() + (r + 0.5 * sigma * sigma) * tau) / vol;
    let d2 = d1 - vol;
    x * norm_cdf(d1) - disc * norm_cdf(d2)
}

/// Closed-form price at asset level `x` and time to maturity `tau`.
///
/// `x = 0` returns the limit value; negative `x` is rejected.
pub fn analytic_price<T: Real>(contract: &OptionContract, x: T, tau: T, p: &BSParams<T>) -> Result<T> {
    let (x, tau, r, sigma) = (x.to_f64_lossy(), tau.to_f64_lossy(), p.r.to_f64_lossy(), p.sigma.to_f64_lossy());
    if tau < 0.0 || !tau.is_finite() {
        return Err(QnuteError::PriceDomain(format!("time to maturity must be non-negative, got {tau}")));
    }
    if tau == 0.0 {
        if x < 0.0 {
            return Err(QnuteError::PriceDomain(format!("asset price must be non-negative, got {x}")));
        }
        return Ok(T::lit(contract.payoff(x)));
    }
    if x < 0.0 || !x.is_finite() {
        return Err(QnuteError::PriceDomain(format!("asset price must be non-negative, got {x}")));
    }
    let call = |k: f64| call_price(x, k, tau, r, sigma);
    let put = |k: f64| call(k) - x + k * (-r * tau).exp();
    let s = contract.strikes();
    let v = match contract.kind() {
        OptionKind::Call => call(s[0]),
        OptionKind::Put => put(s[0]),
        OptionKind::BullSpread => call(s[0]) - call(s[1]),
        OptionKind::BearSpread => put(s[1]) - put(s[0]),
        OptionKind::Straddle => call(s[0]) + put(s[0]),
        OptionKind::Strangle => put(s[0]) + call(s[1]),
        OptionKind::Butterfly => call(s[0]) - 2.0 * call(0.5 * (s[0] + s[1])) + call(s[1]),
    };
    Ok(T::lit(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// Straight lines `a·x + b` through the two samples at each end of the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCoeffs<T> {
    pub a0: T,
    pub b0: T,
    pub an: T,
    pub bn: T,
}

impl<T: Real> BoundaryCoeffs<T> {
    pub fn side(&self, side: Side) -> (T, T) {
        match side {
            Side::Left => (self.a0, self.b0),
            Side::Right => (self.an, self.bn),
        }
    }

    pub fn is_degenerate(&self, side: Side) -> bool {
        let (a, b) = self.side(side);
        a.is_zero() && b.is_zero()
    }

    /// `preferred` unless it is degenerate; fails when both sides are.
    pub fn select_side(&self, preferred: Side) -> Result<Side> {
        [preferred, preferred.other()]
            .into_iter()
            .find(|&s| !self.is_degenerate(s))
            .ok_or_else(|| QnuteError::ProtocolFailure("a(0) = b(0) = 0 on both boundaries".into()))
    }
}

pub fn boundary_coefficients<T: Real>(payoff: &[T], grid: &Grid<T>) -> Result<BoundaryCoeffs<T>> {
    let dim = grid.num_points();
    if payoff.len() != dim {
        return Err(QnuteError::Dimension(format!("{} samples for a grid of {dim} points", payoff.len())));
    }
    let h = grid.spacing();
    let a0 = (payoff[1] - payoff[0]) / h;
    let b0 = payoff[0] - a0 * grid.x0();
    let an = (payoff[dim - 1] - payoff[dim - 2]) / h;
    let bn = payoff[dim - 1] - an * grid.xn();
    Ok(BoundaryCoeffs { a0, b0, an, bn })
}

/// `a(0)·x_b + b(0)·e^{−rτ}`.
pub fn boundary_value<T: Real>(coeffs: &BoundaryCoeffs<T>, grid: &Grid<T>, side: Side, tau: T, p: &BSParams<T>) -> T {
    let (a, b) = coeffs.side(side);
    let x = match side {
        Side::Left => grid.x0(),
        Side::Right => grid.xn(),
    };
    a * x + b * (-p.r * tau).exp()
}

/// `C*(τ)`: boundary value divided by the state's boundary amplitude.
pub fn rescale_factor<T: Real>(
    state: &StateVector<T>,
    coeffs: &BoundaryCoeffs<T>,
    grid: &Grid<T>,
    side: Side,
    tau: T,
    p: &BSParams<T>,
) -> Result<T> {
    if state.dim() != grid.num_points() {
        return Err(QnuteError::Dimension(format!("{}-amplitude state for a {}-point grid", state.dim(), grid.num_points())));
    }
    if coeffs.is_degenerate(side) {
        coeffs.select_side(side)?;
        return Err(QnuteError::ProtocolFailure(format!("a(0) = b(0) = 0 on the {side} boundary")));
    }
    let idx = match side {
        Side::Left => 0,
        Side::Right => state.dim() - 1,
    };
    let amp = state.amplitude(idx).norm();
    if !(amp >= T::lit(MIN_BOUNDARY_AMPLITUDE)) {
        return Err(QnuteError::ProtocolFailure(format!("{side} boundary amplitude {amp:e} is too small to rescale")));
    }
    let v = boundary_value(coeffs, grid, side, tau, p);
    if !(v > T::zero()) {
        return Err(QnuteError::ProtocolFailure(format!("{side} boundary value {v:e} is not positive")));
    }
    Ok(v / amp)
}

/// Everything produced by one pricing run.
#[derive(Debug, Clone)]
pub struct PriceRun<T> {
    pub prices: Vec<T>,
    pub trajectory: Trajectory<T>,
    pub side: Side,
    pub coeffs: BoundaryCoeffs<T>,
    pub c_star: T,
}

/// Payoff, encode, evolve under the linear-boundary generator, rescale at `τ = T`.
pub fn price_run<T: Real>(
    contract: &OptionContract,
    grid: &Grid<T>,
    p: &BSParams<T>,
    cfg: &QnuteConfig<T>,
) -> Result<PriceRun<T>> {
    let payoff = payoff_samples(contract, grid);
    let coeffs = boundary_coefficients(&payoff, grid)?;
    let side = coeffs.select_side(contract.kind().rescale_side())?;
    let initial = encode_samples(&payoff)?;
    let hsum = build_bs_pauli(grid, p, Boundary::Linear)?;
    let terms = split_terms(&hsum, cfg.term_strategy)?;
    let trajectory = evolve(&initial, &terms, cfg)?;
    let c_star = rescale_factor(&trajectory.final_state().state, &coeffs, grid, side, cfg.total_time(), p)?;
    let prices = decode_with_scale(&trajectory.final_state().state, c_star);
    Ok(PriceRun { prices, trajectory, side, coeffs, c_star })
}

/// Prices at every grid point at `τ = T`.
pub fn price_curve<T: Real>(
    contract: &OptionContract,
    grid: &Grid<T>,
    p: &BSParams<T>,
    cfg: &QnuteConfig<T>,
) -> Result<Vec<T>> {
    price_run(contract, grid, p, cfg).map(|run| run.prices)
}
