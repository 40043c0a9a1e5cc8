//! Dense n-qubit statevectors, amplitude encoding of sampled functions and
//! the scale factor that carries the non-unitary norm history.

use num_traits::Zero;

use crate::error::{QnuteError, Result};
use crate::linalg::{cdot, cnorm2};
use crate::pauli::{PauliString, PauliSum};
use crate::scalar::{cr, Real, C};

/// Largest register for which a statevector is allocated.
pub const STATE_QUBIT_LIMIT: usize = 26;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    n: usize,
    amps: Vec<C<T>>,
}

impl<T: Real> StateVector<T> {
    /// Computational basis state `|k⟩`.
    pub fn basis(n: usize, k: usize) -> Result<Self> {
        if n > STATE_QUBIT_LIMIT {
            return Err(QnuteError::Capacity { what: format!("{n}-qubit state"), limit: STATE_QUBIT_LIMIT });
        }
        let dim = 1usize << n;
        if k >= dim {
            return Err(QnuteError::Dimension(format!("basis index {k} out of range for {n} qubits")));
        }
        let mut amps = vec![C::zero(); dim];
        amps[k] = cr(T::one());
        Ok(Self { n, amps })
    }

    /// Normalizes the given amplitudes. The length must be a power of two.
    pub fn from_amplitudes(amps: Vec<C<T>>) -> Result<Self> {
        let dim = amps.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(QnuteError::Dimension(format!("{dim} amplitudes is not a power of two")));
        }
        let n = dim.trailing_zeros() as usize;
        if n > STATE_QUBIT_LIMIT {
            return Err(QnuteError::Capacity { what: format!("{n}-qubit state"), limit: STATE_QUBIT_LIMIT });
        }
        let norm = cnorm2(&amps);
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(QnuteError::DegenerateInput("amplitudes have zero or non-finite norm".into()));
        }
        let inv = T::one() / norm;
        Ok(Self { n, amps: amps.into_iter().map(|a| a * inv).collect() })
    }

    pub fn from_real(values: &[T]) -> Result<Self> {
        Self::from_amplitudes(values.iter().map(|&v| cr(v)).collect())
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amps
    }

    pub fn amplitude(&self, k: usize) -> C<T> {
        self.amps[k]
    }

    pub fn norm(&self) -> T {
        cnorm2(&self.amps)
    }

    /// Rescales to unit norm and returns the norm that was removed.
    pub(crate) fn renormalize(&mut self) -> T {
        let norm = self.norm();
        let inv = T::one() / norm;
        for a in &mut self.amps {
            *a = *a * inv;
        }
        norm
    }

    /// Wraps amplitudes without normalizing; callers guarantee unit norm.
    pub(crate) fn from_normalized_unchecked(n: usize, amps: Vec<C<T>>) -> Self {
        debug_assert_eq!(amps.len(), 1usize << n);
        Self { n, amps }
    }

    /// True when every amplitude is real within `tol`.
    pub fn is_real(&self, tol: T) -> bool {
        self.amps.iter().all(|a| a.im.abs() <= tol)
    }

    fn check_op(&self, n: usize) -> Result<()> {
        if n != self.n {
            return Err(QnuteError::Dimension(format!("{n}-qubit operator applied to {}-qubit state", self.n)));
        }
        Ok(())
    }

    /// `⟨ψ|O|ψ⟩`.
    pub fn expectation(&self, op: &PauliSum<T>) -> Result<C<T>> {
        self.check_op(op.num_qubits())?;
        Ok(cdot(&self.amps, &op.apply(&self.amps)))
    }

    /// `⟨ψ|P|ψ⟩` for a single string.
    pub fn expectation_string(&self, s: &PauliString) -> Result<C<T>> {
        self.check_op(s.num_qubits())?;
        Ok(cdot(&self.amps, &s.apply(&self.amps)))
    }

    /// `e^{-i·angle·P}|ψ⟩ = cos(angle)|ψ⟩ − i·sin(angle)·P|ψ⟩`.
    pub fn apply_pauli_rotation(&self, s: &PauliString, angle: T) -> Result<Self> {
        let mut out = self.clone();
        out.rotate_in_place(s, angle)?;
        Ok(out)
    }

    pub(crate) fn rotate_in_place(&mut self, s: &PauliString, angle: T) -> Result<()> {
        self.check_op(s.num_qubits())?;
        if angle == T::zero() {
            return Ok(());
        }
        let (sin, cos) = angle.sin_cos();
        let x = s.x_mask() as usize;
        let z = s.z_mask();
        let base = (s.x_mask() & s.z_mask()).count_ones();
        // -i·sin·(phase of P on |k⟩)
        let coeffs = [
            crate::scalar::i_pow::<T>(base + 3) * sin,
            crate::scalar::i_pow::<T>(base + 5) * sin,
        ];
        let cos = cr(cos);
        let parity = |k: usize| ((k as u64 & z).count_ones() & 1) as usize;
        if x == 0 {
            for (k, a) in self.amps.iter_mut().enumerate() {
                *a = *a * (cos + coeffs[parity(k)]);
            }
            return Ok(());
        }
        // Pairs (k, k^x) mix only with each other.
        let top = 1usize << (usize::BITS - 1 - x.leading_zeros());
        for k in 0..self.amps.len() {
            if k & top != 0 {
                continue;
            }
            let kp = k ^ x;
            let (a, b) = (self.amps[k], self.amps[kp]);
            // P|k⟩ lands on |kp⟩ and vice versa.
            self.amps[kp] = cos * b + coeffs[parity(k)] * a;
            self.amps[k] = cos * a + coeffs[parity(kp)] * b;
        }
        Ok(())
    }

    /// `|⟨a|b⟩|²`.
    pub fn fidelity(&self, other: &Self) -> Result<T> {
        if self.n != other.n {
            return Err(QnuteError::Dimension(format!("fidelity between {}- and {}-qubit states", self.n, other.n)));
        }
        Ok(cdot(&self.amps, &other.amps).norm_sqr().min(T::one()))
    }
}

/// A unit-norm state together with the positive real factor that maps it
/// back to the unnormalized solution vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledState<T> {
    pub state: StateVector<T>,
    pub scale: T,
}

impl<T: Real> ScaledState<T> {
    pub fn new(state: StateVector<T>, scale: T) -> Result<Self> {
        if !(scale > T::zero()) || !scale.is_finite() {
            return Err(QnuteError::InvalidArgument(format!("scale must be positive and finite, got {scale}")));
        }
        Ok(Self { state, scale })
    }

    /// `scale · |ψ⟩` as a plain vector.
    pub fn unnormalized(&self) -> Vec<C<T>> {
        self.state.amps.iter().map(|a| *a * self.scale).collect()
    }
}

/// Amplitude encoding: `|ū⟩ = Σ u_k |k⟩ / ‖u‖₂`, keeping `‖u‖₂` as the scale.
pub fn encode_samples<T: Real>(values: &[T]) -> Result<ScaledState<T>> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(QnuteError::InvalidArgument("sample values must be finite".into()));
    }
    if values.iter().all(|v| v.is_zero()) {
        return Err(QnuteError::DegenerateInput("cannot encode an all-zero sample vector".into()));
    }
    let state = StateVector::from_amplitudes(values.iter().map(|&v| cr(v)).collect())?;
    let scale = values.iter().map(|&v| v * v).sum::<T>().sqrt();
    ScaledState::new(state, scale)
}

/// `scale · |amplitude_k|` per basis index.
///
/// Signs and phases are lost, so this only inverts [`encode_samples`] for
/// real non-negative data.
pub fn decode_nonnegative<T: Real>(s: &ScaledState<T>) -> Vec<T> {
    decode_with_scale(&s.state, s.scale)
}

pub(crate) fn decode_with_scale<T: Real>(state: &StateVector<T>, scale: T) -> Vec<T> {
    state.amps.iter().map(|a| scale * a.norm_sqr().sqrt()).collect()
}
