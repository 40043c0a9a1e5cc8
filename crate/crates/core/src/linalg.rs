//! Small dense linear algebra: row-major matrices, a symmetric eigensolver
//! and the matrix exponential.

use std::ops::{Index, IndexMut};

use num_traits::{Num, Zero};

use crate::scalar::{cr, Real, C};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Copy + Num> Matrix<E> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![E::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = E::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Panics if `data.len() != rows * cols`.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<E>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major buffer has the wrong length");
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[E] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn map<F: Copy + Num>(&self, f: impl Fn(E) -> F) -> Matrix<F> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    pub fn scale(&self, s: E) -> Self {
        self.map(|x| x * s)
    }

    /// Panics on shape mismatch.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in add");
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    /// Panics on shape mismatch.
    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in sub");
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    /// Panics on shape mismatch.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in matmul");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o = *o + a * b;
                }
            }
        }
        out
    }

    /// Panics on shape mismatch.
    pub fn matvec(&self, v: &[E]) -> Vec<E> {
        assert_eq!(self.cols, v.len(), "shape mismatch in matvec");
        (0..self.rows)
            .map(|i| {
                self.row(i).iter().zip(v).fold(E::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            self[(i / other.rows, j / other.cols)] * other[(i % other.rows, j % other.cols)]
        })
    }
}

impl<E> Index<(usize, usize)> for Matrix<E> {
    type Output = E;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &E {
        &self.data[i * self.cols + j]
    }
}

impl<E> IndexMut<(usize, usize)> for Matrix<E> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut E {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Matrix<T> {
    pub fn to_complex(&self) -> Matrix<C<T>> {
        self.map(cr)
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&x| x * x).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }
}

impl<T: Real> Matrix<C<T>> {
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn real_part(&self) -> Matrix<T> {
        self.map(|z| z.re)
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> T {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()))
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (i..self.cols).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() <= tol))
    }

    /// Matrix exponential by scaling and squaring with an adaptive Taylor kernel.
    ///
    /// The matrix is scaled by `2^-s` until its 1-norm is at most 1/2, the
    /// series is summed until the next term drops below machine precision
    /// relative to the partial sum, and the result is squared `s` times.
    ///
    /// Panics if the matrix is not square.
    pub fn expm(&self) -> Self {
        assert!(self.is_square(), "expm requires a square matrix");
        let n = self.rows;
        if n == 0 {
            return self.clone();
        }
        let norm = self.norm_one();
        let half = T::lit(0.5);
        let mut squarings = 0u32;
        if norm > half {
            squarings = (norm / half).log2().ceil().to_u32().unwrap_or(0);
        }
        let scaled = self.scale(cr(T::one() / T::lit(2f64.powi(squarings as i32))));

        let mut sum = Self::identity(n);
        let mut term = Self::identity(n);
        for k in 1..=60 {
            term = term.matmul(&scaled).scale(cr(T::one() / T::from_usize(k).unwrap()));
            sum = sum.add(&term);
            if term.norm_one() <= T::epsilon() * sum.norm_one() {
                break;
            }
        }
        for _ in 0..squarings {
            sum = sum.matmul(&sum);
        }
        sum
    }
}

/// Eigendecomposition of a real symmetric matrix.
///
/// `values` ascend; column `k` of `vectors` is the unit eigenvector for
/// `values[k]`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    pub vectors: Matrix<T>,
}

impl<T: Real> SymmetricEigen<T> {
    /// Householder tridiagonalization followed by implicit QL with shifts.
    ///
    /// Only the lower triangle is read. Panics if `m` is not square.
    pub fn new(m: &Matrix<T>) -> Self {
        assert!(m.is_square(), "symmetric eigensolver requires a square matrix");
        let n = m.rows();
        if n == 0 {
            return Self { values: vec![], vectors: Matrix::zeros(0, 0) };
        }
        let mut v: Vec<T> = Matrix::from_fn(n, n, |i, j| if j <= i { m[(i, j)] } else { m[(j, i)] }).data;
        let mut d = vec![T::zero(); n];
        let mut e = vec![T::zero(); n];
        tridiagonalize(n, &mut v, &mut d, &mut e);
        ql_implicit(n, &mut v, &mut d, &mut e);

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap_or(std::cmp::Ordering::Equal));
        let values = order.iter().map(|&k| d[k]).collect();
        let vectors = Matrix::from_fn(n, n, |i, j| v[i * n + order[j]]);
        Self { values, vectors }
    }

    pub fn max_abs_value(&self) -> T {
        self.values.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }
}

fn tridiagonalize<T: Real>(n: usize, v: &mut [T], d: &mut [T], e: &mut [T]) {
    let ix = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[ix(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = T::zero();
        let mut h = T::zero();
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == T::zero() {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[ix(i - 1, j)];
                v[ix(i, j)] = T::zero();
                v[ix(j, i)] = T::zero();
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > T::zero() {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = T::zero();
            }
            for j in 0..i {
                f = d[j];
                v[ix(j, i)] = f;
                g = e[j] + v[ix(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[ix(k, j)] * d[k];
                    e[k] += v[ix(k, j)] * f;
                }
                e[j] = g;
            }
            f = T::zero();
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[ix(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[ix(i - 1, j)];
                v[ix(i, j)] = T::zero();
            }
        }
        d[i] = h;
    }

    for i in 0..n - 1 {
        v[ix(n - 1, i)] = v[ix(i, i)];
        v[ix(i, i)] = T::one();
        let h = d[i + 1];
        if h != T::zero() {
            for k in 0..=i {
                d[k] = v[ix(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = T::zero();
                for k in 0..=i {
                    g += v[ix(k, i + 1)] * v[ix(k, j)];
                }
                for k in 0..=i {
                    v[ix(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[ix(k, i + 1)] = T::zero();
        }
    }
    for j in 0..n {
        d[j] = v[ix(n - 1, j)];
        v[ix(n - 1, j)] = T::zero();
    }
    v[ix(n - 1, n - 1)] = T::one();
    e[0] = T::zero();
}

fn ql_implicit<T: Real>(n: usize, v: &mut [T], d: &mut [T], e: &mut [T]) {
    let ix = |i: usize, j: usize| i * n + j;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();

    let mut f = T::zero();
    let mut tst1 = T::zero();
    let eps = T::epsilon();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (e[l] + e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v[ix(k, i + 1)];
                        v[ix(k, i + 1)] = s * v[ix(k, i)] + c * h;
                        v[ix(k, i)] = c * v[ix(k, i)] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if !(e[l].abs() > eps * tst1) || iter > 200 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = T::zero();
    }
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub(crate) fn norm2<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub(crate) fn cnorm2<T: Real>(a: &[C<T>]) -> T {
    a.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// `⟨a|b⟩` with the first argument conjugated.
pub(crate) fn cdot<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    a.iter().zip(b).fold(C::zero(), |acc, (x, y)| acc + x.conj() * y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn eigen_reconstructs_symmetric_matrix() {
        let m = Matrix::from_row_major(
            4,
            4,
            vec![4.0, 1.0, -2.0, 2.0, 1.0, 2.0, 0.0, 1.0, -2.0, 0.0, 3.0, -2.0, 2.0, 1.0, -2.0, -1.0],
        );
        let eig = SymmetricEigen::new(&m);
        let v = &eig.vectors;
        let lam = Matrix::from_fn(4, 4, |i, j| if i == j { eig.values[i] } else { 0.0 });
        let rebuilt = v.matmul(&lam).matmul(&v.transpose());
        assert!(rebuilt.sub(&m).max_abs() < 1e-12);
        let orth = v.transpose().matmul(v).sub(&Matrix::identity(4));
        assert!(orth.max_abs() < 1e-12);
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn eigen_handles_diagonal_and_zero() {
        let z = Matrix::<f64>::zeros(3, 3);
        let eig = SymmetricEigen::new(&z);
        assert_eq!(eig.values, vec![0.0; 3]);
        let d = Matrix::from_fn(3, 3, |i, j| if i == j { [3.0, -1.0, 2.0][i] } else { 0.0 });
        assert_eq!(SymmetricEigen::new(&d).values, vec![-1.0, 2.0, 3.0]);
        let one = Matrix::from_row_major(1, 1, vec![5.0]);
        assert_eq!(SymmetricEigen::new(&one).values, vec![5.0]);
    }

    #[test]
    fn expm_of_scalar_and_rotation_generator() {
        let a = Matrix::from_row_major(1, 1, vec![c(-0.1, 0.0)]);
        assert!((a.expm()[(0, 0)].re - (-0.1f64).exp()).abs() < 1e-15);

        // exp(θ [[0,-1],[1,0]]) is a rotation by θ.
        let theta: f64 = 2.5;
        let g = Matrix::from_row_major(
            2,
            2,
            vec![c(0.0, 0.0), c(-theta, 0.0), c(theta, 0.0), c(0.0, 0.0)],
        );
        let r = g.expm();
        assert!((r[(0, 0)].re - theta.cos()).abs() < 1e-13);
        assert!((r[(1, 0)].re - theta.sin()).abs() < 1e-13);
    }

    #[test]
    fn expm_matches_unscaled_series_for_large_norm() {
        // exp(A) for diagonalizable A = P diag(λ) P^-1 with known P.
        let p = Matrix::from_row_major(2, 2, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let pinv = Matrix::from_row_major(2, 2, vec![c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let lam = [c(3.0, 1.0), c(-4.0, 0.5)];
        let a = p.matmul(&Matrix::from_fn(2, 2, |i, j| if i == j { lam[i] } else { c(0.0, 0.0) })).matmul(&pinv);
        let expected = p
            .matmul(&Matrix::from_fn(2, 2, |i, j| if i == j { lam[i].exp() } else { c(0.0, 0.0) }))
            .matmul(&pinv);
        let got = a.expm();
        let scale = expected.frobenius_norm();
        assert!(got.max_abs_diff(&expected) / scale < 1e-13);
    }

    #[test]
    fn kron_places_blocks() {
        let a = Matrix::from_row_major(2, 2, vec![1.0, 2.0, 3.0, 4.0]);
        let b = Matrix::from_row_major(2, 2, vec![0.0, 1.0, 1.0, 0.0]);
        let k = a.kron(&b);
        assert_eq!(k[(0, 1)], 1.0);
        assert_eq!(k[(2, 3)], 4.0);
        assert_eq!(k[(3, 0)], 3.0);
    }
}
