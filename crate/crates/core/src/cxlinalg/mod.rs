//! Dense complex linear algebra at the small dimensions met in boundary
//! triplet computations (the deficiency index, rarely above 16).

mod eig;
mod lu;
mod matlog;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::{c_real, Real};

pub use eig::{herm_eig, psd_sqrt, smallest_singular_value, HermitianEigen};
pub use lu::Lu;
pub use matlog::{det_tr_log_consistency, matlog_integral};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is singular (pivot {pivot})")]
    Singular { pivot: usize },
    #[error("matrix is not Hermitian: |T - T*| = {residual:e}")]
    NotHermitian { residual: f64 },
    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:e}")]
    NotPsd { min_eigenvalue: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("logarithm argument is (near) singular: condition number {cond:e}")]
    SingularArgument { cond: f64 },
    #[error("logarithm argument has Im T with eigenvalue {min_eigenvalue:e} < 0")]
    LowerHalfSpectrum { min_eigenvalue: f64 },
    #[error("adaptive quadrature stopped at estimated error {error:e} (tolerance {tol:e})")]
    QuadratureNotConverged { error: f64, tol: f64 },
}

/// Dense row-major complex matrix.
///
/// Almost everything in the crate is square, but range projections produce
/// `n x r` isometries, so the shape is not fixed.
#[derive(Clone, PartialEq)]
pub struct Matrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "({:+.6e} {:+.6e}i) ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, Complex::one())
    }

    /// `value * I` of size `n`.
    pub fn scalar(n: usize, value: Complex<T>) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = value;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major data. Panics if the length is wrong.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length does not match shape");
        Self { rows, cols, data }
    }

    /// Builds a square matrix from nested rows. Returns `None` if ragged or empty.
    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Option<Self> {
        let n = rows.len();
        let m = rows.first()?.len();
        if m == 0 || rows.iter().any(|r| r.len() != m) {
            return None;
        }
        Some(Self::from_fn(n, m, |i, j| rows[i][j]))
    }

    /// Builds a matrix from separate real and imaginary parts.
    pub fn from_re_im(re: &[Vec<T>], im: &[Vec<T>]) -> Option<Self> {
        let n = re.len();
        let m = re.first()?.len();
        if m == 0 || re.iter().any(|r| r.len() != m) {
            return None;
        }
        if im.len() != n || im.iter().any(|r| r.len() != m) {
            return None;
        }
        Some(Self::from_fn(n, m, |i, j| Complex::new(re[i][j], im[i][j])))
    }

    pub fn from_diag(diag: &[Complex<T>]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    pub fn from_real_diag(diag: &[T]) -> Self {
        let values: Vec<_> = diag.iter().map(|&d| c_real(d)).collect();
        Self::from_diag(&values)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Dimension of a square matrix.
    #[inline]
    pub fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn ensure_square(&self) -> Result<usize, LinalgError> {
        if self.is_square() && self.rows > 0 {
            Ok(self.rows)
        } else {
            Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .fold(Complex::zero(), |a, b| a + b)
    }

    pub fn diagonal(&self) -> Vec<Complex<T>> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    /// Hermitian part `(T + T*)/2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * half
        })
    }

    /// Imaginary part `(T - T*)/(2i)`, Hermitian by construction.
    pub fn imag_part(&self) -> Self {
        let half = T::lit(0.5);
        let out = Self::from_fn(self.rows, self.cols, |i, j| {
            let d = self[(i, j)] - self[(j, i)].conj();
            // d / (2i) = -i d / 2
            Complex::new(d.im, -d.re) * half
        });
        out.symmetrized()
    }

    /// Averages with the adjoint so the result is exactly Hermitian.
    pub fn symmetrized(&self) -> Self {
        let mut out = self.clone();
        let half = T::lit(0.5);
        for i in 0..self.rows {
            out[(i, i)] = Complex::new(self[(i, i)].re, T::zero());
            for j in (i + 1)..self.cols {
                let v = (self[(i, j)] + self[(j, i)].conj()) * half;
                out[(i, j)] = v;
                out[(j, i)] = v.conj();
            }
        }
        out
    }

    pub fn norm_fro(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> T {
        (0..self.cols)
            .map(|j| (0..self.rows).fold(T::zero(), |acc, i| acc + self[(i, j)].norm()))
            .fold(T::zero(), T::max)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.is_square() && (self - &self.adjoint()).norm_fro() <= tol * T::one().max(self.norm_fro())
    }

    /// Hermitian within `tol` and no eigenvalue below `-tol * max(1, |T|)`.
    pub fn is_psd(&self, tol: T) -> bool {
        if !self.is_hermitian(tol) {
            return false;
        }
        match herm_eig(&self.symmetrized(), tol) {
            Ok(e) => e.eigenvalues[0] >= -tol * T::one().max(self.norm_fro()),
            Err(_) => false,
        }
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        self.is_square() && self.unitarity_defect() <= tol
    }

    /// `|U* U - I|_F`.
    pub fn unitarity_defect(&self) -> T {
        (&(&self.adjoint() * self) - &Self::identity(self.cols)).norm_fro()
    }

    /// Extracts the columns listed in `idx`.
    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])])
    }

    /// `(self | other)` side by side.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)]
            } else {
                other[(i, j - self.cols)]
            }
        })
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch {
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        Ok(self.mul_unchecked(rhs))
    }

    fn mul_unchecked(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn inverse(&self) -> Result<Self, LinalgError> {
        Lu::factor(self)?.inverse()
    }

    pub fn det(&self) -> Result<Complex<T>, LinalgError> {
        match Lu::factor(self) {
            Ok(lu) => Ok(lu.det()),
            Err(LinalgError::Singular { .. }) => Ok(Complex::zero()),
            Err(e) => Err(e),
        }
    }

    /// Condition number in the 1-norm; infinite for singular input.
    pub fn cond_1(&self) -> T {
        match self.inverse() {
            Ok(inv) => self.norm_1() * inv.norm_1(),
            Err(_) => T::infinity(),
        }
    }

    /// `tr(A^k)` for `k = 1..=n`; equal lists mean equal spectra (Newton identities).
    pub fn power_traces(&self) -> Vec<Complex<T>> {
        let n = self.dim();
        let mut p = self.clone();
        let mut out = Vec::with_capacity(n);
        out.push(p.trace());
        for _ in 1..n {
            p = &p * self;
            out.push(p.trace());
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.shape(), other.shape());
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).norm()))
    }
}

impl<T: Real> Index<(usize, usize)> for Matrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: Self) -> Matrix<T> {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in add");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect(),
        }
    }
}

impl<T: Real> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: Self) -> Matrix<T> {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in sub");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a - *b).collect(),
        }
    }
}

impl<T: Real> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: Self) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in mul");
        self.mul_unchecked(rhs)
    }
}

impl<T: Real> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.map(|z| -z)
    }
}

impl<T: Real> Add for Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: Self) -> Matrix<T> {
        &self + &rhs
    }
}

impl<T: Real> Sub for Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: Self) -> Matrix<T> {
        &self - &rhs
    }
}

impl<T: Real> Mul for Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: Self) -> Matrix<T> {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn imag_part_of_scalar() {
        let m = Matrix::<f64>::scalar(1, c(0.0, 2.0));
        assert_eq!(m.imag_part()[(0, 0)], c(2.0, 0.0));
        let h = Matrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 1.0)], vec![c(0.0, -1.0), c(2.0, 0.0)]])
            .unwrap();
        assert_eq!(h.imag_part().max_abs(), 0.0);
    }

    #[test]
    fn det_and_inverse_2x2() {
        let m = Matrix::from_rows(&[vec![c(1.0, 1.0), c(2.0, 0.0)], vec![c(0.0, 3.0), c(4.0, 0.0)]])
            .unwrap();
        let det = m.det().unwrap();
        let expected = c(1.0, 1.0) * c(4.0, 0.0) - c(2.0, 0.0) * c(0.0, 3.0);
        assert!((det - expected).norm() < 1e-14);
        let prod = &m * &m.inverse().unwrap();
        assert!(prod.max_abs_diff(&Matrix::identity(2)) < 1e-14);
    }

    #[test]
    fn singular_inverse_fails() {
        let m = Matrix::from_rows(&[vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(2.0, 0.0), c(4.0, 0.0)]])
            .unwrap();
        assert!(matches!(m.inverse(), Err(LinalgError::Singular { .. })));
        assert_eq!(m.det().unwrap(), c(0.0, 0.0));
        assert!(m.cond_1().is_infinite());
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(Matrix::<f64>::from_rows(&[vec![c(1.0, 0.0)], vec![]]).is_none());
    }

    #[test]
    fn predicates() {
        let u = Matrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, 1.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]])
            .unwrap();
        assert!(u.is_unitary(1e-14));
        assert!(!u.is_hermitian(1e-14));
        let p = Matrix::<f64>::from_real_diag(&[2.0, 0.0]);
        assert!(p.is_psd(1e-12));
        assert!(!Matrix::<f64>::from_real_diag(&[2.0, -1.0]).is_psd(1e-12));
    }

    #[test]
    fn works_in_single_precision() {
        let m = Matrix::<f32>::from_real_diag(&[2.0, 4.0]);
        let inv = m.inverse().unwrap();
        assert!((inv[(1, 1)].re - 0.25).abs() < 1e-7);
    }
}
