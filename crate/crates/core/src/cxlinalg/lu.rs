use num_complex::Complex;
use num_traits::Zero;

use super::{LinalgError, Matrix};
use crate::scalar::Real;

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu<T: Real> {
    lu: Matrix<T>,
    perm: Vec<usize>,
    sign: T,
}

impl<T: Real> Lu<T> {
    pub fn factor(a: &Matrix<T>) -> Result<Self, LinalgError> {
        let n = a.ensure_square()?;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = T::one();
        // Pivots below this are treated as exact zeros; conditioning is judged by callers.
        let floor = T::min_positive_value() / T::epsilon();

        for k in 0..n {
            let (p, pmag) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pmag > floor) {
                return Err(LinalgError::Singular { pivot: k });
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor.is_zero() {
                    continue;
                }
                for j in (k + 1)..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= factor * u;
                }
            }
        }
        Ok(Self { lu, perm, sign })
    }

    pub fn det(&self) -> Complex<T> {
        let n = self.lu.rows();
        (0..n).fold(Complex::new(self.sign, T::zero()), |acc, i| acc * self.lu[(i, i)])
    }

    /// Solves `A X = B` for a matrix right-hand side.
    pub fn solve(&self, b: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
        let n = self.lu.rows();
        if b.rows() != n {
            return Err(LinalgError::DimensionMismatch {
                left: self.lu.shape(),
                right: b.shape(),
            });
        }
        let m = b.cols();
        let mut x = Matrix::from_fn(n, m, |i, j| b[(self.perm[i], j)]);
        for col in 0..m {
            for i in 0..n {
                let mut s = x[(i, col)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, col)];
                }
                x[(i, col)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, col)];
                for k in (i + 1)..n {
                    s -= self.lu[(i, k)] * x[(k, col)];
                }
                x[(i, col)] = s / self.lu[(i, i)];
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Matrix<T>, LinalgError> {
        self.solve(&Matrix::identity(self.lu.rows()))
    }
}

impl<T: Real> Matrix<T> {
    /// `self * rhs^{-1}` computed as a solve against the adjoint system.
    pub fn right_divide(&self, rhs: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
        // X rhs = self  <=>  rhs* X* = self*
        let lu = Lu::factor(&rhs.adjoint())?;
        Ok(lu.solve(&self.adjoint())?.adjoint())
    }

    /// `self^{-1} rhs`.
    pub fn left_solve(&self, rhs: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
        Lu::factor(self)?.solve(rhs)
    }
}
