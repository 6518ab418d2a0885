use num_complex::Complex;

use crate::cxlinalg::Matrix;
use crate::scalar::{c_i, Real};
use crate::weyl::{branch_sqrt, WeylError, WeylFunction};

/// Free half-line Schrödinger operator with `n` channels, `M(λ) = i√λ I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeHalfLineModel {
    pub dim: usize,
}

impl FreeHalfLineModel {
    pub fn new(dim: usize) -> Result<Self, WeylError> {
        if dim == 0 {
            return Err(WeylError::InvalidModel("free model needs n >= 1".into()));
        }
        Ok(Self { dim })
    }
}

/// `i√λ I_n` for `Im λ >= 0`.
pub fn free_m<T: Real>(n: usize, lambda: Complex<T>) -> Result<Matrix<T>, WeylError> {
    if lambda.im < T::zero() {
        return Err(WeylError::EvaluationDomain {
            re: lambda.re.to_f64_lossy(),
            im: lambda.im.to_f64_lossy(),
            reason: "Weyl functions are evaluated on the closed upper half plane",
        });
    }
    Ok(Matrix::scalar(n, c_i::<T>() * branch_sqrt(lambda)))
}

impl<T: Real> WeylFunction<T> for FreeHalfLineModel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn evaluate(&self, z: Complex<T>) -> Result<Matrix<T>, WeylError> {
        free_m(self.dim, z)
    }

    fn singular_points(&self) -> Vec<T> {
        vec![T::zero()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn examples() {
        let m = free_m::<f64>(1, Complex64::new(4.0, 0.0)).unwrap();
        assert_eq!(m[(0, 0)], Complex64::new(0.0, 2.0));
        let m = free_m::<f64>(2, Complex64::new(-1.0, 0.0)).unwrap();
        assert_eq!(m, Matrix::scalar(2, Complex64::new(-1.0, 0.0)));
        let m = free_m::<f64>(1, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(m[(0, 0)], Complex64::new(0.0, 0.0));
        assert!(free_m::<f64>(1, Complex64::new(1.0, -1.0)).is_err());
    }
}
