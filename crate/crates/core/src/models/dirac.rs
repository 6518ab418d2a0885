use num_complex::Complex;

use crate::cxlinalg::Matrix;
use crate::scalar::{c_i, Real};
use crate::weyl::{branch_sqrt, WeylError, WeylFunction};

/// One-dimensional Dirac operator with mass `a`, two boundary channels at
/// the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracModel<T: Real> {
    pub mass: T,
}

impl<T: Real> DiracModel<T> {
    pub fn new(mass: T) -> Result<Self, WeylError> {
        if !(mass > T::zero()) || !mass.is_finite() {
            return Err(WeylError::InvalidModel(format!("Dirac mass must be positive, got {mass}")));
        }
        Ok(Self { mass })
    }
}

/// `diag(i√(λ+a)/√(λ-a), i√(λ-a)/√(λ+a))`, each root with the cut along
/// `[0, ∞)`.
///
/// Real inside the gap `(-a, a)`, purely imaginary on `|λ| > a`.
pub fn dirac_m<T: Real>(mass: T, lambda: Complex<T>) -> Result<Matrix<T>, WeylError> {
    if lambda.im < T::zero() {
        return Err(WeylError::EvaluationDomain {
            re: lambda.re.to_f64_lossy(),
            im: lambda.im.to_f64_lossy(),
            reason: "Weyl functions are evaluated on the closed upper half plane",
        });
    }
    if lambda.im.is_zero() && lambda.re.abs() == mass {
        return Err(WeylError::BandEdge {
            lambda: lambda.re.to_f64_lossy(),
        });
    }
    let plus = branch_sqrt(lambda + mass);
    let minus = branch_sqrt(lambda - mass);
    let i = c_i::<T>();
    Ok(Matrix::from_diag(&[i * plus / minus, i * minus / plus]))
}

impl<T: Real> WeylFunction<T> for DiracModel<T> {
    fn dim(&self) -> usize {
        2
    }

    fn evaluate(&self, z: Complex<T>) -> Result<Matrix<T>, WeylError> {
        dirac_m(self.mass, z)
    }

    fn singular_points(&self) -> Vec<T> {
        vec![-self.mass, self.mass]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn real(l: f64) -> Complex64 {
        Complex64::new(l, 0.0)
    }

    #[test]
    fn above_band() {
        let m = dirac_m(1.0, real(5.0)).unwrap();
        assert!((m[(0, 0)] - Complex64::new(0.0, 1.224_744_871)).norm() < 1e-6);
        assert!((m[(1, 1)] - Complex64::new(0.0, 0.816_496_581)).norm() < 1e-6);
        assert_eq!(m[(0, 1)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn inside_gap_is_real() {
        let m = dirac_m(1.0, real(0.5)).unwrap();
        assert_eq!(m.imag_part().max_abs(), 0.0);
        // increasing Nevanlinna branches: first channel positive, second negative
        assert!(m[(0, 0)].re > 0.0 && m[(1, 1)].re < 0.0);
    }

    #[test]
    fn below_band() {
        let m = dirac_m(1.0, real(-5.0)).unwrap();
        assert!((m[(0, 0)].im - (4.0f64 / 6.0).sqrt()).abs() < 1e-12);
        assert!((m[(1, 1)].im - (6.0f64 / 4.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn band_edges_rejected() {
        assert!(matches!(dirac_m(1.0, real(1.0)), Err(WeylError::BandEdge { .. })));
        assert!(matches!(dirac_m(1.0, real(-1.0)), Err(WeylError::BandEdge { .. })));
    }

    #[test]
    fn at_i() {
        let z = Complex64::i();
        let m = dirac_m(1.0, z).unwrap();
        let e1 = Complex64::i() * branch_sqrt(z + 1.0) / branch_sqrt(z - 1.0);
        assert!((m[(0, 0)] - e1).norm() < 1e-15);
        assert!(m[(0, 0)].im > 0.0 && m[(1, 1)].im > 0.0);
    }
}
