use num_complex::Complex;

use super::WeylModel;
use crate::cxlinalg::Matrix;
use crate::scalar::Real;
use crate::weyl::{BoundaryMode, WeylError, WeylFunction};

/// Point interaction at the origin of `-Δ + Q` in three dimensions, reduced
/// to a half-line model: `M_H(λ) = I + M_A(λ)`.
#[derive(Debug, Clone)]
pub struct PointInteractionModel<T: Real> {
    pub inner: Box<WeylModel<T>>,
}

impl<T: Real> PointInteractionModel<T> {
    pub fn new(inner: WeylModel<T>) -> Self {
        Self { inner: Box::new(inner) }
    }
}

pub fn point_interaction_m<T: Real, W: WeylFunction<T> + ?Sized>(
    inner: &W,
    lambda: Complex<T>,
) -> Result<Matrix<T>, WeylError> {
    let m = inner.evaluate(lambda)?;
    Ok(&Matrix::identity(m.dim()) + &m)
}

impl<T: Real> WeylFunction<T> for PointInteractionModel<T> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn evaluate(&self, z: Complex<T>) -> Result<Matrix<T>, WeylError> {
        point_interaction_m(self.inner.as_ref(), z)
    }

    fn boundary_mode(&self, lambda: T) -> BoundaryMode<T> {
        self.inner.boundary_mode(lambda)
    }

    fn singular_points(&self) -> Vec<T> {
        self.inner.singular_points()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::FreeHalfLineModel;
    use num_complex::Complex64;

    #[test]
    fn free_inner() {
        let inner = WeylModel::Free(FreeHalfLineModel::new(2).unwrap());
        let m = point_interaction_m(&inner, Complex64::new(4.0, 0.0)).unwrap();
        assert_eq!(m, Matrix::scalar(2, Complex64::new(1.0, 2.0)));
        let m = point_interaction_m(&inner, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(m, Matrix::identity(2));
        let z = Complex64::i();
        let m = point_interaction_m(&inner, z).unwrap();
        let expected = Complex64::i() * Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4) + 1.0;
        assert!((m[(0, 0)] - expected).norm() < 1e-15);
    }
}
