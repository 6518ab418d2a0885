//! Concrete Weyl functions: free half-line, matrix Schrödinger with a
//! decaying potential, Dirac on the line, point interactions.

mod dirac;
mod free;
pub mod ode;
mod point;
mod schrodinger;

use num_complex::Complex;

pub use dirac::{dirac_m, DiracModel};
pub use free::{free_m, FreeHalfLineModel};
pub use point::{point_interaction_m, PointInteractionModel};
pub use schrodinger::{MatrixSchrodingerModel, Potential};

use crate::cxlinalg::Matrix;
use crate::scalar::{c_i, Real};
use crate::weyl::{branch_sqrt, eval_boundary, BoundaryMode, WeylError, WeylFunction};

/// Constant function `M(λ) = C`. Nevanlinna when `Im C >= 0`; used as a
/// degenerate test case.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantModel<T: Real> {
    pub value: Matrix<T>,
}

impl<T: Real> WeylFunction<T> for ConstantModel<T> {
    fn dim(&self) -> usize {
        self.value.rows()
    }

    fn evaluate(&self, z: Complex<T>) -> Result<Matrix<T>, WeylError> {
        if z.im < T::zero() {
            return Err(WeylError::EvaluationDomain {
                re: z.re.to_f64_lossy(),
                im: z.im.to_f64_lossy(),
                reason: "Weyl functions are evaluated on the closed upper half plane",
            });
        }
        Ok(self.value.clone())
    }
}

/// Every model the crate ships, as one closed type.
#[derive(Debug, Clone)]
pub enum WeylModel<T: Real> {
    Free(FreeHalfLineModel),
    Schrodinger(MatrixSchrodingerModel<T>),
    Dirac(DiracModel<T>),
    PointInteraction(PointInteractionModel<T>),
    Constant(ConstantModel<T>),
    /// Entrywise conjugate of another model; never Nevanlinna.
    Conjugated(Box<WeylModel<T>>),
}

impl<T: Real> WeylModel<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            WeylModel::Free(_) => "free",
            WeylModel::Schrodinger(_) => "schrodinger",
            WeylModel::Dirac(_) => "dirac",
            WeylModel::PointInteraction(_) => "point_interaction",
            WeylModel::Constant(_) => "constant",
            WeylModel::Conjugated(_) => "conjugated",
        }
    }

    fn inner(&self) -> &dyn WeylFunction<T> {
        match self {
            WeylModel::Free(m) => m,
            WeylModel::Schrodinger(m) => m,
            WeylModel::Dirac(m) => m,
            WeylModel::PointInteraction(m) => m,
            WeylModel::Constant(m) => m,
            WeylModel::Conjugated(m) => m.as_ref(),
        }
    }
}

impl<T: Real> WeylFunction<T> for WeylModel<T> {
    fn dim(&self) -> usize {
        self.inner().dim()
    }

    fn evaluate(&self, z: Complex<T>) -> Result<Matrix<T>, WeylError> {
        match self {
            WeylModel::Conjugated(m) => Ok(m.evaluate(z)?.conj()),
            other => other.inner().evaluate(z),
        }
    }

    fn boundary_mode(&self, lambda: T) -> BoundaryMode<T> {
        self.inner().boundary_mode(lambda)
    }

    fn singular_points(&self) -> Vec<T> {
        self.inner().singular_points()
    }
}

/// `‖M(λ + i0) - i√λ I‖_F` for each `λ`, for the free and Schrödinger
/// models.
pub fn asymptotic_check<T: Real>(model: &WeylModel<T>, lambdas: &[T]) -> Result<Vec<T>, WeylError> {
    if !matches!(model, WeylModel::Free(_) | WeylModel::Schrodinger(_)) {
        return Err(WeylError::WrongModelKind {
            expected: "free or Schrödinger",
        });
    }
    if lambdas.iter().any(|&l| !(l > T::zero())) || lambdas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(WeylError::InvalidModel("asymptotic check needs positive ascending λ".into()));
    }
    let n = model.dim();
    lambdas
        .iter()
        .map(|&l| {
            let m = eval_boundary(model, l)?;
            let free = Matrix::scalar(n, c_i::<T>() * branch_sqrt(Complex::new(l, T::zero())));
            Ok((&m - &free).norm_fro())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::validate_nevanlinna;
    use num_complex::Complex64;

    #[test]
    fn asymptotic_check_guards_kind() {
        let d = WeylModel::Dirac(DiracModel::new(1.0).unwrap());
        assert!(matches!(asymptotic_check(&d, &[1.0]), Err(WeylError::WrongModelKind { .. })));
        let f = WeylModel::<f64>::Free(FreeHalfLineModel::new(1).unwrap());
        assert!(asymptotic_check(&f, &[1.0, 4.0]).unwrap().iter().all(|&d| d == 0.0));
    }

    #[test]
    fn conjugated_model_fails_validation() {
        let grid = [Complex64::new(0.0, 1.0), Complex64::new(1.0, 1.0), Complex64::new(-3.0, 2.0)];
        let d = WeylModel::Dirac(DiracModel::new(1.0).unwrap());
        assert!(validate_nevanlinna(&d, &grid).passed());
        let bad = WeylModel::Conjugated(Box::new(d));
        assert_eq!(validate_nevanlinna(&bad, &grid).violations.len(), 2 * grid.len());
    }
}
