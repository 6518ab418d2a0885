//! Selfadjoint boundary parameters `Θ` in `Cⁿ` and the factor `(Θ - M)^{-1}`.

use crate::cxlinalg::{herm_eig, smallest_singular_value, LinalgError, Lu, Matrix};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RelationError {
    #[error("Θ - M(λ) is not invertible (condition number {cond:e}); λ is a spectral point")]
    SpectralPoint { cond: f64 },
    #[error("dimension mismatch: boundary parameter is {expected}x{expected}, argument is {found:?}")]
    DimensionMismatch { expected: usize, found: (usize, usize) },
    #[error("boundary parameter is a multivalued relation, not an operator")]
    NotOperator,
    #[error("malformed boundary parameter: {0}")]
    Malformed(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Condition numbers above this count as singular in [`relation_resolvent`].
pub const SPECTRAL_COND_CAP: f64 = 1e14;

/// A selfadjoint relation `Θ` in `Cⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryParameter<T: Real> {
    /// Bounded Hermitian `Θ`.
    Matrix(Matrix<T>),
    /// `Θ = {(u, v) : A u = B v}`.
    KernelPair { a: Matrix<T>, b: Matrix<T> },
}

impl<T: Real> BoundaryParameter<T> {
    pub fn matrix(theta: Matrix<T>) -> Result<Self, RelationError> {
        if !theta.is_square() || theta.rows() == 0 {
            return Err(RelationError::Malformed(format!("Θ must be square, got {:?}", theta.shape())));
        }
        Ok(BoundaryParameter::Matrix(theta))
    }

    pub fn kernel_pair(a: Matrix<T>, b: Matrix<T>) -> Result<Self, RelationError> {
        if !a.is_square() || a.rows() == 0 || a.shape() != b.shape() {
            return Err(RelationError::Malformed(format!(
                "A and B must be square of equal size, got {:?} and {:?}",
                a.shape(),
                b.shape()
            )));
        }
        Ok(BoundaryParameter::KernelPair { a, b })
    }

    /// `Θ = {0} × Cⁿ`, i.e. `A = I`, `B = 0`: the extension is `A₀` itself.
    pub fn unperturbed(n: usize) -> Self {
        BoundaryParameter::KernelPair {
            a: Matrix::identity(n),
            b: Matrix::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            BoundaryParameter::Matrix(t) => t.rows(),
            BoundaryParameter::KernelPair { a, .. } => a.rows(),
        }
    }

    /// Same relation with `(A | B)` rescaled to orthonormal rows,
    /// `X = (A A* + B B*)^{-1/2}`. Matrix parameters become `(Θ, I)`.
    pub fn normalized(&self) -> Result<(Matrix<T>, Matrix<T>), RelationError> {
        let (a, b) = self.as_pair();
        let gram = &(&a * &a.adjoint()) + &(&b * &b.adjoint());
        let eig = herm_eig(&gram.hermitian_part(), T::one())?;
        let floor = T::lit(1e-12) * T::one().max(eig.eigenvalues[eig.eigenvalues.len() - 1]);
        if !(eig.eigenvalues[0] > floor) {
            return Err(RelationError::Malformed("rank of (A | B) is below n".into()));
        }
        let x = eig.apply(|w| T::one() / w.sqrt());
        Ok((&x * &a, &x * &b))
    }

    fn as_pair(&self) -> (Matrix<T>, Matrix<T>) {
        match self {
            BoundaryParameter::Matrix(t) => (t.clone(), Matrix::identity(t.rows())),
            BoundaryParameter::KernelPair { a, b } => (a.clone(), b.clone()),
        }
    }

    /// Single valued iff `ker B = {0}`.
    pub fn is_operator(&self) -> bool {
        match self {
            BoundaryParameter::Matrix(_) => true,
            BoundaryParameter::KernelPair { b, .. } => {
                let smin = smallest_singular_value(b).unwrap_or_else(|_| T::zero());
                smin > T::lit(1e-12) * T::one().max(b.norm_2())
            }
        }
    }

    /// The operator `Θ = B^{-1} A`, or `NotOperator`.
    pub fn as_operator(&self) -> Result<Matrix<T>, RelationError> {
        match self {
            BoundaryParameter::Matrix(t) => Ok(t.clone()),
            BoundaryParameter::KernelPair { a, b } => {
                if !self.is_operator() {
                    return Err(RelationError::NotOperator);
                }
                Ok(b.left_solve(a)?)
            }
        }
    }
}

/// `(Θ - M)^{-1}` together with the 1-norm condition number of the matrix
/// that was inverted.
pub fn relation_resolvent_with_cond<T: Real>(
    theta: &BoundaryParameter<T>,
    m: &Matrix<T>,
) -> Result<(Matrix<T>, T), RelationError> {
    let n = theta.dim();
    if m.shape() != (n, n) {
        return Err(RelationError::DimensionMismatch {
            expected: n,
            found: m.shape(),
        });
    }
    let (lhs, rhs) = match theta {
        BoundaryParameter::Matrix(t) => (t - m, None),
        BoundaryParameter::KernelPair { a, b } => (a - &(b * m), Some(b)),
    };
    let cond = lhs.cond_1();
    let spectral = || RelationError::SpectralPoint {
        cond: cond.to_f64_lossy(),
    };
    if !(cond <= T::lit(SPECTRAL_COND_CAP)) {
        return Err(spectral());
    }
    let lu = Lu::factor(&lhs).map_err(|_| spectral())?;
    let out = match rhs {
        None => lu.inverse(),
        Some(b) => lu.solve(b),
    }
    .map_err(|_| spectral())?;
    Ok((out, cond))
}

/// `(Θ - M)^{-1}`; for a kernel pair this is `(A - B M)^{-1} B`.
pub fn relation_resolvent<T: Real>(theta: &BoundaryParameter<T>, m: &Matrix<T>) -> Result<Matrix<T>, RelationError> {
    relation_resolvent_with_cond(theta, m).map(|(r, _)| r)
}

#[derive(Debug, Clone, PartialEq)]
pub enum RelationViolation {
    /// `‖Θ - Θ*‖` or `‖A B* - B A*‖` above tolerance.
    NotSymmetric { residual: f64 },
    /// `rank (A | B) < n`.
    RankDeficient { rank: usize },
    NonFinite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfAdjointReport {
    pub symmetry_residual: f64,
    pub rank: usize,
    pub violations: Vec<RelationViolation>,
}

impl SelfAdjointReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_selfadjoint<T: Real>(theta: &BoundaryParameter<T>) -> SelfAdjointReport {
    let n = theta.dim();
    let tol = T::lit(1e-12);
    let (a, b) = theta.as_pair();
    let mut violations = Vec::new();

    if a.as_slice().iter().chain(b.as_slice()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return SelfAdjointReport {
            symmetry_residual: f64::NAN,
            rank: 0,
            violations: vec![RelationViolation::NonFinite],
        };
    }

    let (residual, scale) = match theta {
        BoundaryParameter::Matrix(t) => ((t - &t.adjoint()).norm_fro(), T::one().max(t.norm_fro())),
        BoundaryParameter::KernelPair { a, b } => {
            let ab = a * &b.adjoint();
            ((&ab - &ab.adjoint()).norm_fro(), T::one().max(a.norm_fro() * b.norm_fro()))
        }
    };
    if residual > tol * scale {
        violations.push(RelationViolation::NotSymmetric {
            residual: residual.to_f64_lossy(),
        });
    }

    let gram = &(&a * &a.adjoint()) + &(&b * &b.adjoint());
    let rank = match herm_eig(&gram.hermitian_part(), T::one()) {
        Ok(e) => {
            let top = e.eigenvalues[n - 1];
            let floor = tol * T::one().max(top);
            e.eigenvalues.iter().filter(|&&w| w > floor).count()
        }
        Err(_) => 0,
    };
    if rank < n {
        violations.push(RelationViolation::RankDeficient { rank });
    }

    SelfAdjointReport {
        symmetry_residual: residual.to_f64_lossy(),
        rank,
        violations,
    }
}
