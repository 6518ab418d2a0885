//! Matrix Nevanlinna (Weyl) functions: evaluation in the upper half plane,
//! boundary values on the real axis, numerical derivatives and validation.

use num_complex::Complex;

use crate::cxlinalg::{herm_eig, LinalgError, Matrix};
use crate::scalar::{cx, Real};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WeylError {
    #[error("evaluation point {re} + {im}i is outside the model's domain: {reason}")]
    EvaluationDomain { re: f64, im: f64, reason: &'static str },
    #[error("boundary value undefined at declared singular point {lambda}")]
    SingularPoint { lambda: f64 },
    #[error("band edge at {lambda}")]
    BandEdge { lambda: f64 },
    #[error("epsilon extrapolation error {error:e} exceeds {limit:e}")]
    BoundaryLimitFailed { error: f64, limit: f64 },
    #[error("ODE step size underflow at x = {x}")]
    StepFailure { x: f64 },
    #[error("potential tail beyond x_max is {tail:e}, above ode_tol {tol:e}")]
    Truncation { tail: f64, tol: f64 },
    #[error("Jost matrix E(0) is (near) singular: condition number {cond:e}")]
    SingularJost { cond: f64 },
    #[error("operation needs a {expected} model")]
    WrongModelKind { expected: &'static str },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// How real-axis boundary values are obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryMode<T: Real> {
    /// The model formula extends continuously to the real point.
    Direct,
    /// Evaluate at `λ + iε` for `ε = ε0, ε0/2, ε0/4` and extrapolate to zero.
    EpsilonLimit { eps0: T },
}

/// A matrix-valued Nevanlinna function `M(λ)` of a boundary triplet.
pub trait WeylFunction<T: Real>: Send + Sync {
    /// Size `n` of the values (the deficiency index).
    fn dim(&self) -> usize;

    /// Evaluates the model's formula at `z` with `Im z >= 0`. For real `z`
    /// this is the boundary value `M(z + i0)` where the formula extends.
    fn evaluate(&self, z: Complex<T>) -> Result<Matrix<T>, WeylError>;

    fn boundary_mode(&self, _lambda: T) -> BoundaryMode<T> {
        BoundaryMode::Direct
    }

    /// Real points where boundary values are not defined.
    fn singular_points(&self) -> Vec<T> {
        Vec::new()
    }
}

impl<T: Real, W: WeylFunction<T> + ?Sized> WeylFunction<T> for Box<W> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn evaluate(&self, z: Complex<T>) -> Result<Matrix<T>, WeylError> {
        (**self).evaluate(z)
    }
    fn boundary_mode(&self, lambda: T) -> BoundaryMode<T> {
        (**self).boundary_mode(lambda)
    }
    fn singular_points(&self) -> Vec<T> {
        (**self).singular_points()
    }
}

/// Square root with the cut along `[0, ∞)`: `Im √z > 0` off the cut and
/// `√z >= 0` on it.
pub fn branch_sqrt<T: Real>(z: Complex<T>) -> Complex<T> {
    if z.im.is_zero() {
        return if z.re >= T::zero() {
            cx(z.re.sqrt(), T::zero())
        } else {
            cx(T::zero(), (-z.re).sqrt())
        };
    }
    let r = z.sqrt();
    if r.im < T::zero() {
        -r
    } else {
        r
    }
}

fn domain_error<T: Real>(z: Complex<T>, reason: &'static str) -> WeylError {
    WeylError::EvaluationDomain {
        re: z.re.to_f64_lossy(),
        im: z.im.to_f64_lossy(),
        reason,
    }
}

/// `M(z)` for `Im z > 0`.
pub fn eval_upper<T: Real, W: WeylFunction<T> + ?Sized>(model: &W, z: Complex<T>) -> Result<Matrix<T>, WeylError> {
    if !(z.im > T::zero()) {
        return Err(domain_error(z, "upper half plane evaluation needs Im z > 0"));
    }
    model.evaluate(z)
}

fn check_singular<T: Real, W: WeylFunction<T> + ?Sized>(model: &W, lambda: T) -> Result<(), WeylError> {
    let tiny = T::lit(1e-12);
    for p in model.singular_points() {
        if (lambda - p).abs() <= tiny * T::one().max(p.abs()) {
            return Err(WeylError::SingularPoint {
                lambda: lambda.to_f64_lossy(),
            });
        }
    }
    Ok(())
}

/// Boundary value `M(λ + i0)` together with an error estimate (zero in
/// direct mode).
pub fn eval_boundary_with_estimate<T: Real, W: WeylFunction<T> + ?Sized>(
    model: &W,
    lambda: T,
) -> Result<(Matrix<T>, T), WeylError> {
    check_singular(model, lambda)?;
    match model.boundary_mode(lambda) {
        BoundaryMode::Direct => Ok((model.evaluate(cx(lambda, T::zero()))?, T::zero())),
        BoundaryMode::EpsilonLimit { eps0 } => eval_boundary_epsilon(model, lambda, eps0),
    }
}

/// `M(λ + i0)`.
pub fn eval_boundary<T: Real, W: WeylFunction<T> + ?Sized>(model: &W, lambda: T) -> Result<Matrix<T>, WeylError> {
    eval_boundary_with_estimate(model, lambda).map(|(m, _)| m)
}

/// Richardson extrapolation of `M(λ + iε)` from `ε0, ε0/2, ε0/4` to `ε = 0`.
pub fn eval_boundary_epsilon<T: Real, W: WeylFunction<T> + ?Sized>(
    model: &W,
    lambda: T,
    eps0: T,
) -> Result<(Matrix<T>, T), WeylError> {
    check_singular(model, lambda)?;
    let two = T::lit(2.0);
    let f0 = model.evaluate(cx(lambda, eps0))?;
    let f1 = model.evaluate(cx(lambda, eps0 / two))?;
    let f2 = model.evaluate(cx(lambda, eps0 / (two * two)))?;
    // first-order eliminations, then the second-order combination
    let a1 = &f1.scale_real(two) - &f0;
    let a2 = &f2.scale_real(two) - &f1;
    let value = (&a2.scale_real(T::lit(4.0)) - &a1).scale_real(T::one() / T::lit(3.0));
    let error = (&value - &a2).norm_fro();
    let limit = T::lit(1e-6) * T::one().max(value.norm_fro());
    if error > limit {
        return Err(WeylError::BoundaryLimitFailed {
            error: error.to_f64_lossy(),
            limit: limit.to_f64_lossy(),
        });
    }
    Ok((value, error))
}

/// Default finite-difference step `1e-5 * max(1, |z|)`.
pub fn default_step<T: Real>(z: Complex<T>) -> T {
    T::lit(1e-5) * T::one().max(z.norm())
}

/// Central difference `(M(z + h) - M(z - h)) / 2h` along the real direction.
pub fn derivative<T: Real, W: WeylFunction<T> + ?Sized>(model: &W, z: Complex<T>, h: T) -> Result<Matrix<T>, WeylError> {
    if !(z.im > h + h) || !(h > T::zero()) {
        return Err(domain_error(z, "derivative needs Im z > 2h and h > 0"));
    }
    let plus = eval_upper(model, z + cx(h, T::zero()))?;
    let minus = eval_upper(model, z - cx(h, T::zero()))?;
    Ok((&plus - &minus).scale_real(T::one() / (h + h)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// `Im M(λ)` has an eigenvalue `<= 0`.
    NotPositiveDefinite,
    /// `Im M(λ) / Im λ` is not positive semidefinite.
    NotMonotone,
    EvaluationFailed,
    /// Grid point not in the open upper half plane.
    BadSample,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NevanlinnaViolation<T: Real> {
    pub point: Complex<T>,
    pub kind: ViolationKind,
    pub min_eigenvalue: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NevanlinnaReport<T: Real> {
    pub points_tested: usize,
    pub min_eigenvalue: T,
    pub violations: Vec<NevanlinnaViolation<T>>,
}

impl<T: Real> NevanlinnaReport<T> {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `Im M(λ) > 0` and `Im M(λ)/Im λ >= 0` at every sample.
pub fn validate_nevanlinna<T: Real, W: WeylFunction<T> + ?Sized>(model: &W, grid: &[Complex<T>]) -> NevanlinnaReport<T> {
    let mut violations = Vec::new();
    let mut global_min = T::infinity();
    for &z in grid {
        if !(z.im > T::zero()) {
            violations.push(NevanlinnaViolation {
                point: z,
                kind: ViolationKind::BadSample,
                min_eigenvalue: T::nan(),
            });
            continue;
        }
        let value = match eval_upper(model, z) {
            Ok(v) => v,
            Err(_) => {
                violations.push(NevanlinnaViolation {
                    point: z,
                    kind: ViolationKind::EvaluationFailed,
                    min_eigenvalue: T::nan(),
                });
                continue;
            }
        };
        let im = value.imag_part();
        let min_eig = match herm_eig(&im, T::one()) {
            Ok(e) => e.eigenvalues[0],
            Err(_) => T::nan(),
        };
        global_min = global_min.min(min_eig);
        if !(min_eig > T::zero()) {
            violations.push(NevanlinnaViolation {
                point: z,
                kind: ViolationKind::NotPositiveDefinite,
                min_eigenvalue: min_eig,
            });
        }
        let scaled = im.scale_real(T::one() / z.im);
        let scaled_min = herm_eig(&scaled, T::one()).map(|e| e.eigenvalues[0]).unwrap_or_else(|_| T::nan());
        if !(scaled_min >= T::zero()) {
            violations.push(NevanlinnaViolation {
                point: z,
                kind: ViolationKind::NotMonotone,
                min_eigenvalue: scaled_min,
            });
        }
    }
    NevanlinnaReport {
        points_tested: grid.len(),
        min_eigenvalue: global_min,
        violations,
    }
}

/// Diagnostic wrapper returning `conj(M(λ))` entrywise; flips the sign of
/// `Im M` and therefore fails every Nevanlinna check.
#[derive(Debug, Clone)]
pub struct Conjugated<W>(pub W);

impl<T: Real, W: WeylFunction<T>> WeylFunction<T> for Conjugated<W> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn evaluate(&self, z: Complex<T>) -> Result<Matrix<T>, WeylError> {
        Ok(self.0.evaluate(z)?.conj())
    }
    fn boundary_mode(&self, lambda: T) -> BoundaryMode<T> {
        self.0.boundary_mode(lambda)
    }
    fn singular_points(&self) -> Vec<T> {
        self.0.singular_points()
    }
}
