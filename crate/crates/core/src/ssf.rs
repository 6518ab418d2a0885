//! Spectral shift function `ξ_Θ(λ) = (1/π) Im tr log(M(λ + i0) - Θ)` and
//! the identities it satisfies.

use num_complex::Complex;

use crate::cxlinalg::{herm_eig, matlog_integral, LinalgError, Matrix};
use crate::quadrature::QuadratureConfig;
use crate::relation::{BoundaryParameter, RelationError};
use crate::scalar::{cx, Real};
use crate::scattering::{smatrix, ScatteringError, ScatteringPoint};
use crate::weyl::{derivative, eval_boundary, eval_upper, WeylError, WeylFunction};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SsfError {
    #[error("the spectral shift function needs an operator boundary parameter")]
    NotOperator,
    #[error("λ = {lambda} is a threshold where the closed form is undefined")]
    ThresholdPoint { lambda: f64 },
    #[error("M(λ) - Θ is (near) singular")]
    SingularArgument,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Weyl(#[from] WeylError),
    #[error(transparent)]
    Scattering(#[from] ScatteringError),
}

impl From<RelationError> for SsfError {
    fn from(e: RelationError) -> Self {
        match e {
            RelationError::NotOperator => SsfError::NotOperator,
            other => SsfError::Scattering(ScatteringError::Relation(other)),
        }
    }
}

/// `‖Im M‖ <= GAP_TOL * max(1, ‖M‖)` classifies a point as a gap.
pub const GAP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `Im M(λ + i0) != 0`.
    Ac,
    /// `Im M(λ + i0) = 0`.
    Gap,
    /// Boundary value or resolvent unavailable.
    Singular,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Ac => "AC",
            Regime::Gap => "Gap",
            Regime::Singular => "Singular",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsfPoint<T: Real> {
    pub lambda: T,
    pub xi: T,
    /// `|det S - exp(-2πi ξ)|`.
    pub bk_residual: T,
    pub regime: Regime,
}

pub fn classify<T: Real>(m: &Matrix<T>) -> Regime {
    let im = m.imag_part().norm_fro();
    if im <= T::lit(GAP_TOL) * T::one().max(m.norm_fro()) {
        Regime::Gap
    } else {
        Regime::Ac
    }
}

fn operator_of<T: Real>(theta: &BoundaryParameter<T>, n: usize) -> Result<Matrix<T>, SsfError> {
    let t = theta.as_operator()?;
    if t.shape() != (n, n) {
        return Err(RelationError::DimensionMismatch {
            expected: t.rows(),
            found: (n, n),
        }
        .into());
    }
    Ok(t)
}

/// `(1/π) Im tr log(M - Θ)` through the integral logarithm.
pub fn xi<T: Real>(m: &Matrix<T>, theta: &BoundaryParameter<T>, quad: &QuadratureConfig<T>) -> Result<T, SsfError> {
    let n = m.ensure_square()?;
    let t = operator_of(theta, n)?;
    let log = matlog_integral(&(m - &t), quad)?;
    Ok(log.trace().im / T::PI())
}

/// `|det S - exp(-2πi ξ)|`.
pub fn birman_krein_residual<T: Real>(sp: &ScatteringPoint<T>, xi: T) -> T {
    let phase = -(T::PI() + T::PI()) * xi;
    (sp.det_s - Complex::from_polar(T::one(), phase)).norm()
}

fn free_channel<T: Real>(theta: T, lambda: T) -> T {
    let pi = T::PI();
    if lambda > T::zero() {
        let root = lambda.sqrt();
        if theta > T::zero() {
            T::one() - (root / theta).atan() / pi
        } else if theta < T::zero() {
            (root / -theta).atan() / pi
        } else {
            T::lit(0.5)
        }
    } else if theta >= T::zero() || lambda < -theta * theta {
        T::one()
    } else {
        T::zero()
    }
}

/// Closed form for the free half-line model, summed over the eigenvalues of
/// `Θ`.
pub fn xi_closed_form_free<T: Real>(theta_eigs: &[T], lambda: T) -> Result<T, SsfError> {
    let threshold = || SsfError::ThresholdPoint {
        lambda: lambda.to_f64_lossy(),
    };
    if lambda.is_zero() {
        return Err(threshold());
    }
    if theta_eigs.iter().any(|&t| t < T::zero() && lambda == -t * t) {
        return Err(threshold());
    }
    Ok(theta_eigs.iter().fold(T::zero(), |acc, &t| acc + free_channel(t, lambda)))
}

/// Gap threshold of the first Dirac channel, `a (θ² - 1) / (θ² + 1)`.
pub fn dirac_threshold_1<T: Real>(a: T, theta: T) -> T {
    let t2 = theta * theta;
    a * (t2 - T::one()) / (t2 + T::one())
}

/// Gap threshold of the second Dirac channel, `a (1 - θ²) / (1 + θ²)`.
pub fn dirac_threshold_2<T: Real>(a: T, theta: T) -> T {
    -dirac_threshold_1(a, theta)
}

fn ac_channel<T: Real>(theta: T, r: T) -> T {
    let pi = T::PI();
    if theta > T::zero() {
        T::one() - (r / theta).atan() / pi
    } else if theta < T::zero() {
        (r / -theta).atan() / pi
    } else {
        T::lit(0.5)
    }
}

/// Closed form for the Dirac model with diagonal `Θ = diag(θ1, θ2)`.
///
/// On `|λ| > a` channel `j` contributes `(1/π) arg(i r_j - θ_j)` with
/// `r_1 = √|(λ+a)/(λ-a)|`, `r_2 = 1/r_1`. Inside the gap channel 1 counts 1
/// iff `θ1 > 0` and `λ < a(θ1²-1)/(θ1²+1)`; channel 2 counts 1 iff `θ2 >= 0`
/// or `λ < a(1-θ2²)/(1+θ2²)`.
pub fn xi_closed_form_dirac<T: Real>(a: T, theta1: T, theta2: T, lambda: T) -> Result<T, SsfError> {
    let t1 = dirac_threshold_1(a, theta1);
    let t2 = dirac_threshold_2(a, theta2);
    if lambda == a || lambda == -a || lambda == t1 || lambda == t2 {
        return Err(SsfError::ThresholdPoint {
            lambda: lambda.to_f64_lossy(),
        });
    }
    if lambda.abs() > a {
        let r1 = ((lambda + a) / (lambda - a)).abs().sqrt();
        Ok(ac_channel(theta1, r1) + ac_channel(theta2, T::one() / r1))
    } else {
        let c1 = if theta1 > T::zero() && lambda < t1 { T::one() } else { T::zero() };
        let c2 = if theta2 >= T::zero() || lambda < t2 { T::one() } else { T::zero() };
        Ok(c1 + c2)
    }
}

/// Number of negative eigenvalues of the Hermitian matrix `M - Θ`.
pub fn gap_count<T: Real>(m: &Matrix<T>, theta: &BoundaryParameter<T>) -> Result<usize, SsfError> {
    let n = m.ensure_square()?;
    let t = operator_of(theta, n)?;
    let diff = (m - &t).hermitian_part();
    let eig = herm_eig(&diff, T::one())?;
    let floor = T::lit(1e-12) * T::one().max(diff.norm_fro());
    if eig.eigenvalues.iter().any(|w| w.abs() <= floor) {
        return Err(SsfError::SingularArgument);
    }
    Ok(eig.eigenvalues.iter().filter(|&&w| w < T::zero()).count())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceFormulaResult<T: Real> {
    /// Central difference of `tr log(M(·) - Θ)`.
    pub lhs: Complex<T>,
    /// `tr((M(λ) - Θ)^{-1} M'(λ))`.
    pub rhs: Complex<T>,
    pub residual: T,
}

/// Compares `d/dλ tr log(M(λ) - Θ)` with `tr((M(λ) - Θ)^{-1} M'(λ))`, both
/// by central differences with step `h` along the real axis.
pub fn trace_formula_check<T: Real, W: WeylFunction<T> + ?Sized>(
    model: &W,
    theta: &BoundaryParameter<T>,
    z: Complex<T>,
    h: T,
    quad: &QuadratureConfig<T>,
) -> Result<TraceFormulaResult<T>, SsfError> {
    let n = model.dim();
    let t = operator_of(theta, n)?;
    let shift = cx(h, T::zero());
    let d = derivative(model, z, h)?;
    let m0 = eval_upper(model, z)?;
    let log_plus = matlog_integral(&(&eval_upper(model, z + shift)? - &t), quad)?;
    let log_minus = matlog_integral(&(&eval_upper(model, z - shift)? - &t), quad)?;
    let lhs = (log_plus.trace() - log_minus.trace()) / (h + h);
    let rhs = (&m0 - &t).left_solve(&d)?.trace();
    Ok(TraceFormulaResult {
        lhs,
        rhs,
        residual: (lhs - rhs).norm(),
    })
}

/// Scattering data and spectral shift at one real `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointEvaluation<T: Real> {
    pub ssf: SsfPoint<T>,
    /// `None` when the regime is `Singular`.
    pub scattering: Option<ScatteringPoint<T>>,
    /// Why the point is singular.
    pub failure: Option<String>,
}

/// Full pipeline at real `λ`: boundary value, scattering matrix, ξ (when
/// `Θ` is an operator) and the Birman-Krein residual. Boundary-value and
/// spectral-point failures give a `Singular` point instead of an error.
pub fn evaluate_point<T: Real, W: WeylFunction<T> + ?Sized>(
    model: &W,
    theta: &BoundaryParameter<T>,
    lambda: T,
    quad: &QuadratureConfig<T>,
    rank_tol: T,
) -> Result<PointEvaluation<T>, SsfError> {
    let singular = |why: String| PointEvaluation {
        ssf: SsfPoint {
            lambda,
            xi: T::nan(),
            bk_residual: T::nan(),
            regime: Regime::Singular,
        },
        scattering: None,
        failure: Some(why),
    };
    let m = match eval_boundary(model, lambda) {
        Ok(m) => m,
        Err(e @ (WeylError::SingularPoint { .. }
        | WeylError::BandEdge { .. }
        | WeylError::BoundaryLimitFailed { .. }
        | WeylError::SingularJost { .. }
        | WeylError::StepFailure { .. })) => return Ok(singular(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let sp = match smatrix(lambda, &m, theta, rank_tol) {
        Ok(sp) => sp,
        Err(ScatteringError::Relation(e @ RelationError::SpectralPoint { .. })) => return Ok(singular(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let regime = classify(&m);
    let (xi_val, bk) = if theta.is_operator() {
        match xi(&m, theta, quad) {
            Ok(x) => (x, birman_krein_residual(&sp, x)),
            Err(SsfError::Linalg(e @ LinalgError::SingularArgument { .. })) => return Ok(singular(e.to_string())),
            Err(e) => return Err(e),
        }
    } else {
        (T::nan(), T::nan())
    };
    Ok(PointEvaluation {
        ssf: SsfPoint {
            lambda,
            xi: xi_val,
            bk_residual: bk,
            regime,
        },
        scattering: Some(sp),
        failure: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{dirac_m, ConstantModel, DiracModel, FreeHalfLineModel};
    use crate::scattering::RANK_TOL;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn theta(v: &[f64]) -> BoundaryParameter<f64> {
        BoundaryParameter::matrix(Matrix::from_real_diag(v)).unwrap()
    }

    fn quad() -> QuadratureConfig<f64> {
        QuadratureConfig::default()
    }

    #[test]
    fn free_scalar_examples() {
        let m = Matrix::scalar(1, c(0.0, 1.0));
        assert!((xi(&m, &theta(&[1.0]), &quad()).unwrap() - 0.75).abs() < 1e-9);
        assert!((xi(&m, &theta(&[0.0]), &quad()).unwrap() - 0.5).abs() < 1e-9);
        let m = Matrix::scalar(1, c(-2.0, 0.0));
        assert!((xi(&m, &theta(&[-1.0]), &quad()).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn relation_refused() {
        let m = Matrix::scalar(2, c(0.0, 1.0));
        assert_eq!(xi(&m, &BoundaryParameter::unperturbed(2), &quad()), Err(SsfError::NotOperator));
    }

    #[test]
    fn closed_form_free_examples() {
        assert!((xi_closed_form_free(&[1.0f64], 1.0).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(xi_closed_form_free(&[0.0, 0.0], 1.0).unwrap(), 1.0);
        assert_eq!(xi_closed_form_free(&[-1.0], -0.5).unwrap(), 0.0);
        assert_eq!(xi_closed_form_free(&[-1.0], -4.0).unwrap(), 1.0);
        assert!(xi_closed_form_free(&[1.0], 0.0).is_err());
        assert!(xi_closed_form_free(&[-2.0], -4.0).is_err());
    }

    #[test]
    fn closed_form_dirac_examples() {
        assert!((xi_closed_form_dirac(1.0f64, 0.0, 0.0, 5.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(dirac_threshold_1(1.0, -1.0), 0.0);
        assert!(xi_closed_form_dirac(1.0, -1.0, 0.0, 0.0).is_err());
        assert!(xi_closed_form_dirac(1.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn dirac_closed_form_matches_quadrature() {
        for &(t1, t2) in &[(1.0, 1.0), (0.0, 0.0), (-1.0, 2.0), (0.5, -0.3)] {
            for &l in &[-7.0, -1.5, -0.9, -0.3, 0.1, 0.45, 0.8, 1.2, 5.0, 40.0] {
                let m = dirac_m(1.0, c(l, 0.0)).unwrap();
                let q = xi(&m, &theta(&[t1, t2]), &quad()).unwrap();
                let cf = xi_closed_form_dirac(1.0, t1, t2, l).unwrap();
                assert!((q - cf).abs() < 1e-8, "θ=({t1},{t2}) λ={l}: {q} vs {cf}");
            }
        }
    }

    #[test]
    fn gap_counts() {
        let m = Matrix::scalar(1, c(-2.0, 0.0));
        assert_eq!(gap_count(&m, &theta(&[-1.0])).unwrap(), 1);
        assert_eq!(gap_count(&m, &theta(&[-3.0])).unwrap(), 0);
        let m0 = dirac_m(1.0, c(0.0, 0.0)).unwrap();
        let count = gap_count(&m0, &theta(&[0.0, 0.0])).unwrap();
        let q = xi(&m0, &theta(&[0.0, 0.0]), &quad()).unwrap();
        assert!((q - count as f64).abs() < 1e-8);
    }

    #[test]
    fn birman_krein_free_scalar() {
        let m = Matrix::scalar(1, c(0.0, 1.0));
        let sp = smatrix(1.0, &m, &theta(&[1.0]), RANK_TOL).unwrap();
        assert!(birman_krein_residual(&sp, 0.75) < 1e-15);
        let sp = smatrix(1.0, &m, &BoundaryParameter::unperturbed(1), RANK_TOL).unwrap();
        assert!(birman_krein_residual(&sp, 0.0) < 1e-15);
    }

    #[test]
    fn trace_formula_examples() {
        let q = QuadratureConfig::with_tol(1e-11);
        let z = c(0.0, 1.0);
        let free = FreeHalfLineModel::new(1).unwrap();
        let r = trace_formula_check(&free, &theta(&[0.0]), z, 1e-3, &q).unwrap();
        assert!((r.lhs - c(0.0, -0.5)).norm() < 1e-6, "{:?}", r);
        assert!(r.residual < 1e-6);
        let constant = ConstantModel {
            value: Matrix::scalar(2, c(0.5, 1.0)),
        };
        let r = trace_formula_check(&constant, &theta(&[1.0, 2.0]), z, 1e-3, &q).unwrap();
        assert!(r.lhs.norm() < 1e-12 && r.rhs.norm() < 1e-12);
        let dirac = DiracModel::new(1.0).unwrap();
        let r = trace_formula_check(&dirac, &theta(&[1.0, -1.0]), c(1.0, 2.0), 1e-3, &q).unwrap();
        assert!(r.residual < 1e-5, "{:?}", r);
    }

    #[test]
    fn pipeline_marks_band_edge_singular() {
        let dirac = DiracModel::new(1.0).unwrap();
        let p = evaluate_point(&dirac, &theta(&[1.0, 1.0]), 1.0, &quad(), RANK_TOL).unwrap();
        assert_eq!(p.ssf.regime, Regime::Singular);
        assert!(p.scattering.is_none());
        let p = evaluate_point(&dirac, &theta(&[1.0, 1.0]), 0.3, &quad(), RANK_TOL).unwrap();
        assert_eq!(p.ssf.regime, Regime::Gap);
        assert!((p.ssf.xi - xi_closed_form_dirac(1.0, 1.0, 1.0, 0.3).unwrap()).abs() < 1e-8);
    }
}
