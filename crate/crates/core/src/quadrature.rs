//! Adaptive Gauss-Kronrod (7/15) integration of matrix-valued functions
//! on a finite interval.

use crate::cxlinalg::{LinalgError, Matrix};
use crate::scalar::Real;

// 15-point Kronrod abscissae on [-1, 1] (non-negative half), QUADPACK values.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

// 7-point Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Settings for the half-line integrals behind the matrix logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig<T: Real> {
    /// Absolute tolerance on the Frobenius norm of the integral.
    pub tol: T,
    /// Arguments with a larger 1-norm condition number are rejected as singular.
    pub cond_cap: T,
    pub max_subdivisions: usize,
}

impl<T: Real> Default for QuadratureConfig<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-9),
            cond_cap: T::lit(1e12),
            max_subdivisions: 4000,
        }
    }
}

impl<T: Real> QuadratureConfig<T> {
    pub fn with_tol(tol: T) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone)]
struct Segment<T: Real> {
    a: T,
    b: T,
    value: Matrix<T>,
    error: T,
}

fn gauss_kronrod<T, F>(f: &F, a: T, b: T) -> Result<Segment<T>, LinalgError>
where
    T: Real,
    F: Fn(T) -> Result<Matrix<T>, LinalgError>,
{
    let half = (b - a) * T::lit(0.5);
    let centre = (a + b) * T::lit(0.5);

    let fc = f(centre)?;
    let mut kronrod = fc.scale_real(T::lit(WGK[7]));
    let mut gauss = fc.scale_real(T::lit(WG[3]));

    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let f1 = f(centre - dx)?;
        let f2 = f(centre + dx)?;
        let sum = &f1 + &f2;
        kronrod = &kronrod + &sum.scale_real(T::lit(WGK[j]));
        if j % 2 == 1 {
            gauss = &gauss + &sum.scale_real(T::lit(WG[j / 2]));
        }
    }
    let value = kronrod.scale_real(half);
    let error = (&value - &gauss.scale_real(half)).norm_fro();
    Ok(Segment { a, b, value, error })
}

/// Integrates `f` over `[a, b]` by globally adaptive bisection until the
/// summed Gauss/Kronrod discrepancy drops below `tol`.
pub fn integrate<T, F>(f: F, a: T, b: T, tol: T, max_subdivisions: usize) -> Result<Matrix<T>, LinalgError>
where
    T: Real,
    F: Fn(T) -> Result<Matrix<T>, LinalgError>,
{
    let mut segments = vec![gauss_kronrod(&f, a, b)?];
    let min_width = (b - a).abs() * T::epsilon() * T::lit(64.0);

    loop {
        let total: T = segments.iter().fold(T::zero(), |acc, s| acc + s.error);
        if total <= tol {
            break;
        }
        // worst segment that can still be split
        let worst = segments
            .iter()
            .enumerate()
            .filter(|(_, s)| (s.b - s.a).abs() > min_width)
            .max_by(|x, y| x.1.error.partial_cmp(&y.1.error).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i);
        let Some(idx) = worst else {
            return Err(LinalgError::QuadratureNotConverged {
                error: total.to_f64_lossy(),
                tol: tol.to_f64_lossy(),
            });
        };
        if segments.len() >= max_subdivisions {
            return Err(LinalgError::QuadratureNotConverged {
                error: total.to_f64_lossy(),
                tol: tol.to_f64_lossy(),
            });
        }
        let seg = segments.swap_remove(idx);
        let mid = (seg.a + seg.b) * T::lit(0.5);
        segments.push(gauss_kronrod(&f, seg.a, mid)?);
        segments.push(gauss_kronrod(&f, mid, seg.b)?);
    }

    let mut iter = segments.into_iter();
    let first = iter.next().expect("at least one segment").value;
    Ok(iter.fold(first, |acc, s| &acc + &s.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn scalar(v: f64) -> Matrix<f64> {
        Matrix::scalar(1, Complex64::new(v, 0.0))
    }

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x: f64| Ok(scalar(x.powi(6) - 2.0 * x)), 0.0, 2.0, 1e-13, 100).unwrap();
        assert!((r[(0, 0)].re - (128.0 / 7.0 - 4.0)).abs() < 1e-12);
    }

    #[test]
    fn peaked_integrand() {
        // int_0^1 eps / (x^2 + eps^2) dx = atan(1/eps)
        let eps = 1e-4;
        let r = integrate(|x: f64| Ok(scalar(eps / (x * x + eps * eps))), 0.0, 1.0, 1e-11, 4000).unwrap();
        assert!((r[(0, 0)].re - (1.0 / eps).atan()).abs() < 1e-10);
    }

    #[test]
    fn subdivision_cap_reports_failure() {
        let err = integrate(|x: f64| Ok(scalar(1.0 / x.sqrt())), 0.0, 1.0, 1e-15, 4).unwrap_err();
        assert!(matches!(err, LinalgError::QuadratureNotConverged { .. }));
    }
}
