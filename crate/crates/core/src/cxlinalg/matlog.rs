use num_complex::Complex;

use super::{herm_eig, LinalgError, Matrix};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::scalar::{c_i, Real};

/// Matrix logarithm of `T` with `Im T >= 0` and `0` outside the spectrum,
///
/// ```text
/// log T = -i ∫_0^∞ ((T + it)^{-1} - (1 + it)^{-1} I) dt,
/// ```
///
/// evaluated on `s ∈ (0, 1)` with `t = s / (1 - s)`. The branch has
/// `0 <= Im log T <= π`, so negative real eigenvalues map to `log|w| + iπ`.
/// The integrand is written as `(T + it)^{-1} (I - T) / (1 + it)`, which
/// avoids cancelling two `O(1/t)` terms for large `t`.
pub fn matlog_integral<T: Real>(t: &Matrix<T>, quad: &QuadratureConfig<T>) -> Result<Matrix<T>, LinalgError> {
    let n = t.ensure_square()?;
    let scale = T::one().max(t.norm_fro());

    let im = t.imag_part();
    let im_eig = herm_eig(&im, T::one())?;
    let min_im = im_eig.eigenvalues[0];
    if min_im < -quad.tol * scale {
        return Err(LinalgError::LowerHalfSpectrum {
            min_eigenvalue: min_im.to_f64_lossy(),
        });
    }

    let cond = t.cond_1();
    if !(cond <= quad.cond_cap) {
        return Err(LinalgError::SingularArgument {
            cond: cond.to_f64_lossy(),
        });
    }

    let identity = Matrix::identity(n);
    let one_minus_t = &identity - t;
    let minus_i = -c_i::<T>();

    let integrand = |s: T| -> Result<Matrix<T>, LinalgError> {
        let one = T::one();
        if s >= one {
            return Ok(Matrix::zeros(n, n));
        }
        let u = one - s;
        let tt = s / u;
        let jac = one / (u * u);
        let shifted = t + &Matrix::scalar(n, Complex::new(T::zero(), tt));
        let solved = shifted.left_solve(&one_minus_t).map_err(|_| LinalgError::SingularArgument {
            cond: f64::INFINITY,
        })?;
        let factor = minus_i * jac / Complex::new(one, tt);
        Ok(solved.scale(factor))
    };

    integrate(integrand, T::zero(), T::one(), quad.tol, quad.max_subdivisions)
}

/// `|det T - exp(tr log T)|`.
pub fn det_tr_log_consistency<T: Real>(t: &Matrix<T>, quad: &QuadratureConfig<T>) -> Result<T, LinalgError> {
    let log = matlog_integral(t, quad)?;
    let det = t.det()?;
    Ok((det - log.trace().exp()).norm())
}
