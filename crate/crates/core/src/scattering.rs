//! Scattering matrices `S_Θ(λ)` on `H_λ = ran Im M(λ + i0)`.

use num_complex::Complex;

use crate::cxlinalg::{herm_eig, smallest_singular_value, LinalgError, Matrix};
use crate::relation::{relation_resolvent_with_cond, BoundaryParameter, RelationError};
use crate::scalar::{c_i, c_real, Real};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScatteringError {
    #[error("Im m = 0: the fiber space is trivial")]
    ImZero,
    #[error("S - I is not invertible (smallest singular value {sigma_min:e})")]
    NonInvertible { sigma_min: f64 },
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Default relative threshold separating `ran Im M` from its kernel.
pub const RANK_TOL: f64 = 1e-10;

/// Eigenvalues of `Im M` in this (relative) window make the rank decision
/// fragile.
pub const AMBIGUOUS_RANK_WINDOW: (f64, f64) = (1e-14, 1e-8);

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringPoint<T: Real> {
    pub lambda: T,
    /// `dim H_λ`.
    pub rank: usize,
    /// `n x n`, acting as the identity on `ker Im M`.
    pub s_full: Matrix<T>,
    /// `V* S_full V` for the isometry `V` onto `H_λ`.
    pub s_reduced: Matrix<T>,
    /// `n x r` orthonormal basis of `H_λ`.
    pub basis: Matrix<T>,
    /// `det S_reduced`, and 1 when `r = 0`.
    pub det_s: Complex<T>,
    /// 1-norm condition number of `Θ - M(λ)` (or `A - B M(λ)`).
    pub cond: T,
    pub rank_ambiguous: bool,
}

/// `(M - M*) / 2i`, Hermitian by construction.
pub fn im_boundary<T: Real>(m: &Matrix<T>) -> Matrix<T> {
    m.imag_part()
}

/// Rank of `Im M` and an orthonormal basis of its range, in the eigenvector
/// order of [`herm_eig`].
pub fn range_projection<T: Real>(im_m: &Matrix<T>, rank_tol: T) -> Result<(usize, Matrix<T>), LinalgError> {
    let (rank, basis, _, _) = range_split(im_m, rank_tol)?;
    Ok((rank, basis))
}

// rank, basis, retained eigenvalues, ambiguity flag
fn range_split<T: Real>(im_m: &Matrix<T>, rank_tol: T) -> Result<(usize, Matrix<T>, Vec<T>, bool), LinalgError> {
    let n = im_m.ensure_square()?;
    let eig = herm_eig(&im_m.symmetrized(), T::lit(1e-8))?;
    let top = eig.eigenvalues.iter().fold(T::zero(), |acc, w| acc.max(w.abs()));
    let scale = T::one().max(top);
    let threshold = rank_tol * scale;
    let (lo, hi) = (T::lit(AMBIGUOUS_RANK_WINDOW.0) * scale, T::lit(AMBIGUOUS_RANK_WINDOW.1) * scale);
    let keep: Vec<usize> = (0..n).filter(|&j| eig.eigenvalues[j] > threshold).collect();
    let ambiguous = eig.eigenvalues.iter().any(|&w| w > lo && w < hi);
    let values = keep.iter().map(|&j| eig.eigenvalues[j]).collect();
    Ok((keep.len(), eig.eigenvectors.select_columns(&keep), values, ambiguous))
}

/// `S = I + 2i R (Θ - M)^{-1} R` with `R = √(Im M)` restricted to `H_λ`.
///
/// `R` is built from the retained eigenpairs only, so `S_full` is exactly the
/// identity on the numerical kernel of `Im M`.
pub fn smatrix<T: Real>(
    lambda: T,
    m: &Matrix<T>,
    theta: &BoundaryParameter<T>,
    rank_tol: T,
) -> Result<ScatteringPoint<T>, ScatteringError> {
    let n = m.ensure_square()?;
    let im = im_boundary(m);
    let (rank, basis, values, rank_ambiguous) = range_split(&im, rank_tol)?;
    let (resolvent, cond) = relation_resolvent_with_cond(theta, m)?;

    if rank == 0 {
        return Ok(ScatteringPoint {
            lambda,
            rank,
            s_full: Matrix::identity(n),
            s_reduced: Matrix::zeros(0, 0),
            basis,
            det_s: c_real(T::one()),
            cond,
            rank_ambiguous,
        });
    }

    // R = V D V* with D = diag(√w); W = V D gives V* R X R V = D V* X V D = W* X W
    let w = Matrix::from_fn(n, rank, |i, j| basis[(i, j)] * values[j].sqrt());
    let two_i = c_i::<T>() + c_i::<T>();
    let core = (&(&w.adjoint() * &resolvent) * &w).scale(two_i);
    let s_reduced = &Matrix::identity(rank) + &core;
    let s_full = &Matrix::identity(n) + &(&(&basis * &core) * &basis.adjoint());
    let det_s = s_reduced.det()?;
    Ok(ScatteringPoint {
        lambda,
        rank,
        s_full,
        s_reduced,
        basis,
        det_s,
        cond,
        rank_ambiguous,
    })
}

fn theta_operator<T: Real>(theta: &BoundaryParameter<T>, n: usize) -> Result<Matrix<T>, ScatteringError> {
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

/// `(Θ - conj(m) I)(Θ - m I)^{-1}` for `M = m I`.
pub fn smatrix_scalar_type<T: Real>(m: Complex<T>, theta: &BoundaryParameter<T>, n: usize) -> Result<Matrix<T>, ScatteringError> {
    if m.im.is_zero() {
        return Err(ScatteringError::ImZero);
    }
    let t = theta_operator(theta, n)?;
    let left = &t - &Matrix::scalar(n, m.conj());
    let right = &t - &Matrix::scalar(n, m);
    Ok(left.right_divide(&right).map_err(|_| RelationError::SpectralPoint {
        cond: right.cond_1().to_f64_lossy(),
    })?)
}

/// `(Θ - M*)(Θ - M)^{-1}`, the boundary value from below taken as `M*`.
pub fn smatrix_factorized<T: Real>(m_plus: &Matrix<T>, theta: &BoundaryParameter<T>) -> Result<Matrix<T>, ScatteringError> {
    let n = m_plus.ensure_square()?;
    let t = theta_operator(theta, n)?;
    let left = &t - &m_plus.adjoint();
    let right = &t - m_plus;
    let cond = right.cond_1();
    if !(cond <= T::lit(crate::relation::SPECTRAL_COND_CAP)) {
        return Err(RelationError::SpectralPoint { cond: cond.to_f64_lossy() }.into());
    }
    Ok(left
        .right_divide(&right)
        .map_err(|_| RelationError::SpectralPoint { cond: cond.to_f64_lossy() })?)
}

/// `Θ = i (S + I)(S - I)^{-1}` from the high-energy limit `S(∞)` of a Dirac
/// scattering matrix.
pub fn dirac_theta_recovery<T: Real>(s_inf: &Matrix<T>) -> Result<Matrix<T>, ScatteringError> {
    let n = s_inf.ensure_square()?;
    let id = Matrix::identity(n);
    let minus = s_inf - &id;
    let sigma = smallest_singular_value(&minus)?;
    if !(sigma >= T::lit(1e-10)) {
        return Err(ScatteringError::NonInvertible {
            sigma_min: sigma.to_f64_lossy(),
        });
    }
    let plus = (s_inf + &id).scale(c_i());
    Ok(plus.right_divide(&minus)?)
}
