use num_complex::Complex;
use num_traits::Zero;

use super::{LinalgError, Matrix};
use crate::scalar::{c_real, Real};

const MAX_SWEEPS: usize = 64;

/// Spectral decomposition `T = V diag(w) V*` of a Hermitian matrix.
///
/// Eigenvalues ascend; every eigenvector has its first non-negligible
/// component real and positive, so the basis is reproducible run to run.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T: Real> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Matrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    /// `V f(diag(w)) V*`.
    pub fn apply(&self, f: impl Fn(T) -> T) -> Matrix<T> {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let fw: Vec<T> = self.eigenvalues.iter().map(|&w| f(w)).collect();
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut s = Complex::zero();
                for k in 0..n {
                    s += v[(i, k)] * v[(j, k)].conj() * fw[k];
                }
                out[(i, j)] = s;
            }
        }
        out.symmetrized()
    }

    pub fn reconstruct(&self) -> Matrix<T> {
        self.apply(|w| w)
    }
}

/// Cyclic complex Jacobi eigensolver for Hermitian input.
pub fn herm_eig<T: Real>(t: &Matrix<T>, tol: T) -> Result<HermitianEigen<T>, LinalgError> {
    let n = t.ensure_square()?;
    let scale = T::one().max(t.norm_fro());
    let residual = (t - &t.adjoint()).norm_fro();
    if residual > tol * scale {
        return Err(LinalgError::NotHermitian {
            residual: residual.to_f64_lossy(),
        });
    }

    let mut a = t.symmetrized();
    let mut v = Matrix::identity(n);
    let eps = T::epsilon();
    let fro = a.norm_fro();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off <= eps * eps * fro || off.is_zero() {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > T::lit(64.0) * eps * fro {
        return Err(LinalgError::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap_or(std::cmp::Ordering::Equal));
    let eigenvalues: Vec<T> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut eigenvectors = v.select_columns(&order);
    fix_phases(&mut eigenvectors);

    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm<T: Real>(a: &Matrix<T>) -> T {
    let n = a.rows();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate<T: Real>(a: &mut Matrix<T>, v: &mut Matrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r.is_zero() {
        return;
    }
    let n = a.rows();
    // phase e^{i phi} of a_pq
    let e = apq / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (r + r);
    let t = if theta >= T::zero() {
        T::one() / (theta + (theta * theta + T::one()).sqrt())
    } else {
        -T::one() / (-theta + (theta * theta + T::one()).sqrt())
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;
    let ec = e.conj();

    // columns: A <- A G
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * ec * s;
        a[(k, q)] = akp * s + akq * ec * c;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * ec * s;
        v[(k, q)] = vkp * s + vkq * ec * c;
    }
    // rows: A <- G* A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * e * s;
        a[(q, k)] = apk * s + aqk * e * c;
    }
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
    a[(p, p)] = c_real(a[(p, p)].re);
    a[(q, q)] = c_real(a[(q, q)].re);
}

fn fix_phases<T: Real>(v: &mut Matrix<T>) {
    let n = v.rows();
    let threshold = T::epsilon().sqrt();
    for j in 0..v.cols() {
        let lead = (0..n).map(|i| v[(i, j)]).find(|z| z.norm() > threshold);
        if let Some(z) = lead {
            let phase = z.conj() / z.norm();
            for i in 0..n {
                v[(i, j)] *= phase;
            }
            // the leading entry is now real positive up to rounding
            for i in 0..n {
                if v[(i, j)].norm() > threshold {
                    v[(i, j)] = c_real(v[(i, j)].norm());
                    break;
                }
            }
        }
    }
}

/// Principal square root of a Hermitian positive semidefinite matrix.
///
/// Eigenvalues in `[-tol * max(1, |T|), 0)` are clamped to zero.
pub fn psd_sqrt<T: Real>(t: &Matrix<T>, tol: T) -> Result<Matrix<T>, LinalgError> {
    let eig = herm_eig(t, tol.max(T::epsilon()))?;
    let floor = -tol * T::one().max(t.norm_fro());
    let min = eig.eigenvalues.first().copied().unwrap_or_else(T::zero);
    if min < floor {
        return Err(LinalgError::NotPsd {
            min_eigenvalue: min.to_f64_lossy(),
        });
    }
    Ok(eig.apply(|w| w.max(T::zero()).sqrt()))
}

/// Smallest singular value, computed as `1 / |A^{-1}|_2` so tiny values stay accurate.
pub fn smallest_singular_value<T: Real>(a: &Matrix<T>) -> Result<T, LinalgError> {
    a.ensure_square()?;
    let inv = match a.inverse() {
        Ok(inv) => inv,
        Err(LinalgError::Singular { .. }) => return Ok(T::zero()),
        Err(e) => return Err(e),
    };
    let gram = (&inv.adjoint() * &inv).symmetrized();
    let eig = herm_eig(&gram, T::one())?;
    let largest = eig.eigenvalues.last().copied().unwrap_or_else(T::one);
    if !(largest > T::zero()) || !largest.is_finite() {
        return Ok(T::zero());
    }
    Ok(T::one() / largest.sqrt())
}

impl<T: Real> Matrix<T> {
    /// Operator 2-norm.
    pub fn norm_2(&self) -> T {
        let gram = (&self.adjoint() * self).symmetrized();
        match herm_eig(&gram, T::one()) {
            Ok(e) => e.eigenvalues.last().copied().unwrap_or_else(T::zero).max(T::zero()).sqrt(),
            Err(_) => self.norm_fro(),
        }
    }
}

impl<T: Real> HermitianEigen<T> {
    /// Eigenvector `j` as a column matrix.
    pub fn column(&self, j: usize) -> Matrix<T> {
        self.eigenvectors.select_columns(&[j])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> Matrix<f64> {
        let g = Matrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        (&g + &g.adjoint()).scale_real(0.5)
    }

    #[test]
    fn diagonal_input_sorts_and_permutes() {
        let e = herm_eig(&Matrix::<f64>::from_real_diag(&[8.0, 2.0]), 1e-12).unwrap();
        assert_eq!(e.eigenvalues, vec![2.0, 8.0]);
        let perm = Matrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]])
            .unwrap();
        assert_eq!(e.eigenvectors, perm);
    }

    #[test]
    fn swap_matrix_eigenvectors() {
        let m = Matrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]])
            .unwrap();
        let e = herm_eig(&m, 1e-12).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-15);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // first component made real positive: (1, -1)/sqrt2 and (1, 1)/sqrt2
        assert!((e.eigenvectors[(0, 0)] - c(r, 0.0)).norm() < 1e-15);
        assert!((e.eigenvectors[(1, 0)] - c(-r, 0.0)).norm() < 1e-15);
        assert!((e.eigenvectors[(0, 1)] - c(r, 0.0)).norm() < 1e-15);
        assert!((e.eigenvectors[(1, 1)] - c(r, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn random_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=6 {
            for _ in 0..20 {
                let t = random_hermitian(&mut rng, n);
                let e = herm_eig(&t, 1e-12).unwrap();
                let back = e.reconstruct();
                assert!((&back - &t).norm_fro() <= 1e-12 * t.norm_fro().max(1.0));
                assert!(e.eigenvectors.unitarity_defect() <= 1e-12);
                assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }

    #[test]
    fn not_hermitian_rejected() {
        let m = Matrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]])
            .unwrap();
        assert!(matches!(herm_eig(&m, 1e-12), Err(LinalgError::NotHermitian { .. })));
    }

    #[test]
    fn sqrt_of_diagonal_and_zero() {
        let r = psd_sqrt(&Matrix::<f64>::from_real_diag(&[2.0, 8.0]), 1e-12).unwrap();
        assert!((r[(0, 0)].re - 2f64.sqrt()).abs() < 1e-15);
        assert!((r[(1, 1)].re - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        let z = psd_sqrt(&Matrix::<f64>::zeros(3, 3), 1e-12).unwrap();
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn sqrt_rejects_negative() {
        let err = psd_sqrt(&Matrix::<f64>::from_real_diag(&[1.0, -0.5]), 1e-12).unwrap_err();
        assert!(matches!(err, LinalgError::NotPsd { .. }));
    }

    #[test]
    fn sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=5 {
            let g = Matrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let t = (&g * &g.adjoint()).symmetrized();
            let r = psd_sqrt(&t, 1e-12).unwrap();
            assert!(r.is_hermitian(1e-14));
            assert!((&(&r * &r) - &t).norm_fro() <= 1e-10 * t.norm_fro().max(1.0));
        }
    }

    #[test]
    fn smallest_singular_value_of_near_singular() {
        let m = Matrix::<f64>::from_real_diag(&[1.0, 1e-11]);
        let s = smallest_singular_value(&m).unwrap();
        assert!((s - 1e-11).abs() < 1e-22);
    }
}
