//! Oracles and generators shared by the integration tests. Nothing here
//! calls the library's model formulas; the closed forms are re-derived with
//! plain `num_complex` arithmetic.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use weyl_scatter_core::CMatrix;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Root with `Im > 0` off `[0, ∞)`, non-negative on it.
pub fn upper_sqrt(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        return if z.re >= 0.0 { c(z.re.sqrt(), 0.0) } else { c(0.0, (-z.re).sqrt()) };
    }
    let r = z.sqrt();
    if r.im < 0.0 {
        -r
    } else {
        r
    }
}

/// `E'(0)/E(0)` for `Q = v0` on `[0, r]`, zero beyond, matched to
/// `exp(ikx)` at `x = r`. Even in `κ`, so the branch of `κ` is irrelevant.
pub fn well_m(v0: f64, r: f64, lambda: Complex64) -> Complex64 {
    let k = upper_sqrt(lambda);
    let kappa = (lambda - v0).sqrt();
    let a = (Complex64::i() * k * r).exp();
    let b = Complex64::i() * k * a;
    let (cs, sn) = ((kappa * r).cos(), (kappa * r).sin());
    let sinc = if kappa.norm() < 1e-12 { c(r, 0.0) } else { sn / kappa };
    let e0 = a * cs - b * sinc;
    let e1 = a * kappa * sn + b * cs;
    e1 / e0
}

/// Dirac Weyl function entries at `λ`.
pub fn dirac_entries(a: f64, lambda: Complex64) -> (Complex64, Complex64) {
    let p = upper_sqrt(lambda + a);
    let m = upper_sqrt(lambda - a);
    (Complex64::i() * p / m, Complex64::i() * m / p)
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize, scale: f64) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = c(scale * rng.gen_range(-1.0..1.0), 0.0);
        for j in (i + 1)..n {
            let z = c(scale * rng.gen_range(-1.0..1.0), scale * rng.gen_range(-1.0..1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

pub fn random_matrix(rng: &mut impl Rng, n: usize, scale: f64) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| c(scale * rng.gen_range(-1.0..1.0), scale * rng.gen_range(-1.0..1.0)))
}

/// Random unitary from Gram-Schmidt on a random matrix.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> CMatrix {
    let a = random_matrix(rng, n, 1.0);
    let mut q = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut v: Vec<Complex64> = (0..n).map(|i| a[(i, j)]).collect();
        for k in 0..j {
            let dot: Complex64 = (0..n).map(|i| q[(i, k)].conj() * v[i]).sum();
            for i in 0..n {
                v[i] -= dot * q[(i, k)];
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            q[(i, j)] = v[i] / norm;
        }
    }
    q
}

/// `Im P >= 0` part: `B B*` for random `B`, scaled.
pub fn random_psd(rng: &mut impl Rng, n: usize, scale: f64) -> CMatrix {
    let b = random_matrix(rng, n, scale.sqrt());
    &b * &b.adjoint()
}

/// A value of a matrix Nevanlinna function: `H + i P` with `P` positive
/// definite.
pub fn random_nevanlinna_value(rng: &mut impl Rng, n: usize) -> CMatrix {
    let h = random_hermitian(rng, n, 2.0);
    let mut p = random_psd(rng, n, 1.0);
    for i in 0..n {
        p[(i, i)] += c(0.1, 0.0);
    }
    &h + &p.scale(Complex64::i())
}

/// `tr(A^k)`, `k = 1..n`, by repeated multiplication.
pub fn power_traces(a: &CMatrix) -> Vec<Complex64> {
    let n = a.rows();
    let mut p = CMatrix::identity(n);
    (0..n)
        .map(|_| {
            p = &p * a;
            (0..n).map(|i| p[(i, i)]).sum()
        })
        .collect()
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `n` points linearly spaced on `[a, b]`, each moved by `nudge` away from
/// any point in `avoid` it lands within `nudge` of.
pub fn grid_avoiding(a: f64, b: f64, n: usize, avoid: &[f64], nudge: f64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let mut x = if n == 1 { a } else { a + (b - a) * k as f64 / (n - 1) as f64 };
            for &p in avoid {
                if (x - p).abs() < nudge {
                    x = p + nudge;
                }
            }
            x
        })
        .collect()
}

pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n).map(|k| (la + (lb - la) * k as f64 / (n - 1) as f64).exp()).collect()
}
