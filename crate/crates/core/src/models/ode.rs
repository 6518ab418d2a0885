//! Dormand-Prince 5(4) integrator for complex first-order systems.

use num_complex::Complex;

use crate::scalar::Real;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

// difference between the 5th and embedded 4th order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub struct OdeConfig<T: Real> {
    pub rtol: T,
    pub atol: T,
    /// Initial step magnitude.
    pub h_init: T,
    pub max_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OdeFailure {
    StepUnderflow { x: f64 },
    TooManySteps { x: f64 },
}

/// Integrates `y' = f(x, y)` from `x0` to `x1` (either direction).
pub fn dopri5<T, F>(mut f: F, x0: T, x1: T, y0: &[Complex<T>], cfg: &OdeConfig<T>) -> Result<Vec<Complex<T>>, OdeFailure>
where
    T: Real,
    F: FnMut(T, &[Complex<T>], &mut [Complex<T>]),
{
    let dim = y0.len();
    let mut y = y0.to_vec();
    let span = x1 - x0;
    if span.is_zero() {
        return Ok(y);
    }
    let dir = span.signum();
    let mut x = x0;
    let mut h = cfg.h_init.abs().min(span.abs()) * dir;
    let h_floor = T::epsilon() * T::lit(16.0) * T::one().max(x0.abs().max(x1.abs()));

    let mut k: Vec<Vec<Complex<T>>> = vec![vec![Complex::new(T::zero(), T::zero()); dim]; 7];
    let mut stage = vec![Complex::new(T::zero(), T::zero()); dim];
    let mut y_new = vec![Complex::new(T::zero(), T::zero()); dim];
    f(x, &y, &mut k[0]);

    let safety = T::lit(0.9);
    let fac_min = T::lit(0.2);
    let fac_max = T::lit(10.0);
    let fifth = T::lit(0.2);

    for _ in 0..cfg.max_steps {
        let remaining = x1 - x;
        if remaining * dir <= T::zero() {
            return Ok(y);
        }
        if (h.abs()) > remaining.abs() {
            h = remaining;
        }

        for s in 1..7 {
            for i in 0..dim {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        acc += kj[i] * (h * T::lit(a));
                    }
                }
                stage[i] = acc;
            }
            f(x + h * T::lit(C[s]), &stage, &mut k[s]);
            if s == 6 {
                y_new.copy_from_slice(&stage);
            }
        }

        // error estimate with mixed absolute/relative scaling
        let mut err_sq = T::zero();
        for i in 0..dim {
            let mut e = Complex::new(T::zero(), T::zero());
            for (j, kj) in k.iter().enumerate() {
                if E[j] != 0.0 {
                    e += kj[i] * (h * T::lit(E[j]));
                }
            }
            let sc = cfg.atol + cfg.rtol * y[i].norm().max(y_new[i].norm());
            err_sq += (e.norm() / sc).powi(2);
        }
        let err = (err_sq / T::from_usize(dim.max(1)).unwrap()).sqrt();

        if err <= T::one() {
            x = if (x1 - (x + h)) * dir <= T::zero() { x1 } else { x + h };
            y.copy_from_slice(&y_new);
            // FSAL: last stage is f at the new point
            let last = k[6].clone();
            k[0] = last;
            let fac = if err.is_zero() { fac_max } else { safety * err.powf(-fifth) };
            h *= fac.min(fac_max).max(fac_min);
        } else {
            let fac = (safety * err.powf(-fifth)).max(fac_min);
            h *= fac;
        }
        if h.abs() < h_floor {
            return Err(OdeFailure::StepUnderflow { x: x.to_f64_lossy() });
        }
    }
    Err(OdeFailure::TooManySteps { x: x.to_f64_lossy() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn harmonic_oscillator_backward() {
        // y'' = -w^2 y from x = 2 back to 0 with y(2) = cos(2w), y'(2) = -w sin(2w)
        let w: f64 = 3.0;
        let y0 = [Complex64::new((2.0 * w).cos(), 0.0), Complex64::new(-w * (2.0 * w).sin(), 0.0)];
        let cfg = OdeConfig {
            rtol: 1e-11,
            atol: 1e-12,
            h_init: 0.01,
            max_steps: 100_000,
        };
        let y = dopri5(
            |_x, y: &[Complex64], dy: &mut [Complex64]| {
                dy[0] = y[1];
                dy[1] = -w * w * y[0];
            },
            2.0,
            0.0,
            &y0,
            &cfg,
        )
        .unwrap();
        assert!((y[0] - Complex64::new(1.0, 0.0)).norm() < 1e-9);
        assert!(y[1].norm() < 1e-8);
    }

    #[test]
    fn exponential_growth_complex() {
        let lam = Complex64::new(0.5, 2.0);
        let cfg = OdeConfig {
            rtol: 1e-11,
            atol: 1e-12,
            h_init: 0.1,
            max_steps: 100_000,
        };
        let y = dopri5(
            |_x, y: &[Complex64], dy: &mut [Complex64]| dy[0] = lam * y[0],
            0.0,
            1.0,
            &[Complex64::new(1.0, 0.0)],
            &cfg,
        )
        .unwrap();
        assert!((y[0] - lam.exp()).norm() < 1e-9);
    }
}
