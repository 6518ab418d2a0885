use num_complex::Complex;

use super::ode::{dopri5, OdeConfig, OdeFailure};
use crate::cxlinalg::Matrix;
use crate::scalar::{c_i, Real};
use crate::weyl::{branch_sqrt, WeylError, WeylFunction};

/// Matrix potential `Q(x)` on the half-line, Hermitian for every `x >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential<T: Real> {
    Zero { dim: usize },
    /// `Q = depth` on `[0, radius]`, zero afterwards.
    ConstantWell { depth: Matrix<T>, radius: T },
    /// `Q = amplitude * exp(-rate x)`.
    Exponential { amplitude: Matrix<T>, rate: T },
    /// Linear interpolation between nodes, zero beyond the last node.
    Tabulated { nodes: Vec<T>, values: Vec<Matrix<T>> },
}

impl<T: Real> Potential<T> {
    pub fn dim(&self) -> usize {
        match self {
            Potential::Zero { dim } => *dim,
            Potential::ConstantWell { depth, .. } => depth.rows(),
            Potential::Exponential { amplitude, .. } => amplitude.rows(),
            Potential::Tabulated { values, .. } => values.first().map_or(0, |v| v.rows()),
        }
    }

    pub fn value(&self, x: T) -> Matrix<T> {
        let n = self.dim();
        match self {
            Potential::Zero { .. } => Matrix::zeros(n, n),
            Potential::ConstantWell { depth, radius } => {
                if x <= *radius {
                    depth.clone()
                } else {
                    Matrix::zeros(n, n)
                }
            }
            Potential::Exponential { amplitude, rate } => amplitude.scale_real((-*rate * x).exp()),
            Potential::Tabulated { nodes, values } => {
                let last = nodes.len() - 1;
                if x < nodes[0] {
                    return values[0].clone();
                }
                if x > nodes[last] {
                    return Matrix::zeros(n, n);
                }
                let j = nodes.partition_point(|&node| node <= x).clamp(1, last.max(1));
                if last == 0 {
                    return values[0].clone();
                }
                let (x0, x1) = (nodes[j - 1], nodes[j]);
                let w = if x1 > x0 { (x - x0) / (x1 - x0) } else { T::zero() };
                &values[j - 1].scale_real(T::one() - w) + &values[j].scale_real(w)
            }
        }
    }

    /// Points where `Q` is not smooth; the integrator restarts there.
    pub fn breakpoints(&self) -> Vec<T> {
        match self {
            Potential::ConstantWell { radius, .. } => vec![*radius],
            Potential::Tabulated { nodes, .. } => nodes.clone(),
            _ => Vec::new(),
        }
    }

    /// End of the support, if compact.
    pub fn support_end(&self) -> Option<T> {
        match self {
            Potential::Zero { .. } => Some(T::zero()),
            Potential::ConstantWell { radius, .. } => Some(*radius),
            Potential::Exponential { .. } => None,
            Potential::Tabulated { nodes, .. } => nodes.last().copied(),
        }
    }

    /// Estimate of `∫_{x_max}^∞ (1 + x) ‖Q(x)‖ dx`.
    pub fn tail(&self, x_max: T) -> T {
        match self {
            Potential::Zero { .. } => T::zero(),
            Potential::ConstantWell { depth, radius } => {
                if x_max >= *radius {
                    T::zero()
                } else {
                    let half = T::lit(0.5);
                    let (a, b) = (x_max, *radius);
                    depth.norm_fro() * ((b - a) + half * (b * b - a * a))
                }
            }
            Potential::Exponential { amplitude, rate } => {
                let r = *rate;
                amplitude.norm_fro() * (-r * x_max).exp() * ((T::one() + x_max) / r + T::one() / (r * r))
            }
            Potential::Tabulated { nodes, .. } => {
                let last = *nodes.last().expect("nonempty table");
                if x_max >= last {
                    return T::zero();
                }
                // trapezoid rule on the nodes past x_max plus x_max itself
                let mut pts = vec![x_max];
                pts.extend(nodes.iter().copied().filter(|&x| x > x_max));
                let g = |x: T| (T::one() + x) * self.value(x).norm_fro();
                pts.windows(2)
                    .fold(T::zero(), |acc, w| acc + (w[1] - w[0]) * (g(w[0]) + g(w[1])) * T::lit(0.5))
            }
        }
    }

    /// Smallest truncation radius with tail below `tol`.
    pub fn default_x_max(&self, tol: T) -> T {
        if let Some(end) = self.support_end() {
            return end;
        }
        let mut x = T::one();
        while self.tail(x) >= tol && x < T::lit(1e6) {
            x = x + x;
        }
        x
    }

    /// Parses a tabulated potential: column 1 is `x`, then the `n²`
    /// row-major entries of `Re Q`, then those of `Im Q`. Lines starting
    /// with `#` and a non-numeric header row are skipped.
    pub fn from_csv(text: &str, n: usize) -> Result<Self, WeylError> {
        let width = 1 + 2 * n * n;
        let mut nodes = Vec::new();
        let mut values = Vec::new();
        let mut first_data_row = true;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parsed: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
            let row = match parsed {
                Ok(r) => r,
                Err(_) if first_data_row => {
                    first_data_row = false;
                    continue;
                }
                Err(e) => {
                    return Err(WeylError::InvalidModel(format!("potential table line {}: {e}", lineno + 1)));
                }
            };
            first_data_row = false;
            if row.len() != width {
                return Err(WeylError::InvalidModel(format!(
                    "potential table line {}: expected {width} columns, found {}",
                    lineno + 1,
                    row.len()
                )));
            }
            let x = T::lit(row[0]);
            if let Some(&prev) = nodes.last() {
                if !(x > prev) {
                    return Err(WeylError::InvalidModel(format!(
                        "potential table line {}: x must be strictly ascending",
                        lineno + 1
                    )));
                }
            }
            let q = Matrix::from_fn(n, n, |i, j| Complex::new(T::lit(row[1 + i * n + j]), T::lit(row[1 + n * n + i * n + j])));
            nodes.push(x);
            values.push(q);
        }
        if nodes.is_empty() {
            return Err(WeylError::InvalidModel("potential table has no rows".into()));
        }
        Ok(Potential::Tabulated { nodes, values })
    }
}

/// Half-line matrix Schrödinger operator `-y'' + Q y` with Weyl function
/// `M(λ) = E'(0, λ) E(0, λ)^{-1}` built from the Jost solution.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSchrodingerModel<T: Real> {
    potential: Potential<T>,
    x_max: T,
    ode_tol: T,
}

impl<T: Real> MatrixSchrodingerModel<T> {
    pub const DEFAULT_ODE_TOL: f64 = 1e-8;

    /// `x_max = None` picks the smallest radius whose tail estimate is below
    /// `ode_tol`.
    pub fn new(potential: Potential<T>, x_max: Option<T>, ode_tol: T) -> Result<Self, WeylError> {
        let n = potential.dim();
        if n == 0 {
            return Err(WeylError::InvalidModel("potential has dimension 0".into()));
        }
        if !(ode_tol > T::zero()) {
            return Err(WeylError::InvalidModel("ode_tol must be positive".into()));
        }
        match &potential {
            Potential::ConstantWell { depth, radius } => {
                if !depth.is_square() || !(*radius >= T::zero()) {
                    return Err(WeylError::InvalidModel("constant well needs a square depth and radius >= 0".into()));
                }
            }
            Potential::Exponential { amplitude, rate } => {
                if !amplitude.is_square() || !(*rate > T::zero()) {
                    return Err(WeylError::InvalidModel("exponential potential needs a square amplitude and rate > 0".into()));
                }
            }
            Potential::Tabulated { nodes, values } => {
                if nodes.len() != values.len() || nodes[0] < T::zero() || values.iter().any(|v| v.shape() != (n, n)) {
                    return Err(WeylError::InvalidModel("tabulated potential is malformed".into()));
                }
            }
            Potential::Zero { .. } => {}
        }
        let x_max = x_max.unwrap_or_else(|| potential.default_x_max(ode_tol));
        if !(x_max >= T::zero()) {
            return Err(WeylError::InvalidModel("x_max must be >= 0".into()));
        }
        let tail = potential.tail(x_max);
        if tail > ode_tol {
            return Err(WeylError::Truncation {
                tail: tail.to_f64_lossy(),
                tol: ode_tol.to_f64_lossy(),
            });
        }
        let model = Self { potential, x_max, ode_tol };
        model.probe_hermitian()?;
        Ok(model)
    }

    fn probe_hermitian(&self) -> Result<(), WeylError> {
        let mut probes: Vec<T> = (0..=64).map(|k| self.x_max * T::lit(k as f64 / 64.0)).collect();
        probes.extend(self.potential.breakpoints());
        let tol = T::lit(1e-12);
        for x in probes {
            let q = self.potential.value(x);
            if !q.is_hermitian(tol) {
                return Err(WeylError::InvalidModel(format!("Q({x}) is not Hermitian")));
            }
        }
        Ok(())
    }

    pub fn potential(&self) -> &Potential<T> {
        &self.potential
    }

    pub fn x_max(&self) -> T {
        self.x_max
    }

    pub fn ode_tol(&self) -> T {
        self.ode_tol
    }

    /// `(E(0, λ), E'(0, λ))` for the Jost solution `E(x, λ) ~ exp(ix√λ) I`.
    pub fn jost_solution(&self, lambda: Complex<T>) -> Result<(Matrix<T>, Matrix<T>), WeylError> {
        if lambda.im < T::zero() {
            return Err(WeylError::EvaluationDomain {
                re: lambda.re.to_f64_lossy(),
                im: lambda.im.to_f64_lossy(),
                reason: "Weyl functions are evaluated on the closed upper half plane",
            });
        }
        if lambda.norm().is_zero() {
            return Err(WeylError::EvaluationDomain {
                re: 0.0,
                im: 0.0,
                reason: "the Jost solution is not computed at λ = 0",
            });
        }
        let n = self.potential.dim();
        let nn = n * n;
        let k = branch_sqrt(lambda);
        let ik = c_i::<T>() * k;

        // E = I and E' = ik I at x_max; the factor exp(ik x_max) is applied at the end
        let zero = Complex::new(T::zero(), T::zero());
        let mut y = vec![zero; 2 * nn];
        for i in 0..n {
            y[i * n + i] = Complex::new(T::one(), T::zero());
            y[nn + i * n + i] = ik;
        }

        let mut knots: Vec<T> = self
            .potential
            .breakpoints()
            .into_iter()
            .filter(|&b| b > T::zero() && b < self.x_max)
            .collect();
        knots.push(T::zero());
        knots.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        knots.dedup();

        let cfg = OdeConfig {
            rtol: self.ode_tol * T::lit(1e-2),
            atol: self.ode_tol * T::lit(1e-2),
            h_init: T::lit(0.05) / T::one().max(k.norm()),
            max_steps: 2_000_000,
        };
        let potential = &self.potential;
        let mut from = self.x_max;
        for &to in &knots {
            if to >= from {
                continue;
            }
            // sample Q strictly inside the piece so jumps at its ends are one-sided
            let inset = (from - to) * T::lit(1e-12);
            let (lo, hi) = (to + inset, from - inset);
            let rhs = |x: T, state: &[Complex<T>], d: &mut [Complex<T>]| {
                let xc = x.max(lo).min(hi);
                let q = potential.value(xc);
                d[..nn].copy_from_slice(&state[nn..]);
                for i in 0..n {
                    for j in 0..n {
                        let mut acc = -lambda * state[i * n + j];
                        for l in 0..n {
                            acc += q[(i, l)] * state[l * n + j];
                        }
                        d[nn + i * n + j] = acc;
                    }
                }
            };
            y = dopri5(rhs, from, to, &y, &cfg).map_err(|e| match e {
                OdeFailure::StepUnderflow { x } | OdeFailure::TooManySteps { x } => WeylError::StepFailure { x },
            })?;
            from = to;
        }

        let phase = (ik * self.x_max).exp();
        let e0 = Matrix::from_vec(n, n, y[..nn].to_vec()).scale(phase);
        let e1 = Matrix::from_vec(n, n, y[nn..].to_vec()).scale(phase);
        Ok((e0, e1))
    }

    pub fn schrodinger_m(&self, lambda: Complex<T>) -> Result<Matrix<T>, WeylError> {
        let (e0, e1) = self.jost_solution(lambda)?;
        let cond = e0.cond_1();
        if !(cond <= T::lit(1e12)) {
            return Err(WeylError::SingularJost { cond: cond.to_f64_lossy() });
        }
        let m = e1.right_divide(&e0)?;
        // below zero the Jost solution is real up to a common factor, so M is
        // Hermitian; drop the integration noise in the anti-Hermitian part
        if lambda.im.is_zero() && lambda.re < T::zero() {
            Ok(m.hermitian_part())
        } else {
            Ok(m)
        }
    }
}

impl<T: Real> WeylFunction<T> for MatrixSchrodingerModel<T> {
    fn dim(&self) -> usize {
        self.potential.dim()
    }

    fn evaluate(&self, z: Complex<T>) -> Result<Matrix<T>, WeylError> {
        self.schrodinger_m(z)
    }

    fn singular_points(&self) -> Vec<T> {
        vec![T::zero()]
    }
}
