//! The four subcommands.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use weyl_scatter_core::cxlinalg::herm_eig;
use weyl_scatter_core::scattering::{dirac_theta_recovery, smatrix, smatrix_factorized, smatrix_scalar_type, RANK_TOL};
use weyl_scatter_core::ssf::{classify, gap_count, trace_formula_check, xi, xi_closed_form_dirac, xi_closed_form_free};
use weyl_scatter_core::weyl::{eval_boundary, validate_nevanlinna};
use weyl_scatter_core::{
    asymptotic_check, evaluate_point, CMatrix, Complex64, Model, Quad, Regime, Scattering, Theta, WeylFunction,
};

use crate::config::{declared_points, ModelSpec, RunConfig};
use crate::grid::{build_grid, Grid};
use crate::output::{matrix_json, ResultRow, Table};
use crate::CliError;

pub const UNITARITY_TOL: f64 = 1e-10;
pub const UNITARITY_COND_CAP: f64 = 1e10;
pub const BK_TOL: f64 = 1e-8;
pub const SCALAR_TYPE_TOL: f64 = 1e-10;
pub const SIMILARITY_TOL: f64 = 1e-9;
pub const GAP_TOL: f64 = 1e-8;
pub const CLOSED_FORM_TOL: f64 = 1e-8;
pub const ASYMPTOTIC_CAP: f64 = 0.2;
pub const TRACE_TOL: f64 = 1e-5;
pub const RECOVERY_TOL: f64 = 1e-3;
pub const ASYMPTOTIC_LAMBDAS: [f64; 3] = [1e2, 1e3, 1e4];

/// A validated config with its model, parameter and grid built.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub config: RunConfig,
    pub model: Model,
    pub theta: Theta,
    pub grid: Grid,
    pub quad: Quad,
    pub hash: String,
}

impl Prepared {
    pub fn new(config: RunConfig, base: &Path) -> Result<Self, CliError> {
        config.validate()?;
        let model = config.model.build(base)?;
        let theta = config.theta.build(model.dim())?;
        let avoid = declared_points(&config.model, &model, &theta);
        let grid = build_grid(&config.grid, &avoid);
        Ok(Self {
            quad: config.quad(),
            hash: config.hash(),
            config,
            model,
            theta,
            grid,
        })
    }
}

fn sweep(p: &Prepared, command: &'static str) -> Result<Table, CliError> {
    let rows = p
        .grid
        .values
        .par_iter()
        .map(|&l| {
            evaluate_point(&p.model, &p.theta, l, &p.quad, RANK_TOL)
                .map(|ev| ResultRow::from_evaluation(&ev))
                .map_err(|e| CliError::Numerical(format!("λ = {l}: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Table {
        command,
        config_hash: p.hash.clone(),
        nudges: p.grid.nudges.clone(),
        rows,
    })
}

/// Scattering matrix, rank, determinant (and ξ when `Θ` is an operator) on
/// the grid.
pub fn cmd_scatter(p: &Prepared) -> Result<Table, CliError> {
    sweep(p, "scatter")
}

/// Spectral shift function and Birman-Krein residual on the grid.
pub fn cmd_ssf(p: &Prepared) -> Result<Table, CliError> {
    if !p.theta.is_operator() {
        return Err(CliError::Config {
            path: "$.theta".into(),
            message: "the spectral shift function needs Θ to be an operator, not a relation".into(),
        });
    }
    sweep(p, "ssf")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check_name: String,
    pub points_tested: usize,
    /// `None` when no point was tested.
    pub max_residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub config_hash: String,
    pub model: String,
    pub pass: bool,
    pub checks: Vec<CheckResult>,
}

struct Acc {
    name: &'static str,
    tol: f64,
    points: usize,
    worst: f64,
    broken: bool,
    note: Option<String>,
}

impl Acc {
    fn new(name: &'static str, tol: f64) -> Self {
        Self {
            name,
            tol,
            points: 0,
            worst: 0.0,
            broken: false,
            note: None,
        }
    }

    fn push(&mut self, r: f64) {
        self.points += 1;
        if r.is_nan() {
            self.broken = true;
        } else {
            self.worst = self.worst.max(r);
        }
    }

    fn fail(&mut self, why: String) {
        self.points += 1;
        self.broken = true;
        self.note.get_or_insert(why);
    }

    fn skip(mut self, why: &str) -> Self {
        if self.points == 0 {
            self.note = Some(format!("not applicable: {why}"));
        }
        self
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            check_name: self.name.to_string(),
            points_tested: self.points,
            max_residual: (self.points > 0).then_some(self.worst),
            tolerance: self.tol,
            pass: !self.broken && self.worst <= self.tol,
            values: Vec::new(),
            note: self.note,
        }
    }
}

struct Sample {
    m: CMatrix,
    sp: Scattering,
    xi: Option<f64>,
    regime: Regime,
}

fn sample(p: &Prepared, l: f64) -> Option<Sample> {
    let m = eval_boundary(&p.model, l).ok()?;
    let sp = smatrix(l, &m, &p.theta, RANK_TOL).ok()?;
    let xi = if p.theta.is_operator() { xi(&m, &p.theta, &p.quad).ok() } else { None };
    let regime = classify(&m);
    Some(Sample { m, sp, xi, regime })
}

fn subsample(values: &[f64], k: usize) -> Vec<f64> {
    if values.len() <= k {
        return values.to_vec();
    }
    (0..k).map(|j| values[j * (values.len() - 1) / (k - 1)]).collect()
}

fn theta_eigs(theta: &Theta) -> Option<(CMatrix, Vec<f64>)> {
    let t = theta.as_operator().ok()?;
    let e = herm_eig(&t.hermitian_part(), 1.0).ok()?;
    Some((t, e.eigenvalues))
}

/// Runs every invariant check on the configured model, parameter and grid.
/// Failures are report entries, never errors.
pub fn cmd_verify(p: &Prepared) -> VerifyReport {
    let samples: Vec<(f64, Option<Sample>)> = p.grid.values.par_iter().map(|&l| (l, sample(p, l))).collect();
    let ok: Vec<(f64, &Sample)> = samples.iter().filter_map(|(l, s)| s.as_ref().map(|s| (*l, s))).collect();
    let n = p.model.dim();
    let operator = theta_eigs(&p.theta);

    let mut unitarity = Acc::new("unitarity", UNITARITY_TOL);
    let mut bk = Acc::new("birman_krein", BK_TOL);
    let mut gap = Acc::new("gap_integrality", GAP_TOL);
    let mut scalar = Acc::new("scalar_type_agreement", SCALAR_TYPE_TOL);
    let mut similar = Acc::new("factorization_similarity", SIMILARITY_TOL);
    for &(_, s) in &ok {
        if s.regime == Regime::Ac && s.sp.cond < UNITARITY_COND_CAP {
            unitarity.push(s.sp.s_reduced.unitarity_defect());
        }
        if let Some(x) = s.xi {
            bk.push(weyl_scatter_core::ssf::birman_krein_residual(&s.sp, x));
            if s.regime == Regime::Gap {
                match gap_count(&s.m, &p.theta) {
                    Ok(count) => gap.push((x - count as f64).abs().max((s.sp.det_s - 1.0).norm())),
                    Err(e) => gap.fail(e.to_string()),
                }
            }
        }
        if operator.is_none() {
            continue;
        }
        let mean = s.m.trace() / n as f64;
        let spread = (&s.m - &CMatrix::scalar(n, mean)).norm_fro();
        if mean.im > 0.0 && spread <= 1e-13 * mean.norm().max(1.0) {
            match smatrix_scalar_type(mean, &p.theta, n) {
                Ok(st) => scalar.push(st.max_abs_diff(&s.sp.s_full)),
                Err(e) => scalar.fail(e.to_string()),
            }
        }
        if s.sp.rank == n {
            match smatrix_factorized(&s.m, &p.theta) {
                Ok(f) => {
                    let worst = f
                        .power_traces()
                        .iter()
                        .zip(s.sp.s_full.power_traces())
                        .map(|(a, b)| (a - b).norm() / b.norm().max(1.0))
                        .fold(0.0, f64::max);
                    similar.push(worst);
                }
                Err(e) => similar.fail(e.to_string()),
            }
        }
    }

    let checks = vec![
        unitarity.skip("no absolutely continuous grid points").finish(),
        bk.skip("Θ is not an operator or no regular points").finish(),
        scalar.skip("M(λ) is not a multiple of the identity on the grid").finish(),
        similar.skip("Im M(λ) is never of full rank on the grid").finish(),
        gap.skip("no gap points on the grid").finish(),
        closed_form_check(p, &ok, operator.as_ref()),
        asymptotic_check_entry(p),
        trace_check(p),
        nevanlinna_check(p),
        recovery_check(p),
    ];
    VerifyReport {
        config_hash: p.hash.clone(),
        model: p.config.model.kind().to_string(),
        pass: checks.iter().all(|c| c.pass),
        checks,
    }
}

fn closed_form_check(p: &Prepared, ok: &[(f64, &Sample)], operator: Option<&(CMatrix, Vec<f64>)>) -> CheckResult {
    let mut acc = Acc::new("closed_form_agreement", CLOSED_FORM_TOL);
    let Some((t, eigs)) = operator else {
        return acc.skip("Θ is not an operator").finish();
    };
    let shifted: Vec<f64> = eigs.iter().map(|e| e - 1.0).collect();
    let form: Option<Box<dyn Fn(f64) -> Option<f64>>> = match &p.config.model {
        ModelSpec::FreeScalar { .. } => Some(Box::new(|l| xi_closed_form_free(eigs, l).ok())),
        ModelSpec::PointInteraction { inner } if matches!(**inner, ModelSpec::FreeScalar { .. }) => {
            Some(Box::new(|l| xi_closed_form_free(&shifted, l).ok()))
        }
        ModelSpec::Dirac { a } if t[(0, 1)].norm() < 1e-14 && t[(1, 0)].norm() < 1e-14 => {
            let (a, t1, t2) = (*a, t[(0, 0)].re, t[(1, 1)].re);
            Some(Box::new(move |l| xi_closed_form_dirac(a, t1, t2, l).ok()))
        }
        _ => None,
    };
    let Some(form) = form else {
        return acc.skip("no closed form for this model and Θ").finish();
    };
    for &(l, s) in ok {
        if let (Some(x), Some(cf)) = (s.xi, form(l)) {
            acc.push((x - cf).abs());
        }
    }
    acc.skip("no regular grid points").finish()
}

fn asymptotic_values(model: &Model) -> Option<Result<Vec<f64>, String>> {
    let lambdas = ASYMPTOTIC_LAMBDAS;
    match model {
        Model::Free(_) | Model::Schrodinger(_) => Some(asymptotic_check(model, &lambdas).map_err(|e| e.to_string())),
        Model::PointInteraction(pi) => asymptotic_values(&pi.inner),
        Model::Dirac(_) => Some(
            lambdas
                .iter()
                .map(|&l| {
                    let m = eval_boundary(model, l).map_err(|e| e.to_string())?;
                    Ok((&m - &CMatrix::scalar(2, Complex64::i())).norm_fro())
                })
                .collect(),
        ),
        _ => None,
    }
}

fn asymptotic_check_entry(p: &Prepared) -> CheckResult {
    let mut acc = Acc::new("asymptotic_decay", ASYMPTOTIC_CAP);
    match asymptotic_values(&p.model) {
        None => acc.skip("no high-energy reference for this model").finish(),
        Some(Err(e)) => {
            acc.fail(e);
            acc.finish()
        }
        Some(Ok(dev)) => {
            let last = *dev.last().expect("three energies");
            acc.points = dev.len();
            acc.worst = last;
            let tiny = dev.iter().all(|&d| d < 1e-12);
            let decreasing = dev.windows(2).all(|w| w[1] < w[0]);
            acc.broken = dev.iter().any(|d| !d.is_finite()) || !(tiny || decreasing);
            let mut r = acc.finish();
            r.values = dev;
            r
        }
    }
}

fn trace_check(p: &Prepared) -> CheckResult {
    let mut acc = Acc::new("trace_formula", TRACE_TOL);
    if !p.theta.is_operator() {
        return acc.skip("Θ is not an operator").finish();
    }
    let quad = Quad {
        tol: p.quad.tol.min(1e-11),
        ..p.quad
    };
    let results: Vec<Result<f64, String>> = subsample(&p.grid.values, 20)
        .par_iter()
        .map(|&l| {
            let z = Complex64::new(l, 1.0);
            let h = 1e-4 * z.norm().max(1.0);
            trace_formula_check(&p.model, &p.theta, z, h, &quad)
                .map(|r| r.residual / r.rhs.norm().max(1.0))
                .map_err(|e| format!("z = {z}: {e}"))
        })
        .collect();
    for r in results {
        match r {
            Ok(r) => acc.push(r),
            Err(e) => acc.fail(e),
        }
    }
    acc.finish()
}

fn nevanlinna_check(p: &Prepared) -> CheckResult {
    let mut acc = Acc::new("nevanlinna_validation", 0.0);
    let zs: Vec<Complex64> = subsample(&p.grid.values, 50)
        .iter()
        .flat_map(|&l| [0.1, 1.0].map(|eta| Complex64::new(l, eta)))
        .collect();
    let report = validate_nevanlinna(&p.model, &zs);
    acc.points = report.points_tested;
    let negative = report
        .violations
        .iter()
        .map(|v| if v.min_eigenvalue.is_nan() { f64::INFINITY } else { -v.min_eigenvalue })
        .fold(0.0, f64::max);
    acc.worst = negative.max(0.0);
    acc.broken = !report.passed();
    if let Some(v) = report.violations.first() {
        acc.note = Some(format!("{} violations, first {:?} at {}", report.violations.len(), v.kind, v.point));
    }
    let mut r = acc.finish();
    if r.max_residual == Some(f64::INFINITY) {
        r.max_residual = None;
    }
    r
}

fn recover(p: &Prepared) -> Result<CMatrix, CliError> {
    let l = p.config.lambda_probe;
    let m = eval_boundary(&p.model, l).map_err(|e| CliError::Numerical(e.to_string()))?;
    let sp = smatrix(l, &m, &p.theta, RANK_TOL).map_err(|e| CliError::Numerical(e.to_string()))?;
    dirac_theta_recovery(&sp.s_full).map_err(|e| CliError::Numerical(e.to_string()))
}

fn recovery_check(p: &Prepared) -> CheckResult {
    let mut acc = Acc::new("theta_recovery", RECOVERY_TOL);
    let (ModelSpec::Dirac { .. }, Ok(t)) = (&p.config.model, p.theta.as_operator()) else {
        return acc.skip("needs the Dirac model and an operator Θ").finish();
    };
    match recover(p) {
        Ok(est) => acc.push((&est - &t).norm_fro()),
        Err(e) => acc.fail(e.to_string()),
    }
    acc.finish()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Recovery {
    pub config_hash: String,
    pub lambda_probe: f64,
    pub theta_estimate: serde_json::Value,
    pub theta_true: serde_json::Value,
    pub error_norm: f64,
}

/// Evaluates `S` at `lambda_probe` and inverts its high-energy limit.
pub fn cmd_recover_theta(p: &Prepared) -> Result<Recovery, CliError> {
    if !matches!(p.config.model, ModelSpec::Dirac { .. }) {
        return Err(CliError::Config {
            path: "$.model.kind".into(),
            message: "recover-theta needs the dirac model".into(),
        });
    }
    let t = p.theta.as_operator().map_err(|e| CliError::Config {
        path: "$.theta".into(),
        message: e.to_string(),
    })?;
    let est = recover(p)?;
    Ok(Recovery {
        config_hash: p.hash.clone(),
        lambda_probe: p.config.lambda_probe,
        error_norm: (&est - &t).norm_fro(),
        theta_estimate: matrix_json(&est),
        theta_true: matrix_json(&t),
    })
}
