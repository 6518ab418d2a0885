//! Run configuration: JSON schema, validation and construction of the core
//! model and boundary parameter.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use weyl_scatter_core::cxlinalg::herm_eig;
use weyl_scatter_core::models::{FreeHalfLineModel, MatrixSchrodingerModel};
use weyl_scatter_core::relation::check_selfadjoint;
use weyl_scatter_core::ssf::{dirac_threshold_1, dirac_threshold_2};
use weyl_scatter_core::{CMatrix, DiracModel, Model, PointInteractionModel, Potential, Quad, Theta, WeylFunction};

use crate::CliError;

pub const QUAD_TOL_ENV: &str = "WEYL_SCATTER_QUAD_TOL";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub theta: ThetaSpec,
    pub grid: GridSpec,
    #[serde(default)]
    pub quad: QuadSpec,
    #[serde(default)]
    pub outputs: OutputSpec,
    /// Energy at which `recover-theta` and the recovery check evaluate `S`.
    #[serde(default = "default_probe")]
    pub lambda_probe: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    FreeScalar {
        n: usize,
    },
    SchrodingerMatrix {
        n: usize,
        potential: PotentialSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x_max: Option<f64>,
        #[serde(default = "default_ode_tol")]
        ode_tol: f64,
    },
    Dirac {
        a: f64,
    },
    PointInteraction {
        inner: Box<ModelSpec>,
    },
    /// Entrywise conjugate of `inner`. Not a Weyl function; useful to see
    /// the validation checks fail.
    Conjugated {
        inner: Box<ModelSpec>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Zero,
    ConstantWell {
        depth: MatrixSpec,
        radius: f64,
    },
    Exponential {
        amplitude: MatrixSpec,
        rate: f64,
    },
    /// CSV file, relative paths resolved against the config file.
    Tabulated {
        path: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ThetaSpec {
    Matrix {
        re: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        im: Option<Vec<Vec<f64>>>,
    },
    KernelPair {
        #[serde(rename = "A_re")]
        a_re: Vec<Vec<f64>>,
        #[serde(rename = "A_im", default, skip_serializing_if = "Option::is_none")]
        a_im: Option<Vec<Vec<f64>>>,
        #[serde(rename = "B_re")]
        b_re: Vec<Vec<f64>>,
        #[serde(rename = "B_im", default, skip_serializing_if = "Option::is_none")]
        b_im: Option<Vec<Vec<f64>>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub scale: Scale,
    /// Grid points closer than this to a singular point or threshold are
    /// moved this far away from it.
    #[serde(default = "default_nudge")]
    pub nudge: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadSpec {
    pub tol: f64,
    pub cond_cap: f64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        let q = Quad::default();
        Self {
            tol: q.tol,
            cond_cap: q.cond_cap,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?}, expected csv or json")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

fn default_probe() -> f64 {
    1e8
}

fn default_ode_tol() -> f64 {
    weyl_scatter_core::models::MatrixSchrodingerModel::<f64>::DEFAULT_ODE_TOL
}

fn default_nudge() -> f64 {
    1e-6
}

fn config_err(path: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Config {
        path: path.into(),
        message: message.into(),
    }
}

impl RunConfig {
    /// Parses and validates, reporting the JSON path of the first problem.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_err(format!("$.{path}").trim_end_matches('.').to_string(), e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact JSON encoding.
    pub fn hash(&self) -> String {
        let compact = serde_json::to_string(self).expect("config serializes");
        format!("{:x}", Sha256::digest(compact.as_bytes()))
    }

    /// Applies a `quad.tol` override given as text (the environment value).
    pub fn override_quad_tol(&mut self, raw: Option<&str>) -> Result<(), CliError> {
        let Some(raw) = raw else { return Ok(()) };
        let tol: f64 = raw
            .trim()
            .parse()
            .map_err(|_| config_err(QUAD_TOL_ENV, format!("not a number: {raw:?}")))?;
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(config_err(QUAD_TOL_ENV, "must be positive and finite"));
        }
        self.quad.tol = tol;
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let g = &self.grid;
        if g.points < 1 {
            return Err(config_err("$.grid.points", "must be at least 1"));
        }
        if !(g.start.is_finite() && g.stop.is_finite()) {
            return Err(config_err("$.grid", "start and stop must be finite"));
        }
        if !(g.start < g.stop) {
            return Err(config_err("$.grid.stop", "must be greater than start"));
        }
        if g.scale == Scale::Log && !(g.start > 0.0) {
            return Err(config_err("$.grid.start", "log scale needs a positive start"));
        }
        if !(g.nudge >= 0.0 && g.nudge.is_finite()) {
            return Err(config_err("$.grid.nudge", "must be non-negative"));
        }
        if !(self.quad.tol > 0.0 && self.quad.tol.is_finite()) {
            return Err(config_err("$.quad.tol", "must be positive"));
        }
        if !(self.quad.cond_cap > 1.0) {
            return Err(config_err("$.quad.cond_cap", "must exceed 1"));
        }
        if !(self.lambda_probe > 0.0 && self.lambda_probe.is_finite()) {
            return Err(config_err("$.lambda_probe", "must be positive"));
        }
        validate_model(&self.model, "$.model")
    }

    pub fn quad(&self) -> Quad {
        Quad {
            tol: self.quad.tol,
            cond_cap: self.quad.cond_cap,
            ..Quad::default()
        }
    }
}

fn validate_model(spec: &ModelSpec, path: &str) -> Result<(), CliError> {
    match spec {
        ModelSpec::FreeScalar { n } | ModelSpec::SchrodingerMatrix { n, .. } if *n == 0 => {
            Err(config_err(format!("{path}.n"), "must be at least 1"))
        }
        ModelSpec::SchrodingerMatrix { x_max, ode_tol, .. } => {
            if !(*ode_tol > 0.0) {
                return Err(config_err(format!("{path}.ode_tol"), "must be positive"));
            }
            if let Some(x) = x_max {
                if !(*x > 0.0 && x.is_finite()) {
                    return Err(config_err(format!("{path}.x_max"), "must be positive"));
                }
            }
            Ok(())
        }
        ModelSpec::Dirac { a } if !(*a > 0.0 && a.is_finite()) => {
            Err(config_err(format!("{path}.a"), "mass must be positive"))
        }
        ModelSpec::PointInteraction { inner } | ModelSpec::Conjugated { inner } => {
            validate_model(inner, &format!("{path}.inner"))
        }
        _ => Ok(()),
    }
}

fn matrix_from(re: &[Vec<f64>], im: Option<&Vec<Vec<f64>>>, path: &str) -> Result<CMatrix, CliError> {
    let zeros: Vec<Vec<f64>>;
    let im = match im {
        Some(im) => im.as_slice(),
        None => {
            zeros = re.iter().map(|row| vec![0.0; row.len()]).collect();
            &zeros
        }
    };
    let m = CMatrix::from_re_im(re, im).ok_or_else(|| config_err(path, "ragged rows or re/im shape mismatch"))?;
    if !m.is_square() || m.rows() == 0 {
        return Err(config_err(path, format!("expected a non-empty square matrix, got {:?}", m.shape())));
    }
    if m.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(config_err(path, "entries must be finite"));
    }
    Ok(m)
}

fn expect_dim(m: &CMatrix, n: usize, path: &str) -> Result<(), CliError> {
    if m.rows() != n {
        return Err(config_err(path, format!("expected {n}x{n}, got {}x{}", m.rows(), m.cols())));
    }
    Ok(())
}

impl ModelSpec {
    /// Builds the model; `base` resolves relative potential paths.
    pub fn build(&self, base: &Path) -> Result<Model, CliError> {
        self.build_at(base, "$.model")
    }

    fn build_at(&self, base: &Path, path: &str) -> Result<Model, CliError> {
        let wrap = |e: weyl_scatter_core::WeylError| config_err(path, e.to_string());
        Ok(match self {
            ModelSpec::FreeScalar { n } => Model::Free(FreeHalfLineModel::new(*n).map_err(wrap)?),
            ModelSpec::Dirac { a } => Model::Dirac(DiracModel::new(*a).map_err(wrap)?),
            ModelSpec::PointInteraction { inner } => {
                Model::PointInteraction(PointInteractionModel::new(inner.build_at(base, &format!("{path}.inner"))?))
            }
            ModelSpec::Conjugated { inner } => Model::Conjugated(Box::new(inner.build_at(base, &format!("{path}.inner"))?)),
            ModelSpec::SchrodingerMatrix {
                n,
                potential,
                x_max,
                ode_tol,
            } => {
                let ppath = format!("{path}.potential");
                let pot = match potential {
                    PotentialSpec::Zero => Potential::Zero { dim: *n },
                    PotentialSpec::ConstantWell { depth, radius } => {
                        let depth = matrix_from(&depth.re, depth.im.as_ref(), &format!("{ppath}.depth"))?;
                        expect_dim(&depth, *n, &format!("{ppath}.depth"))?;
                        Potential::ConstantWell { depth, radius: *radius }
                    }
                    PotentialSpec::Exponential { amplitude, rate } => {
                        let amp = matrix_from(&amplitude.re, amplitude.im.as_ref(), &format!("{ppath}.amplitude"))?;
                        expect_dim(&amp, *n, &format!("{ppath}.amplitude"))?;
                        Potential::Exponential { amplitude: amp, rate: *rate }
                    }
                    PotentialSpec::Tabulated { path: file } => {
                        let full = base.join(file);
                        let text = std::fs::read_to_string(&full)
                            .map_err(|e| config_err(format!("{ppath}.path"), format!("{}: {e}", full.display())))?;
                        Potential::from_csv(&text, *n).map_err(|e| config_err(format!("{ppath}.path"), e.to_string()))?
                    }
                };
                Model::Schrodinger(MatrixSchrodingerModel::new(pot, *x_max, *ode_tol).map_err(|e| config_err(&ppath, e.to_string()))?)
            }
        })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ModelSpec::FreeScalar { .. } => "free_scalar",
            ModelSpec::SchrodingerMatrix { .. } => "schrodinger_matrix",
            ModelSpec::Dirac { .. } => "dirac",
            ModelSpec::PointInteraction { .. } => "point_interaction",
            ModelSpec::Conjugated { .. } => "conjugated",
        }
    }
}

impl ThetaSpec {
    /// Builds `Θ` and checks it is a selfadjoint parameter of size `n`.
    pub fn build(&self, n: usize) -> Result<Theta, CliError> {
        let theta = match self {
            ThetaSpec::Matrix { re, im } => {
                let t = matrix_from(re, im.as_ref(), "$.theta")?;
                expect_dim(&t, n, "$.theta")?;
                Theta::matrix(t).map_err(|e| config_err("$.theta", e.to_string()))?
            }
            ThetaSpec::KernelPair { a_re, a_im, b_re, b_im } => {
                let a = matrix_from(a_re, a_im.as_ref(), "$.theta.A_re")?;
                let b = matrix_from(b_re, b_im.as_ref(), "$.theta.B_re")?;
                expect_dim(&a, n, "$.theta.A_re")?;
                expect_dim(&b, n, "$.theta.B_re")?;
                Theta::kernel_pair(a, b).map_err(|e| config_err("$.theta", e.to_string()))?
            }
        };
        let report = check_selfadjoint(&theta);
        if !report.passed() {
            return Err(config_err("$.theta", format!("not a selfadjoint parameter: {:?}", report.violations)));
        }
        Ok(theta)
    }

    pub fn is_matrix(&self) -> bool {
        matches!(self, ThetaSpec::Matrix { .. })
    }
}

/// Real points where the pipeline is undefined for this model and `Θ`:
/// the model's singular points plus the thresholds where an eigenvalue of
/// the boundary problem enters or leaves.
pub fn declared_points(spec: &ModelSpec, model: &Model, theta: &Theta) -> Vec<f64> {
    let mut pts = model.singular_points();
    let Ok(t) = theta.as_operator() else { return pts };
    let hermitian = t.hermitian_part();
    let eigs = herm_eig(&hermitian, 1.0).map(|e| e.eigenvalues).unwrap_or_default();
    let free_thresholds = |shift: f64| eigs.iter().map(|e| e - shift).filter(|&e| e < 0.0).map(|e| -e * e).collect::<Vec<_>>();
    match spec {
        ModelSpec::FreeScalar { .. } => pts.extend(free_thresholds(0.0)),
        ModelSpec::PointInteraction { inner } if matches!(**inner, ModelSpec::FreeScalar { .. }) => {
            pts.extend(free_thresholds(1.0))
        }
        ModelSpec::Dirac { a } if t.rows() == 2 && t[(0, 1)].norm() < 1e-14 && t[(1, 0)].norm() < 1e-14 => {
            pts.push(dirac_threshold_1(*a, t[(0, 0)].re));
            pts.push(dirac_threshold_2(*a, t[(1, 1)].re));
        }
        _ => {}
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    const FREE: &str = r#"{
        "model": {"kind": "free_scalar", "n": 1},
        "theta": {"kind": "matrix", "re": [[2.0]]},
        "grid": {"start": 1, "stop": 9, "points": 3}
    }"#;

    #[test]
    fn defaults_filled() {
        let cfg = RunConfig::from_json(FREE).unwrap();
        assert_eq!(cfg.grid.scale, Scale::Linear);
        assert_eq!(cfg.grid.nudge, 1e-6);
        assert_eq!(cfg.quad.tol, 1e-9);
        assert_eq!(cfg.lambda_probe, 1e8);
        assert_eq!(cfg.outputs.format, Format::Csv);
    }

    #[test]
    fn paths_in_errors() {
        let bad = FREE.replace("\"points\": 3", "\"points\": \"three\"");
        match RunConfig::from_json(&bad) {
            Err(CliError::Config { path, .. }) => assert_eq!(path, "$.grid.points"),
            other => panic!("{other:?}"),
        }
        let bad = FREE.replace("\"stop\": 9", "\"stop\": 0");
        match RunConfig::from_json(&bad) {
            Err(CliError::Config { path, .. }) => assert_eq!(path, "$.grid.stop"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn theta_shape_checked() {
        let cfg = RunConfig::from_json(FREE).unwrap();
        assert!(cfg.theta.build(2).is_err());
        let nonsym = ThetaSpec::Matrix {
            re: vec![vec![0.0, 1.0], vec![0.0, 0.0]],
            im: None,
        };
        assert!(matches!(nonsym.build(2), Err(CliError::Config { .. })));
    }

    #[test]
    fn env_override() {
        let mut cfg = RunConfig::from_json(FREE).unwrap();
        let h = cfg.hash();
        cfg.override_quad_tol(Some("1e-11")).unwrap();
        assert_eq!(cfg.quad.tol, 1e-11);
        assert_ne!(cfg.hash(), h);
        assert!(cfg.override_quad_tol(Some("abc")).is_err());
    }

    #[test]
    fn free_thresholds() {
        let spec = ModelSpec::FreeScalar { n: 2 };
        let model = spec.build(Path::new(".")).unwrap();
        let theta = Theta::matrix(CMatrix::from_real_diag(&[-2.0, 1.0])).unwrap();
        assert_eq!(declared_points(&spec, &model, &theta), vec![-4.0, 0.0]);
    }
}
