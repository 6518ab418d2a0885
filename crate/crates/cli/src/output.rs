//! CSV and JSON serialization of λ-sweeps and verification reports.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use weyl_scatter_core::{CMatrix, Complex64, PointEvaluation, Regime};

/// One λ of a sweep. `rank` and `s_reduced` are absent for singular points.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub lambda: f64,
    pub rank: Option<usize>,
    pub s_reduced: Option<CMatrix>,
    pub det_s: Option<Complex64>,
    pub xi: f64,
    pub bk_residual: f64,
    pub cond: f64,
    pub regime: Regime,
    pub failure: Option<String>,
}

impl ResultRow {
    pub fn from_evaluation(ev: &PointEvaluation<f64>) -> Self {
        let sp = ev.scattering.as_ref();
        Self {
            lambda: ev.ssf.lambda,
            rank: sp.map(|s| s.rank),
            s_reduced: sp.map(|s| s.s_reduced.clone()),
            det_s: sp.map(|s| s.det_s),
            xi: ev.ssf.xi,
            bk_residual: ev.ssf.bk_residual,
            cond: sp.map_or(f64::NAN, |s| s.cond),
            regime: ev.ssf.regime,
            failure: ev.failure.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: &'static str,
    pub config_hash: String,
    pub nudges: Vec<(f64, f64)>,
    pub rows: Vec<ResultRow>,
}

/// 17 significant digits, `.` as decimal separator regardless of locale.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

pub fn column_names(rank: usize) -> Vec<String> {
    let mut cols = vec!["lambda".to_string()];
    for i in 0..rank {
        for j in 0..rank {
            cols.push(format!("S_re_{i}_{j}"));
            cols.push(format!("S_im_{i}_{j}"));
        }
    }
    cols.extend(
        ["rank", "det_re", "det_im", "xi", "bk_residual", "cond", "regime"]
            .iter()
            .map(|s| s.to_string()),
    );
    cols
}

fn csv_fields(row: &ResultRow) -> Vec<String> {
    let mut out = vec![fmt_f64(row.lambda)];
    if let Some(s) = &row.s_reduced {
        for z in s.as_slice() {
            out.push(fmt_f64(z.re));
            out.push(fmt_f64(z.im));
        }
    }
    out.push(row.rank.map_or_else(String::new, |r| r.to_string()));
    let det = row.det_s.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
    out.push(fmt_f64(det.re));
    out.push(fmt_f64(det.im));
    out.push(fmt_f64(row.xi));
    out.push(fmt_f64(row.bk_residual));
    out.push(fmt_f64(row.cond));
    out.push(row.regime.as_str().to_string());
    out
}

/// Rows are written in λ order; a new block with its own rank and column
/// header starts whenever the rank changes. Singular rows form blocks with
/// an empty `S`.
pub fn write_csv<W: Write>(table: &Table, mut w: W) -> io::Result<()> {
    writeln!(w, "# weyl-scatter {}", table.command)?;
    writeln!(w, "# config_hash sha256:{}", table.config_hash)?;
    for (from, to) in &table.nudges {
        writeln!(w, "# nudged {} -> {}", fmt_f64(*from), fmt_f64(*to))?;
    }
    let mut current: Option<Option<usize>> = None;
    for row in &table.rows {
        if current != Some(row.rank) {
            match row.rank {
                Some(r) => writeln!(w, "# block rank={r}")?,
                None => writeln!(w, "# block singular")?,
            }
            writeln!(w, "# {}", column_names(row.rank.unwrap_or(0)).join(","))?;
            current = Some(row.rank);
        }
        if let Some(why) = &row.failure {
            writeln!(w, "# singular at {}: {why}", fmt_f64(row.lambda))?;
        }
        writeln!(w, "{}", csv_fields(row).join(","))?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonRow {
    pub lambda: f64,
    pub rank: Option<usize>,
    pub s_re: Option<Vec<Vec<f64>>>,
    pub s_im: Option<Vec<Vec<f64>>>,
    pub det_re: Option<f64>,
    pub det_im: Option<f64>,
    pub xi: Option<f64>,
    pub bk_residual: Option<f64>,
    pub cond: Option<f64>,
    pub regime: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonTable {
    pub command: String,
    pub config_hash: String,
    pub nudges: Vec<[f64; 2]>,
    pub rows: Vec<JsonRow>,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn split(m: &CMatrix) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let (r, c) = m.shape();
    let re = (0..r).map(|i| (0..c).map(|j| m[(i, j)].re).collect()).collect();
    let im = (0..r).map(|i| (0..c).map(|j| m[(i, j)].im).collect()).collect();
    (re, im)
}

impl From<&Table> for JsonTable {
    fn from(t: &Table) -> Self {
        let rows = t
            .rows
            .iter()
            .map(|row| {
                let (s_re, s_im) = row.s_reduced.as_ref().map(split).unzip();
                JsonRow {
                    lambda: row.lambda,
                    rank: row.rank,
                    s_re,
                    s_im,
                    det_re: row.det_s.map(|d| d.re),
                    det_im: row.det_s.map(|d| d.im),
                    xi: finite(row.xi),
                    bk_residual: finite(row.bk_residual),
                    cond: finite(row.cond),
                    regime: row.regime.as_str().to_string(),
                    failure: row.failure.clone(),
                }
            })
            .collect();
        JsonTable {
            command: t.command.to_string(),
            config_hash: t.config_hash.clone(),
            nudges: t.nudges.iter().map(|&(a, b)| [a, b]).collect(),
            rows,
        }
    }
}

pub fn write_json<W: Write, S: Serialize>(value: &S, mut w: W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)
}

pub fn matrix_json(m: &CMatrix) -> serde_json::Value {
    let (re, im) = split(m);
    serde_json::json!({ "re": re, "im": im })
}
