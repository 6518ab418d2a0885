//! λ-grids with nudging away from declared singular points.

use crate::config::{GridSpec, Scale};

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub values: Vec<f64>,
    /// `(original, nudged)` for every moved point.
    pub nudges: Vec<(f64, f64)>,
}

pub fn raw_points(spec: &GridSpec) -> Vec<f64> {
    let n = spec.points;
    if n == 1 {
        return vec![spec.start];
    }
    let t = |k: usize| k as f64 / (n - 1) as f64;
    match spec.scale {
        Scale::Linear => (0..n).map(|k| spec.start + (spec.stop - spec.start) * t(k)).collect(),
        Scale::Log => {
            let (a, b) = (spec.start.ln(), spec.stop.ln());
            (0..n)
                .map(|k| match k {
                    0 => spec.start,
                    k if k == n - 1 => spec.stop,
                    k => (a + (b - a) * t(k)).exp(),
                })
                .collect()
        }
    }
}

/// Moves a point lying within `nudge` of some entry of `avoid` to distance
/// `nudge` on its own side (upwards when it sits exactly on the point).
pub fn nudge_point(x: f64, avoid: &[f64], nudge: f64) -> f64 {
    if nudge <= 0.0 {
        return x;
    }
    let mut y = x;
    // a few passes settle clusters of nearby points
    for _ in 0..avoid.len().max(1) + 1 {
        let Some(&p) = avoid.iter().find(|&&p| (y - p).abs() < nudge) else { break };
        y = if y >= p { p + nudge } else { p - nudge };
    }
    y
}

pub fn build_grid(spec: &GridSpec, avoid: &[f64]) -> Grid {
    let mut values = Vec::with_capacity(spec.points);
    let mut nudges = Vec::new();
    for x in raw_points(spec) {
        let y = nudge_point(x, avoid, spec.nudge);
        if y != x {
            nudges.push((x, y));
        }
        values.push(y);
    }
    Grid { values, nudges }
}
