use serde::{Deserialize, Serialize};

use super::fit::ols;
use super::segment::Window;
use crate::error::{Error, Result};

/// Number of strain levels at which loading and unloading branches are compared.
const LEVELS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HysteresisMetrics {
    /// Largest gap between loading and unloading resistance at equal strain,
    /// over the resistance span of the window.
    pub hysteresis: f64,
    /// Slope of the per-cycle trough resistance against cycle index (Ω/cycle).
    pub drift: f64,
    /// `drift` over the fitted trough resistance of the first cycle (1/cycle).
    pub relative_drift: f64,
    pub cycles: usize,
}

/// Linear interpolation of `(x, y)` points sorted by `x`.
fn interpolate(points: &[(f64, f64)], at: f64) -> Option<f64> {
    let i = points.partition_point(|p| p.0 < at);
    if i == 0 {
        return (points.first()?.0 == at).then(|| points[0].1);
    }
    if i == points.len() {
        return None;
    }
    let (x0, y0) = points[i - 1];
    let (x1, y1) = points[i];
    if x1 == x0 {
        return Some(y1);
    }
    Some(y0 + (y1 - y0) * (at - x0) / (x1 - x0))
}

fn branch(r: &[f64], strain: &[f64], from: usize, to: usize) -> Vec<(f64, f64)> {
    let mut b: Vec<(f64, f64)> = (from..=to).map(|i| (strain[i], r[i])).collect();
    b.sort_by(|a, b| a.0.total_cmp(&b.0));
    b
}

pub fn hysteresis_and_drift(window: &Window, r: &[f64], strain: &[f64]) -> Result<HysteresisMetrics> {
    let cycles = window.cycles();
    if cycles < 2 {
        return Err(Error::TooFewCycles { needed: 2, found: cycles });
    }
    if window.range().any(|i| !r[i].is_finite() || !strain[i].is_finite()) {
        return Err(Error::DegenerateFit("non-finite samples (open channel?)".into()));
    }
    let span = window
        .range()
        .map(|i| r[i])
        .fold(f64::NEG_INFINITY, f64::max)
        - window.range().map(|i| r[i]).fold(f64::INFINITY, f64::min);

    let mut width: f64 = 0.0;
    for c in 0..cycles {
        let (t0, pk, t1) = (window.troughs[c], window.peaks[c], window.troughs[c + 1]);
        let up = branch(r, strain, t0, pk);
        let down = branch(r, strain, pk, t1);
        let bounds = |b: &[(f64, f64)]| {
            b.iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)))
        };
        let (ulo, uhi) = bounds(&up);
        let (dlo, dhi) = bounds(&down);
        let (lo, hi) = (ulo.max(dlo), uhi.min(dhi));
        if !(hi > lo) {
            continue;
        }
        for j in 0..=LEVELS {
            let at = lo + (hi - lo) * j as f64 / LEVELS as f64;
            if let (Some(a), Some(b)) = (interpolate(&up, at), interpolate(&down, at)) {
                width = width.max((a - b).abs());
            }
        }
    }
    let hysteresis = if span > 0.0 { width / span } else { 0.0 };

    let index: Vec<f64> = (0..window.troughs.len()).map(|i| i as f64).collect();
    let baseline: Vec<f64> = window.troughs.iter().map(|&i| r[i]).collect();
    let line = ols(&index, &baseline).expect("at least three troughs");
    let relative_drift = if line.intercept != 0.0 { line.slope / line.intercept } else { 0.0 };
    Ok(HysteresisMetrics {
        hysteresis,
        drift: line.slope,
        relative_drift,
        cycles,
    })
}
