use serde::{Deserialize, Serialize};

use super::fit::FitResult;
use super::segment::Window;
use crate::mechanics::{Beam, Gauge, Orientation};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreakinPoint {
    /// Peak strain at the composite centroid under the largest force applied
    /// so far in this orientation, up to and including the window.
    pub max_breakin_strain: f64,
    pub max_force: f64,
    pub k: f64,
    /// Fitted zero-strain resistance of the window (Ω).
    pub r_unstrained: f64,
    pub window: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakinCurve {
    pub gauge: Gauge,
    pub orientation: Option<Orientation>,
    /// Strictly increasing in `max_breakin_strain`.
    pub points: Vec<BreakinPoint>,
}

/// Mean resistance over the samples of a window that sit at its lowest force.
pub fn floor_resistance(window: &Window, force: &[f64], r: &[f64], band: f64) -> f64 {
    let lo = window.range().map(|i| force[i]).fold(f64::INFINITY, f64::min);
    let (sum, n) = window
        .range()
        .filter(|&i| force[i] <= lo + band && r[i].is_finite())
        .fold((0.0, 0usize), |(s, n), i| (s + r[i], n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

/// Builds one curve per orientation for `gauge` from per-window fits.
/// Windows sharing the same break-in strain keep the latest fit.
pub fn breakin_curve(
    gauge: Gauge,
    windows: &[Window],
    fits: &[Option<FitResult>],
    force: &[f64],
    beam: &Beam,
) -> Vec<BreakinCurve> {
    let mut curves: Vec<BreakinCurve> = Vec::new();
    let mut running_max = 0.0f64;
    let mut scanned = 0usize;
    let mut orientation: Option<Option<Orientation>> = None;
    for (w, fit) in windows.iter().zip(fits) {
        if orientation != Some(w.orientation) {
            orientation = Some(w.orientation);
            // rows after the last window of the previous orientation count
            // towards the new one; they are floor-level holds in practice
            running_max = 0.0;
            curves.push(BreakinCurve {
                gauge,
                orientation: w.orientation,
                points: Vec::new(),
            });
        }
        for &f in &force[scanned..w.end] {
            running_max = running_max.max(f);
        }
        scanned = w.end;
        let Some(fit) = fit else { continue };
        let point = BreakinPoint {
            max_breakin_strain: beam.strain_at_force(running_max),
            max_force: running_max,
            k: fit.k,
            r_unstrained: fit.r0_fit,
            window: w.id,
        };
        let points = &mut curves.last_mut().expect("curve pushed above").points;
        match points.last_mut() {
            Some(last) if last.max_breakin_strain >= point.max_breakin_strain => *last = point,
            _ => points.push(point),
        }
    }
    curves
}
