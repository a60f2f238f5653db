use crate::mechanics::{max_strain_from_deflection, Gauge, Orientation};
use crate::model::BeamGeometry;

/// Average gauge strain from a midspan deflection (positive downward):
/// `ε̄ = ±6 d_NA y / L²`, negative on the loaded face.
pub fn gauge_strain(deflection: f64, geometry: &BeamGeometry, orientation: Orientation, gauge: Gauge) -> f64 {
    let eps_avg = 0.5 * max_strain_from_deflection(deflection, geometry);
    orientation.face_of(gauge).sign() * eps_avg
}

/// Per-sample average strain of one gauge. `orientations` holds one entry per
/// sample.
pub fn strain_from_deflection(
    deflection: &[f64],
    geometry: &BeamGeometry,
    orientations: &[Orientation],
    gauge: Gauge,
) -> Vec<f64> {
    deflection
        .iter()
        .zip(orientations)
        .map(|(&y, &o)| gauge_strain(y, geometry, o, gauge))
        .collect()
}

/// Removes the mean of `strain[range]`, for records whose absolute deflection
/// offset is unknown.
pub fn relative_strain(strain: &[f64]) -> Vec<f64> {
    if strain.is_empty() {
        return Vec::new();
    }
    let mean = strain.iter().sum::<f64>() / strain.len() as f64;
    strain.iter().map(|e| e - mean).collect()
}

pub fn peak_to_peak(x: &[f64]) -> f64 {
    let (lo, hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if lo.is_finite() {
        hi - lo
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::geometry;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn short_sample_at_sixty_hundredths_of_a_millimetre() {
        // ε_max = 12 · 2.1 · 0.60 / 114² = 1.1634e-3
        let g = geometry(6.0);
        let e = gauge_strain(0.60e-3, &g, Orientation::Initial, Gauge::Two);
        assert_relative_eq!(2.0 * e, 12.0 * 2.1 * 0.60 / (114.0 * 114.0), max_relative = 1e-12);
        assert!((2.0 * e - 1.16e-3).abs() < 0.01e-3);
        assert_eq!(gauge_strain(0.60e-3, &g, Orientation::Initial, Gauge::One), -e);
        assert_eq!(gauge_strain(0.60e-3, &g, Orientation::Flipped, Gauge::One), e);
        assert_eq!(gauge_strain(0.0, &g, Orientation::Initial, Gauge::One).abs(), 0.0);
    }

    proptest! {
        #[test]
        fn offset_does_not_change_relative_peak_to_peak(
            ys in prop::collection::vec(0.0..1e-3f64, 2..50),
            offset in -1e-3..1e-3f64,
        ) {
            let g = geometry(8.0);
            let o = vec![Orientation::Initial; ys.len()];
            let a = strain_from_deflection(&ys, &g, &o, Gauge::One);
            let shifted: Vec<f64> = ys.iter().map(|y| y + offset).collect();
            let b = strain_from_deflection(&shifted, &g, &o, Gauge::One);
            let (ra, rb) = (relative_strain(&a), relative_strain(&b));
            prop_assert!((peak_to_peak(&ra) - peak_to_peak(&rb)).abs() <= 1e-12 * peak_to_peak(&ra).max(1e-9));
        }
    }
}
