//! Crack network of a partially broken filament bundle.
//!
//! Conductances are normalised so that the undamaged bundle has `G = 1`;
//! the bundle resistance is `R0 / G`. With a broken fraction `f`:
//!
//! * intact filaments, fraction `1 - f`, conduct with the intrinsic gauge factor;
//! * broken filaments whose two neighbours are both intact stay in contact,
//!   fraction `f (1 - f)^2`; each carries a crack contact in series with the
//!   filament whose resistance scales with `1 + c ε`;
//! * the remaining broken filaments have lost contact. A conductive matrix
//!   bridges them with a weakly strain-sensitive path; an insulating matrix
//!   leaves them open.
//!
//! The sensitivity therefore rises with damage while contacts dominate and
//! falls once most cracks have separated.

use super::{GaugeConfig, Matrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrackNetwork {
    pub k_intrinsic: f64,
    /// Crack contact resistance over filament resistance.
    pub contact_ratio: f64,
    /// Matrix bridge resistance over filament resistance.
    pub bridge_ratio: f64,
    pub crack_sensitivity: f64,
    pub bridge_sensitivity: f64,
    pub closing_ratio: f64,
    pub matrix: Matrix,
}

/// Population split of the bundle for a broken fraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Populations {
    pub intact: f64,
    pub in_contact: f64,
    pub separated: f64,
}

impl CrackNetwork {
    pub fn from_config(c: &GaugeConfig) -> Self {
        let rf = c.filament_resistance();
        CrackNetwork {
            k_intrinsic: c.k_intrinsic,
            contact_ratio: c.contact_resistance / rf,
            bridge_ratio: c.bridge_resistance / rf,
            crack_sensitivity: c.crack_sensitivity,
            bridge_sensitivity: c.bridge_sensitivity,
            closing_ratio: c.closing_ratio,
            matrix: c.matrix,
        }
    }

    pub fn populations(broken_fraction: f64) -> Populations {
        let f = broken_fraction.clamp(0.0, 1.0);
        let in_contact = f * (1.0 - f) * (1.0 - f);
        Populations {
            intact: 1.0 - f,
            in_contact,
            separated: f - in_contact,
        }
    }

    fn sensitivities(&self, strain: f64) -> (f64, f64) {
        if strain >= 0.0 {
            (self.crack_sensitivity, self.bridge_sensitivity)
        } else {
            (
                self.crack_sensitivity * self.closing_ratio,
                self.bridge_sensitivity * self.closing_ratio,
            )
        }
    }

    /// Normalised conductance at a finite average strain.
    pub fn conductance(&self, broken_fraction: f64, strain: f64) -> f64 {
        let p = Self::populations(broken_fraction);
        let (c, cb) = self.sensitivities(strain);
        let mut g = p.intact / (1.0 + self.k_intrinsic * strain)
            + p.in_contact / (1.0 + self.contact_ratio * (1.0 + c * strain));
        if self.matrix == Matrix::Conductive {
            g += p.separated / (1.0 + self.bridge_ratio * (1.0 + cb * strain));
        }
        g
    }

    /// Conductance and its one-sided strain derivative at zero strain.
    /// `opening` selects the tensile (`ε → 0+`) or compressive side.
    pub fn small_signal(&self, broken_fraction: f64, opening: bool) -> (f64, f64) {
        let p = Self::populations(broken_fraction);
        let (c, cb) = self.sensitivities(if opening { 0.0 } else { -1.0 });
        let rc = self.contact_ratio;
        let rb = self.bridge_ratio;
        let mut g = p.intact + p.in_contact / (1.0 + rc);
        let mut dg = -p.intact * self.k_intrinsic - p.in_contact * rc * c / ((1.0 + rc) * (1.0 + rc));
        if self.matrix == Matrix::Conductive {
            g += p.separated / (1.0 + rb);
            dg -= p.separated * rb * cb / ((1.0 + rb) * (1.0 + rb));
        }
        (g, dg)
    }

    /// Gauge factor `(dR/dε)/R` at zero strain; zero for an open circuit.
    pub fn gauge_factor(&self, broken_fraction: f64, opening: bool) -> f64 {
        let (g, dg) = self.small_signal(broken_fraction, opening);
        if g > 0.0 {
            -dg / g
        } else {
            0.0
        }
    }

    /// Unstrained resistance relative to `R0`, `None` for an open circuit.
    pub fn relative_resistance(&self, broken_fraction: f64) -> Option<f64> {
        let (g, _) = self.small_signal(broken_fraction, true);
        (g > 0.0).then(|| 1.0 / g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensing::fixtures::gauge;

    #[test]
    fn undamaged_bundle_has_intrinsic_response() {
        let n = gauge(Matrix::Conductive).network();
        assert_eq!(n.gauge_factor(0.0, true), 0.0);
        assert_eq!(n.relative_resistance(0.0), Some(1.0));
        let n = CrackNetwork { k_intrinsic: 1.8, ..n };
        assert_eq!(n.gauge_factor(0.0, true), 1.8);
    }

    #[test]
    fn gauge_factor_rises_then_falls() {
        let n = gauge(Matrix::Conductive).network();
        let ks: Vec<f64> = (0..=100).map(|i| n.gauge_factor(i as f64 / 100.0, true)).collect();
        let peak = ks
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap();
        assert!(peak > 10 && peak < 90, "peak at {peak}");
        assert!(ks[..=peak].windows(2).all(|w| w[1] >= w[0]));
        assert!(ks[peak..].windows(2).all(|w| w[1] <= w[0]));
        assert!(ks[peak] > 100.0 && ks[peak] < 160.0, "peak k = {}", ks[peak]);
    }

    #[test]
    fn conductive_matrix_stays_finite_when_fully_broken() {
        let n = gauge(Matrix::Conductive).network();
        let r = n.relative_resistance(1.0).unwrap();
        assert!(r.is_finite() && r > 1.0);
        let k_end = n.gauge_factor(1.0, true);
        assert!(k_end.is_finite() && k_end > 0.0);
        // continuous from the left
        let k_near = n.gauge_factor(1.0 - 1e-9, true);
        assert!((k_near - k_end).abs() < 1e-5 * k_end);
        assert!((n.relative_resistance(1.0 - 1e-9).unwrap() - r).abs() < 1e-6 * r);
    }

    #[test]
    fn insulating_matrix_opens_when_fully_broken() {
        let n = gauge(Matrix::Insulating).network();
        assert_eq!(n.relative_resistance(1.0), None);
        assert!(n.relative_resistance(0.99).unwrap() > 10.0);
        assert_eq!(n.gauge_factor(1.0, true), 0.0);
    }

    #[test]
    fn finite_difference_matches_small_signal() {
        for matrix in [Matrix::Conductive, Matrix::Insulating] {
            let n = CrackNetwork { k_intrinsic: 2.0, ..gauge(matrix).network() };
            for &f in &[0.0, 0.05, 0.3, 0.6, 0.95] {
                let h = 1e-7;
                let r = |e: f64| 1.0 / n.conductance(f, e);
                let slope = (r(h) - r(-h)) / (2.0 * h);
                let (g, _) = n.small_signal(f, true);
                let expected = n.gauge_factor(f, true) / g;
                assert!(((slope - expected) / expected).abs() < 1e-6, "f={f}: {slope} vs {expected}");
            }
        }
    }

    #[test]
    fn closing_ratio_scales_compressive_side() {
        let base = gauge(Matrix::Conductive).network();
        let n = CrackNetwork { closing_ratio: 0.5, ..base };
        let f = 0.2;
        assert!(n.gauge_factor(f, false) < n.gauge_factor(f, true));
        assert_eq!(base.gauge_factor(f, false), base.gauge_factor(f, true));
    }
}
