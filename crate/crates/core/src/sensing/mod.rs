//! Electrical model of a carbon-fiber strain gauge.
//!
//! A gauge is a bundle of parallel monofilaments. Compressive stress peaks
//! break filaments (see [`damage`]); broken filaments conduct through
//! strain-sensitive crack contacts and, with a conductive matrix, through a
//! bridging path (see [`network`]). The readout is a voltage divider per
//! channel (see [`divider`]).

pub mod damage;
pub mod divider;
pub mod network;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use damage::GaugeState;
pub use divider::{divider_forward, divider_inverse, DividerConfig, DividerPlacement};
pub use network::CrackNetwork;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Matrix {
    /// PETG: no current path across a fully separated crack.
    Insulating,
    /// Carbon-black filled PLA: bridges separated cracks.
    Conductive,
}

/// Geometry of the filament bundle forming one gauge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilamentBundle {
    pub count: u64,
    pub diameter: f64,
    pub length: f64,
}

impl FilamentBundle {
    pub fn conducting_area(&self) -> f64 {
        let r = 0.5 * self.diameter;
        self.count as f64 * std::f64::consts::PI * r * r
    }
}

/// Per-filament strength statistics (two-parameter Weibull in compression,
/// thresholded Weibull in tension).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrengthModel {
    pub compressive_modulus: f64,
    pub compressive_scale: f64,
    pub tensile_modulus: f64,
    pub tensile_scale: f64,
    /// Local tensile stress below which no filament fails.
    pub tensile_threshold: f64,
    /// Multiplier on tensile stress per unit compressive damage
    /// (`1 + stress_concentration * F_c`).
    pub stress_concentration: f64,
}

impl StrengthModel {
    /// Weibull CDF `1 - exp(-(|σ|/σ0)^m)` for compressive failure.
    pub fn compressive_cdf(&self, stress: f64) -> f64 {
        weibull_cdf(stress.abs(), self.compressive_scale, self.compressive_modulus)
    }

    /// Fraction of filaments failed by a local tensile stress.
    pub fn tensile_cdf(&self, local_stress: f64) -> f64 {
        let excess = local_stress - self.tensile_threshold;
        if excess <= 0.0 {
            0.0
        } else {
            weibull_cdf(excess, self.tensile_scale, self.tensile_modulus)
        }
    }
}

pub fn weibull_cdf(x: f64, scale: f64, modulus: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    -(-(x / scale).powf(modulus)).exp_m1()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeConfig {
    /// Unstrained, undamaged resistance (Ω).
    pub r0: f64,
    pub k_intrinsic: f64,
    pub matrix: Matrix,
    pub bundle: FilamentBundle,
    pub strength: StrengthModel,
    /// Resistance of one crack contact between touching filament ends (Ω).
    pub contact_resistance: f64,
    /// Resistance of the matrix path across one separated crack (Ω).
    pub bridge_resistance: f64,
    /// Relative resistance change of a crack contact per unit strain.
    pub crack_sensitivity: f64,
    /// Relative resistance change of a matrix bridge per unit strain.
    pub bridge_sensitivity: f64,
    /// Crack sensitivity under closing (compressive) strain relative to opening.
    pub closing_ratio: f64,
}

impl GaugeConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidGauge(msg.to_string()));
        if !(self.r0 > 0.0) {
            return bad("R0 must be > 0");
        }
        if self.bundle.count < 1 {
            return bad("filament count must be >= 1");
        }
        if !(self.bundle.diameter > 0.0 && self.bundle.length >= 0.0) {
            return bad("filament diameter must be > 0 and length >= 0");
        }
        let s = &self.strength;
        if !(s.compressive_scale > 0.0 && s.compressive_modulus > 0.0) {
            return bad("compressive Weibull scale and modulus must be > 0");
        }
        if !(s.tensile_scale > 0.0 && s.tensile_modulus > 0.0 && s.tensile_threshold >= 0.0) {
            return bad("tensile Weibull parameters must be > 0");
        }
        if !(s.stress_concentration >= 0.0) {
            return bad("stress concentration must be >= 0");
        }
        if !(self.contact_resistance > 0.0 && self.bridge_resistance > 0.0) {
            return bad("crack contact and bridge resistances must be > 0");
        }
        if !(self.crack_sensitivity >= 0.0 && self.bridge_sensitivity >= 0.0 && self.closing_ratio >= 0.0) {
            return bad("crack sensitivities must be >= 0");
        }
        Ok(())
    }

    /// Resistance of a single filament over the gauge length.
    pub fn filament_resistance(&self) -> f64 {
        self.r0 * self.bundle.count as f64
    }

    pub fn network(&self) -> CrackNetwork {
        CrackNetwork::from_config(self)
    }
}

/// `R = ρ L / A` for the whole bundle.
pub fn baseline_resistance(bundle: &FilamentBundle, fiber_resistivity: f64) -> Result<f64> {
    let area = bundle.conducting_area();
    if !(area > 0.0) {
        return Err(Error::ZeroArea);
    }
    Ok(fiber_resistivity * bundle.length / area)
}

/// Resistance of the matrix sheath relative to the fiber bundle over the same
/// length, given the matrix/fiber area ratio.
pub fn matrix_parallel_ratio(matrix_resistivity: f64, fiber_resistivity: f64, area_ratio: f64) -> f64 {
    (matrix_resistivity / fiber_resistivity) / area_ratio
}

pub const DEFAULT_NEGLIGIBILITY_THRESHOLD: f64 = 100.0;

pub fn matrix_path_negligible(ratio: f64, threshold: f64) -> bool {
    ratio >= threshold
}

/// Linear piezoresistive response `R = R_u (1 + k ε̄)`.
pub fn linear_resistance(r_unstrained: f64, k_effective: f64, average_strain: f64) -> Result<f64> {
    let factor = 1.0 + k_effective * average_strain;
    if !(factor > 0.0) {
        return Err(Error::NegativeResistance(factor));
    }
    Ok(r_unstrained * factor)
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn baseline_of_a_1500_filament_bundle() {
        // ρL/A = 2e-5 * 0.13 / (1500 π (3.5e-6)^2) = 45.04 Ω
        let r = baseline_resistance(&bundle(), 2e-5).unwrap();
        assert_relative_eq!(r, 45.039_766_208, max_relative = 1e-6);
        assert!((r - 45.0).abs() < 0.5);
    }

    #[test]
    fn doubling_filaments_halves_resistance() {
        let b = bundle();
        let doubled = FilamentBundle { count: 3000, ..b };
        let r1 = baseline_resistance(&b, 2e-5).unwrap();
        let r2 = baseline_resistance(&doubled, 2e-5).unwrap();
        assert_relative_eq!(r2, r1 / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn zero_length_and_zero_area() {
        let b = FilamentBundle { length: 0.0, ..bundle() };
        assert_eq!(baseline_resistance(&b, 2e-5).unwrap(), 0.0);
        let b = FilamentBundle { count: 0, ..bundle() };
        assert!(matches!(baseline_resistance(&b, 2e-5), Err(Error::ZeroArea)));
    }

    #[test]
    fn matrix_ratio_values() {
        // the ratio is unit-free; in Ω·cm both resistivities are exact binary fractions of the result
        assert_eq!(matrix_parallel_ratio(30.0, 0.002, 4.0), 3750.0);
        assert_eq!(matrix_parallel_ratio(2e-5, 2e-5, 1.0), 1.0);
        assert_eq!(matrix_parallel_ratio(30.0, 0.002, 2.0), 7500.0);
        // in SI the inputs themselves are rounded, so only ulp-level agreement is possible
        assert_relative_eq!(matrix_parallel_ratio(0.30, 2e-5, 4.0), 3750.0, max_relative = 1e-15);
        assert!(matrix_path_negligible(3750.0, DEFAULT_NEGLIGIBILITY_THRESHOLD));
        assert!(!matrix_path_negligible(50.0, DEFAULT_NEGLIGIBILITY_THRESHOLD));
    }

    #[test]
    fn linear_response() {
        assert_relative_eq!(linear_resistance(46.0, 126.0, 1e-4).unwrap(), 46.5796, max_relative = 1e-12);
        assert_eq!(linear_resistance(46.0, 126.0, 0.0).unwrap(), 46.0);
        assert_eq!(linear_resistance(46.0, 0.0, 3e-3).unwrap(), 46.0);
        assert!(matches!(linear_resistance(46.0, 126.0, -0.01), Err(Error::NegativeResistance(_))));
    }

    #[test]
    fn weibull_cdf_limits() {
        assert_eq!(weibull_cdf(0.0, 700e6, 5.0), 0.0);
        assert_relative_eq!(weibull_cdf(700e6, 700e6, 5.0), 1.0 - (-1.0f64).exp(), max_relative = 1e-15);
        assert_eq!(weibull_cdf(0.99 * 700e6, 700e6, f64::INFINITY), 0.0);
        assert_eq!(weibull_cdf(1.01 * 700e6, 700e6, f64::INFINITY), 1.0);
    }

    #[test]
    fn tensile_cdf_is_zero_below_threshold() {
        let s = gauge(Matrix::Conductive).strength;
        assert_eq!(s.tensile_cdf(774.0e6), 0.0);
        assert!(s.tensile_cdf(900e6) > 0.0);
    }

    #[test]
    fn config_validation() {
        let mut c = gauge(Matrix::Conductive);
        assert!(c.validate().is_ok());
        c.bundle.count = 0;
        assert!(c.validate().is_err());
        let c = GaugeConfig { r0: 0.0, ..gauge(Matrix::Conductive) };
        assert!(c.validate().is_err());
    }
}
