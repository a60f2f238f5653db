//! Irreversible filament breakage driven by stress peaks.
//!
//! Each filament has an independent compressive strength (Weibull) and an
//! independent tensile strength (thresholded Weibull). Only the most severe
//! stress seen so far matters: when a new compressive peak `σ` exceeds the old
//! one, each intact filament fails with the conditional probability
//! `1 - (1 - F(σ)) / (1 - F(σ_old))`, so the expected cumulative broken
//! fraction equals `F(σ)`. Tensile stress is amplified by the compressive
//! damage already present, `1 + κ F_c`, which lets a previously compressed gauge
//! break further when it is later loaded in tension.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::{linear_resistance, GaugeConfig};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeState {
    pub config: GaugeConfig,
    pub broken: u64,
    /// Most compressive total stress applied so far (Pa, <= 0).
    pub compressive_peak: f64,
    /// Largest concentrated tensile stress applied so far (Pa, >= 0).
    pub tensile_peak: f64,
    /// Unstrained resistance, infinite when open.
    pub r_unstrained: f64,
    /// Gauge factor for opening (tensile) strain.
    pub k_effective: f64,
    /// Gauge factor for closing (compressive) strain.
    pub k_closing: f64,
    pub open_circuit: bool,
}

impl GaugeState {
    pub fn new(config: GaugeConfig) -> Self {
        let mut s = GaugeState {
            config,
            broken: 0,
            compressive_peak: 0.0,
            tensile_peak: 0.0,
            r_unstrained: config.r0,
            k_effective: config.k_intrinsic,
            k_closing: config.k_intrinsic,
            open_circuit: false,
        };
        s.refresh();
        s
    }

    pub fn filament_count(&self) -> u64 {
        self.config.bundle.count
    }

    pub fn intact(&self) -> u64 {
        self.filament_count() - self.broken
    }

    pub fn broken_fraction(&self) -> f64 {
        self.broken as f64 / self.filament_count() as f64
    }

    /// Current tensile stress multiplier from compressive damage.
    pub fn stress_concentration(&self) -> f64 {
        let s = &self.config.strength;
        1.0 + s.stress_concentration * s.compressive_cdf(self.compressive_peak)
    }

    /// Applies the total (loading + residual) stress reached at one half-cycle
    /// extreme. Stress levels at or below the running peaks change nothing.
    pub fn apply_stress_peak<R: Rng + ?Sized>(&mut self, sigma_total: f64, rng: &mut R) {
        let strength = self.config.strength;
        let p_fail = if sigma_total < self.compressive_peak {
            let before = strength.compressive_cdf(self.compressive_peak);
            let after = strength.compressive_cdf(sigma_total);
            self.compressive_peak = sigma_total;
            conditional_failure(before, after)
        } else if sigma_total > 0.0 {
            let local = sigma_total * self.stress_concentration();
            if local <= self.tensile_peak {
                return;
            }
            let before = strength.tensile_cdf(self.tensile_peak);
            let after = strength.tensile_cdf(local);
            self.tensile_peak = local;
            conditional_failure(before, after)
        } else {
            return;
        };
        self.break_filaments(p_fail, rng);
    }

    fn break_filaments<R: Rng + ?Sized>(&mut self, p: f64, rng: &mut R) {
        let intact = self.intact();
        if p <= 0.0 || intact == 0 {
            return;
        }
        let newly = if p >= 1.0 {
            intact
        } else {
            Binomial::new(intact, p)
                .expect("probability in (0, 1)")
                .sample(rng)
        };
        if newly > 0 {
            self.broken += newly;
            self.refresh();
        }
    }

    fn refresh(&mut self) {
        let network = self.config.network();
        let f = self.broken_fraction();
        match network.relative_resistance(f) {
            Some(rel) => {
                self.r_unstrained = self.config.r0 * rel;
                self.open_circuit = false;
            }
            None => {
                self.r_unstrained = f64::INFINITY;
                self.open_circuit = true;
            }
        }
        self.k_effective = network.gauge_factor(f, true);
        self.k_closing = network.gauge_factor(f, false);
    }

    /// Gauge factor that applies to a strain of the given sign.
    pub fn gauge_factor_for(&self, strain: f64) -> f64 {
        if strain >= 0.0 {
            self.k_effective
        } else {
            self.k_closing
        }
    }

    /// Linear response around the current unstrained state. `None` when open.
    pub fn resistance(&self, average_strain: f64) -> Result<Option<f64>> {
        if self.open_circuit {
            return Ok(None);
        }
        linear_resistance(self.r_unstrained, self.gauge_factor_for(average_strain), average_strain).map(Some)
    }

    /// Full crack-network resistance at a finite strain. `None` when open.
    pub fn network_resistance(&self, average_strain: f64) -> Option<f64> {
        let g = self.config.network().conductance(self.broken_fraction(), average_strain);
        (g > 0.0).then(|| self.config.r0 / g)
    }
}

/// Effective gauge factor implied by the current damage.
pub fn gauge_factor_from_damage(state: &GaugeState) -> f64 {
    state.config.network().gauge_factor(state.broken_fraction(), true)
}

fn conditional_failure(cdf_before: f64, cdf_after: f64) -> f64 {
    if cdf_after <= cdf_before {
        return 0.0;
    }
    let survive_before = 1.0 - cdf_before;
    if survive_before <= 0.0 {
        return 1.0;
    }
    (1.0 - (1.0 - cdf_after) / survive_before).clamp(0.0, 1.0)
}
