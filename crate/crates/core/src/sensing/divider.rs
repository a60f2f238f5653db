use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which side of the divider the gauge sits on; the measured voltage is always
/// taken across the lower element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DividerPlacement {
    /// `V = Vs * Rg / (Rg + Rdiv)`
    #[default]
    GaugeLow,
    /// `V = Vs * Rdiv / (Rg + Rdiv)`
    GaugeHigh,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DividerConfig {
    /// Series resistor of each channel (Ω).
    pub resistors: [f64; 2],
    pub supply: f64,
    pub placement: DividerPlacement,
}

impl DividerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.resistors.iter().all(|&r| r > 0.0) && self.supply > 0.0) {
            return Err(Error::InvalidGauge(
                "divider resistors and supply voltage must be > 0".into(),
            ));
        }
        Ok(())
    }
}

impl Default for DividerConfig {
    fn default() -> Self {
        DividerConfig {
            resistors: [46.1, 46.6],
            supply: 5.0,
            placement: DividerPlacement::GaugeLow,
        }
    }
}

pub fn divider_forward(r_gauge: f64, r_div: f64, supply: f64, placement: DividerPlacement) -> f64 {
    match placement {
        DividerPlacement::GaugeLow => supply * r_gauge / (r_gauge + r_div),
        DividerPlacement::GaugeHigh => supply * r_div / (r_gauge + r_div),
    }
}

/// Gauge resistance from a measured divider voltage. Voltages at or beyond the
/// rails mean a shorted, saturated or open channel.
pub fn divider_inverse(voltage: f64, r_div: f64, supply: f64, placement: DividerPlacement) -> Result<f64> {
    if !(voltage > 0.0 && voltage < supply) {
        return Err(Error::VoltageOutOfRange { voltage, supply });
    }
    Ok(match placement {
        DividerPlacement::GaugeLow => r_div * voltage / (supply - voltage),
        DividerPlacement::GaugeHigh => r_div * (supply - voltage) / voltage,
    })
}
