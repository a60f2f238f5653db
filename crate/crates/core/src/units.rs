//! Unit-tagged scalar values used in configuration files.
//!
//! Everything inside the crate is SI (m, Pa, K, Ω, N, s). Values read from
//! JSON carry an explicit unit string and are converted once, here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Quantity {
    pub value: f64,
    pub unit: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    Pressure,
    /// Absolute temperature, stored in kelvin.
    Temperature,
    /// Coefficient of thermal expansion, stored in 1/K.
    Expansion,
    Resistivity,
    Resistance,
    Force,
    Frequency,
    Time,
    Voltage,
    Dimensionless,
    Count,
}

impl Dimension {
    pub fn name(self) -> &'static str {
        match self {
            Dimension::Length => "length",
            Dimension::Pressure => "pressure",
            Dimension::Temperature => "temperature",
            Dimension::Expansion => "thermal expansion",
            Dimension::Resistivity => "resistivity",
            Dimension::Resistance => "resistance",
            Dimension::Force => "force",
            Dimension::Frequency => "frequency",
            Dimension::Time => "time",
            Dimension::Voltage => "voltage",
            Dimension::Dimensionless => "dimensionless quantity",
            Dimension::Count => "count",
        }
    }
}

pub const CELSIUS_OFFSET: f64 = 273.15;

impl Quantity {
    pub fn new(value: f64, unit: &str) -> Self {
        Quantity {
            value,
            unit: unit.to_string(),
        }
    }

    /// Converts to the SI base unit of `dim`.
    pub fn to_si(&self, dim: Dimension) -> Result<f64> {
        if !self.value.is_finite() {
            return Err(Error::Config(format!(
                "non-finite {} value {}",
                dim.name(),
                self.value
            )));
        }
        if dim == Dimension::Temperature {
            return match self.unit.as_str() {
                "K" => Ok(self.value),
                "degC" | "°C" | "C" => Ok(self.value + CELSIUS_OFFSET),
                _ => Err(self.unit_error(dim)),
            };
        }
        let scale = scale_of(dim, &self.unit).ok_or_else(|| self.unit_error(dim))?;
        Ok(self.value * scale)
    }

    /// Converts to a non-negative integer count.
    pub fn to_count(&self) -> Result<u64> {
        let v = self.to_si(Dimension::Count)?;
        if v < 0.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
            return Err(Error::Config(format!("count must be a non-negative integer, got {v}")));
        }
        Ok(v as u64)
    }

    fn unit_error(&self, dim: Dimension) -> Error {
        Error::Unit {
            unit: self.unit.clone(),
            dimension: dim.name(),
        }
    }
}

fn scale_of(dim: Dimension, unit: &str) -> Option<f64> {
    let s = match (dim, unit) {
        (Dimension::Length, "m") => 1.0,
        (Dimension::Length, "cm") => 1e-2,
        (Dimension::Length, "mm") => 1e-3,
        (Dimension::Length, "um" | "µm") => 1e-6,

        (Dimension::Pressure, "Pa") => 1.0,
        (Dimension::Pressure, "kPa") => 1e3,
        (Dimension::Pressure, "MPa") => 1e6,
        (Dimension::Pressure, "GPa") => 1e9,

        (Dimension::Expansion, "1/K" | "1/degC") => 1.0,
        (Dimension::Expansion, "ppm/K" | "ppm/degC" | "um/m/K") => 1e-6,

        (Dimension::Resistivity, "ohm*m") => 1.0,
        (Dimension::Resistivity, "ohm*cm") => 1e-2,
        (Dimension::Resistivity, "mohm*cm") => 1e-5,

        (Dimension::Resistance, "ohm") => 1.0,
        (Dimension::Resistance, "kohm") => 1e3,
        (Dimension::Resistance, "Mohm") => 1e6,

        (Dimension::Force, "N") => 1.0,
        (Dimension::Force, "kN") => 1e3,

        (Dimension::Frequency, "Hz") => 1.0,
        (Dimension::Frequency, "kHz") => 1e3,

        (Dimension::Time, "s") => 1.0,
        (Dimension::Time, "ms") => 1e-3,
        (Dimension::Time, "min") => 60.0,

        (Dimension::Voltage, "V") => 1.0,
        (Dimension::Voltage, "mV") => 1e-3,

        (Dimension::Dimensionless, "1" | "") => 1.0,
        (Dimension::Count, "count" | "1") => 1.0,
        _ => return None,
    };
    Some(s)
}
