//! JSON configuration documents and the shipped sample presets.
//!
//! A document has the top-level keys `geometry`, `materials`, `sensing` and
//! `experiment` (plus optional `name` and `analysis`). Physical fields are
//! `{"value": number, "unit": string}`; enum fields are plain strings.
//! Several documents can be layered: objects merge key by key and later
//! documents win, arrays and scalars are replaced whole. The merged document
//! is then checked strictly, so misspelt keys are errors.

use std::path::Path;

use serde::Deserialize;
use serde_json::Value;

use crate::analysis::{AnalysisOptions, StrainMode};
use crate::error::{Error, Result};
use crate::experiment::{BreakinSet, ExperimentPlan, ResponseDecorator, Scenario, WaveformSpec};
use crate::mechanics::Orientation;
use crate::model::{BeamGeometry, MaterialSet};
use crate::sensing::{
    baseline_resistance, DividerConfig, DividerPlacement, FilamentBundle, GaugeConfig, Matrix, StrengthModel,
};
use crate::units::{Dimension, Quantity};

pub const PRESET_NAMES: [&str; 3] = ["short", "medium", "tall"];

pub fn preset_source(name: &str) -> Option<&'static str> {
    match name {
        "short" => Some(include_str!("../presets/short.json")),
        "medium" => Some(include_str!("../presets/medium.json")),
        "tall" => Some(include_str!("../presets/tall.json")),
        _ => None,
    }
}

pub fn preset_document(name: &str) -> Result<Value> {
    let src = preset_source(name).ok_or_else(|| Error::Config(format!("unknown preset `{name}`")))?;
    Ok(serde_json::from_str(src)?)
}

pub fn load_document(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Recursively merges `over` into `base`.
pub fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    #[serde(default)]
    name: Option<String>,
    geometry: RawGeometry,
    materials: RawMaterials,
    sensing: RawSensing,
    experiment: RawExperiment,
    #[serde(default)]
    analysis: Option<RawAnalysis>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    beam_height: Quantity,
    beam_width: Quantity,
    hollow_height: Quantity,
    hollow_width: Quantity,
    composite_height: Quantity,
    composite_width: Quantity,
    neutral_axis_offset: Quantity,
    span: Quantity,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMaterials {
    petg_modulus: Quantity,
    composite_modulus: Quantity,
    fiber_modulus: Quantity,
    pla_modulus: Quantity,
    petg_expansion: Quantity,
    fiber_expansion: Quantity,
    ambient_temperature: Quantity,
    composite_temperature: Quantity,
    petg_temperature: Quantity,
    fiber_resistivity: Quantity,
    matrix_resistivity: Quantity,
    composite_tensile_strength: Quantity,
    composite_compressive_strength: Quantity,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSensing {
    matrix: Matrix,
    filament_count: Quantity,
    filament_diameter: Quantity,
    gauge_length: Quantity,
    /// Overrides the resistance computed from the fiber resistivity.
    #[serde(default)]
    r0: Option<Quantity>,
    k_intrinsic: Quantity,
    weibull_modulus: Quantity,
    weibull_scale: Quantity,
    tensile_weibull_modulus: Quantity,
    tensile_weibull_scale: Quantity,
    tensile_threshold: Quantity,
    stress_concentration: Quantity,
    contact_resistance: Quantity,
    bridge_resistance: Quantity,
    crack_sensitivity: Quantity,
    bridge_sensitivity: Quantity,
    closing_ratio: Quantity,
    divider: RawDivider,
    #[serde(default)]
    decorator: Option<RawDecorator>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDivider {
    resistors: [Quantity; 2],
    supply: Quantity,
    placement: DividerPlacement,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDecorator {
    drift_per_cycle: Quantity,
    noise: Quantity,
    insulating_noise_factor: Quantity,
    first_peak_excess: Quantity,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBreakinSet {
    offset: Quantity,
    amplitude: Quantity,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    small_amplitude: Quantity,
    small_cycles: Quantity,
    breakin_cycles_per_set: Quantity,
    breakin_sets: Vec<RawBreakinSet>,
    hold_duration: Quantity,
    cycle_frequency: Quantity,
    force_floor: Quantity,
    force_ceiling: Quantity,
    sample_rate: Quantity,
    orientations: Vec<Orientation>,
    #[serde(default)]
    seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAnalysis {
    amplitude_tolerance: Quantity,
}

/// Settings of the inverse pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisSettings {
    /// Relative slack on the small-set amplitude when detecting windows.
    pub amplitude_tolerance: f64,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        AnalysisSettings {
            amplitude_tolerance: 0.1,
        }
    }
}

/// A fully resolved configuration in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub name: Option<String>,
    pub geometry: BeamGeometry,
    pub materials: MaterialSet,
    pub gauge: GaugeConfig,
    pub divider: DividerConfig,
    pub decorator: ResponseDecorator,
    pub waveform: WaveformSpec,
    pub orientations: Vec<Orientation>,
    pub sample_rate: f64,
    pub seed: Option<u64>,
    pub analysis: AnalysisSettings,
}

fn si(q: &Quantity, dim: Dimension, field: &str) -> Result<f64> {
    q.to_si(dim).map_err(|e| Error::Config(format!("{field}: {e}")))
}

fn count(q: &Quantity, field: &str) -> Result<u64> {
    q.to_count().map_err(|e| Error::Config(format!("{field}: {e}")))
}

impl Config {
    pub fn from_value(doc: Value) -> Result<Config> {
        let raw: RawDocument = serde_json::from_value(doc).map_err(|e| Error::Config(e.to_string()))?;
        Self::from_raw(raw)
    }

    pub fn from_json_str(text: &str) -> Result<Config> {
        Self::from_value(serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?)
    }

    pub fn preset(name: &str) -> Result<Config> {
        Self::from_value(preset_document(name)?)
    }

    /// Merges `layers` on top of an optional preset, in order.
    pub fn layered(preset: Option<&str>, layers: &[&Path]) -> Result<Config> {
        let mut doc = match preset {
            Some(p) => preset_document(p)?,
            None => Value::Object(Default::default()),
        };
        for path in layers {
            merge(&mut doc, load_document(path)?);
        }
        Self::from_value(doc)
    }

    fn from_raw(raw: RawDocument) -> Result<Config> {
        use Dimension::*;
        let g = &raw.geometry;
        let geometry = BeamGeometry {
            beam_height: si(&g.beam_height, Length, "geometry.beam_height")?,
            beam_width: si(&g.beam_width, Length, "geometry.beam_width")?,
            hollow_height: si(&g.hollow_height, Length, "geometry.hollow_height")?,
            hollow_width: si(&g.hollow_width, Length, "geometry.hollow_width")?,
            composite_height: si(&g.composite_height, Length, "geometry.composite_height")?,
            composite_width: si(&g.composite_width, Length, "geometry.composite_width")?,
            neutral_axis_offset: si(&g.neutral_axis_offset, Length, "geometry.neutral_axis_offset")?,
            span: si(&g.span, Length, "geometry.span")?,
        };
        let m = &raw.materials;
        let materials = MaterialSet {
            petg_modulus: si(&m.petg_modulus, Pressure, "materials.petg_modulus")?,
            composite_modulus: si(&m.composite_modulus, Pressure, "materials.composite_modulus")?,
            fiber_modulus: si(&m.fiber_modulus, Pressure, "materials.fiber_modulus")?,
            pla_modulus: si(&m.pla_modulus, Pressure, "materials.pla_modulus")?,
            petg_expansion: si(&m.petg_expansion, Expansion, "materials.petg_expansion")?,
            fiber_expansion: si(&m.fiber_expansion, Expansion, "materials.fiber_expansion")?,
            ambient_temperature: si(&m.ambient_temperature, Temperature, "materials.ambient_temperature")?,
            composite_temperature: si(&m.composite_temperature, Temperature, "materials.composite_temperature")?,
            petg_temperature: si(&m.petg_temperature, Temperature, "materials.petg_temperature")?,
            fiber_resistivity: si(&m.fiber_resistivity, Resistivity, "materials.fiber_resistivity")?,
            matrix_resistivity: si(&m.matrix_resistivity, Resistivity, "materials.matrix_resistivity")?,
            composite_tensile_strength: si(
                &m.composite_tensile_strength,
                Pressure,
                "materials.composite_tensile_strength",
            )?,
            composite_compressive_strength: si(
                &m.composite_compressive_strength,
                Pressure,
                "materials.composite_compressive_strength",
            )?,
        };

        let s = &raw.sensing;
        let bundle = FilamentBundle {
            count: count(&s.filament_count, "sensing.filament_count")?,
            diameter: si(&s.filament_diameter, Length, "sensing.filament_diameter")?,
            length: si(&s.gauge_length, Length, "sensing.gauge_length")?,
        };
        let r0 = match &s.r0 {
            Some(q) => si(q, Resistance, "sensing.r0")?,
            None => baseline_resistance(&bundle, materials.fiber_resistivity)?,
        };
        let gauge = GaugeConfig {
            r0,
            k_intrinsic: si(&s.k_intrinsic, Dimensionless, "sensing.k_intrinsic")?,
            matrix: s.matrix,
            bundle,
            strength: StrengthModel {
                compressive_modulus: si(&s.weibull_modulus, Dimensionless, "sensing.weibull_modulus")?,
                compressive_scale: si(&s.weibull_scale, Pressure, "sensing.weibull_scale")?,
                tensile_modulus: si(&s.tensile_weibull_modulus, Dimensionless, "sensing.tensile_weibull_modulus")?,
                tensile_scale: si(&s.tensile_weibull_scale, Pressure, "sensing.tensile_weibull_scale")?,
                tensile_threshold: si(&s.tensile_threshold, Pressure, "sensing.tensile_threshold")?,
                stress_concentration: si(&s.stress_concentration, Dimensionless, "sensing.stress_concentration")?,
            },
            contact_resistance: si(&s.contact_resistance, Resistance, "sensing.contact_resistance")?,
            bridge_resistance: si(&s.bridge_resistance, Resistance, "sensing.bridge_resistance")?,
            crack_sensitivity: si(&s.crack_sensitivity, Dimensionless, "sensing.crack_sensitivity")?,
            bridge_sensitivity: si(&s.bridge_sensitivity, Dimensionless, "sensing.bridge_sensitivity")?,
            closing_ratio: si(&s.closing_ratio, Dimensionless, "sensing.closing_ratio")?,
        };
        let divider = DividerConfig {
            resistors: [
                si(&s.divider.resistors[0], Resistance, "sensing.divider.resistors[0]")?,
                si(&s.divider.resistors[1], Resistance, "sensing.divider.resistors[1]")?,
            ],
            supply: si(&s.divider.supply, Voltage, "sensing.divider.supply")?,
            placement: s.divider.placement,
        };
        let decorator = match &s.decorator {
            None => ResponseDecorator::default(),
            Some(d) => ResponseDecorator {
                drift_per_cycle: si(&d.drift_per_cycle, Dimensionless, "sensing.decorator.drift_per_cycle")?,
                noise: si(&d.noise, Dimensionless, "sensing.decorator.noise")?,
                insulating_noise_factor: si(
                    &d.insulating_noise_factor,
                    Dimensionless,
                    "sensing.decorator.insulating_noise_factor",
                )?,
                first_peak_excess: si(&d.first_peak_excess, Dimensionless, "sensing.decorator.first_peak_excess")?,
            },
        };

        let e = &raw.experiment;
        let breakin_sets = e
            .breakin_sets
            .iter()
            .enumerate()
            .map(|(i, b)| {
                Ok(BreakinSet {
                    offset: si(&b.offset, Force, &format!("experiment.breakin_sets[{i}].offset"))?,
                    amplitude: si(&b.amplitude, Force, &format!("experiment.breakin_sets[{i}].amplitude"))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let waveform = WaveformSpec {
            small_amplitude: si(&e.small_amplitude, Force, "experiment.small_amplitude")?,
            small_cycles: count(&e.small_cycles, "experiment.small_cycles")? as u32,
            breakin_cycles_per_set: count(&e.breakin_cycles_per_set, "experiment.breakin_cycles_per_set")? as u32,
            breakin_sets,
            hold_duration: si(&e.hold_duration, Time, "experiment.hold_duration")?,
            cycle_frequency: si(&e.cycle_frequency, Frequency, "experiment.cycle_frequency")?,
            force_floor: si(&e.force_floor, Force, "experiment.force_floor")?,
            force_ceiling: si(&e.force_ceiling, Force, "experiment.force_ceiling")?,
        };
        let analysis = match &raw.analysis {
            None => AnalysisSettings::default(),
            Some(a) => AnalysisSettings {
                amplitude_tolerance: si(&a.amplitude_tolerance, Dimensionless, "analysis.amplitude_tolerance")?,
            },
        };
        if !(analysis.amplitude_tolerance >= 0.0) {
            return Err(Error::Config("analysis.amplitude_tolerance must be >= 0".into()));
        }

        Ok(Config {
            name: raw.name,
            geometry,
            materials,
            gauge,
            divider,
            decorator,
            waveform,
            orientations: e.orientations.clone(),
            sample_rate: si(&e.sample_rate, Frequency, "experiment.sample_rate")?,
            seed: e.seed,
            analysis,
        })
    }

    pub fn scenario(&self) -> Scenario {
        Scenario {
            geometry: self.geometry,
            materials: self.materials,
            gauge: self.gauge,
            divider: self.divider,
            decorator: self.decorator,
        }
    }

    pub fn plan(&self, seed: u64) -> ExperimentPlan {
        ExperimentPlan {
            waveform: self.waveform.clone(),
            orientations: self.orientations.clone(),
            sample_rate: self.sample_rate,
            seed,
        }
    }

    /// Analysis settings matching this configuration's waveform and readout.
    pub fn analysis_options(&self) -> AnalysisOptions {
        AnalysisOptions {
            force_floor: self.waveform.force_floor,
            small_amplitude: self.waveform.small_amplitude,
            tolerance: self.analysis.amplitude_tolerance,
            strain_mode: StrainMode::Absolute,
            divider: self.divider,
        }
    }

    /// Checks every physical section.
    pub fn validate(&self) -> Result<()> {
        self.scenario().validate()?;
        self.plan(0).validate()
    }
}
