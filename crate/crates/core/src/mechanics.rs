//! Three-point bending and residual thermal stress.
//!
//! Sign convention: compression is negative everywhere and the midspan load
//! `P` is positive downward. The loaded (top) face is in compression. The
//! moment and deflection keep the closed-form signs (`M = -PL/4`,
//! `y = -PL^3/(48 E J)`); strain and stress magnitudes are signed per face.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{petg_area, section_properties_with, BeamGeometry, MaterialSet, PetgArea, SectionProperties};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Initial,
    Flipped,
}

/// One of the two strain gauges of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gauge {
    One,
    Two,
}

impl Gauge {
    pub const BOTH: [Gauge; 2] = [Gauge::One, Gauge::Two];

    pub fn index(self) -> usize {
        match self {
            Gauge::One => 0,
            Gauge::Two => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Face {
    /// Loaded face, compressed under a downward midspan load.
    Top,
    Bottom,
}

impl Face {
    pub fn sign(self) -> f64 {
        match self {
            Face::Top => -1.0,
            Face::Bottom => 1.0,
        }
    }
}

impl Orientation {
    /// In the initial orientation gauge one sits on the compressed face.
    pub fn face_of(self, gauge: Gauge) -> Face {
        match (self, gauge) {
            (Orientation::Initial, Gauge::One) | (Orientation::Flipped, Gauge::Two) => Face::Top,
            _ => Face::Bottom,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoadCase {
    pub force: f64,
    pub orientation: Orientation,
}

impl LoadCase {
    pub fn new(force: f64, orientation: Orientation) -> Self {
        LoadCase { force, orientation }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BendingState {
    /// Midspan moment, `-P L / 4` (N·m).
    pub moment: f64,
    /// Midspan deflection, `-P L^3 / (48 E_PETG J)` (m, negative downward).
    pub deflection: f64,
    /// Strain magnitude at the composite-line centroid.
    pub max_strain: f64,
    /// Average strain magnitude along the gauge, half the peak value.
    pub average_strain: f64,
    /// Fiber stress magnitude at the outer edge of a composite line (Pa).
    pub max_fiber_stress: f64,
    /// Signed average strain seen by each gauge.
    pub gauge_strain: [f64; 2],
    /// Signed loading stress at each gauge's outer fiber (Pa).
    pub gauge_stress: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalState {
    /// Residual stress on the composite lines (Pa, negative = compression).
    pub stress: f64,
    pub delta_t_composite: f64,
    pub delta_t_petg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureBand {
    Elastic,
    CompressiveYield,
    /// Beyond the composite tensile strength. Not expected in practice.
    TensileYield,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberStress {
    pub loading: f64,
    pub thermal: f64,
    pub total: f64,
    pub band: FailureBand,
}

/// Precomputed section and thermal state of a sample; cheap to bend repeatedly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Beam {
    pub geometry: BeamGeometry,
    pub materials: MaterialSet,
    pub section: SectionProperties,
    pub thermal: ThermalState,
}

impl Beam {
    pub fn new(geometry: BeamGeometry, materials: MaterialSet) -> Result<Self> {
        let section = section_properties_with(&geometry, &materials, PetgArea::Net)?;
        let thermal = residual_thermal_stress(&geometry, &materials)?;
        Ok(Beam {
            geometry,
            materials,
            section,
            thermal,
        })
    }

    pub fn bend(&self, load: LoadCase) -> BendingState {
        bend_section(&self.geometry, &self.materials, &self.section, load)
    }

    /// Total stress (loading + residual) at a gauge for a given load.
    pub fn gauge_total_stress(&self, load: LoadCase, gauge: Gauge) -> f64 {
        self.bend(load).gauge_stress[gauge.index()] + self.thermal.stress
    }

    /// Peak strain magnitude at the composite centroid for a force.
    pub fn strain_at_force(&self, force: f64) -> f64 {
        self.bend(LoadCase::new(force, Orientation::Initial)).max_strain
    }
}

pub fn bend(g: &BeamGeometry, m: &MaterialSet, load: LoadCase) -> Result<BendingState> {
    let section = section_properties_with(g, m, PetgArea::Net)?;
    Ok(bend_section(g, m, &section, load))
}

fn bend_section(g: &BeamGeometry, m: &MaterialSet, s: &SectionProperties, load: LoadCase) -> BendingState {
    let p = load.force;
    let l = g.span;
    let ej = m.petg_modulus * s.second_moment;
    let moment = -p * l / 4.0;
    let deflection = -p * l.powi(3) / (48.0 * ej);
    let max_strain = -g.neutral_axis_offset * moment / ej;
    let average_strain = 0.5 * max_strain;
    let max_fiber_stress =
        -moment * (g.neutral_axis_offset + 0.5 * g.composite_height) / s.second_moment * s.transformation_factor;
    let mut gauge_strain = [0.0; 2];
    let mut gauge_stress = [0.0; 2];
    for gauge in Gauge::BOTH {
        let sign = load.orientation.face_of(gauge).sign();
        gauge_strain[gauge.index()] = sign * average_strain;
        gauge_stress[gauge.index()] = sign * max_fiber_stress;
    }
    BendingState {
        moment,
        deflection,
        max_strain,
        average_strain,
        max_fiber_stress,
        gauge_strain,
        gauge_stress,
    }
}

/// Peak strain at the composite centroid recovered from a midspan deflection
/// magnitude: `12 d y / L^2`.
pub fn max_strain_from_deflection(deflection: f64, g: &BeamGeometry) -> f64 {
    12.0 * g.neutral_axis_offset * deflection / (g.span * g.span)
}

pub fn residual_thermal_stress(g: &BeamGeometry, m: &MaterialSet) -> Result<ThermalState> {
    residual_thermal_stress_with(g, m, PetgArea::Net)
}

/// Two bonded bars (PETG and both composite lines) cooling from their
/// deposition temperatures to ambient.
pub fn residual_thermal_stress_with(g: &BeamGeometry, m: &MaterialSet, mode: PetgArea) -> Result<ThermalState> {
    g.validate()?;
    m.validate()?;
    let dt_comp = m.ambient_temperature - m.composite_temperature;
    let dt_petg = m.ambient_temperature - m.petg_temperature;
    let a_petg = petg_area(g, mode);
    let a_comp2 = 2.0 * g.composite_width * g.composite_height;
    let (ep, ec) = (m.petg_modulus, m.composite_modulus);
    let (ap, af) = (m.petg_expansion, m.fiber_expansion);

    let denominator = ep * a_petg * (1.0 + af * dt_comp) + ec * a_comp2 * (1.0 + ap * dt_petg);
    if !(denominator > 0.0) {
        return Err(Error::ThermalDenominator(denominator));
    }
    let stress = ep * ec * a_petg * (ap * dt_petg - af * dt_comp) / denominator;
    Ok(ThermalState {
        stress,
        delta_t_composite: dt_comp,
        delta_t_petg: dt_petg,
    })
}

pub fn total_fiber_stress(bending: &BendingState, thermal: &ThermalState, gauge: Gauge, m: &MaterialSet) -> FiberStress {
    let loading = bending.gauge_stress[gauge.index()];
    let total = loading + thermal.stress;
    FiberStress {
        loading,
        thermal: thermal.stress,
        total,
        band: classify(total, m),
    }
}

pub fn classify(stress: f64, m: &MaterialSet) -> FailureBand {
    if stress <= -m.composite_compressive_strength {
        FailureBand::CompressiveYield
    } else if stress >= m.composite_tensile_strength {
        FailureBand::TensileYield
    } else {
        FailureBand::Elastic
    }
}

/// One row of the stress summary at a sample's maximum force, in MPa.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StressRow {
    pub height_mm: f64,
    pub force_n: f64,
    pub sigma_load_mpa: f64,
    pub sigma_therm_mpa: f64,
    pub sigma_total_mpa: f64,
    pub band: FailureBand,
}

/// Compression-side stresses of a sample at `force`.
pub fn stress_row(beam: &Beam, force: f64) -> StressRow {
    let load = LoadCase::new(force, Orientation::Initial);
    let fs = total_fiber_stress(&beam.bend(load), &beam.thermal, Gauge::One, &beam.materials);
    StressRow {
        height_mm: beam.geometry.beam_height * 1e3,
        force_n: force,
        sigma_load_mpa: fs.loading * 1e-6,
        sigma_therm_mpa: fs.thermal * 1e-6,
        sigma_total_mpa: fs.total * 1e-6,
        band: fs.band,
    }
}

/// CSV with columns `height_mm,sigma_load_MPa,sigma_therm_MPa,sigma_total_MPa`.
pub fn write_stress_table<W: std::io::Write>(rows: &[StressRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(["height_mm", "sigma_load_MPa", "sigma_therm_MPa", "sigma_total_MPa"])
        .map_err(io)?;
    for r in rows {
        w.write_record([
            format!("{}", r.height_mm),
            format!("{:.3}", r.sigma_load_mpa),
            format!("{:.3}", r.sigma_therm_mpa),
            format!("{:.3}", r.sigma_total_mpa),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}
