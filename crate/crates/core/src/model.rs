//! Beam geometry, material data and transformed-section properties.
//!
//! The printed beam is a rectangle with a rectangular hollow core and two
//! identical composite (fiber) lines mirrored about the neutral axis. The
//! stiffer composite is folded into an equivalent PETG section by scaling its
//! area with the modular ratio `n = E_comp / E_PETG`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cross-section and span dimensions of one sample, all in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamGeometry {
    pub beam_height: f64,
    pub beam_width: f64,
    pub hollow_height: f64,
    pub hollow_width: f64,
    pub composite_height: f64,
    pub composite_width: f64,
    /// Distance from the neutral axis to the centroid of a composite line.
    pub neutral_axis_offset: f64,
    /// Support-to-support distance in three-point bending.
    pub span: f64,
}

impl BeamGeometry {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("beam_height", self.beam_height),
            ("beam_width", self.beam_width),
            ("hollow_height", self.hollow_height),
            ("hollow_width", self.hollow_width),
            ("composite_height", self.composite_height),
            ("composite_width", self.composite_width),
            ("neutral_axis_offset", self.neutral_axis_offset),
            ("span", self.span),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidGeometry(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.hollow_height >= self.beam_height {
            return Err(Error::InvalidGeometry(
                "hollow core is not shorter than the beam".into(),
            ));
        }
        if self.hollow_width >= self.beam_width {
            return Err(Error::InvalidGeometry(
                "hollow core is not narrower than the beam".into(),
            ));
        }
        let outer = self.neutral_axis_offset + 0.5 * self.composite_height;
        if outer > 0.5 * self.beam_height {
            return Err(Error::InvalidGeometry(format!(
                "composite line reaches {outer:e} m from the neutral axis, outside half-height {:e} m",
                0.5 * self.beam_height
            )));
        }
        Ok(())
    }
}

/// Stiffness, expansion, resistivity and strength data (SI; temperatures in K).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialSet {
    pub petg_modulus: f64,
    pub composite_modulus: f64,
    pub fiber_modulus: f64,
    /// Carried for completeness; no model uses it.
    pub pla_modulus: f64,
    pub petg_expansion: f64,
    pub fiber_expansion: f64,
    pub ambient_temperature: f64,
    pub composite_temperature: f64,
    pub petg_temperature: f64,
    pub fiber_resistivity: f64,
    pub matrix_resistivity: f64,
    pub composite_tensile_strength: f64,
    pub composite_compressive_strength: f64,
}

impl MaterialSet {
    pub fn validate(&self) -> Result<()> {
        if !(self.petg_modulus > 0.0) {
            return Err(Error::InvalidMaterials("E_PETG must be > 0".into()));
        }
        if !(self.composite_modulus > self.petg_modulus) {
            return Err(Error::InvalidMaterials(
                "composite modulus must exceed the PETG modulus".into(),
            ));
        }
        if !(self.fiber_resistivity > 0.0 && self.matrix_resistivity > 0.0) {
            return Err(Error::InvalidMaterials("resistivities must be > 0".into()));
        }
        if !(self.composite_compressive_strength > 0.0
            && self.composite_compressive_strength < self.composite_tensile_strength)
        {
            return Err(Error::InvalidMaterials(
                "compressive strength must be positive and below the tensile strength".into(),
            ));
        }
        Ok(())
    }

    pub fn modular_ratio(&self) -> f64 {
        self.composite_modulus / self.petg_modulus
    }
}

/// How the PETG area entering the thermal model is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PetgArea {
    /// Gross rectangle minus the hollow core minus both composite lines.
    #[default]
    Net,
    /// Gross rectangle minus the hollow core only.
    IncludeComposite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionProperties {
    pub transformation_factor: f64,
    /// Area of one composite line.
    pub composite_area: f64,
    pub petg_area: f64,
    pub second_moment: f64,
}

/// Second moment of area of the transformed section for an arbitrary modular
/// ratio. No validation: degenerate shapes are allowed here.
pub fn transformed_second_moment(g: &BeamGeometry, n: f64) -> f64 {
    let shell = (g.beam_width * g.beam_height.powi(3) - g.hollow_width * g.hollow_height.powi(3)) / 12.0;
    let own = g.composite_width * g.composite_height.powi(3) / 12.0;
    let area = g.composite_width * g.composite_height;
    shell + 2.0 * n * (own + area * g.neutral_axis_offset * g.neutral_axis_offset)
}

pub fn petg_area(g: &BeamGeometry, mode: PetgArea) -> f64 {
    let open = g.beam_width * g.beam_height - g.hollow_width * g.hollow_height;
    match mode {
        PetgArea::Net => open - 2.0 * g.composite_width * g.composite_height,
        PetgArea::IncludeComposite => open,
    }
}

pub fn section_properties(g: &BeamGeometry, m: &MaterialSet) -> Result<SectionProperties> {
    section_properties_with(g, m, PetgArea::Net)
}

pub fn section_properties_with(
    g: &BeamGeometry,
    m: &MaterialSet,
    mode: PetgArea,
) -> Result<SectionProperties> {
    g.validate()?;
    m.validate()?;
    let n = m.modular_ratio();
    let petg = petg_area(g, mode);
    if petg <= 0.0 {
        return Err(Error::InvalidGeometry(format!("PETG area {petg:e} m^2 is not positive")));
    }
    Ok(SectionProperties {
        transformation_factor: n,
        composite_area: g.composite_width * g.composite_height,
        petg_area: petg,
        second_moment: transformed_second_moment(g, n),
    })
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const MM4: f64 = 1e-12;

    #[test]
    fn short_sample_section() {
        // Hand evaluation with mm units: n = 56.6/1.8, J = 287.0361474 mm^4.
        let s = section_properties(&geometry(6.0), &materials()).unwrap();
        assert_relative_eq!(s.transformation_factor, 31.444_444_444_444_443, max_relative = 1e-12);
        assert_relative_eq!(s.composite_area, 0.468e-6, max_relative = 1e-12);
        assert_relative_eq!(s.second_moment, 287.036_147_4 * MM4, max_relative = 1e-9);
    }

    #[test]
    fn tall_sample_section() {
        let s = section_properties(&geometry(10.0), &materials()).unwrap();
        assert_relative_eq!(s.second_moment, 1093.031_947_4 * MM4, max_relative = 1e-9);
    }

    #[test]
    fn second_moment_grows_with_height() {
        let m = materials();
        let j: Vec<f64> = [6.0, 8.0, 10.0]
            .iter()
            .map(|&h| section_properties(&geometry(h), &m).unwrap().second_moment)
            .collect();
        assert!(j[0] < j[1] && j[1] < j[2]);
    }

    #[test]
    fn homogeneous_solid_rectangle() {
        let g = BeamGeometry {
            hollow_height: 0.0,
            hollow_width: 0.0,
            composite_height: 0.0,
            composite_width: 0.6e-3,
            ..geometry(6.0)
        };
        let j = transformed_second_moment(&g, 1.0);
        assert_eq!(j, g.beam_width * g.beam_height.powi(3) / 12.0);
    }

    #[test]
    fn petg_area_modes() {
        let g = geometry(6.0);
        let net = petg_area(&g, PetgArea::Net);
        let gross = petg_area(&g, PetgArea::IncludeComposite);
        assert_relative_eq!(gross - net, 2.0 * 0.468e-6, max_relative = 1e-12);
        assert_relative_eq!(net, (54.0 - 17.01 - 0.936) * 1e-6, max_relative = 1e-12);
    }

    #[test]
    fn rejects_composite_outside_section() {
        let g = BeamGeometry {
            neutral_axis_offset: 2.9e-3,
            ..geometry(6.0)
        };
        assert!(matches!(
            section_properties(&g, &materials()),
            Err(Error::InvalidGeometry(_))
        ));
    }

    #[test]
    fn rejects_oversized_hollow() {
        let g = BeamGeometry {
            hollow_width: 9e-3,
            ..geometry(6.0)
        };
        assert!(g.validate().is_err());
    }

    #[test]
    fn rejects_soft_composite() {
        let m = MaterialSet {
            composite_modulus: 1.0e9,
            ..materials()
        };
        assert!(matches!(m.validate(), Err(Error::InvalidMaterials(_))));
    }

    fn arb_geometry() -> impl Strategy<Value = BeamGeometry> {
        (4.0..20.0f64, 5.0..15.0f64, 0.1..0.8f64, 0.1..0.9f64, 0.3..1.0f64, 0.2..1.0f64, 80.0..150.0f64)
            .prop_map(|(h, b, hh_frac, bh_frac, hc, bc, l)| {
                let hollow_h = h * hh_frac * 0.5;
                let d_na = (hollow_h / 2.0 + h / 2.0 - hc / 2.0) / 2.0 + hc / 4.0;
                BeamGeometry {
                    beam_height: h,
                    beam_width: b,
                    hollow_height: hollow_h,
                    hollow_width: b * bh_frac,
                    composite_height: hc.min(h / 4.0),
                    composite_width: bc,
                    neutral_axis_offset: d_na.min(h / 2.0 - hc.min(h / 4.0) / 2.0),
                    span: l,
                }
            })
    }

    proptest! {
        #[test]
        fn n_one_without_inserts_is_rectangle(g in arb_geometry()) {
            let plain = BeamGeometry { hollow_height: 0.0, composite_height: 0.0, neutral_axis_offset: 0.0, ..g };
            let j = transformed_second_moment(&plain, 1.0);
            let rect = g.beam_width * g.beam_height.powi(3) / 12.0;
            prop_assert!((j - rect).abs() <= 4.0 * f64::EPSILON * rect);
        }

        #[test]
        fn millimetre_and_metre_evaluations_agree(g_mm in arb_geometry()) {
            let s = 1e-3;
            let g_m = BeamGeometry {
                beam_height: g_mm.beam_height * s,
                beam_width: g_mm.beam_width * s,
                hollow_height: g_mm.hollow_height * s,
                hollow_width: g_mm.hollow_width * s,
                composite_height: g_mm.composite_height * s,
                composite_width: g_mm.composite_width * s,
                neutral_axis_offset: g_mm.neutral_axis_offset * s,
                span: g_mm.span * s,
            };
            let n = materials().modular_ratio();
            let j_mm = transformed_second_moment(&g_mm, n) * 1e-12;
            let j_m = transformed_second_moment(&g_m, n);
            prop_assert!(((j_mm - j_m) / j_m).abs() < 1e-9);
        }

        #[test]
        fn second_moment_increases_with_height(g in arb_geometry(), dh in 0.01..5.0f64) {
            let taller = BeamGeometry { beam_height: g.beam_height + dh, ..g };
            let n = materials().modular_ratio();
            prop_assert!(transformed_second_moment(&taller, n) > transformed_second_moment(&g, n));
        }
    }
}
