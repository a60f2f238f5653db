//! Forward simulation of a break-in experiment.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::record::{RecordMetadata, Row, SegmentSpan, TimeSeriesRecord, SCHEMA_VERSION};
use super::waveform::{sample_segments, schedule, Segment, SegmentKind, WaveformSpec};
use crate::error::{Error, Result};
use crate::mechanics::{Beam, LoadCase, Orientation};
use crate::model::{BeamGeometry, MaterialSet};
use crate::sensing::{divider_forward, DividerConfig, GaugeConfig, GaugeState, Matrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub waveform: WaveformSpec,
    pub orientations: Vec<Orientation>,
    pub sample_rate: f64,
    pub seed: u64,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        self.waveform.validate()?;
        if self.orientations.is_empty() {
            return Err(Error::InvalidPlan("at least one orientation is required".into()));
        }
        if !(self.sample_rate >= 20.0 * self.waveform.cycle_frequency) || !self.sample_rate.is_finite() {
            return Err(Error::InvalidPlan(format!(
                "sample rate {} Hz is below 20 samples per load cycle ({} Hz)",
                self.sample_rate,
                20.0 * self.waveform.cycle_frequency
            )));
        }
        Ok(())
    }

    /// Whole-run segments: the waveform once per orientation, separated by a
    /// hold at the force floor. The sample is turned over at the end of the
    /// hold, so the hold carries the previous orientation.
    pub fn timeline(&self) -> Result<Vec<(Segment, Orientation)>> {
        self.validate()?;
        let spec = &self.waveform;
        let mut out = Vec::new();
        let mut t = 0.0;
        for (i, &orientation) in self.orientations.iter().enumerate() {
            if i > 0 {
                let duration = spec.hold_duration.max(spec.period());
                out.push((
                    Segment {
                        kind: SegmentKind::Flip,
                        start: t,
                        duration,
                        from: spec.force_floor,
                        to: spec.force_floor,
                        cycles: 0,
                    },
                    self.orientations[i - 1],
                ));
                t += duration;
            }
            for s in schedule(spec, t)? {
                t = s.end();
                out.push((s, orientation));
            }
        }
        Ok(out)
    }

    pub fn small_set_count(&self) -> usize {
        self.orientations.len() * (self.waveform.breakin_sets.len() + 1)
    }
}

/// Optional artefacts layered on the ideal resistance, all off by default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponseDecorator {
    /// Relative baseline decay per load cycle, `R · exp(-d n)`.
    pub drift_per_cycle: f64,
    /// Standard deviation of additive noise relative to the unstrained resistance.
    pub noise: f64,
    /// Noise multiplier for gauges in an insulating matrix.
    pub insulating_noise_factor: f64,
    /// Extra relative response at the start of each small set, decaying by
    /// `e` per cycle.
    pub first_peak_excess: f64,
}

impl Default for ResponseDecorator {
    fn default() -> Self {
        ResponseDecorator {
            drift_per_cycle: 0.0,
            noise: 0.0,
            insulating_noise_factor: 3.0,
            first_peak_excess: 0.0,
        }
    }
}

impl ResponseDecorator {
    pub fn is_identity(&self) -> bool {
        self.drift_per_cycle == 0.0 && self.noise == 0.0 && self.first_peak_excess == 0.0
    }
}

/// Physical description of one sample and its readout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub geometry: BeamGeometry,
    pub materials: MaterialSet,
    pub gauge: GaugeConfig,
    pub divider: DividerConfig,
    #[serde(default)]
    pub decorator: ResponseDecorator,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.materials.validate()?;
        self.gauge.validate()?;
        self.divider.validate()?;
        let d = &self.decorator;
        if !(d.noise >= 0.0 && d.insulating_noise_factor >= 0.0 && d.drift_per_cycle.is_finite())
            || !d.first_peak_excess.is_finite()
        {
            return Err(Error::InvalidGauge("invalid response decorator".into()));
        }
        Ok(())
    }
}

/// Model state of one gauge at one sample, kept alongside the record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeTruth {
    /// Gauge factor in effect for the sign of the current strain.
    pub k: f64,
    pub r_unstrained: f64,
    pub broken_fraction: f64,
    pub open_circuit: bool,
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub record: TimeSeriesRecord,
    pub truth: Vec<[GaugeTruth; 2]>,
    pub final_states: [GaugeState; 2],
}

/// SHA-256 of the canonical JSON of plan and scenario.
pub fn plan_digest(plan: &ExperimentPlan, scenario: &Scenario) -> Result<String> {
    let canonical = serde_json::to_vec(&serde_json::json!({ "plan": plan, "scenario": scenario }))?;
    Ok(hex::encode(Sha256::digest(&canonical)))
}

fn is_turning_point(f: &[f64], i: usize) -> bool {
    if i == 0 || i + 1 == f.len() {
        return true;
    }
    let (a, b, c) = (f[i - 1], f[i], f[i + 1]);
    (b >= a && b > c) || (b <= a && b < c)
}

pub fn run_experiment(scenario: &Scenario, plan: &ExperimentPlan) -> Result<Simulation> {
    scenario.validate()?;
    let beam = Beam::new(scenario.geometry, scenario.materials)?;
    let timeline = plan.timeline()?;
    let segments: Vec<Segment> = timeline.iter().map(|(s, _)| *s).collect();
    let (time, force, owner) = sample_segments(&segments, plan.sample_rate);

    let mut damage_rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mut noise_rng = ChaCha8Rng::seed_from_u64(plan.seed);
    noise_rng.set_stream(1);

    let deco = scenario.decorator;
    let noise_scale = deco.noise
        * if scenario.gauge.matrix == Matrix::Insulating {
            deco.insulating_noise_factor
        } else {
            1.0
        };
    let mut states = [GaugeState::new(scenario.gauge), GaugeState::new(scenario.gauge)];
    let mut rows = Vec::with_capacity(time.len());
    let mut truth = Vec::with_capacity(time.len());

    for i in 0..time.len() {
        let (segment, orientation) = timeline[owner[i]];
        let bending = beam.bend(LoadCase::new(force[i], orientation));
        if is_turning_point(&force, i) {
            for (g, state) in states.iter_mut().enumerate() {
                state.apply_stress_peak(bending.gauge_stress[g] + beam.thermal.stress, &mut damage_rng);
            }
        }
        let cycles = time[i] * plan.waveform.cycle_frequency;
        let excess = if segment.is_small() && deco.first_peak_excess != 0.0 {
            let local = (time[i] - segment.start) * plan.waveform.cycle_frequency;
            deco.first_peak_excess * (-local).exp()
        } else {
            0.0
        };

        let mut row = Row {
            t: time[i],
            force: force[i],
            deflection: -bending.deflection,
            resistance: [f64::NAN; 2],
            voltage: [f64::NAN; 2],
        };
        let mut sample_truth = [GaugeTruth {
            k: 0.0,
            r_unstrained: 0.0,
            broken_fraction: 0.0,
            open_circuit: false,
        }; 2];
        for (g, state) in states.iter().enumerate() {
            let strain = bending.gauge_strain[g];
            sample_truth[g] = GaugeTruth {
                k: state.gauge_factor_for(strain),
                r_unstrained: state.r_unstrained,
                broken_fraction: state.broken_fraction(),
                open_circuit: state.open_circuit,
            };
            let Some(ideal) = state.resistance(strain)? else {
                continue;
            };
            let mut r = state.r_unstrained + (ideal - state.r_unstrained) * (1.0 + excess);
            if deco.drift_per_cycle != 0.0 {
                r *= (-deco.drift_per_cycle * cycles).exp();
            }
            if noise_scale > 0.0 {
                let z: f64 = noise_rng.sample(StandardNormal);
                r += z * noise_scale * state.r_unstrained;
            }
            if r <= 0.0 {
                return Err(Error::NegativeResistance(r / state.r_unstrained));
            }
            row.resistance[g] = r;
            row.voltage[g] = divider_forward(
                r,
                scenario.divider.resistors[g],
                scenario.divider.supply,
                scenario.divider.placement,
            );
        }
        rows.push(row.quantized());
        truth.push(sample_truth);
    }

    let spans = segment_spans(&timeline, &owner, &time);
    let metadata = RecordMetadata {
        schema_version: SCHEMA_VERSION,
        seed: plan.seed,
        plan_digest: plan_digest(plan, scenario)?,
        force_floor: plan.waveform.force_floor,
        small_amplitude: plan.waveform.small_amplitude,
        divider: scenario.divider,
        segments: spans,
        plan: serde_json::to_value(plan)?,
        scenario: serde_json::to_value(scenario)?,
    };
    Ok(Simulation {
        record: TimeSeriesRecord {
            rows,
            metadata: Some(metadata),
        },
        truth,
        final_states: states,
    })
}

fn segment_spans(timeline: &[(Segment, Orientation)], owner: &[usize], time: &[f64]) -> Vec<SegmentSpan> {
    let mut spans: Vec<SegmentSpan> = Vec::new();
    for (row, &s) in owner.iter().enumerate() {
        match spans.last_mut() {
            Some(last) if row > 0 && owner[row - 1] == s => {
                last.end_row = row + 1;
                last.end_time = time[row];
            }
            _ => {
                let (segment, orientation) = timeline[s];
                spans.push(SegmentSpan {
                    kind: segment.kind,
                    orientation,
                    start_row: row,
                    end_row: row + 1,
                    start_time: time[row],
                    end_time: time[row],
                });
            }
        }
    }
    spans
}
