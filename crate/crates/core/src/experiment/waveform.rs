//! Force waveform for break-in experiments.
//!
//! One pass of the waveform is
//! `[small, hold, ramp up, break-in 1, ramp down, hold, small, hold, ..., small]`:
//! every break-in set is bracketed by gauge-factor measurement sets at the
//! force floor. Sine sets start and end at their lowest force; ramps are
//! half-cosines lasting one load period.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreakinSet {
    /// Lowest force of the set (N).
    pub offset: f64,
    /// Peak-to-peak force swing (N); the set peaks at `offset + amplitude`.
    pub amplitude: f64,
}

impl BreakinSet {
    pub fn peak(&self) -> f64 {
        self.offset + self.amplitude
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveformSpec {
    /// Peak-to-peak swing of the measurement sets (N).
    pub small_amplitude: f64,
    pub small_cycles: u32,
    pub breakin_cycles_per_set: u32,
    pub breakin_sets: Vec<BreakinSet>,
    /// Constant-force wait after every set (s).
    pub hold_duration: f64,
    pub cycle_frequency: f64,
    pub force_floor: f64,
    pub force_ceiling: f64,
}

impl WaveformSpec {
    /// Offsets rising linearly from `first_offset` to `ceiling - amplitude`.
    pub fn linear_ramp(count: usize, first_offset: f64, amplitude: f64, ceiling: f64) -> Vec<BreakinSet> {
        let last = ceiling - amplitude;
        (0..count)
            .map(|i| {
                let offset = if count == 1 {
                    last
                } else {
                    first_offset + (last - first_offset) * i as f64 / (count - 1) as f64
                };
                BreakinSet { offset, amplitude }
            })
            .collect()
    }

    pub fn with_ceiling(ceiling: f64) -> Self {
        WaveformSpec {
            small_amplitude: 10.0,
            small_cycles: 20,
            breakin_cycles_per_set: 20,
            breakin_sets: Self::linear_ramp(6, 30.0, 10.0, ceiling),
            hold_duration: 60.0,
            cycle_frequency: 0.5,
            force_floor: 20.0,
            force_ceiling: ceiling,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidWaveform(m));
        if !(self.force_floor >= 0.0 && self.force_ceiling > self.force_floor) {
            return bad(format!(
                "force range [{}, {}] N is empty",
                self.force_floor, self.force_ceiling
            ));
        }
        if !(self.cycle_frequency > 0.0 && self.cycle_frequency.is_finite()) {
            return bad("cycle frequency must be > 0".into());
        }
        if !(self.hold_duration >= 0.0) {
            return bad("hold duration must be >= 0".into());
        }
        if self.small_cycles == 0 {
            return bad("small sets need at least one cycle".into());
        }
        if !(self.small_amplitude > 0.0) || self.force_floor + self.small_amplitude > self.force_ceiling {
            return bad(format!(
                "small sets reach {} N, outside [{}, {}] N",
                self.force_floor + self.small_amplitude,
                self.force_floor,
                self.force_ceiling
            ));
        }
        if !self.breakin_sets.is_empty() && self.breakin_cycles_per_set == 0 {
            return bad("break-in sets need at least one cycle".into());
        }
        for (i, s) in self.breakin_sets.iter().enumerate() {
            if !(s.amplitude >= 0.0) || s.offset < self.force_floor {
                return bad(format!("break-in set {i} starts below the force floor"));
            }
            if s.peak() > self.force_ceiling {
                return bad(format!(
                    "break-in set {i} peaks at {} N above the ceiling {} N",
                    s.peak(),
                    self.force_ceiling
                ));
            }
        }
        for (i, w) in self.breakin_sets.windows(2).enumerate() {
            if w[1].offset < w[0].offset || w[1].amplitude < w[0].amplitude {
                return bad(format!("break-in set {} is lighter than set {i}", i + 1));
            }
        }
        Ok(())
    }

    pub fn period(&self) -> f64 {
        1.0 / self.cycle_frequency
    }

    pub fn max_force(&self) -> f64 {
        self.breakin_sets
            .iter()
            .map(BreakinSet::peak)
            .fold(self.force_floor + self.small_amplitude, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SegmentKind {
    Small { index: usize },
    Hold,
    RampUp,
    BreakIn { index: usize },
    RampDown,
    /// Wait at the floor while the sample is turned over.
    Flip,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub kind: SegmentKind,
    pub start: f64,
    pub duration: f64,
    /// Force at the start of the segment (N).
    pub from: f64,
    /// Highest force for sine sets, end force for ramps.
    pub to: f64,
    pub cycles: u32,
}

impl Segment {
    pub fn end(&self) -> f64 {
        self.start + self.duration
    }

    pub fn force_at(&self, t: f64) -> f64 {
        let tau = (t - self.start).clamp(0.0, self.duration);
        use std::f64::consts::PI;
        match self.kind {
            SegmentKind::Small { .. } | SegmentKind::BreakIn { .. } => {
                let phase = 2.0 * PI * self.cycles as f64 * tau / self.duration;
                self.from + (self.to - self.from) * 0.5 * (1.0 - phase.cos())
            }
            SegmentKind::RampUp | SegmentKind::RampDown => {
                self.from + (self.to - self.from) * 0.5 * (1.0 - (PI * tau / self.duration).cos())
            }
            SegmentKind::Hold | SegmentKind::Flip => self.from,
        }
    }

    pub fn is_small(&self) -> bool {
        matches!(self.kind, SegmentKind::Small { .. })
    }
}

/// Segments of one pass of the waveform starting at `t0`.
pub fn schedule(spec: &WaveformSpec, t0: f64) -> Result<Vec<Segment>> {
    spec.validate()?;
    let period = spec.period();
    let floor = spec.force_floor;
    let mut out = Vec::new();
    let mut t = t0;
    let mut push = |kind, duration: f64, from, to, cycles, t: &mut f64| {
        if duration > 0.0 {
            out.push(Segment {
                kind,
                start: *t,
                duration,
                from,
                to,
                cycles,
            });
            *t += duration;
        }
    };
    let small = |index| SegmentKind::Small { index };
    let small_top = floor + spec.small_amplitude;
    let small_len = spec.small_cycles as f64 * period;

    for (i, set) in spec.breakin_sets.iter().enumerate() {
        push(small(i), small_len, floor, small_top, spec.small_cycles, &mut t);
        push(SegmentKind::Hold, spec.hold_duration, floor, floor, 0, &mut t);
        if set.offset > floor {
            push(SegmentKind::RampUp, period, floor, set.offset, 0, &mut t);
        }
        push(
            SegmentKind::BreakIn { index: i },
            spec.breakin_cycles_per_set as f64 * period,
            set.offset,
            set.peak(),
            spec.breakin_cycles_per_set,
            &mut t,
        );
        if set.offset > floor {
            push(SegmentKind::RampDown, period, set.offset, floor, 0, &mut t);
        }
        push(SegmentKind::Hold, spec.hold_duration, floor, floor, 0, &mut t);
    }
    push(
        small(spec.breakin_sets.len()),
        small_len,
        floor,
        small_top,
        spec.small_cycles,
        &mut t,
    );
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledWaveform {
    pub time: Vec<f64>,
    pub force: Vec<f64>,
    pub segments: Vec<Segment>,
}

/// Samples segments at `sample_rate` from their first start to their last end
/// (inclusive). Each sample belongs to the segment whose half-open interval
/// contains it; the final sample belongs to the last segment.
pub fn sample_segments(segments: &[Segment], sample_rate: f64) -> (Vec<f64>, Vec<f64>, Vec<usize>) {
    let (Some(first), Some(last)) = (segments.first(), segments.last()) else {
        return (Vec::new(), Vec::new(), Vec::new());
    };
    let t0 = first.start;
    let n = ((last.end() - t0) * sample_rate).round() as usize + 1;
    let mut time = Vec::with_capacity(n);
    let mut force = Vec::with_capacity(n);
    let mut owner = Vec::with_capacity(n);
    let mut s = 0;
    for i in 0..n {
        let t = t0 + i as f64 / sample_rate;
        while s + 1 < segments.len() && t >= segments[s].end() - 1e-9 / sample_rate {
            s += 1;
        }
        time.push(t);
        force.push(segments[s].force_at(t));
        owner.push(s);
    }
    (time, force, owner)
}

pub fn build_waveform(spec: &WaveformSpec, sample_rate: f64) -> Result<SampledWaveform> {
    if !(sample_rate > 0.0 && sample_rate.is_finite()) {
        return Err(Error::InvalidWaveform("sample rate must be > 0".into()));
    }
    let segments = schedule(spec, 0.0)?;
    let (time, force, _) = sample_segments(&segments, sample_rate);
    Ok(SampledWaveform { time, force, segments })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn local_maxima(x: &[f64]) -> usize {
        x.windows(3).filter(|w| w[1] > w[0] && w[1] >= w[2]).count()
    }

    #[test]
    fn small_set_has_twenty_cycles_in_forty_seconds() {
        let spec = WaveformSpec::with_ceiling(70.0);
        let w = build_waveform(&spec, 100.0).unwrap();
        let first = w.segments[0];
        assert!(first.is_small());
        assert_eq!(first.duration, 40.0);
        let idx: Vec<usize> = w
            .time
            .iter()
            .enumerate()
            .filter(|(_, &t)| t >= first.start && t < first.end())
            .map(|(i, _)| i)
            .collect();
        assert_eq!(idx.len(), 4000);
        let f: Vec<f64> = idx.iter().map(|&i| w.force[i]).collect();
        assert_eq!(local_maxima(&f), 20);
        let max = f.iter().cloned().fold(f64::MIN, f64::max);
        let min = f.iter().cloned().fold(f64::MAX, f64::min);
        assert!((max - 30.0).abs() < 1e-9 && (min - 20.0).abs() < 1e-9);
    }

    #[test]
    fn no_breakin_sets_gives_a_single_small_set() {
        let spec = WaveformSpec {
            breakin_sets: vec![],
            ..WaveformSpec::with_ceiling(70.0)
        };
        let w = build_waveform(&spec, 20.0).unwrap();
        assert!(w.segments.iter().all(|s| s.is_small() || s.kind == SegmentKind::Hold));
        let max = w.force.iter().cloned().fold(f64::MIN, f64::max);
        assert!((max - 30.0).abs() < 1e-9);
    }

    #[test]
    fn breakin_peak_appears_in_series() {
        let spec = WaveformSpec {
            breakin_sets: vec![BreakinSet { offset: 38.0, amplitude: 10.0 }],
            ..WaveformSpec::with_ceiling(70.0)
        };
        let w = build_waveform(&spec, 20.0).unwrap();
        let max = w.force.iter().cloned().fold(f64::MIN, f64::max);
        assert!((max - 48.0).abs() < 1e-9, "{max}");
    }

    #[test]
    fn default_ramp_ends_at_ceiling() {
        let sets = WaveformSpec::linear_ramp(6, 30.0, 10.0, 62.0);
        assert_eq!(sets[0].offset, 30.0);
        assert!((sets[5].peak() - 62.0).abs() < 1e-12);
        assert!(sets.windows(2).all(|w| w[1].offset > w[0].offset));
    }

    #[test]
    fn rejects_peak_above_ceiling() {
        let spec = WaveformSpec {
            breakin_sets: vec![BreakinSet { offset: 65.0, amplitude: 10.0 }],
            ..WaveformSpec::with_ceiling(70.0)
        };
        assert!(matches!(build_waveform(&spec, 20.0), Err(Error::InvalidWaveform(_))));
    }

    #[test]
    fn rejects_decreasing_schedule() {
        let spec = WaveformSpec {
            breakin_sets: vec![
                BreakinSet { offset: 40.0, amplitude: 10.0 },
                BreakinSet { offset: 35.0, amplitude: 10.0 },
            ],
            ..WaveformSpec::with_ceiling(70.0)
        };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn waveform_is_continuous_and_bounded() {
        let spec = WaveformSpec::with_ceiling(62.0);
        let w = build_waveform(&spec, 20.0).unwrap();
        assert!(w.force.iter().all(|&f| (20.0 - 1e-9..=62.0 + 1e-9).contains(&f)));
        // largest step between samples is bounded by the steepest sine slope
        let max_step = w.force.windows(2).map(|p| (p[1] - p[0]).abs()).fold(0.0, f64::max);
        assert!(max_step < 10.0 * std::f64::consts::PI * 0.5 / 20.0 + 1e-9 || max_step < 2.0);
        assert!(w.time.windows(2).all(|p| p[1] > p[0]));
    }
}
