//! Detection of small-amplitude measurement windows in a force channel.
//!
//! Turning points are found with a hysteresis gate of a quarter of the small
//! amplitude, so sensor noise on the force does not create spurious cycles.
//! A cycle (trough, peak, trough) is "small" when both swings are within the
//! amplitude tolerance and it stays inside `[floor - tol·A, floor + (1+tol)·A]`.
//! Consecutive small cycles in one orientation form a window, split at
//! constant-force holds; windows with fewer than two cycles are dropped.

use serde::{Deserialize, Serialize};

use crate::mechanics::Orientation;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    /// First sample at the extreme value.
    pub first: usize,
    /// Last sample of the plateau at the extreme value.
    pub last: usize,
    pub value: f64,
    pub is_max: bool,
}

/// Alternating turning points of `x` with hysteresis `gate`.
pub fn turning_points(x: &[f64], gate: f64) -> Vec<Extremum> {
    let n = x.len();
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let plateau = 1e-6 * gate.abs().max(f64::MIN_POSITIVE);
    let mut lo = Extremum { first: 0, last: 0, value: x[0], is_max: false };
    let mut hi = Extremum { first: 0, last: 0, value: x[0], is_max: true };
    // 0: undecided, 1: rising (tracking a max), -1: falling (tracking a min)
    let mut dir = 0i8;
    for (i, &v) in x.iter().enumerate().skip(1) {
        if dir <= 0 {
            if v < lo.value - plateau {
                lo = Extremum { first: i, last: i, value: v, is_max: false };
            } else if (v - lo.value).abs() <= plateau {
                lo.last = i;
            }
        }
        if dir >= 0 {
            if v > hi.value + plateau {
                hi = Extremum { first: i, last: i, value: v, is_max: true };
            } else if (v - hi.value).abs() <= plateau {
                hi.last = i;
            }
        }
        if dir <= 0 && v - lo.value >= gate {
            if dir == 0 && hi.first < lo.first {
                out.push(hi);
            }
            out.push(lo);
            dir = 1;
            hi = Extremum { first: i, last: i, value: v, is_max: true };
        } else if dir >= 0 && hi.value - v >= gate {
            if dir == 0 && lo.first < hi.first {
                out.push(lo);
            }
            out.push(hi);
            dir = -1;
            lo = Extremum { first: i, last: i, value: v, is_max: false };
        }
    }
    match dir {
        1 => out.push(hi),
        -1 => out.push(lo),
        _ => {}
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub id: usize,
    /// First row (inclusive), where the force leaves the first trough.
    pub start: usize,
    /// Last row (exclusive), just after the force reaches the last trough.
    pub end: usize,
    pub orientation: Option<Orientation>,
    /// Trough rows delimiting the cycles (`cycles + 1` entries).
    pub troughs: Vec<usize>,
    /// Peak rows, one per cycle.
    pub peaks: Vec<usize>,
}

impl Window {
    pub fn cycles(&self) -> usize {
        self.peaks.len()
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.end
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentParams {
    pub floor: f64,
    pub amplitude: f64,
    pub tolerance: f64,
}

pub fn segment_small_sets(force: &[f64], orientations: Option<&[Orientation]>, p: SegmentParams) -> Vec<Window> {
    let a = p.amplitude;
    let ext = turning_points(force, 0.25 * a);
    let swing_ok = |d: f64| d >= a * (1.0 - p.tolerance) && d <= a * (1.0 + p.tolerance);
    let low_ok = |v: f64| v >= p.floor - a * p.tolerance && v <= p.floor + a * p.tolerance;
    let high_ok = |v: f64| v <= p.floor + a * (1.0 + p.tolerance);
    let orientation_at = |i: usize| orientations.and_then(|o| o.get(i).copied());

    let mut windows: Vec<Window> = Vec::new();
    let mut current: Option<Window> = None;
    let flush = |w: Option<Window>, windows: &mut Vec<Window>| {
        if let Some(mut w) = w {
            if w.cycles() >= 2 {
                w.id = windows.len();
                windows.push(w);
            }
        }
    };

    let mut i = 0;
    while i + 2 < ext.len() {
        let (t0, pk, t1) = (ext[i], ext[i + 1], ext[i + 2]);
        if t0.is_max {
            i += 1;
            continue;
        }
        let small = swing_ok(pk.value - t0.value)
            && swing_ok(pk.value - t1.value)
            && low_ok(t0.value)
            && low_ok(t1.value)
            && high_ok(pk.value);
        let start = t0.last;
        // boundary troughs may be owned by the neighbouring segment
        let orientation = orientation_at(pk.first);
        let same_orientation = orientation == orientation_at(start) && orientation == orientation_at(t1.first - 1);
        // a trough plateau longer than the rise is a hold between sets
        let held = t0.last - t0.first >= pk.first - t0.last;
        if small && same_orientation {
            match current.as_mut() {
                Some(w) if w.orientation == orientation && *w.troughs.last().unwrap() == t0.first && !held => {
                    w.troughs.push(t1.first);
                    w.peaks.push(pk.first);
                    w.end = t1.first + 1;
                }
                _ => {
                    flush(current.take(), &mut windows);
                    current = Some(Window {
                        id: 0,
                        start,
                        end: t1.first + 1,
                        orientation,
                        troughs: vec![t0.first, t1.first],
                        peaks: vec![pk.first],
                    });
                }
            }
        } else {
            flush(current.take(), &mut windows);
        }
        i += 2;
    }
    flush(current.take(), &mut windows);
    // the first trough of a window may sit on a plateau; measure from its last sample
    for w in &mut windows {
        w.troughs[0] = w.start;
    }
    windows
}
