//! Inverse pipeline: from a recorded time series to per-window gauge factors
//! and break-in curves.

pub mod breakin;
pub mod fit;
pub mod hysteresis;
pub mod plot;
pub mod segment;
pub mod strain;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::experiment::TimeSeriesRecord;
use crate::mechanics::{Beam, Gauge, Orientation};
use crate::model::{BeamGeometry, MaterialSet};
use crate::sensing::{divider_inverse, DividerConfig};

pub use breakin::{breakin_curve, BreakinCurve, BreakinPoint};
pub use fit::{fit_gauge_factor, FitResult};
pub use hysteresis::{hysteresis_and_drift, HysteresisMetrics};
pub use segment::{segment_small_sets, SegmentParams, Window};
pub use strain::{relative_strain, strain_from_deflection};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrainMode {
    /// Strain from the absolute deflection.
    #[default]
    Absolute,
    /// Strain with each window's mean removed; `k` is then relative to the
    /// window-mean resistance.
    Relative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub force_floor: f64,
    pub small_amplitude: f64,
    pub tolerance: f64,
    pub strain_mode: StrainMode,
    /// Used to rebuild resistance from voltages when a record lacks it.
    pub divider: DividerConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelStatus {
    Ok,
    /// Missing samples in the window: saturated or open channel.
    Open,
    /// Not enough points or no strain variation.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelWindow {
    pub gauge: Gauge,
    pub status: ChannelStatus,
    pub fit: Option<FitResult>,
    /// Fitted resistance at zero strain (Ω).
    pub r_unstrained: Option<f64>,
    /// Mean measured resistance at the window's lowest force (Ω).
    pub r_floor: Option<f64>,
    pub metrics: Option<HysteresisMetrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowReport {
    pub id: usize,
    pub orientation: Option<Orientation>,
    pub start_row: usize,
    pub end_row: usize,
    pub start_time: f64,
    pub end_time: f64,
    pub cycles: usize,
    pub channels: Vec<ChannelWindow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub rows: usize,
    pub plan_digest: Option<String>,
    pub seed: Option<u64>,
    pub strain_mode: StrainMode,
    /// Gauges with at least one unmeasurable sample.
    pub open_channels: Vec<Gauge>,
    pub windows: Vec<WindowReport>,
    pub curves: Vec<BreakinCurve>,
}

impl AnalysisReport {
    /// Successful fit of `gauge` in every window, `None` where it failed.
    pub fn fits(&self, gauge: Gauge) -> Vec<Option<FitResult>> {
        self.windows
            .iter()
            .map(|w| w.channels[gauge.index()].fit)
            .collect()
    }
}

/// Resistance series of one channel: the recorded value where present,
/// otherwise reconstructed from the divider voltage, `NaN` when neither works.
pub fn channel_resistance(record: &TimeSeriesRecord, gauge: Gauge, divider: &DividerConfig) -> Vec<f64> {
    let g = gauge.index();
    record
        .rows
        .iter()
        .map(|row| {
            if row.resistance[g].is_finite() {
                row.resistance[g]
            } else if row.voltage[g].is_finite() {
                divider_inverse(row.voltage[g], divider.resistors[g], divider.supply, divider.placement)
                    .unwrap_or(f64::NAN)
            } else {
                f64::NAN
            }
        })
        .collect()
}

/// Per-row orientation from record metadata; all rows are taken as
/// `Initial` when the record carries none.
pub fn row_orientations(record: &TimeSeriesRecord) -> Option<Vec<Orientation>> {
    record.metadata.as_ref().map(|m| m.row_orientations(record.len()))
}

pub fn analyze(
    record: &TimeSeriesRecord,
    geometry: &BeamGeometry,
    materials: &MaterialSet,
    options: &AnalysisOptions,
) -> Result<AnalysisReport> {
    let beam = Beam::new(*geometry, *materials)?;
    let (floor, amplitude, divider) = match &record.metadata {
        Some(m) => (m.force_floor, m.small_amplitude, m.divider),
        None => (options.force_floor, options.small_amplitude, options.divider),
    };
    let orientations = row_orientations(record);
    let per_row = orientations
        .clone()
        .unwrap_or_else(|| vec![Orientation::Initial; record.len()]);
    let force = record.force();
    let deflection = record.deflection();
    let windows = segment_small_sets(
        &force,
        orientations.as_deref(),
        SegmentParams {
            floor,
            amplitude,
            tolerance: options.tolerance,
        },
    );
    let floor_band = 0.02 * amplitude;

    let mut reports: Vec<WindowReport> = windows
        .iter()
        .map(|w| WindowReport {
            id: w.id,
            orientation: w.orientation,
            start_row: w.start,
            end_row: w.end,
            start_time: record.rows[w.start].t,
            end_time: record.rows[w.end - 1].t,
            cycles: w.cycles(),
            channels: Vec::with_capacity(2),
        })
        .collect();
    let mut open_channels = Vec::new();
    let mut curves = Vec::new();

    for gauge in Gauge::BOTH {
        let r = channel_resistance(record, gauge, &divider);
        if r.iter().any(|v| !v.is_finite()) {
            open_channels.push(gauge);
        }
        let strain = strain_from_deflection(&deflection, geometry, &per_row, gauge);
        let mut fits = Vec::with_capacity(windows.len());
        for (w, report) in windows.iter().zip(reports.iter_mut()) {
            let rw = &r[w.range()];
            let channel = if rw.iter().any(|v| !v.is_finite()) {
                ChannelWindow {
                    gauge,
                    status: ChannelStatus::Open,
                    fit: None,
                    r_unstrained: None,
                    r_floor: None,
                    metrics: None,
                }
            } else {
                let ew = match options.strain_mode {
                    StrainMode::Absolute => strain[w.range()].to_vec(),
                    StrainMode::Relative => relative_strain(&strain[w.range()]),
                };
                let fit = fit_gauge_factor(w.id, rw, &ew).ok();
                let metrics = hysteresis_and_drift(w, &r, &strain).ok();
                ChannelWindow {
                    gauge,
                    status: if fit.is_some() {
                        ChannelStatus::Ok
                    } else {
                        ChannelStatus::Degenerate
                    },
                    fit,
                    r_unstrained: fit.map(|f| f.r0_fit),
                    r_floor: Some(breakin::floor_resistance(w, &force, &r, floor_band)),
                    metrics,
                }
            };
            fits.push(channel.fit);
            report.channels.push(channel);
        }
        curves.extend(breakin_curve(gauge, &windows, &fits, &force, &beam));
    }

    Ok(AnalysisReport {
        schema_version: REPORT_SCHEMA_VERSION,
        rows: record.len(),
        plan_digest: record.metadata.as_ref().map(|m| m.plan_digest.clone()),
        seed: record.metadata.as_ref().map(|m| m.seed),
        strain_mode: options.strain_mode,
        open_channels,
        windows: reports,
        curves,
    })
}
