//! Break-in experiments: load waveform, forward simulation and the recorded
//! time series that links simulation and analysis.

pub mod record;
pub mod run;
pub mod waveform;

pub use record::{parse_record, Row, TimeSeriesRecord};
pub use run::{run_experiment, ExperimentPlan, GaugeTruth, ResponseDecorator, Scenario, Simulation};
pub use waveform::{build_waveform, BreakinSet, Segment, SegmentKind, WaveformSpec};
