//! Mechanical and electrical models of self-sensing 3D-printed beams with
//! continuous carbon-fiber strain gauges, a forward simulator for break-in
//! load experiments and the inverse pipeline that extracts gauge factors from
//! recorded time series.

pub mod config;
pub mod analysis;
pub mod error;
pub mod experiment;
pub mod mechanics;
pub mod model;
pub mod sensing;
pub mod units;

pub use config::Config;
pub use error::{Error, RecordError, Result};
