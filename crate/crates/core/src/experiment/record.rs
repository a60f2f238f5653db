//! DAQ-style time series: CSV rows plus a JSON sidecar with replay metadata.
//!
//! Values are rounded to 9 significant digits before they are stored, so a
//! record that is written and parsed again compares equal to the original.
//! Open (unmeasurable) channels are written as `NaN`; empty resistance or
//! voltage cells are read as `NaN` as well, which allows lab files carrying
//! only voltages.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::waveform::SegmentKind;
use crate::error::{Error, RecordError, Result};
use crate::mechanics::Orientation;
use crate::sensing::DividerConfig;

pub const SCHEMA_VERSION: u32 = 1;

/// Column base names and units, in file order.
pub const COLUMNS: [(&str, &str); 7] = [
    ("t", "s"),
    ("force", "N"),
    ("deflection", "m"),
    ("R1", "ohm"),
    ("R2", "ohm"),
    ("V1", "V"),
    ("V2", "V"),
];

pub fn header() -> Vec<String> {
    COLUMNS.iter().map(|(n, u)| format!("{n}_{u}")).collect()
}

/// Rounds to 9 significant digits.
pub fn quantize(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Row {
    pub t: f64,
    pub force: f64,
    /// Midspan deflection, positive downward (m).
    pub deflection: f64,
    pub resistance: [f64; 2],
    pub voltage: [f64; 2],
}

impl Row {
    pub fn values(&self) -> [f64; 7] {
        [
            self.t,
            self.force,
            self.deflection,
            self.resistance[0],
            self.resistance[1],
            self.voltage[0],
            self.voltage[1],
        ]
    }

    fn from_values(v: [f64; 7]) -> Row {
        Row {
            t: v[0],
            force: v[1],
            deflection: v[2],
            resistance: [v[3], v[4]],
            voltage: [v[5], v[6]],
        }
    }

    pub fn quantized(&self) -> Row {
        Row::from_values(self.values().map(quantize))
    }
}

/// Bitwise equality, so that `NaN` markers compare equal.
impl PartialEq for Row {
    fn eq(&self, other: &Row) -> bool {
        self.values()
            .iter()
            .zip(other.values().iter())
            .all(|(a, b)| a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()))
    }
}

/// Contiguous rows generated by one waveform segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentSpan {
    #[serde(flatten)]
    pub kind: SegmentKind,
    pub orientation: Orientation,
    /// First row (inclusive).
    pub start_row: usize,
    /// Last row (exclusive).
    pub end_row: usize,
    pub start_time: f64,
    pub end_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordMetadata {
    pub schema_version: u32,
    pub seed: u64,
    /// SHA-256 of the canonical JSON of plan and scenario.
    pub plan_digest: String,
    pub force_floor: f64,
    pub small_amplitude: f64,
    pub divider: DividerConfig,
    pub segments: Vec<SegmentSpan>,
    /// Full plan and scenario for exact replay.
    pub plan: serde_json::Value,
    pub scenario: serde_json::Value,
}

impl RecordMetadata {
    /// Orientation of every row, if the segments cover the record.
    pub fn row_orientations(&self, rows: usize) -> Vec<Orientation> {
        let mut out = vec![Orientation::Initial; rows];
        for s in &self.segments {
            for o in out.iter_mut().take(s.end_row.min(rows)).skip(s.start_row) {
                *o = s.orientation;
            }
        }
        out
    }

    pub fn small_set_count(&self) -> usize {
        self.segments
            .iter()
            .filter(|s| matches!(s.kind, SegmentKind::Small { .. }))
            .count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesRecord {
    pub rows: Vec<Row>,
    pub metadata: Option<RecordMetadata>,
}

impl TimeSeriesRecord {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn time(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    pub fn force(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.force).collect()
    }

    pub fn deflection(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.deflection).collect()
    }

    pub fn resistance(&self, channel: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.resistance[channel]).collect()
    }

    pub fn voltage(&self, channel: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.voltage[channel]).collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_rows(&self.rows, out)
    }

    /// Writes `path` and, when metadata is present, its sidecar.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = BufWriter::new(File::create(path)?);
        self.write_csv(file)?;
        if let Some(meta) = &self.metadata {
            let mut side = BufWriter::new(File::create(sidecar_path(path))?);
            write_metadata(meta, &mut side)?;
            side.flush()?;
        }
        Ok(())
    }
}

/// `run.csv` → `run.csv.meta.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    let mut name = csv.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".meta.json");
    csv.with_file_name(name)
}

fn format_value(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{}", quantize(x))
    }
}

pub fn write_rows<W: Write>(rows: &[Row], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(header()).map_err(io)?;
    for r in rows {
        w.write_record(r.values().map(format_value)).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_metadata<W: Write>(meta: &RecordMetadata, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, meta)?;
    out.write_all(b"\n")?;
    Ok(())
}

fn check_header(fields: &csv::StringRecord, line: u64) -> std::result::Result<(), RecordError> {
    if fields.len() != COLUMNS.len() {
        return Err(RecordError::MalformedHeader {
            line,
            reason: format!("expected {} columns, found {}", COLUMNS.len(), fields.len()),
        });
    }
    for (field, (name, unit)) in fields.iter().zip(COLUMNS) {
        let field = field.trim();
        let Some((base, found)) = field.rsplit_once('_') else {
            return Err(RecordError::MalformedHeader {
                line,
                reason: format!("column `{field}` has no unit suffix"),
            });
        };
        if base != name {
            return Err(RecordError::MalformedHeader {
                line,
                reason: format!("expected column `{name}_{unit}`, found `{field}`"),
            });
        }
        if found != unit {
            return Err(RecordError::UnitMismatch {
                line,
                column: name.to_string(),
                expected: unit.to_string(),
                found: found.to_string(),
            });
        }
    }
    Ok(())
}

/// Parses CSV rows, validating header, field counts, numbers and time order.
pub fn read_rows<R: Read>(input: R) -> std::result::Result<Vec<Row>, RecordError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let mut records = reader.records();
    let head = match records.next() {
        None => return Err(RecordError::Empty),
        Some(h) => h.map_err(|e| RecordError::Csv(e.to_string()))?,
    };
    check_header(&head, 1)?;

    let mut rows = Vec::new();
    let mut previous: Option<f64> = None;
    for rec in records {
        let rec = rec.map_err(|e| RecordError::Csv(e.to_string()))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() != COLUMNS.len() {
            return Err(RecordError::FieldCount {
                line,
                expected: COLUMNS.len(),
                found: rec.len(),
            });
        }
        let mut v = [0.0; 7];
        for (i, cell) in rec.iter().enumerate() {
            let cell = cell.trim();
            let column = || header()[i].clone();
            let optional = i >= 3;
            v[i] = if cell.is_empty() {
                if optional {
                    f64::NAN
                } else {
                    return Err(RecordError::MissingValue { line, column: column() });
                }
            } else {
                cell.parse::<f64>().map_err(|_| RecordError::InvalidNumber {
                    line,
                    column: column(),
                    value: cell.to_string(),
                })?
            };
            if !optional && !v[i].is_finite() {
                return Err(RecordError::MissingValue { line, column: column() });
            }
        }
        if let Some(prev) = previous {
            if !(v[0] > prev) {
                return Err(RecordError::NonMonotoneTime {
                    line,
                    time: v[0],
                    previous: prev,
                });
            }
        }
        previous = Some(v[0]);
        rows.push(Row::from_values(v));
    }
    if rows.is_empty() {
        return Err(RecordError::Empty);
    }
    Ok(rows)
}

pub fn read_metadata<R: Read>(input: R) -> Result<RecordMetadata> {
    let meta: RecordMetadata = serde_json::from_reader(input)?;
    if meta.schema_version != SCHEMA_VERSION {
        return Err(Error::Config(format!(
            "unsupported record schema version {} (expected {SCHEMA_VERSION})",
            meta.schema_version
        )));
    }
    Ok(meta)
}

/// Reads a CSV record and its sidecar metadata when one exists next to it.
pub fn parse_record(path: &Path) -> Result<TimeSeriesRecord> {
    let rows = read_rows(BufReader::new(File::open(path)?))?;
    let side = sidecar_path(path);
    let metadata = if side.exists() {
        Some(read_metadata(BufReader::new(File::open(side)?))?)
    } else {
        None
    };
    Ok(TimeSeriesRecord { rows, metadata })
}
