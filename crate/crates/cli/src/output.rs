use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemaKind {
    Config,
    Section,
    Bend,
    Thermal,
    Report,
    Metadata,
    Table3,
    Table4,
}

impl SchemaKind {
    pub fn source(self) -> &'static str {
        match self {
            SchemaKind::Config => include_str!("../schemas/config.schema.json"),
            SchemaKind::Section => include_str!("../schemas/section.schema.json"),
            SchemaKind::Bend => include_str!("../schemas/bend.schema.json"),
            SchemaKind::Thermal => include_str!("../schemas/thermal.schema.json"),
            SchemaKind::Report => include_str!("../schemas/report.schema.json"),
            SchemaKind::Metadata => include_str!("../schemas/metadata.schema.json"),
            SchemaKind::Table3 => include_str!("../schemas/table3.schema.json"),
            SchemaKind::Table4 => include_str!("../schemas/table4.schema.json"),
        }
    }
}

/// Writes `bytes` to `out`, or to standard output.
pub fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

pub fn json_bytes<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(value)?;
    v.push(b'\n');
    Ok(v)
}

pub fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?)
}
