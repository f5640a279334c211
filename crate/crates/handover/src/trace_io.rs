//! Line-delimited JSON traces: a header line, then one record per tick.

use std::io::{self, BufRead, Write};

use handover_core::sim::{RunOutput, TraceHeader, TraceRecord};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Serialize, Deserialize)]
struct HeaderLine {
    header: TraceHeader,
}

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("trace is empty")]
    Empty,
}

pub fn write_trace<W: Write>(mut w: W, header: &TraceHeader, records: &[TraceRecord]) -> io::Result<()> {
    serde_json::to_writer(&mut w, &HeaderLine { header: header.clone() })?;
    w.write_all(b"\n")?;
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

/// The trace exactly as `write_trace` would write it.
pub fn encode(out: &RunOutput) -> Vec<u8> {
    let mut buf = Vec::new();
    write_trace(&mut buf, &out.header, &out.records).expect("writing to memory");
    buf
}

/// Hex SHA-256 of the encoded trace.
pub fn digest(out: &RunOutput) -> String {
    hex::encode(Sha256::digest(encode(out)))
}

pub fn read_trace<R: BufRead>(r: R) -> Result<(TraceHeader, Vec<TraceRecord>), TraceError> {
    let mut lines = r.lines().enumerate();
    let (_, first) = lines.next().ok_or(TraceError::Empty)?;
    let header: HeaderLine = serde_json::from_str(&first?).map_err(|source| TraceError::Json { line: 1, source })?;
    let mut records = Vec::new();
    for (i, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line).map_err(|source| TraceError::Json { line: i + 1, source })?);
    }
    Ok((header.header, records))
}
