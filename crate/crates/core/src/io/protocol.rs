use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::engine::{Engine, PValueRecord};
use crate::error::{Error, Result};

/// One line of a decision log.
///
/// `t`, `p`, `label` and `batch` use the input field names, so the log is
/// itself a valid input stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRecord {
    pub t: u64,
    pub label: Option<String>,
    pub p: f64,
    pub alpha: f64,
    pub rejected: bool,
    /// Wealth after the decision; `None` for uncorrected testing.
    pub wealth: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch: Option<u64>,
}

/// Parses an NDJSON stream. Blank lines are skipped; anything else must be a
/// well-formed record. Errors carry the 1-based line number.
pub fn parse_stream(text: &str) -> Result<Vec<PValueRecord>> {
    read_stream(text.as_bytes())
}

pub fn read_stream(reader: impl BufRead) -> Result<Vec<PValueRecord>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Line {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: PValueRecord = serde_json::from_str(&line).map_err(|e| Error::Line {
            line: line_no,
            message: e.to_string(),
        })?;
        rec.validate().map_err(|e| Error::Line {
            line: line_no,
            message: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

/// Feeds `records` through `engine`.
///
/// The whole batch is checked for contiguity (starting at `engine.t() + 1`)
/// before the first decision, so a bad batch leaves the engine untouched.
pub fn run_records(engine: &mut Engine, records: &[PValueRecord]) -> Result<Vec<LogRecord>> {
    let start = engine.t() + 1;
    for (i, rec) in records.iter().enumerate() {
        let expected = start + i as u64;
        if rec.t != expected {
            return Err(Error::Sequence {
                expected,
                got: rec.t,
            });
        }
        rec.validate()?;
    }
    records.iter().map(|rec| step(engine, rec)).collect()
}

pub(crate) fn step(engine: &mut Engine, rec: &PValueRecord) -> Result<LogRecord> {
    engine.next_level()?;
    let d = engine.feed(rec)?;
    Ok(LogRecord {
        t: d.t,
        label: rec.label.clone(),
        p: rec.p,
        alpha: d.alpha,
        rejected: d.rejected,
        wealth: engine.wealth(),
        batch: rec.batch,
    })
}

/// Parses the whole input, then runs it. Nothing is decided if any line is
/// malformed or out of sequence.
pub fn run_stream(reader: impl BufRead, engine: &mut Engine) -> Result<Vec<LogRecord>> {
    let records = read_stream(reader)?;
    run_records(engine, &records)
}

/// Writes a decision log as NDJSON.
pub fn write_log(mut writer: impl Write, log: &[LogRecord]) -> std::io::Result<()> {
    for rec in log {
        serde_json::to_writer(&mut writer, rec)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}
