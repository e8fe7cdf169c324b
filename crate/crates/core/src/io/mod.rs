//! Operational shell: the line protocol, checkpoints, CSV ingest, reports
//! and the bundled STAMPEDE case study.
//!
//! A stream is newline-delimited JSON, one object per hypothesis with
//! required keys `t` and `p` and optional `label` and `batch`. The decision
//! log written by [`run_stream`] uses the same framing and carries the same
//! keys, so a log can be fed back in to audit its decisions.

mod casestudy;
mod ingest;
mod protocol;
mod report;
mod snapshot;

pub use casestudy::{
    calibrate_w0, run_stampede, stampede_records, CalibrationManifest, CalibrationPoint,
    CaseStudyReport, CaseStudyRow, ProcedureCalibration, StampedeSettings, STAMPEDE_CSV,
    STAMPEDE_MANIFEST,
};
pub use ingest::{ingest_csv, ingest_csv_reader, ColumnMap};
pub use protocol::{parse_stream, read_stream, run_records, run_stream, write_log, LogRecord};
pub use report::{
    emit_report, experiment_csv_long, experiment_csv_wide, render_report, Report, ReportFormat,
};
pub use snapshot::{next_level_preview, StateLock, StreamSession, StreamSnapshot, SCHEMA_VERSION};
