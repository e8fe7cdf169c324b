//! From a CSV of p-values to a decision log and a CSV report.
//!
//! ```text
//! cargo run --example csv_ingest -- crates/core/fixtures/stampede.csv
//! ```

use std::path::PathBuf;

use onlinefdr::io::{ingest_csv, render_report, run_records, write_log, ColumnMap, Report, ReportFormat};
use onlinefdr::{Engine, GammaSpec, ProcedureConfig, ProcedureName};

fn main() -> onlinefdr::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/stampede.csv"));
    let records = ingest_csv(&path, &ColumnMap::default())?;
    println!("{} records from {}", records.len(), path.display());

    let config = ProcedureConfig::new(ProcedureName::Addis, 0.05).with_gamma(GammaSpec::Bounded(20));
    let mut engine = Engine::new(&config)?;
    let log = run_records(&mut engine, &records)?;

    println!("-- NDJSON log (replayable as input)");
    write_log(std::io::stdout().lock(), &log).map_err(|e| onlinefdr::Error::Input(e.to_string()))?;
    println!("-- CSV report");
    print!("{}", render_report(Report::DecisionLog(&log), ReportFormat::Csv)?);
    println!("-- summary");
    print!("{}", render_report(Report::DecisionLog(&log), ReportFormat::TextSummary)?);

    // Bad rows are reported by number.
    let bad = "label,p\nA,0.1\nB,0.2\nC,1.5\n";
    let err = onlinefdr::io::ingest_csv_reader(bad.as_bytes(), &ColumnMap::default()).unwrap_err();
    println!("bad file: {err}");
    Ok(())
}
