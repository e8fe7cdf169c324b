//! A Monte Carlo grid over the non-null proportion, written as plot-ready CSV.
//!
//! ```text
//! cargo run --release --example simulate_power -- power.csv
//! ```

use onlinefdr::io::{experiment_csv_long, render_report, Report, ReportFormat};
use onlinefdr::simlab::{run_experiment, ExperimentGrid, SimConfig};

fn main() -> onlinefdr::Result<()> {
    let grid = ExperimentGrid {
        base: SimConfig {
            replicates: 200,
            ..SimConfig::default()
        },
        pi1_grid: vec![0.01, 0.1, 0.3, 0.5, 0.7, 0.9],
        ..ExperimentGrid::default()
    };
    let table = run_experiment(&grid)?;
    print!("{}", render_report(Report::Experiment(&table), ReportFormat::TextSummary)?);

    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, experiment_csv_long(&table))
            .map_err(|e| onlinefdr::Error::Input(format!("{path}: {e}")))?;
        println!("wrote {path}");
    }
    Ok(())
}
