//! Average test levels over time with exactly uniform nulls
//! (T = 300, pi1 = 0.5, F0 = 0). Adaptive procedures earn wealth back;
//! alpha-spending only spends.
//!
//! ```text
//! cargo run --release --example test_levels -- levels.csv
//! ```

use std::fmt::Write as _;

use onlinefdr::simlab::{run_experiment, ExperimentGrid, MeanDistribution, SimConfig};

fn main() -> onlinefdr::Result<()> {
    let grid = ExperimentGrid {
        base: SimConfig {
            horizon: 300,
            f0: MeanDistribution::PointMass { value: 0.0 },
            replicates: 200,
            ..SimConfig::default()
        },
        pi1_grid: vec![0.5],
        record_levels: true,
        ..ExperimentGrid::default()
    };
    let table = run_experiment(&grid)?;
    let rows: Vec<_> = table.rows.iter().filter(|r| r.mean_levels.is_some()).collect();

    print!("{:>5}", "t");
    for r in &rows {
        print!(" {:>14}", r.method);
    }
    println!();
    for t in [1usize, 10, 50, 100, 200, 300] {
        print!("{t:>5}");
        for r in &rows {
            let level = r.mean_levels.as_ref().expect("recorded")[t - 1];
            print!(" {:>14}", format!("{:.2}", level.log10()));
        }
        println!();
    }
    println!("(log10 of the mean level)");

    if let Some(path) = std::env::args().nth(1) {
        let mut csv = String::from("t,procedure,mean_level\n");
        for r in &rows {
            for (i, l) in r.mean_levels.as_ref().expect("recorded").iter().enumerate() {
                let _ = writeln!(csv, "{},{},{}", i + 1, r.method, l);
            }
        }
        std::fs::write(&path, csv).map_err(|e| onlinefdr::Error::Input(format!("{path}: {e}")))?;
    }
    Ok(())
}
