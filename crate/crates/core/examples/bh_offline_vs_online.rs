//! Offline Benjamini-Hochberg sees every p-value at once; online procedures
//! must commit as they go. Same data, different answers.
//!
//! ```text
//! cargo run --example bh_offline_vs_online
//! ```

use onlinefdr::metrics::{bh_offline, score_stream};
use onlinefdr::simlab::{gaussian_stream, run_methods, SimConfig};

fn main() -> onlinefdr::Result<()> {
    let cfg = SimConfig {
        horizon: 200,
        pi1: 0.2,
        ..SimConfig::default()
    };
    let sample = gaussian_stream(&cfg, 0);
    let bh = bh_offline(&sample.p, cfg.alpha);
    println!("BH rejects {} of {} hypotheses", bh.len(), sample.len());

    let methods = cfg.methods()?;
    let outcomes = run_methods(&methods, &sample.p)?;
    for (method, outcome) in methods.iter().zip(&outcomes) {
        let m = score_stream(&outcome.decisions, &sample.truth)?;
        println!(
            "{:<15} R = {:>3}  V = {:>2}  FDP = {:.3}  power = {:.3}",
            method.label(),
            m.rejections,
            m.false_rejections,
            m.fdp,
            m.power
        );
    }

    // The BH threshold is the largest p_(k) <= k alpha / n.
    if let Some(&k) = bh.iter().max_by(|&&a, &&b| sample.p[a].total_cmp(&sample.p[b])) {
        println!("BH threshold p = {:.3e}", sample.p[k]);
    }
    Ok(())
}
