//! The same hypotheses in different orders. Online procedures reward
//! putting likely discoveries early; offline BH does not care.
//!
//! ```text
//! cargo run --release --example ordering_effects
//! ```

use onlinefdr::metrics::{aggregate, score_stream};
use onlinefdr::simlab::{gaussian_stream, ordering_scenario, run_methods, Ordering, SimConfig};

fn main() -> onlinefdr::Result<()> {
    let cfg = SimConfig {
        pi1: 0.1,
        ..SimConfig::default()
    };
    let methods = cfg.methods()?;
    let reps = 200;
    for mode in [Ordering::Favourable, Ordering::Shuffled, Ordering::Adversarial] {
        let mut reports = vec![Vec::new(); methods.len()];
        for rep in 0..reps {
            let sample = ordering_scenario(&gaussian_stream(&cfg, rep), mode, rep);
            for (i, o) in run_methods(&methods, &sample.p)?.iter().enumerate() {
                reports[i].push(score_stream(&o.decisions, &sample.truth)?);
            }
        }
        println!("{mode:?}");
        for (m, r) in methods.iter().zip(&reports) {
            let a = aggregate(r, 0.1)?;
            println!("  {:<15} power {:.3} ± {:.3}  FDR {:.4}", m.label(), a.power, a.power_se, a.fdr);
        }
    }
    Ok(())
}
