//! The spending sequences behind the level rules, and what normalisation
//! and truncation do to them.
//!
//! ```text
//! cargo run --example gamma_sequences
//! ```

use onlinefdr::{GammaSequence, GammaSpec};

fn main() -> onlinefdr::Result<()> {
    let specs = ["lord-default", "power:1.6", "bounded:20", "truncated:20:power:1.6", "custom:0.5,0.25,0.125"];
    for text in specs {
        let spec: GammaSpec = text.parse()?;
        let g = GammaSequence::new(&spec)?;
        let head: Vec<String> = (1..=5).map(|k| format!("{:.5}", g.at(k))).collect();
        let partial: f64 = (1..=20).map(|k| g.at(k)).sum();
        println!(
            "{text:<24} norm {:<14.10} first five [{}] sum to 20 = {:.6}",
            g.normalization(),
            head.join(", "),
            partial
        );
    }
    let power = GammaSequence::new(&"power:1.6".parse()?)?;
    println!("power:1.6 shifted to start at 0: gamma_0 = {:.6}", power.clone().with_origin(0).at(0));
    Ok(())
}
