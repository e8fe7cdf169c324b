//! The basic engine contract: ask for a level, then reveal the p-value.
//!
//! ```text
//! cargo run --example lord_stream
//! ```

use onlinefdr::{Engine, PValueRecord, ProcedureConfig, ProcedureName};

fn main() -> onlinefdr::Result<()> {
    let config = ProcedureConfig::new(ProcedureName::Lord, 0.05);
    let mut engine = Engine::new(&config)?;
    println!("resolved config: {}", serde_json::to_string(engine.config())?);

    let pvalues = [0.31, 2e-5, 0.04, 0.7, 1e-4, 0.0009, 0.2, 0.5, 3e-4, 0.9];
    println!("{:>3} {:>10} {:>12} {:>8} {:>10}", "t", "p", "alpha_t", "reject", "wealth");
    for (i, &p) in pvalues.iter().enumerate() {
        // The level is fixed before the p-value is seen.
        let alpha_t = engine.next_level()?;
        let d = engine.feed(&PValueRecord::new(i as u64 + 1, p))?;
        assert_eq!(d.alpha, alpha_t);
        println!(
            "{:>3} {:>10.2e} {:>12.6e} {:>8} {:>10.6}",
            d.t,
            p,
            d.alpha,
            d.rejected,
            engine.wealth().unwrap_or(f64::NAN)
        );
    }
    println!("rejections at {:?}", engine.summary().rejection_times);
    println!("next level would be {:.6e}", engine.peek_level());

    // Breaking the alternation is an error, not a silent reorder.
    engine.next_level()?;
    let err = engine.next_level().unwrap_err();
    println!("second next_level: {err}");
    Ok(())
}
