//! The GAI++ wealth ledger behind alpha-investing and LORD.
//!
//! Every step records the penalty paid, the payout earned on rejection and
//! the resulting wealth; the payout never exceeds the GAI++ cap.
//!
//! ```text
//! cargo run --example gai_ledger
//! ```

use onlinefdr::procedures::WealthLedger;
use onlinefdr::{Engine, ProcedureConfig, ProcedureName};

fn show(name: &str, engine: &Engine) {
    println!("{name}");
    println!("{:>3} {:>11} {:>11} {:>9} {:>8} {:>11}", "t", "penalty", "payout", "b_t", "reject", "wealth");
    for e in engine.ledger().map(WealthLedger::tail).into_iter().flatten() {
        println!(
            "{:>3} {:>11.3e} {:>11.3e} {:>9.4} {:>8} {:>11.6}",
            e.t, e.penalty, e.payout, e.bound, e.rejected, e.wealth
        );
    }
}

fn main() -> onlinefdr::Result<()> {
    let pvalues = [0.004, 0.5, 0.0001, 0.3, 0.9, 0.002, 0.6, 0.01];

    let investing = ProcedureConfig::new(ProcedureName::GaiPlusPlus, 0.05).with_spend(0.2);
    let mut gai = Engine::new(&investing)?;
    gai.test_all(&pvalues)?;
    show("alpha-investing (GAI++), 20% of wealth per test", &gai);

    let mut lord = Engine::new(&ProcedureConfig::new(ProcedureName::Lord, 0.05))?;
    lord.test_all(&pvalues)?;
    println!();
    show("LORD++", &lord);

    // Stand-alone ledger: a payout above the cap is refused.
    let mut ledger = WealthLedger::new(0.05, 0.025);
    let cap = ledger.payout_cap(0.01, 0.01);
    println!("\ncap at alpha_t = phi = 0.01: {cap}");
    let err = ledger.gai_step(1, 0.01, 0.01, cap * 2.0, true).unwrap_err();
    println!("doubling it: {err}");
    Ok(())
}
