//! Alpha-spending: the online Bonferroni correction `alpha_t = alpha * gamma_t`.
//!
//! Controls the FWER (and hence the FDR) because `Σ alpha_t <= alpha`, but
//! never earns wealth back, so levels decay to zero.

use serde::{Deserialize, Serialize};

use super::ledger::WealthLedger;
use crate::error::Result;
use crate::gamma::GammaSequence;

pub fn alpha_spending_level(t: u64, alpha: f64, gamma: &GammaSequence) -> f64 {
    alpha * gamma.at(t as i64)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlphaSpending {
    alpha: f64,
    gamma: GammaSequence,
    ledger: WealthLedger,
}

impl AlphaSpending {
    pub fn new(alpha: f64, gamma: GammaSequence) -> Self {
        // Total budget alpha, spent and never refunded.
        AlphaSpending {
            alpha,
            gamma,
            ledger: WealthLedger::new(alpha, alpha),
        }
    }

    pub fn level(&self, t: u64) -> f64 {
        alpha_spending_level(t, self.alpha, &self.gamma)
    }

    pub fn observe(&mut self, t: u64, alpha_t: f64, rejected: bool) -> Result<()> {
        self.ledger.gai_step(t, alpha_t, alpha_t, 0.0, rejected)?;
        Ok(())
    }

    pub fn ledger(&self) -> &WealthLedger {
        &self.ledger
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::GammaSpec;

    #[test]
    fn bounded_levels() {
        let g = GammaSequence::new(&GammaSpec::Bounded(20)).unwrap();
        assert!((alpha_spending_level(8, 0.05, &g) - 0.0025).abs() < 1e-18);
        assert_eq!(alpha_spending_level(21, 0.05, &g), 0.0);
    }

    #[test]
    fn lord_default_first_level() {
        let g = GammaSequence::new(&GammaSpec::LordDefault).unwrap();
        let level = alpha_spending_level(1, 0.05, &g);
        assert!((level - 0.05 * 0.079_081_966_72 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn spending_never_exceeds_budget() {
        let g = GammaSequence::new(&GammaSpec::Bounded(20)).unwrap();
        let mut rule = AlphaSpending::new(0.05, g);
        for t in 1..=40 {
            let a = rule.level(t);
            rule.observe(t, a, false).unwrap();
        }
        assert!(rule.ledger().wealth().abs() < 1e-15);
    }
}
