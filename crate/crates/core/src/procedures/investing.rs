//! Alpha-investing expressed as a GAI++ rule.
//!
//! At each step a fixed fraction of the current wealth is put at risk,
//! `phi_t = spend * W(t-1)`, the test runs at `alpha_t = phi_t / (1 + phi_t)`,
//! and a rejection pays `psi_t = phi_t + b_t`. With this level both terms of
//! the GAI++ cap coincide (`phi_t / alpha_t = 1 + phi_t`), so the payout
//! sits exactly on the cap. More past rejections mean more wealth and a
//! larger `phi_t`, so the rule is monotone.

use serde::{Deserialize, Serialize};

use super::ledger::WealthLedger;
use crate::error::Result;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlphaInvesting {
    spend: f64,
    ledger: WealthLedger,
}

impl AlphaInvesting {
    pub fn new(alpha: f64, w0: f64, spend: f64) -> Self {
        AlphaInvesting {
            spend,
            ledger: WealthLedger::new(alpha, w0),
        }
    }

    fn penalty(&self) -> f64 {
        self.spend * self.ledger.wealth().max(0.0)
    }

    pub fn level(&self) -> f64 {
        let phi = self.penalty();
        phi / (1.0 + phi)
    }

    pub fn observe(&mut self, t: u64, alpha_t: f64, rejected: bool) -> Result<()> {
        let phi = self.penalty();
        let psi = phi + self.ledger.bound();
        self.ledger.gai_step(t, alpha_t, phi, psi, rejected)?;
        Ok(())
    }

    pub fn ledger(&self) -> &WealthLedger {
        &self.ledger
    }
}
