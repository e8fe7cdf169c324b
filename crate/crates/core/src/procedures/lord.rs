//! LORD++.
//!
//! ```text
//! alpha_t = w0 * gamma_t
//!         + (alpha - w0) * gamma_{t - tau_1}                 if tau_1 < t
//!         + alpha * Σ_{j >= 2, tau_j < t} gamma_{t - tau_j}
//! ```
//!
//! The initial wealth is spread over the whole stream by `gamma`; each
//! rejection earns `alpha - w0` (first) or `alpha` (later) and immediately
//! spreads that reward over the following steps with the same schedule.
//! Booked through the ledger as `phi_t = alpha_t`, `psi_t = b_t`, which is
//! exactly the GAI++ cap, so `W(t) >= 0` is the same statement as
//! `Σ_{j<=t} alpha_j <= alpha * (R(t) ∨ 1)`.

use serde::{Deserialize, Serialize};

use super::ledger::WealthLedger;
use crate::engine::StreamSummary;
use crate::error::Result;
use crate::gamma::GammaSequence;

pub fn lord_level(
    t: u64,
    alpha: f64,
    w0: f64,
    gamma: &GammaSequence,
    history: &StreamSummary,
) -> f64 {
    let t = t as i64;
    let mut taus = history
        .rejection_times
        .iter()
        .map(|&tau| tau as i64)
        .take_while(|&tau| tau < t);
    let mut level = w0 * gamma.at(t);
    if let Some(first) = taus.next() {
        level += (alpha - w0) * gamma.at(t - first);
        let later: f64 = taus.map(|tau| gamma.at(t - tau)).sum();
        level += alpha * later;
    }
    level
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Lord {
    alpha: f64,
    w0: f64,
    gamma: GammaSequence,
    ledger: WealthLedger,
}

impl Lord {
    pub fn new(alpha: f64, w0: f64, gamma: GammaSequence) -> Self {
        Lord {
            alpha,
            w0,
            gamma,
            ledger: WealthLedger::new(alpha, w0),
        }
    }

    pub fn level(&self, t: u64, history: &StreamSummary) -> f64 {
        lord_level(t, self.alpha, self.w0, &self.gamma, history)
    }

    pub fn observe(&mut self, t: u64, alpha_t: f64, rejected: bool) -> Result<()> {
        let payout = self.ledger.bound();
        self.ledger.gai_step(t, alpha_t, alpha_t, payout, rejected)?;
        Ok(())
    }

    pub fn ledger(&self) -> &WealthLedger {
        &self.ledger
    }
}
