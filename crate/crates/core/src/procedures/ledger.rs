//! Alpha-wealth accounting.
//!
//! Every rule starts with wealth `W(0) = w0`, pays a penalty `phi_t` per
//! test and earns a payout `psi_t` per rejection:
//!
//! ```text
//! W(t) = W(t-1) - phi_t + R_t * psi_t,        phi_t <= W(t-1)
//! ```
//!
//! GAI++ rules additionally cap the payout,
//!
//! ```text
//! psi_t <= min{ phi_t + b_t, phi_t / alpha_t + b_t - 1 }
//! b_t    = alpha - w0   before the first rejection
//!        = alpha        afterwards
//! ```
//!
//! which is what gives monotone GAI++ rules their FDR guarantee under
//! independence. SAFFRON and ADDIS book their spending through the same
//! ledger but only pay for non-candidates, so they use
//! [`WealthLedger::adaptive_step`], which keeps the overdraft check and
//! skips the GAI++ cap.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::TOLERANCE;

/// Number of most recent entries kept in memory and in snapshots.
pub const LEDGER_TAIL: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub t: u64,
    /// `phi_t`
    pub penalty: f64,
    /// `psi_t`
    pub payout: f64,
    /// `b_t`
    pub bound: f64,
    pub rejected: bool,
    /// `W(t)`
    pub wealth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WealthLedger {
    alpha: f64,
    w0: f64,
    wealth: f64,
    steps: u64,
    rejections: u64,
    tail: VecDeque<LedgerEntry>,
}

impl WealthLedger {
    pub fn new(alpha: f64, w0: f64) -> Self {
        WealthLedger {
            alpha,
            w0,
            wealth: w0,
            steps: 0,
            rejections: 0,
            tail: VecDeque::with_capacity(LEDGER_TAIL),
        }
    }

    /// `W(t)` after the last recorded step.
    pub fn wealth(&self) -> f64 {
        self.wealth
    }

    pub fn w0(&self) -> f64 {
        self.w0
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn rejections(&self) -> u64 {
        self.rejections
    }

    /// Most recent entries, oldest first.
    pub fn tail(&self) -> impl Iterator<Item = &LedgerEntry> {
        self.tail.iter()
    }

    /// `b_t` for the next step.
    pub fn bound(&self) -> f64 {
        if self.rejections == 0 {
            self.alpha - self.w0
        } else {
            self.alpha
        }
    }

    /// GAI++ payout cap for the next step.
    pub fn payout_cap(&self, alpha_t: f64, penalty: f64) -> f64 {
        let b = self.bound();
        // phi/alpha_t -> 1 along phi = alpha_t -> 0; a positive penalty on a
        // zero level leaves only the first constraint active.
        let ratio = if alpha_t > 0.0 {
            penalty / alpha_t
        } else if penalty > 0.0 {
            f64::INFINITY
        } else {
            1.0
        };
        (penalty + b).min(ratio + b - 1.0)
    }

    /// One GAI++ step, validating overdraft and payout cap.
    pub fn gai_step(
        &mut self,
        t: u64,
        alpha_t: f64,
        penalty: f64,
        payout: f64,
        rejected: bool,
    ) -> Result<LedgerEntry> {
        let cap = self.payout_cap(alpha_t, penalty);
        if payout > cap + TOLERANCE {
            return Err(Error::PayoutCap { payout, cap });
        }
        self.adaptive_step(t, penalty, payout, rejected)
    }

    /// One step with the overdraft check only.
    pub fn adaptive_step(
        &mut self,
        t: u64,
        penalty: f64,
        payout: f64,
        rejected: bool,
    ) -> Result<LedgerEntry> {
        if penalty > self.wealth + TOLERANCE {
            return Err(Error::Overdraft {
                penalty,
                wealth: self.wealth,
            });
        }
        let bound = self.bound();
        let wealth = self.wealth - penalty + if rejected { payout } else { 0.0 };
        let entry = LedgerEntry {
            t,
            penalty,
            payout,
            bound,
            rejected,
            wealth,
        };
        self.wealth = wealth;
        self.steps += 1;
        if rejected {
            self.rejections += 1;
        }
        if self.tail.len() == LEDGER_TAIL {
            self.tail.pop_front();
        }
        self.tail.push_back(entry);
        Ok(entry)
    }
}

/// Functional form of [`WealthLedger::gai_step`]: returns the updated ledger
/// and leaves the input untouched.
pub fn gai_step(
    state: &WealthLedger,
    t: u64,
    alpha_t: f64,
    penalty: f64,
    payout: f64,
    rejected: bool,
) -> Result<WealthLedger> {
    let mut next = state.clone();
    next.gai_step(t, alpha_t, penalty, payout, rejected)?;
    Ok(next)
}
