//! SAFFRON.
//!
//! Candidates are p-values at most `lambda`; only candidates can ever be
//! rejected. Writing `C_{j+}(t)` for the number of candidates strictly
//! between the `j`-th rejection and `t` (with `tau_0 = 0`):
//!
//! ```text
//! alpha_t = min{ lambda, (1 - lambda) * [ w0 * gamma_{t - C_{0+}}
//!                                       + (alpha - w0) * gamma_{t - tau_1 - C_{1+}}
//!                                       + alpha * Σ_{j>=2} gamma_{t - tau_j - C_{j+}} ] }
//! ```
//!
//! The shifted index `t - tau_j - C_{j+}` advances only on non-candidates,
//! so testing a candidate costs no wealth. In ledger terms the penalty is
//! `alpha_t * 1{P_t > lambda} / (1 - lambda)`.

use serde::{Deserialize, Serialize};

use super::ledger::WealthLedger;
use crate::engine::StreamSummary;
use crate::error::{Error, Result};
use crate::gamma::GammaSequence;

/// Candidate bookkeeping for SAFFRON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaffronState {
    lambda: f64,
    /// Candidates among `1..t-1`.
    candidates: u64,
    /// Candidates among `1..=tau_j`, one entry per rejection.
    candidates_through_rejection: Vec<u64>,
}

impl SaffronState {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::Parameter(format!(
                "SAFFRON needs 0 < lambda < 1, got {lambda}"
            )));
        }
        Ok(SaffronState {
            lambda,
            candidates: 0,
            candidates_through_rejection: Vec::new(),
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `C_{0+}(t)`: candidates seen so far.
    pub fn candidates(&self) -> u64 {
        self.candidates
    }

    /// `C_{j+}(t)` for the `j`-th rejection (1-based).
    pub fn candidates_after(&self, j: usize) -> u64 {
        self.candidates - self.candidates_through_rejection[j - 1]
    }

    /// Records `P_t`; `rejected` is the engine's decision for it.
    pub fn record(&mut self, p: f64, rejected: bool) {
        if p <= self.lambda {
            self.candidates += 1;
        }
        if rejected {
            self.candidates_through_rejection.push(self.candidates);
        }
    }
}

pub fn saffron_level(
    t: u64,
    alpha: f64,
    w0: f64,
    gamma: &GammaSequence,
    state: &SaffronState,
    history: &StreamSummary,
) -> f64 {
    let t = t as i64;
    let mut wealth = w0 * gamma.at(t - state.candidates as i64);
    for (j, &tau) in history.rejection_times.iter().enumerate() {
        let tau = tau as i64;
        if tau >= t {
            break;
        }
        let index = t - tau - state.candidates_after(j + 1) as i64;
        let reward = if j == 0 { alpha - w0 } else { alpha };
        wealth += reward * gamma.at(index);
    }
    state.lambda.min((1.0 - state.lambda) * wealth)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Saffron {
    alpha: f64,
    w0: f64,
    gamma: GammaSequence,
    state: SaffronState,
    ledger: WealthLedger,
}

impl Saffron {
    pub fn new(alpha: f64, w0: f64, lambda: f64, gamma: GammaSequence) -> Result<Self> {
        Ok(Saffron {
            alpha,
            w0,
            gamma,
            state: SaffronState::new(lambda)?,
            ledger: WealthLedger::new(alpha, w0),
        })
    }

    pub fn state(&self) -> &SaffronState {
        &self.state
    }

    pub fn level(&self, t: u64, history: &StreamSummary) -> f64 {
        saffron_level(t, self.alpha, self.w0, &self.gamma, &self.state, history)
    }

    pub fn observe(&mut self, t: u64, p: f64, alpha_t: f64, rejected: bool) -> Result<()> {
        let lambda = self.state.lambda;
        let penalty = if p > lambda {
            alpha_t / (1.0 - lambda)
        } else {
            0.0
        };
        let payout = self.ledger.bound();
        self.ledger.adaptive_step(t, penalty, payout, rejected)?;
        self.state.record(p, rejected);
        Ok(())
    }

    pub fn ledger(&self) -> &WealthLedger {
        &self.ledger
    }
}
