//! ADDIS: SAFFRON that also discards conservative nulls.
//!
//! P-values above `eta` are discarded: they neither cost wealth nor advance
//! any index. With `S^t` the number of selected (`P_i <= eta`) indices before
//! `t` and `tau_j^*` the number selected up to and including `tau_j`:
//!
//! ```text
//! alpha_t = min{ lambda, (eta - lambda) * [ w0 * gamma_{S^t - C_{0+}}
//!                                         + (alpha - w0) * gamma_{S^t - tau_1^* - C_{1+}}
//!                                         + alpha * Σ_{j>=2} gamma_{S^t - tau_j^* - C_{j+}} ] }
//! ```
//!
//! `gamma` is indexed from 0. Since `lambda < eta`, every candidate is also
//! selected, so the candidate counters are the SAFFRON ones. With `eta = 1`
//! the rule reduces to SAFFRON on the same sequence shifted by one.

use serde::{Deserialize, Serialize};

use super::ledger::WealthLedger;
use crate::error::{Error, Result};
use crate::gamma::GammaSequence;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AddisState {
    lambda: f64,
    eta: f64,
    candidates: u64,
    /// `S^t`
    selected: u64,
    candidates_through_rejection: Vec<u64>,
    /// `tau_j^*`
    selected_through_rejection: Vec<u64>,
}

impl AddisState {
    pub fn new(lambda: f64, eta: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < eta && eta <= 1.0) {
            return Err(Error::Parameter(format!(
                "ADDIS needs 0 < lambda < eta <= 1, got lambda = {lambda}, eta = {eta}"
            )));
        }
        Ok(AddisState {
            lambda,
            eta,
            candidates: 0,
            selected: 0,
            candidates_through_rejection: Vec::new(),
            selected_through_rejection: Vec::new(),
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn selected(&self) -> u64 {
        self.selected
    }

    pub fn candidates(&self) -> u64 {
        self.candidates
    }

    pub fn rejections(&self) -> usize {
        self.selected_through_rejection.len()
    }

    /// `tau_j^*` for the `j`-th rejection (1-based).
    pub fn selected_rank(&self, j: usize) -> u64 {
        self.selected_through_rejection[j - 1]
    }

    /// `C_{j+}(t)` for the `j`-th rejection (1-based).
    pub fn candidates_after(&self, j: usize) -> u64 {
        self.candidates - self.candidates_through_rejection[j - 1]
    }

    pub fn record(&mut self, p: f64, rejected: bool) {
        if p <= self.eta {
            self.selected += 1;
            if p <= self.lambda {
                self.candidates += 1;
            }
        }
        if rejected {
            self.candidates_through_rejection.push(self.candidates);
            self.selected_through_rejection.push(self.selected);
        }
    }
}

/// `alpha_t` for the next index; only the counters in `state` matter.
pub fn addis_level(alpha: f64, w0: f64, gamma: &GammaSequence, state: &AddisState) -> f64 {
    let selected = state.selected as i64;
    let mut wealth = w0 * gamma.at(selected - state.candidates as i64);
    for j in 1..=state.rejections() {
        let index = selected - state.selected_rank(j) as i64 - state.candidates_after(j) as i64;
        let reward = if j == 1 { alpha - w0 } else { alpha };
        wealth += reward * gamma.at(index);
    }
    state.lambda.min((state.eta - state.lambda) * wealth)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Addis {
    alpha: f64,
    w0: f64,
    gamma: GammaSequence,
    state: AddisState,
    ledger: WealthLedger,
}

impl Addis {
    /// `gamma` is re-indexed to origin 0.
    pub fn new(alpha: f64, w0: f64, lambda: f64, eta: f64, gamma: GammaSequence) -> Result<Self> {
        Ok(Addis {
            alpha,
            w0,
            gamma: gamma.with_origin(0),
            state: AddisState::new(lambda, eta)?,
            ledger: WealthLedger::new(alpha, w0),
        })
    }

    pub fn state(&self) -> &AddisState {
        &self.state
    }

    pub fn level(&self) -> f64 {
        addis_level(self.alpha, self.w0, &self.gamma, &self.state)
    }

    pub fn observe(&mut self, t: u64, p: f64, alpha_t: f64, rejected: bool) -> Result<()> {
        let AddisState { lambda, eta, .. } = self.state;
        let penalty = if p > lambda && p <= eta {
            alpha_t / (eta - lambda)
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::GammaSpec;

    #[test]
    fn fresh_state_level() {
        let g = GammaSequence::new(&GammaSpec::Power(1.6)).unwrap().with_origin(0);
        let s = AddisState::new(0.25, 0.5).unwrap();
        let a = addis_level(0.05, 0.025, &g, &s);
        assert!((a - 0.25 * 0.025 * g.at(0)).abs() < 1e-18);
    }

    #[test]
    fn discarded_values_are_free() {
        let g = GammaSequence::new(&GammaSpec::Power(1.6)).unwrap().with_origin(0);
        let mut s = AddisState::new(0.25, 0.5).unwrap();
        let before = addis_level(0.05, 0.025, &g, &s);
        s.record(0.9, false);
        s.record(0.7, false);
        assert_eq!(addis_level(0.05, 0.025, &g, &s), before);
        s.record(0.3, false);
        assert!(addis_level(0.05, 0.025, &g, &s) < before);
    }

    #[test]
    fn ranks_count_selected_indices() {
        let mut s = AddisState::new(0.25, 0.5).unwrap();
        s.record(0.9, false);
        s.record(0.4, false);
        s.record(0.001, true);
        s.record(0.8, false);
        s.record(0.1, false);
        assert_eq!(s.selected(), 3);
        assert_eq!(s.selected_rank(1), 2);
        assert_eq!(s.candidates_after(1), 1);
    }

    #[test]
    fn rejects_incoherent_thresholds() {
        assert!(AddisState::new(0.5, 0.5).is_err());
        assert!(AddisState::new(0.6, 0.5).is_err());
        assert!(AddisState::new(0.25, 1.5).is_err());
        assert!(AddisState::new(0.25, 1.0).is_ok());
    }
}
