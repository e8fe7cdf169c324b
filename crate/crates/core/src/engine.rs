//! The decision-engine contract.
//!
//! An [`Engine`] alternates strictly between two calls:
//!
//! 1. [`Engine::next_level`] commits to `alpha_t` using past decisions only;
//! 2. [`Engine::feed`] reveals `P_t` and records `R_t = 1{P_t <= alpha_t}`.
//!
//! Any other interleaving is an [`Error::Contract`]. Indices are 1-based and
//! must arrive contiguously. The comparison is non-strict, so `p == alpha_t`
//! rejects, and `p` may be exactly 0 or 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::procedures::{ProcedureConfig, Rule, WealthLedger};

/// One incoming hypothesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PValueRecord {
    pub t: u64,
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch: Option<u64>,
}

impl PValueRecord {
    pub fn new(t: u64, p: f64) -> Self {
        PValueRecord {
            t,
            p,
            label: None,
            batch: None,
        }
    }

    pub fn labelled(t: u64, p: f64, label: impl Into<String>) -> Self {
        PValueRecord {
            label: Some(label.into()),
            ..PValueRecord::new(t, p)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.t == 0 {
            return Err(Error::Input("indices are 1-based; got t = 0".into()));
        }
        validate_p(self.p)
    }
}

pub(crate) fn validate_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Input(format!("p-value {p} is outside [0, 1]")))
    }
}

/// Outcome of one test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecisionRecord {
    pub t: u64,
    pub alpha: f64,
    pub rejected: bool,
}

/// Rejection history shared by every procedure.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StreamSummary {
    /// Steps processed so far.
    pub t: u64,
    /// `tau_1 < tau_2 < ...`
    pub rejection_times: Vec<u64>,
}

impl StreamSummary {
    pub fn rejections(&self) -> usize {
        self.rejection_times.len()
    }

    /// Builds a summary from an explicit decision vector (index 0 is `t = 1`).
    pub fn from_decisions(decisions: &[bool]) -> Self {
        StreamSummary {
            t: decisions.len() as u64,
            rejection_times: decisions
                .iter()
                .enumerate()
                .filter(|(_, r)| **r)
                .map(|(i, _)| i as u64 + 1)
                .collect(),
        }
    }
}

/// A single online testing stream driven by one procedure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Engine {
    config: ProcedureConfig,
    summary: StreamSummary,
    rule: Rule,
    /// Level handed out by `next_level` and not yet consumed by `feed`.
    pending: Option<f64>,
}

impl Engine {
    /// `make_procedure`: a fresh engine positioned before `t = 1`.
    pub fn new(config: &ProcedureConfig) -> Result<Self> {
        let config = config.resolve()?;
        let rule = Rule::build(&config)?;
        Ok(Engine {
            config,
            summary: StreamSummary::default(),
            rule,
            pending: None,
        })
    }

    /// The fully resolved configuration (defaults and `w0 = auto` filled in).
    pub fn config(&self) -> &ProcedureConfig {
        &self.config
    }

    pub fn summary(&self) -> &StreamSummary {
        &self.summary
    }

    /// Number of hypotheses decided so far.
    pub fn t(&self) -> u64 {
        self.summary.t
    }

    pub fn has_pending_level(&self) -> bool {
        self.pending.is_some()
    }

    /// Current alpha-wealth for procedures that keep a ledger.
    pub fn wealth(&self) -> Option<f64> {
        self.rule.ledger().map(WealthLedger::wealth)
    }

    pub fn ledger(&self) -> Option<&WealthLedger> {
        self.rule.ledger()
    }

    /// Level the next hypothesis would receive, without committing to it.
    pub fn peek_level(&self) -> f64 {
        self.pending
            .unwrap_or_else(|| self.rule.level(self.summary.t + 1, &self.summary))
    }

    /// Commits to `alpha_t` for `t = self.t() + 1`.
    pub fn next_level(&mut self) -> Result<f64> {
        if self.pending.is_some() {
            return Err(Error::Contract(
                "next_level called twice without an intervening feed",
            ));
        }
        let level = self.rule.level(self.summary.t + 1, &self.summary);
        self.pending = Some(level);
        Ok(level)
    }

    /// Reveals the p-value for the outstanding level.
    pub fn feed(&mut self, rec: &PValueRecord) -> Result<DecisionRecord> {
        let alpha = self
            .pending
            .ok_or(Error::Contract("feed called without an outstanding level"))?;
        let expected = self.summary.t + 1;
        if rec.t != expected {
            return Err(Error::Sequence {
                expected,
                got: rec.t,
            });
        }
        validate_p(rec.p)?;
        let rejected = rec.p <= alpha;
        self.rule
            .observe(expected, rec.p, alpha, rejected, &self.summary)?;
        self.summary.t = expected;
        if rejected {
            self.summary.rejection_times.push(expected);
        }
        self.pending = None;
        Ok(DecisionRecord {
            t: expected,
            alpha,
            rejected,
        })
    }

    /// `next_level` followed by `feed` for the next index.
    pub fn test(&mut self, p: f64) -> Result<DecisionRecord> {
        validate_p(p)?;
        self.next_level()?;
        let t = self.summary.t + 1;
        self.feed(&PValueRecord::new(t, p))
    }

    /// Runs a whole sequence of p-values, returning one decision per value.
    pub fn test_all(&mut self, pvalues: &[f64]) -> Result<Vec<DecisionRecord>> {
        pvalues.iter().map(|&p| self.test(p)).collect()
    }
}
