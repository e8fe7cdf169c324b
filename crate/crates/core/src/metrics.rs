//! Realised error rates, power, and the offline Benjamini–Hochberg comparator.
//!
//! For one stream of length `T` with `V(T)` false and `R(T)` total rejections:
//!
//! ```text
//! FDP(T)    = V(T) / (R(T) ∨ 1)
//! FDR(T)    = E[FDP(T)]
//! mFDR(T)   = E[V(T)] / E[R(T) ∨ 1]
//! FDX_ε(T)  = Pr[ sup_{t<=T} FDP(t) >= ε ]
//! FWER(T)   = Pr[ V(T) >= 1 ]
//! power     = E[ #true rejections / (#non-nulls ∨ 1) ]
//! ```
//!
//! Expectations are Monte Carlo averages over replicates in [`aggregate`].

use serde::{Deserialize, Serialize};

use crate::engine::DecisionRecord;
use crate::error::{Error, Result};

/// Null/non-null label per index.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub is_null: Vec<bool>,
}

impl GroundTruth {
    pub fn new(is_null: Vec<bool>) -> Self {
        GroundTruth { is_null }
    }

    pub fn len(&self) -> usize {
        self.is_null.len()
    }

    pub fn is_empty(&self) -> bool {
        self.is_null.is_empty()
    }

    pub fn non_nulls(&self) -> usize {
        self.is_null.iter().filter(|n| !**n).count()
    }
}

/// Single-replicate scores.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// `V(T)`
    pub false_rejections: usize,
    /// `R(T)`
    pub rejections: usize,
    pub true_rejections: usize,
    pub non_nulls: usize,
    /// `FDP(T)`
    pub fdp: f64,
    /// `sup_{t<=T} FDP(t)`
    pub sup_fdp: f64,
    /// True rejections over `non_nulls ∨ 1`.
    pub power: f64,
}

pub fn score_stream(decisions: &[bool], truth: &GroundTruth) -> Result<MetricsReport> {
    if decisions.len() != truth.len() {
        return Err(Error::LengthMismatch {
            decisions: decisions.len(),
            truth: truth.len(),
        });
    }
    let mut v = 0usize;
    let mut r = 0usize;
    let mut sup_fdp = 0.0f64;
    for (&rejected, &is_null) in decisions.iter().zip(&truth.is_null) {
        if rejected {
            r += 1;
            if is_null {
                v += 1;
            }
            // FDP only moves on rejections.
            sup_fdp = sup_fdp.max(v as f64 / r as f64);
        }
    }
    let non_nulls = truth.non_nulls();
    let true_rejections = r - v;
    Ok(MetricsReport {
        false_rejections: v,
        rejections: r,
        true_rejections,
        non_nulls,
        fdp: v as f64 / r.max(1) as f64,
        sup_fdp,
        power: true_rejections as f64 / non_nulls.max(1) as f64,
    })
}

pub fn score_decisions(decisions: &[DecisionRecord], truth: &GroundTruth) -> Result<MetricsReport> {
    let flags: Vec<bool> = decisions.iter().map(|d| d.rejected).collect();
    score_stream(&flags, truth)
}

/// Monte Carlo estimates across replicates, each with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateMetrics {
    pub replicates: usize,
    pub epsilon: f64,
    pub fdr: f64,
    pub fdr_se: f64,
    pub mfdr: f64,
    pub fdx: f64,
    pub fdx_se: f64,
    pub fwer: f64,
    pub fwer_se: f64,
    pub power: f64,
    pub power_se: f64,
    pub mean_rejections: f64,
    pub mean_rejections_se: f64,
}

/// Mean and standard error of the mean.
pub(crate) fn mean_se(values: impl ExactSizeIterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

pub fn aggregate(reports: &[MetricsReport], epsilon: f64) -> Result<AggregateMetrics> {
    if reports.is_empty() {
        return Err(Error::EmptyAggregate);
    }
    let n = reports.len() as f64;
    let indicator = |b: bool| if b { 1.0 } else { 0.0 };
    let (fdr, fdr_se) = mean_se(reports.iter().map(|r| r.fdp));
    let (fdx, fdx_se) = mean_se(reports.iter().map(|r| indicator(r.sup_fdp >= epsilon)));
    let (fwer, fwer_se) = mean_se(reports.iter().map(|r| indicator(r.false_rejections >= 1)));
    let (power, power_se) = mean_se(reports.iter().map(|r| r.power));
    let (mean_rejections, mean_rejections_se) =
        mean_se(reports.iter().map(|r| r.rejections as f64));
    let mean_v = reports.iter().map(|r| r.false_rejections as f64).sum::<f64>() / n;
    let mean_r1 = reports.iter().map(|r| r.rejections.max(1) as f64).sum::<f64>() / n;
    Ok(AggregateMetrics {
        replicates: reports.len(),
        epsilon,
        fdr,
        fdr_se,
        mfdr: mean_v / mean_r1,
        fdx,
        fdx_se,
        fwer,
        fwer_se,
        power,
        power_se,
        mean_rejections,
        mean_rejections_se,
    })
}

/// Benjamini–Hochberg step-up at level `alpha`.
///
/// Finds the largest `k` with `p_(k) <= k * alpha / n` and rejects every
/// hypothesis with `p <= p_(k)`. Returns the rejected positions in
/// ascending order.
pub fn bh_offline(pvalues: &[f64], alpha: f64) -> Vec<usize> {
    let n = pvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| pvalues[a].total_cmp(&pvalues[b]));
    let cutoff = (1..=n)
        .rev()
        .find(|&k| pvalues[order[k - 1]] <= k as f64 * alpha / n as f64);
    match cutoff {
        None => Vec::new(),
        Some(k) => {
            let threshold = pvalues[order[k - 1]];
            (0..n).filter(|&i| pvalues[i] <= threshold).collect()
        }
    }
}

/// Rejection flags for [`bh_offline`].
pub fn bh_decisions(pvalues: &[f64], alpha: f64) -> Vec<bool> {
    let mut flags = vec![false; pvalues.len()];
    for i in bh_offline(pvalues, alpha) {
        flags[i] = true;
    }
    flags
}
