//! Monte Carlo lab for the Gaussian-means testing problem.
//!
//! Each replicate draws `T` means `mu_t` from the mixture
//! `(1 - pi1) * F0 + pi1 * F1`, observes `Z_t ~ N(mu_t, 1)` and tests
//! `H_t: mu_t <= 0` with the one-sided p-value `P_t = Φ(-Z_t)`. With
//! `F0 = N(-0.5, 0.1)` the null p-values are conservative, which is where
//! ADDIS gains over SAFFRON.
//!
//! Randomness is a ChaCha8 stream keyed by `(seed, replicate_id)`: the seed
//! selects the key and the replicate id selects the stream, so replicates are
//! independent, reproducible and can run in any order. Aggregation is a
//! sequential fold in replicate order, so results do not depend on the
//! number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::metrics::{aggregate, bh_decisions, score_stream, AggregateMetrics, GroundTruth, MetricsReport};
use crate::procedures::{ProcedureConfig, ProcedureName};

/// `Φ(-z)`, the upper tail of the standard normal.
pub fn normal_upper_tail(z: f64) -> f64 {
    (0.5 * libm::erfc(z / std::f64::consts::SQRT_2)).clamp(0.0, 1.0)
}

/// Distribution of the means `mu_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MeanDistribution {
    PointMass { value: f64 },
    Normal { mean: f64, sd: f64 },
}

impl MeanDistribution {
    fn sample(&self, rng: &mut impl Rng) -> f64 {
        match *self {
            MeanDistribution::PointMass { value } => value,
            MeanDistribution::Normal { mean, sd } => {
                let z: f64 = rng.sample(StandardNormal);
                mean + sd * z
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            MeanDistribution::Normal { sd, .. } if !(sd >= 0.0) => Err(Error::Parameter(format!(
                "standard deviation must be non-negative, got {sd}"
            ))),
            _ => Ok(()),
        }
    }
}

/// One method in an experiment: an online procedure or offline BH.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RosterEntry {
    /// A bare name such as `"lord"` or `"bh"`; defaults at the experiment's alpha.
    Name(String),
    Config(ProcedureConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    Online(ProcedureConfig),
    BenjaminiHochberg { alpha: f64 },
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::Online(cfg) => cfg.procedure.as_str(),
            Method::BenjaminiHochberg { .. } => "bh",
        }
    }
}

impl RosterEntry {
    pub fn resolve(&self, alpha: f64) -> Result<Method> {
        match self {
            RosterEntry::Name(name) if name.eq_ignore_ascii_case("bh") => {
                Ok(Method::BenjaminiHochberg { alpha })
            }
            RosterEntry::Name(name) => {
                let procedure: ProcedureName = name.parse()?;
                Ok(Method::Online(ProcedureConfig::new(procedure, alpha).resolve()?))
            }
            RosterEntry::Config(cfg) => Ok(Method::Online(cfg.resolve()?)),
        }
    }
}

fn default_roster() -> Vec<RosterEntry> {
    ["uncorrected", "alpha-spending", "lord", "saffron", "addis", "bh"]
        .into_iter()
        .map(|s| RosterEntry::Name(s.to_string()))
        .collect()
}

/// One simulation cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    /// Stream length `T`.
    pub horizon: usize,
    /// Probability that `mu_t` is drawn from `F1`.
    pub pi1: f64,
    pub f0: MeanDistribution,
    pub f1: MeanDistribution,
    pub alpha: f64,
    pub seed: u64,
    pub replicates: usize,
    pub roster: Vec<RosterEntry>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            horizon: 1000,
            pi1: 0.1,
            f0: MeanDistribution::Normal {
                mean: -0.5,
                sd: 0.1,
            },
            f1: MeanDistribution::Normal { mean: 3.0, sd: 1.0 },
            alpha: 0.05,
            seed: 20_230_101,
            replicates: 2000,
            roster: default_roster(),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.pi1) {
            return Err(Error::Parameter(format!(
                "pi1 must lie in [0, 1], got {}",
                self.pi1
            )));
        }
        if self.replicates == 0 {
            return Err(Error::Parameter("replicates must be at least 1".into()));
        }
        self.f0.validate()?;
        self.f1.validate()
    }

    pub fn methods(&self) -> Result<Vec<Method>> {
        if self.roster.is_empty() {
            return Err(Error::Parameter("procedure roster is empty".into()));
        }
        self.roster.iter().map(|e| e.resolve(self.alpha)).collect()
    }
}

/// One generated stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamSample {
    pub z: Vec<f64>,
    pub p: Vec<f64>,
    pub truth: GroundTruth,
}

impl StreamSample {
    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }
}

fn replicate_rng(seed: u64, replicate_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate_id);
    rng
}

pub fn gaussian_stream(cfg: &SimConfig, replicate_id: u64) -> StreamSample {
    let mut rng = replicate_rng(cfg.seed, replicate_id);
    let n = cfg.horizon;
    let mut z = Vec::with_capacity(n);
    let mut p = Vec::with_capacity(n);
    let mut is_null = Vec::with_capacity(n);
    for _ in 0..n {
        let non_null = rng.random::<f64>() < cfg.pi1;
        let mu = if non_null {
            cfg.f1.sample(&mut rng)
        } else {
            cfg.f0.sample(&mut rng)
        };
        let noise: f64 = rng.sample(StandardNormal);
        let zt = mu + noise;
        z.push(zt);
        p.push(normal_upper_tail(zt));
        is_null.push(!non_null);
    }
    StreamSample {
        z,
        p,
        truth: GroundTruth::new(is_null),
    }
}

/// Decisions and levels of one method on one stream.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodOutcome {
    pub decisions: Vec<bool>,
    /// `alpha_t` per step; empty for offline BH.
    pub levels: Vec<f64>,
}

/// Engines prepared once per experiment and cloned per replicate.
enum Prepared {
    Online(Engine),
    Bh(f64),
}

fn prepare(methods: &[Method]) -> Result<Vec<Prepared>> {
    methods
        .iter()
        .map(|m| match m {
            Method::Online(cfg) => Engine::new(cfg).map(Prepared::Online),
            Method::BenjaminiHochberg { alpha } => Ok(Prepared::Bh(*alpha)),
        })
        .collect()
}

fn run_prepared(prepared: &[Prepared], pvalues: &[f64]) -> Result<Vec<MethodOutcome>> {
    prepared
        .iter()
        .map(|m| match m {
            Prepared::Online(proto) => {
                let mut engine = proto.clone();
                let mut decisions = Vec::with_capacity(pvalues.len());
                let mut levels = Vec::with_capacity(pvalues.len());
                for &p in pvalues {
                    let d = engine.test(p)?;
                    decisions.push(d.rejected);
                    levels.push(d.alpha);
                }
                Ok(MethodOutcome { decisions, levels })
            }
            Prepared::Bh(alpha) => Ok(MethodOutcome {
                decisions: bh_decisions(pvalues, *alpha),
                levels: Vec::new(),
            }),
        })
        .collect()
}

/// Runs every method on the same p-value sequence.
pub fn run_methods(methods: &[Method], pvalues: &[f64]) -> Result<Vec<MethodOutcome>> {
    run_prepared(&prepare(methods)?, pvalues)
}

/// A grid of simulation cells sharing everything but `pi1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentGrid {
    #[serde(flatten)]
    pub base: SimConfig,
    pub pi1_grid: Vec<f64>,
    /// Threshold for FDX.
    pub epsilon: f64,
    /// Average `alpha_t` trajectories per method.
    pub record_levels: bool,
}

impl Default for ExperimentGrid {
    fn default() -> Self {
        ExperimentGrid {
            base: SimConfig::default(),
            pi1_grid: vec![0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
            epsilon: 0.1,
            record_levels: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub pi1: f64,
    pub method: String,
    pub metrics: AggregateMetrics,
    /// Mean `alpha_t` per step across replicates, when recorded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_levels: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentTable {
    pub rows: Vec<ExperimentRow>,
}

impl ExperimentTable {
    pub fn get(&self, pi1: f64, method: &str) -> Option<&ExperimentRow> {
        self.rows
            .iter()
            .find(|r| r.method == method && (r.pi1 - pi1).abs() < 1e-12)
    }

    pub fn methods(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.method.as_str()) {
                out.push(&r.method);
            }
        }
        out
    }
}

/// Replicates are dispatched to the thread pool in blocks of this size and
/// folded in order.
const BLOCK: usize = 128;

/// Runs one cell, returning per-method reports and optional summed levels.
fn run_cell(
    cfg: &SimConfig,
    prepared: &[Prepared],
    record_levels: bool,
) -> Result<(Vec<Vec<MetricsReport>>, Vec<Vec<f64>>)> {
    let k = prepared.len();
    let mut reports: Vec<Vec<MetricsReport>> = vec![Vec::with_capacity(cfg.replicates); k];
    let mut level_sums: Vec<Vec<f64>> = vec![
        if record_levels {
            vec![0.0; cfg.horizon]
        } else {
            Vec::new()
        };
        k
    ];
    let mut start = 0usize;
    while start < cfg.replicates {
        let end = (start + BLOCK).min(cfg.replicates);
        let block: Vec<Result<(Vec<MetricsReport>, Vec<Vec<f64>>)>> = (start..end)
            .into_par_iter()
            .map(|rep| {
                let sample = gaussian_stream(cfg, rep as u64);
                let outcomes = run_prepared(prepared, &sample.p)?;
                let mut scored = Vec::with_capacity(k);
                let mut levels = Vec::with_capacity(k);
                for o in outcomes {
                    scored.push(score_stream(&o.decisions, &sample.truth)?);
                    levels.push(if record_levels { o.levels } else { Vec::new() });
                }
                Ok((scored, levels))
            })
            .collect();
        for result in block {
            let (scored, levels) = result?;
            for (i, (report, lv)) in scored.into_iter().zip(levels).enumerate() {
                reports[i].push(report);
                for (acc, a) in level_sums[i].iter_mut().zip(lv) {
                    *acc += a;
                }
            }
        }
        start = end;
    }
    Ok((reports, level_sums))
}

pub fn run_experiment(grid: &ExperimentGrid) -> Result<ExperimentTable> {
    grid.base.validate()?;
    let methods = grid.base.methods()?;
    let prepared = prepare(&methods)?;
    let mut table = ExperimentTable::default();
    for &pi1 in &grid.pi1_grid {
        let cfg = SimConfig {
            pi1,
            ..grid.base.clone()
        };
        cfg.validate()?;
        let (reports, level_sums) = run_cell(&cfg, &prepared, grid.record_levels)?;
        for ((method, reps), sums) in methods.iter().zip(reports).zip(level_sums) {
            let online = matches!(method, Method::Online(_));
            let mean_levels = (grid.record_levels && online).then(|| {
                sums.iter()
                    .map(|s| s / cfg.replicates as f64)
                    .collect::<Vec<_>>()
            });
            table.rows.push(ExperimentRow {
                pi1,
                method: method.label().to_string(),
                metrics: aggregate(&reps, grid.epsilon)?,
                mean_levels,
            });
        }
    }
    Ok(table)
}

/// Stream orderings for the side-information scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ordering {
    /// Non-nulls first, strongest (smallest p) first.
    Favourable,
    /// Non-nulls last, strongest last.
    Adversarial,
    /// Uniform random permutation.
    Shuffled,
}

pub fn ordering_scenario(sample: &StreamSample, mode: Ordering, seed: u64) -> StreamSample {
    let n = sample.len();
    let mut order: Vec<usize> = (0..n).collect();
    let by_p = |a: &usize, b: &usize| sample.p[*a].total_cmp(&sample.p[*b]);
    match mode {
        Ordering::Favourable | Ordering::Adversarial => {
            let (mut alt, null): (Vec<usize>, Vec<usize>) =
                order.into_iter().partition(|&i| !sample.truth.is_null[i]);
            alt.sort_by(by_p);
            order = if mode == Ordering::Favourable {
                alt.into_iter().chain(null).collect()
            } else {
                alt.reverse();
                null.into_iter().chain(alt).collect()
            };
        }
        Ordering::Shuffled => {
            use rand::seq::SliceRandom;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            order.shuffle(&mut rng);
        }
    }
    StreamSample {
        z: order.iter().map(|&i| sample.z[i]).collect(),
        p: order.iter().map(|&i| sample.p[i]).collect(),
        truth: GroundTruth::new(order.iter().map(|&i| sample.truth.is_null[i]).collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(pi1: f64) -> SimConfig {
        SimConfig {
            horizon: 200,
            pi1,
            replicates: 20,
            ..SimConfig::default()
        }
    }

    #[test]
    fn upper_tail_relative_accuracy() {
        // 40-digit reference values.
        let cases = [
            (-5.0, 0.999_999_713_348_428_120_81),
            (-1.0, 0.841_344_746_068_542_948_59),
            (0.0, 0.5),
            (0.5, 0.308_537_538_725_986_896_36),
            (1.959_963_984_540_054, 0.025_000_000_000_000_010_876),
            (3.0, 0.001_349_898_031_630_094_526_7),
            (5.0, 2.866_515_718_791_939_116_7e-7),
            (8.0, 6.220_960_574_271_784_123_5e-16),
            (12.0, 1.776_482_112_077_678_997_7e-33),
            (20.0, 2.753_624_118_606_233_695_1e-89),
            (30.0, 4.906_713_927_148_187_059_5e-198),
        ];
        for (z, expected) in cases {
            let v = normal_upper_tail(z);
            assert!(((v - expected) / expected).abs() < 1e-12, "z={z}: {v:e} vs {expected:e}");
        }
        assert_eq!(normal_upper_tail(f64::INFINITY), 0.0);
        assert_eq!(normal_upper_tail(f64::NEG_INFINITY), 1.0);
    }

    #[test]
    fn reproducible_per_replicate() {
        let cfg = tiny(0.3);
        assert_eq!(gaussian_stream(&cfg, 7), gaussian_stream(&cfg, 7));
        assert_ne!(gaussian_stream(&cfg, 7), gaussian_stream(&cfg, 8));
    }

    #[test]
    fn no_non_nulls_when_pi1_is_zero() {
        let s = gaussian_stream(&tiny(0.0), 0);
        assert!(s.truth.is_null.iter().all(|n| *n));
        let s = gaussian_stream(&tiny(1.0), 0);
        assert!(s.truth.is_null.iter().all(|n| !*n));
    }

    #[test]
    fn p_values_in_unit_interval() {
        let s = gaussian_stream(&tiny(0.5), 3);
        assert!(s.p.iter().all(|p| (0.0..=1.0).contains(p)));
    }

    #[test]
    fn favourable_and_adversarial_orders() {
        let sample = StreamSample {
            z: vec![-0.8, 3.1],
            p: vec![0.8, 0.001],
            truth: GroundTruth::new(vec![true, false]),
        };
        let fav = ordering_scenario(&sample, Ordering::Favourable, 0);
        assert_eq!(fav.p, vec![0.001, 0.8]);
        assert_eq!(fav.truth.is_null, vec![false, true]);
        let adv = ordering_scenario(&sample, Ordering::Adversarial, 0);
        assert_eq!(adv.p, vec![0.8, 0.001]);
    }

    #[test]
    fn shuffle_is_a_joint_permutation() {
        let s = gaussian_stream(&tiny(0.4), 1);
        let sh = ordering_scenario(&s, Ordering::Shuffled, 99);
        let mut a: Vec<(u64, bool)> = s.p.iter().map(|p| p.to_bits()).zip(s.truth.is_null.clone()).collect();
        let mut b: Vec<(u64, bool)> = sh.p.iter().map(|p| p.to_bits()).zip(sh.truth.is_null.clone()).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        assert_eq!(sh, ordering_scenario(&s, Ordering::Shuffled, 99));
    }

    #[test]
    fn power_is_zero_without_non_nulls() {
        let grid = ExperimentGrid {
            base: tiny(0.0),
            pi1_grid: vec![0.0],
            ..ExperimentGrid::default()
        };
        let table = run_experiment(&grid).unwrap();
        assert!(table.rows.iter().all(|r| r.metrics.power == 0.0));
    }

    #[test]
    fn empty_roster_is_an_error() {
        let mut cfg = tiny(0.1);
        cfg.roster.clear();
        assert!(cfg.methods().is_err());
        let grid = ExperimentGrid {
            base: cfg,
            ..ExperimentGrid::default()
        };
        assert!(run_experiment(&grid).is_err());
    }

    #[test]
    fn records_mean_levels() {
        let grid = ExperimentGrid {
            base: tiny(0.5),
            pi1_grid: vec![0.5],
            record_levels: true,
            ..ExperimentGrid::default()
        };
        let table = run_experiment(&grid).unwrap();
        let unc = table.get(0.5, "uncorrected").unwrap();
        let levels = unc.mean_levels.as_ref().unwrap();
        assert_eq!(levels.len(), 200);
        assert!(levels.iter().all(|a| (a - 0.05).abs() < 1e-15));
        assert!(table.get(0.5, "bh").unwrap().mean_levels.is_none());
    }

    #[test]
    fn roster_from_toml() {
        let grid: ExperimentGrid = toml::from_str(
            r#"
            horizon = 300
            replicates = 10
            pi1_grid = [0.5]
            roster = ["lord", "bh", { procedure = "saffron", alpha = 0.05, lambda = 0.4 }]
            f0 = { kind = "point-mass", value = 0.0 }
            "#,
        )
        .unwrap();
        assert_eq!(grid.base.horizon, 300);
        assert_eq!(grid.base.f0, MeanDistribution::PointMass { value: 0.0 });
        let methods = grid.base.methods().unwrap();
        assert_eq!(methods.len(), 3);
        assert_eq!(methods[1], Method::BenjaminiHochberg { alpha: 0.05 });
        match &methods[2] {
            Method::Online(cfg) => assert_eq!(cfg.lambda, Some(0.4)),
            _ => panic!("expected an online method"),
        }
    }
}
