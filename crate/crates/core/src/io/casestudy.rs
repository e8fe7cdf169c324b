//! The STAMPEDE platform-trial case study.
//!
//! Seven treatment arms, processed one at a time in the order they were
//! reported (alphabetical within each batch), at `alpha = 0.05` with an
//! a-priori bound of `M = 20` arms. The published outcome fixes the rejection
//! set of every method and, for the online methods, the level `alpha_8`
//! that the next arm would be tested at.
//!
//! The published levels depend on `w0` and on how the sequence is bounded,
//! neither of which is stated. [`calibrate_w0`] searches a coarse grid and
//! records the result in a manifest; the bundled manifest is what
//! [`StampedeSettings::default`] uses.

use serde::{Deserialize, Serialize};

use crate::engine::{Engine, PValueRecord};
use crate::error::{Error, Result};
use crate::gamma::GammaSpec;
use crate::metrics::bh_offline;
use crate::procedures::{ProcedureConfig, ProcedureName};

use super::ingest::{ingest_csv_reader, ColumnMap};

/// `label,p,batch` for the seven arms.
pub const STAMPEDE_CSV: &str = include_str!("../../fixtures/stampede.csv");

/// Output of [`calibrate_w0`] at `alpha = 0.05`, as shipped.
pub const STAMPEDE_MANIFEST: &str = include_str!("../../fixtures/stampede_manifest.toml");

/// Published rejection sets and `alpha_8`, in table order. `None` means the
/// method has no next level (offline BH).
pub const STAMPEDE_REFERENCE: &[(&str, &[&str], Option<f64>)] = &[
    ("uncorrected", &["C", "E", "G"], Some(0.05)),
    ("alpha-spending", &["G"], Some(0.0025)),
    ("bh", &["C", "G"], None),
    ("addis", &["G"], Some(0.0016)),
    ("saffron", &["C", "G"], Some(0.0165)),
    ("lord", &[], Some(0.0002)),
];

const HORIZON: u64 = 20;
const W0_GRID: [(u32, &str); 3] = [(10, "alpha/10"), (4, "alpha/4"), (2, "alpha/2")];

pub fn stampede_records() -> Vec<PValueRecord> {
    ingest_csv_reader(STAMPEDE_CSV.as_bytes(), &ColumnMap::default())
        .expect("bundled fixture is well-formed")
}

fn reference(method: &str) -> Option<(&'static [&'static str], Option<f64>)> {
    STAMPEDE_REFERENCE
        .iter()
        .find(|(m, _, _)| *m == method)
        .map(|(_, r, l)| (*r, *l))
}

fn labels(records: &[PValueRecord], rejected: impl Iterator<Item = usize>) -> Vec<String> {
    rejected
        .map(|i| records[i].label.clone().unwrap_or_else(|| records[i].t.to_string()))
        .collect()
}

/// Runs `config` over `records`, returning rejected labels and the next level.
fn run_online(config: &ProcedureConfig, records: &[PValueRecord]) -> Result<(Vec<String>, f64)> {
    let mut engine = Engine::new(config)?;
    let mut rejected = Vec::new();
    for (i, rec) in records.iter().enumerate() {
        engine.next_level()?;
        if engine.feed(rec)?.rejected {
            rejected.push(i);
        }
    }
    Ok((labels(records, rejected.into_iter()), engine.peek_level()))
}

fn four_dp(x: f64) -> String {
    format!("{x:.4}")
}

/// One method's line of the case-study table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseStudyRow {
    /// `uncorrected`, `alpha-spending`, `bh`, ...
    pub method: String,
    pub display: String,
    pub rejections: Vec<String>,
    pub next_level: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ProcedureConfig>,
}

impl CaseStudyRow {
    /// Whether this row reproduces the published rejection set.
    pub fn matches_reference_rejections(&self) -> Option<bool> {
        let (set, _) = reference(&self.method)?;
        let mut got: Vec<&str> = self.rejections.iter().map(String::as_str).collect();
        let mut want = set.to_vec();
        got.sort_unstable();
        want.sort_unstable();
        Some(got == want)
    }

    /// Whether `next_level` agrees with the published value to four decimals.
    pub fn matches_reference_level(&self) -> Option<bool> {
        let want = reference(&self.method)?.1?;
        Some(four_dp(self.next_level?) == four_dp(want))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseStudyReport {
    pub alpha: f64,
    pub rows: Vec<CaseStudyRow>,
}

impl CaseStudyReport {
    pub fn row(&self, method: &str) -> Option<&CaseStudyRow> {
        self.rows.iter().find(|r| r.method == method)
    }
}

/// Per-procedure configurations for the case study.
#[derive(Debug, Clone, PartialEq)]
pub struct StampedeSettings {
    pub alpha: f64,
    pub procedures: Vec<ProcedureConfig>,
}

impl Default for StampedeSettings {
    /// The calibrated settings from the bundled manifest.
    fn default() -> Self {
        CalibrationManifest::from_toml(STAMPEDE_MANIFEST)
            .expect("bundled manifest parses")
            .settings()
    }
}

impl StampedeSettings {
    /// Every procedure with `gamma_t = 1/M` up to `M` and default `w0`.
    pub fn bounded(alpha: f64, horizon: u64) -> Self {
        use ProcedureName::*;
        let procedures = [Uncorrected, AlphaSpending, Addis, Saffron, Lord]
            .into_iter()
            .map(|name| {
                let cfg = ProcedureConfig::new(name, alpha);
                if name == Uncorrected {
                    cfg
                } else {
                    cfg.with_gamma(GammaSpec::Bounded(horizon))
                }
            })
            .collect();
        StampedeSettings { alpha, procedures }
    }
}

/// Runs every configured procedure plus offline BH over the seven arms.
/// Rows follow the published table order; extra procedures are appended.
pub fn run_stampede(settings: &StampedeSettings) -> Result<CaseStudyReport> {
    let records = stampede_records();
    let mut rows = Vec::new();
    let push_online = |cfg: &ProcedureConfig, rows: &mut Vec<CaseStudyRow>| -> Result<()> {
        let resolved = cfg.resolve()?;
        let (rejections, level) = run_online(&resolved, &records)?;
        rows.push(CaseStudyRow {
            method: resolved.procedure.as_str().to_string(),
            display: resolved.procedure.display_name().to_string(),
            rejections,
            next_level: Some(level),
            config: Some(resolved),
        });
        Ok(())
    };
    for (method, _, _) in STAMPEDE_REFERENCE {
        if *method == "bh" {
            let p: Vec<f64> = records.iter().map(|r| r.p).collect();
            rows.push(CaseStudyRow {
                method: "bh".into(),
                display: "BH".into(),
                rejections: labels(&records, bh_offline(&p, settings.alpha).into_iter()),
                next_level: None,
                config: None,
            });
            continue;
        }
        if let Some(cfg) = settings
            .procedures
            .iter()
            .find(|c| c.procedure.as_str() == *method)
        {
            push_online(cfg, &mut rows)?;
        }
    }
    for cfg in &settings.procedures {
        if reference(cfg.procedure.as_str()).is_none() {
            push_online(cfg, &mut rows)?;
        }
    }
    Ok(CaseStudyReport {
        alpha: settings.alpha,
        rows,
    })
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationPoint {
    pub procedure: ProcedureName,
    /// `alpha/10`, `alpha/4`, `alpha/2`, or `fixed` where `w0` is not a free
    /// parameter.
    pub w0_rule: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<GammaSpec>,
    pub rejections: Vec<String>,
    pub next_level: f64,
    pub rejections_match: bool,
    pub level_match: bool,
}

impl CalibrationPoint {
    fn config(&self, alpha: f64) -> ProcedureConfig {
        let mut cfg = ProcedureConfig::new(self.procedure, alpha);
        if let Some(w0) = self.w0 {
            cfg = cfg.with_w0(w0);
        }
        if let Some(g) = &self.gamma {
            cfg = cfg.with_gamma(g.clone());
        }
        cfg
    }

    fn shape(&self) -> (&str, Option<&str>) {
        let kind = match &self.gamma {
            Some(GammaSpec::Bounded(_)) => Some("bounded"),
            Some(GammaSpec::Truncated { .. }) => Some("truncated"),
            _ => None,
        };
        (self.w0_rule.as_str(), kind)
    }
}

/// The chosen grid point for one procedure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcedureCalibration {
    pub procedure: ProcedureName,
    pub w0_rule: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<GammaSpec>,
    pub rejections: Vec<String>,
    pub expected_rejections: Vec<String>,
    pub next_level: f64,
    pub expected_next_level: f64,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationManifest {
    pub alpha: f64,
    pub horizon: u64,
    /// A single `(w0 rule, sequence kind)` shared by every procedure that
    /// reproduces all published values, if one exists.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joint_match: Option<String>,
    pub procedures: Vec<ProcedureCalibration>,
    pub grid: Vec<CalibrationPoint>,
}

impl CalibrationManifest {
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Input(format!("manifest serialisation: {e}")))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Input(format!("manifest: {e}")))
    }

    pub fn settings(&self) -> StampedeSettings {
        StampedeSettings {
            alpha: self.alpha,
            procedures: self
                .procedures
                .iter()
                .map(|p| {
                    let point = CalibrationPoint {
                        procedure: p.procedure,
                        w0_rule: p.w0_rule.clone(),
                        w0: p.w0,
                        gamma: p.gamma.clone(),
                        rejections: Vec::new(),
                        next_level: 0.0,
                        rejections_match: false,
                        level_match: false,
                    };
                    point.config(self.alpha)
                })
                .collect(),
        }
    }

    pub fn all_matched(&self) -> bool {
        self.procedures.iter().all(|p| p.matched)
    }
}

fn default_base(name: ProcedureName) -> GammaSpec {
    match name {
        ProcedureName::Saffron | ProcedureName::Addis => GammaSpec::Power(1.6),
        _ => GammaSpec::LordDefault,
    }
}

/// Grid search over `w0 ∈ {alpha/10, alpha/4, alpha/2}` and two ways of
/// bounding the sequence at `M = 20`: constant `1/M`, or the procedure's
/// default sequence truncated at `M` and renormalised.
///
/// Each procedure gets the first grid point (in grid order) that reproduces
/// both its published rejection set and `alpha_8` to four decimals, or
/// failing that the point with the matching rejection set and the smallest
/// level error.
pub fn calibrate_w0(alpha: f64) -> Result<CalibrationManifest> {
    use ProcedureName::*;
    let records = stampede_records();
    let mut grid = Vec::new();
    let mut procedures = Vec::new();
    for name in [Uncorrected, AlphaSpending, Addis, Saffron, Lord] {
        let (want_set, want_level) = reference(name.as_str()).expect("reference row");
        let want_level = want_level.expect("online methods have a level");
        let gammas: Vec<Option<GammaSpec>> = if name == Uncorrected {
            vec![None]
        } else {
            vec![
                Some(GammaSpec::Bounded(HORIZON)),
                Some(GammaSpec::Truncated {
                    horizon: HORIZON,
                    base: Box::new(default_base(name)),
                }),
            ]
        };
        let w0s: Vec<(Option<f64>, &str)> = if matches!(name, Uncorrected | AlphaSpending) {
            vec![(None, "fixed")]
        } else {
            W0_GRID
                .iter()
                .map(|&(d, rule)| (Some(alpha / d as f64), rule))
                .collect()
        };
        let mut points = Vec::new();
        for gamma in &gammas {
            for &(w0, rule) in &w0s {
                let mut point = CalibrationPoint {
                    procedure: name,
                    w0_rule: rule.to_string(),
                    w0,
                    gamma: gamma.clone(),
                    rejections: Vec::new(),
                    next_level: 0.0,
                    rejections_match: false,
                    level_match: false,
                };
                let (rejections, level) = run_online(&point.config(alpha), &records)?;
                let mut got: Vec<&str> = rejections.iter().map(String::as_str).collect();
                got.sort_unstable();
                point.rejections_match = got == want_set;
                point.level_match = four_dp(level) == four_dp(want_level);
                point.rejections = rejections;
                point.next_level = level;
                points.push(point);
            }
        }
        let best = points
            .iter()
            .find(|p| p.rejections_match && p.level_match)
            .or_else(|| {
                points.iter().min_by(|a, b| {
                    let key = |p: &CalibrationPoint| {
                        (!p.rejections_match, (p.next_level - want_level).abs())
                    };
                    key(a).partial_cmp(&key(b)).expect("finite levels")
                })
            })
            .expect("grid is non-empty");
        procedures.push(ProcedureCalibration {
            procedure: name,
            w0_rule: best.w0_rule.clone(),
            w0: best.w0,
            gamma: best.gamma.clone(),
            rejections: best.rejections.clone(),
            expected_rejections: want_set.iter().map(|s| s.to_string()).collect(),
            next_level: best.next_level,
            expected_next_level: want_level,
            matched: best.rejections_match && best.level_match,
        });
        grid.extend(points);
    }

    // A shared point must fix the same w0 rule and sequence kind for every
    // procedure that has them.
    let mut joint_match = None;
    'outer: for (_, rule) in W0_GRID {
        for kind in ["bounded", "truncated"] {
            let ok = [AlphaSpending, Addis, Saffron, Lord].iter().all(|&name| {
                grid.iter().any(|p| {
                    let (r, k) = p.shape();
                    p.procedure == name
                        && (r == rule || r == "fixed")
                        && k == Some(kind)
                        && p.rejections_match
                        && p.level_match
                })
            });
            if ok {
                joint_match = Some(format!("w0 = {rule}, {kind} sequence"));
                break 'outer;
            }
        }
    }
    Ok(CalibrationManifest {
        alpha,
        horizon: HORIZON,
        joint_match,
        procedures,
        grid,
    })
}
