//! Level-assignment rules and their configuration.
//!
//! Defaults when a parameter is left unset:
//!
//! | procedure        | gamma          | w0      | other                    |
//! |------------------|----------------|---------|--------------------------|
//! | `uncorrected`    | –              | –       |                          |
//! | `alpha-spending` | `lord-default` | `alpha` | (total budget)           |
//! | `gai++`          | –              | `α/2`   | `spend = 0.1`            |
//! | `lord`           | `lord-default` | `α/10`  |                          |
//! | `saffron`        | `power:1.6`    | `α/2`   | `lambda = 0.5`           |
//! | `addis`          | `power:1.6`    | `α/2`   | `lambda = 0.25, eta = 0.5`, gamma from index 0 |

mod addis;
mod investing;
mod ledger;
mod lord;
mod saffron;
mod spending;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use addis::{addis_level, Addis, AddisState};
pub use investing::AlphaInvesting;
pub use ledger::{gai_step, LedgerEntry, WealthLedger, LEDGER_TAIL};
pub use lord::{lord_level, Lord};
pub use saffron::{saffron_level, Saffron, SaffronState};
pub use spending::{alpha_spending_level, AlphaSpending};

use crate::engine::StreamSummary;
use crate::error::{Error, Result};
use crate::gamma::{GammaSequence, GammaSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProcedureName {
    Uncorrected,
    AlphaSpending,
    GaiPlusPlus,
    Lord,
    Saffron,
    Addis,
}

impl ProcedureName {
    pub const ALL: [ProcedureName; 6] = [
        ProcedureName::Uncorrected,
        ProcedureName::AlphaSpending,
        ProcedureName::GaiPlusPlus,
        ProcedureName::Lord,
        ProcedureName::Saffron,
        ProcedureName::Addis,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProcedureName::Uncorrected => "uncorrected",
            ProcedureName::AlphaSpending => "alpha-spending",
            ProcedureName::GaiPlusPlus => "gai++",
            ProcedureName::Lord => "lord",
            ProcedureName::Saffron => "saffron",
            ProcedureName::Addis => "addis",
        }
    }

    /// Human-readable label used in summary tables.
    pub fn display_name(self) -> &'static str {
        match self {
            ProcedureName::Uncorrected => "Uncorrected",
            ProcedureName::AlphaSpending => "Alpha-spending",
            ProcedureName::GaiPlusPlus => "GAI++",
            ProcedureName::Lord => "LORD",
            ProcedureName::Saffron => "SAFFRON",
            ProcedureName::Addis => "ADDIS",
        }
    }
}

impl fmt::Display for ProcedureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProcedureName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uncorrected" => Ok(ProcedureName::Uncorrected),
            "alpha-spending" | "alpha_spending" | "bonferroni" => Ok(ProcedureName::AlphaSpending),
            "gai++" | "gai" | "alpha-investing" => Ok(ProcedureName::GaiPlusPlus),
            "lord" | "lord++" => Ok(ProcedureName::Lord),
            "saffron" => Ok(ProcedureName::Saffron),
            "addis" => Ok(ProcedureName::Addis),
            _ => Err(Error::UnknownProcedure(s.to_string())),
        }
    }
}

impl Serialize for ProcedureName {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for ProcedureName {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Initial wealth: either an explicit value or the per-procedure default.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum W0 {
    #[default]
    Auto,
    Value(f64),
}

impl FromStr for W0 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("auto") {
            return Ok(W0::Auto);
        }
        s.parse()
            .map(W0::Value)
            .map_err(|_| Error::Parameter(format!("w0 must be `auto` or a number, got `{s}`")))
    }
}

impl Serialize for W0 {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            W0::Auto => serializer.serialize_str("auto"),
            W0::Value(v) => serializer.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for W0 {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Number(f64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Number(v) => Ok(W0::Value(v)),
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Procedure name plus parameters, e.g.
/// `procedure = "addis", alpha = 0.05, w0 = "auto", lambda = 0.25, eta = 0.5, gamma = "bounded:20"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcedureConfig {
    pub procedure: ProcedureName,
    pub alpha: f64,
    #[serde(default)]
    pub w0: W0,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<GammaSpec>,
    /// Fraction of current wealth risked per test by `gai++`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spend: Option<f64>,
}

impl ProcedureConfig {
    pub fn new(procedure: ProcedureName, alpha: f64) -> Self {
        ProcedureConfig {
            procedure,
            alpha,
            w0: W0::Auto,
            lambda: None,
            eta: None,
            gamma: None,
            spend: None,
        }
    }

    pub fn with_w0(mut self, w0: f64) -> Self {
        self.w0 = W0::Value(w0);
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = Some(eta);
        self
    }

    pub fn with_gamma(mut self, gamma: GammaSpec) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn with_spend(mut self, spend: f64) -> Self {
        self.spend = Some(spend);
        self
    }

    /// Fills every unset parameter with its default and validates the result.
    /// Parameters that do not apply to the procedure are rejected.
    pub fn resolve(&self) -> Result<ProcedureConfig> {
        use ProcedureName::*;
        let alpha = self.alpha;
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Parameter(format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }
        let name = self.procedure;
        let unused = |what: &str, set: bool| -> Result<()> {
            if set {
                Err(Error::Parameter(format!("{what} does not apply to {name}")))
            } else {
                Ok(())
            }
        };
        unused("lambda", self.lambda.is_some() && !matches!(name, Saffron | Addis))?;
        unused("eta", self.eta.is_some() && name != Addis)?;
        unused("spend", self.spend.is_some() && name != GaiPlusPlus)?;
        unused(
            "gamma",
            self.gamma.is_some() && matches!(name, Uncorrected | GaiPlusPlus),
        )?;

        let default_w0 = match name {
            Uncorrected => 0.0,
            AlphaSpending => alpha,
            Lord => alpha / 10.0,
            GaiPlusPlus | Saffron | Addis => alpha / 2.0,
        };
        let w0 = match (name, self.w0) {
            (Uncorrected | AlphaSpending, W0::Value(_)) => {
                return Err(Error::Parameter(format!("w0 does not apply to {name}")))
            }
            (_, W0::Auto) => default_w0,
            (_, W0::Value(v)) => v,
        };
        if !(w0 >= 0.0 && w0 <= alpha) {
            return Err(Error::Parameter(format!(
                "w0 must satisfy 0 <= w0 <= alpha = {alpha}, got {w0}"
            )));
        }
        let gamma = match name {
            Uncorrected | GaiPlusPlus => None,
            AlphaSpending | Lord => Some(self.gamma.clone().unwrap_or(GammaSpec::LordDefault)),
            Saffron | Addis => Some(self.gamma.clone().unwrap_or(GammaSpec::Power(1.6))),
        };
        let gamma = gamma.map(GammaSpec::load).transpose()?;
        let lambda = match name {
            Saffron => Some(self.lambda.unwrap_or(0.5)),
            Addis => Some(self.lambda.unwrap_or(0.25)),
            _ => None,
        };
        let eta = (name == Addis).then(|| self.eta.unwrap_or(0.5));
        let spend = (name == GaiPlusPlus).then(|| self.spend.unwrap_or(0.1));
        if let Some(s) = spend {
            if !(s > 0.0 && s <= 1.0) {
                return Err(Error::Parameter(format!("spend must lie in (0, 1], got {s}")));
            }
        }
        Ok(ProcedureConfig {
            procedure: name,
            alpha,
            w0: if matches!(name, Uncorrected | AlphaSpending) {
                W0::Auto
            } else {
                W0::Value(w0)
            },
            lambda,
            eta,
            gamma,
            spend,
        })
    }

    /// Resolved initial wealth.
    pub fn w0_value(&self) -> Result<f64> {
        match self.resolve()?.w0 {
            W0::Value(v) => Ok(v),
            W0::Auto if self.procedure == ProcedureName::AlphaSpending => Ok(self.alpha),
            W0::Auto => Ok(0.0),
        }
    }
}

/// Per-procedure state behind an [`Engine`](crate::Engine).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub(crate) enum Rule {
    Uncorrected { alpha: f64 },
    AlphaSpending(AlphaSpending),
    GaiPlusPlus(AlphaInvesting),
    Lord(Lord),
    Saffron(Saffron),
    Addis(Addis),
}

impl Rule {
    /// `config` must already be resolved.
    pub(crate) fn build(config: &ProcedureConfig) -> Result<Rule> {
        let alpha = config.alpha;
        let w0 = config.w0_value()?;
        let gamma = || -> Result<GammaSequence> {
            GammaSequence::new(config.gamma.as_ref().expect("resolved config carries gamma"))
        };
        Ok(match config.procedure {
            ProcedureName::Uncorrected => Rule::Uncorrected { alpha },
            ProcedureName::AlphaSpending => Rule::AlphaSpending(AlphaSpending::new(alpha, gamma()?)),
            ProcedureName::GaiPlusPlus => Rule::GaiPlusPlus(AlphaInvesting::new(
                alpha,
                w0,
                config.spend.unwrap_or(0.1),
            )),
            ProcedureName::Lord => Rule::Lord(Lord::new(alpha, w0, gamma()?)),
            ProcedureName::Saffron => Rule::Saffron(Saffron::new(
                alpha,
                w0,
                config.lambda.unwrap_or(0.5),
                gamma()?,
            )?),
            ProcedureName::Addis => Rule::Addis(Addis::new(
                alpha,
                w0,
                config.lambda.unwrap_or(0.25),
                config.eta.unwrap_or(0.5),
                gamma()?,
            )?),
        })
    }

    pub(crate) fn level(&self, t: u64, history: &StreamSummary) -> f64 {
        match self {
            Rule::Uncorrected { alpha } => *alpha,
            Rule::AlphaSpending(r) => r.level(t),
            Rule::GaiPlusPlus(r) => r.level(),
            Rule::Lord(r) => r.level(t, history),
            Rule::Saffron(r) => r.level(t, history),
            Rule::Addis(r) => r.level(),
        }
    }

    pub(crate) fn observe(
        &mut self,
        t: u64,
        p: f64,
        alpha_t: f64,
        rejected: bool,
        _history: &StreamSummary,
    ) -> Result<()> {
        match self {
            Rule::Uncorrected { .. } => Ok(()),
            Rule::AlphaSpending(r) => r.observe(t, alpha_t, rejected),
            Rule::GaiPlusPlus(r) => r.observe(t, alpha_t, rejected),
            Rule::Lord(r) => r.observe(t, alpha_t, rejected),
            Rule::Saffron(r) => r.observe(t, p, alpha_t, rejected),
            Rule::Addis(r) => r.observe(t, p, alpha_t, rejected),
        }
    }

    pub(crate) fn ledger(&self) -> Option<&WealthLedger> {
        match self {
            Rule::Uncorrected { .. } => None,
            Rule::AlphaSpending(r) => Some(r.ledger()),
            Rule::GaiPlusPlus(r) => Some(r.ledger()),
            Rule::Lord(r) => Some(r.ledger()),
            Rule::Saffron(r) => Some(r.ledger()),
            Rule::Addis(r) => Some(r.ledger()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Engine;

    #[test]
    fn saffron_defaults() {
        let cfg = ProcedureConfig::new(ProcedureName::Saffron, 0.05)
            .resolve()
            .unwrap();
        assert_eq!(cfg.lambda, Some(0.5));
        assert_eq!(cfg.gamma, Some(GammaSpec::Power(1.6)));
        assert_eq!(cfg.w0, W0::Value(0.025));
    }

    #[test]
    fn addis_defaults() {
        let cfg = ProcedureConfig::new(ProcedureName::Addis, 0.05)
            .resolve()
            .unwrap();
        assert_eq!(cfg.lambda, Some(0.25));
        assert_eq!(cfg.eta, Some(0.5));
        assert_eq!(cfg.gamma, Some(GammaSpec::Power(1.6)));
        // gamma_0 of ADDIS is the first power-law term: 1/(0+1)^1.6 normalised.
        let e = Engine::new(&cfg).unwrap();
        let g = GammaSequence::new(&GammaSpec::Power(1.6)).unwrap();
        assert!((e.peek_level() - 0.25 * 0.025 * g.at(1)).abs() < 1e-18);
    }

    #[test]
    fn lord_defaults_and_w0_range() {
        let cfg = ProcedureConfig::new(ProcedureName::Lord, 0.05).resolve().unwrap();
        assert_eq!(cfg.w0, W0::Value(0.005));
        assert_eq!(cfg.gamma, Some(GammaSpec::LordDefault));
        let bad = ProcedureConfig::new(ProcedureName::Lord, 0.05).with_w0(0.06);
        assert!(matches!(Engine::new(&bad), Err(Error::Parameter(_))));
        let bad = ProcedureConfig::new(ProcedureName::Lord, 0.05).with_w0(-0.01);
        assert!(Engine::new(&bad).is_err());
    }

    #[test]
    fn incoherent_parameters_are_rejected() {
        let bad = ProcedureConfig::new(ProcedureName::Addis, 0.05)
            .with_lambda(0.5)
            .with_eta(0.5);
        assert!(Engine::new(&bad).is_err());
        let bad = ProcedureConfig::new(ProcedureName::Saffron, 0.05).with_lambda(1.0);
        assert!(Engine::new(&bad).is_err());
        let bad = ProcedureConfig::new(ProcedureName::Lord, 0.05).with_lambda(0.5);
        assert!(Engine::new(&bad).is_err());
        let bad = ProcedureConfig::new(ProcedureName::Lord, 1.5);
        assert!(Engine::new(&bad).is_err());
        let bad = ProcedureConfig::new(ProcedureName::Lord, 0.05).with_gamma(GammaSpec::Power(0.9));
        assert!(Engine::new(&bad).is_err());
    }

    #[test]
    fn names_parse() {
        for name in ProcedureName::ALL {
            assert_eq!(name.as_str().parse::<ProcedureName>().unwrap(), name);
        }
        assert!(matches!(
            "lond".parse::<ProcedureName>(),
            Err(Error::UnknownProcedure(_))
        ));
    }

    #[test]
    fn config_from_toml() {
        let cfg: ProcedureConfig = toml::from_str(
            r#"
            procedure = "addis"
            alpha = 0.05
            w0 = "auto"
            lambda = 0.25
            eta = 0.5
            gamma = "bounded:20"
            "#,
        )
        .unwrap();
        assert_eq!(cfg.procedure, ProcedureName::Addis);
        assert_eq!(cfg.w0, W0::Auto);
        assert_eq!(cfg.gamma, Some(GammaSpec::Bounded(20)));
        let cfg: ProcedureConfig =
            toml::from_str("procedure = \"lord\"\nalpha = 0.1\nw0 = 0.01\n").unwrap();
        assert_eq!(cfg.w0, W0::Value(0.01));
    }
}
