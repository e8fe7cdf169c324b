//! Spending sequences `{gamma_t}`.
//!
//! Every procedure spreads alpha-wealth over future tests according to a
//! non-negative, non-increasing sequence that sums to at most one. Sequences
//! are written down up to a constant (`gamma_t ∝ f(t)`), so construction
//! computes the normalising constant:
//!
//! * the first [`PREFIX_LEN`] terms are summed directly (Neumaier
//!   compensated summation) and cached, already normalised;
//! * the remainder `Σ_{t>N} f(t)` is added in closed form through the
//!   Euler–Maclaurin formula `∫_N^∞ f − f(N)/2 − f'(N)/12 + f'''(N)/720`.
//!   For both built-in families the neglected remainder at `N = 10^6` is far
//!   below `1e-12`.
//!
//! The index origin is explicit. LORD++ and SAFFRON index from 1; ADDIS
//! indexes from 0. [`GammaSequence::with_origin`] re-indexes a sequence so
//! its first term sits at the requested origin, and [`GammaSequence::at`]
//! returns 0 before the origin and beyond the horizon, which keeps the
//! shifted-index level formulas total.

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of terms summed explicitly and cached for infinite sequences.
pub const PREFIX_LEN: usize = 1_000_000;

/// Slack allowed on `Σ gamma_t <= 1` for user-supplied lists.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Textual description of a spending sequence, as used in configs and on the
/// command line.
///
/// | syntax                   | sequence                                                   |
/// |--------------------------|------------------------------------------------------------|
/// | `lord-default`           | `γ_t ∝ log(t ∨ 2) / (t·exp(√log t))`                       |
/// | `power:<s>`              | `γ_t ∝ t^{-s}`, `s > 1`                                    |
/// | `bounded:<M>`            | `γ_t = 1/M` for the first `M` positions, 0 after           |
/// | `truncated:<M>:<base>`   | `base` cut after `M` positions and renormalised to sum one |
/// | `file:<path>`            | one non-negative real per line, used as-is                 |
/// | `custom:<v1>,<v2>,...`   | inline list, used as-is                                    |
#[derive(Debug, Clone, PartialEq)]
pub enum GammaSpec {
    LordDefault,
    Power(f64),
    Bounded(u64),
    Truncated { horizon: u64, base: Box<GammaSpec> },
    File(PathBuf),
    Custom(Vec<f64>),
}

impl GammaSpec {
    /// Replaces `file:` references by the list they contain.
    pub fn load(self) -> Result<GammaSpec> {
        match self {
            GammaSpec::File(path) => {
                let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                let mut values = Vec::new();
                for (i, line) in text.lines().enumerate() {
                    let line = line.trim();
                    if line.is_empty() {
                        continue;
                    }
                    let v: f64 = line.parse().map_err(|_| Error::Line {
                        line: i + 1,
                        message: format!("`{line}` is not a decimal number"),
                    })?;
                    values.push(v);
                }
                Ok(GammaSpec::Custom(values))
            }
            other => Ok(other),
        }
    }
}

impl fmt::Display for GammaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaSpec::LordDefault => f.write_str("lord-default"),
            GammaSpec::Power(s) => write!(f, "power:{s}"),
            GammaSpec::Bounded(m) => write!(f, "bounded:{m}"),
            GammaSpec::Truncated { horizon, base } => write!(f, "truncated:{horizon}:{base}"),
            GammaSpec::File(path) => write!(f, "file:{}", path.display()),
            GammaSpec::Custom(values) => {
                f.write_str("custom:")?;
                let mut buf = ryu::Buffer::new();
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    f.write_str(buf.format(*v))?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for GammaSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::Parameter(format!("gamma `{s}`: {why}"));
        let s = s.trim();
        if s == "lord-default" {
            return Ok(GammaSpec::LordDefault);
        }
        let (head, rest) = s.split_once(':').ok_or_else(|| bad("unknown sequence"))?;
        match head {
            "power" => rest
                .parse()
                .map(GammaSpec::Power)
                .map_err(|_| bad("exponent is not a number")),
            "bounded" => rest
                .parse()
                .map(GammaSpec::Bounded)
                .map_err(|_| bad("horizon is not a positive integer")),
            "truncated" => {
                let (m, base) = rest
                    .split_once(':')
                    .ok_or_else(|| bad("expected truncated:<M>:<base>"))?;
                let horizon = m
                    .parse()
                    .map_err(|_| bad("horizon is not a positive integer"))?;
                let base: GammaSpec = base.parse()?;
                Ok(GammaSpec::Truncated {
                    horizon,
                    base: Box::new(base),
                })
            }
            "file" => Ok(GammaSpec::File(PathBuf::from(rest))),
            "custom" => {
                let values = rest
                    .split(',')
                    .filter(|v| !v.trim().is_empty())
                    .map(|v| v.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| bad("list entry is not a number"))?;
                Ok(GammaSpec::Custom(values))
            }
            _ => Err(bad("unknown sequence")),
        }
    }
}

impl Serialize for GammaSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GammaSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Family {
    Lord,
    Power(f64),
}

impl Family {
    /// Unnormalised term at 1-based position `n`.
    fn raw(self, n: u64) -> f64 {
        let t = n as f64;
        match self {
            Family::Lord => {
                let log_t = t.ln();
                t.max(2.0).ln() / (t * log_t.sqrt().exp())
            }
            Family::Power(s) => t.powf(-s),
        }
    }

    /// `Σ_{n > big_n} raw(n)` by Euler–Maclaurin.
    fn tail(self, big_n: u64) -> f64 {
        let n = big_n as f64;
        match self {
            Family::Lord => {
                // ∫_N^∞ log t / (t e^{√log t}) dt = 2 e^{-v}(v³ + 3v² + 6v + 6), v = √log N
                let u = n.ln();
                let v = u.sqrt();
                let integral = 2.0 * (-v).exp() * (v * v * v + 3.0 * v * v + 6.0 * v + 6.0);
                let f = u * (-v).exp() / n;
                let df = (-v).exp() * (1.0 - v / 2.0 - u) / (n * n);
                integral - f / 2.0 - df / 12.0
            }
            Family::Power(s) => {
                let integral = n.powf(1.0 - s) / (s - 1.0);
                let f = n.powf(-s);
                let df = -s * n.powf(-s - 1.0);
                let d3f = -s * (s + 1.0) * (s + 2.0) * n.powf(-s - 3.0);
                integral - f / 2.0 - df / 12.0 + d3f / 720.0
            }
        }
    }

    fn from_spec(spec: &GammaSpec) -> Option<Family> {
        match spec {
            GammaSpec::LordDefault => Some(Family::Lord),
            GammaSpec::Power(s) => Some(Family::Power(*s)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
enum Terms {
    /// Infinite family: cached normalised prefix, closed form afterwards.
    Infinite {
        family: Family,
        prefix: Arc<[f64]>,
    },
    /// `1/M` for the first `M` positions.
    Constant { horizon: u64 },
    /// Explicit finite table of normalised values; zero afterwards.
    Table(Arc<[f64]>),
}

/// A normalised, non-increasing spending sequence with an explicit index
/// origin. Immutable and cheap to clone.
#[derive(Debug, Clone)]
pub struct GammaSequence {
    spec: GammaSpec,
    origin: u64,
    normalization: f64,
    terms: Terms,
}

struct PrefixEntry {
    prefix: Arc<[f64]>,
    normalization: f64,
}

/// Distinct families kept in the prefix cache. Each entry is 8 MB, so the
/// cache is cleared once it fills rather than growing with every exponent
/// a caller happens to try.
const CACHE_CAPACITY: usize = 8;

fn infinite_cache() -> &'static Mutex<HashMap<String, Arc<PrefixEntry>>> {
    static CACHE: OnceLock<Mutex<HashMap<String, Arc<PrefixEntry>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn infinite_prefix(family: Family, key: String) -> Arc<PrefixEntry> {
    let cache = infinite_cache();
    if let Some(entry) = cache.lock().expect("gamma cache poisoned").get(&key) {
        return entry.clone();
    }
    let raw: Vec<f64> = (1..=PREFIX_LEN as u64).map(|n| family.raw(n)).collect();
    let normalization = compensated_sum(raw.iter().copied()) + family.tail(PREFIX_LEN as u64);
    let prefix: Arc<[f64]> = raw.into_iter().map(|r| r / normalization).collect();
    let entry = Arc::new(PrefixEntry {
        prefix,
        normalization,
    });
    let mut guard = cache.lock().expect("gamma cache poisoned");
    if guard.len() >= CACHE_CAPACITY && !guard.contains_key(&key) {
        guard.clear();
    }
    guard
        .entry(key)
        .or_insert(entry)
        .clone()
}

fn check_family(spec: &GammaSpec) -> Result<Family> {
    match spec {
        GammaSpec::Power(s) if !(s.is_finite() && *s > 1.0) => Err(Error::Parameter(format!(
            "power-law exponent must exceed 1 for a summable sequence, got {s}"
        ))),
        _ => Family::from_spec(spec).ok_or_else(|| {
            Error::Parameter(format!(
                "`{spec}` cannot be truncated; use lord-default or power:<s> as the base"
            ))
        }),
    }
}

/// Builds a normalised sequence with origin 1.
pub fn make_gamma(spec: &GammaSpec) -> Result<GammaSequence> {
    GammaSequence::new(spec)
}

impl GammaSequence {
    pub fn new(spec: &GammaSpec) -> Result<Self> {
        let spec = spec.clone().load()?;
        let (normalization, terms) = match &spec {
            GammaSpec::LordDefault | GammaSpec::Power(_) => {
                let family = check_family(&spec)?;
                let entry = infinite_prefix(family, spec.to_string());
                (
                    entry.normalization,
                    Terms::Infinite {
                        family,
                        prefix: entry.prefix.clone(),
                    },
                )
            }
            GammaSpec::Bounded(m) => {
                if *m == 0 {
                    return Err(Error::Parameter("bounded horizon M must be at least 1".into()));
                }
                (*m as f64, Terms::Constant { horizon: *m })
            }
            GammaSpec::Truncated { horizon, base } => {
                if *horizon == 0 {
                    return Err(Error::Parameter(
                        "truncation horizon M must be at least 1".into(),
                    ));
                }
                let family = check_family(base)?;
                let raw: Vec<f64> = (1..=*horizon).map(|n| family.raw(n)).collect();
                let norm = compensated_sum(raw.iter().copied());
                (norm, Terms::Table(raw.into_iter().map(|r| r / norm).collect()))
            }
            GammaSpec::Custom(values) => {
                validate_custom(values)?;
                (1.0, Terms::Table(values.iter().copied().collect()))
            }
            GammaSpec::File(_) => unreachable!("file specs are loaded above"),
        };
        Ok(GammaSequence {
            spec,
            origin: 1,
            normalization,
            terms,
        })
    }

    /// A user list rescaled to sum to one.
    pub fn custom_normalized(values: &[f64]) -> Result<Self> {
        let total = compensated_sum(values.iter().copied());
        if !(total > 0.0) {
            return Err(Error::Parameter(
                "custom gamma list must have a positive sum".into(),
            ));
        }
        let scaled: Vec<f64> = values.iter().map(|v| v / total).collect();
        GammaSequence::new(&GammaSpec::Custom(scaled))
    }

    /// The same sequence re-indexed so its first term sits at `origin`.
    pub fn with_origin(mut self, origin: u64) -> Self {
        self.origin = origin;
        self
    }

    pub fn spec(&self) -> &GammaSpec {
        &self.spec
    }

    pub fn origin(&self) -> u64 {
        self.origin
    }

    /// Constant `c` with `gamma_t = raw_t / c`.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Number of positions with a possibly non-zero term, if finite.
    pub fn horizon(&self) -> Option<u64> {
        match &self.terms {
            Terms::Infinite { .. } => None,
            Terms::Constant { horizon } => Some(*horizon),
            Terms::Table(t) => Some(t.len() as u64),
        }
    }

    /// `gamma_k`, zero-extended before the origin and past the horizon.
    #[inline]
    pub fn at(&self, k: i64) -> f64 {
        if k < self.origin as i64 {
            return 0.0;
        }
        let pos = (k - self.origin as i64) as u64;
        match &self.terms {
            Terms::Infinite { family, prefix } => match prefix.get(pos as usize) {
                Some(v) => *v,
                None => family.raw(pos + 1) / self.normalization,
            },
            Terms::Constant { horizon } => {
                if pos < *horizon {
                    1.0 / *horizon as f64
                } else {
                    0.0
                }
            }
            Terms::Table(values) => values.get(pos as usize).copied().unwrap_or(0.0),
        }
    }

    /// Unnormalised term at index `k`, so that `at(k) * normalization() == raw_term(k)`.
    pub fn raw_term(&self, k: i64) -> f64 {
        if k < self.origin as i64 {
            return 0.0;
        }
        let pos = (k - self.origin as i64) as u64;
        match (&self.terms, &self.spec) {
            (Terms::Infinite { family, .. }, _) => family.raw(pos + 1),
            (Terms::Constant { horizon }, _) => {
                if pos < *horizon {
                    1.0
                } else {
                    0.0
                }
            }
            (Terms::Table(_), GammaSpec::Truncated { horizon, base }) => {
                if pos < *horizon {
                    Family::from_spec(base).map_or(0.0, |f| f.raw(pos + 1))
                } else {
                    0.0
                }
            }
            (Terms::Table(values), _) => values.get(pos as usize).copied().unwrap_or(0.0),
        }
    }
}

/// `gamma_at(seq, k)`: free-function form of [`GammaSequence::at`].
pub fn gamma_at(seq: &GammaSequence, k: i64) -> f64 {
    seq.at(k)
}

fn validate_custom(values: &[f64]) -> Result<()> {
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::Parameter(format!(
            "custom gamma entries must be finite and non-negative, got {v}"
        )));
    }
    if let Some(w) = values.windows(2).position(|w| w[1] > w[0]) {
        return Err(Error::Parameter(format!(
            "custom gamma list must be non-increasing (position {} < position {})",
            w + 1,
            w + 2
        )));
    }
    let total = compensated_sum(values.iter().copied());
    if total > 1.0 + SUM_TOLERANCE {
        return Err(Error::Parameter(format!(
            "custom gamma list sums to {total}, which exceeds 1"
        )));
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct GammaRepr {
    spec: GammaSpec,
    origin: u64,
}

impl Serialize for GammaSequence {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        GammaRepr {
            spec: self.spec.clone(),
            origin: self.origin,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GammaSequence {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = GammaRepr::deserialize(deserializer)?;
        GammaSequence::new(&repr.spec)
            .map(|g| g.with_origin(repr.origin))
            .map_err(serde::de::Error::custom)
    }
}
