//! Shared oracles and generators for the integration tests.
#![allow(dead_code)]

use onlinefdr::simlab::normal_upper_tail;
use onlinefdr::{Engine, GammaSpec, ProcedureConfig, ProcedureName};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A p-value stream mixing signals, uniform nulls, conservative nulls and
/// the exact endpoints 0 and 1.
pub fn random_stream(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let pi1: f64 = rng.random_range(0.0..0.6);
    (0..len)
        .map(|_| {
            let u: f64 = rng.random();
            if u < 0.01 {
                return 0.0;
            }
            if u < 0.02 {
                return 1.0;
            }
            let mu = if rng.random::<f64>() < pi1 {
                rng.random_range(1.0..4.0)
            } else if rng.random::<bool>() {
                -0.5
            } else {
                0.0
            };
            let z: f64 = rng.sample(StandardNormal);
            normal_upper_tail(mu + z)
        })
        .collect()
}

pub fn random_gamma(rng: &mut ChaCha8Rng, adaptive: bool) -> GammaSpec {
    let base = if adaptive || rng.random::<bool>() {
        GammaSpec::Power(rng.random_range(1.2..2.5))
    } else {
        GammaSpec::LordDefault
    };
    match rng.random_range(0..3) {
        0 => base,
        1 => GammaSpec::Bounded(rng.random_range(5..300)),
        _ => GammaSpec::Truncated {
            horizon: rng.random_range(5..300),
            base: Box::new(base),
        },
    }
}

/// A valid configuration for `name` with randomised parameters.
pub fn random_config(rng: &mut ChaCha8Rng, name: ProcedureName) -> ProcedureConfig {
    let alpha = rng.random_range(0.01..0.2);
    let mut cfg = ProcedureConfig::new(name, alpha);
    let w0 = alpha * rng.random_range(0.0..=1.0);
    match name {
        ProcedureName::Uncorrected => {}
        ProcedureName::AlphaSpending => cfg = cfg.with_gamma(random_gamma(rng, false)),
        ProcedureName::GaiPlusPlus => cfg = cfg.with_w0(w0).with_spend(rng.random_range(0.01..1.0)),
        ProcedureName::Lord => cfg = cfg.with_w0(w0).with_gamma(random_gamma(rng, false)),
        ProcedureName::Saffron => {
            cfg = cfg
                .with_w0(w0)
                .with_lambda(rng.random_range(0.05..0.95))
                .with_gamma(random_gamma(rng, true))
        }
        ProcedureName::Addis => {
            let eta = rng.random_range(0.1..=1.0);
            cfg = cfg
                .with_w0(w0)
                .with_lambda(rng.random_range(0.01..0.99) * eta)
                .with_eta(eta)
                .with_gamma(random_gamma(rng, true))
        }
    }
    cfg
}

pub fn any_procedure(rng: &mut ChaCha8Rng) -> ProcedureName {
    ProcedureName::ALL[rng.random_range(0..ProcedureName::ALL.len())]
}

/// Benjamini-Hochberg by its counting definition: the largest `k` such that
/// at least `k` p-values lie at or below `k alpha / n`, then reject all of
/// them. No sorting.
pub fn bh_brute_force(p: &[f64], alpha: f64) -> Vec<usize> {
    let n = p.len();
    let threshold = |k: usize| k as f64 * alpha / n as f64;
    let count = |x: f64| p.iter().filter(|&&v| v <= x).count();
    match (1..=n).rev().find(|&k| count(threshold(k)) >= k) {
        None => Vec::new(),
        Some(k) => (0..n).filter(|&i| p[i] <= threshold(k)).collect(),
    }
}

/// Riemann zeta for real `s > 1` from the alternating eta series with
/// Borwein's acceleration (algorithm 2, `n = 40`).
pub fn zeta_borwein(s: f64) -> f64 {
    let n = 40usize;
    let mut d = vec![0.0f64; n + 1];
    let mut term = 1.0f64;
    let mut acc = 1.0f64;
    d[0] = acc;
    for i in 1..=n {
        term *= 4.0 * (n + i - 1) as f64 * (n - i + 1) as f64 / ((2 * i) as f64 * (2 * i - 1) as f64);
        acc += term;
        d[i] = acc;
    }
    let mut sum = 0.0;
    for k in 0..n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (d[k] - d[n]) / ((k + 1) as f64).powf(s);
    }
    let eta = -sum / d[n];
    eta / (1.0 - 2f64.powf(1.0 - s))
}

/// Per-step trace of a run.
pub struct Trace {
    pub levels: Vec<f64>,
    pub rejected: Vec<bool>,
    pub wealth: Vec<Option<f64>>,
}

pub fn trace(cfg: &ProcedureConfig, stream: &[f64]) -> Trace {
    let mut e = Engine::new(cfg).expect("valid config");
    let mut t = Trace {
        levels: Vec::new(),
        rejected: Vec::new(),
        wealth: Vec::new(),
    };
    for &p in stream {
        let d = e.test(p).expect("valid step");
        t.levels.push(d.alpha);
        t.rejected.push(d.rejected);
        t.wealth.push(e.wealth());
    }
    t
}

/// LORD's running estimate `sum_{j<=t} alpha_j / (R(t) ∨ 1)` never exceeds alpha.
pub fn check_lord_fdp_hat(rng: &mut ChaCha8Rng, stream: &[f64]) -> Result<(), String> {
    let cfg = random_config(rng, ProcedureName::Lord);
    let tr = trace(&cfg, stream);
    let (mut spent, mut r) = (0.0, 0usize);
    for (t, (&a, &rej)) in tr.levels.iter().zip(&tr.rejected).enumerate() {
        spent += a;
        r += rej as usize;
        let fdp_hat = spent / r.max(1) as f64;
        if fdp_hat > cfg.alpha * (1.0 + 1e-12) {
            return Err(format!("t={}: FDP-hat {fdp_hat} > alpha {} ({cfg:?})", t + 1, cfg.alpha));
        }
    }
    Ok(())
}

/// Every ledger-keeping procedure stays solvent.
pub fn check_wealth(rng: &mut ChaCha8Rng, stream: &[f64]) -> Result<(), String> {
    for name in ProcedureName::ALL {
        let cfg = random_config(rng, name);
        let tr = trace(&cfg, stream);
        for (t, w) in tr.wealth.iter().enumerate() {
            if let Some(w) = w {
                if *w < -1e-12 {
                    return Err(format!("{name} t={}: wealth {w}", t + 1));
                }
            }
        }
    }
    Ok(())
}

pub fn check_levels_below_lambda(rng: &mut ChaCha8Rng, stream: &[f64]) -> Result<(), String> {
    for name in [ProcedureName::Saffron, ProcedureName::Addis] {
        let cfg = random_config(rng, name);
        let lambda = cfg.lambda.expect("set");
        let tr = trace(&cfg, stream);
        if let Some((t, a)) = tr.levels.iter().enumerate().find(|(_, &a)| a > lambda) {
            return Err(format!("{name} t={}: level {a} > lambda {lambda}", t + 1));
        }
    }
    Ok(())
}

/// ADDIS with `eta = 1` discards nothing and must behave exactly as SAFFRON.
pub fn check_addis_eta_one(rng: &mut ChaCha8Rng, stream: &[f64]) -> Result<(), String> {
    let alpha = rng.random_range(0.01..0.2);
    let w0 = alpha * rng.random_range(0.0..=1.0);
    let lambda = rng.random_range(0.05..0.95);
    let gamma = random_gamma(rng, true);
    let saffron = ProcedureConfig::new(ProcedureName::Saffron, alpha)
        .with_w0(w0)
        .with_lambda(lambda)
        .with_gamma(gamma.clone());
    let addis = ProcedureConfig::new(ProcedureName::Addis, alpha)
        .with_w0(w0)
        .with_lambda(lambda)
        .with_eta(1.0)
        .with_gamma(gamma);
    let (s, a) = (trace(&saffron, stream), trace(&addis, stream));
    for t in 0..stream.len() {
        let (ls, la) = (s.levels[t], a.levels[t]);
        if (ls - la).abs() > 1e-12 * ls.max(la).max(1e-300) || s.rejected[t] != a.rejected[t] {
            return Err(format!(
                "t={}: SAFFRON {ls} ({}) vs ADDIS {la} ({})",
                t + 1,
                s.rejected[t],
                a.rejected[t]
            ));
        }
    }
    Ok(())
}

pub fn check_spending_sum(rng: &mut ChaCha8Rng, stream: &[f64]) -> Result<(), String> {
    let cfg = random_config(rng, ProcedureName::AlphaSpending);
    let total: f64 = trace(&cfg, stream).levels.iter().sum();
    if total > cfg.alpha * (1.0 + 1e-12) {
        return Err(format!("sum {total} > alpha {}", cfg.alpha));
    }
    Ok(())
}

/// Recomputes the GAI++ cap from each ledger entry and the emitted level.
pub fn check_gai_cap(rng: &mut ChaCha8Rng, stream: &[f64]) -> Result<(), String> {
    for name in [ProcedureName::GaiPlusPlus, ProcedureName::Lord] {
        let cfg = random_config(rng, name);
        let mut e = Engine::new(&cfg).expect("valid config");
        for &p in stream {
            let d = e.test(p).expect("valid step");
            let entry = *e.ledger().expect("ledger").tail().last().expect("entry");
            let (phi, psi, b) = (entry.penalty, entry.payout, entry.bound);
            let ratio = if d.alpha > 0.0 { phi / d.alpha } else if phi > 0.0 { f64::INFINITY } else { 1.0 };
            let cap = (phi + b).min(ratio + b - 1.0);
            if psi > cap + 1e-12 {
                return Err(format!("{name} t={}: payout {psi} > cap {cap}", d.t));
            }
        }
    }
    Ok(())
}

pub fn random_any_config(rng: &mut ChaCha8Rng) -> ProcedureConfig {
    let name = any_procedure(rng);
    random_config(rng, name)
}
