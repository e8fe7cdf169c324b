//! Statistical checks on the Monte Carlo lab.

use onlinefdr::io::experiment_csv_wide;
use onlinefdr::metrics::{aggregate, score_stream};
use onlinefdr::simlab::{
    gaussian_stream, ordering_scenario, run_experiment, run_methods, ExperimentGrid,
    MeanDistribution, Method, Ordering, RosterEntry, SimConfig,
};
use onlinefdr::{ProcedureConfig, ProcedureName};

fn uniform_nulls(horizon: usize, pi1: f64) -> SimConfig {
    SimConfig {
        horizon,
        pi1,
        f0: MeanDistribution::PointMass { value: 0.0 },
        ..SimConfig::default()
    }
}

#[test]
fn null_p_values_are_uniform() {
    // Kolmogorov-Smirnov against U(0, 1) on 10^5 draws.
    let cfg = uniform_nulls(1000, 0.0);
    let mut p: Vec<f64> = (0..100).flat_map(|rep| gaussian_stream(&cfg, rep).p).collect();
    p.sort_by(f64::total_cmp);
    let n = p.len() as f64;
    let d = p
        .iter()
        .enumerate()
        .map(|(i, &x)| ((i + 1) as f64 / n - x).max(x - i as f64 / n))
        .fold(0.0, f64::max);
    // 1% critical value.
    assert!(d < 1.628 / n.sqrt(), "KS statistic {d}");
}

#[test]
fn mixture_proportion_within_three_se() {
    let cfg = SimConfig {
        pi1: 0.3,
        ..SimConfig::default()
    };
    let non_null: usize = (0..100).map(|rep| gaussian_stream(&cfg, rep).truth.non_nulls()).sum();
    let n = 100_000.0;
    let se = (0.3f64 * 0.7 / n).sqrt();
    assert!((non_null as f64 / n - 0.3).abs() < 3.0 * se);
}

#[test]
fn uncorrected_fwer_matches_closed_form() {
    let grid = ExperimentGrid {
        base: SimConfig {
            replicates: 4000,
            roster: vec![RosterEntry::Name("uncorrected".into())],
            ..uniform_nulls(20, 0.0)
        },
        pi1_grid: vec![0.0],
        ..ExperimentGrid::default()
    };
    let row = &run_experiment(&grid).unwrap().rows[0];
    let want = 1.0 - 0.95f64.powi(20);
    let m = row.metrics;
    assert!((m.fwer - want).abs() < 3.0 * m.fwer_se, "{} vs {want}", m.fwer);
}

#[test]
fn favourable_order_beats_adversarial_for_lord() {
    let cfg = SimConfig {
        pi1: 0.1,
        ..SimConfig::default()
    };
    let lord = [Method::Online(ProcedureConfig::new(ProcedureName::Lord, 0.05))];
    let power = |mode: Ordering| {
        let reports: Vec<_> = (0..300)
            .map(|rep| {
                let s = ordering_scenario(&gaussian_stream(&cfg, rep), mode, rep);
                let o = &run_methods(&lord, &s.p).unwrap()[0];
                score_stream(&o.decisions, &s.truth).unwrap()
            })
            .collect();
        aggregate(&reports, 0.1).unwrap()
    };
    let (good, bad) = (power(Ordering::Favourable), power(Ordering::Adversarial));
    let se = (good.power_se.powi(2) + bad.power_se.powi(2)).sqrt();
    assert!(good.power - bad.power > 2.0 * se, "{} vs {}", good.power, bad.power);
}

fn small_grid() -> ExperimentGrid {
    ExperimentGrid {
        base: SimConfig {
            horizon: 300,
            replicates: 300,
            ..SimConfig::default()
        },
        pi1_grid: vec![0.1, 0.5],
        ..ExperimentGrid::default()
    }
}

#[test]
fn experiment_csv_is_reproducible_and_thread_independent() {
    let grid = small_grid();
    let a = experiment_csv_wide(&run_experiment(&grid).unwrap());
    let b = experiment_csv_wide(&run_experiment(&grid).unwrap());
    assert_eq!(a, b);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let c = pool.install(|| experiment_csv_wide(&run_experiment(&grid).unwrap()));
    assert_eq!(a, c);
}

#[test]
fn different_seeds_give_different_tables() {
    let grid = small_grid();
    let mut other = grid.clone();
    other.base.seed += 1;
    assert_ne!(
        experiment_csv_wide(&run_experiment(&grid).unwrap()),
        experiment_csv_wide(&run_experiment(&other).unwrap())
    );
}

#[test]
fn fwer_dominates_fdr_in_every_cell() {
    for row in run_experiment(&small_grid()).unwrap().rows {
        assert!(row.metrics.fwer >= row.metrics.fdr, "{row:?}");
    }
}
