//! Checkpoint and resume.

mod common;

use common::*;
use onlinefdr::io::{
    next_level_preview, run_records, run_stampede, stampede_records, LogRecord, StampedeSettings,
    StreamSession, StreamSnapshot,
};
use onlinefdr::{Engine, PValueRecord};
use rand::Rng;

fn records(ps: &[f64]) -> Vec<PValueRecord> {
    ps.iter()
        .enumerate()
        .map(|(i, &p)| PValueRecord::new(i as u64 + 1, p))
        .collect()
}

fn log_bytes(log: &[LogRecord]) -> Vec<u8> {
    let mut out = Vec::new();
    onlinefdr::io::write_log(&mut out, log).unwrap();
    out
}

/// Resume through an in-memory snapshot document at a random cut.
pub fn resumed_matches(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let len = r.random_range(1..250);
    let recs = records(&random_stream(&mut r, len));
    let cfg = random_any_config(&mut r);
    let cut = r.random_range(0..=len);

    let mut whole = Engine::new(&cfg).unwrap();
    let expected = log_bytes(&run_records(&mut whole, &recs).unwrap());

    let mut first = Engine::new(&cfg).unwrap();
    let mut log = run_records(&mut first, &recs[..cut]).unwrap();
    let text = StreamSnapshot::capture(&first).unwrap().to_json().unwrap();
    let again = StreamSnapshot::from_json(&text).unwrap();
    if again.to_json().unwrap() != text {
        return Err(format!("seed {seed}: snapshot round trip is not byte-identical"));
    }
    let mut resumed = again.restore().unwrap();
    log.extend(run_records(&mut resumed, &recs[cut..]).unwrap());
    if log_bytes(&log) != expected {
        return Err(format!("seed {seed}: resumed log differs ({cfg:?}, cut {cut})"));
    }
    Ok(())
}

#[test]
fn random_cut_resume_is_byte_identical() {
    for seed in 0..200 {
        resumed_matches(seed).unwrap();
    }
}

#[test]
fn file_sessions_resume_across_many_cuts() {
    let dir = tempfile::tempdir().unwrap();
    let recs = stampede_records();
    let settings = StampedeSettings::default();
    for cfg in &settings.procedures {
        let mut whole = Engine::new(cfg).unwrap();
        let expected = run_records(&mut whole, &recs).unwrap();
        for cut in 0..=recs.len() {
            let state = dir.path().join(format!("{}-{cut}.json", cfg.procedure));
            let mut log = StreamSession::open(&state, Some(cfg)).unwrap().run(&recs[..cut]).unwrap();
            log.extend(StreamSession::open(&state, None).unwrap().run(&recs[cut..]).unwrap());
            assert_eq!(log, expected, "{} cut {cut}", cfg.procedure);
        }
    }
}

#[test]
fn preview_after_stampede_matches_case_study() {
    let report = run_stampede(&StampedeSettings::default()).unwrap();
    for cfg in StampedeSettings::default().procedures {
        let mut e = Engine::new(&cfg).unwrap();
        run_records(&mut e, &stampede_records()).unwrap();
        let snap = StreamSnapshot::capture(&e).unwrap();
        let level = next_level_preview(&snap).unwrap();
        let row = report.row(cfg.procedure.as_str()).unwrap();
        assert_eq!(Some(level), row.next_level);
        assert_eq!(snap.t(), 7);
    }
}

#[test]
fn fresh_alpha_spending_preview() {
    let cfg = onlinefdr::ProcedureConfig::new(onlinefdr::ProcedureName::AlphaSpending, 0.05)
        .with_gamma(onlinefdr::GammaSpec::Bounded(20));
    let snap = StreamSnapshot::capture(&Engine::new(&cfg).unwrap()).unwrap();
    assert_eq!(format!("{:.4}", next_level_preview(&snap).unwrap()), "0.0025");
}

#[test]
fn empty_input_leaves_snapshot_at_zero() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("s.json");
    let cfg = onlinefdr::ProcedureConfig::new(onlinefdr::ProcedureName::Lord, 0.05);
    let log = StreamSession::open(&state, Some(&cfg)).unwrap().run(&[]).unwrap();
    assert!(log.is_empty());
    assert_eq!(StreamSnapshot::load(&state).unwrap().t(), 0);
}

#[test]
fn gap_after_resume_is_refused_without_touching_state() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("s.json");
    let cfg = onlinefdr::ProcedureConfig::new(onlinefdr::ProcedureName::Saffron, 0.05);
    let recs = records(&[0.1, 0.2, 0.3, 0.4]);
    StreamSession::open(&state, Some(&cfg)).unwrap().run(&recs[..2]).unwrap();
    let before = std::fs::read_to_string(&state).unwrap();
    let mut s = StreamSession::open(&state, None).unwrap();
    assert!(matches!(s.run(&recs[3..]), Err(onlinefdr::Error::Sequence { expected: 3, got: 4 })));
    drop(s);
    assert_eq!(std::fs::read_to_string(&state).unwrap(), before);
}
