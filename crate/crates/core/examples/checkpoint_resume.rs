//! Long-running streams survive restarts: each step is checkpointed, and a
//! resumed stream makes exactly the decisions an uninterrupted one would.
//!
//! ```text
//! cargo run --example checkpoint_resume
//! ```

use onlinefdr::io::{next_level_preview, run_records, StreamSession, StreamSnapshot};
use onlinefdr::{Engine, PValueRecord, ProcedureConfig, ProcedureName};

fn main() -> onlinefdr::Result<()> {
    let pvalues = [0.2, 0.0004, 0.03, 0.6, 0.0001, 0.8, 0.02, 0.0007, 0.4, 0.05];
    let records: Vec<PValueRecord> = pvalues
        .iter()
        .enumerate()
        .map(|(i, &p)| PValueRecord::new(i as u64 + 1, p))
        .collect();
    let config = ProcedureConfig::new(ProcedureName::Saffron, 0.05);

    let dir = std::env::temp_dir().join(format!("onlinefdr-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| onlinefdr::Error::Input(e.to_string()))?;
    let state = dir.join("stream.json");
    let _ = std::fs::remove_file(&state);

    // First process: six hypotheses, then it stops.
    let mut log = StreamSession::open(&state, Some(&config))?.run(&records[..6])?;

    let snapshot = StreamSnapshot::load(&state)?;
    println!(
        "checkpoint at t = {}, next level {:.6e}",
        snapshot.t(),
        next_level_preview(&snapshot)?
    );

    // Second process picks up from the file.
    log.extend(StreamSession::open(&state, None)?.run(&records[6..])?);

    let mut straight = Engine::new(&config)?;
    let reference = run_records(&mut straight, &records)?;
    assert_eq!(log, reference);
    println!("resumed log matches the uninterrupted run ({} decisions)", log.len());

    // A tampered checkpoint is refused.
    let text = std::fs::read_to_string(&state).map_err(|e| onlinefdr::Error::Input(e.to_string()))?;
    let tampered = text.replacen("\"alpha\": 0.05", "\"alpha\": 0.5", 1);
    match StreamSnapshot::from_json(&tampered) {
        Err(e) => println!("tampered snapshot: {e} (exit code {})", e.exit_code()),
        Ok(_) => unreachable!("checksum must catch the edit"),
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}
