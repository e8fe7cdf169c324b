//! Checkpoints.
//!
//! A snapshot is a pretty-printed JSON document:
//!
//! ```text
//! { "schema_version": 1, "checksum": "<sha256 hex>", "engine": { ... } }
//! ```
//!
//! The checksum covers the compact, key-sorted serialisation of `engine` and
//! is verified before anything is restored. Files are replaced by writing a
//! sibling temporary file and renaming it over the target, so an interrupted
//! write leaves the previous checkpoint intact.

use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::engine::{Engine, PValueRecord};
use crate::error::{Error, Result};
use crate::procedures::ProcedureConfig;

use super::protocol::{step, LogRecord};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StreamSnapshot {
    pub schema_version: u32,
    pub checksum: String,
    pub engine: Engine,
}

fn digest(engine: &serde_json::Value) -> String {
    // `serde_json::Map` is ordered by key, so this is canonical.
    let compact = serde_json::to_string(engine).expect("a JSON value always serialises");
    hex::encode(Sha256::digest(compact.as_bytes()))
}

impl StreamSnapshot {
    pub fn capture(engine: &Engine) -> Result<Self> {
        if engine.has_pending_level() {
            return Err(Error::Contract(
                "cannot checkpoint between next_level and feed",
            ));
        }
        let value = serde_json::to_value(engine)?;
        Ok(StreamSnapshot {
            schema_version: SCHEMA_VERSION,
            checksum: digest(&value),
            engine: engine.clone(),
        })
    }

    pub fn t(&self) -> u64 {
        self.engine.t()
    }

    /// Recomputes the checksum of the in-memory engine.
    pub fn verify(&self) -> Result<()> {
        if self.schema_version > SCHEMA_VERSION {
            return Err(Error::Integrity(format!(
                "schema version {} is newer than supported version {SCHEMA_VERSION}",
                self.schema_version
            )));
        }
        let actual = digest(&serde_json::to_value(&self.engine)?);
        if actual != self.checksum {
            return Err(Error::Integrity(format!(
                "checksum mismatch: recorded {}, computed {actual}",
                self.checksum
            )));
        }
        Ok(())
    }

    /// Verified engine, ready to resume.
    pub fn restore(&self) -> Result<Engine> {
        self.verify()?;
        Ok(self.engine.clone())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    /// Parses and verifies a snapshot document. The version and checksum are
    /// checked on the raw document before the engine is deserialised.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::Integrity(format!("unreadable snapshot: {e}")))?;
        let version = doc
            .get("schema_version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| Error::Integrity("missing schema_version".into()))?;
        if version > SCHEMA_VERSION as u64 {
            return Err(Error::Integrity(format!(
                "schema version {version} is newer than supported version {SCHEMA_VERSION}"
            )));
        }
        let recorded = doc
            .get("checksum")
            .and_then(serde_json::Value::as_str)
            .ok_or_else(|| Error::Integrity("missing checksum".into()))?;
        let body = doc
            .get("engine")
            .ok_or_else(|| Error::Integrity("missing engine state".into()))?;
        let actual = digest(body);
        if actual != recorded {
            return Err(Error::Integrity(format!(
                "checksum mismatch: recorded {recorded}, computed {actual}"
            )));
        }
        let snapshot: StreamSnapshot = serde_json::from_value(doc)
            .map_err(|e| Error::Integrity(format!("malformed engine state: {e}")))?;
        if snapshot.engine.has_pending_level() {
            return Err(Error::Integrity("snapshot holds an unconsumed level".into()));
        }
        Ok(snapshot)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Atomic replace: write `<path>.tmp`, fsync, rename.
    pub fn save(&self, path: &Path) -> Result<()> {
        let text = self.to_json()?;
        let tmp = sibling(path, "tmp");
        let mut f = File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        f.write_all(text.as_bytes())
            .and_then(|_| f.sync_all())
            .map_err(|e| Error::io(&tmp, e))?;
        drop(f);
        fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }
}

fn sibling(path: &Path, ext: &str) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".");
    name.push(ext);
    PathBuf::from(name)
}

/// `alpha_{t+1}` for a checkpointed stream, without mutating anything.
pub fn next_level_preview(snapshot: &StreamSnapshot) -> Result<f64> {
    snapshot.verify()?;
    Ok(snapshot.engine.peek_level())
}

/// Advisory lock held as `<state>.lock` for the lifetime of the value.
#[derive(Debug)]
pub struct StateLock {
    path: PathBuf,
}

impl StateLock {
    pub fn acquire(state: &Path) -> Result<Self> {
        let path = sibling(state, "lock");
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                Ok(StateLock { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                Err(Error::Locked(state.to_path_buf()))
            }
            Err(e) => Err(Error::io(&path, e)),
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

impl Drop for StateLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

/// A locked, checkpointed stream: one writer per state file.
///
/// Every [`StreamSession::step`] persists the new state before returning, so
/// interrupting after any completed step leaves a resumable checkpoint.
#[derive(Debug)]
pub struct StreamSession {
    engine: Engine,
    state: PathBuf,
    _lock: StateLock,
}

impl StreamSession {
    /// Resumes from `state` if it exists, otherwise starts a fresh stream
    /// from `config`. When both exist the resolved configurations must agree.
    pub fn open(state: &Path, config: Option<&ProcedureConfig>) -> Result<Self> {
        let lock = StateLock::acquire(state)?;
        let engine = if state.exists() {
            let engine = StreamSnapshot::load(state)?.restore()?;
            if let Some(cfg) = config {
                let wanted = cfg.resolve()?;
                if &wanted != engine.config() {
                    return Err(Error::Integrity(format!(
                        "{} was created with a different configuration",
                        state.display()
                    )));
                }
            }
            engine
        } else {
            let cfg = config.ok_or_else(|| {
                Error::Input(format!(
                    "{} does not exist and no procedure was given",
                    state.display()
                ))
            })?;
            let engine = Engine::new(cfg)?;
            StreamSnapshot::capture(&engine)?.save(state)?;
            engine
        };
        Ok(StreamSession {
            engine,
            state: state.to_path_buf(),
            _lock: lock,
        })
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn step(&mut self, rec: &PValueRecord) -> Result<LogRecord> {
        let expected = self.engine.t() + 1;
        if rec.t != expected {
            return Err(Error::Sequence {
                expected,
                got: rec.t,
            });
        }
        rec.validate()?;
        let mut next = self.engine.clone();
        let out = step(&mut next, rec)?;
        StreamSnapshot::capture(&next)?.save(&self.state)?;
        self.engine = next;
        Ok(out)
    }

    /// Checks that `records` continue this stream contiguously and are valid.
    pub fn check(&self, records: &[PValueRecord]) -> Result<()> {
        let start = self.engine.t() + 1;
        for (i, rec) in records.iter().enumerate() {
            if rec.t != start + i as u64 {
                return Err(Error::Sequence {
                    expected: start + i as u64,
                    got: rec.t,
                });
            }
            rec.validate()?;
        }
        Ok(())
    }

    /// Validates the whole batch, then steps through it.
    pub fn run(&mut self, records: &[PValueRecord]) -> Result<Vec<LogRecord>> {
        self.check(records)?;
        records.iter().map(|r| self.step(r)).collect()
    }
}
