//! Online false discovery rate control over unbounded p-value streams.
//!
//! Hypotheses arrive one at a time. Before each p-value is revealed the
//! engine commits to a test level `alpha_t` computed from past decisions
//! only; the hypothesis is rejected when `p <= alpha_t`. The procedures
//! differ in how they turn past rejections into future levels:
//!
//! | name             | rule                                                   |
//! |------------------|--------------------------------------------------------|
//! | `uncorrected`    | `alpha_t = alpha` (no multiplicity control)            |
//! | `alpha-spending` | `alpha_t = alpha * gamma_t` (online Bonferroni)        |
//! | `gai++`          | alpha-investing with the GAI++ payout cap              |
//! | `lord`           | LORD++: every rejection re-funds future levels         |
//! | `saffron`        | LORD++ that only pays for non-candidates (`p > lambda`)|
//! | `addis`          | SAFFRON that also discards `p > eta` for free          |
//!
//! The crate is organised as:
//!
//! * [`engine`]: the level-then-feed contract and the shared record types.
//! * [`gamma`]: normalised spending sequences `{gamma_t}`.
//! * [`procedures`]: the level rules and the alpha-wealth ledger.
//! * [`metrics`]: FDP/FDR/mFDR/FDX/FWER/power scoring and offline BH.
//! * [`simlab`]: Gaussian-means stream generator and Monte Carlo runner.
//! * [`io`]: stream protocol, snapshots, CSV ingestion, reports and the
//!   bundled STAMPEDE case study.
//!
//! ```
//! use onlinefdr::{Engine, ProcedureConfig, ProcedureName};
//!
//! let config = ProcedureConfig::new(ProcedureName::Lord, 0.05);
//! let mut engine = Engine::new(&config).unwrap();
//! for p in [0.2, 1e-6, 0.04] {
//!     let decision = engine.test(p).unwrap();
//!     println!("t={} alpha={:.5} rejected={}", decision.t, decision.alpha, decision.rejected);
//! }
//! ```
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod engine;
pub mod error;
pub mod gamma;
pub mod io;
pub mod metrics;
pub mod procedures;
pub mod simlab;

pub use engine::{DecisionRecord, Engine, PValueRecord, StreamSummary};
pub use error::{Error, Result};
pub use gamma::{GammaSequence, GammaSpec};
pub use procedures::{ProcedureConfig, ProcedureName, W0};

/// Absolute tolerance for wealth and level equality guards.
pub const TOLERANCE: f64 = 1e-12;
