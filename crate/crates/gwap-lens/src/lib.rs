//! Telemetry analytics for games with a purpose (GWAPs).
//!
//! The crate turns raw per-answer contribution logs into reconstructed task
//! solutions and a full evaluation report: classical GWAP indicators
//! (throughput, ALP, EC), engagement metrics and clusters, participation vs.
//! accuracy player profiles, and statistical comparisons across incentive
//! periods, task difficulty and task categories. A deterministic archetype
//! simulator provides planted ground truth for end-to-end validation.
//!
//! Pipeline in one breath:
//!
//! ```text
//! CSV log -> ingest -> truth inference -> metrics / engagement / profiles
//!                                      -> statistics -> AnalysisReport
//! ```
//!
//! Every stage is a pure function of its inputs; fixed inputs produce
//! byte-identical serialized reports. See the `examples/` directory for one
//! runnable example per capability, or the `gwap-lens` binary for the
//! file-in/file-out interface.

pub mod engagement;
pub mod ingest;
pub mod metrics;
pub mod profiles;
pub mod report;
pub mod simulator;
pub mod stats;
pub mod truth;

pub use ingest::{
    CategoryId, CategorySet, ContributionEvent, EventLog, IncentivePeriod, IngestError,
    Motivation, PeriodConfig, PlayerId, RoundId, RoundRecord, TaskId, Timestamp,
};
// pub use report::{AnalysisOptions, AnalysisReport};
pub use truth::{InferenceConfig, TaskResolution, TaskStatus};

/// Crate version, embedded in report provenance blocks.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
