//! Experiment configuration, seeded runs and reporting.

mod config;
mod generate;
mod reference;
mod run;
mod search;
mod verify;

pub use config::{Construction, Experiment, ExperimentConfig, Override};
pub use generate::{generate, red_target, Generated};
pub use reference::{BoundKind, ReferenceEntry, ReferenceTable};
pub use run::{run, RunOutput, CSV_HEADER, CSV_SCHEMA};
pub use search::{search_best, Candidate, GridPoint, SearchResult, MAX_BUDGET};
pub use verify::{verify_colouring, verify_witness, VerifySummary, WitnessVerdict};
