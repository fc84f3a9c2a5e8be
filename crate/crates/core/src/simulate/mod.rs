//! Proof transpilers from QBF calculi into first-order resolution.

mod ircalc;
mod qures;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculi::{CheckError, QbfMetrics};
use crate::fol::FolClause;
use crate::r1::{ElimError, ProofMetrics, R1CheckError, R1Trace};
use crate::translate::TranslateError;

pub use ircalc::{full_pipeline_to_r1, ircalc_clause_image, simulate_ircalc_to_r1subs, Pipeline};
pub use qures::simulate_qures_to_r1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimConfig {
    /// Check the per-step correspondence invariants while building.
    pub check_invariants: bool,
    /// Start of the fresh-variable counter used for renaming apart.
    pub fresh_offset: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            check_invariants: true,
            fresh_offset: 0,
        }
    }
}

/// Where one source step landed in the target. An empty `targets` list is
/// an explicit no-op (the target clause of the premise is reused).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepMap {
    pub source: usize,
    pub targets: Vec<usize>,
    /// Target step holding the clause that corresponds to the source clause.
    pub image: usize,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub source: QbfMetrics,
    pub target: ProofMetrics,
    pub mapping: Vec<StepMap>,
    /// Target clause count over source clause count.
    pub overhead_ratio: f64,
}

impl SimulationReport {
    pub(crate) fn new(source: QbfMetrics, target: ProofMetrics, mapping: Vec<StepMap>) -> Self {
        let overhead_ratio = target.clause_count as f64 / source.clause_count.max(1) as f64;
        SimulationReport {
            source,
            target,
            mapping,
            overhead_ratio,
        }
    }
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("source proof rejected: {0}")]
    SourceRejected(#[from] CheckError),
    #[error("source proof is not a refutation")]
    NotRefutation,
    #[error("source calculus {0} is not supported here")]
    Calculus(String),
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error("source step {step}: pivot occurs {count} times; factor first")]
    Unfactored { step: usize, count: usize },
    #[error("source step {step}: invariant violated: {msg}")]
    Invariant { step: usize, msg: String },
    #[error("target proof rejected: {0}")]
    Target(#[from] R1CheckError),
    #[error(transparent)]
    Elim(#[from] ElimError),
}

/// A transpiled proof with its report.
#[derive(Clone, Debug)]
pub struct Simulation {
    /// The wrapped input clause set the target refutes.
    pub inputs: Vec<FolClause>,
    pub trace: R1Trace,
    pub report: SimulationReport,
}
