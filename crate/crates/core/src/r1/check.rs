use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{factor, resolve, R1Rule, R1Step, R1Trace, RuleError};
use crate::fol::{is_variant, subsumes, FolClause, FreshVars};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofMetrics {
    /// Σ of canonical clause lengths over all steps.
    pub size: usize,
    pub clause_count: usize,
    /// Every non-input step is used at most once as a premise.
    pub tree_form: bool,
}

pub fn proof_metrics(proof: &R1Trace) -> ProofMetrics {
    let mut uses = vec![0usize; proof.steps.len()];
    for s in &proof.steps {
        for &p in &s.prem {
            if p < uses.len() {
                uses[p] += 1;
            }
        }
    }
    ProofMetrics {
        size: proof.steps.iter().map(|s| s.clause.size()).sum(),
        clause_count: proof.steps.len(),
        tree_form: proof
            .steps
            .iter()
            .zip(&uses)
            .all(|(s, &u)| s.rule == R1Rule::Input || u <= 1),
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum R1Failure {
    #[error("step id {got} out of sequence (expected {expected})")]
    BadId { expected: usize, got: usize },
    #[error("wrong number of premises or pivots")]
    Shape,
    #[error("premise {0} does not precede this step")]
    ForwardPremise(usize),
    #[error("clause is not a variant of any input clause")]
    NotAnInput,
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error("recorded clause {got} is not a variant of {expected}")]
    NotVariant { expected: String, got: String },
    #[error("subsumption steps are not allowed here")]
    SubsumptionNotAllowed,
    #[error("{by} does not subsume {clause}")]
    NotSubsumed { by: String, clause: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("step {step} ({rule}): {failure}")]
pub struct R1StepError {
    pub step: usize,
    pub rule: R1Rule,
    pub failure: R1Failure,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum R1CheckError {
    #[error("trace has no steps")]
    Empty,
    #[error(transparent)]
    Step(#[from] R1StepError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct R1Report {
    /// Every step checked and the last clause is □.
    pub refutation: bool,
    pub metrics: ProofMetrics,
}

/// Validates every step of `proof` against `inputs`. Recomputed factors and
/// resolvents are compared with the recorded clause up to variants. SUBSUME
/// steps are accepted only if `allow_subsumption` is set and the trace is
/// flagged as R1 plus subsumption.
pub fn check_r1(
    inputs: &[FolClause],
    proof: &R1Trace,
    allow_subsumption: bool,
) -> Result<R1Report, R1CheckError> {
    if proof.steps.is_empty() {
        return Err(R1CheckError::Empty);
    }
    let mut fresh = FreshVars::new();
    for (i, s) in proof.steps.iter().enumerate() {
        let fail = |failure: R1Failure| R1StepError {
            step: i,
            rule: s.rule,
            failure,
        };
        check_step(
            inputs,
            proof,
            i,
            allow_subsumption && proof.subsumption,
            &mut fresh,
        )
        .map_err(fail)?;
    }
    Ok(R1Report {
        refutation: proof.last().is_some_and(FolClause::is_empty),
        metrics: proof_metrics(proof),
    })
}

fn shape(s: &R1Step, prem: usize, pivots: usize) -> Result<(), R1Failure> {
    if s.prem.len() != prem || s.pivots.len() != pivots {
        return Err(R1Failure::Shape);
    }
    Ok(())
}

fn variant_or(expected: &FolClause, got: &FolClause) -> Result<(), R1Failure> {
    if is_variant(expected, got) {
        Ok(())
    } else {
        Err(R1Failure::NotVariant {
            expected: expected.to_string(),
            got: got.to_string(),
        })
    }
}

fn check_step(
    inputs: &[FolClause],
    proof: &R1Trace,
    i: usize,
    subs: bool,
    fresh: &mut FreshVars,
) -> Result<(), R1Failure> {
    let s = &proof.steps[i];
    if s.id != i {
        return Err(R1Failure::BadId {
            expected: i,
            got: s.id,
        });
    }
    if let Some(&p) = s.prem.iter().find(|&&p| p >= i) {
        return Err(R1Failure::ForwardPremise(p));
    }
    let prem = |k: usize| proof.clause(s.prem[k]);
    match s.rule {
        R1Rule::Input => {
            shape(s, 0, 0)?;
            if !inputs.iter().any(|c| is_variant(c, &s.clause)) {
                return Err(R1Failure::NotAnInput);
            }
        }
        R1Rule::Factor => {
            shape(s, 1, 2)?;
            let (r, _) = factor(prem(0), &s.pivots[0], &s.pivots[1])?;
            variant_or(&r, &s.clause)?;
        }
        R1Rule::Resolve => {
            shape(s, 2, 2)?;
            let r = resolve(prem(0), prem(1), &s.pivots[0], &s.pivots[1], fresh)?;
            variant_or(&r.clause, &s.clause)?;
        }
        R1Rule::Subsume => {
            if !subs {
                return Err(R1Failure::SubsumptionNotAllowed);
            }
            let by = match s.prem.len() {
                1 if s.pivots.is_empty() => prem(0).clone(),
                2 if s.pivots.len() == 2 => {
                    resolve(prem(0), prem(1), &s.pivots[0], &s.pivots[1], fresh)?.clause
                }
                _ => return Err(R1Failure::Shape),
            };
            let witnessed = s.prem.len() == 1
                && s.subst
                    .as_ref()
                    .is_some_and(|w| by.apply(w).is_subset_of(&s.clause));
            if !witnessed && subsumes(&by, &s.clause).is_none() {
                return Err(R1Failure::NotSubsumed {
                    by: by.to_string(),
                    clause: s.clause.to_string(),
                });
            }
        }
    }
    Ok(())
}
