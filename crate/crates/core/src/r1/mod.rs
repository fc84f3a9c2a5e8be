//! First-order resolution deductions (R1) with an optional subsumption
//! rule: traces, the two inference rules, a checker and the elimination of
//! subsumption steps.

mod check;
mod elim;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fol::{mgu_atoms, rename_apart, FolClause, FreshVars, Literal, Subst, UnifyError};

pub use check::{
    check_r1, proof_metrics, ProofMetrics, R1CheckError, R1Failure, R1Report, R1StepError,
};
pub use elim::{eliminate_subsumption, ElimError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum R1Rule {
    Input,
    Factor,
    Resolve,
    Subsume,
}

impl fmt::Display for R1Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            R1Rule::Input => "INPUT",
            R1Rule::Factor => "FACTOR",
            R1Rule::Resolve => "RESOLVE",
            R1Rule::Subsume => "SUBSUME",
        })
    }
}

/// One deduction step. FACTOR names the two merged literals of its premise;
/// RESOLVE names a literal of each premise. SUBSUME either has one premise
/// `C` (with an optional witness `σ`, `Cσ ⊆ clause`) or two premises plus
/// pivots, in which case the recomputed resolvent must subsume `clause`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct R1Step {
    pub id: usize,
    pub rule: R1Rule,
    #[serde(default)]
    pub prem: Vec<usize>,
    #[serde(default)]
    pub pivots: Vec<Literal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subst: Option<Subst>,
    pub clause: FolClause,
}

impl R1Step {
    pub fn input(clause: FolClause) -> Self {
        R1Step {
            id: 0,
            rule: R1Rule::Input,
            prem: vec![],
            pivots: vec![],
            subst: None,
            clause,
        }
    }

    pub fn factor(j: usize, k: Literal, l: Literal, clause: FolClause) -> Self {
        R1Step {
            id: 0,
            rule: R1Rule::Factor,
            prem: vec![j],
            pivots: vec![k, l],
            subst: None,
            clause,
        }
    }

    pub fn resolve(i: usize, j: usize, k: Literal, l: Literal, clause: FolClause) -> Self {
        R1Step {
            id: 0,
            rule: R1Rule::Resolve,
            prem: vec![i, j],
            pivots: vec![k, l],
            subst: None,
            clause,
        }
    }

    pub fn subsume(j: usize, sigma: Option<Subst>, clause: FolClause) -> Self {
        R1Step {
            id: 0,
            rule: R1Rule::Subsume,
            prem: vec![j],
            pivots: vec![],
            subst: sigma,
            clause,
        }
    }

    pub fn subsume_resolvent(
        i: usize,
        j: usize,
        k: Literal,
        l: Literal,
        clause: FolClause,
    ) -> Self {
        R1Step {
            id: 0,
            rule: R1Rule::Subsume,
            prem: vec![i, j],
            pivots: vec![k, l],
            subst: None,
            clause,
        }
    }
}

/// An R1 deduction; `subsumption` marks an R1-plus-subsumption trace.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct R1Trace {
    pub subsumption: bool,
    pub steps: Vec<R1Step>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    calculus: String,
}

#[derive(Debug, Error)]
pub enum R1TraceError {
    #[error("empty trace file")]
    Empty,
    #[error("unknown system tag {0:?} (expected R1 or R1SUBS)")]
    Tag(String),
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
}

impl R1Trace {
    pub fn new(subsumption: bool) -> Self {
        R1Trace {
            subsumption,
            steps: Vec::new(),
        }
    }

    /// Appends a step with the next id and returns that id.
    pub fn push(&mut self, mut step: R1Step) -> usize {
        step.id = self.steps.len();
        self.steps.push(step);
        self.steps.len() - 1
    }

    pub fn clause(&self, i: usize) -> &FolClause {
        &self.steps[i].clause
    }

    pub fn last(&self) -> Option<&FolClause> {
        self.steps.last().map(|s| &s.clause)
    }

    pub fn to_jsonl(&self) -> String {
        let tag = if self.subsumption { "R1SUBS" } else { "R1" };
        let mut out = serde_json::to_string(&Header {
            calculus: tag.into(),
        })
        .expect("serializable");
        out.push('\n');
        for s in &self.steps {
            out.push_str(&serde_json::to_string(s).expect("serializable"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, R1TraceError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (i, first) = lines.next().ok_or(R1TraceError::Empty)?;
        let h: Header = serde_json::from_str(first).map_err(|source| R1TraceError::Json {
            line: i + 1,
            source,
        })?;
        let subsumption = match h.calculus.as_str() {
            "R1" => false,
            "R1SUBS" => true,
            other => return Err(R1TraceError::Tag(other.into())),
        };
        let mut steps = Vec::new();
        for (i, l) in lines {
            steps.push(
                serde_json::from_str(l).map_err(|source| R1TraceError::Json {
                    line: i + 1,
                    source,
                })?,
            );
        }
        Ok(R1Trace { subsumption, steps })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("literal {0} is not in the premise")]
    NotInClause(String),
    #[error("the same literal was chosen twice")]
    SameLiteral,
    #[error("literals {0} and {1} have the wrong polarities")]
    Polarity(String, String),
    #[error("literals {0} and {1} have different predicates")]
    Predicate(String, String),
    #[error("atoms do not unify: {0}")]
    Unify(#[from] UnifyError),
}

/// A factor of `c`: `c·mgu(k, l)` for two distinct literals of the same
/// polarity and predicate.
pub fn factor(c: &FolClause, k: &Literal, l: &Literal) -> Result<(FolClause, Subst), RuleError> {
    for x in [k, l] {
        if !c.contains(x) {
            return Err(RuleError::NotInClause(x.to_string()));
        }
    }
    if k == l {
        return Err(RuleError::SameLiteral);
    }
    if k.negated != l.negated {
        return Err(RuleError::Polarity(k.to_string(), l.to_string()));
    }
    if k.pred != l.pred {
        return Err(RuleError::Predicate(k.to_string(), l.to_string()));
    }
    let s = mgu_atoms(k, l)?;
    Ok((c.apply(&s), s))
}

/// Outcome of a binary resolution step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resolvent {
    pub clause: FolClause,
    /// Renaming applied to the second parent.
    pub renaming: Subst,
    /// Most general unifier of the pivot atoms after renaming.
    pub mgu: Subst,
}

/// The resolvent of `c` and `d` on `k ∈ c` and `l ∈ d`. `d` is renamed
/// apart from `c` first; the result is `(cσ ∖ {kσ}) ∪ (d′σ ∖ {l′σ})`.
pub fn resolve(
    c: &FolClause,
    d: &FolClause,
    k: &Literal,
    l: &Literal,
    fresh: &mut FreshVars,
) -> Result<Resolvent, RuleError> {
    if !c.contains(k) {
        return Err(RuleError::NotInClause(k.to_string()));
    }
    if !d.contains(l) {
        return Err(RuleError::NotInClause(l.to_string()));
    }
    if k.negated == l.negated {
        return Err(RuleError::Polarity(k.to_string(), l.to_string()));
    }
    if k.pred != l.pred {
        return Err(RuleError::Predicate(k.to_string(), l.to_string()));
    }
    let avoid: BTreeSet<_> = c.vars();
    let (d2, renaming) = rename_apart(d, &avoid, fresh);
    let l2 = l.apply(&renaming);
    let mgu = mgu_atoms(k, &l2)?;
    let ks = k.apply(&mgu);
    let ls = l2.apply(&mgu);
    let left = c.apply(&mgu).without(&ks);
    let right = d2.apply(&mgu).without(&ls);
    Ok(Resolvent {
        clause: left.union(&right),
        renaming,
        mgu,
    })
}
