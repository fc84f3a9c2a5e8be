//! Calculus-tagged proof traces, stored as JSON lines: a header line
//! `{"calculus":...}` followed by one step per line.

use std::fmt;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{AnnError, AnnLit, Assignment, AxiomError, DeltaError, SigmaError};
use crate::qbf::Lit;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Calculus {
    #[serde(rename = "QRES")]
    QRes,
    #[serde(rename = "QURES")]
    QuRes,
    #[serde(rename = "IRCALC")]
    IrCalc,
    #[serde(rename = "IRCALC_SIGMA")]
    IrCalcSigma,
    #[serde(rename = "IRCALC_DELTA_SIGMA")]
    IrCalcDeltaSigma,
}

impl Calculus {
    pub fn is_ircalc(self) -> bool {
        matches!(
            self,
            Calculus::IrCalc | Calculus::IrCalcSigma | Calculus::IrCalcDeltaSigma
        )
    }
}

impl fmt::Display for Calculus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit enum");
        f.write_str(s.as_str().unwrap_or("?"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Rule {
    Axiom,
    Res,
    Fac,
    #[serde(rename = "UNIVRED")]
    UnivRed,
    Inst,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::Axiom => "AXIOM",
            Rule::Res => "RES",
            Rule::Fac => "FAC",
            Rule::UnivRed => "UNIVRED",
            Rule::Inst => "INST",
        };
        f.write_str(s)
    }
}

/// One proof step. `L` is the literal type: plain literals for Q-res and
/// QU-res, annotated literals for the IR-calc family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound(deserialize = "L: Deserialize<'de>"))]
pub struct QbfStep<L> {
    pub id: usize,
    pub rule: Rule,
    #[serde(default)]
    pub prem: Vec<usize>,
    /// Pivot of RES, reduced literal of UNIVRED, factored literal of FAC.
    #[serde(default = "Option::default", skip_serializing_if = "Option::is_none")]
    pub pivot: Option<L>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assign: Option<Assignment>,
    /// Matrix clause index of an AXIOM.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axiom: Option<usize>,
    /// Index into the flattened Δ clauses of an AXIOM.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ext: Option<usize>,
    pub clause: Vec<L>,
}

impl<L> QbfStep<L> {
    pub fn axiom(id: usize, index: usize, clause: Vec<L>) -> Self {
        QbfStep {
            id,
            rule: Rule::Axiom,
            prem: vec![],
            pivot: None,
            assign: None,
            axiom: Some(index),
            ext: None,
            clause,
        }
    }

    pub fn ext_axiom(id: usize, index: usize, clause: Vec<L>) -> Self {
        QbfStep {
            id,
            rule: Rule::Axiom,
            prem: vec![],
            pivot: None,
            assign: None,
            axiom: None,
            ext: Some(index),
            clause,
        }
    }

    pub fn res(id: usize, a: usize, b: usize, pivot: L, clause: Vec<L>) -> Self {
        QbfStep {
            id,
            rule: Rule::Res,
            prem: vec![a, b],
            pivot: Some(pivot),
            assign: None,
            axiom: None,
            ext: None,
            clause,
        }
    }

    pub fn fac(id: usize, a: usize, lit: L, clause: Vec<L>) -> Self {
        QbfStep {
            id,
            rule: Rule::Fac,
            prem: vec![a],
            pivot: Some(lit),
            assign: None,
            axiom: None,
            ext: None,
            clause,
        }
    }

    pub fn univ_red(id: usize, a: usize, lit: L, clause: Vec<L>) -> Self {
        QbfStep {
            id,
            rule: Rule::UnivRed,
            prem: vec![a],
            pivot: Some(lit),
            assign: None,
            axiom: None,
            ext: None,
            clause,
        }
    }

    pub fn inst(id: usize, a: usize, t: Assignment, clause: Vec<L>) -> Self {
        QbfStep {
            id,
            rule: Rule::Inst,
            prem: vec![a],
            pivot: None,
            assign: Some(t),
            axiom: None,
            ext: None,
            clause,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QbfTrace<L> {
    pub calculus: Calculus,
    pub steps: Vec<QbfStep<L>>,
}

pub type QresTrace = QbfTrace<Lit>;
pub type IrTrace = QbfTrace<AnnLit>;

#[derive(Serialize, Deserialize)]
struct Header {
    calculus: Calculus,
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("empty trace file")]
    Empty,
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
}

impl<L: Serialize + DeserializeOwned> QbfTrace<L> {
    pub fn new(calculus: Calculus) -> Self {
        QbfTrace {
            calculus,
            steps: Vec::new(),
        }
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::to_string(&Header {
            calculus: self.calculus,
        })
        .expect("serializable");
        out.push('\n');
        for s in &self.steps {
            out.push_str(&serde_json::to_string(s).expect("serializable"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, TraceError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (i, first) = lines.next().ok_or(TraceError::Empty)?;
        let header: Header = serde_json::from_str(first).map_err(|source| TraceError::Json {
            line: i + 1,
            source,
        })?;
        let mut steps = Vec::new();
        for (i, l) in lines {
            steps.push(serde_json::from_str(l).map_err(|source| TraceError::Json {
                line: i + 1,
                source,
            })?);
        }
        Ok(QbfTrace {
            calculus: header.calculus,
            steps,
        })
    }
}

impl<L> QbfTrace<L> {
    /// Appends a step with the next id and returns that id.
    pub fn push(&mut self, mut step: QbfStep<L>) -> usize {
        step.id = self.steps.len();
        self.steps.push(step);
        self.steps.len() - 1
    }

    pub fn metrics(&self) -> QbfMetrics {
        let mut uses = vec![0usize; self.steps.len()];
        for s in &self.steps {
            for &p in &s.prem {
                if p < uses.len() {
                    uses[p] += 1;
                }
            }
        }
        let tree_form = self
            .steps
            .iter()
            .zip(&uses)
            .all(|(s, &u)| s.rule == Rule::Axiom || u <= 1);
        QbfMetrics {
            clause_count: self.steps.len(),
            literal_count: self.steps.iter().map(|s| s.clause.len()).sum(),
            max_width: self.steps.iter().map(|s| s.clause.len()).max().unwrap_or(0),
            tree_form,
        }
    }
}

impl<L: fmt::Display> QbfTrace<L> {
    /// Σ of the displayed clause lengths, with `[]` for the empty clause.
    pub fn size(&self) -> usize {
        self.steps
            .iter()
            .map(|s| fmt_clause(&s.clause).chars().count())
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QbfMetrics {
    pub clause_count: usize,
    pub literal_count: usize,
    pub max_width: usize,
    pub tree_form: bool,
}

/// What went wrong in a step.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Failure {
    #[error("step id {got} out of sequence (expected {expected})")]
    BadId { expected: usize, got: usize },
    #[error("expected {expected} premises, found {got}")]
    PremiseCount { expected: usize, got: usize },
    #[error("premise {0} does not precede this step")]
    ForwardPremise(usize),
    #[error("missing payload field `{0}`")]
    MissingPayload(&'static str),
    #[error("rule not available in this calculus")]
    RuleNotAllowed,
    #[error("axiom index {0} out of range")]
    AxiomIndex(usize),
    #[error("axiom: {0}")]
    Axiom(#[from] AxiomError),
    #[error("pivot {0} is universal but universal pivots are not allowed")]
    UniversalPivot(String),
    #[error("pivot {0} does not occur in the first premise")]
    PivotMissing(String),
    #[error("complement of pivot {0} does not occur in the second premise")]
    ComplementMissing(String),
    #[error("pivot annotations differ: {0} vs {1}")]
    AnnotationMismatch(String, String),
    #[error("resolvent would contain the complementary pair on {0}")]
    ComplementaryPair(String),
    #[error("literal {0} does not occur twice")]
    NotDuplicate(String),
    #[error("reduced literal {0} is not universal")]
    NotUniversal(String),
    #[error("existential {e} has level {le}, not below level {lm} of {m}")]
    ReductionLevel {
        e: String,
        le: usize,
        m: String,
        lm: usize,
    },
    #[error("variable {0} is not in the prefix")]
    UnknownVar(String),
    #[error("instantiation: {0}")]
    Inst(#[from] AnnError),
    #[error("recorded clause {got} differs from derived {expected}")]
    WrongResult { expected: String, got: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("step {step} ({rule}): {failure}")]
pub struct StepError {
    pub step: usize,
    pub rule: Rule,
    pub failure: Failure,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error("trace is tagged {got}, checker expects {expected}")]
    Calculus { expected: String, got: Calculus },
    #[error("trace has no steps")]
    Empty,
    #[error(transparent)]
    Step(#[from] StepError),
    #[error("invalid σ_v: {0}")]
    Sigma(#[from] SigmaError),
    #[error("invalid Δ: {0}")]
    Delta(#[from] DeltaError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QbfReport {
    pub calculus: Calculus,
    /// Every step checked and the last clause is empty.
    pub refutation: bool,
    pub metrics: QbfMetrics,
}

pub(crate) fn fmt_clause<L: fmt::Display>(c: &[L]) -> String {
    if c.is_empty() {
        return "[]".into();
    }
    c.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Multiset equality of two literal lists.
pub(crate) fn same_multiset<L: Ord + Clone>(a: &[L], b: &[L]) -> bool {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort();
    y.sort();
    x == y
}

/// Removes one occurrence of `l`; `None` if absent.
pub(crate) fn remove_one<L: PartialEq + Clone>(c: &[L], l: &L) -> Option<Vec<L>> {
    let pos = c.iter().position(|m| m == l)?;
    let mut out = c.to_vec();
    out.remove(pos);
    Some(out)
}

/// Checks id sequencing and premise ordering common to all calculi.
pub(crate) fn check_shape<L>(i: usize, s: &QbfStep<L>) -> Result<(), Failure> {
    if s.id != i {
        return Err(Failure::BadId {
            expected: i,
            got: s.id,
        });
    }
    let expected = match s.rule {
        Rule::Axiom => 0,
        Rule::Res => 2,
        Rule::Fac | Rule::UnivRed | Rule::Inst => 1,
    };
    if s.prem.len() != expected {
        return Err(Failure::PremiseCount {
            expected,
            got: s.prem.len(),
        });
    }
    if let Some(&p) = s.prem.iter().find(|&&p| p >= i) {
        return Err(Failure::ForwardPremise(p));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qbf::Var;

    #[test]
    fn jsonl_roundtrip_is_bit_exact() {
        let mut t: IrTrace = QbfTrace::new(Calculus::IrCalc);
        let e = AnnLit::new(Lit::pos(Var(2)), Assignment::from_pairs([(Var(1), false)]));
        t.push(QbfStep::axiom(0, 0, vec![e.clone()]));
        t.push(QbfStep::inst(
            0,
            0,
            Assignment::from_pairs([(Var(1), true)]),
            vec![e.clone()],
        ));
        let text = t.to_jsonl();
        assert_eq!(
            text.lines().nth(1).unwrap(),
            r#"{"id":0,"rule":"AXIOM","prem":[],"axiom":0,"clause":[{"lit":2,"ann":{"1":0}}]}"#
        );
        let back = IrTrace::from_jsonl(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_jsonl(), text);
    }

    #[test]
    fn metrics_tree_form() {
        let mut t: QresTrace = QbfTrace::new(Calculus::QRes);
        let a = Lit::pos(Var(1));
        t.push(QbfStep::axiom(0, 0, vec![a]));
        t.push(QbfStep::axiom(0, 1, vec![a.negate()]));
        t.push(QbfStep::res(0, 0, 1, a, vec![]));
        assert!(t.metrics().tree_form);
        assert_eq!(t.size(), "1".len() + "-1".len() + "[]".len());
        t.push(QbfStep::fac(0, 2, a, vec![]));
        t.push(QbfStep::fac(0, 2, a, vec![]));
        assert!(!t.metrics().tree_form);
        assert_eq!(t.metrics().clause_count, 5);
    }
}
