//! QBF proof systems: Q-res, QU-res and IR-calc with its σ_v and Δ
//! extensions. This module holds the annotation machinery; the checkers
//! live in [`qres`] and [`ircalc`].

pub mod ircalc;
pub mod qres;
pub mod trace;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qbf::{BinOp, Clause, Lit, PcnfFormula, Prefix, Quant, Var};

pub use trace::{
    Calculus, CheckError, Failure, IrTrace, QbfMetrics, QbfReport, QbfStep, QbfTrace, QresTrace,
    Rule, StepError, TraceError,
};

/// Partial map from universal variables to {0,1}.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment(pub BTreeMap<Var, bool>);

impl Assignment {
    pub fn new() -> Self {
        Assignment::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, bool)>) -> Self {
        Assignment(pairs.into_iter().collect())
    }

    pub fn get(&self, v: Var) -> Option<bool> {
        self.0.get(&v).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, bool)> + '_ {
        self.0.iter().map(|(&v, &b)| (v, b))
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.0.keys().copied()
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, b)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}\\{}", u8::from(b))?;
        }
        f.write_str("}")
    }
}

impl Serialize for Assignment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (v, b) in self.iter() {
            m.serialize_entry(&v.0.to_string(), &u8::from(b))?;
        }
        m.end()
    }
}

impl<'de> Deserialize<'de> for Assignment {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = BTreeMap::<String, u8>::deserialize(d)?;
        let mut out = BTreeMap::new();
        for (k, v) in raw {
            let id: u32 = k
                .parse()
                .map_err(|_| D::Error::custom(format!("bad variable `{k}`")))?;
            if id == 0 {
                return Err(D::Error::custom("variable 0"));
            }
            let b = match v {
                0 => false,
                1 => true,
                _ => return Err(D::Error::custom(format!("value {v} is not 0 or 1"))),
            };
            out.insert(Var(id), b);
        }
        Ok(Assignment(out))
    }
}

/// Existential literal with an annotation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AnnLit {
    pub lit: Lit,
    pub ann: Assignment,
}

impl AnnLit {
    pub fn new(lit: Lit, ann: Assignment) -> Self {
        AnnLit { lit, ann }
    }

    pub fn plain(lit: Lit) -> Self {
        AnnLit {
            lit,
            ann: Assignment::new(),
        }
    }

    pub fn negate(&self) -> Self {
        AnnLit {
            lit: self.lit.negate(),
            ann: self.ann.clone(),
        }
    }
}

impl fmt::Display for AnnLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.lit, self.ann)
    }
}

/// Annotated clause in set form.
pub type AnnClause = Vec<AnnLit>;

pub fn normalize_ann(mut c: Vec<AnnLit>) -> AnnClause {
    c.sort();
    c.dedup();
    c
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnnError {
    #[error("literal {0} is universal")]
    UniversalLiteral(Lit),
    #[error("variable {0} is not in the prefix")]
    Unknown(Var),
    #[error("assignment binds non-universal variable {0}")]
    NonUniversal(Var),
}

/// `τ↾ℓ`: the bindings of `a` below the level of `lit`.
pub fn restrict(a: &Assignment, lit: Lit, prefix: &Prefix) -> Result<Assignment, AnnError> {
    let lv = prefix.level(lit.var).ok_or(AnnError::Unknown(lit.var))?;
    if prefix.quant(lit.var) == Some(Quant::Forall) {
        return Err(AnnError::UniversalLiteral(lit));
    }
    Ok(Assignment(
        a.0.iter()
            .filter(|(u, _)| prefix.level(**u).is_some_and(|l| l < lv))
            .map(|(&u, &b)| (u, b))
            .collect(),
    ))
}

/// Completion of `m` by `t`: `m` wins where both are defined.
pub fn complete(m: &Assignment, t: &Assignment) -> Assignment {
    let mut out = t.0.clone();
    out.extend(m.0.iter().map(|(&v, &b)| (v, b)));
    Assignment(out)
}

fn check_universal_domain(t: &Assignment, prefix: &Prefix) -> Result<(), AnnError> {
    for v in t.vars() {
        match prefix.quant(v) {
            Some(Quant::Forall) => {}
            Some(Quant::Exists) => return Err(AnnError::NonUniversal(v)),
            None => return Err(AnnError::Unknown(v)),
        }
    }
    Ok(())
}

/// `inst(τ, C)`: every annotation completed by `τ`, then restricted again.
/// Works on the multiset reading; no factoring happens here.
pub fn inst(t: &Assignment, c: &[AnnLit], prefix: &Prefix) -> Result<Vec<AnnLit>, AnnError> {
    check_universal_domain(t, prefix)?;
    c.iter()
        .map(|l| {
            Ok(AnnLit::new(
                l.lit,
                restrict(&complete(&l.ann, t), l.lit, prefix)?,
            ))
        })
        .collect()
}

/// Global substitution of universals by existentials of lower level.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaV(pub BTreeMap<Var, Var>);

impl SigmaV {
    pub fn new() -> Self {
        SigmaV::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, Var)>) -> Self {
        SigmaV(pairs.into_iter().collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, v: Var) -> Option<Var> {
        self.0.get(&v).copied()
    }

    /// Polarity-preserving application to a literal.
    pub fn apply(&self, l: Lit) -> Lit {
        match self.get(l.var) {
            Some(e) => Lit {
                var: e,
                negated: l.negated,
            },
            None => l,
        }
    }
}

/// Companion file form: `{"sigma_v": {"x": e}}` with variable ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaVFile {
    pub sigma_v: BTreeMap<String, u32>,
}

impl From<&SigmaV> for SigmaVFile {
    fn from(s: &SigmaV) -> Self {
        SigmaVFile {
            sigma_v: s.0.iter().map(|(x, e)| (x.0.to_string(), e.0)).collect(),
        }
    }
}

impl TryFrom<SigmaVFile> for SigmaV {
    type Error = String;

    fn try_from(f: SigmaVFile) -> Result<Self, String> {
        let mut out = BTreeMap::new();
        for (k, e) in f.sigma_v {
            let x: u32 = k.parse().map_err(|_| format!("bad variable `{k}`"))?;
            out.insert(Var(x), Var(e));
        }
        Ok(SigmaV(out))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SigmaError {
    #[error("{0} is not a universal variable")]
    NotUniversal(Var),
    #[error("{0} is not an existential variable")]
    NotExistential(Var),
    #[error("level of {e} ({le}) is not below level of {x} ({lx})")]
    Level {
        x: Var,
        e: Var,
        lx: usize,
        le: usize,
    },
}

/// Every binding `x\e` needs `x` universal, `e` existential, `lv(e) < lv(x)`.
pub fn validate_sigma_v(prefix: &Prefix, sv: &SigmaV) -> Result<(), SigmaError> {
    for (&x, &e) in &sv.0 {
        if prefix.quant(x) != Some(Quant::Forall) {
            return Err(SigmaError::NotUniversal(x));
        }
        if prefix.quant(e) != Some(Quant::Exists) {
            return Err(SigmaError::NotExistential(e));
        }
        let (lx, le) = (
            prefix.level(x).expect("known"),
            prefix.level(e).expect("known"),
        );
        if le >= lx {
            return Err(SigmaError::Level { x, e, lx, le });
        }
    }
    Ok(())
}

/// Connective of an extension definition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DefOp {
    Not,
    And,
    Or,
    Implies,
    Iff,
    Xor,
}

impl DefOp {
    pub fn arity(self) -> usize {
        if self == DefOp::Not {
            1
        } else {
            2
        }
    }

    pub fn bin(op: BinOp) -> Self {
        match op {
            BinOp::And => DefOp::And,
            BinOp::Or => DefOp::Or,
            BinOp::Implies => DefOp::Implies,
            BinOp::Iff => DefOp::Iff,
            BinOp::Xor => DefOp::Xor,
        }
    }
}

/// `q ↔ F` with `F` being `¬a` or `a ∘ b` over existential literals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Definition {
    pub op: DefOp,
    pub args: Vec<Lit>,
}

/// Clausal form of `q ↔ F`.
pub fn definition_clauses(q: Var, def: &Definition) -> Vec<Clause> {
    let qp = Lit::pos(q);
    let qn = Lit::neg(q);
    let a = def.args[0];
    let c = |ls: &[Lit]| Clause::new(ls.iter().copied());
    match def.op {
        DefOp::Not => vec![c(&[qp, a]), c(&[qn, a.negate()])],
        _ => {
            let b = def.args[1];
            let (na, nb) = (a.negate(), b.negate());
            match def.op {
                DefOp::And => vec![c(&[qn, a]), c(&[qn, b]), c(&[qp, na, nb])],
                DefOp::Or => vec![c(&[qp, na]), c(&[qp, nb]), c(&[qn, a, b])],
                DefOp::Implies => vec![c(&[qp, a]), c(&[qp, nb]), c(&[qn, na, b])],
                DefOp::Iff => vec![
                    c(&[qn, na, b]),
                    c(&[qn, a, nb]),
                    c(&[qp, a, b]),
                    c(&[qp, na, nb]),
                ],
                DefOp::Xor => vec![
                    c(&[qn, a, b]),
                    c(&[qn, na, nb]),
                    c(&[qp, na, b]),
                    c(&[qp, a, nb]),
                ],
                DefOp::Not => unreachable!(),
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extension {
    pub var: Var,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub def: Definition,
    pub clauses: Vec<Clause>,
    /// 1-based block index the extension variable is placed in.
    pub level: usize,
}

/// The sequence Δ of extensions, in definition order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionSeq {
    pub delta: Vec<Extension>,
}

impl ExtensionSeq {
    pub fn is_empty(&self) -> bool {
        self.delta.is_empty()
    }

    /// All Δ clauses flattened in order; trace axioms refer to these indices.
    pub fn clauses(&self) -> Vec<Clause> {
        self.delta
            .iter()
            .flat_map(|e| e.clauses.iter().cloned())
            .collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DeltaError {
    #[error("extension {index}: variable {var} is not fresh")]
    NotFresh { index: usize, var: Var },
    #[error("extension {index}: definition needs {expected} arguments")]
    Arity { index: usize, expected: usize },
    #[error("extension {index}: argument variable {var} is not existential")]
    NonExistentialArg { index: usize, var: Var },
    #[error("extension {index}: definition refers to its own variable")]
    SelfReference { index: usize },
    #[error("extension {index}: clauses are not the clausal form of the definition")]
    WrongClauses { index: usize },
    #[error("extension {index}: placed at level {given}, minimal level is {minimal}")]
    Placement {
        index: usize,
        given: usize,
        minimal: usize,
    },
}

/// Checks Δ against `f` and returns the prefix extended by the `q_i`.
pub fn validate_delta(f: &PcnfFormula, delta: &ExtensionSeq) -> Result<Prefix, DeltaError> {
    let mut prefix = f.prefix.clone();
    let mut used: BTreeSet<Var> = f.prefix.vars().collect();
    used.extend(f.matrix.iter().flat_map(|c| c.vars()));
    for (index, ext) in delta.delta.iter().enumerate() {
        let q = ext.var;
        if used.contains(&q) {
            return Err(DeltaError::NotFresh { index, var: q });
        }
        if ext.def.args.len() != ext.def.op.arity() {
            return Err(DeltaError::Arity {
                index,
                expected: ext.def.op.arity(),
            });
        }
        let mut minimal = 1;
        for a in &ext.def.args {
            if a.var == q {
                return Err(DeltaError::SelfReference { index });
            }
            if prefix.quant(a.var) != Some(Quant::Exists) {
                return Err(DeltaError::NonExistentialArg { index, var: a.var });
            }
            minimal = minimal.max(prefix.level(a.var).expect("existential"));
        }
        let want: BTreeSet<Clause> = definition_clauses(q, &ext.def).into_iter().collect();
        let got: BTreeSet<Clause> = ext.clauses.iter().cloned().collect();
        if want != got || got.len() != ext.clauses.len() {
            return Err(DeltaError::WrongClauses { index });
        }
        if ext.level != minimal {
            return Err(DeltaError::Placement {
                index,
                given: ext.level,
                minimal,
            });
        }
        prefix.insert_at(q, minimal).expect("fresh variable");
        used.insert(q);
    }
    Ok(prefix)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AxiomError {
    #[error("clause is tautological")]
    Tautology,
    #[error("clause becomes tautological under σ_v")]
    TautologyUnderSigma,
    #[error("extension clause contains universal variable {0}")]
    DeltaUniversal(Var),
    #[error(transparent)]
    Ann(#[from] AnnError),
}

/// The IR-calc axiom on `c`: universal literals are first replaced through
/// `sv`; the remaining universals contribute falsifying bindings; the
/// existential literals carry the restricted binding set. The result is
/// factored. For extension clauses the binding set is empty.
pub fn ircalc_axiom(
    c: &Clause,
    prefix: &Prefix,
    sv: &SigmaV,
    from_delta: bool,
) -> Result<AnnClause, AxiomError> {
    if c.is_tautology() {
        return Err(AxiomError::Tautology);
    }
    for v in c.vars() {
        if !prefix.contains(v) {
            return Err(AnnError::Unknown(v).into());
        }
    }
    if from_delta {
        if let Some(v) = c.vars().find(|&v| prefix.is_universal(v)) {
            return Err(AxiomError::DeltaUniversal(v));
        }
        return Ok(normalize_ann(
            c.lits().iter().map(|&l| AnnLit::plain(l)).collect(),
        ));
    }
    let image = Clause::new(c.lits().iter().map(|&l| {
        if prefix.is_universal(l.var) {
            sv.apply(l)
        } else {
            l
        }
    }));
    if image.is_tautology() {
        return Err(AxiomError::TautologyUnderSigma);
    }
    let sigma = Assignment(
        image
            .lits()
            .iter()
            .filter(|l| prefix.is_universal(l.var))
            .map(|l| (l.var, l.negated))
            .collect(),
    );
    let mut out = Vec::new();
    for &l in image.lits() {
        if prefix.is_existential(l.var) {
            out.push(AnnLit::new(l, restrict(&sigma, l, prefix)?));
        }
    }
    Ok(normalize_ann(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> Var {
        Var(i)
    }

    fn ue_u() -> Prefix {
        // ∀u1 ∃e ∀u2
        Prefix::merged([
            (Quant::Forall, vec![v(1)]),
            (Quant::Exists, vec![v(2)]),
            (Quant::Forall, vec![v(3)]),
        ])
        .unwrap()
    }

    #[test]
    fn restrict_keeps_lower_levels() {
        let a = Assignment::from_pairs([(v(1), false), (v(3), true)]);
        assert_eq!(
            restrict(&a, Lit::pos(v(2)), &ue_u()).unwrap(),
            Assignment::from_pairs([(v(1), false)])
        );
        assert_eq!(
            restrict(&Assignment::new(), Lit::pos(v(2)), &ue_u()).unwrap(),
            Assignment::new()
        );
        assert_eq!(
            restrict(&a, Lit::pos(v(1)), &ue_u()),
            Err(AnnError::UniversalLiteral(Lit::pos(v(1))))
        );
    }

    #[test]
    fn completion_prefers_first() {
        let m = Assignment::from_pairs([(v(1), false)]);
        let t = Assignment::from_pairs([(v(1), true), (v(2), false)]);
        assert_eq!(
            complete(&m, &t),
            Assignment::from_pairs([(v(1), false), (v(2), false)])
        );
        assert_eq!(complete(&Assignment::new(), &t), t);
        assert_eq!(complete(&t, &Assignment::new()), t);
    }

    #[test]
    fn inst_examples() {
        let p = ue_u();
        let e = Lit::pos(v(2));
        let u0 = Assignment::from_pairs([(v(1), false)]);
        let u1 = Assignment::from_pairs([(v(1), true)]);
        assert_eq!(
            inst(&u0, &[AnnLit::plain(e)], &p).unwrap(),
            vec![AnnLit::new(e, u0.clone())]
        );
        assert_eq!(
            inst(&u1, &[AnnLit::new(e, u0.clone())], &p).unwrap(),
            vec![AnnLit::new(e, u0)]
        );
        let late = Assignment::from_pairs([(v(3), false)]);
        assert_eq!(
            inst(&late, &[AnnLit::plain(e)], &p).unwrap(),
            vec![AnnLit::plain(e)]
        );
        let bad = Assignment::from_pairs([(v(2), false)]);
        assert_eq!(
            inst(&bad, &[AnnLit::plain(e)], &p),
            Err(AnnError::NonUniversal(v(2)))
        );
    }

    #[test]
    fn axiom_falsifies_universals() {
        // ∀x ∃e
        let p = Prefix::merged([(Quant::Forall, vec![v(1)]), (Quant::Exists, vec![v(2)])]).unwrap();
        let e = Lit::pos(v(2));
        let c = Clause::new([e, Lit::pos(v(1))]);
        assert_eq!(
            ircalc_axiom(&c, &p, &SigmaV::new(), false).unwrap(),
            vec![AnnLit::new(e, Assignment::from_pairs([(v(1), false)]))]
        );
        let c = Clause::new([e, Lit::neg(v(1))]);
        assert_eq!(
            ircalc_axiom(&c, &p, &SigmaV::new(), false).unwrap(),
            vec![AnnLit::new(e, Assignment::from_pairs([(v(1), true)]))]
        );
        let taut = Clause::new([e, e.negate()]);
        assert_eq!(
            ircalc_axiom(&taut, &p, &SigmaV::new(), false),
            Err(AxiomError::Tautology)
        );
    }

    #[test]
    fn axiom_under_sigma_merges_and_rejects_tautologies() {
        // ∃e ∀x ∃f
        let p = Prefix::merged([
            (Quant::Exists, vec![v(1)]),
            (Quant::Forall, vec![v(2)]),
            (Quant::Exists, vec![v(3)]),
        ])
        .unwrap();
        let sv = SigmaV::from_pairs([(v(2), v(1))]);
        let c = Clause::new([Lit::pos(v(1)), Lit::pos(v(2)), Lit::neg(v(3))]);
        assert_eq!(
            ircalc_axiom(&c, &p, &sv, false).unwrap(),
            vec![AnnLit::plain(Lit::pos(v(1))), AnnLit::plain(Lit::neg(v(3)))]
        );
        let t = Clause::new([Lit::neg(v(1)), Lit::pos(v(2))]);
        assert_eq!(
            ircalc_axiom(&t, &p, &sv, false),
            Err(AxiomError::TautologyUnderSigma)
        );
        assert_eq!(
            ircalc_axiom(&t, &p, &SigmaV::new(), true),
            Err(AxiomError::DeltaUniversal(v(2)))
        );
    }

    #[test]
    fn sigma_validation() {
        let p = Prefix::merged([
            (Quant::Exists, vec![v(1)]),
            (Quant::Forall, vec![v(2)]),
            (Quant::Exists, vec![v(3)]),
        ])
        .unwrap();
        assert!(validate_sigma_v(&p, &SigmaV::from_pairs([(v(2), v(1))])).is_ok());
        assert!(matches!(
            validate_sigma_v(&p, &SigmaV::from_pairs([(v(2), v(3))])),
            Err(SigmaError::Level { .. })
        ));
        assert_eq!(
            validate_sigma_v(&p, &SigmaV::from_pairs([(v(1), v(3))])),
            Err(SigmaError::NotUniversal(v(1)))
        );
        assert_eq!(
            validate_sigma_v(&p, &SigmaV::from_pairs([(v(2), v(2))])),
            Err(SigmaError::NotExistential(v(2)))
        );
    }

    fn small_f() -> PcnfFormula {
        // ∃d e ∀x ∃f
        let p = Prefix::merged([
            (Quant::Exists, vec![v(1), v(2)]),
            (Quant::Forall, vec![v(3)]),
            (Quant::Exists, vec![v(4)]),
        ])
        .unwrap();
        PcnfFormula::new(p, vec![Clause::new([Lit::pos(v(1)), Lit::pos(v(4))])])
    }

    fn q_def(level: usize) -> Extension {
        let def = Definition {
            op: DefOp::And,
            args: vec![Lit::neg(v(1)), Lit::pos(v(2))],
        };
        Extension {
            var: v(5),
            name: None,
            clauses: definition_clauses(v(5), &def),
            def,
            level,
        }
    }

    #[test]
    fn delta_template_matches_the_herbrand_definition() {
        let d = q_def(1);
        let want: BTreeSet<Clause> = [
            Clause::new([Lit::pos(v(5)), Lit::pos(v(1)), Lit::neg(v(2))]),
            Clause::new([Lit::neg(v(5)), Lit::neg(v(1))]),
            Clause::new([Lit::neg(v(5)), Lit::pos(v(2))]),
        ]
        .into_iter()
        .collect();
        assert_eq!(d.clauses.into_iter().collect::<BTreeSet<_>>(), want);
    }

    #[test]
    fn delta_validation() {
        let f = small_f();
        let p = validate_delta(
            &f,
            &ExtensionSeq {
                delta: vec![q_def(1)],
            },
        )
        .unwrap();
        assert_eq!(p.level(v(5)), Some(1));
        assert_eq!(
            validate_delta(
                &f,
                &ExtensionSeq {
                    delta: vec![q_def(3)]
                }
            ),
            Err(DeltaError::Placement {
                index: 0,
                given: 3,
                minimal: 1
            })
        );
        let mut stale = q_def(1);
        stale.var = v(4);
        stale.clauses = definition_clauses(v(4), &stale.def);
        assert!(matches!(
            validate_delta(&f, &ExtensionSeq { delta: vec![stale] }),
            Err(DeltaError::NotFresh { .. })
        ));
        let mut wrong = q_def(1);
        wrong.clauses.pop();
        assert!(matches!(
            validate_delta(&f, &ExtensionSeq { delta: vec![wrong] }),
            Err(DeltaError::WrongClauses { .. })
        ));
    }

    #[test]
    fn chained_extension() {
        let f = small_f();
        let first = q_def(1);
        let def = Definition {
            op: DefOp::Or,
            args: vec![Lit::pos(v(5)), Lit::pos(v(4))],
        };
        let second = Extension {
            var: v(6),
            name: None,
            clauses: definition_clauses(v(6), &def),
            def,
            level: 3,
        };
        let p = validate_delta(
            &f,
            &ExtensionSeq {
                delta: vec![first, second],
            },
        )
        .unwrap();
        assert_eq!(p.level(v(6)), Some(3));
    }

    #[test]
    fn templates_are_equivalences() {
        // Each template is satisfied exactly by assignments with q = F(a, b).
        for op in [
            DefOp::Not,
            DefOp::And,
            DefOp::Or,
            DefOp::Implies,
            DefOp::Iff,
            DefOp::Xor,
        ] {
            let args = if op == DefOp::Not {
                vec![Lit::pos(v(1))]
            } else {
                vec![Lit::pos(v(1)), Lit::pos(v(2))]
            };
            let def = Definition { op, args };
            let cs = definition_clauses(v(3), &def);
            for bits in 0..8u32 {
                let val = |x: Var| bits >> (x.0 - 1) & 1 == 1;
                let sat = cs
                    .iter()
                    .all(|c| c.lits().iter().any(|l| val(l.var) != l.negated));
                let (a, b, q) = (val(v(1)), val(v(2)), val(v(3)));
                let f = match op {
                    DefOp::Not => !a,
                    DefOp::And => a && b,
                    DefOp::Or => a || b,
                    DefOp::Implies => !a || b,
                    DefOp::Iff => a == b,
                    DefOp::Xor => a != b,
                };
                assert_eq!(sat, q == f, "{op:?} bits {bits}");
            }
        }
    }
}
