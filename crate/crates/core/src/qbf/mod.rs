//! Quantified Boolean formulas: a general syntax tree and the prenex CNF
//! specialisation with a leveled quantifier prefix.

mod eval;
mod json;
mod qdimacs;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use eval::{evaluate_pcnf, evaluate_qbf, EvalError, DEFAULT_VAR_BOUND};
pub use json::{PcnfJson, PcnfJsonError};
pub use qdimacs::{parse_qdimacs, write_qdimacs, ParseOptions, QdimacsError};

/// Propositional variable. Ids are positive and follow QDIMACS numbering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Var(pub u32);

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A variable or its negation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit {
    pub var: Var,
    pub negated: bool,
}

impl Lit {
    pub fn pos(var: Var) -> Self {
        Lit {
            var,
            negated: false,
        }
    }

    pub fn neg(var: Var) -> Self {
        Lit { var, negated: true }
    }

    pub fn negate(self) -> Self {
        Lit {
            var: self.var,
            negated: !self.negated,
        }
    }

    /// Builds a literal from a nonzero DIMACS integer.
    pub fn from_dimacs(x: i64) -> Option<Self> {
        if x == 0 || x.unsigned_abs() > u64::from(u32::MAX) {
            return None;
        }
        let var = Var(x.unsigned_abs() as u32);
        Some(if x < 0 { Lit::neg(var) } else { Lit::pos(var) })
    }

    pub fn to_dimacs(self) -> i64 {
        let v = i64::from(self.var.0);
        if self.negated {
            -v
        } else {
            v
        }
    }
}

impl Serialize for Lit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i64(self.to_dimacs())
    }
}

impl<'de> Deserialize<'de> for Lit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let x = i64::deserialize(d)?;
        Lit::from_dimacs(x)
            .ok_or_else(|| serde::de::Error::custom("literal must be a nonzero 32-bit integer"))
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A clause in set form: sorted, duplicate-free.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Self {
        normalize_clause(lits).0
    }

    pub fn empty() -> Self {
        Clause { lits: Vec::new() }
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.lits.binary_search(&lit).is_ok()
    }

    pub fn is_tautology(&self) -> bool {
        self.lits.windows(2).any(|w| w[0].var == w[1].var)
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.lits.iter().map(|l| l.var)
    }
}

impl FromIterator<Lit> for Clause {
    fn from_iter<I: IntoIterator<Item = Lit>>(iter: I) -> Self {
        Clause::new(iter)
    }
}

impl Serialize for Clause {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.lits().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Clause {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Clause::new(Vec::<Lit>::deserialize(d)?))
    }
}

/// Removes duplicate literals and reports whether the clause contains a
/// complementary pair.
pub fn normalize_clause(lits: impl IntoIterator<Item = Lit>) -> (Clause, bool) {
    let mut lits: Vec<Lit> = lits.into_iter().collect();
    lits.sort();
    lits.dedup();
    let clause = Clause { lits };
    let taut = clause.is_tautology();
    (clause, taut)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quant {
    Forall,
    Exists,
}

impl Quant {
    pub fn dual(self) -> Self {
        match self {
            Quant::Forall => Quant::Exists,
            Quant::Exists => Quant::Forall,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub quant: Quant,
    pub vars: Vec<Var>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PrefixError {
    #[error("quantifier block {0} is empty")]
    EmptyBlock(usize),
    #[error("blocks {0} and {1} have the same quantifier")]
    NoAlternation(usize, usize),
    #[error("variable {0} is quantified twice")]
    Duplicate(Var),
}

/// Quantifier prefix `Q_1 X_1 ... Q_k X_k` with alternating quantifiers.
/// Levels are 1-based block indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Prefix {
    blocks: Vec<Block>,
    levels: BTreeMap<Var, usize>,
}

impl Prefix {
    pub fn new(blocks: Vec<Block>) -> Result<Self, PrefixError> {
        let mut levels = BTreeMap::new();
        for (i, b) in blocks.iter().enumerate() {
            if b.vars.is_empty() {
                return Err(PrefixError::EmptyBlock(i + 1));
            }
            if i > 0 && blocks[i - 1].quant == b.quant {
                return Err(PrefixError::NoAlternation(i, i + 1));
            }
            for &v in &b.vars {
                if levels.insert(v, i + 1).is_some() {
                    return Err(PrefixError::Duplicate(v));
                }
            }
        }
        Ok(Prefix { blocks, levels })
    }

    /// Like [`Prefix::new`] but merges adjacent blocks with the same
    /// quantifier and drops empty blocks.
    pub fn merged(
        blocks: impl IntoIterator<Item = (Quant, Vec<Var>)>,
    ) -> Result<Self, PrefixError> {
        let mut out: Vec<Block> = Vec::new();
        for (quant, vars) in blocks {
            if vars.is_empty() {
                continue;
            }
            match out.last_mut() {
                Some(last) if last.quant == quant => last.vars.extend(vars),
                _ => out.push(Block { quant, vars }),
            }
        }
        Prefix::new(out)
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn level(&self, v: Var) -> Option<usize> {
        self.levels.get(&v).copied()
    }

    pub fn quant(&self, v: Var) -> Option<Quant> {
        self.level(v).map(|l| self.blocks[l - 1].quant)
    }

    pub fn is_universal(&self, v: Var) -> bool {
        self.quant(v) == Some(Quant::Forall)
    }

    pub fn is_existential(&self, v: Var) -> bool {
        self.quant(v) == Some(Quant::Exists)
    }

    pub fn contains(&self, v: Var) -> bool {
        self.levels.contains_key(&v)
    }

    /// Variables in prefix order.
    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.blocks.iter().flat_map(|b| b.vars.iter().copied())
    }

    pub fn num_vars(&self) -> usize {
        self.levels.len()
    }

    /// Universal variables strictly left of `v`, in prefix order.
    pub fn universals_before(&self, v: Var) -> Vec<Var> {
        let Some(level) = self.level(v) else {
            return Vec::new();
        };
        self.blocks[..level - 1]
            .iter()
            .filter(|b| b.quant == Quant::Forall)
            .flat_map(|b| b.vars.iter().copied())
            .collect()
    }

    /// Appends `v` to the block at `level`.
    pub(crate) fn insert_at(&mut self, v: Var, level: usize) -> Result<(), PrefixError> {
        if self.levels.contains_key(&v) {
            return Err(PrefixError::Duplicate(v));
        }
        self.blocks[level - 1].vars.push(v);
        self.levels.insert(v, level);
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("variable {0} does not occur in the prefix")]
pub struct UnknownVar(pub Var);

/// A formula in prenex conjunctive normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PcnfFormula {
    pub prefix: Prefix,
    pub matrix: Vec<Clause>,
    /// Optional display names; variables without one print as `v<id>`.
    pub names: BTreeMap<Var, String>,
    /// Declared variable count (QDIMACS header).
    pub num_vars: u32,
}

impl PcnfFormula {
    pub fn new(prefix: Prefix, matrix: Vec<Clause>) -> Self {
        let max_prefix = prefix.vars().map(|v| v.0).max().unwrap_or(0);
        let max_matrix = matrix
            .iter()
            .flat_map(|c| c.vars())
            .map(|v| v.0)
            .max()
            .unwrap_or(0);
        PcnfFormula {
            prefix,
            matrix,
            names: BTreeMap::new(),
            num_vars: max_prefix.max(max_matrix),
        }
    }

    pub fn with_names(mut self, names: BTreeMap<Var, String>) -> Self {
        self.names = names;
        self
    }

    pub fn name(&self, v: Var) -> String {
        self.names
            .get(&v)
            .cloned()
            .unwrap_or_else(|| format!("v{}", v.0))
    }

    pub fn var_by_name(&self, name: &str) -> Option<Var> {
        self.names
            .iter()
            .find(|(_, n)| n.as_str() == name)
            .map(|(&v, _)| v)
    }

    /// Matrix variables that are not bound by the prefix.
    pub fn free_vars(&self) -> BTreeSet<Var> {
        self.matrix
            .iter()
            .flat_map(|c| c.vars())
            .filter(|v| !self.prefix.contains(*v))
            .collect()
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn level_of(&self, lit: Lit) -> Result<usize, UnknownVar> {
        self.prefix.level(lit.var).ok_or(UnknownVar(lit.var))
    }

    pub fn fmt_lit(&self, lit: Lit) -> String {
        let n = self.name(lit.var);
        if lit.negated {
            format!("~{n}")
        } else {
            n
        }
    }

    pub fn fmt_clause(&self, c: &Clause) -> String {
        if c.is_empty() {
            return "[]".to_string();
        }
        c.lits()
            .iter()
            .map(|&l| self.fmt_lit(l))
            .collect::<Vec<_>>()
            .join(" | ")
    }

    /// The same formula as a syntax tree: prefix quantifiers over a
    /// conjunction of disjunctions (⊤ for an empty matrix, ⊥ for □).
    pub fn to_qbf(&self) -> Qbf {
        let clause_tree = |c: &Clause| {
            c.lits()
                .iter()
                .map(|l| {
                    let v = Qbf::Var(l.var);
                    if l.negated {
                        Qbf::Not(Box::new(v))
                    } else {
                        v
                    }
                })
                .reduce(|a, b| Qbf::Bin(BinOp::Or, Box::new(a), Box::new(b)))
                .unwrap_or(Qbf::Bot)
        };
        let mut body = self
            .matrix
            .iter()
            .map(clause_tree)
            .reduce(|a, b| Qbf::Bin(BinOp::And, Box::new(a), Box::new(b)))
            .unwrap_or(Qbf::Top);
        let bound: Vec<(Quant, Var)> = self
            .prefix
            .blocks()
            .iter()
            .flat_map(|b| b.vars.iter().map(move |&v| (b.quant, v)))
            .collect();
        for &(q, v) in bound.iter().rev() {
            body = Qbf::Quant(q, v, Box::new(body));
        }
        body
    }
}

/// `lv(ℓ)`: the block index of the literal's variable.
pub fn level_of(f: &PcnfFormula, lit: Lit) -> Result<usize, UnknownVar> {
    f.level_of(lit)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BinOp {
    And,
    Or,
    Implies,
    Iff,
    Xor,
}

impl BinOp {
    pub const ALL: [BinOp; 5] = [
        BinOp::And,
        BinOp::Or,
        BinOp::Implies,
        BinOp::Iff,
        BinOp::Xor,
    ];

    pub fn apply(self, a: bool, b: bool) -> bool {
        match self {
            BinOp::And => a && b,
            BinOp::Or => a || b,
            BinOp::Implies => !a || b,
            BinOp::Iff => a == b,
            BinOp::Xor => a != b,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::And => "&",
            BinOp::Or => "|",
            BinOp::Implies => "=>",
            BinOp::Iff => "<=>",
            BinOp::Xor => "<~>",
        }
    }
}

/// General (possibly non-prenex, possibly open) QBF.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Qbf {
    Var(Var),
    Top,
    Bot,
    Not(Box<Qbf>),
    Bin(BinOp, Box<Qbf>, Box<Qbf>),
    Quant(Quant, Var, Box<Qbf>),
}

impl Qbf {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Qbf) -> Qbf {
        Qbf::Not(Box::new(f))
    }

    pub fn bin(op: BinOp, a: Qbf, b: Qbf) -> Qbf {
        Qbf::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn forall(v: Var, f: Qbf) -> Qbf {
        Qbf::Quant(Quant::Forall, v, Box::new(f))
    }

    pub fn exists(v: Var, f: Qbf) -> Qbf {
        Qbf::Quant(Quant::Exists, v, Box::new(f))
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        fn go(f: &Qbf, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
            match f {
                Qbf::Var(v) => {
                    if !bound.contains(v) {
                        out.insert(*v);
                    }
                }
                Qbf::Top | Qbf::Bot => {}
                Qbf::Not(a) => go(a, bound, out),
                Qbf::Bin(_, a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Qbf::Quant(_, v, body) => {
                    bound.push(*v);
                    go(body, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// No variable is bound twice on one root-to-leaf path.
    pub fn is_rectified(&self) -> bool {
        fn go(f: &Qbf, bound: &mut Vec<Var>) -> bool {
            match f {
                Qbf::Var(_) | Qbf::Top | Qbf::Bot => true,
                Qbf::Not(a) => go(a, bound),
                Qbf::Bin(_, a, b) => go(a, bound) && go(b, bound),
                Qbf::Quant(_, v, body) => {
                    if bound.contains(v) {
                        return false;
                    }
                    bound.push(*v);
                    let ok = go(body, bound);
                    bound.pop();
                    ok
                }
            }
        }
        go(self, &mut Vec::new())
    }

    /// Number of connective and quantifier occurrences.
    pub fn logical_complexity(&self) -> usize {
        match self {
            Qbf::Var(_) | Qbf::Top | Qbf::Bot => 0,
            Qbf::Not(a) => 1 + a.logical_complexity(),
            Qbf::Bin(_, a, b) => 1 + a.logical_complexity() + b.logical_complexity(),
            Qbf::Quant(_, _, body) => 1 + body.logical_complexity(),
        }
    }

    /// All variables occurring free or bound.
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit_vars(&mut |v| {
            out.insert(v);
        });
        out
    }

    fn visit_vars(&self, f: &mut impl FnMut(Var)) {
        match self {
            Qbf::Var(v) => f(*v),
            Qbf::Top | Qbf::Bot => {}
            Qbf::Not(a) => a.visit_vars(f),
            Qbf::Bin(_, a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
            Qbf::Quant(_, v, body) => {
                f(*v);
                body.visit_vars(f);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(x: i64) -> Lit {
        Lit::from_dimacs(x).unwrap()
    }

    #[test]
    fn normalize_removes_duplicates() {
        let (c, taut) = normalize_clause([l(1), l(1), l(-2)]);
        assert_eq!(c.lits(), &[l(1), l(-2)]);
        assert!(!taut);
    }

    #[test]
    fn normalize_flags_tautology_without_dropping() {
        let (c, taut) = normalize_clause([l(1), l(-1)]);
        assert_eq!(c.len(), 2);
        assert!(taut);
    }

    #[test]
    fn normalize_empty_is_box() {
        let (c, taut) = normalize_clause([]);
        assert!(c.is_empty());
        assert!(!taut);
    }

    #[test]
    fn prefix_rejects_non_alternating_blocks() {
        let b = |q, v: u32| Block {
            quant: q,
            vars: vec![Var(v)],
        };
        assert_eq!(
            Prefix::new(vec![b(Quant::Exists, 1), b(Quant::Exists, 2)]),
            Err(PrefixError::NoAlternation(1, 2))
        );
        assert_eq!(
            Prefix::new(vec![b(Quant::Exists, 1), b(Quant::Forall, 1)]),
            Err(PrefixError::Duplicate(Var(1)))
        );
    }

    #[test]
    fn merged_prefix_joins_same_quantifier() {
        let p = Prefix::merged([
            (Quant::Forall, vec![Var(1)]),
            (Quant::Exists, vec![Var(2)]),
            (Quant::Exists, vec![Var(3)]),
        ])
        .unwrap();
        assert_eq!(p.blocks().len(), 2);
        assert_eq!(p.level(Var(3)), Some(2));
        assert_eq!(p.universals_before(Var(3)), vec![Var(1)]);
    }

    #[test]
    fn level_of_single_block() {
        let p = Prefix::merged([(Quant::Exists, vec![Var(1)])]).unwrap();
        let f = PcnfFormula::new(p, vec![Clause::new([l(1)])]);
        assert_eq!(level_of(&f, l(1)), Ok(1));
        assert_eq!(level_of(&f, l(2)), Err(UnknownVar(Var(2))));
    }

    #[test]
    fn rectification_is_per_path() {
        let x = Var(1);
        let ok = Qbf::bin(
            BinOp::And,
            Qbf::forall(x, Qbf::Var(x)),
            Qbf::exists(x, Qbf::Var(x)),
        );
        assert!(ok.is_rectified());
        let bad = Qbf::forall(x, Qbf::exists(x, Qbf::Var(x)));
        assert!(!bad.is_rectified());
    }

    #[test]
    fn free_vars_of_open_formula() {
        let f = Qbf::forall(
            Var(1),
            Qbf::bin(BinOp::Implies, Qbf::Var(Var(1)), Qbf::Var(Var(4))),
        );
        assert_eq!(f.free_vars().into_iter().collect::<Vec<_>>(), vec![Var(4)]);
        assert_eq!(f.logical_complexity(), 2);
    }
}
