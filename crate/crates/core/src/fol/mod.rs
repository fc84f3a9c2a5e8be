//! First-order clause language: terms, literals, clauses and substitutions.

mod json;
pub mod model;
mod unify;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

pub use json::{clause_from_json, clause_to_json, subst_from_json, subst_to_json, FolJsonError};
pub use unify::{
    is_variant, match_clause, match_clause_onto, mgu, mgu_atoms, mgu_literals, mgu_terms,
    rename_apart, subsumes, tidy_variables, FreshVars, UnifyError,
};

/// Interned-by-value symbol name.
pub type Symbol = Arc<str>;

pub fn sym(s: &str) -> Symbol {
    Arc::from(s)
}

/// Reserved constant for falsity.
pub const FALSE_CONST: &str = "f0";
/// Reserved constant for truth.
pub const TRUE_CONST: &str = "f1";
/// The unary truth predicate.
pub const TRUTH_PRED: &str = "p";

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Symbol),
    App(Symbol, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(sym(name))
    }

    pub fn constant(name: &str) -> Term {
        Term::App(sym(name), Vec::new())
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App(sym(name), args)
    }

    pub fn f0() -> Term {
        Term::constant(FALSE_CONST)
    }

    pub fn f1() -> Term {
        Term::constant(TRUE_CONST)
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn occurs(&self, v: &str) -> bool {
        match self {
            Term::Var(x) => &**x == v,
            Term::App(_, args) => args.iter().any(|a| a.occurs(v)),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn apply(&self, s: &Subst) -> Term {
        if s.is_empty() {
            return self.clone();
        }
        match self {
            Term::Var(x) => s.get(x).cloned().unwrap_or_else(|| self.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.apply(s)).collect()),
        }
    }

    /// Nesting depth of function applications; variables and constants are 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => args.iter().map(|a| a.depth() + 1).max().unwrap_or(0),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => f.write_str(x),
            Term::App(g, args) => {
                f.write_str(g)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

/// Literal `(¬)P(t₁,…,tₖ)`. Field order makes complementary literals sort
/// next to each other.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub pred: Symbol,
    pub args: Vec<Term>,
    pub negated: bool,
}

impl Literal {
    pub fn new(negated: bool, pred: &str, args: Vec<Term>) -> Self {
        Literal {
            pred: sym(pred),
            args,
            negated,
        }
    }

    pub fn pos(pred: &str, args: Vec<Term>) -> Self {
        Literal::new(false, pred, args)
    }

    pub fn neg(pred: &str, args: Vec<Term>) -> Self {
        Literal::new(true, pred, args)
    }

    /// `p(t)` for the truth predicate.
    pub fn p(negated: bool, t: Term) -> Self {
        Literal::new(negated, TRUTH_PRED, vec![t])
    }

    pub fn negate(&self) -> Self {
        Literal {
            negated: !self.negated,
            ..self.clone()
        }
    }

    pub fn is_complement_of(&self, other: &Literal) -> bool {
        self.negated != other.negated && self.pred == other.pred && self.args == other.args
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Symbol>) {
        self.args.iter().for_each(|a| a.collect_vars(out));
    }

    pub fn apply(&self, s: &Subst) -> Literal {
        Literal {
            pred: self.pred.clone(),
            args: self.args.iter().map(|a| a.apply(s)).collect(),
            negated: self.negated,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("~")?;
        }
        Term::App(self.pred.clone(), self.args.clone()).fmt(f)
    }
}

/// A first-order clause in set form.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FolClause {
    lits: Vec<Literal>,
}

impl FolClause {
    pub fn new(lits: impl IntoIterator<Item = Literal>) -> Self {
        let set: BTreeSet<Literal> = lits.into_iter().collect();
        FolClause {
            lits: set.into_iter().collect(),
        }
    }

    pub fn empty() -> Self {
        FolClause::default()
    }

    pub fn lits(&self) -> &[Literal] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn contains(&self, l: &Literal) -> bool {
        self.lits.binary_search(l).is_ok()
    }

    pub fn is_tautology(&self) -> bool {
        self.lits.windows(2).any(|w| w[0].is_complement_of(&w[1]))
    }

    pub fn is_subset_of(&self, other: &FolClause) -> bool {
        self.lits.iter().all(|l| other.contains(l))
    }

    pub fn vars(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.lits.iter().for_each(|l| l.collect_vars(&mut out));
        out
    }

    pub fn is_ground(&self) -> bool {
        self.lits.iter().all(Literal::is_ground)
    }

    pub fn apply(&self, s: &Subst) -> FolClause {
        FolClause::new(self.lits.iter().map(|l| l.apply(s)))
    }

    /// Removes the given literal (if present).
    pub fn without(&self, l: &Literal) -> FolClause {
        FolClause {
            lits: self.lits.iter().filter(|m| *m != l).cloned().collect(),
        }
    }

    pub fn union(&self, other: &FolClause) -> FolClause {
        FolClause::new(self.lits.iter().chain(other.lits.iter()).cloned())
    }

    /// Length of the canonical serialization, the unit of proof size.
    pub fn size(&self) -> usize {
        self.to_string().chars().count()
    }
}

impl FromIterator<Literal> for FolClause {
    fn from_iter<I: IntoIterator<Item = Literal>>(iter: I) -> Self {
        FolClause::new(iter)
    }
}

impl fmt::Display for FolClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lits.is_empty() {
            return f.write_str("[]");
        }
        for (i, l) in self.lits.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Finite substitution. Identity bindings are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subst {
    map: BTreeMap<Symbol, Term>,
}

impl Subst {
    pub fn new() -> Self {
        Subst::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Symbol, Term)>) -> Self {
        let mut s = Subst::new();
        for (v, t) in pairs {
            s.insert(v, t);
        }
        s
    }

    pub fn singleton(v: &str, t: Term) -> Self {
        Subst::from_pairs([(sym(v), t)])
    }

    /// Adds `v\t`, silently skipping `v\v`.
    pub fn insert(&mut self, v: Symbol, t: Term) {
        if matches!(&t, Term::Var(x) if *x == v) {
            self.map.remove(&v);
        } else {
            self.map.insert(v, t);
        }
    }

    pub fn get(&self, v: &str) -> Option<&Term> {
        self.map.get(v)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &Term)> {
        self.map.iter()
    }

    pub fn domain(&self) -> BTreeSet<Symbol> {
        self.map.keys().cloned().collect()
    }

    pub fn range(&self) -> Vec<&Term> {
        self.map.values().collect()
    }

    pub fn range_vars(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.map.values().for_each(|t| t.collect_vars(&mut out));
        out
    }

    /// Every binding maps to a variable.
    pub fn is_variable_subst(&self) -> bool {
        self.map.values().all(Term::is_var)
    }

    /// A variable substitution that is a bijection of its domain.
    pub fn is_permutation(&self) -> bool {
        if !self.is_variable_subst() {
            return false;
        }
        let targets: BTreeSet<Symbol> = self.range_vars();
        targets.len() == self.map.len() && targets == self.domain()
    }

    /// A variable substitution that is injective on the variables of `vars`
    /// (so applying it to an expression over `vars` gives a variant).
    pub fn is_renaming_of(&self, vars: &BTreeSet<Symbol>) -> bool {
        if !self.is_variable_subst() {
            return false;
        }
        let mut seen = BTreeSet::new();
        for v in vars {
            let image = match self.get(v) {
                Some(Term::Var(x)) => x.clone(),
                Some(_) => return false,
                None => v.clone(),
            };
            if !seen.insert(image) {
                return false;
            }
        }
        true
    }

    /// The restriction of `self` to the given variables.
    pub fn restrict(&self, vars: &BTreeSet<Symbol>) -> Subst {
        Subst {
            map: self
                .map
                .iter()
                .filter(|(k, _)| vars.contains(*k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }
}

impl fmt::Display for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}\\{t}")?;
        }
        f.write_str("}")
    }
}

/// Composition: the substitution `r` with `e r = (e t) m` for every `e`.
/// Range of `t` is instantiated by `m`, bindings of `m` on `dom(t)` are
/// dropped, identities are dropped.
pub fn compose(t: &Subst, m: &Subst) -> Subst {
    let mut out = Subst::new();
    for (x, s) in t.iter() {
        out.insert(x.clone(), s.apply(m));
    }
    for (y, s) in m.iter() {
        if t.get(y).is_none() {
            out.insert(y.clone(), s.clone());
        }
    }
    out
}

pub fn apply_subst_term(t: &Term, s: &Subst) -> Term {
    t.apply(s)
}

pub fn apply_subst_literal(l: &Literal, s: &Subst) -> Literal {
    l.apply(s)
}

pub fn apply_subst_clause(c: &FolClause, s: &Subst) -> FolClause {
    c.apply(s)
}

/// Renders a clause in TPTP CNF syntax (best effort).
pub fn to_tptp(name: &str, c: &FolClause) -> String {
    fn fix_fun(s: &str) -> String {
        let s: String = s
            .chars()
            .map(|c| {
                if c.is_alphanumeric() || c == '_' {
                    c
                } else {
                    '_'
                }
            })
            .collect();
        match s.chars().next() {
            Some(c) if c.is_ascii_lowercase() => s,
            _ => format!("s_{s}"),
        }
    }
    fn fix_var(s: &str) -> String {
        let s: String = s
            .chars()
            .map(|c| {
                if c.is_alphanumeric() || c == '_' {
                    c
                } else {
                    '_'
                }
            })
            .collect();
        match s.chars().next() {
            Some(c) if c.is_ascii_uppercase() => s,
            _ => format!("V{s}"),
        }
    }
    fn term(t: &Term) -> String {
        match t {
            Term::Var(x) => fix_var(x),
            Term::App(f, args) if args.is_empty() => fix_fun(f),
            Term::App(f, args) => format!(
                "{}({})",
                fix_fun(f),
                args.iter().map(term).collect::<Vec<_>>().join(",")
            ),
        }
    }
    let body = if c.is_empty() {
        "$false".to_string()
    } else {
        c.lits()
            .iter()
            .map(|l| {
                let atom = term(&Term::App(l.pred.clone(), l.args.clone()));
                if l.negated {
                    format!("~{atom}")
                } else {
                    atom
                }
            })
            .collect::<Vec<_>>()
            .join(" | ")
    };
    format!("cnf({}, axiom, ({body})).", fix_fun(name))
}
