//! QBF to first-order translation, Skolemization, EPR rewriting and the
//! satisfiability-preserving wrapper.

mod iso;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fol::{sym, FolClause, Literal, Symbol, Term, FALSE_CONST, TRUE_CONST, TRUTH_PRED};
use crate::qbf::{BinOp, Clause, Lit, PcnfFormula, Qbf, Quant, Var};

pub use iso::{iso_check, iso_check_clauses};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TranslateError {
    #[error("formula is not rectified")]
    NotRectified,
    #[error("formula is open: variable {0} is free")]
    Open(Var),
    #[error("symbol `{0}` is used for two different variables")]
    NameCollision(String),
    #[error("symbol `{0}` clashes with a reserved symbol")]
    Reserved(String),
    #[error("clause {0} is not in skolemized form: {1}")]
    NotSkolemized(usize, String),
}

/// First-order formula tree produced by the direct translation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FoFormula {
    Atom(Literal),
    Not(Box<FoFormula>),
    Bin(BinOp, Box<FoFormula>, Box<FoFormula>),
    Quant(Quant, String, Box<FoFormula>),
}

/// Object variable used for a QBF variable with display name `name`.
pub fn object_var_name(name: &str) -> String {
    name.to_uppercase()
}

pub fn skolem_name(name: &str) -> String {
    format!("f_{name}")
}

pub fn epr_pred_name(name: &str) -> String {
    format!("p_{name}")
}

const RESERVED: [&str; 3] = [TRUTH_PRED, FALSE_CONST, TRUE_CONST];

/// Symbols of one translation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolMap {
    object_vars: BTreeMap<Var, Symbol>,
    /// Existential variable to (Skolem symbol, dependency list).
    skolem: BTreeMap<Var, (Symbol, Vec<Var>)>,
    epr: BTreeMap<Var, Symbol>,
}

impl SymbolMap {
    /// Builds the symbol map of a PCNF formula (every prefix variable gets
    /// an object variable, every existential a Skolem symbol).
    pub fn for_pcnf(f: &PcnfFormula) -> Result<Self, TranslateError> {
        let mut sm = SymbolMap::default();
        let mut seen: HashMap<String, Var> = HashMap::new();
        let mut claim = |s: &str, v: Var| -> Result<(), TranslateError> {
            if RESERVED.contains(&s) {
                return Err(TranslateError::Reserved(s.to_string()));
            }
            match seen.insert(s.to_string(), v) {
                Some(w) if w != v => Err(TranslateError::NameCollision(s.to_string())),
                _ => Ok(()),
            }
        };
        for v in f.prefix.vars() {
            let name = f.name(v);
            let ov = object_var_name(&name);
            claim(&ov, v)?;
            sm.object_vars.insert(v, sym(&ov));
            if f.prefix.is_existential(v) {
                let sk = skolem_name(&name);
                claim(&sk, v)?;
                let ep = epr_pred_name(&name);
                claim(&ep, v)?;
                sm.skolem
                    .insert(v, (sym(&sk), f.prefix.universals_before(v)));
                sm.epr.insert(v, sym(&ep));
            }
        }
        Ok(sm)
    }

    pub fn object_var(&self, v: Var) -> Option<&Symbol> {
        self.object_vars.get(&v)
    }

    pub fn skolem_symbol(&self, v: Var) -> Option<&Symbol> {
        self.skolem.get(&v).map(|(s, _)| s)
    }

    /// `dep(a)`: the universals left of `a`, in prefix order.
    pub fn deps(&self, v: Var) -> Option<&[Var]> {
        self.skolem.get(&v).map(|(_, d)| d.as_slice())
    }

    pub fn arity(&self, v: Var) -> Option<usize> {
        self.deps(v).map(<[Var]>::len)
    }

    pub fn epr_pred(&self, v: Var) -> Option<&Symbol> {
        self.epr.get(&v)
    }

    pub fn is_existential(&self, v: Var) -> bool {
        self.skolem.contains_key(&v)
    }

    /// The Skolem term `f_a(X_dep(a))`.
    pub fn skolem_term(&self, v: Var) -> Option<Term> {
        let (s, deps) = self.skolem.get(&v)?;
        let args = deps
            .iter()
            .map(|u| Term::Var(self.object_vars[u].clone()))
            .collect();
        Some(Term::App(s.clone(), args))
    }

    /// Image of a QBF literal in the skolemized (or EPR) clause language.
    pub fn literal_image(&self, lit: Lit, epr: bool) -> Option<Literal> {
        let v = lit.var;
        if let Some((s, deps)) = self.skolem.get(&v) {
            let args: Vec<Term> = deps
                .iter()
                .map(|u| Term::Var(self.object_vars[u].clone()))
                .collect();
            if epr && !args.is_empty() {
                return Some(Literal {
                    pred: self.epr[&v].clone(),
                    args,
                    negated: lit.negated,
                });
            }
            return Some(Literal::p(lit.negated, Term::App(s.clone(), args)));
        }
        let x = self.object_vars.get(&v)?;
        Some(Literal::p(lit.negated, Term::Var(x.clone())))
    }

    pub fn clause_image(&self, c: &Clause, epr: bool) -> Option<FolClause> {
        c.lits()
            .iter()
            .map(|&l| self.literal_image(l, epr))
            .collect()
    }

    /// Existential variable whose Skolem symbol is `s`.
    pub fn var_of_skolem(&self, s: &str) -> Option<Var> {
        self.skolem
            .iter()
            .find(|(_, (k, _))| &**k == s)
            .map(|(&v, _)| v)
    }

    /// Existential variable whose EPR predicate is `s`.
    pub fn var_of_epr(&self, s: &str) -> Option<Var> {
        self.epr.iter().find(|(_, k)| &***k == s).map(|(&v, _)| v)
    }

    pub fn var_of_object(&self, s: &str) -> Option<Var> {
        self.object_vars
            .iter()
            .find(|(_, k)| &***k == s)
            .map(|(&v, _)| v)
    }
}

/// The direct translation: ⊥ ↦ p(f₀), ⊤ ↦ p(f₁), x ↦ p(x), with connectives
/// and quantifiers kept in place.
pub fn qbf_to_fo(f: &Qbf, names: &BTreeMap<Var, String>) -> Result<FoFormula, TranslateError> {
    if !f.is_rectified() {
        return Err(TranslateError::NotRectified);
    }
    let name = |v: Var| {
        object_var_name(
            names
                .get(&v)
                .map(String::as_str)
                .unwrap_or(&format!("v{}", v.0)),
        )
    };
    let mut used: HashMap<String, Var> = HashMap::new();
    for v in f.vars() {
        let n = name(v);
        if let Some(w) = used.insert(n.clone(), v) {
            if w != v {
                return Err(TranslateError::NameCollision(n));
            }
        }
    }
    fn go(f: &Qbf, name: &dyn Fn(Var) -> String) -> FoFormula {
        match f {
            Qbf::Var(v) => FoFormula::Atom(Literal::p(false, Term::var(&name(*v)))),
            Qbf::Top => FoFormula::Atom(Literal::p(false, Term::f1())),
            Qbf::Bot => FoFormula::Atom(Literal::p(false, Term::f0())),
            Qbf::Not(a) => FoFormula::Not(Box::new(go(a, name))),
            Qbf::Bin(op, a, b) => FoFormula::Bin(*op, Box::new(go(a, name)), Box::new(go(b, name))),
            Qbf::Quant(q, v, body) => FoFormula::Quant(*q, name(*v), Box::new(go(body, name))),
        }
    }
    Ok(go(f, &name))
}

/// Clause-wise Skolemization: existential `a` becomes `f_a(dep(a))`,
/// universal `x` stays the free variable `X`.
pub fn skolemize(f: &PcnfFormula) -> Result<(Vec<FolClause>, SymbolMap), TranslateError> {
    if let Some(&v) = f.free_vars().iter().next() {
        return Err(TranslateError::Open(v));
    }
    let sm = SymbolMap::for_pcnf(f)?;
    let clauses = f
        .matrix
        .iter()
        .map(|c| sm.clause_image(c, false).expect("closed formula"))
        .collect();
    Ok((clauses, sm))
}

/// Rewrites `p(f_b(X))` to `p_b(X)` for proper Skolem functions.
pub fn to_epr(clauses: &[FolClause], sm: &SymbolMap) -> Result<Vec<FolClause>, TranslateError> {
    let mut out = Vec::with_capacity(clauses.len());
    for (i, c) in clauses.iter().enumerate() {
        let mut lits = Vec::with_capacity(c.len());
        for l in c.lits() {
            let bad = |m: &str| TranslateError::NotSkolemized(i, format!("{l}: {m}"));
            if &*l.pred != TRUTH_PRED || l.args.len() != 1 {
                return Err(bad("unexpected predicate"));
            }
            match &l.args[0] {
                Term::App(f, args) if !args.is_empty() => {
                    let v = sm
                        .var_of_skolem(f)
                        .ok_or_else(|| bad("unknown function symbol"))?;
                    if args
                        .iter()
                        .any(|a| !a.is_var() && !matches!(a, Term::App(_, x) if x.is_empty()))
                    {
                        return Err(bad("nested proper function"));
                    }
                    lits.push(Literal {
                        pred: sm.epr_pred(v).expect("existential").clone(),
                        args: args.clone(),
                        negated: l.negated,
                    });
                }
                _ => lits.push(l.clone()),
            }
        }
        out.push(FolClause::new(lits));
    }
    Ok(out)
}

/// The units `p(f₁)` and `¬p(f₀)`; added only if not already present.
pub fn wrap_units() -> [FolClause; 2] {
    [
        FolClause::new([Literal::p(false, Term::f1())]),
        FolClause::new([Literal::p(true, Term::f0())]),
    ]
}

pub fn wrap_sat_equiv(clauses: &[FolClause]) -> Vec<FolClause> {
    let mut out = clauses.to_vec();
    for u in wrap_units() {
        if !out.contains(&u) {
            out.push(u);
        }
    }
    out
}

/// Translation mode for the clause paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClauseMode {
    Skolem,
    Epr,
}

/// Skolemized (or EPR) clause set with the wrapper units.
pub fn wrapped_clauses(
    f: &PcnfFormula,
    mode: ClauseMode,
) -> Result<(Vec<FolClause>, SymbolMap), TranslateError> {
    let (cs, sm) = skolemize(f)?;
    let cs = match mode {
        ClauseMode::Skolem => cs,
        ClauseMode::Epr => to_epr(&cs, &sm)?,
    };
    Ok((wrap_sat_equiv(&cs), sm))
}

/// Symbols paired with their arities.
pub type Arities = BTreeSet<(Symbol, usize)>;

/// Predicate and function symbols with their arities.
pub fn signature(clauses: &[FolClause]) -> (Arities, Arities) {
    let mut preds = BTreeSet::new();
    let mut funs = BTreeSet::new();
    fn terms(t: &Term, funs: &mut Arities) {
        if let Term::App(f, a) = t {
            funs.insert((f.clone(), a.len()));
            a.iter().for_each(|x| terms(x, funs));
        }
    }
    for c in clauses {
        for l in c.lits() {
            preds.insert((l.pred.clone(), l.args.len()));
            l.args.iter().for_each(|t| terms(t, &mut funs));
        }
    }
    (preds, funs)
}

/// Whether the clause set is function-free apart from constants.
pub fn is_epr(clauses: &[FolClause]) -> bool {
    signature(clauses).1.iter().all(|(_, a)| *a == 0)
}

/// Model check of the wrapped direct translation over the two-element
/// domain: is there an interpretation of `p`, `f₀`, `f₁` making
/// `g ∧ p(f₁) ∧ ¬p(f₀)` true? Quantifiers are expanded.
pub fn fo_two_element_satisfiable(g: &FoFormula) -> bool {
    for p_bits in 0..4u8 {
        let p = [p_bits & 1 == 1, p_bits & 2 == 2];
        for c_bits in 0..4u8 {
            let f0 = usize::from(c_bits & 1 == 1);
            let f1 = usize::from(c_bits & 2 == 2);
            if !p[f1] || p[f0] {
                continue;
            }
            let mut env = HashMap::new();
            if eval_fo(g, &p, f0, f1, &mut env) {
                return true;
            }
        }
    }
    false
}

fn eval_fo(
    g: &FoFormula,
    p: &[bool; 2],
    f0: usize,
    f1: usize,
    env: &mut HashMap<String, usize>,
) -> bool {
    match g {
        FoFormula::Atom(l) => {
            let val = match &l.args[0] {
                Term::Var(x) => env.get(&**x).copied().unwrap_or(0),
                Term::App(c, _) if &**c == FALSE_CONST => f0,
                Term::App(_, _) => f1,
            };
            p[val] != l.negated
        }
        FoFormula::Not(a) => !eval_fo(a, p, f0, f1, env),
        FoFormula::Bin(op, a, b) => {
            let x = eval_fo(a, p, f0, f1, env);
            let y = eval_fo(b, p, f0, f1, env);
            op.apply(x, y)
        }
        FoFormula::Quant(q, v, body) => {
            let saved = env.get(v).copied();
            let mut results = [false; 2];
            for (d, r) in results.iter_mut().enumerate() {
                env.insert(v.clone(), d);
                *r = eval_fo(body, p, f0, f1, env);
            }
            match saved {
                Some(s) => env.insert(v.clone(), s),
                None => env.remove(v),
            };
            match q {
                Quant::Forall => results[0] && results[1],
                Quant::Exists => results[0] || results[1],
            }
        }
    }
}
