use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{sym, FolClause, Literal, Subst, Symbol, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UnifyError {
    #[error("symbol clash: {0} vs {1}")]
    Clash(Symbol, Symbol),
    #[error("arity mismatch for {0}: {1} vs {2}")]
    Arity(Symbol, usize, usize),
    #[error("occurs check: {0} in {1}")]
    Occurs(Symbol, Term),
    #[error("literals differ in polarity")]
    Polarity,
}

/// Robinson unification of a list of term pairs. The result is idempotent;
/// a variable-variable pair binds the lexicographically smaller name to the
/// larger one.
pub fn mgu(pairs: &[(Term, Term)]) -> Result<Subst, UnifyError> {
    let mut sigma = Subst::new();
    let mut work: Vec<(Term, Term)> = pairs.iter().rev().cloned().collect();
    while let Some((s, t)) = work.pop() {
        let s = s.apply(&sigma);
        let t = t.apply(&sigma);
        if s == t {
            continue;
        }
        match (s, t) {
            (Term::Var(x), Term::Var(y)) => {
                if x < y {
                    bind(&mut sigma, x, Term::Var(y));
                } else {
                    bind(&mut sigma, y, Term::Var(x));
                }
            }
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                if t.occurs(&x) {
                    return Err(UnifyError::Occurs(x, t));
                }
                bind(&mut sigma, x, t);
            }
            (Term::App(f, a), Term::App(g, b)) => {
                if f != g {
                    return Err(UnifyError::Clash(f, g));
                }
                if a.len() != b.len() {
                    return Err(UnifyError::Arity(f, a.len(), b.len()));
                }
                work.extend(a.into_iter().zip(b).rev());
            }
        }
    }
    Ok(sigma)
}

fn bind(sigma: &mut Subst, x: Symbol, t: Term) {
    let single = Subst::from_pairs([(x.clone(), t.clone())]);
    let updated: Vec<(Symbol, Term)> = sigma
        .iter()
        .map(|(k, v)| (k.clone(), v.apply(&single)))
        .collect();
    *sigma = Subst::from_pairs(updated);
    sigma.insert(x, t);
}

pub fn mgu_terms(a: &Term, b: &Term) -> Result<Subst, UnifyError> {
    mgu(&[(a.clone(), b.clone())])
}

/// Unifies literal pairs; each pair must agree in polarity and predicate.
pub fn mgu_literals(pairs: &[(Literal, Literal)]) -> Result<Subst, UnifyError> {
    let mut terms = Vec::new();
    for (a, b) in pairs {
        if a.negated != b.negated {
            return Err(UnifyError::Polarity);
        }
        terms.push(atom_term(a));
        terms.push(atom_term(b));
    }
    let pairs: Vec<(Term, Term)> = terms
        .chunks(2)
        .map(|c| (c[0].clone(), c[1].clone()))
        .collect();
    mgu(&pairs)
}

/// Unifies the atoms of two literals, ignoring polarity.
pub fn mgu_atoms(a: &Literal, b: &Literal) -> Result<Subst, UnifyError> {
    mgu(&[(atom_term(a), atom_term(b))])
}

fn atom_term(l: &Literal) -> Term {
    Term::App(l.pred.clone(), l.args.clone())
}

/// Source of fresh variable names `base#n` with a monotone counter.
#[derive(Clone, Debug, Default)]
pub struct FreshVars {
    next: u64,
}

impl FreshVars {
    pub fn new() -> Self {
        FreshVars::default()
    }

    pub fn with_offset(offset: u64) -> Self {
        FreshVars { next: offset }
    }

    pub fn fresh(&mut self, base: &str) -> Symbol {
        let stem = base.split('#').next().unwrap_or(base);
        self.next += 1;
        sym(&format!("{stem}#{}", self.next))
    }

    pub fn counter(&self) -> u64 {
        self.next
    }
}

/// Renames every variable of `c` to a fresh one that also avoids `avoid`.
pub fn rename_apart(
    c: &FolClause,
    avoid: &BTreeSet<Symbol>,
    fresh: &mut FreshVars,
) -> (FolClause, Subst) {
    let own = c.vars();
    let mut s = Subst::new();
    for v in &own {
        let mut n = fresh.fresh(v);
        while avoid.contains(&n) || own.contains(&n) {
            n = fresh.fresh(v);
        }
        s.insert(v.clone(), Term::Var(n));
    }
    (c.apply(&s), s)
}

/// A variant of `c` whose variables carry their base names again: the
/// fresh suffixes are dropped, and variables sharing a base name are
/// numbered from 1 in variable order.
pub fn tidy_variables(c: &FolClause) -> FolClause {
    let mut groups: BTreeMap<&str, usize> = BTreeMap::new();
    let mut s = Subst::new();
    let vars = c.vars();
    for v in &vars {
        let stem = v.split('#').next().unwrap_or(v);
        let k = groups.entry(stem).or_insert(0);
        let name = if *k == 0 {
            stem.to_string()
        } else {
            format!("{stem}#{k}")
        };
        *k += 1;
        if name != **v {
            s.insert(v.clone(), Term::Var(sym(&name)));
        }
    }
    c.apply(&s)
}

fn match_term(pat: &Term, target: &Term, sigma: &mut Vec<(Symbol, Term)>, renaming: bool) -> bool {
    match pat {
        Term::Var(x) => {
            if let Some((_, t)) = sigma.iter().find(|(k, _)| k == x) {
                return t == target;
            }
            if renaming {
                match target {
                    Term::Var(_) => {
                        if sigma.iter().any(|(_, t)| t == target) {
                            return false;
                        }
                    }
                    _ => return false,
                }
            }
            sigma.push((x.clone(), target.clone()));
            true
        }
        Term::App(f, args) => match target {
            Term::App(g, bargs) if f == g && args.len() == bargs.len() => args
                .iter()
                .zip(bargs)
                .all(|(a, b)| match_term(a, b, sigma, renaming)),
            _ => false,
        },
    }
}

fn match_literal(
    pat: &Literal,
    target: &Literal,
    sigma: &mut Vec<(Symbol, Term)>,
    renaming: bool,
) -> bool {
    if pat.negated != target.negated
        || pat.pred != target.pred
        || pat.args.len() != target.args.len()
    {
        return false;
    }
    let mark = sigma.len();
    let ok = pat
        .args
        .iter()
        .zip(&target.args)
        .all(|(a, b)| match_term(a, b, sigma, renaming));
    if !ok {
        sigma.truncate(mark);
    }
    ok
}

/// Searches for `σ` with `cσ ⊆ d` (only variables of `c` are bound). With
/// `renaming` set, `σ` must be an injective variable renaming. The search
/// backtracks over all literal matchings and is complete.
pub fn match_clause(c: &FolClause, d: &FolClause, renaming: bool) -> Option<Subst> {
    let mut order: Vec<(&Literal, Vec<&Literal>)> = Vec::with_capacity(c.len());
    for l in c.lits() {
        let cands: Vec<&Literal> = d
            .lits()
            .iter()
            .filter(|m| {
                let mut scratch = Vec::new();
                match_literal(l, m, &mut scratch, renaming)
            })
            .collect();
        if cands.is_empty() {
            return None;
        }
        order.push((l, cands));
    }
    order.sort_by_key(|(_, c)| c.len());
    let mut sigma = Vec::new();
    if search(&order, 0, &mut sigma, renaming, None) {
        Some(Subst::from_pairs(sigma))
    } else {
        None
    }
}

fn search(
    order: &[(&Literal, Vec<&Literal>)],
    i: usize,
    sigma: &mut Vec<(Symbol, Term)>,
    renaming: bool,
    onto: Option<&FolClause>,
) -> bool {
    let Some((l, cands)) = order.get(i) else {
        return onto.is_none_or(|d| {
            let s = Subst::from_pairs(sigma.iter().cloned());
            let image: BTreeSet<Literal> = order.iter().map(|(l, _)| l.apply(&s)).collect();
            d.lits().iter().all(|m| image.contains(m))
        });
    };
    for m in cands {
        let mark = sigma.len();
        if match_literal(l, m, sigma, renaming) {
            if search(order, i + 1, sigma, renaming, onto) {
                return true;
            }
            sigma.truncate(mark);
        }
    }
    false
}

/// Searches for `σ` with `cσ = d` as sets.
pub fn match_clause_onto(c: &FolClause, d: &FolClause) -> Option<Subst> {
    let mut order: Vec<(&Literal, Vec<&Literal>)> = Vec::with_capacity(c.len());
    for l in c.lits() {
        let cands: Vec<&Literal> = d
            .lits()
            .iter()
            .filter(|m| {
                let mut scratch = Vec::new();
                match_literal(l, m, &mut scratch, false)
            })
            .collect();
        if cands.is_empty() {
            return None;
        }
        order.push((l, cands));
    }
    if c.is_empty() != d.is_empty() {
        return None;
    }
    order.sort_by_key(|(_, c)| c.len());
    let mut sigma = Vec::new();
    search(&order, 0, &mut sigma, false, Some(d)).then(|| Subst::from_pairs(sigma))
}

/// `Some(σ)` iff `cσ ⊆ d`.
pub fn subsumes(c: &FolClause, d: &FolClause) -> Option<Subst> {
    match_clause(c, d, false)
}

/// `c` and `d` are equal up to a renaming of variables.
pub fn is_variant(c: &FolClause, d: &FolClause) -> bool {
    if c == d {
        return true;
    }
    c.len() == d.len() && c.vars().len() == d.vars().len() && match_clause(c, d, true).is_some()
}
