use std::collections::{BTreeSet, HashMap};

use crate::fol::{FolClause, Literal, Term, FALSE_CONST, TRUE_CONST, TRUTH_PRED};
use crate::qbf::{PcnfFormula, Qbf, Quant, Var};

use super::{FoFormula, SymbolMap};

/// Whether `g` has the shape of `f` under the leaf correspondence
/// ⊥ ↔ p(f₀), ⊤ ↔ p(f₁), x ↔ p(X) for some bijection between QBF variables
/// and object variables.
pub fn iso_check(f: &Qbf, g: &FoFormula) -> bool {
    let mut fwd: HashMap<Var, String> = HashMap::new();
    let mut back: HashMap<String, Var> = HashMap::new();
    go(f, g, &mut fwd, &mut back)
}

fn pair(x: Var, y: &str, fwd: &mut HashMap<Var, String>, back: &mut HashMap<String, Var>) -> bool {
    match (fwd.get(&x), back.get(y)) {
        (None, None) => {
            fwd.insert(x, y.to_string());
            back.insert(y.to_string(), x);
            true
        }
        (Some(a), Some(b)) => a == y && *b == x,
        _ => false,
    }
}

fn is_p_of(l: &Literal) -> Option<&Term> {
    if !l.negated && &*l.pred == TRUTH_PRED && l.args.len() == 1 {
        Some(&l.args[0])
    } else {
        None
    }
}

fn go(
    f: &Qbf,
    g: &FoFormula,
    fwd: &mut HashMap<Var, String>,
    back: &mut HashMap<String, Var>,
) -> bool {
    match (f, g) {
        (Qbf::Var(x), FoFormula::Atom(l)) => {
            matches!(is_p_of(l), Some(Term::Var(y)) if pair(*x, y, fwd, back))
        }
        (Qbf::Top, FoFormula::Atom(l)) => {
            matches!(is_p_of(l), Some(Term::App(c, a)) if &**c == TRUE_CONST && a.is_empty())
        }
        (Qbf::Bot, FoFormula::Atom(l)) => {
            matches!(is_p_of(l), Some(Term::App(c, a)) if &**c == FALSE_CONST && a.is_empty())
        }
        (Qbf::Not(a), FoFormula::Not(b)) => go(a, b, fwd, back),
        (Qbf::Bin(o1, a1, b1), FoFormula::Bin(o2, a2, b2)) => {
            o1 == o2 && go(a1, a2, fwd, back) && go(b1, b2, fwd, back)
        }
        (Qbf::Quant(q1, x, a), FoFormula::Quant(q2, y, b)) => {
            q1 == q2 && pair(*x, y, fwd, back) && go(a, b, fwd, back)
        }
        _ => false,
    }
}

/// Clause-wise isomorphism between a PCNF matrix and its skolemized form:
/// the i-th FO clause is the image of the i-th matrix clause under
/// x ↦ p(X) for universals and a ↦ p(f_a(X₁,…,Xₖ)) for existentials, where
/// X₁…Xₖ are all universals left of `a`. The dependency lists are recomputed
/// from the prefix blocks, and the symbol map must be injective.
pub fn iso_check_clauses(f: &PcnfFormula, clauses: &[FolClause], sm: &SymbolMap) -> bool {
    if f.matrix.len() != clauses.len() {
        return false;
    }
    let mut universals_so_far: Vec<Var> = Vec::new();
    let mut deps: HashMap<Var, Vec<Var>> = HashMap::new();
    for b in f.prefix.blocks() {
        for &v in &b.vars {
            if b.quant == Quant::Exists {
                deps.insert(v, universals_so_far.clone());
            }
        }
        if b.quant == Quant::Forall {
            universals_so_far.extend(&b.vars);
        }
    }
    let mut syms = BTreeSet::new();
    for v in f.prefix.vars() {
        let Some(x) = sm.object_var(v) else {
            return false;
        };
        if !syms.insert(x.to_string()) {
            return false;
        }
        if let Some(s) = sm.skolem_symbol(v) {
            if !syms.insert(s.to_string()) {
                return false;
            }
        }
    }
    for (c, d) in f.matrix.iter().zip(clauses) {
        if c.len() != d.len() {
            return false;
        }
        for &l in c.lits() {
            let atom = if let Some(dep) = deps.get(&l.var) {
                let Some(s) = sm.skolem_symbol(l.var) else {
                    return false;
                };
                let args = dep
                    .iter()
                    .map(|u| Term::Var(sm.object_var(*u).expect("checked").clone()))
                    .collect();
                Term::App(s.clone(), args)
            } else {
                Term::Var(sm.object_var(l.var).expect("checked").clone())
            };
            if !d.contains(&Literal::p(l.negated, atom)) {
                return false;
            }
        }
    }
    true
}
