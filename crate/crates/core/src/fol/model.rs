//! Satisfiability of clause sets over the two-element domain {0,1}.
//!
//! All symbols are interpreted freely. Unary predicates applied to compound
//! terms, and constants nested inside other terms, are enumerated up front;
//! every remaining table entry becomes a propositional variable and the
//! ground instances are decided by a small DPLL search. Terms nested deeper
//! than the translation ever produces are reported as unsupported.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use super::{FolClause, Symbol, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("unsupported term shape: {0}")]
    Unsupported(String),
    #[error("instance too large: {0}")]
    TooLarge(String),
}

#[derive(Clone, Copy, Debug)]
pub struct ModelConfig {
    /// Maximum number of enumerated bits before the propositional search.
    pub max_outer_bits: usize,
    /// Maximum number of variables in one clause (instances are 2^vars).
    pub max_clause_vars: usize,
    /// Maximum number of ground propositional clauses.
    pub max_ground_clauses: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            max_outer_bits: 16,
            max_clause_vars: 16,
            max_ground_clauses: 2_000_000,
        }
    }
}

/// Whether the clause set has a model with a two-element universe.
pub fn two_element_satisfiable(
    clauses: &[FolClause],
    cfg: ModelConfig,
) -> Result<bool, ModelError> {
    let sig = Signature::collect(clauses)?;
    let outer_bits = sig.outer_preds.len() * 2 + sig.outer_consts.len();
    if outer_bits > cfg.max_outer_bits {
        return Err(ModelError::TooLarge(format!(
            "{outer_bits} enumerated bits"
        )));
    }
    for c in clauses {
        if c.vars().len() > cfg.max_clause_vars {
            return Err(ModelError::TooLarge(format!(
                "clause with {} variables",
                c.vars().len()
            )));
        }
    }
    for bits in 0u64..(1u64 << outer_bits) {
        let mut outer = Outer::default();
        let mut k = 0;
        for p in &sig.outer_preds {
            outer
                .preds
                .insert(p.clone(), [bits >> k & 1 == 1, bits >> (k + 1) & 1 == 1]);
            k += 2;
        }
        for c in &sig.outer_consts {
            outer.consts.insert(c.clone(), bits >> k & 1 == 1);
            k += 1;
        }
        let mut cells = Cells::default();
        let mut ground = Vec::new();
        for c in clauses {
            ground_clause(c, &outer, &mut cells, &mut ground)?;
            if ground.len() > cfg.max_ground_clauses {
                return Err(ModelError::TooLarge(format!(
                    "more than {} ground clauses",
                    cfg.max_ground_clauses
                )));
            }
        }
        if dpll(cells.count, &ground) {
            return Ok(true);
        }
    }
    Ok(false)
}

struct Signature {
    outer_preds: Vec<Symbol>,
    outer_consts: Vec<Symbol>,
}

impl Signature {
    fn collect(clauses: &[FolClause]) -> Result<Self, ModelError> {
        let mut outer_preds = BTreeSet::new();
        for c in clauses {
            for l in c.lits() {
                if l.args.len() == 1 && matches!(&l.args[0], Term::App(_, a) if !a.is_empty()) {
                    outer_preds.insert(l.pred.clone());
                }
            }
        }
        let mut outer_consts = BTreeSet::new();
        fn nested(t: &Term, out: &mut BTreeSet<Symbol>) -> Result<(), ModelError> {
            match t {
                Term::Var(_) => Ok(()),
                Term::App(f, a) if a.is_empty() => {
                    out.insert(f.clone());
                    Ok(())
                }
                Term::App(..) => Err(ModelError::Unsupported(format!("nested compound term {t}"))),
            }
        }
        for c in clauses {
            for l in c.lits() {
                let direct_outer = outer_preds.contains(&l.pred);
                for a in &l.args {
                    match a {
                        Term::Var(_) => {}
                        Term::App(f, inner) if inner.is_empty() => {
                            if !direct_outer {
                                outer_consts.insert(f.clone());
                            }
                        }
                        Term::App(_, inner) => {
                            if !direct_outer {
                                return Err(ModelError::Unsupported(format!(
                                    "compound argument in {l}"
                                )));
                            }
                            for t in inner {
                                nested(t, &mut outer_consts)?;
                            }
                        }
                    }
                }
            }
        }
        Ok(Signature {
            outer_preds: outer_preds.into_iter().collect(),
            outer_consts: outer_consts.into_iter().collect(),
        })
    }
}

#[derive(Default)]
struct Outer {
    preds: BTreeMap<Symbol, [bool; 2]>,
    consts: BTreeMap<Symbol, bool>,
}

/// Table entries `(symbol, argument tuple)` numbered as propositional variables.
#[derive(Default)]
struct Cells {
    ids: HashMap<(Symbol, Vec<bool>), usize>,
    count: usize,
}

impl Cells {
    fn id(&mut self, s: &Symbol, args: Vec<bool>) -> usize {
        let key = (s.clone(), args);
        if let Some(&i) = self.ids.get(&key) {
            return i;
        }
        let i = self.count;
        self.count += 1;
        self.ids.insert(key, i);
        i
    }
}

enum LitVal {
    Const(bool),
    Cell(usize, bool),
}

fn ground_clause(
    c: &FolClause,
    outer: &Outer,
    cells: &mut Cells,
    out: &mut Vec<Vec<(usize, bool)>>,
) -> Result<(), ModelError> {
    let vars: Vec<Symbol> = c.vars().into_iter().collect();
    let n = vars.len();
    'inst: for bits in 0u64..(1u64 << n) {
        let env: HashMap<&str, bool> = vars
            .iter()
            .enumerate()
            .map(|(i, v)| (&**v, bits >> i & 1 == 1))
            .collect();
        let mut gc: Vec<(usize, bool)> = Vec::new();
        for l in c.lits() {
            let val = eval_literal(l, outer, &env, cells)?;
            match val {
                LitVal::Const(true) => continue 'inst,
                LitVal::Const(false) => {}
                LitVal::Cell(id, pos) => {
                    if gc.contains(&(id, !pos)) {
                        continue 'inst;
                    }
                    if !gc.contains(&(id, pos)) {
                        gc.push((id, pos));
                    }
                }
            }
        }
        out.push(gc);
    }
    Ok(())
}

fn arg_value(t: &Term, outer: &Outer, env: &HashMap<&str, bool>) -> Result<bool, ModelError> {
    match t {
        Term::Var(x) => Ok(env[&**x]),
        Term::App(f, a) if a.is_empty() => outer
            .consts
            .get(f)
            .copied()
            .ok_or_else(|| ModelError::Unsupported(format!("constant {f} in nested position"))),
        _ => Err(ModelError::Unsupported(format!("nested term {t}"))),
    }
}

fn eval_literal(
    l: &super::Literal,
    outer: &Outer,
    env: &HashMap<&str, bool>,
    cells: &mut Cells,
) -> Result<LitVal, ModelError> {
    let sign = !l.negated;
    if let Some(table) = outer.preds.get(&l.pred) {
        let arg = &l.args[0];
        let val = match arg {
            Term::Var(x) => LitVal::Const(table[usize::from(env[&**x])] == sign),
            Term::App(f, a) => {
                if a.is_empty() {
                    if let Some(&v) = outer.consts.get(f) {
                        return Ok(LitVal::Const(table[usize::from(v)] == sign));
                    }
                }
                let tuple = a
                    .iter()
                    .map(|t| arg_value(t, outer, env))
                    .collect::<Result<Vec<_>, _>>()?;
                match (table[0], table[1]) {
                    (x, y) if x == y => LitVal::Const(x == sign),
                    // p is the identity: literal holds iff the cell has the sign value.
                    (false, true) => LitVal::Cell(cells.id(f, tuple), sign),
                    _ => LitVal::Cell(cells.id(f, tuple), !sign),
                }
            }
        };
        return Ok(val);
    }
    let tuple = l
        .args
        .iter()
        .map(|a| arg_value(a, outer, env))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LitVal::Cell(cells.id(&l.pred, tuple), sign))
}

/// DPLL with unit propagation over clauses of `(var, positive)` literals.
fn dpll(nvars: usize, clauses: &[Vec<(usize, bool)>]) -> bool {
    if clauses.iter().any(Vec::is_empty) {
        return false;
    }
    let mut occurs: Vec<Vec<usize>> = vec![Vec::new(); nvars];
    for (i, c) in clauses.iter().enumerate() {
        for &(v, _) in c {
            occurs[v].push(i);
        }
    }
    let mut assign: Vec<Option<bool>> = vec![None; nvars];
    let mut order: Vec<usize> = (0..nvars).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(occurs[v].len()));
    solve(clauses, &occurs, &mut assign, &order)
}

fn clause_state(
    c: &[(usize, bool)],
    assign: &[Option<bool>],
) -> (bool, usize, Option<(usize, bool)>) {
    let mut open = 0;
    let mut last = None;
    for &(v, pos) in c {
        match assign[v] {
            Some(b) if b == pos => return (true, 0, None),
            Some(_) => {}
            None => {
                open += 1;
                last = Some((v, pos));
            }
        }
    }
    (false, open, last)
}

fn propagate(
    clauses: &[Vec<(usize, bool)>],
    occurs: &[Vec<usize>],
    assign: &mut [Option<bool>],
    trail: &mut Vec<usize>,
    start: usize,
) -> bool {
    let mut head = start;
    while head < trail.len() {
        let v = trail[head];
        head += 1;
        for &ci in &occurs[v] {
            let (sat, open, last) = clause_state(&clauses[ci], assign);
            if sat {
                continue;
            }
            match (open, last) {
                (0, _) => return false,
                (1, Some((u, pos))) => {
                    assign[u] = Some(pos);
                    trail.push(u);
                }
                _ => {}
            }
        }
    }
    true
}

fn solve(
    clauses: &[Vec<(usize, bool)>],
    occurs: &[Vec<usize>],
    assign: &mut Vec<Option<bool>>,
    order: &[usize],
) -> bool {
    // Initial units.
    let mut trail = Vec::new();
    for c in clauses {
        let (sat, open, last) = clause_state(c, assign);
        if !sat && open == 1 {
            let (u, pos) = last.expect("one open literal");
            if assign[u].is_none() {
                assign[u] = Some(pos);
                trail.push(u);
            }
        } else if !sat && open == 0 {
            return false;
        }
    }
    if !propagate(clauses, occurs, assign, &mut trail, 0) {
        return false;
    }
    search(clauses, occurs, assign, order)
}

fn search(
    clauses: &[Vec<(usize, bool)>],
    occurs: &[Vec<usize>],
    assign: &mut Vec<Option<bool>>,
    order: &[usize],
) -> bool {
    let Some(&v) = order.iter().find(|&&v| assign[v].is_none()) else {
        return clauses.iter().all(|c| clause_state(c, assign).0);
    };
    for val in [true, false] {
        let saved = assign.clone();
        assign[v] = Some(val);
        let mut trail = vec![v];
        if propagate(clauses, occurs, assign, &mut trail, 0)
            && search(clauses, occurs, assign, order)
        {
            return true;
        }
        *assign = saved;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::Literal;

    fn sat(cs: &[FolClause]) -> bool {
        two_element_satisfiable(cs, ModelConfig::default()).unwrap()
    }

    #[test]
    fn complementary_units_unsat() {
        let a = FolClause::new([Literal::p(false, Term::f1())]);
        let b = FolClause::new([Literal::p(true, Term::f1())]);
        assert!(!sat(&[a.clone(), b]));
        assert!(sat(&[a]));
    }

    #[test]
    fn universal_clause_forces_both_values() {
        // p(X) and ~p(f0): p must be true everywhere, contradiction.
        let a = FolClause::new([Literal::p(false, Term::var("X"))]);
        let b = FolClause::new([Literal::p(true, Term::f0())]);
        assert!(!sat(&[a, b]));
    }

    #[test]
    fn skolem_function_can_be_chosen() {
        // ∀x∃e (x ↔ e) skolemized with the wrapper units.
        let fe = Term::app("f_e", vec![Term::var("X")]);
        let cs = vec![
            FolClause::new([
                Literal::p(false, Term::var("X")),
                Literal::p(true, fe.clone()),
            ]),
            FolClause::new([Literal::p(true, Term::var("X")), Literal::p(false, fe)]),
            FolClause::new([Literal::p(false, Term::f1())]),
            FolClause::new([Literal::p(true, Term::f0())]),
        ];
        assert!(sat(&cs));
    }

    #[test]
    fn exists_forall_fails() {
        // ∃e∀x (x ↔ e): e is a constant, x ranges over both values.
        let fe = Term::constant("f_e");
        let cs = vec![
            FolClause::new([
                Literal::p(false, Term::var("X")),
                Literal::p(true, fe.clone()),
            ]),
            FolClause::new([Literal::p(true, Term::var("X")), Literal::p(false, fe)]),
            FolClause::new([Literal::p(false, Term::f1())]),
            FolClause::new([Literal::p(true, Term::f0())]),
        ];
        assert!(!sat(&cs));
    }

    #[test]
    fn epr_predicates_are_cells() {
        let cs = vec![
            FolClause::new([Literal::pos("p_e", vec![Term::var("X")])]),
            FolClause::new([Literal::neg("p_e", vec![Term::f0()])]),
        ];
        assert!(!sat(&cs));
    }

    #[test]
    fn nested_terms_unsupported() {
        let t = Term::app("g", vec![Term::app("h", vec![Term::var("X")])]);
        let cs = vec![FolClause::new([Literal::p(false, t)])];
        assert!(matches!(
            two_element_satisfiable(&cs, ModelConfig::default()),
            Err(ModelError::Unsupported(_))
        ));
    }
}
