use std::collections::HashMap;

use thiserror::Error;

use super::{PcnfFormula, Qbf, Quant, Var};

pub const DEFAULT_VAR_BOUND: usize = 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("formula has free variable {0}")]
    Open(Var),
    #[error("formula has {found} variables, bound is {bound}")]
    TooManyVars { found: usize, bound: usize },
}

/// Truth value of a closed QBF by expansion over {0,1}.
pub fn evaluate_qbf(f: &Qbf, bound: usize) -> Result<bool, EvalError> {
    if let Some(&v) = f.free_vars().iter().next() {
        return Err(EvalError::Open(v));
    }
    let found = f.vars().len();
    if found > bound {
        return Err(EvalError::TooManyVars { found, bound });
    }
    let mut env = HashMap::new();
    Ok(eval_tree(f, &mut env))
}

fn eval_tree(f: &Qbf, env: &mut HashMap<Var, bool>) -> bool {
    match f {
        Qbf::Var(v) => env[v],
        Qbf::Top => true,
        Qbf::Bot => false,
        Qbf::Not(a) => !eval_tree(a, env),
        Qbf::Bin(op, a, b) => {
            let x = eval_tree(a, env);
            let y = eval_tree(b, env);
            op.apply(x, y)
        }
        Qbf::Quant(q, v, body) => {
            let saved = env.get(v).copied();
            let mut result = *q == Quant::Forall;
            for val in [false, true] {
                env.insert(*v, val);
                let r = eval_tree(body, env);
                if (*q == Quant::Forall && !r) || (*q == Quant::Exists && r) {
                    result = r;
                    break;
                }
            }
            match saved {
                Some(s) => env.insert(*v, s),
                None => env.remove(v),
            };
            result
        }
    }
}

/// Truth value of a closed PCNF formula. Expands the prefix left to right and
/// cuts off as soon as the partial assignment decides the matrix.
pub fn evaluate_pcnf(f: &PcnfFormula, bound: usize) -> Result<bool, EvalError> {
    if let Some(&v) = f.free_vars().iter().next() {
        return Err(EvalError::Open(v));
    }
    let found = f.prefix.num_vars();
    if found > bound {
        return Err(EvalError::TooManyVars { found, bound });
    }
    let order: Vec<(Var, Quant)> = f
        .prefix
        .blocks()
        .iter()
        .flat_map(|b| b.vars.iter().map(move |&v| (v, b.quant)))
        .collect();
    let size = f.num_vars as usize + 1;
    let clauses: Vec<Vec<(usize, bool)>> = f
        .matrix
        .iter()
        .map(|c| {
            c.lits()
                .iter()
                .map(|l| (l.var.0 as usize, l.negated))
                .collect()
        })
        .collect();
    let mut assign: Vec<Option<bool>> = vec![None; size];
    Ok(expand(&order, 0, &clauses, &mut assign))
}

enum Status {
    False,
    True,
    Open,
}

fn status(clauses: &[Vec<(usize, bool)>], assign: &[Option<bool>]) -> Status {
    let mut all_sat = true;
    for c in clauses {
        let mut sat = false;
        let mut open = false;
        for &(v, neg) in c {
            match assign[v] {
                Some(val) if val != neg => {
                    sat = true;
                    break;
                }
                Some(_) => {}
                None => open = true,
            }
        }
        if !sat {
            if !open {
                return Status::False;
            }
            all_sat = false;
        }
    }
    if all_sat {
        Status::True
    } else {
        Status::Open
    }
}

fn expand(
    order: &[(Var, Quant)],
    i: usize,
    clauses: &[Vec<(usize, bool)>],
    assign: &mut [Option<bool>],
) -> bool {
    match status(clauses, assign) {
        Status::False => return false,
        Status::True => return true,
        Status::Open => {}
    }
    let (v, q) = order[i];
    let mut result = q == Quant::Forall;
    for val in [false, true] {
        assign[v.0 as usize] = Some(val);
        let r = expand(order, i + 1, clauses, assign);
        if r != result {
            result = r;
            break;
        }
    }
    assign[v.0 as usize] = None;
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qbf::{BinOp, Clause, Lit, Prefix};

    #[test]
    fn forall_exists_iff_is_true() {
        let (x, y) = (Var(1), Var(2));
        let f = Qbf::forall(
            x,
            Qbf::exists(y, Qbf::bin(BinOp::Iff, Qbf::Var(x), Qbf::Var(y))),
        );
        assert_eq!(evaluate_qbf(&f, DEFAULT_VAR_BOUND), Ok(true));
    }

    #[test]
    fn exists_contradiction_is_false() {
        let x = Var(1);
        let f = Qbf::exists(x, Qbf::bin(BinOp::And, Qbf::Var(x), Qbf::not(Qbf::Var(x))));
        assert_eq!(evaluate_qbf(&f, DEFAULT_VAR_BOUND), Ok(false));
    }

    #[test]
    fn open_and_oversized_rejected() {
        assert_eq!(
            evaluate_qbf(&Qbf::Var(Var(3)), 24),
            Err(EvalError::Open(Var(3)))
        );
        let f = Qbf::forall(Var(1), Qbf::exists(Var(2), Qbf::Top));
        assert_eq!(
            evaluate_qbf(&f, 1),
            Err(EvalError::TooManyVars { found: 2, bound: 1 })
        );
    }

    #[test]
    fn pcnf_matches_tree_semantics() {
        let prefix =
            Prefix::merged([(Quant::Forall, vec![Var(1)]), (Quant::Exists, vec![Var(2)])]).unwrap();
        let f = PcnfFormula::new(
            prefix,
            vec![
                Clause::new([Lit::pos(Var(1)), Lit::neg(Var(2))]),
                Clause::new([Lit::neg(Var(1)), Lit::pos(Var(2))]),
            ],
        );
        assert_eq!(evaluate_pcnf(&f, 24), Ok(true));
        assert_eq!(evaluate_qbf(&f.to_qbf(), 24), Ok(true));
        let mut g = f.clone();
        g.matrix.push(Clause::new([Lit::pos(Var(2))]));
        assert_eq!(evaluate_pcnf(&g, 24), Ok(false));
        assert_eq!(evaluate_qbf(&g.to_qbf(), 24), Ok(false));
    }

    #[test]
    fn empty_matrix_true_and_box_false() {
        let f = PcnfFormula::new(Prefix::default(), vec![]);
        assert_eq!(evaluate_pcnf(&f, 24), Ok(true));
        let g = PcnfFormula::new(Prefix::default(), vec![Clause::empty()]);
        assert_eq!(evaluate_pcnf(&g, 24), Ok(false));
    }
}
