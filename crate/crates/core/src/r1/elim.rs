use thiserror::Error;

use super::{check_r1, factor, resolve, R1CheckError, R1Rule, R1Step, R1Trace, RuleError};
use crate::fol::{subsumes, FolClause, FreshVars, Literal, Subst};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ElimError {
    #[error("input proof rejected: {0}")]
    Rejected(#[from] R1CheckError),
    #[error("input proof is not a refutation")]
    NotRefutation,
    #[error("step {step}: {msg}")]
    Internal { step: usize, msg: String },
}

/// Turns an accepted R1-plus-subsumption refutation into a pure R1
/// refutation of the same inputs.
///
/// Each source step `k` gets a strengthened clause `S_k` in the output with
/// `S_k` subsuming `C_k`. SUBSUME steps just forward the strengthened clause
/// of their premise. FACTOR and RESOLVE are replayed on the strengthened
/// premises, merging first the literals that fall onto a pivot; when a pivot
/// has no preimage the strengthened premise itself is forwarded.
/// Unreachable output steps are pruned at the end.
pub fn eliminate_subsumption(inputs: &[FolClause], proof: &R1Trace) -> Result<R1Trace, ElimError> {
    check_r1(inputs, proof, true)?;
    if !proof.last().is_some_and(FolClause::is_empty) {
        return Err(ElimError::NotRefutation);
    }
    if proof.steps.iter().all(|s| s.rule != R1Rule::Subsume) {
        let mut out = proof.clone();
        out.subsumption = false;
        return Ok(out);
    }
    let mut out = R1Trace::new(false);
    let mut strong: Vec<usize> = Vec::with_capacity(proof.steps.len());
    let mut fresh = FreshVars::new();
    for (k, s) in proof.steps.iter().enumerate() {
        let internal = |msg: String| ElimError::Internal { step: k, msg };
        let rule_err = |e: RuleError| internal(e.to_string());
        let target = match (s.rule, s.prem.len()) {
            (R1Rule::Input, _) => out.push(R1Step::input(s.clause.clone())),
            (R1Rule::Subsume, 1) => strong[s.prem[0]],
            (R1Rule::Factor, _) => {
                let j = s.prem[0];
                let cj = proof.clause(j);
                let (_, sigma) = factor(cj, &s.pivots[0], &s.pivots[1]).map_err(rule_err)?;
                let sj = strong[j];
                let theta = subsumes(out.clause(sj), cj)
                    .ok_or_else(|| internal("lost subsumption".into()))?;
                let goal = s.pivots[0].apply(&sigma);
                let m = preimages(out.clause(sj), &[&theta, &sigma], &goal);
                if m.len() <= 1 {
                    sj
                } else {
                    merge(&mut out, sj, m).map_err(rule_err)?.0
                }
            }
            (R1Rule::Resolve, _) | (R1Rule::Subsume, _) => {
                let (i, j) = (s.prem[0], s.prem[1]);
                let (ci, cj) = (proof.clause(i), proof.clause(j));
                let r =
                    resolve(ci, cj, &s.pivots[0], &s.pivots[1], &mut fresh).map_err(rule_err)?;
                let (si, sj) = (strong[i], strong[j]);
                let ti = subsumes(out.clause(si), ci)
                    .ok_or_else(|| internal("lost subsumption".into()))?;
                let tj = subsumes(out.clause(sj), cj)
                    .ok_or_else(|| internal("lost subsumption".into()))?;
                let gi = s.pivots[0].apply(&r.mgu);
                let gj = s.pivots[1].apply(&r.renaming).apply(&r.mgu);
                let mi = preimages(out.clause(si), &[&ti, &r.mgu], &gi);
                let mj = preimages(out.clause(sj), &[&tj, &r.renaming, &r.mgu], &gj);
                if mi.is_empty() {
                    si
                } else if mj.is_empty() {
                    sj
                } else {
                    let (a, ka) = merge(&mut out, si, mi).map_err(rule_err)?;
                    let (b, kb) = merge(&mut out, sj, mj).map_err(rule_err)?;
                    let res = resolve(out.clause(a), out.clause(b), &ka, &kb, &mut fresh)
                        .map_err(rule_err)?;
                    out.push(R1Step::resolve(a, b, ka, kb, res.clause))
                }
            }
        };
        if subsumes(out.clause(target), &s.clause).is_none() {
            return Err(internal(format!(
                "{} does not subsume {}",
                out.clause(target),
                s.clause
            )));
        }
        strong.push(target);
    }
    let root = *strong.last().expect("non-empty");
    if !out.clause(root).is_empty() {
        return Err(ElimError::Internal {
            step: proof.steps.len() - 1,
            msg: "final clause is not empty".into(),
        });
    }
    Ok(prune(&out, root))
}

/// Literals `m` of `c` with `m·θ₁·θ₂… = goal`.
fn preimages(c: &FolClause, substs: &[&Subst], goal: &Literal) -> Vec<Literal> {
    c.lits()
        .iter()
        .filter(|m| substs.iter().fold((*m).clone(), |acc, s| acc.apply(s)) == *goal)
        .cloned()
        .collect()
}

/// Factors the literals `m` of step `at` into one; returns the step holding
/// the merged clause and the merged literal.
fn merge(
    out: &mut R1Trace,
    mut at: usize,
    mut m: Vec<Literal>,
) -> Result<(usize, Literal), RuleError> {
    while m.len() > 1 {
        let (k, l) = (m[0].clone(), m[1].clone());
        let (c, sigma) = factor(out.clause(at), &k, &l)?;
        at = out.push(R1Step::factor(at, k, l, c));
        m = m.iter().map(|x| x.apply(&sigma)).collect();
        m.sort();
        m.dedup();
    }
    Ok((at, m.pop().expect("non-empty")))
}

/// Keeps only the steps `root` depends on, renumbered in order.
fn prune(t: &R1Trace, root: usize) -> R1Trace {
    let mut keep = vec![false; t.steps.len()];
    keep[root] = true;
    for i in (0..=root).rev() {
        if keep[i] {
            for &p in &t.steps[i].prem {
                keep[p] = true;
            }
        }
    }
    let mut map = vec![usize::MAX; t.steps.len()];
    let mut out = R1Trace::new(false);
    for (i, s) in t.steps.iter().enumerate().take(root + 1) {
        if keep[i] {
            let mut s = s.clone();
            s.prem = s.prem.iter().map(|&p| map[p]).collect();
            map[i] = out.push(s);
        }
    }
    out
}
