//! Checker for Q-res and QU-res.

use super::trace::{
    check_shape, fmt_clause, remove_one, same_multiset, CheckError, Failure, QbfReport, QresTrace,
    StepError,
};
use super::{AxiomError, Calculus, Rule};
use crate::qbf::{Lit, PcnfFormula, Quant};

/// Validates every step of a Q-res (or, with `allow_universal_pivot`,
/// QU-res) trace. Clauses are read as multisets; FAC removes one copy of
/// a duplicated literal.
pub fn check_qres_qures(
    f: &PcnfFormula,
    proof: &QresTrace,
    allow_universal_pivot: bool,
) -> Result<QbfReport, CheckError> {
    match (proof.calculus, allow_universal_pivot) {
        (Calculus::QRes, _) | (Calculus::QuRes, true) => {}
        (got, _) => {
            let expected = if allow_universal_pivot {
                "QRES or QURES"
            } else {
                "QRES"
            };
            return Err(CheckError::Calculus {
                expected: expected.into(),
                got,
            });
        }
    }
    if proof.steps.is_empty() {
        return Err(CheckError::Empty);
    }
    for (i, s) in proof.steps.iter().enumerate() {
        let fail = |failure: Failure| StepError {
            step: i,
            rule: s.rule,
            failure,
        };
        check_shape(i, s).map_err(fail)?;
        let derived = derive(f, proof, i, allow_universal_pivot).map_err(fail)?;
        if !same_multiset(&derived, &s.clause) {
            return Err(fail(Failure::WrongResult {
                expected: fmt_clause(&derived),
                got: fmt_clause(&s.clause),
            })
            .into());
        }
    }
    Ok(QbfReport {
        calculus: proof.calculus,
        refutation: proof.steps.last().is_some_and(|s| s.clause.is_empty()),
        metrics: proof.metrics(),
    })
}

fn level(f: &PcnfFormula, l: Lit) -> Result<usize, Failure> {
    f.prefix
        .level(l.var)
        .ok_or_else(|| Failure::UnknownVar(l.to_string()))
}

fn derive(
    f: &PcnfFormula,
    proof: &QresTrace,
    i: usize,
    allow_universal: bool,
) -> Result<Vec<Lit>, Failure> {
    let s = &proof.steps[i];
    let prem = |k: usize| &proof.steps[s.prem[k]].clause;
    match s.rule {
        Rule::Axiom => {
            let idx = s.axiom.ok_or(Failure::MissingPayload("axiom"))?;
            let c = f.matrix.get(idx).ok_or(Failure::AxiomIndex(idx))?;
            if c.is_tautology() {
                return Err(AxiomError::Tautology.into());
            }
            Ok(c.lits().to_vec())
        }
        Rule::Res => {
            let pivot = s.pivot.ok_or(Failure::MissingPayload("pivot"))?;
            level(f, pivot)?;
            if f.prefix.quant(pivot.var) == Some(Quant::Forall) && !allow_universal {
                return Err(Failure::UniversalPivot(pivot.to_string()));
            }
            let c1 = remove_one(prem(0), &pivot)
                .ok_or_else(|| Failure::PivotMissing(pivot.to_string()))?;
            let c2 = remove_one(prem(1), &pivot.negate())
                .ok_or_else(|| Failure::ComplementMissing(pivot.to_string()))?;
            if let Some(y) = c1.iter().find(|y| c2.contains(&y.negate())) {
                return Err(Failure::ComplementaryPair(y.var.to_string()));
            }
            Ok(c1.into_iter().chain(c2).collect())
        }
        Rule::Fac => {
            let c = prem(0);
            let lit = match s.pivot {
                Some(l) => l,
                None => *c
                    .iter()
                    .find(|l| c.iter().filter(|m| m == l).count() >= 2)
                    .ok_or(Failure::MissingPayload("pivot"))?,
            };
            if c.iter().filter(|&&m| m == lit).count() < 2 {
                return Err(Failure::NotDuplicate(lit.to_string()));
            }
            Ok(remove_one(c, &lit).expect("present"))
        }
        Rule::UnivRed => {
            let m = s.pivot.ok_or(Failure::MissingPayload("pivot"))?;
            let lm = level(f, m)?;
            if f.prefix.quant(m.var) != Some(Quant::Forall) {
                return Err(Failure::NotUniversal(m.to_string()));
            }
            let d = remove_one(prem(0), &m).ok_or_else(|| Failure::PivotMissing(m.to_string()))?;
            for &e in &d {
                if f.prefix.quant(e.var) == Some(Quant::Exists) {
                    let le = level(f, e)?;
                    if le >= lm {
                        return Err(Failure::ReductionLevel {
                            e: e.to_string(),
                            le,
                            m: m.to_string(),
                            lm,
                        });
                    }
                }
            }
            Ok(d)
        }
        Rule::Inst => Err(Failure::RuleNotAllowed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculi::{QbfStep, QbfTrace};
    use crate::qbf::{Clause, Prefix, Var};

    fn l(x: i64) -> Lit {
        Lit::from_dimacs(x).unwrap()
    }

    /// ∀x ∃e with all four clauses over x, e (x = 1, e = 2).
    fn toy() -> PcnfFormula {
        let p =
            Prefix::merged([(Quant::Forall, vec![Var(1)]), (Quant::Exists, vec![Var(2)])]).unwrap();
        let m = [[1, 2], [1, -2], [-1, 2], [-1, -2]]
            .iter()
            .map(|c| Clause::new(c.iter().map(|&x| l(x))))
            .collect();
        PcnfFormula::new(p, m)
    }

    fn toy_proof(cal: Calculus) -> QresTrace {
        let mut t = QbfTrace::new(cal);
        t.push(QbfStep::axiom(0, 0, vec![l(1), l(2)]));
        t.push(QbfStep::axiom(0, 1, vec![l(1), l(-2)]));
        t.push(QbfStep::res(0, 0, 1, l(2), vec![l(1), l(1)]));
        t.push(QbfStep::fac(0, 2, l(1), vec![l(1)]));
        t.push(QbfStep::axiom(0, 2, vec![l(-1), l(2)]));
        t.push(QbfStep::axiom(0, 3, vec![l(-1), l(-2)]));
        t.push(QbfStep::res(0, 4, 5, l(2), vec![l(-1), l(-1)]));
        t.push(QbfStep::fac(0, 6, l(-1), vec![l(-1)]));
        t.push(QbfStep::res(0, 3, 7, l(1), vec![]));
        t
    }

    #[test]
    fn universal_pivot_needs_qures() {
        let f = toy();
        let report = check_qres_qures(&f, &toy_proof(Calculus::QuRes), true).unwrap();
        assert!(report.refutation);
        let err = check_qres_qures(&f, &toy_proof(Calculus::QRes), false).unwrap_err();
        assert!(matches!(
            err,
            CheckError::Step(StepError {
                step: 8,
                failure: Failure::UniversalPivot(_),
                ..
            })
        ));
    }

    #[test]
    fn reduction_level_enforced() {
        let f = toy();
        let mut t = QbfTrace::new(Calculus::QRes);
        t.push(QbfStep::axiom(0, 0, vec![l(1), l(2)]));
        t.push(QbfStep::univ_red(0, 0, l(1), vec![l(2)]));
        let err = check_qres_qures(&f, &t, false).unwrap_err();
        assert!(matches!(
            err,
            CheckError::Step(StepError {
                step: 1,
                failure: Failure::ReductionLevel { .. },
                ..
            })
        ));
    }

    #[test]
    fn reduction_of_trailing_universal() {
        // ∃e ∀x: (e ∨ ¬x) reduces to e.
        let p =
            Prefix::merged([(Quant::Exists, vec![Var(2)]), (Quant::Forall, vec![Var(1)])]).unwrap();
        let f = PcnfFormula::new(p, vec![Clause::new([l(2), l(-1)]), Clause::new([l(-2)])]);
        let mut t = QbfTrace::new(Calculus::QRes);
        t.push(QbfStep::axiom(0, 0, vec![l(2), l(-1)]));
        t.push(QbfStep::univ_red(0, 0, l(-1), vec![l(2)]));
        t.push(QbfStep::axiom(0, 1, vec![l(-2)]));
        t.push(QbfStep::res(0, 1, 2, l(2), vec![]));
        assert!(check_qres_qures(&f, &t, false).unwrap().refutation);
    }

    #[test]
    fn tautological_resolvent_rejected() {
        // ∃a b: (a ∨ b), (¬a ∨ ¬b)
        let p = Prefix::merged([(Quant::Exists, vec![Var(1), Var(2)])]).unwrap();
        let f = PcnfFormula::new(
            p,
            vec![Clause::new([l(1), l(2)]), Clause::new([l(-1), l(-2)])],
        );
        let mut t = QbfTrace::new(Calculus::QRes);
        t.push(QbfStep::axiom(0, 0, vec![l(1), l(2)]));
        t.push(QbfStep::axiom(0, 1, vec![l(-1), l(-2)]));
        t.push(QbfStep::res(0, 0, 1, l(1), vec![l(2), l(-2)]));
        let err = check_qres_qures(&f, &t, false).unwrap_err();
        assert!(matches!(
            err,
            CheckError::Step(StepError {
                step: 2,
                failure: Failure::ComplementaryPair(_),
                ..
            })
        ));
    }

    #[test]
    fn tampered_premise_rejected() {
        let f = toy();
        let mut t = toy_proof(Calculus::QuRes);
        t.steps[2].prem[1] = 0;
        assert!(check_qres_qures(&f, &t, true).is_err());
    }
}
