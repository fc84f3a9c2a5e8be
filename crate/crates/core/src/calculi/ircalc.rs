//! Checker for IR-calc and its σ_v and Δ extensions.

use super::trace::{
    check_shape, fmt_clause, remove_one, same_multiset, CheckError, Failure, IrTrace, QbfReport,
    StepError,
};
use super::{
    inst, ircalc_axiom, validate_delta, validate_sigma_v, AnnLit, Calculus, ExtensionSeq, Rule,
    SigmaV,
};
use crate::qbf::{Clause, PcnfFormula, Prefix, Quant};

/// Validates an IR-calc trace. Plain IR-calc takes an empty `sv` and `delta`;
/// IRCALC_SIGMA allows a non-empty `sv`; IRCALC_DELTA_SIGMA allows both.
/// Axioms over Δ clauses refer to the flattened `delta.clauses()` by index.
pub fn check_ircalc(
    f: &PcnfFormula,
    proof: &IrTrace,
    sv: &SigmaV,
    delta: &ExtensionSeq,
) -> Result<QbfReport, CheckError> {
    let need = if !delta.is_empty() {
        Some(Calculus::IrCalcDeltaSigma)
    } else if !sv.is_empty() {
        Some(Calculus::IrCalcSigma)
    } else {
        None
    };
    let ok = match (proof.calculus, need) {
        (c, _) if !c.is_ircalc() => false,
        (_, None) => true,
        (Calculus::IrCalcSigma, Some(Calculus::IrCalcSigma)) => true,
        (Calculus::IrCalcDeltaSigma, Some(_)) => true,
        _ => false,
    };
    if !ok {
        let expected = need.map_or("IRCALC".to_string(), |c| c.to_string());
        return Err(CheckError::Calculus {
            expected,
            got: proof.calculus,
        });
    }
    if proof.steps.is_empty() {
        return Err(CheckError::Empty);
    }
    let prefix = validate_delta(f, delta)?;
    validate_sigma_v(&prefix, sv)?;
    let ext_clauses = delta.clauses();
    let ctx = Ctx {
        f,
        prefix: &prefix,
        sv,
        ext_clauses: &ext_clauses,
    };
    for (i, s) in proof.steps.iter().enumerate() {
        let fail = |failure: Failure| StepError {
            step: i,
            rule: s.rule,
            failure,
        };
        check_shape(i, s).map_err(fail)?;
        let derived = ctx.derive(proof, i).map_err(fail)?;
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

struct Ctx<'a> {
    f: &'a PcnfFormula,
    prefix: &'a Prefix,
    sv: &'a SigmaV,
    ext_clauses: &'a [Clause],
}

impl Ctx<'_> {
    fn derive(&self, proof: &IrTrace, i: usize) -> Result<Vec<AnnLit>, Failure> {
        let s = &proof.steps[i];
        let prem = |k: usize| &proof.steps[s.prem[k]].clause;
        match s.rule {
            Rule::Axiom => match (s.axiom, s.ext) {
                (Some(idx), None) => {
                    let c = self.f.matrix.get(idx).ok_or(Failure::AxiomIndex(idx))?;
                    Ok(ircalc_axiom(c, self.prefix, self.sv, false)?)
                }
                (None, Some(idx)) => {
                    let c = self.ext_clauses.get(idx).ok_or(Failure::AxiomIndex(idx))?;
                    Ok(ircalc_axiom(c, self.prefix, self.sv, true)?)
                }
                _ => Err(Failure::MissingPayload("axiom")),
            },
            Rule::Res => {
                let pivot = s.pivot.as_ref().ok_or(Failure::MissingPayload("pivot"))?;
                match self.prefix.quant(pivot.lit.var) {
                    Some(Quant::Exists) => {}
                    Some(Quant::Forall) => return Err(Failure::UniversalPivot(pivot.to_string())),
                    None => return Err(Failure::UnknownVar(pivot.lit.var.to_string())),
                }
                let c1 = remove_one(prem(0), pivot)
                    .ok_or_else(|| Failure::PivotMissing(pivot.to_string()))?;
                let neg = pivot.negate();
                let c2 = match remove_one(prem(1), &neg) {
                    Some(c) => c,
                    None => {
                        return Err(match prem(1).iter().find(|l| l.lit == neg.lit) {
                            Some(other) => {
                                Failure::AnnotationMismatch(neg.to_string(), other.to_string())
                            }
                            None => Failure::ComplementMissing(pivot.to_string()),
                        })
                    }
                };
                Ok(c1.into_iter().chain(c2).collect())
            }
            Rule::Fac => {
                let c = prem(0);
                let lit = match &s.pivot {
                    Some(l) => l.clone(),
                    None => c
                        .iter()
                        .find(|l| c.iter().filter(|m| m == l).count() >= 2)
                        .cloned()
                        .ok_or(Failure::MissingPayload("pivot"))?,
                };
                if c.iter().filter(|&m| *m == lit).count() < 2 {
                    return Err(Failure::NotDuplicate(lit.to_string()));
                }
                Ok(remove_one(c, &lit).expect("present"))
            }
            Rule::Inst => {
                let t = s.assign.as_ref().ok_or(Failure::MissingPayload("assign"))?;
                Ok(inst(t, prem(0), self.prefix)?)
            }
            Rule::UnivRed => Err(Failure::RuleNotAllowed),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculi::{Assignment, DefOp, Definition, Extension, QbfStep, QbfTrace};
    use crate::qbf::{Lit, Var};

    fn l(x: i64) -> Lit {
        Lit::from_dimacs(x).unwrap()
    }

    fn a(x: i64, bits: &[(u32, bool)]) -> AnnLit {
        AnnLit::new(
            l(x),
            Assignment::from_pairs(bits.iter().map(|&(v, b)| (Var(v), b))),
        )
    }

    /// ∀x ∃e: (x ∨ e), (¬x ∨ ¬e); x = 1, e = 2.
    fn toy() -> PcnfFormula {
        let p =
            Prefix::merged([(Quant::Forall, vec![Var(1)]), (Quant::Exists, vec![Var(2)])]).unwrap();
        PcnfFormula::new(
            p,
            vec![Clause::new([l(1), l(2)]), Clause::new([l(-1), l(-2)])],
        )
    }

    #[test]
    fn annotations_must_agree() {
        let f = toy();
        let mut t = QbfTrace::new(Calculus::IrCalc);
        t.push(QbfStep::axiom(0, 0, vec![a(2, &[(1, false)])]));
        t.push(QbfStep::axiom(0, 1, vec![a(-2, &[(1, true)])]));
        t.push(QbfStep::res(0, 0, 1, a(2, &[(1, false)]), vec![]));
        let err = check_ircalc(&f, &t, &SigmaV::new(), &ExtensionSeq::default()).unwrap_err();
        assert!(matches!(
            err,
            CheckError::Step(StepError {
                step: 2,
                failure: Failure::AnnotationMismatch(..),
                ..
            })
        ));
    }

    #[test]
    fn true_formula_has_no_axiom_shortcut() {
        let f = toy();
        let mut t = QbfTrace::new(Calculus::IrCalc);
        t.push(QbfStep::axiom(0, 0, vec![a(2, &[])]));
        let err = check_ircalc(&f, &t, &SigmaV::new(), &ExtensionSeq::default()).unwrap_err();
        assert!(matches!(
            err,
            CheckError::Step(StepError {
                failure: Failure::WrongResult { .. },
                ..
            })
        ));
    }

    #[test]
    fn instantiation_then_resolution() {
        // ∀x ∃e: (e), (¬x ∨ ¬e). Axiom 0 gives e with an empty annotation.
        let p =
            Prefix::merged([(Quant::Forall, vec![Var(1)]), (Quant::Exists, vec![Var(2)])]).unwrap();
        let f = PcnfFormula::new(p, vec![Clause::new([l(2)]), Clause::new([l(-1), l(-2)])]);
        let mut t = QbfTrace::new(Calculus::IrCalc);
        t.push(QbfStep::axiom(0, 0, vec![a(2, &[])]));
        t.push(QbfStep::inst(
            0,
            0,
            Assignment::from_pairs([(Var(1), true)]),
            vec![a(2, &[(1, true)])],
        ));
        t.push(QbfStep::axiom(0, 1, vec![a(-2, &[(1, true)])]));
        t.push(QbfStep::res(0, 1, 2, a(2, &[(1, true)]), vec![]));
        let r = check_ircalc(&f, &t, &SigmaV::new(), &ExtensionSeq::default()).unwrap();
        assert!(r.refutation);
        assert!(!r.metrics.tree_form || r.metrics.clause_count == 4);
    }

    #[test]
    fn sigma_trace_needs_sigma_tag() {
        // ∃e ∀x: (e ∨ x), (¬e ∨ ¬x) is refuted after replacing x by e.
        let p =
            Prefix::merged([(Quant::Exists, vec![Var(2)]), (Quant::Forall, vec![Var(1)])]).unwrap();
        let f = PcnfFormula::new(
            p,
            vec![Clause::new([l(2), l(1)]), Clause::new([l(-2), l(-1)])],
        );
        let sv = SigmaV::from_pairs([(Var(1), Var(2))]);
        let mut t = QbfTrace::new(Calculus::IrCalcSigma);
        t.push(QbfStep::axiom(0, 0, vec![a(2, &[])]));
        t.push(QbfStep::axiom(0, 1, vec![a(-2, &[])]));
        t.push(QbfStep::res(0, 0, 1, a(2, &[]), vec![]));
        assert!(
            check_ircalc(&f, &t, &sv, &ExtensionSeq::default())
                .unwrap()
                .refutation
        );
        t.calculus = Calculus::IrCalc;
        assert!(matches!(
            check_ircalc(&f, &t, &sv, &ExtensionSeq::default()),
            Err(CheckError::Calculus { .. })
        ));
    }

    #[test]
    fn extension_axioms() {
        // ∃a b: (a), (b), and q ≡ a ∧ b with (¬q) in the matrix.
        let p = Prefix::merged([(Quant::Exists, vec![Var(1), Var(2)])]).unwrap();
        let f = PcnfFormula::new(
            p,
            vec![
                Clause::new([l(1)]),
                Clause::new([l(2)]),
                Clause::new([l(-3)]),
            ],
        );
        let def = Definition {
            op: DefOp::And,
            args: vec![l(1), l(2)],
        };
        let clauses = crate::calculi::definition_clauses(Var(3), &def);
        let delta = ExtensionSeq {
            delta: vec![Extension {
                var: Var(3),
                name: None,
                def,
                clauses,
                level: 1,
            }],
        };
        // The matrix mentions v3, so it is not fresh.
        let t = QbfTrace::<AnnLit> {
            calculus: Calculus::IrCalcDeltaSigma,
            steps: vec![QbfStep::axiom(0, 0, vec![a(1, &[])])],
        };
        assert!(matches!(
            check_ircalc(&f, &t, &SigmaV::new(), &delta),
            Err(CheckError::Delta(_))
        ));
        let f = PcnfFormula::new(f.prefix.clone(), f.matrix[..2].to_vec());
        let flat = delta.clauses();
        let idx = flat.iter().position(|c| c.len() == 3).unwrap();
        let mut t = QbfTrace::new(Calculus::IrCalcDeltaSigma);
        let lits: Vec<AnnLit> = flat[idx].lits().iter().map(|&x| AnnLit::plain(x)).collect();
        t.push(QbfStep::ext_axiom(0, idx, lits));
        assert!(check_ircalc(&f, &t, &SigmaV::new(), &delta).is_ok());
    }
}
