use super::{SimConfig, SimError, Simulation, SimulationReport, StepMap};
use crate::calculi::qres::check_qres_qures;
use crate::calculi::{QresTrace, Rule};
use crate::fol::{match_clause_onto, FolClause, FreshVars, Literal, Subst};
use crate::qbf::{Lit, PcnfFormula};
use crate::r1::{check_r1, factor, proof_metrics, resolve, R1Step, R1Trace};
use crate::translate::{wrap_units, wrapped_clauses, ClauseMode, SymbolMap};

/// Transpiles a Q-res or QU-res refutation of `f` into an R1 refutation of
/// the wrapped Skolem (or EPR) clause set.
///
/// Every source clause `C_i` gets a target clause `E_i` with `E_iσ = D_i`
/// for a variable substitution `σ`, where `D_i` is the clause image of
/// `C_i`. Axioms become inputs, ∀-reduction resolves against `¬p(f₀)` or
/// `p(f₁)`, factoring becomes a FACTOR step or a no-op, and resolution
/// becomes one RESOLVE step. Pivots must occur once in their premises.
pub fn simulate_qures_to_r1(
    f: &PcnfFormula,
    proof: &QresTrace,
    mode: ClauseMode,
    cfg: SimConfig,
) -> Result<Simulation, SimError> {
    let source = check_qres_qures(f, proof, true)?;
    if !source.refutation {
        return Err(SimError::NotRefutation);
    }
    let (inputs, sm) = wrapped_clauses(f, mode)?;
    let epr = mode == ClauseMode::Epr;
    let mut b = Builder {
        sm: &sm,
        epr,
        out: R1Trace::new(false),
        units: [None, None],
        fresh: FreshVars::with_offset(cfg.fresh_offset),
    };
    let mut image: Vec<usize> = Vec::with_capacity(proof.steps.len());
    let mut sigma: Vec<Subst> = Vec::with_capacity(proof.steps.len());
    let mut mapping = Vec::with_capacity(proof.steps.len());
    for (i, s) in proof.steps.iter().enumerate() {
        let breach = |msg: String| SimError::Invariant { step: i, msg };
        let before = b.out.steps.len();
        let d = b.image(&s.clause);
        let (t, note) = match s.rule {
            Rule::Axiom => (b.out.push(R1Step::input(d.clone())), "input"),
            Rule::UnivRed => {
                let p = s.prem[0];
                let m = s.pivot.expect("checked");
                single(i, &proof.steps[p].clause, m)?;
                let e = b.preimage(image[p], &sigma[p], m).map_err(breach)?;
                // p(y) meets ¬p(f₀); ¬p(y) meets p(f₁).
                let (u, ul) = b.unit(!m.negated);
                let r = resolve(
                    b.out.clause(image[p]),
                    b.out.clause(u),
                    &e,
                    &ul,
                    &mut b.fresh,
                )
                .map_err(|e| breach(e.to_string()))?;
                (
                    b.out.push(R1Step::resolve(image[p], u, e, ul, r.clause)),
                    "universal reduction by unit resolution",
                )
            }
            Rule::Fac => {
                let p = s.prem[0];
                let l = s.pivot.expect("checked");
                let pre = b.preimages(image[p], &sigma[p], l);
                if pre.len() >= 2 {
                    let (c, _) = factor(b.out.clause(image[p]), &pre[0], &pre[1])
                        .map_err(|e| breach(e.to_string()))?;
                    (
                        b.out
                            .push(R1Step::factor(image[p], pre[0].clone(), pre[1].clone(), c)),
                        "factor",
                    )
                } else {
                    (image[p], "no-op: duplicates already merged")
                }
            }
            Rule::Res => {
                let (pa, pb) = (s.prem[0], s.prem[1]);
                let l = s.pivot.expect("checked");
                single(i, &proof.steps[pa].clause, l)?;
                single(i, &proof.steps[pb].clause, l.negate())?;
                let ka = b.preimage(image[pa], &sigma[pa], l).map_err(breach)?;
                let kb = b
                    .preimage(image[pb], &sigma[pb], l.negate())
                    .map_err(breach)?;
                let r = resolve(
                    b.out.clause(image[pa]),
                    b.out.clause(image[pb]),
                    &ka,
                    &kb,
                    &mut b.fresh,
                )
                .map_err(|e| breach(e.to_string()))?;
                (
                    b.out
                        .push(R1Step::resolve(image[pa], image[pb], ka, kb, r.clause)),
                    "resolution",
                )
            }
            Rule::Inst => unreachable!("rejected by the checker"),
        };
        let e = b.out.clause(t);
        let sg = match_clause_onto(e, &d)
            .ok_or_else(|| breach(format!("{d} is not an instance of {e}")))?;
        if cfg.check_invariants {
            if !sg.is_variable_subst() {
                return Err(breach(format!("{d} is not a variable instance of {e}")));
            }
            if e.is_tautology() {
                return Err(breach(format!("{e} is tautological")));
            }
        }
        image.push(t);
        sigma.push(sg);
        mapping.push(StepMap {
            source: i,
            targets: (before..b.out.steps.len()).collect(),
            image: t,
            note: note.into(),
        });
    }
    let trace = b.out;
    check_r1(&inputs, &trace, false)?;
    let report = SimulationReport::new(source.metrics, proof_metrics(&trace), mapping);
    Ok(Simulation {
        inputs,
        trace,
        report,
    })
}

fn single(step: usize, c: &[Lit], l: Lit) -> Result<(), SimError> {
    let count = c.iter().filter(|&&m| m == l).count();
    if count > 1 {
        return Err(SimError::Unfactored { step, count });
    }
    Ok(())
}

struct Builder<'a> {
    sm: &'a SymbolMap,
    epr: bool,
    out: R1Trace,
    /// Input steps of `p(f₁)` and `¬p(f₀)`, emitted on first use.
    units: [Option<usize>; 2],
    fresh: FreshVars,
}

impl Builder<'_> {
    fn lit(&self, l: Lit) -> Literal {
        self.sm.literal_image(l, self.epr).expect("closed formula")
    }

    fn image(&self, c: &[Lit]) -> FolClause {
        FolClause::new(c.iter().map(|&l| self.lit(l)))
    }

    fn preimages(&self, at: usize, sigma: &Subst, l: Lit) -> Vec<Literal> {
        let goal = self.lit(l);
        self.out
            .clause(at)
            .lits()
            .iter()
            .filter(|m| m.apply(sigma) == goal)
            .cloned()
            .collect()
    }

    fn preimage(&self, at: usize, sigma: &Subst, l: Lit) -> Result<Literal, String> {
        let mut pre = self.preimages(at, sigma, l);
        match pre.len() {
            1 => Ok(pre.pop().expect("one")),
            n => Err(format!(
                "{} has {n} preimages in {}",
                self.lit(l),
                self.out.clause(at)
            )),
        }
    }

    /// The unit clause used to cut a universal literal, with its literal:
    /// `¬p(f₀)` when `negative_unit`, else `p(f₁)`.
    fn unit(&mut self, negative_unit: bool) -> (usize, Literal) {
        let [pos, neg] = wrap_units();
        let (slot, c) = if negative_unit { (1, neg) } else { (0, pos) };
        let lit = c.lits()[0].clone();
        let at = match self.units[slot] {
            Some(at) => at,
            None => {
                let at = self.out.push(R1Step::input(c));
                self.units[slot] = Some(at);
                at
            }
        };
        (at, lit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculi::{Calculus, QbfStep, QbfTrace};
    use crate::qbf::{Clause, Prefix, Quant, Var};

    fn l(x: i64) -> Lit {
        Lit::from_dimacs(x).unwrap()
    }

    fn toy() -> (PcnfFormula, QresTrace) {
        let p =
            Prefix::merged([(Quant::Forall, vec![Var(1)]), (Quant::Exists, vec![Var(2)])]).unwrap();
        let m = [[1, 2], [1, -2], [-1, 2], [-1, -2]]
            .iter()
            .map(|c| Clause::new(c.iter().map(|&x| l(x))))
            .collect();
        let f = PcnfFormula::new(p, m);
        let mut t = QbfTrace::new(Calculus::QuRes);
        t.push(QbfStep::axiom(0, 0, vec![l(1), l(2)]));
        t.push(QbfStep::axiom(0, 1, vec![l(1), l(-2)]));
        t.push(QbfStep::res(0, 0, 1, l(2), vec![l(1), l(1)]));
        t.push(QbfStep::fac(0, 2, l(1), vec![l(1)]));
        t.push(QbfStep::axiom(0, 2, vec![l(-1), l(2)]));
        t.push(QbfStep::axiom(0, 3, vec![l(-1), l(-2)]));
        t.push(QbfStep::res(0, 4, 5, l(2), vec![l(-1), l(-1)]));
        t.push(QbfStep::fac(0, 6, l(-1), vec![l(-1)]));
        t.push(QbfStep::res(0, 3, 7, l(1), vec![]));
        (f, t)
    }

    #[test]
    fn toy_transpiles_in_both_modes() {
        let (f, t) = toy();
        for mode in [ClauseMode::Skolem, ClauseMode::Epr] {
            let sim = simulate_qures_to_r1(&f, &t, mode, SimConfig::default()).unwrap();
            assert!(sim.trace.last().unwrap().is_empty());
            assert!(sim.report.overhead_ratio <= 2.0);
            assert_eq!(sim.report.mapping.len(), t.steps.len());
        }
    }

    #[test]
    fn reduction_uses_truth_unit() {
        // ∃e ∀x: (e ∨ ¬x), (¬e).
        let p =
            Prefix::merged([(Quant::Exists, vec![Var(2)]), (Quant::Forall, vec![Var(1)])]).unwrap();
        let f = PcnfFormula::new(p, vec![Clause::new([l(2), l(-1)]), Clause::new([l(-2)])]);
        let mut t = QbfTrace::new(Calculus::QRes);
        t.push(QbfStep::axiom(0, 0, vec![l(2), l(-1)]));
        t.push(QbfStep::univ_red(0, 0, l(-1), vec![l(2)]));
        t.push(QbfStep::axiom(0, 1, vec![l(-2)]));
        t.push(QbfStep::res(0, 1, 2, l(2), vec![]));
        let sim = simulate_qures_to_r1(&f, &t, ClauseMode::Skolem, SimConfig::default()).unwrap();
        let red = &sim.trace.steps[sim.report.mapping[1].image];
        let unit = sim.trace.clause(red.prem[1]);
        assert_eq!(unit.to_string(), "p(f1)");
        assert_eq!(red.clause.to_string(), "p(f_v2)");
    }

    #[test]
    fn unfactored_pivot_is_reported() {
        // ∃a b: (a ∨ b), (a ∨ ¬b), (¬a); resolving on a while a ∨ a is unfactored.
        let p = Prefix::merged([(Quant::Exists, vec![Var(1), Var(2)])]).unwrap();
        let f = PcnfFormula::new(
            p,
            vec![
                Clause::new([l(1), l(2)]),
                Clause::new([l(1), l(-2)]),
                Clause::new([l(-1)]),
            ],
        );
        let mut t = QbfTrace::new(Calculus::QRes);
        t.push(QbfStep::axiom(0, 0, vec![l(1), l(2)]));
        t.push(QbfStep::axiom(0, 1, vec![l(1), l(-2)]));
        t.push(QbfStep::res(0, 0, 1, l(2), vec![l(1), l(1)]));
        t.push(QbfStep::axiom(0, 2, vec![l(-1)]));
        t.push(QbfStep::res(0, 2, 3, l(1), vec![l(1)]));
        t.push(QbfStep::axiom(0, 2, vec![l(-1)]));
        t.push(QbfStep::res(0, 4, 5, l(1), vec![]));
        let err =
            simulate_qures_to_r1(&f, &t, ClauseMode::Skolem, SimConfig::default()).unwrap_err();
        assert!(matches!(err, SimError::Unfactored { step: 4, count: 2 }));
        // With the factor in place the simulation goes through.
        let mut g = QbfTrace::new(Calculus::QRes);
        g.steps = t.steps[..3].to_vec();
        g.push(QbfStep::fac(0, 2, l(1), vec![l(1)]));
        g.push(QbfStep::axiom(0, 2, vec![l(-1)]));
        g.push(QbfStep::res(0, 3, 4, l(1), vec![]));
        assert!(simulate_qures_to_r1(&f, &g, ClauseMode::Skolem, SimConfig::default()).is_ok());
    }
}
