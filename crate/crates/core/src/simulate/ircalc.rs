use super::{SimConfig, SimError, Simulation, SimulationReport, StepMap};
use crate::calculi::ircalc::check_ircalc;
use crate::calculi::{AnnLit, ExtensionSeq, IrTrace, Rule, SigmaV};
use crate::fol::{subsumes, FolClause, FreshVars, Literal, Subst, Term};
use crate::qbf::PcnfFormula;
use crate::r1::{
    check_r1, eliminate_subsumption, proof_metrics, resolve, ProofMetrics, R1Step, R1Trace,
};
use crate::translate::{wrap_units, wrapped_clauses, ClauseMode, SymbolMap};

fn truth(b: bool) -> Term {
    if b {
        Term::f1()
    } else {
        Term::f0()
    }
}

fn ann_subst(sm: &SymbolMap, l: &AnnLit) -> Subst {
    Subst::from_pairs(
        l.ann
            .iter()
            .map(|(u, b)| (sm.object_var(u).expect("prefix variable").clone(), truth(b))),
    )
}

/// `{(¬)p(f_e(X̄_e))σ | (¬)e^σ ∈ C}` with all universals left of `e` listed
/// in `X̄_e`; in EPR mode `p_e(X̄_e)σ`.
pub fn ircalc_clause_image(c: &[AnnLit], sm: &SymbolMap, epr: bool) -> FolClause {
    c.iter()
        .map(|l| {
            sm.literal_image(l.lit, epr)
                .expect("prefix variable")
                .apply(&ann_subst(sm, l))
        })
        .collect()
}

/// Transpiles an IR-calc refutation (no σ_v, no Δ) into R1 plus
/// subsumption. The target clause of every source step is exactly the
/// clause image of the annotated clause. Axioms are inputs followed by one
/// unit resolution per universal literal, INST is a SUBSUME step, FAC is a
/// no-op on sets, and RES is a RESOLVE step followed by a SUBSUME that maps
/// renamed variables back when needed.
pub fn simulate_ircalc_to_r1subs(
    f: &PcnfFormula,
    proof: &IrTrace,
    mode: ClauseMode,
    cfg: SimConfig,
) -> Result<Simulation, SimError> {
    let source = check_ircalc(f, proof, &SigmaV::new(), &ExtensionSeq::default())?;
    if !source.refutation {
        return Err(SimError::NotRefutation);
    }
    let (inputs, sm) = wrapped_clauses(f, mode)?;
    let epr = mode == ClauseMode::Epr;
    let mut out = R1Trace::new(true);
    let mut units: [Option<usize>; 2] = [None, None];
    let mut fresh = FreshVars::with_offset(cfg.fresh_offset);
    let mut image: Vec<usize> = Vec::with_capacity(proof.steps.len());
    let mut mapping = Vec::with_capacity(proof.steps.len());
    for (i, s) in proof.steps.iter().enumerate() {
        let breach = |msg: String| SimError::Invariant { step: i, msg };
        let before = out.steps.len();
        let d = ircalc_clause_image(&s.clause, &sm, epr);
        let (t, note) = match s.rule {
            Rule::Axiom => {
                let c = &f.matrix[s.axiom.expect("matrix axiom without Δ")];
                let mut at = out.push(R1Step::input(
                    sm.clause_image(c, epr).expect("closed formula"),
                ));
                for &u in c.lits().iter().filter(|l| f.prefix.is_universal(l.var)) {
                    let lit = sm.literal_image(u, epr).expect("prefix variable");
                    let [pos, neg] = wrap_units();
                    let (slot, unit) = if u.negated { (0, pos) } else { (1, neg) };
                    let ul = unit.lits()[0].clone();
                    let ua = *units[slot].get_or_insert_with(|| out.push(R1Step::input(unit)));
                    let r = resolve(out.clause(at), out.clause(ua), &lit, &ul, &mut fresh)
                        .map_err(|e| breach(e.to_string()))?;
                    at = out.push(R1Step::resolve(at, ua, lit, ul, r.clause));
                }
                (at, "input with unit resolutions")
            }
            Rule::Inst => {
                let p = image[s.prem[0]];
                if *out.clause(p) == d {
                    (p, "no-op: instantiation changes nothing")
                } else {
                    let tau = s.assign.as_ref().expect("checked");
                    let w = Subst::from_pairs(tau.iter().map(|(u, b)| {
                        (sm.object_var(u).expect("prefix variable").clone(), truth(b))
                    }));
                    (
                        out.push(R1Step::subsume(p, Some(w), d.clone())),
                        "subsumption",
                    )
                }
            }
            Rule::Fac => (image[s.prem[0]], "no-op: clauses are sets"),
            Rule::Res => {
                let (pa, pb) = (s.prem[0], s.prem[1]);
                let pivot = s.pivot.as_ref().expect("checked");
                for (c, l) in [
                    (&proof.steps[pa].clause, pivot.clone()),
                    (&proof.steps[pb].clause, pivot.negate()),
                ] {
                    let count = c.iter().filter(|&m| *m == l).count();
                    if count > 1 {
                        return Err(SimError::Unfactored { step: i, count });
                    }
                }
                let k =
                    ircalc_clause_image(std::slice::from_ref(pivot), &sm, epr).lits()[0].clone();
                let nk: Literal = k.negate();
                let (ta, tb) = (image[pa], image[pb]);
                let r = resolve(out.clause(ta), out.clause(tb), &k, &nk, &mut fresh)
                    .map_err(|e| breach(e.to_string()))?;
                let at = out.push(R1Step::resolve(ta, tb, k, nk, r.clause.clone()));
                if r.clause == d {
                    (at, "resolution")
                } else {
                    let back = subsumes(&r.clause, &d)
                        .ok_or_else(|| breach(format!("{} does not subsume {d}", r.clause)))?;
                    (
                        out.push(R1Step::subsume(at, Some(back), d.clone())),
                        "resolution and renaming back",
                    )
                }
            }
            Rule::UnivRed => unreachable!("rejected by the checker"),
        };
        if *out.clause(t) != d {
            return Err(breach(format!(
                "target clause {} differs from image {d}",
                out.clause(t)
            )));
        }
        if cfg.check_invariants
            && !out
                .clause(t)
                .vars()
                .iter()
                .all(|v| sm.var_of_object(v).is_some())
        {
            return Err(breach(format!("stray variable in {}", out.clause(t))));
        }
        image.push(t);
        mapping.push(StepMap {
            source: i,
            targets: (before..out.steps.len()).collect(),
            image: t,
            note: note.into(),
        });
    }
    check_r1(&inputs, &out, true)?;
    let report = SimulationReport::new(source.metrics, proof_metrics(&out), mapping);
    Ok(Simulation {
        inputs,
        trace: out,
        report,
    })
}

/// Result of the full IR-calc to pure R1 pipeline.
#[derive(Clone, Debug)]
pub struct Pipeline {
    /// The intermediate R1-plus-subsumption proof.
    pub with_subsumption: Simulation,
    pub pure: R1Trace,
    pub pure_metrics: ProofMetrics,
}

/// [`simulate_ircalc_to_r1subs`] followed by subsumption elimination; the
/// result is checked as a pure R1 refutation.
pub fn full_pipeline_to_r1(
    f: &PcnfFormula,
    proof: &IrTrace,
    mode: ClauseMode,
    cfg: SimConfig,
) -> Result<Pipeline, SimError> {
    let sim = simulate_ircalc_to_r1subs(f, proof, mode, cfg)?;
    let pure = eliminate_subsumption(&sim.inputs, &sim.trace)?;
    let report = check_r1(&sim.inputs, &pure, false)?;
    Ok(Pipeline {
        with_subsumption: sim,
        pure,
        pure_metrics: report.metrics,
    })
}
