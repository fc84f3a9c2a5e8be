//! Ranking of σ_v bindings by the duplicates they create in axioms.

use serde::{Deserialize, Serialize};

use crate::calculi::SigmaV;
use crate::qbf::{PcnfFormula, Quant, Var};

/// One binding `x\e` with the number of matrix clauses in which it creates
/// a duplicate literal and the number it makes tautological.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaCandidate {
    pub x: Var,
    pub e: Var,
    pub duplicates: usize,
    pub tautologies: usize,
}

/// Every level-valid binding `x\e` (x universal, e existential, lv(e) <
/// lv(x)) for which some clause `C{x\e}` contains a duplicate literal,
/// ranked by duplicate count (descending), then tautology count
/// (ascending), then variable order.
pub fn suggest_sigma_v(f: &PcnfFormula) -> Vec<SigmaCandidate> {
    let prefix = &f.prefix;
    let mut out = Vec::new();
    for x in prefix
        .vars()
        .filter(|&v| prefix.quant(v) == Some(Quant::Forall))
    {
        let lx = prefix.level(x).expect("prefix variable");
        for e in prefix.vars().filter(|&v| {
            prefix.quant(v) == Some(Quant::Exists) && prefix.level(v).is_some_and(|l| l < lx)
        }) {
            let (mut duplicates, mut tautologies) = (0, 0);
            for c in &f.matrix {
                let Some(xl) = c.lits().iter().find(|l| l.var == x) else {
                    continue;
                };
                if let Some(el) = c.lits().iter().find(|l| l.var == e) {
                    if el.negated == xl.negated {
                        duplicates += 1;
                    } else {
                        tautologies += 1;
                    }
                }
            }
            if duplicates > 0 {
                out.push(SigmaCandidate {
                    x,
                    e,
                    duplicates,
                    tautologies,
                });
            }
        }
    }
    out.sort_by(|a, b| {
        b.duplicates
            .cmp(&a.duplicates)
            .then(a.tautologies.cmp(&b.tautologies))
            .then(a.x.cmp(&b.x))
            .then(a.e.cmp(&b.e))
    });
    out
}

/// The best-ranked binding for each universal, as one σ_v.
pub fn best_sigma_v(candidates: &[SigmaCandidate]) -> SigmaV {
    let mut sv = SigmaV::new();
    for c in candidates {
        sv.0.entry(c.x).or_insert(c.e);
    }
    sv
}
