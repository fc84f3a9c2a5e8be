//! The KBKF family Ψ_t with its Δ and σ_v companions and short
//! refutations in QU-res, IR-calc with σ_v, and IR-calc with Δ and σ_v.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{need_positive, FamilyError};
use crate::calculi::ircalc::check_ircalc;
use crate::calculi::qres::check_qres_qures;
use crate::calculi::trace::remove_one;
use crate::calculi::{
    definition_clauses, ircalc_axiom, validate_delta, AnnLit, Calculus, DefOp, Definition,
    Extension, ExtensionSeq, IrTrace, QbfStep, QbfTrace, QresTrace, SigmaV,
};
use crate::qbf::{Clause, Lit, PcnfFormula, Prefix, Quant, Var};

fn d(j: usize) -> Var {
    if j == 0 {
        Var(1)
    } else {
        Var(3 * j as u32 - 1)
    }
}

fn e(j: usize) -> Var {
    Var(3 * j as u32)
}

fn x(j: usize) -> Var {
    Var(3 * j as u32 + 1)
}

fn f(t: usize, i: usize) -> Var {
    Var((3 * t + 1 + i) as u32)
}

fn q(t: usize, i: usize) -> Var {
    Var((4 * t + 1 + i) as u32)
}

/// Matrix index of `C_k`.
fn c_idx(k: usize) -> usize {
    k
}

/// Matrix index of `B_k`.
fn b_idx(t: usize, k: usize) -> usize {
    2 * t + 2 + k
}

fn p(v: Var) -> Lit {
    Lit::pos(v)
}

fn n(v: Var) -> Lit {
    Lit::neg(v)
}

/// Ψ_t with prefix `∃d₀d₁e₁ ∀x₁ ∃d₂e₂ … ∀x_t ∃f₁…f_t`; matrix
/// `C₀ … C_{2t+1}` followed by `B₀ … B_{2t−1}`.
pub fn gen_kbkf(t: usize) -> Result<PcnfFormula, FamilyError> {
    need_positive(t)?;
    let mut blocks = vec![(Quant::Exists, vec![d(0), d(1), e(1)])];
    let mut names = BTreeMap::from([(d(0), "d0".to_string())]);
    for j in 1..=t {
        if j > 1 {
            blocks.push((Quant::Exists, vec![d(j), e(j)]));
        }
        blocks.push((Quant::Forall, vec![x(j)]));
        names.insert(d(j), format!("d{j}"));
        names.insert(e(j), format!("e{j}"));
        names.insert(x(j), format!("x{j}"));
    }
    let fs: Vec<Var> = (1..=t).map(|i| f(t, i)).collect();
    for (i, &v) in fs.iter().enumerate() {
        names.insert(v, format!("f{}", i + 1));
    }
    blocks.push((Quant::Exists, fs.clone()));
    let prefix = Prefix::merged(blocks).expect("fresh variables");

    let c = |ls: Vec<Lit>| Clause::new(ls);
    let mut m = vec![c(vec![n(d(0))]), c(vec![p(d(0)), n(d(1)), n(e(1))])];
    for j in 1..t {
        m.push(c(vec![p(d(j)), n(x(j)), n(d(j + 1)), n(e(j + 1))]));
        m.push(c(vec![p(e(j)), p(x(j)), n(d(j + 1)), n(e(j + 1))]));
    }
    let nf = || fs.iter().map(|&v| n(v));
    m.push(c([p(d(t)), n(x(t))].into_iter().chain(nf()).collect()));
    m.push(c([p(e(t)), p(x(t))].into_iter().chain(nf()).collect()));
    for j in 0..t {
        m.push(c(vec![n(x(j + 1)), p(f(t, j + 1))]));
        m.push(c(vec![p(x(j + 1)), p(f(t, j + 1))]));
    }
    Ok(PcnfFormula::new(prefix, m).with_names(names))
}

/// Δ = (q_i ↔ ¬d_i ∧ e_i) for i = 1..t, each q_i in the block of d_i and e_i.
/// Clauses are listed as `q ∨ d ∨ ¬e`, `¬q ∨ ¬d`, `¬q ∨ e`.
pub fn gen_kbkf_delta(t: usize) -> Result<ExtensionSeq, FamilyError> {
    need_positive(t)?;
    let delta = (1..=t)
        .map(|i| {
            let qi = q(t, i);
            let def = Definition {
                op: DefOp::And,
                args: vec![n(d(i)), p(e(i))],
            };
            let clauses = vec![
                Clause::new([p(qi), p(d(i)), n(e(i))]),
                Clause::new([n(qi), n(d(i))]),
                Clause::new([n(qi), p(e(i))]),
            ];
            debug_assert_eq!(
                clauses.iter().collect::<BTreeSet<_>>(),
                definition_clauses(qi, &def).iter().collect()
            );
            Extension {
                var: qi,
                name: Some(format!("q{i}")),
                def,
                clauses,
                level: 2 * i - 1,
            }
        })
        .collect();
    Ok(ExtensionSeq { delta })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SigmaMode {
    /// `x_i \ e_i`.
    Atomic,
    /// `x_i \ q_i`, for use with [`gen_kbkf_delta`].
    Herbrand,
}

impl std::str::FromStr for SigmaMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "atomic" => Ok(SigmaMode::Atomic),
            "herbrand" => Ok(SigmaMode::Herbrand),
            _ => Err(format!("unknown σ_v mode `{s}`")),
        }
    }
}

pub fn gen_kbkf_sigma(t: usize, mode: SigmaMode) -> Result<SigmaV, FamilyError> {
    need_positive(t)?;
    Ok(SigmaV::from_pairs((1..=t).map(|i| {
        (
            x(i),
            if mode == SigmaMode::Atomic {
                e(i)
            } else {
                q(t, i)
            },
        )
    })))
}

/// Which part of the stage schedule a step belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KbkfStage {
    /// `¬d₁ ∨ ¬e₁` from `C₀` and `C₁`.
    Setup,
    /// Derivation of `¬d_{j+1} ∨ ¬e_{j+1}` from `¬d_j ∨ ¬e_j`.
    Interior(usize),
    /// Derivation of `¬f₁ ∨ … ∨ ¬f_t` from `¬d_t ∨ ¬e_t`.
    Final,
    /// The units `f_i`.
    Units,
    /// Resolving the units away.
    Closing,
}

impl KbkfStage {
    pub fn is_interior(self) -> bool {
        matches!(self, KbkfStage::Setup | KbkfStage::Interior(_))
    }
}

/// An IR-calc refutation of Ψ_t with one stage label per step.
#[derive(Clone, Debug)]
pub struct KbkfRefutation {
    pub trace: IrTrace,
    pub stages: Vec<KbkfStage>,
}

impl KbkfRefutation {
    /// Widest clause among the steps whose stage satisfies `pick`.
    pub fn max_width(&self, pick: impl Fn(KbkfStage) -> bool) -> usize {
        self.trace
            .steps
            .iter()
            .zip(&self.stages)
            .filter(|(_, &s)| pick(s))
            .map(|(s, _)| s.clause.len())
            .max()
            .unwrap_or(0)
    }
}

struct IrBuilder<'a> {
    f: &'a PcnfFormula,
    prefix: Prefix,
    sv: &'a SigmaV,
    ext: Vec<Clause>,
    trace: IrTrace,
    stages: Vec<KbkfStage>,
    stage: KbkfStage,
}

impl IrBuilder<'_> {
    fn push(&mut self, s: QbfStep<AnnLit>) -> usize {
        self.stages.push(self.stage);
        self.trace.push(s)
    }

    fn axiom(&mut self, idx: usize) -> usize {
        let c = ircalc_axiom(&self.f.matrix[idx], &self.prefix, self.sv, false)
            .expect("valid axiom by construction");
        self.push(QbfStep::axiom(0, idx, c))
    }

    fn ext_axiom(&mut self, idx: usize) -> usize {
        let c = ircalc_axiom(&self.ext[idx], &self.prefix, self.sv, true)
            .expect("valid axiom by construction");
        self.push(QbfStep::ext_axiom(0, idx, c))
    }

    /// Resolves `a` (containing `pivot`) with `b` (containing its negation).
    fn res(&mut self, a: usize, b: usize, pivot: Lit) -> usize {
        let k = AnnLit::plain(pivot);
        let mut c =
            remove_one(&self.trace.steps[a].clause, &k).expect("pivot present by construction");
        c.extend(
            remove_one(&self.trace.steps[b].clause, &k.negate())
                .expect("complement present by construction"),
        );
        self.push(QbfStep::res(0, a, b, k, c))
    }

    /// Removes duplicates one FAC step at a time.
    fn fac_all(&mut self, mut at: usize) -> usize {
        loop {
            let c = &self.trace.steps[at].clause;
            let Some(dup) = c
                .iter()
                .enumerate()
                .find(|(i, l)| c[..*i].contains(l))
                .map(|(_, l)| l.clone())
            else {
                return at;
            };
            let r = remove_one(c, &dup).expect("present");
            at = self.push(QbfStep::fac(0, at, dup, r));
        }
    }
}

/// The tree refutation of Ψ_t in IR-calc with σ_v = {x_i\e_i}; all
/// annotations stay empty. Stage j uses `C_{2j}σ_v` and `C_{2j+1}σ_v`.
pub fn build_kbkf_ircalc_sigma_refutation(t: usize) -> Result<KbkfRefutation, FamilyError> {
    build_ir(t, SigmaMode::Atomic)
}

/// The tree refutation of Ψ_t in IR-calc with Δ and σ_v = {x_i\q_i}.
pub fn build_kbkf_ircalc_delta_refutation(t: usize) -> Result<KbkfRefutation, FamilyError> {
    build_ir(t, SigmaMode::Herbrand)
}

fn build_ir(t: usize, mode: SigmaMode) -> Result<KbkfRefutation, FamilyError> {
    let fm = gen_kbkf(t)?;
    let sv = gen_kbkf_sigma(t, mode)?;
    let delta = if mode == SigmaMode::Herbrand {
        gen_kbkf_delta(t)?
    } else {
        ExtensionSeq::default()
    };
    let prefix = validate_delta(&fm, &delta).expect("generated Δ is valid");
    let calculus = if mode == SigmaMode::Herbrand {
        Calculus::IrCalcDeltaSigma
    } else {
        Calculus::IrCalcSigma
    };
    let mut b = IrBuilder {
        f: &fm,
        prefix,
        sv: &sv,
        ext: delta.clauses(),
        trace: QbfTrace::new(calculus),
        stages: Vec::new(),
        stage: KbkfStage::Setup,
    };
    // Δ clause indices of q_i ∨ d_i ∨ ¬e_i and ¬q_i ∨ e_i.
    let delta_pos = |i: usize| 3 * (i - 1);
    let delta_e = |i: usize| 3 * (i - 1) + 2;

    let a0 = b.axiom(c_idx(0));
    let a1 = b.axiom(c_idx(1));
    let mut s = b.res(a1, a0, p(d(0)));

    for j in 1..=t {
        b.stage = if j < t {
            KbkfStage::Interior(j)
        } else {
            KbkfStage::Final
        };
        // d_j ∨ ¬e_j ∨ rest.
        let mut left = b.axiom(c_idx(2 * j));
        if mode == SigmaMode::Herbrand {
            let dq = b.ext_axiom(delta_pos(j));
            left = b.res(dq, left, p(q(t, j)));
            left = b.fac_all(left);
        }
        let r = b.res(left, s, p(d(j)));
        let r = b.fac_all(r);
        // e_j ∨ rest.
        let mut right = b.axiom(c_idx(2 * j + 1));
        if mode == SigmaMode::Herbrand {
            let eq = b.ext_axiom(delta_e(j));
            right = b.res(right, eq, p(q(t, j)));
            right = b.fac_all(right);
        }
        let next = b.res(right, r, p(e(j)));
        s = b.fac_all(next);
    }

    b.stage = KbkfStage::Units;
    let mut units = Vec::with_capacity(t);
    for i in 1..=t {
        let neg = b.axiom(b_idx(t, 2 * (i - 1)));
        let pos = b.axiom(b_idx(t, 2 * i - 1));
        let piv = if mode == SigmaMode::Atomic {
            e(i)
        } else {
            q(t, i)
        };
        let r = b.res(pos, neg, p(piv));
        units.push(b.fac_all(r));
    }

    b.stage = KbkfStage::Closing;
    for (i, u) in units.into_iter().enumerate() {
        s = b.res(u, s, p(f(t, i + 1)));
    }

    let IrBuilder { trace, stages, .. } = b;
    let report = check_ircalc(&fm, &trace, &sv, &delta)?;
    if !report.refutation {
        return Err(FamilyError::NotRefutation);
    }
    Ok(KbkfRefutation { trace, stages })
}

/// A QU-res refutation of Ψ_t: each `f_i` by a universal pivot on `x_i`,
/// then `d_j` and `e_j` from the bottom up with ∀-reduction of `x_j`.
/// Derived clauses are shared, so the proof is a DAG with O(t) steps.
pub fn kbkf_qures_refutation(t: usize) -> Result<QresTrace, FamilyError> {
    let fm = gen_kbkf(t)?;
    let mut tr: QresTrace = QbfTrace::new(Calculus::QuRes);
    let lits = |tr: &QresTrace, i: usize| tr.steps[i].clause.clone();
    let res = |tr: &mut QresTrace, a: usize, b: usize, piv: Lit| {
        let mut c = remove_one(&lits(tr, a), &piv).expect("pivot present by construction");
        c.extend(
            remove_one(&lits(tr, b), &piv.negate()).expect("complement present by construction"),
        );
        tr.push(QbfStep::res(0, a, b, piv, c))
    };
    let fac = |tr: &mut QresTrace, a: usize, l: Lit| {
        let c = remove_one(&lits(tr, a), &l).expect("present");
        tr.push(QbfStep::fac(0, a, l, c))
    };
    let red = |tr: &mut QresTrace, a: usize, l: Lit| {
        let c = remove_one(&lits(tr, a), &l).expect("present");
        tr.push(QbfStep::univ_red(0, a, l, c))
    };
    let axiom = |tr: &mut QresTrace, idx: usize| {
        tr.push(QbfStep::axiom(0, idx, fm.matrix[idx].lits().to_vec()))
    };

    let mut fs = Vec::with_capacity(t);
    for i in 1..=t {
        let bn = axiom(&mut tr, b_idx(t, 2 * (i - 1)));
        let bp = axiom(&mut tr, b_idx(t, 2 * i - 1));
        let r = res(&mut tr, bp, bn, p(x(i)));
        fs.push(fac(&mut tr, r, p(f(t, i))));
    }
    // Unit d_t and e_t, then d_j and e_j for j = t−1 … 1.
    let mut below: Vec<usize> = fs;
    let mut below_lits: Vec<Lit> = (1..=t).map(|i| p(f(t, i))).collect();
    for j in (1..=t).rev() {
        let mut units = Vec::with_capacity(2);
        for (top, u) in [(2 * j, n(x(j))), (2 * j + 1, p(x(j)))] {
            let mut cur = axiom(&mut tr, c_idx(top));
            for (&w, &l) in below.iter().zip(&below_lits) {
                cur = res(&mut tr, w, cur, l);
            }
            units.push(red(&mut tr, cur, u));
        }
        below = units;
        below_lits = vec![p(d(j)), p(e(j))];
    }
    let mut cur = axiom(&mut tr, c_idx(1));
    for (&w, &l) in below.iter().zip(&below_lits) {
        cur = res(&mut tr, w, cur, l);
    }
    let c0 = axiom(&mut tr, c_idx(0));
    res(&mut tr, cur, c0, p(d(0)));

    let report = check_qres_qures(&fm, &tr, true)?;
    if !report.refutation {
        return Err(FamilyError::NotRefutation);
    }
    Ok(tr)
}
