//! Test-side oracles and searches, written independently of the library's
//! evaluators so that they can be used to cross-check it.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qbfsim::calculi::{
    inst, ircalc_axiom, normalize_ann, AnnLit, Assignment, Calculus, IrTrace, QbfStep, QbfTrace,
    QresTrace, SigmaV,
};
use qbfsim::fol::{FolClause, Term, FALSE_CONST};
use qbfsim::qbf::{BinOp, Clause, Lit, PcnfFormula, Qbf, Quant, Var};
use qbfsim::translate::FoFormula;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random closed rectified QBF with at most `max_vars` variables and at
/// most `max_conn` connectives (quantifiers count as connectives).
pub fn random_qbf(rng: &mut ChaCha8Rng, max_vars: u32, max_conn: usize) -> Qbf {
    struct G<'a> {
        rng: &'a mut ChaCha8Rng,
        budget: usize,
        next: u32,
        max_vars: u32,
        bound: Vec<Var>,
    }
    impl G<'_> {
        fn quant(&mut self) -> Qbf {
            self.budget -= 1;
            let v = Var(self.next);
            self.next += 1;
            self.bound.push(v);
            let body = self.go();
            self.bound.pop();
            let q = if self.rng.gen_bool(0.5) {
                Quant::Forall
            } else {
                Quant::Exists
            };
            Qbf::Quant(q, v, Box::new(body))
        }

        fn leaf(&mut self) -> Qbf {
            if !self.bound.is_empty() && self.rng.gen_bool(0.9) {
                Qbf::Var(self.bound[self.rng.gen_range(0..self.bound.len())])
            } else if self.rng.gen_bool(0.5) {
                Qbf::Top
            } else {
                Qbf::Bot
            }
        }

        fn go(&mut self) -> Qbf {
            if self.budget == 0 || self.rng.gen_bool(0.2) {
                return self.leaf();
            }
            let r: f64 = self.rng.gen();
            if r < 0.3 && self.next <= self.max_vars {
                self.quant()
            } else if r < 0.45 {
                self.budget -= 1;
                Qbf::not(self.go())
            } else {
                self.budget -= 1;
                let op = BinOp::ALL[self.rng.gen_range(0..BinOp::ALL.len())];
                let a = self.go();
                let b = self.go();
                Qbf::bin(op, a, b)
            }
        }
    }
    let mut g = G {
        rng,
        budget: max_conn,
        next: 1,
        max_vars,
        bound: Vec::new(),
    };
    g.quant()
}

/// Truth value of a closed QBF by direct recursion.
pub fn eval_qbf(f: &Qbf) -> bool {
    fn go(f: &Qbf, env: &mut Vec<(Var, bool)>) -> bool {
        match f {
            Qbf::Top => true,
            Qbf::Bot => false,
            Qbf::Var(v) => env
                .iter()
                .rev()
                .find(|(w, _)| w == v)
                .map(|&(_, b)| b)
                .expect("closed formula"),
            Qbf::Not(a) => !go(a, env),
            Qbf::Bin(op, a, b) => {
                let x = go(a, env);
                let y = go(b, env);
                match op {
                    BinOp::And => x && y,
                    BinOp::Or => x || y,
                    BinOp::Implies => !x || y,
                    BinOp::Iff => x == y,
                    BinOp::Xor => x != y,
                }
            }
            Qbf::Quant(q, v, body) => {
                let mut vals = [false; 2];
                for (i, b) in [false, true].into_iter().enumerate() {
                    env.push((*v, b));
                    vals[i] = go(body, env);
                    env.pop();
                }
                match q {
                    Quant::Forall => vals[0] && vals[1],
                    Quant::Exists => vals[0] || vals[1],
                }
            }
        }
    }
    go(f, &mut Vec::new())
}

/// Two-element satisfiability of `g ∧ p(f1) ∧ ¬p(f0)`. Under the wrapper
/// `p` is injective on {0, 1}, so the only freedom is which element `f1`
/// denotes.
pub fn fo_wrapped_sat(g: &FoFormula) -> bool {
    fn go(g: &FoFormula, f1: usize, env: &mut Vec<(String, usize)>) -> bool {
        let p = |d: usize| d == f1;
        match g {
            FoFormula::Atom(l) => {
                let d = match &l.args[0] {
                    Term::Var(x) => {
                        env.iter()
                            .rev()
                            .find(|(y, _)| **y == **x)
                            .expect("closed formula")
                            .1
                    }
                    Term::App(c, _) if &**c == FALSE_CONST => 1 - f1,
                    Term::App(_, _) => f1,
                };
                p(d) != l.negated
            }
            FoFormula::Not(a) => !go(a, f1, env),
            FoFormula::Bin(op, a, b) => {
                let x = go(a, f1, env);
                let y = go(b, f1, env);
                op.apply(x, y)
            }
            FoFormula::Quant(q, v, body) => {
                let mut vals = [false; 2];
                for (d, slot) in vals.iter_mut().enumerate() {
                    env.push((v.clone(), d));
                    *slot = go(body, f1, env);
                    env.pop();
                }
                match q {
                    Quant::Forall => vals[0] && vals[1],
                    Quant::Exists => vals[0] || vals[1],
                }
            }
        }
    }
    (0..2).any(|f1| go(g, f1, &mut Vec::new()))
}

enum CTerm {
    Var(usize),
    App(usize, Vec<CTerm>),
}

struct CLit {
    pred: usize,
    args: Vec<CTerm>,
    negated: bool,
}

fn ceval(t: &CTerm, interp: u64, env: usize) -> usize {
    match t {
        CTerm::Var(i) => (env >> i) & 1,
        CTerm::App(off, args) => {
            let idx = args
                .iter()
                .enumerate()
                .fold(0, |acc, (i, a)| acc | ceval(a, interp, env) << i);
            ((interp >> (off + idx)) & 1) as usize
        }
    }
}

/// Brute-force two-element satisfiability of a clause set: every
/// interpretation of every function and predicate symbol is enumerated.
/// `None` when that space exceeds `max_bits` booleans.
pub fn clauses_two_element_sat(clauses: &[FolClause], max_bits: usize) -> Option<bool> {
    let mut offsets: HashMap<(String, usize, bool), usize> = HashMap::new();
    let mut bits = 0usize;
    let mut slot = |name: &str, arity: usize, pred: bool, bits: &mut usize| -> Option<usize> {
        if arity > 16 {
            return None;
        }
        let key = (name.to_string(), arity, pred);
        if let Some(&o) = offsets.get(&key) {
            return Some(o);
        }
        let o = *bits;
        *bits += 1 << arity;
        offsets.insert(key, o);
        Some(o)
    };
    fn compile(
        t: &Term,
        vars: &[String],
        slot: &mut dyn FnMut(&str, usize, bool, &mut usize) -> Option<usize>,
        bits: &mut usize,
    ) -> Option<CTerm> {
        Some(match t {
            Term::Var(x) => CTerm::Var(vars.iter().position(|v| **v == **x)?),
            Term::App(f, args) => {
                let off = slot(f, args.len(), false, bits)?;
                let args = args
                    .iter()
                    .map(|a| compile(a, vars, slot, bits))
                    .collect::<Option<Vec<_>>>()?;
                CTerm::App(off, args)
            }
        })
    }
    let mut compiled: Vec<(usize, Vec<CLit>)> = Vec::new();
    for c in clauses {
        let vars: Vec<String> = c.vars().iter().map(|v| v.to_string()).collect();
        if vars.len() > 20 {
            return None;
        }
        let mut lits = Vec::new();
        for l in c.lits() {
            let args = l
                .args
                .iter()
                .map(|a| compile(a, &vars, &mut slot, &mut bits))
                .collect::<Option<Vec<_>>>()?;
            let pred = slot(&l.pred, l.args.len(), true, &mut bits)?;
            lits.push(CLit {
                pred,
                args,
                negated: l.negated,
            });
        }
        compiled.push((vars.len(), lits));
        if bits > max_bits {
            return None;
        }
    }
    'interp: for interp in 0..(1u64 << bits) {
        for (nv, lits) in &compiled {
            for env in 0..(1usize << nv) {
                let sat = lits.iter().any(|l| {
                    let idx = l
                        .args
                        .iter()
                        .enumerate()
                        .fold(0, |acc, (i, a)| acc | ceval(a, interp, env) << i);
                    ((interp >> (l.pred + idx)) & 1 == 1) != l.negated
                });
                if !sat {
                    continue 'interp;
                }
            }
        }
        return Some(true);
    }
    Some(false)
}

/// Truth value of a PCNF formula by expanding the prefix.
pub fn eval_pcnf(f: &PcnfFormula) -> bool {
    let order: Vec<(Var, Quant)> = f
        .prefix
        .blocks()
        .iter()
        .flat_map(|b| b.vars.iter().map(move |&v| (v, b.quant)))
        .collect();
    fn go(f: &PcnfFormula, order: &[(Var, Quant)], val: &mut HashMap<Var, bool>) -> bool {
        match order.split_first() {
            None => f
                .matrix
                .iter()
                .all(|c| c.lits().iter().any(|l| val[&l.var] != l.negated)),
            Some((&(v, q), rest)) => {
                let mut out = [false; 2];
                for (i, b) in [false, true].into_iter().enumerate() {
                    val.insert(v, b);
                    out[i] = go(f, rest, val);
                }
                val.remove(&v);
                match q {
                    Quant::Forall => out[0] && out[1],
                    Quant::Exists => out[0] || out[1],
                }
            }
        }
    }
    go(f, &order, &mut HashMap::new())
}

fn remove_one<L: PartialEq + Clone>(c: &[L], l: &L) -> Vec<L> {
    let mut out = c.to_vec();
    let i = out.iter().position(|m| m == l).expect("literal present");
    out.remove(i);
    out
}

/// Appends factoring steps to `trace` until the clause of step `at` has
/// no duplicate literal; returns the last step.
fn factor_out<L: Ord + Clone>(trace: &mut QbfTrace<L>, mut at: usize) -> usize {
    loop {
        let c = trace.steps[at].clause.clone();
        let mut sorted = c.clone();
        sorted.sort();
        let dup = sorted
            .windows(2)
            .find(|w| w[0] == w[1])
            .map(|w| w[0].clone());
        match dup {
            None => return at,
            Some(l) => at = trace.push(QbfStep::fac(0, at, l.clone(), remove_one(&c, &l))),
        }
    }
}

enum IrHow {
    Axiom(usize),
    Res(usize, usize, AnnLit),
    Inst(usize, Assignment),
}

/// Breadth-first IR-calc saturation (plain IR-calc: no σ_v, no Δ) with
/// complete instantiations over all universals. Returns a checked-shape
/// refutation with explicit factoring, or `None` within `max_nodes`.
pub fn ircalc_search(f: &PcnfFormula, max_nodes: usize) -> Option<IrTrace> {
    let universals: Vec<Var> = f
        .prefix
        .vars()
        .filter(|&v| f.prefix.is_universal(v))
        .collect();
    let taus: Vec<Assignment> = (0..1u32 << universals.len())
        .map(|bits| {
            Assignment::from_pairs(
                universals
                    .iter()
                    .enumerate()
                    .map(|(i, &u)| (u, bits >> i & 1 == 1)),
            )
        })
        .collect();
    let mut nodes: Vec<(Vec<AnnLit>, IrHow)> = Vec::new();
    let mut seen: HashSet<Vec<AnnLit>> = HashSet::new();
    let mut add = |nodes: &mut Vec<(Vec<AnnLit>, IrHow)>, c: Vec<AnnLit>, how: IrHow| -> bool {
        if seen.insert(c.clone()) {
            let empty = c.is_empty();
            nodes.push((c, how));
            empty
        } else {
            false
        }
    };
    for (i, c) in f.matrix.iter().enumerate() {
        if let Ok(a) = ircalc_axiom(c, &f.prefix, &SigmaV::new(), false) {
            if add(&mut nodes, a, IrHow::Axiom(i)) {
                return Some(rebuild_ir(f, &nodes));
            }
        }
    }
    let mut next = 0;
    while next < nodes.len() && nodes.len() < max_nodes {
        let i = next;
        next += 1;
        for tau in &taus {
            let c = normalize_ann(inst(tau, &nodes[i].0, &f.prefix).expect("universal domain"));
            if add(&mut nodes, c, IrHow::Inst(i, tau.clone())) {
                return Some(rebuild_ir(f, &nodes));
            }
        }
        for j in 0..=i {
            for (a, b) in [(i, j), (j, i)] {
                let pivots: Vec<AnnLit> = nodes[a]
                    .0
                    .iter()
                    .filter(|l| !l.lit.negated && nodes[b].0.contains(&l.negate()))
                    .cloned()
                    .collect();
                for p in pivots {
                    let mut r = remove_one(&nodes[a].0, &p);
                    r.extend(remove_one(&nodes[b].0, &p.negate()));
                    let r = normalize_ann(r);
                    if r.iter().any(|l| r.contains(&l.negate())) {
                        continue;
                    }
                    if add(&mut nodes, r, IrHow::Res(a, b, p)) {
                        return Some(rebuild_ir(f, &nodes));
                    }
                }
            }
        }
    }
    None
}

fn rebuild_ir(f: &PcnfFormula, nodes: &[(Vec<AnnLit>, IrHow)]) -> IrTrace {
    let mut need = vec![false; nodes.len()];
    let mut stack = vec![nodes.len() - 1];
    while let Some(i) = stack.pop() {
        if std::mem::replace(&mut need[i], true) {
            continue;
        }
        match &nodes[i].1 {
            IrHow::Axiom(_) => {}
            IrHow::Res(a, b, _) => stack.extend([*a, *b]),
            IrHow::Inst(a, _) => stack.push(*a),
        }
    }
    let mut trace = QbfTrace::new(Calculus::IrCalc);
    let mut at: HashMap<usize, usize> = HashMap::new();
    for i in (0..nodes.len()).filter(|&i| need[i]) {
        let id = match &nodes[i].1 {
            IrHow::Axiom(k) => trace.push(QbfStep::axiom(0, *k, nodes[i].0.clone())),
            IrHow::Res(a, b, p) => {
                let (ta, tb) = (at[a], at[b]);
                let mut raw = remove_one(&trace.steps[ta].clause, p);
                raw.extend(remove_one(&trace.steps[tb].clause, &p.negate()));
                let r = trace.push(QbfStep::res(0, ta, tb, p.clone(), raw));
                factor_out(&mut trace, r)
            }
            IrHow::Inst(a, tau) => {
                let ta = at[a];
                let raw = inst(tau, &trace.steps[ta].clause, &f.prefix).expect("universal domain");
                let r = trace.push(QbfStep::inst(0, ta, tau.clone(), raw));
                factor_out(&mut trace, r)
            }
        };
        at.insert(i, id);
    }
    trace
}

enum QHow {
    Axiom(usize),
    Res(usize, usize, Lit),
    Red(usize),
}

/// Outcome of a bounded Q-res saturation.
pub struct QresSearch {
    pub refutation: Option<QresTrace>,
    pub clauses: usize,
    pub stop: Stop,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stop {
    Refuted,
    /// Closed under the rules: no refutation exists from these clauses.
    Saturated,
    DepthLimit,
    ClauseBudget,
}

fn reduce(f: &PcnfFormula, c: &Clause) -> Clause {
    let max_e = c
        .lits()
        .iter()
        .filter(|l| f.prefix.is_existential(l.var))
        .filter_map(|l| f.prefix.level(l.var))
        .max()
        .unwrap_or(0);
    Clause::new(
        c.lits()
            .iter()
            .copied()
            .filter(|l| f.prefix.is_existential(l.var) || f.prefix.level(l.var).unwrap() < max_e),
    )
}

/// Level-by-level Q-res saturation from the matrix clauses `axioms`:
/// non-tautological resolvents on existential pivots, each followed by full
/// universal reduction. Stops at `max_depth` levels or `max_clauses`.
pub fn qres_search(
    f: &PcnfFormula,
    axioms: &[usize],
    max_depth: usize,
    max_clauses: usize,
) -> QresSearch {
    let mut nodes: Vec<(Clause, QHow)> = Vec::new();
    let mut seen: HashSet<Clause> = HashSet::new();
    let mut found = None;
    let mut push =
        |nodes: &mut Vec<(Clause, QHow)>, c: Clause, how: QHow, found: &mut Option<usize>| {
            let r = reduce(f, &c);
            if seen.contains(&c) && seen.contains(&r) {
                return;
            }
            if seen.insert(c.clone()) {
                nodes.push((c.clone(), how));
            }
            if r != c && seen.insert(r.clone()) {
                let at = nodes
                    .iter()
                    .rposition(|(d, _)| *d == c)
                    .expect("just inserted or seen");
                nodes.push((r.clone(), QHow::Red(at)));
            }
            if r.is_empty() && found.is_none() {
                *found = Some(nodes.iter().rposition(|(d, _)| d.is_empty()).unwrap());
            }
        };
    for &k in axioms {
        if !f.matrix[k].is_tautology() {
            push(&mut nodes, f.matrix[k].clone(), QHow::Axiom(k), &mut found);
        }
    }
    let mut frontier_start = 0;
    let mut stop = Stop::DepthLimit;
    for _ in 0..max_depth {
        if found.is_some() || nodes.len() >= max_clauses {
            break;
        }
        let frontier_end = nodes.len();
        for i in frontier_start..frontier_end {
            for j in 0..frontier_end {
                if j >= frontier_start && j > i {
                    continue;
                }
                let lits = nodes[i].0.lits().to_vec();
                for l in lits {
                    if !f.prefix.is_existential(l.var) || !nodes[j].0.contains(l.negate()) {
                        continue;
                    }
                    let r = Clause::new(
                        nodes[i]
                            .0
                            .lits()
                            .iter()
                            .filter(|&&m| m != l)
                            .chain(nodes[j].0.lits().iter().filter(|&&m| m != l.negate()))
                            .copied(),
                    );
                    if r.is_tautology() {
                        continue;
                    }
                    push(&mut nodes, r, QHow::Res(i, j, l), &mut found);
                    if found.is_some() || nodes.len() >= max_clauses {
                        break;
                    }
                }
            }
        }
        if nodes.len() == frontier_end {
            stop = Stop::Saturated;
            break;
        }
        frontier_start = frontier_end;
    }
    if found.is_some() {
        stop = Stop::Refuted;
    } else if nodes.len() >= max_clauses {
        stop = Stop::ClauseBudget;
    }
    QresSearch {
        refutation: found.map(|e| rebuild_qres(f, &nodes, e)),
        clauses: nodes.len(),
        stop,
    }
}

fn rebuild_qres(f: &PcnfFormula, nodes: &[(Clause, QHow)], goal: usize) -> QresTrace {
    let mut need: BTreeSet<usize> = BTreeSet::new();
    let mut stack = vec![goal];
    while let Some(i) = stack.pop() {
        if !need.insert(i) {
            continue;
        }
        match &nodes[i].1 {
            QHow::Axiom(_) => {}
            QHow::Res(a, b, _) => stack.extend([*a, *b]),
            QHow::Red(a) => stack.push(*a),
        }
    }
    let mut trace = QbfTrace::new(Calculus::QRes);
    let mut at: BTreeMap<usize, usize> = BTreeMap::new();
    for &i in &need {
        let id = match &nodes[i].1 {
            QHow::Axiom(k) => trace.push(QbfStep::axiom(0, *k, nodes[i].0.lits().to_vec())),
            QHow::Res(a, b, p) => {
                let (ta, tb) = (at[a], at[b]);
                let mut raw = remove_one(&trace.steps[ta].clause, p);
                raw.extend(remove_one(&trace.steps[tb].clause, &p.negate()));
                let r = trace.push(QbfStep::res(0, ta, tb, *p, raw));
                factor_out(&mut trace, r)
            }
            QHow::Red(a) => {
                let mut cur = at[a];
                let target = &nodes[i].0;
                // Innermost universals first so each step is a legal reduction.
                let mut drop: Vec<Lit> = trace.steps[cur]
                    .clause
                    .iter()
                    .copied()
                    .filter(|l| !target.contains(*l))
                    .collect();
                drop.sort_by_key(|l| std::cmp::Reverse(f.prefix.level(l.var)));
                for l in drop {
                    let c = remove_one(&trace.steps[cur].clause, &l);
                    cur = trace.push(QbfStep::univ_red(0, cur, l, c));
                }
                cur
            }
        };
        at.insert(i, id);
    }
    trace
}
