//! PHP_n, its structure-preserving negation TPHP′_n, and the two
//! combinations Φ_n = ∃X∀Y∃Z and Ω_n = ∀Y∃(Z∪X).

use std::collections::BTreeMap;

use super::{need_positive, FamilyError};
use crate::fol::{tidy_variables, FolClause, FreshVars, Literal, Term};
use crate::qbf::{Clause, Lit, PcnfFormula, Prefix, Quant, Var};
use crate::r1::{check_r1, factor, resolve, ProofMetrics, R1Step, R1Trace};
use crate::translate::{wrapped_clauses, ClauseMode, SymbolMap};

/// `l_n = (n+1) + n²(n+1)/2`.
pub fn php_clause_count(n: usize) -> usize {
    (n + 1) + n * n * (n + 1) / 2
}

/// `|Z_n| = (n+1) + n²(n+1)/2`.
pub fn z_count(n: usize) -> usize {
    php_clause_count(n)
}

/// Variable layout: X, then Y, then Z, all row-major.
struct Layout {
    n: usize,
    x0: u32,
    y0: u32,
    z0: u32,
    /// `(i₁, i₂, j)` in display order; `(i, 0, 0)` first.
    z: Vec<(usize, usize, usize)>,
}

impl Layout {
    fn new(n: usize, with_x: bool) -> Self {
        let mut z: Vec<_> = (1..=n + 1).map(|i| (i, 0, 0)).collect();
        for j in 1..=n {
            for i1 in 1..=n + 1 {
                for i2 in i1 + 1..=n + 1 {
                    z.push((i1, i2, j));
                }
            }
        }
        let grid = (n * (n + 1)) as u32;
        let x0 = 1;
        let y0 = if with_x { x0 + grid } else { 1 };
        Layout {
            n,
            x0,
            y0,
            z0: y0 + grid,
            z,
        }
    }

    fn x(&self, i: usize, j: usize) -> Var {
        Var(self.x0 + ((i - 1) * self.n + (j - 1)) as u32)
    }

    fn y(&self, i: usize, j: usize) -> Var {
        Var(self.y0 + ((i - 1) * self.n + (j - 1)) as u32)
    }

    fn z(&self, key: (usize, usize, usize)) -> Var {
        let k = self
            .z
            .iter()
            .position(|&z| z == key)
            .expect("known z variable");
        Var(self.z0 + k as u32)
    }

    fn grid(&self, at: impl Fn(usize, usize) -> Var) -> Vec<Var> {
        (1..=self.n + 1)
            .flat_map(|i| (1..=self.n).map(move |j| (i, j)))
            .map(|(i, j)| at(i, j))
            .collect()
    }

    fn xs(&self) -> Vec<Var> {
        self.grid(|i, j| self.x(i, j))
    }

    fn ys(&self) -> Vec<Var> {
        self.grid(|i, j| self.y(i, j))
    }

    fn zs(&self) -> Vec<Var> {
        self.z.iter().map(|&k| self.z(k)).collect()
    }

    fn names(&self, with_x: bool) -> BTreeMap<Var, String> {
        let mut m = BTreeMap::new();
        for i in 1..=self.n + 1 {
            for j in 1..=self.n {
                if with_x {
                    m.insert(self.x(i, j), format!("x_{i}_{j}"));
                }
                m.insert(self.y(i, j), format!("y_{i}_{j}"));
            }
        }
        for &(a, b, c) in &self.z {
            m.insert(self.z((a, b, c)), format!("z_{a}_{b}_{c}"));
        }
        m
    }

    fn php(&self, at: impl Fn(usize, usize) -> Var) -> Vec<Clause> {
        let n = self.n;
        let mut out: Vec<Clause> = (1..=n + 1)
            .map(|i| Clause::new((1..=n).map(|j| Lit::pos(at(i, j)))))
            .collect();
        for j in 1..=n {
            for i1 in 1..=n + 1 {
                for i2 in i1 + 1..=n + 1 {
                    out.push(Clause::new([Lit::neg(at(i1, j)), Lit::neg(at(i2, j))]));
                }
            }
        }
        out
    }

    /// D, then P (i, then j), then Q (j, then i₁ < i₂).
    fn tphp(&self) -> Vec<Clause> {
        let n = self.n;
        let mut out = vec![Clause::new(self.zs().into_iter().map(Lit::neg))];
        for i in 1..=n + 1 {
            for j in 1..=n {
                out.push(Clause::new([
                    Lit::pos(self.z((i, 0, 0))),
                    Lit::neg(self.y(i, j)),
                ]));
            }
        }
        for j in 1..=n {
            for i1 in 1..=n + 1 {
                for i2 in i1 + 1..=n + 1 {
                    let z = Lit::pos(self.z((i1, i2, j)));
                    out.push(Clause::new([z, Lit::pos(self.y(i1, j))]));
                    out.push(Clause::new([z, Lit::pos(self.y(i2, j))]));
                }
            }
        }
        out
    }
}

/// `∃X_n PHP_n(X_n)`: n+1 pigeons, n holes.
pub fn gen_php(n: usize) -> Result<PcnfFormula, FamilyError> {
    need_positive(n)?;
    let l = Layout::new(n, true);
    let prefix = Prefix::merged([(Quant::Exists, l.xs())]).expect("fresh variables");
    let mut names = l.names(true);
    names.retain(|v, _| v.0 < l.y0);
    Ok(PcnfFormula::new(prefix, l.php(|i, j| l.x(i, j))).with_names(names))
}

/// `∀Y_n ∃Z_n TPHP′_n(Y_n, Z_n)`, a true formula.
pub fn gen_tphp(n: usize) -> Result<PcnfFormula, FamilyError> {
    need_positive(n)?;
    let l = Layout::new(n, false);
    let prefix = Prefix::merged([(Quant::Forall, l.ys()), (Quant::Exists, l.zs())])
        .expect("fresh variables");
    Ok(PcnfFormula::new(prefix, l.tphp()).with_names(l.names(false)))
}

fn combined(n: usize, omega: bool) -> Result<PcnfFormula, FamilyError> {
    need_positive(n)?;
    let l = Layout::new(n, true);
    let prefix = if omega {
        Prefix::merged([
            (Quant::Forall, l.ys()),
            (Quant::Exists, l.zs()),
            (Quant::Exists, l.xs()),
        ])
    } else {
        Prefix::merged([
            (Quant::Exists, l.xs()),
            (Quant::Forall, l.ys()),
            (Quant::Exists, l.zs()),
        ])
    }
    .expect("fresh variables");
    let mut m = l.tphp();
    m.extend(l.php(|i, j| l.x(i, j)));
    Ok(PcnfFormula::new(prefix, m).with_names(l.names(true)))
}

/// `Φ_n = ∃X_n ∀Y_n ∃Z_n (TPHP′_n ∧ PHP_n)`.
pub fn gen_phi(n: usize) -> Result<PcnfFormula, FamilyError> {
    combined(n, false)
}

/// `Ω_n = ∀Y_n ∃Z_n ∃X_n (TPHP′_n ∧ PHP_n)` with the two ∃ blocks merged.
pub fn gen_omega(n: usize) -> Result<PcnfFormula, FamilyError> {
    combined(n, true)
}

/// An R1 refutation with the formula and wrapped clause set it refutes.
#[derive(Clone, Debug)]
pub struct R1Refutation {
    pub formula: PcnfFormula,
    pub inputs: Vec<FolClause>,
    pub trace: R1Trace,
    pub metrics: ProofMetrics,
}

/// The tree refutation of the Skolemized Ω_n in three steps: every
/// `p(f_{z_{i,0,0}}(Ȳ))μ_i` from P and the long clauses, every
/// `p(f_{z_{i₁,i₂,j}}(Ȳ))ν` from Q and the binary clauses, then □ from D.
pub fn build_omega_r1_refutation(n: usize) -> Result<R1Refutation, FamilyError> {
    build_r1(n, true)
}

/// The same schedule on Φ_n, where the Skolem terms of X are constants.
pub fn build_phi_r1_refutation(n: usize) -> Result<R1Refutation, FamilyError> {
    build_r1(n, false)
}

struct R1Builder<'a> {
    sm: &'a SymbolMap,
    out: R1Trace,
    fresh: FreshVars,
}

impl R1Builder<'_> {
    fn input(&mut self, f: &PcnfFormula, idx: usize) -> usize {
        let c = self
            .sm
            .clause_image(&f.matrix[idx], false)
            .expect("closed formula");
        self.out.push(R1Step::input(c))
    }

    /// The literal of step `at` with sign `neg` whose argument is headed
    /// by the Skolem symbol of `v` (or is the variable of `v`).
    fn find(&self, at: usize, neg: bool, v: Var) -> Literal {
        let head = match self.sm.skolem_symbol(v) {
            Some(s) => s.clone(),
            None => self.sm.object_var(v).expect("prefix variable").clone(),
        };
        self.out
            .clause(at)
            .lits()
            .iter()
            .find(|l| {
                l.negated == neg
                    && match &l.args[0] {
                        Term::App(g, _) | Term::Var(g) => *g == head,
                    }
            })
            .cloned()
            .expect("pivot present by construction")
    }

    fn resolve(&mut self, a: usize, k: Literal, b: usize, l: Literal) -> usize {
        let r = resolve(
            self.out.clause(a),
            self.out.clause(b),
            &k,
            &l,
            &mut self.fresh,
        )
        .expect("pivots unify by construction");
        self.out
            .push(R1Step::resolve(a, b, k, l, tidy_variables(&r.clause)))
    }

    /// Merges the two positive literals headed by the Skolem symbol of `z`.
    fn merge(&mut self, at: usize, z: Var) -> usize {
        let head = self.sm.skolem_symbol(z).expect("existential").clone();
        let m: Vec<Literal> = self
            .out
            .clause(at)
            .lits()
            .iter()
            .filter(|l| !l.negated && matches!(&l.args[0], Term::App(g, _) if *g == head))
            .cloned()
            .collect();
        if m.len() < 2 {
            return at;
        }
        let (c, _) =
            factor(self.out.clause(at), &m[0], &m[1]).expect("literals unify by construction");
        self.out.push(R1Step::factor(
            at,
            m[0].clone(),
            m[1].clone(),
            tidy_variables(&c),
        ))
    }
}

fn build_r1(n: usize, omega: bool) -> Result<R1Refutation, FamilyError> {
    let f = combined(n, omega)?;
    let (inputs, sm) = wrapped_clauses(&f, ClauseMode::Skolem)
        .expect("generated formulas are closed and well named");
    let l = Layout::new(n, true);
    // Matrix indices: D, P, Q, long, binary.
    let p_at = |i: usize, j: usize| 1 + (i - 1) * n + (j - 1);
    let q0 = 1 + n * (n + 1);
    let long0 = q0 + n * n * (n + 1);
    let bin0 = long0 + n + 1;
    let mut b = R1Builder {
        sm: &sm,
        out: R1Trace::new(false),
        fresh: FreshVars::new(),
    };
    let mut units = Vec::with_capacity(l.z.len());

    // Step 1: p(f_{z_{i,0,0}}(Ȳ))μ_i.
    for i in 1..=n + 1 {
        let mut cur = b.input(&f, long0 + i - 1);
        let z = l.z((i, 0, 0));
        for j in 1..=n {
            let p = b.input(&f, p_at(i, j));
            let k = b.find(p, true, l.y(i, j));
            let m = b.find(cur, false, l.x(i, j));
            cur = b.resolve(p, k, cur, m);
            cur = b.merge(cur, z);
        }
        units.push((z, cur));
    }

    // Step 2: p(f_{z_{i₁,i₂,j}}(Ȳ))ν.
    let mut q = q0;
    for (h, &(i1, i2, j)) in (bin0..).zip(l.z.iter().filter(|k| k.1 != 0)) {
        let z = l.z((i1, i2, j));
        let hole = b.input(&f, h);
        let q1 = b.input(&f, q);
        let k = b.find(q1, false, l.y(i1, j));
        let m = b.find(hole, true, l.x(i1, j));
        let mut cur = b.resolve(q1, k, hole, m);
        let q2 = b.input(&f, q + 1);
        let k = b.find(q2, false, l.y(i2, j));
        let m = b.find(cur, true, l.x(i2, j));
        cur = b.resolve(q2, k, cur, m);
        cur = b.merge(cur, z);
        units.push((z, cur));
        q += 2;
    }

    // Step 3: resolve D against every unit.
    let mut cur = b.input(&f, 0);
    for (z, u) in units {
        let k = b.find(cur, true, z);
        let m = b.out.clause(u).lits()[0].clone();
        cur = b.resolve(cur, k, u, m);
    }

    let trace = b.out;
    let report = check_r1(&inputs, &trace, false)?;
    if !report.refutation {
        return Err(FamilyError::NotRefutation);
    }
    Ok(R1Refutation {
        formula: f,
        inputs,
        trace,
        metrics: report.metrics,
    })
}
