use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};

use qbfsim::calculi::ircalc::check_ircalc;
use qbfsim::calculi::qres::check_qres_qures;
use qbfsim::calculi::{Calculus, CheckError, SigmaVFile};
use qbfsim::families::{instance, Family, FamilyInstance, GenOptions, ReferenceProof};
use qbfsim::fol::{clause_to_json, to_tptp, FolClause, Literal, Term};
use qbfsim::qbf::{evaluate_pcnf, write_qdimacs, BinOp, PcnfFormula, DEFAULT_VAR_BOUND};
use qbfsim::r1::{check_r1, R1CheckError};
use qbfsim::simulate::{
    full_pipeline_to_r1, simulate_ircalc_to_r1subs, simulate_qures_to_r1, SimConfig, SimError,
};
use qbfsim::translate::{qbf_to_fo, skolemize, to_epr, wrap_sat_equiv, wrapped_clauses, FoFormula};

use crate::io::{self, Input};
use crate::{
    BenchArgs, CheckArgs, CheckCalculus, FromCalculus, GenArgs, ModeArg, SimulateArgs, ToSystem,
    TranslateArgs, TranslateMode,
};

/// `Ok(true)`: accepted; `Ok(false)`: rejected; `Err`: usage or I/O error.
pub type Verdict = Result<bool>;

/// Writes to stdout; a closed pipe ends output quietly.
fn out(text: &str) {
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = stdout
        .write_all(text.as_bytes())
        .and_then(|()| stdout.flush())
    {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: cannot write to stdout: {e}");
        }
    }
}

fn print_json(v: &Value) {
    out(&(serde_json::to_string_pretty(v).expect("JSON value") + "\n"));
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => io::write_text(p, text),
        None => {
            out(text);
            Ok(())
        }
    }
}

fn names_of(f: &PcnfFormula) -> BTreeMap<qbfsim::qbf::Var, String> {
    f.prefix.vars().map(|v| (v, f.name(v))).collect()
}

fn clause_payload(clauses: &[FolClause], tptp: bool) -> String {
    if tptp {
        clauses
            .iter()
            .enumerate()
            .map(|(i, c)| to_tptp(&format!("c{i}"), c) + "\n")
            .collect()
    } else {
        let v = json!({
            "clauses": clauses.iter().map(clause_to_json).collect::<Vec<_>>(),
            "display": clauses.iter().map(ToString::to_string).collect::<Vec<_>>(),
        });
        serde_json::to_string_pretty(&v).expect("JSON value") + "\n"
    }
}

pub fn translate(a: &TranslateArgs) -> Verdict {
    let input = io::read_input(&a.input, a.open, a.mode == TranslateMode::Fo)?;
    let text = match (a.mode, input) {
        (TranslateMode::Fo, input) => {
            if a.tptp {
                bail!("--tptp applies to clause output only");
            }
            let (q, names) = match input {
                Input::Pcnf(f) => (f.to_qbf(), names_of(&f)),
                Input::Tree(q) => (q, BTreeMap::new()),
            };
            let mut g = qbf_to_fo(&q, &names)?;
            if a.wrap {
                let unit = |neg: bool, t: Term| FoFormula::Atom(Literal::p(neg, t));
                let units = FoFormula::Bin(
                    BinOp::And,
                    Box::new(unit(false, Term::f1())),
                    Box::new(unit(true, Term::f0())),
                );
                g = FoFormula::Bin(BinOp::And, Box::new(g), Box::new(units));
            }
            serde_json::to_string_pretty(&json!({ "formula": g }))? + "\n"
        }
        (_, Input::Tree(_)) => unreachable!("trees are only read in fo mode"),
        (mode, Input::Pcnf(f)) => {
            let (mut cs, sm) = skolemize(&f)?;
            if mode == TranslateMode::Epr {
                cs = to_epr(&cs, &sm)?;
            }
            if a.wrap {
                cs = wrap_sat_equiv(&cs);
            }
            clause_payload(&cs, a.tptp)
        }
    };
    emit(a.output.as_deref(), &text)?;
    Ok(true)
}

fn qbf_check_error(e: &CheckError) -> Value {
    match e {
        CheckError::Step(s) => json!({"error": e.to_string(), "step": s.step}),
        _ => json!({"error": e.to_string()}),
    }
}

fn r1_check_error(e: &R1CheckError) -> Value {
    match e {
        R1CheckError::Step(s) => json!({"error": e.to_string(), "step": s.step}),
        _ => json!({"error": e.to_string()}),
    }
}

/// Oracle verdict on small formulas; `null` above the variable bound.
fn oracle(f: &PcnfFormula) -> Value {
    if f.prefix.num_vars() > DEFAULT_VAR_BOUND {
        return Value::Null;
    }
    evaluate_pcnf(f, DEFAULT_VAR_BOUND).map_or(Value::Null, Value::Bool)
}

fn expected_tag(c: CheckCalculus) -> Option<Calculus> {
    match c {
        CheckCalculus::Ircalc => Some(Calculus::IrCalc),
        CheckCalculus::IrcalcSigma => Some(Calculus::IrCalcSigma),
        CheckCalculus::IrcalcDeltaSigma => Some(Calculus::IrCalcDeltaSigma),
        _ => None,
    }
}

pub fn check(a: &CheckArgs) -> Verdict {
    use CheckCalculus::*;
    match a.calculus {
        Ircalc if a.sigma.is_some() || a.delta.is_some() => {
            bail!("--sigma and --delta need --calculus ircalc-sigma or ircalc-delta-sigma")
        }
        IrcalcSigma if a.delta.is_some() => bail!("--delta needs --calculus ircalc-delta-sigma"),
        Qres | Qures | R1 | R1subs if a.sigma.is_some() || a.delta.is_some() => {
            bail!("--sigma and --delta apply to the IR-calc family only")
        }
        Qres | Qures | Ircalc | IrcalcSigma | IrcalcDeltaSigma if a.inputs.is_some() => {
            bail!("--inputs applies to r1 and r1subs only")
        }
        _ => {}
    }
    let f = io::read_formula(&a.formula, a.open)?;
    let name = a.calculus.name();
    let (accepted, mut out) = match a.calculus {
        Qres | Qures => {
            let t = io::read_qres(&a.proof)?;
            match check_qres_qures(&f, &t, a.calculus == Qures) {
                Ok(r) => (
                    r.refutation,
                    json!({
                        "refutation": r.refutation,
                        "metrics": {
                            "clause_count": r.metrics.clause_count,
                            "size": t.size(),
                            "max_width": r.metrics.max_width,
                            "tree_form": r.metrics.tree_form,
                        }
                    }),
                ),
                Err(e) => (false, qbf_check_error(&e)),
            }
        }
        Ircalc | IrcalcSigma | IrcalcDeltaSigma => {
            let t = io::read_ir(&a.proof)?;
            let sv = a
                .sigma
                .as_deref()
                .map(io::read_sigma)
                .transpose()?
                .unwrap_or_default();
            let delta = a
                .delta
                .as_deref()
                .map(io::read_delta)
                .transpose()?
                .unwrap_or_default();
            let want = expected_tag(a.calculus).expect("IR-calc variant");
            if t.calculus != want {
                (
                    false,
                    json!({"error": format!("trace is tagged {}, expected {want}", t.calculus)}),
                )
            } else {
                match check_ircalc(&f, &t, &sv, &delta) {
                    Ok(r) => (
                        r.refutation,
                        json!({
                            "refutation": r.refutation,
                            "metrics": {
                                "clause_count": r.metrics.clause_count,
                                "size": t.size(),
                                "max_width": r.metrics.max_width,
                                "tree_form": r.metrics.tree_form,
                            }
                        }),
                    ),
                    Err(e) => (false, qbf_check_error(&e)),
                }
            }
        }
        R1 | R1subs => {
            let t = io::read_r1(&a.proof)?;
            let inputs = match &a.inputs {
                Some(p) => io::read_clauses(p)?,
                None => wrapped_clauses(&f, a.mode.into())?.0,
            };
            match check_r1(&inputs, &t, a.calculus == R1subs) {
                Ok(r) => (
                    r.refutation,
                    json!({"refutation": r.refutation, "metrics": r.metrics}),
                ),
                Err(e) => (false, r1_check_error(&e)),
            }
        }
    };
    let obj = out.as_object_mut().expect("object");
    obj.insert("accepted".into(), Value::Bool(accepted));
    obj.insert("calculus".into(), Value::String(name.into()));
    if accepted {
        obj.insert("evaluates_to".into(), oracle(&f));
    }
    print_json(&out);
    Ok(accepted)
}

pub fn simulate(a: &SimulateArgs, fresh_offset: u64) -> Verdict {
    if a.from != FromCalculus::Ircalc && a.to == ToSystem::R1subs {
        bail!("the QU-res simulation produces plain R1; use --to r1");
    }
    let f = io::read_formula(&a.formula, a.open)?;
    let cfg = SimConfig {
        check_invariants: !a.no_invariants,
        fresh_offset,
    };
    let mode = a.mode.into();
    let result = match a.from {
        FromCalculus::Qres | FromCalculus::Qures => {
            let t = io::read_qres(&a.proof)?;
            if a.from == FromCalculus::Qres && t.calculus != Calculus::QRes {
                bail!("trace is tagged {}, expected QRES", t.calculus);
            }
            simulate_qures_to_r1(&f, &t, mode, cfg).map(|s| {
                let summary = json!({"report": &s.report});
                (s.trace, summary)
            })
        }
        FromCalculus::Ircalc => {
            let t = io::read_ir(&a.proof)?;
            if t.calculus != Calculus::IrCalc {
                bail!(
                    "the IR-calc simulation takes plain IRCALC traces; this one is tagged {}",
                    t.calculus
                );
            }
            match a.to {
                ToSystem::R1subs => simulate_ircalc_to_r1subs(&f, &t, mode, cfg).map(|s| {
                    let summary = json!({"report": &s.report});
                    (s.trace, summary)
                }),
                ToSystem::R1 => full_pipeline_to_r1(&f, &t, mode, cfg).map(|p| {
                    let summary = json!({
                        "report": &p.with_subsumption.report,
                        "pure": p.pure_metrics,
                    });
                    (p.pure, summary)
                }),
            }
        }
    };
    let (trace, mut summary) = match result {
        Ok(x) => x,
        Err(e) => {
            let step = match &e {
                SimError::SourceRejected(CheckError::Step(s)) => Some(s.step),
                SimError::Invariant { step, .. } | SimError::Unfactored { step, .. } => Some(*step),
                _ => None,
            };
            print_json(&json!({"accepted": false, "error": e.to_string(), "step": step}));
            return Ok(false);
        }
    };
    if let Some(p) = &a.report {
        io::write_text(p, &(serde_json::to_string_pretty(&summary)? + "\n"))?;
    }
    let obj = summary.as_object_mut().expect("object");
    obj.insert("accepted".into(), Value::Bool(true));
    if let Some(r) = obj.get_mut("report").and_then(Value::as_object_mut) {
        r.remove("mapping");
    }
    match &a.output {
        Some(p) => {
            io::write_text(p, &trace.to_jsonl())?;
            print_json(&summary);
        }
        None => {
            out(&trace.to_jsonl());
            eprintln!("{}", serde_json::to_string(&summary)?);
        }
    }
    Ok(true)
}

pub const PARAM_CAP: usize = 12;

fn guard(param: usize, force: bool) -> Result<()> {
    if param < 1 {
        bail!("parameter must be at least 1");
    }
    if param > PARAM_CAP && !force {
        bail!("parameter {param} exceeds the desk-scale cap {PARAM_CAP}; pass --force to override");
    }
    Ok(())
}

fn build(
    family: Family,
    param: usize,
    sigma: Option<qbfsim::families::SigmaMode>,
    proof: bool,
) -> Result<FamilyInstance> {
    if sigma.is_some() && family != Family::Kbkf {
        bail!("--with-sigma applies to the kbkf family only");
    }
    Ok(instance(family, param, GenOptions { sigma, proof })?)
}

pub fn gen(a: &GenArgs, verbose: u8) -> Verdict {
    let family = Family::from(a.family);
    let param =
        a.n.or(a.t)
            .ok_or_else(|| anyhow!("give the parameter with --n or --t"))?;
    guard(param, a.force)?;
    let inst = build(family, param, a.with_sigma.map(Into::into), a.with_proof)?;
    std::fs::create_dir_all(&a.out_dir)
        .with_context(|| format!("cannot create {}", a.out_dir.display()))?;
    let stem = format!("{}{}", family, param);
    let path = |suffix: &str| -> PathBuf { a.out_dir.join(format!("{stem}{suffix}")) };
    let mut files = vec![];
    let mut put = |p: PathBuf, text: String| -> Result<()> {
        io::write_text(&p, &text)?;
        if verbose > 0 {
            eprintln!("wrote {}", p.display());
        }
        files.push(p.display().to_string());
        Ok(())
    };
    put(path(".qdimacs"), write_qdimacs(&inst.formula))?;
    if let Some(sv) = &inst.sigma_v {
        put(
            path(".sigma.json"),
            serde_json::to_string_pretty(&SigmaVFile::from(sv))? + "\n",
        )?;
    }
    if let Some(d) = &inst.delta {
        put(path(".delta.json"), serde_json::to_string_pretty(d)? + "\n")?;
    }
    let mut proof_calculus = Value::Null;
    let mut proof_metrics = Value::Null;
    if let Some(p) = &inst.proof {
        let (text, calc, m) = match p {
            ReferenceProof::Qres(t) => (t.to_jsonl(), t.calculus.to_string(), json!(t.metrics())),
            ReferenceProof::Ir(t) => (t.to_jsonl(), t.calculus.to_string(), json!(t.metrics())),
            ReferenceProof::R1 { trace, .. } => (
                trace.to_jsonl(),
                "R1".to_string(),
                json!(qbfsim::r1::proof_metrics(trace)),
            ),
        };
        put(path(".proof.jsonl"), text)?;
        proof_calculus = Value::String(calc);
        proof_metrics = m;
    }
    print_json(&json!({
        "family": family.to_string(),
        "param": param,
        "vars": inst.formula.prefix.num_vars(),
        "clauses": inst.formula.matrix.len(),
        "proof_calculus": proof_calculus,
        "proof_metrics": proof_metrics,
        "files": files,
    }));
    Ok(true)
}

fn parse_range(s: &str) -> Result<(usize, usize)> {
    let bad = || anyhow!("bad range `{s}` (expected A..B or A)");
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
        None => (s, s),
    };
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

pub const CSV_HEADER: &str =
    "family,param,clause_count,proof_clause_count,proof_size,tree_form,check_ms";

/// Checks the reference proof and returns (clause count, size, tree form,
/// milliseconds), or the rejection message.
fn check_reference(inst: &FamilyInstance) -> Result<(usize, usize, bool, f64), String> {
    let start = Instant::now();
    let f = &inst.formula;
    let (count, size, tree) = match inst.proof.as_ref().expect("built with proof") {
        ReferenceProof::Qres(t) => {
            let r = check_qres_qures(f, t, true).map_err(|e| e.to_string())?;
            if !r.refutation {
                return Err("not a refutation".into());
            }
            (r.metrics.clause_count, t.size(), r.metrics.tree_form)
        }
        ReferenceProof::Ir(t) => {
            let sv = inst.sigma_v.clone().unwrap_or_default();
            let delta = inst.delta.clone().unwrap_or_default();
            let r = check_ircalc(f, t, &sv, &delta).map_err(|e| e.to_string())?;
            if !r.refutation {
                return Err("not a refutation".into());
            }
            (r.metrics.clause_count, t.size(), r.metrics.tree_form)
        }
        ReferenceProof::R1 { inputs, trace } => {
            let r = check_r1(inputs, trace, false).map_err(|e| e.to_string())?;
            if !r.refutation {
                return Err("not a refutation".into());
            }
            (r.metrics.clause_count, r.metrics.size, r.metrics.tree_form)
        }
    };
    Ok((count, size, tree, start.elapsed().as_secs_f64() * 1e3))
}

pub fn bench(a: &BenchArgs, verbose: u8) -> Verdict {
    let family = Family::from(a.family);
    let (lo, hi) = parse_range(&a.range)?;
    guard(lo, a.force)?;
    guard(hi, a.force)?;
    let sigma = a.with_sigma.map(Into::into);
    let mut rows = vec![];
    let mut all_ok = true;
    for param in lo..=hi {
        let inst = build(family, param, sigma, true)?;
        let clauses = inst.formula.matrix.len();
        let row = if inst.proof.is_none() {
            format!("{},{param},{clauses},,,,", family)
        } else {
            match check_reference(&inst) {
                Ok((count, size, tree, ms)) => {
                    let ms = if a.no_timing { 0.0 } else { ms };
                    format!("{},{param},{clauses},{count},{size},{tree},{ms:.3}", family)
                }
                Err(e) => {
                    all_ok = false;
                    eprintln!("{}({param}): reference proof rejected: {e}", family);
                    format!("{},{param},{clauses},,,false,", family)
                }
            }
        };
        if verbose > 0 {
            eprintln!("{row}");
        }
        rows.push(row);
    }
    let body: String = rows.iter().map(|r| format!("{r}\n")).collect();
    match &a.output {
        Some(p) => {
            let fresh = std::fs::metadata(p).map(|m| m.len() == 0).unwrap_or(true);
            let mut file = OpenOptions::new()
                .create(true)
                .append(true)
                .open(p)
                .with_context(|| format!("cannot open {}", p.display()))?;
            if fresh {
                writeln!(file, "{CSV_HEADER}")?;
            }
            file.write_all(body.as_bytes())?;
        }
        None => out(&format!("{CSV_HEADER}\n{body}")),
    }
    Ok(all_ok)
}

impl From<ModeArg> for qbfsim::translate::ClauseMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Skolem => qbfsim::translate::ClauseMode::Skolem,
            ModeArg::Epr => qbfsim::translate::ClauseMode::Epr,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("1..4").unwrap(), (1, 4));
        assert_eq!(parse_range("2..=3").unwrap(), (2, 3));
        assert_eq!(parse_range("5").unwrap(), (5, 5));
        assert!(parse_range("4..1").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn cap() {
        assert!(guard(12, false).is_ok());
        assert!(guard(13, false).is_err());
        assert!(guard(13, true).is_ok());
        assert!(guard(0, true).is_err());
    }
}
