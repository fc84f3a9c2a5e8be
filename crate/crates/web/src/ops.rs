//! The demo operations as plain functions returning JSON text.

use serde_json::{json, Value};

use qbfsim::calculi::ircalc::check_ircalc;
use qbfsim::calculi::qres::check_qres_qures;
use qbfsim::families::{instance, Family, GenOptions, ReferenceProof, SigmaMode};
use qbfsim::fol::to_tptp;
use qbfsim::qbf::{parse_qdimacs, write_qdimacs, ParseOptions};
use qbfsim::r1::check_r1;
use qbfsim::translate::{skolemize, to_epr, wrapped_clauses, ClauseMode};

/// Largest parameter the page accepts; bigger instances stall a tab.
pub const MAX_T: usize = 8;
pub const MAX_N: usize = 4;
/// Longest QDIMACS input the page translates.
pub const MAX_INPUT: usize = 64 * 1024;

fn text(v: Value) -> String {
    serde_json::to_string_pretty(&v).expect("JSON value")
}

fn in_range(name: &str, v: usize, max: usize) -> Result<(), String> {
    if (1..=max).contains(&v) {
        Ok(())
    } else {
        Err(format!("{name} must be between 1 and {max}"))
    }
}

pub fn kbkf_refutation(t: usize, sigma: &str) -> Result<String, String> {
    in_range("t", t, MAX_T)?;
    let sigma = match sigma {
        "" | "none" => None,
        "atomic" => Some(SigmaMode::Atomic),
        "herbrand" => Some(SigmaMode::Herbrand),
        other => return Err(format!("unknown σ_v mode `{other}`")),
    };
    let inst =
        instance(Family::Kbkf, t, GenOptions { sigma, proof: true }).map_err(|e| e.to_string())?;
    let f = &inst.formula;
    let (calculus, trace, metrics, size) = match inst.proof.as_ref() {
        Some(ReferenceProof::Qres(p)) => {
            let r = check_qres_qures(f, p, true).map_err(|e| e.to_string())?;
            if !r.refutation {
                return Err("reference proof is not a refutation".into());
            }
            (p.calculus.to_string(), p.to_jsonl(), r.metrics, p.size())
        }
        Some(ReferenceProof::Ir(p)) => {
            let sv = inst.sigma_v.clone().unwrap_or_default();
            let delta = inst.delta.clone().unwrap_or_default();
            let r = check_ircalc(f, p, &sv, &delta).map_err(|e| e.to_string())?;
            if !r.refutation {
                return Err("reference proof is not a refutation".into());
            }
            (p.calculus.to_string(), p.to_jsonl(), r.metrics, p.size())
        }
        _ => return Err("no reference proof for this family".into()),
    };
    Ok(text(json!({
        "t": t,
        "accepted": true,
        "calculus": calculus,
        "vars": f.prefix.num_vars(),
        "clauses": f.matrix.len(),
        "proof_clauses": metrics.clause_count,
        "proof_size": size,
        "max_width": metrics.max_width,
        "tree_form": metrics.tree_form,
        "qdimacs": write_qdimacs(f),
        "trace": trace,
    })))
}

pub fn translate_qdimacs(input: &str, mode: &str, wrap: bool) -> Result<String, String> {
    if input.len() > MAX_INPUT {
        return Err(format!("input longer than {MAX_INPUT} bytes"));
    }
    let f = parse_qdimacs(input, ParseOptions { open: false }).map_err(|e| e.to_string())?;
    let mode = match mode {
        "skolem" => ClauseMode::Skolem,
        "epr" => ClauseMode::Epr,
        other => return Err(format!("unknown mode `{other}`")),
    };
    let clauses = if wrap {
        wrapped_clauses(&f, mode).map_err(|e| e.to_string())?.0
    } else {
        let (cs, sm) = skolemize(&f).map_err(|e| e.to_string())?;
        match mode {
            ClauseMode::Skolem => cs,
            ClauseMode::Epr => to_epr(&cs, &sm).map_err(|e| e.to_string())?,
        }
    };
    Ok(text(json!({
        "clauses": clauses.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "tptp": clauses
            .iter()
            .enumerate()
            .map(|(i, c)| to_tptp(&format!("c{i}"), c))
            .collect::<Vec<_>>(),
    })))
}

pub fn omega_stats(n: usize) -> Result<String, String> {
    in_range("n", n, MAX_N)?;
    let inst = instance(
        Family::Omega,
        n,
        GenOptions {
            sigma: None,
            proof: true,
        },
    )
    .map_err(|e| e.to_string())?;
    let Some(ReferenceProof::R1 { inputs, trace }) = inst.proof.as_ref() else {
        return Err("no R1 proof for Ω".into());
    };
    let r = check_r1(inputs, trace, false).map_err(|e| e.to_string())?;
    if !r.refutation {
        return Err("reference proof is not a refutation".into());
    }
    Ok(text(json!({
        "n": n,
        "accepted": true,
        "vars": inst.formula.prefix.num_vars(),
        "clauses": inst.formula.matrix.len(),
        "fo_inputs": inputs.len(),
        "proof_clauses": r.metrics.clause_count,
        "proof_size": r.metrics.size,
        "tree_form": r.metrics.tree_form,
    })))
}
