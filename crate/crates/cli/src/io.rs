//! File formats: formulas (QDIMACS or JSON), traces and companions.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use serde_json::Value;

use qbfsim::calculi::{ExtensionSeq, IrTrace, QresTrace, SigmaV, SigmaVFile};
use qbfsim::fol::{clause_from_json, FolClause};
use qbfsim::qbf::{parse_qdimacs, ParseOptions, PcnfFormula, PcnfJson, Qbf};
use qbfsim::r1::R1Trace;

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

/// Either a prenex formula or a general formula tree.
pub enum Input {
    Pcnf(PcnfFormula),
    Tree(Qbf),
}

fn looks_like_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

/// QDIMACS, the PCNF JSON form, or (with `allow_tree`) a formula-tree JSON.
pub fn read_input(path: &Path, open: bool, allow_tree: bool) -> Result<Input> {
    let text = read_text(path)?;
    if !looks_like_json(&text) {
        let f = parse_qdimacs(&text, ParseOptions { open })
            .with_context(|| format!("{}: invalid QDIMACS", path.display()))?;
        return Ok(Input::Pcnf(f));
    }
    let v: Value =
        serde_json::from_str(&text).with_context(|| format!("{}: invalid JSON", path.display()))?;
    if v.get("prefix").is_some() {
        let j: PcnfJson = serde_json::from_value(v)
            .with_context(|| format!("{}: invalid PCNF JSON", path.display()))?;
        let f = PcnfFormula::try_from(j).with_context(|| path.display().to_string())?;
        return Ok(Input::Pcnf(f));
    }
    if !allow_tree {
        return Err(anyhow!("{}: expected a prenex CNF formula", path.display()));
    }
    let q: Qbf = serde_json::from_value(v)
        .with_context(|| format!("{}: invalid formula-tree JSON", path.display()))?;
    Ok(Input::Tree(q))
}

pub fn read_formula(path: &Path, open: bool) -> Result<PcnfFormula> {
    match read_input(path, open, false)? {
        Input::Pcnf(f) => Ok(f),
        Input::Tree(_) => unreachable!("trees are not requested"),
    }
}

/// The `calculus` tag of a trace header, if the first line carries one.
fn header_tag(text: &str) -> Option<String> {
    let first = text.lines().find(|l| !l.trim().is_empty())?;
    let v: Value = serde_json::from_str(first).ok()?;
    v.get("calculus")?.as_str().map(str::to_owned)
}

fn read_trace(path: &Path, accepted: &[&str]) -> Result<String> {
    let text = read_text(path)?;
    if let Some(tag) = header_tag(&text) {
        if !accepted.contains(&tag.as_str()) {
            return Err(anyhow!(
                "{}: trace is tagged {tag}, expected one of {}",
                path.display(),
                accepted.join(", ")
            ));
        }
    }
    Ok(text)
}

pub fn read_qres(path: &Path) -> Result<QresTrace> {
    let text = read_trace(path, &["QRES", "QURES"])?;
    QresTrace::from_jsonl(&text).with_context(|| format!("{}", path.display()))
}

pub fn read_ir(path: &Path) -> Result<IrTrace> {
    let text = read_trace(path, &["IRCALC", "IRCALC_SIGMA", "IRCALC_DELTA_SIGMA"])?;
    IrTrace::from_jsonl(&text).with_context(|| format!("{}", path.display()))
}

pub fn read_r1(path: &Path) -> Result<R1Trace> {
    let text = read_trace(path, &["R1", "R1SUBS"])?;
    R1Trace::from_jsonl(&text).with_context(|| format!("{}", path.display()))
}

pub fn read_sigma(path: &Path) -> Result<SigmaV> {
    let file: SigmaVFile = serde_json::from_str(&read_text(path)?)
        .with_context(|| format!("{}: invalid σ_v file", path.display()))?;
    SigmaV::try_from(file).map_err(|e| anyhow!("{}: {e}", path.display()))
}

pub fn read_delta(path: &Path) -> Result<ExtensionSeq> {
    serde_json::from_str(&read_text(path)?)
        .with_context(|| format!("{}: invalid Δ file", path.display()))
}

/// A clause list: either a bare JSON array or the `translate` output with a
/// `clauses` field.
pub fn read_clauses(path: &Path) -> Result<Vec<FolClause>> {
    let v: Value = serde_json::from_str(&read_text(path)?)
        .with_context(|| format!("{}: invalid JSON", path.display()))?;
    let arr = match &v {
        Value::Array(a) => a,
        Value::Object(o) => o
            .get("clauses")
            .and_then(Value::as_array)
            .ok_or_else(|| anyhow!("{}: no `clauses` array", path.display()))?,
        _ => return Err(anyhow!("{}: expected a clause array", path.display())),
    };
    arr.iter()
        .map(|c| clause_from_json(c).map_err(|e| anyhow!("{}: {e}", path.display())))
        .collect()
}
