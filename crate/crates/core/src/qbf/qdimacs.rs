use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{Clause, Lit, PcnfFormula, Prefix, PrefixError, Quant, Var};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QdimacsError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Prefix {
        line: usize,
        #[source]
        source: PrefixError,
    },
    #[error("variable {0} occurs in a clause but is not quantified")]
    FreeVariable(Var),
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Accept matrix variables that are missing from the prefix.
    pub open: bool,
}

fn syntax(line: usize, msg: impl Into<String>) -> QdimacsError {
    QdimacsError::Syntax {
        line,
        msg: msg.into(),
    }
}

/// Parses QDIMACS text. Comment lines of the form `c var <id> <name>` attach
/// display names, which is how [`write_qdimacs`] round-trips names.
pub fn parse_qdimacs(text: &str, opts: ParseOptions) -> Result<PcnfFormula, QdimacsError> {
    let mut header: Option<(u32, usize)> = None;
    let mut blocks: Vec<(Quant, Vec<Var>, usize)> = Vec::new();
    let mut clauses: Vec<Clause> = Vec::new();
    let mut names = BTreeMap::new();
    let mut pending: Vec<Lit> = Vec::new();
    let mut pending_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut toks = trimmed.split_whitespace();
        let first = toks.next().unwrap_or_default();
        match first {
            "c" => {
                if toks.next() == Some("var") {
                    let id = toks.next().and_then(|t| t.parse::<u32>().ok());
                    let name = toks.next();
                    match (id, name) {
                        (Some(id), Some(name)) if id > 0 => {
                            names.insert(Var(id), name.to_string());
                        }
                        _ => return Err(syntax(line, "malformed `c var` comment")),
                    }
                }
            }
            "p" => {
                if header.is_some() {
                    return Err(syntax(line, "duplicate problem line"));
                }
                if toks.next() != Some("cnf") {
                    return Err(syntax(line, "expected `p cnf V C`"));
                }
                let v = toks.next().and_then(|t| t.parse::<u32>().ok());
                let c = toks.next().and_then(|t| t.parse::<usize>().ok());
                match (v, c, toks.next()) {
                    (Some(v), Some(c), None) => header = Some((v, c)),
                    _ => return Err(syntax(line, "expected `p cnf V C`")),
                }
            }
            "a" | "e" => {
                let Some((nv, _)) = header else {
                    return Err(syntax(line, "quantifier line before problem line"));
                };
                if !clauses.is_empty() || !pending.is_empty() {
                    return Err(syntax(line, "quantifier line after clauses"));
                }
                let quant = if first == "a" {
                    Quant::Forall
                } else {
                    Quant::Exists
                };
                let mut vars = Vec::new();
                let mut closed = false;
                for t in toks {
                    if closed {
                        return Err(syntax(line, "tokens after terminating 0"));
                    }
                    let x: i64 = t
                        .parse()
                        .map_err(|_| syntax(line, format!("bad token `{t}`")))?;
                    if x == 0 {
                        closed = true;
                    } else if x < 0 || x > i64::from(nv) {
                        return Err(syntax(line, format!("variable {x} out of range 1..={nv}")));
                    } else {
                        vars.push(Var(x as u32));
                    }
                }
                if !closed {
                    return Err(syntax(line, "quantifier line not terminated by 0"));
                }
                match blocks.last_mut() {
                    Some(last) if last.0 == quant => last.1.extend(vars),
                    _ => blocks.push((quant, vars, line)),
                }
            }
            _ => {
                let Some((nv, _)) = header else {
                    return Err(syntax(line, "clause before problem line"));
                };
                for t in trimmed.split_whitespace() {
                    let x: i64 = t
                        .parse()
                        .map_err(|_| syntax(line, format!("bad token `{t}`")))?;
                    if pending.is_empty() {
                        pending_line = line;
                    }
                    if x == 0 {
                        clauses.push(Clause::new(pending.drain(..)));
                    } else {
                        if x.unsigned_abs() > u64::from(nv) {
                            return Err(syntax(line, format!("literal {x} out of range")));
                        }
                        pending.push(Lit::from_dimacs(x).expect("nonzero"));
                    }
                }
            }
        }
    }
    let Some((nv, nc)) = header else {
        return Err(syntax(1, "missing problem line"));
    };
    if !pending.is_empty() {
        return Err(syntax(pending_line, "clause not terminated by 0"));
    }
    if clauses.len() != nc {
        let last = text.lines().count().max(1);
        return Err(syntax(
            last,
            format!("header declares {nc} clauses, found {}", clauses.len()),
        ));
    }

    let mut last_line = 0;
    let mut built = Vec::new();
    for (q, vars, line) in blocks {
        last_line = line;
        if vars.is_empty() {
            return Err(syntax(line, "empty quantifier block"));
        }
        built.push(super::Block { quant: q, vars });
    }
    let prefix = Prefix::new(built).map_err(|source| {
        let line = match &source {
            PrefixError::EmptyBlock(_) | PrefixError::NoAlternation(..) => last_line,
            PrefixError::Duplicate(_) => last_line,
        };
        QdimacsError::Prefix { line, source }
    })?;
    let mut f = PcnfFormula::new(prefix, clauses);
    f.num_vars = nv;
    f.names = names;
    if !opts.open {
        if let Some(&v) = f.free_vars().iter().next() {
            return Err(QdimacsError::FreeVariable(v));
        }
    }
    Ok(f)
}

/// Serializes to QDIMACS. Named variables get a `c var` comment.
pub fn write_qdimacs(f: &PcnfFormula) -> String {
    let mut out = String::new();
    for (v, n) in &f.names {
        let _ = writeln!(out, "c var {} {}", v.0, n);
    }
    let _ = writeln!(out, "p cnf {} {}", f.num_vars, f.matrix.len());
    for b in f.prefix.blocks() {
        out.push(if b.quant == Quant::Forall { 'a' } else { 'e' });
        for v in &b.vars {
            let _ = write!(out, " {}", v.0);
        }
        out.push_str(" 0\n");
    }
    for c in &f.matrix {
        for l in c.lits() {
            let _ = write!(out, "{} ", l.to_dimacs());
        }
        out.push_str("0\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<PcnfFormula, QdimacsError> {
        parse_qdimacs(s, ParseOptions::default())
    }

    #[test]
    fn reads_simple_formula() {
        let f = parse("p cnf 2 1\na 1 0\ne 2 0\n1 -2 0").unwrap();
        assert_eq!(f.prefix.blocks().len(), 2);
        assert!(f.prefix.is_universal(Var(1)));
        assert!(f.prefix.is_existential(Var(2)));
        assert_eq!(
            f.matrix,
            vec![Clause::new([Lit::pos(Var(1)), Lit::neg(Var(2))])]
        );
    }

    #[test]
    fn reads_empty_clause() {
        let f = parse("p cnf 0 1\n0").unwrap();
        assert!(f.prefix.blocks().is_empty());
        assert_eq!(f.matrix, vec![Clause::empty()]);
    }

    #[test]
    fn merges_adjacent_lines() {
        let f = parse("p cnf 3 0\ne 1 0\ne 2 0\na 3 0\n").unwrap();
        assert_eq!(f.prefix.blocks().len(), 2);
        assert_eq!(f.prefix.level(Var(2)), Some(1));
    }

    #[test]
    fn clause_spanning_lines() {
        let f = parse("p cnf 2 1\ne 1 2 0\n1\n2 0\n").unwrap();
        assert_eq!(f.matrix[0].len(), 2);
    }

    #[test]
    fn rejects_free_variable_unless_open() {
        let text = "p cnf 2 1\ne 1 0\n1 2 0\n";
        assert_eq!(parse(text), Err(QdimacsError::FreeVariable(Var(2))));
        let f = parse_qdimacs(text, ParseOptions { open: true }).unwrap();
        assert!(!f.is_closed());
    }

    #[test]
    fn rejects_duplicate_prefix_variable() {
        let err = parse("p cnf 2 0\ne 1 0\na 1 2 0\n").unwrap_err();
        assert!(matches!(
            err,
            QdimacsError::Prefix {
                source: PrefixError::Duplicate(Var(1)),
                ..
            }
        ));
    }

    #[test]
    fn syntax_error_has_line_number() {
        let err = parse("p cnf 2 1\ne 1 2 0\n1 x 0\n").unwrap_err();
        assert_eq!(
            err,
            QdimacsError::Syntax {
                line: 3,
                msg: "bad token `x`".into()
            }
        );
    }

    #[test]
    fn roundtrip_with_names() {
        let text = "c var 1 u\nc var 2 e\np cnf 2 2\na 1 0\ne 2 0\n1 2 0\n-2 0\n";
        let f = parse(text).unwrap();
        assert_eq!(f.name(Var(1)), "u");
        assert_eq!(write_qdimacs(&f), text);
        assert_eq!(parse(&write_qdimacs(&f)).unwrap(), f);
    }
}
