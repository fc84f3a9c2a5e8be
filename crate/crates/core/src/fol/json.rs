//! JSON encoding. Terms are `["f",[args]]` or `["?X"]`, literals
//! `["p",[args]]` or `["~p",[args]]`, clauses arrays of literals and
//! substitutions objects `{var: term}`.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Map, Value};
use thiserror::Error;

use super::{sym, FolClause, Literal, Subst, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("malformed first-order JSON: {0}")]
pub struct FolJsonError(pub String);

fn bad(what: &str, v: &Value) -> FolJsonError {
    FolJsonError(format!("expected {what}, got {v}"))
}

pub fn term_to_json(t: &Term) -> Value {
    match t {
        Term::Var(x) => json!([format!("?{x}")]),
        Term::App(f, args) => json!([
            f.as_ref(),
            args.iter().map(term_to_json).collect::<Vec<_>>()
        ]),
    }
}

pub fn term_from_json(v: &Value) -> Result<Term, FolJsonError> {
    let arr = v.as_array().ok_or_else(|| bad("term array", v))?;
    match arr.as_slice() {
        [Value::String(s)] => match s.strip_prefix('?') {
            Some(name) if !name.is_empty() => Ok(Term::var(name)),
            _ => Err(bad("`?name` variable", v)),
        },
        [Value::String(f), Value::Array(args)] if !f.starts_with('?') => {
            let args = args.iter().map(term_from_json).collect::<Result<_, _>>()?;
            Ok(Term::App(sym(f), args))
        }
        _ => Err(bad("term", v)),
    }
}

pub fn literal_to_json(l: &Literal) -> Value {
    let head = if l.negated {
        format!("~{}", l.pred)
    } else {
        l.pred.to_string()
    };
    json!([head, l.args.iter().map(term_to_json).collect::<Vec<_>>()])
}

pub fn literal_from_json(v: &Value) -> Result<Literal, FolJsonError> {
    let arr = v.as_array().ok_or_else(|| bad("literal array", v))?;
    match arr.as_slice() {
        [Value::String(p), Value::Array(args)] => {
            let (negated, pred) = match p.strip_prefix('~') {
                Some(rest) => (true, rest),
                None => (false, p.as_str()),
            };
            if pred.is_empty() || pred.starts_with('?') {
                return Err(bad("predicate name", v));
            }
            let args = args.iter().map(term_from_json).collect::<Result<_, _>>()?;
            Ok(Literal::new(negated, pred, args))
        }
        _ => Err(bad("literal", v)),
    }
}

pub fn clause_to_json(c: &FolClause) -> Value {
    Value::Array(c.lits().iter().map(literal_to_json).collect())
}

pub fn clause_from_json(v: &Value) -> Result<FolClause, FolJsonError> {
    let arr = v.as_array().ok_or_else(|| bad("clause array", v))?;
    Ok(FolClause::new(
        arr.iter()
            .map(literal_from_json)
            .collect::<Result<Vec<_>, _>>()?,
    ))
}

pub fn subst_to_json(s: &Subst) -> Value {
    let mut m = Map::new();
    for (v, t) in s.iter() {
        m.insert(v.to_string(), term_to_json(t));
    }
    Value::Object(m)
}

pub fn subst_from_json(v: &Value) -> Result<Subst, FolJsonError> {
    let obj = v.as_object().ok_or_else(|| bad("substitution object", v))?;
    let mut s = Subst::new();
    for (k, t) in obj {
        let name = k.strip_prefix('?').unwrap_or(k);
        s.insert(sym(name), term_from_json(t)?);
    }
    Ok(s)
}

macro_rules! via_value {
    ($ty:ty, $to:ident, $from:ident) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                $to(self).serialize(s)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let v = Value::deserialize(d)?;
                $from(&v).map_err(D::Error::custom)
            }
        }
    };
}

via_value!(Term, term_to_json, term_from_json);
via_value!(Literal, literal_to_json, literal_from_json);
via_value!(FolClause, clause_to_json, clause_from_json);
via_value!(Subst, subst_to_json, subst_from_json);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clause_encoding() {
        let c = FolClause::new([
            Literal::p(true, Term::app("f_e", vec![Term::var("X")])),
            Literal::p(false, Term::f1()),
        ]);
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(text, r#"[["p",[["f1",[]]]],["~p",[["f_e",[["?X"]]]]]]"#);
        let back: FolClause = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn subst_encoding() {
        let s = Subst::singleton("X", Term::f0());
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"X":["f0",[]]}"#);
        assert_eq!(serde_json::from_str::<Subst>(&text).unwrap(), s);
    }

    #[test]
    fn rejects_garbage() {
        assert!(serde_json::from_str::<Term>(r#"["?"]"#).is_err());
        assert!(serde_json::from_str::<Literal>(r#"["p"]"#).is_err());
    }
}
