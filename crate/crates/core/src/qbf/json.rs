use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Block, Clause, Lit, PcnfFormula, Prefix, PrefixError, Quant, Var};

/// Wire form of a PCNF formula:
/// `{"prefix":[["a"|"e",[ids]]],"clauses":[[lits]]}` plus optional names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PcnfJson {
    pub prefix: Vec<(String, Vec<u32>)>,
    pub clauses: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub names: BTreeMap<u32, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_vars: Option<u32>,
}

#[derive(Debug, thiserror::Error)]
pub enum PcnfJsonError {
    #[error("unknown quantifier tag `{0}`")]
    BadQuant(String),
    #[error("literal 0 is not allowed")]
    ZeroLit,
    #[error(transparent)]
    Prefix(#[from] PrefixError),
}

impl From<&PcnfFormula> for PcnfJson {
    fn from(f: &PcnfFormula) -> Self {
        PcnfJson {
            prefix: f
                .prefix
                .blocks()
                .iter()
                .map(|b| {
                    let tag = if b.quant == Quant::Forall { "a" } else { "e" };
                    (tag.to_string(), b.vars.iter().map(|v| v.0).collect())
                })
                .collect(),
            clauses: f
                .matrix
                .iter()
                .map(|c| c.lits().iter().map(|l| l.to_dimacs()).collect())
                .collect(),
            names: f.names.iter().map(|(v, n)| (v.0, n.clone())).collect(),
            num_vars: Some(f.num_vars),
        }
    }
}

impl TryFrom<PcnfJson> for PcnfFormula {
    type Error = PcnfJsonError;

    fn try_from(j: PcnfJson) -> Result<Self, Self::Error> {
        let mut blocks = Vec::new();
        for (tag, vars) in j.prefix {
            let quant = match tag.as_str() {
                "a" => Quant::Forall,
                "e" => Quant::Exists,
                _ => return Err(PcnfJsonError::BadQuant(tag)),
            };
            blocks.push(Block {
                quant,
                vars: vars.into_iter().map(Var).collect(),
            });
        }
        let prefix = Prefix::new(blocks)?;
        let mut matrix = Vec::new();
        for c in j.clauses {
            let lits: Option<Vec<Lit>> = c.into_iter().map(Lit::from_dimacs).collect();
            matrix.push(Clause::new(lits.ok_or(PcnfJsonError::ZeroLit)?));
        }
        let mut f = PcnfFormula::new(prefix, matrix);
        if let Some(n) = j.num_vars {
            f.num_vars = f.num_vars.max(n);
        }
        f.names = j.names.into_iter().map(|(v, n)| (Var(v), n)).collect();
        Ok(f)
    }
}
