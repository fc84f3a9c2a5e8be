//! Formula families that separate the calculi, with their companions and
//! explicit short refutations.

mod kbkf;
mod pigeon;
mod suggest;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculi::{CheckError, ExtensionSeq, IrTrace, QresTrace, SigmaV};
use crate::fol::FolClause;
use crate::qbf::PcnfFormula;
use crate::r1::{R1CheckError, R1Trace};

pub use kbkf::{
    build_kbkf_ircalc_delta_refutation, build_kbkf_ircalc_sigma_refutation, gen_kbkf,
    gen_kbkf_delta, gen_kbkf_sigma, kbkf_qures_refutation, KbkfRefutation, KbkfStage, SigmaMode,
};
pub use pigeon::{
    build_omega_r1_refutation, build_phi_r1_refutation, gen_omega, gen_phi, gen_php, gen_tphp,
    php_clause_count, z_count, R1Refutation,
};
pub use suggest::{best_sigma_v, suggest_sigma_v, SigmaCandidate};

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("parameter must be at least 1, got {0}")]
    Parameter(usize),
    #[error("reference refutation rejected: {0}")]
    Qbf(#[from] CheckError),
    #[error("reference refutation rejected: {0}")]
    R1(#[from] R1CheckError),
    #[error("reference refutation does not end in the empty clause")]
    NotRefutation,
}

pub(crate) fn need_positive(n: usize) -> Result<(), FamilyError> {
    if n < 1 {
        return Err(FamilyError::Parameter(n));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Php,
    Phi,
    Omega,
    Kbkf,
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "php" => Ok(Family::Php),
            "phi" => Ok(Family::Phi),
            "omega" => Ok(Family::Omega),
            "kbkf" => Ok(Family::Kbkf),
            _ => Err(format!("unknown family `{s}`")),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::Php => "php",
            Family::Phi => "phi",
            Family::Omega => "omega",
            Family::Kbkf => "kbkf",
        })
    }
}

/// A calculus-tagged reference refutation.
#[derive(Clone, Debug)]
pub enum ReferenceProof {
    Qres(QresTrace),
    Ir(IrTrace),
    /// R1 refutation together with the wrapped clause set it refutes.
    R1 {
        inputs: Vec<FolClause>,
        trace: R1Trace,
    },
}

#[derive(Clone, Debug)]
pub struct FamilyInstance {
    pub family: Family,
    pub param: usize,
    pub formula: PcnfFormula,
    pub delta: Option<ExtensionSeq>,
    pub sigma_v: Option<SigmaV>,
    pub proof: Option<ReferenceProof>,
}

impl FamilyInstance {
    fn bare(family: Family, param: usize, formula: PcnfFormula) -> Self {
        FamilyInstance {
            family,
            param,
            formula,
            delta: None,
            sigma_v: None,
            proof: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GenOptions {
    /// For KBKF: attach σ_v (and Δ in Herbrand mode).
    pub sigma: Option<SigmaMode>,
    pub proof: bool,
}

/// Generates one family member with the requested companions. KBKF
/// refutations are IR-calc with σ_v (atomic), IR-calc with Δ and σ_v
/// (Herbrand), or QU-res when no σ_v is requested. Φ and Ω get their R1
/// refutations; PHP has no short reference refutation.
pub fn instance(
    family: Family,
    param: usize,
    opts: GenOptions,
) -> Result<FamilyInstance, FamilyError> {
    need_positive(param)?;
    let mut inst = match family {
        Family::Php => FamilyInstance::bare(family, param, gen_php(param)?),
        Family::Phi | Family::Omega => {
            let phi = family == Family::Phi;
            if opts.proof {
                let r = if phi {
                    build_phi_r1_refutation(param)?
                } else {
                    build_omega_r1_refutation(param)?
                };
                let mut inst = FamilyInstance::bare(family, param, r.formula);
                inst.proof = Some(ReferenceProof::R1 {
                    inputs: r.inputs,
                    trace: r.trace,
                });
                inst
            } else {
                FamilyInstance::bare(
                    family,
                    param,
                    if phi {
                        gen_phi(param)?
                    } else {
                        gen_omega(param)?
                    },
                )
            }
        }
        Family::Kbkf => FamilyInstance::bare(family, param, gen_kbkf(param)?),
    };
    if family == Family::Kbkf {
        match opts.sigma {
            Some(mode) => {
                inst.sigma_v = Some(gen_kbkf_sigma(param, mode)?);
                if mode == SigmaMode::Herbrand {
                    inst.delta = Some(gen_kbkf_delta(param)?);
                }
                if opts.proof {
                    let r = match mode {
                        SigmaMode::Atomic => build_kbkf_ircalc_sigma_refutation(param)?,
                        SigmaMode::Herbrand => build_kbkf_ircalc_delta_refutation(param)?,
                    };
                    inst.proof = Some(ReferenceProof::Ir(r.trace));
                }
            }
            None if opts.proof => {
                inst.proof = Some(ReferenceProof::Qres(kbkf_qures_refutation(param)?))
            }
            None => {}
        }
    }
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculi::validate_sigma_v;
    use crate::qbf::{evaluate_pcnf, Quant};

    #[test]
    fn counting_identities() {
        for n in 1..=6 {
            let nn = n * (n + 1);
            assert_eq!(gen_php(n).unwrap().matrix.len(), php_clause_count(n));
            let t = gen_tphp(n).unwrap();
            let b = t.prefix.blocks();
            assert_eq!(b[0].vars.len(), nn);
            assert_eq!(b[1].vars.len(), z_count(n));
            assert_eq!(z_count(n), (n + 1) + n * n * (n + 1) / 2);
            // D + P + Q.
            assert_eq!(t.matrix.len(), 1 + nn + n * nn);
            assert_eq!(t.matrix[0].len(), z_count(n));
        }
    }

    #[test]
    fn small_instances_match_the_displays() {
        let php = gen_php(1).unwrap();
        let shown: Vec<String> = php.matrix.iter().map(|c| php.fmt_clause(c)).collect();
        assert_eq!(shown.len(), 3);
        assert_eq!(gen_php(2).unwrap().matrix.len(), 9);

        let phi = gen_phi(1).unwrap();
        let sizes: Vec<(Quant, usize)> = phi
            .prefix
            .blocks()
            .iter()
            .map(|b| (b.quant, b.vars.len()))
            .collect();
        assert_eq!(
            sizes,
            vec![(Quant::Exists, 2), (Quant::Forall, 2), (Quant::Exists, 3)]
        );
        let omega = gen_omega(1).unwrap();
        let sizes: Vec<(Quant, usize)> = omega
            .prefix
            .blocks()
            .iter()
            .map(|b| (b.quant, b.vars.len()))
            .collect();
        assert_eq!(sizes, vec![(Quant::Forall, 2), (Quant::Exists, 5)]);

        let k = gen_kbkf(1).unwrap();
        let shown: Vec<String> = k.matrix.iter().map(|c| k.fmt_clause(c)).collect();
        assert_eq!(shown.len(), 6);
        let k2 = gen_kbkf(2).unwrap();
        assert_eq!(k2.matrix.len(), 2 * 2 + 2 + 2 * 2);
        assert_eq!(k2.matrix[2].len(), 4);
        assert_eq!(k2.matrix[3].len(), 4);
        assert!(matches!(gen_kbkf(0), Err(FamilyError::Parameter(0))));
        assert!(matches!(gen_php(0), Err(FamilyError::Parameter(0))));
    }

    #[test]
    fn families_are_false_and_tphp_is_true() {
        for n in 1..=2 {
            if n == 1 {
                assert!(!evaluate_pcnf(&gen_phi(n).unwrap(), 24).unwrap());
                assert!(!evaluate_pcnf(&gen_omega(n).unwrap(), 24).unwrap());
                assert!(evaluate_pcnf(&gen_tphp(n).unwrap(), 24).unwrap());
            }
            assert!(!evaluate_pcnf(&gen_kbkf(n).unwrap(), 24).unwrap());
        }
    }

    #[test]
    fn companions_validate() {
        for t in 1..=5 {
            let f = gen_kbkf(t).unwrap();
            let delta = gen_kbkf_delta(t).unwrap();
            let ext = crate::calculi::validate_delta(&f, &delta).unwrap();
            validate_sigma_v(&ext, &gen_kbkf_sigma(t, SigmaMode::Herbrand).unwrap()).unwrap();
            validate_sigma_v(&f.prefix, &gen_kbkf_sigma(t, SigmaMode::Atomic).unwrap()).unwrap();
        }
        let d = gen_kbkf_delta(1).unwrap();
        assert_eq!(d.delta.len(), 1);
        assert_eq!(d.delta[0].clauses.len(), 3);
        assert_eq!(gen_kbkf_sigma(2, SigmaMode::Atomic).unwrap().0.len(), 2);
    }

    #[test]
    fn reference_refutations_check() {
        for t in 1..=4 {
            let s = build_kbkf_ircalc_sigma_refutation(t).unwrap();
            assert!(s.trace.metrics().tree_form);
            assert!(s.max_width(KbkfStage::is_interior) <= 4);
            assert!(s.max_width(|_| true) <= 2 * t + 2);
            let d = build_kbkf_ircalc_delta_refutation(t).unwrap();
            assert!(d.trace.metrics().tree_form);
            assert!(d.max_width(KbkfStage::is_interior) <= 5);
            assert!(d.max_width(|_| true) <= 2 * t + 3);
            kbkf_qures_refutation(t).unwrap();
        }
        for n in 1..=2 {
            let r = build_omega_r1_refutation(n).unwrap();
            assert!(r.metrics.tree_form);
            let r = build_phi_r1_refutation(n).unwrap();
            assert!(r.metrics.tree_form);
        }
    }

    #[test]
    fn sigma_suggestions() {
        let c = suggest_sigma_v(&gen_kbkf(2).unwrap());
        let top = best_sigma_v(&c);
        assert_eq!(top, gen_kbkf_sigma(2, SigmaMode::Atomic).unwrap());
        assert!(suggest_sigma_v(&gen_omega(2).unwrap()).is_empty());
        assert!(suggest_sigma_v(&gen_php(2).unwrap()).is_empty());
    }

    #[test]
    fn generation_is_deterministic() {
        let a = instance(
            Family::Kbkf,
            3,
            GenOptions {
                sigma: Some(SigmaMode::Herbrand),
                proof: true,
            },
        )
        .unwrap();
        let b = instance(
            Family::Kbkf,
            3,
            GenOptions {
                sigma: Some(SigmaMode::Herbrand),
                proof: true,
            },
        )
        .unwrap();
        assert_eq!(a.formula, b.formula);
        match (a.proof, b.proof) {
            (Some(ReferenceProof::Ir(x)), Some(ReferenceProof::Ir(y))) => {
                assert_eq!(x.to_jsonl(), y.to_jsonl())
            }
            _ => panic!("expected IR-calc proofs"),
        }
    }
}
