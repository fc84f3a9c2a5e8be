//! QBF proof calculi, their first-order translations, resolution checkers,
//! proof simulations and the formula families that separate the systems.
//!
//! ```
//! use qbfsim::families::{gen_kbkf, kbkf_qures_refutation};
//! use qbfsim::r1::check_r1;
//! use qbfsim::simulate::{simulate_qures_to_r1, SimConfig};
//! use qbfsim::translate::ClauseMode;
//!
//! let f = gen_kbkf(2).unwrap();
//! let proof = kbkf_qures_refutation(2).unwrap();
//! let sim = simulate_qures_to_r1(&f, &proof, ClauseMode::Skolem, SimConfig::default()).unwrap();
//! assert!(check_r1(&sim.inputs, &sim.trace, false).unwrap().refutation);
//! assert!(sim.report.overhead_ratio <= 2.0);
//! ```

pub mod calculi;
pub mod families;
pub mod fol;
pub mod qbf;
pub mod r1;
pub mod simulate;
pub mod translate;
