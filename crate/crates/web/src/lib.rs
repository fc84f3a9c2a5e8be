//! Browser demo: three operations exported through wasm-bindgen. Each
//! returns a JSON string; the plain Rust versions in [`ops`] are what the
//! native tests exercise.

use wasm_bindgen::prelude::*;

pub mod ops;

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

/// Builds KBKF(t) with its reference proof, checks it and reports metrics.
/// `sigma` is `""` (QU-res), `"atomic"` or `"herbrand"`.
#[wasm_bindgen]
pub fn kbkf_refutation(t: u32, sigma: &str) -> Result<String, JsValue> {
    js(ops::kbkf_refutation(t as usize, sigma))
}

/// Translates QDIMACS text into clauses; `mode` is `skolem` or `epr`.
#[wasm_bindgen]
pub fn translate_qdimacs(text: &str, mode: &str, wrap: bool) -> Result<String, JsValue> {
    js(ops::translate_qdimacs(text, mode, wrap))
}

/// Sizes of Ω_n and of its short R1 refutation.
#[wasm_bindgen]
pub fn omega_stats(n: u32) -> Result<String, JsValue> {
    js(ops::omega_stats(n as usize))
}
