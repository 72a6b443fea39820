//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export returns a JSON string. The `*_json` functions hold the logic
//! and are plain Rust so they can be tested natively; the `#[wasm_bindgen]`
//! wrappers only turn errors into JavaScript exceptions.

use serde_json::json;
use wasm_bindgen::prelude::*;

use qcoupling::coupling::{alpha_mean, alpha_pure, velocity_ratio, PolygonIndex};
use qcoupling::report::table_json;
use qcoupling::running::{generate_table, SchemePair};
use qcoupling::search::{nearest, SearchCaps};

/// Largest cap the page accepts; keeps a nearest query interactive.
pub const MAX_CAP: u32 = 20_000;

pub fn evaluate_json(n1: i32, n2: i32) -> Result<String, String> {
    let idx = PolygonIndex::from_signed(n1.into(), n2.into()).map_err(|e| e.to_string())?;
    let a = alpha_pure(idx);
    let mut v = json!({
        "n1": idx.n1(),
        "n2": idx.n2(),
        "alpha": a.value,
        "inverse": a.reciprocal(),
        "velocity_ratio": velocity_ratio(idx),
    });
    if let Ok(m) = alpha_mean(idx) {
        v["mean"] = json!(m.value);
    }
    Ok(v.to_string())
}

pub fn nearest_json(value: f64, reciprocal: bool, max_n1: u32, max_n2: u32, means: bool) -> Result<String, String> {
    if max_n1 > MAX_CAP || max_n2 > MAX_CAP {
        return Err(format!("caps are limited to {MAX_CAP} in the demo"));
    }
    let caps = SearchCaps::new(max_n1, max_n2, means).map_err(|e| e.to_string())?;
    let target = if reciprocal { 1.0 / value } else { value };
    let hit = nearest(target, &caps).map_err(|e| e.to_string())?;
    let idx = hit.element.index();
    Ok(json!({
        "element": hit.element.to_string(),
        "mean": hit.element.is_mean(),
        "n1": idx.n1(),
        "n2": idx.n2(),
        "alpha": hit.value.value,
        "inverse": hit.value.reciprocal(),
        "target": target,
        "distance": hit.distance,
    })
    .to_string())
}

pub fn running_table_json(from: f64, to: f64, step: f64) -> Result<String, String> {
    if step < 0.01 {
        return Err("step must be at least 0.01".into());
    }
    let rows = generate_table(&SchemePair::builtin(), from, to, step).map_err(|e| e.to_string())?;
    Ok(table_json(&rows, None))
}

#[wasm_bindgen]
pub fn evaluate(n1: i32, n2: i32) -> Result<String, JsError> {
    evaluate_json(n1, n2).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = nearestElement)]
pub fn nearest_element(value: f64, reciprocal: bool, max_n1: u32, max_n2: u32, means: bool) -> Result<String, JsError> {
    nearest_json(value, reciprocal, max_n1, max_n2, means).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = runningTable)]
pub fn running_table(from: f64, to: f64, step: f64) -> Result<String, JsError> {
    running_table_json(from, to, step).map_err(|e| JsError::new(&e))
}
