//! Browser bindings. Each export takes plain numbers or comma-separated
//! lists and returns a JSON string; the `*_json` functions do the work and
//! are usable natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use varbound::config::BoundConfig;
use varbound::entropic::c_constant;
use varbound::product::{chain, l1, max_permuted_partial_cs, mondal_product_bound, u1, SearchStrategy};
use varbound::quantum::CoefficientPair;
use varbound::scenarios::ScenarioKind;
use varbound::sum::{l2, mondal_sum_bound, u2};
use varbound::sweep::{run_sweep, theta_grid};
use varbound::tolerance::ORDER_REL;
use varbound::Error;

const MAX_STEPS: usize = 2001;
const MAX_COMPONENTS: usize = 64;

fn message(e: Error) -> String {
    e.to_string()
}

fn parse_list(label: &str, text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| format!("{label}: {s:?} is not a number")))
        .collect()
}

/// Rows of the `spin1` (L_x, L_y) or `spinhalf` (S_x, S_z) sweep.
pub fn sweep_json(scenario: &str, start: f64, end: f64, steps: usize) -> Result<String, String> {
    let kind = match scenario {
        "spin1" => ScenarioKind::Spin1LxLy,
        "spinhalf" => ScenarioKind::SpinHalfSxSz,
        other => return Err(format!("unknown scenario {other:?}; use spin1 or spinhalf")),
    };
    if !(start.is_finite() && end.is_finite()) {
        return Err("angles must be finite".into());
    }
    if !(2..=MAX_STEPS).contains(&steps) {
        return Err(format!("steps must be between 2 and {MAX_STEPS}"));
    }
    let rows = run_sweep(&kind, &theta_grid(start, end, steps), &BoundConfig::default(), ORDER_REL).map_err(message)?;
    serde_json::to_string(&rows).map_err(|e| e.to_string())
}

/// The entropic constant for two comma-separated spectra.
pub fn c_constant_json(eigs_a: &str, eigs_b: &str) -> Result<String, String> {
    let a = parse_list("A", eigs_a)?;
    let b = parse_list("B", eigs_b)?;
    let c = c_constant(&a, &b).map_err(message)?;
    serde_json::to_string(&c).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Explorer {
    chain: Vec<f64>,
    product: f64,
    sum: f64,
    l1: Option<f64>,
    mondal_in: f64,
    max_perm_in: f64,
    u1: Option<f64>,
    l2: f64,
    mondal_sum: f64,
    u2: f64,
}

/// Every coefficient-level bound for user-supplied `x`, `y`.
pub fn explore_json(x: &str, y: &str) -> Result<String, String> {
    let x = parse_list("x", x)?;
    let y = parse_list("y", y)?;
    if x.len() > MAX_COMPONENTS {
        return Err(format!("at most {MAX_COMPONENTS} components"));
    }
    let pair = CoefficientPair::new(x, y).map_err(message)?;
    let n = pair.n();
    let (vx, vy) = (pair.norm_sqr_x(), pair.norm_sqr_y());
    let u1 = match u1(&pair) {
        Ok(u) => u.finite(),
        Err(Error::EmptySupport) => Some(0.0),
        Err(e) => return Err(message(e)),
    };
    let out = Explorer {
        chain: chain(&pair).values,
        product: vx * vy,
        sum: vx + vy,
        l1: if n >= 2 { Some(l1(&pair).map_err(message)?) } else { None },
        mondal_in: mondal_product_bound(&pair),
        max_perm_in: max_permuted_partial_cs(&pair, n, SearchStrategy::SortExact).map_err(message)?.0,
        u1,
        l2: l2(&pair),
        mondal_sum: mondal_sum_bound(&pair),
        u2: u2(&pair),
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn sweep(scenario: &str, start: f64, end: f64, steps: usize) -> Result<String, JsValue> {
    sweep_json(scenario, start, end, steps).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn cconst(eigs_a: &str, eigs_b: &str) -> Result<String, JsValue> {
    c_constant_json(eigs_a, eigs_b).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn explore(x: &str, y: &str) -> Result<String, JsValue> {
    explore_json(x, y).map_err(|e| JsValue::from_str(&e))
}
