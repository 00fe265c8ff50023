//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export returns a JSON string. Failures are reported as
//! `{"error": "..."}` so the page never has to catch exceptions.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;
use weylgraph::enumerate::{tree_table_rows, Limits};
use weylgraph::graph::Digraph;
use weylgraph::io::parse_rational;
use weylgraph::jets::{invariance_test, Model, DEFAULT_ORDER};
use weylgraph::star::{star_h_c, wick_dual_h_c, StarSeries, StarType, WickIndexSet};
use weylgraph::weyl::{build_invariant, WeylFunctionSpec};
use weylgraph::Result;

/// Kept small so every request answers quickly in the browser.
const DEMO_LIMITS: Limits = Limits {
    max_weight: 3,
    max_legs: 9,
};

fn respond(r: Result<Value>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

/// Counts of contractible semistable trees, one row per `(k, m)`.
#[wasm_bindgen]
pub fn tree_table(kmax: usize, mmax: usize) -> String {
    respond(tree_table_rows(kmax, mmax, &DEMO_LIMITS).map(|rows| {
        rows.into_iter()
            .map(|((k, m), counts)| json!({ "k": k, "m": m, "counts": counts }))
            .collect()
    }))
}

/// Coefficients of the `h_C` star product, or of its Wick-type dual.
#[wasm_bindgen]
pub fn star_coefficients(c: &str, order: usize, wick: bool) -> String {
    respond((|| {
        let c = parse_rational(c)?;
        let series = if wick {
            wick_dual_h_c(&c, order, WickIndexSet::Strong, &DEMO_LIMITS)?
        } else {
            star_h_c(&c, order, &DEMO_LIMITS)?
        };
        Ok(series_json(&series))
    })())
}

fn series_json(s: &StarSeries) -> Value {
    let orders: Vec<Value> = s
        .orders
        .iter()
        .map(|sum| {
            sum.iter()
                .map(|(_, g, c)| json!({ "graph": g.to_string(), "coeff": c.to_string() }))
                .collect()
        })
        .collect();
    let kind = match s.kind {
        StarType::AntiWick => "anti-wick",
        StarType::Wick => "wick",
    };
    json!({ "kind": kind, "orders": orders })
}

/// Builds the invariant `Σ c(H)(-1)^|V|/|Aut H| · H` of the given weight and
/// evaluates it in both charts of a model.
#[wasm_bindgen]
pub fn chart_invariance(function: &str, weight: usize, metric: &str) -> String {
    respond((|| {
        let spec: WeylFunctionSpec = function.parse()?;
        let model: Model = metric.parse()?;
        let inv = build_invariant::<Digraph>(&spec, weight, &DEMO_LIMITS)?;
        let r = invariance_test(&inv.sum, model, DEFAULT_ORDER, 1e-9)?;
        Ok(json!({
            "function": spec.to_string(),
            "weight": weight,
            "metric": model.name(),
            "terms": inv.sum.len(),
            "fiber_constant": inv.matches_stable_expansion,
            "chart0": [r.chart0.re, r.chart0.im],
            "chart1": [r.chart1.re, r.chart1.im],
            "relative_diff": r.relative_diff,
            "agree": r.passed(),
        }))
    })())
}

/// Names accepted by the `metric` argument of [`chart_invariance`].
#[wasm_bindgen]
pub fn metrics() -> String {
    Value::from(Model::ALL.iter().map(|m| m.name()).collect::<Vec<_>>()).to_string()
}
