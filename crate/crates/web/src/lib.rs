//! WebAssembly bindings for the browser demo: three interactive views
//! backed by the analytic core. Curves come back as flat `Vec<f64>` so the
//! page can plot them without any glue structures.
//!
//! The `*_impl` functions hold the logic and are testable on the host;
//! `JsValue` cannot be materialized outside a wasm runtime, so the
//! exported wrappers only translate errors.

use wasm_bindgen::prelude::*;

use dcsched::strategy::{nc_plr, pdps_plr, split_counts};
use dcsched::{FieldSpec, GilbertElliottChannel, NcMode, PathPair};

fn channel(g: f64, b: f64) -> Result<GilbertElliottChannel, String> {
    GilbertElliottChannel::new(g, b).map_err(|e| e.to_string())
}

fn pair(g1: f64, b1: f64, g2: f64, b2: f64) -> Result<PathPair, String> {
    Ok(PathPair::new(channel(g1, b1)?, channel(g2, b2)?))
}

fn loss_pmf_impl(g: f64, b: f64, n: usize) -> Result<Vec<f64>, String> {
    let pmf = channel(g, b)?.loss_pmf(n).map_err(|e| e.to_string())?;
    Ok(pmf.mass().to_vec())
}

fn stationary_loss_rate_impl(g: f64, b: f64) -> Result<f64, String> {
    Ok(channel(g, b)?.stationary().map_err(|e| e.to_string())?.pi_bad)
}

fn pdps_curve_impl(
    g1: f64,
    b1: f64,
    g2: f64,
    b2: f64,
    d: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    if !(0.0..=1.0).contains(&d) {
        return Err("duplication ratio must lie in [0, 1]".into());
    }
    if points < 2 {
        return Err("need at least two curve points".into());
    }
    let paths = pair(g1, b1, g2, b2)?;
    (0..points)
        .map(|i| {
            let lb = i as f64 / (points - 1) as f64;
            pdps_plr(&paths, d, lb).map(|r| r.e2e_plr).map_err(|e| e.to_string())
        })
        .collect()
}

fn nc_curve_impl(
    g1: f64,
    b1: f64,
    g2: f64,
    b2: f64,
    n: usize,
    q: u64,
    lb: f64,
) -> Result<Vec<f64>, String> {
    let paths = pair(g1, b1, g2, b2)?;
    let field = FieldSpec::new(q).map_err(|e| e.to_string())?;
    let (n1, n2) = split_counts(lb, n);
    (1..=n)
        .map(|k| {
            nc_plr(&paths, n1, n2, k, &field, NcMode::Exact)
                .map(|r| r.e2e_plr)
                .map_err(|e| e.to_string())
        })
        .collect()
}

/// Distribution of the loss count in a window of `n` slots:
/// `result[l]` = P(exactly l losses).
#[wasm_bindgen]
pub fn loss_pmf(g: f64, b: f64, n: usize) -> Result<Vec<f64>, JsValue> {
    loss_pmf_impl(g, b, n).map_err(|e| JsValue::from_str(&e))
}

/// Stationary loss rate of a single channel.
#[wasm_bindgen]
pub fn stationary_loss_rate(g: f64, b: f64) -> Result<f64, JsValue> {
    stationary_loss_rate_impl(g, b).map_err(|e| JsValue::from_str(&e))
}

/// End-to-end loss of the duplication + splitting mix as the load balance
/// sweeps 0..=1 in `points` steps (inclusive): `result[i]` corresponds to
/// lb = i / (points - 1).
#[wasm_bindgen]
pub fn pdps_curve(
    g1: f64,
    b1: f64,
    g2: f64,
    b2: f64,
    d: f64,
    points: usize,
) -> Result<Vec<f64>, JsValue> {
    pdps_curve_impl(g1, b1, g2, b2, d, points).map_err(|e| JsValue::from_str(&e))
}

/// Coded loss versus generation size: `result[k - 1]` is the end-to-end
/// loss for k information packets in a block of `n`, split at balance `lb`.
#[wasm_bindgen]
pub fn nc_curve(
    g1: f64,
    b1: f64,
    g2: f64,
    b2: f64,
    n: usize,
    q: u64,
    lb: f64,
) -> Result<Vec<f64>, JsValue> {
    nc_curve_impl(g1, b1, g2, b2, n, q, lb).map_err(|e| JsValue::from_str(&e))
}
