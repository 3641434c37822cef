//! Browser bindings: classify a singular profile, audit a pair of model
//! spaces, and run the equivariant sphere flow. Every export returns JSON or
//! CSV text so the page needs no generated types.

use areaflow::audit::{audit, Condition};
use areaflow::flow::{run, Background, FlowCase, FlowConfig, InitialData, Preset, DEFAULT_CFL};
use areaflow::model::{ModelSpace, PathMode};
use areaflow::profile::{classify, SingularProfile};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest θ-grid the page may request; keeps a run under a few seconds.
pub const MAX_POINTS: usize = 257;

/// Profile, `Θ` pair eigenvalues and area/distance classification as JSON.
pub fn profile_json(m: usize, n: usize, lambdas: &[f64]) -> Result<String, String> {
    let p = SingularProfile::from_lambdas(m, n, lambdas).map_err(|e| e.to_string())?;
    let out = json!({
        "lambda": p.lambda,
        "s_diag": p.s_diag,
        "c_diag": p.c_diag,
        "theta_min": p.theta_eigs.iter().copied().fold(f64::INFINITY, f64::min),
        "classification": classify(&p),
    });
    Ok(out.to_string())
}

/// Condition reports for `kind:dim:scale` specs as a JSON array.
pub fn audit_json(space_m: &str, space_n: &str, conditions: &str) -> Result<String, String> {
    let sm: ModelSpace = space_m
        .parse()
        .map_err(|e: areaflow::Error| e.to_string())?;
    let sn: ModelSpace = space_n
        .parse()
        .map_err(|e: areaflow::Error| e.to_string())?;
    let mut reports = Vec::new();
    for c in conditions.split(',').filter(|c| !c.trim().is_empty()) {
        let c: Condition = c.parse().map_err(|e: areaflow::Error| e.to_string())?;
        // conditions whose data the spaces lack are reported, not fatal
        match audit(&sm, &sn, c) {
            Ok(r) => reports.push(serde_json::to_value(r).expect("serializable")),
            Err(e) => reports.push(json!({ "condition": c.tag(), "error": e.to_string() })),
        }
    }
    Ok(serde_json::Value::Array(reports).to_string())
}

/// Equivariant `S^m → S^m` flow from `ρ₀ = amplitude·sin θ`; CSV series.
pub fn equivariant_csv(
    m: usize,
    amplitude: f64,
    points: usize,
    t_end: f64,
    shrinking: bool,
) -> Result<String, String> {
    if points > MAX_POINTS {
        return Err(format!("at most {MAX_POINTS} points"));
    }
    let cfg = FlowConfig {
        case: FlowCase::Equivariant,
        dims: [m, m],
        grid: points,
        cfl: DEFAULT_CFL,
        dt: None,
        t_end,
        sample_dt: t_end / 40.0,
        initial: InitialData {
            preset: Preset::Sine,
            amplitude,
            linear: None,
        },
        background: Background {
            mode: if shrinking {
                PathMode::RicciHomothety
            } else {
                PathMode::Static
            },
            ..Background::default()
        },
        growth_rate: None,
        residual: false,
    };
    let out = run(&cfg).map_err(|e| e.to_string())?;
    Ok(out.series.to_csv())
}

#[wasm_bindgen]
pub fn profile(m: usize, n: usize, lambdas: &[f64]) -> Result<String, JsError> {
    profile_json(m, n, lambdas).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = auditPair)]
pub fn audit_pair(space_m: &str, space_n: &str, conditions: &str) -> Result<String, JsError> {
    audit_json(space_m, space_n, conditions).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = equivariantFlow)]
pub fn equivariant_flow(
    m: usize,
    amplitude: f64,
    points: usize,
    t_end: f64,
    shrinking: bool,
) -> Result<String, JsError> {
    equivariant_csv(m, amplitude, points, t_end, shrinking).map_err(|e| JsError::new(&e))
}
