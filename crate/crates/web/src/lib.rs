//! Browser demo: LTL entailment, bounded program checks and the Traveller
//! derivation. Each export returns a plain-text report.

use solp::corpus;
use solp::engine::{render_answer, solve, ArnScheme, Limits, Strategy};
use solp::ltl::{self, Ltl};
use solp::pexpr::{check_ground_property, Bounds, PSpec, PTerm};
use wasm_bindgen::prelude::*;

pub fn entails_report(premise: &str, conclusion: &str) -> Result<String, String> {
    let f: Ltl = premise.parse().map_err(|e| format!("premise: {e}"))?;
    let g: Ltl = conclusion.parse().map_err(|e| format!("conclusion: {e}"))?;
    Ok(match ltl::entailment_counterexample(&f, &g).map_err(|e| e.to_string())? {
        None => format!("{f} ⊨ {g}"),
        Some(l) => format!("{f} ⊭ {g}\ncounterexample: {l}"),
    })
}

pub fn check_report(program: &str, spec: &str, bounds: &str) -> Result<String, String> {
    let t: PTerm = program.parse().map_err(|e| format!("program: {e}"))?;
    let s: PSpec = spec.parse().map_err(|e| format!("spec: {e}"))?;
    let b: Bounds = bounds.parse().map_err(|e| format!("bounds: {e}"))?;
    let fuel = 10_000;
    let v = check_ground_property(&t, &s, &b, fuel).map_err(|e| e.to_string())?;
    Ok(format!("{v} (bounded: {b}, fuel {fuel})"))
}

pub fn traveller_report() -> String {
    let scheme = ArnScheme::default();
    match solve(&scheme, &corpus::traveller_query(), &corpus::services_repository(), &Strategy::Auto, Limits::default()) {
        Ok(sol) => sol.answers.first().map_or_else(|| "no answer".to_string(), |a| render_answer(&scheme, a)),
        Err(e) => e.to_string(),
    }
}

#[wasm_bindgen]
pub fn ltl_entails(premise: &str, conclusion: &str) -> Result<String, JsError> {
    entails_report(premise, conclusion).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn pexpr_check(program: &str, spec: &str, bounds: &str) -> Result<String, JsError> {
    check_report(program, spec, bounds).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn traveller_derivation() -> String {
    traveller_report()
}
