//! Browser bindings: three operations behind plain string interfaces.
//!
//! Each exported function takes `.qfs` text (or integers), runs one
//! core pipeline and returns a JSON report string, so the page needs
//! no binding glue beyond `JSON.parse`.  The report builders are plain
//! Rust functions; the `wasm_bindgen` wrappers only translate errors,
//! which keeps everything testable natively.

use qforms_core::bounds::{bound_table, lower_bound, upper_bound};
use qforms_core::field::FieldDesc;
use qforms_core::formlang::{parse_system, serialize_system, SystemDocument};
use qforms_core::hensel::{padic_solve, PadicSolve};
use qforms_core::minimize::is_fq_minimized;
use qforms_core::oneform::is_isotropic_qp;
use qforms_core::zerofinder::{enumerate_common_zeros, EnumOptions, SearchOptions};
use qforms_core::{Error, Result};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn field_label(field: &FieldDesc) -> String {
    field.name()
}

/// Zero census of a document over a finite base: exact count, how many
/// zeros are nonsingular, and a few sample points.
pub fn zeros_report(text: &str) -> Result<String> {
    let doc = parse_system(text)?;
    let field = doc.system.field().clone();
    if field.order().is_none() {
        return Err(Error::FieldMismatch(
            "zero counting runs over a finite base; use the solver panel for Q_p".into(),
        ));
    }
    let opts = EnumOptions { limit: Some(8), ..EnumOptions::default() };
    let scan = enumerate_common_zeros(&doc.system, &opts)?;
    let zeros: Vec<Value> = scan
        .reports
        .iter()
        .map(|r| {
            json!({
                "point": r.point.iter().map(|c| field.fmt_element(c)).collect::<Vec<_>>(),
                "jacobian_rank": r.jacobian_rank,
                "singular": r.singular,
            })
        })
        .collect();
    let minimized = if field.is_field() {
        Some(is_fq_minimized(&doc.system)?.minimized)
    } else {
        None
    };
    Ok(json!({
        "field": field_label(&field),
        "n": doc.system.n(),
        "forms": doc.names,
        "count": scan.count,
        "nonsingular_count": scan.nonsingular_count,
        "nontrivial": scan.count > 1,
        "truncated": scan.truncated,
        "zeros": zeros,
        "minimized": minimized,
    })
    .to_string())
}

/// End-to-end p-adic run: minimize, pick a residue seed, lift, map
/// back.  Single forms also get the invariant-based isotropy verdict,
/// so the two decision routes sit side by side.
pub fn solve_report(text: &str, seed: u64) -> Result<String> {
    let doc = parse_system(text)?;
    let field = doc.system.field().clone();
    if field.order().is_some() {
        return Err(Error::FieldMismatch(
            "the solver runs over Q_p; use the zero census panel for finite bases".into(),
        ));
    }
    let isotropy = if doc.system.r() == 1 {
        let rep = is_isotropic_qp(&doc.system.forms()[0])?;
        Some(json!({
            "isotropic": rep.isotropic,
            "criterion": rep.criterion,
            "hasse": rep.invariants.hasse,
            "discriminant": rep.invariants.discriminant.to_string(),
        }))
    } else {
        None
    };
    let opts = SearchOptions { seed, ..SearchOptions::default() };
    let outcome = match padic_solve(&doc.system, field.precision(), &opts)? {
        PadicSolve::Solved(sz) => {
            let model_doc =
                SystemDocument::new(vec![], doc.names.clone(), sz.model.clone())?;
            json!({
                "solved": true,
                "p": sz.zero.p,
                "precision": sz.zero.precision,
                "achieved": sz.achieved,
                "digits": (0..sz.zero.coords.len())
                    .map(|i| sz.zero.digit_string(i))
                    .collect::<Vec<_>>(),
                "primitive": sz.zero.is_primitive(),
                "model_minimized": sz.model_minimized,
                "model": serialize_system(&model_doc),
            })
        }
        PadicSolve::NoNonsingularSeed { certified, attempts, model_minimized } => json!({
            "solved": false,
            "certified": certified,
            "attempts": attempts,
            "model_minimized": model_minimized,
        }),
        PadicSolve::Unknown { attempts } => json!({
            "solved": false,
            "certified": false,
            "attempts": attempts,
        }),
    };
    Ok(json!({
        "field": field_label(&field),
        "n": doc.system.n(),
        "forms": doc.names,
        "isotropy": isotropy,
        "outcome": outcome,
    })
    .to_string())
}

/// Bound table rows up to `r_max` plus the derivation trace for the
/// last row.
pub fn bounds_report(r_max: u64) -> Result<String> {
    let rows = bound_table(r_max)?;
    let derivation = upper_bound(r_max)?;
    Ok(json!({
        "rows": rows.iter().map(|row| json!({
            "r": row.r,
            "lower": row.lower,
            "upper": row.upper,
            "rule": row.rule,
            "comparison": row.comparison,
        })).collect::<Vec<_>>(),
        "bracket": format!(
            "{} <= beta({};Qp) <= {}",
            lower_bound(r_max)?,
            r_max,
            derivation.value
        ),
        "trace": derivation.render(),
    })
    .to_string())
}

fn to_js(e: Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

#[wasm_bindgen]
pub fn zeros(text: &str) -> std::result::Result<String, JsValue> {
    zeros_report(text).map_err(to_js)
}

#[wasm_bindgen]
pub fn solve(text: &str, seed: u64) -> std::result::Result<String, JsValue> {
    solve_report(text, seed).map_err(to_js)
}

#[wasm_bindgen]
pub fn bounds(r_max: u64) -> std::result::Result<String, JsValue> {
    bounds_report(r_max).map_err(to_js)
}
