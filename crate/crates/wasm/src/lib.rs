//! Browser bindings. Each function takes plain strings and returns a JSON
//! report: `{"ok": true, "result": ...}` or `{"ok": false, "error": "..."}`.

use fprange::alphabet::Alphabet;
use fprange::error::Result;
use fprange::field::PrimeField;
use fprange::parse::parse_poly;
use fprange::poly::MultiPoly;
use fprange::quad::{decompose, SupportThreshold};
use fprange::spectrum::{histogram, nullstellensatz_certificate, BiasReport, Enumeration};
use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Points enumerated per call; keeps the page responsive.
const BROWSER_BUDGET: u64 = 1 << 20;

fn cfg() -> Enumeration {
    Enumeration::with_budget(BROWSER_BUDGET).serial()
}

fn respond<T: Serialize>(r: Result<T>) -> String {
    match r {
        Ok(v) => json!({ "ok": true, "result": v }).to_string(),
        Err(e) => json!({ "ok": false, "error": e.to_string() }).to_string(),
    }
}

fn setup(p: u32, alphabet: &str) -> Result<(PrimeField, Alphabet)> {
    let f = PrimeField::new(p as u64)?;
    let s = Alphabet::parse(f, alphabet)?;
    Ok((f, s))
}

/// Polynomials separated by `;`, padded to a common number of variables.
fn parse_list(text: &str, f: PrimeField) -> Result<Vec<MultiPoly>> {
    let ps: Vec<MultiPoly> = text
        .split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| parse_poly(t, f))
        .collect::<Result<_>>()?;
    let n = ps.iter().map(|p| p.nvars()).max().unwrap_or(1).max(1);
    Ok(ps.into_iter().map(|p| p.with_nvars(n)).collect())
}

/// Image, histogram, bias and reduction of `poly` on `S^n`.
#[wasm_bindgen]
pub fn analyze(p: u32, alphabet: &str, poly: &str) -> String {
    respond((|| {
        let (f, s) = setup(p, alphabet)?;
        let q = parse_poly(poly, f)?;
        let h = histogram(&q, &s, &cfg())?;
        let reduced = s.reduce(&q);
        Ok(json!({
            "image": h.image(),
            "counts": h.counts,
            "total": h.total,
            "full_range": h.is_full_range(),
            "bias": BiasReport::from_histogram(&h),
            "reduced": reduced,
            "vanishes": reduced.is_zero(),
        }))
    })())
}

/// Fiber certificate for `P_1 = v_1, …, P_k = v_k`; `polys` and `values`
/// are `;`- and `,`-separated.
#[wasm_bindgen]
pub fn lower_bound(p: u32, alphabet: &str, polys: &str, values: &str) -> String {
    respond((|| {
        let (f, s) = setup(p, alphabet)?;
        let ps = parse_list(polys, f)?;
        let v: Vec<u32> = values
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<i64>()
                    .map(|y| f.elem(y))
                    .map_err(|_| fprange::error::Error::Invalid(format!("bad value `{x}`")))
            })
            .collect::<Result<_>>()?;
        nullstellensatz_certificate(&ps, &v, &s, &cfg())
    })())
}

/// Squares-plus-determined decomposition of a quadratic; `threshold` is
/// `exact` or a coordinate count.
#[wasm_bindgen]
pub fn decompose2(p: u32, alphabet: &str, poly: &str, threshold: &str, absorb: bool) -> String {
    respond((|| {
        let (f, s) = setup(p, alphabet)?;
        let q = parse_poly(poly, f)?;
        let th = match threshold.trim() {
            "" | "exact" => SupportThreshold::Exact,
            t => SupportThreshold::Fixed(
                t.parse()
                    .map_err(|_| fprange::error::Error::Invalid(format!("bad threshold `{t}`")))?,
            ),
        };
        let rep = decompose(&q, &s, th, absorb, &cfg())?;
        Ok(json!({ "report": rep, "reassembled": rep.decomposition.to_poly() }))
    })())
}
