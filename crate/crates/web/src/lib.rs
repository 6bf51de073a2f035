//! wasm bindings for the demo page in `www/`. Every export returns a JSON string.

use num_bigint::BigInt;
use serde::Serialize;
use wasm_bindgen::prelude::*;

use fivesq::arith::is_prime_u64;
use fivesq::ec::FpPoint;
use fivesq::generator::{progression_terms, published_d, sequence_point};
use fivesq::mw::{base_point_mod, compute_m_sets, e1_mod};
use fivesq::quintic::{count_points_mod_p, normalize_ap};

const MAX_Q: u64 = 2000;
const MAX_P: u64 = 400;

#[derive(Serialize)]
struct Multiple {
    k: u64,
    x: Option<u64>,
    y: Option<u64>,
}

#[derive(Serialize)]
struct ResidueView {
    q: u64,
    order: u64,
    m_plus: Vec<u64>,
    m_minus: Vec<u64>,
    summary: String,
    points: Vec<(u64, u64)>,
    multiples: Vec<Multiple>,
}

fn coords(pt: &FpPoint) -> (Option<u64>, Option<u64>) {
    match *pt {
        FpPoint::Infinity => (None, None),
        FpPoint::Affine(x, y) => (Some(x), Some(y)),
    }
}

/// Residue sets at `q`, the points of `E1(F_q)` and the multiples of `(6, 24)`.
pub fn residue_sets_json(q: u64) -> Result<String, String> {
    if q <= 5 || q > MAX_Q || !is_prime_u64(q) {
        return Err(format!("q must be a prime in 7..={MAX_Q}"));
    }
    let m = compute_m_sets(q).map_err(|e| e.to_string())?;
    let curve = e1_mod(q).map_err(|e| e.to_string())?;
    let base = base_point_mod(&curve).map_err(|e| e.to_string())?;
    let points = curve.points().iter().filter_map(|p| Some((p.x()?, coords(p).1?))).collect();
    let mut multiples = Vec::new();
    let mut acc = FpPoint::Infinity;
    for k in 0..m.order {
        let (x, y) = coords(&acc);
        multiples.push(Multiple { k, x, y });
        acc = curve.add(&acc, &base).map_err(|e| e.to_string())?;
    }
    let view = ResidueView {
        q,
        order: m.order,
        summary: m.to_string(),
        m_plus: m.m_plus,
        m_minus: m.m_minus,
        points,
        multiples,
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Count {
    p: u64,
    divides_d: bool,
    points: u64,
    low: f64,
    high: f64,
}

/// `#C_D(F_p)` for primes `5 < p <= p_max` with the window `p + 1 +- 10 sqrt(p)`.
pub fn point_counts_json(d: i64, p_max: u64) -> Result<String, String> {
    if d == 0 {
        return Err("D must be nonzero".into());
    }
    if p_max > MAX_P {
        return Err(format!("p_max is capped at {MAX_P}"));
    }
    let mut out = Vec::new();
    for p in (7..=p_max).filter(|&p| is_prime_u64(p)) {
        let points = count_points_mod_p(d, p).map_err(|e| e.to_string())?;
        let w = 10.0 * (p as f64).sqrt();
        out.push(Count { p, divides_d: d % p as i64 == 0, points, low: p as f64 + 1.0 - w, high: p as f64 + 1.0 + w });
    }
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Progression {
    n: i64,
    t: String,
    z: String,
    d: String,
    terms: Vec<String>,
    roots: Vec<String>,
}

/// The progression from `[n](2, -8)`, normalized with the tabulated `D_n`.
pub fn progression_json(n: i64) -> Result<String, String> {
    let d = published_d(n).ok_or_else(|| "n must be in 1..=8".to_string())?;
    let d = BigInt::from(d);
    let (t, z) = sequence_point(n).map_err(|e| e.to_string())?;
    let ap = normalize_ap(&progression_terms(&t, &z), &d).map_err(|e| e.to_string())?;
    let view = Progression {
        n,
        t: t.to_string(),
        z: z.to_string(),
        d: d.to_string(),
        terms: ap.terms.iter().map(ToString::to_string).collect(),
        roots: ap.roots.iter().map(ToString::to_string).collect(),
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn residue_sets(q: u32) -> Result<String, JsError> {
    residue_sets_json(q.into()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn point_counts(d: i32, p_max: u32) -> Result<String, JsError> {
    point_counts_json(d.into(), p_max.into()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn progression(n: i32) -> Result<String, JsError> {
    progression_json(n.into()).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residue_sets_at_29() {
        let v: serde_json::Value = serde_json::from_str(&residue_sets_json(29).unwrap()).unwrap();
        assert_eq!(v["order"], 16);
        assert_eq!(v["summary"], "q=29 O=16 M+={±1} M-={±3,±5,±7}");
        assert_eq!(v["multiples"][1]["x"], 6);
        assert!(residue_sets_json(30).is_err());
    }

    #[test]
    fn counts_in_window() {
        let v: Vec<serde_json::Value> = serde_json::from_str(&point_counts_json(409, 97).unwrap()).unwrap();
        assert_eq!(v.len(), 22);
        for c in v {
            let n = c["points"].as_f64().unwrap();
            assert!(c["low"].as_f64().unwrap() <= n && n <= c["high"].as_f64().unwrap());
        }
    }

    #[test]
    fn first_progression() {
        let v: serde_json::Value = serde_json::from_str(&progression_json(1).unwrap()).unwrap();
        assert_eq!(v["terms"], serde_json::json!(["49", "169", "289", "409", "529"]));
        assert!(progression_json(9).is_err());
    }
}
