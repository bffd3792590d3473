//! JSON input and output: manifold specs, series maps, point lists, and the
//! small helpers the CLI needs for canonical reports.
//!
//! Coefficients are exact: JSON integers and rational strings ("3/2", "-1/4")
//! are accepted, floating-point numbers are rejected outright.

use std::sync::Arc;

use num::BigRational;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{CrError, Result};
use crate::gauss::{parse_rational, GaussRat};
use crate::manifold::{GraphManifold, ImplicitManifold, Manifold, PointC};
use crate::parse::parse_poly;
use crate::poly::Poly;
use crate::transcendence::SeriesMap;
use crate::vars::VarContext;

fn bad(msg: impl Into<String>) -> CrError {
    CrError::BadInput(msg.into())
}

fn rational_from_value(v: &Value, what: &str) -> Result<BigRational> {
    match v {
        Value::Number(num) => {
            if let Some(i) = num.as_i64() {
                Ok(BigRational::from_integer(i.into()))
            } else {
                Err(bad(format!(
                    "{}: floating-point coefficients are not accepted; write integers or rational strings like \"3/2\"",
                    what
                )))
            }
        }
        Value::String(s) => parse_rational(s)
            .ok_or_else(|| bad(format!("{}: cannot parse rational {:?}", what, s))),
        other => Err(bad(format!("{}: expected a number or string, got {}", what, other))),
    }
}

fn gauss_from_value(v: &Value, what: &str) -> Result<GaussRat> {
    let arr = v
        .as_array()
        .ok_or_else(|| bad(format!("{}: expected [re, im]", what)))?;
    if arr.len() != 2 {
        return Err(bad(format!("{}: expected [re, im], got {} entries", what, arr.len())));
    }
    Ok(GaussRat::new(
        rational_from_value(&arr[0], what)?,
        rational_from_value(&arr[1], what)?,
    ))
}

fn point_from_value(v: &Value, n: usize, what: &str) -> Result<PointC> {
    let arr = v
        .as_array()
        .ok_or_else(|| bad(format!("{}: expected a list of [re, im] pairs", what)))?;
    if arr.len() != n {
        return Err(bad(format!("{}: expected {} coordinates, got {}", what, n, arr.len())));
    }
    let coords = arr
        .iter()
        .enumerate()
        .map(|(i, c)| gauss_from_value(c, &format!("{} coordinate {}", what, i + 1)))
        .collect::<Result<Vec<_>>>()?;
    Ok(PointC::new(coords))
}

fn str_field<'a>(obj: &'a serde_json::Map<String, Value>, key: &str) -> Result<&'a str> {
    obj.get(key)
        .and_then(|v| v.as_str())
        .ok_or_else(|| bad(format!("missing or non-string field {:?}", key)))
}

fn usize_field(obj: &serde_json::Map<String, Value>, key: &str) -> Result<usize> {
    obj.get(key)
        .and_then(|v| v.as_u64())
        .map(|v| v as usize)
        .ok_or_else(|| bad(format!("missing or non-integer field {:?}", key)))
}

/// Parse a manifold spec:
/// `{"name", "n", "form": "implicit"|"graph", "m"?, "equations": [...], "base_point"?}`.
/// Equations are poly-strings over the paired variables z1..zn, zb1..zbn; in
/// graph form they are the right-hand sides Q_l of zb_{m+l} = Q_l.
pub fn manifold_from_json(text: &str) -> Result<Manifold> {
    let v: Value = serde_json::from_str(text)?;
    let obj = v
        .as_object()
        .ok_or_else(|| bad("manifold spec must be a JSON object"))?;
    let name = str_field(obj, "name")?;
    let n = usize_field(obj, "n")?;
    if n == 0 {
        return Err(bad("n must be positive"));
    }
    let form = str_field(obj, "form")?;
    let eq_vals = obj
        .get("equations")
        .and_then(|v| v.as_array())
        .ok_or_else(|| bad("missing equation list"))?;
    let ctx = VarContext::paired(n);
    let equations = eq_vals
        .iter()
        .map(|e| {
            let s = e
                .as_str()
                .ok_or_else(|| bad("equations must be poly-strings"))?;
            parse_poly(s, &ctx)
        })
        .collect::<Result<Vec<Poly>>>()?;
    let base_point = obj
        .get("base_point")
        .map(|v| point_from_value(v, n, "base_point"))
        .transpose()?;
    match form {
        "implicit" => Ok(Manifold::Implicit(ImplicitManifold::new(
            name, n, equations, base_point,
        )?)),
        "graph" => {
            let m = usize_field(obj, "m")?;
            Ok(Manifold::Graph(GraphManifold::new(
                name, n, m, equations, base_point,
            )?))
        }
        other => Err(bad(format!("unknown form {:?}; use \"implicit\" or \"graph\"", other))),
    }
}

/// Parse a series map:
/// `{"n_in", "n_out", "order", "components": [[[expo...], [re, im]], ...]}`.
pub fn series_from_json(text: &str) -> Result<SeriesMap> {
    let v: Value = serde_json::from_str(text)?;
    let obj = v
        .as_object()
        .ok_or_else(|| bad("series spec must be a JSON object"))?;
    let n_in = usize_field(obj, "n_in")?;
    let n_out = usize_field(obj, "n_out")?;
    let order = usize_field(obj, "order")? as u32;
    if n_in == 0 {
        return Err(bad("n_in must be positive"));
    }
    let comp_vals = obj
        .get("components")
        .and_then(|v| v.as_array())
        .ok_or_else(|| bad("missing component list"))?;
    if comp_vals.len() != n_out {
        return Err(bad(format!(
            "n_out = {} but {} components given",
            n_out,
            comp_vals.len()
        )));
    }
    let names: Vec<String> = (1..=n_in).map(|i| format!("z{}", i)).collect();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let ctx = VarContext::holomorphic(&refs);
    let mut components = Vec::with_capacity(n_out);
    for (ci, cv) in comp_vals.iter().enumerate() {
        let terms = cv
            .as_array()
            .ok_or_else(|| bad(format!("component {} must be a term list", ci + 1)))?;
        let mut p = Poly::zero(&ctx);
        for t in terms {
            let pair = t
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| bad("each term must be [[expo...], [re, im]]"))?;
            let expo_arr = pair[0]
                .as_array()
                .ok_or_else(|| bad("term exponent must be a list"))?;
            if expo_arr.len() != n_in {
                return Err(bad(format!(
                    "term exponent has {} entries, expected {}",
                    expo_arr.len(),
                    n_in
                )));
            }
            let expo = expo_arr
                .iter()
                .map(|e| {
                    e.as_u64()
                        .map(|v| v as u32)
                        .ok_or_else(|| bad("exponents must be nonnegative integers"))
                })
                .collect::<Result<Vec<u32>>>()?;
            let coeff = gauss_from_value(&pair[1], &format!("component {}", ci + 1))?;
            p = p.add(&Poly::monomial(&ctx, expo, coeff));
        }
        components.push(p);
    }
    SeriesMap::new(n_in, order, components)
}

fn rat_str(r: &BigRational) -> String {
    r.to_string()
}

/// Canonical series JSON (rational coefficients as strings, terms in the
/// polynomial's own deterministic order).
pub fn series_to_json(map: &SeriesMap) -> Value {
    let components: Vec<Value> = map
        .components
        .iter()
        .map(|p| {
            let terms: Vec<Value> = p
                .terms()
                .map(|(e, c)| {
                    serde_json::json!([e, [rat_str(&c.re), rat_str(&c.im)]])
                })
                .collect();
            Value::Array(terms)
        })
        .collect();
    serde_json::json!({
        "n_in": map.n_in,
        "n_out": map.n_out,
        "order": map.order,
        "components": components,
    })
}

fn scan_max_var(s: &str) -> usize {
    let bytes = s.as_bytes();
    let mut best = 0usize;
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'z' && i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
            let mut j = i + 1;
            let mut v = 0usize;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                v = v * 10 + (bytes[j] - b'0') as usize;
                j += 1;
            }
            best = best.max(v);
            i = j;
        } else {
            i += 1;
        }
    }
    best
}

/// Resolve a series argument: the builtins `sin`, `exp`, and
/// `polynomial:<p1,p2,...>` (variables z1, z2, ...), or a JSON file path.
pub fn load_series(arg: &str, order: u32) -> Result<SeriesMap> {
    match arg {
        "sin" => return Ok(SeriesMap::sin(order)),
        "exp" => return Ok(SeriesMap::exp(order)),
        _ => {}
    }
    if let Some(rest) = arg.strip_prefix("polynomial:") {
        let parts: Vec<&str> = rest.split(',').map(|s| s.trim()).collect();
        if parts.iter().any(|p| p.is_empty()) {
            return Err(bad("empty component in polynomial series"));
        }
        let n_in = scan_max_var(rest).max(1);
        return SeriesMap::polynomial(n_in, &parts, order);
    }
    let text = std::fs::read_to_string(arg)?;
    series_from_json(&text)
}

/// `[[ [re,im], ... ], ...]`: a list of points with n coordinates each.
pub fn points_from_json(text: &str, n: usize) -> Result<Vec<PointC>> {
    let v: Value = serde_json::from_str(text)?;
    let arr = v
        .as_array()
        .ok_or_else(|| bad("points file must hold a JSON list of points"))?;
    arr.iter()
        .enumerate()
        .map(|(i, p)| point_from_value(p, n, &format!("point {}", i + 1)))
        .collect()
}

/// Comma-separated Gaussian rationals ("0,i", "1/2,-1+i") into a point.
pub fn parse_point_arg(s: &str, n: usize) -> Result<PointC> {
    let parts: Vec<&str> = s.split(',').map(|p| p.trim()).collect();
    if parts.len() != n {
        return Err(bad(format!(
            "expected {} comma-separated coordinates, got {}",
            n,
            parts.len()
        )));
    }
    let ctx = VarContext::holomorphic(&["t"]);
    let mut coords = Vec::with_capacity(n);
    for p in &parts {
        let poly = parse_poly(p, &ctx)?;
        if poly.total_degree() > 0 {
            return Err(bad(format!("coordinate {:?} is not a constant", p)));
        }
        coords.push(poly.constant_term());
    }
    Ok(PointC::new(coords))
}

pub fn digest_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    format!("{:x}", h.finalize())
}

/// Spec-format coordinate pair [re, im] with rational strings; feeds back
/// through `manifold_from_json` unchanged.
fn gauss_pair(g: &GaussRat) -> Value {
    Value::Array(vec![
        Value::String(format!("{}", g.re)),
        Value::String(format!("{}", g.im)),
    ])
}

/// Serialize a manifold into the spec format `manifold_from_json` accepts.
pub fn manifold_to_json(m: &Manifold) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("name".into(), Value::String(m.name().to_string()));
    obj.insert("n".into(), Value::Number(m.n().into()));
    let (form, equations, base) = match m {
        Manifold::Graph(g) => {
            obj.insert("m".into(), Value::Number(g.m.into()));
            ("graph", &g.q, g.base_point.as_ref())
        }
        Manifold::Implicit(im) => ("implicit", &im.gens, im.base_point.as_ref()),
    };
    obj.insert("form".into(), Value::String(form.into()));
    obj.insert(
        "equations".into(),
        Value::Array(equations.iter().map(poly_value).collect()),
    );
    if let Some(p) = base {
        obj.insert(
            "base_point".into(),
            Value::Array(p.coords.iter().map(gauss_pair).collect()),
        );
    }
    Value::Object(obj)
}

/// JSON value for a Gaussian rational (its canonical display string).
pub fn gauss_value(g: &GaussRat) -> Value {
    Value::String(format!("{}", g))
}

/// JSON value for a point (list of coordinate strings).
pub fn point_value(p: &PointC) -> Value {
    Value::Array(p.coords.iter().map(gauss_value).collect())
}

/// JSON value for a polynomial (display string).
pub fn poly_value(p: &Poly) -> Value {
    Value::String(format!("{}", p))
}

/// Shared context accessor for building manifold specs in code.
pub fn paired_ctx(n: usize) -> Arc<VarContext> {
    VarContext::paired(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifold_roundtrip_graph() {
        let text = r#"{
            "name": "heis",
            "n": 2,
            "form": "graph",
            "m": 1,
            "equations": ["z2 - i*z1*zb1"],
            "base_point": [[0, 0], [0, 0]]
        }"#;
        let m = manifold_from_json(text).unwrap();
        match m {
            Manifold::Graph(g) => {
                assert_eq!(g.n, 2);
                assert_eq!(g.m, 1);
                assert!(g.base_point.is_some());
            }
            _ => panic!("expected graph form"),
        }
    }

    #[test]
    fn manifold_rejects_floats() {
        let text = r#"{
            "name": "x",
            "n": 1,
            "form": "implicit",
            "equations": ["i*z1 - i*zb1"],
            "base_point": [[0.5, 0]]
        }"#;
        let err = manifold_from_json(text).unwrap_err();
        assert!(format!("{}", err).contains("floating-point"));
    }

    #[test]
    fn series_roundtrip() {
        let m = SeriesMap::polynomial(2, &["z1^2 + i*z2", "3/2*z1"], 7).unwrap();
        let js = serde_json::to_string(&series_to_json(&m)).unwrap();
        let back = series_from_json(&js).unwrap();
        assert_eq!(back.n_in, 2);
        assert_eq!(back.n_out, 2);
        assert_eq!(back.order, 7);
        assert_eq!(back.components[0], m.components[0]);
        assert_eq!(back.components[1], m.components[1]);
    }

    #[test]
    fn series_rejects_float_coefficients() {
        let text = r#"{"n_in":1,"n_out":1,"order":4,"components":[[[[1],[0.1,0]]]]}"#;
        assert!(series_from_json(text).is_err());
    }

    #[test]
    fn builtin_series_args() {
        assert_eq!(load_series("sin", 9).unwrap().components[0].total_degree(), 9);
        let p = load_series("polynomial:z1^2,z1*z3", 5).unwrap();
        assert_eq!(p.n_in, 3);
        assert_eq!(p.n_out, 2);
    }

    #[test]
    fn point_arg_parsing() {
        let p = parse_point_arg("1+i, 3/2", 2).unwrap();
        assert_eq!(p.coords[0], GaussRat::from_ints(1, 1));
        assert_eq!(p.coords[1], GaussRat::from_frac(3, 2));
        assert!(parse_point_arg("z1", 1).is_err());
    }

    #[test]
    fn builtin_manifolds_roundtrip_through_json() {
        for m in crate::corpus::all() {
            let text = serde_json::to_string(&manifold_to_json(&m)).unwrap();
            let back = manifold_from_json(&text).unwrap();
            assert_eq!(back.name(), m.name());
            assert_eq!(back.n(), m.n());
            let again = serde_json::to_string(&manifold_to_json(&back)).unwrap();
            assert_eq!(text, again);
        }
    }
}
