//! Manifold and series specs as JSON: the same format the crkit binary
//! reads. Builds a custom codimension-2 set in code, round-trips it
//! through the spec format, and runs the analyzer pieces on the result.
//!
//! Run with: cargo run --example spec_roundtrip

use crkit::cr_fields::{kappa, lie_saturation};
use crkit::manifold::{GraphManifold, Manifold, PointC};
use crkit::parse::parse_poly;
use crkit::spec_io::{manifold_from_json, manifold_to_json, series_from_json, series_to_json};
use crkit::transcendence::SeriesMap;
use crkit::vars::VarContext;

fn main() -> crkit::Result<()> {
    // zb2 = z2 - i w wb, zb3 = z3 - 2i w^2 wb^2 over w = z1.
    let ctx = VarContext::paired(3);
    let q1 = parse_poly("z2 - i*z1*zb1", &ctx)?;
    let q2 = parse_poly("z3 - 2*i*z1^2*zb1^2", &ctx)?;
    let g = GraphManifold::new("custom", 3, 1, vec![q1, q2], Some(PointC::origin(3)))?;
    let m = Manifold::Graph(g);

    let spec = serde_json::to_string_pretty(&manifold_to_json(&m)).unwrap();
    println!("spec file:\n{}\n", spec);

    let back = manifold_from_json(&spec)?;
    let gb = match &back {
        Manifold::Graph(g) => g,
        _ => unreachable!(),
    };
    let k = kappa(gb, 1)?;
    let lie = lie_saturation(&back, &PointC::origin(3), None, 1)?;
    println!(
        "reparsed {}: kappa = {}, chi = {}, minimality: {}",
        back.name(),
        k.kappa,
        k.chi,
        lie.verdict.as_str()
    );

    // Series maps use exponent-vector/coefficient pairs.
    let f = SeriesMap::polynomial(2, &["z1 + i*z2^2", "z2"], 6)?;
    let text = serde_json::to_string(&series_to_json(&f)).unwrap();
    println!("\nseries file: {}", text);
    let f2 = series_from_json(&text)?;
    assert_eq!(f.components, f2.components);
    println!("round-trip preserved all {} components", f2.n_out);
    Ok(())
}
