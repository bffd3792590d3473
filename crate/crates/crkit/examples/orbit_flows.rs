//! Orbit dimensions two ways: symbolically through iterated Lie brackets
//! and numerically by integrating concatenated flows and ranking the
//! endpoint Jacobian.
//!
//! Run with: cargo run --example orbit_flows

use crkit::corpus;
use crkit::cr_fields::{cr_vector_fields, lie_saturation, FieldKind, VectorField};
use crkit::flows::{orbit_dim_numeric, FlowConfig, C64};
use crkit::poly::Poly;
use crkit::vars::VarContext;

fn main() -> crkit::Result<()> {
    let cfg = FlowConfig::default();

    // The classic model: d/dx and d/dy + x d/dz fill all of R^3 even
    // though only two fields are given.
    let ctx = VarContext::holomorphic(&["x", "y", "z"]);
    let mk = |coeffs| VectorField { name: "X".into(), kind: FieldKind::Hol, coeffs };
    let l1 = mk(vec![Poly::one(&ctx), Poly::zero(&ctx), Poly::zero(&ctx)]);
    let l2 = mk(vec![Poly::zero(&ctx), Poly::one(&ctx), Poly::var(&ctx, 0)]);
    let zero3 = [C64::new(0.0, 0.0); 3];
    let dim = orbit_dim_numeric(&[l1, l2], &zero3, &cfg, 1)?;
    println!("model system: numeric orbit dimension {}", dim);

    // Corpus manifolds: the flow orbit of the CR fields matches the
    // bracket span, including the degree-six directions of the C^4 model.
    for m in corpus::all() {
        let p = m.base_point().cloned().unwrap();
        let lie = lie_saturation(&m, &p, None, 5)?;
        let basis = cr_vector_fields(&m, 5)?;
        let mut fields = basis.l_fields.clone();
        fields.extend(basis.lbar_fields.clone());
        let state: Vec<C64> = p
            .complexified()
            .iter()
            .map(|g| {
                let (re, im) = g.to_f64();
                C64::new(re, im)
            })
            .collect();
        let dim = orbit_dim_numeric(&fields, &state, &cfg, 5)?;
        println!(
            "{:<12} bracket span {}, numeric orbit {}, minimal: {}",
            m.name(),
            lie.span_rank_at_p,
            dim,
            matches!(
                lie.verdict,
                crkit::cr_fields::MinimalityVerdict::Minimal
            )
        );
    }
    Ok(())
}
