//! Segre varieties, the reciprocity law, transversality verdicts, and
//! reflection sets on the built-in examples.
//!
//! Run with: cargo run --example segre_reflection

use crkit::corpus;
use crkit::gauss::GaussRat;
use crkit::manifold::{Manifold, PointC};
use crkit::poly::Poly;
use crkit::segre::{
    double_reflection_sample, first_reflection, reciprocity_sample, segre_transversal,
};

fn main() -> crkit::Result<()> {
    // q in S_pbar iff p in S_qbar, sampled over on-manifold pairs.
    for m in corpus::all() {
        let (pairs, holds) = reciprocity_sample(&m, 50, 3)?;
        println!("{:<12} reciprocity on {} pairs: {}", m.name(), pairs, holds);
    }

    // Transversality of the Segre family at the base point.
    for g in [
        corpus::heisenberg2(),
        corpus::product_c3(),
        corpus::c3_remark(),
        corpus::c4_prop1042(),
        corpus::leviflat(),
    ] {
        let p = g.base_point.clone().unwrap();
        let r = segre_transversal(&g, &p, 3, 16)?;
        println!(
            "{:<12} transversality: {} (certified: {}, k = {})",
            g.name,
            r.verdict.as_str(),
            r.certified,
            r.k
        );
    }

    // Reflection of points of the product: the flat direction z2 never
    // enters the generators.
    let product = corpus::product_c3();
    let pts: Vec<PointC> = (1..=3i64)
        .map(|t| {
            PointC::new(vec![
                GaussRat::from_int(t),
                GaussRat::from_int(t + 1),
                GaussRat::from_fracs((t, 1), (t * t, 2)),
            ])
        })
        .collect();
    let refl = first_reflection(&Manifold::Graph(product.clone()), &pts, None, 3)?;
    println!("reflection of three product points:");
    for gen in &refl.ideal.gens {
        println!("  {} = 0 (uses z2: {})", gen, gen.uses_var(1));
    }
    println!("  dimension estimate: {:?}", refl.dim_estimate);

    // Double reflection of the map (w, 0, z) from the Heisenberg into the
    // product: the missed flat slot keeps a positive-dimensional set.
    let h = corpus::heisenberg2();
    let f = vec![
        Poly::var(&h.ctx, 0),
        Poly::zero(&h.ctx),
        Poly::var(&h.ctx, 1),
    ];
    let rep = double_reflection_sample(
        &h,
        &product,
        &f,
        &PointC::origin(2),
        &PointC::origin(2),
        4,
        3,
    )?;
    println!(
        "double reflection of (w, 0, z): dim {:?}, stabilized {}",
        rep.dim_estimate, rep.stabilized
    );
    Ok(())
}
