//! Build the Heisenberg hypersurface Im z2 = |z1|^2 / 2 from a single
//! equation and read off its basic CR data.
//!
//! Run with: cargo run --example heisenberg_tour

use crkit::cr_fields::{cr_vector_fields, lie_saturation};
use crkit::gauss::GaussRat;
use crkit::manifold::{GraphManifold, Manifold, PointC};
use crkit::parse::parse_poly;
use crkit::segre::{segre_variety, segre_contains};
use crkit::vars::VarContext;

fn main() -> crkit::Result<()> {
    // Graph form: zb2 = z2 - i z1 zb1. The conjugate of the equation is
    // implied, which is what makes the set real.
    let ctx = VarContext::paired(2);
    let q = parse_poly("z2 - i*z1*zb1", &ctx)?;
    let g = GraphManifold::new("heisenberg", 2, 1, vec![q], Some(PointC::origin(2)))?;
    println!(
        "{}: n = {}, CR dimension m = {}, codimension d = {}",
        g.name, g.n, g.m, g.d
    );
    assert!(g.verify_reality()?);
    let m = Manifold::Graph(g);

    // The tangential CR fields and their conjugates.
    let basis = cr_vector_fields(&m, 1)?;
    for f in basis.l_fields.iter().chain(&basis.lbar_fields) {
        let coeffs: Vec<String> = f.coeffs.iter().map(|c| c.to_string()).collect();
        println!("  {} = [{}]", f.name, coeffs.join(", "));
    }

    // Segre variety of the point (1, i): one complex line.
    let p = PointC::new(vec![GaussRat::from_int(1), GaussRat::i()]);
    let sv = segre_variety(&m, &p)?;
    println!("Segre variety at (1, i):");
    for gen in &sv.ideal.gens {
        println!("  {} = 0", gen);
    }
    println!(
        "origin on that variety: {}",
        segre_contains(&m, &PointC::origin(2), &p)
    );

    // One bracket of L and Lbar already spans the missing direction.
    let lie = lie_saturation(&m, &PointC::origin(2), None, 1)?;
    println!(
        "Lie span at 0: {} of {} real directions, depth {} -> {}",
        lie.span_rank_at_p,
        lie.expected,
        lie.depth_reached,
        lie.verdict.as_str()
    );
    Ok(())
}
