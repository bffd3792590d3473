//! The exact-arithmetic substrate: sparse polynomials over Q(i),
//! Buchberger bases with a degree cap, elimination, and membership.
//!
//! Run with: cargo run --example groebner_membership

use crkit::ideal::{eliminate, groebner, ideal_member, Ideal, MonomialOrder};
use crkit::parse::parse_poly;
use crkit::vars::VarContext;

fn main() -> crkit::Result<()> {
    // Eliminating t from x = t^2, y = t^3 recovers the cusp.
    let ctx = VarContext::holomorphic(&["t", "x", "y"]);
    let gens = vec![
        parse_poly("x - t^2", &ctx)?,
        parse_poly("y - t^3", &ctx)?,
    ];
    let ideal = Ideal::new(ctx.clone(), gens);
    let (cusp, exact) = eliminate(&ideal, &[0], 16)?;
    println!("eliminating t (exact: {}):", exact);
    for g in &cusp.gens {
        println!("  {} = 0", g);
    }

    // Membership against a complete basis decides exactly.
    let gb = groebner(&ideal, MonomialOrder::GrLex, 16);
    println!("basis complete: {}, {} elements", gb.complete, gb.polys.len());
    let inside = parse_poly("y^2 - x^3", &ctx)?;
    let outside = parse_poly("x*y - 1", &ctx)?;
    println!("y^2 - x^3 in the ideal: {}", ideal_member(&inside, &gb).as_str());
    println!("x*y - 1  in the ideal: {}", ideal_member(&outside, &gb).as_str());

    // Gaussian-rational coefficients are first-class.
    let pctx = VarContext::holomorphic(&["z", "w"]);
    let p = parse_poly("(1/2+1/2i)*z^2*w - i*w + 3", &pctx)?;
    let q = parse_poly("z - (2-i)", &pctx)?;
    println!("p       = {}", p);
    println!("p * q   = {}", p.mul(&q));
    println!("p mod 3 terms = {}", p.clone().truncate(2));
    Ok(())
}
