//! The tube over the Whitney umbrella x3 x1^2 = x2^2 is regular away
//! from x1 = x2 = 0 and singular on it. This walks both strata, solves
//! the set into a local graph at a regular point, and checks minimality.
//!
//! Run with: cargo run --example whitney_strata

use crkit::corpus;
use crkit::cr_fields::lie_saturation;
use crkit::gauss::GaussRat;
use crkit::manifold::{Manifold, PointC};

fn main() -> crkit::Result<()> {
    let w = corpus::whitney_tube();
    println!("{}: implicit, n = {}", w.name, w.n);
    println!("  generator: {} = 0", w.gens[0]);

    // Points with x1 = x2 = 0 lie on the set for every x3, y1, y2, y3.
    let singular = PointC::new(vec![
        GaussRat::from_ints(0, 2),
        GaussRat::from_ints(0, -1),
        GaussRat::from_ints(3, 1),
    ]);
    // Points with x1 != 0 force x3 = (x2/x1)^2.
    let regular = PointC::new(vec![
        GaussRat::from_int(2),
        GaussRat::from_int(3),
        GaussRat::from_fracs((9, 4), (1, 1)),
    ]);
    for (label, p) in [("singular", &singular), ("regular", &regular)] {
        println!(
            "  {:?} on set: {}, regular: {}",
            label,
            w.contains(p),
            w.regular_at(p, 7)?
        );
    }

    // Genericity data at the interior base point (2, 2, 1).
    let base = w.base_point.clone().unwrap();
    let (generic, d1, d) = w.cr_generic_at(&base, 7)?;
    println!(
        "at base {:?}: cr rank {}, codimension {}, CR-generic: {}",
        base.coords.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        d1,
        d,
        generic
    );

    // Power-series graph presentation centered at the base point.
    let g = w.graph_solve(&base, 4)?;
    println!(
        "local graph at base: m = {}, series order {:?}",
        g.m, g.series_order
    );
    for q in &g.q {
        println!("  zb = {} + ...", q.clone().truncate(2));
    }

    let lie = lie_saturation(&Manifold::Implicit(w), &base, None, 7)?;
    println!(
        "minimality at base: {} (depth {})",
        lie.verdict.as_str(),
        lie.depth_reached
    );
    Ok(())
}
