//! The degeneracy invariant kappa counts flat directions: kappa + chi = n
//! always, kappa <= m, and kappa survives linear changes of coordinates.
//! When the flat directions are spanned by constant vectors, the set
//! literally splits off a C^kappa factor.
//!
//! Run with: cargo run --example kappa_straighten

use crkit::corpus;
use crkit::cr_fields::{kappa, straighten_linear};
use crkit::gauss::GaussRat;

fn main() -> crkit::Result<()> {
    for g in [
        corpus::heisenberg2(),
        corpus::product_c3(),
        corpus::c3_remark(),
        corpus::c4_prop1042(),
        corpus::leviflat(),
    ] {
        let r = kappa(&g, 1)?;
        println!(
            "{:<12} kappa = {}, chi = {} (n = {}), witness minor: {}",
            g.name,
            r.kappa,
            r.chi,
            g.n,
            r.witness_minor
                .as_ref()
                .map(|p| p.to_string())
                .unwrap_or_else(|| "-".into())
        );
    }

    // The product C x heisenberg straightens to the plain Heisenberg.
    let product = corpus::product_c3();
    let rep = straighten_linear(&product, 1)?;
    println!(
        "straighten {}: kappa {} -> {}",
        product.name, rep.kappa_before, rep.kappa_after
    );
    for step in &rep.steps {
        let dir: Vec<String> = step.direction.iter().map(|c| c.to_string()).collect();
        println!("  dropped {} along ({})", step.dropped, dir.join(", "));
    }
    if let Some(out) = &rep.result {
        println!("  remaining core: {} with n = {}, q = {}", out.name, out.n, out.q[0]);
    }

    // kappa is blind to invertible block-linear changes.
    let a = vec![
        vec![GaussRat::from_int(1), GaussRat::from_ints(2, 1)],
        vec![GaussRat::zero(), GaussRat::from_int(1)],
    ];
    let b = vec![vec![GaussRat::from_ints(0, 3)]];
    let changed = product.linear_change(&a, &b)?;
    let r = kappa(&changed, 1)?;
    println!(
        "after a shear of the CR block: kappa = {}, chi = {}",
        r.kappa, r.chi
    );
    Ok(())
}
