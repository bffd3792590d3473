//! Truncated-series transcendence machinery: dependence certificates,
//! the iterated-sine family, and the perturbation construction that
//! saturates the kappa bound.
//!
//! Run with: cargo run --example transcendence_tour

use crkit::corpus;
use crkit::transcendence::{
    check_maps_into, dependence_search, iterated_sin_family, perturbation_builder,
    trdeg_estimate, trdeg_inequality_check, SeriesMap,
};
use crkit::manifold::Manifold;

fn main() -> crkit::Result<()> {
    // The cusp t -> (t^2, t^3) satisfies x1^3 = x2^2.
    let cusp = SeriesMap::polynomial(1, &["z1^2", "z1^3"], 10)?;
    if let Some(cert) = dependence_search(&cusp.components, 4, 4, 10)? {
        println!(
            "cusp relation: {} = 0 (exact: {}, checked to order {})",
            cert.poly, cert.exact, cert.residual_order
        );
    }

    // sin and sin(sin) look algebraically independent through order 12
    // within a (3, 3) degree box; the advisory reminds that this is
    // bounded evidence, not proof.
    let family = iterated_sin_family(2, 32)?;
    let rep = trdeg_estimate(&family, 3, 3, 12)?;
    println!(
        "iterated sine family: estimate {}, independent {:?}",
        rep.estimate, rep.independent
    );
    if let Some(note) = &rep.advisory {
        println!("  advisory: {}", note);
    }

    // Maps into: the bent embedding keeps the product inside itself.
    let product = corpus::product_c3();
    let bend = SeriesMap::polynomial(3, &["z1", "z2 + z2^2", "z3"], 10)?;
    let mi = check_maps_into(&bend, &product, &Manifold::Graph(product.clone()), 10)?;
    println!("(z1, z2 + z2^2, z3) maps the product into itself: {}", mi.holds);

    // Perturbing the flat slot with sin makes one component transcendental
    // over the rest, which is exactly what kappa = 1 allows.
    let id3 = SeriesMap::identity(3, 16);
    let perturbed = perturbation_builder(&id3, &[1], 1)?;
    let r = trdeg_inequality_check(&perturbed, &product, &product, 3, 3, 16, 7)?;
    println!(
        "perturbed identity on the product: estimate {} <= kappa {} holds: {}",
        r.estimate, r.kappa, r.holds
    );
    Ok(())
}
