//! Built-in example manifolds used by tests and the `corpus` subcommand.

use crate::error::Result;
use crate::gauss::GaussRat;
use crate::manifold::{GraphManifold, ImplicitManifold, Manifold, PointC};
use crate::parse::parse_poly;
use crate::vars::VarContext;

/// Hypersurface in C²: Im z2 = |z1|², the standard minimal model.
pub fn heisenberg2() -> GraphManifold {
    let ctx = VarContext::paired(2);
    let q = parse_poly("z2 - i*z1*zb1", &ctx).unwrap();
    GraphManifold::new("heisenberg2", 2, 1, vec![q], Some(PointC::origin(2))).unwrap()
}

/// Product of a line with heisenberg2 inside C³: the second CR
/// direction v never enters the equation.
pub fn product_c3() -> GraphManifold {
    let ctx = VarContext::paired(3);
    let q = parse_poly("z3 - i*z1*zb1", &ctx).unwrap();
    GraphManifold::new("productC3", 3, 2, vec![q], Some(PointC::origin(3))).unwrap()
}

/// Tube over the Whitney umbrella in C³: x3·x1² = x2², written with
/// x_j = (z_j + zb_j)/2. Regular away from x1 = x2 = 0.
pub fn whitney_tube() -> ImplicitManifold {
    let ctx = VarContext::paired(3);
    let p = parse_poly(
        "(1/8)*z3*z1^2 + (1/4)*z3*z1*zb1 + (1/8)*z3*zb1^2 + (1/8)*zb3*z1^2 + (1/4)*zb3*z1*zb1 + (1/8)*zb3*zb1^2 - (1/4)*z2^2 - (1/2)*z2*zb2 - (1/4)*zb2^2",
        &ctx,
    )
    .unwrap();
    let base = PointC::new(vec![
        GaussRat::from_int(2),
        GaussRat::from_int(2),
        GaussRat::from_int(1),
    ]);
    ImplicitManifold::new("whitney_tube", 3, vec![p], Some(base)).unwrap()
}

/// Codimension-2 model in C³: z̄1 = z1 − i w w̄, z̄2 = z2 − i w² w̄²
/// (variables renamed w = z1, block = z2, z3).
pub fn c3_remark() -> GraphManifold {
    let ctx = VarContext::paired(3);
    let q1 = parse_poly("z2 - i*z1*zb1", &ctx).unwrap();
    let q2 = parse_poly("z3 - i*z1^2*zb1^2", &ctx).unwrap();
    GraphManifold::new("c3_remark", 3, 1, vec![q1, q2], Some(PointC::origin(3))).unwrap()
}

/// Codimension-3 model in C⁴, minimal at 0 but nowhere Segre-transversal.
pub fn c4_prop1042() -> GraphManifold {
    let ctx = VarContext::paired(4);
    let q1 = parse_poly("z2 - i*z1*zb1", &ctx).unwrap();
    let q2 = parse_poly("z3 - i*z1^3*zb1 - i*z1*zb1^3", &ctx).unwrap();
    let q3 = parse_poly("z4 - i*z1^3*zb1^3", &ctx).unwrap();
    GraphManifold::new("c4_prop1042", 4, 1, vec![q1, q2, q3], Some(PointC::origin(4))).unwrap()
}

/// Levi-flat hyperplane field in C²: Im z2 = 0, foliated by copies of C.
pub fn leviflat() -> GraphManifold {
    let ctx = VarContext::paired(2);
    let q = parse_poly("z2", &ctx).unwrap();
    GraphManifold::new("leviflat", 2, 1, vec![q], Some(PointC::origin(2))).unwrap()
}

pub const NAMES: [&str; 6] = [
    "heisenberg2",
    "productC3",
    "whitney_tube",
    "c3_remark",
    "c4_prop1042",
    "leviflat",
];

pub fn all() -> Vec<Manifold> {
    vec![
        Manifold::Graph(heisenberg2()),
        Manifold::Graph(product_c3()),
        Manifold::Implicit(whitney_tube()),
        Manifold::Graph(c3_remark()),
        Manifold::Graph(c4_prop1042()),
        Manifold::Graph(leviflat()),
    ]
}

pub fn by_name(name: &str) -> Option<Manifold> {
    match name {
        "heisenberg2" => Some(Manifold::Graph(heisenberg2())),
        "productC3" => Some(Manifold::Graph(product_c3())),
        "whitney_tube" => Some(Manifold::Implicit(whitney_tube())),
        "c3_remark" => Some(Manifold::Graph(c3_remark())),
        "c4_prop1042" => Some(Manifold::Graph(c4_prop1042())),
        "leviflat" => Some(Manifold::Graph(leviflat())),
        _ => None,
    }
}

/// The graph members all pass the reality test.
pub fn check_reality() -> Result<bool> {
    for m in all() {
        if let Manifold::Graph(g) = m {
            if !g.verify_reality()? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_graph_members_real() {
        assert!(check_reality().unwrap());
    }

    #[test]
    fn base_points_on_sets() {
        for m in all() {
            let p = m.base_point().cloned().unwrap();
            assert!(m.contains(&p), "{}", m.name());
        }
    }

    #[test]
    fn lookup_by_name() {
        for name in NAMES {
            assert!(by_name(name).is_some());
        }
        assert!(by_name("nope").is_none());
    }
}
