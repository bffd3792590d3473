//! Acceptance battery. Each test is one headline property of the toolkit
//! and prints a single pass/fail line under `cargo test --test acceptance`.

use std::process::Command;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde_json::Value;

use crkit::corpus;
use crkit::cr_fields::{
    cr_vector_fields, kappa, lie_saturation, tangency_check, tangent_hol_fields, FieldKind,
    MinimalityVerdict, VectorField,
};
use crkit::flows::{orbit_dim_numeric, FlowConfig, C64};
use crkit::gauss::GaussRat;
use crkit::ideal::Membership;
use crkit::manifold::{GraphManifold, Manifold, PointC};
use crkit::parse::parse_poly;
use crkit::poly::Poly;
use crkit::segre::{
    double_reflection_sample, first_reflection, reciprocity_sample, segre_transversal,
    TransversalVerdict,
};
use crkit::transcendence::{
    dependence_search, iterated_sin_family, perturbation_builder, trdeg_estimate,
    trdeg_inequality_check, DependenceCertificate, SeriesMap,
};
use crkit::vars::VarContext;

const SEED: u64 = 11;

fn complexified_c64(p: &PointC) -> Vec<C64> {
    p.complexified()
        .iter()
        .map(|g| {
            let (re, im) = g.to_f64();
            C64::new(re, im)
        })
        .collect()
}

/// 1. Tube over the Whitney umbrella: the singular stratum is exactly
///    x1 = x2 = 0, the CR fields are tangent, the set is minimal at the
///    interior base point, and no nonzero holomorphic polynomial field of
///    degree <= 3 is tangent.
#[test]
fn whitney_tube_stratification_minimality_and_nondegeneracy() {
    let w = corpus::whitney_tube();
    let m = Manifold::Implicit(w.clone());

    // 20 singular samples: x1 = x2 = 0, everything else free.
    for k in 0..20i64 {
        let p = PointC::new(vec![
            GaussRat::from_fracs((0, 1), (k, 3)),
            GaussRat::from_fracs((0, 1), (k - 7, 5)),
            GaussRat::from_fracs((k % 6 - 2, 1), (2 * k + 1, 7)),
        ]);
        assert!(w.contains(&p), "singular sample {} is on the tube", k);
        assert!(
            !w.regular_at(&p, SEED).unwrap(),
            "x1 = x2 = 0 must be singular (sample {})",
            k
        );
    }

    // 20 regular samples: x1 != 0 and x3 = (x2/x1)^2 solves the equation.
    for k in 0..20i64 {
        let x1 = k + 1;
        let x2 = k - 10;
        let p = PointC::new(vec![
            GaussRat::from_fracs((x1, 1), (1, 2)),
            GaussRat::from_fracs((x2, 1), (k, 7)),
            GaussRat::from_fracs((x2 * x2, x1 * x1), (-k, 3)),
        ]);
        assert!(w.contains(&p), "regular sample {} is on the tube", k);
        assert!(
            w.regular_at(&p, SEED).unwrap(),
            "x1 != 0 must be regular (sample {})",
            k
        );
    }

    // Both CR fields annihilate the defining function modulo the ideal.
    let basis = cr_vector_fields(&m, SEED).unwrap();
    assert_eq!(basis.m, 2);
    for f in basis.lbar_fields.iter().chain(&basis.l_fields) {
        assert_eq!(tangency_check(f, &w.gens, 10), Membership::Yes);
    }

    // Minimal at the regular base point (2, 2, 1), shallow saturation.
    let p = w.base_point.clone().unwrap();
    let lie = lie_saturation(&m, &p, None, SEED).unwrap();
    assert_eq!(lie.verdict, MinimalityVerdict::Minimal);
    assert!(lie.depth_reached <= 2, "depth {}", lie.depth_reached);

    // Algebraically nondegenerate: no tangent holomorphic field, deg <= 3.
    let (fields, complete) = tangent_hol_fields(&m, 3, SEED).unwrap();
    assert!(complete);
    assert!(fields.is_empty());
}

// Random genuine graph manifold: equations zb_{m+l} = z_{m+l} - i*phi_l
// with phi_l a swap-real polynomial in the CR block, so the set is a real
// submanifold with the origin on it.
fn random_graph_manifold(rng: &mut ChaCha12Rng, tag: usize) -> GraphManifold {
    let n = rng.gen_range(2..=4usize);
    let m = rng.gen_range(1..n);
    let d = n - m;
    let ctx = VarContext::paired(n);
    let mut qs = Vec::with_capacity(d);
    for l in 0..d {
        let mut q = Poly::var(&ctx, m + l);
        let terms = rng.gen_range(1..=3usize);
        for _ in 0..terms {
            // alpha, beta over the CR block w_1..w_m, total degree 1..=3.
            let deg = rng.gen_range(1..=3u32);
            let mut alpha = vec![0u32; 2 * n];
            let mut beta = vec![0u32; 2 * n];
            for _ in 0..deg {
                if rng.gen_bool(0.5) {
                    alpha[rng.gen_range(0..m)] += 1;
                } else {
                    beta[n + rng.gen_range(0..m)] += 1;
                }
            }
            let c = GaussRat::from_ints(rng.gen_range(-2..=2), rng.gen_range(-2..=2));
            if c.is_zero() {
                continue;
            }
            // c * w^alpha wb^beta + conj(c) * w^beta wb^alpha is swap-real.
            let mut swapped_a = vec![0u32; 2 * n];
            let mut swapped_b = vec![0u32; 2 * n];
            swapped_a[n..].copy_from_slice(&alpha[..n]);
            swapped_a[..n].copy_from_slice(&alpha[n..]);
            swapped_b[n..].copy_from_slice(&beta[..n]);
            swapped_b[..n].copy_from_slice(&beta[n..]);
            let mono = |a: &[u32], b: &[u32]| -> Vec<u32> {
                a.iter().zip(b).map(|(x, y)| x + y).collect()
            };
            let phi = Poly::monomial(&ctx, mono(&alpha, &beta), c.clone())
                .add(&Poly::monomial(&ctx, mono(&swapped_b, &swapped_a), c.conj()));
            q = q.sub(&phi.scale(&GaussRat::i()));
        }
        qs.push(q);
    }
    let g = GraphManifold::new(
        &format!("random{}", tag),
        n,
        m,
        qs,
        Some(PointC::origin(n)),
    )
    .unwrap();
    assert!(g.verify_reality().unwrap(), "generator must emit real sets");
    g
}

fn unit_triangular(rng: &mut ChaCha12Rng, size: usize, upper: bool) -> Vec<Vec<GaussRat>> {
    let mut mat = vec![vec![GaussRat::zero(); size]; size];
    for (r, row) in mat.iter_mut().enumerate() {
        for (c, entry) in row.iter_mut().enumerate() {
            if c == r {
                *entry = GaussRat::one();
            } else if (upper && c > r) || (!upper && c < r) {
                *entry = GaussRat::from_ints(rng.gen_range(-2..=2), rng.gen_range(-1..=1));
            }
        }
    }
    mat
}

/// 2. The rank identity kappa + chi = n with kappa <= m, on the built-in
///    examples and on randomized polynomial graphs, and invariance of kappa
///    under invertible linear changes of the two variable blocks.
#[test]
fn kappa_plus_chi_equals_n_and_kappa_bounded_by_m() {
    // Built-in examples; the implicit tube enters through its local graph
    // presentation at the base point.
    for m in corpus::all() {
        let (g, n) = match &m {
            Manifold::Graph(g) => (g.clone(), g.n),
            Manifold::Implicit(im) => {
                let p = im.base_point.clone().unwrap();
                (im.graph_solve(&p, 6).unwrap(), im.n)
            }
        };
        let r = kappa(&g, SEED).unwrap();
        assert_eq!(r.kappa + r.chi, n, "{}: kappa + chi != n", m.name());
        assert!(r.kappa <= g.m, "{}: kappa > m", m.name());
        if g.series_order.is_some() {
            assert_eq!(r.stabilized, Some(true), "{}: series kappa unstable", m.name());
        }
    }

    // 25 random graphs, 5 random block-linear changes each.
    let mut rng = ChaCha12Rng::seed_from_u64(0x2b0b);
    for tag in 0..25 {
        let g = random_graph_manifold(&mut rng, tag);
        let r = kappa(&g, SEED).unwrap();
        assert_eq!(r.kappa + r.chi, g.n, "{}: kappa + chi != n", g.name);
        assert!(r.kappa <= g.m, "{}: kappa > m", g.name);
        for change in 0..5 {
            let a = unit_triangular(&mut rng, g.m, change % 2 == 0);
            let b = unit_triangular(&mut rng, g.d, change % 2 == 1);
            let h = g.linear_change(&a, &b).unwrap();
            let rh = kappa(&h, SEED).unwrap();
            assert_eq!(
                rh.kappa, r.kappa,
                "{}: kappa changed under a linear change",
                g.name
            );
            assert_eq!(rh.kappa + rh.chi, h.n);
        }
    }
}

/// 3. Segre-transversality: the minimal codimension-1 and -2 examples are
///    transversal, and the codimension-3 model is certified not transversal.
#[test]
fn segre_transversality_verdicts() {
    let origin2 = PointC::origin(2);
    let h = segre_transversal(&corpus::heisenberg2(), &origin2, SEED, 16).unwrap();
    assert!(!matches!(h.verdict, TransversalVerdict::NotTransversal));

    let p3 = segre_transversal(&corpus::product_c3(), &PointC::origin(3), SEED, 16).unwrap();
    assert!(!matches!(p3.verdict, TransversalVerdict::NotTransversal));

    let c3 = segre_transversal(&corpus::c3_remark(), &PointC::origin(3), SEED, 16).unwrap();
    assert!(!matches!(c3.verdict, TransversalVerdict::NotTransversal));

    let c4 = segre_transversal(&corpus::c4_prop1042(), &PointC::origin(4), SEED, 16).unwrap();
    assert!(matches!(c4.verdict, TransversalVerdict::NotTransversal));
    assert!(c4.certified, "negative verdict needs the exact minor proof");
}

/// 4. The numeric flow-orbit dimension agrees with the symbolic Lie span
///    rank on every built-in example and on the classic three-field model
///    with one bracket step.
#[test]
fn numeric_orbit_dimension_matches_symbolic_rank() {
    let cfg = FlowConfig::default();
    assert_eq!(cfg.svd_tol, 1e-6);
    for m in corpus::all() {
        let p = m.base_point().cloned().unwrap();
        let lie = lie_saturation(&m, &p, None, SEED).unwrap();
        let basis = cr_vector_fields(&m, SEED).unwrap();
        let mut fields = basis.l_fields.clone();
        fields.extend(basis.lbar_fields.clone());
        let state = complexified_c64(&p);
        for seed in [1, 2, 3] {
            let dim = orbit_dim_numeric(&fields, &state, &cfg, seed).unwrap();
            assert_eq!(
                dim,
                lie.span_rank_at_p,
                "{}: numeric orbit dimension diverged (seed {})",
                m.name(),
                seed
            );
        }
    }

    // d/dx and d/dy + x d/dz span all three directions through one bracket.
    let ctx = VarContext::holomorphic(&["x", "y", "z"]);
    let mk = |coeffs: Vec<Poly>| VectorField {
        name: "X".into(),
        kind: FieldKind::Hol,
        coeffs,
    };
    let l1 = mk(vec![Poly::one(&ctx), Poly::zero(&ctx), Poly::zero(&ctx)]);
    let l2 = mk(vec![Poly::zero(&ctx), Poly::one(&ctx), Poly::var(&ctx, 0)]);
    let zero = [C64::new(0.0, 0.0); 3];
    for seed in [1, 2, 3] {
        let dim = orbit_dim_numeric(&[l1.clone(), l2.clone()], &zero, &cfg, seed).unwrap();
        assert_eq!(dim, 3);
    }
}

/// 5. Segre reciprocity q in S_pbar iff p in S_qbar on 200 sampled
///    on-manifold pairs per built-in example.
#[test]
fn segre_reciprocity_on_sampled_pairs() {
    for m in corpus::all() {
        let (pairs, holds) = reciprocity_sample(&m, 200, SEED).unwrap();
        assert_eq!(pairs, 200, "{}: short sample", m.name());
        assert!(holds, "{}: reciprocity failed", m.name());
    }
}

fn reverify_residual_zero(cert: &DependenceCertificate, map: &SeriesMap) {
    let sctx = map.ctx();
    let mut images: Vec<Poly> = (0..sctx.len()).map(|j| Poly::var(sctx, j)).collect();
    for &ci in &cert.indices {
        images.push(map.components[ci].clone());
    }
    let residual = cert.poly.substitute_all(sctx, &images);
    if cert.exact {
        assert!(residual.is_zero(), "exact certificate left a residual");
    } else {
        assert!(
            residual.truncate(cert.residual_order).is_zero(),
            "certificate fails below its residual order"
        );
    }
}

/// 6. Transcendence machinery: the cusp parametrization certifies its
///    classic relation with zero residual; the triple iterated-sine family
///    shows full transcendence evidence at the default bidegree; emitted
///    certificates re-verify by exact substitution.
#[test]
fn transcendence_certificates_and_iterated_sine_family() {
    // t -> (t^2, t^3) and the relation between the two components.
    let cusp = SeriesMap::polynomial(1, &["z1^2", "z1^3"], 10).unwrap();
    let cert = dependence_search(&cusp.components, 4, 4, 10)
        .unwrap()
        .expect("the cusp components are dependent");
    let expect = parse_poly("x1^3 - x2^2", cert.poly.ctx()).unwrap();
    assert_eq!(cert.poly, expect);
    assert!(cert.exact);
    assert!(cert.residual_order >= 10);
    reverify_residual_zero(&cert, &cusp);

    // All certificates of a polynomial map re-verify to zero residual.
    let poly_map = SeriesMap::polynomial(3, &["z1", "z2^2", "z3"], 10).unwrap();
    let rep = trdeg_estimate(&poly_map, 4, 4, 10).unwrap();
    assert_eq!(rep.estimate, 0);
    assert_eq!(rep.certificates.len(), 3);
    for cert in &rep.certificates {
        assert!(cert.exact);
        reverify_residual_zero(cert, &poly_map);
    }

    // sin, sin(sin), sin(sin(sin)): no relation within the bidegree box.
    let family = iterated_sin_family(3, 64).unwrap();
    let rep = trdeg_estimate(&family, 4, 4, 20).unwrap();
    assert_eq!(rep.estimate, 3, "family must look fully transcendental");
    assert_eq!(rep.independent, vec![0, 1, 2]);
    assert!(rep.certificates.is_empty());
    for cert in &rep.certificates {
        reverify_residual_zero(cert, &family);
    }
}

/// 7. The degree bound: transcendence evidence never exceeds the target's
///    degeneracy rank, with the perturbed identity exhibiting sharpness.
#[test]
fn transcendence_degree_bounded_by_kappa() {
    let heis = corpus::heisenberg2();
    let id2 = SeriesMap::identity(2, 10);
    let r = trdeg_inequality_check(&id2, &heis, &heis, 4, 4, 10, 7).unwrap();
    assert!(r.maps_into);
    assert_eq!((r.estimate, r.kappa), (0, 0));
    assert!(r.holds);

    let product = corpus::product_c3();
    let poly_map = SeriesMap::polynomial(3, &["z1", "z2^2", "z3"], 10).unwrap();
    let r = trdeg_inequality_check(&poly_map, &product, &product, 4, 4, 10, 7).unwrap();
    assert_eq!((r.estimate, r.kappa), (0, 1));
    assert!(r.holds);

    // Perturbing the flat slot of the product with sin reaches the bound.
    let id3 = SeriesMap::identity(3, 20);
    let perturbed = perturbation_builder(&id3, &[1], 1).unwrap();
    let r = trdeg_inequality_check(&perturbed, &product, &product, 4, 4, 20, 7).unwrap();
    assert_eq!((r.estimate, r.kappa), (1, 1));
    assert!(r.holds, "sharp instance must still satisfy the bound");
}

/// 8. Reflection sets respect the product structure: reflections in the
///    product never involve the flat direction and the double reflection of
///    a map missing that direction has positive dimension, while the
///    identity on a minimal hypersurface pins dimension zero.
#[test]
fn reflection_sets_respect_product_structure() {
    let product = corpus::product_c3();
    let mp = Manifold::Graph(product.clone());

    // Points on the product: (t, s, x + i t^2).
    let pts: Vec<PointC> = (1..=3i64)
        .map(|t| {
            PointC::new(vec![
                GaussRat::from_int(t),
                GaussRat::from_int(2 * t - 1),
                GaussRat::from_fracs((t, 2), (t * t, 2)),
            ])
        })
        .collect();
    for p in &pts {
        assert!(product.contains(p));
    }
    let refl = first_reflection(&mp, &pts, None, SEED).unwrap();
    assert!(!refl.ideal.gens.is_empty());
    for g in &refl.ideal.gens {
        assert!(
            !g.uses_var(1),
            "reflection generator touches the flat direction: {}",
            g
        );
    }

    // Heisenberg -> product via (w, 0, z): the flat slot is missed, so the
    // double reflection keeps at least one free direction.
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
        SEED,
    )
    .unwrap();
    assert!(rep.dim_estimate.unwrap_or(0) >= 1);
    for g in &rep.ideal.gens {
        assert!(!g.uses_var(1));
    }

    // Identity on the Heisenberg hypersurface: zero-dimensional.
    let id = vec![Poly::var(&h.ctx, 0), Poly::var(&h.ctx, 1)];
    let rep = double_reflection_sample(
        &h,
        &h,
        &id,
        &PointC::origin(2),
        &PointC::origin(2),
        4,
        SEED,
    )
    .unwrap();
    assert_eq!(rep.dim_estimate, Some(0));
}

/// 9. The command-line corpus run matches its frozen reports, twice, with
///    byte-identical output; the pinned example invocations hold.
#[test]
fn cli_corpus_run_is_deterministic() {
    let bin = env!("CARGO_BIN_EXE_crkit");
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/corpus");
    let run = |args: &[&str]| {
        let out = Command::new(bin)
            .args(args)
            .env_remove("CRKIT_SEED")
            .current_dir(dir)
            .output()
            .expect("binary runs");
        assert!(
            out.status.success(),
            "exit {:?} for {:?}: {}",
            out.status.code(),
            args,
            String::from_utf8_lossy(&out.stderr)
        );
        String::from_utf8(out.stdout).expect("utf8 report")
    };

    let first = run(&["corpus"]);
    let second = run(&["corpus"]);
    assert_eq!(first, second, "corpus runs must be byte-identical");
    let v: Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["report"]["matched"], Value::Bool(true));
    assert_eq!(v["report"]["count"], 6);

    let t: Value = serde_json::from_str(&run(&["transversal", "c4_prop1042.json"])).unwrap();
    assert_eq!(t["report"]["verdict"], "not_transversal");
    assert_eq!(t["report"]["certified"], Value::Bool(true));

    let k: Value = serde_json::from_str(&run(&["kappa", "productC3.json"])).unwrap();
    assert_eq!(k["report"]["kappa"], 1);
    assert_eq!(k["report"]["chi"], 2);

    let a: Value = serde_json::from_str(&run(&["analyze", "leviflat.json"])).unwrap();
    assert_eq!(a["report"]["minimality"]["verdict"], "not_minimal");
}
