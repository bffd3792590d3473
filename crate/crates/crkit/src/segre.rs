//! Segre varieties, their complexifications, reflections, and the
//! probabilistic/certified Segre-transversality test.

use crate::error::{CrError, Result};
use crate::gauss::GaussRat;
use crate::ideal::Ideal;
use crate::manifold::{rand_gauss_int, GraphManifold, Manifold, PointC};
use crate::matrix::{bareiss_det, scalar_rank, Matrix};
use crate::poly::Poly;
use crate::vars::VarContext;
use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::collections::BTreeMap;
use std::sync::Arc;

/// S_q̄ = {z : P(z, q̄) = 0}, presented by an ideal in the holomorphic
/// variables only.
pub struct SegreVariety {
    pub ideal: Ideal,
    pub base: PointC,
}

/// Substitute ζ ↦ q̄ into the complexified generators.
pub fn segre_variety(m: &Manifold, q: &PointC) -> Result<SegreVariety> {
    let ctx = m.ctx().clone();
    let n = m.n();
    if q.dim() != n {
        return Err(CrError::BadInput(format!(
            "point has {} coordinates, manifold needs {}",
            q.dim(),
            n
        )));
    }
    let qbar = q.conj();
    let mut consts = BTreeMap::new();
    for (j, c) in qbar.coords.iter().enumerate() {
        consts.insert(n + j, c.clone());
    }
    let keep: Vec<usize> = (0..n).collect();
    let (hol_ctx, _) = ctx.restrict(&keep);
    let mut gens = Vec::new();
    for g in m.complexified_gens() {
        let s = g.substitute_consts(&consts).transfer(&hol_ctx)?;
        if !s.is_zero() {
            gens.push(s.monic_grlex());
        }
    }
    Ok(SegreVariety { ideal: Ideal::new(hol_ctx, gens), base: q.clone() })
}

/// p ∈ S_q̄, by direct evaluation of the complexified generators at
/// (p, q̄).
pub fn segre_contains(m: &Manifold, p: &PointC, q: &PointC) -> bool {
    let n = m.n();
    if p.dim() != n || q.dim() != n {
        return false;
    }
    let mut point = p.coords.clone();
    point.extend(q.conj().coords);
    m.complexified_gens().iter().all(|g| g.evaluate(&point).is_zero())
}

/// Draws `count` pairs (p, q) with p ∈ M real and q ∈ S_p̄, and checks
/// the reciprocity q ∈ S_p̄ ⇔ p ∈ S_q̄ on each. Returns (pairs tested,
/// all reciprocal).
pub fn reciprocity_sample(m: &Manifold, count: usize, seed: u64) -> Result<(usize, bool)> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x5e9e_c0de);
    let reals = m.sample_real_points(seed, count.clamp(8, 40))?;
    let mut tested = 0;
    let mut ok = true;
    let mut attempts = 0;
    while tested < count && attempts < 40 * count {
        attempts += 1;
        let p = &reals[tested % reals.len()];
        let Some(q) = sample_on_segre(m, p, &mut rng)? else { continue };
        let forward = segre_contains(m, &q, p);
        let backward = segre_contains(m, p, &q);
        if !(forward && backward) {
            ok = false;
        }
        tested += 1;
    }
    if tested < count {
        return Err(CrError::SamplingFailed(format!(
            "only {} of {} Segre pairs found",
            tested, count
        )));
    }
    Ok((tested, ok))
}

/// One random point q ∈ S_p̄.
fn sample_on_segre(m: &Manifold, p: &PointC, rng: &mut ChaCha12Rng) -> Result<Option<PointC>> {
    match m {
        Manifold::Graph(g) => {
            let pbar = p.conj();
            let mut coords = vec![GaussRat::zero(); g.n];
            for &wi in &g.w_idx {
                coords[wi] = rand_gauss_int(rng, 3);
            }
            // z = Q̄(w, p̄): conjugated solved form evaluated at the
            // random CR part.
            for (l, &zl) in g.z_idx.iter().enumerate() {
                let qbar = g.q[l].conjugate()?;
                let mut point = coords.clone();
                point.extend(pbar.coords.clone());
                coords[zl] = qbar.evaluate(&point);
            }
            Ok(Some(PointC::new(coords)))
        }
        Manifold::Implicit(_) => {
            let sv = segre_variety(m, p)?;
            Ok(sample_on_ideal(&sv.ideal.gens, m.n(), rng))
        }
    }
}

/// Rational sample solution of a polynomial system: exact elimination
/// for affine-linear systems, a triangular linear-variable chain
/// otherwise; None when neither applies.
pub(crate) fn sample_on_ideal(
    gens: &[Poly],
    nvars: usize,
    rng: &mut ChaCha12Rng,
) -> Option<PointC> {
    if gens.is_empty() {
        let coords = (0..nvars).map(|_| rand_gauss_int(rng, 3)).collect();
        return Some(PointC::new(coords));
    }
    if gens.iter().all(|g| g.total_degree() <= 1) {
        return sample_affine(gens, nvars, rng);
    }
    'outer: for _ in 0..24 {
        let mut vals: BTreeMap<usize, GaussRat> = BTreeMap::new();
        let mut remaining: Vec<Poly> = gens.to_vec();
        // Repeatedly pick a generator linear in some unsolved variable.
        while let Some((gi, v)) = remaining.iter().enumerate().find_map(|(gi, g)| {
            (0..nvars)
                .filter(|v| !vals.contains_key(v))
                .find(|&v| g.degree_in(v) == 1)
                .map(|v| (gi, v))
        }) {
            let g = remaining.remove(gi);
            // Split g = c1 * v + c0 in v.
            let by = g.collect_by(&[v]);
            let zero_key = vec![0u32];
            let one_key = vec![1u32];
            let c1 = by.get(&one_key).cloned().unwrap_or_else(|| Poly::zero(g.ctx()));
            let c0 = by.get(&zero_key).cloned().unwrap_or_else(|| Poly::zero(g.ctx()));
            // Randomize every other free variable appearing.
            for u in 0..nvars {
                if u != v && !vals.contains_key(&u) && (c1.uses_var(u) || c0.uses_var(u)) {
                    vals.insert(u, rand_gauss_int(rng, 3));
                }
            }
            let fill = |p: &Poly| -> GaussRat {
                let point: Vec<GaussRat> = (0..p.ctx().len())
                    .map(|j| vals.get(&j).cloned().unwrap_or_else(GaussRat::zero))
                    .collect();
                p.evaluate(&point)
            };
            let c1v = fill(&c1);
            if c1v.is_zero() {
                continue 'outer;
            }
            let c0v = fill(&c0);
            vals.insert(v, c0v.div(&c1v).mul(&GaussRat::from_int(-1)));
        }
        if !remaining.is_empty() {
            return None;
        }
        let coords: Vec<GaussRat> = (0..nvars)
            .map(|j| vals.get(&j).cloned().unwrap_or_else(|| rand_gauss_int(rng, 3)))
            .collect();
        let p = PointC::new(coords);
        if gens.iter().all(|g| {
            let mut point = p.coords.clone();
            point.resize(g.ctx().len(), GaussRat::zero());
            g.evaluate(&point).is_zero()
        }) {
            return Some(p);
        }
    }
    None
}

/// Exact Gaussian elimination for an affine-linear system; free
/// variables get small random integer values.
fn sample_affine(gens: &[Poly], nvars: usize, rng: &mut ChaCha12Rng) -> Option<PointC> {
    // Augmented rows [a_1 .. a_n | -c].
    let mut rows: Vec<Vec<GaussRat>> = Vec::new();
    for g in gens {
        let mut row = vec![GaussRat::zero(); nvars + 1];
        for (e, c) in g.terms() {
            match e.iter().position(|&x| x > 0) {
                Some(j) => row[j] = c.clone(),
                None => row[nvars] = c.mul(&GaussRat::from_int(-1)),
            }
        }
        rows.push(row);
    }
    // Forward elimination to RREF.
    let mut pivot_of_col = vec![None; nvars];
    let mut r = 0;
    for c in 0..nvars {
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, pr);
        let inv = rows[r][c].inv();
        for x in rows[r].iter_mut() {
            *x = x.mul(&inv);
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..=nvars {
                    let t = rows[r][j].mul(&f);
                    rows[i][j] = rows[i][j].sub(&t);
                }
            }
        }
        pivot_of_col[c] = Some(r);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    // Inconsistent system: 0 = nonzero.
    for row in &rows {
        if row[..nvars].iter().all(|x| x.is_zero()) && !row[nvars].is_zero() {
            return None;
        }
    }
    let mut coords = vec![GaussRat::zero(); nvars];
    for c in 0..nvars {
        if pivot_of_col[c].is_none() {
            coords[c] = rand_gauss_int(rng, 3);
        }
    }
    for c in (0..nvars).rev() {
        if let Some(pr) = pivot_of_col[c] {
            let mut v = rows[pr][nvars].clone();
            for j in (c + 1)..nvars {
                if !rows[pr][j].is_zero() {
                    v = v.sub(&rows[pr][j].mul(&coords[j]));
                }
            }
            coords[c] = v;
        }
    }
    Some(PointC::new(coords))
}

/// The complexified Segre variety 𝓢_τ of a graph manifold: the m-plane
/// {(w, z) : z = Q̄(w, τ)} parametrized by the CR block.
pub struct ComplexifiedSegre {
    pub tau: Vec<GaussRat>,
    /// For each z-slot, the parametrizing polynomial in the w-variables.
    pub components: Vec<Poly>,
    pub w_idx: Vec<usize>,
    pub z_idx: Vec<usize>,
}

impl ComplexifiedSegre {
    /// The m tangent vectors of the plane at a given w (columns ordered
    /// as the manifold's holomorphic variables).
    pub fn frame(&self) -> Vec<Vec<Poly>> {
        let n = self.w_idx.len() + self.z_idx.len();
        let ctx = self.components[0].ctx();
        let mut rows = Vec::new();
        for &wi in &self.w_idx {
            let mut row = vec![Poly::zero(ctx); n];
            row[wi] = Poly::one(ctx);
            for (l, &zl) in self.z_idx.iter().enumerate() {
                row[zl] = self.components[l].partial_derivative(wi);
            }
            rows.push(row);
        }
        rows
    }

    pub fn point_at(&self, w: &[GaussRat]) -> PointC {
        let n = self.w_idx.len() + self.z_idx.len();
        let ctx = self.components[0].ctx();
        let mut coords = vec![GaussRat::zero(); n];
        let mut full = vec![GaussRat::zero(); ctx.len()];
        for (i, &wi) in self.w_idx.iter().enumerate() {
            coords[wi] = w[i].clone();
            full[wi] = w[i].clone();
        }
        for (l, &zl) in self.z_idx.iter().enumerate() {
            coords[zl] = self.components[l].evaluate(&full);
        }
        PointC::new(coords)
    }
}

pub fn complexified_segre(g: &GraphManifold, tau: &[GaussRat]) -> Result<ComplexifiedSegre> {
    let n = g.n;
    if tau.len() != n {
        return Err(CrError::BadInput(format!(
            "conjugate point has {} coordinates, manifold needs {}",
            tau.len(),
            n
        )));
    }
    if g.series_order.is_some() {
        // Truncated graphs have a finite radius; stay well inside it.
        for c in tau {
            let v = c.norm_sqr();
            if v >= num::BigRational::from_integer(1.into()) {
                return Err(CrError::BadInput(
                    "series graph: conjugate point outside unit radius".into(),
                ));
            }
        }
    }
    let mut consts = BTreeMap::new();
    for (j, c) in tau.iter().enumerate() {
        consts.insert(n + j, c.clone());
    }
    let mut components = Vec::new();
    for q in &g.q {
        let qbar = q.conjugate()?;
        components.push(qbar.substitute_consts(&consts));
    }
    Ok(ComplexifiedSegre {
        tau: tau.to_vec(),
        components,
        w_idx: g.w_idx.clone(),
        z_idx: g.z_idx.clone(),
    })
}

/// r_{M′}(E′) = {w′ : S_w̄′ ⊃ E′}, with generators conjugated into the
/// holomorphic w′-variables.
pub struct ReflectionSet {
    pub ideal: Ideal,
    pub sources: Vec<PointC>,
    /// n′ − Jacobian rank at the sample solution, when one was found.
    pub dim_estimate: Option<usize>,
    pub sample: Option<PointC>,
}

pub fn first_reflection(
    mp: &Manifold,
    sources: &[PointC],
    hint: Option<&PointC>,
    seed: u64,
) -> Result<ReflectionSet> {
    if sources.is_empty() {
        return Err(CrError::BadInput("reflection of an empty point set".into()));
    }
    let ctx = mp.ctx().clone();
    let n = mp.n();
    let keep: Vec<usize> = (0..n).collect();
    let (hol_ctx, _) = ctx.restrict(&keep);
    let mut gens: Vec<Poly> = Vec::new();
    for e in sources {
        if e.dim() != n {
            return Err(CrError::BadInput("source point dimension mismatch".into()));
        }
        let mut consts = BTreeMap::new();
        for (j, c) in e.coords.iter().enumerate() {
            consts.insert(j, c.clone());
        }
        for g in mp.complexified_gens() {
            // P(e′, τ′) as a polynomial in τ′, conjugated into w′-vars.
            let s = g.substitute_consts(&consts).conjugate()?.transfer(&hol_ctx)?;
            if !s.is_zero() {
                gens.push(s.monic_grlex());
            }
        }
    }
    gens.dedup();
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x5ef1_ec71);
    let on_set = |p: &PointC| gens.iter().all(|g| g.evaluate(&p.coords).is_zero());
    let sample = hint
        .filter(|h| h.dim() == n && on_set(h))
        .cloned()
        .or_else(|| sample_on_ideal(&gens, n, &mut rng));
    let dim_estimate = sample.as_ref().map(|s| {
        if gens.is_empty() {
            return n;
        }
        let rows: Vec<Vec<Poly>> = gens
            .iter()
            .map(|g| (0..n).map(|j| g.partial_derivative(j)).collect())
            .collect();
        let jac = Matrix::from_polys(rows);
        let vals = jac.evaluate(&s.coords).expect("polynomial entries evaluate");
        n - scalar_rank(vals)
    });
    let keep_ctx = hol_ctx;
    Ok(ReflectionSet {
        ideal: Ideal::new(keep_ctx, gens),
        sources: sources.to_vec(),
        dim_estimate,
        sample,
    })
}

#[derive(Clone, Debug)]
pub struct DoubleReflectionReport {
    /// Upper-bound dimension estimate of X′_{z,w̄}, SAMPLED caveat
    /// applies.
    pub dim_estimate: Option<usize>,
    pub sampled: bool,
    pub stabilized: bool,
    pub k_used: usize,
    /// Generators of the combined reflection ideal, in w′-variables.
    pub ideal: Ideal,
}

/// Approximates X′_{z,w̄} = r_{M′}(f(S_z̄)) ∩ r²_{M′}(f(S_w̄)) through
/// k-point sampling. f is a polynomial map given by components in the
/// source holomorphic variables.
pub fn double_reflection_sample(
    m: &GraphManifold,
    mp: &GraphManifold,
    f: &[Poly],
    z: &PointC,
    w: &PointC,
    k_samples: usize,
    seed: u64,
) -> Result<DoubleReflectionReport> {
    let np = mp.n;
    if f.len() != np {
        return Err(CrError::BadInput(format!(
            "map has {} components, target needs {}",
            f.len(),
            np
        )));
    }
    let msrc = Manifold::Graph(m.clone());
    let mtgt = Manifold::Graph(mp.clone());
    if !segre_contains(&msrc, z, w) {
        return Err(CrError::BadInput("z does not lie on S_w̄".into()));
    }
    let k = k_samples.max(2);
    let fz = apply_map(f, z)?;
    let rng_seed = seed ^ 0xd0b1_e5e7;

    let run = |k: usize| -> Result<(Option<usize>, Ideal)> {
        let mut rng = ChaCha12Rng::seed_from_u64(rng_seed);
        // Points on S_z̄ and S_w̄, mapped through f.
        let seg_z = complexified_segre(m, &z.conj().coords)?;
        let seg_w = complexified_segre(m, &w.conj().coords)?;
        let mut ez = Vec::new();
        let mut ew = Vec::new();
        for _ in 0..k {
            let draw: Vec<GaussRat> = (0..m.m).map(|_| rand_gauss_int(&mut rng, 3)).collect();
            ez.push(apply_map(f, &seg_z.point_at(&draw))?);
            let draw: Vec<GaussRat> = (0..m.m).map(|_| rand_gauss_int(&mut rng, 3)).collect();
            ew.push(apply_map(f, &seg_w.point_at(&draw))?);
        }
        // First reflection of f(S_z̄); f(z) lies on it.
        let r1 = first_reflection(&mtgt, &ez, Some(&fz), seed)?;
        // Second reflection of f(S_w̄): reflect, sample k points on the
        // reflection, reflect again.
        let rb = first_reflection(&mtgt, &ew, None, seed)?;
        let mut g_points = Vec::new();
        let mut rng2 = ChaCha12Rng::seed_from_u64(rng_seed ^ 0x97c3);
        for _ in 0..k {
            if let Some(p) = sample_on_ideal(&rb.ideal.gens, np, &mut rng2) {
                g_points.push(p);
            }
        }
        if g_points.is_empty() {
            return Err(CrError::SamplingFailed(
                "no rational points on the first reflection of f(S_w̄)".into(),
            ));
        }
        let r2 = first_reflection(&mtgt, &g_points, Some(&fz), seed)?;
        // Combined ideal in w′-space.
        let mut gens = r1.ideal.gens.clone();
        gens.extend(r2.ideal.gens.clone());
        gens.dedup();
        let dim = if gens.iter().all(|g| g.evaluate(&fz.coords).is_zero()) {
            let rows: Vec<Vec<Poly>> = gens
                .iter()
                .map(|g| (0..np).map(|j| g.partial_derivative(j)).collect())
                .collect();
            if rows.is_empty() {
                Some(np)
            } else {
                let jac = Matrix::from_polys(rows);
                let vals = jac.evaluate(&fz.coords).expect("polynomial entries");
                Some(np - scalar_rank(vals))
            }
        } else {
            None
        };
        Ok((dim, Ideal::new(r1.ideal.ctx.clone(), gens)))
    };

    let (d1, _) = run(k)?;
    let (d2, ideal) = run(k + 1)?;
    Ok(DoubleReflectionReport {
        dim_estimate: d2,
        sampled: true,
        stabilized: d1 == d2,
        k_used: k + 1,
        ideal,
    })
}

fn apply_map(f: &[Poly], p: &PointC) -> Result<PointC> {
    let mut coords = Vec::with_capacity(f.len());
    for comp in f {
        let mut point = p.coords.clone();
        point.resize(comp.ctx().len(), GaussRat::zero());
        coords.push(comp.evaluate(&point));
    }
    Ok(PointC::new(coords))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TransversalVerdict {
    TransversalAt,
    TransversalIn,
    NotTransversal,
}

impl TransversalVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            TransversalVerdict::TransversalAt => "transversal_at",
            TransversalVerdict::TransversalIn => "transversal_in",
            TransversalVerdict::NotTransversal => "not_transversal",
        }
    }
}

#[derive(Clone, Debug)]
pub struct TransversalReport {
    pub verdict: TransversalVerdict,
    /// k = d + 1 symbolic conjugate points.
    pub k: usize,
    /// True when the verdict is backed by exact minor expansion.
    pub certified: bool,
    pub trials_used: u32,
    /// Evaluation witness: the ζ_j draws realizing full rank (flattened
    /// per point), present for transversal verdicts.
    pub witness: Option<Vec<Vec<GaussRat>>>,
}

/// Builds the stacked m(d+1) × n tangent-frame matrix of the Segre
/// family, over fresh symbols for the d+1 conjugate CR blocks. Returns
/// (symbol context, rows, index of first symbol variable).
fn frame_matrix(g: &GraphManifold) -> Result<(Arc<VarContext>, Vec<Vec<Poly>>, usize)> {
    let n = g.n;
    let m = g.m;
    let k = g.d + 1;
    let mut names: Vec<String> = (0..n).map(|j| g.ctx.var(j).name.clone()).collect();
    for j in 1..=k {
        for i in 1..=m {
            names.push(format!("s{}w{}", j, i));
        }
    }
    let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let big = VarContext::holomorphic(&name_refs);
    // Substitution images per sample index j: hol vars map to themselves,
    // zb over the CR block maps to the j-th symbols, zb over the
    // transverse block maps to ξ_j = Q(t, ζ_j).
    let mut rows = Vec::new();
    for j in 0..k {
        let mut images: Vec<Poly> = (0..2 * n).map(|_| Poly::zero(&big)).collect();
        for t in 0..n {
            images[t] = Poly::var(&big, t);
        }
        for (i, &wi) in g.w_idx.iter().enumerate() {
            images[n + wi] = Poly::var(&big, n + j * m + i);
        }
        // ξ_j needs only the CR-block images, which are set already.
        let xi: Vec<Poly> = g.q.iter().map(|q| q.substitute_all(&big, &images)).collect();
        for (l, &zl) in g.z_idx.iter().enumerate() {
            images[n + zl] = xi[l].clone();
        }
        for &wi in &g.w_idx {
            let mut row = vec![Poly::zero(&big); n];
            row[wi] = Poly::one(&big);
            for (l, &zl) in g.z_idx.iter().enumerate() {
                let qbar_w = g.q[l].conjugate()?.partial_derivative(wi);
                row[zl] = qbar_w.substitute_all(&big, &images);
            }
            rows.push(row);
        }
    }
    Ok((big, rows, n))
}

pub fn segre_transversal(
    g: &GraphManifold,
    p: &PointC,
    seed: u64,
    trials: u32,
) -> Result<TransversalReport> {
    if g.series_order.is_some() {
        return Err(CrError::Unsupported(
            "transversality needs a polynomial graph presentation".into(),
        ));
    }
    if !g.contains(p) {
        return Err(CrError::PointNotOnSet(format!("{:?}", p.coords)));
    }
    let n = g.n;
    let m = g.m;
    let k = g.d + 1;
    let (big, rows, _) = frame_matrix(g)?;
    let exact = n <= 4;
    let trials = trials.max(4);

    // Substituted matrix at t = p, polynomials in the ζ symbols only.
    let mut at_p = BTreeMap::new();
    for (j, c) in p.coords.iter().enumerate() {
        at_p.insert(j, c.clone());
    }
    let rows_at_p: Vec<Vec<Poly>> = rows
        .iter()
        .map(|r| r.iter().map(|e| e.substitute_consts(&at_p)).collect())
        .collect();

    let nonzero_minor = |rows: &[Vec<Poly>]| -> bool {
        for sel in (0..rows.len()).combinations(n) {
            let sub: Vec<Vec<Poly>> = sel.iter().map(|&r| rows[r].clone()).collect();
            if !bareiss_det(sub).is_zero() {
                return true;
            }
        }
        false
    };

    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x7a55_ba11);
    let mut trials_used = 0;
    let draw_witness = |rows: &[Vec<Poly>],
                        rng: &mut ChaCha12Rng,
                        trials_used: &mut u32|
     -> Option<Vec<Vec<GaussRat>>> {
        for _ in 0..trials {
            *trials_used += 1;
            let mut point = vec![GaussRat::zero(); big.len()];
            for v in point.iter_mut() {
                *v = rand_gauss_int(rng, 5);
            }
            let vals: Vec<Vec<GaussRat>> = rows
                .iter()
                .map(|r| r.iter().map(|e| e.evaluate(&point)).collect())
                .collect();
            if scalar_rank(vals) == n {
                let zetas: Vec<Vec<GaussRat>> = (0..k)
                    .map(|j| (0..m).map(|i| point[n + j * m + i].clone()).collect())
                    .collect();
                return Some(zetas);
            }
        }
        None
    };

    // Transversal at p: full rank reachable with t frozen at p.
    let at_witness = draw_witness(&rows_at_p, &mut rng, &mut trials_used);
    if let Some(w) = at_witness {
        return Ok(TransversalReport {
            verdict: TransversalVerdict::TransversalAt,
            k,
            certified: true,
            trials_used,
            witness: Some(w),
        });
    }
    let at_exact = exact && nonzero_minor(&rows_at_p);
    if at_exact {
        // Rank is generically full at p even though the random draws
        // missed it; keep drawing wider.
        for widen in [7i64, 11, 17] {
            trials_used += 1;
            let mut point = vec![GaussRat::zero(); big.len()];
            for v in point.iter_mut() {
                *v = rand_gauss_int(&mut rng, widen);
            }
            let vals: Vec<Vec<GaussRat>> = rows_at_p
                .iter()
                .map(|r| r.iter().map(|e| e.evaluate(&point)).collect())
                .collect();
            if scalar_rank(vals) == n {
                let zetas: Vec<Vec<GaussRat>> = (0..k)
                    .map(|j| (0..m).map(|i| point[n + j * m + i].clone()).collect())
                    .collect();
                return Ok(TransversalReport {
                    verdict: TransversalVerdict::TransversalAt,
                    k,
                    certified: true,
                    trials_used,
                    witness: Some(zetas),
                });
            }
        }
        return Ok(TransversalReport {
            verdict: TransversalVerdict::TransversalAt,
            k,
            certified: true,
            trials_used,
            witness: None,
        });
    }

    // Transversal in p: full rank with t symbolic (holds everywhere off
    // a proper subvariety once it holds anywhere).
    if exact {
        if nonzero_minor(&rows) {
            let witness = draw_witness(&rows, &mut rng, &mut trials_used);
            return Ok(TransversalReport {
                verdict: TransversalVerdict::TransversalIn,
                k,
                certified: true,
                trials_used,
                witness,
            });
        }
        Ok(TransversalReport {
            verdict: TransversalVerdict::NotTransversal,
            k,
            certified: true,
            trials_used,
            witness: None,
        })
    } else {
        let witness = draw_witness(&rows, &mut rng, &mut trials_used);
        match witness {
            Some(w) => Ok(TransversalReport {
                verdict: TransversalVerdict::TransversalIn,
                k,
                certified: false,
                trials_used,
                witness: Some(w),
            }),
            None => Ok(TransversalReport {
                verdict: TransversalVerdict::NotTransversal,
                k,
                certified: false,
                trials_used,
                witness: None,
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::parse::parse_poly;

    #[test]
    fn heisenberg_segre_at_origin() {
        let m = Manifold::Graph(corpus::heisenberg2());
        let sv = segre_variety(&m, &PointC::origin(2)).unwrap();
        assert_eq!(sv.ideal.gens.len(), 1);
        let expect = parse_poly("z2", &sv.ideal.ctx).unwrap();
        assert_eq!(sv.ideal.gens[0], expect);
        // p = (1, i) is not on S_0̄; 0 is.
        let p = PointC::new(vec![GaussRat::one(), GaussRat::i()]);
        assert!(!segre_contains(&m, &p, &PointC::origin(2)));
        assert!(segre_contains(&m, &PointC::origin(2), &PointC::origin(2)));
    }

    #[test]
    fn whitney_segre_substitution() {
        let m = Manifold::Implicit(corpus::whitney_tube());
        let q = PointC::new(vec![
            GaussRat::from_int(2),
            GaussRat::from_int(2),
            GaussRat::from_int(1),
        ]);
        let sv = segre_variety(&m, &q).unwrap();
        assert_eq!(sv.ideal.gens.len(), 1);
        let expect = parse_poly(
            "(1/8)*(z3+1)*(z1+2)^2 - (1/4)*(z2+2)^2",
            &sv.ideal.ctx,
        )
        .unwrap()
        .monic_grlex();
        assert_eq!(sv.ideal.gens[0], expect);
    }

    #[test]
    fn complexified_segre_parametrization() {
        let g = corpus::heisenberg2();
        // τ = 0 gives the w-axis.
        let seg0 = complexified_segre(&g, &[GaussRat::zero(), GaussRat::zero()]).unwrap();
        assert!(seg0.components[0].is_zero());
        // τ = (ζ0, ξ0) gives z = ξ0 + i w ζ0.
        let z0 = GaussRat::from_int(2);
        let x0 = GaussRat::from_ints(0, 3);
        let seg = complexified_segre(&g, &[z0.clone(), x0.clone()]).unwrap();
        let expect = parse_poly("3i + 2i*z1", &g.ctx).unwrap();
        assert_eq!(seg.components[0], expect);
        // The parametrized points satisfy the complexified equation.
        let m = Manifold::Graph(g.clone());
        let gens = m.complexified_gens();
        let pt = seg.point_at(&[GaussRat::from_int(5)]);
        let mut full = pt.coords.clone();
        full.extend(vec![z0, x0]);
        assert!(gens.iter().all(|ge| ge.evaluate(&full).is_zero()));
    }

    #[test]
    fn reciprocity_on_graph_and_implicit() {
        for m in [
            Manifold::Graph(corpus::heisenberg2()),
            Manifold::Implicit(corpus::whitney_tube()),
            Manifold::Graph(corpus::leviflat()),
        ] {
            let (tested, ok) = reciprocity_sample(&m, 50, 7).unwrap();
            assert_eq!(tested, 50, "{}", m.name());
            assert!(ok, "{}", m.name());
        }
    }

    #[test]
    fn reflections_match_hand_counts() {
        // Levi-flat: one point reflects to a hyperplane.
        let lf = Manifold::Graph(corpus::leviflat());
        let e = PointC::new(vec![GaussRat::from_int(1), GaussRat::from_int(2)]);
        let r = first_reflection(&lf, &[e], None, 3).unwrap();
        assert_eq!(r.dim_estimate, Some(1));

        // Heisenberg: the reflection of the origin is one-dimensional.
        let h = Manifold::Graph(corpus::heisenberg2());
        let r0 = first_reflection(&h, &[PointC::origin(2)], None, 3).unwrap();
        assert_eq!(r0.dim_estimate, Some(1));

        // Two points with distinct CR parts cut the reflection to dim 0.
        let g = corpus::heisenberg2();
        let seg = complexified_segre(&g, &PointC::origin(2).conj().coords).unwrap();
        let p1 = seg.point_at(&[GaussRat::from_int(1)]);
        let p2 = seg.point_at(&[GaussRat::from_int(2)]);
        let r2 = first_reflection(&h, &[p1, p2], None, 3).unwrap();
        assert_eq!(r2.dim_estimate, Some(0));
    }

    #[test]
    fn transversality_verdicts() {
        let origin2 = PointC::origin(2);
        let h = segre_transversal(&corpus::heisenberg2(), &origin2, 9, 16).unwrap();
        assert_eq!(h.verdict, TransversalVerdict::TransversalAt);
        assert!(h.certified);
        assert!(h.witness.is_some());

        let p3 = segre_transversal(&corpus::product_c3(), &PointC::origin(3), 9, 16).unwrap();
        assert_eq!(p3.verdict, TransversalVerdict::TransversalAt);

        // The C³ model's minors vanish on {w = 0}, so the origin only
        // sees transversality nearby.
        let c3 = segre_transversal(&corpus::c3_remark(), &PointC::origin(3), 9, 16).unwrap();
        assert_eq!(c3.verdict, TransversalVerdict::TransversalIn);
        assert!(c3.certified);

        let c4 = segre_transversal(&corpus::c4_prop1042(), &PointC::origin(4), 9, 16).unwrap();
        assert_eq!(c4.verdict, TransversalVerdict::NotTransversal);
        assert!(c4.certified);

        let lf = segre_transversal(&corpus::leviflat(), &origin2, 9, 16).unwrap();
        assert_eq!(lf.verdict, TransversalVerdict::NotTransversal);
        assert!(lf.certified);
    }

    #[test]
    fn transversality_linear_invariance() {
        let g = corpus::product_c3();
        let one = GaussRat::one();
        let a = vec![
            vec![one.clone(), GaussRat::from_int(2)],
            vec![GaussRat::from_int(1), GaussRat::from_int(3)],
        ];
        let b = vec![vec![GaussRat::from_ints(0, 1)]];
        let ch = g.linear_change(&a, &b).unwrap();
        let before = segre_transversal(&g, &PointC::origin(3), 4, 16).unwrap();
        let after = segre_transversal(&ch, &PointC::origin(3), 4, 16).unwrap();
        assert_eq!(before.verdict, after.verdict);

        let c4 = corpus::c4_prop1042();
        let a1 = vec![vec![GaussRat::from_ints(1, 1)]];
        let b3 = vec![
            vec![one.clone(), GaussRat::zero(), GaussRat::from_int(1)],
            vec![GaussRat::zero(), one.clone(), GaussRat::zero()],
            vec![GaussRat::zero(), GaussRat::zero(), one.clone()],
        ];
        let ch4 = c4.linear_change(&a1, &b3).unwrap();
        let after4 = segre_transversal(&ch4, &PointC::origin(4), 4, 16).unwrap();
        assert_eq!(after4.verdict, TransversalVerdict::NotTransversal);
        assert!(after4.certified);
    }

    #[test]
    fn double_reflection_heisenberg_identity() {
        let g = corpus::heisenberg2();
        let f: Vec<Poly> = (0..2).map(|j| Poly::var(&g.ctx, j)).collect();
        let rep = double_reflection_sample(
            &g,
            &g,
            &f,
            &PointC::origin(2),
            &PointC::origin(2),
            4,
            11,
        )
        .unwrap();
        assert_eq!(rep.dim_estimate, Some(0));
        assert!(rep.stabilized);
        assert!(rep.sampled);
    }

    #[test]
    fn double_reflection_product_sees_straightened_direction() {
        let h = corpus::heisenberg2();
        let p = corpus::product_c3();
        // (w, z) ↦ (w, 0, z): Heisenberg into the product, missing the
        // flat direction.
        let f = vec![
            Poly::var(&h.ctx, 0),
            Poly::zero(&h.ctx),
            Poly::var(&h.ctx, 1),
        ];
        let rep = double_reflection_sample(
            &h,
            &p,
            &f,
            &PointC::origin(2),
            &PointC::origin(2),
            4,
            11,
        )
        .unwrap();
        assert!(rep.dim_estimate.unwrap_or(0) >= 1);
        // No generator involves the straightened variable v = z2.
        for g in &rep.ideal.gens {
            assert!(!g.uses_var(1));
        }
    }
}
