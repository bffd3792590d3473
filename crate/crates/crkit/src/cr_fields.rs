//! Tangent CR vector fields, Lie brackets and minimality, the algebraic
//! degeneracy degree kappa, holomorphic-field search, and linear
//! straightening of product directions.

use crate::error::{CrError, Result};
use crate::gauss::GaussRat;
use crate::ideal::{groebner, ideal_member, Ideal, Membership, MonomialOrder};
use crate::manifold::{GraphManifold, Manifold, PointC};
use crate::matrix::{bareiss_det, exact_rank_with_witness, scalar_kernel, scalar_rank, Matrix};
use crate::poly::{Expo, Poly};
use crate::vars::VarContext;
use itertools::Itertools;
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FieldKind {
    /// (1,0): acts through the holomorphic slots.
    Hol,
    /// (0,1): acts through the antiholomorphic slots.
    Anti,
    /// Bracket results mixing both blocks.
    Mixed,
}

/// A derivation with polynomial coefficients over the full paired context:
/// coeffs[j] multiplies ∂/∂(variable j), 0 ≤ j < 2n.
#[derive(Clone, Debug)]
pub struct VectorField {
    pub name: String,
    pub kind: FieldKind,
    pub coeffs: Vec<Poly>,
}

impl VectorField {
    pub fn ctx(&self) -> &Arc<VarContext> {
        self.coeffs[0].ctx()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn apply(&self, p: &Poly) -> Poly {
        let mut out = Poly::zero(self.ctx());
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&c.mul(&p.partial_derivative(j)));
            }
        }
        out
    }

    pub fn bracket(&self, other: &VectorField) -> VectorField {
        let ctx = self.ctx();
        let slots = self.coeffs.len();
        let mut coeffs = Vec::with_capacity(slots);
        for j in 0..slots {
            let fwd = self.apply(&other.coeffs[j]);
            let back = other.apply(&self.coeffs[j]);
            coeffs.push(fwd.sub(&back));
        }
        let _ = ctx;
        let kind = if self.kind == other.kind { self.kind } else { FieldKind::Mixed };
        VectorField { name: format!("[{}, {}]", self.name, other.name), kind, coeffs }
    }

    pub fn evaluate(&self, point: &[GaussRat]) -> Vec<GaussRat> {
        self.coeffs.iter().map(|c| c.evaluate(point)).collect()
    }

    /// Conjugate field: coefficient of ∂/∂v goes to conj(coeff) at ∂/∂v̄.
    pub fn conjugate(&self) -> Result<VectorField> {
        let n = self.ctx().len() / 2;
        let mut coeffs = vec![Poly::zero(self.ctx()); 2 * n];
        for (j, c) in self.coeffs.iter().enumerate() {
            let partner = if j < n { n + j } else { j - n };
            coeffs[partner] = c.conjugate()?;
        }
        let kind = match self.kind {
            FieldKind::Hol => FieldKind::Anti,
            FieldKind::Anti => FieldKind::Hol,
            FieldKind::Mixed => FieldKind::Mixed,
        };
        Ok(VectorField { name: format!("conj({})", self.name), kind, coeffs })
    }
}

/// The complexified CR bases: 𝓛 (one per CR direction, (1,0)-side) and
/// 𝓛̲ ((0,1)-side).
pub struct CrBasis {
    pub l_fields: Vec<VectorField>,
    pub lbar_fields: Vec<VectorField>,
    /// CR dimension actually realized.
    pub m: usize,
    /// Codimension of the tangency system.
    pub d: usize,
}

pub fn cr_vector_fields(m: &Manifold, seed: u64) -> Result<CrBasis> {
    match m {
        Manifold::Graph(g) => cr_fields_graph(g),
        Manifold::Implicit(im) => cr_fields_implicit(
            &im.ctx,
            im.n,
            &im.gens,
            seed,
        ),
    }
}

fn cr_fields_graph(g: &GraphManifold) -> Result<CrBasis> {
    let ctx = &g.ctx;
    let n = g.n;
    let mut l_fields = Vec::new();
    let mut lbar_fields = Vec::new();
    let qbar: Vec<Poly> = g.q.iter().map(|q| q.conjugate()).collect::<Result<_>>()?;
    for (i, &wi) in g.w_idx.iter().enumerate() {
        let mut lc = vec![Poly::zero(ctx); 2 * n];
        lc[wi] = Poly::one(ctx);
        for (l, &zj) in g.z_idx.iter().enumerate() {
            lc[zj] = qbar[l].partial_derivative(wi);
        }
        l_fields.push(VectorField {
            name: format!("L{}", i + 1),
            kind: FieldKind::Hol,
            coeffs: lc,
        });
        let mut bc = vec![Poly::zero(ctx); 2 * n];
        bc[n + wi] = Poly::one(ctx);
        for (l, &zj) in g.z_idx.iter().enumerate() {
            bc[n + zj] = g.q[l].partial_derivative(n + wi);
        }
        lbar_fields.push(VectorField {
            name: format!("Lb{}", i + 1),
            kind: FieldKind::Anti,
            coeffs: bc,
        });
    }
    // Tangency: every field must annihilate every defining function along
    // the graph.
    let gens = g.implicit_gens();
    for f in l_fields.iter().chain(&lbar_fields) {
        for gen in &gens {
            if !g.substitute_graph(&f.apply(gen)).is_zero() {
                return Err(CrError::Internal(format!(
                    "{} fails tangency on {}",
                    f.name, g.name
                )));
            }
        }
    }
    Ok(CrBasis { l_fields, lbar_fields, m: g.m, d: g.d })
}

fn cr_fields_implicit(
    ctx: &Arc<VarContext>,
    n: usize,
    gens: &[Poly],
    seed: u64,
) -> Result<CrBasis> {
    // Kernel of (∂P_i/∂ζ_k) over the fraction field gives the (0,1) side.
    let rows: Vec<Vec<Poly>> = gens
        .iter()
        .map(|g| (0..n).map(|k| g.partial_derivative(n + k)).collect())
        .collect();
    let anti_jac = Matrix::from_polys(rows);
    let kernel = anti_jac.kernel();
    if kernel.is_empty() {
        return Err(CrError::Unsupported("not CR-generic: no CR directions".into()));
    }
    let m = kernel.len();
    let d = n - m;
    let mut lbar_fields = Vec::new();
    let mut l_fields = Vec::new();
    for (i, vec) in kernel.iter().enumerate() {
        let mut bc = vec![Poly::zero(ctx); 2 * n];
        for (k, c) in vec.iter().enumerate() {
            bc[n + k] = c.clone();
        }
        let f = VectorField {
            name: format!("Lb{}", i + 1),
            kind: FieldKind::Anti,
            coeffs: bc,
        };
        l_fields.push(VectorField {
            name: format!("L{}", i + 1),
            ..f.conjugate()?
        });
        lbar_fields.push(f);
    }
    // Exact tangency: the kernel construction annihilates each generator
    // identically; assert it.
    for (f, gset) in [(&lbar_fields, gens), (&l_fields, gens)] {
        for field in f {
            for g in gset {
                if !field.apply(g).is_zero() {
                    return Err(CrError::Internal(format!(
                        "{} fails exact tangency",
                        field.name
                    )));
                }
            }
        }
    }
    // Independence over the fraction field.
    let coeff_rows: Vec<Vec<Poly>> =
        lbar_fields.iter().map(|f| f.coeffs.clone()).collect();
    let rank = Matrix::from_polys(coeff_rows).generic_rank(seed, 2)?.rank;
    if rank != m {
        return Err(CrError::Unsupported("not CR-generic: dependent CR basis".into()));
    }
    Ok(CrBasis { l_fields, lbar_fields, m, d })
}

pub fn lie_bracket(x: &VectorField, y: &VectorField) -> VectorField {
    x.bracket(y)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MinimalityVerdict {
    Minimal,
    NotMinimal,
    Unknown,
}

impl MinimalityVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            MinimalityVerdict::Minimal => "minimal",
            MinimalityVerdict::NotMinimal => "not_minimal",
            MinimalityVerdict::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Debug)]
pub struct LieReport {
    pub depth_reached: usize,
    pub span_rank_at_p: usize,
    pub generic_span_rank: usize,
    /// dim_R M = 2m + d, the target rank on the complexification.
    pub expected: usize,
    pub verdict: MinimalityVerdict,
    pub bracket_words: Vec<String>,
}

fn generic_span_dim(fields: &[&VectorField], seed: u64) -> Result<usize> {
    if fields.is_empty() {
        return Ok(0);
    }
    let rows: Vec<Vec<Poly>> = fields.iter().map(|f| f.coeffs.clone()).collect();
    Ok(Matrix::from_polys(rows).generic_rank(seed, 2)?.rank)
}

fn point_span_dim(fields: &[&VectorField], point: &[GaussRat]) -> usize {
    if fields.is_empty() {
        return 0;
    }
    let rows: Vec<Vec<GaussRat>> = fields.iter().map(|f| f.evaluate(point)).collect();
    scalar_rank(rows)
}

/// Iterated bracket saturation of the complexified CR basis, evaluated at
/// p^c. The generic span is saturated first (candidates kept only when
/// they enlarge the span over the fraction field); if the point rank lags
/// behind a full generic span, bracketing continues without pruning up to
/// the depth cap, since special points can need longer words.
pub fn lie_saturation(
    m: &Manifold,
    p: &PointC,
    depth_cap: Option<usize>,
    seed: u64,
) -> Result<LieReport> {
    if !m.contains(p) {
        return Err(CrError::PointNotOnSet(format!("{:?}", p.coords)));
    }
    let basis = cr_vector_fields(m, seed)?;
    let n = m.n();
    let expected = 2 * basis.m + basis.d;
    let cap = depth_cap.unwrap_or(2 * n).max(2);
    let pc = p.complexified();

    // `all` holds every nonzero bracket word generated; the point rank is
    // taken over all of them. The frontier is pruned by generic-span
    // growth until the generic span saturates, after which every word is
    // bracket fodder (special points can need longer words than generic
    // ones).
    let mut all: Vec<VectorField> = Vec::new();
    let mut kept: Vec<VectorField> = Vec::new();
    for f in basis.l_fields.iter().chain(&basis.lbar_fields) {
        all.push(f.clone());
        kept.push(f.clone());
    }
    let seeds: Vec<VectorField> = kept.clone();
    fn refs(v: &[VectorField]) -> Vec<&VectorField> {
        v.iter().collect()
    }
    const MAX_FRONTIER: usize = 512;
    let mut grank = generic_span_dim(&refs(&kept), seed)?;
    let mut depth = 1usize;
    let mut frontier: Vec<VectorField> = kept.clone();
    let mut prank = point_span_dim(&refs(&all), &pc);
    let mut phase2 = grank == expected;
    let mut truncated = false;

    while prank < expected && depth < cap && !frontier.is_empty() {
        depth += 1;
        let mut new_frontier = Vec::new();
        for b in &seeds {
            for f in &frontier {
                let cand = b.bracket(f);
                if cand.is_zero() || all.iter().any(|g| g.coeffs == cand.coeffs) {
                    continue;
                }
                let mut raises = false;
                if grank < expected {
                    let mut with: Vec<&VectorField> = kept.iter().collect();
                    with.push(&cand);
                    let r = generic_span_dim(&with, seed)?;
                    if r > grank {
                        grank = r;
                        kept.push(cand.clone());
                        raises = true;
                    }
                }
                all.push(cand.clone());
                if raises || phase2 {
                    new_frontier.push(cand);
                }
            }
        }
        prank = point_span_dim(&refs(&all), &pc);
        if grank == expected && !phase2 {
            // Generic span just saturated: widen the frontier to every
            // word generated so far.
            phase2 = true;
            frontier = all.clone();
        } else {
            frontier = new_frontier;
        }
        if frontier.len() > MAX_FRONTIER {
            frontier.truncate(MAX_FRONTIER);
            truncated = true;
        }
    }

    let span_rank_at_p = prank;
    let verdict = if span_rank_at_p == expected {
        MinimalityVerdict::Minimal
    } else if grank < expected {
        // Pointwise rank never exceeds the generic rank of the saturated
        // module, so a deficient generic span certifies non-minimality.
        MinimalityVerdict::NotMinimal
    } else if depth >= cap || truncated {
        MinimalityVerdict::Unknown
    } else {
        // Bracketing closed at this point without reaching full rank.
        MinimalityVerdict::NotMinimal
    };

    // Witness words: a greedy independent subset at p^c.
    let mut words = Vec::new();
    let mut chosen: Vec<&VectorField> = Vec::new();
    let mut r0 = 0;
    for f in &all {
        let mut with = chosen.clone();
        with.push(f);
        let r = point_span_dim(&with, &pc);
        if r > r0 {
            r0 = r;
            chosen.push(f);
            words.push(f.name.clone());
        }
    }

    Ok(LieReport {
        depth_reached: depth,
        span_rank_at_p,
        generic_span_rank: grank,
        expected,
        verdict,
        bracket_words: words,
    })
}

/// Holomorphic polynomial (1,0) fields of coefficient degree ≤ bound that
/// are tangent to the set. Returns a maximal generically independent
/// subset (module rank many) plus a completeness flag (false only when a
/// truncated basis may have hidden solutions).
pub fn tangent_hol_fields(m: &Manifold, bound: u32, seed: u64) -> Result<(Vec<VectorField>, bool)> {
    let ctx = m.ctx().clone();
    let n = m.n();
    // Unknowns: coefficients of a_j over z-monomials of degree ≤ bound.
    let monos = holomorphic_monomials(n, bound);
    let unknowns: Vec<(usize, Expo)> = (0..n).cartesian_product(monos.iter().cloned()).collect();
    // Residuals, linear in the unknowns.
    let mut residuals: Vec<Vec<Poly>> = Vec::new();
    let mut complete = true;
    match m {
        Manifold::Graph(g) => {
            for q in &g.q {
                let mut row = Vec::with_capacity(unknowns.len());
                for (j, e) in &unknowns {
                    let mono = Poly::monomial(&ctx, pad_expo(e, 2 * n), GaussRat::one());
                    row.push(g.substitute_graph(&mono.mul(&q.partial_derivative(*j))));
                }
                residuals.push(row);
            }
        }
        Manifold::Implicit(im) => {
            let cap = im
                .gens
                .iter()
                .map(|g| g.total_degree())
                .max()
                .unwrap_or(1)
                .max(4)
                * 2
                + bound;
            let gb = groebner(&Ideal::new(ctx.clone(), im.gens.to_vec()), MonomialOrder::GrLex, cap);
            complete = gb.complete;
            for gen in &im.gens {
                let mut row = Vec::with_capacity(unknowns.len());
                for (j, e) in &unknowns {
                    let mono = Poly::monomial(&ctx, pad_expo(e, 2 * n), GaussRat::one());
                    let t = mono.mul(&gen.partial_derivative(*j));
                    row.push(crate::ideal::reduce_mod(&t, &gb));
                }
                residuals.push(row);
            }
        }
    }
    // Assemble the scalar linear system: one row per monomial occurring in
    // any residual.
    let mut row_index: BTreeMap<(usize, Expo), usize> = BTreeMap::new();
    for (gi, row) in residuals.iter().enumerate() {
        for p in row {
            for (e, _) in p.terms() {
                let key = (gi, e.clone());
                let next = row_index.len();
                row_index.entry(key).or_insert(next);
            }
        }
    }
    let mut system = vec![vec![GaussRat::zero(); unknowns.len()]; row_index.len()];
    for (gi, row) in residuals.iter().enumerate() {
        for (u, p) in row.iter().enumerate() {
            for (e, c) in p.terms() {
                let r = row_index[&(gi, e.clone())];
                system[r][u] = c.clone();
            }
        }
    }
    let kernel = scalar_kernel(system, unknowns.len());
    // Convert kernel vectors to fields.
    let mut fields = Vec::new();
    for (fi, v) in kernel.iter().enumerate() {
        let mut coeffs = vec![Poly::zero(&ctx); 2 * n];
        for ((j, e), c) in unknowns.iter().zip(v) {
            if !c.is_zero() {
                let mono = Poly::monomial(&ctx, pad_expo(e, 2 * n), c.clone());
                coeffs[*j] = coeffs[*j].add(&mono);
            }
        }
        fields.push(VectorField {
            name: format!("H{}", fi + 1),
            kind: FieldKind::Hol,
            coeffs,
        });
    }
    // Reduce to a generically independent subset, low degree first.
    fields.sort_by_key(|f| {
        f.coeffs.iter().map(|c| c.total_degree()).max().unwrap_or(0)
    });
    let mut chosen: Vec<VectorField> = Vec::new();
    let mut rank = 0;
    for f in fields {
        let mut rows: Vec<Vec<Poly>> = chosen.iter().map(|g| g.coeffs.clone()).collect();
        rows.push(f.coeffs.clone());
        let r = Matrix::from_polys(rows).generic_rank(seed, 2)?.rank;
        if r > rank {
            rank = r;
            chosen.push(f);
        }
    }
    for (i, f) in chosen.iter_mut().enumerate() {
        f.name = format!("H{}", i + 1);
    }
    Ok((chosen, complete))
}

fn holomorphic_monomials(n: usize, bound: u32) -> Vec<Expo> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    gen_monos(&mut out, &mut cur, 0, bound);
    out.sort_by(|a, b| crate::poly::grlex(a, b));
    out
}

fn gen_monos(out: &mut Vec<Expo>, cur: &mut Vec<u32>, pos: usize, left: u32) {
    if pos == cur.len() {
        out.push(cur.clone());
        return;
    }
    for e in 0..=left {
        cur[pos] = e;
        gen_monos(out, cur, pos + 1, left - e);
    }
    cur[pos] = 0;
}

fn pad_expo(e: &Expo, len: usize) -> Expo {
    let mut full = vec![0u32; len];
    full[..e.len()].copy_from_slice(e);
    full
}

#[derive(Clone, Debug)]
pub struct KappaReport {
    pub kappa: usize,
    pub chi: usize,
    /// Exact nonvanishing chi × chi minor of the coefficient-family
    /// Jacobian (rows and columns recorded alongside).
    pub witness_minor: Option<Poly>,
    pub witness_rows: Vec<usize>,
    pub witness_cols: Vec<usize>,
    /// All chi × chi minors: generators of the exceptional locus.
    pub exceptional_gens: Vec<Poly>,
    /// For series presentations: whether kappa agreed across two orders.
    pub stabilized: Option<bool>,
}

/// The coefficient-family Jacobian 𝓠: rows indexed by (equation,
/// zb_w-monomial), columns by the n holomorphic variables.
pub fn kappa_jacobian(g: &GraphManifold) -> (Vec<(usize, Expo)>, Vec<Vec<Poly>>) {
    let block: Vec<usize> = g.w_idx.iter().map(|&w| g.n + w).collect();
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    for (l, q) in g.q.iter().enumerate() {
        for (beta, coeff) in q.collect_by(&block) {
            let row: Vec<Poly> = (0..g.n).map(|j| coeff.partial_derivative(j)).collect();
            labels.push((l, beta));
            rows.push(row);
        }
    }
    (labels, rows)
}

pub fn kappa(g: &GraphManifold, _seed: u64) -> Result<KappaReport> {
    let report = kappa_once(g)?;
    if let Some(order) = g.series_order {
        if order == 0 {
            return Err(CrError::Unsupported("series order too small for kappa".into()));
        }
        let mut lower = g.clone();
        lower.q = g.q.iter().map(|q| q.truncate(order - 1)).collect();
        lower.series_order = Some(order - 1);
        let prev = kappa_once(&lower)?;
        let stable = prev.kappa == report.kappa;
        let mut out = report;
        out.stabilized = Some(stable);
        if !stable {
            // kappa from a non-stabilized series is only a lower bound on
            // chi, hence an upper bound on kappa; surface that honestly.
            return Ok(out);
        }
        return Ok(out);
    }
    Ok(report)
}

fn kappa_once(g: &GraphManifold) -> Result<KappaReport> {
    let (_, rows) = kappa_jacobian(g);
    let n = g.n;
    if rows.is_empty() {
        return Err(CrError::BadManifold("no equations".into()));
    }
    let (chi, wrows, wcols) = exact_rank_with_witness(rows.clone());
    let kappa = n - chi;
    // Witness minor as an exact determinant.
    let witness_minor = if chi > 0 {
        let sub: Vec<Vec<Poly>> = wrows
            .iter()
            .map(|&r| wcols.iter().map(|&c| rows[r][c].clone()).collect())
            .collect();
        Some(bareiss_det(sub))
    } else {
        None
    };
    // Exceptional locus: all chi × chi minors.
    let mut exceptional = Vec::new();
    if chi > 0 {
        for rsel in (0..rows.len()).combinations(chi) {
            for csel in (0..n).combinations(chi) {
                let sub: Vec<Vec<Poly>> = rsel
                    .iter()
                    .map(|&r| csel.iter().map(|&c| rows[r][c].clone()).collect())
                    .collect();
                let det = bareiss_det(sub);
                if !det.is_zero() {
                    exceptional.push(det);
                }
            }
        }
    }
    Ok(KappaReport {
        kappa,
        chi,
        witness_minor,
        witness_rows: wrows,
        witness_cols: wcols,
        exceptional_gens: exceptional,
        stabilized: None,
    })
}

#[derive(Clone, Debug)]
pub struct StraightenStep {
    /// Constant kernel direction in the coordinates of its step.
    pub direction: Vec<GaussRat>,
    /// Dropped variable name.
    pub dropped: String,
}

#[derive(Clone)]
pub struct StraightenReport {
    pub result: Option<GraphManifold>,
    pub steps: Vec<StraightenStep>,
    pub kappa_before: usize,
    pub kappa_after: usize,
}

/// Straightens product directions with constant kernel vectors supported
/// in the CR block, one variable at a time. Returns None in `result` when
/// kappa is 0 or no constant direction exists (honest partial coverage of
/// the general straightening).
pub fn straighten_linear(g: &GraphManifold, seed: u64) -> Result<StraightenReport> {
    let before = kappa(g, seed)?.kappa;
    let mut current = g.clone();
    let mut steps = Vec::new();
    loop {
        let kr = kappa(&current, seed)?;
        if kr.kappa == 0 {
            break;
        }
        match straighten_step(&current)? {
            Some((next, step)) => {
                steps.push(step);
                current = next;
            }
            None => break,
        }
    }
    let after = kappa(&current, seed)?.kappa;
    let result = if steps.is_empty() { None } else { Some(current) };
    Ok(StraightenReport { result, steps, kappa_before: before, kappa_after: after })
}

fn straighten_step(g: &GraphManifold) -> Result<Option<(GraphManifold, StraightenStep)>> {
    let (_, rows) = kappa_jacobian(g);
    let jac = Matrix::from_polys(rows);
    let kernel = jac.kernel();
    let n = g.n;
    // Constant kernel vector supported in the CR block.
    let cand = kernel.iter().find_map(|v| {
        let mut consts = Vec::with_capacity(n);
        for p in v {
            if p.total_degree() > 0 {
                return None;
            }
            consts.push(p.constant_term());
        }
        for (j, c) in consts.iter().enumerate() {
            if !c.is_zero() && !g.w_idx.contains(&j) {
                return None;
            }
        }
        Some(consts)
    });
    let Some(v) = cand else { return Ok(None) };
    let k = (0..n).find(|&j| !v[j].is_zero()).expect("kernel vector nonzero");
    let ctx = &g.ctx;
    // Linear change t_j ← t_j + v_j t_k (j ≠ k), scaled so the new k-th
    // direction is the kernel direction; conjugate action on zb.
    let images: Vec<Poly> = (0..2 * n)
        .map(|slot| {
            let base = Poly::var(ctx, slot);
            if slot < n {
                if slot == k {
                    base.scale(&v[k])
                } else if !v[slot].is_zero() {
                    base.add(&Poly::var(ctx, k).scale(&v[slot]))
                } else {
                    base
                }
            } else {
                let j = slot - n;
                if j == k {
                    base.scale(&v[k].conj())
                } else if !v[j].is_zero() {
                    base.add(&Poly::var(ctx, n + k).scale(&v[j].conj()))
                } else {
                    base
                }
            }
        })
        .collect();
    let new_q: Vec<Poly> = g.q.iter().map(|q| q.substitute_all(ctx, &images)).collect();
    for q in &new_q {
        if q.uses_var(k) || q.uses_var(n + k) {
            return Ok(None);
        }
    }
    // Drop the straightened pair (k, n+k).
    let keep: Vec<usize> = (0..2 * n).filter(|&j| j != k && j != n + k).collect();
    let (sub_ctx, _) = ctx.restrict(&keep);
    let remap = |j: usize| if j < k { j } else { j - 1 };
    let q_small: Vec<Poly> = new_q
        .iter()
        .map(|q| q.transfer(&sub_ctx))
        .collect::<std::result::Result<_, _>>()?;
    let base_point = g.base_point.as_ref().map(|p| {
        PointC::new(
            p.coords
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(_, c)| c.clone())
                .collect(),
        )
    });
    let out = GraphManifold {
        name: format!("{}_straightened", g.name),
        n: n - 1,
        m: g.m - 1,
        d: g.d,
        ctx: sub_ctx,
        w_idx: g.w_idx.iter().filter(|&&j| j != k).map(|&j| remap(j)).collect(),
        z_idx: g.z_idx.iter().map(|&j| remap(j)).collect(),
        q: q_small,
        base_point,
        series_order: g.series_order,
    };
    let step = StraightenStep {
        direction: v,
        dropped: ctx.var(k).name.clone(),
    };
    Ok(Some((out, step)))
}

/// Tangency of a field to an ideal: X(gen) must reduce into the ideal.
pub fn tangency_check(field: &VectorField, gens: &[Poly], cap: u32) -> Membership {
    let ctx = gens[0].ctx().clone();
    let gb = groebner(&Ideal::new(ctx, gens.to_vec()), MonomialOrder::GrLex, cap);
    for g in gens {
        match ideal_member(&field.apply(g), &gb) {
            Membership::Yes => {}
            other => return other,
        }
    }
    Membership::Yes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::parse::parse_poly;

    #[test]
    fn heisenberg_fields_and_bracket() {
        let g = corpus::heisenberg2();
        let basis = cr_fields_graph(&g).unwrap();
        assert_eq!(basis.m, 1);
        // Lb = ∂/∂zb1 - i z1 ∂/∂zb2.
        let lb = &basis.lbar_fields[0];
        let ctx = &g.ctx;
        assert_eq!(lb.coeffs[2], Poly::one(ctx));
        assert_eq!(lb.coeffs[3], parse_poly("-i*z1", ctx).unwrap());
        // L = ∂/∂z1 + i zb1 ∂/∂z2.
        let l = &basis.l_fields[0];
        assert_eq!(l.coeffs[1], parse_poly("i*zb1", ctx).unwrap());
        // [L, Lb] = -i ∂/∂zb2 - i ∂/∂z2.
        let br = l.bracket(lb);
        assert_eq!(br.coeffs[1], parse_poly("-i", ctx).unwrap());
        assert_eq!(br.coeffs[3], parse_poly("-i", ctx).unwrap());
    }

    #[test]
    fn simple_brackets() {
        let ctx = VarContext::holomorphic(&["x", "y", "z"]);
        let dx = VectorField {
            name: "X".into(),
            kind: FieldKind::Hol,
            coeffs: vec![Poly::one(&ctx), Poly::zero(&ctx), Poly::zero(&ctx)],
        };
        let dy_xz = VectorField {
            name: "Y".into(),
            kind: FieldKind::Hol,
            coeffs: vec![Poly::zero(&ctx), Poly::one(&ctx), Poly::var(&ctx, 0)],
        };
        let br = dx.bracket(&dy_xz);
        assert!(br.coeffs[0].is_zero());
        assert!(br.coeffs[1].is_zero());
        assert_eq!(br.coeffs[2], Poly::one(&ctx));
        let zero = dx.bracket(&dx);
        assert!(zero.is_zero());
    }

    #[test]
    fn whitney_bracket_matches_hand_computation() {
        let m = corpus::whitney_tube();
        let ctx = &m.ctx;
        // Paper basis on the tube.
        let x1 = parse_poly("(1/2)*z1 + (1/2)*zb1", ctx).unwrap();
        let x2 = parse_poly("(1/2)*z2 + (1/2)*zb2", ctx).unwrap();
        let _x3 = parse_poly("(1/2)*z3 + (1/2)*zb3", ctx).unwrap();
        let zero = Poly::zero(ctx);
        let l2 = VectorField {
            name: "L2".into(),
            kind: FieldKind::Hol,
            coeffs: vec![
                zero.clone(),
                x1.mul(&x1),
                x2.scale(&GaussRat::from_int(2)),
                zero.clone(),
                zero.clone(),
                zero.clone(),
            ],
        };
        let lb2 = l2.conjugate().unwrap();
        for f in [&l2, &lb2] {
            assert!(f.apply(&m.gens[0]).is_zero());
        }
        let br = l2.bracket(&lb2);
        // [L2, Lb2] = x1^2 ∂/∂zb3 − x1^2 ∂/∂z3.
        assert_eq!(br.coeffs[5], x1.mul(&x1));
        assert_eq!(br.coeffs[2], x1.mul(&x1).scale(&GaussRat::from_int(-1)));
        for j in [0, 1, 3, 4] {
            assert!(br.coeffs[j].is_zero());
        }
    }

    #[test]
    fn whitney_kernel_fields_tangent() {
        let m = corpus::whitney_tube();
        let basis = cr_vector_fields(&Manifold::Implicit(m.clone()), 3).unwrap();
        assert_eq!(basis.m, 2);
        assert_eq!(basis.d, 1);
        for f in basis.lbar_fields.iter().chain(&basis.l_fields) {
            assert_eq!(tangency_check(f, &m.gens, 10), Membership::Yes);
        }
    }

    #[test]
    fn minimality_verdicts() {
        let h = Manifold::Graph(corpus::heisenberg2());
        let rep = lie_saturation(&h, &PointC::origin(2), None, 5).unwrap();
        assert_eq!(rep.verdict, MinimalityVerdict::Minimal);
        assert!(rep.depth_reached <= 2);
        assert_eq!(rep.span_rank_at_p, 3);

        let lf = Manifold::Graph(corpus::leviflat());
        let rep = lie_saturation(&lf, &PointC::origin(2), None, 5).unwrap();
        assert_eq!(rep.verdict, MinimalityVerdict::NotMinimal);

        let w = corpus::whitney_tube();
        let p = w.base_point.clone().unwrap();
        let rep = lie_saturation(&Manifold::Implicit(w), &p, None, 5).unwrap();
        assert_eq!(rep.verdict, MinimalityVerdict::Minimal);
        assert!(rep.depth_reached <= 2);
        assert_eq!(rep.span_rank_at_p, 5);
    }

    #[test]
    fn c4_minimal_at_origin() {
        let m = Manifold::Graph(corpus::c4_prop1042());
        let rep = lie_saturation(&m, &PointC::origin(4), None, 5).unwrap();
        assert_eq!(rep.verdict, MinimalityVerdict::Minimal, "{:?}", rep);
        assert_eq!(rep.span_rank_at_p, 5);
    }

    #[test]
    fn kappa_corpus_values() {
        let h = kappa(&corpus::heisenberg2(), 1).unwrap();
        assert_eq!((h.kappa, h.chi), (0, 2));
        let p = kappa(&corpus::product_c3(), 1).unwrap();
        assert_eq!((p.kappa, p.chi), (1, 2));
        let c4 = kappa(&corpus::c4_prop1042(), 1).unwrap();
        assert_eq!((c4.kappa, c4.chi), (0, 4));
        let lf = kappa(&corpus::leviflat(), 1).unwrap();
        assert_eq!((lf.kappa, lf.chi), (1, 1));
        let c3 = kappa(&corpus::c3_remark(), 1).unwrap();
        assert_eq!(c3.kappa + c3.chi, 3);
    }

    #[test]
    fn hol_fields_product_and_whitney() {
        let (fields, complete) =
            tangent_hol_fields(&Manifold::Graph(corpus::product_c3()), 2, 11).unwrap();
        assert!(complete);
        assert_eq!(fields.len(), 1);
        // The surviving direction is ∂/∂v (variable z2).
        assert!(!fields[0].coeffs[1].is_zero());
        assert!(fields[0].coeffs[0].is_zero());
        assert!(fields[0].coeffs[2].is_zero());

        let (wf, wcomplete) =
            tangent_hol_fields(&Manifold::Implicit(corpus::whitney_tube()), 3, 11).unwrap();
        assert!(wcomplete);
        assert!(wf.is_empty());
    }

    #[test]
    fn straighten_product_to_heisenberg() {
        let rep = straighten_linear(&corpus::product_c3(), 5).unwrap();
        assert_eq!(rep.kappa_before, 1);
        assert_eq!(rep.kappa_after, 0);
        let out = rep.result.unwrap();
        assert_eq!(out.n, 2);
        assert_eq!(out.m, 1);
        let q = parse_poly("z3 - i*z1*zb1", &out.ctx).unwrap();
        assert_eq!(out.q[0], q);

        let none = straighten_linear(&corpus::heisenberg2(), 5).unwrap();
        assert!(none.result.is_none());
    }

    #[test]
    fn straighten_disguised_product() {
        // Mix the two CR directions of the product linearly; kappa must
        // survive and straightening must still strip one direction.
        let g = corpus::product_c3();
        let ctx = &g.ctx;
        // w ← w + 2v, v ← v (so Q picks up the disguised direction).
        let images: Vec<Poly> = vec![
            Poly::var(ctx, 0).add(&Poly::var(ctx, 1).scale(&GaussRat::from_int(2))),
            Poly::var(ctx, 1),
            Poly::var(ctx, 2),
            Poly::var(ctx, 3).add(&Poly::var(ctx, 4).scale(&GaussRat::from_int(2))),
            Poly::var(ctx, 4),
            Poly::var(ctx, 5),
        ];
        let q = g.q[0].substitute_all(ctx, &images);
        let disguised =
            GraphManifold::new("disguised", 3, 2, vec![q], Some(PointC::origin(3))).unwrap();
        assert!(disguised.verify_reality().unwrap());
        let kr = kappa(&disguised, 2).unwrap();
        assert_eq!((kr.kappa, kr.chi), (1, 2));
        let rep = straighten_linear(&disguised, 2).unwrap();
        assert_eq!(rep.kappa_after, 0);
        assert!(rep.result.is_some());
    }
}
