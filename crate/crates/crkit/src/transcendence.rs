//! Truncated power-series maps, algebraic-dependence search, and
//! transcendence-degree estimates.
//!
//! A [`SeriesMap`] is a polynomial representative of a holomorphic map germ:
//! its components are exact polynomials over Q(i) and `order` records through
//! which total degree the coefficients are meaningful as series data.
//! Components built by composition may carry exact data beyond `order`; that
//! data is what the dependence search consumes.
//!
//! Dependence verdicts are bound-relative. `dependence_search` looks for a
//! nonzero P in C[z, x] of bidegree at most (D_z, D_x) with P(z, f(z)) = 0
//! through an oversampled row degree R = max(N, 2*unknowns + 32). A "none"
//! verdict is certified by full column rank of the coefficient matrix reduced
//! over Z_p[i] (rank mod p never exceeds the exact rank), so it means: no
//! relation at these bounds among the stored truncations. It is evidence of
//! transcendence, never proof. Certificates are re-verified by exact
//! substitution before they are returned.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::{BigInt, BigRational, Integer, One, ToPrimitive, Zero};

use crate::error::{CrError, Result};
use crate::gauss::GaussRat;
use crate::manifold::{GraphManifold, Manifold};
use crate::matrix::scalar_kernel;
use crate::parse::parse_poly;
use crate::poly::{Expo, Poly};
use crate::vars::VarContext;

/// Default series accuracy for CLI-built maps.
pub const DEFAULT_ORDER: u32 = 20;
/// Default dependence-search degree bounds.
pub const DEFAULT_BIDEGREE: (u32, u32) = (4, 4);

fn series_ctx(n_in: usize) -> Arc<VarContext> {
    let names: Vec<String> = (1..=n_in).map(|i| format!("z{}", i)).collect();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    VarContext::holomorphic(&refs)
}

/// A truncated holomorphic map germ (C^{n_in}, 0) -> C^{n_out} with exact
/// Gaussian-rational coefficients.
#[derive(Clone, Debug)]
pub struct SeriesMap {
    pub n_in: usize,
    pub n_out: usize,
    /// Series accuracy: coefficients through this total degree are meaningful.
    pub order: u32,
    pub components: Vec<Poly>,
}

impl SeriesMap {
    pub fn new(n_in: usize, order: u32, components: Vec<Poly>) -> Result<Self> {
        if components.is_empty() {
            return Err(CrError::BadInput("a series map needs at least one component".into()));
        }
        let ctx = components[0].ctx();
        if ctx.len() != n_in {
            return Err(CrError::BadInput(format!(
                "components live in {} variables, expected {}",
                ctx.len(),
                n_in
            )));
        }
        for c in &components[1..] {
            if !Arc::ptr_eq(c.ctx(), ctx) {
                return Err(CrError::BadInput("components must share one variable context".into()));
            }
        }
        Ok(SeriesMap { n_in, n_out: components.len(), order, components })
    }

    pub fn ctx(&self) -> &Arc<VarContext> {
        self.components[0].ctx()
    }

    pub fn identity(n: usize, order: u32) -> Self {
        let ctx = series_ctx(n);
        let components = (0..n).map(|i| Poly::var(&ctx, i)).collect();
        SeriesMap { n_in: n, n_out: n, order, components }
    }

    /// sin z1 truncated at `order`.
    pub fn sin(order: u32) -> Self {
        let ctx = series_ctx(1);
        let mut p = Poly::zero(&ctx);
        let mut fact = BigInt::one();
        for d in 1..=order {
            fact *= d;
            if d % 2 == 1 {
                let sign = if ((d - 1) / 2) % 2 == 0 { 1 } else { -1 };
                let c = GaussRat::new(
                    BigRational::new(BigInt::from(sign), fact.clone()),
                    BigRational::zero(),
                );
                p = p.add(&Poly::monomial(&ctx, vec![d], c));
            }
        }
        SeriesMap { n_in: 1, n_out: 1, order, components: vec![p] }
    }

    /// exp z1 truncated at `order`.
    pub fn exp(order: u32) -> Self {
        let ctx = series_ctx(1);
        let mut p = Poly::one(&ctx);
        let mut fact = BigInt::one();
        for d in 1..=order {
            fact *= d;
            let c = GaussRat::new(BigRational::new(BigInt::one(), fact.clone()), BigRational::zero());
            p = p.add(&Poly::monomial(&ctx, vec![d], c));
        }
        SeriesMap { n_in: 1, n_out: 1, order, components: vec![p] }
    }

    /// Polynomial map with components parsed over z1..z{n_in}.
    pub fn polynomial(n_in: usize, exprs: &[&str], order: u32) -> Result<Self> {
        let ctx = series_ctx(n_in);
        let components = exprs
            .iter()
            .map(|s| parse_poly(s, &ctx))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        SeriesMap::new(n_in, order, components)
    }

    /// self after inner, with the result truncated at total degree `cap`.
    /// Every inner component must have positive valuation.
    pub fn compose_to(&self, inner: &SeriesMap, cap: u32) -> Result<SeriesMap> {
        if self.n_in != inner.n_out {
            return Err(CrError::BadInput(format!(
                "composition mismatch: outer expects {} inputs, inner produces {}",
                self.n_in, inner.n_out
            )));
        }
        let ctx = inner.ctx().clone();
        let components = self
            .components
            .iter()
            .map(|c| substitute_series(c, &inner.components, &ctx, cap))
            .collect::<Result<Vec<_>>>()?;
        SeriesMap::new(inner.n_in, self.order.min(inner.order), components)
    }

    /// self after inner at the smaller of the two accuracies.
    pub fn compose(&self, inner: &SeriesMap) -> Result<SeriesMap> {
        let cap = self.order.min(inner.order);
        self.compose_to(inner, cap)
    }
}

/// Substitute `images` for the variables of `p`, truncating at total degree
/// `cap`. Requires positive valuation of every image so the truncation is
/// well defined. Powers are built incrementally along the exponents that
/// actually occur.
fn substitute_series(
    p: &Poly,
    images: &[Poly],
    out_ctx: &Arc<VarContext>,
    cap: u32,
) -> Result<Poly> {
    for g in images {
        if !g.constant_term().is_zero() {
            return Err(CrError::Unsupported(
                "series composition needs positive valuation of the inner map".into(),
            ));
        }
    }
    let k = images.len();
    // exponents used per variable, ascending
    let mut used: Vec<Vec<u32>> = vec![Vec::new(); k];
    for (e, _) in p.terms() {
        let total: u32 = e.iter().sum();
        if total > cap {
            continue;
        }
        for i in 0..k {
            if e[i] > 0 {
                used[i].push(e[i]);
            }
        }
    }
    let mut pows: Vec<BTreeMap<u32, Poly>> = vec![BTreeMap::new(); k];
    for i in 0..k {
        used[i].sort_unstable();
        used[i].dedup();
        let mut prev_e = 0u32;
        let mut prev_p = Poly::one(out_ctx);
        for &e in &used[i] {
            let mut cur = prev_p.clone();
            for _ in prev_e..e {
                cur = cur.mul_trunc(&images[i], cap);
            }
            pows[i].insert(e, cur.clone());
            prev_e = e;
            prev_p = cur;
        }
    }
    let mut out = Poly::zero(out_ctx);
    for (e, c) in p.terms() {
        let total: u32 = e.iter().sum();
        if total > cap {
            continue; // valuation >= total degree, so the image vanishes mod cap
        }
        let mut term = Poly::constant(out_ctx, c.clone());
        for i in 0..k {
            if e[i] > 0 {
                term = term.mul_trunc(&pows[i][&e[i]], cap);
            }
        }
        out = out.add(&term);
    }
    Ok(out.truncate(cap))
}

/// The family (sin, sin after sin, ...) of length k, all components carried
/// exactly through total degree `order`.
pub fn iterated_sin_family(k: usize, order: u32) -> Result<SeriesMap> {
    if k == 0 {
        return Err(CrError::BadInput("family size must be positive".into()));
    }
    let s = SeriesMap::sin(order);
    let mut components = vec![s.components[0].clone()];
    let mut cur = s.clone();
    for _ in 1..k {
        cur = s.compose_to(&cur, order)?;
        components.push(cur.components[0].clone());
    }
    SeriesMap::new(1, order, components)
}

// ---------------------------------------------------------------------------
// dependence search
// ---------------------------------------------------------------------------

/// A certified algebraic relation among map components: a nonzero P in the
/// input variables together with x1..xk (one x per searched component) such
/// that P(z, f(z)) vanishes through `residual_order`.
#[derive(Clone, Debug)]
pub struct DependenceCertificate {
    pub poly: Poly,
    pub d_z: u32,
    pub d_x: u32,
    /// Total degree through which the residual was verified to vanish.
    pub residual_order: u32,
    /// True when the residual is exactly the zero polynomial.
    pub exact: bool,
    /// Indices of the searched components; x{j+1} stands for component[indices[j]].
    pub indices: Vec<usize>,
}

/// Monomials in `nv` variables of total degree <= d, graded order.
fn graded_monomials(nv: usize, d: u32) -> Vec<Vec<u32>> {
    fn exact(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            cur[i] = 0;
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            exact(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    let mut cur = vec![0u32; nv];
    if nv == 0 {
        return vec![vec![]];
    }
    for t in 0..=d {
        exact(0, t, &mut cur, &mut out);
    }
    out
}

fn binom_count(nv: usize, d: u32) -> usize {
    // number of monomials of total degree <= d in nv variables
    let mut c: u128 = 1;
    for i in 1..=nv as u128 {
        c = c * (d as u128 + i) / i;
    }
    c as usize
}

/// Advisory from the order-versus-unknowns heuristic: Some(note) when the
/// truncation order is small against the number of unknown coefficients.
pub fn advisory_note(n_in: usize, n_out: usize, d_z: u32, d_x: u32, n: u32) -> Option<String> {
    let unknowns = binom_count(n_in, d_z) * binom_count(n_out, d_x);
    if (n as usize) * n_in.max(1) <= unknowns {
        Some(format!(
            "order {} is small against {} unknown coefficients at bidegree ({}, {}); verdicts are evidence at these bounds",
            n, unknowns, d_z, d_x
        ))
    } else {
        None
    }
}

// --- modular arithmetic over Z_p[i], p = 3 mod 4, for rank certification ---

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    acc
}

fn is_prime_u64(n: u64) -> bool {
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &q in &SMALL {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes p = 3 mod 4 just below 2^31, so Z_p[i] is a field and products fit u128.
fn modular_primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut p = (1u64 << 31) - 1;
    while out.len() < count {
        if p % 4 == 3 && is_prime_u64(p) {
            out.push(p);
        }
        p -= 2;
    }
    out
}

fn rat_mod(r: &BigRational, pb: &BigInt, p: u64) -> Option<u64> {
    let den = r.denom().mod_floor(pb).to_u64()?;
    if den == 0 {
        return None;
    }
    let num = r.numer().mod_floor(pb).to_u64()?;
    Some(mulmod(num, powmod(den, p - 2, p), p))
}

fn gauss_mod(g: &GaussRat, pb: &BigInt, p: u64) -> Option<(u64, u64)> {
    Some((rat_mod(&g.re, pb, p)?, rat_mod(&g.im, pb, p)?))
}

fn csub(a: (u64, u64), b: (u64, u64), p: u64) -> (u64, u64) {
    ((a.0 + p - b.0) % p, (a.1 + p - b.1) % p)
}

fn cmul(a: (u64, u64), b: (u64, u64), p: u64) -> (u64, u64) {
    let re = (mulmod(a.0, b.0, p) + p - mulmod(a.1, b.1, p)) % p;
    let im = (mulmod(a.0, b.1, p) + mulmod(a.1, b.0, p)) % p;
    (re, im)
}

fn cinv(a: (u64, u64), p: u64) -> (u64, u64) {
    let norm = (mulmod(a.0, a.0, p) + mulmod(a.1, a.1, p)) % p;
    let ninv = powmod(norm, p - 2, p);
    (mulmod(a.0, ninv, p), mulmod((p - a.1) % p, ninv, p))
}

/// Column rank of the matrix reduced mod p; None when a denominator hits p.
fn modular_rank(mat: &[Vec<GaussRat>], p: u64) -> Option<usize> {
    let pb = BigInt::from(p);
    let mut m: Vec<Vec<(u64, u64)>> = Vec::with_capacity(mat.len());
    for row in mat {
        let mut r = Vec::with_capacity(row.len());
        for g in row {
            r.push(gauss_mod(g, &pb, p)?);
        }
        m.push(r);
    }
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(pr) = (rank..rows).find(|&r| m[r][col] != (0, 0)) else { continue };
        m.swap(rank, pr);
        let inv = cinv(m[rank][col], p);
        for c in col..cols {
            m[rank][c] = cmul(m[rank][c], inv, p);
        }
        for r in rank + 1..rows {
            if m[r][col] != (0, 0) {
                let f = m[r][col];
                for c in col..cols {
                    m[r][c] = csub(m[r][c], cmul(f, m[rank][c], p), p);
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    Some(rank)
}

/// Search for an algebraic relation among `fs` of bidegree at most
/// (d_z, d_x), with residual floor `n`. The z-degree budget is raised one
/// step at a time, so the certificate uses the smallest z-degree possible.
pub fn dependence_search(
    fs: &[Poly],
    d_z: u32,
    d_x: u32,
    n: u32,
) -> Result<Option<DependenceCertificate>> {
    let indices: Vec<usize> = (0..fs.len()).collect();
    dependence_search_indexed(fs, &indices, d_z, d_x, n)
}

fn dependence_search_indexed(
    fs: &[Poly],
    indices: &[usize],
    d_z: u32,
    d_x: u32,
    n: u32,
) -> Result<Option<DependenceCertificate>> {
    if fs.is_empty() {
        return Err(CrError::BadInput("dependence search needs at least one component".into()));
    }
    let in_ctx = fs[0].ctx().clone();
    let n_in = in_ctx.len();
    let k = fs.len();
    for i in 0..n_in {
        let name = &in_ctx.var(i).name;
        if name.starts_with('x') && name[1..].parse::<usize>().is_ok() {
            return Err(CrError::BadInput(format!(
                "input variable {} collides with relation variables x1..x{}",
                name, k
            )));
        }
    }

    let betas = graded_monomials(k, d_x);
    let cols_max = binom_count(n_in, d_z) * betas.len();
    if cols_max > 20_000 {
        return Err(CrError::Unsupported(format!(
            "bidegree bounds give {} unknown coefficients; lower them",
            cols_max
        )));
    }
    let r_cap: u32 = (n as u64).max(2 * cols_max as u64 + 32).min(1_000_000) as u32;

    // products f^beta, truncated at the row cap, built along graded order
    let mut fpow: BTreeMap<Vec<u32>, Poly> = BTreeMap::new();
    fpow.insert(vec![0u32; k], Poly::one(&in_ctx));
    for beta in &betas {
        if beta.iter().all(|&e| e == 0) {
            continue;
        }
        let j = beta.iter().position(|&e| e > 0).unwrap();
        let mut pred = beta.clone();
        pred[j] -= 1;
        let val = fpow[&pred].mul_trunc(&fs[j], r_cap);
        fpow.insert(beta.clone(), val);
    }

    let max_deg = fs.iter().map(|f| f.total_degree()).max().unwrap_or(0);
    let full_deg = d_z.saturating_add(d_x.saturating_mul(max_deg));
    let primes = modular_primes(3);

    for dz in 0..=d_z {
        let alphas = graded_monomials(n_in, dz);
        let cols = alphas.len() * betas.len();

        // column polynomials z^alpha * f^beta
        let mut col_polys: Vec<Poly> = Vec::with_capacity(cols);
        for beta in &betas {
            let base = &fpow[beta];
            for alpha in &alphas {
                let mono = Poly::monomial(&in_ctx, alpha.clone(), GaussRat::one());
                col_polys.push(base.mul_trunc(&mono, r_cap));
            }
        }

        let mut row_of: BTreeMap<Expo, usize> = BTreeMap::new();
        for p in &col_polys {
            for (e, _) in p.terms() {
                let next = row_of.len();
                row_of.entry(e.clone()).or_insert(next);
            }
        }
        let rows = row_of.len();
        let mut mat = vec![vec![GaussRat::zero(); cols]; rows];
        for (ci, p) in col_polys.iter().enumerate() {
            for (e, c) in p.terms() {
                mat[row_of[e]][ci] = c.clone();
            }
        }

        // full column rank mod p certifies an empty exact kernel
        let mut certified_full = false;
        for &p in &primes {
            match modular_rank(&mat, p) {
                Some(r) if r == cols => {
                    certified_full = true;
                    break;
                }
                Some(_) => break, // deficient: compute the exact kernel
                None => continue, // denominator hit this prime; retry
            }
        }
        if certified_full {
            continue;
        }

        let kernel = scalar_kernel(mat, cols);
        if kernel.is_empty() {
            continue; // modular deficiency was an unlucky prime
        }

        // certificate context: input variables then x1..xk
        let mut names: Vec<String> = (0..n_in).map(|i| in_ctx.var(i).name.clone()).collect();
        for j in 1..=k {
            names.push(format!("x{}", j));
        }
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let ext = VarContext::holomorphic(&refs);

        let build = |vec: &Vec<GaussRat>| -> Poly {
            let mut p = Poly::zero(&ext);
            for (ci, c) in vec.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let beta = &betas[ci / alphas.len()];
                let alpha = &alphas[ci % alphas.len()];
                let mut e = vec![0u32; n_in + k];
                e[..n_in].copy_from_slice(alpha);
                e[n_in..].copy_from_slice(beta);
                p = p.add(&Poly::monomial(&ext, e, c.clone()));
            }
            p
        };
        let cert_poly = kernel
            .iter()
            .map(&build)
            .min_by_key(|p| (p.terms().count(), format!("{}", p)))
            .unwrap()
            .monic_grlex();

        // re-verify by exact substitution
        let mut images: Vec<Poly> = (0..n_in).map(|i| Poly::var(&in_ctx, i)).collect();
        images.extend(fs.iter().cloned());
        let residual = cert_poly.substitute_all(&in_ctx, &images);
        let exact = residual.is_zero();
        if !exact && !residual.truncate(r_cap).is_zero() {
            return Err(CrError::Internal(
                "dependence kernel vector failed its residual check".into(),
            ));
        }
        let residual_order = if exact { n.max(full_deg) } else { r_cap };
        return Ok(Some(DependenceCertificate {
            poly: cert_poly,
            d_z,
            d_x,
            residual_order,
            exact,
            indices: indices.to_vec(),
        }));
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// transcendence-degree estimate
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct TrdegReport {
    /// Size of the final independent subset (bound-relative).
    pub estimate: usize,
    /// Component indices kept as independent, in input order.
    pub independent: Vec<usize>,
    /// One certificate per excluded component.
    pub certificates: Vec<DependenceCertificate>,
    pub d_z: u32,
    pub d_x: u32,
    pub order: u32,
    pub advisory: Option<String>,
}

/// Greedy transcendence-degree estimate in input order: a component joins the
/// independent subset when no relation binds it to the subset at the bounds.
pub fn trdeg_estimate(map: &SeriesMap, d_z: u32, d_x: u32, n: u32) -> Result<TrdegReport> {
    let mut independent: Vec<usize> = Vec::new();
    let mut certificates = Vec::new();
    for j in 0..map.n_out {
        let mut subset = independent.clone();
        subset.push(j);
        let fs: Vec<Poly> = subset.iter().map(|&i| map.components[i].clone()).collect();
        match dependence_search_indexed(&fs, &subset, d_z, d_x, n)? {
            None => independent.push(j),
            Some(cert) => certificates.push(cert),
        }
    }
    Ok(TrdegReport {
        estimate: independent.len(),
        independent,
        certificates,
        d_z,
        d_x,
        order: n,
        advisory: advisory_note(map.n_in, map.n_out, d_z, d_x, n),
    })
}

// ---------------------------------------------------------------------------
// perturbation and containment
// ---------------------------------------------------------------------------

/// Perturb the straightened slots of f: slot j (1-based along `slots`) gains
/// the j-fold iterate of varpi = (sin)^a applied to the first straightened
/// component. Output accuracy equals f's.
pub fn perturbation_builder(f: &SeriesMap, slots: &[usize], a: u32) -> Result<SeriesMap> {
    if slots.is_empty() {
        return Err(CrError::BadInput("need at least one straightened slot".into()));
    }
    if a == 0 {
        return Err(CrError::BadInput("vanishing exponent a must be at least 1".into()));
    }
    let mut seen = vec![false; f.n_out];
    for &s in slots {
        if s >= f.n_out {
            return Err(CrError::BadInput(format!("slot {} out of range", s)));
        }
        if seen[s] {
            return Err(CrError::BadInput(format!("slot {} repeated", s)));
        }
        seen[s] = true;
    }
    let base = &f.components[slots[0]];
    if !base.constant_term().is_zero() {
        return Err(CrError::BadInput(
            "first straightened component must vanish at the base point".into(),
        ));
    }
    if base.is_zero() || base.total_degree() == 0 {
        return Err(CrError::BadInput(
            "perturbation needs a nonconstant first straightened component".into(),
        ));
    }
    let order = f.order;
    let sin = SeriesMap::sin(order);
    let varpi = sin.components[0].pow_trunc(a, order);
    let one_var = varpi.ctx().clone();

    let mut components = f.components.clone();
    let mut iterate = varpi.clone();
    for (j, &s) in slots.iter().enumerate() {
        if j > 0 {
            iterate = substitute_series(&varpi, std::slice::from_ref(&iterate), &one_var, order)?;
        }
        let shifted = substitute_series(&iterate, std::slice::from_ref(base), f.ctx(), order)?;
        components[s] = components[s].add(&shifted);
    }
    SeriesMap::new(f.n_in, order, components)
}

#[derive(Clone, Debug)]
pub struct MapsIntoReport {
    pub holds: bool,
    /// Total degree through which the residuals were checked.
    pub order: u32,
    /// Display of the first nonvanishing residual, when any.
    pub first_failure: Option<String>,
}

/// Verify that f sends the source germ into the target: each complexified
/// target generator, pulled back through (f, conj f) and reduced by the
/// source graph relations, must vanish through the given order.
pub fn check_maps_into(
    f: &SeriesMap,
    source: &GraphManifold,
    target: &Manifold,
    order: u32,
) -> Result<MapsIntoReport> {
    if f.n_in != source.n {
        return Err(CrError::BadInput(format!(
            "map expects {} inputs but the source has n = {}",
            f.n_in, source.n
        )));
    }
    let np = target.n();
    if f.n_out != np {
        return Err(CrError::BadInput(format!(
            "map produces {} components but the target has n = {}",
            f.n_out, np
        )));
    }
    if let (Some(pb), Some(tb)) = (&source.base_point, target.base_point()) {
        let image: Vec<GaussRat> = f.components.iter().map(|c| c.evaluate(&pb.coords)).collect();
        if image != tb.coords {
            return Ok(MapsIntoReport {
                holds: false,
                order,
                first_failure: Some("base point of the source does not map to the target base point".into()),
            });
        }
    }

    let src_vars: Vec<Poly> = (0..f.n_in).map(|i| Poly::var(&source.ctx, i)).collect();
    let hol: Vec<Poly> = f
        .components
        .iter()
        .map(|c| c.substitute_all(&source.ctx, &src_vars))
        .collect();
    let mut images: Vec<Poly> = Vec::with_capacity(2 * np);
    images.extend(hol.iter().cloned());
    for p in &hol {
        images.push(p.conjugate()?);
    }

    for gen in target.complexified_gens() {
        let pulled = gen.substitute_all(&source.ctx, &images);
        let residual = source.substitute_graph(&pulled).truncate(order);
        if !residual.is_zero() {
            return Ok(MapsIntoReport {
                holds: false,
                order,
                first_failure: Some(format!("{}", residual)),
            });
        }
    }
    Ok(MapsIntoReport { holds: true, order, first_failure: None })
}

#[derive(Clone, Debug)]
pub struct TrdegInequalityReport {
    pub maps_into: bool,
    pub estimate: usize,
    pub kappa: usize,
    pub holds: bool,
    pub trdeg: TrdegReport,
}

/// The main inequality on a constructed instance: the transcendence-degree
/// estimate of f may not exceed the degeneracy kappa of the straightened
/// product target. The containment f(M) in M' is a precondition.
pub fn trdeg_inequality_check(
    f: &SeriesMap,
    source: &GraphManifold,
    target: &GraphManifold,
    d_z: u32,
    d_x: u32,
    n: u32,
    seed: u64,
) -> Result<TrdegInequalityReport> {
    let mi = check_maps_into(f, source, &Manifold::Graph(target.clone()), n)?;
    if !mi.holds {
        return Err(CrError::BadInput(format!(
            "the map does not send {} into {} ({})",
            source.name,
            target.name,
            mi.first_failure.unwrap_or_default()
        )));
    }
    let kr = crate::cr_fields::kappa(target, seed)?;
    let trdeg = trdeg_estimate(f, d_z, d_x, n)?;
    let holds = trdeg.estimate <= kr.kappa;
    Ok(TrdegInequalityReport {
        maps_into: true,
        estimate: trdeg.estimate,
        kappa: kr.kappa,
        holds,
        trdeg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn coeff(p: &Poly, e: &[u32]) -> GaussRat {
        p.terms()
            .find(|(expo, _)| expo.as_slice() == e)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(GaussRat::zero)
    }

    #[test]
    fn builtin_series_coefficients() {
        let s = SeriesMap::sin(9);
        assert_eq!(coeff(&s.components[0], &[1]), GaussRat::from_int(1));
        assert_eq!(coeff(&s.components[0], &[3]), GaussRat::from_frac(-1, 6));
        assert_eq!(coeff(&s.components[0], &[5]), GaussRat::from_frac(1, 120));
        assert_eq!(coeff(&s.components[0], &[7]), GaussRat::from_frac(-1, 5040));
        assert_eq!(coeff(&s.components[0], &[9]), GaussRat::from_frac(1, 362880));
        assert_eq!(coeff(&s.components[0], &[2]), GaussRat::zero());

        let e = SeriesMap::exp(4);
        assert_eq!(coeff(&e.components[0], &[0]), GaussRat::from_int(1));
        assert_eq!(coeff(&e.components[0], &[3]), GaussRat::from_frac(1, 6));
        assert_eq!(coeff(&e.components[0], &[4]), GaussRat::from_frac(1, 24));
    }

    #[test]
    fn sine_of_sine_series() {
        let s = SeriesMap::sin(6);
        let ss = s.compose(&s).unwrap();
        assert_eq!(coeff(&ss.components[0], &[1]), GaussRat::from_int(1));
        assert_eq!(coeff(&ss.components[0], &[3]), GaussRat::from_frac(-1, 3));
        assert_eq!(coeff(&ss.components[0], &[5]), GaussRat::from_frac(1, 10));
    }

    #[test]
    fn composition_needs_positive_valuation() {
        let s = SeriesMap::sin(6);
        let e = SeriesMap::exp(6);
        assert!(s.compose(&e).is_err());
    }

    #[test]
    fn cusp_yields_the_classic_certificate() {
        let m = SeriesMap::polynomial(1, &["z1^2", "z1^3"], 10).unwrap();
        let cert = dependence_search(&m.components, 0, 3, 10).unwrap().unwrap();
        let expect = parse_poly("x1^3 - x2^2", cert.poly.ctx()).unwrap();
        assert_eq!(cert.poly, expect);
        assert!(cert.exact);
        assert!(cert.residual_order >= 10);
    }

    #[test]
    fn affine_relation_is_found_at_z_degree_zero() {
        let m = SeriesMap::polynomial(1, &["z1", "1 + z1"], 10).unwrap();
        let cert = dependence_search(&m.components, 1, 1, 10).unwrap().unwrap();
        let expect = parse_poly("x2 - x1 - 1", cert.poly.ctx()).unwrap();
        assert!(cert.poly == expect || cert.poly == expect.neg());
        assert!(cert.exact);
        // the ladder found it without using any z-monomials
        assert!(!cert.poly.uses_var(0));
    }

    #[test]
    fn truncated_sine_has_no_small_relation() {
        let s = SeriesMap::sin(20);
        assert!(dependence_search(&s.components, 4, 4, 20).unwrap().is_none());
    }

    #[test]
    fn iterated_sine_family_estimate_is_full() {
        let fam = iterated_sin_family(3, 64).unwrap();
        let report = trdeg_estimate(&fam, 4, 4, 20).unwrap();
        assert_eq!(report.estimate, 3);
        assert_eq!(report.independent, vec![0, 1, 2]);
        assert!(report.certificates.is_empty());
        assert!(report.advisory.is_some());
    }

    #[test]
    fn polynomial_components_are_all_dependent() {
        let m = SeriesMap::polynomial(2, &["z1^2", "z2", "z1*z2"], 10).unwrap();
        let report = trdeg_estimate(&m, 4, 4, 10).unwrap();
        assert_eq!(report.estimate, 0);
        assert_eq!(report.certificates.len(), 3);
        for cert in &report.certificates {
            assert!(cert.exact);
        }
    }

    #[test]
    fn single_variable_is_algebraic_over_the_base() {
        let m = SeriesMap::polynomial(1, &["z1"], 10).unwrap();
        let report = trdeg_estimate(&m, 4, 4, 10).unwrap();
        assert_eq!(report.estimate, 0);
    }

    #[test]
    fn perturbation_of_the_line_identity() {
        let f = SeriesMap::identity(1, 12);
        let g = perturbation_builder(&f, &[0], 2).unwrap();
        // z + sin^2 z = z + z^2 - z^4/3 + 2 z^6/45 - ...
        assert_eq!(coeff(&g.components[0], &[1]), GaussRat::from_int(1));
        assert_eq!(coeff(&g.components[0], &[2]), GaussRat::from_int(1));
        assert_eq!(coeff(&g.components[0], &[4]), GaussRat::from_frac(-1, 3));
        assert_eq!(coeff(&g.components[0], &[6]), GaussRat::from_frac(2, 45));
    }

    #[test]
    fn perturbation_with_high_vanishing_is_identity_below_order() {
        let f = SeriesMap::identity(1, 10);
        let g = perturbation_builder(&f, &[0], 10).unwrap();
        let diff = g.components[0].sub(&f.components[0]);
        assert!(diff.truncate(9).is_zero());
        assert!(!diff.is_zero());
    }

    #[test]
    fn perturbation_touches_only_named_slots() {
        let f = SeriesMap::identity(3, 8);
        let g = perturbation_builder(&f, &[1], 1).unwrap();
        assert_eq!(g.components[0], f.components[0]);
        assert_eq!(g.components[2], f.components[2]);
        // component 1 becomes z2 + sin z2
        assert_eq!(coeff(&g.components[1], &[0, 1, 0]), GaussRat::from_int(2));
        assert_eq!(coeff(&g.components[1], &[0, 3, 0]), GaussRat::from_frac(-1, 6));
    }

    #[test]
    fn perturbation_rejects_constant_maps() {
        let f = SeriesMap::polynomial(1, &["2"], 6).unwrap();
        assert!(perturbation_builder(&f, &[0], 1).is_err());
        let z = SeriesMap::polynomial(1, &["1 + z1"], 6).unwrap();
        assert!(perturbation_builder(&z, &[0], 1).is_err());
    }

    #[test]
    fn maps_into_verdicts() {
        let heis = corpus::heisenberg2();
        let id2 = SeriesMap::identity(2, 10);
        assert!(check_maps_into(&id2, &heis, &Manifold::Graph(heis.clone()), 10).unwrap().holds);

        let product = corpus::product_c3();
        let bend = SeriesMap::polynomial(3, &["z1", "z2 + z2^2", "z3"], 10).unwrap();
        assert!(check_maps_into(&bend, &product, &Manifold::Graph(product.clone()), 10)
            .unwrap()
            .holds);

        let shear = SeriesMap::polynomial(2, &["z1", "z2 + z1"], 10).unwrap();
        let report = check_maps_into(&shear, &heis, &Manifold::Graph(heis.clone()), 10).unwrap();
        assert!(!report.holds);
        assert!(report.first_failure.is_some());
    }

    #[test]
    fn trdeg_inequality_instances() {
        let heis = corpus::heisenberg2();
        let id2 = SeriesMap::identity(2, 10);
        let r = trdeg_inequality_check(&id2, &heis, &heis, 4, 4, 10, 7).unwrap();
        assert_eq!((r.estimate, r.kappa), (0, 0));
        assert!(r.holds);

        let product = corpus::product_c3();
        let poly_map = SeriesMap::polynomial(3, &["z1", "z2^2", "z3"], 10).unwrap();
        let r = trdeg_inequality_check(&poly_map, &product, &product, 4, 4, 10, 7).unwrap();
        assert_eq!((r.estimate, r.kappa), (0, 1));
        assert!(r.holds);

        let id3 = SeriesMap::identity(3, 20);
        let perturbed = perturbation_builder(&id3, &[1], 1).unwrap();
        let r = trdeg_inequality_check(&perturbed, &product, &product, 4, 4, 20, 7).unwrap();
        assert_eq!((r.estimate, r.kappa), (1, 1));
        assert!(r.holds);
    }

    #[test]
    fn inequality_rejects_non_containment() {
        let heis = corpus::heisenberg2();
        let shear = SeriesMap::polynomial(2, &["z1", "z2 + z1"], 10).unwrap();
        assert!(trdeg_inequality_check(&shear, &heis, &heis, 4, 4, 10, 7).is_err());
    }
}
