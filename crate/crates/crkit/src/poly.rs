//! Sparse multivariate polynomials over the Gaussian rationals.
//!
//! Terms are stored in a BTreeMap keyed by exponent vectors, so all
//! iteration is deterministic. Monomial orders live in the ideal module;
//! the ring itself only needs graded lex for printing and leading terms.

use crate::error::CrError;
use crate::gauss::GaussRat;
use crate::vars::{VarContext, VarKind};
use num::Zero;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub type Expo = Vec<u32>;

/// Graded lexicographic comparison of exponent vectors.
pub fn grlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&e| e as u64).sum();
    let db: u64 = b.iter().map(|&e| e as u64).sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

#[derive(Clone)]
pub struct Poly {
    ctx: Arc<VarContext>,
    terms: BTreeMap<Expo, GaussRat>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        *self.ctx == *other.ctx && self.terms == other.terms
    }
}

impl Eq for Poly {}

impl Poly {
    pub fn zero(ctx: &Arc<VarContext>) -> Self {
        Poly { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ctx: &Arc<VarContext>, c: GaussRat) -> Self {
        let mut p = Poly::zero(ctx);
        if !c.is_zero() {
            p.terms.insert(vec![0; ctx.len()], c);
        }
        p
    }

    pub fn one(ctx: &Arc<VarContext>) -> Self {
        Poly::constant(ctx, GaussRat::one())
    }

    pub fn var(ctx: &Arc<VarContext>, i: usize) -> Self {
        assert!(i < ctx.len(), "variable index out of range");
        let mut e = vec![0; ctx.len()];
        e[i] = 1;
        let mut p = Poly::zero(ctx);
        p.terms.insert(e, GaussRat::one());
        p
    }

    pub fn monomial(ctx: &Arc<VarContext>, expo: Expo, c: GaussRat) -> Self {
        assert_eq!(expo.len(), ctx.len());
        let mut p = Poly::zero(ctx);
        if !c.is_zero() {
            p.terms.insert(expo, c);
        }
        p
    }

    #[inline]
    pub fn ctx(&self) -> &Arc<VarContext> {
        &self.ctx
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Expo, &GaussRat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, expo: &[u32]) -> GaussRat {
        self.terms.get(expo).cloned().unwrap_or_else(GaussRat::zero)
    }

    pub fn constant_term(&self) -> GaussRat {
        self.coeff(&vec![0; self.ctx.len()])
    }

    /// Max total degree; zero polynomial reports 0.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    pub fn uses_var(&self, i: usize) -> bool {
        self.terms.keys().any(|e| e[i] > 0)
    }

    fn insert_add(&mut self, expo: Expo, c: &GaussRat) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&expo) {
            Some(cur) => {
                *cur += c;
                if cur.is_zero() {
                    self.terms.remove(&expo);
                }
            }
            None => {
                self.terms.insert(expo, c.clone());
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert!(*self.ctx == *other.ctx, "context mismatch");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert_add(e.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &GaussRat) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.ctx);
        }
        Poly {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert!(*self.ctx == *other.ctx, "context mismatch");
        let mut out = Poly::zero(&self.ctx);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Expo = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.insert_add(e, &(ca * cb));
            }
        }
        out
    }

    /// Product truncated to total degree <= cap; skips cross terms early.
    pub fn mul_trunc(&self, other: &Poly, cap: u32) -> Poly {
        assert!(*self.ctx == *other.ctx, "context mismatch");
        let mut out = Poly::zero(&self.ctx);
        for (ea, ca) in &self.terms {
            let da: u32 = ea.iter().sum();
            if da > cap {
                continue;
            }
            for (eb, cb) in &other.terms {
                let db: u32 = eb.iter().sum();
                if da + db > cap {
                    continue;
                }
                let e: Expo = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.insert_add(e, &(ca * cb));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::one(&self.ctx);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn pow_trunc(&self, k: u32, cap: u32) -> Poly {
        let mut out = Poly::one(&self.ctx);
        for _ in 0..k {
            out = out.mul_trunc(self, cap);
        }
        out
    }

    pub fn truncate(&self, cap: u32) -> Poly {
        Poly {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() <= cap)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn partial_derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero(&self.ctx);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            let k = c * &GaussRat::from_int(e[i] as i64);
            out.insert_add(e2, &k);
        }
        out
    }

    /// General substitution: every variable of this context is mapped to a
    /// polynomial in `target`. Images are indexed by variable.
    pub fn substitute_all(&self, target: &Arc<VarContext>, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.ctx.len(), "one image per variable");
        for im in images {
            assert!(*im.ctx == **target, "image context mismatch");
        }
        let mut pow_cache: Vec<BTreeMap<u32, Poly>> = vec![BTreeMap::new(); images.len()];
        let mut out = Poly::zero(target);
        for (e, c) in &self.terms {
            let mut term = Poly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if !pow_cache[i].contains_key(&k) {
                    let p = images[i].pow(k);
                    pow_cache[i].insert(k, p);
                }
                term = term.mul(&pow_cache[i][&k]);
            }
            out = out.add(&term);
        }
        out
    }

    /// Substitute a single variable, staying in the same context.
    pub fn substitute(&self, i: usize, image: &Poly) -> Poly {
        assert!(*image.ctx == *self.ctx, "image context mismatch");
        let mut pow_cache: BTreeMap<u32, Poly> = BTreeMap::new();
        let mut out = Poly::zero(&self.ctx);
        for (e, c) in &self.terms {
            let k = e[i];
            let mut e2 = e.clone();
            e2[i] = 0;
            let base = Poly::monomial(&self.ctx, e2, c.clone());
            if k == 0 {
                out = out.add(&base);
            } else {
                let powk = pow_cache.entry(k).or_insert_with(|| image.pow(k));
                out = out.add(&base.mul(powk));
            }
        }
        out
    }

    /// Substitute several variables at once with constants.
    pub fn substitute_consts(&self, vals: &BTreeMap<usize, GaussRat>) -> Poly {
        let mut out = Poly::zero(&self.ctx);
        for (e, c) in &self.terms {
            let mut coeff = c.clone();
            let mut e2 = e.clone();
            let mut dead = false;
            for (&i, v) in vals {
                let k = e[i];
                if k > 0 {
                    e2[i] = 0;
                    if v.is_zero() {
                        dead = true;
                        break;
                    }
                    let mut pw = GaussRat::one();
                    for _ in 0..k {
                        pw *= v;
                    }
                    coeff *= &pw;
                }
            }
            if !dead {
                out.insert_add(e2, &coeff);
            }
        }
        out
    }

    /// Full evaluation; `point` supplies one value per context variable.
    pub fn evaluate(&self, point: &[GaussRat]) -> GaussRat {
        assert_eq!(point.len(), self.ctx.len(), "point arity mismatch");
        let mut acc = GaussRat::zero();
        for (e, c) in &self.terms {
            let mut v = c.clone();
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    v *= &point[i];
                }
            }
            acc += &v;
        }
        acc
    }

    /// Numeric evaluation for the flow layer.
    pub fn evaluate_f64(&self, point: &[(f64, f64)]) -> (f64, f64) {
        let mut acc = (0.0f64, 0.0f64);
        for (e, c) in &self.terms {
            let (mut vr, mut vi) = c.to_f64();
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    let (pr, pi) = point[i];
                    let nr = vr * pr - vi * pi;
                    let ni = vr * pi + vi * pr;
                    vr = nr;
                    vi = ni;
                }
            }
            acc.0 += vr;
            acc.1 += vi;
        }
        acc
    }

    /// Formal conjugation: coefficients conjugate, every variable swaps with
    /// its partner. Errors if an occurring variable has no partner.
    pub fn conjugate(&self) -> Result<Poly, CrError> {
        let n = self.ctx.len();
        let mut out = Poly::zero(&self.ctx);
        for (e, c) in &self.terms {
            let mut e2 = vec![0u32; n];
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                match self.ctx.partner(i) {
                    Some(p) => e2[p] += k,
                    None => {
                        return Err(CrError::NoConjugatePartner(
                            self.ctx.var(i).name.clone(),
                        ))
                    }
                }
            }
            out.insert_add(e2, &c.conj());
        }
        Ok(out)
    }

    /// Reality check: the polynomial equals its own conjugate.
    pub fn is_real(&self) -> bool {
        match self.conjugate() {
            Ok(c) => c == *self,
            Err(_) => false,
        }
    }

    /// Leading exponent under graded lex, if nonzero.
    pub fn lead_grlex(&self) -> Option<&Expo> {
        self.terms.keys().max_by(|a, b| grlex(a, b))
    }

    pub fn lead_coeff_grlex(&self) -> GaussRat {
        match self.lead_grlex() {
            Some(e) => self.terms.get(e).cloned().unwrap_or_else(GaussRat::zero),
            None => GaussRat::zero(),
        }
    }

    /// Divide by the graded-lex leading coefficient, making it 1.
    pub fn monic_grlex(&self) -> Poly {
        let lc = self.lead_coeff_grlex();
        if lc.is_zero() || lc.is_one() {
            return self.clone();
        }
        self.scale(&lc.inv())
    }

    /// Shift variables listed in `center` by constants: v -> v + c.
    pub fn shift(&self, center: &BTreeMap<usize, GaussRat>) -> Poly {
        let mut out = self.clone();
        for (&i, c) in center {
            if c.is_zero() {
                continue;
            }
            let image = Poly::var(&self.ctx, i).add(&Poly::constant(&self.ctx, c.clone()));
            out = out.substitute(i, &image);
        }
        out
    }

    /// Rebuild this polynomial in another context by variable name. Every
    /// occurring variable must exist in `target`.
    pub fn transfer(&self, target: &Arc<VarContext>) -> Result<Poly, CrError> {
        let mut map = Vec::with_capacity(self.ctx.len());
        for i in 0..self.ctx.len() {
            map.push(target.find(&self.ctx.var(i).name));
        }
        let mut out = Poly::zero(target);
        for (e, c) in &self.terms {
            let mut e2 = vec![0u32; target.len()];
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                match map[i] {
                    Some(j) => e2[j] += k,
                    None => {
                        return Err(CrError::UnknownVariable(self.ctx.var(i).name.clone()))
                    }
                }
            }
            out.insert_add(e2, c);
        }
        Ok(out)
    }

    /// Collect as a polynomial in the variables `block`, returning the map
    /// from block-exponents to coefficient polynomials (block vars zeroed).
    pub fn collect_by(&self, block: &[usize]) -> BTreeMap<Expo, Poly> {
        let mut out: BTreeMap<Expo, Poly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let key: Expo = block.iter().map(|&i| e[i]).collect();
            let mut rest = e.clone();
            for &i in block {
                rest[i] = 0;
            }
            out.entry(key)
                .or_insert_with(|| Poly::zero(&self.ctx))
                .insert_add(rest, c);
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    /// Division with remainder by a single divisor under graded lex:
    /// self = q*g + r where no term of r is divisible by lead(g).
    pub fn divide_by(&self, g: &Poly) -> (Poly, Poly) {
        assert!(!g.is_zero(), "division by zero polynomial");
        let lg = g.lead_grlex().unwrap().clone();
        let lgc = g.lead_coeff_grlex();
        let mut p = self.clone();
        let mut q = Poly::zero(&self.ctx);
        let mut r = Poly::zero(&self.ctx);
        while let Some(lp) = p.lead_grlex().cloned() {
            let divisible = lp.iter().zip(&lg).all(|(a, b)| a >= b);
            if divisible {
                let e: Expo = lp.iter().zip(&lg).map(|(a, b)| a - b).collect();
                let c = p.coeff(&lp).div(&lgc);
                let t = Poly::monomial(&self.ctx, e, c);
                q = q.add(&t);
                p = p.sub(&t.mul(g));
            } else {
                let c = p.coeff(&lp);
                r.insert_add(lp.clone(), &c);
                let mut dead = Poly::zero(&self.ctx);
                dead.insert_add(lp, &c);
                p = p.sub(&dead);
            }
        }
        (q, r)
    }

    /// Exact division; None when g does not divide self.
    pub fn div_exact(&self, g: &Poly) -> Option<Poly> {
        let (q, r) = self.divide_by(g);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }

    /// Canonical text form; terms in graded-lex descending order.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut keys: Vec<&Expo> = self.terms.keys().collect();
        keys.sort_by(|a, b| grlex(b, a));
        let mut out = String::new();
        for (ti, e) in keys.iter().enumerate() {
            let c = &self.terms[*e];
            let (neg, mag) = split_sign(c);
            let piece = term_string(&self.ctx, e, &mag);
            if ti == 0 {
                if neg {
                    out.push('-');
                }
                out.push_str(&piece);
            } else if neg {
                out.push_str(" - ");
                out.push_str(&piece);
            } else {
                out.push_str(" + ");
                out.push_str(&piece);
            }
        }
        out
    }
}

/// Pulls a display sign out of a coefficient: negative real part, or zero
/// real part and negative imaginary part, prints as a leading minus.
fn split_sign(c: &GaussRat) -> (bool, GaussRat) {
    use num::Signed;
    let neg = c.re.is_negative() || (c.re.is_zero() && c.im.is_negative());
    if neg {
        (true, -c.clone())
    } else {
        (false, c.clone())
    }
}

fn coeff_string(c: &GaussRat) -> String {
    let s = c.to_string();
    if !c.re.is_zero() && !c.im.is_zero() {
        format!("({})", s)
    } else {
        s
    }
}

fn term_string(ctx: &VarContext, e: &[u32], c: &GaussRat) -> String {
    let mut vars = Vec::new();
    for (i, &k) in e.iter().enumerate() {
        if k == 1 {
            vars.push(ctx.var(i).name.clone());
        } else if k > 1 {
            vars.push(format!("{}^{}", ctx.var(i).name, k));
        }
    }
    if vars.is_empty() {
        return coeff_string(c);
    }
    let mono = vars.join("*");
    if c.is_one() {
        mono
    } else if *c == GaussRat::i() {
        format!("i*{}", mono)
    } else {
        format!("{}*{}", coeff_string(c), mono)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// Real part of a paired-context polynomial evaluated on the diagonal:
/// builds (z_i + zb_i)/2 as a polynomial. Convenience for tube examples.
pub fn re_part(ctx: &Arc<VarContext>, i: usize) -> Poly {
    let n = ctx.len() / 2;
    assert!(i < n);
    Poly::var(ctx, i)
        .add(&Poly::var(ctx, n + i))
        .scale(&GaussRat::from_frac(1, 2))
}

/// Conjugate of a point: swaps nothing positionally, conjugates entries.
pub fn conj_point(p: &[GaussRat]) -> Vec<GaussRat> {
    p.iter().map(|c| c.conj()).collect()
}

/// Assembles the complexified evaluation point (p, conj p) for a paired
/// context of 2n variables.
pub fn diag_point(p: &[GaussRat]) -> Vec<GaussRat> {
    let mut out = Vec::with_capacity(2 * p.len());
    out.extend(p.iter().cloned());
    out.extend(p.iter().map(|c| c.conj()));
    out
}

/// True if every variable the polynomial uses is holomorphic.
pub fn holomorphic_only(p: &Poly) -> bool {
    for (e, _) in p.terms() {
        for (i, &k) in e.iter().enumerate() {
            if k > 0 && p.ctx().var(i).kind == VarKind::Antiholomorphic {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn ctx2() -> Arc<VarContext> {
        VarContext::paired(2)
    }

    #[test]
    fn grlex_orders_degree_first() {
        assert_eq!(grlex(&[2, 0], &[1, 1]), Ordering::Greater); // same degree, lex
        assert_eq!(grlex(&[0, 3], &[2, 0]), Ordering::Greater); // higher degree wins
        assert_eq!(grlex(&[1, 1], &[1, 1]), Ordering::Equal);
    }

    #[test]
    fn product_and_derivative() {
        let ctx = ctx2();
        let z1 = Poly::var(&ctx, 0);
        let zb2 = Poly::var(&ctx, 3);
        let p = z1.pow(2).mul(&zb2); // z1^2 zb2
        let dz1 = p.partial_derivative(0);
        assert_eq!(dz1.render(), "2*z1*zb2");
        assert_eq!(p.partial_derivative(1).render(), "0");
    }

    #[test]
    fn substitution_cancels() {
        // z2^2 - z1^4 vanishes under z2 -> z1^2
        let ctx = ctx2();
        let p = parse_poly("z2^2 - z1^4", &ctx).unwrap();
        let image = parse_poly("z1^2", &ctx).unwrap();
        assert!(p.substitute(1, &image).is_zero());
    }

    #[test]
    fn conjugation_swaps_pairs() {
        let ctx = ctx2();
        let p = parse_poly("(3/2+1/2i)*z1^2*zb1", &ctx).unwrap();
        let c = p.conjugate().unwrap();
        assert_eq!(c.render(), "(3/2-1/2i)*z1*zb1^2");
        assert_eq!(c.conjugate().unwrap(), p);
    }

    #[test]
    fn reality_of_heisenberg_generator() {
        // z2 - zb2 - i z1 zb1 times i is real: i(z2 - zb2) + z1 zb1
        let ctx = ctx2();
        let p = parse_poly("i*z2 - i*zb2 + z1*zb1", &ctx).unwrap();
        assert!(p.is_real());
        let q = parse_poly("z2 - zb2 - i*z1*zb1", &ctx).unwrap();
        assert!(!q.is_real());
    }

    #[test]
    fn evaluation_exact() {
        let ctx = ctx2();
        let p = parse_poly("z1^2*zb1 - 2*z2", &ctx).unwrap();
        let pt = vec![
            GaussRat::from_ints(1, 1),  // z1 = 1+i
            GaussRat::from_int(3),      // z2 = 3
            GaussRat::from_ints(1, -1), // zb1 = conj
            GaussRat::from_int(3),
        ];
        // (1+i)^2 (1-i) = (2i)(1-i) = 2+2i; minus 6 -> -4+2i
        assert_eq!(p.evaluate(&pt), GaussRat::from_ints(-4, 2));
    }

    #[test]
    fn render_round_trip() {
        let ctx = ctx2();
        for s in [
            "(3/2+1/2i)*z1^2*zb1",
            "z1 - zb1",
            "i*z2",
            "-z1^3 + 2*z2*zb2 - 1/2",
            "0",
        ] {
            let p = parse_poly(s, &ctx).unwrap();
            let q = parse_poly(&p.render(), &ctx).unwrap();
            assert_eq!(p, q, "round trip failed for {}", s);
        }
    }

    #[test]
    fn collect_by_groups_block_exponents() {
        let ctx = ctx2();
        // z2 - i z1 zb1: collect by zb1
        let p = parse_poly("z2 - i*z1*zb1", &ctx).unwrap();
        let groups = p.collect_by(&[2]);
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[&vec![0u32]].render(), "z2");
        assert_eq!(groups[&vec![1u32]].render(), "-i*z1");
    }
}
