//! Degree-capped Buchberger, ideal membership, and variable elimination.
//!
//! Bases are flagged `complete` when every S-polynomial reduced to zero
//! within the cap; otherwise membership can only answer yes/unknown.
//! All pair selection and reduction is deterministic.

use crate::error::CrError;
use crate::gauss::GaussRat;
use crate::poly::{grlex, Expo, Poly};
use crate::vars::VarContext;
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::sync::Arc;

const MAX_PAIRS: usize = 50_000;
const MAX_BASIS: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonomialOrder {
    GrLex,
    /// Block elimination order: variables in the mask sort strictly above
    /// the rest (graded lex within each block).
    Elim { mask: Vec<bool> },
}

impl MonomialOrder {
    pub fn elim(ctx: &Arc<VarContext>, drop: &[usize]) -> Self {
        let mut mask = vec![false; ctx.len()];
        for &i in drop {
            mask[i] = true;
        }
        MonomialOrder::Elim { mask }
    }

    pub fn cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        match self {
            MonomialOrder::GrLex => grlex(a, b),
            MonomialOrder::Elim { mask } => {
                let da: u64 = a.iter().zip(mask).filter(|(_, &m)| m).map(|(&e, _)| e as u64).sum();
                let db: u64 = b.iter().zip(mask).filter(|(_, &m)| m).map(|(&e, _)| e as u64).sum();
                match da.cmp(&db) {
                    Ordering::Equal => {}
                    o => return o,
                }
                for ((x, y), &m) in a.iter().zip(b).zip(mask) {
                    if m && x != y {
                        return x.cmp(y);
                    }
                }
                let ra: u64 = a.iter().zip(mask).filter(|(_, &m)| !m).map(|(&e, _)| e as u64).sum();
                let rb: u64 = b.iter().zip(mask).filter(|(_, &m)| !m).map(|(&e, _)| e as u64).sum();
                match ra.cmp(&rb) {
                    Ordering::Equal => {}
                    o => return o,
                }
                for ((x, y), &m) in a.iter().zip(b).zip(mask) {
                    if !m && x != y {
                        return x.cmp(y);
                    }
                }
                Ordering::Equal
            }
        }
    }
}

/// Leading exponent of p under the order; None for zero.
pub fn lead(p: &Poly, ord: &MonomialOrder) -> Option<Expo> {
    p.terms().map(|(e, _)| e.clone()).max_by(|a, b| ord.cmp(a, b))
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn expo_sub(a: &[u32], b: &[u32]) -> Expo {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn expo_lcm(a: &[u32], b: &[u32]) -> Expo {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

/// Multivariate division: p = sum(q_i g_i) + r, no term of r divisible by
/// any lead(g_i). Quotients are not returned; callers only use r.
pub fn normal_form(p: &Poly, divisors: &[(Poly, Expo, GaussRat)], ord: &MonomialOrder) -> Poly {
    let ctx = p.ctx().clone();
    let mut work = p.clone();
    let mut rem = Poly::zero(&ctx);
    while let Some(lp) = lead(&work, ord) {
        let c = work.coeff(&lp);
        let hit = divisors.iter().find(|(_, le, _)| divides(le, &lp));
        match hit {
            Some((g, le, lc)) => {
                let t = Poly::monomial(&ctx, expo_sub(&lp, le), c.div(lc));
                work = work.sub(&t.mul(g));
            }
            None => {
                let mut term = Poly::zero(&ctx);
                term = term.add(&Poly::monomial(&ctx, lp.clone(), c));
                rem = rem.add(&term);
                work = work.sub(&term);
            }
        }
    }
    rem
}

fn with_leads(polys: &[Poly], ord: &MonomialOrder) -> Vec<(Poly, Expo, GaussRat)> {
    polys
        .iter()
        .filter(|p| !p.is_zero())
        .map(|p| {
            let le = lead(p, ord).expect("nonzero");
            let lc = p.coeff(&le);
            (p.clone(), le, lc)
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct Ideal {
    pub ctx: Arc<VarContext>,
    pub gens: Vec<Poly>,
}

impl Ideal {
    pub fn new(ctx: Arc<VarContext>, gens: Vec<Poly>) -> Self {
        for g in &gens {
            assert!(**g.ctx() == *ctx, "generator context mismatch");
        }
        Ideal { ctx, gens }
    }
}

#[derive(Clone)]
pub struct GroebnerBasis {
    pub polys: Vec<Poly>,
    pub order: MonomialOrder,
    /// True when every S-polynomial reduced to zero within the degree cap.
    pub complete: bool,
    pub degree_cap: u32,
}

/// Buchberger with a total-degree cap on processed S-pair lcms and on kept
/// reduction results. Skipping anything marks the basis truncated.
pub fn groebner(ideal: &Ideal, ord: MonomialOrder, degree_cap: u32) -> GroebnerBasis {
    let ctx = ideal.ctx.clone();
    let mut basis: Vec<Poly> = Vec::new();
    for g in &ideal.gens {
        if !g.is_zero() {
            basis.push(make_monic(g, &ord));
        }
    }
    let mut truncated = false;
    // Pair queue keyed by (lcm degree, lcm, i, j) for determinism.
    let mut pairs: BTreeSet<(u64, Expo, usize, usize)> = BTreeSet::new();
    let mut leads: Vec<Expo> = basis.iter().map(|p| lead(p, &ord).unwrap()).collect();
    for i in 0..basis.len() {
        for j in (i + 1)..basis.len() {
            let l = expo_lcm(&leads[i], &leads[j]);
            let d: u64 = l.iter().map(|&e| e as u64).sum();
            pairs.insert((d, l, i, j));
        }
    }
    let mut processed = 0usize;
    while let Some(entry) = pairs.iter().next().cloned() {
        pairs.remove(&entry);
        let (d, l, i, j) = entry;
        processed += 1;
        if processed > MAX_PAIRS || basis.len() > MAX_BASIS {
            truncated = true;
            break;
        }
        if d > degree_cap as u64 {
            truncated = true;
            continue;
        }
        // Coprime leads: S-polynomial reduces to zero, skip.
        let sum: Expo = leads[i].iter().zip(&leads[j]).map(|(a, b)| a + b).collect();
        if sum == l {
            continue;
        }
        let ti = Poly::monomial(&ctx, expo_sub(&l, &leads[i]), GaussRat::one());
        let tj = Poly::monomial(&ctx, expo_sub(&l, &leads[j]), GaussRat::one());
        let s = ti.mul(&basis[i]).sub(&tj.mul(&basis[j]));
        let divs = with_leads(&basis, &ord);
        let r = normal_form(&s, &divs, &ord);
        if r.is_zero() {
            continue;
        }
        if r.total_degree() > degree_cap {
            truncated = true;
            continue;
        }
        let r = make_monic(&r, &ord);
        let lr = lead(&r, &ord).unwrap();
        basis.push(r);
        leads.push(lr);
        let k = basis.len() - 1;
        for i2 in 0..k {
            let l2 = expo_lcm(&leads[i2], &leads[k]);
            let d2: u64 = l2.iter().map(|&e| e as u64).sum();
            pairs.insert((d2, l2, i2, k));
        }
    }
    let polys = interreduce(basis, &ord);
    GroebnerBasis { polys, order: ord, complete: !truncated, degree_cap }
}

fn make_monic(p: &Poly, ord: &MonomialOrder) -> Poly {
    let le = lead(p, ord).expect("nonzero");
    let lc = p.coeff(&le);
    if lc.is_one() {
        p.clone()
    } else {
        p.scale(&lc.inv())
    }
}

fn interreduce(mut basis: Vec<Poly>, ord: &MonomialOrder) -> Vec<Poly> {
    // Drop elements whose lead is divisible by another lead, then reduce
    // tails; repeat once more for a canonical reduced basis.
    loop {
        let mut changed = false;
        let mut keep: Vec<Poly> = Vec::new();
        for (i, p) in basis.iter().enumerate() {
            let lp = lead(p, ord).unwrap();
            let dominated = basis.iter().enumerate().any(|(j, q)| {
                if i == j || q.is_zero() {
                    return false;
                }
                let lq = lead(q, ord).unwrap();
                divides(&lq, &lp) && (lq != lp || j < i)
            });
            if dominated {
                changed = true;
            } else {
                keep.push(p.clone());
            }
        }
        basis = keep;
        let snapshot = basis.clone();
        for i in 0..basis.len() {
            let others: Vec<Poly> = snapshot
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, q)| q.clone())
                .collect();
            let divs = with_leads(&others, ord);
            let r = normal_form(&basis[i], &divs, ord);
            if r != basis[i] {
                changed = true;
            }
            basis[i] = if r.is_zero() { r } else { make_monic(&r, ord) };
        }
        basis.retain(|p| !p.is_zero());
        if !changed {
            break;
        }
    }
    basis.sort_by(|a, b| ord.cmp(&lead(a, ord).unwrap(), &lead(b, ord).unwrap()));
    basis
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Membership {
    Yes,
    No,
    Unknown,
}

impl Membership {
    pub fn as_str(&self) -> &'static str {
        match self {
            Membership::Yes => "yes",
            Membership::No => "no",
            Membership::Unknown => "unknown",
        }
    }
}

/// Membership via normal form. A nonzero remainder only certifies
/// non-membership when the basis is complete.
pub fn ideal_member(p: &Poly, gb: &GroebnerBasis) -> Membership {
    let divs = with_leads(&gb.polys, &gb.order);
    let r = normal_form(p, &divs, &gb.order);
    if r.is_zero() {
        Membership::Yes
    } else if gb.complete {
        Membership::No
    } else {
        Membership::Unknown
    }
}

/// Normal form against a basis; exposed for linear-system assembly.
pub fn reduce_mod(p: &Poly, gb: &GroebnerBasis) -> Poly {
    let divs = with_leads(&gb.polys, &gb.order);
    normal_form(p, &divs, &gb.order)
}

/// Eliminates the variables `drop`, returning generators of the
/// intersection with the subring in the remaining variables, rebuilt in a
/// restricted context. The flag reports whether the elimination is exact
/// (complete basis) or only sound.
pub fn eliminate(
    ideal: &Ideal,
    drop: &[usize],
    degree_cap: u32,
) -> Result<(Ideal, bool), CrError> {
    let ord = MonomialOrder::elim(&ideal.ctx, drop);
    let gb = groebner(ideal, ord, degree_cap);
    let keep: Vec<usize> = (0..ideal.ctx.len()).filter(|i| !drop.contains(i)).collect();
    let (sub_ctx, _) = ideal.ctx.restrict(&keep);
    let mut gens = Vec::new();
    for p in &gb.polys {
        if drop.iter().all(|&i| !p.uses_var(i)) {
            gens.push(p.transfer(&sub_ctx)?);
        }
    }
    Ok((Ideal::new(sub_ctx, gens), gb.complete))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn holo3() -> Arc<VarContext> {
        VarContext::holomorphic(&["z1", "z2", "z3"])
    }

    #[test]
    fn division_reconstructs() {
        let ctx = holo3();
        let p = parse_poly("z1^3*z2 + z2^2 - z1 + 4", &ctx).unwrap();
        let g = parse_poly("z1*z2 - 1", &ctx).unwrap();
        let (q, r) = p.divide_by(&g);
        assert_eq!(q.mul(&g).add(&r), p);
    }

    #[test]
    fn twisted_cubic_elimination() {
        // Eliminating the parameter from (z2 - z1^2, z3 - z1^3) leaves the
        // relation z2^3 - z3^2.
        let ctx = holo3();
        let i = Ideal::new(
            ctx.clone(),
            vec![
                parse_poly("z2 - z1^2", &ctx).unwrap(),
                parse_poly("z3 - z1^3", &ctx).unwrap(),
            ],
        );
        let (eid, exact) = eliminate(&i, &[0], 12).unwrap();
        assert!(exact);
        assert!(!eid.gens.is_empty());
        let gb = groebner(&eid, MonomialOrder::GrLex, 12);
        let rel = parse_poly("z2^3 - z3^2", &eid.ctx).unwrap();
        assert_eq!(ideal_member(&rel, &gb), Membership::Yes);
        // z2 - z3 is not a consequence.
        let not_rel = parse_poly("z2 - z3", &eid.ctx).unwrap();
        assert_eq!(ideal_member(&not_rel, &gb), Membership::No);
    }

    #[test]
    fn membership_three_answers() {
        let ctx = holo3();
        let i = Ideal::new(
            ctx.clone(),
            vec![
                parse_poly("z2 - z1^2", &ctx).unwrap(),
                parse_poly("z3 - z1^3", &ctx).unwrap(),
            ],
        );
        let gb = groebner(&i, MonomialOrder::GrLex, 10);
        assert!(gb.complete);
        let yes = parse_poly("z2 - z1^2", &ctx).unwrap();
        assert_eq!(ideal_member(&yes, &gb), Membership::Yes);
        let no = parse_poly("z1 - 1", &ctx).unwrap();
        assert_eq!(ideal_member(&no, &gb), Membership::No);
        // A cap of 1 cannot finish; nonzero remainders become unknown.
        let gb_tiny = groebner(&i, MonomialOrder::GrLex, 1);
        if !gb_tiny.complete {
            assert_eq!(ideal_member(&no, &gb_tiny), Membership::Unknown);
        }
    }

    #[test]
    fn order_well_defined() {
        let ord = MonomialOrder::Elim { mask: vec![true, false, false] };
        // Any monomial containing the dropped variable beats any without.
        assert_eq!(ord.cmp(&[1, 0, 0], &[0, 5, 5]), Ordering::Greater);
        assert_eq!(ord.cmp(&[0, 2, 0], &[0, 1, 1]), Ordering::Greater);
    }
}
