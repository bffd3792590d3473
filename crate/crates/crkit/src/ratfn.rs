//! Rational functions: quotients of polynomials with cross-multiplicative
//! equality. No multivariate gcd is attempted; denominators are kept monic
//! under graded lex and stripped of scalar content only.

use crate::error::CrError;
use crate::gauss::GaussRat;
use crate::poly::Poly;
use crate::vars::VarContext;
use std::fmt;
use std::sync::Arc;

#[derive(Clone)]
pub struct RatFn {
    num: Poly,
    den: Poly,
}

impl RatFn {
    pub fn new(num: Poly, den: Poly) -> Result<Self, CrError> {
        if den.is_zero() {
            return Err(CrError::DivisionByZero);
        }
        Ok(RatFn::normalized(num, den))
    }

    fn normalized(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RatFn { den: Poly::one(num.ctx()), num };
        }
        let lc = den.lead_coeff_grlex();
        if lc.is_one() {
            RatFn { num, den }
        } else {
            let inv = lc.inv();
            RatFn { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        let one = Poly::one(p.ctx());
        RatFn { num: p, den: one }
    }

    pub fn zero(ctx: &Arc<VarContext>) -> Self {
        RatFn::from_poly(Poly::zero(ctx))
    }

    pub fn one(ctx: &Arc<VarContext>) -> Self {
        RatFn::from_poly(Poly::one(ctx))
    }

    #[inline]
    pub fn num(&self) -> &Poly {
        &self.num
    }

    #[inline]
    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn ctx(&self) -> &Arc<VarContext> {
        self.num.ctx()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.n_terms() == 1 && self.den.total_degree() == 0
    }

    pub fn add(&self, other: &RatFn) -> RatFn {
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        RatFn::normalized(num, den)
    }

    pub fn sub(&self, other: &RatFn) -> RatFn {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RatFn {
        RatFn { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, other: &RatFn) -> RatFn {
        RatFn::normalized(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn div(&self, other: &RatFn) -> Result<RatFn, CrError> {
        if other.is_zero() {
            return Err(CrError::DivisionByZero);
        }
        Ok(RatFn::normalized(self.num.mul(&other.den), self.den.mul(&other.num)))
    }

    pub fn scale(&self, c: &GaussRat) -> RatFn {
        RatFn { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn derivative(&self, i: usize) -> RatFn {
        let dn = self.num.partial_derivative(i);
        let dd = self.den.partial_derivative(i);
        if dd.is_zero() {
            return RatFn::normalized(dn, self.den.clone());
        }
        let num = dn.mul(&self.den).sub(&self.num.mul(&dd));
        let den = self.den.mul(&self.den);
        RatFn::normalized(num, den)
    }

    pub fn conjugate(&self) -> Result<RatFn, CrError> {
        Ok(RatFn::normalized(self.num.conjugate()?, self.den.conjugate()?))
    }

    /// Exact evaluation; None at a pole of the representation.
    pub fn evaluate(&self, point: &[GaussRat]) -> Option<GaussRat> {
        let d = self.den.evaluate(point);
        if d.is_zero() {
            return None;
        }
        Some(self.num.evaluate(point).div(&d))
    }

    pub fn total_degree_bound(&self) -> u32 {
        self.num.total_degree() + self.den.total_degree()
    }
}

impl PartialEq for RatFn {
    /// Cross-multiplicative: a/b == c/d iff ad == cb.
    fn eq(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl Eq for RatFn {}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    #[test]
    fn cross_multiplicative_equality() {
        let ctx = VarContext::paired(1);
        let z = parse_poly("z1", &ctx).unwrap();
        let z2 = parse_poly("z1^2", &ctx).unwrap();
        let z3 = parse_poly("z1^3", &ctx).unwrap();
        // z^2/z == z^3/z^2 without any gcd computation
        let a = RatFn::new(z2.clone(), z.clone()).unwrap();
        let b = RatFn::new(z3, z2).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, RatFn::from_poly(z));
    }

    #[test]
    fn pole_reports_none() {
        let ctx = VarContext::paired(1);
        let one = Poly::one(&ctx);
        let z = parse_poly("z1", &ctx).unwrap();
        let f = RatFn::new(one, z).unwrap();
        let origin = vec![GaussRat::zero(), GaussRat::zero()];
        assert!(f.evaluate(&origin).is_none());
    }

    #[test]
    fn quotient_rule() {
        let ctx = VarContext::paired(1);
        let z = parse_poly("z1", &ctx).unwrap();
        let one = Poly::one(&ctx);
        // d/dz (1/z) = -1/z^2
        let f = RatFn::new(one, z.clone()).unwrap();
        let df = f.derivative(0);
        let want = RatFn::new(
            parse_poly("-1", &ctx).unwrap(),
            z.mul(&z),
        )
        .unwrap();
        assert_eq!(df, want);
    }
}
