//! Exact Gaussian rationals: complex numbers with `BigRational` real and
//! imaginary parts. All toolkit coefficients live here; nothing in the
//! symbolic layer ever touches floating point.

use num::{BigInt, BigRational, Signed, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

/// An element of Q(i), kept in lowest terms by `BigRational`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    #[inline]
    pub fn zero() -> Self {
        GaussRat::new(BigRational::zero(), BigRational::zero())
    }

    #[inline]
    pub fn one() -> Self {
        GaussRat::from_int(1)
    }

    /// The imaginary unit.
    #[inline]
    pub fn i() -> Self {
        GaussRat::new(BigRational::zero(), BigRational::from_integer(BigInt::from(1)))
    }

    #[inline]
    pub fn from_int(n: i64) -> Self {
        GaussRat::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GaussRat::new(
            BigRational::from_integer(BigInt::from(re)),
            BigRational::from_integer(BigInt::from(im)),
        )
    }

    /// Exact rational a/b promoted to a real Gaussian rational.
    pub fn from_frac(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        GaussRat::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    pub fn from_fracs(re: (i64, i64), im: (i64, i64)) -> Self {
        assert!(re.1 != 0 && im.1 != 0, "zero denominator");
        GaussRat::new(
            BigRational::new(BigInt::from(re.0), BigInt::from(re.1)),
            BigRational::new(BigInt::from(im.0), BigInt::from(im.1)),
        )
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    #[inline]
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    #[inline]
    pub fn is_one(&self) -> bool {
        self.im.is_zero() && self.re == BigRational::from_integer(BigInt::from(1))
    }

    #[inline]
    pub fn conj(&self) -> Self {
        GaussRat::new(self.re.clone(), -self.im.clone())
    }

    /// |z|^2 as an exact rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; panics on zero (callers guard).
    pub fn inv(&self) -> Self {
        let n = self.norm_sqr();
        assert!(!n.is_zero(), "division by zero GaussRat");
        GaussRat::new(&self.re / &n, -(&self.im / &n))
    }

    /// Deterministic total order (re, then im) used for pivot tie-breaks.
    /// Not a field order; only determinism matters.
    pub fn cmp_lex(&self, other: &Self) -> std::cmp::Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }

    /// Approximate double value, for the numeric layer only.
    pub fn to_f64(&self) -> (f64, f64) {
        (rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    // Reference arithmetic without operator-trait imports at call sites.

    pub fn add(&self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re + &o.re, &self.im + &o.im)
    }

    pub fn sub(&self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re - &o.re, &self.im - &o.im)
    }

    pub fn mul(&self, o: &GaussRat) -> GaussRat {
        GaussRat::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }

    pub fn div(&self, o: &GaussRat) -> GaussRat {
        self.mul(&o.inv())
    }
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    let num = r.numer();
    let den = r.denom();
    // Scale down in tandem so huge integers still convert.
    let nf = bigint_to_f64(num);
    let df = bigint_to_f64(den);
    nf / df
}

fn bigint_to_f64(n: &BigInt) -> f64 {
    let s = n.to_string();
    s.parse::<f64>().unwrap_or(f64::NAN)
}

/// Parses "p" or "p/q" into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).ok()?;
        let d = BigInt::from_str(d.trim()).ok()?;
        if d.is_zero() {
            return None;
        }
        Some(BigRational::new(n, d))
    } else {
        let n = BigInt::from_str(s).ok()?;
        Some(BigRational::from_integer(n))
    }
}

fn fmt_rat(r: &BigRational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussRat {
    /// Canonical form: "0", "3/2", "-2", "i", "-i", "1/2i", "3/2+1/2i", "1-i".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one = BigRational::from_integer(BigInt::from(1));
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rat(&self.re));
        }
        let im_part = |im: &BigRational| -> String {
            if im == &one {
                "i".to_string()
            } else if im == &(-one.clone()) {
                "-i".to_string()
            } else {
                format!("{}i", fmt_rat(im))
            }
        };
        if self.re.is_zero() {
            return write!(f, "{}", im_part(&self.im));
        }
        if self.im.is_negative() {
            let pos = -self.im.clone();
            let tail = if pos == one { "i".to_string() } else { format!("{}i", fmt_rat(&pos)) };
            write!(f, "{}-{}", fmt_rat(&self.re), tail)
        } else {
            write!(f, "{}+{}", fmt_rat(&self.re), im_part(&self.im))
        }
    }
}

impl fmt::Debug for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Add for GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: GaussRat) -> GaussRat {
        GaussRat::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Add<&GaussRat> for GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(self.re + &rhs.re, self.im + &rhs.im)
    }
}

impl AddAssign<&GaussRat> for GaussRat {
    fn add_assign(&mut self, rhs: &GaussRat) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Add<&GaussRat> for &GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub<&GaussRat> for &GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Sub for GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: GaussRat) -> GaussRat {
        GaussRat::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Sub<&GaussRat> for GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(self.re - &rhs.re, self.im - &rhs.im)
    }
}

impl SubAssign<&GaussRat> for GaussRat {
    fn sub_assign(&mut self, rhs: &GaussRat) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

fn mul_parts(a: &GaussRat, b: &GaussRat) -> GaussRat {
    GaussRat::new(
        &a.re * &b.re - &a.im * &b.im,
        &a.re * &b.im + &a.im * &b.re,
    )
}

impl Mul for GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: GaussRat) -> GaussRat {
        mul_parts(&self, &rhs)
    }
}

impl Mul<&GaussRat> for &GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: &GaussRat) -> GaussRat {
        mul_parts(self, rhs)
    }
}

impl Mul<&GaussRat> for GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: &GaussRat) -> GaussRat {
        mul_parts(&self, rhs)
    }
}

impl MulAssign<&GaussRat> for GaussRat {
    fn mul_assign(&mut self, rhs: &GaussRat) {
        *self = mul_parts(self, rhs);
    }
}

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re, -self.im)
    }
}

impl Div for GaussRat {
    type Output = GaussRat;
    fn div(self, rhs: GaussRat) -> GaussRat {
        mul_parts(&self, &rhs.inv())
    }
}

impl Div<&GaussRat> for &GaussRat {
    type Output = GaussRat;
    fn div(self, rhs: &GaussRat) -> GaussRat {
        mul_parts(self, &rhs.inv())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_matches_hand_values() {
        let a = GaussRat::from_fracs((3, 2), (1, 2)); // 3/2 + 1/2 i
        let b = GaussRat::from_ints(1, -1); // 1 - i
        let prod = &a * &b;
        // (3/2 + i/2)(1 - i) = 3/2 + 1/2 + i(1/2 - 3/2) = 2 - i
        assert_eq!(prod, GaussRat::from_ints(2, -1));
        let back = &prod / &b;
        assert_eq!(back, a);
    }

    #[test]
    fn inverse_of_i() {
        assert_eq!(GaussRat::i().inv(), GaussRat::from_ints(0, -1));
    }

    #[test]
    fn display_forms() {
        assert_eq!(GaussRat::zero().to_string(), "0");
        assert_eq!(GaussRat::from_frac(-3, 4).to_string(), "-3/4");
        assert_eq!(GaussRat::i().to_string(), "i");
        assert_eq!(GaussRat::from_ints(0, -1).to_string(), "-i");
        assert_eq!(GaussRat::from_fracs((3, 2), (1, 2)).to_string(), "3/2+1/2i");
        assert_eq!(GaussRat::from_ints(1, -2).to_string(), "1-2i");
        assert_eq!(GaussRat::from_fracs((0, 1), (1, 2)).to_string(), "1/2i");
    }

    #[test]
    fn conjugation_is_involutive() {
        let a = GaussRat::from_fracs((-2, 7), (5, 3));
        assert_eq!(a.conj().conj(), a);
        assert!(a.conj().mul(&a).is_real() || !a.norm_sqr().is_zero());
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(parse_rational("3/2").unwrap(), BigRational::new(3.into(), 2.into()));
        assert_eq!(parse_rational("-4").unwrap(), BigRational::from_integer((-4).into()));
        assert!(parse_rational("1/0").is_none());
    }
}
