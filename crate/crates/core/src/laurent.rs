//! Rational functions in a formal variable `v`, used as generic `q`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::field::{Field, Rational};
use crate::poly::{format_terms, Poly};

/// A reduced ratio `v^shift * num(v) / den(v)`.
///
/// Canonical form: `num` and `den` are coprime ordinary polynomials, neither
/// divisible by `v`, and `den` has integer coefficients with content one and
/// a positive leading coefficient. Zero is `0 / 1` with `shift = 0`. Equal
/// values therefore have identical representations.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentRational {
    shift: i64,
    num: Poly,
    den: Poly,
}

impl LaurentRational {
    pub fn new(shift: i64, num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        Self::normalize(shift, num, den)
    }

    fn normalize(mut shift: i64, num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let vn = num.valuation();
        let vd = den.valuation();
        shift += vn as i64 - vd as i64;
        let (mut num, mut den) = (num.shift_down(vn), den.shift_down(vd));
        if den.degree() != Some(0) {
            let g = Poly::gcd(&num, &den);
            if g.degree() != Some(0) {
                num = num.div_rem(&g).0;
                den = den.div_rem(&g).0;
            }
        }
        let (den, factor) = den.primitive_part();
        let num = num.scale(&factor);
        LaurentRational { shift, num, den }
    }

    /// The monomial `c * v^e`.
    pub fn monomial(e: i64, c: Rational) -> Self {
        Self::normalize(e, Poly::constant(c), Poly::one())
    }

    /// `v^e`.
    pub fn v_pow(e: i64) -> Self {
        Self::monomial(e, Rational::one())
    }

    pub fn from_rational(c: Rational) -> Self {
        Self::monomial(0, c)
    }

    /// Builds a Laurent polynomial from `(degree, coefficient)` terms.
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, Rational)>) -> Self {
        let terms: Vec<_> = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        let Some(lo) = terms.iter().map(|(e, _)| *e).min() else {
            return Self::zero();
        };
        let mut p = Poly::zero();
        for (e, c) in terms {
            p = p.add(&Poly::monomial((e - lo) as usize, c));
        }
        Self::normalize(lo, p, Poly::one())
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    /// Numerator as Laurent `(degree, coefficient)` pairs.
    pub fn numerator_terms(&self) -> Vec<(i64, Rational)> {
        laurent_terms(&self.num, self.shift)
    }

    pub fn denominator_terms(&self) -> Vec<(i64, Rational)> {
        laurent_terms(&self.den, 0)
    }

    pub fn is_laurent_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    /// The bar involution `v -> v^{-1}`.
    pub fn bar(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        // v^s N(1/v) / D(1/v) = v^{s - deg N + deg D} rev(N) / rev(D)
        let dn = self.num.degree().unwrap_or(0) as i64;
        let dd = self.den.degree().unwrap_or(0) as i64;
        Self::normalize(-self.shift - dn + dd, self.num.reversed(), self.den.reversed())
    }

    /// Whether the polynomial `divisor` (in `v`, not divisible by `v`)
    /// divides the reduced denominator.
    pub fn denominator_divisible_by(&self, divisor: &Poly) -> bool {
        let d = divisor.shift_down(divisor.valuation());
        d.degree().is_some_and(|k| k > 0) && self.den.div_rem(&d).1.is_zero()
    }
}

fn laurent_terms(p: &Poly, shift: i64) -> Vec<(i64, Rational)> {
    p.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i as i64 + shift, c.clone()))
        .collect()
}

impl Zero for LaurentRational {
    fn zero() -> Self {
        LaurentRational { shift: 0, num: Poly::zero(), den: Poly::one() }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for LaurentRational {
    fn one() -> Self {
        LaurentRational { shift: 0, num: Poly::one(), den: Poly::one() }
    }
}

impl Field for LaurentRational {
    fn add_ref(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let s = self.shift.min(other.shift);
        let a = self.num.shift_up((self.shift - s) as usize);
        let b = other.num.shift_up((other.shift - s) as usize);
        if self.den == other.den {
            Self::normalize(s, a.add(&b), self.den.clone())
        } else {
            Self::normalize(s, a.mul(&other.den).add(&b.mul(&self.den)), self.den.mul(&other.den))
        }
    }

    fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }

    fn mul_ref(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let shift = self.shift + other.shift;
        if self.den.degree() == Some(0) && other.den.degree() == Some(0) {
            let num = self.num.mul(&other.num);
            return LaurentRational { shift, num, den: Poly::one() };
        }
        // cross-cancel before multiplying to keep the gcd small
        let g1 = Poly::gcd(&self.num, &other.den);
        let g2 = Poly::gcd(&other.num, &self.den);
        let n1 = self.num.div_rem(&g1).0;
        let d2 = other.den.div_rem(&g1).0;
        let n2 = other.num.div_rem(&g2).0;
        let d1 = self.den.div_rem(&g2).0;
        let (den, factor) = d1.mul(&d2).primitive_part();
        LaurentRational { shift, num: n1.mul(&n2).scale(&factor), den }
    }

    fn neg_ref(&self) -> Self {
        LaurentRational { shift: self.shift, num: self.num.neg(), den: self.den.clone() }
    }

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Self::normalize(-self.shift, self.den.clone(), self.num.clone()))
        }
    }

    fn from_rational(r: &Rational) -> Self {
        Self::from_rational(r.clone())
    }
}

impl Add for LaurentRational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.add_ref(&rhs)
    }
}

impl Sub for LaurentRational {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.sub_ref(&rhs)
    }
}

impl Mul for LaurentRational {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.mul_ref(&rhs)
    }
}

impl Neg for LaurentRational {
    type Output = Self;
    fn neg(self) -> Self {
        self.neg_ref()
    }
}

impl<'a> Add<&'a LaurentRational> for &'a LaurentRational {
    type Output = LaurentRational;
    fn add(self, rhs: Self) -> LaurentRational {
        self.add_ref(rhs)
    }
}

impl<'a> Sub<&'a LaurentRational> for &'a LaurentRational {
    type Output = LaurentRational;
    fn sub(self, rhs: Self) -> LaurentRational {
        self.sub_ref(rhs)
    }
}

impl<'a> Mul<&'a LaurentRational> for &'a LaurentRational {
    type Output = LaurentRational;
    fn mul(self, rhs: Self) -> LaurentRational {
        self.mul_ref(rhs)
    }
}

impl fmt::Display for LaurentRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = self.numerator_terms();
        let num = format_terms(num.iter().map(|(e, c)| (*e, c)), "v");
        if self.is_laurent_polynomial() {
            // den is the constant 1 after normalization
            write!(f, "{num}")
        } else {
            let den = self.denominator_terms();
            let den = format_terms(den.iter().map(|(e, c)| (*e, c)), "v");
            write!(f, "({num})/({den})")
        }
    }
}

impl fmt::Debug for LaurentRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;

    fn v(e: i64) -> LaurentRational {
        LaurentRational::v_pow(e)
    }

    #[test]
    fn canonical_form_is_unique() {
        // (v^2 - 1) / (v - 1) == v + 1
        let a = LaurentRational::new(0, Poly::from_i64s(&[-1, 0, 1]), Poly::from_i64s(&[-1, 1]));
        let b = LaurentRational::from_terms([(0, rat(1)), (1, rat(1))]);
        assert_eq!(a, b);
        // 1 / (v + v^{-1}) == v / (v^2 + 1)
        let c = (v(1) + v(-1)).inv().unwrap();
        assert_eq!(c.denominator(), &Poly::from_i64s(&[1, 0, 1]));
        assert_eq!(c.numerator_terms(), vec![(1, rat(1))]);
        // scaling numerator and denominator together changes nothing
        let d = LaurentRational::new(1, Poly::from_i64s(&[2]), Poly::from_i64s(&[2, 0, 2]));
        assert_eq!(c, d);
    }

    #[test]
    fn bar_is_an_involutive_homomorphism() {
        let a = (v(3) - LaurentRational::from_rational(rat(2))) * (v(1) + v(-2)).inv().unwrap();
        let b = v(-1) + LaurentRational::from_rational(rat(5));
        assert_eq!(a.bar().bar(), a);
        assert_eq!((a.clone() * b.clone()).bar(), a.bar() * b.bar());
        assert_eq!((a.clone() + b.clone()).bar(), a.bar() + b.bar());
    }

    #[test]
    fn divisibility_of_denominator() {
        let q3 = v(2) + LaurentRational::one() + v(-2);
        let x = q3.inv().unwrap();
        let p = Poly::from_i64s(&[1, 0, 1, 0, 1]);
        assert!(x.denominator_divisible_by(&p));
        assert!(!q3.denominator_divisible_by(&p));
    }
}
