//! The exact field abstraction every operator and solver in this crate is
//! generic over.

use std::fmt::Debug;
use std::ops::{Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Arbitrary-precision rationals.
pub type Rational = BigRational;

/// An exact field. Equality is structural equality of canonical forms.
///
/// Floating point types deliberately do not implement this: every identity
/// checked by the crate is an exact equality.
pub trait Field:
    Clone + PartialEq + Debug + Send + Sync + Zero + One + Neg<Output = Self> + Sub<Output = Self>
{
    fn add_ref(&self, other: &Self) -> Self;
    fn sub_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self) -> Option<Self>;
    fn from_rational(r: &Rational) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(n)))
    }

    fn neg_ref(&self) -> Self {
        -self.clone()
    }

    fn div_ref(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self.mul_ref(&i))
    }

    fn add_assign_ref(&mut self, other: &Self) {
        *self = self.add_ref(other);
    }

    fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        acc
    }
}

impl Field for Rational {
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
}

pub(crate) fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Formats a rational as the `"numerator/denominator"` wire string.
pub fn rational_to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"a/b"` or `"a"`.
pub fn rational_from_str(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_wire_format() {
        let r = Rational::new(BigInt::from(-6), BigInt::from(4));
        assert_eq!(rational_to_string(&r), "-3/2");
        assert_eq!(rational_from_str("-3/2"), Some(r));
        assert_eq!(rational_from_str("7"), Some(rat(7)));
        assert_eq!(rational_from_str("1/0"), None);
        assert_eq!(rational_from_str("x"), None);
    }

    #[test]
    fn pow_by_squaring() {
        assert_eq!(rat(3).pow(5), rat(243));
        assert_eq!(rat(3).pow(0), rat(1));
    }
}
