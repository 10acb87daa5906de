//! Dense univariate polynomials over the rationals.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::field::{rat, Rational};

/// Coefficients are stored lowest degree first with no trailing zeros, so
/// the zero polynomial is the empty vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::from_coeffs(vec![c])
    }

    pub fn monomial(degree: usize, c: Rational) -> Self {
        let mut coeffs = vec![Rational::zero(); degree + 1];
        coeffs[degree] = c;
        Poly::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Poly::from_coeffs(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn lead(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    /// Number of vanishing low-order coefficients (the `v`-adic valuation).
    pub fn valuation(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    /// Divides by `x^k`; the caller guarantees `k <= valuation()`.
    pub fn shift_down(&self, k: usize) -> Self {
        debug_assert!(k <= self.valuation() || self.is_zero());
        Poly::from_coeffs(self.coeffs.iter().skip(k).cloned().collect())
    }

    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    /// `x^deg p(1/x)` where `deg` is the degree of `self`.
    pub fn reversed(&self) -> Self {
        Poly::from_coeffs(self.coeffs.iter().rev().cloned().collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn neg(&self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, s: &Rational) -> Poly {
        if s.is_zero() {
            return Poly::zero();
        }
        Poly { coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Poly::from_coeffs(out)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("polynomial division by zero");
        let lead_inv = divisor.coeffs[dd].recip();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                if !d.is_zero() {
                    rem[k + j] -= &c * d;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    pub fn monic(&self) -> Poly {
        match self.lead() {
            None => Poly::zero(),
            Some(l) => self.scale(&l.recip()),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Returns `(g, s)` with `g = gcd(a, m)` monic and `s * a = g (mod m)`.
    pub fn gcd_ext(a: &Poly, m: &Poly) -> (Poly, Poly) {
        let (mut r0, mut r1) = (a.clone(), m.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = s0.sub(&q.mul(&s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        match r0.lead().cloned() {
            None => (Poly::zero(), Poly::zero()),
            Some(l) => {
                let inv = l.recip();
                (r0.scale(&inv), s0.scale(&inv))
            }
        }
    }

    /// Rescales to integer coefficients with content one and positive
    /// leading coefficient; returns the rescaled polynomial and the factor
    /// applied.
    pub fn primitive_part(&self) -> (Poly, Rational) {
        if self.is_zero() {
            return (Poly::zero(), Rational::one());
        }
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let content = self
            .coeffs
            .iter()
            .fold(BigInt::zero(), |acc, c| acc.gcd(&(c.numer() * (&lcm / c.denom()))));
        let mut factor = Rational::new(lcm, content);
        if self.lead().is_some_and(|l| l.is_negative()) {
            factor = -factor;
        }
        (self.scale(&factor), factor)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_terms(self.coeffs.iter().enumerate().map(|(i, c)| (i as i64, c)), "x"))
    }
}

/// Renders `sum c_e * var^e` compactly, skipping zero terms.
pub(crate) fn format_terms<'a>(
    terms: impl Iterator<Item = (i64, &'a Rational)>,
    var: &str,
) -> String {
    let mut out = String::new();
    for (e, c) in terms {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let a = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mono = match e {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{e}"),
        };
        if a.is_one() && !mono.is_empty() {
            out.push_str(&mono);
        } else if mono.is_empty() {
            out.push_str(&a.to_string());
        } else {
            out.push_str(&format!("{a}*{mono}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
