//! Exact arithmetic in the cyclotomic field generated by `q = e^{i pi / p}`,
//! a primitive `2p`-th root of unity.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::field::{rat, Field, Rational};
use crate::poly::{format_terms, Poly};

/// Precomputed data for `Q[x] / Phi_{2p}(x)`.
pub struct CyclotomicRing {
    p: u32,
    degree: usize,
    /// Monic cyclotomic polynomial, lowest degree first.
    phi: Vec<BigInt>,
    /// `x^(degree + j) mod phi` for `j < degree - 1`.
    overflow: Vec<Vec<BigInt>>,
}

impl CyclotomicRing {
    /// The shared ring for a given `p`; panics for `p < 2`.
    pub fn get(p: u32) -> Arc<CyclotomicRing> {
        assert!(p >= 2, "root of unity order requires p >= 2, got {p}");
        static RINGS: OnceLock<Mutex<HashMap<u32, Arc<CyclotomicRing>>>> = OnceLock::new();
        let mut rings = RINGS.get_or_init(Default::default).lock().unwrap();
        rings
            .entry(p)
            .or_insert_with(|| Arc::new(CyclotomicRing::build(p)))
            .clone()
    }

    fn build(p: u32) -> Self {
        let phi = cyclotomic_polynomial(2 * p as u64);
        let degree = phi.len() - 1;
        let mut overflow = Vec::new();
        // x^degree = -(phi_0 + ... + phi_{d-1} x^{d-1})
        let mut cur: Vec<BigInt> = phi[..degree].iter().map(|c| -c).collect();
        for _ in 0..degree.saturating_sub(1) {
            overflow.push(cur.clone());
            // multiply by x and reduce
            let top = cur[degree - 1].clone();
            let mut next = vec![BigInt::zero(); degree];
            next[1..degree].clone_from_slice(&cur[..(degree - 1)]);
            for (j, c) in phi[..degree].iter().enumerate() {
                next[j] -= &top * c;
            }
            cur = next;
        }
        CyclotomicRing { p, degree, phi, overflow }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Euler phi of `2p`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn phi(&self) -> Poly {
        Poly::from_coeffs(self.phi.iter().map(|c| Rational::from_integer(c.clone())).collect())
    }

    /// Reduces an arbitrary-length coefficient vector modulo `phi`.
    fn reduce(&self, mut c: Vec<Rational>) -> Vec<Rational> {
        let d = self.degree;
        if c.len() <= d {
            c.resize(d, Rational::zero());
            return c;
        }
        // fold powers >= 2d - 1 first by repeated polynomial division
        if c.len() > 2 * d - 1 {
            let (_, r) = Poly::from_coeffs(c).div_rem(&self.phi());
            let mut r = r.into_coeffs();
            r.resize(d, Rational::zero());
            return r;
        }
        let (low, high) = c.split_at_mut(d);
        for (j, h) in high.iter().enumerate() {
            if h.is_zero() {
                continue;
            }
            for (i, t) in self.overflow[j].iter().enumerate() {
                if !t.is_zero() {
                    low[i] += h * Rational::from_integer(t.clone());
                }
            }
        }
        c.truncate(d);
        c
    }
}

impl fmt::Debug for CyclotomicRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(zeta_{})", 2 * self.p)
    }
}

/// Integer coefficients of the `n`-th cyclotomic polynomial.
pub fn cyclotomic_polynomial(n: u64) -> Vec<BigInt> {
    // x^n - 1 divided by Phi_d for every proper divisor d
    let mut poly = vec![BigInt::zero(); n as usize + 1];
    poly[0] = BigInt::from(-1);
    poly[n as usize] = BigInt::one();
    for d in 1..n {
        if n.is_multiple_of(d) {
            poly = exact_div(&poly, &cyclotomic_polynomial(d));
        }
    }
    poly
}

fn exact_div(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    debug_assert!(b[db] == BigInt::one());
    let mut rem = a.to_vec();
    let mut quot = vec![BigInt::zero(); a.len() - db];
    for k in (0..quot.len()).rev() {
        let c = rem[k + db].clone();
        if c.is_zero() {
            continue;
        }
        for (j, d) in b.iter().enumerate() {
            rem[k + j] -= &c * d;
        }
        quot[k] = c;
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()));
    quot
}

/// An element of `Q(zeta_{2p})` in the power basis of `q`.
///
/// Rational constants (as produced by `zero()`, `one()` or `from_i64`) carry
/// no ring and combine with elements of any `p`; mixing two different `p`
/// is a programming error and panics. The checked entry points in
/// [`crate::scalar`] turn that into a recoverable error.
#[derive(Clone)]
pub struct CycNumber {
    ring: Option<Arc<CyclotomicRing>>,
    coeffs: Vec<Rational>,
}

impl CycNumber {
    pub fn from_coeffs(ring: Arc<CyclotomicRing>, coeffs: Vec<Rational>) -> Self {
        let coeffs = ring.reduce(coeffs);
        CycNumber { ring: Some(ring), coeffs }
    }

    pub fn rational(c: Rational) -> Self {
        CycNumber { ring: None, coeffs: vec![c] }
    }

    /// `q^e` in `Q(zeta_{2p})`.
    pub fn q_pow(ring: &Arc<CyclotomicRing>, e: i64) -> Self {
        let order = 2 * ring.p as i64;
        let e = e.rem_euclid(order) as usize;
        let mut c = vec![Rational::zero(); e + 1];
        c[e] = Rational::one();
        Self::from_coeffs(ring.clone(), c)
    }

    /// The image of a rational polynomial under `x -> q`.
    pub fn from_poly(ring: &Arc<CyclotomicRing>, p: &Poly) -> Self {
        Self::from_coeffs(ring.clone(), p.coeffs().to_vec())
    }

    pub fn p(&self) -> Option<u32> {
        self.ring.as_ref().map(|r| r.p)
    }

    pub fn ring(&self) -> Option<&Arc<CyclotomicRing>> {
        self.ring.as_ref()
    }

    /// Power-basis coefficients, padded to the field degree when the ring is
    /// known.
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// The rational value if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    fn unify(
        a: &Option<Arc<CyclotomicRing>>,
        b: &Option<Arc<CyclotomicRing>>,
    ) -> Option<Arc<CyclotomicRing>> {
        match (a, b) {
            (Some(x), Some(y)) => {
                assert!(
                    x.p == y.p,
                    "arithmetic mixes roots of unity of orders 2*{} and 2*{}",
                    x.p,
                    y.p
                );
                Some(x.clone())
            }
            (Some(x), None) | (None, Some(x)) => Some(x.clone()),
            (None, None) => None,
        }
    }

    fn padded(&self, len: usize) -> std::borrow::Cow<'_, [Rational]> {
        if self.coeffs.len() >= len {
            std::borrow::Cow::Borrowed(&self.coeffs)
        } else {
            let mut c = self.coeffs.clone();
            c.resize(len, Rational::zero());
            std::borrow::Cow::Owned(c)
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Rational, &Rational) -> Rational) -> Self {
        let ring = Self::unify(&self.ring, &other.ring);
        let len = ring.as_ref().map_or(1, |r| r.degree);
        let a = self.padded(len);
        let b = other.padded(len);
        CycNumber { ring, coeffs: a.iter().zip(b.iter()).map(|(x, y)| f(x, y)).collect() }
    }
}

impl PartialEq for CycNumber {
    fn eq(&self, other: &Self) -> bool {
        match (&self.ring, &other.ring) {
            (Some(x), Some(y)) if x.p != y.p => false,
            _ => {
                let len = self.coeffs.len().max(other.coeffs.len());
                self.padded(len) == other.padded(len)
            }
        }
    }
}

impl Eq for CycNumber {}

impl Zero for CycNumber {
    fn zero() -> Self {
        CycNumber::rational(Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

impl One for CycNumber {
    fn one() -> Self {
        CycNumber::rational(Rational::one())
    }
}

impl Field for CycNumber {
    fn add_ref(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    fn sub_ref(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    fn mul_ref(&self, other: &Self) -> Self {
        let ring = Self::unify(&self.ring, &other.ring);
        match (self.as_rational(), other.as_rational()) {
            (Some(a), _) => {
                return CycNumber { ring, coeffs: other.padded(1).iter().map(|c| c * a).collect() }
                    .with_len();
            }
            (_, Some(b)) => {
                return CycNumber { ring, coeffs: self.coeffs.iter().map(|c| c * b).collect() }
                    .with_len();
            }
            _ => {}
        }
        let ring = ring.expect("non-rational elements always carry a ring");
        let mut prod = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        CycNumber::from_coeffs(ring, prod)
    }

    fn neg_ref(&self) -> Self {
        CycNumber { ring: self.ring.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(r) = self.as_rational() {
            return Some(
                CycNumber { ring: self.ring.clone(), coeffs: vec![r.recip()] }.with_len(),
            );
        }
        let ring = self.ring.clone().expect("non-rational elements always carry a ring");
        let a = Poly::from_coeffs(self.coeffs.clone());
        let (g, s) = Poly::gcd_ext(&a, &ring.phi());
        debug_assert!(g == Poly::one(), "cyclotomic polynomial is irreducible");
        Some(CycNumber::from_poly(&ring, &s))
    }

    fn from_rational(r: &Rational) -> Self {
        CycNumber::rational(r.clone())
    }
}

impl CycNumber {
    fn with_len(mut self) -> Self {
        let len = self.ring.as_ref().map_or(1, |r| r.degree);
        self.coeffs.resize(len, Rational::zero());
        self
    }
}

impl Add for CycNumber {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.add_ref(&rhs)
    }
}

impl Sub for CycNumber {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.sub_ref(&rhs)
    }
}

impl Mul for CycNumber {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.mul_ref(&rhs)
    }
}

impl Neg for CycNumber {
    type Output = Self;
    fn neg(self) -> Self {
        self.neg_ref()
    }
}

impl<'a> Add<&'a CycNumber> for &'a CycNumber {
    type Output = CycNumber;
    fn add(self, rhs: Self) -> CycNumber {
        self.add_ref(rhs)
    }
}

impl<'a> Sub<&'a CycNumber> for &'a CycNumber {
    type Output = CycNumber;
    fn sub(self, rhs: Self) -> CycNumber {
        self.sub_ref(rhs)
    }
}

impl<'a> Mul<&'a CycNumber> for &'a CycNumber {
    type Output = CycNumber;
    fn mul(self, rhs: Self) -> CycNumber {
        self.mul_ref(rhs)
    }
}

impl fmt::Display for CycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = format_terms(self.coeffs.iter().enumerate().map(|(i, c)| (i as i64, c)), "q");
        f.write_str(&s)
    }
}

impl fmt::Debug for CycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `q^e` for a rational constant is meaningless; this helper exists for
/// tests that need small integers inside the field.
pub fn cyc_int(n: i64) -> CycNumber {
    CycNumber::rational(rat(n))
}
