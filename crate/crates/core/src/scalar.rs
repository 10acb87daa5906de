//! Quantum numbers in the two scalar modes, the specialization map between
//! them, and the mode-tagged [`Scalar`] used at API and wire boundaries.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cyclotomic::{CycNumber, CyclotomicRing};
use crate::error::{Error, PoleError, Result};
use crate::field::{rational_from_str, rational_to_string, Field, Rational};
use crate::laurent::LaurentRational;

/// Which field scalars live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    /// Rational functions in a formal `v` standing for `q`.
    Generic,
    /// `q = e^{i pi / p}`.
    Root(u32),
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Generic => write!(f, "generic"),
            Mode::Root(p) => write!(f, "root(p={p})"),
        }
    }
}

/// A field containing a distinguished element `q`, together with the map
/// from generic rational functions into it.
///
/// This is the context object every diagram and tensor-action builder is
/// generic over; the elements themselves are plain [`Field`] values.
pub trait QField: Clone + Send + Sync + fmt::Debug {
    type Elem: Field;

    fn q_pow(&self, e: i64) -> Self::Elem;

    fn mode(&self) -> Mode;

    /// Evaluates a generic rational function in this field.
    fn lift(&self, x: &LaurentRational) -> Result<Self::Elem, PoleError>;

    fn to_scalar(&self, x: &Self::Elem) -> Scalar;

    #[allow(clippy::wrong_self_convention)]
    fn from_scalar(&self, s: &Scalar) -> Result<Self::Elem>;

    /// The involution `q -> q^{-1}`.
    fn bar(&self, x: &Self::Elem) -> Self::Elem;

    /// `[n] = q^{n-1} + q^{n-3} + ... + q^{1-n}`, with `[-n] = -[n]`.
    fn qint(&self, n: i64) -> Self::Elem {
        let m = n.abs();
        let mut acc = Self::Elem::zero();
        for j in 0..m {
            acc.add_assign_ref(&self.q_pow(m - 1 - 2 * j));
        }
        if n < 0 {
            acc.neg_ref()
        } else {
            acc
        }
    }

    /// `[n]! = [n][n-1]...[1]`, `[0]! = 1`.
    fn qfact(&self, n: u32) -> Self::Elem {
        (1..=n as i64).fold(Self::Elem::one(), |acc, k| acc.mul_ref(&self.qint(k)))
    }

    fn root_order(&self) -> Option<u32> {
        match self.mode() {
            Mode::Generic => None,
            Mode::Root(p) => Some(p),
        }
    }
}

/// Generic mode: `q` is the formal variable `v`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GenericField;

impl QField for GenericField {
    type Elem = LaurentRational;

    fn q_pow(&self, e: i64) -> LaurentRational {
        LaurentRational::v_pow(e)
    }

    fn mode(&self) -> Mode {
        Mode::Generic
    }

    fn lift(&self, x: &LaurentRational) -> Result<LaurentRational, PoleError> {
        Ok(x.clone())
    }

    fn to_scalar(&self, x: &LaurentRational) -> Scalar {
        Scalar::Generic(x.clone())
    }

    fn from_scalar(&self, s: &Scalar) -> Result<LaurentRational> {
        match s {
            Scalar::Generic(x) => Ok(x.clone()),
            Scalar::Root(_) => Err(Error::ModeMismatch("expected a generic scalar".into())),
        }
    }

    fn bar(&self, x: &LaurentRational) -> LaurentRational {
        x.bar()
    }
}

/// Root mode: `q = e^{i pi / p}` inside `Q(zeta_{2p})`.
#[derive(Debug, Clone)]
pub struct RootField {
    ring: Arc<CyclotomicRing>,
    q_powers: Arc<Vec<CycNumber>>,
}

impl RootField {
    pub fn new(p: u32) -> Self {
        let ring = CyclotomicRing::get(p);
        let q_powers = (0..2 * p as i64).map(|e| CycNumber::q_pow(&ring, e)).collect();
        RootField { ring, q_powers: Arc::new(q_powers) }
    }

    pub fn p(&self) -> u32 {
        self.ring.p()
    }

    pub fn ring(&self) -> &Arc<CyclotomicRing> {
        &self.ring
    }

    /// Attaches this field's ring to a bare rational constant so it can be
    /// serialized with its `p`.
    pub fn element(&self, x: &CycNumber) -> CycNumber {
        if x.ring().is_some() {
            x.clone()
        } else {
            CycNumber::from_coeffs(self.ring.clone(), x.coeffs().to_vec())
        }
    }
}

impl QField for RootField {
    type Elem = CycNumber;

    fn q_pow(&self, e: i64) -> CycNumber {
        let order = self.q_powers.len() as i64;
        self.q_powers[e.rem_euclid(order) as usize].clone()
    }

    fn mode(&self) -> Mode {
        Mode::Root(self.p())
    }

    fn lift(&self, x: &LaurentRational) -> Result<CycNumber, PoleError> {
        specialize_in(&self.ring, x)
    }

    fn to_scalar(&self, x: &CycNumber) -> Scalar {
        Scalar::Root(self.element(x))
    }

    fn from_scalar(&self, s: &Scalar) -> Result<CycNumber> {
        match s {
            Scalar::Root(x) if x.p().is_none_or(|p| p == self.p()) => Ok(x.clone()),
            Scalar::Root(x) => Err(Error::ModeMismatch(format!(
                "scalar at p={} used at p={}",
                x.p().unwrap_or(0),
                self.p()
            ))),
            Scalar::Generic(_) => Err(Error::ModeMismatch("expected a root-mode scalar".into())),
        }
    }

    fn bar(&self, x: &CycNumber) -> CycNumber {
        x.coeffs().iter().enumerate().fold(CycNumber::zero(), |acc, (j, c)| {
            acc.add_ref(&self.q_pow(-(j as i64)).mul_ref(&CycNumber::rational(c.clone())))
        })
    }
}

fn specialize_in(ring: &Arc<CyclotomicRing>, x: &LaurentRational) -> Result<CycNumber, PoleError> {
    let den = CycNumber::from_poly(ring, x.denominator());
    let Some(den_inv) = den.inv() else {
        return Err(PoleError { p: ring.p(), what: format!("denominator {}", denominator_text(x)) });
    };
    let num = CycNumber::from_poly(ring, x.numerator());
    let shift = CycNumber::q_pow(ring, x.shift());
    Ok(num.mul_ref(&shift).mul_ref(&den_inv))
}

fn denominator_text(x: &LaurentRational) -> String {
    LaurentRational::new(0, x.denominator().clone(), crate::poly::Poly::one()).to_string()
}

/// Evaluates a generic rational function at `q = e^{i pi / p}`.
pub fn specialize(x: &LaurentRational, p: u32) -> Result<CycNumber, PoleError> {
    specialize_in(&CyclotomicRing::get(p), x)
}

/// The quantum integer `[n]` in the given mode.
pub fn qint(mode: Mode, n: i64) -> Scalar {
    match mode {
        Mode::Generic => Scalar::Generic(GenericField.qint(n)),
        Mode::Root(p) => {
            let f = RootField::new(p);
            f.to_scalar(&f.qint(n))
        }
    }
}

/// `[n]!` in the given mode.
pub fn qfact(mode: Mode, n: i64) -> Result<Scalar> {
    if n < 0 {
        return Err(Error::OutOfRange(format!("[n]! needs n >= 0, got {n}")));
    }
    Ok(match mode {
        Mode::Generic => Scalar::Generic(GenericField.qfact(n as u32)),
        Mode::Root(p) => {
            let f = RootField::new(p);
            f.to_scalar(&f.qfact(n as u32))
        }
    })
}

/// The Gaussian binomial `[n]! / ([k]! [n-k]!)` as a Laurent polynomial.
pub fn qbinom_generic(n: u32, k: u32) -> LaurentRational {
    assert!(k <= n, "qbinom({n}, {k}) out of range");
    let f = GenericField;
    let r = f
        .qfact(n)
        .div_ref(&f.qfact(k).mul_ref(&f.qfact(n - k)))
        .expect("quantum factorials are nonzero generically");
    debug_assert!(r.is_laurent_polynomial());
    r
}

/// Checked Gaussian binomial; only defined in generic mode.
pub fn qbinom(mode: Mode, n: i64, k: i64) -> Result<Scalar> {
    if mode != Mode::Generic {
        return Err(Error::ModeMismatch(
            "qbinom is computed generically; specialize the result instead".into(),
        ));
    }
    if n < 0 || k < 0 || k > n {
        return Err(Error::OutOfRange(format!("qbinom({n}, {k}) needs 0 <= k <= n")));
    }
    Ok(Scalar::Generic(qbinom_generic(n as u32, k as u32)))
}

/// `gamma = (-1)^{p-1} ([p-1]!)^2` at `q = e^{i pi / p}`.
pub fn gamma_const(p: u32) -> CycNumber {
    let f = RootField::new(p);
    let fact = f.qfact(p - 1);
    let sq = fact.mul_ref(&fact);
    let g = if p.is_multiple_of(2) { sq.neg_ref() } else { sq };
    f.element(&g)
}

/// Evaluates `([2p-2] + [p](q^p + q^{-p})) / ([2][2p-1])` at the root and
/// compares with one. The fraction is reduced generically first, since
/// `[2]` itself vanishes at `p = 2`.
pub fn unit_identity_check(p: u32) -> Result<bool, PoleError> {
    let g = GenericField;
    let p_i = p as i64;
    let num = g
        .qint(2 * p_i - 2)
        .add_ref(&g.qint(p_i).mul_ref(&g.q_pow(p_i).add_ref(&g.q_pow(-p_i))));
    let den = g.qint(2).mul_ref(&g.qint(2 * p_i - 1));
    let ratio = num.div_ref(&den).expect("[2][2p-1] is nonzero generically");
    Ok(specialize(&ratio, p)? == CycNumber::one())
}

/// A scalar tagged with its mode. Arithmetic between modes (or between
/// different `p`) is an error rather than an implicit conversion.
#[derive(Clone, PartialEq)]
pub enum Scalar {
    Generic(LaurentRational),
    Root(CycNumber),
}

impl Scalar {
    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Generic(_) => Mode::Generic,
            Scalar::Root(x) => Mode::Root(x.p().unwrap_or(0)),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Generic(x) => x.is_zero(),
            Scalar::Root(x) => x.is_zero(),
        }
    }

    pub fn one_in(mode: Mode) -> Scalar {
        Scalar::from_rational(mode, Rational::one())
    }

    pub fn from_rational(mode: Mode, r: Rational) -> Scalar {
        match mode {
            Mode::Generic => Scalar::Generic(LaurentRational::from_rational(r)),
            Mode::Root(p) => Scalar::Root(RootField::new(p).element(&CycNumber::rational(r))),
        }
    }

    fn check(&self, other: &Scalar) -> Result<()> {
        match (self, other) {
            (Scalar::Generic(_), Scalar::Generic(_)) => Ok(()),
            (Scalar::Root(a), Scalar::Root(b)) => match (a.p(), b.p()) {
                (Some(x), Some(y)) if x != y => {
                    Err(Error::ModeMismatch(format!("root scalars at p={x} and p={y}")))
                }
                _ => Ok(()),
            },
            _ => Err(Error::ModeMismatch("generic and root-mode scalars".into())),
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar> {
        self.check(other)?;
        Ok(match (self, other) {
            (Scalar::Generic(a), Scalar::Generic(b)) => Scalar::Generic(a.add_ref(b)),
            (Scalar::Root(a), Scalar::Root(b)) => Scalar::Root(a.add_ref(b)),
            _ => unreachable!(),
        })
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar> {
        self.check(other)?;
        Ok(match (self, other) {
            (Scalar::Generic(a), Scalar::Generic(b)) => Scalar::Generic(a.mul_ref(b)),
            (Scalar::Root(a), Scalar::Root(b)) => Scalar::Root(a.mul_ref(b)),
            _ => unreachable!(),
        })
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Generic(a) => Scalar::Generic(a.neg_ref()),
            Scalar::Root(a) => Scalar::Root(a.neg_ref()),
        }
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar> {
        self.check(other)?;
        let fail = || Error::OutOfRange("division by zero scalar".into());
        Ok(match (self, other) {
            (Scalar::Generic(a), Scalar::Generic(b)) => Scalar::Generic(a.div_ref(b).ok_or_else(fail)?),
            (Scalar::Root(a), Scalar::Root(b)) => Scalar::Root(a.div_ref(b).ok_or_else(fail)?),
            _ => unreachable!(),
        })
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Generic(x) => write!(f, "{x}"),
            Scalar::Root(x) => write!(f, "{x}"),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self, self.mode())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
enum ScalarWire {
    Generic { num: Vec<(i64, String)>, den: Vec<(i64, String)> },
    Root { p: u32, coeffs: Vec<String> },
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms = |t: Vec<(i64, Rational)>| {
            t.into_iter().map(|(e, c)| (e, rational_to_string(&c))).collect()
        };
        let wire = match self {
            Scalar::Generic(x) => ScalarWire::Generic {
                num: terms(x.numerator_terms()),
                den: terms(x.denominator_terms()),
            },
            Scalar::Root(x) => {
                let p = x.p().ok_or_else(|| {
                    serde::ser::Error::custom("root scalar without an attached p")
                })?;
                ScalarWire::Root { p, coeffs: x.coeffs().iter().map(rational_to_string).collect() }
            }
        };
        wire.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let parse = |s: &str| rational_from_str(s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}")));
        match ScalarWire::deserialize(d)? {
            ScalarWire::Generic { num, den } => {
                let num = num.iter().map(|(e, c)| Ok((*e, parse(c)?))).collect::<Result<Vec<_>, D::Error>>()?;
                let den = den.iter().map(|(e, c)| Ok((*e, parse(c)?))).collect::<Result<Vec<_>, D::Error>>()?;
                let den = LaurentRational::from_terms(den);
                let inv = den.inv().ok_or_else(|| D::Error::custom("zero denominator"))?;
                Ok(Scalar::Generic(LaurentRational::from_terms(num).mul_ref(&inv)))
            }
            ScalarWire::Root { p, coeffs } => {
                if p < 2 {
                    return Err(D::Error::custom("root scalars need p >= 2"));
                }
                let coeffs = coeffs.iter().map(|c| parse(c)).collect::<Result<Vec<_>, _>>()?;
                Ok(Scalar::Root(CycNumber::from_coeffs(CyclotomicRing::get(p), coeffs)))
            }
        }
    }
}

/// Convenience: `[n]` as a plain rational-coefficient generic value.
pub fn generic_qint(n: i64) -> LaurentRational {
    GenericField.qint(n)
}
