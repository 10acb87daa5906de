//! Diagram expressions: a small language over the Temperley-Lieb primitives
//! and the root-of-unity generators, with a textual syntax and a memoizing
//! evaluator.
//!
//! ```text
//! sum     := compose ("(+)" compose)*
//! compose := tensor ("*" tensor)*          a * b applies b first
//! tensor  := unary ("(x)" unary)*
//! unary   := "scalar[" scalar "]" unary | "(" sum ")" | leaf
//! leaf    := id(n) | cup(i,n) | cap(i,n) | e(i,n) | jw(n) | alpha(i,n) | beta(i,n)
//! scalar  := rationals, q, q^k, [n], with + - * / and parentheses
//! ```

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;

use crate::diagram::{cap_op, cup_op, jw_closed_in, tl_e};
use crate::error::{ensure, Error, Result};
use crate::field::{Field, Rational};
use crate::generators::{embed_generator, GeneratorSpec, Which};
use crate::laurent::LaurentRational;
use crate::operator::GradedOperator;
use crate::scalar::{GenericField, QField, RootField};

/// Scalar coefficients, kept symbolic until evaluation so they can be
/// specialized with pole detection.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarExpr {
    Num(Rational),
    QPow(i64),
    QInt(i64),
    Neg(Box<ScalarExpr>),
    Add(Box<ScalarExpr>, Box<ScalarExpr>),
    Sub(Box<ScalarExpr>, Box<ScalarExpr>),
    Mul(Box<ScalarExpr>, Box<ScalarExpr>),
    Div(Box<ScalarExpr>, Box<ScalarExpr>),
}

impl ScalarExpr {
    /// The value as a rational function of `q`.
    pub fn generic(&self) -> Result<LaurentRational> {
        let g = GenericField;
        Ok(match self {
            ScalarExpr::Num(r) => LaurentRational::from_rational(r.clone()),
            ScalarExpr::QPow(k) => g.q_pow(*k),
            ScalarExpr::QInt(n) => g.qint(*n),
            ScalarExpr::Neg(a) => a.generic()?.neg_ref(),
            ScalarExpr::Add(a, b) => a.generic()?.add_ref(&b.generic()?),
            ScalarExpr::Sub(a, b) => a.generic()?.sub_ref(&b.generic()?),
            ScalarExpr::Mul(a, b) => a.generic()?.mul_ref(&b.generic()?),
            ScalarExpr::Div(a, b) => {
                let d = b.generic()?;
                a.generic()?.div_ref(&d).ok_or_else(|| Error::Parse(format!("division by zero in scalar {self}")))?
            }
        })
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarExpr::Num(r) => write!(f, "{r}"),
            ScalarExpr::QPow(k) => write!(f, "q^{k}"),
            ScalarExpr::QInt(n) => write!(f, "[{n}]"),
            ScalarExpr::Neg(a) => write!(f, "-({a})"),
            ScalarExpr::Add(a, b) => write!(f, "({a} + {b})"),
            ScalarExpr::Sub(a, b) => write!(f, "({a} - {b})"),
            ScalarExpr::Mul(a, b) => write!(f, "({a} * {b})"),
            ScalarExpr::Div(a, b) => write!(f, "({a} / {b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DiagramExpr {
    Id(usize),
    Cup(usize, usize),
    Cap(usize, usize),
    E(usize, usize),
    Jw(usize),
    Alpha(usize, usize),
    Beta(usize, usize),
    Scale(ScalarExpr, Box<DiagramExpr>),
    Sum(Vec<DiagramExpr>),
    Tensor(Vec<DiagramExpr>),
    /// `Compose([a, b, c]) = a . b . c`, so `c` is applied first.
    Compose(Vec<DiagramExpr>),
}

impl DiagramExpr {
    /// `(domain strands, codomain strands)`, checking arities throughout.
    pub fn arity(&self) -> Result<(usize, usize)> {
        use DiagramExpr::*;
        Ok(match self {
            Id(n) | E(_, n) | Alpha(_, n) | Beta(_, n) => (*n, *n),
            Jw(n) => (*n, *n),
            Cup(_, n) => (*n, n.checked_sub(2).ok_or_else(|| Error::Arity(format!("cup needs 2 strands, got {n}")))?),
            Cap(_, n) => (n.checked_sub(2).ok_or_else(|| Error::Arity(format!("cap needs 2 strands, got {n}")))?, *n),
            Scale(_, a) => a.arity()?,
            Sum(xs) => {
                let first = xs.first().ok_or_else(|| Error::Arity("empty sum".into()))?.arity()?;
                for x in &xs[1..] {
                    ensure!(x.arity()? == first, Arity, "sum of {first:?} and {:?} operators", x.arity()?);
                }
                first
            }
            Tensor(xs) => xs.iter().try_fold((0, 0), |(d, c), x| x.arity().map(|(a, b)| (d + a, c + b)))?,
            Compose(xs) => {
                let last = xs.last().ok_or_else(|| Error::Arity("empty composition".into()))?.arity()?;
                let mut cur = last;
                for x in xs.iter().rev().skip(1) {
                    let (d, c) = x.arity()?;
                    ensure!(d == cur.1, Arity, "cannot compose a {d}-strand input after a {}-strand output", cur.1);
                    cur = (cur.0, c);
                }
                cur
            }
        })
    }

    pub fn parse(s: &str) -> Result<DiagramExpr> {
        let mut p = Parser { s: s.as_bytes(), i: 0 };
        let e = p.sum()?;
        p.ws();
        ensure!(p.i == p.s.len(), Parse, "unexpected input at byte {}: {:?}", p.i, &s[p.i..]);
        e.arity()?;
        Ok(e)
    }
}

impl fmt::Display for DiagramExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use DiagramExpr::*;
        let join = |f: &mut fmt::Formatter<'_>, xs: &[DiagramExpr], sep: &str| -> fmt::Result {
            f.write_str("(")?;
            for (k, x) in xs.iter().enumerate() {
                if k > 0 {
                    f.write_str(sep)?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")
        };
        match self {
            Id(n) => write!(f, "id({n})"),
            Cup(i, n) => write!(f, "cup({i},{n})"),
            Cap(i, n) => write!(f, "cap({i},{n})"),
            E(i, n) => write!(f, "e({i},{n})"),
            Jw(n) => write!(f, "jw({n})"),
            Alpha(i, n) => write!(f, "alpha({i},{n})"),
            Beta(i, n) => write!(f, "beta({i},{n})"),
            Scale(c, a) => write!(f, "scalar[{c}] {a}"),
            Sum(xs) => join(f, xs, " (+) "),
            Tensor(xs) => join(f, xs, " (x) "),
            Compose(xs) => join(f, xs, " * "),
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl Parser<'_> {
    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.ws();
        if self.s[self.i..].starts_with(tok.as_bytes()) {
            self.i += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.err(&format!("expected {tok:?}")))
        }
    }

    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at byte {}", self.i))
    }

    fn int(&mut self) -> Result<i64> {
        self.ws();
        let start = self.i;
        if self.i < self.s.len() && self.s[self.i] == b'-' {
            self.i += 1;
        }
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        std::str::from_utf8(&self.s[start..self.i])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| self.err("expected an integer"))
    }

    fn uint(&mut self) -> Result<usize> {
        let n = self.int()?;
        usize::try_from(n).map_err(|_| self.err("expected a nonnegative integer"))
    }

    fn list<T>(&mut self, sep: &str, item: impl Fn(&mut Self) -> Result<T>) -> Result<Vec<T>> {
        let mut out = vec![item(self)?];
                while self.eat(sep) {
            out.push(item(self)?);
        }
        Ok(out)
    }

    fn sum(&mut self) -> Result<DiagramExpr> {
        let xs = self.list("(+)", Self::compose)?;
        Ok(if xs.len() == 1 { xs.into_iter().next().expect("one") } else { DiagramExpr::Sum(xs) })
    }

    fn compose(&mut self) -> Result<DiagramExpr> {
        let xs = self.list("*", Self::tensor)?;
        Ok(if xs.len() == 1 { xs.into_iter().next().expect("one") } else { DiagramExpr::Compose(xs) })
    }

    fn tensor(&mut self) -> Result<DiagramExpr> {
        let xs = self.list("(x)", Self::unary)?;
        Ok(if xs.len() == 1 { xs.into_iter().next().expect("one") } else { DiagramExpr::Tensor(xs) })
    }

    fn unary(&mut self) -> Result<DiagramExpr> {
        if self.eat("scalar[") {
            let c = self.scalar()?;
            self.expect("]")?;
            return Ok(DiagramExpr::Scale(c, Box::new(self.unary()?)));
        }
        // "(" starts a group unless it is one of the infix tokens
        self.ws();
        if self.s[self.i..].starts_with(b"(") && !self.s[self.i..].starts_with(b"(x)") && !self.s[self.i..].starts_with(b"(+)") {
            self.i += 1;
            let e = self.sum()?;
            self.expect(")")?;
            return Ok(e);
        }
        self.leaf()
    }

    fn leaf(&mut self) -> Result<DiagramExpr> {
        self.ws();
        let start = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_alphabetic() {
            self.i += 1;
        }
        let name = std::str::from_utf8(&self.s[start..self.i]).expect("ascii").to_string();
        self.expect("(")?;
        let a = self.uint()?;
        let b = if self.eat(",") { Some(self.uint()?) } else { None };
        self.expect(")")?;
        let two = |b: Option<usize>| b.ok_or_else(|| Error::Parse(format!("{name} takes two arguments")));
        Ok(match (name.as_str(), b) {
            ("id", None) => DiagramExpr::Id(a),
            ("jw", None) => DiagramExpr::Jw(a),
            ("cup", _) => DiagramExpr::Cup(a, two(b)?),
            ("cap", _) => DiagramExpr::Cap(a, two(b)?),
            ("e", _) => DiagramExpr::E(a, two(b)?),
            ("alpha", _) => DiagramExpr::Alpha(a, two(b)?),
            ("beta", _) => DiagramExpr::Beta(a, two(b)?),
            _ => return Err(Error::Parse(format!("unknown diagram {name:?} with these arguments"))),
        })
    }

    fn scalar(&mut self) -> Result<ScalarExpr> {
        let mut acc = self.sterm()?;
        loop {
            if self.eat("+") {
                acc = ScalarExpr::Add(Box::new(acc), Box::new(self.sterm()?));
            } else if self.eat("-") {
                acc = ScalarExpr::Sub(Box::new(acc), Box::new(self.sterm()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn sterm(&mut self) -> Result<ScalarExpr> {
        let mut acc = self.sfactor()?;
        loop {
            if self.eat("*") {
                acc = ScalarExpr::Mul(Box::new(acc), Box::new(self.sfactor()?));
            } else if self.eat("/") {
                acc = ScalarExpr::Div(Box::new(acc), Box::new(self.sfactor()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn sfactor(&mut self) -> Result<ScalarExpr> {
        if self.eat("-") {
            return Ok(ScalarExpr::Neg(Box::new(self.sfactor()?)));
        }
        if self.eat("(") {
            let e = self.scalar()?;
            self.expect(")")?;
            return Ok(e);
        }
        if self.eat("[") {
            let n = self.int()?;
            self.expect("]")?;
            return Ok(ScalarExpr::QInt(n));
        }
        if self.eat("q") {
            return Ok(ScalarExpr::QPow(if self.eat("^") { self.int()? } else { 1 }));
        }
        let n = self.int()?;
        Ok(ScalarExpr::Num(Rational::from_integer(BigInt::from(n))))
    }
}

/// Fields in which diagram expressions can be evaluated. The generators
/// exist only at a root of unity.
pub trait DiagramField: QField {
    fn generator(&self, which: Which, offset: usize, n: usize) -> Result<GradedOperator<Self::Elem>>;
}

impl DiagramField for GenericField {
    fn generator(&self, which: Which, _: usize, _: usize) -> Result<GradedOperator<LaurentRational>> {
        Err(Error::Unsupported(format!("{which:?} exists only at a root of unity")))
    }
}

impl DiagramField for RootField {
    fn generator(&self, which: Which, offset: usize, n: usize) -> Result<GradedOperator<crate::CycNumber>> {
        embed_generator(self, GeneratorSpec { p: self.p(), which, offset, n })
    }
}

/// Evaluates expressions, memoizing every subexpression by its canonical
/// text. Concurrent evaluation may compute an entry twice; both results
/// are equal.
pub struct Evaluator<F: DiagramField> {
    field: F,
    cache: Mutex<HashMap<String, GradedOperator<F::Elem>>>,
}

impl<F: DiagramField> Evaluator<F> {
    pub fn new(field: F) -> Self {
        Evaluator { field, cache: Mutex::new(HashMap::new()) }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn cached(&self) -> usize {
        self.cache.lock().expect("cache lock").len()
    }

    pub fn eval(&self, e: &DiagramExpr) -> Result<GradedOperator<F::Elem>> {
        let key = e.to_string();
        if let Some(v) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(v.clone());
        }
        let v = self.compute(e)?;
        self.cache.lock().expect("cache lock").insert(key, v.clone());
        Ok(v)
    }

    fn compute(&self, e: &DiagramExpr) -> Result<GradedOperator<F::Elem>> {
        use DiagramExpr::*;
        let f = &self.field;
        Ok(match e {
            Id(n) => GradedOperator::identity(*n),
            Cup(i, n) => cup_op(f, *i, *n)?,
            Cap(i, n) => cap_op(f, *i, *n)?,
            E(i, n) => tl_e(f, *i, *n)?,
            Jw(n) => jw_closed_in(f, *n)?,
            Alpha(i, n) => f.generator(Which::Alpha, *i, *n)?,
            Beta(i, n) => f.generator(Which::Beta, *i, *n)?,
            Scale(c, a) => self.eval(a)?.scale(&f.lift(&c.generic()?)?),
            Sum(xs) => {
                let (d, c) = e.arity()?;
                xs.iter().try_fold(GradedOperator::zero(d, c), |acc, x| Ok::<_, Error>(acc.add(&self.eval(x)?)))?
            }
            Tensor(xs) => {
                let mut acc = GradedOperator::identity(0);
                for x in xs {
                    acc = acc.tensor(&self.eval(x)?);
                }
                acc
            }
            Compose(xs) => {
                e.arity()?;
                let mut acc = self.eval(xs.last().expect("nonempty"))?;
                for x in xs.iter().rev().skip(1) {
                    acc = self.eval(x)?.compose(&acc);
                }
                acc
            }
        })
    }
}

/// Evaluates `text` once, without keeping a cache.
pub fn evaluate<F: DiagramField>(field: F, text: &str) -> Result<GradedOperator<F::Elem>> {
    Evaluator::new(field).eval(&DiagramExpr::parse(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::jw;
    use crate::generators::alpha_op;
    use crate::PoleError;

    #[test]
    fn parses_and_prints() {
        let e = DiagramExpr::parse("cap(1,2) * cup(1,2)").unwrap();
        assert_eq!(e, DiagramExpr::Compose(vec![DiagramExpr::Cap(1, 2), DiagramExpr::Cup(1, 2)]));
        assert_eq!(DiagramExpr::parse(&e.to_string()).unwrap(), e);
        assert_eq!(e.arity().unwrap(), (2, 2));
    }

    #[test]
    fn precedence() {
        // tensor binds tighter than compose, compose tighter than sum
        let e = DiagramExpr::parse("id(2) (+) id(1) (x) id(1) * e(1,2)").unwrap();
        match e {
            DiagramExpr::Sum(xs) => {
                assert_eq!(xs[0], DiagramExpr::Id(2));
                assert!(matches!(&xs[1], DiagramExpr::Compose(ys) if matches!(ys[0], DiagramExpr::Tensor(_))));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn jw2_by_expression() {
        let g = GenericField;
        let f2 = evaluate(g, "id(2) (+) scalar[-1/[2]] e(1,2)").unwrap();
        assert_eq!(f2, jw(2));
    }

    #[test]
    fn loop_value() {
        let f = RootField::new(3);
        let v = evaluate(f.clone(), "cup(1,2) * cap(1,2)").unwrap();
        assert_eq!(v, GradedOperator::identity(0).scale(&f.qint(2)));
    }

    #[test]
    fn association_does_not_matter() {
        let g = GenericField;
        let a = evaluate(g, "(e(1,3) * e(2,3)) * e(1,3)").unwrap();
        let b = evaluate(g, "e(1,3) * (e(2,3) * e(1,3))").unwrap();
        assert_eq!(a, b);
        assert_eq!(a, evaluate(g, "e(1,3)").unwrap());
    }

    #[test]
    fn generators_only_at_root() {
        assert!(matches!(evaluate(GenericField, "alpha(1,3)"), Err(Error::Unsupported(_))));
        let f = RootField::new(2);
        assert_eq!(evaluate(f.clone(), "alpha(1,3)").unwrap(), alpha_op(&f));
    }

    #[test]
    fn poles_are_reported() {
        let f = RootField::new(2);
        assert!(matches!(evaluate(f.clone(), "jw(2)"), Err(Error::Pole(PoleError { .. }))));
        assert!(matches!(evaluate(f, "scalar[1/[2]] id(1)"), Err(Error::Pole(_))));
    }

    #[test]
    fn arity_errors() {
        assert!(matches!(DiagramExpr::parse("cup(1,2) * cup(1,2)"), Err(Error::Arity(_))));
        assert!(matches!(DiagramExpr::parse("id(1) (+) id(2)"), Err(Error::Arity(_))));
        assert!(DiagramExpr::parse("id(2) junk").is_err());
        assert!(DiagramExpr::parse("frob(1)").is_err());
    }

    #[test]
    fn cache_is_used() {
        let ev = Evaluator::new(GenericField);
        let e = DiagramExpr::parse("jw(3) * jw(3)").unwrap();
        let a = ev.eval(&e).unwrap();
        let n = ev.cached();
        assert_eq!(ev.eval(&e).unwrap(), a);
        assert_eq!(ev.cached(), n);
        assert_eq!(a, jw(3));
    }
}
