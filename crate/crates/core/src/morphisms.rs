//! The non-identity morphisms between indecomposables: `theta`
//! (projective to simple), `Gamma` (simple to projective), the second
//! endomorphisms, and the maps between `P^+-_i` and `P^-+_{p-i}`.
//!
//! `theta` and `Gamma` are generic over the field so the generic-q
//! constructions can be specialized to the root and compared.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cyclotomic::CycNumber;
use crate::diagram::{cap_op, cup_op, jw_closed_in, reflect};
use crate::error::{ensure, Error, Result};
use crate::field::Field;
use crate::generators::{alpha_op, beta_op, verify_centralizer, Op};
use crate::laurent::LaurentRational;
use crate::module::{build, hom_space, invert, std_hom, ModuleId, Rep, Sign, StdHom, Subrep};
use crate::operator::{BasisState, GradedOperator};
use crate::projections::{proj_neg_pair, proj_pos};
use crate::scalar::{GenericField, QField, RootField, Scalar};
use crate::tensor::{f_pow_vacuum, rho_exponent};

/// Which of the two copies of `P^-+_{p-i}` in `X^{(x)(2p+i-1)}` a variant
/// lands in: the lower or upper weight range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pos {
    L,
    U,
}

impl Pos {
    pub fn parse(s: &str) -> Result<Pos> {
        match s {
            "l" => Ok(Pos::L),
            "u" => Ok(Pos::U),
            _ => Err(Error::Parse(format!("expected l or u, got {s:?}"))),
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pos::L => "l",
            Pos::U => "u",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum MorphismSpec {
    Theta { i: u32 },
    Gamma { i: u32 },
    Phi { i: u32 },
    ThetaVar { i: u32, j: u8, pos: Pos },
    GammaVar { i: u32, j: u8, pos: Pos },
    PhiNeg { i: u32 },
}

impl MorphismSpec {
    pub fn i(&self) -> u32 {
        match *self {
            MorphismSpec::Theta { i }
            | MorphismSpec::Gamma { i }
            | MorphismSpec::Phi { i }
            | MorphismSpec::ThetaVar { i, .. }
            | MorphismSpec::GammaVar { i, .. }
            | MorphismSpec::PhiNeg { i } => i,
        }
    }

    pub fn label(&self) -> String {
        match self {
            MorphismSpec::Theta { .. } => "theta".into(),
            MorphismSpec::Gamma { .. } => "gamma".into(),
            MorphismSpec::Phi { .. } => "phi".into(),
            MorphismSpec::ThetaVar { j, pos, .. } => format!("theta_{j}{pos}"),
            MorphismSpec::GammaVar { j, pos, .. } => format!("gamma_{j}{pos}"),
            MorphismSpec::PhiNeg { .. } => "phi_neg".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MorphismBundle {
    pub name: String,
    pub p: u32,
    pub i: u32,
    pub dom: usize,
    pub cod: usize,
    pub op: Op,
    /// The constant `c` with `op = c * (basis-level map)`; 1 for maps that
    /// are only defined diagrammatically.
    pub normalization: Scalar,
}

fn check_index(p: u32, i: u32) -> Result<()> {
    ensure!(p >= 2, OutOfRange, "p must be at least 2, got {p}");
    ensure!((1..p).contains(&i), OutOfRange, "morphism index must satisfy 1 <= i <= p-1, got i={i}, p={p}");
    Ok(())
}

fn gfact(n: i64) -> LaurentRational {
    GenericField.qfact(n as u32)
}

fn gdiv(num: LaurentRational, den: LaurentRational) -> LaurentRational {
    num.div_ref(&den).expect("generic q-factorials are nonzero")
}

fn sign(odd: bool) -> LaurentRational {
    if odd {
        -LaurentRational::one()
    } else {
        LaurentRational::one()
    }
}

/// `theta: X^{(x)(2p-i-1)} -> X^{(x)(i-1)}` from its closed form on basis
/// states: weight `n` in `p-i..=p-1` goes to a multiple of
/// `F^{n+i-p} x_{0,i-1}`, everything else to zero.
pub fn theta_basis_in<F: QField>(field: &F, p: u32, i: u32) -> Result<GradedOperator<F::Elem>> {
    check_index(p, i)?;
    let (p, i) = (p as i64, i as i64);
    let z = (2 * p - i - 1) as usize;
    let mut cols = Vec::new();
    for n in p - i..p {
        let num = gfact(n).mul_ref(&gfact(p - n - 1));
        let den = gfact(n + i - p).mul_ref(&gfact(i - 1)).mul_ref(&gfact(p - i - 1).pow(2));
        let c = field.lift(&sign((p - i - 1) % 2 == 1).mul_ref(&gdiv(num, den)))?;
        let v = f_pow_vacuum(field, n + i - p, (i - 1) as usize);
        for x in BasisState::block(z, n as usize) {
            cols.push((x, v.scale(&field.q_pow(rho_exponent(&x)).mul_ref(&c))));
        }
    }
    Ok(GradedOperator::from_columns(z, (i - 1) as usize, cols))
}

/// `Gamma: X^{(x)(i-1)} -> X^{(x)(2p-i-1)}` from its closed form: weight
/// `n` goes to a multiple of `F^{n+p-i} x_{0,2p-i-1}`.
pub fn gamma_basis_in<F: QField>(field: &F, p: u32, i: u32) -> Result<GradedOperator<F::Elem>> {
    check_index(p, i)?;
    let (p, i) = (p as i64, i as i64);
    let z = (i - 1) as usize;
    let mut cols = Vec::new();
    for n in 0..i {
        let c = field.lift(&gdiv(gfact(i - 1 - n), gfact(i - 1)))?;
        let v = f_pow_vacuum(field, n + p - i, (2 * p - i - 1) as usize);
        for x in BasisState::block(z, n as usize) {
            cols.push((x, v.scale(&field.q_pow(rho_exponent(&x)).mul_ref(&c))));
        }
    }
    Ok(GradedOperator::from_columns(z, (2 * p - i - 1) as usize, cols))
}

/// `f_{p-1} (x) 1^{p-i}` followed by `p-i` nested cups closing the last
/// box strand against the first free strand, innermost first.
pub fn theta_diagram_in<F: QField>(field: &F, p: u32, i: u32) -> Result<GradedOperator<F::Elem>> {
    check_index(p, i)?;
    let (p, i) = (p as usize, i as usize);
    let mut op = jw_closed_in(field, p - 1)?.pad(0, p - i);
    for t in 0..p - i {
        op = cup_op(field, p - 1 - t, 2 * p - i - 1 - 2 * t)?.compose(&op);
    }
    Ok(op)
}

/// `p-i` nested caps opened to the right of `i-1` strands, then
/// `f_{p-1} (x) 1^{p-i}`.
pub fn gamma_diagram_in<F: QField>(field: &F, p: u32, i: u32) -> Result<GradedOperator<F::Elem>> {
    check_index(p, i)?;
    let (p, i) = (p as usize, i as usize);
    let mut op = GradedOperator::identity(i - 1);
    for t in 0..p - i {
        op = cap_op(field, i + t, i + 1 + 2 * t)?.compose(&op);
    }
    Ok(jw_closed_in(field, p - 1)?.pad(0, p - i).compose(&op))
}

/// The quoted constant `-q^{-i} [p-i-1]! / [i]` for the `theta` diagram.
/// Evaluating the diagram with the cup values above gives its negative.
pub fn theta_constant_in<F: QField>(field: &F, p: u32, i: u32) -> Result<F::Elem> {
    check_index(p, i)?;
    let (p, i) = (p as i64, i as i64);
    let g = GenericField;
    let c = gdiv(g.q_pow(-i).mul_ref(&gfact(p - i - 1)), g.qint(i)).neg_ref();
    Ok(field.lift(&c)?)
}

/// The quoted constant `q^i [i-1]! / [p-1]!` for the `Gamma` diagram. As for
/// `theta`, the evaluated diagram carries the opposite sign.
pub fn gamma_constant_in<F: QField>(field: &F, p: u32, i: u32) -> Result<F::Elem> {
    check_index(p, i)?;
    let (p, i) = (p as i64, i as i64);
    let c = gdiv(GenericField.q_pow(i).mul_ref(&gfact(i - 1)), gfact(p - 1));
    Ok(field.lift(&c)?)
}

pub fn theta_basis(field: &RootField, i: u32) -> Result<Op> {
    theta_basis_in(field, field.p(), i)
}

pub fn gamma_basis(field: &RootField, i: u32) -> Result<Op> {
    gamma_basis_in(field, field.p(), i)
}

pub fn theta_diagram(field: &RootField, i: u32) -> Result<Op> {
    theta_diagram_in(field, field.p(), i)
}

pub fn gamma_diagram(field: &RootField, i: u32) -> Result<Op> {
    gamma_diagram_in(field, field.p(), i)
}

/// `Gamma theta` on `X^{(x)(2p-i-1)}` from the two diagrams.
pub fn phi_pos(field: &RootField, i: u32) -> Result<Op> {
    Ok(gamma_diagram(field, i)?.compose(&theta_diagram(field, i)?))
}

/// Whether `X_i -> X^{(x)(i-1)} -> X_i` is the identity, where the first map
/// sends `z_k` to `F^k x_{0,i-1}` and the second is the first factor of
/// `Gamma`.
pub fn identity_factor<F: QField>(field: &F, i: u32) -> Result<bool> {
    ensure!(i >= 1, OutOfRange, "simple module index must be positive");
    let z = (i - 1) as usize;
    for k in 0..i as i64 {
        let mut image = vec![F::Elem::zero(); i as usize];
        for (x, c) in f_pow_vacuum(field, k, z).terms() {
            let n = x.weight() as i64;
            let w = field.lift(&gdiv(gfact(i as i64 - 1 - n), gfact(i as i64 - 1)))?;
            image[n as usize].add_assign_ref(&c.mul_ref(&field.q_pow(rho_exponent(&x))).mul_ref(&w));
        }
        for (m, v) in image.iter().enumerate() {
            let want = if m as i64 == k { F::Elem::one() } else { F::Elem::zero() };
            if *v != want {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn nested_caps(field: &RootField, base: usize, count: usize) -> Result<Op> {
    let mut op = GradedOperator::identity(base);
    for t in 0..count {
        op = cap_op(field, base + 1 + t, base + 2 + 2 * t)?.compose(&op);
    }
    Ok(op)
}

/// `theta_{j,pos}: X^{(x)(2p-i-1)} -> X^{(x)(2p+i-1)}`: `i` nested caps on
/// the right, then a generator word on the first `2p-1` strands
/// (`beta` for `1l`, `alpha` for `2u`, `beta alpha` for `2l`,
/// `alpha beta` for `1u`, words applied right to left).
pub fn theta_variant(field: &RootField, i: u32, j: u8, pos: Pos) -> Result<Op> {
    let p = field.p();
    check_index(p, i)?;
    ensure!(j == 1 || j == 2, OutOfRange, "variant index must be 1 or 2, got {j}");
    let (a, b) = (alpha_op(field), beta_op(field));
    let g = match (j, pos) {
        (1, Pos::L) => b,
        (2, Pos::U) => a,
        (2, Pos::L) => b.compose(&a),
        _ => a.compose(&b),
    };
    let base = (2 * p - i - 1) as usize;
    Ok(g.pad(0, i as usize).compose(&nested_caps(field, base, i as usize)?))
}

/// `Gamma_{j,pos}: X^{(x)(2p+i-1)} -> X^{(x)(2p-i-1)}`, the reflection of
/// `theta_{3-j,pos}`.
pub fn gamma_variant(field: &RootField, i: u32, j: u8, pos: Pos) -> Result<Op> {
    ensure!(j == 1 || j == 2, OutOfRange, "variant index must be 1 or 2, got {j}");
    Ok(reflect(field, &theta_variant(field, i, 3 - j, pos)?))
}

/// Allowed `(domain weight, codomain weight)` pairs for `theta_{j,pos}`.
pub fn theta_table(p: u32, i: u32, j: u8, pos: Pos) -> impl Fn(usize, usize) -> bool {
    let (p, i) = (p as i64, i as i64);
    move |k, k2| {
        let (k, k2) = (k as i64, k2 as i64);
        match (j, pos) {
            (1, Pos::L) => (p - i..=2 * p - i - 1).contains(&k) && k2 == k + i - p,
            (2, Pos::L) => (0..p).contains(&k) && k2 == k + i,
            (1, Pos::U) => (p - i..=2 * p - i - 1).contains(&k) && k2 == k + i,
            _ => (0..p).contains(&k) && k2 == k + p + i,
        }
    }
}

/// Allowed `(domain weight, codomain weight)` pairs for `Gamma_{j,pos}`.
pub fn gamma_table(p: u32, i: u32, j: u8, pos: Pos) -> impl Fn(usize, usize) -> bool {
    let (p, i) = (p as i64, i as i64);
    move |k, k2| {
        let (k, k2) = (k as i64, k2 as i64);
        match (j, pos) {
            (1, Pos::L) => (i..=p + i - 1).contains(&k) && k2 == k - i,
            (2, Pos::L) => (0..p).contains(&k) && k2 == k + p - i,
            (1, Pos::U) => (p + i..=2 * p + i - 1).contains(&k) && k2 == k - p - i,
            _ => (p..=2 * p - 1).contains(&k) && k2 == k - i,
        }
    }
}

/// The second endomorphism of the module `id` carried onto the image of
/// the idempotent `e` by an isomorphism. The result does not depend on the
/// isomorphism, since automorphisms of a projective commute with its
/// nilpotent endomorphism.
pub fn transport_nilpotent(field: &RootField, e: &Op, id: ModuleId) -> Result<Op> {
    let n = e.dom();
    let rep = Rep::tensor_power(field, n);
    let sub = Subrep::of(&rep, &e.to_flat());
    let pres = build(id, field.p())?;
    ensure!(sub.dim() == pres.rep.dim(), Identification, "image has dimension {}, {id} has {}", sub.dim(), pres.rep.dim());
    let (t, t_inv) = hom_space(&pres.rep, &sub.rep)
        .into_iter()
        .find_map(|h| invert(&h).map(|inv| (h, inv)))
        .ok_or_else(|| Error::Identification(format!("image of the idempotent is not isomorphic to {id}")))?;
    let nil = std_hom(&pres, &pres, &StdHom::Nilpotent)?;
    let inner = t.mul(&nil).mul(&t_inv);
    Ok(GradedOperator::from_flat(n, n, &sub.basis.mul(&inner).mul(&sub.coords)))
}

/// The second endomorphism on both copies of `P^-_i` in
/// `X^{(x)(3p-i-1)}`, acting on each half of the generator split.
pub fn phi_neg(field: &RootField, i: u32) -> Result<Op> {
    let bundle = proj_neg_pair(field, i)?;
    let (e1, e2) = bundle.split.clone().expect("negative pairs are split");
    let id = ModuleId::projective(i, Sign::Minus);
    Ok(transport_nilpotent(field, &e1, id)?.add(&transport_nilpotent(field, &e2, id)?))
}

/// `c` with `a = c b`, if `b` is nonzero and such a `c` exists.
pub fn proportionality<S: Field>(a: &GradedOperator<S>, b: &GradedOperator<S>) -> Option<S> {
    let (x, y, v) = b.entries().next()?;
    let c = a.entry(&x, &y).div_ref(v)?;
    (*a == b.scale(&c)).then_some(c)
}

/// Per-block constants `c_k` with `a_k = c_k b_k`; `None` if the supports
/// differ or some block is not proportional.
pub fn blockwise_ratios<S: Field>(a: &GradedOperator<S>, b: &GradedOperator<S>) -> Option<BTreeMap<(usize, usize), S>> {
    if a.support() != b.support() {
        return None;
    }
    let mut out = BTreeMap::new();
    for (key, mb) in b.blocks() {
        let ma = a.block(key.0, key.1)?;
        let (r, c, v) = mb.entries().next()?;
        let ratio = ma.get(r, c).div_ref(v)?;
        if *ma != mb.scale(&ratio) {
            return None;
        }
        out.insert(*key, ratio);
    }
    Some(out)
}

pub fn morphism(field: &RootField, spec: MorphismSpec) -> Result<MorphismBundle> {
    let p = field.p();
    let one = field.to_scalar(&CycNumber::one());
    let (op, normalization) = match spec {
        MorphismSpec::Theta { i } => (theta_diagram(field, i)?, field.to_scalar(&theta_constant_in(field, p, i)?.neg_ref())),
        MorphismSpec::Gamma { i } => (gamma_diagram(field, i)?, field.to_scalar(&gamma_constant_in(field, p, i)?.neg_ref())),
        MorphismSpec::Phi { i } => {
            let c = theta_constant_in(field, p, i)?.mul_ref(&gamma_constant_in(field, p, i)?);
            (phi_pos(field, i)?, field.to_scalar(&c))
        }
        MorphismSpec::ThetaVar { i, j, pos } => (theta_variant(field, i, j, pos)?, one),
        MorphismSpec::GammaVar { i, j, pos } => (gamma_variant(field, i, j, pos)?, one),
        MorphismSpec::PhiNeg { i } => (phi_neg(field, i)?, one),
    };
    Ok(MorphismBundle { name: spec.label(), p, i: spec.i(), dom: op.dom(), cod: op.cod(), op, normalization })
}

/// Every `(j, pos)` variant label.
pub fn variant_labels() -> [(u8, Pos); 4] {
    [(1, Pos::L), (1, Pos::U), (2, Pos::L), (2, Pos::U)]
}

/// One named check with its verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool) -> Self {
        Check { name: name.into(), passed }
    }
}

fn nilpotent_of_rank(op: &Op, rank: usize) -> bool {
    !op.is_zero() && op.compose(op).is_zero() && op.rank() == rank
}

/// All checks on the morphisms for one `i`.
pub fn verify_morphisms(field: &RootField, i: u32) -> Result<Vec<Check>> {
    let p = field.p();
    let mut out = Vec::new();
    let tb = theta_basis(field, i)?;
    let td = theta_diagram(field, i)?;
    let gb = gamma_basis(field, i)?;
    let gd = gamma_diagram(field, i)?;
    let ct = theta_constant_in(field, p, i)?;
    let cg = gamma_constant_in(field, p, i)?;
    out.push(Check::new("theta diagram equals the quoted constant times closed form", td == tb.scale(&ct)));
    out.push(Check::new("gamma diagram equals the quoted constant times closed form", gd == gb.scale(&cg)));
    out.push(Check::new("theta diagram equals minus the quoted constant times closed form", td == tb.scale(&ct.neg_ref())));
    out.push(Check::new("gamma diagram equals minus the quoted constant times closed form", gd == gb.scale(&cg.neg_ref())));
    out.push(Check::new("theta closed form has rank i", tb.rank() == i as usize));
    out.push(Check::new("gamma closed form has rank i", gb.rank() == i as usize));
    out.push(Check::new("theta and gamma are intertwiners", verify_centralizer(field, &td) && verify_centralizer(field, &gd)));
    out.push(Check::new("reflected gamma is blockwise proportional to theta", blockwise_ratios(&reflect(field, &gd), &td).is_some()));
    let phi = gd.compose(&td);
    out.push(Check::new("phi is nonzero, squares to zero, rank i", nilpotent_of_rank(&phi, i as usize)));
    out.push(Check::new("phi is an intertwiner", verify_centralizer(field, &phi)));
    let proj = proj_pos(field, i)?.proj;
    out.push(Check::new("phi is absorbed by the projection", proj.compose(&phi) == phi && phi.compose(&proj) == phi));
    let transported = transport_nilpotent(field, &proj, ModuleId::projective(i, Sign::Plus))?;
    out.push(Check::new("phi is proportional to the second endomorphism", proportionality(&phi, &transported).is_some()));
    out.push(Check::new("simple factor through X^(i-1) is the identity", identity_factor(field, i)?));
    for (j, pos) in variant_labels() {
        let th = theta_variant(field, i, j, pos)?;
        let ga = gamma_variant(field, i, j, pos)?;
        out.push(Check::new(
            format!("theta_{j}{pos} is a nonzero intertwiner within its weight table"),
            !th.is_zero() && verify_centralizer(field, &th) && th.support_within(theta_table(p, i, j, pos)),
        ));
        out.push(Check::new(
            format!("gamma_{j}{pos} is a nonzero intertwiner within its weight table"),
            !ga.is_zero() && verify_centralizer(field, &ga) && ga.support_within(gamma_table(p, i, j, pos)),
        ));
    }
    let neg = proj_neg_pair(field, i)?;
    let pn = phi_neg(field, i)?;
    out.push(Check::new("negative phi squares to zero with rank 2i", nilpotent_of_rank(&pn, 2 * i as usize)));
    out.push(Check::new("negative phi is an intertwiner", verify_centralizer(field, &pn)));
    out.push(Check::new("negative phi is absorbed by the pair projection", neg.proj.compose(&pn) == pn && pn.compose(&neg.proj) == pn));
    let (e1, e2) = neg.split.expect("negative pairs are split");
    let diag = [&e1, &e2].iter().all(|e| {
        let part = e.compose(&pn).compose(e);
        !part.is_zero() && part.compose(&part).is_zero()
    });
    out.push(Check::new("negative phi restricts to a nonzero nilpotent on each copy", diag));
    Ok(out)
}

/// `(theta label, Gamma label, multiple of phi)`.
pub type Composite = ((u8, Pos), (u8, Pos), Option<Scalar>);

/// Exploratory: for each pair of variants, whether `Gamma_b theta_a` on
/// `X^{(x)(2p-i-1)}` is a multiple of `phi`, and the multiple.
pub fn variant_composites(field: &RootField, i: u32) -> Result<Vec<Composite>> {
    let phi = phi_pos(field, i)?;
    let mut out = Vec::new();
    for a in variant_labels() {
        let th = theta_variant(field, i, a.0, a.1)?;
        for b in variant_labels() {
            let comp = gamma_variant(field, i, b.0, b.1)?.compose(&th);
            let c = if comp.is_zero() { Some(CycNumber::zero()) } else { proportionality(&comp, &phi) };
            out.push((a, b, c.map(|c| field.to_scalar(&c))));
        }
    }
    Ok(out)
}

/// Exploratory: whether the pair projection onto `P^-_{p-i}` fixes the
/// image of each `theta` variant.
pub fn projection_compatibility(field: &RootField, i: u32) -> Result<Vec<((u8, Pos), bool)>> {
    let q = proj_neg_pair(field, field.p() - i)?.proj;
    variant_labels()
        .into_iter()
        .map(|(j, pos)| {
            let th = theta_variant(field, i, j, pos)?;
            Ok(((j, pos), q.compose(&th) == th))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::specialize;

    #[test]
    fn theta_small_values() {
        let f = RootField::new(2);
        let t = theta_basis(&f, 1).unwrap();
        let x = |s: &str| BasisState::from_bitstring(s).unwrap();
        let empty = BasisState::new(0, 0);
        assert_eq!(t.entry(&x("10"), &empty), f.q_pow(1));
        assert_eq!(t.entry(&x("01"), &empty), CycNumber::one());
        let d = theta_diagram(&f, 1).unwrap();
        let ratio = d.entry(&x("10"), &empty).div_ref(&d.entry(&x("01"), &empty)).unwrap();
        assert_eq!(ratio, f.q_pow(1));
    }

    #[test]
    fn theta_vanishes_outside_range() {
        let f = RootField::new(3);
        for i in 1..3 {
            let t = theta_basis(&f, i).unwrap();
            assert!(t.support_within(|k, _| (3 - i as usize..=2).contains(&k)));
            assert_eq!(t.rank(), i as usize);
        }
    }

    #[test]
    fn diagram_constants() {
        for p in [2u32, 3] {
            let f = RootField::new(p);
            for i in 1..p {
                let ct = theta_constant_in(&f, p, i).unwrap();
                let cg = gamma_constant_in(&f, p, i).unwrap();
                let td = theta_diagram(&f, i).unwrap();
                let gd = gamma_diagram(&f, i).unwrap();
                let minus_one = -CycNumber::one();
                assert_eq!(proportionality(&td, &theta_basis(&f, i).unwrap().scale(&ct)), Some(minus_one.clone()));
                assert_eq!(proportionality(&gd, &gamma_basis(&f, i).unwrap().scale(&cg)), Some(minus_one));
            }
        }
    }

    #[test]
    fn generic_constructions_specialize() {
        for p in [2u32, 3, 4] {
            let f = RootField::new(p);
            for i in 1..p {
                let g = GenericField;
                let lift = |op: GradedOperator<LaurentRational>| op.try_map_scalars(|c| specialize(c, p)).unwrap();
                assert_eq!(lift(theta_basis_in(&g, p, i).unwrap()), theta_basis(&f, i).unwrap());
                assert_eq!(lift(gamma_basis_in(&g, p, i).unwrap()), gamma_basis(&f, i).unwrap());
                assert_eq!(lift(theta_diagram_in(&g, p, i).unwrap()), theta_diagram(&f, i).unwrap());
                assert_eq!(lift(gamma_diagram_in(&g, p, i).unwrap()), gamma_diagram(&f, i).unwrap());
            }
        }
    }

    #[test]
    fn identity_factor_holds() {
        for i in 1..6 {
            assert!(identity_factor(&GenericField, i).unwrap());
        }
        assert!(identity_factor(&RootField::new(3), 2).unwrap());
    }

    #[test]
    fn all_checks_pass() {
        for p in [2u32, 3] {
            let f = RootField::new(p);
            for i in 1..p {
                for c in verify_morphisms(&f, i).unwrap() {
                    assert_eq!(c.passed, !c.name.contains("equals the quoted"), "p={p} i={i}: {}", c.name);
                }
            }
        }
    }

    #[test]
    fn gamma_one_u_table_reflects_theta() {
        // the upper copy sits p+i weights above the source
        let t = gamma_table(3, 1, 1, Pos::U);
        assert!(t(4, 0));
        assert!(!t(4, 2));
    }

    #[test]
    fn negative_control_tables() {
        let f = RootField::new(3);
        let th = theta_variant(&f, 1, 2, Pos::L).unwrap();
        assert!(!th.support_within(theta_table(3, 1, 1, Pos::L)));
    }

    #[test]
    fn variant_composites_are_second_endomorphisms() {
        let f = RootField::new(3);
        let one = f.to_scalar(&CycNumber::one());
        let zero = f.to_scalar(&CycNumber::zero());
        for i in 1..3 {
            for (a, b, c) in variant_composites(&f, i).unwrap() {
                let want = match (a, b) {
                    ((1, Pos::L), (2, Pos::L)) | ((2, Pos::U), (1, Pos::U)) => one.clone(),
                    ((1, Pos::U), (2, Pos::U)) | ((2, Pos::L), (1, Pos::L)) => one.neg(),
                    _ => zero.clone(),
                };
                assert_eq!(c, Some(want), "i={i} theta{a:?} gamma{b:?}");
            }
            assert!(projection_compatibility(&f, i).unwrap().iter().all(|(_, ok)| *ok));
        }
    }

    #[test]
    fn out_of_range() {
        let f = RootField::new(3);
        assert!(theta_basis(&f, 0).is_err());
        assert!(gamma_diagram(&f, 3).is_err());
        assert!(theta_variant(&f, 1, 3, Pos::L).is_err());
    }
}
