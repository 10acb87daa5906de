//! The extra generators `alpha`, `beta` on `2p-1` strands and the
//! relations they satisfy.

use std::collections::HashSet;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::CycNumber;
use crate::diagram::{cap_op, cup_op, is_intertwiner, jw_at_root, rotate, tl_e, Direction};
use crate::error::{ensure, Result};
use crate::field::Field;
use crate::linalg::Echelon;
use crate::module::{hom_space, Rep};
use crate::operator::{BasisState, GradedOperator, GradedVector};
use crate::scalar::{gamma_const, QField, RootField, Scalar};
use crate::tensor::{e_pow_full, f_pow_vacuum, rho_exponent};

pub type Op = GradedOperator<CycNumber>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Alpha,
    Beta,
}

/// `alpha(rho_S) = q^{e(S)} [k]! E^{p-k-1} x_{2p-1}` for `S` of weight `k`,
/// with `E^{-1} = 0`.
pub fn alpha_op(field: &RootField) -> Op {
    let p = field.p() as i64;
    let z = (2 * p - 1) as usize;
    let cols = (0..p).flat_map(|k| {
        let v = e_pow_full(field, p - k - 1, z).scale(&field.qfact(k as u32));
        BasisState::block(z, k as usize)
            .map(move |s| (s, v.scale(&field.q_pow(rho_exponent(&s)))))
            .collect::<Vec<_>>()
    });
    GradedOperator::from_columns(z, z, cols)
}

/// `beta(rho_S) = q^{e(S)} [2p-1-k]! F^{k-p} x_0`, with `F^{-1} = 0`.
pub fn beta_op(field: &RootField) -> Op {
    let p = field.p() as i64;
    let z = (2 * p - 1) as usize;
    let cols = (p..=2 * p - 1).flat_map(|k| {
        let v = f_pow_vacuum(field, k - p, z).scale(&field.qfact((2 * p - 1 - k) as u32));
        BasisState::block(z, k as usize)
            .map(move |s| (s, v.scale(&field.q_pow(rho_exponent(&s)))))
            .collect::<Vec<_>>()
    });
    GradedOperator::from_columns(z, z, cols)
}

pub fn generator(field: &RootField, which: Which) -> Op {
    match which {
        Which::Alpha => alpha_op(field),
        Which::Beta => beta_op(field),
    }
}

/// `alpha_i` or `beta_i` inside `X^{(x)n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub p: u32,
    pub which: Which,
    pub offset: usize,
    pub n: usize,
}

/// `1^{(x)(i-1)} (x) g (x) 1^{(x)(n-i-2p+2)}`.
pub fn embed_generator(field: &RootField, spec: GeneratorSpec) -> Result<Op> {
    ensure!(spec.p == field.p(), ModeMismatch, "generator at p={} in a field at p={}", spec.p, field.p());
    let w = 2 * spec.p as usize - 1;
    ensure!(
        spec.offset >= 1 && spec.offset + w - 1 <= spec.n,
        Arity,
        "generator on strands {}..{} does not fit in {}",
        spec.offset,
        spec.offset + w - 1,
        spec.n
    );
    Ok(generator(field, spec.which).pad(spec.offset - 1, spec.n + 1 - spec.offset - w))
}

fn embed(field: &RootField, which: Which, offset: usize, n: usize) -> Op {
    embed_generator(field, GeneratorSpec { p: field.p(), which, offset, n }).expect("offset fits")
}

/// True iff `t` commutes with `E`, `F`, `K` on its strands.
pub fn verify_centralizer(field: &RootField, t: &Op) -> bool {
    is_intertwiner(field, t)
}

/// Where two operators first differ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub input: String,
    pub output: String,
    pub lhs: Scalar,
    pub rhs: Scalar,
    pub context: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub relation: u32,
    pub status: Status,
    pub strands: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

struct Check<'a> {
    field: &'a RootField,
    witness: Option<Witness>,
}

impl Check<'_> {
    fn eq(&mut self, lhs: &Op, rhs: &Op, context: impl FnOnce() -> String) -> bool {
        if self.witness.is_some() {
            return false;
        }
        if lhs.dom() != rhs.dom() || lhs.cod() != rhs.cod() {
            self.witness = Some(Witness {
                input: String::new(),
                output: String::new(),
                lhs: Scalar::Root(self.field.element(&CycNumber::zero())),
                rhs: Scalar::Root(self.field.element(&CycNumber::zero())),
                context: format!("{}: arity ({},{}) vs ({},{})", context(), lhs.dom(), lhs.cod(), rhs.dom(), rhs.cod()),
            });
            return false;
        }
        match lhs.first_difference(rhs) {
            None => true,
            Some((x, y, a, b)) => {
                self.witness = Some(Witness {
                    input: x.to_string(),
                    output: y.to_string(),
                    lhs: self.field.to_scalar(&a),
                    rhs: self.field.to_scalar(&b),
                    context: context(),
                });
                false
            }
        }
    }

    fn zero(&mut self, lhs: &Op, context: impl FnOnce() -> String) -> bool {
        let z = GradedOperator::zero(lhs.dom(), lhs.cod());
        self.eq(lhs, &z, context)
    }
}

/// Smallest ambient strand count on which a relation is meaningful.
pub fn min_strands(relation: u32, p: u32) -> usize {
    let p = p as usize;
    match relation {
        4 => 3 * p - 2,
        5 | 6 => 3 * p - 1,
        9..=12 | 15 | 16 => 2 * p,
        _ => 2 * p - 1,
    }
}

/// The coefficients `k_i = (-1)^i [i-2] k_1 + (-1)^i [i-1] k_2`.
pub fn rotation_coefficients(field: &RootField, k1: &CycNumber, k2: &CycNumber) -> Vec<CycNumber> {
    let p = field.p() as i64;
    (0..4 * p)
        .map(|i| {
            let c = field.qint(i - 2).mul_ref(k1).add_ref(&field.qint(i - 1).mul_ref(k2));
            if i % 2 == 0 {
                c
            } else {
                c.neg_ref()
            }
        })
        .collect()
}

/// Checks one relation of the presentation. `n` overrides the ambient
/// strand count for the relations that involve shifted generators.
pub fn verify_relation(field: &RootField, relation: u32, n: Option<usize>) -> Result<RelationReport> {
    ensure!((1..=16).contains(&relation), OutOfRange, "relation ids run from 1 to 16, got {relation}");
    let p = field.p() as usize;
    let w = 2 * p - 1;
    let min = min_strands(relation, field.p());
    let n = match relation {
        4..=6 | 9..=12 => n.unwrap_or(min),
        _ => min,
    };
    ensure!(n >= min, Arity, "relation {relation} needs at least {min} strands at p={p}, got {n}");
    let a = alpha_op(field);
    let b = beta_op(field);
    let gamma = gamma_const(field.p());
    let mut c = Check { field, witness: None };
    let slots = n + 2 - 2 * p;
    let ok = match relation {
        1 => c.zero(&a.compose(&a), || "alpha^2".into()) && c.zero(&b.compose(&b), || "beta^2".into()),
        2 => c.eq(&GradedOperator::compose_all([&a, &b, &a]), &a.scale(&gamma), || "alpha beta alpha".into()),
        3 => c.eq(&GradedOperator::compose_all([&b, &a, &b]), &b.scale(&gamma), || "beta alpha beta".into()),
        4 => {
            let mut ok = true;
            for which in [Which::Alpha, Which::Beta] {
                let g: Vec<Op> = (1..=slots).map(|i| embed(field, which, i, n)).collect();
                for i in 1..=slots {
                    for j in 1..=slots {
                        if i.abs_diff(j) < p {
                            ok &= c.zero(&g[i - 1].compose(&g[j - 1]), || format!("{which:?}_{i} {which:?}_{j}"));
                        }
                    }
                }
            }
            ok
        }
        5 | 6 => {
            let which = if relation == 5 { Which::Alpha } else { Which::Beta };
            let mut ok = true;
            for i in 1..=slots.saturating_sub(p) {
                let gi = embed(field, which, i, n);
                let gj = embed(field, which, i + p, n);
                ok &= c.eq(&gi.compose(&gj), &gj.compose(&gi), || format!("{which:?}_{i} and {which:?}_{}", i + p));
            }
            ok
        }
        7 => {
            let f = jw_at_root(w, field.p())?;
            c.eq(&a.compose(&b).add(&b.compose(&a)), &f.scale(&gamma), || "alpha beta + beta alpha".into())
        }
        8 => {
            let mut ok = true;
            for (name, g) in [("alpha", &a), ("beta", &b)] {
                for i in 1..w {
                    let cap = cap_op(field, i, w)?;
                    let cup = cup_op(field, i, w)?;
                    ok &= c.zero(&g.compose(&cap), || format!("{name} cap_{i}"));
                    ok &= c.zero(&cup.compose(g), || format!("cup_{i} {name}"));
                }
            }
            ok
        }
        9..=12 => {
            let which = if relation % 2 == 1 { Which::Alpha } else { Which::Beta };
            let mut ok = true;
            for i in 1..slots {
                let g_next = embed(field, which, i + 1, n);
                let g = embed(field, which, i, n);
                let far = i + 2 * p - 2;
                if relation <= 10 {
                    let lhs = g_next.compose(&cap_op(field, i, n)?);
                    let rhs = g.compose(&cap_op(field, far, n)?);
                    ok &= c.eq(&lhs, &rhs, || format!("{which:?}_{} cap_{i} vs {which:?}_{i} cap_{far}", i + 1));
                } else {
                    let lhs = cup_op(field, i, n)?.compose(&g_next);
                    let rhs = cup_op(field, far, n)?.compose(&g);
                    ok &= c.eq(&lhs, &rhs, || format!("cup_{i} {which:?}_{} vs cup_{far} {which:?}_{i}", i + 1));
                }
            }
            ok
        }
        13 => c.eq(&rotate(field, &a, Direction::Clockwise)?, &a, || "rotated alpha".into()),
        14 => c.eq(&rotate(field, &b, Direction::Clockwise)?, &b, || "rotated beta".into()),
        15 | 16 => {
            let g = if relation == 15 { &a } else { &b };
            let start = g.pad(0, 1);
            let mut rots = vec![start];
            for _ in 1..4 * p {
                let next = rotate(field, rots.last().expect("nonempty"), Direction::Clockwise)?;
                rots.push(next);
            }
            let mut ok = true;
            let one = CycNumber::one();
            let zero = CycNumber::zero();
            for (k1, k2) in [(&one, &zero), (&zero, &one)] {
                let ks = rotation_coefficients(field, k1, k2);
                let sum = rots
                    .iter()
                    .zip(&ks)
                    .fold(GradedOperator::zero(2 * p, 2 * p), |acc, (r, k)| acc.add(&r.scale(k)));
                ok &= c.zero(&sum, || format!("rotation sum with (k1,k2)=({k1},{k2})"));
            }
            ok
        }
        _ => unreachable!(),
    };
    Ok(RelationReport { relation, status: if ok { Status::Pass } else { Status::Fail }, strands: n, witness: c.witness })
}

/// Runs [`verify_relation`] for each id, in parallel.
pub fn verify_thm1(field: &RootField, relations: &[u32], n: Option<usize>) -> Result<Vec<RelationReport>> {
    relations.par_iter().map(|r| verify_relation(field, *r, n)).collect()
}

/// Dimension of `End(X^{(x)z})` from the hom-space solver.
pub fn commutant_dim(field: &RootField, z: usize) -> usize {
    let rep = Rep::tensor_power(field, z);
    hom_space(&rep, &rep).len()
}

fn flatten(op: &Op) -> Vec<(usize, CycNumber)> {
    let n = 1usize << op.dom();
    op.to_flat().entries().map(|(r, c, v)| (r * n + c, v.clone())).collect()
}

/// Dimension of the span of all words in `e_1, ..., e_{z-1}`, by breadth-first
/// search that only extends words which were new.
pub fn tl_span(field: &RootField, z: usize) -> Echelon<CycNumber> {
    let gens: Vec<Op> = (1..z).map(|i| tl_e(field, i, z).expect("valid index")).collect();
    let mut ech = Echelon::new();
    let id = GradedOperator::identity(z);
    ech.insert(flatten(&id));
    let mut frontier = vec![id];
    let mut seen: HashSet<Vec<(usize, String)>> = HashSet::new();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for w in &frontier {
            for g in &gens {
                let prod = g.compose(w);
                let key: Vec<(usize, String)> = flatten(&prod).into_iter().map(|(i, v)| (i, format!("{v:?}"))).collect();
                if !seen.insert(key) {
                    continue;
                }
                if ech.insert(flatten(&prod)) {
                    next.push(prod);
                }
            }
        }
        frontier = next;
    }
    ech
}

pub fn in_span(ech: &Echelon<CycNumber>, op: &Op) -> bool {
    ech.contains(flatten(op))
}

/// `C_n = binom(2n, n) / (n + 1)`.
pub fn catalan(n: usize) -> usize {
    crate::operator::binom(2 * n, n) / (n + 1)
}

/// The image of a basis state under `alpha`, for inspection.
pub fn apply_generator(field: &RootField, which: Which, x: BasisState) -> GradedVector<CycNumber> {
    generator(field, which).apply_state(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(s: &str) -> BasisState {
        BasisState::from_bitstring(s).unwrap()
    }

    #[test]
    fn alpha_p2_on_vacuum() {
        let f = RootField::new(2);
        let v = apply_generator(&f, Which::Alpha, st("000"));
        assert_eq!(v.coeff(&st("110")), CycNumber::one());
        assert_eq!(v.coeff(&st("101")), f.q_pow(-1));
        assert_eq!(v.coeff(&st("011")), f.q_pow(-2));
    }

    #[test]
    fn beta_p2_on_110() {
        let f = RootField::new(2);
        let v = apply_generator(&f, Which::Beta, st("110"));
        let mut want = GradedVector::zero(3);
        want.add_term(st("000"), f.q_pow(2));
        assert_eq!(v, want);
    }

    #[test]
    fn weight_shifts() {
        for p in 2..=4 {
            let f = RootField::new(p);
            let pu = p as usize;
            assert!(alpha_op(&f).blocks().keys().all(|(k, k2)| *k2 == k + pu));
            assert!(beta_op(&f).blocks().keys().all(|(k, k2)| *k == k2 + pu));
            assert!(alpha_op(&f).block(pu, 2 * pu).is_none());
            for off in 1..=3 {
                let e = embed(&f, Which::Alpha, off, 2 * pu + 1);
                assert!(e.blocks().keys().all(|(k, k2)| *k2 == k + pu));
            }
        }
    }

    #[test]
    fn embedding() {
        let f = RootField::new(2);
        assert_eq!(embed(&f, Which::Beta, 1, 3), beta_op(&f));
        assert!(embed_generator(&f, GeneratorSpec { p: 2, which: Which::Alpha, offset: 3, n: 4 }).is_err());
        assert!(embed_generator(&f, GeneratorSpec { p: 3, which: Which::Alpha, offset: 1, n: 5 }).is_err());
        let a = embed(&f, Which::Alpha, 1, 5);
        let e = tl_e(&f, 4, 5).unwrap();
        assert_eq!(a.compose(&e), e.compose(&a));
    }

    #[test]
    fn generators_are_intertwiners() {
        for p in [2, 3] {
            let f = RootField::new(p);
            assert!(verify_centralizer(&f, &alpha_op(&f)));
            assert!(verify_centralizer(&f, &beta_op(&f)));
        }
        let f = RootField::new(3);
        for i in 1..6 {
            assert!(verify_centralizer(&f, &tl_e(&f, i, 6).unwrap()));
        }
        assert!(!verify_centralizer(&f, &crate::tensor::act_e(&f, 2)));
    }

    #[test]
    fn relation_seven_negative_control() {
        let f = RootField::new(2);
        let a = alpha_op(&f);
        let b = beta_op(&f);
        let wrong = jw_at_root(1, 2).unwrap().pad(0, 2).scale(&gamma_const(2));
        assert_ne!(a.compose(&b).add(&b.compose(&a)), wrong);
    }

    #[test]
    fn rotation_coefficients_start() {
        let f = RootField::new(2);
        let ks = rotation_coefficients(&f, &CycNumber::one(), &CycNumber::zero());
        // [-2], -[-1], [0], -[1]
        assert_eq!(ks[0], f.qint(2).neg_ref());
        assert_eq!(ks[1], CycNumber::one());
        assert!(ks[2].is_zero());
        assert_eq!(ks[3], CycNumber::one().neg_ref());
    }

    #[test]
    fn all_relations_hold() {
        for p in [2u32, 3] {
            let f = RootField::new(p);
            let reports = verify_thm1(&f, &(1..=16).collect::<Vec<_>>(), None).unwrap();
            for r in reports {
                assert_eq!(r.status, Status::Pass, "p={p} relation {} {:?}", r.relation, r.witness);
            }
        }
    }

    #[test]
    fn shifted_relations_on_more_strands() {
        let f = RootField::new(2);
        for r in [4, 5, 6, 9, 10, 11, 12] {
            let rep = verify_relation(&f, r, Some(7)).unwrap();
            assert_eq!(rep.status, Status::Pass, "relation {r}");
            assert_eq!(rep.strands, 7);
        }
        assert!(verify_relation(&f, 5, Some(4)).is_err());
        assert!(verify_relation(&f, 17, None).is_err());
    }

    #[test]
    fn failing_relation_has_witness() {
        // relation 2 with the wrong sign of gamma: alpha beta alpha != -gamma alpha
        let f = RootField::new(3);
        let a = alpha_op(&f);
        let b = beta_op(&f);
        let mut c = Check { field: &f, witness: None };
        let wrong = a.scale(&gamma_const(3).neg_ref());
        assert!(!c.eq(&GradedOperator::compose_all([&a, &b, &a]), &wrong, || "control".into()));
        let w = c.witness.unwrap();
        assert_ne!(w.lhs, w.rhs);
    }

    #[test]
    fn commutant_is_temperley_lieb_below_threshold() {
        for p in [2u32, 3] {
            let f = RootField::new(p);
            for z in 1..2 * p as usize - 1 {
                assert_eq!(commutant_dim(&f, z), catalan(z), "p={p} z={z}");
                assert_eq!(tl_span(&f, z).rank(), catalan(z));
            }
        }
    }

    #[test]
    fn commutant_grows_at_threshold() {
        for p in [2u32, 3] {
            let f = RootField::new(p);
            let z = 2 * p as usize - 1;
            let span = tl_span(&f, z);
            assert!(commutant_dim(&f, z) > span.rank());
            assert!(!in_span(&span, &alpha_op(&f)));
            assert!(!in_span(&span, &beta_op(&f)));
        }
    }
}
