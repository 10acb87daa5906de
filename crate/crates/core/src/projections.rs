//! Projections onto the projective indecomposables inside tensor powers of
//! `X`, built by descent through the fusion rules, and the isomorphisms
//! realizing those fusion rules.

use serde::{Deserialize, Serialize};

use crate::cyclotomic::CycNumber;
use crate::diagram::{cup_op, jw_at_root, partial_trace_left, partial_trace_right};
use crate::error::{ensure, Error, Result};
use crate::field::Field;
use crate::generators::{alpha_op, beta_op, verify_centralizer, Op};
use crate::linalg::{Matrix, SparseMat};
use crate::module::{build_projective, build_simple, hom_space, image_spectrum, isotypic, Mat, ModuleId, ModulePresentation, Rep, Sign, Subrep};
use crate::operator::GradedOperator;
use crate::scalar::{gamma_const, RootField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Descent,
}

/// An idempotent on `X^{(x)strands}` with image `P^+_i` (sign `+`) or
/// `P^-_i (+) P^-_i` (sign `-`).
#[derive(Debug, Clone)]
pub struct ProjectionBundle {
    pub p: u32,
    pub i: u32,
    pub sign: Sign,
    pub strands: usize,
    pub proj: Op,
    pub method: Method,
    /// For the negative pair: two orthogonal idempotents summing to `proj`.
    pub split: Option<(Op, Op)>,
}

impl ProjectionBundle {
    pub fn expected_rank(&self) -> usize {
        let d = 2 * self.p as usize;
        match self.sign {
            Sign::Plus => d,
            Sign::Minus => 2 * d,
        }
    }

    pub fn module(&self) -> ModuleId {
        ModuleId::projective(self.i, self.sign)
    }
}

fn flat(op: &Op) -> Mat {
    op.to_flat()
}

fn graded(n: usize, m: &Mat) -> Op {
    GradedOperator::from_flat(n, n, m)
}

/// The `T`-isotypic idempotent inside the image of `q`, with `mult` copies
/// expected. The result must commute with every endomorphism of `im q`,
/// which makes it the unique idempotent with that image type.
pub fn extract_isotypic(field: &RootField, q: &Op, target: &ModulePresentation, mult: usize) -> Result<Op> {
    let n = q.dom();
    let rep = Rep::tensor_power(field, n);
    let qf = flat(q);
    let iso = isotypic(&rep, &target.rep, Some(&qf));
    ensure!(
        iso.multiplicity == mult,
        Identification,
        "expected {mult} copies of {} on {n} strands, found {}",
        target.id,
        iso.multiplicity
    );
    let e = iso.idempotent;
    let sub = Subrep::of(&rep, &qf);
    for h in hom_space(&sub.rep, &sub.rep) {
        let lifted = sub.basis.mul(&h).mul(&sub.coords);
        ensure!(
            e.mul(&lifted) == lifted.mul(&e),
            Identification,
            "the {} part of the image on {n} strands is not a central summand",
            target.id
        );
    }
    Ok(graded(n, &e))
}

/// `P^+_j` on `X^{(x)(2p-j-1)}` for `j = p-1` down to `i`, starting from
/// `f_{p-1} (x) 1` and extracting the `P^+_{j-1}` summand of `P^+_j (x) X`.
pub fn positive_chain(field: &RootField, i: u32) -> Result<Vec<Op>> {
    let p = field.p();
    ensure!((1..p).contains(&i), OutOfRange, "projective index must satisfy 1 <= i <= p-1, got i={i}, p={p}");
    let mut chain = vec![jw_at_root(p as usize - 1, p)?.pad(0, 1)];
    for j in (i..p - 1).rev() {
        let q = chain.last().expect("nonempty").pad(0, 1);
        let target = build_projective(j, Sign::Plus, p)?;
        chain.push(extract_isotypic(field, &q, &target, 1)?);
    }
    Ok(chain)
}

pub fn proj_pos(field: &RootField, i: u32) -> Result<ProjectionBundle> {
    let chain = positive_chain(field, i)?;
    let proj = chain.into_iter().last().expect("nonempty");
    Ok(ProjectionBundle {
        p: field.p(),
        i,
        sign: Sign::Plus,
        strands: proj.dom(),
        proj,
        method: Method::Descent,
        split: None,
    })
}

/// `alpha beta / gamma` and `beta alpha / gamma` on `2p-1` strands: two
/// orthogonal idempotents summing to `f_{2p-1}`.
pub fn generator_split(field: &RootField) -> Result<(Op, Op)> {
    let a = alpha_op(field);
    let b = beta_op(field);
    let g = gamma_const(field.p())
        .inv()
        .ok_or_else(|| Error::Unsupported("gamma vanishes".into()))?;
    Ok((a.compose(&b).scale(&g), b.compose(&a).scale(&g)))
}

/// The `2 X^-_p` summand of `P^+_1 (x) X` on `2p-1` strands.
pub fn negative_start(field: &RootField) -> Result<Op> {
    let p = field.p();
    let p1 = positive_chain(field, 1)?.pop().expect("nonempty");
    let target = build_simple(p, Sign::Minus, p)?;
    extract_isotypic(field, &p1.pad(0, 1), &target, 2)
}

/// Projection onto `P^-_i (+) P^-_i` inside `X^{(x)(3p-i-1)}`, split into
/// two orthogonal copies by inserting `alpha beta / gamma` and
/// `beta alpha / gamma` on the leftmost `2p-1` strands.
pub fn proj_neg_pair(field: &RootField, i: u32) -> Result<ProjectionBundle> {
    let p = field.p();
    ensure!((1..p).contains(&i), OutOfRange, "projective index must satisfy 1 <= i <= p-1, got i={i}, p={p}");
    // X^-_p (x) X = P^-_{p-1}, so the first pair is the start tensored by 1
    let mut pair = negative_start(field)?.pad(0, 1);
    for j in (i..p - 1).rev() {
        let target = build_projective(j, Sign::Minus, p)?;
        pair = extract_isotypic(field, &pair.pad(0, 1), &target, 2)?;
    }
    let mut bundle = ProjectionBundle {
        p,
        i,
        sign: Sign::Minus,
        strands: pair.dom(),
        proj: pair,
        method: Method::Descent,
        split: None,
    };
    bundle.split = Some(split_neg(field, &bundle)?);
    Ok(bundle)
}

/// Splits the negative pair with the generator idempotents.
pub fn split_neg(field: &RootField, bundle: &ProjectionBundle) -> Result<(Op, Op)> {
    ensure!(bundle.sign == Sign::Minus, Unsupported, "only the negative pair is split");
    let w = 2 * field.p() as usize - 1;
    let (g1, g2) = generator_split(field)?;
    let extra = bundle.strands - w;
    let e1 = bundle.proj.compose(&g1.pad(0, extra));
    let e2 = bundle.proj.compose(&g2.pad(0, extra));
    ensure!(e1.add(&e2) == bundle.proj, Identification, "generator split does not sum to the pair projection");
    Ok((e1, e2))
}

/// Outcome of [`verify_projection`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionReport {
    pub idempotent: bool,
    pub intertwiner: bool,
    pub rank: usize,
    pub expected_rank: usize,
    pub spectrum_matches: bool,
    /// Dimension of `End` of each indecomposable piece.
    pub end_dims: Vec<usize>,
    /// Each piece's endomorphism ring is spanned by 1 and a nonzero
    /// square-zero element.
    pub local: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub absorbs_phi: Option<bool>,
}

impl ProjectionReport {
    pub fn passed(&self) -> bool {
        self.idempotent
            && self.intertwiner
            && self.rank == self.expected_rank
            && self.spectrum_matches
            && self.end_dims.iter().all(|d| *d == 2)
            && self.local
            && self.split_ok.unwrap_or(true)
            && self.absorbs_phi.unwrap_or(true)
    }
}

/// Whether the endomorphism ring of the image of `e` is 2-dimensional and
/// local with square-zero radical.
fn local_end(rep: &Rep, e: &Mat) -> (usize, bool) {
    let sub = Subrep::of(rep, e);
    let basis = hom_space(&sub.rep, &sub.rep);
    let d = sub.dim();
    let id = SparseMat::identity(d);
    let inv_d = CycNumber::from_i64(d as i64).inv().expect("nonzero dimension");
    let trace = |m: &Mat| (0..m.rows()).fold(CycNumber::zero(), |acc, i| acc.add_ref(&m.get(i, i)));
    let local = basis.len() == 2
        && basis.iter().any(|h| {
            let nil = h.sub(&id.scale(&trace(h).mul_ref(&inv_d)));
            !nil.is_zero() && nil.mul(&nil).is_zero()
        });
    (basis.len(), local)
}

use num_traits::Zero;

pub fn verify_projection(field: &RootField, bundle: &ProjectionBundle, phi: Option<&Op>) -> Result<ProjectionReport> {
    let p = field.p();
    let n = bundle.strands;
    let rep = Rep::tensor_power(field, n);
    let proj = &bundle.proj;
    let pf = flat(proj);
    let target = build_projective(bundle.i, bundle.sign, p)?;
    let copies = match bundle.sign {
        Sign::Plus => 1,
        Sign::Minus => 2,
    };
    let mut want: Vec<u32> = (0..copies).flat_map(|_| target.rep.spectrum()).collect();
    want.sort_unstable();
    let pieces: Vec<Mat> = match &bundle.split {
        Some((a, b)) => vec![flat(a), flat(b)],
        None => vec![pf.clone()],
    };
    let mut end_dims = Vec::new();
    let mut local = true;
    for e in &pieces {
        let (d, l) = local_end(&rep, e);
        end_dims.push(d);
        local &= l;
    }
    let split_ok = bundle.split.as_ref().map(|(a, b)| {
        a.compose(a) == *a
            && b.compose(b) == *b
            && a.compose(b).is_zero()
            && b.compose(a).is_zero()
            && a.add(b) == *proj
            && a.rank() == 2 * p as usize
            && b.rank() == 2 * p as usize
    });
    Ok(ProjectionReport {
        idempotent: proj.compose(proj) == *proj,
        intertwiner: verify_centralizer(field, proj),
        rank: proj.rank(),
        expected_rank: bundle.expected_rank(),
        spectrum_matches: image_spectrum(&rep, &pf) == want,
        end_dims,
        local,
        split_ok,
        absorbs_phi: phi.map(|f| proj.compose(f) == *f && f.compose(proj) == *f),
    })
}

/// The fusion rules whose isomorphisms appear in the descent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FusionRule {
    /// `X_p (x) X = P_{p-1}`.
    SimpleTop,
    /// `P_{p-1} (x) X = P_{p-2} (+) 2 X_p`, `p >= 3`.
    TopProjective,
    /// `P_i (x) X = P_{i-1} (+) P_{i+1}`, `2 <= i <= p-2`.
    Middle(u32),
    /// `P_1 (x) X = P_2 (+) 2 X^-_p`, `p >= 3`.
    Bottom,
    /// `P_1 (x) X = 2 X^+_2 (+) 2 X^-_2` at `p = 2`.
    SmallRoot,
}

/// One summand of the target of an isomorphism, as an idempotent.
#[derive(Debug, Clone)]
pub struct Target {
    pub module: ModuleId,
    pub proj: Op,
}

/// `V = (V_k)` from the image of `source` onto the direct sum of the target
/// images, with inverse `W = (W_k)`: `sum_k W_k V_k = source` and
/// `V_j W_k = delta_{jk} target_k`.
#[derive(Debug, Clone)]
pub struct IsoMap {
    pub rule: FusionRule,
    pub source: Op,
    pub targets: Vec<Target>,
    pub v: Vec<Op>,
    pub w: Vec<Op>,
}

fn candidates(field: &RootField, from: usize, to: usize) -> Result<Vec<Op>> {
    if from == to {
        Ok(vec![GradedOperator::identity(from)])
    } else if to + 2 == from {
        (1..from).rev().map(|j| cup_op(field, j, from)).collect()
    } else {
        Err(Error::Arity(format!("no candidate maps from {from} to {to} strands")))
    }
}

fn dense_rank(rows: &[Vec<CycNumber>], cols: usize) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut m = Matrix::zeros(rows.len(), cols);
    for (r, row) in rows.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            m[(r, c)] = v.clone();
        }
    }
    m.rank()
}

/// Builds `V` from cups (or the identity) followed by the target
/// projections, choosing for each target the first candidate that keeps
/// the stacked map injective on the source image. `W` is its exact inverse.
pub fn synthesize_iso(field: &RootField, rule: FusionRule, source: Op, targets: Vec<Target>) -> Result<IsoMap> {
    let n = source.dom();
    let src = Subrep::of(&Rep::tensor_power(field, n), &flat(&source));
    let da = src.dim();
    let mut rows: Vec<Vec<CycNumber>> = Vec::new();
    let mut v = Vec::new();
    let mut subs = Vec::new();
    for t in &targets {
        let m = t.proj.dom();
        let sub = Subrep::of(&Rep::tensor_power(field, m), &flat(&t.proj));
        let mut chosen = None;
        for d in candidates(field, n, m)? {
            let vk = GradedOperator::compose_all([&t.proj, &d, &source]);
            if v.contains(&vk) {
                continue;
            }
            let block = sub.coords.mul(&flat(&vk)).mul(&src.basis).to_dense();
            let mut trial = rows.clone();
            trial.extend((0..block.rows()).map(|r| block.row(r).to_vec()));
            if dense_rank(&trial, da) == rows.len() + sub.dim() {
                rows = trial;
                chosen = Some(vk);
                break;
            }
        }
        let vk = chosen.ok_or_else(|| Error::Identification(format!("no injective map onto {} found", t.module)))?;
        v.push(vk);
        subs.push(sub);
    }
    ensure!(rows.len() == da, Identification, "target dimension {} differs from source dimension {da}", rows.len());
    let inv = Matrix::from_rows(rows).inverse().ok_or_else(|| Error::Identification("stacked map is not invertible".into()))?;
    let mut w = Vec::new();
    let mut off = 0;
    for (t, sub) in targets.iter().zip(&subs) {
        let dk = sub.dim();
        let cols: Vec<usize> = (off..off + dk).collect();
        let rows: Vec<usize> = (0..da).collect();
        let block = SparseMat::from_dense(&inv).submatrix(&rows, &cols);
        let wk = src.basis.mul(&block).mul(&sub.coords);
        w.push(GradedOperator::from_flat(t.proj.dom(), n, &wk));
        off += dk;
    }
    Ok(IsoMap { rule, source, targets, v, w })
}

pub fn iso_map(field: &RootField, rule: FusionRule) -> Result<IsoMap> {
    let p = field.p();
    let jw_top = || -> Result<Op> { Ok(jw_at_root(p as usize - 1, p)?) };
    let proj = |i: u32| -> Result<Op> { Ok(proj_pos(field, i)?.proj) };
    let simple = |s: u32, sign: Sign| ModuleId::simple(s, sign);
    let pos = |i: u32| ModuleId::projective(i, Sign::Plus);
    match rule {
        FusionRule::SimpleTop => {
            let q = jw_top()?.pad(0, 1);
            let t = Target { module: pos(p - 1), proj: proj(p - 1)? };
            synthesize_iso(field, rule, q, vec![t])
        }
        FusionRule::TopProjective => {
            ensure!(p >= 3, Unsupported, "P_(p-1) (x) X = P_(p-2) + 2 X_p needs p >= 3");
            let q = proj(p - 1)?.pad(0, 1);
            let top = Target { module: simple(p, Sign::Plus), proj: jw_top()? };
            synthesize_iso(field, rule, q, vec![Target { module: pos(p - 2), proj: proj(p - 2)? }, top.clone(), top])
        }
        FusionRule::Middle(i) => {
            ensure!(i >= 2 && i + 2 <= p, Unsupported, "P_i (x) X = P_(i-1) + P_(i+1) needs 2 <= i <= p-2, got i={i}, p={p}");
            let q = proj(i)?.pad(0, 1);
            synthesize_iso(
                field,
                rule,
                q,
                vec![Target { module: pos(i - 1), proj: proj(i - 1)? }, Target { module: pos(i + 1), proj: proj(i + 1)? }],
            )
        }
        FusionRule::Bottom => {
            ensure!(p >= 3, Unsupported, "P_1 (x) X = P_2 + 2 X^-_p needs p >= 3");
            let q = proj(1)?.pad(0, 1);
            let (g1, g2) = generator_split(field)?;
            let m = simple(p, Sign::Minus);
            synthesize_iso(
                field,
                rule,
                q,
                vec![Target { module: pos(2), proj: proj(2)? }, Target { module: m, proj: g1 }, Target { module: m, proj: g2 }],
            )
        }
        FusionRule::SmallRoot => {
            ensure!(p == 2, Unsupported, "this fusion rule is specific to p = 2");
            let q = proj(1)?.pad(0, 1);
            let (g1, g2) = generator_split(field)?;
            let x = Target { module: simple(2, Sign::Plus), proj: jw_top()? };
            let m = simple(2, Sign::Minus);
            synthesize_iso(field, rule, q, vec![x.clone(), x, Target { module: m, proj: g1 }, Target { module: m, proj: g2 }])
        }
    }
}

/// All rules that apply at this `p`.
pub fn rules_for(p: u32) -> Vec<FusionRule> {
    let mut out = vec![FusionRule::SimpleTop];
    if p == 2 {
        out.push(FusionRule::SmallRoot);
    } else {
        out.push(FusionRule::TopProjective);
        out.extend((2..=p - 2).map(FusionRule::Middle));
        out.push(FusionRule::Bottom);
    }
    out
}

/// `W V = id` on the source image and `V W = id` on the target sum.
pub fn verify_iso(iso: &IsoMap) -> bool {
    let sum = iso
        .w
        .iter()
        .zip(&iso.v)
        .fold(GradedOperator::zero(iso.source.dom(), iso.source.dom()), |acc, (w, v)| acc.add(&w.compose(v)));
    if sum != iso.source {
        return false;
    }
    for (j, vj) in iso.v.iter().enumerate() {
        for (k, wk) in iso.w.iter().enumerate() {
            let prod = vj.compose(wk);
            let ok = if j == k { prod == iso.targets[k].proj } else { prod.is_zero() };
            if !ok {
                return false;
            }
        }
    }
    true
}

/// The first `i` (if any) at which the left and right partial traces of
/// the positive projection differ.
pub fn partial_trace_asymmetry(field: &RootField) -> Result<Option<u32>> {
    for i in 1..field.p() {
        let proj = proj_pos(field, i)?.proj;
        if partial_trace_left(field, &proj)? != partial_trace_right(field, &proj)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p2_positive_is_identity() {
        let f = RootField::new(2);
        let b = proj_pos(&f, 1).unwrap();
        assert_eq!(b.strands, 2);
        assert_eq!(b.proj, GradedOperator::identity(2));
    }

    #[test]
    fn p3_base_case() {
        let f = RootField::new(3);
        let b = proj_pos(&f, 2).unwrap();
        assert_eq!(b.proj, jw_at_root(2, 3).unwrap().pad(0, 1));
        assert_eq!(b.proj.rank(), 6);
    }

    #[test]
    fn positive_projections_verify() {
        for p in [2u32, 3] {
            let f = RootField::new(p);
            for i in 1..p {
                let b = proj_pos(&f, i).unwrap();
                assert_eq!(b.strands, (2 * p - i - 1) as usize);
                let r = verify_projection(&f, &b, None).unwrap();
                assert!(r.passed(), "p={p} i={i} {r:?}");
            }
        }
    }

    #[test]
    fn negative_start_is_jones_wenzl() {
        for p in [2u32, 3] {
            let f = RootField::new(p);
            let n = negative_start(&f).unwrap();
            assert_eq!(n, jw_at_root(2 * p as usize - 1, p).unwrap());
        }
    }

    #[test]
    fn negative_pairs_verify() {
        for p in [2u32, 3] {
            let f = RootField::new(p);
            for i in 1..p {
                let b = proj_neg_pair(&f, i).unwrap();
                assert_eq!(b.strands, (3 * p - i - 1) as usize);
                let r = verify_projection(&f, &b, None).unwrap();
                assert!(r.passed(), "p={p} i={i} {r:?}");
                assert_eq!(r.rank, 4 * p as usize);
            }
        }
    }

    #[test]
    fn split_halves_are_isomorphic() {
        let f = RootField::new(3);
        let b = proj_neg_pair(&f, 2).unwrap();
        let (e1, e2) = b.split.clone().unwrap();
        let rep = Rep::tensor_power(&f, b.strands);
        let s1 = Subrep::of(&rep, &flat(&e1));
        let s2 = Subrep::of(&rep, &flat(&e2));
        let homs = hom_space(&s1.rep, &s2.rep);
        assert!(homs.iter().any(|h| h.rank() == s1.dim()));
    }

    #[test]
    fn wrong_rank_idempotent_fails() {
        let f = RootField::new(3);
        let mut b = proj_pos(&f, 1).unwrap();
        b.proj = jw_at_root(2, 3).unwrap().pad(0, 2);
        let r = verify_projection(&f, &b, None).unwrap();
        assert!(!r.passed());
        assert!(!r.spectrum_matches);
    }

    #[test]
    fn isomorphisms_invert() {
        for p in [2u32, 3] {
            let f = RootField::new(p);
            for rule in rules_for(p) {
                let iso = iso_map(&f, rule).unwrap();
                assert!(verify_iso(&iso), "p={p} {rule:?}");
            }
        }
    }

    #[test]
    fn top_rule_is_identity() {
        let f = RootField::new(3);
        let iso = iso_map(&f, FusionRule::SimpleTop).unwrap();
        assert_eq!(iso.v[0], iso.source);
        assert_eq!(iso.w[0], iso.source);
    }

    #[test]
    fn rule_ranges() {
        let f = RootField::new(3);
        assert!(matches!(iso_map(&f, FusionRule::Middle(2)), Err(Error::Unsupported(_))));
        assert!(iso_map(&f, FusionRule::SmallRoot).is_err());
        assert!(iso_map(&RootField::new(2), FusionRule::Bottom).is_err());
    }

    #[test]
    fn partial_traces_differ_at_p3() {
        assert_eq!(partial_trace_asymmetry(&RootField::new(2)).unwrap(), None);
        assert_eq!(partial_trace_asymmetry(&RootField::new(3)).unwrap(), Some(1));
    }

    #[test]
    fn out_of_range_index() {
        let f = RootField::new(3);
        assert!(proj_pos(&f, 0).is_err());
        assert!(proj_pos(&f, 3).is_err());
        assert!(proj_neg_pair(&f, 3).is_err());
    }
}
