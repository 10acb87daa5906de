//! Temperley-Lieb primitives, Jones-Wenzl projections, rotation and partial
//! traces as graded operators.

use num_traits::One;

use crate::error::{ensure, PoleError, Result};
use crate::field::Field;
use crate::operator::{BasisState, GradedOperator, GradedVector};
use crate::scalar::{qbinom_generic, GenericField, QField, RootField};
use crate::tensor::rho_exponent;
use crate::{CycNumber, LaurentRational};

fn state(bits: &str) -> BasisState {
    BasisState::from_bitstring(bits).expect("valid literal")
}

/// `X (x) X -> X+_1`: `nu_10 -> 1`, `nu_01 -> -q`.
fn cup2<F: QField>(field: &F) -> GradedOperator<F::Elem> {
    let empty = BasisState::new(0, 0);
    GradedOperator::from_entries(
        2,
        0,
        [(state("10"), empty, F::Elem::one()), (state("01"), empty, field.q_pow(1).neg_ref())],
    )
}

/// `X+_1 -> X (x) X`: `1 -> q^{-1} nu_10 - nu_01`.
fn cap2<F: QField>(field: &F) -> GradedOperator<F::Elem> {
    let empty = BasisState::new(0, 0);
    GradedOperator::from_entries(
        0,
        2,
        [(empty, state("10"), field.q_pow(-1)), (empty, state("01"), F::Elem::one().neg_ref())],
    )
}

fn check_pair(i: usize, n: usize) -> Result<()> {
    ensure!(n >= 2 && i >= 1 && i < n, OutOfRange, "strand pair ({i},{}) out of range for {n} strands", i + 1);
    Ok(())
}

/// `X^{(x)n} -> X^{(x)(n-2)}`, contracting strands `i, i+1`.
pub fn cup_op<F: QField>(field: &F, i: usize, n: usize) -> Result<GradedOperator<F::Elem>> {
    check_pair(i, n)?;
    Ok(cup2(field).pad(i - 1, n - i - 1))
}

/// `X^{(x)(n-2)} -> X^{(x)n}`, creating strands `i, i+1`.
pub fn cap_op<F: QField>(field: &F, i: usize, n: usize) -> Result<GradedOperator<F::Elem>> {
    check_pair(i, n)?;
    Ok(cap2(field).pad(i - 1, n - i - 1))
}

/// `e_i = cap_i cup_i`.
pub fn tl_e<F: QField>(field: &F, i: usize, n: usize) -> Result<GradedOperator<F::Elem>> {
    Ok(cap_op(field, i, n)?.compose(&cup_op(field, i, n)?))
}

/// Jones-Wenzl projection by the inductive formula
/// `f_n = f_{n-1} (x) 1 - [n-1]/[n] (f_{n-1} (x) 1) e_{n-1} (f_{n-1} (x) 1)`.
pub fn jw(n: usize) -> GradedOperator<LaurentRational> {
    jw_inductive(&GenericField, n).expect("no poles in generic mode")
}

/// The inductive formula evaluated directly in `field`; fails as soon as
/// some `[k]` with `k <= n` vanishes.
pub fn jw_inductive<F: QField>(field: &F, n: usize) -> Result<GradedOperator<F::Elem>, PoleError> {
    let mut f = GradedOperator::identity(n.min(1));
    for m in 2..=n {
        let coef = field
            .qint(m as i64 - 1)
            .div_ref(&field.qint(m as i64))
            .ok_or_else(|| PoleError { p: field.root_order().unwrap_or(0), what: format!("[{m}]") })?;
        let g = f.pad(0, 1);
        let e = tl_e(field, m - 1, m).expect("valid index");
        f = g.sub(&g.compose(&e).compose(&g).scale(&coef));
    }
    Ok(f)
}

/// Jones-Wenzl projection from the explicit formula
/// `rho_S -> q^{kn - (k^2-k)/2 - sum S} [n-k]!/[n]! F^k x_{0,n}`, in generic mode.
pub fn jw_closed(n: usize) -> GradedOperator<LaurentRational> {
    jw_closed_in(&GenericField, n).expect("no poles in generic mode")
}

/// The explicit formula with each coefficient formed generically and then
/// evaluated in `field`. Since `[n-k]! [k]! / [n]! = 1 / qbinom(n, k)`, a
/// pole occurs exactly where some Gaussian binomial vanishes.
pub fn jw_closed_in<F: QField>(field: &F, n: usize) -> Result<GradedOperator<F::Elem>, PoleError> {
    let mut cols = Vec::new();
    for k in 0..=n {
        let inv_binom = LaurentRational::one()
            .div_ref(&qbinom_generic(n as u32, k as u32))
            .expect("Gaussian binomials are nonzero");
        // F^k x_0 = [k]! sum_T q^{(k^2+k)/2 - sum T} rho_T; the [k]! is
        // absorbed into 1 / qbinom(n, k)
        let scale = field.lift(&inv_binom)?;
        let ki = k as i64;
        let mut fk = GradedVector::zero(n);
        for t in BasisState::block(n, k) {
            fk.add_term(t, field.q_pow((ki * ki + ki) / 2 - t.position_sum() as i64));
        }
        for s in BasisState::block(n, k) {
            let c = field.q_pow(rho_exponent(&s)).mul_ref(&scale);
            cols.push((s, fk.scale(&c)));
        }
    }
    Ok(GradedOperator::from_columns(n, n, cols))
}

/// `f_n` at `q = e^{i pi / p}`, or the pole that prevents it from existing.
pub fn jw_at_root(n: usize, p: u32) -> Result<GradedOperator<CycNumber>, PoleError> {
    jw_closed_in(&RootField::new(p), n)
}

/// Direction of a one-click rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// The top-left boundary point moves to the bottom-left.
    Clockwise,
    Counterclockwise,
}

/// Unnormalized one-click rotation of an `(n, n)` operator.
///
/// Clockwise: `(cup_1 (x) 1^n) (1 (x) T (x) 1) (1^n (x) cap_{n+1})`.
pub fn rotate_unsigned<F: QField>(field: &F, t: &GradedOperator<F::Elem>, dir: Direction) -> Result<GradedOperator<F::Elem>> {
    let n = t.dom();
    ensure!(n == t.cod() && n >= 1, Arity, "rotation needs an (n,n) operator with n >= 1, got ({},{})", t.dom(), t.cod());
    let mid = t.pad(1, 1);
    Ok(match dir {
        Direction::Clockwise => {
            GradedOperator::compose_all([&cup_op(field, 1, n + 2)?, &mid, &cap_op(field, n + 1, n + 2)?])
        }
        Direction::Counterclockwise => {
            GradedOperator::compose_all([&cup_op(field, n + 1, n + 2)?, &mid, &cap_op(field, 1, n + 2)?])
        }
    })
}

/// One-click rotation of an `(n, n)` operator, normalized by `(-1)^n`.
///
/// The zigzag is `-1`, so the unnormalized rotation sends a single strand to
/// minus itself; with the sign, `1_1 -> 1_1` and `1_2 -> e_1 -> 1_2`.
pub fn rotate<F: QField>(field: &F, t: &GradedOperator<F::Elem>, dir: Direction) -> Result<GradedOperator<F::Elem>> {
    let r = rotate_unsigned(field, t, dir)?;
    Ok(if t.dom() % 2 == 1 { r.neg() } else { r })
}

pub fn rotate_by<F: QField>(field: &F, t: &GradedOperator<F::Elem>, clicks: usize, dir: Direction) -> Result<GradedOperator<F::Elem>> {
    let mut out = t.clone();
    for _ in 0..clicks {
        out = rotate(field, &out, dir)?;
    }
    Ok(out)
}

/// Closes the rightmost strand: `(1^{n-1} (x) cup) (T (x) 1) (1^{n-1} (x) cap)`.
pub fn partial_trace_right<F: QField>(field: &F, t: &GradedOperator<F::Elem>) -> Result<GradedOperator<F::Elem>> {
    let n = t.dom();
    ensure!(n == t.cod() && n >= 1, Arity, "partial trace needs an (n,n) operator with n >= 1");
    Ok(GradedOperator::compose_all([&cup_op(field, n, n + 1)?, &t.pad(0, 1), &cap_op(field, n, n + 1)?]))
}

/// Closes the leftmost strand: `(cup (x) 1^{n-1}) (1 (x) T) (cap (x) 1^{n-1})`.
pub fn partial_trace_left<F: QField>(field: &F, t: &GradedOperator<F::Elem>) -> Result<GradedOperator<F::Elem>> {
    let n = t.dom();
    ensure!(n == t.cod() && n >= 1, Arity, "partial trace needs an (n,n) operator with n >= 1");
    Ok(GradedOperator::compose_all([&cup_op(field, 1, n + 1)?, &t.pad(1, 0), &cap_op(field, 1, n + 1)?]))
}

/// Reflection in the horizontal axis: `T: A -> B` becomes
/// `D_A^{-1} T^t D_B: B -> A` with `D = q^{weight}`. Sends cups to caps,
/// reverses composition and preserves tensor products.
pub fn reflect<F: QField>(field: &F, t: &GradedOperator<F::Elem>) -> GradedOperator<F::Elem> {
    t.transpose().map_entries(|x, y, c| c.mul_ref(&field.q_pow(x.weight() as i64 - y.weight() as i64)))
}

fn reverse(x: &BasisState) -> BasisState {
    let z = x.z();
    let mut pos: Vec<usize> = x.positions().iter().map(|i| z + 1 - i).collect();
    pos.sort_unstable();
    BasisState::from_positions(&pos, z).expect("positions in range")
}

/// Reflection in the vertical axis: reverse the strand order and apply
/// `q -> q^{-1}` to every coefficient.
pub fn mirror<F: QField>(field: &F, t: &GradedOperator<F::Elem>) -> GradedOperator<F::Elem> {
    GradedOperator::from_entries(t.dom(), t.cod(), t.entries().map(|(x, y, c)| (reverse(&x), reverse(&y), field.bar(c))))
}

/// Whether `t` commutes with the action of `E`, `F` and `K`.
pub fn is_intertwiner<F: QField>(field: &F, t: &GradedOperator<F::Elem>) -> bool {
    use crate::tensor::{act_e, act_f, act_k};
    let (m, n) = (t.dom(), t.cod());
    t.compose(&act_e(field, m)) == act_e(field, n).compose(t)
        && t.compose(&act_f(field, m)) == act_f(field, n).compose(t)
        && t.compose(&act_k(field, m)) == act_k(field, n).compose(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g() -> GenericField {
        GenericField
    }

    fn q(e: i64) -> LaurentRational {
        LaurentRational::v_pow(e)
    }

    #[test]
    fn cup_values() {
        let c = cup_op(&g(), 1, 2).unwrap();
        let empty = BasisState::new(0, 0);
        assert_eq!(c.entry(&state("10"), &empty), LaurentRational::one());
        assert_eq!(c.entry(&state("01"), &empty), q(1).neg_ref());
        assert!(c.apply_state(state("00")).is_zero());
        assert!(c.apply_state(state("11")).is_zero());
        let cap = cap_op(&g(), 1, 2).unwrap();
        let v = cap.apply_state(empty);
        assert_eq!(v.coeff(&state("10")), q(-1));
        assert_eq!(v.coeff(&state("01")), LaurentRational::one().neg_ref());
    }

    #[test]
    fn loop_value_and_zigzag() {
        let f = g();
        let two = f.qint(2);
        for n in 2..=5 {
            for i in 1..n {
                let l = cup_op(&f, i, n).unwrap().compose(&cap_op(&f, i, n).unwrap());
                assert_eq!(l, GradedOperator::identity(n - 2).scale(&two));
            }
        }
        let zig = cup_op(&f, 1, 3).unwrap().compose(&cap_op(&f, 2, 3).unwrap());
        assert_eq!(zig, GradedOperator::identity(1).neg());
        let zag = cup_op(&f, 2, 3).unwrap().compose(&cap_op(&f, 1, 3).unwrap());
        assert_eq!(zag, GradedOperator::identity(1).neg());
        assert!(cup_op(&f, 0, 3).is_err());
        assert!(cap_op(&f, 3, 3).is_err());
    }

    #[test]
    fn temperley_lieb_relations() {
        let f = g();
        let two = f.qint(2);
        for n in 2..=7 {
            let e: Vec<_> = (1..n).map(|i| tl_e(&f, i, n).unwrap()).collect();
            for i in 0..n - 1 {
                assert_eq!(e[i].compose(&e[i]), e[i].scale(&two));
                if i + 1 < n - 1 {
                    assert_eq!(GradedOperator::compose_all([&e[i], &e[i + 1], &e[i]]), e[i]);
                    assert_eq!(GradedOperator::compose_all([&e[i + 1], &e[i], &e[i + 1]]), e[i + 1]);
                }
                for j in i + 2..n - 1 {
                    assert_eq!(e[i].compose(&e[j]), e[j].compose(&e[i]));
                }
            }
        }
    }

    #[test]
    fn tl_relations_at_roots() {
        for p in [2u32, 3] {
            let f = RootField::new(p);
            let two = f.qint(2);
            let e1 = tl_e(&f, 1, 3).unwrap();
            let e2 = tl_e(&f, 2, 3).unwrap();
            assert_eq!(e1.compose(&e1), e1.scale(&two));
            assert_eq!(GradedOperator::compose_all([&e1, &e2, &e1]), e1);
        }
    }

    #[test]
    fn jw_two() {
        let j = jw(2);
        let v = j.apply_state(state("01"));
        let inv2 = g().qint(2).inv().unwrap();
        assert_eq!(v.coeff(&state("10")), inv2);
        assert_eq!(v.coeff(&state("01")), inv2.mul_ref(&q(-1)));
    }

    #[test]
    fn jw_closed_matches_inductive() {
        for n in 0..=6 {
            assert_eq!(jw(n), jw_closed(n), "n={n}");
        }
    }

    #[test]
    fn jw_annihilated_by_cups_and_idempotent() {
        let f = g();
        for n in 2..=6 {
            let j = jw_closed(n);
            assert_eq!(j.compose(&j), j);
            for i in 1..n {
                let e = tl_e(&f, i, n).unwrap();
                assert!(j.compose(&e).is_zero());
                assert!(e.compose(&j).is_zero());
            }
        }
    }

    #[test]
    fn jw_mirror_symmetric() {
        let f = g();
        for n in 0..=6 {
            let j = jw_closed(n);
            assert_eq!(mirror(&f, &j), j, "n={n}");
        }
    }

    #[test]
    fn jw_at_roots() {
        for p in 2..=4u32 {
            for n in 0..p as usize {
                assert!(jw_at_root(n, p).is_ok(), "n={n} p={p}");
            }
            assert!(jw_at_root(p as usize, p).is_err());
            let j = jw_at_root(2 * p as usize - 1, p).unwrap();
            assert_eq!(j.compose(&j), j);
            // the inductive formula divides by [p] and cannot get there
            assert!(jw_inductive(&RootField::new(p), 2 * p as usize - 1).is_err());
        }
    }

    #[test]
    fn rotation_of_small_diagrams() {
        let f = g();
        let id1 = GradedOperator::identity(1);
        assert_eq!(rotate(&f, &id1, Direction::Clockwise).unwrap(), id1);
        let id2 = GradedOperator::<LaurentRational>::identity(2);
        let e1 = tl_e(&f, 1, 2).unwrap();
        for dir in [Direction::Clockwise, Direction::Counterclockwise] {
            // one click exchanges the two planar diagrams on four points
            assert_eq!(rotate(&f, &id2, dir).unwrap(), e1);
            assert_eq!(rotate(&f, &e1, dir).unwrap(), id2);
            assert_eq!(rotate_by(&f, &id2, 2, dir).unwrap(), id2);
        }
        let cw = rotate(&f, &jw(3), Direction::Clockwise).unwrap();
        assert_eq!(rotate(&f, &cw, Direction::Counterclockwise).unwrap(), jw(3));
        assert!(rotate(&f, &cup_op(&f, 1, 2).unwrap(), Direction::Clockwise).is_err());
    }

    #[test]
    fn full_rotation_is_identity() {
        let f = g();
        for n in 1..=4 {
            let t = (1..n).fold(GradedOperator::identity(n), |acc, i| tl_e(&f, i, n).unwrap().compose(&acc));
            assert_eq!(rotate_by(&f, &t, 2 * n, Direction::Clockwise).unwrap(), t, "n={n}");
        }
        let j = jw(3);
        assert_eq!(rotate_by(&f, &j, 6, Direction::Counterclockwise).unwrap(), j);
    }

    #[test]
    fn partial_traces() {
        let f = g();
        let id1 = GradedOperator::identity(1);
        assert_eq!(partial_trace_right(&f, &id1).unwrap(), GradedOperator::identity(0).scale(&f.qint(2)));
        let e1 = tl_e(&f, 1, 2).unwrap();
        assert_eq!(partial_trace_right(&f, &e1).unwrap(), id1);
        assert_eq!(partial_trace_left(&f, &e1).unwrap(), id1);
        // trace of f_n closes to [n+1]/[n] f_{n-1}
        for n in 2..=5 {
            let c = f.qint(n as i64 + 1).div_ref(&f.qint(n as i64)).unwrap();
            assert_eq!(partial_trace_right(&f, &jw(n)).unwrap(), jw(n - 1).scale(&c));
        }
    }

    #[test]
    fn reflect_swaps_cup_and_cap() {
        let f = g();
        for n in 2..=4 {
            for i in 1..n {
                assert_eq!(reflect(&f, &cup_op(&f, i, n).unwrap()), cap_op(&f, i, n).unwrap());
                assert_eq!(reflect(&f, &cap_op(&f, i, n).unwrap()), cup_op(&f, i, n).unwrap());
            }
        }
        let a = tl_e(&f, 1, 3).unwrap();
        let b = cap_op(&f, 2, 3).unwrap();
        assert_eq!(reflect(&f, &a.compose(&b)), reflect(&f, &b).compose(&reflect(&f, &a)));
        assert_eq!(reflect(&f, &jw(4)), jw(4));
    }

    #[test]
    fn diagrams_are_intertwiners() {
        let r = RootField::new(3);
        for n in 2..=6 {
            for i in 1..n {
                assert!(is_intertwiner(&r, &cup_op(&r, i, n).unwrap()));
                assert!(is_intertwiner(&r, &cap_op(&r, i, n).unwrap()));
            }
        }
        assert!(is_intertwiner(&g(), &jw(4)));
        assert!(!is_intertwiner(&r, &crate::tensor::act_e(&r, 2)));
    }

    proptest! {
        #[test]
        fn random_tl_words_commute_with_action(word in proptest::collection::vec(1usize..5, 0..6)) {
            let r = RootField::new(2);
            let n = 5;
            let t = word.iter().fold(GradedOperator::identity(n), |acc, i| tl_e(&r, *i, n).unwrap().compose(&acc));
            prop_assert!(is_intertwiner(&r, &t));
            let v = GradedVector::basis(state("10110"));
            let lhs = t.apply(&crate::tensor::act_f(&r, n).apply(&v));
            let rhs = crate::tensor::act_f(&r, n).apply(&t.apply(&v));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
