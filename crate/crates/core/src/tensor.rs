//! The action of `E`, `F`, `K` on `X^{(x)z}` through the iterated coproduct,
//! and closed forms for powers of `E` and `F`.

use itertools::Itertools;

use crate::field::Field;
use crate::operator::{BasisState, GradedOperator, GradedVector};
use crate::scalar::QField;

/// `K` acts on the weight-`n` block by `q^{z - 2n}`.
pub fn act_k<F: QField>(field: &F, z: usize) -> GradedOperator<F::Elem> {
    GradedOperator::collect_columns(z, z, |x, push| {
        push(x, field.q_pow(z as i64 - 2 * x.weight() as i64));
    })
}

/// `K^{-1}`.
pub fn act_k_inv<F: QField>(field: &F, z: usize) -> GradedOperator<F::Elem> {
    GradedOperator::collect_columns(z, z, |x, push| {
        push(x, field.q_pow(2 * x.weight() as i64 - z as i64));
    })
}

fn zeros_ones(x: &BasisState, range: impl Iterator<Item = usize>) -> (i64, i64) {
    range.fold((0, 0), |(z, o), i| if x.bit(i) { (z, o + 1) } else { (z + 1, o) })
}

/// `sum_i 1^{(x)i} (x) E (x) K^{(x)(z-1-i)}`: lowering `nu_1 -> nu_0` at
/// position `j` picks up `q^{#0 - #1}` from the strands to its right.
pub fn act_e<F: QField>(field: &F, z: usize) -> GradedOperator<F::Elem> {
    GradedOperator::collect_columns(z, z, |x, push| {
        for j in 1..=z {
            if x.bit(j) {
                let (zeros, ones) = zeros_ones(&x, j + 1..=z);
                push(x.with_bit(j, false), field.q_pow(zeros - ones));
            }
        }
    })
}

/// `sum_i (K^{-1})^{(x)i} (x) F (x) 1^{(x)(z-1-i)}`: raising at position `j`
/// picks up `q^{#1 - #0}` from the strands to its left.
pub fn act_f<F: QField>(field: &F, z: usize) -> GradedOperator<F::Elem> {
    GradedOperator::collect_columns(z, z, |x, push| {
        for j in 1..=z {
            if !x.bit(j) {
                let (zeros, ones) = zeros_ones(&x, 1..j);
                push(x.with_bit(j, true), field.q_pow(ones - zeros));
            }
        }
    })
}

/// Closed form of `E^k` on `X^{(x)z}`:
/// `E^k rho = [k]! sum_S q^{sum_{s in S} (#0 after s - #1 after s outside S)} rho \ S`
/// over `k`-subsets `S` of the occupied positions.
pub fn act_e_pow<F: QField>(field: &F, k: usize, z: usize) -> GradedOperator<F::Elem> {
    let fact = field.qfact(k as u32);
    GradedOperator::collect_columns(z, z, |x, push| {
        let ones = x.positions();
        for subset in ones.iter().copied().combinations(k) {
            let mut e = 0i64;
            let mut y = x;
            for &s in &subset {
                let (zeros, after_ones) = zeros_ones(&x, s + 1..=z);
                let inside = subset.iter().filter(|&&t| t > s).count() as i64;
                e += zeros - (after_ones - inside);
                y = y.with_bit(s, false);
            }
            push(y, field.q_pow(e).mul_ref(&fact));
        }
    })
}

/// Closed form of `F^k`, the mirror image of [`act_e_pow`]:
/// exponent `sum_{s in S} (#1 before s - #0 before s outside S)`.
pub fn act_f_pow<F: QField>(field: &F, k: usize, z: usize) -> GradedOperator<F::Elem> {
    let fact = field.qfact(k as u32);
    GradedOperator::collect_columns(z, z, |x, push| {
        let empty: Vec<usize> = (1..=z).filter(|&i| !x.bit(i)).collect();
        for subset in empty.iter().copied().combinations(k) {
            let mut e = 0i64;
            let mut y = x;
            for &s in &subset {
                let (before_zeros, ones) = zeros_ones(&x, 1..s);
                let inside = subset.iter().filter(|&&t| t < s).count() as i64;
                e += ones - (before_zeros - inside);
                y = y.with_bit(s, true);
            }
            push(y, field.q_pow(e).mul_ref(&fact));
        }
    })
}

/// `x_{0,z} = nu_0^{(x)z}`.
pub fn vacuum(z: usize) -> BasisState {
    BasisState::new(z, 0)
}

/// `x_{z,z} = nu_1^{(x)z}`.
pub fn full(z: usize) -> BasisState {
    BasisState::new(z, if z == 0 { 0 } else { u64::MAX >> (64 - z) })
}

/// `F^k x_{0,z} = sum_I q^{(k^2+k)/2 - sum I} [k]! rho_I`, zero for
/// `k < 0` or `k > z`.
pub fn f_pow_vacuum<F: QField>(field: &F, k: i64, z: usize) -> GradedVector<F::Elem> {
    let mut v = GradedVector::zero(z);
    if k < 0 || k as usize > z {
        return v;
    }
    let fact = field.qfact(k as u32);
    for s in BasisState::block(z, k as usize) {
        let e = (k * k + k) / 2 - s.position_sum() as i64;
        v.add_term(s, field.q_pow(e).mul_ref(&fact));
    }
    v
}

/// `E^k x_{z,z} = sum_I q^{(z-k)(z-k+1)/2 - sum I} [k]! rho_I` over
/// `(z-k)`-subsets `I`, zero for `k < 0` or `k > z`.
pub fn e_pow_full<F: QField>(field: &F, k: i64, z: usize) -> GradedVector<F::Elem> {
    let mut v = GradedVector::zero(z);
    if k < 0 || k as usize > z {
        return v;
    }
    let fact = field.qfact(k as u32);
    let m = z as i64 - k;
    for s in BasisState::block(z, m as usize) {
        let e = m * (m + 1) / 2 - s.position_sum() as i64;
        v.add_term(s, field.q_pow(e).mul_ref(&fact));
    }
    v
}

/// The exponent `nz - (n^2 - n)/2 - sum I` shared by several closed forms
/// for `rho_I` of weight `n` in `X^{(x)z}`.
pub fn rho_exponent(x: &BasisState) -> i64 {
    let n = x.weight() as i64;
    let z = x.z() as i64;
    n * z - (n * n - n) / 2 - x.position_sum() as i64
}

fn power<S: Field>(op: &GradedOperator<S>, k: usize) -> GradedOperator<S> {
    (0..k).fold(GradedOperator::identity(op.dom()), |acc, _| op.compose(&acc))
}

/// `E^k` and `F^k` as iterated compositions of the single-step actions.
pub fn act_e_iter<F: QField>(field: &F, k: usize, z: usize) -> GradedOperator<F::Elem> {
    power(&act_e(field, z), k)
}

pub fn act_f_iter<F: QField>(field: &F, k: usize, z: usize) -> GradedOperator<F::Elem> {
    power(&act_f(field, z), k)
}

fn nu(bit: bool) -> BasisState {
    BasisState::new(1, u64::from(bit))
}

/// Checks the four incremental expansions of `E^k x_{z+1,z+1}` and
/// `F^k x_{0,z+1}` (appending or prepending one strand), with every vector
/// computed by iterating the single-step actions.
pub fn verify_incremental<F: QField>(field: &F, z: usize, k: usize) -> bool {
    let ek = |n: usize, k: i64| -> GradedVector<F::Elem> {
        if k < 0 {
            return GradedVector::zero(n);
        }
        act_e_iter(field, k as usize, n).apply_state(full(n))
    };
    let fk = |n: usize, k: i64| -> GradedVector<F::Elem> {
        if k < 0 {
            return GradedVector::zero(n);
        }
        act_f_iter(field, k as usize, n).apply_state(vacuum(n))
    };
    let (ki, zi) = (k as i64, z as i64);
    let qk = field.qint(ki);
    let v0 = GradedVector::basis(nu(false));
    let v1 = GradedVector::basis(nu(true));

    let lhs_e = ek(z + 1, ki);
    let a13 = ek(z, ki - 1)
        .tensor(&v0)
        .scale(&qk)
        .add(&ek(z, ki).tensor(&v1).scale(&field.q_pow(-ki)));
    let a14 = v0
        .tensor(&ek(z, ki - 1))
        .scale(&field.q_pow(ki - zi - 1).mul_ref(&qk))
        .add(&v1.tensor(&ek(z, ki)));

    let lhs_f = fk(z + 1, ki);
    let a15 = fk(z, ki)
        .tensor(&v0)
        .add(&fk(z, ki - 1).tensor(&v1).scale(&field.q_pow(ki - zi - 1).mul_ref(&qk)));
    let a16 = v0
        .tensor(&fk(z, ki))
        .scale(&field.q_pow(-ki))
        .add(&v1.tensor(&fk(z, ki - 1)).scale(&qk));

    lhs_e == a13 && lhs_e == a14 && lhs_f == a15 && lhs_f == a16
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{GenericField, RootField};
    use num_traits::One;

    fn st(s: &str) -> BasisState {
        BasisState::from_bitstring(s).unwrap()
    }

    #[test]
    fn single_strand_action() {
        let f = RootField::new(3);
        let e = act_e(&f, 1);
        assert_eq!(e.apply_state(st("1")), GradedVector::basis(st("0")));
        assert!(e.apply_state(st("0")).is_zero());
    }

    #[test]
    fn two_strand_f() {
        let f = GenericField;
        let v = act_f(&f, 2).apply_state(st("00"));
        let mut expect = GradedVector::basis(st("10"));
        expect.add_term(st("01"), f.q_pow(-1));
        assert_eq!(v, expect);
    }

    #[test]
    fn e_on_full_three() {
        let f = GenericField;
        let v = act_e_pow(&f, 1, 3).apply_state(full(3));
        let mut expect = GradedVector::basis(st("110"));
        expect.add_term(st("101"), f.q_pow(-1));
        expect.add_term(st("011"), f.q_pow(-2));
        assert_eq!(v, expect);
        assert_eq!(e_pow_full(&f, 1, 3), expect);
    }

    #[test]
    fn k_eigenvalues() {
        let f = RootField::new(2);
        for z in 1..=6 {
            let k = act_k(&f, z);
            for n in 0..=z {
                let c = k.block(n, n).unwrap().get(0, 0);
                assert_eq!(c, f.q_pow(z as i64 - 2 * n as i64));
            }
            assert_eq!(k.compose(&act_k_inv(&f, z)), GradedOperator::identity(z));
        }
    }

    #[test]
    fn closed_powers_match_iteration() {
        let f = GenericField;
        for z in 1..=5 {
            for k in 0..=z {
                assert_eq!(act_e_pow(&f, k, z), act_e_iter(&f, k, z), "E^{k} on {z}");
                assert_eq!(act_f_pow(&f, k, z), act_f_iter(&f, k, z), "F^{k} on {z}");
            }
        }
    }

    #[test]
    fn nilpotency_at_root() {
        for p in [2u32, 3] {
            let f = RootField::new(p);
            for z in 1..=(2 * p as usize + 2) {
                assert!(act_e_iter(&f, p as usize, z).is_zero());
                assert!(act_f_iter(&f, p as usize, z).is_zero());
                let k = act_k(&f, z);
                let k2p = (0..2 * p).fold(GradedOperator::identity(z), |a, _| k.compose(&a));
                assert_eq!(k2p, GradedOperator::identity(z));
            }
        }
    }

    #[test]
    fn incremental_expansions() {
        let f = GenericField;
        assert!(verify_incremental(&f, 1, 1));
        for z in 0..=5 {
            for k in 0..=z + 1 {
                assert!(verify_incremental(&f, z, k), "z={z} k={k}");
            }
        }
        assert!(verify_incremental(&RootField::new(3), 4, 2));
    }

    #[test]
    fn vacuum_powers() {
        let f = GenericField;
        let v = f_pow_vacuum(&f, 1, 2);
        let mut expect = GradedVector::basis(st("10"));
        expect.add_term(st("01"), f.q_pow(-1));
        assert_eq!(v, expect);
        assert_eq!(f_pow_vacuum(&f, 0, 3), GradedVector::basis(vacuum(3)));
        assert!(f_pow_vacuum(&f, 4, 3).is_zero());
        assert_eq!(f_pow_vacuum(&f, 0, 0).coeff(&vacuum(0)), crate::LaurentRational::one());
    }
}
