//! Basis states of `X^{(x)z}` and weight-graded operators between tensor
//! powers.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::field::Field;
use crate::linalg::SparseMat;
use crate::scalar::{QField, Scalar};

/// Largest supported strand count.
pub const MAX_STRANDS: usize = 62;

fn binomials() -> &'static Vec<Vec<u64>> {
    static TABLE: OnceLock<Vec<Vec<u64>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = MAX_STRANDS + 2;
        let mut t = vec![vec![0u64; n]; n];
        for i in 0..n {
            t[i][0] = 1;
            for j in 1..=i {
                t[i][j] = t[i - 1][j - 1].saturating_add(t[i - 1][j]);
            }
        }
        t
    })
}

/// `C(n, k)`, zero when `k > n`.
pub fn binom(n: usize, k: usize) -> usize {
    if k > n {
        0
    } else {
        binomials()[n][k] as usize
    }
}

/// A basis tensor `nu_{b_1} (x) ... (x) nu_{b_z}`.
///
/// Position `i` (1-based, left to right) is stored in bit `z - i`, so for a
/// fixed weight the numeric order of `bits` is the lexicographic order of
/// the bitstring.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState {
    z: u8,
    bits: u64,
}

impl BasisState {
    pub fn new(z: usize, bits: u64) -> Self {
        assert!(z <= MAX_STRANDS, "at most {MAX_STRANDS} strands supported");
        assert!(z == 64 || bits >> z == 0, "bits outside {z} strands");
        BasisState { z: z as u8, bits }
    }

    /// `rho_{i_1,...,i_n,z}`: ones at the given 1-based, strictly increasing
    /// positions.
    pub fn from_positions(positions: &[usize], z: usize) -> Result<Self> {
        ensure!(z <= MAX_STRANDS, OutOfRange, "at most {MAX_STRANDS} strands supported");
        let mut bits = 0u64;
        let mut prev = 0;
        for &i in positions {
            ensure!(i > prev && i <= z, OutOfRange, "positions {positions:?} not increasing within 1..={z}");
            bits |= 1 << (z - i);
            prev = i;
        }
        Ok(BasisState { z: z as u8, bits })
    }

    /// Parses a bitstring such as `"10100"`.
    pub fn from_bitstring(s: &str) -> Result<Self> {
        let z = s.len();
        ensure!(z <= MAX_STRANDS, OutOfRange, "at most {MAX_STRANDS} strands supported");
        let mut bits = 0u64;
        for ch in s.chars() {
            bits <<= 1;
            match ch {
                '0' => {}
                '1' => bits |= 1,
                _ => return Err(Error::Parse(format!("bad bitstring {s:?}"))),
            }
        }
        Ok(BasisState { z: z as u8, bits })
    }

    pub fn positions(&self) -> Vec<usize> {
        (1..=self.z()).filter(|&i| self.bit(i)).collect()
    }

    pub fn z(&self) -> usize {
        self.z as usize
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn weight(&self) -> usize {
        self.bits.count_ones() as usize
    }

    /// Whether position `i` (1-based) holds `nu_1`.
    pub fn bit(&self, i: usize) -> bool {
        self.bits >> (self.z() - i) & 1 == 1
    }

    pub fn position_sum(&self) -> usize {
        self.positions().iter().sum()
    }

    /// Index within the weight block (lexicographic order).
    pub fn rank(&self) -> usize {
        rank_bits(self.bits)
    }

    pub fn unrank(z: usize, weight: usize, rank: usize) -> Self {
        BasisState { z: z as u8, bits: unrank_bits(z, weight, rank) }
    }

    pub fn concat(&self, other: &BasisState) -> BasisState {
        BasisState::new(self.z() + other.z(), (self.bits << other.z) | other.bits)
    }

    /// Splits into the first `k` strands and the rest.
    pub fn split(&self, k: usize) -> (BasisState, BasisState) {
        let rest = self.z() - k;
        let lo = if rest == 0 { 0 } else { self.bits & ((1u64 << rest) - 1) };
        (BasisState::new(k, self.bits >> rest), BasisState::new(rest, lo))
    }

    pub fn with_bit(&self, i: usize, value: bool) -> BasisState {
        let mask = 1u64 << (self.z() - i);
        let bits = if value { self.bits | mask } else { self.bits & !mask };
        BasisState { z: self.z, bits }
    }

    /// All states of the given weight in block order.
    pub fn block(z: usize, weight: usize) -> impl Iterator<Item = BasisState> {
        (0..binom(z, weight)).map(move |r| BasisState::unrank(z, weight, r))
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "nu_")?;
        if self.z == 0 {
            return write!(f, "()");
        }
        for i in 1..=self.z() {
            write!(f, "{}", u8::from(self.bit(i)))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn rank_bits(mut bits: u64) -> usize {
    let mut r = 0;
    let mut j = 1;
    while bits != 0 {
        let b = bits.trailing_zeros() as usize;
        r += binom(b, j);
        j += 1;
        bits &= bits - 1;
    }
    r
}

fn unrank_bits(z: usize, weight: usize, mut rank: usize) -> u64 {
    let mut bits = 0u64;
    let mut top = z;
    for j in (1..=weight).rev() {
        // largest b < top with C(b, j) <= rank
        let mut b = top - 1;
        while binom(b, j) > rank {
            b -= 1;
        }
        rank -= binom(b, j);
        bits |= 1 << b;
        top = b;
    }
    bits
}

/// Offset of the weight-`n` block in the weight-major flat ordering.
pub fn block_offset(z: usize, n: usize) -> usize {
    (0..n).map(|j| binom(z, j)).sum()
}

/// Flat index of a state: weight-major, lexicographic within a weight.
pub fn flat_index(s: &BasisState) -> usize {
    block_offset(s.z(), s.weight()) + s.rank()
}

pub fn from_flat_index(z: usize, mut idx: usize) -> BasisState {
    for n in 0..=z {
        let b = binom(z, n);
        if idx < b {
            return BasisState::unrank(z, n, idx);
        }
        idx -= b;
    }
    panic!("flat index out of range for {z} strands");
}

/// A vector in `X^{(x)z}`, stored per weight block.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedVector<S> {
    z: usize,
    blocks: BTreeMap<usize, BTreeMap<usize, S>>,
}

impl<S: Field> GradedVector<S> {
    pub fn zero(z: usize) -> Self {
        GradedVector { z, blocks: BTreeMap::new() }
    }

    pub fn basis(s: BasisState) -> Self {
        let mut v = Self::zero(s.z());
        v.add_term(s, S::one());
        v
    }

    pub fn z(&self) -> usize {
        self.z
    }

    pub fn add_term(&mut self, s: BasisState, c: S) {
        assert_eq!(s.z(), self.z);
        let block = self.blocks.entry(s.weight()).or_default();
        let slot = block.entry(s.rank()).or_insert_with(S::zero);
        slot.add_assign_ref(&c);
        if slot.is_zero() {
            block.remove(&s.rank());
            if block.is_empty() {
                self.blocks.remove(&s.weight());
            }
        }
    }

    pub fn coeff(&self, s: &BasisState) -> S {
        self.blocks
            .get(&s.weight())
            .and_then(|b| b.get(&s.rank()))
            .cloned()
            .unwrap_or_else(S::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (BasisState, &S)> + '_ {
        let z = self.z;
        self.blocks
            .iter()
            .flat_map(move |(n, b)| b.iter().map(move |(r, c)| (BasisState::unrank(z, *n, *r), c)))
    }

    pub fn weights(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.keys().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.z);
        for (s, v) in self.terms() {
            out.add_term(s, v.mul_ref(c));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (s, v) in other.terms() {
            out.add_term(s, v.clone());
        }
        out
    }

    /// `self (x) other`.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.z + other.z);
        for (a, x) in self.terms() {
            for (b, y) in other.terms() {
                out.add_term(a.concat(&b), x.mul_ref(y));
            }
        }
        out
    }
}

/// Block key to `(row, col, value)` triplets.
type Triplets<S> = BTreeMap<(usize, usize), Vec<(usize, usize, S)>>;

/// A linear map `X^{(x)m} -> X^{(x)n}` stored as sparse blocks keyed by
/// `(domain weight, codomain weight)`. Absent blocks are zero; stored blocks
/// are nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedOperator<S> {
    dom: usize,
    cod: usize,
    blocks: BTreeMap<(usize, usize), SparseMat<S>>,
}

impl<S: Field> GradedOperator<S> {
    pub fn zero(dom: usize, cod: usize) -> Self {
        assert!(dom <= MAX_STRANDS && cod <= MAX_STRANDS, "at most {MAX_STRANDS} strands supported");
        GradedOperator { dom, cod, blocks: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut op = Self::zero(n, n);
        for k in 0..=n {
            op.blocks.insert((k, k), SparseMat::identity(binom(n, k)));
        }
        op
    }

    /// Builds from `(domain state, codomain state, coefficient)` entries;
    /// duplicates are summed.
    pub fn from_entries(
        dom: usize,
        cod: usize,
        entries: impl IntoIterator<Item = (BasisState, BasisState, S)>,
    ) -> Self {
        let mut trip: Triplets<S> = BTreeMap::new();
        for (x, y, c) in entries {
            assert!(x.z() == dom && y.z() == cod, "entry strand counts do not match {dom} -> {cod}");
            trip.entry((x.weight(), y.weight())).or_default().push((y.rank(), x.rank(), c));
        }
        let mut op = Self::zero(dom, cod);
        for ((k, k2), t) in trip {
            op.set_block(k, k2, SparseMat::from_triplets(binom(cod, k2), binom(dom, k), t));
        }
        op
    }

    /// The operator sending each domain state to the given vector (states
    /// not listed go to zero).
    pub fn from_columns(
        dom: usize,
        cod: usize,
        cols: impl IntoIterator<Item = (BasisState, GradedVector<S>)>,
    ) -> Self {
        Self::from_entries(
            dom,
            cod,
            cols.into_iter().flat_map(|(x, v)| {
                v.terms().map(|(y, c)| (x, y, c.clone())).collect::<Vec<_>>()
            }),
        )
    }

    pub fn dom(&self) -> usize {
        self.dom
    }

    pub fn cod(&self) -> usize {
        self.cod
    }

    pub fn blocks(&self) -> &BTreeMap<(usize, usize), SparseMat<S>> {
        &self.blocks
    }

    pub fn block(&self, k: usize, k2: usize) -> Option<&SparseMat<S>> {
        self.blocks.get(&(k, k2))
    }

    /// Replaces a block; a zero block is dropped.
    pub fn set_block(&mut self, k: usize, k2: usize, m: SparseMat<S>) {
        assert!(k <= self.dom && k2 <= self.cod);
        assert_eq!((m.rows(), m.cols()), (binom(self.cod, k2), binom(self.dom, k)), "block shape");
        if m.is_zero() {
            self.blocks.remove(&(k, k2));
        } else {
            self.blocks.insert((k, k2), m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.blocks.values().map(SparseMat::nnz).sum()
    }

    /// Weight pairs with a nonzero block.
    pub fn support(&self) -> Vec<(usize, usize)> {
        self.blocks.keys().copied().collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (BasisState, BasisState, &S)> + '_ {
        self.blocks.iter().flat_map(move |((k, k2), m)| {
            m.entries().map(move |(r, c, v)| {
                (BasisState::unrank(self.dom, *k, c), BasisState::unrank(self.cod, *k2, r), v)
            })
        })
    }

    pub fn entry(&self, x: &BasisState, y: &BasisState) -> S {
        match self.blocks.get(&(x.weight(), y.weight())) {
            Some(m) => m.get(y.rank(), x.rank()),
            None => S::zero(),
        }
    }

    pub fn apply(&self, v: &GradedVector<S>) -> GradedVector<S> {
        assert_eq!(v.z(), self.dom, "vector has wrong strand count");
        let mut out = GradedVector::zero(self.cod);
        for (x, c) in v.terms() {
            let k = x.weight();
            for ((bk, k2), m) in self.blocks.range((k, 0)..=(k, self.cod)) {
                debug_assert_eq!(*bk, k);
                for (r, a) in m.col(x.rank()) {
                    out.add_term(BasisState::unrank(self.cod, *k2, *r), a.mul_ref(c));
                }
            }
        }
        out
    }

    pub fn apply_state(&self, x: BasisState) -> GradedVector<S> {
        self.apply(&GradedVector::basis(x))
    }

    /// `self . rhs`: apply `rhs` first.
    pub fn compose(&self, rhs: &GradedOperator<S>) -> GradedOperator<S> {
        assert_eq!(rhs.cod, self.dom, "composition arity mismatch: {} -> {} then {} -> {}", rhs.dom, rhs.cod, self.dom, self.cod);
        let mut acc: BTreeMap<(usize, usize), SparseMat<S>> = BTreeMap::new();
        for ((k, k1), b) in &rhs.blocks {
            for ((_, k2), a) in self.blocks.range((*k1, 0)..=(*k1, self.cod)) {
                let prod = a.mul(b);
                if prod.is_zero() {
                    continue;
                }
                match acc.get_mut(&(*k, *k2)) {
                    Some(m) => *m = m.add(&prod),
                    None => {
                        acc.insert((*k, *k2), prod);
                    }
                }
            }
        }
        acc.retain(|_, m| !m.is_zero());
        GradedOperator { dom: rhs.dom, cod: self.cod, blocks: acc }
    }

    /// Composition of a chain listed in application order reversed, i.e.
    /// `compose_all([a, b, c]) = a . b . c`.
    pub fn compose_all<'a>(ops: impl IntoIterator<Item = &'a GradedOperator<S>>) -> GradedOperator<S>
    where
        S: 'a,
    {
        let ops: Vec<_> = ops.into_iter().collect();
        let (last, rest) = ops.split_last().expect("empty composition");
        rest.iter().rev().fold((*last).clone(), |acc, op| op.compose(&acc))
    }

    fn combine(&self, other: &Self, neg: bool) -> Self {
        assert_eq!((self.dom, self.cod), (other.dom, other.cod), "sum of operators with different arity");
        let mut out = self.clone();
        for (key, m) in &other.blocks {
            let merged = match out.blocks.get(key) {
                Some(a) if neg => a.sub(m),
                Some(a) => a.add(m),
                None if neg => m.scale(&S::one().neg_ref()),
                None => m.clone(),
            };
            if merged.is_zero() {
                out.blocks.remove(key);
            } else {
                out.blocks.insert(*key, merged);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero(self.dom, self.cod);
        }
        GradedOperator {
            dom: self.dom,
            cod: self.cod,
            blocks: self.blocks.iter().map(|(k, m)| (*k, m.scale(c))).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&S::one().neg_ref())
    }

    /// `self (x) other`, with `self` on the left strands.
    pub fn tensor(&self, other: &GradedOperator<S>) -> GradedOperator<S> {
        let (m1, n1, m2, n2) = (self.dom, self.cod, other.dom, other.cod);
        let mut acc: Triplets<S> = BTreeMap::new();
        for ((ka, ka2), a) in &self.blocks {
            for ((kb, kb2), b) in &other.blocks {
                let key = (ka + kb, ka2 + kb2);
                let out = acc.entry(key).or_default();
                for ca in 0..a.cols() {
                    let xa = BasisState::unrank(m1, *ka, ca);
                    for cb in 0..b.cols() {
                        let col = xa.concat(&BasisState::unrank(m2, *kb, cb)).rank();
                        for (ra, va) in a.col(ca) {
                            let ya = BasisState::unrank(n1, *ka2, *ra);
                            for (rb, vb) in b.col(cb) {
                                let row = ya.concat(&BasisState::unrank(n2, *kb2, *rb)).rank();
                                out.push((row, col, va.mul_ref(vb)));
                            }
                        }
                    }
                }
            }
        }
        let mut op = Self::zero(m1 + m2, n1 + n2);
        for ((k, k2), t) in acc {
            op.set_block(k, k2, SparseMat::from_triplets(binom(n1 + n2, k2), binom(m1 + m2, k), t));
        }
        op
    }

    /// `1^{(x)left} (x) self (x) 1^{(x)right}`.
    pub fn pad(&self, left: usize, right: usize) -> GradedOperator<S> {
        let mut out = self.clone();
        if left > 0 {
            out = GradedOperator::identity(left).tensor(&out);
        }
        if right > 0 {
            out = out.tensor(&GradedOperator::identity(right));
        }
        out
    }

    /// Transpose with respect to the standard basis (`n -> m`).
    pub fn transpose(&self) -> GradedOperator<S> {
        GradedOperator {
            dom: self.cod,
            cod: self.dom,
            blocks: self.blocks.iter().map(|((k, k2), m)| ((*k2, *k), m.transpose())).collect(),
        }
    }

    /// Multiplies each entry `(x -> y)` by `f(x, y)`.
    pub fn map_entries(&self, f: impl Fn(&BasisState, &BasisState, &S) -> S) -> GradedOperator<S> {
        Self::from_entries(self.dom, self.cod, self.entries().map(|(x, y, v)| {
            let w = f(&x, &y, v);
            (x, y, w)
        }))
    }

    pub fn map_scalars<T: Field>(&self, mut f: impl FnMut(&S) -> T) -> GradedOperator<T> {
        let mut out = GradedOperator::zero(self.dom, self.cod);
        for ((k, k2), m) in &self.blocks {
            let t = m.entries().map(|(r, c, v)| (r, c, f(v))).collect::<Vec<_>>();
            out.set_block(*k, *k2, SparseMat::from_triplets(m.rows(), m.cols(), t));
        }
        out
    }

    pub fn try_map_scalars<T: Field, E>(
        &self,
        mut f: impl FnMut(&S) -> Result<T, E>,
    ) -> Result<GradedOperator<T>, E> {
        let mut out = GradedOperator::zero(self.dom, self.cod);
        for ((k, k2), m) in &self.blocks {
            let mut t = Vec::with_capacity(m.nnz());
            for (r, c, v) in m.entries() {
                t.push((r, c, f(v)?));
            }
            out.set_block(*k, *k2, SparseMat::from_triplets(m.rows(), m.cols(), t));
        }
        Ok(out)
    }

    /// The whole map as one matrix in the flat weight-major ordering.
    pub fn to_flat(&self) -> SparseMat<S> {
        let rows = 1usize << self.cod;
        let cols = 1usize << self.dom;
        let t = self.blocks.iter().flat_map(|((k, k2), m)| {
            let ro = block_offset(self.cod, *k2);
            let co = block_offset(self.dom, *k);
            m.entries().map(move |(r, c, v)| (ro + r, co + c, v.clone())).collect::<Vec<_>>()
        });
        SparseMat::from_triplets(rows, cols, t)
    }

    pub fn from_flat(dom: usize, cod: usize, m: &SparseMat<S>) -> GradedOperator<S> {
        assert_eq!((m.rows(), m.cols()), (1 << cod, 1 << dom));
        Self::from_entries(
            dom,
            cod,
            m.entries().map(|(r, c, v)| (from_flat_index(dom, c), from_flat_index(cod, r), v.clone())),
        )
    }

    pub fn rank(&self) -> usize {
        // blocks sharing a codomain weight interact, so rank is computed on
        // the flat matrix restricted to connected weight classes
        let mut classes: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        let mut parent: BTreeMap<(bool, usize), (bool, usize)> = BTreeMap::new();
        fn find(p: &mut BTreeMap<(bool, usize), (bool, usize)>, x: (bool, usize)) -> (bool, usize) {
            let y = *p.entry(x).or_insert(x);
            if y == x {
                x
            } else {
                let r = find(p, y);
                p.insert(x, r);
                r
            }
        }
        for (k, k2) in self.blocks.keys() {
            let a = find(&mut parent, (false, *k));
            let b = find(&mut parent, (true, *k2));
            if a != b {
                parent.insert(a, b);
            }
        }
        let mut groups: BTreeMap<(bool, usize), (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        let keys: Vec<_> = parent.keys().copied().collect();
        for key in keys {
            let root = find(&mut parent, key);
            let g = groups.entry(root).or_default();
            if key.0 {
                g.1.push(key.1);
            } else {
                g.0.push(key.1);
            }
        }
        classes.extend(groups.into_values());
        let flat = self.to_flat();
        classes
            .iter()
            .map(|(ks, k2s)| {
                let cols: Vec<usize> = ks
                    .iter()
                    .flat_map(|k| {
                        let o = block_offset(self.dom, *k);
                        o..o + binom(self.dom, *k)
                    })
                    .collect();
                let rows: Vec<usize> = k2s
                    .iter()
                    .flat_map(|k| {
                        let o = block_offset(self.cod, *k);
                        o..o + binom(self.cod, *k)
                    })
                    .collect();
                flat.submatrix(&rows, &cols).rank()
            })
            .sum()
    }

    /// Whether every stored block `(k, k2)` satisfies the predicate.
    pub fn support_within(&self, allowed: impl Fn(usize, usize) -> bool) -> bool {
        self.blocks.keys().all(|(k, k2)| allowed(*k, *k2))
    }

    /// First entry where `self` and `other` differ, for failure reports.
    pub fn first_difference(&self, other: &Self) -> Option<(BasisState, BasisState, S, S)> {
        if (self.dom, self.cod) != (other.dom, other.cod) {
            return None;
        }
        let diff = self.sub(other);
        let first = diff.entries().next().map(|(x, y, _)| (x, y));
        first.map(|(x, y)| (x, y, self.entry(&x, &y), other.entry(&x, &y)))
    }
}

impl<S: Field> GradedOperator<S> {
    /// Accumulates `coeff * state` contributions for one domain state into
    /// the given map; helper for builders.
    pub(crate) fn collect_columns(
        dom: usize,
        cod: usize,
        mut f: impl FnMut(BasisState, &mut dyn FnMut(BasisState, S)),
    ) -> Self {
        let mut blocks: Triplets<S> = BTreeMap::new();
        for k in 0..=dom {
            for x in BasisState::block(dom, k) {
                let mut push = |y: BasisState, c: S| {
                    if !c.is_zero() {
                        blocks.entry((k, y.weight())).or_default().push((y.rank(), x.rank(), c));
                    }
                };
                f(x, &mut push);
            }
        }
        let mut op = Self::zero(dom, cod);
        for ((k, k2), t) in blocks {
            op.set_block(k, k2, SparseMat::from_triplets(binom(cod, k2), binom(dom, k), t));
        }
        op
    }
}

/// Wire form of an operator.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OperatorJson {
    pub m: usize,
    pub n: usize,
    pub blocks: Vec<BlockJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BlockJson {
    pub k: usize,
    pub k2: usize,
    pub entries: Vec<(usize, usize, Scalar)>,
}

impl<S: Field> GradedOperator<S> {
    pub fn to_json<F: QField<Elem = S>>(&self, field: &F) -> OperatorJson {
        OperatorJson {
            m: self.dom,
            n: self.cod,
            blocks: self
                .blocks
                .iter()
                .map(|((k, k2), m)| BlockJson {
                    k: *k,
                    k2: *k2,
                    entries: m.entries().map(|(r, c, v)| (r, c, field.to_scalar(v))).collect(),
                })
                .collect(),
        }
    }

    pub fn from_json<F: QField<Elem = S>>(field: &F, j: &OperatorJson) -> Result<Self> {
        let mut op = Self::zero(j.m, j.n);
        for b in &j.blocks {
            ensure!(b.k <= j.m && b.k2 <= j.n, OutOfRange, "block ({}, {}) out of range", b.k, b.k2);
            let (rows, cols) = (binom(j.n, b.k2), binom(j.m, b.k));
            let mut t = Vec::with_capacity(b.entries.len());
            for (r, c, s) in &b.entries {
                ensure!(*r < rows && *c < cols, OutOfRange, "entry ({r}, {c}) outside block");
                t.push((*r, *c, field.from_scalar(s)?));
            }
            op.set_block(b.k, b.k2, SparseMat::from_triplets(rows, cols, t));
        }
        Ok(op)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rat, Rational};
    use proptest::prelude::*;

    #[test]
    fn positions_round_trip() {
        let s = BasisState::from_positions(&[1, 3, 5], 5).unwrap();
        assert_eq!(s.to_string(), "nu_10101");
        assert_eq!(BasisState::from_bitstring("10100").unwrap().positions(), vec![1, 3]);
        assert_eq!(s.positions(), vec![1, 3, 5]);
        assert_eq!(BasisState::from_positions(&[], 4).unwrap().bits(), 0);
        assert_eq!(BasisState::from_positions(&[1, 2, 3], 3).unwrap().weight(), 3);
        assert!(BasisState::from_positions(&[2, 1], 3).is_err());
        assert!(BasisState::from_positions(&[4], 3).is_err());
    }

    #[test]
    fn block_order_is_lexicographic() {
        let names: Vec<String> = BasisState::block(4, 2).map(|s| s.to_string()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
        assert_eq!(names.len(), 6);
    }

    proptest! {
        #[test]
        fn rank_unrank_inverse(z in 1usize..20, seed in any::<u64>()) {
            let bits = seed & ((1u64 << z) - 1);
            let s = BasisState::new(z, bits);
            prop_assert_eq!(BasisState::unrank(z, s.weight(), s.rank()), s);
            prop_assert_eq!(from_flat_index(z, flat_index(&s)), s);
        }
    }

    fn sample(dom: usize, cod: usize, seed: u64) -> GradedOperator<Rational> {
        let mut x = seed;
        let mut entries = Vec::new();
        for a in 0..1u64 << dom {
            for b in 0..1u64 << cod {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                if x >> 61 == 0 {
                    entries.push((BasisState::new(dom, a), BasisState::new(cod, b), rat((x >> 40) as i64 % 7 - 3)));
                }
            }
        }
        GradedOperator::from_entries(dom, cod, entries)
    }

    #[test]
    fn composition_matches_flat_product() {
        let a = sample(3, 2, 1);
        let b = sample(2, 4, 2);
        assert_eq!(b.compose(&a).to_flat(), b.to_flat().mul(&a.to_flat()));
        assert_eq!(GradedOperator::from_flat(3, 2, &a.to_flat()), a);
    }

    #[test]
    fn tensor_interchange_law() {
        let a = sample(2, 2, 3);
        let b = sample(1, 2, 4);
        let c = sample(2, 2, 5);
        let d = sample(3, 1, 6);
        let lhs = a.tensor(&b).compose(&c.tensor(&d));
        let rhs = a.compose(&c).tensor(&b.compose(&d));
        assert_eq!(lhs, rhs);
        assert_eq!(GradedOperator::<Rational>::identity(2).tensor(&GradedOperator::identity(1)), GradedOperator::identity(3));
    }

    #[test]
    fn rank_and_transpose() {
        let id = GradedOperator::<Rational>::identity(4);
        assert_eq!(id.rank(), 16);
        let a = sample(3, 3, 9);
        assert_eq!(a.rank(), a.to_flat().rank());
        assert_eq!(a.transpose().transpose(), a);
    }
}
