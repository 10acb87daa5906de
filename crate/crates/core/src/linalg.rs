//! Exact sparse and dense linear algebra over any [`Field`].

use std::collections::BTreeMap;

use crate::field::Field;

/// Column-major sparse matrix. Each column lists `(row, value)` pairs sorted
/// by row with no explicit zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMat<S> {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(usize, S)>>,
}

impl<S: Field> SparseMat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMat { rows, cols, data: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        SparseMat { rows: n, cols: n, data: (0..n).map(|i| vec![(i, S::one())]).collect() }
    }

    /// Builds from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, S)>,
    ) -> Self {
        let mut acc: Vec<BTreeMap<usize, S>> = vec![BTreeMap::new(); cols];
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "entry ({r}, {c}) outside {rows}x{cols}");
            let slot = acc[c].entry(r).or_insert_with(S::zero);
            slot.add_assign_ref(&v);
        }
        let data = acc
            .into_iter()
            .map(|col| col.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        SparseMat { rows, cols, data }
    }

    /// Builds from columns that are already sorted and zero-free.
    pub fn from_columns(rows: usize, data: Vec<Vec<(usize, S)>>) -> Self {
        debug_assert!(data.iter().all(|c| c.windows(2).all(|w| w[0].0 < w[1].0)));
        debug_assert!(data.iter().flatten().all(|(r, v)| *r < rows && !v.is_zero()));
        SparseMat { rows, cols: data.len(), data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn col(&self, c: usize) -> &[(usize, S)] {
        &self.data[c]
    }

    pub fn columns(&self) -> &[Vec<(usize, S)>] {
        &self.data
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn get(&self, r: usize, c: usize) -> S {
        match self.data[c].binary_search_by_key(&r, |(i, _)| *i) {
            Ok(k) => self.data[c][k].1.clone(),
            Err(_) => S::zero(),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &S)> {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, v)| (*r, c, v)))
    }

    /// `self * rhs`, i.e. apply `rhs` first.
    pub fn mul(&self, rhs: &SparseMat<S>) -> SparseMat<S> {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut acc = Accumulator::new(self.rows);
        let data = rhs
            .data
            .iter()
            .map(|col| {
                for (k, b) in col {
                    for (i, a) in &self.data[*k] {
                        acc.add(*i, a.mul_ref(b));
                    }
                }
                acc.drain()
            })
            .collect();
        SparseMat { rows: self.rows, cols: rhs.cols, data }
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![S::zero(); self.rows];
        for (c, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (r, a) in &self.data[c] {
                out[*r].add_assign_ref(&a.mul_ref(x));
            }
        }
        out
    }

    fn zip(&self, other: &SparseMat<S>, neg: bool) -> SparseMat<S> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix sum shape mismatch");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| {
                let mut out = Vec::with_capacity(a.len() + b.len());
                let (mut i, mut j) = (0, 0);
                while i < a.len() || j < b.len() {
                    let ra = a.get(i).map_or(usize::MAX, |e| e.0);
                    let rb = b.get(j).map_or(usize::MAX, |e| e.0);
                    if ra < rb {
                        out.push(a[i].clone());
                        i += 1;
                    } else if rb < ra {
                        let v = if neg { b[j].1.neg_ref() } else { b[j].1.clone() };
                        out.push((rb, v));
                        j += 1;
                    } else {
                        let v = if neg { a[i].1.sub_ref(&b[j].1) } else { a[i].1.add_ref(&b[j].1) };
                        if !v.is_zero() {
                            out.push((ra, v));
                        }
                        i += 1;
                        j += 1;
                    }
                }
                out
            })
            .collect();
        SparseMat { rows: self.rows, cols: self.cols, data }
    }

    pub fn add(&self, other: &SparseMat<S>) -> SparseMat<S> {
        self.zip(other, false)
    }

    pub fn sub(&self, other: &SparseMat<S>) -> SparseMat<S> {
        self.zip(other, true)
    }

    pub fn scale(&self, s: &S) -> SparseMat<S> {
        if s.is_zero() {
            return SparseMat::zeros(self.rows, self.cols);
        }
        let data = self
            .data
            .iter()
            .map(|col| col.iter().map(|(r, v)| (*r, v.mul_ref(s))).collect())
            .collect();
        SparseMat { rows: self.rows, cols: self.cols, data }
    }

    pub fn transpose(&self) -> SparseMat<S> {
        let mut data: Vec<Vec<(usize, S)>> = vec![Vec::new(); self.rows];
        for (c, col) in self.data.iter().enumerate() {
            for (r, v) in col {
                data[*r].push((c, v.clone()));
            }
        }
        SparseMat { rows: self.cols, cols: self.rows, data }
    }

    /// Rows and columns selected (in the given order) into a new matrix.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> SparseMat<S> {
        let mut pos = vec![usize::MAX; self.rows];
        for (k, r) in rows.iter().enumerate() {
            pos[*r] = k;
        }
        let data = cols
            .iter()
            .map(|c| {
                let mut col: Vec<_> = self.data[*c]
                    .iter()
                    .filter(|(r, _)| pos[*r] != usize::MAX)
                    .map(|(r, v)| (pos[*r], v.clone()))
                    .collect();
                col.sort_by_key(|e| e.0);
                col
            })
            .collect();
        SparseMat { rows: rows.len(), cols: cols.len(), data }
    }

    pub fn to_dense(&self) -> Matrix<S> {
        let mut m = Matrix::zeros(self.rows, self.cols);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v.clone();
        }
        m
    }

    pub fn from_dense(m: &Matrix<S>) -> SparseMat<S> {
        let data = (0..m.cols)
            .map(|c| {
                (0..m.rows)
                    .filter(|r| !m[(*r, c)].is_zero())
                    .map(|r| (r, m[(r, c)].clone()))
                    .collect()
            })
            .collect();
        SparseMat { rows: m.rows, cols: m.cols, data }
    }

    pub fn pow(&self, k: u32) -> SparseMat<S> {
        assert_eq!(self.rows, self.cols);
        (0..k).fold(SparseMat::identity(self.rows), |acc, _| self.mul(&acc))
    }

    pub fn rank(&self) -> usize {
        let mut ech = Echelon::new();
        for row in self.transpose().data {
            ech.insert(row);
        }
        ech.rank()
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &SparseMat<S>) -> SparseMat<S> {
        let mut data = self.data.clone();
        data.extend(
            other.data.iter().map(|col| col.iter().map(|(r, v)| (r + self.rows, v.clone())).collect()),
        );
        SparseMat { rows: self.rows + other.rows, cols: self.cols + other.cols, data }
    }

    /// Kronecker product with `self` on the slow index.
    pub fn kron(&self, other: &SparseMat<S>) -> SparseMat<S> {
        let rows = self.rows * other.rows;
        let mut data = Vec::with_capacity(self.cols * other.cols);
        for a in &self.data {
            for b in &other.data {
                let mut col = Vec::with_capacity(a.len() * b.len());
                for (ra, va) in a {
                    for (rb, vb) in b {
                        col.push((ra * other.rows + rb, va.mul_ref(vb)));
                    }
                }
                data.push(col);
            }
        }
        SparseMat { rows, cols: self.cols * other.cols, data }
    }
}

/// Dense scatter buffer for accumulating one sparse column.
pub(crate) struct Accumulator<S> {
    vals: Vec<S>,
    touched: Vec<usize>,
    mark: Vec<bool>,
}

impl<S: Field> Accumulator<S> {
    pub(crate) fn new(n: usize) -> Self {
        Accumulator { vals: vec![S::zero(); n], touched: Vec::new(), mark: vec![false; n] }
    }

    pub(crate) fn add(&mut self, i: usize, v: S) {
        if !self.mark[i] {
            self.mark[i] = true;
            self.touched.push(i);
            self.vals[i] = v;
        } else {
            self.vals[i].add_assign_ref(&v);
        }
    }

    pub(crate) fn drain(&mut self) -> Vec<(usize, S)> {
        self.touched.sort_unstable();
        let mut out = Vec::with_capacity(self.touched.len());
        for &i in &self.touched {
            self.mark[i] = false;
            let v = std::mem::replace(&mut self.vals[i], S::zero());
            if !v.is_zero() {
                out.push((i, v));
            }
        }
        self.touched.clear();
        out
    }
}

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S> std::ops::Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (r, c): (usize, usize)) -> &S {
        &self.data[r * self.cols + c]
    }
}

impl<S> std::ops::IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut S {
        &mut self.data[r * self.cols + c]
    }
}

impl<S: Field> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[S] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul(&self, rhs: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out: Matrix<S> = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        let t = a.mul_ref(b);
                        out[(i, j)].add_assign_ref(&t);
                    }
                }
            }
        }
        out
    }

    /// Reduces in place to reduced row echelon form with lexicographic
    /// (leftmost) pivoting; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            if pr != r {
                for j in 0..self.cols {
                    self.data.swap(pr * self.cols + j, r * self.cols + j);
                }
            }
            let inv = self[(r, c)].inv().expect("pivot is nonzero");
            for j in c..self.cols {
                let v = self[(r, j)].mul_ref(&inv);
                self[(r, j)] = v;
            }
            for i in 0..self.rows {
                if i == r || self[(i, c)].is_zero() {
                    continue;
                }
                let f = self[(i, c)].clone();
                for j in c..self.cols {
                    if !self[(r, j)].is_zero() {
                        let t = f.mul_ref(&self[(r, j)]);
                        let v = self[(i, j)].sub_ref(&t);
                        self[(i, j)] = v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of `{x : self * x = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<S>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![S::zero(); self.cols];
                x[f] = S::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    x[pc] = m[(r, f)].neg_ref();
                }
                x
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<Matrix<S>> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = S::one();
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = aug[(i, n + j)].clone();
            }
        }
        Some(inv)
    }
}

/// Incrementally built row echelon form over sparse rows. Used both for rank
/// computations and as the nullspace solver for large homogeneous systems.
#[derive(Clone, Debug, Default)]
pub struct Echelon<S> {
    /// Leading column -> row (sorted, leading coefficient one).
    pivots: BTreeMap<usize, Vec<(usize, S)>>,
}

impl<S: Field> Echelon<S> {
    pub fn new() -> Self {
        Echelon { pivots: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `row` against the stored pivots; returns the remainder in
    /// sorted sparse form.
    pub fn reduce(&self, row: Vec<(usize, S)>) -> Vec<(usize, S)> {
        let mut cur: BTreeMap<usize, S> = BTreeMap::new();
        for (c, v) in row {
            if !v.is_zero() {
                cur.entry(c).or_insert_with(S::zero).add_assign_ref(&v);
            }
        }
        cur.retain(|_, v| !v.is_zero());
        let mut cursor = 0;
        loop {
            let next = cur.range(cursor..).map(|(c, _)| *c).find(|c| self.pivots.contains_key(c));
            let Some(c) = next else { break };
            let f = cur.remove(&c).expect("present");
            for (j, v) in &self.pivots[&c][1..] {
                let t = f.mul_ref(v);
                let slot = cur.entry(*j).or_insert_with(S::zero);
                *slot = slot.sub_ref(&t);
                if slot.is_zero() {
                    cur.remove(j);
                }
            }
            cursor = c + 1;
        }
        cur.into_iter().collect()
    }

    /// Adds a row; returns whether it increased the rank.
    pub fn insert(&mut self, row: Vec<(usize, S)>) -> bool {
        let rem = self.reduce(row);
        let Some((lead, lv)) = rem.first().cloned() else {
            return false;
        };
        let inv = lv.inv().expect("nonzero");
        let normalized = rem.into_iter().map(|(c, v)| (c, v.mul_ref(&inv))).collect();
        self.pivots.insert(lead, normalized);
        true
    }

    pub fn contains(&self, row: Vec<(usize, S)>) -> bool {
        self.reduce(row).is_empty()
    }

    /// Basis of the solution space of the stored homogeneous system in
    /// `nvars` unknowns, one vector per free variable in increasing order.
    pub fn nullspace(&self, nvars: usize) -> Vec<Vec<(usize, S)>> {
        let free: Vec<usize> = (0..nvars).filter(|c| !self.pivots.contains_key(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x: BTreeMap<usize, S> = BTreeMap::new();
                x.insert(f, S::one());
                for (&pc, row) in self.pivots.range(..f).rev() {
                    let mut s = S::zero();
                    for (j, v) in &row[1..] {
                        if let Some(xj) = x.get(j) {
                            s.add_assign_ref(&v.mul_ref(xj));
                        }
                    }
                    if !s.is_zero() {
                        x.insert(pc, s.neg_ref());
                    }
                }
                x.into_iter().collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rat, Rational};

    fn m(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
    }

    #[test]
    fn rref_and_rank() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 1);
        let x = &ns[0];
        for r in 0..3 {
            let s: Rational = (0..3).map(|c| &a[(r, c)] * &x[c]).sum();
            assert_eq!(s, rat(0));
        }
    }

    #[test]
    fn inverse_round_trip() {
        let a = m(&[&[2, 1], &[7, 4]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::<Rational>::identity(2));
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn sparse_products_match_dense() {
        let a = m(&[&[1, 0, 2], &[0, 3, 0]]);
        let b = m(&[&[1, 1], &[0, -1], &[4, 0]]);
        let sa = SparseMat::from_dense(&a);
        let sb = SparseMat::from_dense(&b);
        assert_eq!(sa.mul(&sb).to_dense(), a.mul(&b));
        assert_eq!(sa.transpose().transpose(), sa);
        assert_eq!(sa.sub(&sa).nnz(), 0);
        assert_eq!(sa.rank(), 2);
    }

    #[test]
    fn echelon_nullspace() {
        let mut e = Echelon::new();
        e.insert(vec![(0, rat(1)), (2, rat(-1))]);
        e.insert(vec![(1, rat(1)), (2, rat(-1))]);
        assert!(!e.insert(vec![(0, rat(1)), (1, rat(-1))]));
        let ns = e.nullspace(3);
        assert_eq!(ns, vec![vec![(0, rat(1)), (1, rat(1)), (2, rat(1))]]);
    }

    #[test]
    fn kron_shape() {
        let a = SparseMat::<Rational>::identity(2);
        let b = SparseMat::from_dense(&m(&[&[0, 1], &[0, 0]]));
        let k = a.kron(&b);
        assert_eq!(k.rows(), 4);
        assert_eq!(k.get(2, 3), rat(1));
        assert_eq!(k.nnz(), 2);
    }
}
