//! Matrix presentations of the simple and projective modules, tensor
//! products, the hom-space solver, and summand extraction.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::CycNumber;
use crate::error::{ensure, Error, Result};
use crate::field::Field;
use crate::linalg::{Echelon, Matrix, SparseMat};
use crate::operator::{binom, block_offset, GradedOperator};
use crate::scalar::{QField, RootField, Scalar};
use crate::tensor::{act_e, act_f};

pub type Mat = SparseMat<CycNumber>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn parse(s: &str) -> Result<Sign> {
        match s {
            "+" | "plus" | "pos" => Ok(Sign::Plus),
            "-" | "minus" | "neg" => Ok(Sign::Minus),
            _ => Err(Error::Parse(format!("sign must be + or -, got {s:?}"))),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Simple,
    Projective,
}

/// Names one of the modules `X^{+-}_s` or `P^{+-}_s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModuleId {
    pub kind: Kind,
    pub s: u32,
    pub sign: Sign,
}

impl ModuleId {
    pub fn simple(s: u32, sign: Sign) -> Self {
        ModuleId { kind: Kind::Simple, s, sign }
    }

    pub fn projective(s: u32, sign: Sign) -> Self {
        ModuleId { kind: Kind::Projective, s, sign }
    }

    pub fn dim(&self, p: u32) -> usize {
        match self.kind {
            Kind::Simple => self.s as usize,
            Kind::Projective => 2 * p as usize,
        }
    }

    /// All simple and projective modules for this `p`.
    pub fn all(p: u32) -> Vec<ModuleId> {
        let mut out = Vec::new();
        for sign in [Sign::Plus, Sign::Minus] {
            out.extend((1..=p).map(|s| ModuleId::simple(s, sign)));
            out.extend((1..p).map(|s| ModuleId::projective(s, sign)));
        }
        out
    }
}

impl fmt::Display for ModuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.kind {
            Kind::Simple => 'X',
            Kind::Projective => 'P',
        };
        write!(f, "{c}{}_{}", self.sign, self.s)
    }
}

/// A finite-dimensional representation in root mode: `K` is diagonal with
/// eigenvalue `q^{k[i]}` (exponent mod `2p`) on basis vector `i`.
#[derive(Clone, Debug)]
pub struct Rep {
    field: RootField,
    k: Vec<u32>,
    e: Mat,
    f: Mat,
}

impl Rep {
    pub fn new(field: RootField, k: Vec<i64>, e: Mat, f: Mat) -> Self {
        let d = k.len();
        assert_eq!((e.rows(), e.cols(), f.rows(), f.cols()), (d, d, d, d), "action matrices must be square of size dim");
        let m = 2 * field.p() as i64;
        let k = k.into_iter().map(|x| x.rem_euclid(m) as u32).collect();
        Rep { field, k, e, f }
    }

    pub fn field(&self) -> &RootField {
        &self.field
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    pub fn dim(&self) -> usize {
        self.k.len()
    }

    /// K exponents mod `2p`.
    pub fn k_exponents(&self) -> &[u32] {
        &self.k
    }

    pub fn e(&self) -> &Mat {
        &self.e
    }

    pub fn f(&self) -> &Mat {
        &self.f
    }

    pub fn k_matrix(&self) -> Mat {
        self.k_pow(1)
    }

    pub fn k_pow(&self, sign: i64) -> Mat {
        let t = self.k.iter().enumerate().map(|(i, e)| (i, i, self.field.q_pow(sign * *e as i64)));
        SparseMat::from_triplets(self.dim(), self.dim(), t)
    }

    /// Sorted multiset of K exponents.
    pub fn spectrum(&self) -> Vec<u32> {
        let mut s = self.k.clone();
        s.sort_unstable();
        s
    }

    pub fn with_e(&self, e: Mat) -> Rep {
        Rep { e, ..self.clone() }
    }

    /// The action on `X^{(x)z}` in the flat weight-major basis.
    pub fn tensor_power(field: &RootField, z: usize) -> Rep {
        let k = (0..=z)
            .flat_map(|n| std::iter::repeat_n(z as i64 - 2 * n as i64, binom(z, n)))
            .collect();
        Rep::new(field.clone(), k, act_e(field, z).to_flat(), act_f(field, z).to_flat())
    }

    /// `A (x) B` via `E -> E (x) K + 1 (x) E`, `F -> F (x) 1 + K^{-1} (x) F`.
    pub fn tensor(&self, other: &Rep) -> Rep {
        assert_eq!(self.p(), other.p(), "tensor product across different p");
        let ia = SparseMat::identity(self.dim());
        let ib = SparseMat::identity(other.dim());
        let e = self.e.kron(&other.k_matrix()).add(&ia.kron(&other.e));
        let f = self.f.kron(&ib).add(&self.k_pow(-1).kron(&other.f));
        let k = self
            .k
            .iter()
            .flat_map(|a| other.k.iter().map(move |b| (*a + *b) as i64))
            .collect();
        Rep::new(self.field.clone(), k, e, f)
    }

    /// Checks the defining relations of the restricted quantum group as
    /// matrix identities.
    pub fn verify_relations(&self) -> bool {
        let m = 2 * self.p();
        let shift_ok = |mat: &Mat, d: u32| mat.entries().all(|(r, c, _)| self.k[r] == (self.k[c] + d) % m);
        if !shift_ok(&self.e, 2) || !shift_ok(&self.f, m - 2) {
            return false;
        }
        let f = &self.field;
        let comm = self.e.mul(&self.f).sub(&self.f.mul(&self.e));
        let inv = f.q_pow(1).sub_ref(&f.q_pow(-1)).inv().expect("q^2 != 1");
        let rhs = self.k_pow(1).sub(&self.k_pow(-1)).scale(&inv);
        let p = self.p();
        let kk = self.k.iter().all(|e| (*e as u64 * 2 * p as u64).is_multiple_of(m as u64));
        comm == rhs && self.e.pow(p).is_zero() && self.f.pow(p).is_zero() && kk
    }

    /// Whether `t: self -> other` commutes with `E`, `F` and `K`.
    pub fn is_hom(&self, other: &Rep, t: &Mat) -> bool {
        let k_ok = t.entries().all(|(r, c, _)| other.k[r] == self.k[c]);
        k_ok && t.mul(&self.e) == other.e.mul(t) && t.mul(&self.f) == other.f.mul(t)
    }

    fn classes(&self) -> BTreeMap<u32, Vec<usize>> {
        let mut m: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (i, k) in self.k.iter().enumerate() {
            m.entry(*k).or_default().push(i);
        }
        m
    }
}

/// A basis of all homomorphisms `a -> b`, as `dim b x dim a` matrices.
///
/// Unknowns are restricted to pairs of basis vectors with equal `K`
/// eigenvalue; the equations `TE = ET`, `TF = FT` are then eliminated
/// sparsely.
pub fn hom_space(a: &Rep, b: &Rep) -> Vec<Mat> {
    assert_eq!(a.p(), b.p(), "hom space across different p");
    let ca = a.classes();
    let cb = b.classes();
    let mut pos_a = vec![0usize; a.dim()];
    for idx in ca.values() {
        for (k, i) in idx.iter().enumerate() {
            pos_a[*i] = k;
        }
    }
    let mut pos_b = vec![0usize; b.dim()];
    for idx in cb.values() {
        for (k, i) in idx.iter().enumerate() {
            pos_b[*i] = k;
        }
    }
    let mut offset: HashMap<u32, usize> = HashMap::new();
    let mut nvars = 0;
    for (k, ia) in &ca {
        if let Some(ib) = cb.get(k) {
            offset.insert(*k, nvars);
            nvars += ia.len() * ib.len();
        }
    }
    let var = |r: usize, c: usize| -> Option<usize> {
        if a.k[c] != b.k[r] {
            return None;
        }
        let off = *offset.get(&a.k[c])?;
        Some(off + pos_b[r] * ca[&a.k[c]].len() + pos_a[c])
    };

    let mut eqs: BTreeMap<(u8, usize, usize), Vec<(usize, CycNumber)>> = BTreeMap::new();
    for (tag, xa, xb) in [(0u8, &a.e, &b.e), (1u8, &a.f, &b.f)] {
        // (T X_a)[r][c] = sum_j T[r][j] X_a[j][c]
        for c in 0..a.dim() {
            for (j, val) in xa.col(c) {
                if let Some(rows) = cb.get(&a.k[*j]) {
                    for &r in rows {
                        let v = var(r, *j).expect("same class");
                        eqs.entry((tag, r, c)).or_default().push((v, val.clone()));
                    }
                }
            }
        }
        // (X_b T)[r][c] = sum_j X_b[r][j] T[j][c]
        for c in 0..a.dim() {
            let Some(js) = cb.get(&a.k[c]) else { continue };
            for &j in js {
                let v = var(j, c).expect("same class");
                for (r, val) in xb.col(j) {
                    eqs.entry((tag, *r, c)).or_default().push((v, val.neg_ref()));
                }
            }
        }
    }
    let mut ech = Echelon::new();
    for (_, row) in eqs {
        ech.insert(row);
        if ech.rank() == nvars {
            break;
        }
    }
    let mut inverse: Vec<(usize, usize)> = vec![(0, 0); nvars];
    for (k, ia) in &ca {
        let Some(ib) = cb.get(k) else { continue };
        for &r in ib {
            for &c in ia {
                inverse[var(r, c).expect("same class")] = (r, c);
            }
        }
    }
    ech.nullspace(nvars)
        .into_iter()
        .map(|x| SparseMat::from_triplets(b.dim(), a.dim(), x.into_iter().map(|(v, s)| (inverse[v].0, inverse[v].1, s))))
        .collect()
}

/// A module presentation with its labelled basis.
#[derive(Clone, Debug)]
pub struct ModulePresentation {
    pub id: ModuleId,
    pub labels: Vec<String>,
    pub rep: Rep,
}

fn sign_shift(sign: Sign, p: u32) -> i64 {
    match sign {
        Sign::Plus => 0,
        Sign::Minus => p as i64,
    }
}

fn sign_scalar(sign: Sign) -> CycNumber {
    match sign {
        Sign::Plus => CycNumber::one(),
        Sign::Minus => CycNumber::one().neg_ref(),
    }
}

/// `X^{+-}_s`: `K nu_n = +-q^{s-1-2n} nu_n`, `E nu_n = +-[n][s-n] nu_{n-1}`,
/// `F nu_n = nu_{n+1}`.
pub fn build_simple(s: u32, sign: Sign, p: u32) -> Result<ModulePresentation> {
    ensure!(p >= 2, OutOfRange, "p must be at least 2");
    ensure!((1..=p).contains(&s), OutOfRange, "simple module needs 1 <= s <= p, got s={s}, p={p}");
    let field = RootField::new(p);
    let d = s as usize;
    let si = s as i64;
    let k = (0..si).map(|n| si - 1 - 2 * n + sign_shift(sign, p)).collect();
    let sg = sign_scalar(sign);
    let e = SparseMat::from_triplets(
        d,
        d,
        (1..d).map(|n| (n - 1, n, sg.mul_ref(&field.qint(n as i64)).mul_ref(&field.qint(si - n as i64)))),
    );
    let f = SparseMat::from_triplets(d, d, (0..d.saturating_sub(1)).map(|n| (n + 1, n, CycNumber::one())));
    let labels = (0..d).map(|n| format!("nu_{n}")).collect();
    Ok(ModulePresentation { id: ModuleId::simple(s, sign), labels, rep: Rep::new(field, k, e, f) })
}

/// Index layout of `P_s`: `a_0..a_{s-1}, b_0..b_{s-1}, x_0..x_{p-s-1},
/// y_0..y_{p-s-1}`.
#[derive(Debug, Clone, Copy)]
pub struct ProjectiveLayout {
    pub s: usize,
    pub p: usize,
}

impl ProjectiveLayout {
    pub fn a(&self, i: usize) -> usize {
        i
    }
    pub fn b(&self, i: usize) -> usize {
        self.s + i
    }
    pub fn x(&self, j: usize) -> usize {
        2 * self.s + j
    }
    pub fn y(&self, j: usize) -> usize {
        self.s + self.p + j
    }
}

/// `P^{+-}_s`, `1 <= s <= p-1`, with the action on `a_i, b_i, x_j, y_j`.
pub fn build_projective(s: u32, sign: Sign, p: u32) -> Result<ModulePresentation> {
    ensure!(p >= 2, OutOfRange, "p must be at least 2");
    ensure!((1..p).contains(&s), OutOfRange, "projective module needs 1 <= s <= p-1, got s={s}, p={p}");
    let field = RootField::new(p);
    let (su, pu) = (s as usize, p as usize);
    let (si, pi) = (s as i64, p as i64);
    let l = ProjectiveLayout { s: su, p: pu };
    let d = 2 * pu;
    let t = pu - su;
    let mut k = vec![0i64; d];
    for i in 0..su {
        k[l.a(i)] = si - 1 - 2 * i as i64 + sign_shift(sign, p);
        k[l.b(i)] = k[l.a(i)];
    }
    for j in 0..t {
        k[l.x(j)] = pi - si - 1 - 2 * j as i64 + sign_shift(sign.flip(), p);
        k[l.y(j)] = k[l.x(j)];
    }
    let sg = sign_scalar(sign);
    let one = CycNumber::one();
    let mut e = Vec::new();
    for i in 1..su {
        let c = sg.mul_ref(&field.qint(i as i64)).mul_ref(&field.qint(si - i as i64));
        e.push((l.a(i - 1), l.a(i), c.clone()));
        e.push((l.b(i - 1), l.b(i), c));
        e.push((l.a(i - 1), l.b(i), one.clone()));
    }
    e.push((l.x(t - 1), l.b(0), one.clone()));
    for j in 1..t {
        let c = sg.neg_ref().mul_ref(&field.qint(j as i64)).mul_ref(&field.qint((t - j) as i64));
        e.push((l.x(j - 1), l.x(j), c.clone()));
        e.push((l.y(j - 1), l.y(j), c));
    }
    e.push((l.a(su - 1), l.y(0), one.clone()));
    let mut f = Vec::new();
    for i in 0..su - 1 {
        f.push((l.a(i + 1), l.a(i), one.clone()));
        f.push((l.b(i + 1), l.b(i), one.clone()));
    }
    f.push((l.y(0), l.b(su - 1), one.clone()));
    for j in 0..t - 1 {
        f.push((l.x(j + 1), l.x(j), one.clone()));
        f.push((l.y(j + 1), l.y(j), one.clone()));
    }
    f.push((l.a(0), l.x(t - 1), one));
    let mut labels = vec![String::new(); d];
    for i in 0..su {
        labels[l.a(i)] = format!("a_{i}");
        labels[l.b(i)] = format!("b_{i}");
    }
    for j in 0..t {
        labels[l.x(j)] = format!("x_{j}");
        labels[l.y(j)] = format!("y_{j}");
    }
    let rep = Rep::new(field, k, SparseMat::from_triplets(d, d, e), SparseMat::from_triplets(d, d, f));
    Ok(ModulePresentation { id: ModuleId::projective(s, sign), labels, rep })
}

pub fn build(id: ModuleId, p: u32) -> Result<ModulePresentation> {
    match id.kind {
        Kind::Simple => build_simple(id.s, id.sign, p),
        Kind::Projective => build_projective(id.s, id.sign, p),
    }
}

pub fn verify_algebra_relations(m: &ModulePresentation) -> bool {
    m.rep.verify_relations()
}

/// The standard non-identity maps between indecomposables.
#[derive(Debug, Clone, PartialEq)]
pub enum StdHom {
    /// `P_s -> X_s`, `b_i -> nu_i`.
    ProjToSimple,
    /// `X_s -> P_s`, `nu_i -> a_i`.
    SimpleToProj,
    /// `P_s -> P_s`, `b_i -> a_i`.
    Nilpotent,
    /// `P^{+-}_s -> P^{-+}_{p-s}`: `b_i -> g1 x~_i + g2 y~_i`, `x_j -> g2 a~_j`,
    /// `y_j -> g1 a~_j`.
    Cross { g1: CycNumber, g2: CycNumber },
}

pub fn std_hom(a: &ModulePresentation, b: &ModulePresentation, which: &StdHom) -> Result<Mat> {
    let p = a.rep.p();
    ensure!(p == b.rep.p(), ModeMismatch, "modules at different p");
    let (ia, ib) = (a.id, b.id);
    let unsupported = || Error::Unsupported(format!("{which:?} from {ia} to {ib}"));
    let one = CycNumber::one();
    let (s, pu) = (ia.s as usize, p as usize);
    let la = ProjectiveLayout { s, p: pu };
    let mut t = Vec::new();
    match which {
        StdHom::ProjToSimple => {
            if ia.kind != Kind::Projective || ib != ModuleId::simple(ia.s, ia.sign) {
                return Err(unsupported());
            }
            t.extend((0..s).map(|i| (i, la.b(i), one.clone())));
        }
        StdHom::SimpleToProj => {
            if ia.kind != Kind::Simple || ib != ModuleId::projective(ia.s, ia.sign) {
                return Err(unsupported());
            }
            let lb = ProjectiveLayout { s, p: pu };
            t.extend((0..s).map(|i| (lb.a(i), i, one.clone())));
        }
        StdHom::Nilpotent => {
            if ia.kind != Kind::Projective || ib != ia {
                return Err(unsupported());
            }
            t.extend((0..s).map(|i| (la.a(i), la.b(i), one.clone())));
        }
        StdHom::Cross { g1, g2 } => {
            if ia.kind != Kind::Projective || ib != ModuleId::projective(p - ia.s, ia.sign.flip()) {
                return Err(unsupported());
            }
            let lb = ProjectiveLayout { s: pu - s, p: pu };
            for i in 0..s {
                t.push((lb.x(i), la.b(i), g1.clone()));
                t.push((lb.y(i), la.b(i), g2.clone()));
            }
            for j in 0..pu - s {
                t.push((lb.a(j), la.x(j), g2.clone()));
                t.push((lb.a(j), la.y(j), g1.clone()));
            }
        }
    }
    Ok(SparseMat::from_triplets(b.rep.dim(), a.rep.dim(), t))
}

pub fn tensor_module(a: &Rep, b: &Rep) -> Rep {
    a.tensor(b)
}

/// The image of an idempotent as a representation in its own right:
/// `basis` (`dim x r`) and `coords` (`r x dim`) satisfy
/// `basis * coords = P` and `coords * basis = 1`, and the basis vectors are
/// `K` eigenvectors.
#[derive(Clone, Debug)]
pub struct Subrep {
    pub rep: Rep,
    pub basis: Mat,
    pub coords: Mat,
}

impl Subrep {
    pub fn of(m: &Rep, proj: &Mat) -> Subrep {
        let d = m.dim();
        assert_eq!((proj.rows(), proj.cols()), (d, d));
        let mut basis_cols: Vec<(usize, Vec<(usize, CycNumber)>)> = Vec::new();
        let mut coord_rows: Vec<Vec<(usize, CycNumber)>> = Vec::new();
        let mut k = Vec::new();
        for (kk, idx) in m.classes() {
            let block = proj.submatrix(&idx, &idx).to_dense();
            let mut r = block.clone();
            let pivots = r.rref();
            for (row, &pc) in pivots.iter().enumerate() {
                let col: Vec<_> = (0..idx.len())
                    .filter(|i| !block[(*i, pc)].is_zero())
                    .map(|i| (idx[i], block[(i, pc)].clone()))
                    .collect();
                basis_cols.push((basis_cols.len(), col));
                coord_rows.push(
                    (0..idx.len()).filter(|j| !r[(row, *j)].is_zero()).map(|j| (idx[j], r[(row, j)].clone())).collect(),
                );
                k.push(kk as i64);
            }
        }
        let rank = basis_cols.len();
        let basis = SparseMat::from_triplets(
            d,
            rank,
            basis_cols.into_iter().flat_map(|(c, col)| col.into_iter().map(move |(r, v)| (r, c, v))),
        );
        let coords = SparseMat::from_triplets(
            rank,
            d,
            coord_rows.into_iter().enumerate().flat_map(|(r, row)| row.into_iter().map(move |(c, v)| (r, c, v))),
        );
        let e = coords.mul(&m.e).mul(&basis);
        let f = coords.mul(&m.f).mul(&basis);
        Subrep { rep: Rep::new(m.field.clone(), k, e, f), basis, coords }
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }
}

/// Dense inverse of a square sparse matrix, if it exists.
pub fn invert(m: &Mat) -> Option<Mat> {
    m.to_dense().inverse().map(|i| SparseMat::from_dense(&i))
}

/// Rank of a square sparse matrix that commutes with `K` on `rep`, computed
/// per eigenvalue class.
pub fn rank_by_class(rep: &Rep, m: &Mat) -> BTreeMap<u32, usize> {
    rep.classes()
        .into_iter()
        .map(|(k, idx)| (k, m.submatrix(&idx, &idx).rank()))
        .filter(|(_, r)| *r > 0)
        .collect()
}

/// Multiset of K exponents of the image of an idempotent.
pub fn image_spectrum(rep: &Rep, proj: &Mat) -> Vec<u32> {
    let mut s: Vec<u32> = rank_by_class(rep, proj)
        .into_iter()
        .flat_map(|(k, r)| std::iter::repeat_n(k, r))
        .collect();
    s.sort_unstable();
    s
}

/// The part of `M` (optionally inside the image of an idempotent `within`)
/// isomorphic to copies of an indecomposable `T`.
#[derive(Clone, Debug)]
pub struct Isotypic {
    pub multiplicity: usize,
    /// `M -> M` idempotent onto the isotypic part.
    pub idempotent: Mat,
    /// One idempotent per copy, pairwise orthogonal, summing to the above.
    pub pieces: Vec<Mat>,
    /// `T^m -> M`, injective.
    pub inclusion: Mat,
    /// `M -> T^m` with `projection * inclusion` invertible.
    pub projection: Mat,
    /// `(projection * inclusion)^{-1}`.
    pub gram_inverse: Mat,
}

fn hstack(ms: &[&Mat]) -> Mat {
    let rows = ms[0].rows();
    let mut cols = Vec::new();
    for m in ms {
        cols.extend(m.columns().iter().cloned());
    }
    SparseMat::from_columns(rows, cols)
}

fn vstack(ms: &[&Mat]) -> Mat {
    let t: Vec<Mat> = ms.iter().map(|m| m.transpose()).collect();
    hstack(&t.iter().collect::<Vec<_>>()).transpose()
}

/// Finds the `T`-isotypic summand of `M` (inside the image of `within` when
/// given) from the composition pairing
/// `Hom(M, T) x Hom(T, M) -> End(T) / rad = K`, `(g, f) -> tr(g f) / dim T`.
/// Its rank is the multiplicity, and an invertible minor gives the
/// idempotent `F (G F)^{-1} G`.
pub fn isotypic(m: &Rep, t: &Rep, within: Option<&Mat>) -> Isotypic {
    let mut gs = hom_space(m, t);
    let mut fs = hom_space(t, m);
    if let Some(q) = within {
        gs = gs.iter().map(|g| g.mul(q)).filter(|g| !g.is_zero()).collect();
        fs = fs.iter().map(|f| q.mul(f)).filter(|f| !f.is_zero()).collect();
    }
    let dt = CycNumber::from_i64(t.dim() as i64);
    let inv_dt = dt.inv().expect("nonzero dimension");
    let trace = |a: &Mat| -> CycNumber {
        (0..a.rows()).fold(CycNumber::zero(), |acc, i| acc.add_ref(&a.get(i, i)))
    };
    let mut pairing = Matrix::zeros(gs.len(), fs.len());
    for (i, g) in gs.iter().enumerate() {
        for (j, f) in fs.iter().enumerate() {
            pairing[(i, j)] = trace(&g.mul(f)).mul_ref(&inv_dt);
        }
    }
    let mut r = pairing.clone();
    let cols = r.rref();
    let mult = cols.len();
    let d = m.dim();
    if mult == 0 {
        return Isotypic {
            multiplicity: 0,
            idempotent: SparseMat::zeros(d, d),
            pieces: Vec::new(),
            inclusion: SparseMat::zeros(d, 0),
            projection: SparseMat::zeros(0, d),
            gram_inverse: SparseMat::zeros(0, 0),
        };
    }
    // rows of the chosen columns that are independent
    let mut sub = Matrix::zeros(cols.len(), gs.len());
    for (a, &c) in cols.iter().enumerate() {
        for i in 0..gs.len() {
            sub[(a, i)] = pairing[(i, c)].clone();
        }
    }
    let rows = sub.rref();
    let fsel: Vec<&Mat> = cols.iter().map(|&j| &fs[j]).collect();
    let gsel: Vec<&Mat> = rows.iter().map(|&i| &gs[i]).collect();
    let inclusion = hstack(&fsel);
    let projection = vstack(&gsel);
    let gram = projection.mul(&inclusion);
    let gram_inverse = invert(&gram).expect("pairing minor is invertible, so the Gram operator is");
    let idempotent = inclusion.mul(&gram_inverse).mul(&projection);
    let td = t.dim();
    let pieces = (0..mult)
        .map(|k| {
            let sel = SparseMat::from_triplets(mult * td, mult * td, (k * td..(k + 1) * td).map(|i| (i, i, CycNumber::one())));
            inclusion.mul(&sel).mul(&gram_inverse).mul(&projection)
        })
        .collect();
    Isotypic { multiplicity: mult, idempotent, pieces, inclusion, projection, gram_inverse }
}

/// One line of a decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summand {
    pub module: ModuleId,
    pub multiplicity: usize,
}

/// Decomposes a representation into simple and projective indecomposables.
///
/// Multiplicities come from [`isotypic`] for every candidate module; each
/// extracted copy is then checked against the candidate's dimension,
/// K-spectrum and endomorphism dimension, and the dimensions must add up.
pub fn decompose(m: &Rep) -> Result<Vec<Summand>> {
    let p = m.p();
    let candidates = ModuleId::all(p);
    let found: Vec<Result<Option<Summand>>> = candidates
        .par_iter()
        .map(|id| {
            let t = build(*id, p)?;
            let iso = isotypic(m, &t.rep, None);
            if iso.multiplicity == 0 {
                return Ok(None);
            }
            let end_dim = hom_space(&t.rep, &t.rep).len();
            for piece in &iso.pieces {
                let sub = Subrep::of(m, piece);
                ensure!(
                    sub.rep.spectrum() == t.rep.spectrum(),
                    Identification,
                    "summand matched to {id} has K-spectrum {:?}, expected {:?}",
                    sub.rep.spectrum(),
                    t.rep.spectrum()
                );
                let local = hom_space(&sub.rep, &sub.rep).len();
                ensure!(local == end_dim, Identification, "summand matched to {id} has End of dimension {local}, expected {end_dim}");
            }
            Ok(Some(Summand { module: *id, multiplicity: iso.multiplicity }))
        })
        .collect();
    let mut out = Vec::new();
    for r in found {
        if let Some(s) = r? {
            out.push(s);
        }
    }
    out.sort_by_key(|s| s.module);
    let total: usize = out.iter().map(|s| s.module.dim(p) * s.multiplicity).sum();
    ensure!(total == m.dim(), Identification, "summands account for dimension {total} of {}", m.dim());
    Ok(out)
}

/// Expected decomposition of `X^{(x)n}` by iterating the fusion rules from
/// `X^{(x)0} = X+_1`.
pub fn fusion_power(p: u32, n: usize) -> Vec<Summand> {
    let mut cur: BTreeMap<ModuleId, usize> = BTreeMap::new();
    cur.insert(ModuleId::simple(1, Sign::Plus), 1);
    for _ in 0..n {
        let mut next: BTreeMap<ModuleId, usize> = BTreeMap::new();
        for (id, mult) in cur {
            for (out, k) in fuse_with_x(id, p) {
                *next.entry(out).or_default() += k * mult;
            }
        }
        cur = next;
    }
    cur.into_iter().map(|(module, multiplicity)| Summand { module, multiplicity }).collect()
}

/// `M (x) X` for an indecomposable `M`.
pub fn fuse_with_x(m: ModuleId, p: u32) -> Vec<(ModuleId, usize)> {
    let sg = m.sign;
    let s = m.s;
    match m.kind {
        Kind::Simple if s == 1 => vec![(ModuleId::simple(2, sg), 1)],
        Kind::Simple if s < p => vec![(ModuleId::simple(s - 1, sg), 1), (ModuleId::simple(s + 1, sg), 1)],
        Kind::Simple => vec![(ModuleId::projective(p - 1, sg), 1)],
        Kind::Projective => {
            // P_p is read as X_p
            let up = |t: u32, sign: Sign| {
                if t == p {
                    ModuleId::simple(p, sign)
                } else {
                    ModuleId::projective(t, sign)
                }
            };
            let mut out = Vec::new();
            if s == 1 {
                out.push((up(2, sg), 1));
                out.push((ModuleId::simple(p, sg.flip()), 2));
            } else if s == p - 1 {
                out.push((ModuleId::projective(p - 2, sg), 1));
                out.push((ModuleId::simple(p, sg), 2));
            } else {
                out.push((ModuleId::projective(s - 1, sg), 1));
                out.push((up(s + 1, sg), 1));
            }
            // p = 2: s = 1 = p - 1 and both rules coincide with P_1 (x) X
            if p == 2 {
                out = vec![(ModuleId::simple(2, sg), 2), (ModuleId::simple(2, sg.flip()), 2)];
            }
            out
        }
    }
}

/// Wire form of a presentation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModuleJson {
    pub kind: Kind,
    pub s: u32,
    pub sign: Sign,
    pub p: u32,
    pub labels: Vec<String>,
    #[serde(rename = "E")]
    pub e: Vec<(usize, usize, Scalar)>,
    #[serde(rename = "F")]
    pub f: Vec<(usize, usize, Scalar)>,
    #[serde(rename = "K")]
    pub k: Vec<Scalar>,
}

impl ModulePresentation {
    pub fn to_json(&self) -> ModuleJson {
        let f = self.rep.field();
        let sparse = |m: &Mat| m.entries().map(|(r, c, v)| (r, c, f.to_scalar(v))).collect();
        ModuleJson {
            kind: self.id.kind,
            s: self.id.s,
            sign: self.id.sign,
            p: self.rep.p(),
            labels: self.labels.clone(),
            e: sparse(self.rep.e()),
            f: sparse(self.rep.f()),
            k: self.rep.k.iter().map(|e| f.to_scalar(&f.q_pow(*e as i64))).collect(),
        }
    }
}

/// Converts a graded endomorphism of `X^{(x)z}` into the flat basis used by
/// [`Rep::tensor_power`].
pub fn flat(op: &GradedOperator<CycNumber>) -> Mat {
    op.to_flat()
}

pub fn graded(z_dom: usize, z_cod: usize, m: &Mat) -> GradedOperator<CycNumber> {
    GradedOperator::from_flat(z_dom, z_cod, m)
}

/// Offset of weight `n` in the flat basis of `X^{(x)z}`.
pub fn weight_offset(z: usize, n: usize) -> usize {
    block_offset(z, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_modules_satisfy_relations() {
        for p in 2..=4 {
            for s in 1..=p {
                for sign in [Sign::Plus, Sign::Minus] {
                    let m = build_simple(s, sign, p).unwrap();
                    assert!(verify_algebra_relations(&m), "{} at p={p}", m.id);
                }
            }
        }
        assert!(build_simple(0, Sign::Plus, 3).is_err());
        assert!(build_simple(4, Sign::Plus, 3).is_err());
    }

    #[test]
    fn projective_modules_satisfy_relations() {
        for p in 2..=4 {
            for s in 1..p {
                for sign in [Sign::Plus, Sign::Minus] {
                    let m = build_projective(s, sign, p).unwrap();
                    assert_eq!(m.rep.dim(), 2 * p as usize);
                    assert!(verify_algebra_relations(&m), "{} at p={p}", m.id);
                }
            }
        }
        assert!(build_projective(3, Sign::Plus, 3).is_err());
    }

    #[test]
    fn corrupted_presentation_fails() {
        let m = build_projective(1, Sign::Plus, 3).unwrap();
        let bad = m.rep.e().add(&SparseMat::from_triplets(6, 6, [(0, 1, CycNumber::one())]));
        let l = ProjectiveLayout { s: 1, p: 3 };
        assert_eq!(l.b(0), 1);
        assert!(!m.rep.with_e(bad).verify_relations());
    }

    #[test]
    fn projective_one_at_p2_spectrum() {
        let m = build_projective(1, Sign::Plus, 2).unwrap();
        // q^0 twice and q^2 = -1 twice
        assert_eq!(m.rep.spectrum(), vec![0, 0, 2, 2]);
    }

    #[test]
    fn trivial_module() {
        let m = build_simple(1, Sign::Plus, 3).unwrap();
        assert!(m.rep.e().is_zero() && m.rep.f().is_zero());
        assert_eq!(m.rep.k_exponents(), &[0]);
    }

    #[test]
    fn fusion_bookkeeping() {
        let d = |p: u32, n: usize| -> usize { fusion_power(p, n).iter().map(|s| s.module.dim(p) * s.multiplicity).sum() };
        for p in 2..=4 {
            for n in 0..=2 * p as usize + 1 {
                assert_eq!(d(p, n), 1 << n, "p={p} n={n}");
            }
        }
        assert_eq!(
            fusion_power(3, 2),
            vec![
                Summand { module: ModuleId::simple(1, Sign::Plus), multiplicity: 1 },
                Summand { module: ModuleId::simple(3, Sign::Plus), multiplicity: 1 },
            ]
        );
    }

    fn in_span(basis: &[Mat], t: &Mat) -> bool {
        let flat = |m: &Mat| -> Vec<(usize, CycNumber)> {
            m.entries().map(|(r, c, v)| (r * m.cols() + c, v.clone())).collect()
        };
        let mut ech = Echelon::new();
        for b in basis {
            ech.insert(flat(b));
        }
        ech.contains(flat(t))
    }

    #[test]
    fn endomorphism_dimensions() {
        for p in 2..=4 {
            for id in ModuleId::all(p) {
                let m = build(id, p).unwrap();
                let want = if id.kind == Kind::Simple { 1 } else { 2 };
                assert_eq!(hom_space(&m.rep, &m.rep).len(), want, "{id} p={p}");
            }
        }
    }

    #[test]
    fn standard_maps_are_homomorphisms() {
        for p in 2..=4 {
            let f = RootField::new(p);
            for s in 1..p {
                for sign in [Sign::Plus, Sign::Minus] {
                    let ps = build_projective(s, sign, p).unwrap();
                    let xs = build_simple(s, sign, p).unwrap();
                    let dual = build_projective(p - s, sign.flip(), p).unwrap();
                    let cases = [
                        (&ps, &xs, StdHom::ProjToSimple),
                        (&xs, &ps, StdHom::SimpleToProj),
                        (&ps, &ps, StdHom::Nilpotent),
                        (&ps, &dual, StdHom::Cross { g1: CycNumber::one(), g2: CycNumber::zero() }),
                        (&ps, &dual, StdHom::Cross { g1: CycNumber::zero(), g2: f.q_pow(1) }),
                    ];
                    for (a, b, w) in cases {
                        let t = std_hom(a, b, &w).unwrap();
                        assert!(a.rep.is_hom(&b.rep, &t), "{w:?} {} -> {} p={p}", a.id, b.id);
                        assert!(in_span(&hom_space(&a.rep, &b.rep), &t));
                    }
                    assert_eq!(hom_space(&ps.rep, &dual.rep).len(), 2);
                }
            }
        }
    }

    #[test]
    fn std_hom_rejects_wrong_modules() {
        let a = build_projective(1, Sign::Plus, 3).unwrap();
        let b = build_simple(2, Sign::Plus, 3).unwrap();
        assert!(matches!(std_hom(&a, &b, &StdHom::ProjToSimple), Err(Error::Unsupported(_))));
    }

    #[test]
    fn tensor_powers_decompose_by_fusion() {
        for p in 2..=3 {
            let f = RootField::new(p);
            for n in 1..=2 * p as usize + 1 {
                let rep = Rep::tensor_power(&f, n);
                assert!(rep.verify_relations());
                assert_eq!(decompose(&rep).unwrap(), fusion_power(p, n), "p={p} n={n}");
            }
        }
    }

    #[test]
    fn simple_tensor_simple_matches_tensor_power() {
        let f = RootField::new(3);
        let x = build_simple(2, Sign::Plus, 3).unwrap().rep;
        let xx = x.tensor(&x);
        let direct = Rep::tensor_power(&f, 2);
        assert_eq!(decompose(&xx).unwrap(), decompose(&direct).unwrap());
    }

    #[test]
    fn isotypic_pieces_are_orthogonal_idempotents() {
        let f = RootField::new(3);
        let rep = Rep::tensor_power(&f, 4);
        let t = build_projective(1, Sign::Plus, 3).unwrap();
        let iso = isotypic(&rep, &t.rep, None);
        assert_eq!(iso.multiplicity, 1);
        let t2 = build_projective(2, Sign::Plus, 3).unwrap();
        let iso2 = isotypic(&rep, &t2.rep, None);
        assert_eq!(iso2.multiplicity, 0);
        let t3 = build_simple(3, Sign::Minus, 3).unwrap();
        let rep5 = Rep::tensor_power(&f, 5);
        let iso3 = isotypic(&rep5, &t3.rep, None);
        assert_eq!(iso3.multiplicity, 2);
        for (i, a) in iso3.pieces.iter().enumerate() {
            for (j, b) in iso3.pieces.iter().enumerate() {
                let ab = a.mul(b);
                if i == j {
                    assert_eq!(&ab, a);
                } else {
                    assert!(ab.is_zero());
                }
            }
            assert!(rep5.is_hom(&rep5, a));
            let sub = Subrep::of(&rep5, a);
            assert_eq!(sub.rep.spectrum(), t3.rep.spectrum());
            assert!(sub.rep.verify_relations());
            assert_eq!(sub.coords.mul(&sub.basis), SparseMat::identity(3));
        }
        assert_eq!(iso.idempotent.mul(&iso.idempotent), iso.idempotent);
    }
}
