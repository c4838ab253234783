//! Exact field arithmetic and dense/sparse elimination.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not an odd prime below 2^31")]
    BadPrime(u64),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("differentials do not compose to zero")]
    NotComplex,
}

/// A field, passed around as a context value. Elements are plain data.
pub trait Field: Clone + Send + Sync + Debug + 'static {
    type Elem: Clone + PartialEq + Eq + Hash + Debug + Display + Send + Sync + 'static;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem, LinalgError>;
    fn name(&self) -> String;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    /// `a - f*b`, the elimination kernel.
    fn sub_mul(&self, a: &Self::Elem, f: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.sub(a, &self.mul(f, b))
    }
}

pub const DEFAULT_PRIME: u64 = 32003;

/// GF(p) for an odd prime p < 2^31; elements are reduced residues.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, LinalgError> {
        if p == 2 || p >= (1 << 31) || !is_prime(p) {
            return Err(LinalgError::BadPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    fn pow(&self, mut b: u64, mut e: u64) -> u64 {
        let mut r = 1;
        b %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % self.p;
            }
            b = b * b % self.p;
            e >>= 1;
        }
        r
    }
}

impl Default for PrimeField {
    fn default() -> Self {
        PrimeField { p: DEFAULT_PRIME }
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> Result<u64, LinalgError> {
        if *a == 0 {
            return Err(LinalgError::DivisionByZero);
        }
        Ok(self.pow(*a, self.p - 2))
    }
    fn name(&self) -> String {
        format!("GF({})", self.p)
    }
    fn sub_mul(&self, a: &u64, f: &u64, b: &u64) -> u64 {
        let fb = f * b % self.p;
        if *a >= fb {
            a - fb
        } else {
            a + self.p - fb
        }
    }
}

/// The rational numbers with arbitrary precision.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Result<BigRational, LinalgError> {
        if a.is_zero() {
            return Err(LinalgError::DivisionByZero);
        }
        Ok(a.recip())
    }
    fn name(&self) -> String {
        "QQ".to_string()
    }
}

/// Whether a rational is a small signed integer; used by tests and printing.
pub fn rational_as_i64(a: &BigRational) -> Option<i64> {
    if !a.is_integer() {
        return None;
    }
    let n = a.to_integer();
    if n.abs() > BigInt::from(i64::MAX) {
        return None;
    }
    n.to_string().parse().ok()
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Debug> Debug for Mat<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        Ok(())
    }
}

impl<E: Clone> Mat<E> {
    pub fn filled(rows: usize, cols: usize, v: E) -> Self {
        Mat { rows, cols, data: vec![v; rows * cols] }
    }

    pub fn zeros<K: Field<Elem = E>>(k: &K, rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, k.zero())
    }

    pub fn identity<K: Field<Elem = E>>(k: &K, n: usize) -> Self {
        let mut m = Self::zeros(k, n, n);
        for i in 0..n {
            m.set(i, i, k.one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<E>>, cols: usize) -> Result<Self, LinalgError> {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            if row.len() != cols {
                return Err(LinalgError::Shape(format!("row of length {} in {}-column matrix", row.len(), cols)));
            }
            data.extend(row);
        }
        Ok(Mat { rows: r, cols, data })
    }

    pub fn from_i64<K: Field<Elem = E>>(k: &K, rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows.iter().flat_map(|r| r.iter().map(|&v| k.from_i64(v))).collect();
        Mat { rows: rows.len(), cols, data }
    }

    /// Build from column vectors of length `rows`.
    pub fn from_cols<K: Field<Elem = E>>(k: &K, rows: usize, cols: &[Vec<E>]) -> Self {
        let mut m = Self::zeros(k, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, v) in c.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: E) {
        self.data[i * self.cols + j] = v;
    }
    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
    pub fn col(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }
    pub fn to_rows(&self) -> Vec<Vec<E>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Mat { rows: self.cols, cols: self.rows, data }
    }

    pub fn is_zero<K: Field<Elem = E>>(&self, k: &K) -> bool {
        self.data.iter().all(|v| k.is_zero(v))
    }

    pub fn mul<K: Field<Elem = E>>(&self, k: &K, other: &Mat<E>) -> Result<Mat<E>, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Mat::zeros(k, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if k.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(l, j);
                    if !k.is_zero(b) {
                        let v = k.add(out.get(i, j), &k.mul(a, b));
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec<K: Field<Elem = E>>(&self, k: &K, v: &[E]) -> Vec<E> {
        (0..self.rows)
            .map(|i| {
                let mut s = k.zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !k.is_zero(a) && !k.is_zero(b) {
                        s = k.add(&s, &k.mul(a, b));
                    }
                }
                s
            })
            .collect()
    }
}

fn eliminate_rows<K: Field>(k: &K, rows: &mut [Vec<K::Elem>], ncols: usize, full: bool) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !k.is_zero(&rows[i][c])) else {
            continue;
        };
        rows.swap(r, p);
        let inv = k.inv(&rows[r][c]).expect("pivot is nonzero");
        if !k.is_one(&inv) {
            for v in rows[r][c..].iter_mut() {
                *v = k.mul(v, &inv);
            }
        }
        let support: Vec<usize> = (c..ncols).filter(|&j| !k.is_zero(&rows[r][j])).collect();
        let (before, rest) = rows.split_at_mut(r);
        let (prow, after) = rest.split_first_mut().expect("pivot row");
        let mut clear = |row: &mut Vec<K::Elem>| {
            if k.is_zero(&row[c]) {
                return;
            }
            let f = row[c].clone();
            for &j in &support {
                row[j] = k.sub_mul(&row[j], &f, &prow[j]);
            }
        };
        after.iter_mut().for_each(&mut clear);
        if full {
            before.iter_mut().for_each(&mut clear);
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Reduced row echelon form and pivot columns.
pub fn rref<K: Field>(k: &K, m: &Mat<K::Elem>) -> (Mat<K::Elem>, Vec<usize>) {
    let mut rows = m.to_rows();
    let pivots = eliminate_rows(k, &mut rows, m.cols, true);
    let out = Mat { rows: m.rows, cols: m.cols, data: rows.into_iter().flatten().collect() };
    (out, pivots)
}

/// [`rref`] consuming its input.
pub fn eliminate_dense_rref<K: Field>(k: &K, m: Mat<K::Elem>) -> (Mat<K::Elem>, Vec<usize>) {
    let (rows, cols) = (m.rows, m.cols);
    let mut r: Vec<Vec<K::Elem>> = m.data.chunks(cols.max(1)).map(|c| c.to_vec()).collect();
    if cols == 0 {
        r = vec![Vec::new(); rows];
    }
    let pivots = eliminate_rows(k, &mut r, cols, true);
    (Mat { rows, cols, data: r.into_iter().flatten().collect() }, pivots)
}

pub fn rank<K: Field>(k: &K, m: &Mat<K::Elem>) -> usize {
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    let mut rows = if m.rows <= m.cols { m.to_rows() } else { m.transpose().to_rows() };
    let n = rows[0].len();
    eliminate_rows(k, &mut rows, n, false).len()
}

/// Columns form a basis of the right kernel.
pub fn kernel_basis<K: Field>(k: &K, m: &Mat<K::Elem>) -> Mat<K::Elem> {
    let vecs = kernel_vectors(k, m);
    Mat::from_cols(k, m.cols, &vecs)
}

pub fn kernel_vectors<K: Field>(k: &K, m: &Mat<K::Elem>) -> Vec<Vec<K::Elem>> {
    let (r, pivots) = rref(k, m);
    let mut is_pivot = vec![None; m.cols];
    for (i, &c) in pivots.iter().enumerate() {
        is_pivot[c] = Some(i);
    }
    let mut out = Vec::new();
    for f in 0..m.cols {
        if is_pivot[f].is_some() {
            continue;
        }
        let mut v = vec![k.zero(); m.cols];
        v[f] = k.one();
        for (i, &c) in pivots.iter().enumerate() {
            v[c] = k.neg(r.get(i, f));
        }
        out.push(v);
    }
    out
}

/// dim ker(d_out) - rank(d_in) for `d_in: C_{j+1} -> C_j`, `d_out: C_j -> C_{j-1}`.
pub fn homology_dim<K: Field>(k: &K, d_in: &Mat<K::Elem>, d_out: &Mat<K::Elem>) -> Result<usize, LinalgError> {
    if d_out.cols != d_in.rows {
        return Err(LinalgError::Shape(format!(
            "d_out has {} columns but d_in has {} rows",
            d_out.cols, d_in.rows
        )));
    }
    if !d_out.mul(k, d_in)?.is_zero(k) {
        return Err(LinalgError::NotComplex);
    }
    Ok(d_out.cols - rank(k, d_out) - rank(k, d_in))
}

/// Incrementally maintained echelon basis of a subspace.
#[derive(Clone, Debug)]
pub struct Echelon<K: Field> {
    rows: Vec<(usize, Vec<K::Elem>)>,
}

impl<K: Field> Default for Echelon<K> {
    fn default() -> Self {
        Echelon { rows: Vec::new() }
    }
}

impl<K: Field> Echelon<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn reduce(&self, k: &K, v: &mut [K::Elem]) {
        for (p, row) in &self.rows {
            if k.is_zero(&v[*p]) {
                continue;
            }
            let f = v[*p].clone();
            for (j, r) in row.iter().enumerate() {
                if !k.is_zero(r) {
                    v[j] = k.sub_mul(&v[j], &f, r);
                }
            }
        }
    }

    /// Add `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, k: &K, v: &[K::Elem]) -> bool {
        let mut w = v.to_vec();
        self.reduce(k, &mut w);
        let Some(p) = w.iter().position(|x| !k.is_zero(x)) else {
            return false;
        };
        let inv = k.inv(&w[p]).expect("nonzero");
        for x in w.iter_mut() {
            *x = k.mul(x, &inv);
        }
        self.rows.push((p, w));
        true
    }

    pub fn contains(&self, k: &K, v: &[K::Elem]) -> bool {
        let mut w = v.to_vec();
        self.reduce(k, &mut w);
        w.iter().all(|x| k.is_zero(x))
    }
}

/// How homology representatives are chosen among the cycles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RepPolicy {
    /// Earliest kernel basis vectors that are independent modulo boundaries.
    #[default]
    First,
    /// Latest kernel basis vectors, each perturbed by a boundary.
    Reverse,
}

/// Cycles representing a basis of ker(d_out)/im(d_in).
pub fn homology_reps<K: Field>(
    k: &K,
    d_in: &Mat<K::Elem>,
    d_out: &Mat<K::Elem>,
    policy: RepPolicy,
) -> Result<Vec<Vec<K::Elem>>, LinalgError> {
    if d_out.cols != d_in.rows {
        return Err(LinalgError::Shape(format!(
            "d_out has {} columns but d_in has {} rows",
            d_out.cols, d_in.rows
        )));
    }
    let n = d_out.cols;
    let mut span = Echelon::<K>::new();
    let image: Vec<Vec<K::Elem>> = (0..d_in.cols).map(|j| d_in.col(j)).collect();
    for c in &image {
        span.insert(k, c);
    }
    let mut ker = kernel_vectors(k, d_out);
    if policy == RepPolicy::Reverse {
        ker.reverse();
    }
    let boundary = image.iter().find(|c| c.iter().any(|x| !k.is_zero(x))).cloned();
    let mut out = Vec::new();
    for v in ker {
        debug_assert_eq!(v.len(), n);
        if span.insert(k, &v) {
            let rep = match (policy, &boundary) {
                (RepPolicy::Reverse, Some(b)) => v.iter().zip(b).map(|(x, y)| k.add(x, y)).collect(),
                _ => v,
            };
            out.push(rep);
        }
    }
    Ok(out)
}

/// Sparse matrix as a list of nonzero triplets.
#[derive(Clone, Debug)]
pub struct SparseMat<E> {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, E)>,
}

impl<E: Clone> SparseMat<E> {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMat { rows, cols, entries: Vec::new() }
    }

    pub fn push(&mut self, i: usize, j: usize, v: E) {
        self.entries.push((i, j, v));
    }

    /// Densify, summing repeated positions.
    pub fn to_dense<K: Field<Elem = E>>(&self, k: &K) -> Mat<E> {
        let mut m = Mat::zeros(k, self.rows, self.cols);
        for (i, j, v) in &self.entries {
            let s = k.add(m.get(*i, *j), v);
            m.set(*i, *j, s);
        }
        m
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Rank computed block by block over the connected components of the
/// row/column incidence graph. Agrees with dense [`rank`].
pub fn rank_sparse<K: Field>(k: &K, m: &SparseMat<K::Elem>) -> usize {
    let mut acc: HashMap<(usize, usize), K::Elem> = HashMap::new();
    for (i, j, v) in &m.entries {
        let e = acc.entry((*i, *j)).or_insert_with(|| k.zero());
        *e = k.add(e, v);
    }
    acc.retain(|_, v| !k.is_zero(v));
    if acc.is_empty() {
        return 0;
    }
    let mut parent: Vec<usize> = (0..m.rows + m.cols).collect();
    for &(i, j) in acc.keys() {
        let a = find(&mut parent, i);
        let b = find(&mut parent, m.rows + j);
        if a != b {
            parent[a] = b;
        }
    }
    // Local row and column positions inside each component.
    let mut comps: HashMap<usize, (usize, usize, Vec<(usize, usize, K::Elem)>)> = HashMap::new();
    let mut local = vec![0usize; m.rows + m.cols];
    for v in 0..m.rows + m.cols {
        let r = find(&mut parent, v);
        let c = comps.entry(r).or_default();
        if v < m.rows {
            local[v] = c.0;
            c.0 += 1;
        } else {
            local[v] = c.1;
            c.1 += 1;
        }
    }
    for ((i, j), v) in acc {
        let r = find(&mut parent, i);
        comps.get_mut(&r).expect("component").2.push((local[i], local[m.rows + j], v));
    }
    let mut total = 0;
    for (nr, nc, entries) in comps.into_values() {
        if entries.is_empty() {
            continue;
        }
        if nr * nc > SPARSE_BLOCK {
            let mut lines: Vec<Vec<(usize, K::Elem)>> = vec![Vec::new(); nr];
            for (a, b, v) in entries {
                lines[a].push((b, v));
            }
            total += sparse_elimination_rank(k, lines);
            continue;
        }
        let mut block = Mat::zeros(k, nr, nc);
        for (a, b, v) in entries {
            block.set(a, b, v);
        }
        total += rank(k, &block);
    }
    total
}

/// Blocks with more entries than this are eliminated in sparse form.
const SPARSE_BLOCK: usize = 1 << 14;

/// Rank of the span of sparse rows by leading-column reduction, shortest rows first.
fn sparse_elimination_rank<K: Field>(k: &K, lines: Vec<Vec<(usize, K::Elem)>>) -> usize {
    sparse_echelon(k, lines).len()
}

/// Echelon form of sparse rows, keyed by leading column; leading entries are 1.
fn sparse_echelon<K: Field>(k: &K, mut lines: Vec<Vec<(usize, K::Elem)>>) -> HashMap<usize, Vec<(usize, K::Elem)>> {
    for l in lines.iter_mut() {
        l.sort_by_key(|(j, _)| *j);
    }
    lines.sort_by_key(|l| l.len());
    let mut pivots: HashMap<usize, Vec<(usize, K::Elem)>> = HashMap::new();
    for mut r in lines {
        while let Some((c, v)) = r.first().cloned() {
            match pivots.get(&c) {
                Some(p) => r = sparse_axpy(k, &r, &v, p),
                None => {
                    let inv = k.inv(&v).expect("nonzero");
                    for e in r.iter_mut() {
                        e.1 = k.mul(&e.1, &inv);
                    }
                    pivots.insert(c, r);
                    break;
                }
            }
        }
    }
    pivots
}

/// Reduced row echelon form of the span of sparse rows (entries in any
/// order, zeros allowed to be absent). Returns the rows sorted by pivot
/// column together with the pivots.
pub fn sparse_rref<K: Field>(k: &K, lines: Vec<Vec<(usize, K::Elem)>>) -> (Vec<Vec<(usize, K::Elem)>>, Vec<usize>) {
    let lines = lines.into_iter().map(|l| l.into_iter().filter(|(_, v)| !k.is_zero(v)).collect()).collect();
    let mut ech = sparse_echelon(k, lines);
    let mut piv: Vec<usize> = ech.keys().copied().collect();
    piv.sort_unstable();
    // Rows with larger pivots are reduced first; reduced rows vanish on
    // every other pivot column, so one pass per row suffices.
    let mut done: HashMap<usize, Vec<(usize, K::Elem)>> = HashMap::with_capacity(piv.len());
    for &c in piv.iter().rev() {
        let mut r = ech.remove(&c).expect("pivot row");
        let hits: Vec<(usize, K::Elem)> = r.iter().skip(1).filter(|(j, _)| done.contains_key(j)).cloned().collect();
        for (j, v) in hits {
            r = sparse_axpy(k, &r, &v, &done[&j]);
        }
        done.insert(c, r);
    }
    let rows = piv.iter().map(|c| done.remove(c).expect("pivot row")).collect();
    (rows, piv)
}

/// `a - f*b` for sorted sparse vectors.
fn sparse_axpy<K: Field>(k: &K, a: &[(usize, K::Elem)], f: &K::Elem, b: &[(usize, K::Elem)]) -> Vec<(usize, K::Elem)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, k.neg(&k.mul(f, &b[j].1))));
            j += 1;
        } else {
            let v = k.sub_mul(&a[i].1, f, &b[j].1);
            if !k.is_zero(&v) {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Homology dimensions of a finite chain complex given by sparse maps.
/// `dims[j]` is the size of term j and `maps[j]` goes from term j+1 to term j.
pub fn complex_homology_sparse<K: Field>(k: &K, dims: &[usize], maps: &[SparseMat<K::Elem>]) -> Vec<usize> {
    assert_eq!(maps.len() + 1, dims.len().max(1));
    let ranks: Vec<usize> = maps.iter().map(|m| rank_sparse(k, m)).collect();
    (0..dims.len())
        .map(|j| {
            let out = if j > 0 { ranks[j - 1] } else { 0 };
            let inn = if j < maps.len() { ranks[j] } else { 0 };
            dims[j] - out - inn
        })
        .collect()
}

/// Column-sparse matrix; `cols[j]` lists the nonzero entries of column j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColMat<E> {
    pub rows: usize,
    pub cols: Vec<Vec<(usize, E)>>,
}

impl<E: Clone> ColMat<E> {
    pub fn zeros(rows: usize, ncols: usize) -> Self {
        ColMat { rows, cols: vec![Vec::new(); ncols] }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    pub fn to_sparse(&self) -> SparseMat<E> {
        let mut s = SparseMat::new(self.rows, self.cols.len());
        for (j, c) in self.cols.iter().enumerate() {
            for (i, v) in c {
                s.push(*i, j, v.clone());
            }
        }
        s
    }

    pub fn to_dense<K: Field<Elem = E>>(&self, k: &K) -> Mat<E> {
        self.to_sparse().to_dense(k)
    }

    pub fn from_dense<K: Field<Elem = E>>(k: &K, m: &Mat<E>) -> Self {
        let cols = (0..m.cols())
            .map(|j| (0..m.rows()).filter(|&i| !k.is_zero(m.get(i, j))).map(|i| (i, m.get(i, j).clone())).collect())
            .collect();
        ColMat { rows: m.rows(), cols }
    }

    /// Apply to a sparse vector.
    pub fn apply<K: Field<Elem = E>>(&self, k: &K, v: &[(usize, E)]) -> Vec<(usize, E)> {
        let mut acc: HashMap<usize, E> = HashMap::new();
        for (j, x) in v {
            for (i, y) in &self.cols[*j] {
                let e = acc.entry(*i).or_insert_with(|| k.zero());
                *e = k.add(e, &k.mul(x, y));
            }
        }
        let mut out: Vec<(usize, E)> = acc.into_iter().filter(|(_, v)| !k.is_zero(v)).collect();
        out.sort_by_key(|(i, _)| *i);
        out
    }

    /// `self * other`.
    pub fn compose<K: Field<Elem = E>>(&self, k: &K, other: &ColMat<E>) -> Result<ColMat<E>, LinalgError> {
        if other.rows != self.cols.len() {
            return Err(LinalgError::Shape(format!(
                "compose {}x{} after {}x{}",
                self.rows,
                self.cols.len(),
                other.rows,
                other.cols.len()
            )));
        }
        Ok(ColMat { rows: self.rows, cols: other.cols.iter().map(|c| self.apply(k, c)).collect() })
    }

    pub fn is_zero<K: Field<Elem = E>>(&self, k: &K) -> bool {
        self.cols.iter().all(|c| c.iter().all(|(_, v)| k.is_zero(v)))
    }

    pub fn rank<K: Field<Elem = E>>(&self, k: &K) -> usize {
        rank_sparse(k, &self.to_sparse())
    }
}

/// Render a field element as a small signed integer when possible.
pub fn display_signed<K: Field>(k: &K, a: &K::Elem) -> String {
    for v in 0..1000i64 {
        if k.from_i64(v) == *a {
            return v.to_string();
        }
        if k.from_i64(-v) == *a {
            return (-v).to_string();
        }
    }
    a.to_string()
}
