//! The Koszul resolution of the diagonal over R = S'[Eff(X)], realized one
//! bidegree at a time.
//!
//! A generator (a, I) stands for u^a e_I, a free S'-summand S'(a, -a-b) with
//! b = deg x_I and homological degree #I. The differential is the Koszul
//! differential on g_j = y_j - x_j u_j:
//!
//!   u^a e_I -> sum_p (-1)^p (y_j u^a - x_j u^{a + deg x_j}) e_{I - j},  j = I[p].

use crate::linalg::{complex_homology_sparse, display_signed, ColMat, Field, SparseMat};
use crate::par;
use crate::smodule::{monomial_basis, Mono};
use crate::toric::{Degree, ToricError, ToricStack, Window};
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DiagError {
    #[error("the finite subcomplex needs a Z-graded stack, got rank {0}")]
    NotZGraded(usize),
    #[error("generator list is not closed under the differential: {0} is missing")]
    NotSubcomplex(String),
    #[error(transparent)]
    Toric(#[from] ToricError),
}

/// A degree of S' = k[x; y], graded by Cl(X) + Cl(X).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BiDegree {
    pub x: Degree,
    pub y: Degree,
}

impl BiDegree {
    pub fn new(x: Degree, y: Degree) -> Self {
        BiDegree { x, y }
    }
}

impl fmt::Display for BiDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl std::ops::Add for &BiDegree {
    type Output = BiDegree;
    fn add(self, o: &BiDegree) -> BiDegree {
        BiDegree::new(&self.x + &o.x, &self.y + &o.y)
    }
}

impl std::ops::Sub for &BiDegree {
    type Output = BiDegree;
    fn sub(self, o: &BiDegree) -> BiDegree {
        BiDegree::new(&self.x - &o.x, &self.y - &o.y)
    }
}

/// A box of bidegrees: one window per factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiWindow {
    pub x: Window,
    pub y: Window,
}

impl BiWindow {
    pub fn new(x: Window, y: Window) -> Self {
        BiWindow { x, y }
    }

    /// The same window on both factors.
    pub fn square(w: Window) -> Self {
        BiWindow { x: w.clone(), y: w }
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty() || self.y.is_empty()
    }

    pub fn points(&self) -> Vec<BiDegree> {
        if self.is_empty() {
            return Vec::new();
        }
        let ys = self.y.points();
        let mut out = Vec::new();
        for a in self.x.points() {
            for b in &ys {
                out.push(BiDegree::new(a.clone(), b.clone()));
            }
        }
        out
    }
}

/// u^a e_I, with I given as a bit mask.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DiagGen {
    pub a: Degree,
    pub mask: u64,
}

impl DiagGen {
    pub fn new(a: Degree, set: &[usize]) -> Self {
        DiagGen { a, mask: set.iter().fold(0, |m, &i| m | 1 << i) }
    }

    pub fn i(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn set(&self) -> Vec<usize> {
        (0..64).filter(|j| self.mask >> j & 1 == 1).collect()
    }
}

/// One entry c * x^p y^q of the differential, into generator `row` of the
/// previous term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagEntry<E> {
    pub row: usize,
    pub coeff: E,
    pub xm: Mono,
    pub ym: Mono,
}

/// A complex of free S'-modules F_0 <- F_1 <- ... spanned by Koszul generators.
/// `d[i][t]` is the image of generator t of F_i, for i >= 1.
#[derive(Clone, Debug)]
pub struct DiagComplex<K: Field> {
    pub k: K,
    pub x: ToricStack,
    pub terms: Vec<Vec<DiagGen>>,
    pub d: Vec<Vec<Vec<DiagEntry<K::Elem>>>>,
}

fn unit(n: usize, j: usize) -> Mono {
    let mut m = vec![0; n];
    m[j] = 1;
    m
}

/// Lattice points of the semigroup spanned by the cone generators with
/// theta at most `bound`.
pub fn eff_points(x: &ToricStack, bound: i64) -> Vec<Degree> {
    let mut seen: BTreeSet<Degree> = BTreeSet::new();
    let mut stack = vec![Degree::zero(x.r)];
    while let Some(d) = stack.pop() {
        if x.theta_of(&d) > bound || !seen.insert(d.clone()) {
            continue;
        }
        for g in &x.eff.generators {
            stack.push(&d + g);
        }
    }
    seen.into_iter().collect()
}

impl<K: Field> DiagComplex<K> {
    /// The Koszul differential restricted to `gens`, which must be closed
    /// under it. Generators keep their given order within each term.
    pub fn koszul(k: &K, x: &ToricStack, gens: Vec<DiagGen>) -> Result<Self, DiagError> {
        let nv = x.nvars();
        let top = gens.iter().map(|g| g.i()).max().unwrap_or(0);
        let mut terms: Vec<Vec<DiagGen>> = vec![Vec::new(); if gens.is_empty() { 0 } else { top + 1 }];
        for g in gens {
            let i = g.i();
            terms[i].push(g);
        }
        let mut d = vec![Vec::new()];
        for i in 1..terms.len() {
            let index: HashMap<&DiagGen, usize> = terms[i - 1].iter().enumerate().map(|(s, g)| (g, s)).collect();
            let find = |g: &DiagGen| {
                index.get(g).copied().ok_or_else(|| DiagError::NotSubcomplex(format!("u^{} e{:?}", g.a, g.set())))
            };
            let mut cols = Vec::new();
            for g in &terms[i] {
                let mut col = Vec::new();
                for (p, j) in g.set().into_iter().enumerate() {
                    let sign = if p % 2 == 0 { k.one() } else { k.neg(&k.one()) };
                    let rest = g.mask & !(1 << j);
                    let same = find(&DiagGen { a: g.a.clone(), mask: rest })?;
                    col.push(DiagEntry { row: same, coeff: sign.clone(), xm: vec![0; nv], ym: unit(nv, j) });
                    let up = find(&DiagGen { a: &g.a + &x.var_degrees[j], mask: rest })?;
                    col.push(DiagEntry { row: up, coeff: k.neg(&sign), xm: unit(nv, j), ym: vec![0; nv] });
                }
                cols.push(col);
            }
            d.push(cols);
        }
        Ok(DiagComplex { k: k.clone(), x: x.clone(), terms, d })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.iter().all(|t| t.is_empty())
    }

    /// b = deg x_I of a generator.
    pub fn b(&self, g: &DiagGen) -> Degree {
        self.x.mask_degree(g.mask)
    }

    /// The twists (a, -a-b) of the summands S'(a, -a-b) of F_i.
    pub fn summands(&self, i: usize) -> Vec<BiDegree> {
        self.terms.get(i).map_or(Vec::new(), |t| {
            t.iter().map(|g| BiDegree::new(g.a.clone(), -(&g.a + &self.b(g)))).collect()
        })
    }

    /// Basis of F_i in bidegree `e`: (generator, x-monomial, y-monomial).
    fn basis(&self, i: usize, e: &BiDegree) -> Vec<(usize, Mono, Mono)> {
        let mut out = Vec::new();
        for (t, g) in self.terms[i].iter().enumerate() {
            let xs = monomial_basis(&self.x, &(&e.x + &g.a));
            if xs.is_empty() {
                continue;
            }
            let ys = monomial_basis(&self.x, &(&e.y - &(&g.a + &self.b(g))));
            for p in &xs {
                for q in &ys {
                    out.push((t, p.clone(), q.clone()));
                }
            }
        }
        out
    }

    /// Term dimensions and the maps F_{i+1} -> F_i in bidegree `e`.
    pub fn strand(&self, e: &BiDegree) -> (Vec<usize>, Vec<SparseMat<K::Elem>>) {
        let bases: Vec<Vec<(usize, Mono, Mono)>> = (0..self.len()).map(|i| self.basis(i, e)).collect();
        let mut maps = Vec::new();
        for i in 1..self.len() {
            let index: HashMap<(usize, &Mono, &Mono), usize> =
                bases[i - 1].iter().enumerate().map(|(r, (s, p, q))| ((*s, p, q), r)).collect();
            let mut m = SparseMat::new(bases[i - 1].len(), bases[i].len());
            for (c, (t, p, q)) in bases[i].iter().enumerate() {
                for ent in &self.d[i][*t] {
                    let p2: Mono = p.iter().zip(&ent.xm).map(|(a, b)| a + b).collect();
                    let q2: Mono = q.iter().zip(&ent.ym).map(|(a, b)| a + b).collect();
                    let r = index[&(ent.row, &p2, &q2)];
                    m.push(r, c, ent.coeff.clone());
                }
            }
            maps.push(m);
        }
        (bases.iter().map(|b| b.len()).collect(), maps)
    }

    /// d^2 = 0 at every bidegree of `win`.
    pub fn check_square_zero(&self, win: &BiWindow) -> bool {
        let pts = win.points();
        par::map(&pts, |e| first_nonzero_square(&self.k, &self.strand(e).1).is_none()).into_iter().all(|ok| ok)
    }

    /// Polynomial entries of F_i -> F_{i-1}, rows indexed by F_{i-1}.
    pub fn entry_matrix(&self, i: usize) -> Vec<Vec<String>> {
        let mut out = vec![vec!["0".to_string(); self.terms[i].len()]; self.terms[i - 1].len()];
        for (t, col) in self.d[i].iter().enumerate() {
            for ent in col {
                out[ent.row][t] = self.render(ent);
            }
        }
        out
    }

    fn render(&self, ent: &DiagEntry<K::Elem>) -> String {
        let mut vars = Vec::new();
        for (name, m) in [("x", &ent.xm), ("y", &ent.ym)] {
            for (j, &e) in m.iter().enumerate() {
                match e {
                    0 => {}
                    1 => vars.push(format!("{name}{j}")),
                    _ => vars.push(format!("{name}{j}^{e}")),
                }
            }
        }
        let c = display_signed(&self.k, &ent.coeff);
        let mono = vars.join("*");
        match (c.as_str(), mono.is_empty()) {
            (_, true) => c,
            ("1", false) => mono,
            ("-1", false) => format!("-{mono}"),
            _ => format!("{c}*{mono}"),
        }
    }
}

/// The first i with d_i d_{i+1} != 0, with maps[i-1] = d_i.
fn first_nonzero_square<K: Field>(k: &K, maps: &[SparseMat<K::Elem>]) -> Option<usize> {
    (1..maps.len()).find(|&i| !to_colmat(&maps[i - 1]).compose(k, &to_colmat(&maps[i])).expect("shapes").is_zero(k))
}

fn to_colmat<E: Clone>(m: &SparseMat<E>) -> ColMat<E> {
    let mut c = ColMat::zeros(m.rows, m.cols);
    for (i, j, v) in &m.entries {
        c.cols[*j].push((*i, v.clone()));
    }
    c
}

/// The full resolution F, keeping every generator that meets `win`.
pub fn build_f<K: Field>(k: &K, x: &ToricStack, win: &BiWindow) -> Result<DiagComplex<K>, DiagError> {
    if win.is_empty() {
        return Ok(DiagComplex { k: k.clone(), x: x.clone(), terms: Vec::new(), d: Vec::new() });
    }
    // a + b must stay below the largest y-degree, and x-degree + a must be effective.
    let top = win.y.points().iter().map(|e| x.theta_of(e)).max().unwrap_or(0);
    let floor = win.x.points().iter().map(|e| x.theta_of(e)).min().unwrap_or(0);
    let sums = x.subset_sums();
    let mut gens = Vec::new();
    for a in eff_points(x, top) {
        for (mask, b) in sums.iter().enumerate() {
            if x.theta_of(&a) + x.theta_of(b) <= top && x.theta_of(&a) + floor.max(-x.theta_of(&a)) >= 0 {
                gens.push(DiagGen { a: a.clone(), mask: mask as u64 });
            }
        }
    }
    gens.sort_by(|g, h| {
        let tg = x.theta_of(&g.a) + x.theta_of(&x.mask_degree(g.mask));
        let th = x.theta_of(&h.a) + x.theta_of(&x.mask_degree(h.mask));
        tg.cmp(&th).then_with(|| g.cmp(h))
    });
    DiagComplex::koszul(k, x, gens)
}

/// The finite subcomplex with a + b < w on a weighted projective stack.
pub fn build_f_prime_weighted<K: Field>(k: &K, x: &ToricStack) -> Result<DiagComplex<K>, DiagError> {
    if x.r != 1 {
        return Err(DiagError::NotZGraded(x.r));
    }
    let w = x.weights_zgraded()?.w;
    let mut gens = Vec::new();
    for a in eff_points(x, w - 1) {
        for mask in 0..1u64 << x.nvars() {
            if a.0[0] + x.mask_degree(mask).0[0] < w {
                gens.push(DiagGen { a: a.clone(), mask });
            }
        }
    }
    gens.sort_by(|g, h| {
        let tg = g.a.0[0] + x.mask_degree(g.mask).0[0];
        let th = h.a.0[0] + x.mask_degree(h.mask).0[0];
        tg.cmp(&th).then_with(|| g.cmp(h))
    });
    DiagComplex::koszul(k, x, gens)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AcyclicityFailure {
    NotComplex { at: BiDegree, i: usize },
    Homology { at: BiDegree, i: usize, dim: usize },
}

impl fmt::Display for AcyclicityFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AcyclicityFailure::NotComplex { at, i } => write!(f, "d_{i} d_{} != 0 at {at}", i + 1),
            AcyclicityFailure::Homology { at, i, dim } => write!(f, "H_{i} has dimension {dim} at {at}"),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct AcyclicityReport {
    pub checked: usize,
    pub failures: Vec<AcyclicityFailure>,
    /// H_0 dimension at each checked bidegree.
    pub h0: Vec<(BiDegree, usize)>,
}

impl AcyclicityReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// H_i = 0 for i > 0 at every bidegree of `win`.
pub fn check_acyclicity<K: Field>(c: &DiagComplex<K>, win: &BiWindow) -> AcyclicityReport {
    let pts = win.points();
    let per = par::map(&pts, |e| {
        let (dims, maps) = c.strand(e);
        if let Some(i) = first_nonzero_square(&c.k, &maps) {
            return (Some(AcyclicityFailure::NotComplex { at: e.clone(), i }), Vec::new());
        }
        (None, if dims.is_empty() { vec![0] } else { complex_homology_sparse(&c.k, &dims, &maps) })
    });
    let mut rep = AcyclicityReport { checked: pts.len(), ..Default::default() };
    for (e, (bad, h)) in pts.iter().zip(per) {
        if let Some(f) = bad {
            rep.failures.push(f);
            continue;
        }
        rep.h0.push((e.clone(), h[0]));
        for (i, &dim) in h.iter().enumerate().skip(1) {
            if dim != 0 {
                rep.failures.push(AcyclicityFailure::Homology { at: e.clone(), i, dim });
            }
        }
    }
    rep
}

#[derive(Clone, Debug, Default)]
pub struct H0Report {
    pub checked: usize,
    /// (bidegree, dim H_0, dim S_{d+d'})
    pub mismatches: Vec<(BiDegree, usize, usize)>,
}

impl H0Report {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// dim H_0 at (d, d') equals dim S_{d+d'} for every bidegree of `win` with
/// d' effective. Other bidegrees are skipped.
pub fn check_h0_diagonal<K: Field>(c: &DiagComplex<K>, win: &BiWindow) -> H0Report {
    let pts: Vec<BiDegree> = win.points().into_iter().filter(|e| c.x.cone_contains(&e.y)).collect();
    let got = par::map(&pts, |e| {
        let (dims, maps) = c.strand(e);
        match dims.len() {
            0 => 0,
            _ => complex_homology_sparse(&c.k, &dims, &maps)[0],
        }
    });
    h0_against_diagonal(&c.x, pts.iter().zip(got))
}

/// Compares H_0 dimensions with dim S_{d+d'}, skipping d' outside Eff.
fn h0_against_diagonal<D, I>(x: &ToricStack, h0: I) -> H0Report
where
    D: std::borrow::Borrow<BiDegree>,
    I: IntoIterator<Item = (D, usize)>,
{
    let mut rep = H0Report::default();
    for (e, h) in h0 {
        let e = e.borrow();
        if !x.cone_contains(&e.y) {
            continue;
        }
        rep.checked += 1;
        let want = monomial_basis(x, &(&e.x + &e.y)).len();
        if h != want {
            rep.mismatches.push((e.clone(), h, want));
        }
    }
    rep
}

/// F'_1 -> F'_0 for the Hirzebruch surface of type 1, as printed.
pub const HIRZEBRUCH1_MATRIX: [[&str; 10]; 5] = [
    ["y0", "y1", "y2", "y3", "0", "0", "0", "0", "0", "0"],
    ["-x0", "0", "-x2", "0", "0", "0", "y1", "0", "0", "y3"],
    ["0", "-x1", "0", "0", "y0", "0", "0", "y2", "0", "0"],
    ["0", "0", "0", "-x3", "-x0", "y0", "-x1", "-x2", "y2", "0"],
    ["0", "0", "0", "0", "0", "-x0", "0", "0", "-x2", "-x3"],
];

/// Generators of F' on the Hirzebruch surface of type 1, in the printed
/// order. F'_2 is spanned by g0g1, g0g3, g1g2, g2g3 and u1 g0g2.
pub fn hirzebruch1_generators() -> Vec<DiagGen> {
    let z = Degree(vec![0, 0]);
    let f = Degree(vec![1, 0]);
    let s = Degree(vec![-1, 1]);
    let fs = Degree(vec![0, 1]);
    let ffs = Degree(vec![1, 1]);
    vec![
        DiagGen::new(z.clone(), &[]),
        DiagGen::new(f.clone(), &[]),
        DiagGen::new(s.clone(), &[]),
        DiagGen::new(fs.clone(), &[]),
        DiagGen::new(ffs.clone(), &[]),
        DiagGen::new(z.clone(), &[0]),
        DiagGen::new(z.clone(), &[1]),
        DiagGen::new(z.clone(), &[2]),
        DiagGen::new(z.clone(), &[3]),
        DiagGen::new(s.clone(), &[0]),
        DiagGen::new(fs.clone(), &[0]),
        DiagGen::new(f.clone(), &[1]),
        DiagGen::new(s.clone(), &[2]),
        DiagGen::new(fs.clone(), &[2]),
        DiagGen::new(f.clone(), &[3]),
        DiagGen::new(z.clone(), &[0, 1]),
        DiagGen::new(z.clone(), &[0, 3]),
        DiagGen::new(z.clone(), &[1, 2]),
        DiagGen::new(z, &[2, 3]),
        DiagGen::new(s, &[0, 2]),
    ]
}

#[derive(Clone, Debug)]
pub struct HirzebruchReport {
    pub matrix_matches: bool,
    pub square_zero: bool,
    pub acyclic: AcyclicityReport,
    pub h0: H0Report,
}

impl HirzebruchReport {
    pub fn ok(&self) -> bool {
        self.matrix_matches && self.square_zero && self.acyclic.ok() && self.h0.ok()
    }
}

/// Builds F' on the Hirzebruch surface of type 1 and checks it: the printed
/// matrix, d^2 = 0 and acyclicity on [0,4]^2 x [0,4]^2, and H_0 against
/// dim S_{d+d'} on [2,4]^2 x [2,4]^2.
pub fn hirzebruch1_example<K: Field>(k: &K) -> Result<(DiagComplex<K>, HirzebruchReport), DiagError> {
    let x = ToricStack::hirzebruch(1);
    let c = DiagComplex::koszul(k, &x, hirzebruch1_generators())?;
    let printed: Vec<Vec<String>> = HIRZEBRUCH1_MATRIX.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect();
    let matrix_matches = c.entry_matrix(1) == printed;
    let win = BiWindow::square(Window::new(vec![0, 0], vec![4, 4])?);
    let deep = BiWindow::square(Window::new(vec![2, 2], vec![4, 4])?);
    let acyclic = check_acyclicity(&c, &win);
    let square_zero = !acyclic.failures.iter().any(|f| matches!(f, AcyclicityFailure::NotComplex { .. }));
    let h0 = h0_against_diagonal(&c.x, acyclic.h0.iter().filter(|(e, _)| deep.x.contains(&e.x) && deep.y.contains(&e.y)).map(|(e, h)| (e, *h)));
    Ok((c, HirzebruchReport { matrix_matches, square_zero, acyclic, h0 }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{PrimeField, Rationals};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn k() -> PrimeField {
        PrimeField::default()
    }

    fn sq(lo: i64, hi: i64) -> BiWindow {
        BiWindow::square(Window::interval(lo, hi))
    }

    fn p(w: &[i64]) -> ToricStack {
        ToricStack::weighted_projective(w).unwrap()
    }

    #[test]
    fn f_one_on_p12() {
        let x = p(&[1, 2]);
        let f = build_f(&k(), &x, &sq(0, 6)).unwrap();
        let s = f.summands(1);
        for (a, b) in [(0, -2), (0, -1), (1, -3), (1, -2)] {
            assert!(s.contains(&BiDegree::new(Degree::from(a), Degree::from(b))), "{a} {b}");
        }
        assert!(build_f(&k(), &x, &BiWindow::square(Window::empty(1))).unwrap().is_empty());
    }

    #[test]
    fn f_prime_shapes() {
        let f = build_f_prime_weighted(&k(), &p(&[1, 1])).unwrap();
        assert_eq!(f.len(), 2);
        let z = |a: i64, b: i64| BiDegree::new(Degree::from(a), Degree::from(b));
        assert_eq!(f.summands(0), vec![z(0, 0), z(1, -1)]);
        assert_eq!(f.summands(1), vec![z(0, -1), z(0, -1)]);
        // P^2: strands a + b = 0, 1, 2.
        let f = build_f_prime_weighted(&k(), &p(&[1, 1, 1])).unwrap();
        let strands: BTreeSet<i64> = f.terms.iter().flatten().map(|g| g.a.0[0] + g.i() as i64).collect();
        assert_eq!(strands, BTreeSet::from([0, 1, 2]));
        assert!(matches!(build_f_prime_weighted(&k(), &ToricStack::p1xp1()), Err(DiagError::NotZGraded(2))));
    }

    #[test]
    fn koszul_term_counts() {
        let x = p(&[1, 2, 3]);
        let f = build_f(&k(), &x, &sq(0, 12)).unwrap();
        let binom = [1, 3, 3, 1];
        for i in 0..f.len() {
            let at_zero = f.terms[i].iter().filter(|g| g.a.is_zero()).count();
            assert_eq!(at_zero, binom[i]);
        }
    }

    #[test]
    fn f_acyclic_on_p1() {
        let x = p(&[1, 1]);
        let win = sq(0, 6);
        let f = build_f(&k(), &x, &win).unwrap();
        assert!(check_acyclicity(&f, &win).ok());
        assert!(check_h0_diagonal(&f, &win).ok());
    }

    #[test]
    fn f_prime_on_p12() {
        let x = p(&[1, 2]);
        let win = sq(0, 6);
        let fp = build_f_prime_weighted(&k(), &x).unwrap();
        let rep = check_acyclicity(&fp, &win);
        assert!(rep.ok(), "{:?}", rep.failures);
        assert_eq!(rep.checked, 49);
        let h0 = check_h0_diagonal(&fp, &win);
        assert!(h0.ok(), "{:?}", h0.mismatches);
        let at = BiDegree::new(Degree::from(2), Degree::from(3));
        assert_eq!(rep.h0.iter().find(|(e, _)| *e == at).unwrap().1, 3);
        let origin = BiDegree::new(Degree::from(0), Degree::from(0));
        assert_eq!(rep.h0.iter().find(|(e, _)| *e == origin).unwrap().1, 1);
        // The full F agrees with F' here.
        let f = build_f(&k(), &x, &win).unwrap();
        let full = check_acyclicity(&f, &win);
        assert!(full.ok());
        assert_eq!(full.h0, rep.h0);
    }

    #[test]
    fn h0_skips_ineffective() {
        let x = p(&[1, 2]);
        let fp = build_f_prime_weighted(&k(), &x).unwrap();
        let h0 = check_h0_diagonal(&fp, &sq(-3, -1));
        assert_eq!(h0.checked, 0);
    }

    #[test]
    fn perturbation_is_caught() {
        // Dropping the image of one generator either breaks d^2 = 0 or
        // leaves that generator as a cycle nothing can bound.
        let win = sq(0, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for x in [p(&[1, 2]), p(&[1, 1, 2])] {
            let base = build_f_prime_weighted(&k(), &x).unwrap();
            let mut c = base.clone();
            let i = rng.gen_range(1..c.len());
            let t = rng.gen_range(0..c.d[i].len());
            c.d[i][t].clear();
            let rep = check_acyclicity(&c, &win);
            assert!(!rep.ok(), "dropping ({i},{t}) went unnoticed");
            assert!(check_acyclicity(&base, &win).ok());
            let at = match &rep.failures[0] {
                AcyclicityFailure::NotComplex { at, .. } | AcyclicityFailure::Homology { at, .. } => at.clone(),
            };
            assert!(win.x.contains(&at.x) && win.y.contains(&at.y));
        }
    }

    #[test]
    fn open_lists_are_rejected() {
        let x = p(&[1, 1]);
        let gens = vec![DiagGen::new(Degree::from(0), &[]), DiagGen::new(Degree::from(0), &[0])];
        assert!(matches!(DiagComplex::koszul(&k(), &x, gens), Err(DiagError::NotSubcomplex(_))));
    }

    #[test]
    fn hirzebruch_one() {
        let (c, rep) = hirzebruch1_example(&k()).unwrap();
        assert_eq!(c.terms.iter().map(|t| t.len()).collect::<Vec<_>>(), vec![5, 10, 5]);
        assert!(rep.matrix_matches, "{:?}", c.entry_matrix(1));
        assert!(rep.square_zero);
        assert_eq!(rep.acyclic.checked, 625);
        assert!(rep.acyclic.ok(), "{:?}", rep.acyclic.failures);
        assert!(rep.h0.ok(), "{:?}", rep.h0.mismatches);
        let (_, rq) = hirzebruch1_example(&Rationals).unwrap();
        assert!(rq.ok());
        assert_eq!(rq.acyclic.h0, rep.acyclic.h0);
    }
}
