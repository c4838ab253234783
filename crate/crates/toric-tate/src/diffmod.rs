//! Free differential E-modules on windows: column homology, cones,
//! restriction to E_I, minimization and fold/unfold.

use crate::exterior::{ExtElem, ExtMonomial, FreeEModule, OmegaTwist, SubsetTable};
use crate::linalg::{complex_homology_sparse, ColMat, Field, Mat};
use crate::toric::{Degree, ToricStack, Window};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiffModError {
    #[error("column {0} lies outside the safe region of the window")]
    NotSafe(Degree),
    #[error("entry ({0},{1}) has the wrong degree for a differential")]
    EntryDegree(usize, usize),
    #[error("morphism does not commute with the differentials")]
    NotMorphism,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("fold and unfold need the standard grading")]
    NonStandard,
    #[error("differential does not square to zero")]
    NotSquareZero,
}

pub type EMatrix<E> = Vec<BTreeMap<usize, ExtElem<E>>>;

/// A free differential module ⊕ ω_E(c_s; u_s) with differential Φ acting
/// on coefficient columns: ∂(g_t y) = Σ_s g_s (Φ_st y).
///
/// `window` bounds the Cl-degrees of generator tops on which the generator
/// list is complete; homology is only meaningful on its safe region.
#[derive(Clone, Debug)]
pub struct FreeDiffModule<K: Field> {
    pub k: K,
    pub x: ToricStack,
    pub gens: Vec<OmegaTwist>,
    /// Free-flag round or other bookkeeping level per generator.
    pub level: Vec<i64>,
    /// `cols[t][s]` is Φ_st.
    pub cols: EMatrix<K::Elem>,
    pub window: Window,
    /// Exterior variables present; all of them except after [`FreeDiffModule::tensor_ei`].
    pub vars: u64,
}

/// One Cl-degree column: per auxiliary degree a basis of (generator,
/// monomial) pairs and the maps lowering the auxiliary degree by one.
#[derive(Clone, Debug)]
pub struct Column<E> {
    pub basis: BTreeMap<i64, Vec<(usize, ExtMonomial)>>,
    /// `maps[l]` goes from aux level l to l - 1.
    pub maps: BTreeMap<i64, ColMat<E>>,
}

impl<E: Clone> Column<E> {
    pub fn dim(&self, l: i64) -> usize {
        self.basis.get(&l).map_or(0, |v| v.len())
    }

    pub fn map(&self, l: i64) -> ColMat<E> {
        self.maps.get(&l).cloned().unwrap_or_else(|| ColMat::zeros(self.dim(l - 1), self.dim(l)))
    }

    pub fn aux_range(&self) -> Option<(i64, i64)> {
        Some((*self.basis.keys().next()?, *self.basis.keys().next_back()?))
    }
}

impl<K: Field> FreeDiffModule<K> {
    /// The module with zero differential.
    pub fn new(k: &K, x: &ToricStack, gens: Vec<OmegaTwist>, window: Window) -> Self {
        let n = gens.len();
        FreeDiffModule {
            k: k.clone(),
            x: x.clone(),
            gens,
            level: vec![0; n],
            cols: vec![BTreeMap::new(); n],
            window,
            vars: (1u64 << x.nvars()) - 1,
        }
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn free_module(&self) -> FreeEModule {
        FreeEModule::new(self.gens.clone())
    }

    pub fn entry(&self, s: usize, t: usize) -> Option<&ExtElem<K::Elem>> {
        self.cols[t].get(&s)
    }

    /// Φ_st += e.
    pub fn add_entry(&mut self, s: usize, t: usize, e: &ExtElem<K::Elem>) {
        let cur = self.cols[t].remove(&s).unwrap_or_default();
        let v = cur.add(&self.k, e);
        if !v.is_zero() {
            self.cols[t].insert(s, v);
        }
    }

    /// Whether every monomial of Φ_st has degree c_t - c_s and length u_t + 1 - u_s.
    pub fn entry_degree_ok(&self, s: usize, t: usize, e: &ExtElem<K::Elem>) -> bool {
        let want_cl = &self.gens[t].c - &self.gens[s].c;
        let want_len = self.gens[t].u + 1 - self.gens[s].u;
        e.terms.iter().all(|(m, _)| m.len() as i64 == want_len && self.x.mask_degree(m.0) == want_cl)
    }

    pub fn validate(&self) -> Result<(), DiffModError> {
        for (t, col) in self.cols.iter().enumerate() {
            for (s, e) in col {
                if !self.entry_degree_ok(*s, t, e) {
                    return Err(DiffModError::EntryDegree(*s, t));
                }
            }
        }
        Ok(())
    }

    /// Φ · Ψ for E-matrices given by columns.
    fn emat_mul(k: &K, phi: &EMatrix<K::Elem>, psi: &EMatrix<K::Elem>) -> EMatrix<K::Elem> {
        psi.iter()
            .map(|col| {
                let mut out: BTreeMap<usize, ExtElem<K::Elem>> = BTreeMap::new();
                for (l, b) in col {
                    for (i, a) in &phi[*l] {
                        let p = a.mul(k, b);
                        if p.is_zero() {
                            continue;
                        }
                        let cur = out.remove(i).unwrap_or_default();
                        let v = cur.add(k, &p);
                        if !v.is_zero() {
                            out.insert(*i, v);
                        }
                    }
                }
                out
            })
            .collect()
    }

    pub fn check_square_zero(&self) -> bool {
        Self::emat_mul(&self.k, &self.cols, &self.cols).iter().all(|c| c.is_empty())
    }

    /// d^2 = 0 on the listed columns.
    pub fn check_square_zero_on(&self, bs: &[Degree]) -> bool {
        let tops = self.tops();
        let table = SubsetTable::new(&self.x, self.vars);
        crate::par::map(bs, |b| {
            let c = self.column_with(b, &tops, &table);
            c.maps.keys().all(|&l| c.map(l - 1).compose(&self.k, &c.map(l)).map(|m| m.is_zero(&self.k)).unwrap_or(false))
        })
        .into_iter()
        .all(|ok| ok)
    }

    pub fn is_safe(&self, b: &Degree) -> bool {
        self.window.contains(b)
            && SubsetTable::new(&self.x, self.vars).by_degree.iter().all(|(s, _)| self.window.contains(&(b + s)))
    }

    pub fn safe_columns(&self) -> Vec<Degree> {
        self.window.points().into_iter().filter(|b| self.is_safe(b)).collect()
    }

    /// Generators grouped by the Cl-degree of their top.
    fn tops(&self) -> HashMap<Degree, Vec<usize>> {
        let w = self.x.w();
        let mut by: HashMap<Degree, Vec<usize>> = HashMap::new();
        for (t, g) in self.gens.iter().enumerate() {
            by.entry(&w - &g.c).or_default().push(t);
        }
        by
    }

    /// The column at Cl-degree `b` as a finite complex over k.
    pub fn column(&self, b: &Degree) -> Column<K::Elem> {
        let tops = self.tops();
        let table = SubsetTable::new(&self.x, self.vars);
        self.column_with(b, &tops, &table)
    }

    fn column_with(&self, b: &Degree, tops: &HashMap<Degree, Vec<usize>>, table: &SubsetTable) -> Column<K::Elem> {
        let n1 = self.x.nvars() as i64;
        let mut elems: Vec<(usize, ExtMonomial)> = Vec::new();
        for (sdeg, masks) in &table.by_degree {
            if let Some(ts) = tops.get(&(b + sdeg)) {
                for &t in ts {
                    for &m in masks {
                        elems.push((t, m));
                    }
                }
            }
        }
        elems.sort();
        let mut basis: BTreeMap<i64, Vec<(usize, ExtMonomial)>> = BTreeMap::new();
        for (t, m) in elems {
            basis.entry(n1 - self.gens[t].u - m.len() as i64).or_default().push((t, m));
        }
        let index: HashMap<(usize, ExtMonomial), usize> =
            basis.values().flat_map(|v| v.iter().enumerate().map(|(i, e)| (*e, i))).collect();
        let mut maps = BTreeMap::new();
        for (&l, elems) in &basis {
            let rows = basis.get(&(l - 1)).map_or(0, |v| v.len());
            let cols = elems
                .iter()
                .map(|(t, m)| {
                    let mut acc: BTreeMap<usize, K::Elem> = BTreeMap::new();
                    for (s, phi) in &self.cols[*t] {
                        for (p, c) in phi.restrict(self.vars).mul_mono_right(&self.k, *m) {
                            let row = index[&(*s, p)];
                            let e = acc.entry(row).or_insert_with(|| self.k.zero());
                            *e = self.k.add(e, &c);
                        }
                    }
                    acc.into_iter().filter(|(_, v)| !self.k.is_zero(v)).collect()
                })
                .collect();
            maps.insert(l, ColMat { rows, cols });
        }
        Column { basis, maps }
    }

    /// Homology dimension per auxiliary degree of the column at `b`.
    pub fn homology_column(&self, b: &Degree) -> Result<BTreeMap<i64, usize>, DiffModError> {
        if !self.is_safe(b) {
            return Err(DiffModError::NotSafe(b.clone()));
        }
        Ok(column_homology(&self.k, &self.column(b)))
    }

    /// Homology of many columns, sharing the setup work.
    pub fn homology_columns(&self, bs: &[Degree]) -> Vec<BTreeMap<i64, usize>> {
        let tops = self.tops();
        let table = SubsetTable::new(&self.x, self.vars);
        crate::par::map(bs, |b| column_homology(&self.k, &self.column_with(b, &tops, &table)))
    }

    /// Whether every safe column is exact.
    pub fn is_exact_on_safe_region(&self) -> bool {
        self.homology_columns(&self.safe_columns()).iter().all(|h| h.values().all(|&v| v == 0))
    }

    /// D ⊗_E E_I: drop every e_i with i not in I.
    pub fn tensor_ei(&self, set: &[usize]) -> Self {
        let vars = set.iter().fold(0u64, |m, &i| m | 1 << i) & self.vars;
        let mut out = self.clone();
        out.vars = vars;
        for col in out.cols.iter_mut() {
            let restricted: BTreeMap<usize, ExtElem<K::Elem>> =
                col.iter().map(|(s, e)| (*s, e.restrict(vars))).filter(|(_, e)| !e.is_zero()).collect();
            *col = restricted;
        }
        out
    }

    /// No entry has a nonzero constant term.
    pub fn check_minimal(&self) -> bool {
        self.cols.iter().all(|c| c.values().all(|e| e.constant().is_none()))
    }

    /// Restrict to the generators in `keep` (in the given order).
    pub fn submodule(&self, keep: &[usize]) -> Self {
        let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let cols = keep
            .iter()
            .map(|&t| self.cols[t].iter().filter_map(|(s, e)| pos.get(s).map(|&i| (i, e.clone()))).collect())
            .collect();
        FreeDiffModule {
            k: self.k.clone(),
            x: self.x.clone(),
            gens: keep.iter().map(|&s| self.gens[s].clone()).collect(),
            level: keep.iter().map(|&s| self.level[s]).collect(),
            cols,
            window: self.window.clone(),
            vars: self.vars,
        }
    }

    /// Cancel scalar entries until none remain. Returns the minimal module
    /// and the number of cancelled pairs.
    pub fn minimize_counted(&self) -> (Self, usize) {
        let k = &self.k;
        let n = self.len();
        let mut cols: Vec<HashMap<usize, ExtElem<K::Elem>>> =
            self.cols.iter().map(|c| c.iter().map(|(s, e)| (*s, e.clone())).collect()).collect();
        let mut rows: Vec<HashSet<usize>> = vec![HashSet::new(); n];
        let mut scalars: BTreeSet<(usize, usize)> = BTreeSet::new();
        for (t, c) in cols.iter().enumerate() {
            for (s, e) in c {
                rows[*s].insert(t);
                if e.constant().is_some() {
                    scalars.insert((t, *s));
                }
            }
        }
        let mut alive = vec![true; n];
        let mut cancelled = 0;
        while let Some((t, s)) = scalars.pop_first() {
            if !alive[t] || !alive[s] {
                continue;
            }
            let Some(u) = cols[t].get(&s).and_then(|e| e.constant()).cloned() else {
                continue;
            };
            let uinv = k.inv(&u).expect("nonzero scalar");
            let col_t: Vec<(usize, ExtElem<K::Elem>)> =
                cols[t].iter().filter(|(i, _)| **i != s).map(|(i, e)| (*i, e.scale(k, &uinv))).collect();
            let row_s: Vec<(usize, ExtElem<K::Elem>)> =
                rows[s].iter().filter(|&&j| j != t).map(|&j| (j, cols[j][&s].clone())).collect();
            for (i, a) in &col_t {
                for (j, b) in &row_s {
                    let p = a.mul(k, b);
                    if p.is_zero() {
                        continue;
                    }
                    let cur = cols[*j].remove(i).unwrap_or_default();
                    let v = cur.sub(k, &p);
                    if v.is_zero() {
                        rows[*i].remove(j);
                        scalars.remove(&(*j, *i));
                    } else {
                        if v.constant().is_some() {
                            scalars.insert((*j, *i));
                        } else {
                            scalars.remove(&(*j, *i));
                        }
                        rows[*i].insert(*j);
                        cols[*j].insert(*i, v);
                    }
                }
            }
            for g in [s, t] {
                alive[g] = false;
                for (i, _) in std::mem::take(&mut cols[g]) {
                    rows[i].remove(&g);
                }
                for j in std::mem::take(&mut rows[g]) {
                    cols[j].remove(&g);
                }
            }
            cancelled += 1;
        }
        let keep: Vec<usize> = (0..n).filter(|&i| alive[i]).collect();
        let mut out = self.clone();
        out.cols = cols.into_iter().map(|c| c.into_iter().collect()).collect();
        (out.submodule(&keep), cancelled)
    }

    pub fn minimize(&self) -> Self {
        self.minimize_counted().0
    }

    /// D ⊕ D'.
    pub fn direct_sum(&self, o: &Self) -> Self {
        let off = self.len();
        let mut out = self.clone();
        out.gens.extend(o.gens.iter().cloned());
        out.level.extend(o.level.iter().copied());
        for c in &o.cols {
            out.cols.push(c.iter().map(|(s, e)| (s + off, e.clone())).collect());
        }
        out.window = intersect(&self.window, &o.window);
        out.vars &= o.vars;
        out
    }

    /// The twist D(0; -1): every ω_E(c; u) becomes ω_E(c; u - 1).
    pub fn aux_shift(&self) -> Self {
        let mut out = self.clone();
        for g in out.gens.iter_mut() {
            g.u -= 1;
        }
        out
    }

    /// Multiset of generator twists, sorted.
    pub fn generator_multiset(&self) -> Vec<OmegaTwist> {
        let mut g = self.gens.clone();
        g.sort();
        g
    }
}

pub fn intersect(a: &Window, b: &Window) -> Window {
    Window {
        lo: a.lo.iter().zip(&b.lo).map(|(x, y)| *x.max(y)).collect(),
        hi: a.hi.iter().zip(&b.hi).map(|(x, y)| *x.min(y)).collect(),
    }
}

/// Homology per aux level of a column complex.
pub fn column_homology<K: Field>(k: &K, c: &Column<K::Elem>) -> BTreeMap<i64, usize> {
    let Some((lo, hi)) = c.aux_range() else {
        return BTreeMap::new();
    };
    let dims: Vec<usize> = (lo..=hi).map(|l| c.dim(l)).collect();
    let maps: Vec<_> = (lo..hi).map(|l| c.map(l + 1).to_sparse()).collect();
    complex_homology_sparse(k, &dims, &maps).into_iter().enumerate().map(|(j, h)| (lo + j as i64, h)).collect()
}

/// Dense versions of the maps into and out of aux level `l`.
pub fn column_maps_dense<K: Field>(k: &K, c: &Column<K::Elem>, l: i64) -> (Mat<K::Elem>, Mat<K::Elem>) {
    (c.map(l + 1).to_dense(k), c.map(l).to_dense(k))
}

/// A degree-zero map of free differential modules; `cols[t][s]` is the
/// entry from source generator t to target generator s.
#[derive(Clone, Debug)]
pub struct DMMorphism<K: Field> {
    pub source: FreeDiffModule<K>,
    pub target: FreeDiffModule<K>,
    pub cols: EMatrix<K::Elem>,
}

impl<K: Field> DMMorphism<K> {
    pub fn zero(source: &FreeDiffModule<K>, target: &FreeDiffModule<K>) -> Self {
        DMMorphism { source: source.clone(), target: target.clone(), cols: vec![BTreeMap::new(); source.len()] }
    }

    pub fn identity(d: &FreeDiffModule<K>) -> Self {
        let one = ExtElem::scalar(d.k.one());
        let cols = (0..d.len()).map(|t| BTreeMap::from([(t, one.clone())])).collect();
        DMMorphism { source: d.clone(), target: d.clone(), cols }
    }

    /// Whether Φ' F = F Φ.
    pub fn commutes(&self) -> bool {
        let k = &self.source.k;
        let a = FreeDiffModule::emat_mul(k, &self.target.cols, &self.cols);
        let b = FreeDiffModule::emat_mul(k, &self.cols, &self.source.cols);
        a == b
    }

    /// cone(f) = D' ⊕ D(0;-1) with differential [[Φ', F], [0, -Φ]].
    pub fn cone(&self) -> Result<FreeDiffModule<K>, DiffModError> {
        if self.cols.len() != self.source.len() || self.cols.iter().any(|c| c.keys().any(|&s| s >= self.target.len())) {
            return Err(DiffModError::Shape("morphism matrix does not fit source and target".into()));
        }
        let k = &self.source.k;
        let off = self.target.len();
        let mut out = self.target.direct_sum(&self.source.aux_shift());
        for (t, col) in self.source.cols.iter().enumerate() {
            out.cols[off + t] = col.iter().map(|(s, e)| (s + off, e.neg(k))).collect();
        }
        for (t, col) in self.cols.iter().enumerate() {
            for (s, e) in col {
                out.cols[off + t].insert(*s, e.clone());
            }
        }
        Ok(out)
    }
}

/// A complex of free Z-graded E-modules: generator g of term j lives in
/// degree `deg`. Entry (s, t) maps term j_t to j_t - 1 with |J| = deg_s - deg_t.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtComplex<E> {
    /// (homological index j, generator degree) per generator.
    pub gens: Vec<(i64, i64)>,
    pub cols: EMatrix<E>,
}

fn check_standard(x: &ToricStack) -> Result<(), DiffModError> {
    if x.r != 1 || x.var_degrees.iter().any(|d| d.0[0] != 1) {
        return Err(DiffModError::NonStandard);
    }
    Ok(())
}

/// Fold(C) = ⊕_j C_j(0; -j) with the same differential.
pub fn fold<K: Field>(k: &K, x: &ToricStack, c: &ExtComplex<K::Elem>, window: Window) -> Result<FreeDiffModule<K>, DiffModError> {
    check_standard(x)?;
    let w = x.w().0[0];
    let n1 = x.nvars() as i64;
    let gens = c.gens.iter().map(|&(j, g)| OmegaTwist::new(Degree::from(w - g), n1 - g - j)).collect();
    let mut d = FreeDiffModule::new(k, x, gens, window);
    d.cols = c.cols.clone();
    Ok(d)
}

/// Unfold(D): a generator with top degree (T; A) goes to term A - T in degree T.
pub fn unfold<K: Field>(d: &FreeDiffModule<K>) -> Result<ExtComplex<K::Elem>, DiffModError> {
    check_standard(&d.x)?;
    let gens = d
        .gens
        .iter()
        .map(|g| {
            let top = g.top(&d.x);
            (top.aux - top.cl.0[0], top.cl.0[0])
        })
        .collect();
    Ok(ExtComplex { gens, cols: d.cols.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::PrimeField;
    use proptest::prelude::*;

    fn k() -> PrimeField {
        PrimeField::default()
    }

    fn e(m: &[usize]) -> ExtElem<u64> {
        ExtElem::term(ExtMonomial::from_indices(m), 1)
    }

    /// R(S) on P^1 on a module window [0, top].
    fn r_of_s_p1(top: i64) -> FreeDiffModule<PrimeField> {
        let x = ToricStack::weighted_projective(&[1, 1]).unwrap();
        let mut gens = Vec::new();
        let mut idx = HashMap::new();
        for a in 0..=top {
            for i in 0..=a {
                idx.insert((a, i), gens.len());
                gens.push(OmegaTwist::new(Degree::from(-a), 0));
            }
        }
        let mut d = FreeDiffModule::new(&k(), &x, gens, Window::interval(-4, top + 2));
        for a in 0..top {
            for i in 0..=a {
                // monomial x0^{a-i} x1^i
                let t = idx[&(a, i)];
                d.add_entry(idx[&(a + 1, i)], t, &e(&[0]));
                d.add_entry(idx[&(a + 1, i + 1)], t, &e(&[1]));
            }
        }
        d
    }

    #[test]
    fn square_zero() {
        let x = ToricStack::weighted_projective(&[1, 1]).unwrap();
        let w = Window::interval(-10, 10);
        let gens = vec![OmegaTwist::new(Degree::from(0), 0); 3];
        let mut d = FreeDiffModule::new(&k(), &x, gens, w);
        assert!(d.check_square_zero());
        d.add_entry(1, 0, &e(&[0]));
        d.add_entry(2, 1, &e(&[0]));
        assert!(d.check_square_zero());
        d.add_entry(2, 1, &e(&[1]));
        assert!(!d.check_square_zero());
    }

    #[test]
    fn columns_of_r_of_s() {
        let d = r_of_s_p1(10);
        assert!(d.check_square_zero());
        d.validate().unwrap();
        let h0 = d.homology_column(&Degree::from(0)).unwrap();
        assert_eq!(h0.get(&0), Some(&1));
        assert_eq!(h0.values().sum::<usize>(), 1);
        for b in 1..=10 {
            let h = d.homology_column(&Degree::from(b)).unwrap();
            assert_eq!(h.values().sum::<usize>(), 0);
        }
        assert!(d.homology_column(&Degree::from(12)).is_err());
        let z = FreeDiffModule::new(&k(), &d.x, d.gens.clone(), d.window.clone());
        let col = z.column(&Degree::from(5));
        let h = z.homology_column(&Degree::from(5)).unwrap();
        for (l, v) in h {
            assert_eq!(v, col.dim(l));
        }
    }

    #[test]
    fn minimize_examples() {
        let x = ToricStack::weighted_projective(&[1, 1]).unwrap();
        let w = Window::interval(-10, 10);
        let gens = vec![OmegaTwist::new(Degree::from(0), 1), OmegaTwist::new(Degree::from(0), 0)];
        let mut d = FreeDiffModule::new(&k(), &x, gens, w);
        d.add_entry(0, 1, &ExtElem::scalar(1));
        d.validate().unwrap();
        assert!(!d.check_minimal());
        assert!(d.minimize().is_empty());
        let r = r_of_s_p1(6);
        assert!(r.check_minimal());
        let (m, c) = r.minimize_counted();
        assert_eq!(c, 0);
        assert_eq!(m.gens, r.gens);
    }

    #[test]
    fn cone_of_identity_is_exact() {
        let d = r_of_s_p1(8);
        let id = DMMorphism::identity(&d);
        assert!(id.commutes());
        let c = id.cone().unwrap();
        assert!(c.check_square_zero());
        c.validate().unwrap();
        assert!(c.is_exact_on_safe_region());
        assert!(c.minimize().is_empty());
        let zero = DMMorphism::zero(&d, &d).cone().unwrap();
        for b in zero.safe_columns() {
            let h = zero.homology_column(&b).unwrap();
            let h1 = d.homology_column(&b).unwrap();
            let total: usize = h.values().sum();
            assert_eq!(total, 2 * h1.values().sum::<usize>());
        }
    }

    #[test]
    fn tensor_ei_cases() {
        let d = r_of_s_p1(6);
        let full = d.tensor_ei(&[0, 1]);
        assert_eq!(full.cols, d.cols);
        let none = d.tensor_ei(&[]);
        assert!(none.cols.iter().all(|c| c.is_empty()));
    }

    #[test]
    fn fold_unfold() {
        let x = ToricStack::weighted_projective(&[1, 1]).unwrap();
        let c = ExtComplex::<u64> { gens: vec![], cols: vec![] };
        let d = fold(&k(), &x, &c, Window::interval(0, 4)).unwrap();
        assert!(d.is_empty());
        let c = ExtComplex { gens: vec![(0, 3)], cols: vec![BTreeMap::new()] };
        let d = fold(&k(), &x, &c, Window::interval(0, 4)).unwrap();
        assert!(d.cols[0].is_empty());
        assert_eq!(unfold(&d).unwrap(), c);
        let h3 = ToricStack::hirzebruch(3);
        assert_eq!(unfold(&FreeDiffModule::new(&k(), &h3, vec![], Window::empty(2))).unwrap_err(), DiffModError::NonStandard);
    }

    #[test]
    fn koszul_dual_complex_folds_to_r_of_s() {
        // The linear complex with term -a spanned by S_a in degree w + a.
        let r = r_of_s_p1(6);
        let c = unfold(&r).unwrap();
        for (t, g) in r.gens.iter().enumerate() {
            let a = -g.c.0[0];
            assert_eq!(c.gens[t], (-a, 2 + a));
        }
        let back = fold(&k(), &r.x, &c, r.window.clone()).unwrap();
        assert_eq!(back.gens, r.gens);
        assert_eq!(back.cols, r.cols);
    }

    /// P Φ P^{-1} for a random unipotent degree-zero automorphism P.
    pub(crate) fn scramble(d: &FreeDiffModule<PrimeField>, seed: u64) -> FreeDiffModule<PrimeField> {
        use rand::{Rng, SeedableRng};
        let k = k();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = d.len();
        let mut nil: EMatrix<u64> = vec![BTreeMap::new(); n];
        for t in 0..n {
            for s in 0..t {
                let len = d.gens[t].u - d.gens[s].u;
                let cl = &d.gens[t].c - &d.gens[s].c;
                for m in 0..1u64 << d.x.nvars() {
                    if m.count_ones() as i64 == len && d.x.mask_degree(m) == cl && rng.gen_bool(0.4) {
                        let v = rng.gen_range(1..20u64);
                        let cur: ExtElem<u64> = nil[t].remove(&s).unwrap_or_default();
                        nil[t].insert(s, cur.add(&k, &ExtElem::term(ExtMonomial(m), v)));
                    }
                }
            }
        }
        let ident: EMatrix<u64> = (0..n).map(|t| BTreeMap::from([(t, ExtElem::scalar(1u64))])).collect();
        let add = |a: &EMatrix<u64>, b: &EMatrix<u64>, sign: i64| -> EMatrix<u64> {
            a.iter()
                .zip(b)
                .map(|(ca, cb)| {
                    let mut out = ca.clone();
                    for (s, e) in cb {
                        let e = if sign < 0 { e.neg(&k) } else { e.clone() };
                        let v = out.remove(s).unwrap_or_default().add(&k, &e);
                        if !v.is_zero() {
                            out.insert(*s, v);
                        }
                    }
                    out
                })
                .collect()
        };
        let p = add(&ident, &nil, 1);
        // (I + N)^{-1} = Σ (-N)^j
        let mut pinv = ident.clone();
        let mut pow = ident.clone();
        for j in 1..=n {
            pow = FreeDiffModule::<PrimeField>::emat_mul(&k, &pow, &nil);
            if pow.iter().all(|c| c.is_empty()) {
                break;
            }
            pinv = add(&pinv, &pow, if j % 2 == 1 { -1 } else { 1 });
        }
        let mut out = d.clone();
        let pd = FreeDiffModule::<PrimeField>::emat_mul(&k, &p, &d.cols);
        out.cols = FreeDiffModule::<PrimeField>::emat_mul(&k, &pd, &pinv);
        out
    }

    proptest! {
        #[test]
        fn minimize_preserves_homology(seed in any::<u64>()) {
            let r = r_of_s_p1(5);
            let padded = r.direct_sum(&DMMorphism::identity(&r_of_s_p1(3)).cone().unwrap());
            let d = scramble(&padded, seed);
            prop_assert!(d.check_square_zero());
            let m = d.minimize();
            prop_assert!(m.check_minimal());
            prop_assert!(m.check_square_zero());
            for b in d.safe_columns() {
                let nz = |h: BTreeMap<i64, usize>| h.into_iter().filter(|(_, v)| *v > 0).collect::<Vec<_>>();
                prop_assert_eq!(nz(d.homology_column(&b).unwrap()), nz(m.homology_column(&b).unwrap()));
            }
            prop_assert_eq!(m.generator_multiset(), r.generator_multiset());
        }
    }
}
