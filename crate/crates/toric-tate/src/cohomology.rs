//! Local and sheaf cohomology from Čech strands, closed forms on weighted
//! projective stacks, 0-regularity and the Betti-number bounds it implies.

use crate::bgg::{betti_table, BGGWindowSpec};
use crate::exterior::CohomologyTable;
use crate::linalg::{rank_sparse, ColMat, Field, SparseMat};
use crate::par;
use crate::smodule::{monomial_basis, GradedModule, LazyModule, Presentation};
use crate::tate::{default_truncation, tate_weighted, TateError};
use crate::toric::{Degree, ToricError, ToricStack, Window};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CohomologyError {
    #[error("Čech dimensions at degree {0} did not stabilize up to exponent {1}")]
    NoStabilization(Degree, u32),
    #[error(transparent)]
    Toric(#[from] ToricError),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

/// Exponent bound for localizations: start value and cap for doubling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExpBound {
    pub start: u32,
    pub cap: u32,
}

impl Default for ExpBound {
    fn default() -> Self {
        ExpBound { start: 2, cap: 64 }
    }
}

fn union_mask(supports: &[Vec<usize>], j: u64) -> u64 {
    supports
        .iter()
        .enumerate()
        .filter(|(s, _)| j >> s & 1 == 1)
        .flat_map(|(_, v)| v.iter())
        .fold(0u64, |acc, &i| acc | 1 << i)
}

/// Truncated Čech complex on `supports`: the piece M[x_U^{-1}]_a is
/// modelled by M_{a + t deg x_U}. With `augmented` the complex starts with
/// M itself (level 0 is J = ∅).
#[derive(Clone, Debug)]
pub struct CechData {
    pub supports: Vec<Vec<usize>>,
    pub t: u32,
    pub augmented: bool,
    /// Subsets J of the supports, grouped by level.
    pub levels: Vec<Vec<u64>>,
}

impl CechData {
    pub fn new(supports: &[Vec<usize>], t: u32, augmented: bool) -> Self {
        let ns = supports.len();
        let first = if augmented { 0 } else { 1 };
        let levels = (first..=ns).map(|l| (0..1u64 << ns).filter(|j| j.count_ones() as usize == l).collect()).collect();
        CechData { supports: supports.to_vec(), t, augmented, levels }
    }

    /// t deg x_U for each J of level `l`.
    pub fn shifts(&self, x: &ToricStack, l: usize) -> Vec<Degree> {
        self.levels[l].iter().map(|&j| x.mask_degree(union_mask(&self.supports, j)).scale(self.t as i64)).collect()
    }

    pub fn dims<K: Field, M: GradedModule<K> + ?Sized>(&self, m: &M, l: usize, a: &Degree) -> Vec<usize> {
        self.shifts(m.stack(), l).iter().map(|s| m.dim(&(a + s))).collect()
    }

    /// The map from level `l` to level `l + 1` in degree a.
    pub fn map<K: Field, M: GradedModule<K> + ?Sized>(&self, m: &M, l: usize, a: &Degree) -> ColMat<K::Elem> {
        let k = m.field();
        let x = m.stack();
        let nv = x.nvars();
        let offsets = |l: usize| -> (HashMap<u64, usize>, usize) {
            let mut acc = 0;
            let map = self.levels[l]
                .iter()
                .zip(self.dims(m, l, a))
                .map(|(&j, n)| {
                    let o = acc;
                    acc += n;
                    (j, o)
                })
                .collect();
            (map, acc)
        };
        let (src, ncols) = offsets(l);
        let (dst, nrows) = offsets(l + 1);
        let mut out = ColMat::zeros(nrows, ncols);
        for &j in &self.levels[l] {
            let uj = union_mask(&self.supports, j);
            let from = a + &x.mask_degree(uj).scale(self.t as i64);
            for s in 0..self.supports.len() {
                if j >> s & 1 == 1 {
                    continue;
                }
                let j2 = j | 1 << s;
                let extra = union_mask(&self.supports, j2) & !uj;
                let mono: Vec<u32> = (0..nv).map(|i| if extra >> i & 1 == 1 { self.t } else { 0 }).collect();
                let mat = m.mult_mono(&mono, &from);
                let sign = if (j & ((1u64 << s) - 1)).count_ones() % 2 == 0 { k.one() } else { k.neg(&k.one()) };
                let (ro, co) = (dst[&j2], src[&j]);
                for (c, col) in mat.cols.iter().enumerate() {
                    for (r, v) in col {
                        out.cols[co + c].push((ro + r, k.mul(&sign, v)));
                    }
                }
            }
        }
        for col in out.cols.iter_mut() {
            col.sort_by_key(|(r, _)| *r);
        }
        out
    }

    /// Dimensions of the cohomology of the degree-a strand, one per level.
    pub fn strand<K: Field, M: GradedModule<K> + ?Sized>(&self, m: &M, a: &Degree) -> Vec<usize> {
        let k = m.field();
        let nl = self.levels.len();
        let totals: Vec<usize> = (0..nl).map(|l| self.dims(m, l, a).iter().sum()).collect();
        let ranks: Vec<usize> = (0..nl.saturating_sub(1))
            .map(|l| if totals[l] == 0 || totals[l + 1] == 0 { 0 } else { rank_sparse(k, &self.map(m, l, a).to_sparse()) })
            .collect();
        (0..nl)
            .map(|l| {
                let out = if l < ranks.len() { ranks[l] } else { 0 };
                let inn = if l > 0 { ranks[l - 1] } else { 0 };
                totals[l] - out - inn
            })
            .collect()
    }
}

/// Cohomology of the degree-a strand of the truncated Čech complex. With
/// `augmented` this computes H^i_B; otherwise the Čech cohomology of the cover.
pub fn cech_strand<K: Field, M: GradedModule<K> + ?Sized>(
    m: &M,
    supports: &[Vec<usize>],
    a: &Degree,
    t: u32,
    augmented: bool,
) -> Vec<usize> {
    CechData::new(supports, t, augmented).strand(m, a)
}

/// Smallest exponent of the form start·2^k (at least the degree-based
/// scale) at which the strands at t and t+1 agree for every listed degree.
pub fn stable_exponent<K: Field, M: GradedModule<K> + ?Sized>(
    m: &M,
    supports: &[Vec<usize>],
    degrees: &[Degree],
    bound: ExpBound,
    augmented: bool,
) -> Result<u32, CohomologyError> {
    let x = m.stack();
    let scale = degrees.iter().map(|a| x.theta_of(a).abs()).max().unwrap_or(0) + x.theta_of(&x.w()) + 1;
    let mut t = bound.start.max(1).max(scale as u32);
    let cap = bound.cap.max(4 * t);
    while t <= cap {
        let ok = par::map(degrees, |a| cech_strand(m, supports, a, t, augmented) == cech_strand(m, supports, a, t + 1, augmented));
        if ok.into_iter().all(|v| v) {
            return Ok(t);
        }
        t *= 2;
    }
    Err(CohomologyError::NoStabilization(degrees.first().cloned().unwrap_or_default(), cap))
}

/// dim of the socle (0 :_M m)_a, with m the ideal of all variables.
pub fn socle_dim<K: Field, M: GradedModule<K> + ?Sized>(m: &M, a: &Degree) -> usize {
    let n = m.dim(a);
    if n == 0 {
        return 0;
    }
    let x = m.stack();
    let mut rows = 0;
    let mats: Vec<_> = (0..x.nvars()).map(|i| m.mult_var(i, a)).collect();
    let total: usize = mats.iter().map(|c| c.rows).sum();
    let mut sm = SparseMat::new(total, n);
    for mat in &mats {
        for (c, col) in mat.cols.iter().enumerate() {
            for (r, v) in col {
                sm.push(rows + r, c, v.clone());
            }
        }
        rows += mat.rows;
    }
    n - rank_sparse(m.field(), &sm)
}

fn stabilized<K: Field, M: GradedModule<K> + ?Sized>(
    m: &M,
    supports: &[Vec<usize>],
    a: &Degree,
    bound: ExpBound,
    augmented: bool,
) -> Result<Vec<usize>, CohomologyError> {
    // Localized pieces need exponents comparable to |θ(a)| before they settle.
    let x = m.stack();
    let scale = (x.theta_of(a).abs() + x.theta_of(&x.w()) + 1) as u32;
    let mut t = bound.start.max(1).max(scale);
    let cap = bound.cap.max(4 * t);
    while t <= cap {
        let cur = cech_strand(m, supports, a, t, augmented);
        if cech_strand(m, supports, a, t + 1, augmented) == cur {
            return Ok(cur);
        }
        t *= 2;
    }
    Err(CohomologyError::NoStabilization(a.clone(), cap))
}

/// dim H^i_B(M)_a for i = 0..=#supports, B generated by the irrelevant supports.
pub fn local_cohomology<K: Field, M: GradedModule<K> + ?Sized>(
    m: &M,
    a: &Degree,
    bound: ExpBound,
) -> Result<Vec<usize>, CohomologyError> {
    stabilized(m, &m.stack().irrelevant, a, bound, true)
}

pub fn local_cohomology_oracle<K: Field, M: GradedModule<K> + ?Sized>(
    m: &M,
    a: &Degree,
    i: usize,
    bound: ExpBound,
) -> Result<usize, CohomologyError> {
    Ok(local_cohomology(m, a, bound)?.get(i).copied().unwrap_or(0))
}

/// dim H^i(X, M~(a)) for i = 0..#cover from the Čech complex of the cover.
pub fn sheaf_cohomology<K: Field, M: GradedModule<K> + ?Sized>(
    m: &M,
    a: &Degree,
    bound: ExpBound,
) -> Result<Vec<usize>, CohomologyError> {
    stabilized(m, &m.stack().cover, a, bound, false)
}

pub fn sheaf_cohomology_oracle<K: Field, M: GradedModule<K> + ?Sized>(
    m: &M,
    a: &Degree,
    i: usize,
    bound: ExpBound,
) -> Result<usize, CohomologyError> {
    Ok(sheaf_cohomology(m, a, bound)?.get(i).copied().unwrap_or(0))
}

/// Oracle table on the listed degrees.
pub fn sheaf_cohomology_table<K: Field, M: GradedModule<K> + ?Sized>(
    m: &M,
    degrees: &[Degree],
    bound: ExpBound,
) -> Result<CohomologyTable, CohomologyError> {
    let rows = par::map(degrees, |a| sheaf_cohomology(m, a, bound));
    let mut t = CohomologyTable::default();
    for (a, h) in degrees.iter().zip(rows) {
        for (i, v) in h?.into_iter().enumerate() {
            t.add(i as i64, a.clone(), v);
        }
    }
    Ok(t)
}

/// (h^0, h^n) of O(a) on a weighted projective stack: monomials of degree a
/// and, by Serre duality, of degree -a-w.
pub fn weighted_closed_forms(x: &ToricStack, a: i64) -> Result<(usize, usize), CohomologyError> {
    let w = x.weights_zgraded()?.w;
    Ok((monomial_basis(x, &Degree::from(a)).len(), monomial_basis(x, &Degree::from(-a - w)).len()))
}

/// Sheaf cohomology table of M on a weighted projective stack read off a
/// Tate resolution. Without `d`, the truncation degree is raised past the
/// top of the socle of M so that H^0_B(M_{>=d}) vanishes.
pub fn cohomology_table_fast<K: Field>(
    k: &K,
    x: &ToricStack,
    pres: &Presentation<K::Elem>,
    window: &Window,
    d: Option<i64>,
) -> Result<CohomologyTable, TateError> {
    let d = d.unwrap_or_else(|| saturating_truncation(k, x, pres, window));
    Ok(tate_weighted(k, x, pres, window, Some(d))?.table)
}

/// The default truncation degree, raised past the top socle degree of M
/// within reach of `window`.
pub fn saturating_truncation<K: Field>(k: &K, x: &ToricStack, pres: &Presentation<K::Elem>, window: &Window) -> i64 {
    let d0 = default_truncation(x, pres);
    let m = LazyModule::new(k, x, pres);
    let w = x.theta_of(&x.w());
    let hi = window.hi.first().copied().unwrap_or(0).max(d0) + 2 * w + 2;
    (d0..=hi).rev().find(|&a| socle_dim(&m, &Degree::from(a)) > 0).map_or(d0, |a| a + 1)
}

/// Whether (H^i_B M)_d = 0 for all d >= -w^{i-1}, checked for d up to `dmax`
/// plus two further degrees.
pub fn is_0_regular<K: Field, M: GradedModule<K> + ?Sized>(m: &M, dmax: i64, bound: ExpBound) -> Result<bool, CohomologyError> {
    let x = m.stack();
    let wts = x.weights_zgraded()?;
    let lo = (0..=x.nvars() as i64).map(|i| -wts.w_upper(i - 1)).min().unwrap_or(0);
    let degs: Vec<Degree> = (lo..=dmax + 2).map(Degree::from).collect();
    let rows = par::map(&degs, |a| local_cohomology(m, a, bound));
    for (a, h) in degs.iter().zip(rows) {
        for (i, v) in h?.into_iter().enumerate() {
            if v > 0 && a.0[0] >= -wts.w_upper(i as i64 - 1) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// w^j_I for j = -1..=#I+1 with the usual conventions at both ends.
fn w_i(x: &ToricStack, set: &[usize], j: i64) -> Result<i64, CohomologyError> {
    let ws = x.weights_deg_i(set)?;
    let top = ws.len() as i64 - 1;
    Ok(match j {
        j if j < 0 => -1,
        j if j <= top => ws[j as usize],
        _ => ws[top as usize] + j - top,
    })
}

/// deg_I 0-regularity on the degrees of `window`: M as an S_I-module with
/// B_I the ideal of the variables in I.
pub fn is_deg_i_0_regular<K: Field, M: GradedModule<K> + ?Sized>(
    m: &M,
    set: &[usize],
    window: &Window,
    bound: ExpBound,
) -> Result<bool, CohomologyError> {
    let x = m.stack();
    let pc = x.collection(set)?.clone();
    let supports: Vec<Vec<usize>> = set.iter().map(|&i| vec![i]).collect();
    let pts = window.points();
    let rows = par::map(&pts, |a| stabilized(m, &supports, a, bound, true));
    for (a, h) in pts.iter().zip(rows) {
        for (i, v) in h?.into_iter().enumerate() {
            if v > 0 && deg_i_of(x, &pc.deg_i, a) >= -w_i(x, set, i as i64 - 1)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// deg_I on Cl, determined by its values on the variables.
pub fn deg_i_of(x: &ToricStack, deg_i: &[i64], a: &Degree) -> i64 {
    // Solve a = Σ c_i deg(x_i) over Q through a basis of variables; the map is
    // well defined, so any integral preimage works.
    let basis = spanning_vars(x);
    let r = x.r;
    let mut mat: Vec<Vec<f64>> = (0..r).map(|row| basis.iter().map(|&i| x.var_degrees[i].0[row] as f64).collect()).collect();
    let mut rhs: Vec<f64> = a.0.iter().map(|&v| v as f64).collect();
    for c in 0..r {
        let p = (c..r).max_by(|&i, &j| mat[i][c].abs().total_cmp(&mat[j][c].abs())).expect("rank");
        mat.swap(c, p);
        rhs.swap(c, p);
        for row in 0..r {
            if row != c {
                let f = mat[row][c] / mat[c][c];
                for col in 0..r {
                    mat[row][col] -= f * mat[c][col];
                }
                rhs[row] -= f * rhs[c];
            }
        }
    }
    let v: f64 = (0..r).map(|c| rhs[c] / mat[c][c] * deg_i[basis[c]] as f64).sum();
    v.round() as i64
}

fn spanning_vars(x: &ToricStack) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..x.nvars() {
        let mut trial = chosen.clone();
        trial.push(i);
        let rows: Vec<Vec<i64>> = trial.iter().map(|&j| x.var_degrees[j].0.clone()).collect();
        if int_rank(&rows) == trial.len() {
            chosen = trial;
        }
        if chosen.len() == x.r {
            break;
        }
    }
    chosen
}

fn int_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
    let mut rank = 0;
    let cols = m.first().map_or(0, |r| r.len());
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| m[i][c].abs() > 1e-9) else { continue };
        m.swap(rank, p);
        for i in 0..m.len() {
            if i != rank {
                let f = m[i][c] / m[rank][c];
                for j in 0..cols {
                    m[i][j] -= f * m[rank][j];
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Outcome of a Betti-bound check: every nonzero β_{i,a} examined, and those
/// violating the bound.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BoundReport {
    pub checked: Vec<(i64, Degree)>,
    pub violations: Vec<(i64, Degree)>,
}

impl BoundReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Weighted bounds: a < w^{i+1}, and i <= a when M is generated
/// in degrees >= 0.
pub fn check_betti_bounds_weighted<K: Field, M: GradedModule<K> + ?Sized>(
    m: &M,
    spec: &BGGWindowSpec,
    dmax: i64,
    bound: ExpBound,
) -> Result<BoundReport, CohomologyError> {
    if !is_0_regular(m, dmax, bound)? {
        return Err(CohomologyError::Precondition("module is not 0-regular".into()));
    }
    let x = m.stack();
    let wts = x.weights_zgraded()?;
    let betti = betti_table(m, spec);
    let gen_nonneg = betti.keys().filter(|(i, _)| *i == 0).all(|(_, a)| a.0[0] >= 0);
    let mut rep = BoundReport::default();
    for (i, a) in betti.keys() {
        rep.checked.push((*i, a.clone()));
        let d = a.0[0];
        if d >= wts.w_upper(i + 1) || (gen_nonneg && d < *i) {
            rep.violations.push((*i, a.clone()));
        }
    }
    Ok(rep)
}

/// Multigraded shape: deg_I(a) < w^{j+1}_I for every nonzero β_{j,a}.
pub fn check_betti_bounds_multigraded<K: Field, M: GradedModule<K> + ?Sized>(
    m: &M,
    set: &[usize],
    spec: &BGGWindowSpec,
    regularity_window: &Window,
    bound: ExpBound,
) -> Result<BoundReport, CohomologyError> {
    if !is_deg_i_0_regular(m, set, regularity_window, bound)? {
        return Err(CohomologyError::Precondition(format!("module is not deg_I 0-regular for I = {set:?}")));
    }
    let x = m.stack();
    let pc = x.collection(set)?.clone();
    let betti = betti_table(m, spec);
    let mut rep = BoundReport::default();
    for (j, a) in betti.keys() {
        rep.checked.push((*j, a.clone()));
        if deg_i_of(x, &pc.deg_i, a) >= w_i(x, set, j + 1)? {
            rep.violations.push((*j, a.clone()));
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::PrimeField;
    use crate::smodule::{DegreewiseModule, GeneratedTruncation, LazyModule, Presentation, Threshold};

    fn k() -> PrimeField {
        PrimeField::default()
    }

    fn s(x: &ToricStack) -> LazyModule<PrimeField> {
        LazyModule::new(&k(), x, &Presentation::free(vec![Degree::zero(x.r)]))
    }

    #[test]
    fn local_cohomology_examples() {
        let p1 = ToricStack::weighted_projective(&[1, 1]).unwrap();
        assert_eq!(local_cohomology(&s(&p1), &Degree::from(-2), ExpBound::default()).unwrap(), vec![0, 0, 1]);
        let kk = DegreewiseModule::residue_field(&k(), &p1, &Degree::from(0), &Window::interval(-40, 200));
        assert_eq!(local_cohomology(&kk, &Degree::from(0), ExpBound::default()).unwrap(), vec![1, 0, 0]);
        let x = ToricStack::weighted_projective(&[1, 1, 2]).unwrap();
        assert_eq!(local_cohomology_oracle(&s(&x), &Degree::from(-4), 3, ExpBound::default()).unwrap(), 1);
    }

    #[test]
    fn sheaf_cohomology_examples() {
        let p1 = ToricStack::weighted_projective(&[1, 1]).unwrap();
        assert_eq!(sheaf_cohomology_oracle(&s(&p1), &Degree::from(3), 0, ExpBound::default()).unwrap(), 4);
        let x = ToricStack::weighted_projective(&[1, 1, 2]).unwrap();
        assert_eq!(sheaf_cohomology_oracle(&s(&x), &Degree::from(-4), 2, ExpBound::default()).unwrap(), 1);
        let y = ToricStack::weighted_projective(&[1, 5, 6]).unwrap();
        assert_eq!(sheaf_cohomology_oracle(&s(&y), &Degree::from(-12), 2, ExpBound::default()).unwrap(), 1);
    }

    #[test]
    fn closed_forms_match_oracle() {
        for wts in [vec![1, 1, 2], vec![1, 5, 6], vec![1, 2]] {
            let x = ToricStack::weighted_projective(&wts).unwrap();
            let w: i64 = wts.iter().sum();
            let n = wts.len() - 1;
            let m = s(&x);
            for a in -2 * w..=2 * w {
                let h = sheaf_cohomology(&m, &Degree::from(a), ExpBound::default()).unwrap();
                let (h0, hn) = weighted_closed_forms(&x, a).unwrap();
                assert_eq!(h[0], h0, "{wts:?} h0({a})");
                assert_eq!(h[n], hn, "{wts:?} h{n}({a})");
                assert!(h[1..n].iter().all(|&v| v == 0));
            }
        }
        let x = ToricStack::weighted_projective(&[1, 1, 2]).unwrap();
        assert_eq!(weighted_closed_forms(&x, 2).unwrap().0, 4);
        assert_eq!(weighted_closed_forms(&x, -4).unwrap().1, 1);
        assert_eq!(weighted_closed_forms(&x, -1).unwrap().0, 0);
    }

    #[test]
    fn euler_characteristic_is_quasi_polynomial() {
        // on P(1,1,2), χ(O(a)) = h0 - h1 + h2 and second differences with
        // step 2 are constant on each residue class
        let x = ToricStack::weighted_projective(&[1, 1, 2]).unwrap();
        let m = s(&x);
        let chi = |a: i64| -> i64 {
            let h = sheaf_cohomology(&m, &Degree::from(a), ExpBound::default()).unwrap();
            h[0] as i64 - h[1] as i64 + h[2] as i64
        };
        for a in -6..0 {
            let d1 = chi(a + 2) - chi(a);
            let d2 = chi(a + 4) - chi(a + 2);
            let d3 = chi(a + 6) - chi(a + 4);
            assert_eq!(d2 - d1, d3 - d2);
        }
    }

    #[test]
    fn fast_table_matches_oracle() {
        let x = ToricStack::weighted_projective(&[1, 1, 2]).unwrap();
        let w = Window::interval(-8, 8);
        let pres = Presentation::free(vec![Degree::zero(1)]);
        let fast = cohomology_table_fast(&k(), &x, &pres, &w, None).unwrap();
        let oracle = sheaf_cohomology_table(&s(&x), &w.points(), ExpBound::default()).unwrap();
        assert_eq!(fast, oracle);
        // H^0_B(S/(x0^2, x0x1)) sits in degree 1, so d moves to 2
        let pres = Presentation::monomial_quotient(&k(), &x, &[vec![2, 0, 0], vec![1, 1, 0]]).unwrap();
        let fast = cohomology_table_fast(&k(), &x, &pres, &Window::interval(-4, 4), None).unwrap();
        let m = LazyModule::new(&k(), &x, &pres);
        let oracle = sheaf_cohomology_table(&m, &Window::interval(-4, 4).points(), ExpBound::default()).unwrap();
        assert_eq!(fast, oracle);
        let p2 = ToricStack::weighted_projective(&[1, 1, 1]).unwrap();
        let pres = Presentation::free(vec![Degree::from(3)]);
        let fast = cohomology_table_fast(&k(), &p2, &pres, &Window::interval(-3, 3), None).unwrap();
        for a in -3..=3i64 {
            let b = a - 3;
            let h0 = if b >= 0 { ((b + 1) * (b + 2) / 2) as usize } else { 0 };
            let h2 = if b <= -3 { ((-b - 1) * (-b - 2) / 2) as usize } else { 0 };
            assert_eq!(fast.get(0, &Degree::from(a)), h0);
            assert_eq!(fast.get(2, &Degree::from(a)), h2);
        }
    }

    #[test]
    fn regularity_examples() {
        let x = ToricStack::weighted_projective(&[1, 5, 6]).unwrap();
        assert!(is_0_regular(&s(&x), 13, ExpBound::default()).unwrap());
        let pres = Presentation::monomial_quotient(&k(), &x, &[vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        let n4 = LazyModule::new(&k(), &x, &pres).truncate(Threshold::Theta(4)).twist(&Degree::from(4));
        assert!(is_0_regular(&n4, 13, ExpBound::default()).unwrap());
        let p1 = ToricStack::weighted_projective(&[1, 1]).unwrap();
        let kk = DegreewiseModule::residue_field(&k(), &p1, &Degree::from(1), &Window::interval(-40, 200));
        assert!(!is_0_regular(&kk, 4, ExpBound::default()).unwrap());
    }

    #[test]
    fn betti_bounds_weighted() {
        let x = ToricStack::weighted_projective(&[1, 5, 6]).unwrap();
        let pres = Presentation::monomial_quotient(&k(), &x, &[vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        let n4 = LazyModule::new(&k(), &x, &pres).truncate(Threshold::Theta(4)).twist(&Degree::from(4));
        let spec = BGGWindowSpec::new(&x, Window::interval(-12, 16));
        let rep = check_betti_bounds_weighted(&n4, &spec, 13, ExpBound::default()).unwrap();
        assert!(rep.ok());
        assert_eq!(rep.checked.len(), 4);

        let p2 = ToricStack::weighted_projective(&[1, 1, 1]).unwrap();
        let t = s(&p2).truncate(Threshold::Theta(2)).twist(&Degree::from(2));
        let rep = check_betti_bounds_weighted(&t, &BGGWindowSpec::new(&p2, Window::interval(-4, 8)), 6, ExpBound::default()).unwrap();
        assert!(rep.ok());

        let p1 = ToricStack::weighted_projective(&[1, 1]).unwrap();
        let kk = DegreewiseModule::residue_field(&k(), &p1, &Degree::from(1), &Window::interval(-40, 200));
        let spec = BGGWindowSpec::new(&p1, Window::interval(-4, 8));
        assert!(matches!(check_betti_bounds_weighted(&kk, &spec, 4, ExpBound::default()), Err(CohomologyError::Precondition(_))));
    }

    #[test]
    fn deg_i_functionals() {
        let h = ToricStack::hirzebruch(3);
        let pc = h.collection(&[0, 2]).unwrap().deg_i.clone();
        assert_eq!(deg_i_of(&h, &pc, &Degree(vec![-3, 1])), -3);
        assert_eq!(deg_i_of(&h, &pc, &Degree(vec![2, 5])), 2);
        let pc = h.collection(&[1, 3]).unwrap().deg_i.clone();
        assert_eq!(deg_i_of(&h, &pc, &Degree(vec![-3, 1])), 1);
        assert_eq!(deg_i_of(&h, &pc, &Degree(vec![4, 2])), 2);
    }

    #[test]
    fn betti_bounds_multigraded() {
        let k = k();
        let x = ToricStack::hirzebruch(3);
        let pres = Presentation::monomial_quotient(&k, &x, &[vec![1, 1, 0, 0]]).unwrap();
        let a = Degree(vec![2, 3]);
        let m = GeneratedTruncation::new(LazyModule::new(&k, &x, &pres), a.clone(), a);
        let spec = BGGWindowSpec::new(&x, Window::new(vec![-5, -2], vec![4, 2]).unwrap());
        let reg = Window::new(vec![-3, -3], vec![3, 3]).unwrap();
        for set in [[0usize, 2], [1, 3]] {
            let rep = check_betti_bounds_multigraded(&m, &set, &spec, &reg, ExpBound::default()).unwrap();
            assert!(rep.ok(), "{set:?}: {:?}", rep.violations);
            assert!(!rep.checked.is_empty());
        }
        let p = ToricStack::p1xp1();
        let spec = BGGWindowSpec::new(&p, Window::new(vec![-3, -3], vec![3, 3]).unwrap());
        let reg = Window::new(vec![-2, -2], vec![2, 2]).unwrap();
        let rep = check_betti_bounds_multigraded(&s(&p), &[0, 2], &spec, &reg, ExpBound::default()).unwrap();
        assert!(rep.ok());
    }
}
