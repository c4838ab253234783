//! Tate resolutions on windows.
//!
//! On a weighted projective stack T is the cone of the minimal resolution
//! F → R(M_{≥d}). On any toric stack T is the minimized totalization of R
//! applied to the truncated Čech complex of M on the cover.

use crate::bgg::{l_functor, r_complex, r_functor, BGGWindowSpec, ModuleComplex};
use crate::cohomology::{socle_dim, stable_exponent, CechData, CohomologyError, ExpBound};
use crate::diffmod::{DiffModError, FreeDiffModule};
use crate::dmres::{min_free_resolution, sweep_columns, ResolutionError};
use crate::exterior::{socle_readoff, CohomologyTable, ExtElem, ExtMonomial, OmegaTwist};
use crate::linalg::{rank, ColMat, Field, Mat, RepPolicy};
use crate::smodule::{GradedComplex, GradedModule, LazyModule, Presentation, Threshold};
use crate::toric::{adjugate, int_det, Degree, ToricError, ToricStack, Window};
use std::collections::{BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TateError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("window too small: {0}")]
    Window(String),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
    #[error(transparent)]
    DiffMod(#[from] DiffModError),
    #[error(transparent)]
    Toric(#[from] ToricError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Construction {
    Weighted,
    Fm,
}

#[derive(Clone, Debug)]
pub struct TateResult<K: Field> {
    pub t: FreeDiffModule<K>,
    pub table: CohomologyTable,
    pub construction: Construction,
    /// Degrees where the table is valid.
    pub safe_window: Window,
    /// Columns where T is exact by construction.
    pub exact_columns: Vec<Degree>,
}

impl<K: Field> TateResult<K> {
    /// Generators whose socle degree lies in the safe window.
    pub fn generators_in_window(&self) -> Vec<OmegaTwist> {
        let mut g: Vec<OmegaTwist> = self.t.gens.iter().filter(|g| self.safe_window.contains(&-&g.c)).cloned().collect();
        g.sort();
        g
    }

    pub fn count(&self, g: &OmegaTwist) -> usize {
        self.t.gens.iter().filter(|h| *h == g).count()
    }
}

/// Default truncation degree: max(0, largest θ-degree of a generator or relation).
pub fn default_truncation<E: Clone>(x: &ToricStack, pres: &Presentation<E>) -> i64 {
    pres.max_theta_degree(x).max(0)
}

pub fn tate_weighted<K: Field>(
    k: &K,
    x: &ToricStack,
    pres: &Presentation<K::Elem>,
    window: &Window,
    d: Option<i64>,
) -> Result<TateResult<K>, TateError> {
    if x.r != 1 {
        return Err(TateError::Precondition(format!("class group has rank {}, expected 1", x.r)));
    }
    let w = x.weights_zgraded()?.w;
    let (lo, hi) = (window.lo[0], window.hi[0]);
    let top = pres.max_theta_degree(x);
    let d = d.unwrap_or_else(|| default_truncation(x, pres));
    let m = LazyModule::new(k, x, pres);
    let md = m.truncate(Threshold::Theta(d));
    let mlo = lo.min(d) - 1;
    let mhi = hi.max(d).max(top) + 2 * w + 2;
    if let Some(a) = (d..=mhi).find(|&a| socle_dim(&md, &Degree::from(a)) > 0) {
        return Err(TateError::Precondition(format!("H^0_B(M_>={d}) is nonzero in degree {a}")));
    }
    let spec = BGGWindowSpec::new(x, Window::interval(mlo, mhi));
    let dm = r_functor(&md, &spec);
    let floor = lo + w;
    if !dm.safe_columns().iter().any(|b| b.0[0] <= floor) {
        return Err(TateError::Window(format!("no safe column at or below {floor}")));
    }
    let res = min_free_resolution(&dm, floor, RepPolicy::First)?;
    let cone = res.cone()?;
    let exact_columns = sweep_columns(&cone, floor);
    let t = cone.minimize();
    let mut table = socle_readoff(&t.free_module()).restrict(|a| window.contains(a));
    for a in d.max(lo)..=hi {
        let a = Degree::from(a);
        table.set(0, a.clone(), md.dim(&a));
    }
    Ok(TateResult { t, table, construction: Construction::Weighted, safe_window: window.clone(), exact_columns })
}

/// One level of the truncated Čech complex as a graded module: the direct
/// sum of M(s) over the shifts s of that level.
struct CechLevel<'a, M: ?Sized> {
    m: &'a M,
    shifts: Vec<Degree>,
}

impl<K: Field, M: GradedModule<K> + ?Sized> GradedModule<K> for CechLevel<'_, M> {
    fn field(&self) -> &K {
        self.m.field()
    }
    fn stack(&self) -> &ToricStack {
        self.m.stack()
    }
    fn dim(&self, a: &Degree) -> usize {
        self.shifts.iter().map(|s| self.m.dim(&(a + s))).sum()
    }
    fn mult_mono(&self, mono: &[u32], a: &Degree) -> ColMat<K::Elem> {
        let blocks: Vec<ColMat<K::Elem>> = self.shifts.iter().map(|s| self.m.mult_mono(mono, &(a + s))).collect();
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut out = ColMat { rows, cols: Vec::new() };
        let mut ro = 0;
        for b in blocks {
            out.cols.extend(b.cols.into_iter().map(|c| c.into_iter().map(|(r, v)| (r + ro, v)).collect()));
            ro += b.rows;
        }
        out
    }
}

/// Window enlarged on each side by the sum of |deg x_i|.
pub fn fm_module_window(x: &ToricStack, window: &Window) -> Window {
    let pad: Vec<i64> = (0..x.r).map(|c| x.var_degrees.iter().map(|d| d.0[c].abs()).sum()).collect();
    Window {
        lo: window.lo.iter().zip(&pad).map(|(a, p)| a - p).collect(),
        hi: window.hi.iter().zip(&pad).map(|(a, p)| a + p).collect(),
    }
}

/// T from the Čech bicomplex of M on the cover, for any toric stack.
pub fn fm_transform<K: Field, M: GradedModule<K> + ?Sized>(
    m: &M,
    window: &Window,
    bound: ExpBound,
) -> Result<TateResult<K>, TateError> {
    let x = m.stack();
    let k = m.field();
    let wide = fm_module_window(x, window);
    let pts = wide.points();
    let t = stable_exponent(m, &x.cover, &pts, bound, false)?;
    let cech = CechData::new(&x.cover, t, false);
    let top = cech.levels.len() - 1;
    let levels: Vec<CechLevel<'_, M>> = (0..=top).rev().map(|l| CechLevel { m, shifts: cech.shifts(x, l) }).collect();
    let mut c = ModuleComplex { terms: levels.iter().map(|l| l as &dyn GradedModule<K>).collect(), maps: Vec::new() };
    for j in 0..top {
        let cech = &cech;
        c.maps.push(Box::new(move |a: &Degree| cech.map(m, top - j - 1, a)));
    }
    let spec = BGGWindowSpec::new(x, wide);
    let mut tot = r_complex(k, x, &c, &spec);
    for g in tot.gens.iter_mut() {
        g.u += top as i64;
    }
    let tm = tot.minimize();
    let table = socle_readoff(&tm.free_module()).restrict(|a| window.contains(a));
    let exact_columns = tm.safe_columns();
    Ok(TateResult { t: tm, table, construction: Construction::Fm, safe_window: window.clone(), exact_columns })
}

/// Laurent monomials μ with deg μ in `window`. Exponents of a maximal set
/// of variables with independent degrees are solved for; the rest range
/// over [-e, e].
pub fn laurent_monomials(x: &ToricStack, window: &Window, e: i64) -> Vec<Vec<i64>> {
    let n = x.nvars();
    let r = x.r;
    let mut solved: Vec<usize> = Vec::new();
    for i in 0..n {
        let mut trial = solved.clone();
        trial.push(i);
        if int_det_minor(x, &trial).is_some() {
            solved = trial;
        }
        if solved.len() == r {
            break;
        }
    }
    let det = int_det(&square(x, &solved));
    let adj = adjugate(&square(x, &solved));
    let free: Vec<usize> = (0..n).filter(|i| !solved.contains(i)).collect();
    let targets = window.points();
    let mut out = Vec::new();
    let mut cur = vec![-e; free.len()];
    loop {
        let mut base = Degree::zero(r);
        for (&i, &v) in free.iter().zip(&cur) {
            base = &base + &x.var_degrees[i].scale(v);
        }
        for a in &targets {
            let rhs = a - &base;
            let sol: Vec<i64> = (0..r).map(|p| (0..r).map(|q| adj[p][q] * rhs.0[q]).sum()).collect();
            if sol.iter().all(|v| v % det == 0) {
                let mut mu = vec![0i64; n];
                for (&i, &v) in free.iter().zip(&cur) {
                    mu[i] = v;
                }
                for (&i, v) in solved.iter().zip(sol) {
                    mu[i] = v / det;
                }
                out.push(mu);
            }
        }
        let mut p = 0;
        while p < cur.len() && cur[p] == e {
            cur[p] = -e;
            p += 1;
        }
        if p == cur.len() {
            break;
        }
        cur[p] += 1;
    }
    out
}

fn square(x: &ToricStack, vars: &[usize]) -> Vec<Vec<i64>> {
    (0..x.r).map(|row| vars.iter().map(|&i| x.var_degrees[i].0[row]).collect()).collect()
}

/// Nonzero when the degrees of `vars` are independent (over the first rows).
fn int_det_minor(x: &ToricStack, vars: &[usize]) -> Option<()> {
    let m = square(x, vars);
    let k = vars.len();
    // some k×k minor is nonzero
    let rows: Vec<usize> = (0..x.r).collect();
    let mut pick = vec![0usize; k];
    fn go(m: &[Vec<i64>], rows: &[usize], pick: &mut Vec<usize>, depth: usize, start: usize) -> bool {
        if depth == pick.len() {
            let sub: Vec<Vec<i64>> = pick.iter().map(|&r| m[r].clone()).collect();
            return int_det(&sub) != 0;
        }
        (start..rows.len()).any(|r| {
            pick[depth] = r;
            go(m, rows, pick, depth + 1, r + 1)
        })
    }
    go(&m, &rows, &mut pick, 0, 0).then_some(())
}

fn neg_mask(mu: &[i64]) -> u64 {
    mu.iter().enumerate().filter(|(_, &v)| v < 0).fold(0, |acc, (i, _)| acc | 1 << i)
}

/// Subsets J of the cover (nonempty) with N ⊆ U_J: the Čech complex of a
/// Laurent monomial with negative support N.
fn cech_cells(cover: &[Vec<usize>], n: u64) -> Vec<u64> {
    (1..1u64 << cover.len())
        .filter(|&j| {
            let u = cover.iter().enumerate().filter(|(s, _)| j >> s & 1 == 1).flat_map(|(_, v)| v.iter()).fold(0u64, |a, &i| a | 1 << i);
            n & !u == 0
        })
        .collect()
}

fn cech_sign(j: u64, s: usize) -> i64 {
    if (j & ((1u64 << s) - 1)).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Total dimension of the cohomology of the Čech complex for negative support N.
fn cell_cohomology<K: Field>(k: &K, cover: &[Vec<usize>], n: u64) -> usize {
    let cells = cech_cells(cover, n);
    let by_level = |l: u32| -> Vec<u64> { cells.iter().copied().filter(|j| j.count_ones() == l).collect() };
    let mut total = cells.len();
    for l in 1..cover.len() as u32 {
        let (src, dst) = (by_level(l), by_level(l + 1));
        if src.is_empty() || dst.is_empty() {
            continue;
        }
        let rows: Vec<Vec<i64>> = dst
            .iter()
            .map(|&j2| {
                src.iter()
                    .map(|&j| if j & j2 == j { cech_sign(j, (j2 & !j).trailing_zeros() as usize) } else { 0 })
                    .collect()
            })
            .collect();
        total -= 2 * rank(k, &Mat::from_i64(k, &rows));
    }
    total
}

/// T(O(b)) from the Čech bicomplex, using the fine grading of S so that
/// every localization is exact. Exponents of Laurent monomials are searched
/// in [-cap, cap].
pub fn fm_line_bundle<K: Field>(
    k: &K,
    x: &ToricStack,
    twist: &Degree,
    window: &Window,
    bound: ExpBound,
) -> Result<TateResult<K>, TateError> {
    let n = x.nvars();
    let cover = &x.cover;
    let top = cover.len() as i64 - 1;
    let wide = fm_module_window(x, window);
    let e = bound.cap as i64;
    let h: Vec<usize> = (0..1u64 << n).map(|nm| cell_cohomology(k, cover, nm)).collect();
    let gens: Vec<Vec<i64>> =
        laurent_monomials(x, &wide.shift(twist), e).into_iter().filter(|mu| h[neg_mask(mu) as usize] > 0).collect();
    if gens.iter().any(|mu| mu.iter().any(|v| v.abs() >= e)) {
        return Err(CohomologyError::NoStabilization(window.lo.clone().into(), bound.cap).into());
    }
    let mut sigma: BTreeSet<Vec<i64>> = BTreeSet::new();
    for mu in &gens {
        for kk in 0..1u64 << n {
            let mut nu = mu.clone();
            for (i, v) in nu.iter_mut().enumerate() {
                *v += (kk >> i & 1) as i64;
            }
            sigma.insert(nu);
        }
    }
    let mut index: HashMap<(Vec<i64>, u64), usize> = HashMap::new();
    let mut twists = Vec::new();
    for mu in &sigma {
        let deg = &mono_degree_i64(x, mu) - twist;
        for j in cech_cells(cover, neg_mask(mu)) {
            index.insert((mu.clone(), j), twists.len());
            twists.push(OmegaTwist::new(-&deg, j.count_ones() as i64 - 1));
        }
    }
    let mut d = FreeDiffModule::new(k, x, twists, wide.shift(&x.w()));
    for ((mu, j), &src) in &index {
        let l = j.count_ones() as i64 - 1;
        let hs = k.from_i64(if (top - l) % 2 == 0 { 1 } else { -1 });
        for i in 0..n {
            let mut nu = mu.clone();
            nu[i] += 1;
            if let Some(&dst) = index.get(&(nu, *j)) {
                d.add_entry(dst, src, &ExtElem::term(ExtMonomial::var(i), hs.clone()));
            }
        }
        for s in 0..cover.len() {
            if j >> s & 1 == 0 {
                if let Some(&dst) = index.get(&(mu.clone(), j | 1 << s)) {
                    d.add_entry(dst, src, &ExtElem::scalar(k.from_i64(cech_sign(*j, s))));
                }
            }
        }
    }
    let tm = d.minimize();
    let table = socle_readoff(&tm.free_module()).restrict(|a| window.contains(a));
    let exact_columns = tm.safe_columns();
    Ok(TateResult { t: tm, table, construction: Construction::Fm, safe_window: window.clone(), exact_columns })
}

fn mono_degree_i64(x: &ToricStack, mu: &[i64]) -> Degree {
    mu.iter().enumerate().fold(Degree::zero(x.r), |acc, (i, &v)| &acc + &x.var_degrees[i].scale(v))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exactness {
    Exact,
    /// Columns with nonzero homology.
    Fails(Vec<Degree>),
    NotApplicable,
}

/// Whether T ⊗_E E_I is exact on `columns`; not applicable unless I is irrelevant.
pub fn check_exactness_property<K: Field>(t: &FreeDiffModule<K>, set: &[usize], columns: &[Degree]) -> Result<Exactness, TateError> {
    if !t.x.is_irrelevant_subset(set)? {
        return Ok(Exactness::NotApplicable);
    }
    let ti = t.tensor_ei(set);
    let bad: Vec<Degree> = columns
        .iter()
        .zip(ti.homology_columns(columns))
        .filter(|(_, h)| h.values().any(|&v| v > 0))
        .map(|(b, _)| b.clone())
        .collect();
    Ok(if bad.is_empty() { Exactness::Exact } else { Exactness::Fails(bad) })
}

/// Differential entries only go from aux level u to levels <= u.
pub fn check_filtration<K: Field>(t: &FreeDiffModule<K>) -> bool {
    t.cols.iter().enumerate().all(|(c, col)| col.keys().all(|&s| t.gens[s].u <= t.gens[c].u))
}

/// Head of T: the generators ω_E(-a; 0).
pub fn head<K: Field>(t: &FreeDiffModule<K>) -> FreeDiffModule<K> {
    let keep: Vec<usize> = (0..t.len()).filter(|&i| t.gens[i].u == 0).collect();
    t.submodule(&keep)
}

/// Compare the head of a weighted Tate resolution with R(M).
///
/// The head has dim H^0(F(a)) generators at each degree a of the safe
/// window, all its entries are linear, and on degrees a >= d where M is
/// saturated its homology matches that of R(M_{≥d}).
pub fn check_r_embedding<K: Field>(
    res: &TateResult<K>,
    k: &K,
    x: &ToricStack,
    pres: &Presentation<K::Elem>,
    d: i64,
) -> Result<bool, TateError> {
    let m = LazyModule::new(k, x, pres);
    let (lo, hi) = (res.safe_window.lo[0], res.safe_window.hi[0]);
    if let Some(a) = (lo..=hi).find(|&a| socle_dim(&m, &Degree::from(a)) > 0) {
        return Err(TateError::Precondition(format!("H^0_B(M) is nonzero in degree {a}")));
    }
    let h = head(&res.t);
    let bound = ExpBound::default();
    for a in lo..=hi {
        let a = Degree::from(a);
        let n = h.gens.iter().filter(|g| g.c == -&a).count();
        if n != crate::cohomology::sheaf_cohomology_oracle(&m, &a, 0, bound)? {
            return Ok(false);
        }
    }
    if !h.cols.iter().all(|c| c.values().all(|e| e.terms.iter().all(|(mono, _)| mono.len() == 1))) {
        return Ok(false);
    }
    let w = x.w();
    let md = m.truncate(Threshold::Theta(d));
    let spec = BGGWindowSpec::new(x, Window::interval(d - 1, hi));
    let r = r_functor(&md, &spec);
    let upper: Vec<usize> = (0..h.len()).filter(|&i| x.theta_of(&-&h.gens[i].c) >= d - 1).collect();
    let hu = h.submodule(&upper);
    let cols: Vec<Degree> = r.safe_columns().into_iter().filter(|b| x.theta_of(&(b - &w)) >= d).collect();
    Ok(hu.homology_columns(&cols) == r.homology_columns(&cols))
}

/// U(D) = L(D') where D' keeps the generators whose top degree is effective,
/// realized at the S-degrees `degrees`.
pub fn beilinson_u<K: Field>(d: &FreeDiffModule<K>, degrees: &[Degree]) -> GradedComplex<K::Elem> {
    let x = &d.x;
    let w = x.w();
    let keep: Vec<usize> = (0..d.len()).filter(|&i| x.cone_contains(&(&w - &d.gens[i].c))).collect();
    let dp = d.submodule(&keep);
    let sums = x.subset_sums();
    let mut columns: BTreeSet<Degree> = BTreeSet::new();
    for g in &dp.gens {
        let top = &w - &g.c;
        for s in &sums {
            let a = &top - s;
            if degrees.iter().any(|b| x.cone_contains(&(b - &a))) {
                columns.insert(a);
            }
        }
    }
    let columns: Vec<Degree> = columns.into_iter().collect();
    l_functor(&dp, degrees, &columns, (1u64 << x.nvars()) - 1)
}

/// H_i(U(D)) = 0 for i != 0 and dim H_0 at b equals `sections(b)` on `degrees`.
pub fn check_beilinson<K: Field>(d: &FreeDiffModule<K>, degrees: &[Degree], sections: impl Fn(&Degree) -> usize) -> bool {
    let u = beilinson_u(d, degrees);
    degrees.iter().all(|b| {
        u.homology(&d.k, b).iter().enumerate().all(|(j, &v)| {
            let want = if j as i64 + u.shift == 0 { sections(b) } else { 0 };
            v == want
        })
    })
}
