//! Minimal free resolutions of free differential E-modules on a window.
//!
//! Columns are swept in decreasing theta-degree. At each column every
//! homology class z in auxiliary degree j is killed by a new generator g
//! with top (b; j+1) and ∂g = z. A new generator only adds elements in
//! strictly lower columns, so one pass suffices.

use crate::diffmod::{column_maps_dense, DMMorphism, DiffModError, FreeDiffModule};
use crate::exterior::{ExtElem, OmegaTwist};
use crate::linalg::{homology_reps, Field, LinalgError, RepPolicy};
use crate::toric::Degree;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ResolutionError {
    #[error(transparent)]
    DiffMod(#[from] DiffModError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// F with its augmentation eps: F → D. `level` on F records the flag round.
#[derive(Clone, Debug)]
pub struct Resolution<K: Field> {
    pub f: FreeDiffModule<K>,
    pub eps: DMMorphism<K>,
    pub floor: i64,
    /// Cancellations needed to make F minimal; zero for every input seen so far.
    pub cancelled: usize,
}

impl<K: Field> Resolution<K> {
    pub fn cone(&self) -> Result<FreeDiffModule<K>, DiffModError> {
        self.eps.cone()
    }
}

/// Safe columns of `d` at or above the theta floor, highest first.
pub fn sweep_columns<K: Field>(d: &FreeDiffModule<K>, floor: i64) -> Vec<Degree> {
    let mut cols: Vec<Degree> = d.safe_columns().into_iter().filter(|b| d.x.theta_of(b) >= floor).collect();
    cols.sort_by(|a, b| d.x.theta_of(b).cmp(&d.x.theta_of(a)).then_with(|| b.cmp(a)));
    cols
}

pub fn min_free_resolution<K: Field>(
    d: &FreeDiffModule<K>,
    floor: i64,
    policy: RepPolicy,
) -> Result<Resolution<K>, ResolutionError> {
    let k = &d.k;
    let x = &d.x;
    let cols = sweep_columns(d, floor);
    if !d.check_square_zero_on(&cols) {
        return Err(DiffModError::NotSquareZero.into());
    }
    let w = x.w();
    let n = x.nvars() as i64 - 1;
    let base = d.len();
    let mut work = d.clone();
    for b in &cols {
        let c = work.column(b);
        let mut cells: Vec<(OmegaTwist, BTreeMap<usize, ExtElem<K::Elem>>, i64)> = Vec::new();
        for (&l, basis) in &c.basis {
            let (into, out) = column_maps_dense(k, &c, l);
            for rep in homology_reps(k, &into, &out, policy)? {
                let mut col: BTreeMap<usize, Vec<_>> = BTreeMap::new();
                for (p, v) in rep.iter().enumerate() {
                    if !k.is_zero(v) {
                        let (t, m) = basis[p];
                        col.entry(t).or_default().push((m, v.clone()));
                    }
                }
                let level = col.keys().filter(|&&t| t >= base).map(|&t| work.level[t] + 1).max().unwrap_or(0);
                let col = col.into_iter().map(|(t, terms)| (t, ExtElem::from_terms(k, terms))).collect();
                cells.push((OmegaTwist::new(&w - b, n - l), col, level));
            }
        }
        for (g, col, level) in cells {
            work.gens.push(g);
            work.level.push(level);
            work.cols.push(col);
        }
    }
    let gens: Vec<OmegaTwist> = work.gens[base..].iter().map(|g| OmegaTwist::new(g.c.clone(), g.u + 1)).collect();
    let mut f = FreeDiffModule::new(k, x, gens, d.window.clone());
    f.level = work.level[base..].to_vec();
    let mut eps = DMMorphism::zero(&f, d);
    for (t, col) in work.cols[base..].iter().enumerate() {
        for (s, e) in col {
            if *s >= base {
                f.cols[t].insert(s - base, e.neg(k));
            } else {
                eps.cols[t].insert(*s, e.clone());
            }
        }
    }
    eps.source = f.clone();
    let mut cancelled = 0;
    if !f.check_minimal() {
        let (fm, c) = f.minimize_counted();
        eprintln!("warning: resolution needed {c} extra cancellations");
        f = fm;
        cancelled = c;
    }
    Ok(Resolution { f, eps, floor, cancelled })
}

/// cone(eps) is exact on every safe column at or above `floor`.
pub fn verify_quasi_iso<K: Field>(eps: &DMMorphism<K>, floor: i64) -> Result<bool, DiffModError> {
    let c = eps.cone()?;
    let cols = sweep_columns(&c, floor);
    Ok(c.homology_columns(&cols).iter().all(|h| h.values().all(|&v| v == 0)))
}

/// Every differential entry goes from a later round to a strictly earlier one.
pub fn is_free_flag<K: Field>(f: &FreeDiffModule<K>) -> bool {
    f.cols.iter().enumerate().all(|(t, c)| c.keys().all(|&s| f.level[s] < f.level[t]))
}
