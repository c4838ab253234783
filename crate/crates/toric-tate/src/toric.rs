//! Degrees, gradings, effective cones and the combinatorial data of a
//! projective toric stack.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ToricError {
    #[error("degree {0} has length {1}, expected {2}")]
    Rank(String, usize, usize),
    #[error("positive grading fails on variable {0}: theta value {1} is not positive")]
    NotPositive(usize, i64),
    #[error("effective cone generator {0} has non-positive theta value")]
    BadConeGenerator(String),
    #[error("variable index {0} out of range")]
    Index(usize),
    #[error("irrelevant support {0} is empty")]
    EmptySupport(usize),
    #[error("deg_I for collection {0:?} violates the sign conditions at variable {1}")]
    DegISign(Vec<usize>, usize),
    #[error("deg_I vector for collection {0:?} has length {1}, expected {2}")]
    DegILength(Vec<usize>, usize, usize),
    #[error("unknown primitive collection {0:?}")]
    UnknownCollection(Vec<usize>),
    #[error("requires a Z-graded stack (class group rank 1), got rank {0}")]
    NotZGraded(usize),
    #[error("requires positive variable degrees")]
    NonPositiveWeight,
    #[error("empty window bound: lo {0} > hi {1}")]
    EmptyWindow(i64, i64),
    #[error("at most 62 variables are supported")]
    TooManyVariables,
}

/// An element of Cl(X) = Z^r.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Degree(pub Vec<i64>);

impl Degree {
    pub fn zero(r: usize) -> Self {
        Degree(vec![0; r])
    }
    pub fn rank(&self) -> usize {
        self.0.len()
    }
    pub fn scale(&self, t: i64) -> Degree {
        Degree(self.0.iter().map(|v| v * t).collect())
    }
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0)
    }
}

impl From<Vec<i64>> for Degree {
    fn from(v: Vec<i64>) -> Self {
        Degree(v)
    }
}

impl From<i64> for Degree {
    fn from(v: i64) -> Self {
        Degree(vec![v])
    }
}

impl fmt::Debug for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            write!(f, "(")?;
            for (i, v) in self.0.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, ")")
        }
    }
}

impl Add for &Degree {
    type Output = Degree;
    fn add(self, o: &Degree) -> Degree {
        debug_assert_eq!(self.0.len(), o.0.len());
        Degree(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Degree {
    type Output = Degree;
    fn sub(self, o: &Degree) -> Degree {
        debug_assert_eq!(self.0.len(), o.0.len());
        Degree(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Degree {
    type Output = Degree;
    fn neg(self) -> Degree {
        Degree(self.0.iter().map(|a| -a).collect())
    }
}

impl Add for Degree {
    type Output = Degree;
    fn add(self, o: Degree) -> Degree {
        &self + &o
    }
}

impl Sub for Degree {
    type Output = Degree;
    fn sub(self, o: Degree) -> Degree {
        &self - &o
    }
}

impl Neg for Degree {
    type Output = Degree;
    fn neg(self) -> Degree {
        -&self
    }
}

/// A Cl(X) degree together with the auxiliary Z-degree of the exterior side.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AuxDegree {
    pub cl: Degree,
    pub aux: i64,
}

/// A linear functional on Cl(X) that is positive on every variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositiveGrading {
    pub theta: Vec<i64>,
}

impl PositiveGrading {
    pub fn eval(&self, d: &Degree) -> i64 {
        self.theta.iter().zip(&d.0).map(|(a, b)| a * b).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EffCone {
    pub generators: Vec<Degree>,
}

/// A primitive collection I with its grading functional deg_I on variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimitiveCollection {
    pub vars: Vec<usize>,
    pub deg_i: Vec<i64>,
}

/// A box of degrees, inclusive on both ends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl Window {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Result<Self, ToricError> {
        assert_eq!(lo.len(), hi.len());
        for (l, h) in lo.iter().zip(&hi) {
            if l > h {
                return Err(ToricError::EmptyWindow(*l, *h));
            }
        }
        Ok(Window { lo, hi })
    }

    pub fn interval(lo: i64, hi: i64) -> Self {
        Window { lo: vec![lo], hi: vec![hi] }
    }

    /// A window with no points.
    pub fn empty(r: usize) -> Self {
        Window { lo: vec![0; r], hi: vec![-1; r] }
    }

    pub fn rank(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(l, h)| l > h)
    }

    pub fn contains(&self, d: &Degree) -> bool {
        d.0.iter().enumerate().all(|(i, v)| self.lo[i] <= *v && *v <= self.hi[i])
    }

    /// All lattice points, lexicographically.
    pub fn points(&self) -> Vec<Degree> {
        if self.is_empty() {
            return Vec::new();
        }
        let mut out = vec![Vec::new()];
        for (l, h) in self.lo.iter().zip(&self.hi) {
            let mut next = Vec::new();
            for p in &out {
                for v in *l..=*h {
                    let mut q = p.clone();
                    q.push(v);
                    next.push(q);
                }
            }
            out = next;
        }
        out.into_iter().map(Degree).collect()
    }

    pub fn shift(&self, d: &Degree) -> Window {
        Window {
            lo: self.lo.iter().zip(&d.0).map(|(a, b)| a + b).collect(),
            hi: self.hi.iter().zip(&d.0).map(|(a, b)| a + b).collect(),
        }
    }

    /// Smallest box containing both.
    pub fn hull(&self, o: &Window) -> Window {
        if self.is_empty() {
            return o.clone();
        }
        if o.is_empty() {
            return self.clone();
        }
        Window {
            lo: self.lo.iter().zip(&o.lo).map(|(a, b)| *a.min(b)).collect(),
            hi: self.hi.iter().zip(&o.hi).map(|(a, b)| *a.max(b)).collect(),
        }
    }
}

/// Weight sequences of a weighted projective stack.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Weights {
    pub w: i64,
    /// `upper[i]` is w^i for i = 0..=n+2.
    pub upper: Vec<i64>,
    /// `lower[i]` is w_i for i = 0..=n+1.
    pub lower: Vec<i64>,
}

impl Weights {
    /// w^i with the conventions w^{-1} = -1 and w^i = w^{n+2} beyond the end.
    pub fn w_upper(&self, i: i64) -> i64 {
        if i < 0 {
            -1
        } else {
            self.upper[(i as usize).min(self.upper.len() - 1)]
        }
    }

    /// w_i with w_{-1} = -1.
    pub fn w_lower(&self, i: i64) -> i64 {
        if i < 0 {
            -1
        } else {
            self.lower[(i as usize).min(self.lower.len() - 1)]
        }
    }
}

/// The combinatorial data of a projective toric stack.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricStack {
    pub r: usize,
    pub var_degrees: Vec<Degree>,
    pub irrelevant: Vec<Vec<usize>>,
    pub cover: Vec<Vec<usize>>,
    pub theta: PositiveGrading,
    pub eff: EffCone,
    pub primitive: Vec<PrimitiveCollection>,
}

impl ToricStack {
    /// Validates all invariants. `cover` and `eff` default to the irrelevant
    /// supports and the variable degrees.
    pub fn new(
        var_degrees: Vec<Degree>,
        irrelevant: Vec<Vec<usize>>,
        cover: Option<Vec<Vec<usize>>>,
        theta: Vec<i64>,
        eff: Option<Vec<Degree>>,
        primitive: Vec<PrimitiveCollection>,
    ) -> Result<Self, ToricError> {
        let r = theta.len();
        let nv = var_degrees.len();
        if nv > 62 {
            return Err(ToricError::TooManyVariables);
        }
        let theta = PositiveGrading { theta };
        for (i, d) in var_degrees.iter().enumerate() {
            if d.rank() != r {
                return Err(ToricError::Rank(d.to_string(), d.rank(), r));
            }
            let t = theta.eval(d);
            if t <= 0 {
                return Err(ToricError::NotPositive(i, t));
            }
        }
        let check_sets = |sets: &Vec<Vec<usize>>| -> Result<(), ToricError> {
            for (j, s) in sets.iter().enumerate() {
                if s.is_empty() {
                    return Err(ToricError::EmptySupport(j));
                }
                if let Some(&bad) = s.iter().find(|&&i| i >= nv) {
                    return Err(ToricError::Index(bad));
                }
            }
            Ok(())
        };
        check_sets(&irrelevant)?;
        let cover = cover.unwrap_or_else(|| irrelevant.clone());
        check_sets(&cover)?;
        let eff = EffCone { generators: eff.unwrap_or_else(|| var_degrees.clone()) };
        for g in &eff.generators {
            if g.rank() != r {
                return Err(ToricError::Rank(g.to_string(), g.rank(), r));
            }
            if theta.eval(g) <= 0 {
                return Err(ToricError::BadConeGenerator(g.to_string()));
            }
        }
        for pc in &primitive {
            if pc.deg_i.len() != nv {
                return Err(ToricError::DegILength(pc.vars.clone(), pc.deg_i.len(), nv));
            }
            if let Some(&bad) = pc.vars.iter().find(|&&i| i >= nv) {
                return Err(ToricError::Index(bad));
            }
            for (l, &v) in pc.deg_i.iter().enumerate() {
                let inside = pc.vars.contains(&l);
                if (inside && v <= 0) || (!inside && v > 0) {
                    return Err(ToricError::DegISign(pc.vars.clone(), l));
                }
            }
        }
        Ok(ToricStack { r, var_degrees, irrelevant, cover, theta, eff, primitive })
    }

    /// P(d_0, ..., d_n): B is the maximal ideal, so each variable is a support.
    pub fn weighted_projective(weights: &[i64]) -> Result<Self, ToricError> {
        let degs = weights.iter().map(|&d| Degree(vec![d])).collect();
        let supports = (0..weights.len()).map(|i| vec![i]).collect();
        Self::new(degs, supports, None, vec![1], None, Vec::new())
    }

    /// P^1 x P^1 with x0, x2 of degree (1,0) and x1, x3 of degree (0,1).
    pub fn p1xp1() -> Self {
        let degs = vec![Degree(vec![1, 0]), Degree(vec![0, 1]), Degree(vec![1, 0]), Degree(vec![0, 1])];
        let pcs = vec![
            PrimitiveCollection { vars: vec![0, 2], deg_i: vec![1, 0, 1, 0] },
            PrimitiveCollection { vars: vec![1, 3], deg_i: vec![0, 1, 0, 1] },
        ];
        Self::new(degs, Self::two_by_two_supports(), None, vec![1, 1], None, pcs).expect("valid")
    }

    /// The Hirzebruch surface F_a: x0, x2 of degree (1,0), x1 of degree
    /// (-a,1), x3 of degree (0,1), B = (x0,x2) ∩ (x1,x3).
    pub fn hirzebruch(a: i64) -> Self {
        let degs = vec![Degree(vec![1, 0]), Degree(vec![-a, 1]), Degree(vec![1, 0]), Degree(vec![0, 1])];
        let pcs = vec![
            PrimitiveCollection { vars: vec![0, 2], deg_i: vec![1, -a, 1, 0] },
            PrimitiveCollection { vars: vec![1, 3], deg_i: vec![0, 1, 0, 1] },
        ];
        Self::new(degs, Self::two_by_two_supports(), None, vec![1, a + 1], None, pcs).expect("valid")
    }

    fn two_by_two_supports() -> Vec<Vec<usize>> {
        vec![vec![0, 1], vec![0, 3], vec![1, 2], vec![2, 3]]
    }

    pub fn nvars(&self) -> usize {
        self.var_degrees.len()
    }

    /// Sum of all variable degrees.
    pub fn w(&self) -> Degree {
        self.var_degrees.iter().fold(Degree::zero(self.r), |a, b| &a + b)
    }

    pub fn theta_of(&self, d: &Degree) -> i64 {
        self.theta.eval(d)
    }

    /// Degree of the squarefree monomial on the variables in `mask`.
    pub fn mask_degree(&self, mask: u64) -> Degree {
        let mut d = Degree::zero(self.r);
        for i in 0..self.nvars() {
            if mask >> i & 1 == 1 {
                for (a, b) in d.0.iter_mut().zip(&self.var_degrees[i].0) {
                    *a += b;
                }
            }
        }
        d
    }

    /// All 2^{n+1} subset sums, indexed by bit mask.
    pub fn subset_sums(&self) -> Vec<Degree> {
        (0..1u64 << self.nvars()).map(|m| self.mask_degree(m)).collect()
    }

    pub fn is_irrelevant_subset(&self, set: &[usize]) -> Result<bool, ToricError> {
        if let Some(&bad) = set.iter().find(|&&i| i >= self.nvars()) {
            return Err(ToricError::Index(bad));
        }
        Ok(self.irrelevant.iter().all(|s| s.iter().any(|i| set.contains(i))))
    }

    pub fn cone_contains(&self, d: &Degree) -> bool {
        cone_contains(&self.eff, &self.theta, d)
    }

    pub fn weights_zgraded(&self) -> Result<Weights, ToricError> {
        if self.r != 1 {
            return Err(ToricError::NotZGraded(self.r));
        }
        let mut ds: Vec<i64> = self.var_degrees.iter().map(|d| d.0[0]).collect();
        if ds.iter().any(|&d| d <= 0) {
            return Err(ToricError::NonPositiveWeight);
        }
        ds.sort_unstable();
        let n1 = ds.len();
        let mut upper = vec![0];
        for i in 1..=n1 {
            upper.push(ds[n1 - i..].iter().sum());
        }
        upper.push(upper[n1] + 1);
        let mut lower = vec![0];
        for i in 1..=n1 {
            lower.push(ds[..i].iter().sum());
        }
        Ok(Weights { w: ds.iter().sum(), upper, lower })
    }

    pub fn collection(&self, set: &[usize]) -> Result<&PrimitiveCollection, ToricError> {
        let mut want = set.to_vec();
        want.sort_unstable();
        self.primitive
            .iter()
            .find(|pc| {
                let mut v = pc.vars.clone();
                v.sort_unstable();
                v == want
            })
            .ok_or_else(|| ToricError::UnknownCollection(set.to_vec()))
    }

    /// `result[j]` is w^j_I for j = 0..=#I.
    pub fn weights_deg_i(&self, set: &[usize]) -> Result<Vec<i64>, ToricError> {
        let pc = self.collection(set)?;
        let mut vals: Vec<i64> = pc.vars.iter().map(|&i| pc.deg_i[i]).collect();
        vals.sort_unstable_by(|a, b| b.cmp(a));
        let mut out = vec![0];
        for j in 1..=vals.len() {
            out.push(vals[..j].iter().sum());
        }
        Ok(out)
    }

    /// Degrees a of `win` with a + s in `win` for every subset sum s.
    pub fn safe_region(&self, win: &Window) -> Vec<Degree> {
        let sums = self.subset_sums();
        win.points().into_iter().filter(|a| sums.iter().all(|s| win.contains(&(a + s)))).collect()
    }
}

/// Whether `d` is a nonnegative integer combination of the cone generators.
pub fn cone_contains(c: &EffCone, theta: &PositiveGrading, d: &Degree) -> bool {
    fn go(gens: &[Degree], th: &[i64], d: &Degree, theta: &PositiveGrading) -> bool {
        if d.is_zero() {
            return true;
        }
        let Some((g, rest)) = gens.split_first() else {
            return false;
        };
        let t = theta.eval(d);
        if t < 0 {
            return false;
        }
        let mut cur = d.clone();
        for _ in 0..=(t / th[0]) {
            if go(rest, &th[1..], &cur, theta) {
                return true;
            }
            cur = &cur - g;
        }
        false
    }
    if theta.eval(d) < 0 {
        return false;
    }
    let th: Vec<i64> = c.generators.iter().map(|g| theta.eval(g)).collect();
    go(&c.generators, &th, d, theta)
}

/// Determinant of a small integer matrix by cofactor expansion.
pub(crate) fn int_det(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|c| {
                let minor: Vec<Vec<i64>> = m[1..].iter().map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, v)| *v).collect()).collect();
                let s = if c % 2 == 0 { 1 } else { -1 };
                s * m[0][c] * int_det(&minor)
            })
            .sum(),
    }
}

/// Adjugate, so that m · adj(m) = det(m) · I.
pub(crate) fn adjugate(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = m.len();
    if n == 1 {
        return vec![vec![1]];
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let minor: Vec<Vec<i64>> = m
                        .iter()
                        .enumerate()
                        .filter(|(r, _)| *r != j)
                        .map(|(_, row)| row.iter().enumerate().filter(|(c, _)| *c != i).map(|(_, v)| *v).collect())
                        .collect();
                    let s = if (i + j) % 2 == 0 { 1 } else { -1 };
                    s * int_det(&minor)
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn irrelevant_subsets() {
        let p112 = ToricStack::weighted_projective(&[1, 1, 2]).unwrap();
        assert!(p112.is_irrelevant_subset(&[0, 1, 2]).unwrap());
        assert!(!p112.is_irrelevant_subset(&[0]).unwrap());
        let h3 = ToricStack::hirzebruch(3);
        assert!(h3.is_irrelevant_subset(&[0, 2]).unwrap());
        assert!(h3.is_irrelevant_subset(&[1, 3]).unwrap());
        assert!(!h3.is_irrelevant_subset(&[0, 1]).unwrap());
        assert!(!h3.is_irrelevant_subset(&[]).unwrap());
        assert_eq!(h3.is_irrelevant_subset(&[7]), Err(ToricError::Index(7)));
    }

    #[test]
    fn single_support_containing_everything() {
        // One generator x0 x1 ... xn: any variable meets its support.
        let st = ToricStack::new(
            vec![Degree(vec![1]), Degree(vec![1]), Degree(vec![2])],
            vec![vec![0, 1, 2]],
            None,
            vec![1],
            None,
            vec![],
        )
        .unwrap();
        assert!(st.is_irrelevant_subset(&[0]).unwrap());
    }

    #[test]
    fn cone_examples() {
        let p12 = ToricStack::weighted_projective(&[1, 2]).unwrap();
        assert!(p12.cone_contains(&Degree(vec![0])));
        assert!(p12.cone_contains(&Degree(vec![5])));
        assert!(!p12.cone_contains(&Degree(vec![-1])));
        let h3 = ToricStack::hirzebruch(3);
        assert!(h3.cone_contains(&Degree(vec![-3, 1])));
        assert!(!h3.cone_contains(&Degree(vec![-4, 1])));
        assert!(h3.cone_contains(&Degree(vec![-1, 1])));
    }

    #[test]
    fn weights() {
        let w = ToricStack::weighted_projective(&[1, 5, 6]).unwrap().weights_zgraded().unwrap();
        assert_eq!(&w.upper[1..4], &[6, 11, 12]);
        assert_eq!(w.w_upper(4), 13);
        assert_eq!(w.w_upper(-1), -1);
        assert_eq!(w.w_lower(-1), -1);
        assert_eq!(w.w_lower(2), 6);
        let p2 = ToricStack::weighted_projective(&[1, 1, 1]).unwrap().weights_zgraded().unwrap();
        assert_eq!(&p2.upper[..4], &[0, 1, 2, 3]);
        let p112 = ToricStack::weighted_projective(&[1, 1, 2]).unwrap().weights_zgraded().unwrap();
        assert_eq!(p112.w, 4);
        assert_eq!(&p112.upper[1..4], &[2, 3, 4]);
        assert_eq!(ToricStack::hirzebruch(3).weights_zgraded(), Err(ToricError::NotZGraded(2)));
    }

    #[test]
    fn weights_for_collections() {
        let h3 = ToricStack::hirzebruch(3);
        assert_eq!(h3.weights_deg_i(&[0, 2]).unwrap(), vec![0, 1, 2]);
        assert_eq!(h3.weights_deg_i(&[1, 3]).unwrap()[2], 2);
        assert!(h3.weights_deg_i(&[0, 1]).is_err());
        let st = ToricStack::new(
            vec![Degree(vec![1])],
            vec![vec![0]],
            None,
            vec![1],
            None,
            vec![PrimitiveCollection { vars: vec![0], deg_i: vec![1] }],
        )
        .unwrap();
        assert_eq!(st.weights_deg_i(&[0]).unwrap()[1], 1);
    }

    #[test]
    fn safe_regions() {
        let p1 = ToricStack::weighted_projective(&[1, 1]).unwrap();
        let safe = p1.safe_region(&Window::interval(0, 10));
        assert_eq!(safe, (0..=8).map(Degree::from).collect::<Vec<_>>());
        let p112 = ToricStack::weighted_projective(&[1, 1, 2]).unwrap();
        let safe = p112.safe_region(&Window::interval(-8, 8));
        assert_eq!(safe.first(), Some(&Degree::from(-8)));
        assert_eq!(safe.last(), Some(&Degree::from(4)));
        assert!(p1.safe_region(&Window::empty(1)).is_empty());
    }

    #[test]
    fn validation() {
        let bad = ToricStack::new(vec![Degree(vec![0]), Degree(vec![1])], vec![vec![0, 1]], None, vec![1], None, vec![]);
        assert_eq!(bad, Err(ToricError::NotPositive(0, 0)));
        let bad_deg_i = ToricStack::new(
            vec![Degree(vec![1]), Degree(vec![1])],
            vec![vec![0], vec![1]],
            None,
            vec![1],
            None,
            vec![PrimitiveCollection { vars: vec![0], deg_i: vec![1, 1] }],
        );
        assert!(matches!(bad_deg_i, Err(ToricError::DegISign(_, 1))));
        assert!(Window::new(vec![3], vec![2]).is_err());
    }

    proptest! {
        #[test]
        fn cone_closed_under_generators(a in -6i64..6, b in -3i64..4, g in 0usize..3) {
            let h3 = ToricStack::hirzebruch(3);
            let d = Degree(vec![a, b]);
            if h3.cone_contains(&d) {
                prop_assert!(h3.cone_contains(&(&d + &h3.eff.generators[g])));
            }
            if h3.theta_of(&d) < 0 {
                prop_assert!(!h3.cone_contains(&d));
            }
        }
    }
}
