//! The exterior algebra E on e_0..e_n with deg e_i = (-deg x_i; -1),
//! signed monomial products, and free modules built from twists of ω_E.

use crate::linalg::Field;
use crate::toric::{AuxDegree, Degree, ToricStack};
use std::collections::BTreeMap;
use std::fmt;

/// A squarefree exterior monomial e_A, stored as a bit set.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ExtMonomial(pub u64);

impl ExtMonomial {
    pub const ONE: ExtMonomial = ExtMonomial(0);

    pub fn var(i: usize) -> Self {
        ExtMonomial(1 << i)
    }

    pub fn from_indices(idx: &[usize]) -> Self {
        ExtMonomial(idx.iter().fold(0, |m, &i| m | 1 << i))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn indices(self) -> Vec<usize> {
        (0..64).filter(|&i| self.contains(i)).collect()
    }

    pub fn degree(self, x: &ToricStack) -> AuxDegree {
        AuxDegree { cl: -x.mask_degree(self.0), aux: -(self.len() as i64) }
    }
}

impl fmt::Debug for ExtMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "1");
        }
        for i in self.indices() {
            write!(f, "e{i}")?;
        }
        Ok(())
    }
}

/// (-1)^{#{(a,b) : a in A, b in B, a > b}}.
pub fn shuffle_sign(a: ExtMonomial, b: ExtMonomial) -> i64 {
    let mut inv = 0;
    let mut rest = b.0;
    while rest != 0 {
        let j = rest.trailing_zeros();
        inv += (a.0 >> j >> 1).count_ones();
        rest &= rest - 1;
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// e_A · e_B as a signed monomial, or `None` when A and B meet.
pub fn ext_mul(a: ExtMonomial, b: ExtMonomial) -> Option<(i64, ExtMonomial)> {
    if a.0 & b.0 != 0 {
        return None;
    }
    Some((shuffle_sign(a, b), ExtMonomial(a.0 | b.0)))
}

/// An element of E: a sum of coefficient times monomial, sorted by monomial.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExtElem<E> {
    pub terms: Vec<(ExtMonomial, E)>,
}

impl<E> Default for ExtElem<E> {
    fn default() -> Self {
        ExtElem { terms: Vec::new() }
    }
}

impl<E: Clone> ExtElem<E> {
    pub fn zero() -> Self {
        ExtElem { terms: Vec::new() }
    }

    pub fn term(m: ExtMonomial, c: E) -> Self {
        ExtElem { terms: vec![(m, c)] }
    }

    pub fn scalar(c: E) -> Self {
        Self::term(ExtMonomial::ONE, c)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn from_terms<K: Field<Elem = E>>(k: &K, terms: Vec<(ExtMonomial, E)>) -> Self {
        let mut acc: BTreeMap<ExtMonomial, E> = BTreeMap::new();
        for (m, c) in terms {
            let e = acc.entry(m).or_insert_with(|| k.zero());
            *e = k.add(e, &c);
        }
        ExtElem { terms: acc.into_iter().filter(|(_, c)| !k.is_zero(c)).collect() }
    }

    pub fn add<K: Field<Elem = E>>(&self, k: &K, o: &Self) -> Self {
        let mut t = self.terms.clone();
        t.extend(o.terms.iter().cloned());
        Self::from_terms(k, t)
    }

    pub fn sub<K: Field<Elem = E>>(&self, k: &K, o: &Self) -> Self {
        self.add(k, &o.neg(k))
    }

    pub fn neg<K: Field<Elem = E>>(&self, k: &K) -> Self {
        ExtElem { terms: self.terms.iter().map(|(m, c)| (*m, k.neg(c))).collect() }
    }

    pub fn scale<K: Field<Elem = E>>(&self, k: &K, f: &E) -> Self {
        if k.is_zero(f) {
            return Self::zero();
        }
        ExtElem { terms: self.terms.iter().map(|(m, c)| (*m, k.mul(c, f))).collect() }
    }

    pub fn mul<K: Field<Elem = E>>(&self, k: &K, o: &Self) -> Self {
        let mut out = Vec::new();
        for (a, c) in &self.terms {
            for (b, d) in &o.terms {
                if let Some((s, m)) = ext_mul(*a, *b) {
                    let v = k.mul(c, d);
                    out.push((m, if s < 0 { k.neg(&v) } else { v }));
                }
            }
        }
        Self::from_terms(k, out)
    }

    /// `self · e_m` as signed terms.
    pub fn mul_mono_right<K: Field<Elem = E>>(&self, k: &K, m: ExtMonomial) -> Vec<(ExtMonomial, E)> {
        self.terms
            .iter()
            .filter_map(|(a, c)| ext_mul(*a, m).map(|(s, p)| (p, if s < 0 { k.neg(c) } else { c.clone() })))
            .collect()
    }

    /// Coefficient of the empty monomial.
    pub fn constant(&self) -> Option<&E> {
        self.terms.first().filter(|(m, _)| m.is_empty()).map(|(_, c)| c)
    }

    /// Drop every term involving a variable outside `vars`.
    pub fn restrict(&self, vars: u64) -> Self {
        ExtElem { terms: self.terms.iter().filter(|(m, _)| m.0 & !vars == 0).cloned().collect() }
    }

    /// The common exterior degree of all terms, if homogeneous and nonzero.
    pub fn homogeneous_degree(&self, x: &ToricStack) -> Option<AuxDegree> {
        let d = self.terms.first()?.0.degree(x);
        self.terms.iter().all(|(m, _)| m.degree(x) == d).then_some(d)
    }
}

/// The free summand ω_E(c; u). Its generator sits in degree
/// (w - c; n+1-u) and its socle in degree (-c; -u).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct OmegaTwist {
    pub c: Degree,
    pub u: i64,
}

impl OmegaTwist {
    pub fn new(c: Degree, u: i64) -> Self {
        OmegaTwist { c, u }
    }

    pub fn top(&self, x: &ToricStack) -> AuxDegree {
        AuxDegree { cl: &x.w() - &self.c, aux: x.nvars() as i64 - self.u }
    }

    pub fn socle(&self) -> AuxDegree {
        AuxDegree { cl: -&self.c, aux: -self.u }
    }
}

impl fmt::Display for OmegaTwist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ω_E({};{})", self.c, self.u)
    }
}

/// A free E-module given by its ω_E-twists.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FreeEModule {
    pub generators: Vec<OmegaTwist>,
}

/// Subsets of the exterior variables grouped by their Cl-degree sum.
#[derive(Clone, Debug)]
pub struct SubsetTable {
    pub by_degree: Vec<(Degree, Vec<ExtMonomial>)>,
}

impl SubsetTable {
    pub fn new(x: &ToricStack, vars: u64) -> Self {
        let mut map: BTreeMap<Degree, Vec<ExtMonomial>> = BTreeMap::new();
        for m in 0..1u64 << x.nvars() {
            if m & !vars == 0 {
                map.entry(x.mask_degree(m)).or_default().push(ExtMonomial(m));
            }
        }
        SubsetTable { by_degree: map.into_iter().collect() }
    }
}

impl FreeEModule {
    pub fn new(generators: Vec<OmegaTwist>) -> Self {
        FreeEModule { generators }
    }

    /// Basis of the column at Cl-degree `a`: pairs (generator, monomial)
    /// with their auxiliary degree, ordered by generator then monomial.
    pub fn column_basis(&self, x: &ToricStack, a: &Degree) -> Vec<(usize, ExtMonomial, i64)> {
        let w = x.w();
        let n1 = x.nvars() as i64;
        let mut out = Vec::new();
        for (s, g) in self.generators.iter().enumerate() {
            let need = &(&w - &g.c) - a;
            for m in 0..1u64 << x.nvars() {
                if x.mask_degree(m) == need {
                    let m = ExtMonomial(m);
                    out.push((s, m, n1 - g.u - m.len() as i64));
                }
            }
        }
        out
    }
}

/// Map (i, a) to a dimension.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CohomologyTable {
    pub entries: BTreeMap<(i64, Degree), usize>,
}

impl CohomologyTable {
    pub fn get(&self, i: i64, a: &Degree) -> usize {
        self.entries.get(&(i, a.clone())).copied().unwrap_or(0)
    }

    pub fn add(&mut self, i: i64, a: Degree, v: usize) {
        if v > 0 {
            *self.entries.entry((i, a)).or_insert(0) += v;
        }
    }

    pub fn set(&mut self, i: i64, a: Degree, v: usize) {
        if v == 0 {
            self.entries.remove(&(i, a));
        } else {
            self.entries.insert((i, a), v);
        }
    }

    /// Keep only entries whose degree satisfies `keep`.
    pub fn restrict(&self, keep: impl Fn(&Degree) -> bool) -> Self {
        CohomologyTable { entries: self.entries.iter().filter(|((_, a), _)| keep(a)).map(|(k, v)| (k.clone(), *v)).collect() }
    }

    pub fn max_index(&self) -> i64 {
        self.entries.keys().map(|(i, _)| *i).max().unwrap_or(0)
    }
}

/// Count each generator ω_E(-a; i) as one dimension of H^i at a.
pub fn socle_readoff(f: &FreeEModule) -> CohomologyTable {
    let mut t = CohomologyTable::default();
    for g in &f.generators {
        t.add(g.u, -&g.c, 1);
    }
    t
}
