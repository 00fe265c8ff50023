//! Formal linear combinations of graphs with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{AddAssign, Neg, Sub};

use num::{BigRational, Zero};

use crate::canonical::{canonicalize, CanonicalKey};
use crate::graph::GraphLike;

/// A finite sum `Σ c_G · G` over canonical graphs; zero coefficients are
/// never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphSum<G> {
    terms: BTreeMap<CanonicalKey, (G, BigRational)>,
}

impl<G> Default for GraphSum<G> {
    fn default() -> Self {
        GraphSum { terms: BTreeMap::new() }
    }
}

impl<G: GraphLike> GraphSum<G> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(g: &G, c: BigRational) -> Self {
        let mut s = Self::new();
        s.add_term(g, c);
        s
    }

    /// Adds `c · g`, canonicalizing `g` first.
    pub fn add_term(&mut self, g: &G, c: BigRational) {
        let (key, cg) = canonicalize(g);
        self.add_canonical(key, cg, c);
    }

    /// Adds `c · g` for a graph already in canonical form with key `key`.
    pub fn add_canonical(&mut self, key: CanonicalKey, g: G, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert((g, c));
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().1 += c;
                if e.get().1.is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn coeff(&self, g: &G) -> BigRational {
        let (key, _) = canonicalize(g);
        self.coeff_by_key(&key)
    }

    pub fn coeff_by_key(&self, key: &CanonicalKey) -> BigRational {
        self.terms
            .get(key)
            .map(|t| t.1.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in key order.
    pub fn iter(&self) -> impl Iterator<Item = (&CanonicalKey, &G, &BigRational)> {
        self.terms.iter().map(|(k, (g, c))| (k, g, c))
    }

    pub fn graphs(&self) -> impl Iterator<Item = &G> {
        self.terms.values().map(|t| &t.0)
    }

    /// The common weight of all terms, or `None` for an empty or mixed sum.
    pub fn weight(&self) -> Option<i64> {
        let mut w = self.terms.values().map(|t| t.0.weight());
        let first = w.next()?;
        w.all(|x| x == first).then_some(first)
    }

    pub fn scaled(&self, c: &BigRational) -> Self {
        let mut out = Self::new();
        for (k, g, x) in self.iter() {
            out.add_canonical(k.clone(), g.clone(), x * c);
        }
        out
    }

    /// The part of the sum supported on graphs of weight `w`.
    pub fn component(&self, w: i64) -> Self {
        let mut out = Self::new();
        for (k, g, x) in self.iter() {
            if g.weight() == w {
                out.add_canonical(k.clone(), g.clone(), x.clone());
            }
        }
        out
    }
}

impl<G: GraphLike> AddAssign<&GraphSum<G>> for GraphSum<G> {
    fn add_assign(&mut self, rhs: &GraphSum<G>) {
        for (k, g, c) in rhs.iter() {
            self.add_canonical(k.clone(), g.clone(), c.clone());
        }
    }
}

impl<G: GraphLike> Neg for GraphSum<G> {
    type Output = GraphSum<G>;
    fn neg(self) -> Self {
        let terms = self.terms.into_iter().map(|(k, (g, c))| (k, (g, -c))).collect();
        GraphSum { terms }
    }
}

impl<G: GraphLike> Sub<&GraphSum<G>> for &GraphSum<G> {
    type Output = GraphSum<G>;
    fn sub(self, rhs: &GraphSum<G>) -> GraphSum<G> {
        let mut out = self.clone();
        out += &-rhs.clone();
        out
    }
}

impl<G: GraphLike> FromIterator<(G, BigRational)> for GraphSum<G> {
    fn from_iter<I: IntoIterator<Item = (G, BigRational)>>(iter: I) -> Self {
        let mut s = Self::new();
        for (g, c) in iter {
            s.add_term(&g, c);
        }
        s
    }
}

impl<G: GraphLike> fmt::Display for GraphSum<G> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "0");
        }
        for (i, (_, g, c)) in self.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{c}\t{g}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Digraph;
    use num::BigInt;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn terms_merge_under_isomorphism_and_cancel() {
        let a = Digraph::new(2, vec![(0, 1), (1, 0), (1, 0)]).unwrap();
        let b = Digraph::new(2, vec![(1, 0), (0, 1), (0, 1)]).unwrap();
        let mut s = GraphSum::new();
        s.add_term(&a, r(2));
        s.add_term(&b, r(3));
        assert_eq!(s.len(), 1);
        assert_eq!(s.coeff(&a), r(5));
        s.add_term(&b, r(-5));
        assert!(s.is_empty());
        assert_eq!(s.weight(), None);
    }
}
