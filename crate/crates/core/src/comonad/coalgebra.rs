//! Coalgebras `A → T_k A` and k-traversals.

use serde::Serialize;

use crate::comonad::play::{tk_tuple_holds, Play};
use crate::error::{Error, Result};
use crate::games::config::Pebble;
use crate::structure::{Elem, Structure};

/// A forest order on the universe (by immediate predecessor) with a pebble
/// label per element, such that Gaifman-adjacent elements are comparable and,
/// for adjacent `a < b`, no `c` with `a < c ≤ b` carries the label of `a`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KTraversal {
    k: usize,
    parent: Vec<Option<Elem>>,
    label: Vec<Pebble>,
}

impl KTraversal {
    pub fn new(a: &Structure, k: usize, parent: Vec<Option<Elem>>, label: Vec<Pebble>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidTraversal(msg));
        let n = a.len();
        if parent.len() != n || label.len() != n {
            return bad(format!("expected {n} parents and labels"));
        }
        if let Some(x) = label.iter().position(|&l| l == 0 || l > k) {
            return bad(format!("label {} of {} outside 1..={k}", label[x], a.name(x)));
        }
        if let Some(x) = parent.iter().position(|p| p.is_some_and(|p| p >= n)) {
            return bad(format!("parent of {} outside the universe", a.name(x)));
        }
        let t = KTraversal { k, parent, label };
        for x in 0..n {
            if t.ancestors(x).nth(n).is_some() {
                return bad(format!("cycle through {}", a.name(x)));
            }
        }
        for (x, y) in a.gaifman().edges() {
            let (lo, hi) = if t.is_below(x, y) {
                (x, y)
            } else if t.is_below(y, x) {
                (y, x)
            } else {
                return bad(format!("adjacent {} and {} are incomparable", a.name(x), a.name(y)));
            };
            let mut c = hi;
            while c != lo {
                if t.label[c] == t.label[lo] {
                    return bad(format!(
                        "label {} of {} reused at {} before {}",
                        t.label[lo],
                        a.name(lo),
                        a.name(c),
                        a.name(hi)
                    ));
                }
                c = t.parent[c].unwrap();
            }
        }
        Ok(t)
    }

    /// The linear order in universe order with labels `1..=n`.
    pub fn trivial(a: &Structure) -> Self {
        let n = a.len();
        let parent = (0..n).map(|i| i.checked_sub(1)).collect();
        KTraversal { k: n, parent, label: (1..=n).collect() }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn parent(&self, x: Elem) -> Option<Elem> {
        self.parent[x]
    }

    pub fn parents(&self) -> &[Option<Elem>] {
        &self.parent
    }

    pub fn label(&self, x: Elem) -> Pebble {
        self.label[x]
    }

    pub fn labels(&self) -> &[Pebble] {
        &self.label
    }

    /// Strict ancestors, nearest first.
    pub fn ancestors(&self, x: Elem) -> impl Iterator<Item = Elem> + '_ {
        std::iter::successors(self.parent[x], move |&y| self.parent[y])
    }

    /// `x ≤ y` in the forest order.
    pub fn is_below(&self, x: Elem, y: Elem) -> bool {
        x == y || self.ancestors(y).any(|z| z == x)
    }

    /// Length of the longest chain.
    pub fn height(&self) -> usize {
        (0..self.parent.len()).map(|x| self.ancestors(x).count() + 1).max().unwrap_or(0)
    }
}

/// A map `α : A → T_k A` satisfying the counit and comultiplication laws and
/// preserving relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coalgebra {
    k: usize,
    alpha: Vec<Play<Elem>>,
}

impl Coalgebra {
    /// Validates the coalgebra laws and the homomorphism condition.
    pub fn new(a: &Structure, k: usize, alpha: Vec<Play<Elem>>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidCoalgebra(msg));
        if alpha.len() != a.len() {
            return bad(format!("expected {} plays", a.len()));
        }
        for (x, s) in alpha.iter().enumerate() {
            s.check_pebbles(k)?;
            if s.counit() != x {
                return bad(format!("α({}) does not end in {}", a.name(x), a.name(x)));
            }
            for (i, m) in s.moves().iter().enumerate() {
                if alpha[m.elem] != s.prefix(i + 1) {
                    return bad(format!(
                        "α({}) is not the prefix of α({}) of length {}",
                        a.name(m.elem),
                        a.name(x),
                        i + 1
                    ));
                }
            }
        }
        for (r, t) in a.tuples() {
            let plays: Vec<&Play<Elem>> = t.iter().map(|&x| &alpha[x]).collect();
            if !tk_tuple_holds(&plays, |e| a.holds(r, e)) {
                let names: Vec<&str> = t.iter().map(|&x| a.name(x)).collect();
                return bad(format!("{}({}) is not preserved", a.signature().name(r), names.join(",")));
            }
        }
        Ok(Coalgebra { k, alpha })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alpha(&self, x: Elem) -> &Play<Elem> {
        &self.alpha[x]
    }

    pub fn plays(&self) -> &[Play<Elem>] {
        &self.alpha
    }
}

/// `α(a) = α(parent(a)) · (label(a), a)`.
pub fn coalgebra_of_traversal(a: &Structure, t: &KTraversal) -> Result<Coalgebra> {
    let t = KTraversal::new(a, t.k, t.parent.clone(), t.label.clone())?;
    let alpha = a
        .elements()
        .map(|x| {
            let mut chain: Vec<Elem> = t.ancestors(x).collect();
            chain.reverse();
            chain.push(x);
            Play::from_pairs(&chain.iter().map(|&y| (t.label(y), y)).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Coalgebra::new(a, t.k, alpha)
}

/// Order by prefix of `α`-images; label by the last pebble.
pub fn traversal_of_coalgebra(a: &Structure, c: &Coalgebra) -> Result<KTraversal> {
    let c = Coalgebra::new(a, c.k, c.alpha.clone())?;
    let parent = c
        .alpha
        .iter()
        .map(|s| s.parent().map(|p| p.counit()))
        .collect();
    let label = c.alpha.iter().map(|s| s.last_pebble()).collect();
    KTraversal::new(a, c.k, parent, label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{generate, Kind};

    #[test]
    fn single_element() {
        let a = generate(Kind::Empty, 1).unwrap();
        let t = KTraversal::new(&a, 1, vec![None], vec![1]).unwrap();
        let c = coalgebra_of_traversal(&a, &t).unwrap();
        assert_eq!(c.alpha(0), &Play::single(1, 0));
    }

    #[test]
    fn path_of_two() {
        let a = generate(Kind::Path, 2).unwrap();
        let t = KTraversal::new(&a, 2, vec![None, Some(0)], vec![1, 2]).unwrap();
        let c = coalgebra_of_traversal(&a, &t).unwrap();
        assert_eq!(c.alpha(1), &Play::from_pairs(&[(1, 0), (2, 1)]).unwrap());
        assert_eq!(traversal_of_coalgebra(&a, &c).unwrap(), t);
    }

    #[test]
    fn label_reuse_is_rejected() {
        let a = generate(Kind::Path, 2).unwrap();
        assert!(KTraversal::new(&a, 2, vec![None, Some(0)], vec![1, 1]).is_err());
        assert!(KTraversal::new(&a, 2, vec![None, None], vec![1, 2]).is_err());
    }

    #[test]
    fn trivial_traversal_gives_growing_plays() {
        let a = generate(Kind::Complete, 4).unwrap();
        let t = KTraversal::trivial(&a);
        let c = coalgebra_of_traversal(&a, &t).unwrap();
        for j in 0..4 {
            assert_eq!(c.alpha(j).len(), j + 1);
        }
        assert_eq!(traversal_of_coalgebra(&a, &c).unwrap(), t);
    }

    #[test]
    fn non_prefix_closed_alpha_is_rejected() {
        let a = generate(Kind::Path, 2).unwrap();
        let alpha = vec![Play::single(1, 0), Play::from_pairs(&[(1, 1), (2, 1)]).unwrap()];
        assert!(Coalgebra::new(&a, 2, alpha).is_err());
    }
}
