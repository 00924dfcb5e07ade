//! Plays: nonempty sequences of pebble moves, and the comonad operations on them.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::games::config::{Configuration, Pebble};
use crate::structure::Elem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Move<E> {
    pub pebble: Pebble,
    pub elem: E,
}

impl<E> Move<E> {
    pub fn new(pebble: Pebble, elem: E) -> Self {
        Move { pebble, elem }
    }
}

/// A nonempty sequence of moves `(p, a)`. Ordered by length, then
/// lexicographically by `(pebble, element)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Play<E> {
    moves: Vec<Move<E>>,
}

impl<E: Ord> Ord for Play<E> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.moves.len().cmp(&other.moves.len()).then_with(|| self.moves.cmp(&other.moves))
    }
}

impl<E: Ord> PartialOrd for Play<E> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<E: Clone> Play<E> {
    pub fn new(moves: Vec<Move<E>>) -> Result<Self> {
        if moves.is_empty() {
            return Err(Error::InvalidPlay("a play has at least one move".into()));
        }
        Ok(Play { moves })
    }

    pub fn single(pebble: Pebble, elem: E) -> Self {
        Play { moves: vec![Move::new(pebble, elem)] }
    }

    pub fn from_pairs(pairs: &[(Pebble, E)]) -> Result<Self> {
        Self::new(pairs.iter().map(|(p, e)| Move::new(*p, e.clone())).collect())
    }

    pub fn moves(&self) -> &[Move<E>] {
        &self.moves
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn last(&self) -> &Move<E> {
        self.moves.last().expect("nonempty")
    }

    pub fn last_pebble(&self) -> Pebble {
        self.last().pebble
    }

    /// ε: the element of the last move.
    pub fn counit(&self) -> E {
        self.last().elem.clone()
    }

    pub fn max_pebble(&self) -> Pebble {
        self.moves.iter().map(|m| m.pebble).max().unwrap_or(0)
    }

    /// Checks every pebble lies in `1..=k`.
    pub fn check_pebbles(&self, k: usize) -> Result<()> {
        match self.moves.iter().find(|m| m.pebble == 0 || m.pebble > k) {
            Some(m) => Err(Error::PebbleOutOfRange { pebble: m.pebble, k }),
            None => Ok(()),
        }
    }

    /// The prefix of length `len` (1 ≤ len ≤ self.len()).
    pub fn prefix(&self, len: usize) -> Play<E> {
        assert!(len >= 1 && len <= self.len(), "prefix length {len} out of range");
        Play { moves: self.moves[..len].to_vec() }
    }

    pub fn prefixes(&self) -> impl Iterator<Item = Play<E>> + '_ {
        (1..=self.len()).map(|i| self.prefix(i))
    }

    /// The play with one more move.
    pub fn extend(&self, pebble: Pebble, elem: E) -> Play<E> {
        let mut moves = self.moves.clone();
        moves.push(Move::new(pebble, elem));
        Play { moves }
    }

    /// The play without its last move, if it has more than one.
    pub fn parent(&self) -> Option<Play<E>> {
        (self.len() > 1).then(|| self.prefix(self.len() - 1))
    }

    /// δ: `[(p₁, s₁), …, (pₙ, sₙ)]` where `sᵢ` is the i-th prefix.
    pub fn comult(&self) -> Play<Play<E>> {
        Play {
            moves: (1..=self.len())
                .map(|i| Move::new(self.moves[i - 1].pebble, self.prefix(i)))
                .collect(),
        }
    }

    /// Functor action: apply `f` to every element.
    pub fn lift<F, T>(&self, mut f: F) -> Play<T>
    where
        F: FnMut(&E) -> T,
    {
        Play { moves: self.moves.iter().map(|m| Move::new(m.pebble, f(&m.elem))).collect() }
    }

    /// Kleisli coextension `f*`: the i-th move is `(pᵢ, f(sᵢ))`. `f` returns
    /// `None` outside its domain.
    pub fn coextend<F, T>(&self, mut f: F) -> Result<Play<T>>
    where
        F: FnMut(&Play<E>) -> Option<T>,
    {
        let mut moves = Vec::with_capacity(self.len());
        for i in 1..=self.len() {
            let value = f(&self.prefix(i))
                .ok_or_else(|| Error::InvalidPlay(format!("prefix of length {i} outside domain")))?;
            moves.push(Move::new(self.moves[i - 1].pebble, value));
        }
        Ok(Play { moves })
    }

    /// Grading inclusion `T_l → T_k`: identity on moves.
    pub fn include(&self, l: usize, k: usize) -> Result<Play<E>> {
        if l > k {
            return Err(Error::InvalidArgument(format!("cannot include T_{l} into T_{k}")));
        }
        self.check_pebbles(l)?;
        Ok(self.clone())
    }

    /// Lengths `i` whose prefix is active: its last pebble is not moved again later.
    pub fn active_lengths(&self) -> Vec<usize> {
        (1..=self.len())
            .filter(|&i| {
                let p = self.moves[i - 1].pebble;
                self.moves[i..].iter().all(|m| m.pebble != p)
            })
            .collect()
    }
}

impl<E: PartialEq> Play<E> {
    pub fn is_prefix_of(&self, other: &Play<E>) -> bool {
        self.moves.len() <= other.moves.len() && other.moves[..self.moves.len()] == self.moves[..]
    }

    pub fn comparable(&self, other: &Play<E>) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }
}

/// The relational clause of `T_k`: the plays are pairwise prefix-comparable,
/// each one's last pebble is not reused later in the longest play, and `base`
/// holds of their last elements.
pub fn tk_tuple_holds<E, F>(plays: &[&Play<E>], base: F) -> bool
where
    E: Clone + PartialEq,
    F: FnOnce(&[E]) -> bool,
{
    let Some(greatest) = plays.iter().max_by_key(|s| s.len()) else {
        return false;
    };
    for s in plays {
        if !s.is_prefix_of(greatest) {
            return false;
        }
        let p = s.last_pebble();
        if greatest.moves()[s.len()..].iter().any(|m| m.pebble == p) {
            return false;
        }
    }
    let lasts: Vec<E> = plays.iter().map(|s| s.counit()).collect();
    base(&lasts)
}

/// Co-Kleisli composition `g • f = g ∘ f*`.
pub fn cokleisli_compose<E, B, C, F, G>(g: G, f: F) -> impl Fn(&Play<E>) -> Option<C>
where
    E: Clone,
    F: Fn(&Play<E>) -> Option<B>,
    G: Fn(&Play<B>) -> Option<C>,
    B: Clone,
{
    move |s| g(&s.coextend(&f).ok()?)
}

/// `position(s, t)`: each pebble used in `s`, mapped to its last placements in
/// `s` and `t`.
pub fn position_of(k: usize, s: &Play<Elem>, t: &Play<Elem>) -> Result<Configuration> {
    if s.len() != t.len() {
        return Err(Error::InvalidPlay(format!("lengths {} and {} differ", s.len(), t.len())));
    }
    let mut g = Configuration::empty(k);
    for (x, y) in s.moves().iter().zip(t.moves()) {
        if x.pebble != y.pebble {
            return Err(Error::InvalidPlay("pebble sequences differ".into()));
        }
        g = g.update(x.pebble, x.elem, y.elem)?;
    }
    Ok(g)
}

impl<E: fmt::Display> fmt::Display for Play<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, m) in self.moves.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({}, {})", m.pebble, m.elem)?;
        }
        write!(f, "]")
    }
}
