//! Pebble configurations, in pebble-indexed and canonical form.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::structure::{Elem, Structure};

/// 1-based pebble index.
pub type Pebble = usize;

/// A partial map from pebbles `1..=k` to pairs (source element, target element).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    slots: Vec<Option<(Elem, Elem)>>,
}

impl Configuration {
    pub fn empty(k: usize) -> Self {
        Configuration { slots: vec![None; k] }
    }

    pub fn k(&self) -> usize {
        self.slots.len()
    }

    pub fn get(&self, p: Pebble) -> Option<(Elem, Elem)> {
        self.slots.get(p.wrapping_sub(1)).copied().flatten()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.iter().all(Option::is_none)
    }

    /// `γ[p ↦ (a, b)]`.
    pub fn update(&self, p: Pebble, a: Elem, b: Elem) -> Result<Configuration> {
        if p == 0 || p > self.k() {
            return Err(Error::PebbleOutOfRange { pebble: p, k: self.k() });
        }
        let mut next = self.clone();
        next.slots[p - 1] = Some((a, b));
        Ok(next)
    }

    /// Pebbles in use with their pairs, in pebble order.
    pub fn pairs(&self) -> impl Iterator<Item = (Pebble, Elem, Elem)> + '_ {
        self.slots
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.map(|(a, b)| (i + 1, a, b)))
    }

    /// Swaps source and target in every pair.
    pub fn reversed(&self) -> Configuration {
        Configuration { slots: self.slots.iter().map(|s| s.map(|(a, b)| (b, a))).collect() }
    }

    /// The relation `R(γ)` as a partial map, or `None` if it is not single-valued.
    pub fn canonical(&self, source_len: usize) -> Option<PartialMap> {
        let mut map = PartialMap::empty(source_len);
        for (_, a, b) in self.pairs() {
            match map.get(a) {
                Some(prev) if prev != b => return None,
                _ => map.set(a, b),
            }
        }
        Some(map)
    }

    /// Renders as `{1: a->x, 2: b->y}`.
    pub fn describe(&self, a: &Structure, b: &Structure) -> String {
        let body: Vec<String> = self
            .pairs()
            .map(|(p, x, y)| format!("{p}: {}->{}", a.name(x), b.name(y)))
            .collect();
        format!("{{{}}}", body.join(", "))
    }
}

/// True iff `R(γ)` is single-valued and preserves every tuple of `a` whose
/// entries are all pebbled.
pub fn is_winning(g: &Configuration, a: &Structure, b: &Structure) -> Result<bool> {
    match g.canonical(a.len()) {
        Some(m) => m.is_partial_hom(a, b),
        None => Ok(false),
    }
}

const UNSET: u32 = u32::MAX;

/// A partial map from source elements to target elements. This is the
/// canonical form of a configuration: pebble indices forgotten, duplicates merged.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialMap(Box<[u32]>);

impl PartialMap {
    pub fn empty(source_len: usize) -> Self {
        PartialMap(vec![UNSET; source_len].into_boxed_slice())
    }

    pub fn from_pairs(source_len: usize, pairs: &[(Elem, Elem)]) -> Self {
        let mut m = PartialMap::empty(source_len);
        for &(a, b) in pairs {
            m.set(a, b);
        }
        m
    }

    pub fn source_len(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, a: Elem) -> Option<Elem> {
        match self.0[a] {
            UNSET => None,
            b => Some(b as Elem),
        }
    }

    pub fn set(&mut self, a: Elem, b: Elem) {
        self.0[a] = b as u32;
    }

    pub fn unset(&mut self, a: Elem) {
        self.0[a] = UNSET;
    }

    pub fn with(&self, a: Elem, b: Elem) -> PartialMap {
        let mut m = self.clone();
        m.set(a, b);
        m
    }

    pub fn without(&self, a: Elem) -> PartialMap {
        let mut m = self.clone();
        m.unset(a);
        m
    }

    pub fn len(&self) -> usize {
        self.0.iter().filter(|&&b| b != UNSET).count()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&b| b == UNSET)
    }

    pub fn domain(&self) -> impl Iterator<Item = Elem> + '_ {
        self.0.iter().enumerate().filter(|(_, &b)| b != UNSET).map(|(a, _)| a)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Elem, Elem)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &b)| b != UNSET)
            .map(|(a, &b)| (a, b as Elem))
    }

    pub fn is_injective(&self) -> bool {
        let mut seen: Vec<Elem> = self.pairs().map(|(_, b)| b).collect();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }

    /// The inverse map, defined when injective.
    pub fn inverse(&self, target_len: usize) -> Option<PartialMap> {
        let mut inv = PartialMap::empty(target_len);
        for (a, b) in self.pairs() {
            if inv.get(b).is_some() {
                return None;
            }
            inv.set(b, a);
        }
        Some(inv)
    }

    /// Every tuple of `a` lying inside the domain maps into `b`.
    pub fn is_partial_hom(&self, a: &Structure, b: &Structure) -> Result<bool> {
        let align = a.signature().align(b.signature())?;
        Ok(a.tuples().all(|(r, t)| {
            let image: Option<Vec<Elem>> = t.iter().map(|&e| self.get(e)).collect();
            image.is_none_or(|img| b.holds(align[r], &img))
        }))
    }

    /// Injective, and tuples inside the domain correspond exactly to tuples
    /// inside the range.
    pub fn is_partial_iso(&self, a: &Structure, b: &Structure) -> Result<bool> {
        let Some(inv) = self.inverse(b.len()) else {
            return Ok(false);
        };
        Ok(self.is_partial_hom(a, b)? && inv.is_partial_hom(b, a)?)
    }

    /// Places the pairs on pebbles `1..` in source order.
    pub fn to_configuration(&self, k: usize) -> Configuration {
        let mut c = Configuration::empty(k);
        for (i, (a, b)) in self.pairs().enumerate() {
            c.slots[i] = Some((a, b));
        }
        c
    }

    pub fn describe(&self, a: &Structure, b: &Structure) -> Vec<(String, String)> {
        self.pairs()
            .map(|(x, y)| (a.name(x).to_string(), b.name(y).to_string()))
            .collect()
    }
}

impl fmt::Debug for PartialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.pairs()).finish()
    }
}

impl Serialize for PartialMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.pairs())
    }
}
