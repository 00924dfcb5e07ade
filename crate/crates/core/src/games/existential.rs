//! The existential k-pebble game and strong k-consistency.

use std::collections::{HashMap, HashSet};

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::games::arena::{Arena, Positions};
use crate::games::config::{Configuration, PartialMap};
use crate::hom::check_same_signature;
use crate::structure::{Homomorphism, Structure};

/// A set of canonical positions closed under Spoiler's moves.
///
/// Members are partial maps of size at most `k`; the empty map is always
/// present and every member is reachable from it.
#[derive(Clone, Debug)]
pub struct PositionalStrategy {
    k: usize,
    source_len: usize,
    target_len: usize,
    configs: Vec<PartialMap>,
    index: HashMap<PartialMap, usize>,
}

impl PositionalStrategy {
    pub fn from_configs(
        k: usize,
        source_len: usize,
        target_len: usize,
        configs: Vec<PartialMap>,
    ) -> Self {
        let index = configs.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        PositionalStrategy { k, source_len, target_len, configs, index }
    }

    /// All restrictions of `h` to at most `k` source elements.
    pub fn from_homomorphism(h: &Homomorphism, target_len: usize, k: usize) -> Self {
        let n = h.as_slice().len();
        let configs = (0..=k.min(n))
            .flat_map(|size| (0..n).combinations(size))
            .map(|dom| {
                let pairs: Vec<_> = dom.iter().map(|&a| (a, h.apply(a))).collect();
                PartialMap::from_pairs(n, &pairs)
            })
            .collect();
        Self::from_configs(k, n, target_len, configs)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn source_len(&self) -> usize {
        self.source_len
    }

    pub fn target_len(&self) -> usize {
        self.target_len
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn configs(&self) -> &[PartialMap] {
        &self.configs
    }

    pub fn contains(&self, m: &PartialMap) -> bool {
        self.index.contains_key(m)
    }

    /// Whether the canonical form of an indexed configuration is a member.
    pub fn contains_configuration(&self, g: &Configuration) -> bool {
        g.canonical(self.source_len).is_some_and(|m| self.contains(&m))
    }

    /// The strategy with source and target exchanged. Meaningful for sets of
    /// partial isomorphisms.
    pub fn reversed(&self) -> Option<PositionalStrategy> {
        let configs = self
            .configs
            .iter()
            .map(|c| c.inverse(self.target_len))
            .collect::<Option<Vec<_>>>()?;
        Some(Self::from_configs(self.k, self.target_len, self.source_len, configs))
    }

    /// Checks membership of ∅, forth-extendability of every member, the
    /// winning condition, and reachability from ∅.
    pub fn verify(&self, a: &Structure, b: &Structure) -> Result<()> {
        check_same_signature(a, b)?;
        let fail = |msg: String| Err(Error::NotWinning(msg));
        let root = PartialMap::empty(self.source_len);
        if !self.contains(&root) {
            return fail("empty configuration missing".into());
        }
        for g in &self.configs {
            if g.len() > self.k {
                return fail(format!("{:?} uses more than {} pebbles", g, self.k));
            }
            if !g.is_partial_hom(a, b)? {
                return fail(format!("{:?} is not a partial homomorphism", g));
            }
            for base in drops(g, self.k) {
                for x in a.elements() {
                    let extendable = b.elements().any(|y| match base.get(x) {
                        Some(prev) => prev == y && self.contains(&base),
                        None => self.contains(&base.with(x, y)),
                    });
                    if !extendable {
                        return fail(format!(
                            "{:?} cannot answer {} after lifting to {:?}",
                            g,
                            a.name(x),
                            base
                        ));
                    }
                }
            }
        }
        let mut seen: HashSet<&PartialMap> = HashSet::from([&self.configs[self.index[&root]]]);
        let mut stack = vec![root.clone()];
        while let Some(g) = stack.pop() {
            for base in drops(&g, self.k) {
                for x in a.elements() {
                    for y in b.elements() {
                        let next = match base.get(x) {
                            Some(prev) if prev == y => base.clone(),
                            Some(_) => continue,
                            None => base.with(x, y),
                        };
                        if let Some(&i) = self.index.get(&next) {
                            if seen.insert(&self.configs[i]) {
                                stack.push(next);
                            }
                        }
                    }
                }
            }
        }
        if seen.len() != self.configs.len() {
            return fail(format!("{} configurations unreachable", self.len() - seen.len()));
        }
        Ok(())
    }
}

pub(crate) fn drops(g: &PartialMap, k: usize) -> Vec<PartialMap> {
    let mut out = Vec::new();
    if g.len() < k {
        out.push(g.clone());
    }
    out.extend(g.domain().map(|x| g.without(x)));
    out
}

fn collect(arena: &Arena, back: bool) -> Option<PositionalStrategy> {
    let alive = arena.greatest_fixpoint(back);
    let order = arena.reachable(&alive);
    if order.is_empty() {
        return None;
    }
    let configs = order.iter().map(|&i| arena.configs[i as usize].clone()).collect();
    Some(PositionalStrategy::from_configs(arena.k, arena.n, arena.m, configs))
}

/// The largest winning strategy for Duplicator in the existential k-pebble
/// game from `a` to `b`, or `None` if Spoiler wins.
pub fn existential_strategy(a: &Structure, b: &Structure, k: usize) -> Result<Option<PositionalStrategy>> {
    let arena = Arena::build(a, b, k, Positions::Homomorphisms)?;
    Ok(collect(&arena, false))
}

/// `a →_k b`.
pub fn arrow_k(a: &Structure, b: &Structure, k: usize) -> Result<bool> {
    let arena = Arena::build(a, b, k, Positions::Homomorphisms)?;
    Ok(arena.greatest_fixpoint(false)[arena.root() as usize])
}

/// Largest `k ≤ |a|` with `a →_k b`, or 0 when even `k = 1` fails.
pub fn consistency_number(a: &Structure, b: &Structure) -> Result<usize> {
    check_same_signature(a, b)?;
    let mut best = 0;
    for k in 1..=a.len() {
        if !arrow_k(a, b, k)? {
            break;
        }
        best = k;
    }
    Ok(best)
}

/// The largest set of partial isomorphisms closed under both Spoiler's moves
/// in `a` and in `b`.
pub fn back_and_forth_strategy(
    a: &Structure,
    b: &Structure,
    k: usize,
) -> Result<Option<PositionalStrategy>> {
    let arena = Arena::build(a, b, k, Positions::Isomorphisms)?;
    Ok(collect(&arena, true))
}

/// `a ≡^k b`, via the back-and-forth k-pebble game.
pub fn back_and_forth_equiv(a: &Structure, b: &Structure, k: usize) -> Result<bool> {
    let arena = Arena::build(a, b, k, Positions::Isomorphisms)?;
    Ok(arena.greatest_fixpoint(true)[arena.root() as usize])
}
