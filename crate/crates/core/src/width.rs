//! Treewidth, coalgebra number and pebble number.

use std::collections::HashMap;

use serde::Serialize;

use crate::comonad::coalgebra::KTraversal;
use crate::error::{Error, Result};
use crate::hom::core;
use crate::structure::{Elem, SimpleGraph, Structure};

/// Default universe limit for the subset dynamic program.
pub const DEFAULT_MAX_UNIVERSE: usize = 20;

/// Vertices outside `inside ∪ {v}` reachable from `v` by a path whose interior
/// lies in `inside`.
fn boundary_from(adj: &[u64], inside: u64, v: usize) -> u64 {
    let mut reached = 0u64;
    let mut frontier = adj[v];
    let mut seen = 1u64 << v;
    while frontier != 0 {
        let w = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        if seen & (1 << w) != 0 {
            continue;
        }
        seen |= 1 << w;
        if inside & (1 << w) != 0 {
            frontier |= adj[w] & !seen;
        } else {
            reached |= 1 << w;
        }
    }
    reached
}

fn masks(a: &Structure, limit: usize) -> Result<Vec<u64>> {
    if a.len() > limit || a.len() > 63 {
        return Err(Error::SizeLimit { size: a.len(), limit: limit.min(63) });
    }
    Ok(a.gaifman().masks().expect("at most 63 vertices"))
}

/// Exact treewidth of the Gaifman graph, with an optimal elimination order.
///
/// `TW(S) = min over v ∈ S of max(TW(S∖v), |Q(S∖v, v)|)`, where `Q(S, v)` is the
/// set of vertices outside `S ∪ {v}` reachable from `v` through `S`.
pub fn treewidth_with_order(a: &Structure, limit: usize) -> Result<(usize, Vec<Elem>)> {
    let adj = masks(a, limit)?;
    let n = a.len();
    let full = (1usize << n) - 1;
    let mut tw = vec![u8::MAX; full + 1];
    let mut choice = vec![0u8; full + 1];
    tw[0] = 0;
    for s in 1..=full {
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let without = s & !(1 << v);
            let q = boundary_from(&adj, without as u64, v).count_ones() as u8;
            let value = tw[without].max(q);
            if value < tw[s] {
                tw[s] = value;
                choice[s] = v as u8;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = choice[s] as usize;
        order.push(v);
        s &= !(1 << v);
    }
    order.reverse();
    Ok((tw[full] as usize, order))
}

pub fn treewidth_oracle(a: &Structure) -> Result<usize> {
    Ok(treewidth_with_order(a, DEFAULT_MAX_UNIVERSE)?.0)
}

/// Recursive search over connected vertex sets: a set `C` whose outside
/// neighbourhood `N(C)` has at most `k − 1` vertices is placed by choosing a
/// root `r ∈ C` and placing each component of `C ∖ r` below it.
struct TraversalSearch<'g> {
    adj: &'g [u64],
    k: usize,
    memo: HashMap<u64, Option<usize>>,
}

impl TraversalSearch<'_> {
    fn neighbourhood(&self, set: u64) -> u64 {
        let mut out = 0;
        let mut rest = set;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out |= self.adj[v];
        }
        out & !set
    }

    fn components(&self, set: u64) -> Vec<u64> {
        let mut out = Vec::new();
        let mut rest = set;
        while rest != 0 {
            let start = rest.trailing_zeros();
            let mut comp = 1u64 << start;
            let mut frontier = comp;
            while frontier != 0 {
                let v = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                let new = self.adj[v] & set & !comp;
                comp |= new;
                frontier |= new;
            }
            out.push(comp);
            rest &= !comp;
        }
        out
    }

    /// Least root (in element order) that makes `set` placeable, if any.
    fn root(&mut self, set: u64) -> Option<usize> {
        if let Some(&r) = self.memo.get(&set) {
            return r;
        }
        let mut found = None;
        if (self.neighbourhood(set).count_ones() as usize) < self.k {
            let mut rest = set;
            while rest != 0 {
                let r = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let below = set & !(1 << r);
                if self.components(below).into_iter().all(|c| self.root(c).is_some()) {
                    found = Some(r);
                    break;
                }
            }
        }
        self.memo.insert(set, found);
        found
    }

    /// Places `set` below `parent`, labelling each root with the least label
    /// not used by its outside neighbourhood.
    fn place(&mut self, set: u64, parent: Option<Elem>, parents: &mut [Option<Elem>], labels: &mut [usize]) {
        let r = self.root(set).expect("placeable");
        parents[r] = parent;
        let mut used = vec![false; self.k + 1];
        let mut nb = self.neighbourhood(set);
        while nb != 0 {
            let v = nb.trailing_zeros() as usize;
            nb &= nb - 1;
            used[labels[v]] = true;
        }
        labels[r] = (1..=self.k).find(|&l| !used[l]).expect("fewer than k neighbours");
        for c in self.components(set & !(1 << r)) {
            self.place(c, Some(r), parents, labels);
        }
    }
}

/// A k-traversal of `a`, if one exists.
pub fn find_k_traversal(a: &Structure, k: usize) -> Result<Option<KTraversal>> {
    if k == 0 {
        return Ok(None);
    }
    let g: SimpleGraph = a.gaifman();
    let adj = g.masks().ok_or(Error::SizeLimit { size: a.len(), limit: 64 })?;
    let mut search = TraversalSearch { adj: &adj, k, memo: HashMap::new() };
    let all = if a.len() == 64 { u64::MAX } else { (1u64 << a.len()) - 1 };
    let comps = search.components(all);
    if comps.iter().any(|&c| search.root(c).is_none()) {
        return Ok(None);
    }
    let mut parents = vec![None; a.len()];
    let mut labels = vec![0; a.len()];
    for c in comps {
        search.place(c, None, &mut parents, &mut labels);
    }
    Ok(Some(KTraversal::new(a, k, parents, labels)?))
}

/// Least k admitting a k-traversal.
pub fn coalgebra_number(a: &Structure) -> Result<usize> {
    Ok(coalgebra_witness(a)?.0)
}

pub fn coalgebra_witness(a: &Structure) -> Result<(usize, KTraversal)> {
    for k in 1..=a.len() {
        if let Some(t) = find_k_traversal(a, k)? {
            return Ok((k, t));
        }
    }
    unreachable!("the linear order with distinct labels is an |A|-traversal")
}

/// `tw(core(a)) + 1`.
pub fn pebble_number(a: &Structure) -> Result<usize> {
    pebble_number_limited(a, DEFAULT_MAX_UNIVERSE)
}

pub fn pebble_number_limited(a: &Structure, limit: usize) -> Result<usize> {
    if a.len() > limit {
        return Err(Error::SizeLimit { size: a.len(), limit });
    }
    Ok(treewidth_with_order(&core(a), limit)?.0 + 1)
}

#[derive(Clone, Debug, Serialize)]
pub struct WidthReport {
    pub treewidth: usize,
    pub kappa: usize,
    pub pi: usize,
    pub core_size: usize,
    pub traversal: KTraversal,
    pub elimination_order: Vec<String>,
}

pub fn width_report(a: &Structure, limit: usize) -> Result<WidthReport> {
    let (treewidth, order) = treewidth_with_order(a, limit)?;
    let (kappa, traversal) = coalgebra_witness(a)?;
    let c = core(a);
    let pi = treewidth_with_order(&c, limit)?.0 + 1;
    Ok(WidthReport {
        treewidth,
        kappa,
        pi,
        core_size: c.len(),
        traversal,
        elimination_order: order.into_iter().map(|v| a.name(v).to_string()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{generate, grid, Kind};

    #[test]
    fn small_treewidths() {
        assert_eq!(treewidth_oracle(&generate(Kind::Empty, 5).unwrap()).unwrap(), 0);
        assert_eq!(treewidth_oracle(&generate(Kind::Complete, 4).unwrap()).unwrap(), 3);
        assert_eq!(treewidth_oracle(&generate(Kind::SymmetricCycle, 6).unwrap()).unwrap(), 2);
        assert_eq!(treewidth_oracle(&generate(Kind::Path, 5).unwrap()).unwrap(), 1);
        assert_eq!(treewidth_oracle(&grid(3, 3).unwrap()).unwrap(), 3);
    }

    #[test]
    fn traversals() {
        let one = generate(Kind::Empty, 1).unwrap();
        let t = find_k_traversal(&one, 1).unwrap().unwrap();
        assert_eq!(t.labels(), [1]);
        let k3 = generate(Kind::Complete, 3).unwrap();
        assert!(find_k_traversal(&k3, 2).unwrap().is_none());
        assert!(find_k_traversal(&k3, 3).unwrap().is_some());
        assert!(find_k_traversal(&generate(Kind::Path, 5).unwrap(), 2).unwrap().is_some());
    }

    #[test]
    fn numbers() {
        assert_eq!(coalgebra_number(&generate(Kind::Complete, 4).unwrap()).unwrap(), 4);
        assert_eq!(coalgebra_number(&generate(Kind::SymmetricCycle, 6).unwrap()).unwrap(), 3);
        assert_eq!(coalgebra_number(&generate(Kind::Empty, 1).unwrap()).unwrap(), 1);
        assert_eq!(pebble_number(&generate(Kind::Complete, 3).unwrap()).unwrap(), 3);
        assert_eq!(pebble_number(&generate(Kind::SymmetricCycle, 4).unwrap()).unwrap(), 2);
        assert_eq!(pebble_number(&generate(Kind::Empty, 1).unwrap()).unwrap(), 1);
    }

    #[test]
    fn size_limit() {
        let big = generate(Kind::Path, 21).unwrap();
        assert!(matches!(treewidth_oracle(&big), Err(Error::SizeLimit { .. })));
    }
}
