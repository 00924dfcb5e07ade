//! The k-pebble bijection game, deciding k-variable counting-logic equivalence.

use crate::error::Result;
use crate::games::arena::{Arena, Positions};
use crate::hom::check_same_signature;
use crate::structure::Structure;

/// `a ≡^{C^k} b`.
///
/// A position survives a round iff for every pebble Spoiler may pick up there
/// is a bijection `h` such that placing the pebble on any `x` and its image
/// `h(x)` leads to a surviving position. The bijection is found as a perfect
/// matching in the bipartite graph of surviving successor positions.
pub fn bijection_game_equiv(a: &Structure, b: &Structure, k: usize) -> Result<bool> {
    check_same_signature(a, b)?;
    if a.len() != b.len() {
        // Still validate k.
        Arena::build(a, a, k, Positions::Isomorphisms)?;
        return Ok(false);
    }
    let arena = Arena::build(a, b, k, Positions::Isomorphisms)?;
    let n = arena.n;
    let mut alive = vec![true; arena.len()];
    loop {
        let mut doomed = Vec::new();
        for (id, g) in arena.configs.iter().enumerate() {
            if !alive[id] {
                continue;
            }
            let ok = arena.drops(g).iter().all(|base| {
                let adjacency: Vec<Vec<usize>> = (0..n)
                    .map(|x| {
                        (0..n)
                            .filter(|&y| {
                                arena.step(base, x, y).is_some_and(|s| alive[s as usize])
                            })
                            .collect()
                    })
                    .collect();
                has_perfect_matching(&adjacency, n)
            });
            if !ok {
                doomed.push(id);
            }
        }
        if doomed.is_empty() {
            break;
        }
        for id in doomed {
            alive[id] = false;
        }
    }
    Ok(alive[arena.root() as usize])
}

/// Kuhn's augmenting-path matching on a bipartite graph with `n` vertices per side.
pub(crate) fn has_perfect_matching(adjacency: &[Vec<usize>], n: usize) -> bool {
    fn augment(x: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                if owner[y].is_none_or(|z| augment(z, adj, seen, owner)) {
                    owner[y] = Some(x);
                    return true;
                }
            }
        }
        false
    }
    let mut owner = vec![None; n];
    (0..adjacency.len()).all(|x| {
        let mut seen = vec![false; n];
        augment(x, adjacency, &mut seen, &mut owner)
    })
}
