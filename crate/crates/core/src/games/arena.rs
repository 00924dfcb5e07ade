//! Canonical position spaces and the deletion fixpoint shared by the games.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::games::config::PartialMap;
use crate::games::existential::drops;
use crate::hom::check_same_signature;
use crate::structure::{Elem, Structure};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Positions {
    /// Partial homomorphisms of the I-expanded structures.
    Homomorphisms,
    /// Partial isomorphisms of the I-expanded structures.
    Isomorphisms,
}

/// All canonical positions with at most `k` pairs satisfying the winning condition.
pub(crate) struct Arena {
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub configs: Vec<PartialMap>,
    pub index: HashMap<PartialMap, u32>,
}

impl Arena {
    pub fn build(a: &Structure, b: &Structure, k: usize, kind: Positions) -> Result<Arena> {
        check_same_signature(a, b)?;
        if k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        let align = a.signature().align(b.signature())?;
        let mut checks: Vec<Vec<(usize, &[Elem])>> = vec![Vec::new(); a.len()];
        for (r, t) in a.tuples() {
            checks[*t.iter().max().unwrap()].push((align[r], t.as_slice()));
        }
        let mut arena = Arena {
            k,
            n: a.len(),
            m: b.len(),
            configs: Vec::new(),
            index: HashMap::new(),
        };
        let mut current = PartialMap::empty(a.len());
        let mut used = vec![false; b.len()];
        arena.enumerate(0, 0, &mut current, &mut used, &checks, a, b, kind)?;
        Ok(arena)
    }

    #[allow(clippy::too_many_arguments)]
    fn enumerate(
        &mut self,
        e: Elem,
        size: usize,
        current: &mut PartialMap,
        used: &mut [bool],
        checks: &[Vec<(usize, &[Elem])>],
        a: &Structure,
        b: &Structure,
        kind: Positions,
    ) -> Result<()> {
        if e == self.n {
            if kind == Positions::Isomorphisms && !current.is_partial_iso(a, b)? {
                return Ok(());
            }
            let id = self.configs.len() as u32;
            self.index.insert(current.clone(), id);
            self.configs.push(current.clone());
            return Ok(());
        }
        self.enumerate(e + 1, size, current, used, checks, a, b, kind)?;
        if size == self.k {
            return Ok(());
        }
        for y in 0..self.m {
            if kind == Positions::Isomorphisms && used[y] {
                continue;
            }
            current.set(e, y);
            let ok = checks[e].iter().all(|&(r, t)| {
                let image: Option<Vec<Elem>> = t.iter().map(|&x| current.get(x)).collect();
                image.is_none_or(|img| b.holds(r, &img))
            });
            if ok {
                used[y] = true;
                self.enumerate(e + 1, size + 1, current, used, checks, a, b, kind)?;
                used[y] = false;
            }
            current.unset(e);
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn id(&self, m: &PartialMap) -> Option<u32> {
        self.index.get(m).copied()
    }

    /// The empty position, always present.
    pub fn root(&self) -> u32 {
        self.index[&PartialMap::empty(self.n)]
    }

    /// Positions left after Spoiler lifts one pebble pair (or none, if a pebble is free).
    pub fn drops(&self, g: &PartialMap) -> Vec<PartialMap> {
        drops(g, self.k)
    }

    /// Position after placing `a ↦ b` on `base`, if it is in the arena.
    pub fn step(&self, base: &PartialMap, a: Elem, b: Elem) -> Option<u32> {
        match base.get(a) {
            Some(prev) if prev == b => self.id(base),
            Some(_) => None,
            None => self.id(&base.with(a, b)),
        }
    }

    /// Greatest set of positions in which every obligation keeps a surviving
    /// witness. Obligations: for each drop and each source element a, some b
    /// (forth); with `back`, also for each target element b, some a.
    pub fn greatest_fixpoint(&self, back: bool) -> Vec<bool> {
        let count = self.len();
        let mut alive = vec![true; count];
        let mut owner: Vec<u32> = Vec::new();
        let mut remaining: Vec<u32> = Vec::new();
        let mut supporters: Vec<Vec<u32>> = vec![Vec::new(); count];
        let mut queue = VecDeque::new();

        let mut add = |id: u32, supports: &mut Vec<u32>, queue: &mut VecDeque<u32>| {
            if supports.contains(&id) {
                return;
            }
            supports.sort_unstable();
            supports.dedup();
            if supports.is_empty() {
                queue.push_back(id);
                return;
            }
            let o = owner.len() as u32;
            owner.push(id);
            remaining.push(supports.len() as u32);
            for &s in supports.iter() {
                supporters[s as usize].push(o);
            }
        };

        let mut supports = Vec::new();
        for (id, g) in self.configs.iter().enumerate() {
            let id = id as u32;
            for base in self.drops(g) {
                for x in 0..self.n {
                    supports.clear();
                    supports.extend((0..self.m).filter_map(|y| self.step(&base, x, y)));
                    add(id, &mut supports, &mut queue);
                }
                if back {
                    for y in 0..self.m {
                        supports.clear();
                        supports.extend((0..self.n).filter_map(|x| self.step(&base, x, y)));
                        add(id, &mut supports, &mut queue);
                    }
                }
            }
        }

        while let Some(id) = queue.pop_front() {
            if !std::mem::replace(&mut alive[id as usize], false) {
                continue;
            }
            for &o in &supporters[id as usize] {
                let r = &mut remaining[o as usize];
                *r -= 1;
                if *r == 0 && alive[owner[o as usize] as usize] {
                    queue.push_back(owner[o as usize]);
                }
            }
        }
        alive
    }

    /// Surviving positions reachable from the empty one by single moves
    /// through surviving positions, in breadth-first order.
    pub fn reachable(&self, alive: &[bool]) -> Vec<u32> {
        let root = self.root();
        if !alive[root as usize] {
            return Vec::new();
        }
        let mut seen = vec![false; self.len()];
        seen[root as usize] = true;
        let mut order = vec![root];
        let mut head = 0;
        while head < order.len() {
            let g = self.configs[order[head] as usize].clone();
            head += 1;
            for base in self.drops(&g) {
                for x in 0..self.n {
                    for y in 0..self.m {
                        if let Some(next) = self.step(&base, x, y) {
                            if alive[next as usize] && !seen[next as usize] {
                                seen[next as usize] = true;
                                order.push(next);
                            }
                        }
                    }
                }
            }
        }
        order
    }
}
