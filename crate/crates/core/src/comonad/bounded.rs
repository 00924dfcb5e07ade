//! Finite fragments of `T_k A`: all plays up to a given length.

use itertools::Itertools;

use crate::comonad::play::{Move, Play};
use crate::error::{Error, Result};
use crate::structure::{Elem, Structure};

/// Default cap on the number of plays in a bounded fragment.
pub const DEFAULT_MAX_PLAYS: usize = 200_000;

/// The plays of length at most `depth` over `base` with pebbles `1..=k`, as a
/// relational structure over the signature of `base`.
///
/// Plays are numbered in canonical (length, then lexicographic) order, which
/// is also the universe order of [`BoundedTk::structure`].
#[derive(Clone, Debug)]
pub struct BoundedTk {
    k: usize,
    depth: usize,
    base_len: usize,
    plays: Vec<Play<Elem>>,
    offsets: Vec<usize>,
    structure: Structure,
}

/// Number of plays of length `1..=depth`, or `None` on overflow.
pub fn play_count(k: usize, n: usize, depth: usize) -> Option<usize> {
    let branching = k.checked_mul(n)?;
    let mut layer = 1usize;
    let mut total = 0usize;
    for _ in 0..depth {
        layer = layer.checked_mul(branching)?;
        total = total.checked_add(layer)?;
    }
    Some(total)
}

impl BoundedTk {
    pub fn new(base: &Structure, k: usize, depth: usize) -> Result<Self> {
        Self::with_cap(base, k, depth, DEFAULT_MAX_PLAYS)
    }

    pub fn with_cap(base: &Structure, k: usize, depth: usize, cap: usize) -> Result<Self> {
        if k == 0 || depth == 0 {
            return Err(Error::InvalidArgument("k and depth must be at least 1".into()));
        }
        let n = base.len();
        match play_count(k, n, depth) {
            Some(c) if c <= cap => {}
            Some(c) => return Err(Error::SizeCap { requested: c.to_string(), cap }),
            None => {
                return Err(Error::SizeCap {
                    requested: format!("({k}·{n})^{depth}, overflowing"),
                    cap,
                })
            }
        }

        let mut plays: Vec<Play<Elem>> = Vec::new();
        let mut offsets = vec![0];
        for p in 1..=k {
            for a in 0..n {
                plays.push(Play::single(p, a));
            }
        }
        let mut layer = 0..plays.len();
        offsets.push(plays.len());
        for _ in 1..depth {
            let start = plays.len();
            for i in layer.clone() {
                for p in 1..=k {
                    for a in 0..n {
                        let next = plays[i].extend(p, a);
                        plays.push(next);
                    }
                }
            }
            layer = start..plays.len();
            offsets.push(plays.len());
        }

        let names: Vec<String> = plays.iter().map(|s| play_name(base, s)).collect();
        let mut structure = Structure::new(base.signature().clone(), names)?;
        for id in 0..plays.len() {
            let s = &plays[id];
            let active: Vec<usize> = s
                .active_lengths()
                .into_iter()
                .map(|len| prefix_id(&offsets, k * n, id, s.len(), len))
                .collect();
            for r in 0..base.signature().len() {
                let arity = base.signature().arity(r);
                for tuple in std::iter::repeat_n(active.iter().copied(), arity).multi_cartesian_product() {
                    if !tuple.contains(&id) {
                        continue;
                    }
                    let lasts: Vec<Elem> = tuple.iter().map(|&t| plays[t].counit()).collect();
                    if base.holds(r, &lasts) {
                        structure.insert(r, tuple)?;
                    }
                }
            }
        }
        Ok(BoundedTk { k, depth, base_len: n, plays, offsets, structure })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.plays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plays.is_empty()
    }

    pub fn plays(&self) -> &[Play<Elem>] {
        &self.plays
    }

    pub fn play(&self, id: usize) -> &Play<Elem> {
        &self.plays[id]
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn into_structure(self) -> Structure {
        self.structure
    }

    /// Position of `s` in the canonical order, if it lies in the fragment.
    pub fn id_of(&self, s: &Play<Elem>) -> Option<usize> {
        if s.len() > self.depth {
            return None;
        }
        let base = self.k * self.base_len;
        let mut rank = 0usize;
        for m in s.moves() {
            if m.pebble == 0 || m.pebble > self.k || m.elem >= self.base_len {
                return None;
            }
            rank = rank * base + (m.pebble - 1) * self.base_len + m.elem;
        }
        Some(self.offsets[s.len() - 1] + rank)
    }

    /// Identifier of the immediate prefix of play `id`.
    pub fn parent(&self, id: usize) -> Option<usize> {
        let len = self.plays[id].len();
        (len > 1).then(|| prefix_id(&self.offsets, self.k * self.base_len, id, len, len - 1))
    }

    /// `α(aᵢ) = [(1, a₁), …, (i, aᵢ)]` for a tuple of at most `k` elements.
    pub fn alpha(&self, tuple: &[Elem]) -> Result<Vec<usize>> {
        if tuple.len() > self.k {
            return Err(Error::InvalidArgument(format!(
                "tuple of length {} exceeds k = {}",
                tuple.len(),
                self.k
            )));
        }
        let moves: Vec<Move<Elem>> =
            tuple.iter().enumerate().map(|(i, &a)| Move::new(i + 1, a)).collect();
        (1..=tuple.len())
            .map(|i| {
                let s = Play::new(moves[..i].to_vec())?;
                self.id_of(&s).ok_or_else(|| {
                    Error::InvalidArgument(format!("play of length {i} exceeds depth {}", self.depth))
                })
            })
            .collect()
    }
}

/// Identifier of the length-`prefix` prefix of play `id`, which has length `len`.
fn prefix_id(offsets: &[usize], branching: usize, id: usize, len: usize, prefix: usize) -> usize {
    let rank = id - offsets[len - 1];
    offsets[prefix - 1] + rank / branching.pow((len - prefix) as u32)
}

fn play_name(base: &Structure, s: &Play<Elem>) -> String {
    s.moves()
        .iter()
        .map(|m| {
            let name = base.name(m.elem);
            if name.contains([':', ';', '[', ']']) {
                format!("{}:[{}]", m.pebble, name)
            } else {
                format!("{}:{}", m.pebble, name)
            }
        })
        .join(";")
}
