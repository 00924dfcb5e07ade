//! Deterministic Duplicator strategies as finite-state transducers.
//!
//! States are pebble-indexed configurations: which element a pebble sits on
//! decides what happens when that pebble is moved, so the canonical form alone
//! cannot drive transitions.

use std::collections::HashMap;

use serde_json::{json, Value};

use crate::comonad::play::{Move, Play};
use crate::error::{Error, Result};
use crate::games::config::{Configuration, Pebble};
use crate::games::existential::PositionalStrategy;
use crate::structure::{Elem, Structure};

/// Anything that answers Spoiler's moves one at a time.
pub trait Responder {
    fn k(&self) -> usize;

    /// Duplicator's answer to pebble `p` placed on `a` in state `state`, with
    /// the successor state.
    fn respond(&self, state: &Configuration, p: Pebble, a: Elem) -> Option<(Elem, Configuration)>;

    fn initial(&self) -> Configuration {
        Configuration::empty(self.k())
    }
}

/// Determinization of a positional strategy, evaluated on demand: from
/// configuration γ, answer (p, a) with the least b such that γ[p ↦ (a, b)]
/// stays in the strategy.
#[derive(Clone, Copy, Debug)]
pub struct Determinized<'s> {
    strategy: &'s PositionalStrategy,
}

impl<'s> Determinized<'s> {
    pub fn new(strategy: &'s PositionalStrategy) -> Self {
        Determinized { strategy }
    }
}

impl Responder for Determinized<'_> {
    fn k(&self) -> usize {
        self.strategy.k()
    }

    fn respond(&self, state: &Configuration, p: Pebble, a: Elem) -> Option<(Elem, Configuration)> {
        (0..self.strategy.target_len()).find_map(|b| {
            let next = state.update(p, a, b).ok()?;
            self.strategy.contains_configuration(&next).then_some((b, next))
        })
    }
}

/// A materialized transducer: every reachable state and its full transition table.
#[derive(Clone, Debug)]
pub struct Transducer {
    k: usize,
    source_len: usize,
    states: Vec<Configuration>,
    index: HashMap<Configuration, u32>,
    // delta[(state * k + (p - 1)) * source_len + a] = (b, next state)
    delta: Vec<(Elem, u32)>,
}

/// Default bound on materialized transducer states.
pub const DEFAULT_MAX_STATES: usize = 200_000;

/// Determinizes `s` and materializes the reachable part.
pub fn determinize(s: &PositionalStrategy) -> Result<Transducer> {
    determinize_capped(s, DEFAULT_MAX_STATES)
}

pub fn determinize_capped(s: &PositionalStrategy, max_states: usize) -> Result<Transducer> {
    materialize(&Determinized::new(s), s.source_len(), max_states)
}

/// Breadth-first closure of a responder from its initial state.
pub fn materialize<R: Responder>(r: &R, source_len: usize, max_states: usize) -> Result<Transducer> {
    let k = r.k();
    let initial = r.initial();
    let mut states = vec![initial.clone()];
    let mut index = HashMap::from([(initial, 0u32)]);
    let mut delta = Vec::new();
    let mut head = 0;
    while head < states.len() {
        let state = states[head].clone();
        head += 1;
        for p in 1..=k {
            for a in 0..source_len {
                let (b, next) = r.respond(&state, p, a).ok_or_else(|| {
                    Error::NotWinning(format!("no answer to pebble {p} on element #{a}"))
                })?;
                let id = match index.get(&next) {
                    Some(&id) => id,
                    None => {
                        if states.len() == max_states {
                            return Err(Error::SizeCap {
                                requested: format!("more than {max_states} transducer states"),
                                cap: max_states,
                            });
                        }
                        let id = states.len() as u32;
                        index.insert(next.clone(), id);
                        states.push(next);
                        id
                    }
                };
                delta.push((b, id));
            }
        }
    }
    Ok(Transducer { k, source_len, states, index, delta })
}

impl Transducer {
    pub fn states(&self) -> &[Configuration] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Transition from state number `state`.
    pub fn transition(&self, state: usize, p: Pebble, a: Elem) -> (Elem, usize) {
        let (b, next) = self.delta[(state * self.k + (p - 1)) * self.source_len + a];
        (b, next as usize)
    }

    /// JSON export: states as pebble-to-pair maps, and a flat transition list.
    pub fn to_json(&self, a: &Structure, b: &Structure) -> Value {
        let states: Vec<Value> = self
            .states
            .iter()
            .map(|c| {
                let map: serde_json::Map<String, Value> = c
                    .pairs()
                    .map(|(p, x, y)| (p.to_string(), json!([a.name(x), b.name(y)])))
                    .collect();
                Value::Object(map)
            })
            .collect();
        let mut delta = Vec::with_capacity(self.delta.len());
        for s in 0..self.states.len() {
            for p in 1..=self.k {
                for x in 0..self.source_len {
                    let (y, t) = self.transition(s, p, x);
                    delta.push(json!([s, p, a.name(x), b.name(y), t]));
                }
            }
        }
        json!({"k": self.k, "states": states, "initial": 0, "delta": delta})
    }
}

impl Responder for Transducer {
    fn k(&self) -> usize {
        self.k
    }

    fn respond(&self, state: &Configuration, p: Pebble, a: Elem) -> Option<(Elem, Configuration)> {
        let &s = self.index.get(state)?;
        if p == 0 || p > self.k || a >= self.source_len {
            return None;
        }
        let (b, t) = self.transition(s as usize, p, a);
        Some((b, self.states[t].clone()))
    }
}

/// Runs `r` along Spoiler's play, returning Duplicator's answering play.
pub fn realize<R: Responder>(r: &R, play: &Play<Elem>) -> Result<Play<Elem>> {
    let mut state = r.initial();
    let mut out = Vec::with_capacity(play.len());
    for m in play.moves() {
        if m.pebble == 0 || m.pebble > r.k() {
            return Err(Error::PebbleOutOfRange { pebble: m.pebble, k: r.k() });
        }
        let (b, next) = r
            .respond(&state, m.pebble, m.elem)
            .ok_or_else(|| Error::NotWinning(format!("no answer to {:?}", m)))?;
        out.push(Move::new(m.pebble, b));
        state = next;
    }
    Ok(Play::new(out).expect("nonempty input play"))
}

/// The co-Kleisli map a responder induces: the answer to the last move.
pub fn induced_map<R: Responder>(r: &R, play: &Play<Elem>) -> Result<Elem> {
    Ok(realize(r, play)?.counit())
}
