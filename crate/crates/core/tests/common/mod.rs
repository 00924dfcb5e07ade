//! Independent oracles and fixtures shared by the integration tests.
//!
//! The oracles never call into the game solvers, width algorithms or
//! evaluators of the library; only `Structure` is used as a container. The
//! modal-axiom driver and the corrupted comonads at the end are harnesses
//! around library code.

#![allow(dead_code)]

use std::collections::HashMap;

use itertools::Itertools;
use pebbling_core::constructions::{generate, grid, Kind};
use pebbling_core::{Elem, Signature, Structure};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn graph(n: usize, edges: &[(usize, usize)]) -> Structure {
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut s = Structure::new(Signature::new([("E", 2)]).unwrap(), names).unwrap();
    for &(x, y) in edges {
        s.insert(0, vec![x, y]).unwrap();
    }
    s
}

pub fn undirected(n: usize, edges: &[(usize, usize)]) -> Structure {
    let both: Vec<_> = edges.iter().flat_map(|&(x, y)| [(x, y), (y, x)]).collect();
    graph(n, &both)
}

fn edge_bits(s: &Structure) -> u32 {
    let n = s.len();
    s.relation(0).iter().map(|t| 1u32 << (t[0] * n + t[1])).sum()
}

/// One representative per isomorphism class of structures with one binary
/// relation and `1..=max_n` elements.
pub fn small_structures(max_n: usize) -> Vec<Structure> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
        let mut seen = std::collections::BTreeSet::new();
        for bits in 0u32..(1 << (n * n)) {
            let canon = perms
                .iter()
                .map(|p| {
                    (0..n * n)
                        .filter(|&i| bits & (1 << i) != 0)
                        .map(|i| 1u32 << (p[i / n] * n + p[i % n]))
                        .sum::<u32>()
                })
                .min()
                .unwrap();
            if seen.insert(canon) {
                let edges: Vec<_> = (0..n * n)
                    .filter(|&i| canon & (1 << i) != 0)
                    .map(|i| (i / n, i % n))
                    .collect();
                out.push(graph(n, &edges));
            }
        }
    }
    out
}

/// Symmetric random graph on `n` vertices.
pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Structure {
    let edges: Vec<_> = (0..n)
        .tuple_combinations()
        .filter(|_| rng.gen_bool(p))
        .collect();
    undirected(n, &edges)
}

pub fn random_graphs(seed: u64, count: usize, max_n: usize) -> Vec<Structure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=max_n);
            random_graph(&mut rng, n, 0.45)
        })
        .collect()
}

/// Paths P₂..P₆, cycles C₃..C₆, cliques K₂..K₅, the 3×3 grid and 30 seeded
/// random graphs on at most 7 vertices, with display names.
pub fn corpus() -> Vec<(String, Structure)> {
    let mut out = Vec::new();
    for n in 2..=6 {
        out.push((format!("P{n}"), generate(Kind::Path, n).unwrap()));
    }
    for n in 3..=6 {
        out.push((format!("C{n}"), generate(Kind::Cycle, n).unwrap()));
    }
    for n in 2..=5 {
        out.push((format!("K{n}"), generate(Kind::Complete, n).unwrap()));
    }
    out.push(("grid3x3".into(), grid(3, 3).unwrap()));
    for (i, g) in random_graphs(0x5eed, 30, 7).into_iter().enumerate() {
        out.push((format!("random{i}"), g));
    }
    out
}

/// The corpus members small enough for bounded comonad fragments.
pub fn small_corpus() -> Vec<(String, Structure)> {
    corpus().into_iter().filter(|(_, s)| s.len() <= 4).collect()
}

/// Digraph on up to `max_n` vertices, loops allowed.
pub fn arb_digraph(max_n: usize) -> impl Strategy<Value = Structure> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
            let edges: Vec<_> = (0..n * n).filter(|&i| bits[i]).map(|i| (i / n, i % n)).collect();
            graph(n, &edges)
        })
    })
}

/// Loopless symmetric graph on up to `max_n` vertices.
pub fn arb_graph(max_n: usize) -> impl Strategy<Value = Structure> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
        proptest::collection::vec(any::<bool>(), pairs.len()).prop_map(move |bits| {
            let edges: Vec<_> = pairs.iter().zip(bits).filter(|(_, b)| *b).map(|(e, _)| *e).collect();
            undirected(n, &edges)
        })
    })
}

// ---------------------------------------------------------------------------
// Brute force

/// Every map `a → b`, as vectors of images.
pub fn all_maps(n: usize, m: usize) -> impl Iterator<Item = Vec<Elem>> {
    (0..n).map(|_| 0..m).multi_cartesian_product().chain((n == 0).then(Vec::new))
}

pub fn preserves(a: &Structure, b: &Structure, h: &[Elem]) -> bool {
    (0..a.signature().len()).all(|r| {
        let rb = b.signature().position(a.signature().name(r)).unwrap();
        a.relation(r).iter().all(|t| {
            let image: Vec<Elem> = t.iter().map(|&x| h[x]).collect();
            b.holds(rb, &image)
        })
    })
}

pub fn brute_hom(a: &Structure, b: &Structure) -> bool {
    all_maps(a.len(), b.len()).any(|h| preserves(a, b, &h))
}

pub fn brute_iso(a: &Structure, b: &Structure) -> bool {
    a.len() == b.len()
        && a.tuple_count() == b.tuple_count()
        && (0..b.len()).permutations(a.len()).any(|h| preserves(a, b, &h))
}

/// Size of the core: the least substructure that `a` maps into.
pub fn brute_core_size(a: &Structure) -> usize {
    (1..=a.len())
        .find(|&size| {
            (0..a.len()).combinations(size).any(|sub| {
                let sub_s = a.induced_substructure(&sub).unwrap();
                brute_hom(a, &sub_s)
            })
        })
        .unwrap()
}

/// Gaifman adjacency, computed from the relations directly.
pub fn adjacency(a: &Structure) -> Vec<Vec<bool>> {
    let n = a.len();
    let mut adj = vec![vec![false; n]; n];
    for (_, t) in a.tuples() {
        for (&x, &y) in t.iter().tuple_combinations() {
            if x != y {
                adj[x][y] = true;
                adj[y][x] = true;
            }
        }
    }
    adj
}

/// Treewidth as the least maximum back-degree over all elimination orders.
pub fn brute_treewidth(a: &Structure) -> usize {
    let n = a.len();
    let base = adjacency(a);
    (0..n)
        .permutations(n)
        .map(|order| {
            let mut adj = base.clone();
            let mut gone = vec![false; n];
            let mut width = 0;
            for &v in &order {
                let nb: Vec<usize> = (0..n).filter(|&w| !gone[w] && adj[v][w]).collect();
                width = width.max(nb.len());
                for (&x, &y) in nb.iter().tuple_combinations() {
                    adj[x][y] = true;
                    adj[y][x] = true;
                }
                gone[v] = true;
            }
            width
        })
        .min()
        .unwrap_or(0)
}

// ---------------------------------------------------------------------------
// Game trees over pebble-indexed positions

type Slot = Option<(Elem, Elem)>;

fn decode(mut code: usize, k: usize, n: usize, m: usize) -> Vec<Slot> {
    let base = n * m + 1;
    (0..k)
        .map(|_| {
            let d = code % base;
            code /= base;
            (d > 0).then(|| ((d - 1) / m, (d - 1) % m))
        })
        .collect()
}

fn encode(slots: &[Slot], n: usize, m: usize) -> usize {
    let base = n * m + 1;
    slots.iter().rev().fold(0, |acc, s| acc * base + s.map_or(0, |(a, b)| 1 + a * m + b))
}

fn partial_map(slots: &[Slot], injective: bool) -> Option<HashMap<Elem, Elem>> {
    let mut map = HashMap::new();
    let mut back = HashMap::new();
    for &(a, b) in slots.iter().flatten() {
        if *map.entry(a).or_insert(b) != b {
            return None;
        }
        if injective && *back.entry(b).or_insert(a) != a {
            return None;
        }
    }
    Some(map)
}

fn partial_hom(slots: &[Slot], a: &Structure, b: &Structure) -> bool {
    let Some(map) = partial_map(slots, false) else { return false };
    a.tuples().all(|(r, t)| {
        let image: Option<Vec<Elem>> = t.iter().map(|x| map.get(x).copied()).collect();
        image.is_none_or(|img| b.holds(r, &img))
    })
}

fn partial_iso(slots: &[Slot], a: &Structure, b: &Structure) -> bool {
    let Some(map) = partial_map(slots, true) else { return false };
    let dom: Vec<Elem> = map.keys().copied().collect();
    (0..a.signature().len()).all(|r| {
        let arity = a.signature().arity(r);
        (0..arity).map(|_| dom.iter()).multi_cartesian_product().all(|t| {
            let src: Vec<Elem> = t.iter().map(|&&x| x).collect();
            let img: Vec<Elem> = src.iter().map(|x| map[x]).collect();
            a.holds(r, &src) == b.holds(r, &img)
        })
    })
}

/// Spoiler's attractor in the k-pebble game on pebble-indexed positions,
/// computed round by round. Returns whether Duplicator survives from the
/// empty position.
fn duplicator_survives(a: &Structure, b: &Structure, k: usize, back: bool) -> bool {
    let (n, m) = (a.len(), b.len());
    let total = (n * m + 1).pow(k as u32);
    let slots: Vec<Vec<Slot>> = (0..total).map(|c| decode(c, k, n, m)).collect();
    let mut lost: Vec<bool> = slots
        .iter()
        .map(|s| if back { !partial_iso(s, a, b) } else { !partial_hom(s, a, b) })
        .collect();
    let succ = |s: &[Slot], p: usize, x: Elem, y: Elem| {
        let mut t = s.to_vec();
        t[p] = Some((x, y));
        encode(&t, n, m)
    };
    loop {
        let mut changed = false;
        for c in 0..total {
            if lost[c] {
                continue;
            }
            let s = &slots[c];
            let forth = (0..k).any(|p| (0..n).any(|x| (0..m).all(|y| lost[succ(s, p, x, y)])));
            let backward =
                back && (0..k).any(|p| (0..m).any(|y| (0..n).all(|x| lost[succ(s, p, x, y)])));
            if forth || backward {
                lost[c] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    !lost[0]
}

/// Spoiler's attractor in the k-pebble bijection game: Spoiler lifts a pebble,
/// Duplicator chooses a bijection, Spoiler places the pebble on some `x` and
/// its partner on the image of `x`.
pub fn game_tree_bijection(a: &Structure, b: &Structure, k: usize) -> bool {
    let (n, m) = (a.len(), b.len());
    if n != m {
        return false;
    }
    let total = (n * m + 1).pow(k as u32);
    let bijections: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let slots: Vec<Vec<Slot>> = (0..total).map(|c| decode(c, k, n, m)).collect();
    let mut lost: Vec<bool> = slots.iter().map(|s| !partial_iso(s, a, b)).collect();
    loop {
        let mut changed = false;
        for c in 0..total {
            if lost[c] {
                continue;
            }
            let s = &slots[c];
            let spoiler_wins = (0..k).any(|p| {
                bijections.iter().all(|h| {
                    (0..n).any(|x| {
                        let mut t = s.clone();
                        t[p] = Some((x, h[x]));
                        lost[encode(&t, n, m)]
                    })
                })
            });
            if spoiler_wins {
                lost[c] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    !lost[0]
}

/// `a →_k b` by game-tree search.
pub fn game_tree_arrow(a: &Structure, b: &Structure, k: usize) -> bool {
    duplicator_survives(a, b, k, false)
}

/// `a ≡^k b` by game-tree search of the back-and-forth game.
pub fn game_tree_bf(a: &Structure, b: &Structure, k: usize) -> bool {
    duplicator_survives(a, b, k, true)
}

// ---------------------------------------------------------------------------
// ∃⁺ sentences with k variables, enumerated by their meaning
//
// Every ∃⁺ formula is a disjunction of ∨-free ones with the same variables and
// quantifier depth, and a sentence true in `a` and false in `b` has such a
// disjunct. So it is enough to close the atoms under ∧ and ∃xᵢ. A formula is
// kept as (free-variable mask, assignments satisfying it in a, in b), with
// assignments xᵢ ↦ digit i of the index in base |a| (resp. |b|).

#[derive(Clone, Copy)]
struct Space {
    n: usize,
    k: usize,
}

impl Space {
    fn size(self) -> usize {
        self.n.pow(self.k as u32)
    }

    fn full(self) -> u64 {
        if self.size() == 64 { u64::MAX } else { (1u64 << self.size()) - 1 }
    }

    fn digit(self, idx: usize, i: usize) -> usize {
        idx / self.n.pow(i as u32) % self.n
    }

    fn set_digit(self, idx: usize, i: usize, v: usize) -> usize {
        let w = self.n.pow(i as u32);
        idx - self.digit(idx, i) * w + v * w
    }

    fn atom(self, s: &Structure, i: usize, j: usize) -> u64 {
        (0..self.size())
            .filter(|&x| s.holds(0, &[self.digit(x, i), self.digit(x, j)]))
            .map(|x| 1u64 << x)
            .sum()
    }

    fn eq(self, i: usize, j: usize) -> u64 {
        (0..self.size())
            .filter(|&x| self.digit(x, i) == self.digit(x, j))
            .map(|x| 1u64 << x)
            .sum()
    }

    fn exists(self, set: u64, i: usize) -> u64 {
        (0..self.size())
            .filter(|&x| (0..self.n).any(|v| set & (1u64 << self.set_digit(x, i, v)) != 0))
            .map(|x| 1u64 << x)
            .sum()
    }
}

type Meaning = (u8, u64, u64);

/// Closure of `gens` under conjunction, dropping formulas false everywhere in `a`.
fn and_closure(gens: Vec<Meaning>) -> Vec<Meaning> {
    let mut index: HashMap<(u8, u64), usize> = HashMap::new();
    let mut items: Vec<Meaning> = Vec::new();
    let mut queue = Vec::new();
    let mut add = |f: Meaning, items: &mut Vec<Meaning>, queue: &mut Vec<usize>| {
        if f.1 == 0 {
            return;
        }
        match index.get(&(f.0, f.1)) {
            Some(&i) => {
                let y = items[i].2 & f.2;
                if y != items[i].2 {
                    items[i].2 = y;
                    queue.push(i);
                }
            }
            None => {
                index.insert((f.0, f.1), items.len());
                queue.push(items.len());
                items.push(f);
            }
        }
    };
    for g in gens {
        add(g, &mut items, &mut queue);
    }
    while let Some(i) = queue.pop() {
        let f = items[i];
        for j in 0..items.len() {
            let g = items[j];
            add((f.0 | g.0, f.1 & g.1, f.2 & g.2), &mut items, &mut queue);
        }
    }
    items
}

/// Whether every ∃⁺ sentence with at most `k` variables and quantifier depth
/// at most `depth` that holds in `a` also holds in `b`.
pub fn positive_sentences_preserved(a: &Structure, b: &Structure, k: usize, depth: usize) -> bool {
    assert!(a.len().pow(k as u32) <= 64 && b.len().pow(k as u32) <= 64);
    let (sa, sb) = (Space { n: a.len(), k }, Space { n: b.len(), k });
    let mut atoms: Vec<Meaning> = vec![(0, sa.full(), sb.full())];
    for i in 0..k {
        for j in 0..k {
            let mask = (1u8 << i) | (1u8 << j);
            atoms.push((mask, sa.atom(a, i, j), sb.atom(b, i, j)));
            if i < j {
                atoms.push((mask, sa.eq(i, j), sb.eq(i, j)));
            }
        }
    }
    let mut level = and_closure(atoms.clone());
    for d in 1..=depth {
        let mut gens = atoms.clone();
        for &(mask, x, y) in &level {
            for i in 0..k {
                let f = (mask & !(1u8 << i), sa.exists(x, i), sb.exists(y, i));
                if f.0 == 0 && f.1 != 0 && f.2 == 0 {
                    return false;
                }
                gens.push(f);
            }
        }
        if d < depth {
            level = and_closure(gens);
        }
    }
    true
}

/// Agreement in both directions.
pub fn positive_equivalent(a: &Structure, b: &Structure, k: usize, depth: usize) -> bool {
    positive_sentences_preserved(a, b, k, depth) && positive_sentences_preserved(b, a, k, depth)
}

// The strongest ∨-free formula of quantifier depth d true at a partial
// assignment σ of a:
//
//   χ_d^σ = ⋀{atoms and equalities over dom σ true at σ} ∧ ⋀_{i, v} ∃xᵢ χ_{d-1}^{σ[i ↦ v]}
//
// Every ∨-free formula of depth at most d true at σ is implied by χ_d^σ, so a
// sentence of depth d true in a and false in b exists iff b ⊭ χ_d^∅.
// `satisfies` evaluates χ_d^σ in b at τ, memoized on (d, σ, τ).

struct Characteristic<'s> {
    a: &'s Structure,
    b: &'s Structure,
    k: usize,
    memo: HashMap<(usize, Vec<Option<Elem>>, Vec<Option<Elem>>), bool>,
}

impl Characteristic<'_> {
    fn atoms_carry(&self, sigma: &[Option<Elem>], tau: &[Option<Elem>]) -> bool {
        for i in 0..self.k {
            for j in 0..self.k {
                let (Some(x), Some(y), Some(u), Some(w)) = (sigma[i], sigma[j], tau[i], tau[j]) else {
                    continue;
                };
                if x == y && u != w {
                    return false;
                }
                for r in 0..self.a.signature().len() {
                    if self.a.signature().arity(r) == 2 && self.a.holds(r, &[x, y]) {
                        let rb = self.b.signature().position(self.a.signature().name(r)).unwrap();
                        if !self.b.holds(rb, &[u, w]) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn satisfies(&mut self, d: usize, sigma: Vec<Option<Elem>>, tau: Vec<Option<Elem>>) -> bool {
        let key = (d, sigma, tau);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let (_, sigma, tau) = &key;
        let mut ok = self.atoms_carry(sigma, tau);
        if ok && d > 0 {
            'outer: for i in 0..self.k {
                for v in 0..self.a.len() {
                    let mut s2 = sigma.clone();
                    s2[i] = Some(v);
                    let found = (0..self.b.len()).any(|w| {
                        let mut t2 = tau.clone();
                        t2[i] = Some(w);
                        self.satisfies(d - 1, s2.clone(), t2)
                    });
                    if !found {
                        ok = false;
                        break 'outer;
                    }
                }
            }
        }
        self.memo.insert(key, ok);
        ok
    }
}

/// Same verdict as [`positive_sentences_preserved`], through the
/// characteristic sentence of `a` instead of a closure over all formulas.
/// Binary relations only.
pub fn characteristic_sentence_holds(a: &Structure, b: &Structure, k: usize, depth: usize) -> bool {
    assert!(a.signature().iter().all(|(_, arity)| arity == 2));
    let mut c = Characteristic { a, b, k, memo: HashMap::new() };
    c.satisfies(depth, vec![None; k], vec![None; k])
}

// ---------------------------------------------------------------------------
// Formulas

use pebbling_core::logic::{evaluate, Assignment, BoxOptions, Formula, ModalEvaluator};

/// Tarskian evaluation by exhaustive search, for box-free formulas.
pub fn naive_eval(a: &Structure, env: &mut HashMap<usize, Elem>, f: &Formula) -> bool {
    match f {
        Formula::Atom { relation, vars } => {
            let r = a.signature().position(relation).unwrap();
            let t: Vec<Elem> = vars.iter().map(|v| env[v]).collect();
            a.holds(r, &t)
        }
        Formula::Eq(x, y) => env[x] == env[y],
        Formula::And(fs) => fs.iter().all(|g| naive_eval(a, env, g)),
        Formula::Or(fs) => fs.iter().any(|g| naive_eval(a, env, g)),
        Formula::Exists(v, body) => {
            let saved = env.get(v).copied();
            let found = a.elements().any(|e| {
                env.insert(*v, e);
                naive_eval(a, env, body)
            });
            match saved {
                Some(e) => env.insert(*v, e),
                None => env.remove(v),
            };
            found
        }
        Formula::Box { .. } => panic!("naive_eval takes box-free formulas"),
    }
}

/// Ten ∃⁺ formulas over `E`: sentences and formulas with free variables,
/// quantifier depth up to 3, at most two variables except the triangle.
pub fn modal_battery() -> Vec<(&'static str, Formula)> {
    [
        ("loop", "(exists 1 (atom E 1 1))"),
        ("edge", "(exists 1 (exists 2 (atom E 1 2)))"),
        ("two-cycle", "(exists 1 (exists 2 (and (atom E 1 2) (atom E 2 1))))"),
        ("walk-2", "(exists 1 (exists 2 (and (atom E 1 2) (exists 1 (atom E 2 1)))))"),
        ("out-edge", "(exists 2 (atom E 1 2))"),
        ("adjacent", "(or (atom E 1 2) (atom E 2 1))"),
        ("on-two-cycle", "(exists 2 (and (atom E 1 2) (atom E 2 1)))"),
        ("loop-or-into-loop", "(exists 1 (or (atom E 1 1) (exists 2 (and (atom E 1 2) (atom E 2 2)))))"),
        ("edge-then-out-edge", "(and (atom E 1 2) (exists 1 (atom E 2 1)))"),
        ("triangle", "(exists 1 (exists 2 (exists 3 (and (atom E 1 2) (atom E 2 3) (atom E 3 1)))))"),
    ]
    .into_iter()
    .map(|(n, t)| (n, t.parse().unwrap()))
    .collect()
}

/// Equal elements of a tuple become distinct plays under α, so φ ⊃ □_k φ is
/// only expected without equality atoms.
pub fn has_equality(f: &Formula) -> bool {
    match f {
        Formula::Atom { .. } => false,
        Formula::Eq(..) => true,
        Formula::And(fs) | Formula::Or(fs) => fs.iter().any(has_equality),
        Formula::Exists(_, g) | Formula::Box { body: g, .. } => has_equality(g),
    }
}

#[derive(Debug, Default)]
pub struct ModalOutcome {
    pub checks: usize,
    pub nested_skipped: usize,
    pub violations: Vec<String>,
}

/// Checks, for every tuple over `a` bound to the free variables of `body` and
/// every k in `ks` with `body ∈ L^k`:
/// (T) □_k φ ⊃ φ; φ ⊃ □_k φ; grading □_k φ ⊃ □_{k+1} φ; (4) □_k φ ⊃ □_k □_k φ
/// where the doubly bounded fragment fits in `nested_plays`; and that □_k φ
/// does not change when the fragment is one move deeper.
pub fn check_modal_axioms(
    a: &Structure,
    body: &Formula,
    ks: &[usize],
    max_plays: usize,
    nested_plays: usize,
) -> ModalOutcome {
    check_modal_battery(a, &[("", body.clone())], ks, max_plays, nested_plays)
}

/// [`check_modal_axioms`] for several formulas, sharing the fragments.
pub fn check_modal_battery(
    a: &Structure,
    battery: &[(&str, Formula)],
    ks: &[usize],
    max_plays: usize,
    nested_plays: usize,
) -> ModalOutcome {
    let mut out = ModalOutcome::default();
    let base = ModalEvaluator::new(a, BoxOptions { extra_depth: 0, max_plays });
    let deep = ModalEvaluator::new(a, BoxOptions { extra_depth: 1, max_plays });
    let nested = ModalEvaluator::new(a, BoxOptions { extra_depth: 0, max_plays: nested_plays });
    for ((name, body), &k) in battery.iter().cartesian_product(ks) {
        let free: Vec<usize> = body.free_vars().into_iter().collect();
        if body.check(a, Some(k)).is_err() || free.len() > k {
            continue;
        }
        let boxed = Formula::boxed(k, body.clone());
        let graded = Formula::boxed(k + 1, body.clone());
        let twice = Formula::boxed(k, boxed.clone());
        for tuple in (0..free.len()).map(|_| a.elements()).multi_cartesian_product() {
            let env: Assignment = free.iter().copied().zip(tuple.iter().copied()).collect();
            let mut naive_env: HashMap<usize, Elem> = env.iter().map(|(&v, &e)| (v, e)).collect();
            let plain = evaluate(a, &env, body).unwrap();
            let b = base.eval_box(&tuple, &boxed).unwrap();
            let deeper = deep.eval_box(&tuple, &boxed).unwrap();
            let b_graded = base.eval_box(&tuple, &graded).unwrap();
            let mut fail = |what: &str| out.violations.push(format!("{name} {what} at k={k} tuple={tuple:?}"));
            if plain != naive_eval(a, &mut naive_env, body) {
                fail("evaluator disagrees with exhaustive search");
            }
            if b && !plain {
                fail("(T)");
            }
            if plain && !b && !has_equality(body) {
                fail("φ ⊃ □φ");
            }
            if b && !b_graded {
                fail("grading");
            }
            if b != deeper {
                fail("depth stability");
            }
            match nested.eval_box(&tuple, &twice) {
                Ok(bb) => {
                    if b && !bb {
                        fail("(4)");
                    }
                    out.checks += 1;
                }
                Err(pebbling_core::Error::SizeCap { .. }) => out.nested_skipped += 1,
                Err(e) => panic!("{e}"),
            }
            out.checks += 5;
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Corrupted comonad operations

use pebbling_core::comonad::{Play, PlayComonad};

/// δ that forgets the last prefix of plays longer than one move.
pub struct ShortComult;

impl PlayComonad for ShortComult {
    fn counit<E: Clone>(&self, s: &Play<E>) -> E {
        s.counit()
    }

    fn comult<E: Clone>(&self, s: &Play<E>) -> Play<Play<E>> {
        let d = s.comult();
        if d.len() > 1 {
            Play::new(d.moves()[..d.len() - 1].to_vec()).unwrap()
        } else {
            d
        }
    }
}

/// ε that answers with the first element instead of the last.
pub struct FirstCounit;

impl PlayComonad for FirstCounit {
    fn counit<E: Clone>(&self, s: &Play<E>) -> E {
        s.moves()[0].elem.clone()
    }

    fn comult<E: Clone>(&self, s: &Play<E>) -> Play<Play<E>> {
        s.comult()
    }
}

/// δ that repeats the whole play at every position.
pub struct FlatComult;

impl PlayComonad for FlatComult {
    fn counit<E: Clone>(&self, s: &Play<E>) -> E {
        s.counit()
    }

    fn comult<E: Clone>(&self, s: &Play<E>) -> Play<Play<E>> {
        s.lift(|_| s.clone())
    }
}

/// Every parent forest on `n` elements with labels in `1..=k`.
pub fn candidate_traversals(n: usize, k: usize) -> impl Iterator<Item = (Vec<Option<Elem>>, Vec<usize>)> {
    let parents: Vec<Vec<Option<Elem>>> = (0..n)
        .map(|x| std::iter::once(None).chain((0..n).filter(move |&y| y != x).map(Some)).collect::<Vec<_>>())
        .multi_cartesian_product()
        .collect();
    let labels: Vec<Vec<usize>> = (0..n).map(|_| 1..=k).multi_cartesian_product().collect();
    parents.into_iter().cartesian_product(labels)
}
