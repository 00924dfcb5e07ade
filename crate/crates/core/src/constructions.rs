//! Generators for the standard witness structures.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::comonad::bounded::{BoundedTk, DEFAULT_MAX_PLAYS};
use crate::comonad::play::{Move, Play};
use crate::error::{Error, Result};
use crate::games::existential::arrow_k;
use crate::games::transducer::{realize, Responder};
use crate::structure::{Elem, Homomorphism, Signature, Structure};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    /// Irreflexive complete graph, edges in both directions.
    Complete,
    /// Directed cycle.
    Cycle,
    /// Cycle with edges in both directions.
    SymmetricCycle,
    /// Directed path.
    Path,
    /// No edges.
    Empty,
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Kind> {
        match s {
            "complete" | "clique" | "k" => Ok(Kind::Complete),
            "cycle" | "c" => Ok(Kind::Cycle),
            "sym-cycle" | "symmetric-cycle" => Ok(Kind::SymmetricCycle),
            "path" | "p" => Ok(Kind::Path),
            "empty" => Ok(Kind::Empty),
            other => Err(Error::InvalidArgument(format!("unknown structure kind `{other}`"))),
        }
    }
}

/// Vertex names `a`, `b`, … for up to 26 vertices, `v0`, `v1`, … beyond.
pub fn vertex_names(n: usize) -> Vec<String> {
    if n <= 26 {
        (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
    } else {
        (0..n).map(|i| format!("v{i}")).collect()
    }
}

fn graph(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Structure> {
    let mut s = Structure::new(Signature::new([("E", 2)])?, vertex_names(n))?;
    for (x, y) in edges {
        s.insert(0, vec![x, y])?;
    }
    Ok(s)
}

/// A graph over the single binary relation `E`.
pub fn generate(kind: Kind, n: usize) -> Result<Structure> {
    let min = match kind {
        Kind::Cycle | Kind::SymmetricCycle => 3,
        _ => 1,
    };
    if n < min {
        return Err(Error::InvalidArgument(format!("{kind:?} needs n ≥ {min}")));
    }
    match kind {
        Kind::Complete => graph(n, (0..n).flat_map(|x| (0..n).filter(move |&y| y != x).map(move |y| (x, y)))),
        Kind::Cycle => graph(n, (0..n).map(|x| (x, (x + 1) % n))),
        Kind::SymmetricCycle => {
            graph(n, (0..n).flat_map(|x| [(x, (x + 1) % n), ((x + 1) % n, x)]))
        }
        Kind::Path => graph(n, (1..n).map(|x| (x - 1, x))),
        Kind::Empty => graph(n, []),
    }
}

/// The `rows × cols` grid with symmetric edges; vertex `(r, c)` is named `v{r}_{c}`.
pub fn grid(rows: usize, cols: usize) -> Result<Structure> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument("grid dimensions must be positive".into()));
    }
    let id = |r: usize, c: usize| r * cols + c;
    let names: Vec<String> = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| format!("v{r}_{c}")))
        .collect();
    let mut s = Structure::new(Signature::new([("E", 2)])?, names)?;
    for r in 0..rows {
        for c in 0..cols {
            let mut link = |x: usize, y: usize| -> Result<()> {
                s.insert(0, vec![x, y])?;
                s.insert(0, vec![y, x])
            };
            if r + 1 < rows {
                link(id(r, c), id(r + 1, c))?;
            }
            if c + 1 < cols {
                link(id(r, c), id(r, c + 1))?;
            }
        }
    }
    Ok(s)
}

fn parity_signature() -> Signature {
    Signature::new([("R0", 3), ("R1", 3)]).expect("valid signature")
}

/// Universe `{0, 1}`; `R0` and `R1` hold the even- and odd-parity triples.
pub fn z2() -> Structure {
    let mut s = Structure::new(parity_signature(), ["0", "1"]).expect("valid");
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                s.insert((i ^ j ^ k) as usize, vec![i, j, k]).expect("valid");
            }
        }
    }
    s
}

/// A system of equations `x ⊕ y ⊕ z = c` over Z2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Z2System {
    pub variables: Vec<String>,
    pub equations: Vec<(String, String, String, u8)>,
}

impl Z2System {
    pub fn validate(&self) -> Result<()> {
        if self.variables.is_empty() {
            return Err(Error::InvalidArgument("system has no variables".into()));
        }
        for (x, y, z, c) in &self.equations {
            if *c > 1 {
                return Err(Error::InvalidArgument(format!("parity {c} is not 0 or 1")));
            }
            if let Some(v) = [x, y, z].into_iter().find(|v| !self.variables.contains(v)) {
                return Err(Error::InvalidArgument(format!("undeclared variable `{v}`")));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Z2System> {
        let s: Z2System = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }
}

/// Variables become elements; an equation with parity `c` becomes a tuple of `R{c}`.
pub fn system_to_structure(sys: &Z2System) -> Result<Structure> {
    sys.validate()?;
    let mut s = Structure::new(parity_signature(), sys.variables.iter().cloned())?;
    for (x, y, z, c) in &sys.equations {
        s.insert_named(&format!("R{c}"), &[x, y, z])?;
    }
    Ok(s)
}

fn system(vars: &[&str], eqs: &[(&str, &str, &str, u8)]) -> Z2System {
    Z2System {
        variables: vars.iter().map(|v| v.to_string()).collect(),
        equations: eqs
            .iter()
            .map(|&(x, y, z, c)| (x.into(), y.into(), z.into(), c))
            .collect(),
    }
}

/// The Mermin magic square: rows and the first two columns even, the last column odd.
pub fn mermin_system() -> Z2System {
    system(
        &["A", "B", "C", "D", "E", "F", "G", "H", "I"],
        &[
            ("A", "B", "C", 0),
            ("D", "E", "F", 0),
            ("G", "H", "I", 0),
            ("A", "D", "G", 0),
            ("B", "E", "H", 0),
            ("C", "F", "I", 1),
        ],
    )
}

pub fn mermin() -> Structure {
    system_to_structure(&mermin_system()).expect("valid system")
}

/// `x ⊕ y ⊕ z = 0` and `x ⊕ y ⊕ z = 1`.
pub fn contradictory_system() -> Z2System {
    system(&["x", "y", "z"], &[("x", "y", "z", 0), ("x", "y", "z", 1)])
}

/// The two structures on `A × {0, 1}` and the homomorphisms `a ↦ (a, 0)`
/// from `A` into `A₀` and `(a, i) ↦ i` from `A₁` into Z2.
#[derive(Clone, Debug)]
pub struct CfiPair {
    pub a0: Structure,
    pub a1: Structure,
    pub embed: Homomorphism,
    pub project: Homomorphism,
}

/// Element `(a, i)` of the pair's universe.
pub fn cfi_elem(a: Elem, i: usize) -> Elem {
    2 * a + i
}

pub fn cfi_pair(a: &Structure) -> Result<CfiPair> {
    if !a.signature().same_as(&parity_signature()) {
        return Err(Error::SignatureMismatch(format!("expected {{R0:3, R1:3}}, got {}", a.signature())));
    }
    let names: Vec<String> = a
        .universe()
        .iter()
        .flat_map(|x| [format!("{x}#0"), format!("{x}#1")])
        .collect();
    let sig = a.signature().clone();
    let mut a0 = Structure::new(sig.clone(), names.clone())?;
    let mut a1 = Structure::new(sig, names)?;
    let r1 = a.signature().position("R1").unwrap();
    for (r, t) in a.tuples() {
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let parity = i ^ j ^ k;
                    let image = vec![cfi_elem(t[0], i), cfi_elem(t[1], j), cfi_elem(t[2], k)];
                    if parity == 0 {
                        a0.insert(r, image.clone())?;
                    }
                    if parity == usize::from(r == r1) {
                        a1.insert(r, image)?;
                    }
                }
            }
        }
    }
    let embed = Homomorphism::new(a.elements().map(|x| cfi_elem(x, 0)).collect());
    let project = Homomorphism::new(a1.elements().map(|e| e % 2).collect());
    Ok(CfiPair { a0, a1, embed, project })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CfiWitnessReport {
    pub k: usize,
    pub depth: usize,
    pub plays: usize,
    pub tuples: usize,
    pub bijective: bool,
    pub preserves: bool,
    pub reflects: bool,
}

impl CfiWitnessReport {
    pub fn verified(&self) -> bool {
        self.bijective && self.preserves && self.reflects
    }
}

/// `f′(s)`: the j-th move of `s = [(pⱼ, (aⱼ, iⱼ))]` becomes
/// `(pⱼ, (aⱼ, iⱼ ⊕ f(π sⱼ)))`, with `f` the co-Kleisli map `T_k A → Z2`
/// induced by `responder` and `π` dropping the tags.
pub fn cfi_map<R: Responder>(responder: &R, s: &Play<Elem>) -> Result<Play<Elem>> {
    let stripped = s.lift(|&e| e / 2);
    let answers = realize(responder, &stripped)?;
    let moves = s
        .moves()
        .iter()
        .zip(answers.moves())
        .map(|(m, f)| Move::new(m.pebble, m.elem ^ f.elem))
        .collect();
    Play::new(moves)
}

/// Checks on the fragments of depth `depth` that [`cfi_map`] is a bijection
/// from `T_k A₀` onto `T_k A₁` preserving and reflecting every relation.
pub fn cfi_witness_iso<R: Responder>(
    a: &Structure,
    k: usize,
    responder: &R,
    depth: usize,
) -> Result<CfiWitnessReport> {
    cfi_witness_iso_capped(a, k, responder, depth, DEFAULT_MAX_PLAYS)
}

pub fn cfi_witness_iso_capped<R: Responder>(
    a: &Structure,
    k: usize,
    responder: &R,
    depth: usize,
    max_plays: usize,
) -> Result<CfiWitnessReport> {
    if responder.k() != k {
        return Err(Error::InvalidArgument(format!("strategy uses {} pebbles, not {k}", responder.k())));
    }
    let pair = cfi_pair(a)?;
    let t0 = BoundedTk::with_cap(&pair.a0, k, depth, max_plays)?;
    let t1 = BoundedTk::with_cap(&pair.a1, k, depth, max_plays)?;
    let mut image = Vec::with_capacity(t0.len());
    let mut hit = vec![false; t1.len()];
    for s in t0.plays() {
        let id = t1
            .id_of(&cfi_map(responder, s)?)
            .ok_or_else(|| Error::InvalidPlay("image outside the fragment".into()))?;
        hit[id] = true;
        image.push(id);
    }
    let bijective = t0.len() == t1.len() && hit.iter().all(|&h| h);
    let (s0, s1) = (t0.structure(), t1.structure());
    let mut tuples = 0;
    let mut preserves = true;
    for (r, t) in s0.tuples() {
        tuples += 1;
        let mapped: Vec<Elem> = t.iter().map(|&x| image[x]).collect();
        preserves &= s1.holds(r, &mapped);
    }
    let reflects = preserves
        && bijective
        && (0..s0.signature().len()).all(|r| s0.relation(r).len() == s1.relation(r).len());
    Ok(CfiWitnessReport { k, depth, plays: t0.len(), tuples, bijective, preserves, reflects })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NogoReport {
    pub m: usize,
    pub into_cycle: bool,
    pub into_path: bool,
    pub chain: Vec<String>,
    pub chain_linked: bool,
}

/// Length of the E-chain checked in the bounded `T_2 C_3`.
pub const NOGO_CHAIN: usize = 6;

/// `C_3 →_2 C_m` holds and `C_3 →_2 P_m` fails, and the bounded `T_2 C_3`
/// contains the E-chain `[(1,a)], [(1,a),(2,b)], [(1,a),(2,b),(1,c)], …`.
pub fn nogo_demo(m: usize) -> Result<NogoReport> {
    if m < 3 {
        return Err(Error::InvalidArgument("m must be at least 3".into()));
    }
    let c3 = generate(Kind::Cycle, 3)?;
    let into_cycle = arrow_k(&c3, &generate(Kind::Cycle, m)?, 2)?;
    let into_path = arrow_k(&c3, &generate(Kind::Path, m)?, 2)?;
    let tk = BoundedTk::new(&c3, 2, NOGO_CHAIN)?;
    let mut plays: Vec<Play<Elem>> = vec![Play::single(1, 0)];
    for i in 1..NOGO_CHAIN {
        let next = plays[i - 1].extend(i % 2 + 1, i % 3);
        plays.push(next);
    }
    let ids: Vec<usize> = plays.iter().map(|s| tk.id_of(s).unwrap()).collect();
    let chain_linked = ids.windows(2).all(|w| tk.structure().holds(0, &[w[0], w[1]]));
    let chain = ids.iter().map(|&i| tk.structure().name(i).to_string()).collect();
    Ok(NogoReport { m, into_cycle, into_path, chain, chain_linked })
}
