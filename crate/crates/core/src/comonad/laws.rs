//! Exhaustive checking of the comonad laws on a bounded fragment.

use std::ops::ControlFlow;

use serde::Serialize;

use crate::comonad::bounded::BoundedTk;
use crate::comonad::play::{tk_tuple_holds, Play};
use crate::error::Result;
use crate::hom::for_each_homomorphism;
use crate::structure::{Elem, Homomorphism, Signature, Structure};

/// Counit and comultiplication on plays. [`Pebbling`] is the real comonad;
/// other implementations exist to exercise the checker.
pub trait PlayComonad {
    fn counit<E: Clone>(&self, s: &Play<E>) -> E;
    fn comult<E: Clone>(&self, s: &Play<E>) -> Play<Play<E>>;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Pebbling;

impl PlayComonad for Pebbling {
    fn counit<E: Clone>(&self, s: &Play<E>) -> E {
        s.counit()
    }

    fn comult<E: Clone>(&self, s: &Play<E>) -> Play<Play<E>> {
        s.comult()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub plays: usize,
    pub checks: usize,
    pub violation: Option<String>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Maximum number of sampled endomorphisms used for naturality checks.
const SAMPLED_MAPS: usize = 8;

pub fn check_comonad_laws(a: &Structure, k: usize, depth: usize) -> Result<LawReport> {
    check_laws_with(&Pebbling, a, k, depth)
}

/// Checks on every play of length at most `depth`:
/// `ε∘δ = id`, `Tε∘δ = id`, `Tδ∘δ = δ∘δ`, naturality of ε and δ and
/// functoriality for sampled maps, and that ε, δ and lifted homomorphisms
/// preserve the relations of the fragment.
pub fn check_laws_with<C: PlayComonad>(
    c: &C,
    a: &Structure,
    k: usize,
    depth: usize,
) -> Result<LawReport> {
    check_laws_on(c, a, &BoundedTk::new(a, k, depth)?)
}

/// As [`check_laws_with`], on a fragment already built from `a`.
pub fn check_laws_on<C: PlayComonad>(c: &C, a: &Structure, tk: &BoundedTk) -> Result<LawReport> {
    let maps = sample_maps(a)?;
    let mut checks = 0usize;
    let fail = |law: &str, s: &Play<Elem>| -> Option<String> {
        Some(format!("{law} fails at {}", describe(a, s)))
    };

    for s in tk.plays() {
        let d = c.comult(s);
        checks += 3;
        if &c.counit(&d) != s {
            return Ok(report(tk, checks, fail("ε∘δ = id", s)));
        }
        if &d.lift(|t| c.counit(t)) != s {
            return Ok(report(tk, checks, fail("Tε∘δ = id", s)));
        }
        if d.lift(|t| c.comult(t)) != c.comult(&d) {
            return Ok(report(tk, checks, fail("Tδ∘δ = δ∘δ", s)));
        }
        if s.lift(|&x| x) != *s {
            return Ok(report(tk, checks, fail("T id = id", s)));
        }
        for (i, (f, _)) in maps.iter().enumerate() {
            checks += 3;
            let fs = s.lift(|&x| f.apply(x));
            if c.counit(&fs) != f.apply(c.counit(s)) {
                return Ok(report(tk, checks, fail("naturality of ε", s)));
            }
            if c.comult(&fs) != d.lift(|t| t.lift(|&x| f.apply(x))) {
                return Ok(report(tk, checks, fail("naturality of δ", s)));
            }
            let (g, _) = &maps[(i + 1) % maps.len()];
            if s.lift(|&x| g.apply(f.apply(x))) != fs.lift(|&y| g.apply(y)) {
                return Ok(report(tk, checks, fail("T(g∘f) = Tg∘Tf", s)));
            }
        }
    }

    let st = tk.structure();
    for (r, t) in st.tuples() {
        let plays: Vec<&Play<Elem>> = t.iter().map(|&i| tk.play(i)).collect();
        checks += 2;
        let lasts: Vec<Elem> = plays.iter().map(|s| c.counit(s)).collect();
        if !a.holds(r, &lasts) {
            return Ok(report(tk, checks, fail("ε is a homomorphism", plays[0])));
        }
        let ds: Vec<Play<Play<Elem>>> = plays.iter().map(|s| c.comult(s)).collect();
        let refs: Vec<&Play<Play<Elem>>> = ds.iter().collect();
        let inner_ok = tk_tuple_holds(&refs, |inner: &[Play<Elem>]| {
            let ids: Option<Vec<usize>> = inner.iter().map(|s| tk.id_of(s)).collect();
            ids.is_some_and(|ids| st.holds(r, &ids))
        });
        if !inner_ok {
            return Ok(report(tk, checks, fail("δ is a homomorphism", plays[0])));
        }
        for (f, target) in &maps {
            checks += 1;
            let lifted: Vec<Play<Elem>> = plays.iter().map(|s| s.lift(|&x| f.apply(x))).collect();
            let refs: Vec<&Play<Elem>> = lifted.iter().collect();
            let r_target = target.signature().position(a.signature().name(r)).unwrap();
            if !tk_tuple_holds(&refs, |e: &[Elem]| target.holds(r_target, e)) {
                return Ok(report(tk, checks, fail("T f is a homomorphism", plays[0])));
            }
        }
    }
    Ok(report(tk, checks, None))
}

fn report(tk: &BoundedTk, checks: usize, violation: Option<String>) -> LawReport {
    LawReport { plays: tk.len(), checks, violation }
}

fn describe(a: &Structure, s: &Play<Elem>) -> String {
    s.lift(|&x| a.name(x).to_string()).to_string()
}

/// Up to [`SAMPLED_MAPS`] endomorphisms of `a` in canonical order, plus the
/// constant map onto a single looped point.
fn sample_maps(a: &Structure) -> Result<Vec<(Homomorphism, Structure)>> {
    let mut maps = Vec::new();
    for_each_homomorphism(a, a, |h| {
        maps.push((h.clone(), a.clone()));
        if maps.len() == SAMPLED_MAPS {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    let sig: Vec<(String, usize)> = a.signature().iter().map(|(n, r)| (n.to_string(), r)).collect();
    let mut point = Structure::new(Signature::new(sig)?, ["*"])?;
    for r in 0..a.signature().len() {
        point.insert(r, vec![0; a.signature().arity(r)])?;
    }
    maps.push((Homomorphism::new(vec![0; a.len()]), point));
    Ok(maps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{generate, Kind};

    struct DropLast;

    impl PlayComonad for DropLast {
        fn counit<E: Clone>(&self, s: &Play<E>) -> E {
            s.counit()
        }

        fn comult<E: Clone>(&self, s: &Play<E>) -> Play<Play<E>> {
            let d = s.comult();
            if s.len() >= 2 {
                Play::new(d.moves()[..d.len() - 1].to_vec()).unwrap()
            } else {
                d
            }
        }
    }

    #[test]
    fn triangle_laws_hold() {
        let tri = generate(Kind::Cycle, 3).unwrap();
        let r = check_comonad_laws(&tri, 2, 3).unwrap();
        assert!(r.passed(), "{:?}", r.violation);
    }

    #[test]
    fn k2_single_pebble_laws_hold() {
        let k2 = generate(Kind::Complete, 2).unwrap();
        assert!(check_comonad_laws(&k2, 1, 4).unwrap().passed());
    }

    #[test]
    fn corrupted_comult_is_caught() {
        let tri = generate(Kind::Cycle, 3).unwrap();
        let r = check_laws_with(&DropLast, &tri, 2, 2).unwrap();
        assert!(!r.passed());
    }
}
