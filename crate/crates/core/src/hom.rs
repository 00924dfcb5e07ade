//! Brute-force homomorphism, isomorphism and core search.
//!
//! These are the desk-scale oracles: plain backtracking over total maps in
//! canonical order, checking each tuple as soon as all its entries are assigned.

use std::ops::ControlFlow;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::structure::{Elem, Homomorphism, Structure};

/// Checks that `h` is a total map `a → b` preserving every tuple.
pub fn is_homomorphism(a: &Structure, b: &Structure, h: &Homomorphism) -> Result<bool> {
    let align = a.signature().align(b.signature())?;
    if h.as_slice().len() != a.len() || h.as_slice().iter().any(|&x| x >= b.len()) {
        return Ok(false);
    }
    Ok(a.tuples().all(|(r, t)| {
        let image: Vec<Elem> = t.iter().map(|&e| h.apply(e)).collect();
        b.holds(align[r], &image)
    }))
}

struct Search<'a> {
    b: &'a Structure,
    // checks[e]: tuples of `a` whose largest entry is e, with the matching relation of `b`.
    checks: Vec<Vec<(usize, &'a [Elem])>>,
    pinned: Vec<Option<Elem>>,
    injective: bool,
}

impl<'a> Search<'a> {
    fn new(a: &'a Structure, b: &'a Structure) -> Result<Self> {
        let align = a.signature().align(b.signature())?;
        let mut checks = vec![Vec::new(); a.len()];
        for (r, t) in a.tuples() {
            let last = *t.iter().max().unwrap();
            checks[last].push((align[r], t.as_slice()));
        }
        Ok(Search { b, checks, pinned: vec![None; a.len()], injective: false })
    }

    fn consistent(&self, map: &[Elem], e: Elem) -> bool {
        self.checks[e].iter().all(|&(r, t)| {
            let image: Vec<Elem> = t.iter().map(|&x| map[x]).collect();
            self.b.holds(r, &image)
        })
    }

    fn run<F>(&self, map: &mut Vec<Elem>, used: &mut [bool], visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[Elem]) -> ControlFlow<()>,
    {
        let e = map.len();
        if e == self.checks.len() {
            return visit(map);
        }
        let candidates = match self.pinned[e] {
            Some(x) => x..x + 1,
            None => 0..self.b.len(),
        };
        for x in candidates {
            if self.injective && used[x] {
                continue;
            }
            map.push(x);
            if self.consistent(map, e) {
                used[x] = true;
                let flow = self.run(map, used, visit);
                used[x] = false;
                if flow.is_break() {
                    map.pop();
                    return flow;
                }
            }
            map.pop();
        }
        ControlFlow::Continue(())
    }

    fn first(&self) -> Option<Homomorphism> {
        let mut found = None;
        self.each(&mut |m| {
            found = Some(Homomorphism::new(m.to_vec()));
            ControlFlow::Break(())
        });
        found
    }

    fn each<F: FnMut(&[Elem]) -> ControlFlow<()>>(&self, visit: &mut F) {
        let mut map = Vec::with_capacity(self.checks.len());
        let mut used = vec![false; self.b.len()];
        let _ = self.run(&mut map, &mut used, visit);
    }
}

/// The first homomorphism `a → b` in canonical (lexicographic) order.
pub fn find_homomorphism(a: &Structure, b: &Structure) -> Result<Option<Homomorphism>> {
    Ok(Search::new(a, b)?.first())
}

/// Visits every homomorphism `a → b` in lexicographic order until `visit` breaks.
pub fn for_each_homomorphism<F>(a: &Structure, b: &Structure, mut visit: F) -> Result<()>
where
    F: FnMut(&Homomorphism) -> ControlFlow<()>,
{
    Search::new(a, b)?.each(&mut |m| visit(&Homomorphism::new(m.to_vec())));
    Ok(())
}

/// A bijection that is a homomorphism in both directions, if one exists.
pub fn find_isomorphism(a: &Structure, b: &Structure) -> Result<Option<Homomorphism>> {
    let align = a.signature().align(b.signature())?;
    if a.len() != b.len() {
        return Ok(None);
    }
    // An injective homomorphism between equal-size structures with equal tuple
    // counts per relation maps each relation onto its counterpart.
    if (0..align.len()).any(|r| a.relation(r).len() != b.relation(align[r]).len()) {
        return Ok(None);
    }
    let mut search = Search::new(a, b)?;
    search.injective = true;
    Ok(search.first())
}

pub fn is_isomorphic(a: &Structure, b: &Structure) -> Result<bool> {
    Ok(find_isomorphism(a, b)?.is_some())
}

/// A retraction of `a` onto the induced substructure on `subset`: a homomorphism
/// `a → a[subset]` fixing each element of `subset`. Elements of the result are
/// indices into `subset`.
pub fn find_retraction(a: &Structure, subset: &[Elem]) -> Result<Option<Homomorphism>> {
    let sub = a.induced_substructure(subset)?;
    let mut search = Search::new(a, &sub)?;
    for (i, &e) in subset.iter().enumerate() {
        search.pinned[e] = Some(i);
    }
    Ok(search.first())
}

/// The core of `a` together with the subset it lives on and a retraction onto it.
#[derive(Clone, Debug)]
pub struct Core {
    pub structure: Structure,
    pub subset: Vec<Elem>,
    pub retraction: Homomorphism,
}

/// Smallest retract of `a`, searching subsets by increasing size and then
/// lexicographically.
pub fn core_with_retraction(a: &Structure) -> Core {
    for size in 1..=a.len() {
        for subset in a.elements().combinations(size) {
            if let Some(r) = find_retraction(a, &subset).expect("subset is valid") {
                let structure = a.induced_substructure(&subset).expect("subset is valid");
                return Core { structure, subset, retraction: r };
            }
        }
    }
    unreachable!("the full universe is always a retract")
}

pub fn core(a: &Structure) -> Structure {
    core_with_retraction(a).structure
}

pub(crate) fn check_same_signature(a: &Structure, b: &Structure) -> Result<()> {
    if a.signature().same_as(b.signature()) {
        Ok(())
    } else {
        Err(Error::SignatureMismatch(format!("{} vs {}", a.signature(), b.signature())))
    }
}
