//! Evaluation of formulas, including `□_k` over bounded fragments of `T_k A`.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use crate::comonad::bounded::{BoundedTk, DEFAULT_MAX_PLAYS};
use crate::error::{Error, Result};
use crate::logic::formula::{Formula, Var};
use crate::structure::{Elem, Structure};

/// A partial assignment of elements to variables.
pub type Assignment = BTreeMap<Var, Elem>;

/// Options for `□_k` evaluation.
#[derive(Clone, Copy, Debug)]
pub struct BoxOptions {
    /// Extra truncation depth on top of tuple length plus quantifier depth.
    pub extra_depth: usize,
    pub max_plays: usize,
}

impl Default for BoxOptions {
    fn default() -> Self {
        BoxOptions { extra_depth: 0, max_plays: DEFAULT_MAX_PLAYS }
    }
}

/// Maximum nesting of boxes accepted.
pub const MAX_BOX_DEPTH: usize = 2;

/// `a, env ⊨ f`.
pub fn evaluate(a: &Structure, env: &Assignment, f: &Formula) -> Result<bool> {
    evaluate_with(a, env, f, BoxOptions::default())
}

pub fn evaluate_with(a: &Structure, env: &Assignment, f: &Formula, opts: BoxOptions) -> Result<bool> {
    ModalEvaluator::new(a, opts).evaluate(env, f)
}

/// `a, tuple ⊨ □_k φ`: evaluates `φ` in a bounded fragment of `T_k a` at the
/// chain `α(aᵢ) = [(1, a₁), …, (i, aᵢ)]`, binding the free variables of `φ`
/// in increasing order. The fragment has depth `|tuple| + qd(φ)`.
pub fn eval_box(a: &Structure, tuple: &[Elem], f: &Formula) -> Result<bool> {
    eval_box_with(a, tuple, f, BoxOptions::default())
}

pub fn eval_box_with(a: &Structure, tuple: &[Elem], f: &Formula, opts: BoxOptions) -> Result<bool> {
    ModalEvaluator::new(a, opts).eval_box(tuple, f)
}

/// A bounded fragment with its evaluation index.
struct Fragment {
    tk: BoundedTk,
    index: Index,
}

type FragmentCache = RefCell<HashMap<(usize, usize, usize), Rc<Fragment>>>;

/// Evaluates many formulas over one structure, building each bounded
/// fragment of `T_k` once.
pub struct ModalEvaluator<'a> {
    a: &'a Structure,
    opts: BoxOptions,
    index: Index,
    fragments: FragmentCache,
}

impl<'a> ModalEvaluator<'a> {
    pub fn new(a: &'a Structure, opts: BoxOptions) -> Self {
        ModalEvaluator { a, opts, index: Index::new(a), fragments: RefCell::default() }
    }

    pub fn evaluate(&self, env: &Assignment, f: &Formula) -> Result<bool> {
        let a = self.a;
        f.check(a, None)?;
        if f.box_depth() > MAX_BOX_DEPTH {
            return Err(Error::Formula(format!("boxes nested deeper than {MAX_BOX_DEPTH}")));
        }
        if let Some(&v) = f.free_vars().iter().find(|v| !env.contains_key(v)) {
            return Err(Error::UnboundVariable(v));
        }
        if let Some((_, &e)) = env.iter().find(|(_, &e)| e >= a.len()) {
            return Err(Error::InvalidArgument(format!("element #{e} outside the universe")));
        }
        let mut slots = vec![None; f.max_var().max(env.keys().copied().max().unwrap_or(0)) + 1];
        for (&v, &e) in env {
            slots[v] = Some(e);
        }
        Evaluator::new(a, &self.index, self.opts, &self.fragments).eval(f, &mut slots)
    }

    pub fn eval_box(&self, tuple: &[Elem], f: &Formula) -> Result<bool> {
        let a = self.a;
        let Formula::Box { k, .. } = f else {
            return Err(Error::Formula("expected a box formula".into()));
        };
        f.check(a, None)?;
        if f.box_depth() > MAX_BOX_DEPTH {
            return Err(Error::Formula(format!("boxes nested deeper than {MAX_BOX_DEPTH}")));
        }
        if tuple.len() > *k {
            return Err(Error::InvalidArgument(format!("tuple of length {} under □_{k}", tuple.len())));
        }
        if let Some(&e) = tuple.iter().find(|&&e| e >= a.len()) {
            return Err(Error::InvalidArgument(format!("element #{e} outside the universe")));
        }
        Evaluator::new(a, &self.index, self.opts, &self.fragments).eval_box_node(f, tuple)
    }
}

/// Tuples of each relation, indexed by position and element, and the
/// projections of relations computed so far.
struct Index {
    arity: Vec<usize>,
    flat: Vec<Vec<Elem>>,
    by_pos: Vec<Vec<Vec<Vec<u32>>>>,
    /// Values of one variable across a whole relation, by relation and the
    /// positions that variable occupies.
    projections: RefCell<HashMap<(usize, Vec<bool>), Rc<Vec<Elem>>>>,
}

impl Index {
    fn new(a: &Structure) -> Self {
        let mut arity = Vec::new();
        let mut flat = Vec::new();
        let mut by_pos = Vec::new();
        for r in 0..a.signature().len() {
            let m = a.signature().arity(r);
            let mut idx = vec![vec![Vec::new(); a.len()]; m];
            for (i, t) in a.relation(r).iter().enumerate() {
                for (p, &e) in t.iter().enumerate() {
                    idx[p][e].push(i as u32);
                }
            }
            arity.push(m);
            flat.push(a.relation(r).iter().flatten().copied().collect());
            by_pos.push(idx);
        }
        Index { arity, flat, by_pos, projections: RefCell::default() }
    }

    fn tuple(&self, r: usize, i: usize) -> &[Elem] {
        let m = self.arity[r];
        &self.flat[r][i * m..(i + 1) * m]
    }

    fn count(&self, r: usize) -> usize {
        self.flat[r].len().checked_div(self.arity[r]).unwrap_or(0)
    }
}

type MemoKey = (*const Formula, Option<Elem>);

struct Evaluator<'a> {
    a: &'a Structure,
    opts: BoxOptions,
    fragments: &'a FragmentCache,
    index: &'a Index,
    free: RefCell<HashMap<*const Formula, Vec<Var>>>,
    memo: RefCell<HashMap<MemoKey, bool>>,
}

impl<'a> Evaluator<'a> {
    fn new(a: &'a Structure, index: &'a Index, opts: BoxOptions, fragments: &'a FragmentCache) -> Self {
        Evaluator {
            a,
            opts,
            fragments,
            index,
            free: RefCell::default(),
            memo: RefCell::default(),
        }
    }

    fn eval(&self, f: &Formula, env: &mut Vec<Option<Elem>>) -> Result<bool> {
        let a = self.a;
        match f {
            Formula::Atom { relation, vars } => {
                let r = a.signature().position(relation).unwrap();
                let tuple = vars
                    .iter()
                    .map(|&v| env[v].ok_or(Error::UnboundVariable(v)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(a.holds(r, &tuple))
            }
            Formula::Eq(x, y) => {
                let x = env[*x].ok_or(Error::UnboundVariable(*x))?;
                let y = env[*y].ok_or(Error::UnboundVariable(*y))?;
                Ok(x == y)
            }
            Formula::And(fs) => {
                for g in fs {
                    if !self.eval(g, env)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Or(fs) => {
                for g in fs {
                    if self.eval(g, env)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Exists(v, body) => {
                let key = self.memo_key(f, env);
                if let Some(hit) = key.and_then(|key| self.memo.borrow().get(&key).copied()) {
                    return Ok(hit);
                }
                let saved = env[*v];
                env[*v] = None;
                let candidates = self.candidates(*v, body, env);
                let mut found = false;
                for &e in candidates.iter() {
                    env[*v] = Some(e);
                    if self.eval(body, env)? {
                        found = true;
                        break;
                    }
                }
                env[*v] = saved;
                if let Some(key) = key {
                    self.memo.borrow_mut().insert(key, found);
                }
                Ok(found)
            }
            Formula::Box { body, .. } => {
                let tuple = body
                    .free_vars()
                    .into_iter()
                    .map(|v| env[v].ok_or(Error::UnboundVariable(v)))
                    .collect::<Result<Vec<_>>>()?;
                self.eval_box_node(f, &tuple)
            }
        }
    }

    /// Results are remembered for quantified subformulas with at most one
    /// free variable.
    fn memo_key(&self, f: &Formula, env: &[Option<Elem>]) -> Option<MemoKey> {
        let ptr = f as *const Formula;
        let mut free = self.free.borrow_mut();
        let vars = free.entry(ptr).or_insert_with(|| f.free_vars().into_iter().collect());
        match vars.as_slice() {
            [] => Some((ptr, None)),
            [v] => Some((ptr, env[*v])),
            _ => None,
        }
    }

    fn eval_box_node(&self, f: &Formula, tuple: &[Elem]) -> Result<bool> {
        let Formula::Box { k, body } = f else { unreachable!() };
        let free: Vec<Var> = body.free_vars().into_iter().collect();
        if free.len() != tuple.len() {
            return Err(Error::Formula(format!(
                "□ body has {} free variables but the tuple has {} elements",
                free.len(),
                tuple.len()
            )));
        }
        let depth = (tuple.len() + body.quantifier_depth() + self.opts.extra_depth).max(1);
        let key = (self.a as *const Structure as usize, *k, depth);
        let cached = self.fragments.borrow().get(&key).cloned();
        let frag = match cached {
            Some(frag) => frag,
            None => {
                let tk = BoundedTk::with_cap(self.a, *k, depth, self.opts.max_plays)?;
                let index = Index::new(tk.structure());
                let frag = Rc::new(Fragment { tk, index });
                self.fragments.borrow_mut().insert(key, frag.clone());
                frag
            }
        };
        let ids = frag.tk.alpha(tuple)?;
        let mut env = vec![None; body.max_var() + 1];
        for (&v, &id) in free.iter().zip(&ids) {
            env[v] = Some(id);
        }
        Evaluator::new(frag.tk.structure(), &frag.index, self.opts, self.fragments).eval(body, &mut env)
    }

    /// Elements worth trying for `v`: the values `v` takes in tuples of an
    /// atom that `body` requires, looking through conjunctions and inner
    /// quantifiers, or the value forced by an equation.
    fn candidates(&self, v: Var, body: &Formula, env: &[Option<Elem>]) -> Rc<Vec<Elem>> {
        let mut scope = env.to_vec();
        let mut best = None;
        self.narrow(v, body, &mut scope, &mut best);
        best.unwrap_or_else(|| Rc::new(self.a.elements().collect()))
    }

    fn narrow(&self, v: Var, f: &Formula, scope: &mut Vec<Option<Elem>>, best: &mut Option<Rc<Vec<Elem>>>) {
        let narrowed = match f {
            Formula::And(fs) => {
                for g in fs {
                    self.narrow(v, g, scope, best);
                }
                None
            }
            Formula::Exists(y, g) if *y != v => {
                let saved = scope[*y].take();
                self.narrow(v, g, scope, best);
                scope[*y] = saved;
                None
            }
            Formula::Eq(x, y) if *x == v && *y != v => scope[*y].map(|e| Rc::new(vec![e])),
            Formula::Eq(x, y) if *y == v && *x != v => scope[*x].map(|e| Rc::new(vec![e])),
            Formula::Atom { relation, vars } if vars.contains(&v) => {
                let r = self.a.signature().position(relation).unwrap();
                if vars.iter().any(|&w| w != v && scope[w].is_some()) {
                    Some(Rc::new(self.atom_values(r, vars, v, scope)))
                } else {
                    let key: Vec<bool> = vars.iter().map(|&w| w == v).collect();
                    let cached = self.index.projections.borrow().get(&(r, key.clone())).cloned();
                    let values = cached.unwrap_or_else(|| {
                        let values = Rc::new(self.atom_values(r, vars, v, scope));
                        self.index.projections.borrow_mut().insert((r, key), values.clone());
                        values
                    });
                    Some(values)
                }
            }
            _ => None,
        };
        if let Some(c) = narrowed {
            if best.as_ref().is_none_or(|b| c.len() < b.len()) {
                *best = Some(c);
            }
        }
    }

    fn atom_values(&self, r: usize, vars: &[Var], v: Var, env: &[Option<Elem>]) -> Vec<Elem> {
        let index = self.index;
        let matching = |t: &[Elem]| {
            let mut value = None;
            for (&w, &e) in vars.iter().zip(t) {
                if w == v {
                    if value.is_some_and(|x| x != e) {
                        return None;
                    }
                    value = Some(e);
                } else if env[w].is_some_and(|x| x != e) {
                    return None;
                }
            }
            value
        };
        let pivot = vars
            .iter()
            .enumerate()
            .filter_map(|(p, &w)| env[w].filter(|_| w != v).map(|e| &index.by_pos[r][p][e]))
            .min_by_key(|ids| ids.len());
        let mut out: Vec<Elem> = match pivot {
            Some(ids) => ids.iter().filter_map(|&i| matching(index.tuple(r, i as usize))).collect(),
            None => (0..index.count(r)).filter_map(|i| matching(index.tuple(r, i))).collect(),
        };
        out.sort_unstable();
        out.dedup();
        out
    }
}
