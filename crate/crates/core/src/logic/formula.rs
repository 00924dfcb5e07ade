//! Existential-positive formulas with an optional `□_k` modality.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::structure::Structure;

/// Variable index `i` for `xᵢ`, starting at 1.
pub type Var = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom { relation: String, vars: Vec<Var> },
    Eq(Var, Var),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Exists(Var, Box<Formula>),
    Box { k: usize, body: Box<Formula> },
}

impl Formula {
    pub fn atom(relation: &str, vars: &[Var]) -> Formula {
        Formula::Atom { relation: relation.to_string(), vars: vars.to_vec() }
    }

    pub fn exists(v: Var, body: Formula) -> Formula {
        Formula::Exists(v, Box::new(body))
    }

    /// `∃v₁ … ∃vₙ body`, outermost first.
    pub fn exists_all(vars: &[Var], body: Formula) -> Formula {
        vars.iter().rev().fold(body, |f, &v| Formula::exists(v, f))
    }

    pub fn boxed(k: usize, body: Formula) -> Formula {
        Formula::Box { k, body: Box::new(body) }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut BTreeSet::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut BTreeSet<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Atom { vars, .. } => out.extend(vars.iter().filter(|v| !bound.contains(v))),
            Formula::Eq(x, y) => out.extend([x, y].into_iter().filter(|v| !bound.contains(v))),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_free(bound, out)),
            Formula::Exists(v, body) => {
                let fresh = bound.insert(*v);
                body.collect_free(bound, out);
                if fresh {
                    bound.remove(v);
                }
            }
            Formula::Box { body, .. } => body.collect_free(bound, out),
        }
    }

    /// Largest variable index used anywhere, or 0.
    pub fn max_var(&self) -> Var {
        match self {
            Formula::Atom { vars, .. } => vars.iter().copied().max().unwrap_or(0),
            Formula::Eq(x, y) => *x.max(y),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().map(Formula::max_var).max().unwrap_or(0),
            Formula::Exists(v, body) => (*v).max(body.max_var()),
            Formula::Box { body, .. } => body.max_var(),
        }
    }

    /// Maximum nesting of `∃`, counted through boxes.
    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Atom { .. } | Formula::Eq(..) => 0,
            Formula::And(fs) | Formula::Or(fs) => {
                fs.iter().map(Formula::quantifier_depth).max().unwrap_or(0)
            }
            Formula::Exists(_, body) => 1 + body.quantifier_depth(),
            Formula::Box { body, .. } => body.quantifier_depth(),
        }
    }

    /// Maximum nesting of `□`.
    pub fn box_depth(&self) -> usize {
        match self {
            Formula::Atom { .. } | Formula::Eq(..) => 0,
            Formula::And(fs) | Formula::Or(fs) => fs.iter().map(Formula::box_depth).max().unwrap_or(0),
            Formula::Exists(_, body) => body.box_depth(),
            Formula::Box { body, .. } => 1 + body.box_depth(),
        }
    }

    /// Checks relation names and arities against `a`'s signature, variable
    /// indices against `k` when given, and each box's own bounds.
    pub fn check(&self, a: &Structure, k: Option<usize>) -> Result<()> {
        match self {
            Formula::Atom { relation, vars } => {
                let r = a
                    .signature()
                    .position(relation)
                    .ok_or_else(|| Error::Formula(format!("unknown relation `{relation}`")))?;
                if a.signature().arity(r) != vars.len() {
                    return Err(Error::Formula(format!(
                        "`{relation}` has arity {}, used with {} variables",
                        a.signature().arity(r),
                        vars.len()
                    )));
                }
                vars.iter().try_for_each(|&v| check_var(v, k))
            }
            Formula::Eq(x, y) => check_var(*x, k).and(check_var(*y, k)),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().try_for_each(|f| f.check(a, k)),
            Formula::Exists(v, body) => {
                check_var(*v, k)?;
                body.check(a, k)
            }
            Formula::Box { k: bk, body } => {
                if *bk == 0 {
                    return Err(Error::Formula("box index must be at least 1".into()));
                }
                let free = body.free_vars().len();
                if free > *bk {
                    return Err(Error::Formula(format!("□_{bk} applied to {free} free variables")));
                }
                body.check(a, k)
            }
        }
    }
}

fn check_var(v: Var, k: Option<usize>) -> Result<()> {
    if v == 0 {
        return Err(Error::Formula("variables are numbered from 1".into()));
    }
    match k {
        Some(k) if v > k => Err(Error::Formula(format!("variable x{v} exceeds k = {k}"))),
        _ => Ok(()),
    }
}

/// `Q^A`: one variable per element in universe order, one atom per tuple.
pub fn canonical_query(a: &Structure) -> Formula {
    let atoms = a
        .tuples()
        .map(|(r, t)| {
            Formula::atom(a.signature().name(r), &t.iter().map(|&e| e + 1).collect::<Vec<_>>())
        })
        .collect();
    let vars: Vec<Var> = (1..=a.len()).collect();
    Formula::exists_all(&vars, Formula::And(atoms))
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom { relation, vars } => {
                write!(f, "(atom {relation}")?;
                for v in vars {
                    write!(f, " {v}")?;
                }
                write!(f, ")")
            }
            Formula::Eq(x, y) => write!(f, "(eq {x} {y})"),
            Formula::And(fs) | Formula::Or(fs) => {
                write!(f, "({}", if matches!(self, Formula::And(_)) { "and" } else { "or" })?;
                for g in fs {
                    write!(f, " {g}")?;
                }
                write!(f, ")")
            }
            Formula::Exists(v, body) => write!(f, "(exists {v} {body})"),
            Formula::Box { k, body } => write!(f, "(box {k} {body})"),
        }
    }
}

#[derive(Debug)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

fn tokenize(text: &str) -> Vec<String> {
    let spaced = text.replace('(', " ( ").replace(')', " ) ");
    spaced.split_whitespace().map(str::to_string).collect()
}

fn read(tokens: &[String], pos: &mut usize) -> Result<Sexp> {
    let tok = tokens
        .get(*pos)
        .ok_or_else(|| Error::Formula("unexpected end of input".into()))?;
    *pos += 1;
    match tok.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos).map(String::as_str) {
                    Some(")") => {
                        *pos += 1;
                        return Ok(Sexp::List(items));
                    }
                    Some(_) => items.push(read(tokens, pos)?),
                    None => return Err(Error::Formula("missing `)`".into())),
                }
            }
        }
        ")" => Err(Error::Formula("unexpected `)`".into())),
        other => Ok(Sexp::Atom(other.to_string())),
    }
}

fn parse_var(s: &Sexp) -> Result<Var> {
    let Sexp::Atom(t) = s else {
        return Err(Error::Formula("expected a variable".into()));
    };
    let digits = t.strip_prefix('x').unwrap_or(t);
    match digits.parse::<Var>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(Error::Formula(format!("`{t}` is not a variable"))),
    }
}

fn parse_number(s: &Sexp) -> Result<usize> {
    match s {
        Sexp::Atom(t) => t.parse().map_err(|_| Error::Formula(format!("`{t}` is not a number"))),
        Sexp::List(_) => Err(Error::Formula("expected a number".into())),
    }
}

fn convert(s: &Sexp) -> Result<Formula> {
    let items = match s {
        Sexp::Atom(t) if t == "true" => return Ok(Formula::And(Vec::new())),
        Sexp::Atom(t) if t == "false" => return Ok(Formula::Or(Vec::new())),
        Sexp::Atom(t) => return Err(Error::Formula(format!("unexpected `{t}`"))),
        Sexp::List(items) => items,
    };
    let Some(Sexp::Atom(head)) = items.first() else {
        return Err(Error::Formula("expected an operator".into()));
    };
    let args = &items[1..];
    let arity = |n: usize| -> Result<()> {
        if args.len() == n {
            Ok(())
        } else {
            Err(Error::Formula(format!("`{head}` takes {n} arguments")))
        }
    };
    match head.as_str() {
        "atom" => {
            let Some(Sexp::Atom(rel)) = args.first() else {
                return Err(Error::Formula("`atom` needs a relation name".into()));
            };
            let vars = args[1..].iter().map(parse_var).collect::<Result<Vec<_>>>()?;
            if vars.is_empty() {
                return Err(Error::Formula(format!("atom `{rel}` has no variables")));
            }
            Ok(Formula::Atom { relation: rel.clone(), vars })
        }
        "eq" => {
            arity(2)?;
            Ok(Formula::Eq(parse_var(&args[0])?, parse_var(&args[1])?))
        }
        "and" => Ok(Formula::And(args.iter().map(convert).collect::<Result<_>>()?)),
        "or" => Ok(Formula::Or(args.iter().map(convert).collect::<Result<_>>()?)),
        "exists" => {
            arity(2)?;
            Ok(Formula::exists(parse_var(&args[0])?, convert(&args[1])?))
        }
        "box" => {
            arity(2)?;
            Ok(Formula::boxed(parse_number(&args[0])?, convert(&args[1])?))
        }
        other => Err(Error::Formula(format!("unknown operator `{other}`"))),
    }
}

impl FromStr for Formula {
    type Err = Error;

    fn from_str(text: &str) -> Result<Formula> {
        let tokens = tokenize(text);
        let mut pos = 0;
        let sexp = read(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::Formula("trailing input after formula".into()));
        }
        convert(&sexp)
    }
}
