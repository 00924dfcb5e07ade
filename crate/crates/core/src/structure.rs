//! Relational signatures and finite structures.
//!
//! Elements are addressed by their position in the universe ([`Elem`]). The
//! universe order is the canonical order used for every tie-break in the crate.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of an element in a structure's universe.
pub type Elem = usize;

/// Name of the identity relation added by [`Structure::expand_identity`].
pub const IDENTITY_RELATION: &str = "I";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    relations: Vec<(String, usize)>,
}

impl Signature {
    pub fn new<S: Into<String>>(relations: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let relations: Vec<(String, usize)> =
            relations.into_iter().map(|(n, a)| (n.into(), a)).collect();
        let mut seen = BTreeSet::new();
        for (name, arity) in &relations {
            if *arity == 0 {
                return Err(Error::InvalidStructure(vec![Violation::ZeroArity(name.clone())]));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::NameClash(name.clone()));
            }
        }
        Ok(Signature { relations })
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.relations.iter().map(|(n, a)| (n.as_str(), *a))
    }

    pub fn name(&self, rel: usize) -> &str {
        &self.relations[rel].0
    }

    pub fn arity(&self, rel: usize) -> usize {
        self.relations[rel].1
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|(n, _)| n == name)
    }

    /// Same relation names with the same arities, in any order.
    pub fn same_as(&self, other: &Signature) -> bool {
        self.len() == other.len()
            && self
                .iter()
                .all(|(n, a)| other.position(n).is_some_and(|j| other.arity(j) == a))
    }

    /// For each relation of `self`, the index of the same relation in `other`.
    pub fn align(&self, other: &Signature) -> Result<Vec<usize>> {
        if !self.same_as(other) {
            return Err(Error::SignatureMismatch(format!("{self} vs {other}")));
        }
        Ok(self.iter().map(|(n, _)| other.position(n).unwrap()).collect())
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (n, a)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n}:{a}")?;
        }
        write!(f, "}}")
    }
}

/// A finite relational structure over an explicit signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    signature: Signature,
    universe: Vec<String>,
    lookup: HashMap<String, Elem>,
    relations: Vec<BTreeSet<Vec<Elem>>>,
}

impl Structure {
    /// A structure with the given universe and all relations empty.
    pub fn new<S: Into<String>>(
        signature: Signature,
        universe: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let universe: Vec<String> = universe.into_iter().map(Into::into).collect();
        if universe.is_empty() {
            return Err(Error::InvalidStructure(vec![Violation::EmptyUniverse]));
        }
        let mut lookup = HashMap::with_capacity(universe.len());
        for (i, name) in universe.iter().enumerate() {
            if lookup.insert(name.clone(), i).is_some() {
                return Err(Error::InvalidStructure(vec![Violation::DuplicateElement(
                    name.clone(),
                )]));
            }
        }
        let relations = vec![BTreeSet::new(); signature.len()];
        Ok(Structure { signature, universe, lookup, relations })
    }

    /// Adds a tuple to relation `rel` (by signature position).
    pub fn insert(&mut self, rel: usize, tuple: Vec<Elem>) -> Result<()> {
        let arity = self.signature.arity(rel);
        if tuple.len() != arity {
            return Err(Error::InvalidStructure(vec![Violation::ArityMismatch {
                relation: self.signature.name(rel).to_string(),
                expected: arity,
                found: tuple.len(),
            }]));
        }
        if let Some(&bad) = tuple.iter().find(|&&e| e >= self.len()) {
            return Err(Error::InvalidStructure(vec![Violation::UnknownElement {
                relation: self.signature.name(rel).to_string(),
                element: format!("#{bad}"),
            }]));
        }
        self.relations[rel].insert(tuple);
        Ok(())
    }

    /// Adds a tuple by relation and element names.
    pub fn insert_named(&mut self, rel: &str, tuple: &[&str]) -> Result<()> {
        let r = self
            .signature
            .position(rel)
            .ok_or_else(|| Error::InvalidStructure(vec![Violation::UnknownRelation(rel.into())]))?;
        let t = tuple
            .iter()
            .map(|n| {
                self.element(n).ok_or_else(|| {
                    Error::InvalidStructure(vec![Violation::UnknownElement {
                        relation: rel.into(),
                        element: n.to_string(),
                    }])
                })
            })
            .collect::<Result<Vec<_>>>()?;
        self.insert(r, t)
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.universe.len()
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn name(&self, e: Elem) -> &str {
        &self.universe[e]
    }

    pub fn element(&self, name: &str) -> Option<Elem> {
        self.lookup.get(name).copied()
    }

    pub fn relation(&self, rel: usize) -> &BTreeSet<Vec<Elem>> {
        &self.relations[rel]
    }

    pub fn relation_by_name(&self, name: &str) -> Option<&BTreeSet<Vec<Elem>>> {
        self.signature.position(name).map(|r| &self.relations[r])
    }

    pub fn holds(&self, rel: usize, tuple: &[Elem]) -> bool {
        self.relations[rel].contains(tuple)
    }

    /// Iterates `(relation index, tuple)` over all relation tuples.
    pub fn tuples(&self) -> impl Iterator<Item = (usize, &Vec<Elem>)> {
        self.relations
            .iter()
            .enumerate()
            .flat_map(|(r, ts)| ts.iter().map(move |t| (r, t)))
    }

    pub fn tuple_count(&self) -> usize {
        self.relations.iter().map(BTreeSet::len).sum()
    }

    /// The Gaifman graph: distinct elements are adjacent iff they co-occur in a tuple.
    pub fn gaifman(&self) -> SimpleGraph {
        let mut g = SimpleGraph::edgeless(self.len());
        for (_, t) in self.tuples() {
            for (i, &x) in t.iter().enumerate() {
                for &y in &t[i + 1..] {
                    g.add_edge(x, y);
                }
            }
        }
        g
    }

    /// Adds the binary identity relation `I`.
    pub fn expand_identity(&self) -> Result<Structure> {
        if self.signature.position(IDENTITY_RELATION).is_some() {
            return Err(Error::NameClash(IDENTITY_RELATION.to_string()));
        }
        let mut rels = self.signature.relations.clone();
        rels.push((IDENTITY_RELATION.to_string(), 2));
        let mut out = Structure {
            signature: Signature { relations: rels },
            universe: self.universe.clone(),
            lookup: self.lookup.clone(),
            relations: self.relations.clone(),
        };
        out.relations.push(self.elements().map(|e| vec![e, e]).collect());
        Ok(out)
    }

    /// [`expand_identity`](Self::expand_identity) unless `I` is already present.
    pub fn with_identity(&self) -> Structure {
        self.expand_identity().unwrap_or_else(|_| self.clone())
    }

    /// The substructure induced on `subset`, listed in the order given.
    pub fn induced_substructure(&self, subset: &[Elem]) -> Result<Structure> {
        if subset.is_empty() {
            return Err(Error::InvalidSubset("empty subset".into()));
        }
        let mut position = vec![None; self.len()];
        for (i, &e) in subset.iter().enumerate() {
            if e >= self.len() {
                return Err(Error::InvalidSubset(format!("element #{e} not in universe")));
            }
            if position[e].replace(i).is_some() {
                return Err(Error::InvalidSubset(format!("element {} repeated", self.name(e))));
            }
        }
        let mut out = Structure::new(
            self.signature.clone(),
            subset.iter().map(|&e| self.universe[e].clone()),
        )?;
        for (r, t) in self.tuples() {
            if let Some(image) = t.iter().map(|&e| position[e]).collect::<Option<Vec<_>>>() {
                out.relations[r].insert(image);
            }
        }
        Ok(out)
    }

    /// Induced substructure on named elements.
    pub fn induced_by_names(&self, names: &[&str]) -> Result<Structure> {
        let subset = names
            .iter()
            .map(|n| {
                self.element(n)
                    .ok_or_else(|| Error::InvalidSubset(format!("`{n}` not in universe")))
            })
            .collect::<Result<Vec<_>>>()?;
        self.induced_substructure(&subset)
    }

    pub fn to_file(&self) -> StructureFile {
        StructureFile {
            signature: self.signature.iter().map(|(n, a)| (n.to_string(), a)).collect(),
            universe: self.universe.clone(),
            relations: self
                .signature
                .iter()
                .enumerate()
                .map(|(r, (n, _))| {
                    let tuples = self.relations[r]
                        .iter()
                        .map(|t| t.iter().map(|&e| self.universe[e].clone()).collect())
                        .collect();
                    (n.to_string(), tuples)
                })
                .collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Structure> {
        let file: StructureFile = serde_json::from_str(text)?;
        Structure::try_from(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("structure serializes")
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} elements over {}", self.len(), self.signature)
    }
}

/// A problem found by [`StructureFile::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EmptyUniverse,
    DuplicateElement(String),
    ZeroArity(String),
    UnknownRelation(String),
    UnknownElement { relation: String, element: String },
    ArityMismatch { relation: String, expected: usize, found: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyUniverse => write!(f, "universe is empty"),
            Violation::DuplicateElement(e) => write!(f, "element `{e}` listed twice"),
            Violation::ZeroArity(r) => write!(f, "relation `{r}` has arity 0"),
            Violation::UnknownRelation(r) => write!(f, "relation `{r}` is not in the signature"),
            Violation::UnknownElement { relation, element } => {
                write!(f, "relation `{relation}` uses unknown element `{element}`")
            }
            Violation::ArityMismatch { relation, expected, found } => write!(
                f,
                "relation `{relation}` has arity {expected} but a tuple has length {found}"
            ),
        }
    }
}

/// On-disk JSON form of a structure.
///
/// ```json
/// {"signature": {"E": 2}, "universe": ["a", "b"], "relations": {"E": [["a", "b"]]}}
/// ```
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureFile {
    pub signature: IndexMap<String, usize>,
    pub universe: Vec<String>,
    #[serde(default)]
    pub relations: IndexMap<String, Vec<Vec<String>>>,
}

impl StructureFile {
    /// All violations of the structure invariants; empty iff well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.universe.is_empty() {
            out.push(Violation::EmptyUniverse);
        }
        let mut seen = BTreeSet::new();
        for e in &self.universe {
            if !seen.insert(e.as_str()) {
                out.push(Violation::DuplicateElement(e.clone()));
            }
        }
        for (name, &arity) in &self.signature {
            if arity == 0 {
                out.push(Violation::ZeroArity(name.clone()));
            }
        }
        for (name, tuples) in &self.relations {
            let Some(&arity) = self.signature.get(name) else {
                out.push(Violation::UnknownRelation(name.clone()));
                continue;
            };
            for t in tuples {
                if t.len() != arity {
                    out.push(Violation::ArityMismatch {
                        relation: name.clone(),
                        expected: arity,
                        found: t.len(),
                    });
                }
                for e in t {
                    if !seen.contains(e.as_str()) {
                        out.push(Violation::UnknownElement {
                            relation: name.clone(),
                            element: e.clone(),
                        });
                    }
                }
            }
        }
        out
    }
}

impl TryFrom<StructureFile> for Structure {
    type Error = Error;

    fn try_from(file: StructureFile) -> Result<Structure> {
        let violations = file.validate();
        if !violations.is_empty() {
            return Err(Error::InvalidStructure(violations));
        }
        let signature = Signature::new(file.signature.iter().map(|(n, &a)| (n.clone(), a)))?;
        let mut s = Structure::new(signature, file.universe)?;
        for (name, tuples) in &file.relations {
            let r = s.signature.position(name).unwrap();
            for t in tuples {
                let t = t.iter().map(|e| s.lookup[e]).collect();
                s.relations[r].insert(t);
            }
        }
        Ok(s)
    }
}

/// A simple undirected graph on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    adjacency: Vec<BTreeSet<usize>>,
}

impl SimpleGraph {
    pub fn edgeless(n: usize) -> Self {
        SimpleGraph { adjacency: vec![BTreeSet::new(); n] }
    }

    pub fn add_edge(&mut self, x: usize, y: usize) {
        if x != y {
            self.adjacency[x].insert(y);
            self.adjacency[y].insert(x);
        }
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        self.adjacency[x].contains(&y)
    }

    pub fn neighbours(&self, x: usize) -> &BTreeSet<usize> {
        &self.adjacency[x]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(x, ns)| ns.iter().filter(move |&&y| x < y).map(move |&y| (x, y)))
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    /// Adjacency as bitmasks, when the graph has at most 64 vertices.
    pub fn masks(&self) -> Option<Vec<u64>> {
        if self.len() > 64 {
            return None;
        }
        Some(
            self.adjacency
                .iter()
                .map(|ns| ns.iter().fold(0u64, |m, &y| m | (1 << y)))
                .collect(),
        )
    }
}

/// A total map between universes. Whether it preserves relations is checked
/// separately by [`crate::hom::is_homomorphism`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Homomorphism(Vec<Elem>);

impl Homomorphism {
    pub fn new(map: Vec<Elem>) -> Self {
        Homomorphism(map)
    }

    pub fn identity(n: usize) -> Self {
        Homomorphism((0..n).collect())
    }

    pub fn apply(&self, e: Elem) -> Elem {
        self.0[e]
    }

    pub fn as_slice(&self) -> &[Elem] {
        &self.0
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Homomorphism) -> Homomorphism {
        Homomorphism(self.0.iter().map(|&e| other.0[e]).collect())
    }

    pub fn is_injective(&self) -> bool {
        let set: BTreeSet<_> = self.0.iter().collect();
        set.len() == self.0.len()
    }

    /// Renders the map with element names, `a->x, b->y`.
    pub fn describe(&self, from: &Structure, to: &Structure) -> Vec<(String, String)> {
        self.0
            .iter()
            .enumerate()
            .map(|(a, &b)| (from.name(a).to_string(), to.name(b).to_string()))
            .collect()
    }
}
