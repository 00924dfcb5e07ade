//! The tree decomposition of `T_k A` whose bags are the active prefixes.

use serde::Serialize;

use crate::comonad::bounded::BoundedTk;
use crate::comonad::coalgebra::Coalgebra;
use crate::error::Result;
use crate::structure::Structure;

/// Nodes are the plays of a fragment plus a root standing for the empty
/// sequence. Node 0 is the root; node `i + 1` is play `i`.
#[derive(Clone, Debug)]
pub struct TkDecomposition {
    tk: BoundedTk,
    parent: Vec<Option<usize>>,
    bags: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionReport {
    pub nodes: usize,
    pub max_bag: usize,
    pub tuples_checked: usize,
    pub violation: Option<String>,
}

impl DecompositionReport {
    pub fn valid(&self) -> bool {
        self.violation.is_none()
    }

    /// Width, i.e. largest bag minus one.
    pub fn width(&self) -> usize {
        self.max_bag.saturating_sub(1)
    }
}

pub fn tree_decomposition_tk(a: &Structure, k: usize, depth: usize) -> Result<TkDecomposition> {
    Ok(TkDecomposition::of(BoundedTk::new(a, k, depth)?))
}

impl TkDecomposition {
    pub fn of(tk: BoundedTk) -> Self {
        let mut parent = vec![None];
        let mut bags = vec![Vec::new()];
        for (i, s) in tk.plays().iter().enumerate() {
            parent.push(Some(tk.parent(i).map_or(0, |p| p + 1)));
            bags.push(
                s.active_lengths()
                    .into_iter()
                    .map(|len| tk.id_of(&s.prefix(len)).unwrap())
                    .collect(),
            );
        }
        TkDecomposition { tk, parent, bags }
    }

    pub fn fragment(&self) -> &BoundedTk {
        &self.tk
    }

    /// Bag of play `id`, as play identifiers.
    pub fn bag(&self, id: usize) -> &[usize] {
        &self.bags[id + 1]
    }

    pub fn validate(&self) -> DecompositionReport {
        self.validate_on(&vec![true; self.tk.len()])
    }

    /// Validates the decomposition induced on the plays marked in `keep`: bags
    /// are intersected with the kept set and only tuples among kept plays count.
    pub fn validate_on(&self, keep: &[bool]) -> DecompositionReport {
        let st = self.tk.structure();
        let bag = |node: usize| self.bags[node].iter().copied().filter(|&t| keep[t]);
        let mut report = DecompositionReport {
            nodes: self.bags.len(),
            max_bag: (0..self.bags.len()).map(|n| bag(n).count()).max().unwrap_or(0),
            tuples_checked: 0,
            violation: None,
        };
        let name = |t: usize| st.name(t).to_string();
        if report.max_bag > self.tk.k() {
            report.violation = Some(format!("bag of size {} exceeds k", report.max_bag));
            return report;
        }
        for node in 1..self.bags.len() {
            let id = node - 1;
            if keep[id] && !self.bags[node].contains(&id) {
                report.violation = Some(format!("{} missing from its own bag", name(id)));
                return report;
            }
            let up = self.parent[node].unwrap();
            for t in bag(node).filter(|&t| t != id) {
                let s = self.tk.play(id);
                if !self.tk.play(t).is_prefix_of(s) || !self.bags[up].contains(&t) {
                    report.violation =
                        Some(format!("occurrences of {} are not connected at {}", name(t), name(id)));
                    return report;
                }
            }
        }
        for (_, t) in st.tuples() {
            if !t.iter().all(|&x| keep[x]) {
                continue;
            }
            report.tuples_checked += 1;
            let greatest = *t.iter().max_by_key(|&&x| self.tk.play(x).len()).unwrap();
            if !t.iter().all(|x| self.bags[greatest + 1].contains(x)) {
                report.violation = Some(format!("tuple at {} not covered", name(greatest)));
                return report;
            }
        }
        report
    }

    /// Validates the decomposition restricted to the image of a coalgebra,
    /// which must fit in the fragment.
    pub fn validate_coalgebra_image(&self, c: &Coalgebra) -> Option<DecompositionReport> {
        let mut keep = vec![false; self.tk.len()];
        for s in c.plays() {
            keep[self.tk.id_of(s)?] = true;
        }
        Some(self.validate_on(&keep))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comonad::play::Play;
    use crate::constructions::{generate, Kind};

    #[test]
    fn bags_are_active_prefixes() {
        let a = generate(Kind::Path, 2).unwrap();
        let d = tree_decomposition_tk(&a, 2, 3).unwrap();
        let tk = d.fragment();
        let s = tk.id_of(&Play::from_pairs(&[(1, 0), (2, 1)]).unwrap()).unwrap();
        let p = tk.id_of(&Play::single(1, 0)).unwrap();
        assert_eq!(d.bag(s), [p, s]);
        let r = tk.id_of(&Play::from_pairs(&[(1, 0), (1, 1)]).unwrap()).unwrap();
        assert_eq!(d.bag(r), [r]);
    }

    #[test]
    fn width_below_k() {
        let a = generate(Kind::Cycle, 3).unwrap();
        let r = tree_decomposition_tk(&a, 2, 3).unwrap().validate();
        assert!(r.valid(), "{:?}", r.violation);
        assert!(r.max_bag <= 2);
    }
}
