//! General constraint graphs: undirected multigraphs with self-loops and a
//! binary constraint on every edge entry.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{PairSet, Symbol};
use crate::rational::Rational;
use crate::rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintGraph {
    alphabet_size: usize,
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
    /// Constraint on `(label(u), label(v))` for edge `(u, v)`.
    constraints: Vec<PairSet>,
}

impl ConstraintGraph {
    pub fn new(
        alphabet_size: usize,
        num_vertices: usize,
        edges: Vec<(usize, usize)>,
        constraints: Vec<PairSet>,
    ) -> Result<Self> {
        if alphabet_size == 0 {
            return Err(Error::InvalidGame("alphabet must be nonempty".into()));
        }
        if edges.len() != constraints.len() {
            return Err(Error::InvalidGame(format!(
                "{} edges but {} constraints",
                edges.len(),
                constraints.len()
            )));
        }
        if let Some((i, e)) = edges
            .iter()
            .enumerate()
            .find(|(_, &(u, v))| u >= num_vertices || v >= num_vertices)
        {
            return Err(Error::InvalidGame(format!("edge {i} = {e:?} out of range")));
        }
        if constraints.iter().any(|c| c.alphabet_size() != alphabet_size) {
            return Err(Error::InvalidGame("constraint alphabet mismatch".into()));
        }
        Ok(ConstraintGraph {
            alphabet_size,
            num_vertices,
            edges,
            constraints,
        })
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn constraints(&self) -> &[PairSet] {
        &self.constraints
    }

    pub fn size(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edge_satisfied(&self, e: usize, labels: &[Symbol]) -> bool {
        let (u, v) = self.edges[e];
        self.constraints[e].contains(labels[u], labels[v])
    }

    pub fn satisfied_count(&self, labels: &[Symbol]) -> usize {
        (0..self.size()).filter(|&e| self.edge_satisfied(e, labels)).count()
    }

    /// Fraction of unsatisfied edge entries.
    pub fn unsat(&self, labels: &[Symbol]) -> Result<Rational> {
        if labels.len() != self.num_vertices {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} vertices",
                labels.len(),
                self.num_vertices
            )));
        }
        if self.size() == 0 {
            return Err(Error::EmptyGame);
        }
        Ok(Rational::frac(self.size() - self.satisfied_count(labels), self.size()))
    }

    /// Edge indices incident to each vertex (a self-loop is listed once).
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.num_vertices];
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            inc[u].push(e);
            if v != u {
                inc[v].push(e);
            }
        }
        inc
    }

    /// Degree with a self-loop counted once, matching one walk step along it.
    pub fn degrees(&self) -> Vec<usize> {
        self.incidence().iter().map(Vec::len).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// Sorted neighbor lists, with multiplicity; a self-loop contributes `v` once to `v`.
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut nb = vec![Vec::new(); self.num_vertices];
        for &(u, v) in &self.edges {
            nb[u].push(v);
            if u != v {
                nb[v].push(u);
            }
        }
        for l in &mut nb {
            l.sort_unstable();
        }
        nb
    }

    /// Extends the fixed labels to a full labeling with every constraint
    /// satisfied, by depth-first search in vertex order. `None` if impossible.
    pub fn complete(&self, fixed: &[Option<Symbol>]) -> Option<Vec<Symbol>> {
        let inc = self.incidence();
        let mut labels = vec![0 as Symbol; self.num_vertices];
        let mut assigned = vec![false; self.num_vertices];
        for (v, f) in fixed.iter().enumerate() {
            if let Some(a) = f {
                labels[v] = *a;
                assigned[v] = true;
            }
        }
        let ok_at = |v: usize, labels: &[Symbol], assigned: &[bool]| {
            inc[v].iter().all(|&e| {
                let (a, b) = self.edges[e];
                !(assigned[a] && assigned[b]) || self.edge_satisfied(e, labels)
            })
        };
        if (0..self.num_vertices).any(|v| assigned[v] && !ok_at(v, &labels, &assigned)) {
            return None;
        }
        let free: Vec<usize> = (0..self.num_vertices).filter(|&v| !assigned[v]).collect();
        fn go(
            g: &ConstraintGraph,
            free: &[usize],
            i: usize,
            labels: &mut Vec<Symbol>,
            assigned: &mut Vec<bool>,
            ok_at: &dyn Fn(usize, &[Symbol], &[bool]) -> bool,
        ) -> bool {
            if i == free.len() {
                return true;
            }
            let v = free[i];
            assigned[v] = true;
            for a in 0..g.alphabet_size as Symbol {
                labels[v] = a;
                if ok_at(v, labels, assigned) && go(g, free, i + 1, labels, assigned, ok_at) {
                    return true;
                }
            }
            assigned[v] = false;
            false
        }
        go(self, &free, 0, &mut labels, &mut assigned, &ok_at).then_some(labels)
    }

    /// Minimum number of violated edges over all extensions of `fixed`, by
    /// branch and bound. Returns `None` if more than `budget` nodes are visited.
    pub fn min_violations(&self, fixed: &[Option<Symbol>], budget: u64) -> Option<usize> {
        let inc = self.incidence();
        let mut labels = vec![0 as Symbol; self.num_vertices];
        let mut assigned = vec![false; self.num_vertices];
        for (v, f) in fixed.iter().enumerate() {
            if let Some(a) = f {
                labels[v] = *a;
                assigned[v] = true;
            }
        }
        let base = (0..self.size())
            .filter(|&e| {
                let (a, b) = self.edges[e];
                assigned[a] && assigned[b] && !self.edge_satisfied(e, &labels)
            })
            .count();
        let free: Vec<usize> = (0..self.num_vertices).filter(|&v| !assigned[v]).collect();
        struct Search<'a> {
            g: &'a ConstraintGraph,
            inc: Vec<Vec<usize>>,
            free: Vec<usize>,
            labels: Vec<Symbol>,
            assigned: Vec<bool>,
            best: usize,
            nodes: u64,
            budget: u64,
        }
        impl Search<'_> {
            fn go(&mut self, i: usize, cost: usize) -> bool {
                self.nodes += 1;
                if self.nodes > self.budget {
                    return false;
                }
                if cost >= self.best {
                    return true;
                }
                if i == self.free.len() {
                    self.best = cost;
                    return true;
                }
                let v = self.free[i];
                self.assigned[v] = true;
                for a in 0..self.g.alphabet_size as Symbol {
                    self.labels[v] = a;
                    let added = self.inc[v]
                        .iter()
                        .filter(|&&e| {
                            let (x, y) = self.g.edges[e];
                            self.assigned[x] && self.assigned[y] && !self.g.edge_satisfied(e, &self.labels)
                        })
                        .count();
                    if !self.go(i + 1, cost + added) {
                        return false;
                    }
                }
                self.assigned[v] = false;
                true
            }
        }
        let mut s = Search {
            g: self,
            inc,
            free,
            labels,
            assigned,
            best: usize::MAX,
            nodes: 0,
            budget,
        };
        s.go(0, base).then_some(s.best)
    }

    /// Seeded random-restart hill climbing over labelings; returns the best
    /// satisfied fraction and its labeling.
    pub fn value_local_search(&self, restarts: usize, seed: u64) -> Result<(Rational, Vec<Symbol>)> {
        if self.size() == 0 {
            return Err(Error::EmptyGame);
        }
        let inc = self.incidence();
        let q = self.alphabet_size as u64;
        let mut best: Option<(usize, Vec<Symbol>)> = None;
        for r in 0..restarts.max(1) {
            let mut rs = rng::derived_stream(seed, &[r as u64]);
            let mut labels: Vec<Symbol> = (0..self.num_vertices)
                .map(|_| rng::uniform_below(&mut rs, q) as Symbol)
                .collect();
            'climb: loop {
                for v in 0..self.num_vertices {
                    let cur = labels[v];
                    let here = inc[v].iter().filter(|&&e| self.edge_satisfied(e, &labels)).count();
                    for a in 0..q as Symbol {
                        if a == cur {
                            continue;
                        }
                        labels[v] = a;
                        let there = inc[v].iter().filter(|&&e| self.edge_satisfied(e, &labels)).count();
                        if there > here {
                            continue 'climb;
                        }
                    }
                    labels[v] = cur;
                }
                break;
            }
            let score = self.satisfied_count(&labels);
            if best.as_ref().is_none_or(|(b, _)| score > *b) {
                best = Some((score, labels));
            }
        }
        let (score, labels) = best.expect("at least one restart");
        Ok((Rational::frac(score, self.size()), labels))
    }
}

pub const GRAPH_FORMAT: &str = "cg-1";

#[derive(Serialize, Deserialize)]
struct GraphFile {
    format: String,
    alphabet_size: usize,
    vertices: usize,
    edges: Vec<[usize; 2]>,
    constraints: Vec<Vec<[Symbol; 2]>>,
}

impl Serialize for ConstraintGraph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GraphFile {
            format: GRAPH_FORMAT.into(),
            alphabet_size: self.alphabet_size,
            vertices: self.num_vertices,
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
            constraints: self
                .constraints
                .iter()
                .map(|c| c.pairs().map(|(a, b)| [a, b]).collect())
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ConstraintGraph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let f = GraphFile::deserialize(deserializer)?;
        if f.format != GRAPH_FORMAT {
            return Err(D::Error::custom(format!("expected format {GRAPH_FORMAT:?}, got {:?}", f.format)));
        }
        let q = f.alphabet_size;
        let constraints = f
            .constraints
            .into_iter()
            .map(|c| PairSet::from_pairs(q, c.into_iter().map(|[a, b]| (a, b))))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        ConstraintGraph::new(q, f.vertices, f.edges.into_iter().map(|[u, v]| (u, v)).collect(), constraints)
            .map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> ConstraintGraph {
        let eq = PairSet::from_predicate(2, |a, b| a == b);
        let ne = PairSet::from_predicate(2, |a, b| a != b);
        ConstraintGraph::new(2, 3, vec![(0, 1), (1, 2), (2, 2)], vec![eq, ne, PairSet::from_predicate(2, |a, _| a == 1)]).unwrap()
    }

    #[test]
    fn completion_and_unsat() {
        let g = path3();
        let full = g.complete(&[None, None, None]).unwrap();
        assert_eq!(full, vec![0, 0, 1]);
        assert_eq!(g.unsat(&full).unwrap(), Rational::ZERO);
        assert!(g.complete(&[Some(1), None, None]).is_none());
        assert_eq!(g.min_violations(&[Some(1), None, None], 1 << 20), Some(1));
        assert_eq!(g.degrees(), vec![1, 2, 2]);
    }

    #[test]
    fn local_search_finds_satisfying() {
        let (v, labels) = path3().value_local_search(8, 3).unwrap();
        assert_eq!(v, Rational::ONE);
        assert_eq!(path3().unsat(&labels).unwrap(), Rational::ZERO);
    }

    #[test]
    fn json_round_trip() {
        let g = path3();
        let text = serde_json::to_string(&g).unwrap();
        assert!(text.starts_with(r#"{"format":"cg-1","alphabet_size":2,"vertices":3"#));
        assert_eq!(serde_json::from_str::<ConstraintGraph>(&text).unwrap(), g);
    }
}
