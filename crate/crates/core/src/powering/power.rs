//! Graph powering over exhaustively counted walks.
//!
//! The cloud of `v` is every vertex within distance `t` of `v`, sorted. A
//! super-label of `v` assigns one base symbol to each cloud member, in cloud
//! order. Every `(2t+1)`-step walk is one edge; walks with the same endpoints
//! carry the same constraint, so they are stored once with a multiplicity.
//! A walk from `u` to `v` accepts when the two super-labels agree on the
//! shared cloud members and, merged, satisfy every base edge lying inside
//! `cloud(u) ∪ cloud(v)`.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::game::Symbol;
use crate::rational::Rational;

use super::graph::ConstraintGraph;

pub type SuperLabeling = Vec<Vec<Symbol>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoweredGraph {
    base: ConstraintGraph,
    t: usize,
    clouds: Vec<Vec<usize>>,
    /// `(u, v, number of walks from u to v)`, sorted, zero counts omitted.
    walks: Vec<(usize, usize, u128)>,
    total_walks: u128,
}

/// Sorted vertices within distance `t` of `start`.
pub fn cloud(neighbors: &[Vec<usize>], start: usize, t: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; neighbors.len()];
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        if dist[u] == t {
            continue;
        }
        for &w in &neighbors[u] {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    (0..neighbors.len()).filter(|&v| dist[v] != usize::MAX).collect()
}

/// Step counts `A[u][v]`: edges between `u` and `v`, a self-loop counting once.
fn step_matrix(g: &ConstraintGraph) -> Vec<Vec<(usize, u128)>> {
    let n = g.num_vertices();
    let mut dense = vec![std::collections::BTreeMap::<usize, u128>::new(); n];
    for &(u, v) in g.edges() {
        *dense[u].entry(v).or_default() += 1;
        if u != v {
            *dense[v].entry(u).or_default() += 1;
        }
    }
    dense.into_iter().map(|m| m.into_iter().collect()).collect()
}

/// Number of `len`-step walks from `start` to every vertex.
fn walks_from(step: &[Vec<(usize, u128)>], start: usize, len: usize, cap: u128) -> Result<Vec<u128>> {
    let n = step.len();
    let mut cur = vec![0u128; n];
    cur[start] = 1;
    for _ in 0..len {
        let mut next = vec![0u128; n];
        for (u, &c) in cur.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for &(w, m) in &step[u] {
                next[w] = c
                    .checked_mul(m)
                    .and_then(|x| next[w].checked_add(x))
                    .filter(|&x| x <= cap)
                    .ok_or(Error::WalkSpaceTooLarge { size: u128::MAX, cap })?;
            }
        }
        cur = next;
    }
    Ok(cur)
}

pub fn power(graph: &ConstraintGraph, t: usize, caps: &Caps) -> Result<PoweredGraph> {
    let neighbors = graph.neighbors();
    let n = graph.num_vertices();
    let clouds: Vec<Vec<usize>> = (0..n).into_par_iter().map(|v| cloud(&neighbors, v, t)).collect();
    if let Some(c) = clouds.iter().find(|c| c.len() > caps.cloud) {
        return Err(Error::CloudTooLarge {
            size: c.len(),
            cap: caps.cloud,
        });
    }
    let step = step_matrix(graph);
    let cap = caps.walks as u128;
    let rows: Vec<Vec<u128>> = (0..n)
        .into_par_iter()
        .map(|u| walks_from(&step, u, 2 * t + 1, cap))
        .collect::<Result<_>>()?;
    let mut walks = Vec::new();
    let mut total: u128 = 0;
    for (u, row) in rows.into_iter().enumerate() {
        for (v, c) in row.into_iter().enumerate() {
            if c > 0 {
                total += c;
                if total > cap {
                    return Err(Error::WalkSpaceTooLarge { size: total, cap });
                }
                walks.push((u, v, c));
            }
        }
    }
    Ok(PoweredGraph {
        base: graph.clone(),
        t,
        clouds,
        walks,
        total_walks: total,
    })
}

impl PoweredGraph {
    pub fn base(&self) -> &ConstraintGraph {
        &self.base
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn num_vertices(&self) -> usize {
        self.base.num_vertices()
    }

    pub fn clouds(&self) -> &[Vec<usize>] {
        &self.clouds
    }

    pub fn cloud(&self, v: usize) -> &[usize] {
        &self.clouds[v]
    }

    pub fn walks(&self) -> &[(usize, usize, u128)] {
        &self.walks
    }

    /// `|E|` of the powered graph.
    pub fn total_walks(&self) -> u128 {
        self.total_walks
    }

    /// What `v`'s super-label claims for vertex `w`, if `w` is in its cloud.
    pub fn claim(&self, lambda: &SuperLabeling, v: usize, w: usize) -> Option<Symbol> {
        self.clouds[v].binary_search(&w).ok().map(|i| lambda[v][i])
    }

    pub fn check_labeling(&self, lambda: &SuperLabeling) -> Result<()> {
        if lambda.len() != self.num_vertices() {
            return Err(Error::UndefinedVertex(format!(
                "{} super-labels for {} vertices",
                lambda.len(),
                self.num_vertices()
            )));
        }
        for (v, l) in lambda.iter().enumerate() {
            if l.len() != self.clouds[v].len() {
                return Err(Error::UndefinedVertex(format!(
                    "vertex {v}: {} claims for a cloud of {}",
                    l.len(),
                    self.clouds[v].len()
                )));
            }
            if l.iter().any(|&a| a as usize >= self.base.alphabet_size()) {
                return Err(Error::UndefinedVertex(format!("vertex {v}: symbol out of range")));
            }
        }
        Ok(())
    }

    /// The super-labeling that restricts one base labeling to every cloud.
    pub fn lift(&self, labels: &[Symbol]) -> SuperLabeling {
        self.clouds.iter().map(|c| c.iter().map(|&w| labels[w]).collect()).collect()
    }

    pub fn walk_accepts(&self, u: usize, v: usize, lambda: &SuperLabeling) -> bool {
        let (cu, cv) = (&self.clouds[u], &self.clouds[v]);
        let mut merged: Vec<(usize, Symbol)> = Vec::with_capacity(cu.len() + cv.len());
        let (mut i, mut j) = (0, 0);
        while i < cu.len() || j < cv.len() {
            match (cu.get(i), cv.get(j)) {
                (Some(&a), Some(&b)) if a == b => {
                    if lambda[u][i] != lambda[v][j] {
                        return false;
                    }
                    merged.push((a, lambda[u][i]));
                    i += 1;
                    j += 1;
                }
                (Some(&a), Some(&b)) if a < b => {
                    merged.push((a, lambda[u][i]));
                    i += 1;
                }
                (Some(&a), None) => {
                    merged.push((a, lambda[u][i]));
                    i += 1;
                }
                (_, Some(&b)) => {
                    merged.push((b, lambda[v][j]));
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        let label = |w: usize| merged.binary_search_by_key(&w, |&(x, _)| x).ok().map(|k| merged[k].1);
        self.base.edges().iter().zip(self.base.constraints()).all(|(&(a, b), c)| {
            match (label(a), label(b)) {
                (Some(la), Some(lb)) => c.contains(la, lb),
                _ => true,
            }
        })
    }

    /// Fraction of walks accepted by `lambda`.
    pub fn satisfied_fraction(&self, lambda: &SuperLabeling) -> Result<Rational> {
        self.check_labeling(lambda)?;
        if self.total_walks == 0 {
            return Err(Error::EmptyGame);
        }
        let ok: u128 = self
            .walks
            .par_iter()
            .filter(|&&(u, v, _)| self.walk_accepts(u, v, lambda))
            .map(|&(_, _, c)| c)
            .sum();
        let (ok, total) = (i64::try_from(ok), i64::try_from(self.total_walks));
        match (ok, total) {
            (Ok(a), Ok(b)) => Ok(Rational::new(a, b)),
            _ => Err(Error::WalkSpaceTooLarge {
                size: self.total_walks,
                cap: i64::MAX as u128,
            }),
        }
    }
}

pub const POWERED_FORMAT: &str = "pg-1";

#[derive(Serialize, Deserialize)]
struct PoweredFile {
    format: String,
    t: usize,
    base: ConstraintGraph,
}

impl Serialize for PoweredGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PoweredFile {
            format: POWERED_FORMAT.into(),
            t: self.t,
            base: self.base.clone(),
        }
        .serialize(s)
    }
}

/// Clouds and walks are recomputed under default caps on load.
impl<'de> Deserialize<'de> for PoweredGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = PoweredFile::deserialize(d)?;
        if f.format != POWERED_FORMAT {
            return Err(serde::de::Error::custom(format!("expected format {POWERED_FORMAT}")));
        }
        power(&f.base, f.t, &Caps::default()).map_err(serde::de::Error::custom)
    }
}
