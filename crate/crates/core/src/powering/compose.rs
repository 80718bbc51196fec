//! Composition of a game with an assignment tester.
//!
//! Every vertex `v` of `G′` owns a block `[v]` of `⌈ℓ/3⌉` triple vertices
//! carrying its codeword. The gadget of edge `e = (v, w)` is the tester output
//! for the robustized circuit of `e`, with its input triples identified with
//! the blocks `[v]` and `[w]`; its remaining vertices are private. Each gadget
//! is completed to a clique with unconstrained edges and padded with
//! unconstrained self-loops on its representative so all gadgets have equally
//! many edges.
//!
//! Vertex order: X-blocks, then Y-blocks, then the private vertices of each
//! gadget in edge order. Edge order: gadget by gadget, tester edges first,
//! then clique edges in lexicographic order, then padding.

use std::collections::BTreeSet;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::game::{Game, PairSet, Symbol};

use super::circuit::BooleanCircuit;
use super::code::{robustize, BinaryCode};
use super::graph::ConstraintGraph;
use super::tester::{bit, pack, tseitin_tester_with_layout, TesterOutput, TripleLayout, SIGMA0};

/// Any construction with the tester interface: a circuit and a placement of
/// its inputs into triples in, a constraint graph whose first vertices are
/// those triples out.
pub type TesterFn = fn(&BooleanCircuit, TripleLayout, &Caps) -> Result<TesterOutput>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetInfo {
    /// Edge of `G′`.
    pub edge: usize,
    /// Global ids of the gadget's vertices in tester order; the first
    /// `2·⌈ℓ/3⌉` are the `[v]` then `[w]` block triples.
    pub vertices: Vec<usize>,
    pub rep: usize,
    pub edges: Range<usize>,
    pub tester_edges: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComposedGraph {
    pub graph: ConstraintGraph,
    pub base: Game,
    pub code: BinaryCode,
    pub gadgets: Vec<GadgetInfo>,
    /// Triples per block.
    pub block_len: usize,
    /// Tester circuits, one per edge of `G′`.
    pub circuits: Vec<BooleanCircuit>,
}

impl ComposedGraph {
    pub fn num_blocks(&self) -> usize {
        self.base.num_x() + self.base.num_y()
    }

    /// Vertices of block of `G′` vertex `b`, where Y-vertices follow X-vertices.
    pub fn block(&self, b: usize) -> Range<usize> {
        b * self.block_len..(b + 1) * self.block_len
    }

    pub fn block_of_x(&self, x: usize) -> Range<usize> {
        self.block(x)
    }

    pub fn block_of_y(&self, y: usize) -> Range<usize> {
        self.block(self.base.num_x() + y)
    }

    /// The gadget's own constraints on its local vertex numbering.
    pub fn gadget_graph(&self, g: usize) -> ConstraintGraph {
        let info = &self.gadgets[g];
        let local = |v: usize| info.vertices.iter().position(|&w| w == v).expect("gadget vertex");
        let edges = info
            .edges
            .clone()
            .map(|e| {
                let (u, v) = self.graph.edges()[e];
                (local(u), local(v))
            })
            .collect();
        let constraints = self.graph.constraints()[info.edges.clone()].to_vec();
        ConstraintGraph::new(SIGMA0, info.vertices.len(), edges, constraints).expect("valid gadget")
    }

    /// Triple labels holding a codeword, padding bits 0.
    pub fn encode_block(&self, a: Symbol) -> Vec<Symbol> {
        let word = self.code.encode(a);
        (0..self.block_len)
            .map(|t| pack(std::array::from_fn(|p| word.get(3 * t + p).copied().unwrap_or(false))))
            .collect()
    }

    /// The `ℓ` code bits stored in a block's triple labels.
    pub fn block_bits(&self, labels: &[Symbol]) -> Vec<bool> {
        (0..self.code.len()).map(|j| bit(labels[j / 3], j % 3)).collect()
    }

    /// The labeling induced by a strategy of `G′`: blocks hold codewords and
    /// each gadget's private vertices hold the circuit evaluation on them.
    pub fn encode_strategy(&self, s: &crate::game::Strategy) -> Vec<Symbol> {
        let mut labels = vec![0; self.graph.num_vertices()];
        for (x, &a) in s.psi_x.iter().enumerate() {
            for (v, l) in self.block_of_x(x).zip(self.encode_block(a)) {
                labels[v] = l;
            }
        }
        for (y, &b) in s.psi_y.iter().enumerate() {
            for (v, l) in self.block_of_y(y).zip(self.encode_block(b)) {
                labels[v] = l;
            }
        }
        for (g, info) in self.gadgets.iter().enumerate() {
            let (x, y) = self.base.edges()[info.edge];
            let input: Vec<bool> = self
                .code
                .encode(s.psi_x[x])
                .iter()
                .chain(self.code.encode(s.psi_y[y]))
                .copied()
                .collect();
            let layout = gadget_layout(self.code.len(), self.block_len);
            let wires = self.circuits[g].wires(&input);
            let n = input.len();
            for (k, gate) in self.circuits[g].gates().iter().enumerate() {
                let (a, b) = gate.inputs();
                labels[info.vertices[layout.len() + k]] = pack([wires[n + k], wires[a], b.is_some_and(|b| wires[b])]);
            }
        }
        labels
    }
}

/// Input `j < ℓ` of an edge circuit sits in `[v]`, input `ℓ + j` in `[w]`,
/// both at triple `j / 3`, position `j % 3`.
pub fn gadget_layout(ell: usize, block_len: usize) -> TripleLayout {
    (0..2 * block_len)
        .map(|t| {
            let (side, t) = (t / block_len, t % block_len);
            std::array::from_fn(|p| {
                let j = 3 * t + p;
                (j < ell).then_some(side * ell + j)
            })
        })
        .collect()
}

pub fn compose(game: &Game, code: &BinaryCode, caps: &Caps) -> Result<ComposedGraph> {
    compose_with(game, code, tseitin_tester_with_layout, caps)
}

pub fn compose_with(game: &Game, code: &BinaryCode, tester: TesterFn, caps: &Caps) -> Result<ComposedGraph> {
    let circuits = robustize(game, code)?;
    let block_len = code.len().div_ceil(3).max(1);
    let layout = gadget_layout(code.len(), block_len);
    let nb = game.num_x() + game.num_y();
    let mut next = nb * block_len;

    let mut outputs = Vec::with_capacity(circuits.len());
    for phi in &circuits {
        let out = tester(phi, layout.clone(), caps)?;
        let size = out.graph.num_vertices();
        if size > caps.gadget {
            return Err(Error::GadgetTooLarge { size, cap: caps.gadget });
        }
        outputs.push(out);
    }

    let mut gadget_edges: Vec<Vec<(usize, usize, PairSet)>> = Vec::new();
    let mut gadgets = Vec::new();
    for (e, out) in outputs.iter().enumerate() {
        let (x, y) = game.edges()[e];
        let mut vertices: Vec<usize> = (x * block_len..(x + 1) * block_len)
            .chain((game.num_x() + y) * block_len..(game.num_x() + y + 1) * block_len)
            .collect();
        let private = out.graph.num_vertices() - 2 * block_len;
        vertices.extend(next..next + private);
        next += private;
        let rep = vertices[if private > 0 { 2 * block_len } else { 0 }];

        let mut list: Vec<(usize, usize, PairSet)> = out
            .graph
            .edges()
            .iter()
            .zip(out.graph.constraints())
            .map(|(&(u, v), c)| (vertices[u], vertices[v], c.clone()))
            .collect();
        let adjacent: BTreeSet<(usize, usize)> = out
            .graph
            .edges()
            .iter()
            .map(|&(u, v)| (u.min(v), u.max(v)))
            .collect();
        let k = vertices.len();
        for i in 0..k {
            for j in i + 1..k {
                if !adjacent.contains(&(i, j)) {
                    list.push((vertices[i], vertices[j], PairSet::full(SIGMA0)));
                }
            }
        }
        gadgets.push(GadgetInfo {
            edge: e,
            vertices,
            rep,
            edges: 0..0,
            tester_edges: out.graph.size(),
        });
        gadget_edges.push(list);
    }

    let target = gadget_edges.iter().map(Vec::len).max().unwrap_or(0);
    let mut edges = Vec::new();
    let mut constraints = Vec::new();
    for (info, list) in gadgets.iter_mut().zip(gadget_edges) {
        let start = edges.len();
        let pad = target - list.len();
        for (u, v, c) in list {
            edges.push((u, v));
            constraints.push(c);
        }
        for _ in 0..pad {
            edges.push((info.rep, info.rep));
            constraints.push(PairSet::full(SIGMA0));
        }
        info.edges = start..edges.len();
    }

    let graph = ConstraintGraph::new(SIGMA0, next, edges, constraints)?;
    Ok(ComposedGraph {
        graph,
        base: game.clone(),
        code: code.clone(),
        gadgets,
        block_len,
        circuits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::game::{strategy_value, value_exact, Strategy};
    use crate::rational::Rational;

    fn micro() -> Game {
        // two edges sharing x = 0; edge 0 wants equality, edge 1 inequality
        Game::new(
            1,
            2,
            2,
            vec![(0, 0), (0, 1)],
            vec![
                PairSet::from_predicate(2, |a, b| a == b),
                PairSet::from_predicate(2, |a, b| a != b),
            ],
        )
        .unwrap()
    }

    #[test]
    fn single_edge_is_one_clique() {
        let g = fixtures::uniform_game(1, 1, 2, true);
        let code = BinaryCode::repetition(2, 2).unwrap();
        let c = compose(&g, &code, &Caps::default()).unwrap();
        assert_eq!(c.gadgets.len(), 1);
        let n = c.graph.num_vertices();
        assert_eq!(c.gadgets[0].vertices.len(), n);
        let nb = c.graph.neighbors();
        for (v, list) in nb.iter().enumerate() {
            let others: BTreeSet<usize> = list.iter().copied().filter(|&w| w != v).collect();
            assert_eq!(others.len(), n - 1);
        }
    }

    #[test]
    fn vertex_count_and_padding() {
        let g = micro();
        let code = BinaryCode::repetition(2, 2).unwrap();
        let c = compose(&g, &code, &Caps::default()).unwrap();
        let private: usize = c.gadgets.iter().map(|i| i.vertices.len() - 2 * c.block_len).sum();
        assert_eq!(c.graph.num_vertices(), c.num_blocks() * c.block_len + private);
        let lens: Vec<usize> = c.gadgets.iter().map(|i| i.edges.len()).collect();
        assert!(lens.windows(2).all(|w| w[0] == w[1]));
        assert_eq!(lens.iter().sum::<usize>(), c.graph.size());
    }

    #[test]
    fn encoded_strategy_satisfies_exactly_its_edges() {
        let g = micro();
        let code = BinaryCode::repetition(2, 2).unwrap();
        let c = compose(&g, &code, &Caps::default()).unwrap();
        for m in 0..8u32 {
            let s = Strategy {
                psi_x: vec![m & 1],
                psi_y: vec![m >> 1 & 1, m >> 2 & 1],
            };
            let labels = c.encode_strategy(&s);
            let violated = c.graph.size() - c.graph.satisfied_count(&labels);
            let lost = g.size() - g.satisfied_count(&s);
            // one output check per lost edge
            assert_eq!(violated, lost);
            assert_eq!(
                Rational::frac(g.satisfied_count(&s), g.size()),
                strategy_value(&g, &s).unwrap()
            );
        }
    }

    #[test]
    fn composed_value_at_least_an_eighth() {
        let g = micro();
        assert_eq!(value_exact(&g, &Caps::default()).unwrap().value, Rational::ONE);
        let code = BinaryCode::repetition(2, 2).unwrap();
        let c = compose(&g, &code, &Caps::default()).unwrap();
        let (v, labels) = c.graph.value_local_search(4, 1).unwrap();
        assert!(v >= Rational::new(1, 8));
        assert_eq!(Rational::frac(c.graph.satisfied_count(&labels), c.graph.size()), v);
    }

    #[test]
    fn gadget_cap() {
        let caps = Caps { gadget: 4, ..Caps::default() };
        let code = BinaryCode::repetition(2, 2).unwrap();
        assert!(matches!(compose(&micro(), &code, &caps), Err(Error::GadgetTooLarge { .. })));
    }
}
