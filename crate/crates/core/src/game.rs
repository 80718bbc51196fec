//! Two-prover one-round games: data model, strategies and exact/heuristic values.
//!
//! A [`Game`] is a bipartite multigraph on `X = [num_x]`, `Y = [num_y]` whose
//! edge entries each carry an allowed-answer set `π_e ⊆ Σ×Σ`. Parallel edges are
//! kept as separate entries and every count in the crate is taken over the edge
//! multiset, so a uniformly random edge means a uniformly random entry.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::caps::{log2_pow, pow_within, Caps};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::rng;

pub type Symbol = u32;

/// A subset of `Σ×Σ` stored as a bitset over `a * q + b`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PairSet {
    q: usize,
    bits: Vec<u64>,
}

impl PairSet {
    pub fn empty(q: usize) -> Self {
        PairSet {
            q,
            bits: vec![0; (q * q).div_ceil(64)],
        }
    }

    pub fn full(q: usize) -> Self {
        let mut s = PairSet::empty(q);
        for a in 0..q {
            for b in 0..q {
                s.insert(a as Symbol, b as Symbol);
            }
        }
        s
    }

    pub fn from_pairs<I: IntoIterator<Item = (Symbol, Symbol)>>(q: usize, pairs: I) -> Result<Self> {
        let mut s = PairSet::empty(q);
        for (a, b) in pairs {
            if a as usize >= q || b as usize >= q {
                return Err(Error::InvalidGame(format!(
                    "pair ({a},{b}) outside alphabet of size {q}"
                )));
            }
            s.insert(a, b);
        }
        Ok(s)
    }

    /// All pairs satisfying `pred`.
    pub fn from_predicate(q: usize, mut pred: impl FnMut(Symbol, Symbol) -> bool) -> Self {
        let mut s = PairSet::empty(q);
        for a in 0..q as Symbol {
            for b in 0..q as Symbol {
                if pred(a, b) {
                    s.insert(a, b);
                }
            }
        }
        s
    }

    pub fn alphabet_size(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn contains(&self, a: Symbol, b: Symbol) -> bool {
        let i = a as usize * self.q + b as usize;
        self.bits[i >> 6] >> (i & 63) & 1 == 1
    }

    pub fn insert(&mut self, a: Symbol, b: Symbol) {
        let i = a as usize * self.q + b as usize;
        self.bits[i >> 6] |= 1 << (i & 63);
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.q * self.q
    }

    /// Pairs in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (Symbol, Symbol)> + '_ {
        let q = self.q as Symbol;
        (0..q)
            .flat_map(move |a| (0..q).map(move |b| (a, b)))
            .filter(|&(a, b)| self.contains(a, b))
    }

    /// Image under a simultaneous relabeling `perm` of the alphabet.
    pub fn relabel(&self, perm: &[Symbol]) -> Self {
        let mut s = PairSet::empty(self.q);
        for (a, b) in self.pairs() {
            s.insert(perm[a as usize], perm[b as usize]);
        }
        s
    }
}

impl std::fmt::Debug for PairSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Game {
    num_x: usize,
    num_y: usize,
    alphabet_size: usize,
    edges: Vec<(usize, usize)>,
    constraints: Vec<PairSet>,
}

impl Game {
    pub fn new(
        num_x: usize,
        num_y: usize,
        alphabet_size: usize,
        edges: Vec<(usize, usize)>,
        constraints: Vec<PairSet>,
    ) -> Result<Self> {
        if num_x == 0 || num_y == 0 || alphabet_size == 0 {
            return Err(Error::InvalidGame(
                "num_x, num_y and alphabet_size must be positive".into(),
            ));
        }
        if edges.len() != constraints.len() {
            return Err(Error::InvalidGame(format!(
                "{} edges but {} constraints",
                edges.len(),
                constraints.len()
            )));
        }
        for (i, &(x, y)) in edges.iter().enumerate() {
            if x >= num_x || y >= num_y {
                return Err(Error::InvalidGame(format!("edge {i} = ({x},{y}) out of range")));
            }
        }
        if let Some(c) = constraints.iter().find(|c| c.q != alphabet_size) {
            return Err(Error::InvalidGame(format!(
                "constraint over alphabet {} in game over {alphabet_size}",
                c.q
            )));
        }
        Ok(Game {
            num_x,
            num_y,
            alphabet_size,
            edges,
            constraints,
        })
    }

    /// Every `π_e` equal to `pred`.
    pub fn with_uniform_constraint(
        num_x: usize,
        num_y: usize,
        alphabet_size: usize,
        edges: Vec<(usize, usize)>,
        constraint: PairSet,
    ) -> Result<Self> {
        let constraints = vec![constraint; edges.len()];
        Game::new(num_x, num_y, alphabet_size, edges, constraints)
    }

    pub fn num_x(&self) -> usize {
        self.num_x
    }

    pub fn num_y(&self) -> usize {
        self.num_y
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn constraints(&self) -> &[PairSet] {
        &self.constraints
    }

    pub fn constraint(&self, e: usize) -> &PairSet {
        &self.constraints[e]
    }

    /// `|G|`, the number of edge entries.
    pub fn size(&self) -> usize {
        self.edges.len()
    }

    pub fn degrees_x(&self) -> Vec<usize> {
        let mut d = vec![0; self.num_x];
        for &(x, _) in &self.edges {
            d[x] += 1;
        }
        d
    }

    pub fn degrees_y(&self) -> Vec<usize> {
        let mut d = vec![0; self.num_y];
        for &(_, y) in &self.edges {
            d[y] += 1;
        }
        d
    }

    pub fn max_degree(&self) -> usize {
        let dx = self.degrees_x().into_iter().max().unwrap_or(0);
        let dy = self.degrees_y().into_iter().max().unwrap_or(0);
        dx.max(dy)
    }

    /// Multiplicity of each vertex pair that carries at least one edge.
    pub fn multiplicities(&self) -> BTreeMap<(usize, usize), usize> {
        let mut m = BTreeMap::new();
        for &e in &self.edges {
            *m.entry(e).or_insert(0) += 1;
        }
        m
    }

    fn check_strategy(&self, s: &Strategy) -> Result<()> {
        if s.psi_x.len() != self.num_x || s.psi_y.len() != self.num_y {
            return Err(Error::DimensionMismatch(format!(
                "strategy is {}x{}, game is {}x{}",
                s.psi_x.len(),
                s.psi_y.len(),
                self.num_x,
                self.num_y
            )));
        }
        let q = self.alphabet_size as Symbol;
        if s.psi_x.iter().chain(&s.psi_y).any(|&a| a >= q) {
            return Err(Error::DimensionMismatch(format!(
                "strategy symbol outside alphabet of size {q}"
            )));
        }
        Ok(())
    }

    /// Number of edge entries satisfied by `s` (dimensions unchecked).
    pub fn satisfied_count(&self, s: &Strategy) -> usize {
        self.edges
            .iter()
            .zip(&self.constraints)
            .filter(|(&(x, y), c)| c.contains(s.psi_x[x], s.psi_y[y]))
            .count()
    }

    /// Rewrites the alphabet by `perm` in every constraint.
    pub fn relabel_alphabet(&self, perm: &[Symbol]) -> Game {
        Game {
            constraints: self.constraints.iter().map(|c| c.relabel(perm)).collect(),
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Strategy {
    pub psi_x: Vec<Symbol>,
    pub psi_y: Vec<Symbol>,
}

impl Strategy {
    pub fn constant(num_x: usize, num_y: usize, a: Symbol) -> Self {
        Strategy {
            psi_x: vec![a; num_x],
            psi_y: vec![a; num_y],
        }
    }

    pub fn relabel(&self, perm: &[Symbol]) -> Self {
        Strategy {
            psi_x: self.psi_x.iter().map(|&a| perm[a as usize]).collect(),
            psi_y: self.psi_y.iter().map(|&a| perm[a as usize]).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValueMethod {
    Exact,
    LocalSearchLowerBound,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueResult {
    pub value: Rational,
    pub witness: Strategy,
    pub method: ValueMethod,
}

/// Exact fraction of edge entries satisfied by `s`.
pub fn strategy_value(game: &Game, s: &Strategy) -> Result<Rational> {
    game.check_strategy(s)?;
    if game.size() == 0 {
        return Err(Error::EmptyGame);
    }
    Ok(Rational::frac(game.satisfied_count(s), game.size()))
}

/// Which side is enumerated; the other side best-responds vertex by vertex.
struct Enumeration {
    swap: bool,
    enum_n: usize,
    other_n: usize,
    /// Per other-side vertex: `(edge, enumerated-side endpoint)`.
    incidence: Vec<Vec<(usize, usize)>>,
}

impl Enumeration {
    fn new(game: &Game) -> Self {
        let swap = game.num_y < game.num_x;
        let (enum_n, other_n) = if swap {
            (game.num_y, game.num_x)
        } else {
            (game.num_x, game.num_y)
        };
        let mut incidence = vec![Vec::new(); other_n];
        for (e, &(x, y)) in game.edges.iter().enumerate() {
            if swap {
                incidence[x].push((e, y));
            } else {
                incidence[y].push((e, x));
            }
        }
        Enumeration {
            swap,
            enum_n,
            other_n,
            incidence,
        }
    }

    /// Best response of the other side; returns satisfied count and answers.
    fn respond(&self, game: &Game, assign: &[Symbol], scratch: &mut [usize], out: &mut [Symbol]) -> usize {
        let q = game.alphabet_size;
        let mut total = 0;
        for v in 0..self.other_n {
            scratch[..q].iter_mut().for_each(|c| *c = 0);
            for &(e, u) in &self.incidence[v] {
                let c = &game.constraints[e];
                let a = assign[u];
                for (b, slot) in scratch[..q].iter_mut().enumerate() {
                    let hit = if self.swap {
                        c.contains(b as Symbol, a)
                    } else {
                        c.contains(a, b as Symbol)
                    };
                    *slot += hit as usize;
                }
            }
            let (best_b, best) = scratch[..q]
                .iter()
                .enumerate()
                .fold((0, 0), |acc, (b, &c)| if c > acc.1 { (b, c) } else { acc });
            out[v] = best_b as Symbol;
            total += best;
        }
        total
    }

    fn strategy(&self, assign: Vec<Symbol>, response: Vec<Symbol>) -> Strategy {
        if self.swap {
            Strategy {
                psi_x: response,
                psi_y: assign,
            }
        } else {
            Strategy {
                psi_x: assign,
                psi_y: response,
            }
        }
    }
}

fn decode(mut idx: u64, q: usize, out: &mut [Symbol]) {
    for slot in out.iter_mut() {
        *slot = (idx % q as u64) as Symbol;
        idx /= q as u64;
    }
}

fn increment(assign: &mut [Symbol], q: usize) {
    for slot in assign.iter_mut() {
        *slot += 1;
        if (*slot as usize) < q {
            return;
        }
        *slot = 0;
    }
}

/// Exact value by enumerating the smaller side and best-responding the other.
///
/// The witness is the first optimum in enumeration order (mixed-radix counter,
/// vertex 0 least significant); best responses pick the smallest symbol.
pub fn value_exact(game: &Game, caps: &Caps) -> Result<ValueResult> {
    if game.size() == 0 {
        return Err(Error::EmptyGame);
    }
    let q = game.alphabet_size;
    let n_total = game.num_x + game.num_y;
    if !pow_within(q, n_total, caps.strategy_space) {
        return Err(Error::space(
            "value_exact strategy space",
            log2_pow(q, n_total),
            caps.strategy_space,
        ));
    }
    let en = Enumeration::new(game);
    let space = (q as u64).pow(en.enum_n as u32);
    let m = game.size();

    const CHUNK: u64 = 1 << 12;
    let n_chunks = space.div_ceil(CHUNK);
    let scan = |chunk: u64| -> (usize, u64) {
        let start = chunk * CHUNK;
        let end = (start + CHUNK).min(space);
        let mut assign = vec![0; en.enum_n];
        let mut resp = vec![0; en.other_n];
        let mut scratch = vec![0usize; q];
        decode(start, q, &mut assign);
        let mut best = (0usize, start);
        for idx in start..end {
            let total = en.respond(game, &assign, &mut scratch, &mut resp);
            if idx == start || total > best.0 {
                best = (total, idx);
            }
            if total == m {
                break;
            }
            increment(&mut assign, q);
        }
        best
    };
    let merge = |a: (usize, u64), b: (usize, u64)| {
        if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
            b
        } else {
            a
        }
    };
    let (best, idx) = if n_chunks > 4 {
        (0..n_chunks)
            .into_par_iter()
            .map(scan)
            .reduce(|| (0, u64::MAX), merge)
    } else {
        (0..n_chunks).map(scan).fold((0, u64::MAX), merge)
    };

    let mut assign = vec![0; en.enum_n];
    decode(idx, q, &mut assign);
    let mut resp = vec![0; en.other_n];
    let mut scratch = vec![0usize; q];
    let check = en.respond(game, &assign, &mut scratch, &mut resp);
    debug_assert_eq!(check, best);
    Ok(ValueResult {
        value: Rational::frac(best, m),
        witness: en.strategy(assign, resp),
        method: ValueMethod::Exact,
    })
}

/// Seeded random-restart hill climbing: single-vertex symbol changes,
/// first improvement, restart at a local optimum. A lower bound on the value.
pub fn value_local_search(game: &Game, restarts: usize, seed: u64) -> Result<ValueResult> {
    if game.size() == 0 {
        return Err(Error::EmptyGame);
    }
    if restarts == 0 {
        return Err(Error::InvalidParameter("restarts must be at least 1".into()));
    }
    let q = game.alphabet_size;
    let mut adj_x = vec![Vec::new(); game.num_x];
    let mut adj_y = vec![Vec::new(); game.num_y];
    for (e, &(x, y)) in game.edges.iter().enumerate() {
        adj_x[x].push(e);
        adj_y[y].push(e);
    }
    let mut best: Option<(usize, Strategy)> = None;
    for r in 0..restarts {
        let mut rng = rng::derived_stream(seed, &[r as u64]);
        let mut s = Strategy {
            psi_x: (0..game.num_x)
                .map(|_| rng::uniform_below(&mut rng, q as u64) as Symbol)
                .collect(),
            psi_y: (0..game.num_y)
                .map(|_| rng::uniform_below(&mut rng, q as u64) as Symbol)
                .collect(),
        };
        let local = |s: &Strategy, x_side: bool, v: usize, a: Symbol| -> usize {
            if x_side {
                adj_x[v]
                    .iter()
                    .filter(|&&e| game.constraints[e].contains(a, s.psi_y[game.edges[e].1]))
                    .count()
            } else {
                adj_y[v]
                    .iter()
                    .filter(|&&e| game.constraints[e].contains(s.psi_x[game.edges[e].0], a))
                    .count()
            }
        };
        'climb: loop {
            for x_side in [true, false] {
                let n = if x_side { game.num_x } else { game.num_y };
                for v in 0..n {
                    let cur = if x_side { s.psi_x[v] } else { s.psi_y[v] };
                    let here = local(&s, x_side, v, cur);
                    for a in 0..q as Symbol {
                        if a != cur && local(&s, x_side, v, a) > here {
                            if x_side {
                                s.psi_x[v] = a;
                            } else {
                                s.psi_y[v] = a;
                            }
                            continue 'climb;
                        }
                    }
                }
            }
            break;
        }
        let score = game.satisfied_count(&s);
        if best.as_ref().is_none_or(|(b, _)| score > *b) {
            let done = score == game.size();
            best = Some((score, s));
            if done {
                break;
            }
        }
    }
    let (score, witness) = best.expect("restarts >= 1");
    Ok(ValueResult {
        value: Rational::frac(score, game.size()),
        witness,
        method: ValueMethod::LocalSearchLowerBound,
    })
}

/// A rectangular subgame together with the maps back to the parent's vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RectSubgame {
    pub game: Game,
    /// `x_map[i]` is the parent X-vertex of local vertex `i`.
    pub x_map: Vec<usize>,
    pub y_map: Vec<usize>,
    /// Parent edge index of each local edge entry.
    pub edge_map: Vec<usize>,
}

impl RectSubgame {
    /// Restricts a parent strategy to the rectangle.
    pub fn restrict(&self, s: &Strategy) -> Strategy {
        Strategy {
            psi_x: self.x_map.iter().map(|&x| s.psi_x[x]).collect(),
            psi_y: self.y_map.iter().map(|&y| s.psi_y[y]).collect(),
        }
    }
}

fn normalize_subset(set: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut v = set.to_vec();
    v.sort_unstable();
    v.dedup();
    if let Some(&bad) = v.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index: bad, len: n });
    }
    Ok(v)
}

/// `G_{S×T}`: the edge entries with both endpoints in `S×T`, reindexed.
pub fn rect_subgame(game: &Game, s: &[usize], t: &[usize]) -> Result<RectSubgame> {
    let s = normalize_subset(s, game.num_x)?;
    let t = normalize_subset(t, game.num_y)?;
    if s.is_empty() || t.is_empty() {
        return Err(Error::EmptyRectangle);
    }
    let mut x_local = vec![usize::MAX; game.num_x];
    let mut y_local = vec![usize::MAX; game.num_y];
    for (i, &x) in s.iter().enumerate() {
        x_local[x] = i;
    }
    for (i, &y) in t.iter().enumerate() {
        y_local[y] = i;
    }
    let mut edges = Vec::new();
    let mut constraints = Vec::new();
    let mut edge_map = Vec::new();
    for (e, &(x, y)) in game.edges.iter().enumerate() {
        if x_local[x] != usize::MAX && y_local[y] != usize::MAX {
            edges.push((x_local[x], y_local[y]));
            constraints.push(game.constraints[e].clone());
            edge_map.push(e);
        }
    }
    if edges.is_empty() {
        return Err(Error::EmptyRectangle);
    }
    let sub = Game::new(s.len(), t.len(), game.alphabet_size, edges, constraints)?;
    Ok(RectSubgame {
        game: sub,
        x_map: s,
        y_map: t,
        edge_map,
    })
}

/// Subgame induced by a multiset of edge indices; vertex sets and alphabet unchanged.
pub fn induced_subgame(game: &Game, edge_indices: &[usize]) -> Result<Game> {
    let m = game.size();
    let mut edges = Vec::with_capacity(edge_indices.len());
    let mut constraints = Vec::with_capacity(edge_indices.len());
    for &e in edge_indices {
        if e >= m {
            return Err(Error::IndexOutOfRange { index: e, len: m });
        }
        edges.push(game.edges[e]);
        constraints.push(game.constraints[e].clone());
    }
    Game::new(game.num_x, game.num_y, game.alphabet_size, edges, constraints)
}

pub const GAME_FORMAT: &str = "tpg-1";

#[derive(Serialize, Deserialize)]
struct GameFile {
    format: String,
    alphabet_size: usize,
    num_x: usize,
    num_y: usize,
    edges: Vec<[usize; 2]>,
    constraints: Vec<Vec<[Symbol; 2]>>,
}

impl Serialize for Game {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GameFile {
            format: GAME_FORMAT.to_string(),
            alphabet_size: self.alphabet_size,
            num_x: self.num_x,
            num_y: self.num_y,
            edges: self.edges.iter().map(|&(x, y)| [x, y]).collect(),
            constraints: self
                .constraints
                .iter()
                .map(|c| c.pairs().map(|(a, b)| [a, b]).collect())
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Game {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let f = GameFile::deserialize(deserializer)?;
        if f.format != GAME_FORMAT {
            return Err(D::Error::custom(format!(
                "expected format {GAME_FORMAT:?}, got {:?}",
                f.format
            )));
        }
        let q = f.alphabet_size;
        let constraints = f
            .constraints
            .into_iter()
            .map(|c| PairSet::from_pairs(q, c.into_iter().map(|[a, b]| (a, b))))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        Game::new(
            f.num_x,
            f.num_y,
            q,
            f.edges.into_iter().map(|[x, y]| (x, y)).collect(),
            constraints,
        )
        .map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    /// Independent oracle: every strategy of both sides, no best-response shortcut.
    fn brute_force_value(game: &Game) -> Rational {
        let q = game.alphabet_size();
        let n = game.num_x() + game.num_y();
        let mut best = 0;
        let mut assign = vec![0 as Symbol; n];
        for _ in 0..(q as u64).pow(n as u32) {
            let s = Strategy {
                psi_x: assign[..game.num_x()].to_vec(),
                psi_y: assign[game.num_x()..].to_vec(),
            };
            best = best.max(game.satisfied_count(&s));
            increment(&mut assign, q);
        }
        Rational::frac(best, game.size())
    }

    #[test]
    fn chsh_value_is_three_quarters() {
        let g = fixtures::chsh();
        assert_eq!(brute_force_value(&g), Rational::new(3, 4));
        let v = value_exact(&g, &Caps::default()).unwrap();
        assert_eq!(v.value, Rational::new(3, 4));
        assert_eq!(v.method, ValueMethod::Exact);
        assert_eq!(strategy_value(&g, &v.witness).unwrap(), v.value);
    }

    #[test]
    fn full_and_empty_constraints() {
        let full = fixtures::uniform_game(3, 2, 3, true);
        let empty = fixtures::uniform_game(3, 2, 3, false);
        assert_eq!(value_exact(&full, &Caps::default()).unwrap().value, Rational::ONE);
        assert_eq!(value_exact(&empty, &Caps::default()).unwrap().value, Rational::ZERO);
        let s = Strategy::constant(3, 2, 2);
        assert_eq!(strategy_value(&full, &s).unwrap(), Rational::ONE);
        assert_eq!(strategy_value(&empty, &s).unwrap(), Rational::ZERO);
        for seed in 0..4 {
            assert_eq!(value_local_search(&full, 3, seed).unwrap().value, Rational::ONE);
            assert_eq!(value_local_search(&empty, 3, seed).unwrap().value, Rational::ZERO);
        }
    }

    #[test]
    fn chsh_strategy_zero_fails_only_edge_one_one() {
        let g = fixtures::chsh();
        let s = Strategy::constant(2, 2, 0);
        assert_eq!(strategy_value(&g, &s).unwrap(), Rational::new(3, 4));
    }

    #[test]
    fn chsh_local_search_finds_optimum() {
        let v = value_local_search(&fixtures::chsh(), 32, 1).unwrap();
        assert_eq!(v.value, Rational::new(3, 4));
        assert_eq!(v.method, ValueMethod::LocalSearchLowerBound);
    }

    #[test]
    fn errors() {
        let g = fixtures::chsh();
        let bad = Strategy::constant(3, 2, 0);
        assert!(matches!(strategy_value(&g, &bad), Err(Error::DimensionMismatch(_))));
        let empty = induced_subgame(&g, &[]).unwrap();
        assert_eq!(empty.size(), 0);
        assert!(matches!(value_exact(&empty, &Caps::default()), Err(Error::EmptyGame)));
        assert!(matches!(value_local_search(&empty, 1, 0), Err(Error::EmptyGame)));
        let tiny = Caps {
            strategy_space: 8,
            ..Caps::default()
        };
        assert!(value_exact(&g, &tiny).unwrap_err().is_cap_exceeded());
        assert!(matches!(induced_subgame(&g, &[4]), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn rectangles() {
        let g = fixtures::chsh();
        let all = rect_subgame(&g, &[0, 1], &[0, 1]).unwrap();
        assert_eq!(all.game.edges(), g.edges());
        let one = rect_subgame(&g, &[0], &[0]).unwrap();
        assert_eq!(one.game.size(), 1);
        assert_eq!(value_exact(&one.game, &Caps::default()).unwrap().value, Rational::ONE);
        assert!(matches!(rect_subgame(&g, &[0], &[]), Err(Error::EmptyRectangle)));
    }

    #[test]
    fn induced_chsh_diagonal() {
        let g = fixtures::chsh();
        // edges are listed (0,0),(0,1),(1,0),(1,1)
        let sub = induced_subgame(&g, &[0, 3]).unwrap();
        assert_eq!(brute_force_value(&sub), Rational::ONE);
        assert_eq!(value_exact(&sub, &Caps::default()).unwrap().value, Rational::ONE);
        assert_eq!(induced_subgame(&g, &[0, 1, 2, 3]).unwrap(), g);
    }

    #[test]
    fn tpg1_round_trip() {
        let g = fixtures::chsh();
        let text = serde_json::to_string(&g).unwrap();
        assert!(text.starts_with(r#"{"format":"tpg-1","alphabet_size":2,"num_x":2,"num_y":2"#));
        let back: Game = serde_json::from_str(&text).unwrap();
        assert_eq!(back, g);
        let bad = text.replace("tpg-1", "tpg-9");
        assert!(serde_json::from_str::<Game>(&bad).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_game() -> impl Strategy<Value = Game> {
            (1usize..=3, 1usize..=3, 1usize..=3, any::<u64>(), 1usize..=7).prop_map(
                |(nx, ny, q, seed, m)| {
                    let mut rng = rng::stream(seed);
                    let edges: Vec<_> = (0..m)
                        .map(|_| {
                            (
                                rng::uniform_below(&mut rng, nx as u64) as usize,
                                rng::uniform_below(&mut rng, ny as u64) as usize,
                            )
                        })
                        .collect();
                    let constraints = edges
                        .iter()
                        .map(|_| PairSet::from_predicate(q, |_, _| rng::coin(&mut rng)))
                        .collect();
                    Game::new(nx, ny, q, edges, constraints).unwrap()
                },
            )
        }

        // `Strategy` here is proptest's trait; the game strategy type is referenced by path.
        use proptest::strategy::Strategy;

        proptest! {
            #[test]
            fn exact_matches_enumeration(g in small_game()) {
                let v = value_exact(&g, &Caps::default()).unwrap();
                prop_assert_eq!(v.value, brute_force_value(&g));
                prop_assert_eq!(strategy_value(&g, &v.witness).unwrap(), v.value);
            }

            #[test]
            fn local_search_is_lower_bound(g in small_game(), seed in any::<u64>()) {
                let exact = value_exact(&g, &Caps::default()).unwrap().value;
                let ls = value_local_search(&g, 4, seed).unwrap();
                prop_assert!(ls.value <= exact);
                prop_assert_eq!(strategy_value(&g, &ls.witness).unwrap(), ls.value);
            }

            #[test]
            fn relabeling_preserves_strategy_value(g in small_game(), seed in any::<u64>()) {
                let q = g.alphabet_size();
                let mut rng = rng::stream(seed);
                let perm: Vec<Symbol> = rng::permutation(&mut rng, q).into_iter().map(|a| a as Symbol).collect();
                let s = super::super::Strategy {
                    psi_x: (0..g.num_x()).map(|_| rng::uniform_below(&mut rng, q as u64) as Symbol).collect(),
                    psi_y: (0..g.num_y()).map(|_| rng::uniform_below(&mut rng, q as u64) as Symbol).collect(),
                };
                prop_assert_eq!(
                    strategy_value(&g, &s).unwrap(),
                    strategy_value(&g.relabel_alphabet(&perm), &s.relabel(&perm)).unwrap()
                );
            }

            #[test]
            fn unused_vertices_do_not_change_rect_value(g in small_game()) {
                let xs: Vec<usize> = (0..g.num_x()).collect();
                let ys: Vec<usize> = (0..g.num_y()).collect();
                let used_x: Vec<usize> = g.degrees_x().iter().enumerate().filter(|(_, &d)| d > 0).map(|(i, _)| i).collect();
                let used_y: Vec<usize> = g.degrees_y().iter().enumerate().filter(|(_, &d)| d > 0).map(|(i, _)| i).collect();
                let full = rect_subgame(&g, &xs, &ys).unwrap();
                let trimmed = rect_subgame(&g, &used_x, &used_y).unwrap();
                prop_assert_eq!(
                    value_exact(&full.game, &Caps::default()).unwrap().value,
                    value_exact(&trimmed.game, &Caps::default()).unwrap().value
                );
            }
        }
    }
}
