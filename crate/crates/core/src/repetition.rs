//! Repeated games `H ⊆ G^k` stored as tuples of base-edge indices.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::caps::{log2_pow, pow_within, Caps};
use crate::error::{Error, Result};
use crate::game::{Game, Strategy, Symbol};
use crate::rational::Rational;
use crate::rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepeatedGame {
    base: Game,
    k: usize,
    /// Row-major `len × k` edge indices.
    flat: Vec<usize>,
}

impl RepeatedGame {
    pub fn new(base: Game, k: usize, tuples: Vec<Vec<usize>>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidSpec("k must be at least 1".into()));
        }
        let m = base.size();
        let mut flat = Vec::with_capacity(tuples.len() * k);
        for (j, t) in tuples.iter().enumerate() {
            if t.len() != k {
                return Err(Error::InvalidSpec(format!("tuple {j} has length {} != k = {k}", t.len())));
            }
            if let Some(&e) = t.iter().find(|&&e| e >= m) {
                return Err(Error::InvalidSpec(format!("tuple {j} names edge {e} of {m}")));
            }
            flat.extend_from_slice(t);
        }
        Ok(RepeatedGame { base, k, flat })
    }

    pub fn base(&self) -> &Game {
        &self.base
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `|H|`.
    pub fn len(&self) -> usize {
        self.flat.len() / self.k
    }

    pub fn is_empty(&self) -> bool {
        self.flat.is_empty()
    }

    pub fn tuple(&self, j: usize) -> &[usize] {
        &self.flat[j * self.k..(j + 1) * self.k]
    }

    pub fn tuples(&self) -> impl Iterator<Item = &[usize]> {
        self.flat.chunks_exact(self.k)
    }

    /// Question vectors `(x̄, ȳ)` of tuple `j`.
    pub fn questions(&self, j: usize) -> (Vec<usize>, Vec<usize>) {
        self.tuple_questions(self.tuple(j))
    }

    pub fn tuple_questions(&self, t: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let edges = self.base.edges();
        t.iter().map(|&e| edges[e]).unzip()
    }

    /// Repeated X-vertices occurring in some tuple, sorted.
    pub fn realized_x(&self) -> BTreeSet<Vec<usize>> {
        (0..self.len()).map(|j| self.questions(j).0).collect()
    }

    pub fn realized_y(&self) -> BTreeSet<Vec<usize>> {
        (0..self.len()).map(|j| self.questions(j).1).collect()
    }

    /// Does tuple `t` win every round in `coords` under answers `a`, `b`?
    pub fn wins(&self, t: &[usize], a: &[Symbol], b: &[Symbol], coords: &[usize]) -> bool {
        coords
            .iter()
            .all(|&i| self.base.constraint(t[i]).contains(a[i], b[i]))
    }
}

/// `G^k`, all tuples in lexicographic order.
pub fn full_power(game: &Game, k: usize, caps: &Caps) -> Result<RepeatedGame> {
    if k == 0 {
        return Err(Error::InvalidSpec("k must be at least 1".into()));
    }
    let m = game.size();
    if !pow_within(m, k, caps.full_power) {
        return Err(Error::space("full_power tuple count", log2_pow(m, k), caps.full_power));
    }
    let count = m.pow(k as u32);
    let mut flat = Vec::with_capacity(count * k);
    let mut t = vec![0usize; k];
    for _ in 0..count {
        flat.extend_from_slice(&t);
        for slot in t.iter_mut().rev() {
            *slot += 1;
            if *slot < m {
                break;
            }
            *slot = 0;
        }
    }
    Ok(RepeatedGame {
        base: game.clone(),
        k,
        flat,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "kebab-case")]
pub enum SchemeSpec {
    FullProduct,
    /// `z` copies of `{(e, π_2(e), …, π_k(e))}`, one fresh set of seeded
    /// permutations per copy; `identity` forces every permutation to be the identity.
    PermutationUnion {
        copies: usize,
        seed: u64,
        #[serde(default)]
        identity: bool,
    },
    Explicit { tuples: Vec<Vec<usize>> },
}

pub fn apply_scheme(game: &Game, spec: &SchemeSpec, k: usize, caps: &Caps) -> Result<RepeatedGame> {
    match spec {
        SchemeSpec::FullProduct => full_power(game, k, caps),
        SchemeSpec::Explicit { tuples } => RepeatedGame::new(game.clone(), k, tuples.clone()),
        &SchemeSpec::PermutationUnion { copies, seed, identity } => {
            if k == 0 {
                return Err(Error::InvalidSpec("k must be at least 1".into()));
            }
            if copies == 0 {
                return Err(Error::InvalidSpec("permutation-union needs at least one copy".into()));
            }
            let m = game.size();
            let total = copies as u128 * m as u128;
            if total > caps.full_power as u128 {
                return Err(Error::space(
                    "permutation-union tuple count",
                    (total as f64).log2(),
                    caps.full_power,
                ));
            }
            let mut flat = Vec::with_capacity(total as usize * k);
            for c in 0..copies {
                let perms: Vec<Vec<usize>> = (1..k)
                    .map(|j| {
                        if identity {
                            (0..m).collect()
                        } else {
                            rng::permutation(&mut rng::derived_stream(seed, &[c as u64, j as u64]), m)
                        }
                    })
                    .collect();
                for e in 0..m {
                    flat.push(e);
                    flat.extend(perms.iter().map(|p| p[e]));
                }
            }
            Ok(RepeatedGame {
                base: game.clone(),
                k,
                flat,
            })
        }
    }
}

/// `z = |H| / |G|`.
pub fn blowup(h: &RepeatedGame) -> Result<Rational> {
    if h.base.size() == 0 {
        return Err(Error::EmptyGame);
    }
    Ok(Rational::frac(h.len(), h.base.size()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarginalOffender {
    /// 1-based.
    pub coordinate: usize,
    pub edge: usize,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarginalsReport {
    pub pass: bool,
    pub z: Rational,
    /// `counts[j][e]`: tuples whose coordinate `j` is edge `e`.
    pub counts: Vec<Vec<usize>>,
    pub offenders: Vec<MarginalOffender>,
}

pub fn uniform_marginals_check(h: &RepeatedGame) -> Result<MarginalsReport> {
    let z = blowup(h)?;
    let m = h.base.size();
    let mut counts = vec![vec![0usize; m]; h.k];
    for t in h.tuples() {
        for (j, &e) in t.iter().enumerate() {
            counts[j][e] += 1;
        }
    }
    let mut offenders = Vec::new();
    for (j, row) in counts.iter().enumerate() {
        for (e, &c) in row.iter().enumerate() {
            if Rational::frac(c, 1) != z {
                offenders.push(MarginalOffender {
                    coordinate: j + 1,
                    edge: e,
                    count: c,
                });
            }
        }
    }
    Ok(MarginalsReport {
        pass: offenders.is_empty(),
        z,
        counts,
        offenders,
    })
}

/// Answers of a repeated-game strategy on the vertices it is defined on.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RepStrategy {
    pub x: BTreeMap<Vec<usize>, Vec<Symbol>>,
    pub y: BTreeMap<Vec<usize>, Vec<Symbol>>,
}

fn vertex_name(v: &[usize]) -> String {
    v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

impl RepStrategy {
    /// Builds answers for every realized vertex of `h` from per-vertex rules.
    pub fn from_fn(
        h: &RepeatedGame,
        mut fx: impl FnMut(&[usize]) -> Vec<Symbol>,
        mut fy: impl FnMut(&[usize]) -> Vec<Symbol>,
    ) -> Self {
        RepStrategy {
            x: h.realized_x().into_iter().map(|v| {
                let a = fx(&v);
                (v, a)
            }).collect(),
            y: h.realized_y().into_iter().map(|v| {
                let b = fy(&v);
                (v, b)
            }).collect(),
        }
    }

    /// Plays the base strategy `s` independently in every coordinate.
    pub fn product(h: &RepeatedGame, s: &Strategy) -> Self {
        RepStrategy::from_fn(
            h,
            |v| v.iter().map(|&x| s.psi_x[x]).collect(),
            |v| v.iter().map(|&y| s.psi_y[y]).collect(),
        )
    }

    pub fn answer_x(&self, v: &[usize]) -> Result<&[Symbol]> {
        self.x
            .get(v)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UndefinedVertex(format!("x({})", vertex_name(v))))
    }

    pub fn answer_y(&self, v: &[usize]) -> Result<&[Symbol]> {
        self.y
            .get(v)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UndefinedVertex(format!("y({})", vertex_name(v))))
    }
}

#[derive(Serialize, Deserialize)]
struct RepStrategyFile {
    psi_x: BTreeMap<String, Vec<Symbol>>,
    psi_y: BTreeMap<String, Vec<Symbol>>,
}

fn parse_vertex(s: &str) -> std::result::Result<Vec<usize>, String> {
    s.split(',')
        .map(|c| c.trim().parse().map_err(|_| format!("bad vertex key {s:?}")))
        .collect()
}

impl Serialize for RepStrategy {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let conv = |m: &BTreeMap<Vec<usize>, Vec<Symbol>>| {
            m.iter().map(|(k, v)| (vertex_name(k), v.clone())).collect()
        };
        RepStrategyFile {
            psi_x: conv(&self.x),
            psi_y: conv(&self.y),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RepStrategy {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let f = RepStrategyFile::deserialize(deserializer)?;
        let conv = |m: BTreeMap<String, Vec<Symbol>>| {
            m.into_iter()
                .map(|(k, v)| parse_vertex(&k).map(|k| (k, v)))
                .collect::<std::result::Result<BTreeMap<_, _>, _>>()
        };
        Ok(RepStrategy {
            x: conv(f.psi_x).map_err(D::Error::custom)?,
            y: conv(f.psi_y).map_err(D::Error::custom)?,
        })
    }
}

/// Indices of the tuples on which `psi` wins every round in `coords` (0-based).
pub fn winning_set(h: &RepeatedGame, psi: &RepStrategy, coords: &[usize]) -> Result<Vec<usize>> {
    if let Some(&c) = coords.iter().find(|&&c| c >= h.k) {
        return Err(Error::IndexOutOfRange { index: c, len: h.k });
    }
    let mut out = Vec::new();
    for j in 0..h.len() {
        let t = h.tuple(j);
        let (xs, ys) = h.tuple_questions(t);
        let a = psi.answer_x(&xs)?;
        let b = psi.answer_y(&ys)?;
        if a.len() != h.k || b.len() != h.k {
            return Err(Error::DimensionMismatch(format!(
                "answer vectors must have length k = {}",
                h.k
            )));
        }
        if h.wins(t, a, b, coords) {
            out.push(j);
        }
    }
    Ok(out)
}

pub const REPEATED_FORMAT: &str = "tpg-rep-1";

#[derive(Serialize, Deserialize)]
struct RepeatedFile {
    format: String,
    base: serde_json::Value,
    k: usize,
    tuples: Vec<Vec<usize>>,
}

impl Serialize for RepeatedGame {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::Error as _;
        RepeatedFile {
            format: REPEATED_FORMAT.into(),
            base: serde_json::to_value(&self.base).map_err(S::Error::custom)?,
            k: self.k,
            tuples: self.tuples().map(<[usize]>::to_vec).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RepeatedGame {
    /// `base` is either an inline tpg-1 object or a path to one.
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let f = RepeatedFile::deserialize(deserializer)?;
        if f.format != REPEATED_FORMAT {
            return Err(D::Error::custom(format!(
                "expected format {REPEATED_FORMAT:?}, got {:?}",
                f.format
            )));
        }
        let base: Game = match f.base {
            serde_json::Value::String(path) => {
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| D::Error::custom(format!("{path}: {e}")))?;
                serde_json::from_str(&text).map_err(D::Error::custom)?
            }
            v => serde_json::from_value(v).map_err(D::Error::custom)?,
        };
        RepeatedGame::new(base, f.k, f.tuples).map_err(D::Error::custom)
    }
}
