//! Product-form embeddings of a base game into a repeated game, and the
//! strategies and providers used with them.
//!
//! Rounds are numbered from 1 here, as in `s ∈ [k]`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::game::{value_exact, Game, Symbol};
use crate::rational::Rational;
use crate::repetition::{RepStrategy, RepeatedGame};

/// `Emb(x, y) = (f_X(x), f_Y(y))` with the coordinate `i` it embeds at.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingMap {
    pub f_x: Vec<Vec<usize>>,
    pub f_y: Vec<Vec<usize>>,
    pub i: usize,
}

impl EmbeddingMap {
    pub fn image(&self, game: &Game, e: usize) -> (&[usize], &[usize]) {
        let (x, y) = game.edges()[e];
        (&self.f_x[x], &self.f_y[y])
    }

    pub fn injective(&self) -> bool {
        let distinct = |f: &Vec<Vec<usize>>| {
            let mut v: Vec<&Vec<usize>> = f.iter().collect();
            v.sort();
            v.dedup();
            v.len() == f.len()
        };
        distinct(&self.f_x) && distinct(&self.f_y)
    }
}

/// Validates totality, tuple lengths, ranges and `f_X(x)_i = x`, `f_Y(y)_i = y`.
/// Images need not occur in `H`; such edges simply never win.
pub fn make_embedding(f_x: Vec<Vec<usize>>, f_y: Vec<Vec<usize>>, i: usize, h: &RepeatedGame) -> Result<EmbeddingMap> {
    let g = h.base();
    let k = h.k();
    if i == 0 || i > k {
        return Err(Error::InvalidParameter(format!("coordinate {i} outside [1, {k}]")));
    }
    for (side, f, n) in [('X', &f_x, g.num_x()), ('Y', &f_y, g.num_y())] {
        if f.len() != n {
            return Err(Error::ImageNotInH(format!("f_{side} defined on {} of {n} vertices", f.len())));
        }
        for (v, img) in f.iter().enumerate() {
            if img.len() != k {
                return Err(Error::ImageNotInH(format!(
                    "f_{side}({v}) has {} coordinates, k = {k}",
                    img.len()
                )));
            }
            if img.iter().any(|&c| c >= n) {
                return Err(Error::ImageNotInH(format!("f_{side}({v}) leaves the vertex set")));
            }
            if img[i - 1] != v {
                return Err(Error::CoordinateEmbeddingViolated {
                    side,
                    vertex: v,
                    coordinate: i,
                });
            }
        }
    }
    Ok(EmbeddingMap { f_x, f_y, i })
}

/// Round `s` follows an optimal base strategy from [`value_exact`], every other
/// round answers 0.
pub fn trivial_strategy(h: &RepeatedGame, s: usize, caps: &Caps) -> Result<RepStrategy> {
    let k = h.k();
    if s == 0 || s > k {
        return Err(Error::InvalidParameter(format!("round {s} outside [1, {k}]")));
    }
    let opt = value_exact(h.base(), caps)?.witness;
    let answer = |v: &[usize], psi: &[Symbol]| -> Vec<Symbol> {
        (0..k).map(|c| if c == s - 1 { psi[v[c]] } else { 0 }).collect()
    };
    Ok(RepStrategy::from_fn(
        h,
        |v| answer(v, &opt.psi_x),
        |v| answer(v, &opt.psi_y),
    ))
}

/// Tuple indices of `h` grouped by their question pair.
pub fn question_index(h: &RepeatedGame) -> HashMap<(Vec<usize>, Vec<usize>), Vec<usize>> {
    let mut idx: HashMap<_, Vec<usize>> = HashMap::new();
    for j in 0..h.len() {
        idx.entry(h.questions(j)).or_default().push(j);
    }
    idx
}

/// Per base edge `e`: does `Emb(e)` lie in `W_C`? An image counts when some
/// tuple of `H` asks exactly it, has `e` itself at coordinate `i`, and wins
/// every round of `C` (1-based).
pub fn winning_edges(
    h: &RepeatedGame,
    psi: &RepStrategy,
    c: &[usize],
    emb: &EmbeddingMap,
) -> Result<Vec<bool>> {
    let k = h.k();
    if let Some(&r) = c.iter().find(|&&r| r == 0 || r > k) {
        return Err(Error::InvalidParameter(format!("round {r} outside [1, {k}]")));
    }
    if c.contains(&emb.i) {
        return Err(Error::InvalidParameter(format!("embedding coordinate {} lies in C", emb.i)));
    }
    let coords: Vec<usize> = c.iter().map(|r| r - 1).collect();
    let idx = question_index(h);
    let g = h.base();
    (0..g.size())
        .map(|e| {
            let (fx, fy) = emb.image(g, e);
            let Some(tuples) = idx.get(&(fx.to_vec(), fy.to_vec())) else {
                return Ok(false);
            };
            if coords.is_empty() {
                return Ok(tuples.iter().any(|&j| h.tuple(j)[emb.i - 1] == e));
            }
            let a = psi.answer_x(fx)?;
            let b = psi.answer_y(fy)?;
            Ok(tuples
                .iter()
                .any(|&j| h.tuple(j)[emb.i - 1] == e && h.wins(h.tuple(j), a, b, &coords)))
        })
        .collect()
}

/// `Pr_{e ∈ E}[Emb(e) ∈ W_C]`, exactly.
pub fn robustness_fraction(h: &RepeatedGame, psi: &RepStrategy, c: &[usize], emb: &EmbeddingMap) -> Result<Rational> {
    let wins = winning_edges(h, psi, c, emb)?;
    if wins.is_empty() {
        return Err(Error::EmptyGame);
    }
    Ok(Rational::frac(wins.iter().filter(|&&w| w).count(), wins.len()))
}

/// Ways of choosing `(i, Emb)` for `C = {s}`. The coordinate is always the
/// smallest round other than `s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "provider", rename_all = "kebab-case")]
pub enum EmbProvider {
    /// Every coordinate repeats the base vertex.
    Diagonal,
    /// Round `s` maps `v ↦ plant[v mod |plant|]`, every other round is the identity.
    Planted { plant_x: Vec<usize>, plant_y: Vec<usize> },
    /// A fixed map read from JSON.
    Explicit { f_x: Vec<Vec<usize>>, f_y: Vec<Vec<usize>>, i: usize },
}

impl EmbProvider {
    pub fn provide(&self, h: &RepeatedGame, s: usize) -> Result<EmbeddingMap> {
        let g = h.base();
        let k = h.k();
        let i = (1..=k)
            .find(|&r| r != s)
            .ok_or_else(|| Error::InvalidParameter("no coordinate outside C = {s}; need k ≥ 2".into()))?;
        match self {
            EmbProvider::Diagonal => make_embedding(
                (0..g.num_x()).map(|x| vec![x; k]).collect(),
                (0..g.num_y()).map(|y| vec![y; k]).collect(),
                i,
                h,
            ),
            EmbProvider::Planted { plant_x, plant_y } => {
                if plant_x.is_empty() || plant_y.is_empty() {
                    return Err(Error::InvalidParameter("empty plant".into()));
                }
                let f = |n: usize, plant: &[usize]| -> Vec<Vec<usize>> {
                    (0..n)
                        .map(|v| (1..=k).map(|r| if r == s { plant[v % plant.len()] } else { v }).collect())
                        .collect()
                };
                make_embedding(f(g.num_x(), plant_x), f(g.num_y(), plant_y), i, h)
            }
            EmbProvider::Explicit { f_x, f_y, i } => make_embedding(f_x.clone(), f_y.clone(), *i, h),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::repetition::{full_power, winning_set};

    #[test]
    fn embedding_validation() {
        let g = fixtures::chsh();
        let h = full_power(&g, 2, &Caps::default()).unwrap();
        let fx = vec![vec![0, 0], vec![1, 0]];
        let fy = vec![vec![0, 1], vec![1, 1]];
        assert!(make_embedding(fx.clone(), fy.clone(), 1, &h).is_ok());
        assert!(matches!(
            make_embedding(fx.clone(), fy.clone(), 2, &h),
            Err(Error::CoordinateEmbeddingViolated { side: 'X', vertex: 1, coordinate: 2 })
        ));
        assert!(matches!(
            make_embedding(vec![vec![0, 0]], fy, 1, &h),
            Err(Error::ImageNotInH(_))
        ));
        let h1 = full_power(&g, 1, &Caps::default()).unwrap();
        assert!(make_embedding(vec![vec![0], vec![1]], vec![vec![0], vec![1]], 1, &h1).is_ok());
    }

    #[test]
    fn trivial_strategy_counts() {
        let g = fixtures::chsh();
        let h = full_power(&g, 2, &Caps::default()).unwrap();
        let psi = trivial_strategy(&h, 1, &Caps::default()).unwrap();
        assert_eq!(winning_set(&h, &psi, &[0]).unwrap().len(), 12);
        let full = fixtures::uniform_game(2, 2, 2, true);
        let hf = full_power(&full, 2, &Caps::default()).unwrap();
        let pf = trivial_strategy(&hf, 2, &Caps::default()).unwrap();
        assert_eq!(winning_set(&hf, &pf, &[1]).unwrap().len(), hf.len());
        let h1 = full_power(&g, 1, &Caps::default()).unwrap();
        let p1 = trivial_strategy(&h1, 1, &Caps::default()).unwrap();
        let opt = value_exact(&g, &Caps::default()).unwrap().witness;
        for x in 0..2 {
            assert_eq!(p1.answer_x(&[x]).unwrap(), &[opt.psi_x[x]]);
        }
    }

    #[test]
    fn diagonal_fraction_is_value() {
        let g = fixtures::chsh();
        let h = full_power(&g, 2, &Caps::default()).unwrap();
        let psi = trivial_strategy(&h, 1, &Caps::default()).unwrap();
        let emb = EmbProvider::Diagonal.provide(&h, 1).unwrap();
        assert_eq!(emb.i, 2);
        assert_eq!(robustness_fraction(&h, &psi, &[1], &emb).unwrap(), Rational::new(3, 4));
        assert_eq!(robustness_fraction(&h, &psi, &[], &emb).unwrap(), Rational::ONE);
        assert!(robustness_fraction(&h, &psi, &[2], &emb).is_err());
        let full = fixtures::uniform_game(2, 2, 2, true);
        let hf = full_power(&full, 2, &Caps::default()).unwrap();
        let pf = trivial_strategy(&hf, 1, &Caps::default()).unwrap();
        let ef = EmbProvider::Diagonal.provide(&hf, 1).unwrap();
        assert_eq!(robustness_fraction(&hf, &pf, &[1], &ef).unwrap(), Rational::ONE);
    }

    #[test]
    fn planted_provider() {
        let g = fixtures::plant8();
        let h = full_power(&g, 2, &Caps::default()).unwrap();
        let p = EmbProvider::Planted {
            plant_x: vec![0, 1],
            plant_y: vec![0, 1],
        };
        let emb = p.provide(&h, 1).unwrap();
        assert_eq!(emb.f_x[5], vec![1, 5]);
        assert_eq!(emb.i, 2);
        let psi = trivial_strategy(&h, 1, &Caps::default()).unwrap();
        assert_eq!(robustness_fraction(&h, &psi, &[1], &emb).unwrap(), Rational::ONE);
        let h1 = full_power(&g, 1, &Caps::default()).unwrap();
        assert!(p.provide(&h1, 1).is_err());
    }
}
