//! Checks for the four hypotheses of the no-go theorem: regularity and parallel
//! edges, rectangle mixing, the value bound and `(δ, ε)`-fortification.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::game::{rect_subgame, value_exact, value_local_search, Game, Strategy};
use crate::rational::Rational;
use crate::rng;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub regular: bool,
    pub d: Option<usize>,
    pub parallel_count: usize,
    pub parallel_bound: Rational,
    pub pass: bool,
}

/// `Σ_(x,y) max(0, mult(x,y) − 1)`.
pub fn parallel_count(game: &Game) -> usize {
    game.multiplicities().values().map(|&m| m - 1).sum()
}

/// Common degree of every X- and Y-vertex, counted with multiplicity.
pub fn regular_degree(game: &Game) -> Option<usize> {
    let dx = game.degrees_x();
    let d = dx[0];
    let all = dx.iter().chain(&game.degrees_y()).all(|&v| v == d);
    all.then_some(d)
}

/// Regularity plus `parallel_count ≤ eps·|E|`.
pub fn check_regular_parallel(game: &Game, eps: Rational) -> RegularityReport {
    check_regular_parallel_bound(game, eps * Rational::frac(game.size(), 1))
}

/// Regularity plus `parallel_count ≤ bound`.
pub fn check_regular_parallel_bound(game: &Game, bound: Rational) -> RegularityReport {
    let d = regular_degree(game);
    let parallel = parallel_count(game);
    RegularityReport {
        regular: d.is_some(),
        d,
        parallel_count: parallel,
        parallel_bound: bound,
        pass: d.is_some() && Rational::frac(parallel, 1) <= bound,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Sampled checks never certify a pass.
    NotRefuted,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum CheckMode {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixingReport {
    pub mode: CheckMode,
    pub verdict: Verdict,
    pub d: usize,
    pub delta: Rational,
    pub eta: Rational,
    /// `|density − d/|Y|| / (d/|Y|)` at the worst rectangle.
    pub worst_deviation: Rational,
    pub worst_s: Vec<usize>,
    pub worst_t: Vec<usize>,
    pub rectangles_checked: u64,
}

fn min_size(delta: Rational, n: usize) -> usize {
    ((delta * Rational::frac(n, 1)).ceil().max(1)) as usize
}

fn members(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Lexicographic order on `(S, T)` as sorted member lists.
fn lex_cmp(a: (&[usize], &[usize]), b: (&[usize], &[usize])) -> Ordering {
    a.0.cmp(b.0).then_with(|| a.1.cmp(b.1))
}

/// Relative deviation as an unreduced fraction `num / den`.
#[derive(Clone, Copy)]
struct Dev {
    num: i128,
    den: i128,
}

impl Dev {
    fn new(cnt: u64, s: usize, t: usize, d: usize, ny: usize) -> Dev {
        let lhs = cnt as i128 * ny as i128;
        let rhs = d as i128 * (s * t) as i128;
        Dev {
            num: (lhs - rhs).abs(),
            den: rhs,
        }
    }

    fn cmp(&self, other: &Dev) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }

    fn rational(&self) -> Rational {
        Rational::new(self.num as i64, self.den as i64)
    }
}

#[derive(Clone)]
struct WorstRect {
    dev: Dev,
    s: Vec<usize>,
    t: Vec<usize>,
}

fn merge_worst(a: Option<WorstRect>, b: Option<WorstRect>) -> Option<WorstRect> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => match b.dev.cmp(&a.dev) {
            Ordering::Greater => Some(b),
            Ordering::Less => Some(a),
            Ordering::Equal => {
                if lex_cmp((&b.s, &b.t), (&a.s, &a.t)) == Ordering::Less {
                    Some(b)
                } else {
                    Some(a)
                }
            }
        },
    }
}

/// Rectangle mixing: every `S×T` with `|S| ≥ δ|X|`, `|T| ≥ δ|Y|` must have edge
/// density within relative `eta` of `d/|Y|`. Exhaustive when `2^(|X|+|Y|)` fits
/// `caps.rectangles`, otherwise sampled with `sample` and refute-only.
pub fn mixing_check(
    game: &Game,
    delta: Rational,
    eta: Rational,
    caps: &Caps,
    sample: (usize, u64),
) -> Result<MixingReport> {
    let d = regular_degree(game).ok_or(Error::NotRegular)?;
    if d == 0 {
        return Err(Error::EmptyGame);
    }
    let (nx, ny) = (game.num_x(), game.num_y());
    let (ms, mt) = (min_size(delta, nx), min_size(delta, ny));
    let exhaustive = nx + ny < 63 && (1u64 << (nx + ny)) <= caps.rectangles;

    let (worst, checked, mode) = if exhaustive {
        let edges = game.edges();
        let scan = |smask: u64| -> (Option<WorstRect>, u64) {
            let ssize = smask.count_ones() as usize;
            if ssize < ms {
                return (None, 0);
            }
            let mut col = vec![0u64; ny];
            for &(x, y) in edges {
                if smask >> x & 1 == 1 {
                    col[y] += 1;
                }
            }
            let mut sums = vec![0u64; 1 << ny];
            let mut best: Option<WorstRect> = None;
            let mut checked = 0;
            for tmask in 1u64..(1 << ny) {
                let low = tmask.trailing_zeros() as usize;
                sums[tmask as usize] = sums[(tmask & (tmask - 1)) as usize] + col[low];
                let tsize = tmask.count_ones() as usize;
                if tsize < mt {
                    continue;
                }
                checked += 1;
                let dev = Dev::new(sums[tmask as usize], ssize, tsize, d, ny);
                let better = match &best {
                    None => true,
                    Some(b) => match dev.cmp(&b.dev) {
                        Ordering::Greater => true,
                        Ordering::Less => false,
                        Ordering::Equal => {
                            let t = members(tmask, ny);
                            t < b.t
                        }
                    },
                };
                if better {
                    best = Some(WorstRect {
                        dev,
                        s: members(smask, nx),
                        t: members(tmask, ny),
                    });
                }
            }
            (best, checked)
        };
        let (w, c) = (1u64..(1 << nx))
            .into_par_iter()
            .map(scan)
            .reduce(|| (None, 0), |a, b| (merge_worst(a.0, b.0), a.1 + b.1));
        (w, c, CheckMode::Exhaustive)
    } else {
        let (samples, seed) = sample;
        let samples = if ms > nx || mt > ny { 0 } else { samples };
        let mut best = None;
        for i in 0..samples {
            let mut r = rng::derived_stream(seed, &[i as u64]);
            let s = random_subset(&mut r, nx, ms);
            let t = random_subset(&mut r, ny, mt);
            let cnt = game
                .edges()
                .iter()
                .filter(|&&(x, y)| s.binary_search(&x).is_ok() && t.binary_search(&y).is_ok())
                .count() as u64;
            let dev = Dev::new(cnt, s.len(), t.len(), d, ny);
            best = merge_worst(best, Some(WorstRect { dev, s, t }));
        }
        (best, samples as u64, CheckMode::Sampled { samples, seed })
    };

    let (dev, s, t) = match worst {
        Some(w) => (w.dev.rational(), w.s, w.t),
        None => (Rational::ZERO, Vec::new(), Vec::new()),
    };
    let within = dev <= eta;
    let verdict = match (within, exhaustive) {
        (false, _) => Verdict::Fail,
        (true, true) => Verdict::Pass,
        (true, false) => Verdict::NotRefuted,
    };
    Ok(MixingReport {
        mode,
        verdict,
        d,
        delta,
        eta,
        worst_deviation: dev,
        worst_s: s,
        worst_t: t,
        rectangles_checked: checked,
    })
}

fn random_subset(r: &mut rng::Stream, n: usize, min: usize) -> Vec<usize> {
    let size = min + rng::uniform_below(r, (n - min + 1) as u64) as usize;
    rng::sample_subset(r, n, size)
}

/// A rectangle, its exact value and a strategy on it attaining that value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectWitness {
    pub s: Vec<usize>,
    pub t: Vec<usize>,
    pub value: Rational,
    /// Indexed by position in `s` and `t`.
    pub strategy: Strategy,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FortifyReport {
    pub mode: CheckMode,
    pub verdict: Verdict,
    pub delta: Rational,
    pub eps: Rational,
    pub val_g: Rational,
    /// `val(G) + eps`.
    pub threshold: Rational,
    /// Highest-value rectangle seen (lexicographically smallest among ties).
    pub worst: Option<RectWitness>,
    pub rectangles_checked: u64,
    pub edgeless_skipped: u64,
}

/// Recomputes the value of a witness rectangle from scratch and checks that its
/// strategy attains it. Returns the recomputed value.
pub fn recheck_witness(game: &Game, w: &RectWitness, caps: &Caps) -> Result<Rational> {
    let sub = rect_subgame(game, &w.s, &w.t)?;
    let v = value_exact(&sub.game, caps)?;
    let achieved = crate::game::strategy_value(&sub.game, &w.strategy)?;
    if achieved != v.value {
        return Err(Error::InvalidParameter(format!(
            "witness strategy attains {achieved}, rectangle value is {}",
            v.value
        )));
    }
    Ok(v.value)
}

fn better_witness(a: Option<RectWitness>, b: Option<RectWitness>) -> Option<RectWitness> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => match b.value.cmp(&a.value) {
            Ordering::Greater => Some(b),
            Ordering::Less => Some(a),
            Ordering::Equal => {
                if lex_cmp((&b.s, &b.t), (&a.s, &a.t)) == Ordering::Less {
                    Some(b)
                } else {
                    Some(a)
                }
            }
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FortifyMode {
    Exact,
    Sampled { samples: usize, seed: u64 },
}

/// `(δ, ε)`-fortification: every rectangle with `|S| ≥ δ|X|`, `|T| ≥ δ|Y|` and at
/// least one edge has value at most `val(G) + ε`. Edgeless rectangles are skipped.
pub fn fortification_check(
    game: &Game,
    delta: Rational,
    eps: Rational,
    mode: FortifyMode,
    caps: &Caps,
) -> Result<FortifyReport> {
    let val_g = value_exact(game, caps)?.value;
    fortification_check_with_value(game, val_g, delta, eps, mode, caps)
}

/// As [`fortification_check`] with `val(G)` supplied by the caller.
pub fn fortification_check_with_value(
    game: &Game,
    val_g: Rational,
    delta: Rational,
    eps: Rational,
    mode: FortifyMode,
    caps: &Caps,
) -> Result<FortifyReport> {
    let (nx, ny) = (game.num_x(), game.num_y());
    let (ms, mt) = (min_size(delta, nx), min_size(delta, ny));
    let threshold = val_g + eps;

    let rect_value = |s: Vec<usize>, t: Vec<usize>| -> Result<Option<RectWitness>> {
        match rect_subgame(game, &s, &t) {
            Err(Error::EmptyRectangle) => Ok(None),
            Err(e) => Err(e),
            Ok(sub) => {
                let v = value_exact(&sub.game, caps)?;
                Ok(Some(RectWitness {
                    s,
                    t,
                    value: v.value,
                    strategy: v.witness,
                }))
            }
        }
    };

    let (worst, checked, skipped, report_mode) = match mode {
        FortifyMode::Exact => {
            if nx + ny >= 63 || (1u64 << (nx + ny)) > caps.rectangles {
                return Err(Error::space(
                    "fortification rectangles",
                    (nx + ny) as f64,
                    caps.rectangles,
                ));
            }
            let per_s = |smask: u64| -> Result<(Option<RectWitness>, u64, u64)> {
                let s = members(smask, nx);
                if s.len() < ms {
                    return Ok((None, 0, 0));
                }
                let mut best = None;
                let (mut checked, mut skipped) = (0, 0);
                for tmask in 1u64..(1 << ny) {
                    if (tmask.count_ones() as usize) < mt {
                        continue;
                    }
                    match rect_value(s.clone(), members(tmask, ny))? {
                        None => skipped += 1,
                        Some(w) => {
                            checked += 1;
                            best = better_witness(best, Some(w));
                        }
                    }
                }
                Ok((best, checked, skipped))
            };
            let (w, c, k) = (1u64..(1 << nx))
                .into_par_iter()
                .map(per_s)
                .try_reduce(
                    || (None, 0, 0),
                    |a, b| Ok((better_witness(a.0, b.0), a.1 + b.1, a.2 + b.2)),
                )?;
            (w, c, k, CheckMode::Exhaustive)
        }
        FortifyMode::Sampled { samples, seed } => {
            let samples = if ms > nx || mt > ny { 0 } else { samples };
            let mut best = None;
            let (mut checked, mut skipped) = (0, 0);
            for i in 0..samples {
                let mut r = rng::derived_stream(seed, &[i as u64]);
                let s = random_subset(&mut r, nx, ms);
                let t = random_subset(&mut r, ny, mt);
                let w = match rect_subgame(game, &s, &t) {
                    Err(Error::EmptyRectangle) => None,
                    Err(e) => return Err(e),
                    Ok(sub) => {
                        let v = match value_exact(&sub.game, caps) {
                            Ok(v) => v,
                            Err(e) if e.is_cap_exceeded() => value_local_search(&sub.game, 16, seed ^ i as u64)?,
                            Err(e) => return Err(e),
                        };
                        Some(RectWitness {
                            s,
                            t,
                            value: v.value,
                            strategy: v.witness,
                        })
                    }
                };
                match w {
                    None => skipped += 1,
                    Some(w) => {
                        checked += 1;
                        best = better_witness(best, Some(w));
                    }
                }
            }
            (best, checked, skipped, CheckMode::Sampled { samples, seed })
        }
    };

    let violated = worst.as_ref().is_some_and(|w| w.value > threshold);
    let verdict = match (violated, report_mode) {
        (true, _) => Verdict::Fail,
        (false, CheckMode::Exhaustive) => Verdict::Pass,
        (false, CheckMode::Sampled { .. }) => Verdict::NotRefuted,
    };
    Ok(FortifyReport {
        mode: report_mode,
        verdict,
        delta,
        eps,
        val_g,
        threshold,
        worst,
        rectangles_checked: checked,
        edgeless_skipped: skipped,
    })
}

/// `δ* = 1 / (16 Φ max(1, ⌈log₂Φ⌉²))`; the flag is set when the `max` clamp engaged.
pub fn delta_star(phi: Rational) -> Result<(Rational, bool)> {
    if phi <= Rational::ZERO {
        return Err(Error::InvalidParameter(format!("blowup bound {phi} must be positive")));
    }
    let l = phi.ceil_log2() as i64;
    let clamped = l * l < 1;
    let sq = Rational::from_int((l * l).max(1));
    Ok(((Rational::from_int(16) * phi * sq).recip(), clamped))
}

pub fn check_eps(eps: Rational) -> Result<()> {
    if eps <= Rational::ZERO || eps >= Rational::new(1, 23) {
        return Err(Error::EpsOutOfRange(eps));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueCheck {
    pub val_g: Rational,
    /// `1 − 20ε`.
    pub bound: Rational,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub phi: Rational,
    pub delta: Rational,
    pub log_clamped: bool,
    pub eps: Rational,
    pub regularity: RegularityReport,
    pub mixing: Option<MixingReport>,
    pub value: ValueCheck,
    pub fortification: FortifyReport,
    pub all_pass: bool,
}

/// Runs the four theorem conditions at `(δ*(Φ), eps)`. Mixing is skipped (and
/// counted as failing) when the graph is not regular.
pub fn theorem_hypotheses(game: &Game, phi: Rational, eps: Rational, caps: &Caps) -> Result<HypothesisReport> {
    check_eps(eps)?;
    let (delta, log_clamped) = delta_star(phi)?;
    let regularity = check_regular_parallel(game, eps);
    let mixing = match mixing_check(game, delta, eps, caps, (4096, 0)) {
        Ok(m) => Some(m),
        Err(Error::NotRegular) => None,
        Err(e) => return Err(e),
    };
    let val_g = value_exact(game, caps)?.value;
    let bound = Rational::ONE - Rational::from_int(20) * eps;
    let value = ValueCheck {
        val_g,
        bound,
        pass: val_g <= bound,
    };
    let fortification = fortification_check_with_value(game, val_g, delta, eps, FortifyMode::Exact, caps)?;
    let all_pass = regularity.pass
        && mixing.as_ref().is_some_and(|m| m.verdict.passed())
        && value.pass
        && fortification.verdict.passed();
    Ok(HypothesisReport {
        phi,
        delta,
        log_clamped,
        eps,
        regularity,
        mixing,
        value,
        fortification,
        all_pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::game::PairSet;

    #[test]
    fn complete_graph_regular_no_parallel() {
        let g = fixtures::uniform_game(3, 4, 2, true);
        let r = check_regular_parallel(&g, Rational::ZERO);
        // 3×4 complete: X-degree 4, Y-degree 3, so not regular in the common-degree sense.
        assert!(!r.regular);
        let g = fixtures::uniform_game(4, 4, 2, true);
        let r = check_regular_parallel(&g, Rational::ZERO);
        assert_eq!((r.regular, r.d, r.parallel_count, r.pass), (true, Some(4), 0, true));
    }

    #[test]
    fn triplicated_edge() {
        let c = PairSet::full(2);
        let g = Game::with_uniform_constraint(2, 2, 2, vec![(0, 0), (0, 0), (0, 0), (1, 1)], c).unwrap();
        let r = check_regular_parallel(&g, Rational::ZERO);
        assert_eq!(r.parallel_count, 2);
        assert!(!r.pass);
    }

    #[test]
    fn mixing_examples() {
        let g = fixtures::uniform_game(4, 4, 2, true);
        let m = mixing_check(&g, Rational::new(1, 4), Rational::ZERO, &Caps::default(), (0, 0)).unwrap();
        assert_eq!(m.verdict, Verdict::Pass);
        assert_eq!(m.worst_deviation, Rational::ZERO);
        assert_eq!(m.worst_s, vec![0]);
        assert_eq!(m.worst_t, vec![0]);

        let matching: Vec<_> = (0..4).map(|i| (i, i)).collect();
        let g = Game::with_uniform_constraint(4, 4, 2, matching, PairSet::full(2)).unwrap();
        let m = mixing_check(&g, Rational::new(1, 2), Rational::new(1, 2), &Caps::default(), (0, 0)).unwrap();
        assert_eq!(m.verdict, Verdict::Fail);
        // {0,1}×{0,1} holds 2 of 4 pairs (density 1/2 against 1/4); {0,1}×{2,3} holds none.
        assert_eq!(m.worst_deviation, Rational::ONE);
        assert_eq!((m.worst_s, m.worst_t), (vec![0, 1], vec![0, 1]));
    }

    #[test]
    fn mixing_not_regular() {
        let g = Game::with_uniform_constraint(2, 2, 2, vec![(0, 0)], PairSet::full(2)).unwrap();
        assert!(matches!(
            mixing_check(&g, Rational::ONE, Rational::ONE, &Caps::default(), (0, 0)),
            Err(Error::NotRegular)
        ));
    }

    #[test]
    fn chsh_fortification_witness() {
        let g = fixtures::chsh();
        let r = fortification_check(&g, Rational::new(1, 2), Rational::new(1, 10), FortifyMode::Exact, &Caps::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.val_g, Rational::new(3, 4));
        let w = r.worst.unwrap();
        assert_eq!((w.s.as_slice(), w.t.as_slice()), (&[0][..], &[0][..]));
        assert_eq!(w.value, Rational::ONE);
        assert_eq!(recheck_witness(&g, &w, &Caps::default()).unwrap(), Rational::ONE);
    }

    #[test]
    fn full_game_is_fortified() {
        let g = fixtures::uniform_game(3, 3, 2, true);
        let r = fortification_check(&g, Rational::new(1, 3), Rational::ZERO, FortifyMode::Exact, &Caps::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        let s = fortification_check(&g, Rational::new(1, 3), Rational::ZERO, FortifyMode::Sampled { samples: 20, seed: 3 }, &Caps::default()).unwrap();
        assert_eq!(s.verdict, Verdict::NotRefuted);
    }

    #[test]
    fn edgeless_rectangles_skipped() {
        let g = Game::with_uniform_constraint(2, 2, 2, vec![(0, 0), (1, 1)], PairSet::empty(2)).unwrap();
        let r = fortification_check(&g, Rational::new(1, 2), Rational::ZERO, FortifyMode::Exact, &Caps::default()).unwrap();
        assert_eq!(r.edgeless_skipped, 2);
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn delta_star_values() {
        assert_eq!(delta_star(Rational::from_int(4)).unwrap(), (Rational::new(1, 256), false));
        assert_eq!(delta_star(Rational::ONE).unwrap(), (Rational::new(1, 16), true));
        assert_eq!(delta_star(Rational::from_int(2)).unwrap().0, Rational::new(1, 32));
    }

    #[test]
    fn hypotheses_value_bound() {
        let g = fixtures::uniform_game(2, 2, 2, true);
        let r = theorem_hypotheses(&g, Rational::ONE, Rational::new(1, 32), &Caps::default()).unwrap();
        assert!(!r.value.pass);
        assert!(!r.all_pass);
        assert!(matches!(
            theorem_hypotheses(&g, Rational::ONE, Rational::new(1, 23), &Caps::default()),
            Err(Error::EpsOutOfRange(_))
        ));
        let again = theorem_hypotheses(&g, Rational::ONE, Rational::new(1, 32), &Caps::default()).unwrap();
        assert_eq!(serde_json::to_string(&r).unwrap(), serde_json::to_string(&again).unwrap());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn random_regular_game(t: usize, d: usize, seed: u64) -> Game {
            let edges = crate::randgame::sample_matching_union(t, d, seed);
            let mut r = rng::stream(seed ^ 0xABCD);
            let cs = edges
                .iter()
                .map(|_| PairSet::from_predicate(2, |_, _| rng::coin(&mut r)))
                .collect();
            Game::new(t, t, 2, edges, cs).unwrap()
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn fortification_monotone(seed in any::<u64>(), di in 1i64..4, ei in 0i64..4) {
                let g = random_regular_game(4, 2, seed);
                let caps = Caps::default();
                let (delta, eps) = (Rational::new(di, 4), Rational::new(ei, 8));
                let base = fortification_check(&g, delta, eps, FortifyMode::Exact, &caps).unwrap();
                if base.verdict.passed() {
                    let up = fortification_check(&g, delta + Rational::new(1, 4), eps + Rational::new(1, 8), FortifyMode::Exact, &caps).unwrap();
                    prop_assert!(up.verdict.passed());
                }
                if let Some(w) = &base.worst {
                    prop_assert_eq!(recheck_witness(&g, w, &caps).unwrap(), w.value);
                }
            }

            #[test]
            fn single_vertex_mixing_matches_multiplicity(seed in any::<u64>()) {
                let t = 4;
                let g = random_regular_game(t, 3, seed);
                let m = mixing_check(&g, Rational::new(1, t as i64), Rational::from_int(100), &Caps::default(), (0, 0)).unwrap();
                let mult = g.multiplicities();
                let oracle = (0..t)
                    .flat_map(|x| (0..t).map(move |y| (x, y)))
                    .map(|p| {
                        let c = *mult.get(&p).unwrap_or(&0) as i64;
                        Rational::new((c * t as i64 - 3).abs(), 3)
                    })
                    .max()
                    .unwrap();
                prop_assert!(m.worst_deviation >= oracle);
            }
        }
    }
}
