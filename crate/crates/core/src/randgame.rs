//! Random games on unions of perfect matchings, and checks of the properties
//! such games have with high probability.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::fortify::{
    check_regular_parallel_bound, fortification_check_with_value, mixing_check, FortifyMode,
    FortifyReport, MixingReport, RegularityReport,
};
use crate::game::{value_exact, Game, PairSet, Symbol};
use crate::rational::Rational;
use crate::rng;

const MATCHING: u64 = 0;
const CONSTRAINT: u64 = 1;

/// Multiset union of `d` seeded uniformly random perfect matchings of `[t]×[t]`,
/// matching-major: entry `j·t + x` is `(x, σ_j(x))`.
pub fn sample_matching_union(t: usize, d: usize, seed: u64) -> Vec<(usize, usize)> {
    let mut edges = Vec::with_capacity(t * d);
    for j in 0..d {
        let perm = rng::permutation(&mut rng::derived_stream(seed, &[MATCHING, j as u64]), t);
        edges.extend(perm.into_iter().enumerate());
    }
    edges
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomGameParams {
    pub t: usize,
    pub d: usize,
    pub alphabet_size: usize,
    pub beta: Rational,
    pub eta: Rational,
    pub delta: Rational,
    pub seed: u64,
}

impl RandomGameParams {
    pub fn with_seed(&self, seed: u64) -> Self {
        RandomGameParams { seed, ..self.clone() }
    }

    /// Number of allowed pairs per constraint, `round(β|Σ|²)`.
    pub fn pairs_per_constraint(&self) -> Result<usize> {
        if self.beta < Rational::ZERO || self.beta > Rational::ONE {
            return Err(Error::InvalidDensity(self.beta));
        }
        let q2 = (self.alphabet_size * self.alphabet_size) as i64;
        Ok((self.beta * Rational::from_int(q2)).round_half_up() as usize)
    }
}

pub fn sample_random_game(p: &RandomGameParams) -> Result<Game> {
    if p.t == 0 || p.d == 0 || p.alphabet_size == 0 {
        return Err(Error::InvalidParameter("t, d and alphabet size must be positive".into()));
    }
    let count = p.pairs_per_constraint()?;
    let q = p.alphabet_size;
    let edges = sample_matching_union(p.t, p.d, p.seed);
    let constraints = (0..edges.len())
        .map(|e| {
            let mut r = rng::derived_stream(p.seed, &[CONSTRAINT, e as u64]);
            let pick = rng::sample_subset(&mut r, q * q, count);
            PairSet::from_pairs(q, pick.into_iter().map(|i| ((i / q) as Symbol, (i % q) as Symbol)))
        })
        .collect::<Result<Vec<_>>>()?;
    Game::new(p.t, p.t, q, edges, constraints)
}

/// Where the parameters sit relative to the lemma's hypotheses. Reported, never enforced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Preconditions {
    /// `0 < β < 1/2`.
    pub beta_in_range: bool,
    /// `4(1 + ln|Σ|) / (η²δ²)`.
    pub d_required: f64,
    pub d_ok: bool,
}

pub fn lemma_preconditions(p: &RandomGameParams) -> Preconditions {
    let (eta, delta) = (p.eta.to_f64(), p.delta.to_f64());
    let d_required = 4.0 * (1.0 + (p.alphabet_size as f64).ln()) / (eta * eta * delta * delta);
    Preconditions {
        beta_in_range: p.beta > Rational::ZERO && p.beta < Rational::new(1, 2),
        d_required,
        d_ok: (p.d as f64) > d_required,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueBound {
    pub val_g: Rational,
    /// `β + η`.
    pub bound: Rational,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomGameReport {
    pub preconditions: Preconditions,
    /// Property 1: regular with at most `200d²` parallel edges.
    pub regularity: RegularityReport,
    /// Property 2: mixing at `(δ, η)`.
    pub mixing: MixingReport,
    /// Property 3: `val(G) ≤ β + η`.
    pub value: ValueBound,
    /// Property 4: `(δ, 2η)`-fortified.
    pub fortification: FortifyReport,
    pub all_pass: bool,
}

pub fn verify_random_game(game: &Game, p: &RandomGameParams, caps: &Caps) -> Result<RandomGameReport> {
    let bound = Rational::from_int(200 * (p.d * p.d) as i64);
    let regularity = check_regular_parallel_bound(game, bound);
    let mixing = mixing_check(game, p.delta, p.eta, caps, (4096, p.seed))?;
    let val_g = value_exact(game, caps)?.value;
    let value = ValueBound {
        val_g,
        bound: p.beta + p.eta,
        pass: val_g <= p.beta + p.eta,
    };
    let two_eta = p.eta + p.eta;
    let fortification = fortification_check_with_value(game, val_g, p.delta, two_eta, FortifyMode::Exact, caps)?;
    let all_pass = regularity.pass
        && mixing.verdict.passed()
        && value.pass
        && fortification.verdict.passed();
    Ok(RandomGameReport {
        preconditions: lemma_preconditions(p),
        regularity,
        mixing,
        value,
        fortification,
        all_pass,
    })
}

/// One JSONL line of a random-game campaign.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomTrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub regular: bool,
    pub mixing: bool,
    pub value_bound: bool,
    pub fortified: bool,
    pub value: Rational,
    pub worst_deviation: Rational,
}

/// Trial `i` of a campaign uses `derive_seed(master, [i])`.
pub fn random_game_trial(p: &RandomGameParams, master: u64, trial: usize, caps: &Caps) -> Result<RandomTrialRecord> {
    let seed = rng::derive_seed(master, &[trial as u64]);
    let p = p.with_seed(seed);
    let g = sample_random_game(&p)?;
    let r = verify_random_game(&g, &p, caps)?;
    Ok(RandomTrialRecord {
        trial,
        seed,
        regular: r.regularity.pass,
        mixing: r.mixing.verdict.passed(),
        value_bound: r.value.pass,
        fortified: r.fortification.verdict.passed(),
        value: r.value.val_g,
        worst_deviation: r.mixing.worst_deviation,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConcentrationTrial {
    pub trial: usize,
    pub seed: u64,
    /// Edge entries of the matching union that land in `Z`.
    pub hits: usize,
    pub violated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub t: usize,
    pub d: usize,
    pub z_size: usize,
    pub mu: Rational,
    pub rho: Rational,
    pub trials: usize,
    pub violations: usize,
    pub empirical_violation_rate: Rational,
    /// `μ = 0`: the bound says nothing.
    pub degenerate: bool,
    /// `ρ²μ²dt`, the exponent in the tail bound (up to its constant).
    pub exponent: f64,
    pub records: Vec<ConcentrationTrial>,
}

/// How often `||⋃M^j ∩ Z| − μdt| > ρμdt` over independent matching unions.
pub fn concentration_experiment(
    t: usize,
    d: usize,
    z: &[(usize, usize)],
    rho: Rational,
    trials: usize,
    seed: u64,
) -> Result<ConcentrationReport> {
    if t == 0 || d == 0 {
        return Err(Error::InvalidParameter("t and d must be positive".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let mut member = vec![false; t * t];
    for &(x, y) in z {
        if x >= t || y >= t {
            return Err(Error::IndexOutOfRange { index: x.max(y), len: t });
        }
        member[x * t + y] = true;
    }
    let z_size = member.iter().filter(|&&m| m).count();
    let mu = Rational::frac(z_size, t * t);
    let expected = mu * Rational::frac(d * t, 1);
    let slack = rho * expected;
    let records: Vec<ConcentrationTrial> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let s = rng::derive_seed(seed, &[trial as u64]);
            let hits = sample_matching_union(t, d, s)
                .into_iter()
                .filter(|&(x, y)| member[x * t + y])
                .count();
            let violated = (Rational::frac(hits, 1) - expected).abs() > slack;
            ConcentrationTrial {
                trial,
                seed: s,
                hits,
                violated,
            }
        })
        .collect();
    let violations = records.iter().filter(|r| r.violated).count();
    let (r, m) = (rho.to_f64(), mu.to_f64());
    Ok(ConcentrationReport {
        t,
        d,
        z_size,
        mu,
        rho,
        trials,
        violations,
        empirical_violation_rate: Rational::frac(violations, trials),
        degenerate: z_size == 0,
        exponent: r * r * m * m * (d * t) as f64,
        records,
    })
}

/// The top-left `⌈t/2⌉ × ⌈t/2⌉` block, `μ = 1/4` for even `t`.
pub fn quarter_block(t: usize) -> Vec<(usize, usize)> {
    let h = t.div_ceil(2);
    (0..h).flat_map(|x| (0..h).map(move |y| (x, y))).collect()
}
