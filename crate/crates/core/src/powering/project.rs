//! Reading a strategy of `G′` back out of a super-labeling of the powered
//! composed graph.
//!
//! A gadget counts as satisfied when its representative's super-label
//! satisfies every gadget constraint and agrees with each block triple's own
//! claim about itself. The decoded strategy reads every block from its own
//! claims and decodes to the nearest codeword, so it does not depend on which
//! gadget is looked at.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::game::{strategy_value, value_exact, Strategy, Symbol};
use crate::rational::Rational;
use crate::rng;

use super::compose::ComposedGraph;
use super::power::{PoweredGraph, SuperLabeling};
use super::tester::SIGMA0;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionReport {
    pub decoded: Strategy,
    pub gadget_satisfied: Vec<bool>,
    pub gadget_fraction: Rational,
    pub decoded_value: Rational,
    pub inequality_holds: bool,
}

fn check_pair(powered: &PoweredGraph, composed: &ComposedGraph) -> Result<()> {
    if powered.base() != &composed.graph {
        return Err(Error::NotComposedGraph("powered graph was not built from this composition".into()));
    }
    for info in &composed.gadgets {
        let cloud = powered.cloud(info.rep);
        if let Some(v) = info.vertices.iter().find(|v| cloud.binary_search(v).is_err()) {
            return Err(Error::NotComposedGraph(format!(
                "cloud of representative {} misses gadget vertex {v}",
                info.rep
            )));
        }
    }
    Ok(())
}

/// A block vertex's claim about itself.
fn self_claim(powered: &PoweredGraph, lambda: &SuperLabeling, v: usize) -> Symbol {
    powered.claim(lambda, v, v).expect("cloud contains its center")
}

pub fn decode(powered: &PoweredGraph, composed: &ComposedGraph, lambda: &SuperLabeling) -> Strategy {
    let read = |b: usize| {
        let labels: Vec<Symbol> = composed.block(b).map(|v| self_claim(powered, lambda, v)).collect();
        composed.code.decode(&composed.block_bits(&labels))
    };
    let nx = composed.base.num_x();
    Strategy {
        psi_x: (0..nx).map(read).collect(),
        psi_y: (0..composed.base.num_y()).map(|y| read(nx + y)).collect(),
    }
}

fn gadget_satisfied(powered: &PoweredGraph, composed: &ComposedGraph, lambda: &SuperLabeling, g: usize) -> bool {
    let info = &composed.gadgets[g];
    let claim = |w: usize| powered.claim(lambda, info.rep, w).expect("checked coverage");
    let inputs = 2 * composed.block_len;
    if info.vertices[..inputs]
        .iter()
        .any(|&b| claim(b) != self_claim(powered, lambda, b))
    {
        return false;
    }
    info.edges.clone().all(|e| {
        let (u, v) = composed.graph.edges()[e];
        composed.graph.constraints()[e].contains(claim(u), claim(v))
    })
}

pub fn project_superlabeling(
    powered: &PoweredGraph,
    composed: &ComposedGraph,
    lambda: &SuperLabeling,
) -> Result<ProjectionReport> {
    check_pair(powered, composed)?;
    powered.check_labeling(lambda)?;
    let decoded = decode(powered, composed, lambda);
    let gadget_satisfied: Vec<bool> = (0..composed.gadgets.len())
        .map(|g| gadget_satisfied(powered, composed, lambda, g))
        .collect();
    let gadget_fraction = Rational::frac(
        gadget_satisfied.iter().filter(|&&s| s).count(),
        composed.gadgets.len().max(1),
    );
    let decoded_value = strategy_value(&composed.base, &decoded)?;
    Ok(ProjectionReport {
        inequality_holds: gadget_fraction <= decoded_value,
        decoded,
        gadget_satisfied,
        gadget_fraction,
        decoded_value,
    })
}

/// The super-labeling induced by encoding a strategy of `G′`.
pub fn lambda_from_strategy(powered: &PoweredGraph, composed: &ComposedGraph, s: &Strategy) -> SuperLabeling {
    powered.lift(&composed.encode_strategy(s))
}

/// For each gadget, every assignment of its input triples (mixed radix, first
/// triple least significant) mapped to a local completion satisfying all of
/// the gadget's constraints, if one exists.
pub fn completion_tables(composed: &ComposedGraph, caps: &Caps) -> Result<Vec<Vec<Option<Vec<Symbol>>>>> {
    let inputs = 2 * composed.block_len;
    if !crate::caps::pow_within(SIGMA0, inputs, caps.strategy_space) {
        return Err(Error::space("gadget input assignments", 3.0 * inputs as f64, caps.strategy_space));
    }
    let combos = (SIGMA0 as u64).pow(inputs as u32);
    (0..composed.gadgets.len())
        .into_par_iter()
        .map(|g| {
            let local = composed.gadget_graph(g);
            Ok((0..combos)
                .map(|m| {
                    let mut fixed = vec![None; local.num_vertices()];
                    let mut m = m;
                    for f in fixed.iter_mut().take(inputs) {
                        *f = Some((m % SIGMA0 as u64) as Symbol);
                        m /= SIGMA0 as u64;
                    }
                    local.complete(&fixed)
                })
                .collect())
        })
        .collect()
}

/// Builds a super-labeling from block self-labels: every vertex claims the
/// block labels, and each representative claims the stored completion of its
/// gadget where one exists. Private vertices not otherwise fixed claim 0.
pub fn lambda_from_blocks(
    powered: &PoweredGraph,
    composed: &ComposedGraph,
    tables: &[Vec<Option<Vec<Symbol>>>],
    block_labels: &[Symbol],
) -> SuperLabeling {
    let mut base = vec![0 as Symbol; composed.graph.num_vertices()];
    base[..block_labels.len()].copy_from_slice(block_labels);
    let mut lambda = powered.lift(&base);
    let inputs = 2 * composed.block_len;
    for (g, info) in composed.gadgets.iter().enumerate() {
        let idx = info.vertices[..inputs]
            .iter()
            .rev()
            .fold(0usize, |acc, &v| acc * SIGMA0 + block_labels[v] as usize);
        if let Some(local) = &tables[g][idx] {
            for (&v, &l) in info.vertices.iter().zip(local) {
                let pos = powered.cloud(info.rep).binary_search(&v).expect("covered");
                lambda[info.rep][pos] = l;
            }
        }
    }
    lambda
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub method: String,
    pub candidates: u64,
    pub best_fraction: Rational,
    pub value_g_prime: Rational,
    /// Candidates whose gadget fraction exceeded their own decoded value.
    pub violations: u64,
    pub inequality_holds: bool,
}

/// Maximizes the satisfied-gadget fraction over all super-labelings by
/// enumerating block self-labels and giving each representative its best
/// claim from the completion tables. Each optimum is projected as a check.
pub fn projection_search_exhaustive(
    powered: &PoweredGraph,
    composed: &ComposedGraph,
    caps: &Caps,
) -> Result<SearchReport> {
    check_pair(powered, composed)?;
    let vprime = value_exact(&composed.base, caps)?.value;
    let tables = completion_tables(composed, caps)?;
    let nblock = composed.num_blocks() * composed.block_len;
    if !crate::caps::pow_within(SIGMA0, nblock, caps.strategy_space) {
        return Err(Error::space("block labelings", 3.0 * nblock as f64, caps.strategy_space));
    }
    let total = (SIGMA0 as u64).pow(nblock as u32);
    let inputs = 2 * composed.block_len;
    let score = |labels: &[Symbol]| {
        composed
            .gadgets
            .iter()
            .enumerate()
            .filter(|(g, info)| {
                let idx = info.vertices[..inputs]
                    .iter()
                    .rev()
                    .fold(0usize, |acc, &v| acc * SIGMA0 + labels[v] as usize);
                tables[*g][idx].is_some()
            })
            .count()
    };
    let unpack = |m: u64| -> Vec<Symbol> {
        let mut m = m;
        (0..nblock)
            .map(|_| {
                let s = (m % SIGMA0 as u64) as Symbol;
                m /= SIGMA0 as u64;
                s
            })
            .collect()
    };
    let (best, arg) = (0..total)
        .into_par_iter()
        .map(|m| (score(&unpack(m)), std::cmp::Reverse(m)))
        .max()
        .map(|(s, std::cmp::Reverse(m))| (s, m))
        .unwrap_or((0, 0));
    let lambda = lambda_from_blocks(powered, composed, &tables, &unpack(arg));
    let report = project_superlabeling(powered, composed, &lambda)?;
    let best_fraction = Rational::frac(best, composed.gadgets.len().max(1));
    let consistent = report.gadget_fraction == best_fraction;
    Ok(SearchReport {
        method: "exhaustive".into(),
        candidates: total,
        best_fraction,
        value_g_prime: vprime,
        violations: u64::from(!report.inequality_holds),
        inequality_holds: consistent && report.inequality_holds && best_fraction <= vprime,
    })
}

/// Projects `n` seeded candidates: random block labels completed through the
/// tables, the same with random claim noise, and fully random super-labels.
pub fn projection_search_sampled(
    powered: &PoweredGraph,
    composed: &ComposedGraph,
    n: u64,
    seed: u64,
    caps: &Caps,
) -> Result<SearchReport> {
    check_pair(powered, composed)?;
    let vprime = value_exact(&composed.base, caps)?.value;
    let tables = completion_tables(composed, caps)?;
    let nblock = composed.num_blocks() * composed.block_len;
    let results: Vec<(Rational, bool)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rs = rng::derived_stream(seed, &[i]);
            let lambda = match i % 3 {
                0 => {
                    let blocks: Vec<Symbol> = (0..nblock).map(|_| rng::uniform_below(&mut rs, 8) as Symbol).collect();
                    lambda_from_blocks(powered, composed, &tables, &blocks)
                }
                1 => {
                    let blocks: Vec<Symbol> = (0..nblock).map(|_| rng::uniform_below(&mut rs, 8) as Symbol).collect();
                    let mut lam = lambda_from_blocks(powered, composed, &tables, &blocks);
                    for claims in lam.iter_mut() {
                        for c in claims.iter_mut() {
                            if rng::uniform_below(&mut rs, 16) == 0 {
                                *c = rng::uniform_below(&mut rs, 8) as Symbol;
                            }
                        }
                    }
                    lam
                }
                _ => powered
                    .clouds()
                    .iter()
                    .map(|c| c.iter().map(|_| rng::uniform_below(&mut rs, 8) as Symbol).collect())
                    .collect(),
            };
            let r = project_superlabeling(powered, composed, &lambda)?;
            Ok((r.gadget_fraction, r.inequality_holds))
        })
        .collect::<Result<_>>()?;
    let best_fraction = results.iter().map(|r| r.0).max().unwrap_or(Rational::ZERO);
    let violations = results.iter().filter(|r| !r.1).count() as u64;
    Ok(SearchReport {
        method: "sampled".into(),
        candidates: n,
        best_fraction,
        value_g_prime: vprime,
        violations,
        inequality_holds: violations == 0 && best_fraction <= vprime,
    })
}
