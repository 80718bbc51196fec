//! The end-to-end dichotomy: either the offered embedding is not robust, or
//! the extraction yields a rectangle that beats `val(G) + ε`.

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::fortify::{delta_star, recheck_witness, theorem_hypotheses, HypothesisReport, RectWitness};
use crate::game::{rect_subgame, strategy_value, value_exact, Game};
use crate::rational::Rational;
use crate::repetition::{apply_scheme, blowup, uniform_marginals_check, SchemeSpec};

use super::embedding::{robustness_fraction, trivial_strategy, EmbProvider};
use super::extract::{extract_rectangle, ExtractionTrace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Branch {
    NotRobust,
    FortificationViolated,
    HypothesesUnmet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub marginals_pass: bool,
    pub z: Option<Rational>,
    pub val_g: Rational,
    /// `val(G) ≤ 1 − 20ε`.
    pub value_ok: bool,
    /// `γ ≤ val(G)`.
    pub gamma_ok: bool,
    /// `ε < (1 − γ)/23`.
    pub eps_ok: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoGoWitness {
    pub m_s: Vec<usize>,
    pub n_s: Vec<usize>,
    pub satisfied_fraction: Rational,
    /// Value of the extracted strategy on `G_{M_s×N_s}`.
    pub strategy_value: Rational,
    /// Exact rectangle value, re-verified from scratch.
    pub rect_value: Rational,
    pub rect: RectWitness,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoGoVerdict {
    pub branch: Branch,
    pub s: usize,
    pub i: Option<usize>,
    pub k: usize,
    pub gamma: Rational,
    pub eps: Rational,
    pub gate: Gate,
    /// Regularity, mixing and fortification at `δ*(z)`, when the gate passed.
    pub hypotheses: Option<HypothesisReport>,
    pub robustness_fraction: Option<Rational>,
    pub witness: Option<NoGoWitness>,
    pub trace: Option<ExtractionTrace>,
    pub anomalies: Vec<String>,
}

#[allow(clippy::too_many_arguments)]
pub fn nogo_experiment(
    g: &Game,
    scheme: &SchemeSpec,
    k: usize,
    s: usize,
    gamma: Rational,
    eps: Rational,
    provider: &EmbProvider,
    caps: &Caps,
) -> Result<NoGoVerdict> {
    if k < 2 {
        return Err(Error::InvalidParameter("C = {s} leaves no coordinate unless k ≥ 2".into()));
    }
    if s == 0 || s > k {
        return Err(Error::InvalidParameter(format!("round {s} outside [1, {k}]")));
    }
    let h = apply_scheme(g, scheme, k, caps)?;
    let marginals = uniform_marginals_check(&h)?;
    let val_g = value_exact(g, caps)?.value;
    let one = Rational::ONE;
    let value_ok = val_g <= one - Rational::from_int(20) * eps;
    let gamma_ok = gamma <= val_g;
    let eps_ok = eps > Rational::ZERO && eps < (one - gamma) / Rational::from_int(23);
    let z = if h.is_empty() { None } else { Some(blowup(&h)?) };
    let gate = Gate {
        marginals_pass: marginals.pass,
        z,
        val_g,
        value_ok,
        gamma_ok,
        eps_ok,
        pass: marginals.pass && value_ok && gamma_ok && eps_ok && z.is_some(),
    };
    let mut verdict = NoGoVerdict {
        branch: Branch::HypothesesUnmet,
        s,
        i: None,
        k,
        gamma,
        eps,
        gate: gate.clone(),
        hypotheses: None,
        robustness_fraction: None,
        witness: None,
        trace: None,
        anomalies: Vec::new(),
    };
    if !gate.pass {
        return Ok(verdict);
    }
    let z = z.expect("gate checked");
    verdict.hypotheses = Some(theorem_hypotheses(g, z, eps, caps)?);

    let psi = trivial_strategy(&h, s, caps)?;
    let emb = provider.provide(&h, s)?;
    verdict.i = Some(emb.i);
    let fraction = robustness_fraction(&h, &psi, &[s], &emb)?;
    verdict.robustness_fraction = Some(fraction);
    if fraction < one - eps {
        verdict.branch = Branch::NotRobust;
        return Ok(verdict);
    }

    let trace = match extract_rectangle(&h, &psi, s, &emb, eps) {
        Ok(t) => t,
        Err(e @ (Error::NoGoodBucket { .. } | Error::ParallelEdgesExceeded { .. })) => {
            verdict.anomalies.push(format!("{}: {e}", e.code()));
            return Ok(verdict);
        }
        Err(e) => return Err(e),
    };
    verdict.anomalies.extend(trace.anomalies.iter().cloned());
    let (delta, _) = delta_star(z)?;
    let big_enough = |n: usize, side: usize| Rational::from_int(n as i64) >= delta * Rational::from_int(side as i64);
    let sizes_ok = big_enough(trace.m_s.len(), g.num_x()) && big_enough(trace.n_s.len(), g.num_y());
    let beats = trace.satisfied_fraction >= val_g + eps;

    let witness = if trace.rect_edges > 0 {
        let sub = rect_subgame(g, &trace.m_s, &trace.n_s)?;
        let achieved = strategy_value(&sub.game, &trace.strategy)?;
        let best = value_exact(&sub.game, caps)?;
        let rect = RectWitness {
            s: trace.m_s.clone(),
            t: trace.n_s.clone(),
            value: best.value,
            strategy: best.witness,
        };
        let rect_value = recheck_witness(g, &rect, caps)?;
        if achieved < trace.satisfied_fraction {
            verdict
                .anomalies
                .push(format!("extracted strategy attains {achieved} < satisfied fraction {}", trace.satisfied_fraction));
        }
        Some(NoGoWitness {
            m_s: trace.m_s.clone(),
            n_s: trace.n_s.clone(),
            satisfied_fraction: trace.satisfied_fraction,
            strategy_value: achieved,
            rect_value,
            rect,
        })
    } else {
        None
    };

    match &witness {
        Some(w) if beats && sizes_ok && w.rect_value >= val_g + eps => {
            verdict.branch = Branch::FortificationViolated;
        }
        _ => {
            if !beats {
                verdict.anomalies.push(format!(
                    "satisfied fraction {} below val(G) + eps = {}",
                    trace.satisfied_fraction,
                    val_g + eps
                ));
            }
            if !sizes_ok {
                verdict.anomalies.push(format!("rectangle sides below delta* = {delta}"));
            }
        }
    }
    verdict.witness = witness;
    verdict.trace = Some(trace);
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn full_game_unmet() {
        let g = fixtures::uniform_game(2, 2, 2, true);
        let v = nogo_experiment(
            &g,
            &SchemeSpec::FullProduct,
            2,
            1,
            Rational::ONE,
            Rational::new(1, 100),
            &EmbProvider::Diagonal,
            &Caps::default(),
        )
        .unwrap();
        assert_eq!(v.branch, Branch::HypothesesUnmet);
        assert!(!v.gate.value_ok);
    }

    #[test]
    fn plant8_violates_fortification() {
        let g = fixtures::plant8();
        let val = value_exact(&g, &Caps::default()).unwrap().value;
        let v = nogo_experiment(
            &g,
            &SchemeSpec::FullProduct,
            2,
            1,
            val,
            Rational::new(1, 100),
            &EmbProvider::Planted {
                plant_x: vec![0, 1],
                plant_y: vec![0, 1],
            },
            &Caps::default(),
        )
        .unwrap();
        assert_eq!(v.branch, Branch::FortificationViolated, "{:?}", v.anomalies);
        let w = v.witness.unwrap();
        assert_eq!(w.satisfied_fraction, Rational::ONE);
        assert_eq!(w.rect_value, Rational::ONE);
        assert!(w.m_s.len() >= 2);
        assert!(!v.hypotheses.unwrap().fortification.verdict.passed());
    }

    #[test]
    fn chsh_diagonal_not_robust() {
        let g = fixtures::chsh();
        let v = nogo_experiment(
            &g,
            &SchemeSpec::FullProduct,
            2,
            1,
            Rational::new(1, 2),
            Rational::new(1, 100),
            &EmbProvider::Diagonal,
            &Caps::default(),
        )
        .unwrap();
        assert_eq!(v.branch, Branch::NotRobust);
        assert_eq!(v.robustness_fraction, Some(Rational::new(3, 4)));
    }
}
