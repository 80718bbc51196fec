//! A Tseitin-style assignment tester over `Σ₀ = {0,1}³`.
//!
//! Circuit variables are packed into triples, and each triple is one vertex
//! whose label holds three bits (`bit i` of the symbol is position `i`). Input
//! variables fill the first triples in the order given by a layout. Gate `g`
//! gets its own triple `(g, a′, b′)` holding its output and local copies of its
//! inputs (`NOT` leaves the third position as padding). Every gate clause
//! becomes one edge from the gate triple to the triple owning one of the gate's
//! inputs; the edge checks the clause on the local copies and that the copy
//! agrees with the owner. The output is forced to 1 by a self-loop on the
//! triple that owns it.
//!
//! If every constraint holds, the copies agree with their owners and each gate
//! output is the gate applied to its inputs, so the output wire is the circuit
//! value; an input outside `SAT(Φ)` therefore violates at least one edge.

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::game::{PairSet, Symbol};
use crate::rational::Rational;

use super::circuit::{BooleanCircuit, Gate};
use super::graph::ConstraintGraph;

/// `|Σ₀|`.
pub const SIGMA0: usize = 8;

#[inline]
pub fn bit(sym: Symbol, pos: usize) -> bool {
    sym >> pos & 1 == 1
}

pub fn pack(bits: [bool; 3]) -> Symbol {
    bits.iter().enumerate().map(|(i, &b)| (b as Symbol) << i).sum()
}

/// Which circuit input sits at each position of each input triple.
pub type TripleLayout = Vec<[Option<usize>; 3]>;

pub fn consecutive_layout(num_inputs: usize) -> TripleLayout {
    (0..num_inputs.div_ceil(3))
        .map(|t| std::array::from_fn(|p| Some(3 * t + p).filter(|&i| i < num_inputs)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TesterOutput {
    pub graph: ConstraintGraph,
    pub circuit: BooleanCircuit,
    pub layout: TripleLayout,
    /// `(vertex, position)` holding each wire.
    pub owner: Vec<(usize, usize)>,
}

impl TesterOutput {
    pub fn num_input_triples(&self) -> usize {
        self.layout.len()
    }

    /// Labels of the input triples for input `a`, padding bits 0.
    pub fn input_labels(&self, a: &[bool]) -> Vec<Symbol> {
        self.layout
            .iter()
            .map(|t| pack(std::array::from_fn(|p| t[p].is_some_and(|i| a[i]))))
            .collect()
    }

    /// Input triples fixed from `a`, every other vertex free.
    pub fn fixed_from_input(&self, a: &[bool]) -> Vec<Option<Symbol>> {
        let mut fixed: Vec<Option<Symbol>> = self.input_labels(a).into_iter().map(Some).collect();
        fixed.resize(self.graph.num_vertices(), None);
        fixed
    }

    /// The labeling read off the circuit's wire values on `a`. It satisfies
    /// every edge except the output check when `a ∉ SAT(Φ)`.
    pub fn evaluation_labels(&self, a: &[bool]) -> Vec<Symbol> {
        let wires = self.circuit.wires(a);
        let mut labels = self.input_labels(a);
        let n = self.circuit.num_inputs();
        for (g, gate) in self.circuit.gates().iter().enumerate() {
            let (x, y) = gate.inputs();
            labels.push(pack([wires[n + g], wires[x], y.is_some_and(|y| wires[y])]));
        }
        labels
    }

    /// Bits of the circuit inputs as stored in a labeling of the input triples.
    pub fn read_inputs(&self, labels: &[Symbol]) -> Vec<bool> {
        let mut a = vec![false; self.circuit.num_inputs()];
        for (t, slots) in self.layout.iter().enumerate() {
            for (p, slot) in slots.iter().enumerate() {
                if let Some(i) = slot {
                    a[*i] = bit(labels[t], p);
                }
            }
        }
        a
    }
}

pub fn tseitin_tester(phi: &BooleanCircuit, caps: &Caps) -> Result<TesterOutput> {
    tseitin_tester_with_layout(phi, consecutive_layout(phi.num_inputs()), caps)
}

pub fn tseitin_tester_with_layout(phi: &BooleanCircuit, layout: TripleLayout, caps: &Caps) -> Result<TesterOutput> {
    let size = phi.num_inputs() + phi.gates().len();
    if size > caps.circuit {
        return Err(Error::CircuitTooLarge { size, cap: caps.circuit });
    }
    let n = phi.num_inputs();
    let mut owner = vec![None; phi.num_wires()];
    for (t, slots) in layout.iter().enumerate() {
        for (p, slot) in slots.iter().enumerate() {
            if let Some(i) = *slot {
                if i >= n || owner[i].is_some() {
                    return Err(Error::InvalidParameter(format!("layout places input {i} badly")));
                }
                owner[i] = Some((t, p));
            }
        }
    }
    if owner[..n].iter().any(Option::is_none) {
        return Err(Error::InvalidParameter("layout misses an input".into()));
    }
    let nt = layout.len();
    for g in 0..phi.gates().len() {
        owner[n + g] = Some((nt + g, 0));
    }
    let owner: Vec<(usize, usize)> = owner.into_iter().map(Option::unwrap).collect();

    let mut edges = Vec::new();
    let mut constraints = Vec::new();
    for (g, gate) in phi.gates().iter().enumerate() {
        let me = nt + g;
        let (a, b) = gate.inputs();
        // (clause over (g, a′, b′), copy slot checked, wire of that copy)
        type Clause = fn(bool, bool, bool) -> bool;
        let clauses: Vec<(Clause, usize, usize)> = match *gate {
            Gate::And(..) => vec![
                (|g, a, _| !g || a, 1, a),
                (|g, _, b| !g || b, 2, b.unwrap()),
                (|g, a, b| g || !a || !b, 1, a),
            ],
            Gate::Or(..) => vec![
                (|g, a, _| g || !a, 1, a),
                (|g, _, b| g || !b, 2, b.unwrap()),
                (|g, a, b| !g || a || b, 1, a),
            ],
            Gate::Not(_) => vec![(|g, a, _| g || a, 1, a), (|g, a, _| !g || !a, 1, a)],
        };
        for (clause, slot, wire) in clauses {
            let (ov, op) = owner[wire];
            edges.push((me, ov));
            constraints.push(PairSet::from_predicate(SIGMA0, |l, m| {
                clause(bit(l, 0), bit(l, 1), bit(l, 2)) && bit(l, slot) == bit(m, op)
            }));
        }
    }
    let (ov, op) = owner[phi.output()];
    edges.push((ov, ov));
    constraints.push(PairSet::from_predicate(SIGMA0, |l, m| l == m && bit(l, op)));

    let graph = ConstraintGraph::new(SIGMA0, nt + phi.gates().len(), edges, constraints)?;
    Ok(TesterOutput {
        graph,
        circuit: phi.clone(),
        layout,
        owner,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TesterCheck {
    pub inputs_checked: usize,
    pub completeness: bool,
    /// Smallest `UNSAT` over all `a ∉ SAT(Φ)` and all completions; `None` when
    /// every input is satisfying or the search budget ran out.
    pub min_rejection: Option<Rational>,
    /// Smallest `UNSAT / rdist(a, SAT(Φ))`; `None` if undefined.
    pub min_rejection_ratio: Option<Rational>,
}

/// Exhausts every input `a`: satisfying inputs must extend to `UNSAT = 0`, and
/// for the others the minimum violated fraction is measured by branch and bound.
pub fn check_tester(t: &TesterOutput, budget: u64) -> Result<TesterCheck> {
    let n = t.circuit.num_inputs();
    if n > 16 {
        return Err(Error::space("tester input enumeration", n as f64, 1 << 16));
    }
    let inputs: Vec<Vec<bool>> = (0..1u32 << n).map(|m| (0..n).map(|i| m >> i & 1 == 1).collect()).collect();
    let sat: Vec<&Vec<bool>> = inputs.iter().filter(|a| t.circuit.eval(a)).collect();
    let mut completeness = true;
    let mut min_rej: Option<Rational> = None;
    let mut min_ratio: Option<Rational> = None;
    let m = t.graph.size();
    let v = t.graph.num_vertices();
    for a in &inputs {
        let fixed = t.fixed_from_input(a);
        if t.circuit.eval(a) {
            completeness &= t.graph.complete(&fixed).is_some();
            continue;
        }
        let Some(k) = t.graph.min_violations(&fixed, budget) else {
            return Ok(TesterCheck {
                inputs_checked: inputs.len(),
                completeness,
                min_rejection: None,
                min_rejection_ratio: None,
            });
        };
        let rej = Rational::frac(k, m);
        min_rej = Some(min_rej.map_or(rej, |r| r.min(rej)));
        if let Some(dist) = sat
            .iter()
            .map(|s| s.iter().zip(a).filter(|(x, y)| x != y).count())
            .min()
        {
            let ratio = rej / Rational::frac(dist, v);
            min_ratio = Some(min_ratio.map_or(ratio, |r| r.min(ratio)));
        }
    }
    Ok(TesterCheck {
        inputs_checked: inputs.len(),
        completeness,
        min_rejection: min_rej,
        min_rejection_ratio: min_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::super::circuit;
    use super::*;

    #[test]
    fn identity_circuit() {
        let t = tseitin_tester(&circuit::identity(), &Caps::default()).unwrap();
        assert_eq!(t.graph.num_vertices(), 1);
        assert_eq!(t.graph.size(), 1);
        assert!(t.graph.complete(&t.fixed_from_input(&[true])).is_some());
        assert!(t.graph.complete(&t.fixed_from_input(&[false])).is_none());
        let c = check_tester(&t, 1 << 20).unwrap();
        assert!(c.completeness);
        assert_eq!(c.min_rejection, Some(Rational::ONE));
    }

    #[test]
    fn contradiction_unsatisfiable() {
        let t = tseitin_tester(&circuit::contradiction(), &Caps::default()).unwrap();
        assert!(t.graph.complete(&vec![None; t.graph.num_vertices()]).is_none());
        let c = check_tester(&t, 1 << 20).unwrap();
        assert!(c.completeness);
        assert!(c.min_rejection.unwrap() >= Rational::frac(1, t.graph.size()));
        assert_eq!(c.min_rejection_ratio, None);
    }

    #[test]
    fn equality_completeness_and_soundness() {
        let phi = circuit::equality(2);
        let t = tseitin_tester(&phi, &Caps::default()).unwrap();
        let c = check_tester(&t, 1 << 24).unwrap();
        assert_eq!(c.inputs_checked, 16);
        assert!(c.completeness);
        assert!(c.min_rejection.unwrap() >= Rational::frac(1, t.graph.size()));
        for m in 0..16u32 {
            let a: Vec<bool> = (0..4).map(|i| m >> i & 1 == 1).collect();
            let labels = t.evaluation_labels(&a);
            let violated = t.graph.size() - t.graph.satisfied_count(&labels);
            assert_eq!(violated, usize::from(!phi.eval(&a)));
            assert_eq!(t.read_inputs(&labels), a);
        }
    }

    #[test]
    fn circuit_cap() {
        let caps = Caps { circuit: 3, ..Caps::default() };
        assert!(matches!(
            tseitin_tester(&circuit::equality(2), &caps),
            Err(Error::CircuitTooLarge { .. })
        ));
    }
}
