//! Boolean circuits over AND/OR/NOT gates in topological order.
//!
//! Wires `0..num_inputs` are the inputs; gate `g` drives wire `num_inputs + g`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gate {
    And(usize, usize),
    Or(usize, usize),
    Not(usize),
}

impl Gate {
    pub fn inputs(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::And(a, b) | Gate::Or(a, b) => (a, Some(b)),
            Gate::Not(a) => (a, None),
        }
    }

    pub fn eval(&self, wires: &[bool]) -> bool {
        match *self {
            Gate::And(a, b) => wires[a] && wires[b],
            Gate::Or(a, b) => wires[a] || wires[b],
            Gate::Not(a) => !wires[a],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BooleanCircuit {
    num_inputs: usize,
    gates: Vec<Gate>,
    output: usize,
}

impl BooleanCircuit {
    pub fn new(num_inputs: usize, gates: Vec<Gate>, output: usize) -> Result<Self> {
        for (g, gate) in gates.iter().enumerate() {
            let wire = num_inputs + g;
            let (a, b) = gate.inputs();
            if a >= wire || b.is_some_and(|b| b >= wire) {
                return Err(Error::InvalidParameter(format!(
                    "gate {g} reads a wire not defined before it"
                )));
            }
        }
        if output >= num_inputs + gates.len() {
            return Err(Error::InvalidParameter(format!("output wire {output} undefined")));
        }
        Ok(BooleanCircuit {
            num_inputs,
            gates,
            output,
        })
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output(&self) -> usize {
        self.output
    }

    pub fn num_wires(&self) -> usize {
        self.num_inputs + self.gates.len()
    }

    /// Every wire's value on input `a`.
    pub fn wires(&self, a: &[bool]) -> Vec<bool> {
        assert_eq!(a.len(), self.num_inputs, "input length");
        let mut w = a.to_vec();
        for g in &self.gates {
            let v = g.eval(&w);
            w.push(v);
        }
        w
    }

    pub fn eval(&self, a: &[bool]) -> bool {
        self.wires(a)[self.output]
    }
}

/// Incremental construction of circuits.
#[derive(Debug, Default)]
pub struct CircuitBuilder {
    num_inputs: usize,
    gates: Vec<Gate>,
}

impl CircuitBuilder {
    pub fn new(num_inputs: usize) -> Self {
        CircuitBuilder {
            num_inputs,
            gates: Vec::new(),
        }
    }

    fn push(&mut self, g: Gate) -> usize {
        self.gates.push(g);
        self.num_inputs + self.gates.len() - 1
    }

    pub fn and(&mut self, a: usize, b: usize) -> usize {
        self.push(Gate::And(a, b))
    }

    pub fn or(&mut self, a: usize, b: usize) -> usize {
        self.push(Gate::Or(a, b))
    }

    pub fn not(&mut self, a: usize) -> usize {
        self.push(Gate::Not(a))
    }

    /// Left-folded AND of a nonempty list.
    pub fn and_all(&mut self, wires: &[usize]) -> usize {
        let mut acc = wires[0];
        for &w in &wires[1..] {
            acc = self.and(acc, w);
        }
        acc
    }

    pub fn or_all(&mut self, wires: &[usize]) -> usize {
        let mut acc = wires[0];
        for &w in &wires[1..] {
            acc = self.or(acc, w);
        }
        acc
    }

    pub fn finish(self, output: usize) -> Result<BooleanCircuit> {
        BooleanCircuit::new(self.num_inputs, self.gates, output)
    }
}

/// `x ∧ ¬x` on one input.
pub fn contradiction() -> BooleanCircuit {
    let mut b = CircuitBuilder::new(1);
    let n = b.not(0);
    let out = b.and(0, n);
    b.finish(out).expect("well formed")
}

/// Single input passed to the output.
pub fn identity() -> BooleanCircuit {
    BooleanCircuit::new(1, Vec::new(), 0).expect("well formed")
}

/// Equality of two `bits`-bit inputs: inputs `0..bits` against `bits..2·bits`.
pub fn equality(bits: usize) -> BooleanCircuit {
    let mut b = CircuitBuilder::new(2 * bits);
    let mut eqs = Vec::new();
    for i in 0..bits {
        let (x, y) = (i, bits + i);
        let both = b.and(x, y);
        let nx = b.not(x);
        let ny = b.not(y);
        let neither = b.and(nx, ny);
        eqs.push(b.or(both, neither));
    }
    let out = b.and_all(&eqs);
    b.finish(out).expect("well formed")
}
