//! Binary encodings of an alphabet and the robustized edge circuits built on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Game, Symbol};
use crate::rational::Rational;

use super::circuit::{BooleanCircuit, CircuitBuilder};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryCode {
    ell: usize,
    /// `codewords[a]` is `e(a)`.
    codewords: Vec<Vec<bool>>,
    /// Declared `c` in `log₂|Σ| ≤ ℓ ≤ c·log₂|Σ|`.
    c: Rational,
}

impl BinaryCode {
    pub fn new(codewords: Vec<Vec<bool>>, c: Rational) -> Result<Self> {
        let q = codewords.len();
        if q == 0 {
            return Err(Error::InvalidCode("no codewords".into()));
        }
        let ell = codewords[0].len();
        if codewords.iter().any(|w| w.len() != ell) {
            return Err(Error::InvalidCode("codewords of different lengths".into()));
        }
        for i in 0..q {
            for j in 0..i {
                if codewords[i] == codewords[j] {
                    return Err(Error::InvalidCode(format!("symbols {j} and {i} share a codeword")));
                }
            }
        }
        // 2^ℓ ≥ q is the integer form of ℓ ≥ log₂ q.
        if ell < 64 && (1u64 << ell) < q as u64 {
            return Err(Error::InvalidCode(format!("length {ell} too short for {q} symbols")));
        }
        let log_q = (q as f64).log2();
        if q > 1 && ell as f64 > c.to_f64() * log_q + 1e-9 {
            return Err(Error::InvalidCode(format!("length {ell} exceeds {c}·log2({q})")));
        }
        Ok(BinaryCode { ell, codewords, c })
    }

    /// Binary representation with `⌈log₂q⌉` bits (at least one), each bit repeated `reps` times.
    pub fn repetition(q: usize, reps: usize) -> Result<Self> {
        if reps == 0 {
            return Err(Error::InvalidCode("repetition factor must be positive".into()));
        }
        let bits = (usize::BITS - (q.max(2) - 1).leading_zeros()) as usize;
        let words = (0..q)
            .map(|a| (0..bits).flat_map(|i| std::iter::repeat_n(a >> i & 1 == 1, reps)).collect())
            .collect();
        BinaryCode::new(words, Rational::from_int((bits * reps) as i64))
    }

    pub fn alphabet_size(&self) -> usize {
        self.codewords.len()
    }

    pub fn len(&self) -> usize {
        self.ell
    }

    pub fn is_empty(&self) -> bool {
        self.ell == 0
    }

    pub fn declared_c(&self) -> Rational {
        self.c
    }

    pub fn encode(&self, a: Symbol) -> &[bool] {
        &self.codewords[a as usize]
    }

    /// Minimum pairwise relative Hamming distance (1 for a one-symbol code).
    pub fn relative_distance(&self) -> Rational {
        let q = self.codewords.len();
        let mut best = self.ell;
        for i in 0..q {
            for j in 0..i {
                let d = self.codewords[i]
                    .iter()
                    .zip(&self.codewords[j])
                    .filter(|(a, b)| a != b)
                    .count();
                best = best.min(d);
            }
        }
        Rational::frac(best, self.ell.max(1))
    }

    /// Nearest codeword; ties go to the smallest symbol.
    pub fn decode(&self, word: &[bool]) -> Symbol {
        let dist = |w: &Vec<bool>| w.iter().zip(word).filter(|(a, b)| a != b).count();
        let mut best = (usize::MAX, 0);
        for (a, w) in self.codewords.iter().enumerate() {
            let d = dist(w);
            if d < best.0 {
                best = (d, a);
            }
        }
        best.1 as Symbol
    }

    /// `Some(a)` when `word` is exactly `e(a)`.
    pub fn exact(&self, word: &[bool]) -> Option<Symbol> {
        self.codewords.iter().position(|w| w == word).map(|a| a as Symbol)
    }
}

/// One circuit per edge `(v, w)` of `game`, on inputs `[v] ‖ [w]` (`2ℓ` bits),
/// accepting exactly `(e(a), e(b))` with `(a, b) ∈ π_e`.
pub fn robustize(game: &Game, code: &BinaryCode) -> Result<Vec<BooleanCircuit>> {
    if code.alphabet_size() != game.alphabet_size() {
        return Err(Error::CodeMismatch(format!(
            "code has {} symbols, game alphabet has {}",
            code.alphabet_size(),
            game.alphabet_size()
        )));
    }
    game.constraints()
        .iter()
        .map(|c| accept_pairs(code, c.pairs()))
        .collect()
}

/// DNF over the exact codeword pairs; an empty pair set yields `x₀ ∧ ¬x₀`.
fn accept_pairs(code: &BinaryCode, pairs: impl Iterator<Item = (Symbol, Symbol)>) -> Result<BooleanCircuit> {
    let ell = code.len();
    let mut b = CircuitBuilder::new(2 * ell);
    let negated: Vec<usize> = (0..2 * ell).map(|i| b.not(i)).collect();
    let mut terms = Vec::new();
    for (x, y) in pairs {
        let lits: Vec<usize> = code
            .encode(x)
            .iter()
            .chain(code.encode(y))
            .enumerate()
            .map(|(i, &bit)| if bit { i } else { negated[i] })
            .collect();
        terms.push(b.and_all(&lits));
    }
    let out = if terms.is_empty() {
        b.and(0, negated[0])
    } else {
        b.or_all(&terms)
    };
    b.finish(out)
}
