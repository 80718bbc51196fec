//! Bits of randomness needed to sample one constraint.

use serde::{Deserialize, Serialize};

use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccountingReport {
    pub edges_g_prime: usize,
    pub bits_g_prime: f64,
    pub vertices: usize,
    pub max_degree: usize,
    pub t: usize,
    pub bits_powered: f64,
    /// Repetitions needed for `8^-k ≤ v′`; `None` when `v′ = 0`.
    pub k: Option<u32>,
    pub bits_standard: Option<f64>,
}

/// `log₂|V| + (2t+1)·log₂ d`.
pub fn powered_bits(vertices: usize, d: usize, t: usize) -> f64 {
    (vertices as f64).log2() + (2 * t + 1) as f64 * (d as f64).log2()
}

/// Smallest `k ≥ 1` with `8^-k ≤ v`, i.e. `k = max(1, ⌈log₈(1/v)⌉)`.
pub fn standard_repetitions(v: Rational) -> Option<u32> {
    if v <= Rational::ZERO {
        return None;
    }
    let mut k = 1u32;
    let mut p = Rational::new(1, 8);
    while p > v {
        k += 1;
        p = p * Rational::new(1, 8);
    }
    Some(k)
}

pub fn randomness_accounting(
    edges_g_prime: usize,
    value_g_prime: Rational,
    vertices: usize,
    max_degree: usize,
    t: usize,
) -> AccountingReport {
    let bits_g_prime = (edges_g_prime as f64).log2();
    let k = standard_repetitions(value_g_prime);
    AccountingReport {
        edges_g_prime,
        bits_g_prime,
        vertices,
        max_degree,
        t,
        bits_powered: powered_bits(vertices, max_degree, t),
        k,
        bits_standard: k.map(|k| k as f64 * bits_g_prime),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formulas() {
        assert_eq!(powered_bits(64, 4, 2), 16.0);
        assert_eq!(standard_repetitions(Rational::new(3, 4)), Some(1));
        assert_eq!(standard_repetitions(Rational::new(1, 8)), Some(1));
        assert_eq!(standard_repetitions(Rational::new(1, 9)), Some(2));
        assert_eq!(standard_repetitions(Rational::new(1, 64)), Some(2));
        assert_eq!(standard_repetitions(Rational::ZERO), None);
        let r = randomness_accounting(4, Rational::new(3, 4), 64, 4, 2);
        assert_eq!(r.bits_g_prime, 2.0);
        assert_eq!(r.bits_standard, Some(2.0));
    }
}
