//! The size and value guarantees of the extraction, evaluated exactly.
//!
//! `log²z` is `max(1, ⌈log₂z⌉²)`, the same convention as `δ*`. Unreduced
//! forms are kept alongside the reduced rationals so tables read the way the
//! substitution is written, e.g. `94/12800` and `9108/10100`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fortify::{check_eps, delta_star};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundTable {
    pub z: Rational,
    pub eps: Rational,
    pub log_sq: i64,
    pub log_clamped: bool,
    /// `(1 − 6ε) / (4 log²z)`: lower bound on `|S|/|X|` and `|T|/|Y|`.
    pub st_fraction: Rational,
    pub st_fraction_unreduced: String,
    /// `(1 − 6ε) / (8 z log²z)`: lower bound on `|M|/|X|` and `|N|/|Y|`.
    pub mn_fraction: Rational,
    pub mn_fraction_unreduced: String,
    /// `(1 − 8ε)(1 − ε) / (1 + ε)`.
    pub satisfied_bound: Rational,
    pub satisfied_bound_unreduced: String,
    /// `1 − 11ε`.
    pub eleven_eps: Rational,
    pub chain_holds: bool,
    /// `δ*` at `Φ = z`, and whether it is at most the `|M|` fraction.
    pub delta_star: Rational,
    pub delta_below_mn: bool,
}

pub fn bound_table(z: Rational, eps: Rational) -> Result<BoundTable> {
    if z < Rational::ONE {
        return Err(Error::InvalidParameter(format!("blowup {z} must be at least 1")));
    }
    check_eps(eps)?;
    let l = z.ceil_log2() as i64;
    let log_sq = (l * l).max(1);
    let log_clamped = l * l < 1;
    let int = Rational::from_int;
    let one = Rational::ONE;

    let st_fraction = (one - int(6) * eps) / int(4 * log_sq);
    let mn_fraction = (one - int(6) * eps) / (int(8) * z * int(log_sq));
    let satisfied_bound = (one - int(8) * eps) * (one - eps) / (one + eps);
    let eleven_eps = one - int(11) * eps;

    // eps = p/q, z = a/b
    let (p, q) = (eps.num(), eps.den());
    let (a, b) = (z.num(), z.den());
    let st_fraction_unreduced = format!("{}/{}", q - 6 * p, 4 * log_sq * q);
    let mn_fraction_unreduced = format!("{}/{}", (q - 6 * p) * b, 8 * a * log_sq * q);
    let satisfied_bound_unreduced = format!("{}/{}", (q - 8 * p) * (q - p), (q + p) * q);

    let (delta, _) = delta_star(z)?;
    Ok(BoundTable {
        z,
        eps,
        log_sq,
        log_clamped,
        st_fraction,
        st_fraction_unreduced,
        mn_fraction,
        mn_fraction_unreduced,
        satisfied_bound,
        satisfied_bound_unreduced,
        eleven_eps,
        chain_holds: satisfied_bound > eleven_eps,
        delta_star: delta,
        delta_below_mn: delta <= mn_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn z4_eps_hundredth() {
        let t = bound_table(Rational::from_int(4), Rational::new(1, 100)).unwrap();
        assert_eq!(t.mn_fraction, Rational::new(94, 12800));
        assert_eq!(t.mn_fraction_unreduced, "94/12800");
        assert_eq!(t.satisfied_bound, Rational::new(9108, 10100));
        assert_eq!(t.satisfied_bound_unreduced, "9108/10100");
        assert_eq!(t.eleven_eps, Rational::new(89, 100));
        assert!(t.chain_holds);
        assert_eq!(t.st_fraction, Rational::new(94, 1600));
        assert_eq!(t.delta_star, Rational::new(1, 256));
        assert!(t.delta_below_mn);
        assert!(!t.log_clamped);
    }

    #[test]
    fn degenerate_z() {
        let t = bound_table(Rational::ONE, Rational::new(1, 100)).unwrap();
        assert!(t.log_clamped);
        assert_eq!(t.log_sq, 1);
        assert!(bound_table(Rational::new(1, 2), Rational::new(1, 100)).is_err());
        assert!(matches!(
            bound_table(Rational::from_int(4), Rational::new(1, 23)),
            Err(Error::EpsOutOfRange(_))
        ));
    }

    proptest! {
        #[test]
        fn monotone(z in 1i64..200, dz in 1i64..50, e in 1i64..40, de in 1i64..40) {
            let eps = Rational::new(e, 1000);
            let a = bound_table(Rational::from_int(z), eps).unwrap();
            let b = bound_table(Rational::from_int(z + dz), eps).unwrap();
            prop_assert!(b.mn_fraction < a.mn_fraction);
            prop_assert!(b.st_fraction <= a.st_fraction);
            let eps2 = Rational::new(e + de, 1000);
            if eps2 < Rational::new(1, 23) {
                let c = bound_table(Rational::from_int(z), eps2).unwrap();
                prop_assert!(c.satisfied_bound < a.satisfied_bound);
            }
        }
    }
}
