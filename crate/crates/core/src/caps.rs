//! Size caps for every exhaustive search in the crate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable read by [`Caps::from_env`], e.g.
/// `REPREP_CAP_OVERRIDE="strategy=1048576,rect=65536"`.
pub const CAP_OVERRIDE_ENV: &str = "REPREP_CAP_OVERRIDE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Caps {
    /// Bound on `|Σ|^(|X|+|Y|)` for exact game values.
    pub strategy_space: u64,
    /// Bound on `|E|^k` for full products.
    pub full_power: u64,
    /// Bound on `2^|X| * 2^|Y|` for exhaustive rectangle scans.
    pub rectangles: u64,
    /// Bound on the total number of `(2t+1)`-step walks in a powered graph.
    pub walks: u64,
    /// Bound on a single cloud size.
    pub cloud: usize,
    /// Bound on circuit inputs plus gates fed to an assignment tester.
    pub circuit: usize,
    /// Bound on vertices per gadget after clique completion.
    pub gadget: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            strategy_space: 1 << 24,
            full_power: 1 << 20,
            rectangles: 1 << 22,
            walks: 1 << 40,
            cloud: 4096,
            circuit: 4096,
            gadget: 512,
        }
    }
}

impl Caps {
    /// Defaults, then overrides from [`CAP_OVERRIDE_ENV`] when set.
    pub fn from_env() -> Result<Self> {
        let mut caps = Caps::default();
        if let Ok(spec) = std::env::var(CAP_OVERRIDE_ENV) {
            caps.apply_overrides(&spec)?;
        }
        Ok(caps)
    }

    /// Applies a comma-separated `key=value` list.
    pub fn apply_overrides(&mut self, spec: &str) -> Result<()> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("cap override {item:?}")))?;
            let v: u64 = value
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("cap value {value:?}")))?;
            self.set(key.trim(), v)?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, v: u64) -> Result<()> {
        match key {
            "strategy" | "strategy_space" => self.strategy_space = v,
            "power" | "full_power" => self.full_power = v,
            "rect" | "rectangles" => self.rectangles = v,
            "walks" => self.walks = v,
            "cloud" => self.cloud = v as usize,
            "circuit" => self.circuit = v as usize,
            "gadget" => self.gadget = v as usize,
            other => return Err(Error::InvalidParameter(format!("unknown cap {other:?}"))),
        }
        Ok(())
    }
}

/// `base^exp` as an `f64` log2, for cap comparisons that may overflow.
pub(crate) fn log2_pow(base: usize, exp: usize) -> f64 {
    if base <= 1 {
        0.0
    } else {
        exp as f64 * (base as f64).log2()
    }
}

/// `base^exp <= cap` computed without overflow.
pub(crate) fn pow_within(base: usize, exp: usize, cap: u64) -> bool {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc *= base as u128;
        if acc > cap as u128 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse() {
        let mut c = Caps::default();
        c.apply_overrides("strategy=16, rect=8").unwrap();
        assert_eq!(c.strategy_space, 16);
        assert_eq!(c.rectangles, 8);
        assert!(c.apply_overrides("bogus=1").is_err());
        assert!(c.apply_overrides("strategy").is_err());
    }

    #[test]
    fn pow_within_matches_direct() {
        assert!(pow_within(4, 10, 1 << 20));
        assert!(!pow_within(4, 11, 1 << 20));
        assert!(pow_within(1, 1000, 1));
    }
}
