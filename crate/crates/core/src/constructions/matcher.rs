//! Orbit maps on `Z = X_0^ℤ`: balanced-parenthesis matching between the
//! occurrences of `0` and of `i`, and the ℤ orbit-equivalence oracles.

use crate::error::{Error, Result};
use crate::spaces::Field;

/// Reads `0` as an opening and `i` as a closing bracket; other symbols are
/// skipped.
#[derive(Debug, Clone, Copy)]
pub struct Matcher {
    pub radius: i64,
}

impl Matcher {
    /// For `z_0 = 0`, the offset `m > 0` of the matching `i`.
    pub fn forward(&self, z: &dyn Field<i64>, i: u32) -> Result<i64> {
        self.scan(z, 0, i, 1)
    }

    /// For `z_0 = i`, the offset `m < 0` of the matching `0`.
    pub fn inverse(&self, z: &dyn Field<i64>, i: u32) -> Result<i64> {
        self.scan(z, i, 0, -1)
    }

    fn scan(&self, z: &dyn Field<i64>, open: u32, close: u32, step: i64) -> Result<i64> {
        if z.value(&0)? != open {
            return Err(Error::Precondition(format!("z_0 must be {open}")));
        }
        if open == close {
            return Ok(0);
        }
        let mut depth = 1u64;
        for k in 1..=self.radius {
            let v = z.value(&(step * k))?;
            if v == open {
                depth += 1;
            } else if v == close {
                depth -= 1;
                if depth == 0 {
                    return Ok(step * k);
                }
            }
        }
        Err(Error::Undetermined(format!("no match for {open} within {} steps", self.radius)))
    }
}

/// A ℤ orbit equivalence between `ℤ ↷ V_0` (written `*`) and the shift.
pub trait ZOracle: Send + Sync {
    /// `η(n, z)` with `n * z = η(n, z)·z`, for `z ∈ V_0`.
    fn eta(&self, n: i64, z: &dyn Field<i64>) -> Result<i64>;
    /// The `k` with `k * (from·z) = to·z`, for `from·z, to·z ∈ V_0`.
    fn steps(&self, z: &dyn Field<i64>, from: i64, to: i64) -> Result<i64>;
}

/// `V_0 = Z`, `n * z = n·z`.
#[derive(Debug, Clone, Copy)]
pub struct IdentityOracle;

impl ZOracle for IdentityOracle {
    fn eta(&self, n: i64, _: &dyn Field<i64>) -> Result<i64> {
        Ok(n)
    }
    fn steps(&self, _: &dyn Field<i64>, from: i64, to: i64) -> Result<i64> {
        Ok(to - from)
    }
}

/// First-return map to `{z_0 = symbol}`.
#[derive(Debug, Clone, Copy)]
pub struct ReturnOracle {
    pub symbol: u32,
    pub radius: i64,
}

impl ZOracle for ReturnOracle {
    fn eta(&self, n: i64, z: &dyn Field<i64>) -> Result<i64> {
        if z.value(&0)? != self.symbol {
            return Err(Error::Precondition("point outside the return set".into()));
        }
        let step = n.signum();
        let mut pos = 0;
        for _ in 0..n.abs() {
            pos = (1..=self.radius)
                .map(|k| pos + step * k)
                .find_map(|p| match z.value(&p) {
                    Ok(v) if v == self.symbol => Some(Ok(p)),
                    Ok(_) => None,
                    Err(e) => Some(Err(e)),
                })
                .ok_or_else(|| Error::Undetermined(format!("no return within {} steps", self.radius)))??;
        }
        Ok(pos)
    }

    fn steps(&self, z: &dyn Field<i64>, from: i64, to: i64) -> Result<i64> {
        for p in [from, to] {
            if z.value(&p)? != self.symbol {
                return Err(Error::Precondition(format!("position {p} is outside the return set")));
            }
        }
        let (lo, hi) = (from.min(to), from.max(to));
        let mut count = 0;
        for p in lo + 1..=hi {
            if z.value(&p)? == self.symbol {
                count += 1;
            }
        }
        Ok(if to >= from { count } else { -count })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::Configuration;
    use std::collections::BTreeMap;

    fn word(v: &[u32]) -> Configuration<i64> {
        let w: BTreeMap<i64, u32> = v.iter().enumerate().map(|(i, &s)| (i as i64, s)).collect();
        Configuration::from_window(3, w)
    }

    #[test]
    fn adjacent_match() {
        let m = Matcher { radius: 8 };
        assert_eq!(m.forward(&word(&[0, 1]), 1).unwrap(), 1);
    }

    #[test]
    fn nested_match_pairs_outer_brackets() {
        let m = Matcher { radius: 8 };
        let z = word(&[0, 0, 1, 1]);
        assert_eq!(m.forward(&z, 1).unwrap(), 3);
        let inner = word(&[0, 2, 1]);
        assert_eq!(m.forward(&inner, 1).unwrap(), 2);
        assert_eq!(m.forward(&inner, 2).unwrap(), 1);
    }

    #[test]
    fn unresolved_is_undetermined() {
        let m = Matcher { radius: 3 };
        assert!(m.forward(&word(&[0, 0, 0, 1, 1]), 1).unwrap_err().is_undetermined());
        assert!(matches!(m.forward(&word(&[1, 0]), 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn return_oracle_counts_returns() {
        let o = ReturnOracle { symbol: 0, radius: 10 };
        let z = word(&[0, 1, 0, 2, 0]);
        assert_eq!(o.eta(2, &z).unwrap(), 4);
        assert_eq!(o.steps(&z, 0, 4).unwrap(), 2);
        assert_eq!(o.steps(&z, 4, 0).unwrap(), -2);
        assert_eq!(IdentityOracle.steps(&z, 1, 3).unwrap(), 2);
    }
}
