//! Half-open dyadic ranges `(K, 2K]`.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DyadicRange {
    base: f64,
}

impl DyadicRange {
    pub fn new(base: f64) -> Result<Self> {
        if !(base.is_finite() && base > 0.0) {
            return Err(Error::InvalidInput(format!(
                "dyadic base must be positive and finite, got {base}"
            )));
        }
        if base > 1e15 {
            return Err(Error::capacity("dyadic range", format!("base {base} too large")));
        }
        Ok(DyadicRange { base })
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    /// Integer form `(lo, hi]` of the range: `K < n <= 2K` iff `lo < n <= hi`.
    pub fn int_bounds(&self) -> (i64, i64) {
        (self.base.floor() as i64, (2.0 * self.base).floor() as i64)
    }

    pub fn contains(&self, n: i64) -> bool {
        let (lo, hi) = self.int_bounds();
        lo < n && n <= hi
    }

    /// Number of integers in the range.
    pub fn len(&self) -> u64 {
        let (lo, hi) = self.int_bounds();
        (hi - lo) as u64
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<i64> {
        let (lo, hi) = self.int_bounds();
        lo + 1..=hi
    }
}
