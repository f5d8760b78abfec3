//! The Cayley cubic `X2X3X4 + X1X3X4 + X1X2X4 + X1X2X3 = 0`, its nine lines
//! and the open subset `U` obtained by removing them.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::arith::{checked_add, checked_product, hcf, ExactInt};
use crate::error::Result;
use crate::index::{others, Pair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct CayleyPoint(pub [ExactInt; 4]);

impl CayleyPoint {
    pub fn new(x1: ExactInt, x2: ExactInt, x3: ExactInt, x4: ExactInt) -> Self {
        CayleyPoint([x1, x2, x3, x4])
    }

    pub fn coords(&self) -> &[ExactInt; 4] {
        &self.0
    }

    pub fn neg(&self) -> Option<Self> {
        let mut out = [0; 4];
        for (o, &v) in out.iter_mut().zip(&self.0) {
            *o = v.checked_neg()?;
        }
        Some(CayleyPoint(out))
    }

    /// `max |x_i|`, the height used by every counting function.
    pub fn height(&self) -> u128 {
        self.0.iter().map(|v| v.unsigned_abs()).max().unwrap()
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0; 4]
    }
}

impl fmt::Display for CayleyPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "({a},{b},{c},{d})")
    }
}

/// One of the nine lines on the surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LineId {
    /// `X_i + X_j = X_k + X_l = 0`, identified by the pair containing index 1.
    PairSum(Pair),
    /// `X_i = X_j = 0`.
    DoubleZero(Pair),
}

impl LineId {
    pub fn all() -> Vec<LineId> {
        let sums = Pair::ALL
            .iter()
            .filter(|p| p.contains(0))
            .map(|&p| LineId::PairSum(p));
        let zeros = Pair::ALL.iter().map(|&p| LineId::DoubleZero(p));
        sums.chain(zeros).collect()
    }

    pub fn contains(&self, x: &CayleyPoint) -> bool {
        let v = &x.0;
        // an i128 sum of two coordinates is zero iff they are exact negatives
        match *self {
            LineId::PairSum(p) => {
                let q = p.complement();
                v[p.i()].checked_neg() == Some(v[p.j()])
                    && v[q.i()].checked_neg() == Some(v[q.j()])
            }
            LineId::DoubleZero(p) => v[p.i()] == 0 && v[p.j()] == 0,
        }
    }
}

impl fmt::Display for LineId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LineId::PairSum(p) => write!(f, "PAIR_SUM {}|{}", p, p.complement()),
            LineId::DoubleZero(p) => write!(f, "DOUBLE_ZERO {p}"),
        }
    }
}

pub fn evaluate_cubic(x: &CayleyPoint) -> Result<ExactInt> {
    let v = &x.0;
    (0..4).try_fold(0i128, |acc, i| {
        let [a, b, c] = others(i);
        let term = checked_product(&[v[a], v[b], v[c]], "evaluate_cubic")?;
        checked_add(acc, term, "evaluate_cubic")
    })
}

pub fn is_primitive(x: &CayleyPoint) -> bool {
    matches!(hcf(&x.0), Ok(1))
}

/// Every line through `x`; a point may lie on several.
pub fn line_membership(x: &CayleyPoint) -> BTreeSet<LineId> {
    LineId::all().into_iter().filter(|l| l.contains(x)).collect()
}

/// True iff `x` is a non-zero point of the surface lying on none of the lines.
pub fn in_open_subset(x: &CayleyPoint) -> Result<bool> {
    if x.is_zero() {
        return Ok(false);
    }
    Ok(evaluate_cubic(x)? == 0 && line_membership(x).is_empty())
}
