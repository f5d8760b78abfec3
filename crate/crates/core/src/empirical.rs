//! Exact counters for the divisor-type equations in dyadic boxes
//!
//! * `N1`: `n1 n2 n3 + n4 n5 n6 = n7 n8`
//! * `N2`: `n1 n2 n3 = n4 n5 n6 + n7 n8`
//! * `N3`: `n1^2 n2 n3 + n4^2 n5 n6 = n7 n8`
//! * `N4`: `n1^2 n2 n3 - n4^2 n5 n6 = n7 n8`
//!
//! with `K_i < n_i <= 2 K_i` for `i <= 7`, any positive `n8`, and
//! `hcf(n1 n2 n3, n4 n5 n6) = 1`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::gcd_u128;
use crate::dyadic::DyadicRange;
use crate::error::{Error, Result};
use crate::rng::trial_rng;

pub const DEFAULT_CELL_BUDGET: u128 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Variant {
    N1,
    N2,
    N3,
    N4,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::N1, Variant::N2, Variant::N3, Variant::N4];

    fn squared(self) -> bool {
        matches!(self, Variant::N3 | Variant::N4)
    }

    /// `n7 n8 = T1 - T2` rather than `T1 + T2`.
    fn difference(self) -> bool {
        matches!(self, Variant::N2 | Variant::N4)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Variant::N1 => "N1",
            Variant::N2 => "N2",
            Variant::N3 => "N3",
            Variant::N4 => "N4",
        };
        f.write_str(s)
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().trim_start_matches(['N', 'n']) {
            "1" => Ok(Variant::N1),
            "2" => Ok(Variant::N2),
            "3" => Ok(Variant::N3),
            "4" => Ok(Variant::N4),
            _ => Err(Error::InvalidInput(format!("unknown variant {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DyadicTuple7(pub [DyadicRange; 7]);

impl DyadicTuple7 {
    pub fn new(k: [f64; 7]) -> Result<Self> {
        let mut out = [DyadicRange::new(1.0)?; 7];
        for (o, v) in out.iter_mut().zip(k) {
            *o = DyadicRange::new(v)?;
        }
        Ok(DyadicTuple7(out))
    }

    pub fn bases(&self) -> [f64; 7] {
        self.0.map(|r| r.base())
    }

    fn cells(&self) -> u128 {
        self.0.iter().map(|r| r.len() as u128).product()
    }
}

/// `n_1..n_8` of one solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Solution(pub [u64; 8]);

fn terms(variant: Variant, n: &[u64]) -> (u128, u128) {
    let n: Vec<u128> = n.iter().map(|&v| v as u128).collect();
    let (f1, f4) = if variant.squared() {
        (n[0] * n[0], n[3] * n[3])
    } else {
        (n[0], n[3])
    };
    (f1 * n[1] * n[2], f4 * n[4] * n[5])
}

/// Walks the solutions in lexicographic order of `n_1..n_7`.
fn for_each_solution(
    variant: Variant,
    k: &DyadicTuple7,
    budget: u128,
    mut f: impl FnMut(Solution),
) -> Result<()> {
    let cells = k.cells();
    if cells > budget {
        return Err(Error::capacity(
            "lemma counter",
            format!("{cells} cells exceed budget {budget}"),
        ));
    }
    let r = &k.0;
    let mut n = [0u64; 8];
    for n1 in r[0].iter() {
        n[0] = n1 as u64;
        for n2 in r[1].iter() {
            n[1] = n2 as u64;
            for n3 in r[2].iter() {
                n[2] = n3 as u64;
                for n4 in r[3].iter() {
                    n[3] = n4 as u64;
                    for n5 in r[4].iter() {
                        n[4] = n5 as u64;
                        for n6 in r[5].iter() {
                            n[5] = n6 as u64;
                            let (t1, t2) = terms(variant, &n[..6]);
                            if gcd_u128(t1, t2) != 1 {
                                continue;
                            }
                            let residual = if variant.difference() {
                                if t1 <= t2 {
                                    continue;
                                }
                                t1 - t2
                            } else {
                                t1 + t2
                            };
                            for n7 in r[6].iter() {
                                let n7 = n7 as u128;
                                if residual % n7 == 0 {
                                    n[6] = n7 as u64;
                                    n[7] = u64::try_from(residual / n7).map_err(|_| {
                                        Error::capacity("lemma counter", "n8 exceeds 64 bits")
                                    })?;
                                    f(Solution(n));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn count_solutions(variant: Variant, k: &DyadicTuple7, budget: u128) -> Result<u64> {
    let mut c = 0;
    for_each_solution(variant, k, budget, |_| c += 1)?;
    Ok(c)
}

pub fn solutions(variant: Variant, k: &DyadicTuple7, budget: u128) -> Result<Vec<Solution>> {
    let mut v = Vec::new();
    for_each_solution(variant, k, budget, |s| v.push(s))?;
    Ok(v)
}

/// Counts for the first pair of equations (`N1`, `N2`).
pub fn count_lemma3(variant: Variant, k: &DyadicTuple7) -> Result<u64> {
    if variant.squared() {
        return Err(Error::InvalidInput(format!("{variant} is not N1 or N2")));
    }
    count_solutions(variant, k, DEFAULT_CELL_BUDGET)
}

/// Counts for the squared pair of equations (`N3`, `N4`).
pub fn count_lemma4(variant: Variant, k: &DyadicTuple7) -> Result<u64> {
    if !variant.squared() {
        return Err(Error::InvalidInput(format!("{variant} is not N3 or N4")));
    }
    count_solutions(variant, k, DEFAULT_CELL_BUDGET)
}

/// Re-checks a solution: ranges, the equation, the coprimality condition and
/// pairwise coprimality of the three terms.
pub fn verify_solution(variant: Variant, k: &DyadicTuple7, s: &Solution) -> bool {
    let n = &s.0;
    if !(0..7).all(|i| k.0[i].contains(n[i] as i64)) || n[7] == 0 {
        return false;
    }
    let (t1, t2) = terms(variant, &n[..6]);
    let t3 = n[6] as u128 * n[7] as u128;
    let holds = if variant.difference() {
        t1 == t2 + t3
    } else {
        t1 + t2 == t3
    };
    let p1: u128 = n[..3].iter().map(|&v| v as u128).product();
    let p2: u128 = n[3..6].iter().map(|&v| v as u128).product();
    holds
        && gcd_u128(p1, p2) == 1
        && gcd_u128(t1, t2) == 1
        && gcd_u128(t1, t3) == 1
        && gcd_u128(t2, t3) == 1
}

/// The reference size each count is compared against.
pub fn bound_value(variant: Variant, k: &DyadicTuple7) -> f64 {
    let k = k.bases();
    let base: f64 = k[..6].iter().product();
    if !variant.squared() {
        return base;
    }
    let r = (k[0] * k[0] * k[1] * k[2]) / (k[3] * k[3] * k[4] * k[5]);
    let balance = r.powf(0.25).max(r.powf(-0.25));
    let mut b = base * balance;
    if variant == Variant::N4 {
        // the logarithm is negative for small boxes; it is clamped at zero
        let log = (k[0] * k[3]).ln().max(0.0);
        b *= 1.0 + log / (k[1] * k[2] * k[4] * k[5]).cbrt();
    }
    b
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub trial: u64,
    pub k: [f64; 7],
    pub count: u64,
    pub bound_value: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub variant: Variant,
    pub seed: u64,
    pub budget: u128,
    pub rows: Vec<ScanRow>,
    pub max_ratio: Option<f64>,
}

/// Random dyadic tuple `K_i = 2^{e_i - 1}` with `∏ max(K_i, 1) <= budget`,
/// which also bounds the number of cells scanned.
pub fn random_tuple(seed: u64, trial: u64, budget: u128) -> Result<DyadicTuple7> {
    if budget < 1 {
        return Err(Error::InvalidInput("budget must be positive".into()));
    }
    let emax = (128 - budget.leading_zeros()).min(40) as i32;
    let mut rng = trial_rng(seed, trial);
    loop {
        let e: [i32; 7] = [(); 7].map(|_| rng.random_range(0..=emax));
        let size: i32 = e.iter().map(|&v| (v - 1).max(0)).sum();
        if size < 128 && (1u128 << size) <= budget {
            return DyadicTuple7::new(e.map(|v| 2f64.powi(v - 1)));
        }
    }
}

pub fn ratio_scan(variant: Variant, trials: u64, seed: u64, budget: u128) -> Result<ScanReport> {
    let rows = (0..trials)
        .into_par_iter()
        .map(|t| {
            let k = random_tuple(seed, t, budget)?;
            let count = count_solutions(variant, &k, DEFAULT_CELL_BUDGET)?;
            let bound = bound_value(variant, &k);
            Ok(ScanRow {
                trial: t,
                k: k.bases(),
                count,
                bound_value: bound,
                ratio: count as f64 / bound,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_ratio = rows.iter().map(|r| r.ratio).reduce(f64::max);
    Ok(ScanReport {
        variant,
        seed,
        budget,
        rows,
        max_ratio,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendPoint {
    pub k: f64,
    pub count: u64,
    /// `N4 / (K_1 K_4)`.
    pub ratio: f64,
}

/// `N4` with `K_1 = K_4 = K_7 = K` and the other four bases `1/2`.
pub fn n4_trend(ks: &[f64]) -> Result<Vec<TrendPoint>> {
    ks.iter()
        .map(|&k| {
            let t = DyadicTuple7::new([k, 0.5, 0.5, k, 0.5, 0.5, k])?;
            let count = count_solutions(Variant::N4, &t, DEFAULT_CELL_BUDGET)?;
            Ok(TrendPoint {
                k,
                count,
                ratio: count as f64 / (k * k),
            })
        })
        .collect()
}
