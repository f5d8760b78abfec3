//! Counting engines for `N(B)`, `N*(B)` and related counts.
//!
//! Two independent engines are provided. The naive oracle scans `x_1, x_2, x_3`
//! and solves the cubic for `x_4`; the torsor enumerator walks the
//! parametrization `x_i = B_i y_j y_k y_l`. Both count vectors, so `x` and `-x`
//! contribute separately.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{mod_inverse, ExactInt};
use crate::dyadic::DyadicRange;
use crate::error::{Error, Result};
use crate::index::Pair;
use crate::surface::{in_open_subset, is_primitive, line_membership, CayleyPoint};
use crate::torsor::TorsorCoords;

/// Largest `B` accepted by the naive oracle.
pub const NAIVE_LIMIT: f64 = 300.0;
/// Largest `B` accepted by the torsor enumerator; keeps the kernel in `i64`.
pub const TORSOR_LIMIT: f64 = 1e7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Naive,
    Torsor,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Naive => "naive",
            Method::Torsor => "torsor",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarMethod {
    Direct,
    Convolution,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountReport {
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "Nstar")]
    pub nstar: Option<u64>,
    /// `N / (B (ln B)^6)`, defined for `B > 1`.
    pub ratio: Option<f64>,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_seconds: Option<f64>,
}

impl CountReport {
    fn new(b: f64, n: u64, method: Method, started: Instant) -> Self {
        CountReport {
            b,
            n,
            nstar: None,
            ratio: growth_ratio(n, b),
            method,
            elapsed_seconds: Some(started.elapsed().as_secs_f64()),
        }
    }
}

pub fn growth_ratio(n: u64, b: f64) -> Option<f64> {
    (b > 1.0).then(|| n as f64 / (b * b.ln().powi(6)))
}

/// `⌊B⌋` after checking `1 <= B <= limit`.
fn height_bound(b: f64, limit: f64, op: &'static str) -> Result<i64> {
    if !b.is_finite() || b < 1.0 {
        return Err(Error::InvalidInput(format!("{op}: B must be at least 1, got {b}")));
    }
    if b > limit {
        return Err(Error::capacity(op, format!("B = {b} exceeds limit {limit}")));
    }
    Ok(b.floor() as i64)
}

#[inline]
fn gcd(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

#[inline]
fn coprime(a: i64, b: i64) -> bool {
    gcd(a.unsigned_abs(), b.unsigned_abs()) == 1
}

// ---------------------------------------------------------------------------
// naive oracle

/// Visits every `x` with `x_1 = x1`, non-zero `x_2, x_3` in `[-n, n]` and the
/// cubic solved for `x_4`, keeping points of `U` (primitive ones only unless
/// `all` is set).
fn naive_slice(n: i64, x1: i64, all: bool, visit: &mut impl FnMut([i64; 4])) {
    for x2 in -n..=n {
        if x2 == 0 {
            continue;
        }
        let p12 = x1 * x2;
        let s12 = x1 + x2;
        for x3 in -n..=n {
            if x3 == 0 {
                continue;
            }
            let s = p12 + x3 * s12;
            if s == 0 {
                continue;
            }
            let num = p12 * x3;
            if num % s != 0 {
                continue;
            }
            let x4 = -num / s;
            if x4.abs() > n {
                continue;
            }
            let x = CayleyPoint::new(x1 as i128, x2 as i128, x3 as i128, x4 as i128);
            if (all || is_primitive(&x)) && in_open_subset(&x).unwrap_or(false) {
                visit([x1, x2, x3, x4]);
            }
        }
    }
}

fn naive_count(n: i64, all: bool) -> u64 {
    (-n..=n)
        .into_par_iter()
        .filter(|&x1| x1 != 0)
        .map(|x1| {
            let mut c = 0u64;
            naive_slice(n, x1, all, &mut |_| c += 1);
            c
        })
        .sum()
}

/// Exact `N(B)` by the brute-force oracle.
pub fn count_naive(b: f64) -> Result<CountReport> {
    let started = Instant::now();
    let n = height_bound(b, NAIVE_LIMIT, "count_naive")?;
    Ok(CountReport::new(b, naive_count(n, false), Method::Naive, started))
}

/// `out[h]` is the number of vectors of height exactly `h`, for `h <= B`, from
/// a single oracle scan. Prefix sums give `N` (or `N*` when `all` is set).
pub fn naive_height_counts(b: f64, all: bool) -> Result<Vec<u64>> {
    let n = height_bound(b, NAIVE_LIMIT, "naive_height_counts")?;
    let hist = (-n..=n)
        .into_par_iter()
        .filter(|&x1| x1 != 0)
        .map(|x1| {
            let mut h = vec![0u64; n as usize + 1];
            naive_slice(n, x1, all, &mut |x| {
                h[x.iter().map(|c| c.unsigned_abs()).max().unwrap() as usize] += 1
            });
            h
        })
        .reduce(
            || vec![0u64; n as usize + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(hist)
}

/// All primitive points of `U` with height at most `B`, sorted, by the oracle.
pub fn naive_points(b: f64) -> Result<Vec<CayleyPoint>> {
    let n = height_bound(b, NAIVE_LIMIT, "naive_points")?;
    let mut pts: Vec<CayleyPoint> = (-n..=n)
        .into_par_iter()
        .filter(|&x1| x1 != 0)
        .flat_map_iter(|x1| {
            let mut v = Vec::new();
            naive_slice(n, x1, false, &mut |x| v.push(CayleyPoint(x.map(|c| c as i128))));
            v
        })
        .collect();
    pts.sort();
    Ok(pts)
}

/// Primitive surface vectors of height at most `B` lying on at least one line.
pub fn count_on_lines(b: f64) -> Result<u64> {
    let n = height_bound(b, NAIVE_LIMIT, "count_on_lines")?;
    let count = (-n..=n)
        .into_par_iter()
        .map(|x1| {
            let mut c = 0u64;
            let mut check = |x: [i64; 4]| {
                let p = CayleyPoint(x.map(|v| v as i128));
                if is_primitive(&p) && !line_membership(&p).is_empty() {
                    c += 1;
                }
            };
            for x2 in -n..=n {
                for x3 in -n..=n {
                    let s = x1 * x2 + x3 * (x1 + x2);
                    let num = x1 * x2 * x3;
                    if s != 0 {
                        if num % s == 0 && (num / s).abs() <= n {
                            check([x1, x2, x3, -num / s]);
                        }
                    } else if num == 0 {
                        for x4 in -n..=n {
                            check([x1, x2, x3, x4]);
                        }
                    }
                }
            }
            c
        })
        .sum();
    Ok(count)
}

// ---------------------------------------------------------------------------
// torsor enumerator

/// Receives each accepted tuple with `y_1 > 0`; the tuple with `-y` is
/// implied. `z` is in [`Pair::ALL`] order.
pub trait TupleVisitor: Send {
    fn visit(&mut self, z: &[i64; 6], y: &[i64; 4]);
    fn merge(&mut self, other: Self);
}

/// Inclusive bounds on each `z_{ij}`.
#[derive(Debug, Clone, Copy)]
struct ZBox {
    lo: [i64; 6],
    hi: [i64; 6],
}

impl ZBox {
    /// Every `z` that can occur at height `n`: `z_{ij}^2 <= 2n`.
    fn full(n: i64) -> ZBox {
        let cap = ((2 * n) as f64).sqrt() as i64 + 1;
        let cap = (0..=cap).rev().find(|c| c * c <= 2 * n).unwrap();
        ZBox {
            lo: [1; 6],
            hi: [cap; 6],
        }
    }
}

/// Walks the `z`-tuples with the given `z_{12}, z_{13}`.
fn for_each_z(n: i64, zb: &ZBox, z12: i64, z13: i64, f: &mut impl FnMut(&[i64; 6])) {
    let p1 = z12 * z13;
    for z14 in zb.lo[2]..=zb.hi[2].min(n / p1) {
        if !coprime(z14, p1) {
            continue;
        }
        let b1 = p1 * z14;
        let hi23 = zb.hi[3].min(n / z12).min(n / z13);
        for z23 in zb.lo[3]..=hi23 {
            if !coprime(z23, b1) {
                continue;
            }
            let hi24 = zb.hi[4].min(n / (z12 * z23)).min(n / z14);
            for z24 in zb.lo[4]..=hi24 {
                if !coprime(z24, b1 * z23) {
                    continue;
                }
                let hi34 = zb.hi[5].min(n / (z13 * z23)).min(n / (z14 * z24));
                for z34 in zb.lo[5]..=hi34 {
                    if !coprime(z34, b1 * z23 * z24) {
                        continue;
                    }
                    f(&[z12, z13, z14, z23, z24, z34]);
                }
            }
        }
    }
}

#[inline]
fn div_floor(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

#[inline]
fn div_ceil(a: i64, b: i64) -> i64 {
    -(-a).div_euclid(b)
}

/// First `t >= lo` with `t ≡ r (mod m)`.
#[inline]
fn first_at_least(lo: i64, r: i64, m: i64) -> i64 {
    lo + (r - lo).rem_euclid(m)
}

/// Enumerates the `y` with `y_1 > 0` completing the pairwise coprime `z` to a
/// valid tuple of height at most `n`.
fn for_each_y(n: i64, z: &[i64; 6], visit: &mut impl FnMut(&[i64; 4])) {
    let [z12, z13, z14, z23, z24, z34] = *z;
    let b = [z12 * z13 * z14, z12 * z23 * z24, z13 * z23 * z34, z14 * z24 * z34];
    if b.iter().any(|&v| v > n) {
        return;
    }
    let a = [z23 * z24 * z34, z13 * z14 * z34, z12 * z14 * z24, z12 * z13 * z23];
    // |x_m| >= B_m |y_j| for m != j
    let mut ym = [0i64; 4];
    for (j, y) in ym.iter_mut().enumerate() {
        let m = (0..4).filter(|&m| m != j).map(|m| b[m]).max().unwrap();
        *y = n / m;
    }
    // z_{ij} v_{ij} = z_ik z_il y_j + z_jk z_jl y_i with v_{ij} != 0
    for p in Pair::ALL {
        let (i, j) = (p.i(), p.j());
        let zij = z[p.index()];
        if zij * zij > b[i] * ym[j] + b[j] * ym[i] {
            return;
        }
    }

    // z_12 | z_23 z_24 y_1 + z_13 z_14 y_2 fixes y_2 mod z_12
    let inv = mod_inverse((z13 * z14) % z12, z12).expect("coprime z");
    let c2 = (-(z23 * z24 % z12) * inv).rem_euclid(z12);
    // a3 y3 + a4 y4 = -(A1 y1 + A2 y2) / z12
    let a3 = z14 * z24;
    let a4 = z13 * z23;
    let inv3 = mod_inverse(a3 % a4, a4).expect("coprime z");
    let max34 = b[2].max(b[3]);

    for y1 in 1..=ym[0] {
        let y2max = ym[1].min(n / (y1 * max34));
        if y2max == 0 {
            break;
        }
        if !coprime(y1, b[0]) {
            continue;
        }
        let r2 = (c2 * (y1 % z12)) % z12;
        let mut y2 = first_at_least(-y2max, r2, z12);
        while y2 <= y2max {
            let cur = y2;
            y2 += z12;
            if cur == 0 || !coprime(cur, b[1]) || !coprime(y1, cur) {
                continue;
            }
            let y2 = cur;
            let r = a[0] as i128 * y1 as i128 + a[1] as i128 * y2 as i128;
            if r == 0 {
                continue;
            }
            debug_assert_eq!(r % z12 as i128, 0);
            let rp = r / z12 as i128;
            let y2a = y2.abs();
            let common = (n / (b[1] * y1)).min(n / (b[0] * y2a));
            let y12 = y1 * y2a;
            let y3m = (n / (b[3] * y12)).min(common);
            let y4m = (n / (b[2] * y12)).min(common);
            if y3m == 0 || y4m == 0 {
                continue;
            }
            if rp.abs() > (a3 * y3m + a4 * y4m) as i128 {
                continue;
            }
            let rp = rp as i64;
            let lo = (-y3m).max(div_ceil(-rp - a4 * y4m, a3));
            let hi = y3m.min(div_floor(-rp + a4 * y4m, a3));
            if lo > hi {
                continue;
            }
            let res = ((-rp).rem_euclid(a4) as i128 * inv3 as i128 % a4 as i128) as i64;
            let mut y3 = first_at_least(lo, res, a4);
            while y3 <= hi {
                let cur = y3;
                y3 += a4;
                if cur == 0 {
                    continue;
                }
                let num = -rp - a3 * cur;
                debug_assert_eq!(num % a4, 0);
                let y4 = num / a4;
                if y4 == 0 {
                    continue;
                }
                let y = [y1, y2, cur, y4];
                if accept(n, &a, &b, &y) {
                    visit(&y);
                }
            }
        }
    }
}

/// Remaining checks for a candidate solving the torsor equation.
#[inline]
fn accept(n: i64, a: &[i64; 4], b: &[i64; 4], y: &[i64; 4]) -> bool {
    let [y1, y2, y3, y4] = *y;
    if !(coprime(y3, b[2]) && coprime(y4, b[3])) {
        return false;
    }
    if !(coprime(y3, y1) && coprime(y3, y2) && coprime(y4, y1) && coprime(y4, y2) && coprime(y3, y4))
    {
        return false;
    }
    let t1 = a[0] as i128 * y1 as i128;
    if t1 + a[2] as i128 * y3 as i128 == 0 || t1 + a[3] as i128 * y4 as i128 == 0 {
        return false;
    }
    let yi = y.map(|v| v as i128);
    let n = n as i128;
    let x = [
        b[0] as i128 * yi[1] * yi[2] * yi[3],
        b[1] as i128 * yi[0] * yi[2] * yi[3],
        b[2] as i128 * yi[0] * yi[1] * yi[3],
        b[3] as i128 * yi[0] * yi[1] * yi[2],
    ];
    x.iter().all(|v| v.abs() <= n)
}

fn drive<V, F>(n: i64, zb: &ZBox, make: F) -> V
where
    V: TupleVisitor,
    F: Fn() -> V + Sync,
{
    let mut outer = Vec::new();
    for z12 in zb.lo[0]..=zb.hi[0] {
        for z13 in zb.lo[1]..=zb.hi[1].min(n / z12) {
            if coprime(z12, z13) {
                outer.push((z12, z13));
            }
        }
    }
    outer
        .into_par_iter()
        .map(|(z12, z13)| {
            let mut v = make();
            for_each_z(n, zb, z12, z13, &mut |z| {
                for_each_y(n, z, &mut |y| v.visit(z, y));
            });
            v
        })
        .reduce(&make, |mut a, b| {
            a.merge(b);
            a
        })
}

#[derive(Default)]
struct Counter(u64);

impl TupleVisitor for Counter {
    fn visit(&mut self, _: &[i64; 6], _: &[i64; 4]) {
        self.0 += 2;
    }
    fn merge(&mut self, other: Self) {
        self.0 += other.0;
    }
}

fn torsor_count(n: i64) -> u64 {
    drive(n, &ZBox::full(n), Counter::default).0
}

/// Exact `N(B)` by the torsor enumerator.
pub fn count_torsor(b: f64) -> Result<CountReport> {
    let started = Instant::now();
    let n = height_bound(b, TORSOR_LIMIT, "count_torsor")?;
    Ok(CountReport::new(b, torsor_count(n), Method::Torsor, started))
}

pub fn count(b: f64, method: Method) -> Result<CountReport> {
    match method {
        Method::Naive => count_naive(b),
        Method::Torsor => count_torsor(b),
    }
}

/// Runs a visitor over every tuple at height `B`; `y_1 > 0` only.
pub fn visit_torsor<V, F>(b: f64, make: F) -> Result<V>
where
    V: TupleVisitor,
    F: Fn() -> V + Sync,
{
    let n = height_bound(b, TORSOR_LIMIT, "visit_torsor")?;
    Ok(drive(n, &ZBox::full(n), make))
}

#[derive(Default)]
struct Collector(Vec<TorsorCoords>);

impl TupleVisitor for Collector {
    fn visit(&mut self, z: &[i64; 6], y: &[i64; 4]) {
        let y = y.map(|v| v as i128);
        let z = z.map(|v| v as i128);
        self.0.push(TorsorCoords { y, z });
        self.0.push(TorsorCoords { y: y.map(|v| -v), z });
    }
    fn merge(&mut self, other: Self) {
        self.0.extend(other.0);
    }
}

/// Every tuple counted by the enumerator at height `B`, both signs, sorted.
pub fn torsor_tuples(b: f64) -> Result<Vec<TorsorCoords>> {
    let mut out = visit_torsor(b, Collector::default)?.0;
    out.sort_by_key(|t| (t.z, t.y));
    Ok(out)
}

/// `N*(B)`: vectors of `U` with height at most `B`, primitive or not.
pub fn count_star(b: f64, method: StarMethod) -> Result<u64> {
    match method {
        StarMethod::Direct => {
            let n = height_bound(b, NAIVE_LIMIT, "count_star")?;
            Ok(naive_count(n, true))
        }
        StarMethod::Convolution => {
            let n = height_bound(b, TORSOR_LIMIT, "count_star")?;
            // N(B/h) depends only on ⌊B/h⌋ = ⌊n/h⌋
            Ok((1..=n).map(|h| torsor_count(n / h)).sum())
        }
    }
}

/// Tuples accepted for one `z`, both signs of `y` counted.
pub fn count_for_fixed_z(z: [ExactInt; 6], b: f64) -> Result<u64> {
    let n = height_bound(b, TORSOR_LIMIT, "count_for_fixed_z")?;
    for p in Pair::ALL {
        if z[p.index()] <= 0 {
            return Err(Error::InvalidInput(format!("z_{} must be positive", p.label())));
        }
    }
    for i in 0..6 {
        for j in i + 1..6 {
            if crate::arith::gcd_u128(z[i] as u128, z[j] as u128) != 1 {
                return Err(Error::InvalidInput(format!(
                    "z_{} and z_{} are not coprime",
                    Pair::ALL[i].label(),
                    Pair::ALL[j].label()
                )));
            }
        }
    }
    if z.iter().any(|&v| v > n as i128) {
        return Ok(0);
    }
    let z = z.map(|v| v as i64);
    let mut c = 0u64;
    for_each_y(n, &z, &mut |_| c += 2);
    Ok(c)
}

struct DyadicCounter {
    x: [(i64, i64); 4],
    count: u64,
}

impl TupleVisitor for DyadicCounter {
    fn visit(&mut self, z: &[i64; 6], y: &[i64; 4]) {
        let b = [z[0] * z[1] * z[2], z[0] * z[3] * z[4], z[1] * z[3] * z[5], z[2] * z[4] * z[5]];
        let ya = y.map(|v| v.unsigned_abs() as u128);
        let xa = [
            b[0] as u128 * ya[1] * ya[2] * ya[3],
            b[1] as u128 * ya[0] * ya[2] * ya[3],
            b[2] as u128 * ya[0] * ya[1] * ya[3],
            b[3] as u128 * ya[0] * ya[1] * ya[2],
        ];
        let inside = xa
            .iter()
            .zip(&self.x)
            .all(|(&v, &(lo, hi))| (lo.max(0) as u128) < v && v <= hi.max(0) as u128);
        if inside {
            self.count += 2;
        }
    }
    fn merge(&mut self, other: Self) {
        self.count += other.count;
    }
}

/// Vectors with `X_i < |x_i| <= 2 X_i`, `Z_{ij} < z_{ij} <= 2 Z_{ij}` and height
/// at most `B`. No reordering of the ranges is applied.
pub fn count_dyadic(x: [DyadicRange; 4], z: [DyadicRange; 6], b: f64) -> Result<u64> {
    let n = height_bound(b, TORSOR_LIMIT, "count_dyadic")?;
    let full = ZBox::full(n);
    let mut zb = full;
    for i in 0..6 {
        let (lo, hi) = z[i].int_bounds();
        zb.lo[i] = lo + 1;
        zb.hi[i] = hi.min(full.hi[i]);
        if zb.lo[i] > zb.hi[i] {
            return Ok(0);
        }
    }
    let make = || DyadicCounter {
        x: x.map(|r| r.int_bounds()),
        count: 0,
    };
    Ok(drive(n, &zb, make).count)
}
