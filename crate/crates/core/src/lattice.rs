//! Geometry-of-numbers kernels: exact lattice point counts next to the
//! closed-form upper bounds they are compared against, the index of the
//! divisibility lattices used for the local densities, and counting in
//! arithmetic progressions.

use std::f64::consts::PI;

use num_integer::Integer;
use num_rational::Ratio;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{gcd_i64, gcd_u128, ExactInt};
use crate::dyadic::DyadicRange;
use crate::error::{Error, Result};
use crate::rng::trial_rng;

pub const DEFAULT_CELL_BUDGET: u64 = 100_000_000;

/// A plane `v·x = 0` intersected with the closed box `|x_i| <= H_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlaneBoxQuery {
    v: [i64; 3],
    h: [f64; 3],
}

impl PlaneBoxQuery {
    pub fn new(v: [i64; 3], h: [f64; 3]) -> Result<Self> {
        let g = gcd_i64(gcd_i64(v[0], v[1]), v[2]);
        if g != 1 {
            return Err(Error::InvalidInput(format!(
                "plane normal {v:?} must be primitive and non-zero"
            )));
        }
        if v.iter().any(|c| c.unsigned_abs() > 1 << 40) {
            return Err(Error::capacity("plane box query", "normal too large"));
        }
        if h.iter().any(|&x| !(x.is_finite() && x > 0.0 && x < 1e12)) {
            return Err(Error::InvalidInput(format!(
                "box bounds {h:?} must be positive and finite"
            )));
        }
        Ok(PlaneBoxQuery { v, h })
    }

    pub fn v(&self) -> [i64; 3] {
        self.v
    }

    pub fn h(&self) -> [f64; 3] {
        self.h
    }
}

/// Exact number of primitive `x` with `v·x = 0` and `|x_i| <= H_i`.
///
/// Two coordinates are scanned and the third is solved for; the solved
/// coordinate is the one with the largest box side among those with
/// `v_k != 0`.
pub fn count_primitive_on_plane(q: &PlaneBoxQuery, cell_budget: u64) -> Result<u64> {
    let hb = q.h.map(|x| x.floor() as i64);
    let k = (0..3)
        .filter(|&i| q.v[i] != 0)
        .max_by_key(|&i| (hb[i], std::cmp::Reverse(i)))
        .expect("primitive v is non-zero");
    let (a, b) = match k {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let cells = (2 * hb[a] as u128 + 1) * (2 * hb[b] as u128 + 1);
    if cells > cell_budget as u128 {
        return Err(Error::capacity(
            "count_primitive_on_plane",
            format!("{cells} cells exceed budget {cell_budget}"),
        ));
    }
    let (va, vb, vk) = (q.v[a] as i128, q.v[b] as i128, q.v[k] as i128);
    let mut count = 0u64;
    for xa in -hb[a]..=hb[a] {
        for xb in -hb[b]..=hb[b] {
            let num = -(va * xa as i128 + vb * xb as i128);
            if num % vk != 0 {
                continue;
            }
            let xk = num / vk;
            if xk.unsigned_abs() > hb[k] as u128 {
                continue;
            }
            if gcd_i64(gcd_i64(xa, xb), xk as i64) == 1 {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// `4 + 12π H_1 H_2 H_3 / max_i H_i |v_i|`.
pub fn primitive_plane_bound(q: &PlaneBoxQuery) -> f64 {
    let denom = (0..3)
        .map(|i| q.h[i] * q.v[i].unsigned_abs() as f64)
        .fold(0.0f64, f64::max);
    4.0 + 12.0 * PI * q.h[0] * q.h[1] * q.h[2] / denom
}

/// An integer lattice `M Z^2`; the columns of `basis` are the generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Lattice2 {
    basis: [[i64; 2]; 2],
}

impl Lattice2 {
    pub fn new(basis: [[i64; 2]; 2]) -> Result<Self> {
        if basis.iter().flatten().any(|c| c.unsigned_abs() > 1 << 20) {
            return Err(Error::capacity("Lattice2", "basis entries too large"));
        }
        let l = Lattice2 { basis };
        if l.det() == 0 {
            return Err(Error::InvalidInput(format!("singular lattice basis {basis:?}")));
        }
        Ok(l)
    }

    pub fn identity() -> Self {
        Lattice2 {
            basis: [[1, 0], [0, 1]],
        }
    }

    pub fn basis(&self) -> [[i64; 2]; 2] {
        self.basis
    }

    pub fn det(&self) -> i64 {
        let m = &self.basis;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }
}

pub type Rational = Ratio<i64>;

/// The region `a u1² + 2b u1 u2 + c u2² <= 1`; `a > 0`, `ac − b² > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ellipse {
    a: Rational,
    b: Rational,
    c: Rational,
}

impl Ellipse {
    pub fn new(a: Rational, b: Rational, c: Rational) -> Result<Self> {
        let zero = Rational::from_integer(0);
        let bound = 1i64 << 24;
        for r in [a, b, c] {
            if r.numer().abs() > bound || *r.denom() > bound {
                return Err(Error::capacity("Ellipse", "form coefficient too large"));
            }
        }
        if a <= zero || a * c - b * b <= zero {
            return Err(Error::InvalidInput(format!(
                "form ({a}, {b}, {c}) is not positive definite"
            )));
        }
        Ok(Ellipse { a, b, c })
    }

    /// The disc `u1² + u2² <= r²`.
    pub fn disc(r: i64) -> Result<Self> {
        let inv = Rational::new(1, r * r);
        Ellipse::new(inv, Rational::from_integer(0), inv)
    }

    pub fn coefficients(&self) -> (Rational, Rational, Rational) {
        (self.a, self.b, self.c)
    }

    pub fn area(&self) -> f64 {
        let d = self.a * self.c - self.b * self.b;
        PI / (*d.numer() as f64 / *d.denom() as f64).sqrt()
    }
}

/// Exact number of lattice points `M n` (including the origin) in `e`.
pub fn count_lattice_in_ellipse(l: &Lattice2, e: &Ellipse, cell_budget: u64) -> Result<u64> {
    // Clear denominators: q(u) <= 1  <=>  A u1² + 2B u1u2 + C u2² <= D.
    let d = e.a.denom().lcm(e.b.denom()).lcm(e.c.denom()) as i128;
    let scale = |r: &Rational| *r.numer() as i128 * (d / *r.denom() as i128);
    let (fa, fb, fc) = (scale(&e.a), scale(&e.b), scale(&e.c));
    let m = l.basis.map(|row| row.map(|v| v as i128));
    // Pull the form back to n-coordinates, u = M n.
    let alpha = fa * m[0][0] * m[0][0] + 2 * fb * m[0][0] * m[1][0] + fc * m[1][0] * m[1][0];
    let beta = fa * m[0][0] * m[0][1]
        + fb * (m[0][0] * m[1][1] + m[0][1] * m[1][0])
        + fc * m[1][0] * m[1][1];
    let gamma = fa * m[0][1] * m[0][1] + 2 * fb * m[0][1] * m[1][1] + fc * m[1][1] * m[1][1];
    let delta = alpha * gamma - beta * beta;
    debug_assert!(delta > 0);

    let n1_max = ((d as f64) * (gamma as f64) / (delta as f64)).sqrt().floor() as i128 + 1;
    let mut cells = 0u128;
    let mut count = 0u64;
    for n1 in -n1_max..=n1_max {
        // gamma n2² + 2 beta n1 n2 + (alpha n1² − D) <= 0
        let disc = gamma * d - delta * n1 * n1;
        if disc < 0 {
            continue;
        }
        let root = (disc as f64).sqrt();
        let centre = -(beta * n1) as f64;
        let lo = ((centre - root) / gamma as f64).floor() as i128 - 1;
        let hi = ((centre + root) / gamma as f64).ceil() as i128 + 1;
        cells += (hi - lo + 1) as u128;
        if cells > cell_budget as u128 {
            return Err(Error::capacity(
                "count_lattice_in_ellipse",
                format!("more than {cell_budget} cells"),
            ));
        }
        for n2 in lo..=hi {
            if alpha * n1 * n1 + 2 * beta * n1 * n2 + gamma * n2 * n2 <= d {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// `4 (1 + meas(E) / det(Λ))`.
pub fn ellipse_lattice_bound(l: &Lattice2, e: &Ellipse) -> f64 {
    4.0 * (1.0 + e.area() / l.det().unsigned_abs() as f64)
}

/// Index in `Z^3` of `{n : m_i | n_i (i <= 3), m_4 | n_1 + n_2 + n_3}`, by the
/// closed form `∏ m_i / hcf(m_1, .., m_4)`.
pub fn divisibility_lattice_det(m: [u64; 4]) -> Result<u128> {
    if m.contains(&0) {
        return Err(Error::InvalidInput("moduli must be positive".into()));
    }
    let prod = m
        .iter()
        .try_fold(1u128, |acc, &v| acc.checked_mul(v as u128))
        .ok_or_else(|| Error::overflow("divisibility_lattice_det"))?;
    let g = m.iter().fold(0u128, |g, &v| gcd_u128(g, v as u128));
    Ok(prod / g)
}

/// `#{n : lo < n <= hi, n ≡ residue (mod modulus)}` for integer bounds.
pub fn count_in_ap_int(lo: i64, hi: i64, modulus: u64, residue: i64) -> u64 {
    assert!(modulus >= 1, "modulus must be positive");
    if hi <= lo {
        return 0;
    }
    let m = modulus as i128;
    let r = residue as i128;
    let upto = |x: i64| (x as i128 - r).div_euclid(m);
    (upto(hi) - upto(lo)) as u64
}

/// `#{n : lo < n <= hi, n ≡ residue (mod modulus)}` for real bounds.
pub fn count_in_ap(lo: f64, hi: f64, modulus: u64, residue: i64) -> u64 {
    count_in_ap_int(lo.floor() as i64, hi.floor() as i64, modulus, residue)
}

/// Triples `n_i ∈ (K_i, 2K_i]` with `n_1 n_2 n_3 ≡ a (mod q)`, by direct loop.
pub fn progression_product_count(
    k: [DyadicRange; 3],
    a: ExactInt,
    q: u64,
    cell_budget: u64,
) -> Result<u64> {
    if q == 0 {
        return Err(Error::InvalidInput("modulus must be positive".into()));
    }
    if gcd_u128(a.unsigned_abs(), q as u128) != 1 {
        return Err(Error::InvalidInput(format!("residue {a} is not coprime to {q}")));
    }
    let cells = k.iter().map(|r| r.len() as u128).product::<u128>();
    if cells > cell_budget as u128 {
        return Err(Error::capacity(
            "progression_product_count",
            format!("{cells} cells exceed budget {cell_budget}"),
        ));
    }
    let m = q as u128;
    let target = a.rem_euclid(q as i128) as u128;
    let mut count = 0u64;
    for n1 in k[0].iter() {
        for n2 in k[1].iter() {
            let p12 = (n1 as u128 * n2 as u128) % m;
            for n3 in k[2].iter() {
                if (p12 * n3 as u128) % m == target {
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

/// Outcome of a randomized bound check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck<Q> {
    pub trials: u64,
    pub violations: u64,
    /// Largest observed `count / bound`.
    pub max_ratio: f64,
    pub worst: Option<BoundSample<Q>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundSample<Q> {
    pub trial: u64,
    pub query: Q,
    pub count: u64,
    pub bound: f64,
}

fn aggregate<Q: Clone + Send>(samples: Vec<BoundSample<Q>>) -> BoundCheck<Q> {
    let trials = samples.len() as u64;
    let violations = samples.iter().filter(|s| s.count as f64 > s.bound).count() as u64;
    // ties broken by trial index so the result is independent of scheduling
    let worst = samples
        .into_iter()
        .max_by(|x, y| {
            let rx = x.count as f64 / x.bound;
            let ry = y.count as f64 / y.bound;
            rx.total_cmp(&ry).then(y.trial.cmp(&x.trial))
        });
    let max_ratio = worst
        .as_ref()
        .map(|s| s.count as f64 / s.bound)
        .unwrap_or(0.0);
    BoundCheck {
        trials,
        violations,
        max_ratio,
        worst,
    }
}

/// Random query: primitive `|v_i| <= 20`, `H_i ∈ (0, 10]`.
pub fn random_plane_query(seed: u64, trial: u64) -> PlaneBoxQuery {
    let mut rng = trial_rng(seed, trial);
    loop {
        let v = [(); 3].map(|_| rng.random_range(-20i64..=20));
        let h = [(); 3].map(|_| 10.0 - rng.random_range(0.0..10.0));
        if let Ok(q) = PlaneBoxQuery::new(v, h) {
            return q;
        }
    }
}

pub fn check_plane_bound_random(trials: u64, seed: u64) -> Result<BoundCheck<PlaneBoxQuery>> {
    let samples = (0..trials)
        .into_par_iter()
        .map(|t| {
            let q = random_plane_query(seed, t);
            let count = count_primitive_on_plane(&q, DEFAULT_CELL_BUDGET)?;
            Ok(BoundSample {
                trial: t,
                query: q,
                count,
                bound: primitive_plane_bound(&q),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(samples))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllipseQuery {
    pub basis: [[i64; 2]; 2],
    /// `(a, b, c)` as `[numerator, denominator]` pairs.
    pub form: [[i64; 2]; 3],
    pub det: i64,
    pub area: f64,
}

/// Random integer lattice (entries in `[-10, 10]`) and rational ellipse with
/// area at most `10^3`.
pub fn random_ellipse_query(seed: u64, trial: u64) -> (Lattice2, Ellipse) {
    let mut rng = trial_rng(seed, trial);
    let lattice = loop {
        let basis = [(); 2].map(|_| [(); 2].map(|_| rng.random_range(-10i64..=10)));
        if let Ok(l) = Lattice2::new(basis) {
            break l;
        }
    };
    loop {
        let a = Rational::new(rng.random_range(1..=100), rng.random_range(1..=100));
        let c = Rational::new(rng.random_range(1..=100), rng.random_range(1..=100));
        let b = Rational::new(rng.random_range(-100..=100), rng.random_range(1..=100));
        if let Ok(e) = Ellipse::new(a, b, c) {
            if e.area() <= 1e3 {
                return (lattice, e);
            }
        }
    }
}

pub fn check_ellipse_bound_random(trials: u64, seed: u64) -> Result<BoundCheck<EllipseQuery>> {
    let samples = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (l, e) = random_ellipse_query(seed, t);
            let count = count_lattice_in_ellipse(&l, &e, DEFAULT_CELL_BUDGET)?;
            let (a, b, c) = e.coefficients();
            let pair = |r: Rational| [*r.numer(), *r.denom()];
            Ok(BoundSample {
                trial: t,
                query: EllipseQuery {
                    basis: l.basis(),
                    form: [pair(a), pair(b), pair(c)],
                    det: l.det(),
                    area: e.area(),
                },
                count,
                bound: ellipse_lattice_bound(&l, &e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane(v: [i64; 3], h: [f64; 3]) -> PlaneBoxQuery {
        PlaneBoxQuery::new(v, h).unwrap()
    }

    /// Full box scan, no coordinate solved for.
    fn plane_scan(q: &PlaneBoxQuery) -> u64 {
        let hb = q.h().map(|x| x.floor() as i64);
        let v = q.v();
        let mut n = 0;
        for a in -hb[0]..=hb[0] {
            for b in -hb[1]..=hb[1] {
                for c in -hb[2]..=hb[2] {
                    if v[0] * a + v[1] * b + v[2] * c == 0 && gcd_i64(gcd_i64(a, b), c) == 1 {
                        n += 1;
                    }
                }
            }
        }
        n
    }

    #[test]
    fn plane_examples() {
        let q = plane([1, 1, 1], [2.0; 3]);
        assert_eq!(count_primitive_on_plane(&q, DEFAULT_CELL_BUDGET).unwrap(), 12);
        assert!((primitive_plane_bound(&q) - (4.0 + 48.0 * PI)).abs() < 1e-12);
        assert!((primitive_plane_bound(&q) - 154.796).abs() < 1e-3);

        let q = plane([1, 0, 0], [1.0; 3]);
        assert_eq!(count_primitive_on_plane(&q, DEFAULT_CELL_BUDGET).unwrap(), 8);
        assert!((primitive_plane_bound(&q) - (4.0 + 12.0 * PI)).abs() < 1e-12);

        let q = plane([1, 2, 3], [1.0; 3]);
        assert_eq!(count_primitive_on_plane(&q, DEFAULT_CELL_BUDGET).unwrap(), 2);
    }

    #[test]
    fn plane_rejects_bad_queries() {
        assert!(PlaneBoxQuery::new([2, 4, 6], [1.0; 3]).is_err());
        assert!(PlaneBoxQuery::new([0, 0, 0], [1.0; 3]).is_err());
        assert!(PlaneBoxQuery::new([1, 0, 0], [1.0, -1.0, 1.0]).is_err());
        let q = plane([1, 1, 1], [1e5, 1e5, 1e5]);
        assert!(matches!(
            count_primitive_on_plane(&q, 1000),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn plane_solver_matches_box_scan() {
        for t in 0..300 {
            let q = random_plane_query(11, t);
            assert_eq!(
                count_primitive_on_plane(&q, DEFAULT_CELL_BUDGET).unwrap(),
                plane_scan(&q),
                "{q:?}"
            );
        }
    }

    #[test]
    fn ellipse_examples() {
        let disc = Ellipse::disc(1).unwrap();
        let id = Lattice2::identity();
        assert_eq!(count_lattice_in_ellipse(&id, &disc, DEFAULT_CELL_BUDGET).unwrap(), 5);
        assert!((ellipse_lattice_bound(&id, &disc) - 4.0 * (1.0 + PI)).abs() < 1e-12);
        assert!((ellipse_lattice_bound(&id, &disc) - 16.566).abs() < 1e-3);

        let three = Lattice2::new([[3, 0], [0, 3]]).unwrap();
        assert_eq!(count_lattice_in_ellipse(&three, &disc, DEFAULT_CELL_BUDGET).unwrap(), 1);

        let det10 = Lattice2::new([[2, 1], [0, 5]]).unwrap();
        assert_eq!(det10.det(), 10);
        assert!((ellipse_lattice_bound(&det10, &disc) - 4.0 * (1.0 + PI / 10.0)).abs() < 1e-12);

        let r10 = Ellipse::disc(10).unwrap();
        let scan = (-10i64..=10)
            .flat_map(|a| (-10i64..=10).map(move |b| a * a + b * b))
            .filter(|&s| s <= 100)
            .count() as u64;
        assert_eq!(scan, 317);
        assert_eq!(count_lattice_in_ellipse(&id, &r10, DEFAULT_CELL_BUDGET).unwrap(), scan);
    }

    #[test]
    fn ellipse_count_matches_point_scan() {
        for t in 0..200 {
            let (l, e) = random_ellipse_query(5, t);
            let (a, b, c) = e.coefficients();
            let m = l.basis();
            let fast = count_lattice_in_ellipse(&l, &e, DEFAULT_CELL_BUDGET).unwrap();
            // scan a generous box in n-space with exact rational evaluation
            let reach = 80;
            let mut slow = 0;
            for n1 in -reach..=reach {
                for n2 in -reach..=reach {
                    let u1 = Rational::from_integer(m[0][0] * n1 + m[0][1] * n2);
                    let u2 = Rational::from_integer(m[1][0] * n1 + m[1][1] * n2);
                    let two = Rational::from_integer(2);
                    if a * u1 * u1 + two * b * u1 * u2 + c * u2 * u2 <= Rational::from_integer(1) {
                        slow += 1;
                    }
                }
            }
            if fast < 2000 {
                assert_eq!(fast, slow, "trial {t}: {l:?} {e:?}");
            }
        }
    }

    #[test]
    fn ellipse_rejects_indefinite_forms() {
        let r = |n, d| Rational::new(n, d);
        assert!(Ellipse::new(r(1, 1), r(2, 1), r(1, 1)).is_err());
        assert!(Ellipse::new(r(-1, 1), r(0, 1), r(-1, 1)).is_err());
        assert!(Lattice2::new([[1, 2], [2, 4]]).is_err());
    }

    #[test]
    fn divisibility_det_examples() {
        assert_eq!(divisibility_lattice_det([2, 3, 1, 6]).unwrap(), 36);
        assert_eq!(divisibility_lattice_det([7, 7, 7, 7]).unwrap(), 343);
        assert_eq!(divisibility_lattice_det([1, 1, 1, 1]).unwrap(), 1);
        assert!(divisibility_lattice_det([0, 1, 1, 1]).is_err());
    }

    #[test]
    fn ap_examples() {
        assert_eq!(count_in_ap(0.0, 10.0, 3, 1), 4);
        assert_eq!(count_in_ap(0.0, 10.0, 1, 0), 10);
        assert_eq!(count_in_ap(5.0, 5.0, 2, 1), 0);
        assert_eq!(count_in_ap(-10.0, 10.0, 4, -1), 5);
        for lo in -12i64..12 {
            for hi in -12i64..12 {
                for m in 1u64..6 {
                    for r in -6i64..6 {
                        let brute = (lo + 1..=hi).filter(|n| (n - r).rem_euclid(m as i64) == 0).count();
                        assert_eq!(count_in_ap_int(lo, hi, m, r), brute as u64);
                    }
                }
            }
        }
    }

    #[test]
    fn progression_product_examples() {
        let k = |x: f64| DyadicRange::new(x).unwrap();
        assert_eq!(progression_product_count([k(0.5); 3], 1, 5, u64::MAX).unwrap(), 1);
        assert_eq!(progression_product_count([k(1.0); 3], 1, 5, u64::MAX).unwrap(), 0);
        assert_eq!(progression_product_count([k(1.0); 3], 3, 5, u64::MAX).unwrap(), 1);
        assert!(progression_product_count([k(1.0); 3], 5, 5, u64::MAX).is_err());
    }

    #[test]
    fn progression_counts_average_over_residues() {
        let k = |x: f64| DyadicRange::new(x).unwrap();
        for q in 1u64..=30 {
            for kk in [[0.5, 1.0, 2.0], [3.0, 4.0, 8.0], [8.0, 8.0, 1.0]] {
                let ranges = kk.map(k);
                let total: u64 = (0..q as i128)
                    .filter(|&a| gcd_u128(a as u128, q as u128) == 1)
                    .map(|a| progression_product_count(ranges, a, q, u64::MAX).unwrap())
                    .sum();
                let mut coprime = 0;
                for n1 in ranges[0].iter() {
                    for n2 in ranges[1].iter() {
                        for n3 in ranges[2].iter() {
                            if gcd_u128((n1 * n2 * n3) as u128, q as u128) == 1 {
                                coprime += 1;
                            }
                        }
                    }
                }
                assert_eq!(total, coprime, "q={q} K={kk:?}");
            }
        }
    }

    #[test]
    fn random_checks_are_reproducible() {
        let a = check_plane_bound_random(200, 3).unwrap();
        let b = check_plane_bound_random(200, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.violations, 0);
        let e = check_ellipse_bound_random(200, 3).unwrap();
        assert_eq!(e.violations, 0);
    }
}
