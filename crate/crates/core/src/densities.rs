//! Local densities of the torsor equation, the truncated singular product,
//! the lower-bound sum over squarefree moduli and growth-ratio reports.

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{euler_phi, factorize, is_prime, primes_up_to};
use crate::enumeration::{count, CountReport, Method};
use crate::error::{Error, Result};

pub type DensityValue = Ratio<i128>;

/// Largest prime accepted by [`brute_force_density`].
pub const BRUTE_FORCE_PRIME_LIMIT: u64 = 31;
/// Largest number of terms [`lower_bound_sum`] will add.
pub const LOWER_BOUND_TERM_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityVariant {
    Generic,
    /// `p` divides one `z_{ij}` exactly `e` times.
    Special(u32),
}

fn require_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    if p > 1 << 20 {
        return Err(Error::capacity("local density", format!("prime {p} too large")));
    }
    Ok(())
}

/// `1 - 6/p^2 + 5/p^3`.
pub fn local_density_generic(p: u64) -> Result<DensityValue> {
    require_prime(p)?;
    let p = p as i128;
    Ok(Ratio::new(p * p * p - 6 * p + 5, p * p * p))
}

/// `(1 - 1/p)(1 - 1/p^2) p^{-2e}`.
pub fn local_density_special(p: u64, e: u32) -> Result<DensityValue> {
    require_prime(p)?;
    if e == 0 {
        return Err(Error::InvalidInput("exponent e must be at least 1".into()));
    }
    let pi = p as i128;
    let scale = pi
        .checked_pow(2 * e + 3)
        .ok_or_else(|| Error::capacity("local_density_special", "p^(2e+3) overflows"))?;
    Ok(Ratio::new((pi - 1) * (pi * pi - 1), scale))
}

pub fn local_density(p: u64, variant: DensityVariant) -> Result<DensityValue> {
    match variant {
        DensityVariant::Generic => local_density_generic(p),
        DensityVariant::Special(e) => local_density_special(p, e),
    }
}

/// The residue count behind [`brute_force_density`].
pub fn brute_force_count(p: u64, variant: DensityVariant) -> Result<u64> {
    require_prime(p)?;
    if p > BRUTE_FORCE_PRIME_LIMIT {
        return Err(Error::capacity(
            "brute_force_density",
            format!("p = {p} exceeds {BRUTE_FORCE_PRIME_LIMIT}"),
        ));
    }
    match variant {
        DensityVariant::Generic => Ok(generic_count(p)),
        DensityVariant::Special(e) => {
            if e == 0 {
                return Err(Error::InvalidInput("exponent e must be at least 1".into()));
            }
            Ok(special_count(p))
        }
    }
}

/// Quadruples mod `p` with zero sum and no two entries divisible by `p`.
fn generic_count(p: u64) -> u64 {
    let mut n = 0;
    for x1 in 0..p {
        for x2 in 0..p {
            for x3 in 0..p {
                let x4 = (4 * p - x1 - x2 - x3) % p;
                let zeros = [x1, x2, x3, x4].iter().filter(|&&v| v == 0).count();
                if zeros <= 1 {
                    n += 1;
                }
            }
        }
    }
    n
}

/// `x_1, x_2` mod `p^2` and `x_3, x_4` mod `p` with
/// `x_1 + x_2 + p x_3 + p x_4 ≡ 0 (mod p^2)`, `p ∤ x_1 x_2` and no two of the
/// four divisible by `p`.
fn special_count(p: u64) -> u64 {
    let q = p * p;
    let mut n = 0;
    for x1 in 1..=q {
        if x1 % p == 0 {
            continue;
        }
        for x2 in 1..=q {
            if x2 % p == 0 || (x1 + x2) % p != 0 {
                continue;
            }
            // p x_4 ≡ -(x_1 + x_2 + p x_3) mod p^2, i.e. x_4 ≡ -((x_1+x_2)/p + x_3) mod p
            let s = (x1 + x2) / p;
            for x3 in 1..=p {
                let x4 = (2 * p - (s + x3) % p) % p;
                let x4 = if x4 == 0 { p } else { x4 };
                if x3 % p == 0 && x4 % p == 0 {
                    continue;
                }
                n += 1;
            }
        }
    }
    n
}

/// The count above divided by `p^3` (generic) or `p^{2e+4}` (special).
pub fn brute_force_density(p: u64, variant: DensityVariant) -> Result<DensityValue> {
    let n = brute_force_count(p, variant)? as i128;
    let pi = p as i128;
    let den = match variant {
        DensityVariant::Generic => pi.pow(3),
        DensityVariant::Special(e) => pi
            .checked_pow(2 * e + 4)
            .ok_or_else(|| Error::capacity("brute_force_density", "p^(2e+4) overflows"))?,
    };
    Ok(Ratio::new(n, den))
}

/// `∏_{p <= p_max} (1 - 6/p^2 + 5/p^3)`, multiplied exactly and then rounded.
pub fn singular_product(p_max: u64) -> Result<f64> {
    if p_max < 2 {
        return Err(Error::InvalidInput("p_max must be at least 2".into()));
    }
    if p_max > 1 << 20 {
        return Err(Error::capacity("singular_product", format!("p_max = {p_max} too large")));
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for p in primes_up_to(p_max) {
        let p = BigInt::from(p);
        let p3 = &p * &p * &p;
        num *= &p3 - 6 * &p + 5;
        den *= p3;
    }
    BigRational::new(num, den)
        .to_f64()
        .ok_or_else(|| Error::Internal("singular product not representable".into()))
}

/// A positive rational exponent `num/den` with `0 < num/den <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exponent {
    pub num: u32,
    pub den: u32,
}

impl Exponent {
    pub const DEFAULT: Exponent = Exponent { num: 1, den: 84 };

    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 || num > den {
            return Err(Error::InvalidInput(format!(
                "exponent {num}/{den} must lie in (0, 1]"
            )));
        }
        if den > 10_000 {
            return Err(Error::capacity("exponent", "denominator too large"));
        }
        Ok(Exponent { num, den })
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl std::str::FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("expected p/q, got {s:?}"));
        let (a, b) = s.split_once('/').unwrap_or((s, "1"));
        let num = a.trim().parse().map_err(|_| bad())?;
        let den = b.trim().parse().map_err(|_| bad())?;
        Exponent::new(num, den)
    }
}

/// Largest integer `P` with `P <= B^delta`.
fn power_floor(b: f64, delta: Exponent) -> Result<u64> {
    let approx = b.powf(delta.value());
    if approx > LOWER_BOUND_TERM_LIMIT as f64 {
        return Err(Error::capacity(
            "lower_bound_sum",
            format!("B^delta = {approx} exceeds {LOWER_BOUND_TERM_LIMIT}"),
        ));
    }
    let mut p = approx.floor() as u64;
    if b.fract() == 0.0 && b < 2f64.powi(53) {
        // P^den <= B^num decided exactly
        let bb = BigUint::from(b as u64).pow(delta.num);
        let fits = |p: u64| BigUint::from(p).pow(delta.den) <= bb;
        while p > 1 && !fits(p) {
            p -= 1;
        }
        while fits(p + 1) {
            p += 1;
        }
    }
    Ok(p.max(1))
}

/// `Σ_{P <= B^delta, P squarefree} d_6(P) (B/P) φ(P)/P`.
pub fn lower_bound_sum(b: f64, delta: Exponent) -> Result<f64> {
    if !b.is_finite() || b < 1.0 {
        return Err(Error::InvalidInput(format!("B must be at least 1, got {b}")));
    }
    let limit = power_floor(b, delta)?;
    // Neumaier summation; terms are positive so the result is monotone
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for p in 1..=limit {
        let f = factorize(p);
        if f.iter().any(|&(_, e)| e > 1) {
            continue;
        }
        let d6 = 6f64.powi(f.len() as i32);
        let term = d6 * b * euler_phi(p) as f64 / (p as f64 * p as f64);
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    Ok(sum + comp)
}

/// Counts along a ladder of heights with the growth ratio `N/(B (ln B)^6)`.
pub fn ratio_report(ladder: &[f64], method: Method) -> Result<Vec<CountReport>> {
    if let Some(b) = ladder.iter().find(|&&b| !(b > 1.0)) {
        return Err(Error::InvalidInput(format!("ladder values must exceed 1, got {b}")));
    }
    ladder.iter().map(|&b| count(b, method)).collect()
}

/// One line of the density comparison table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityRow {
    pub p: u64,
    pub variant: &'static str,
    pub e: Option<u32>,
    pub density_formula: String,
    pub density_bruteforce: String,
    pub count: u64,
    pub equal: bool,
}

pub fn density_row(p: u64, variant: DensityVariant) -> Result<DensityRow> {
    let formula = local_density(p, variant)?;
    let brute = brute_force_density(p, variant)?;
    let (name, e) = match variant {
        DensityVariant::Generic => ("generic", None),
        DensityVariant::Special(e) => ("special", Some(e)),
    };
    Ok(DensityRow {
        p,
        variant: name,
        e,
        density_formula: formula.to_string(),
        density_bruteforce: brute.to_string(),
        count: brute_force_count(p, variant)?,
        equal: formula == brute,
    })
}

/// Is `v` in `(0, 1]`?
pub fn is_probability(v: &DensityValue) -> bool {
    *v > Ratio::zero() && *v <= Ratio::one()
}
