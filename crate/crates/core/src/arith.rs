//! Exact elementary number theory shared by the rest of the crate.
//!
//! [`ExactInt`] is a signed 128-bit integer. Every fallible operation goes
//! through the `checked_*` helpers, which turn overflow into
//! [`Error::Capacity`] instead of wrapping. Arguments of the multiplicative
//! functions (`mobius`, `euler_phi`, ...) are positive and small enough for
//! trial division, so they are taken as `u64`.

use crate::error::{Error, Result};

/// Exact signed integer used for every integer-valued quantity.
pub type ExactInt = i128;

pub fn checked_add(a: ExactInt, b: ExactInt, op: &'static str) -> Result<ExactInt> {
    a.checked_add(b).ok_or_else(|| Error::overflow(op))
}

pub fn checked_sub(a: ExactInt, b: ExactInt, op: &'static str) -> Result<ExactInt> {
    a.checked_sub(b).ok_or_else(|| Error::overflow(op))
}

pub fn checked_mul(a: ExactInt, b: ExactInt, op: &'static str) -> Result<ExactInt> {
    a.checked_mul(b).ok_or_else(|| Error::overflow(op))
}

pub fn checked_product(values: &[ExactInt], op: &'static str) -> Result<ExactInt> {
    values
        .iter()
        .try_fold(1i128, |acc, &v| checked_mul(acc, v, op))
}

/// Exact quotient; errors if `den` does not divide `num`.
pub fn exact_div(num: ExactInt, den: ExactInt, op: &'static str) -> Result<ExactInt> {
    if den == 0 {
        return Err(Error::Internal(format!("{op}: division by zero")));
    }
    let q = num.checked_div(den).ok_or_else(|| Error::overflow(op))?;
    if q * den != num {
        return Err(Error::Internal(format!("{op}: {den} does not divide {num}")));
    }
    Ok(q)
}

pub fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Non-negative gcd for the enumeration kernels, whose inputs are bounded far
/// below `i64::MAX`.
#[inline]
pub fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a as i64
}

/// Highest common factor of a non-empty list, always non-negative. The hcf of
/// an all-zero list is 0.
pub fn hcf(values: &[ExactInt]) -> Result<ExactInt> {
    if values.is_empty() {
        return Err(Error::InvalidInput("hcf of an empty list".into()));
    }
    let g = values
        .iter()
        .fold(0u128, |g, &v| gcd_u128(g, v.unsigned_abs()));
    ExactInt::try_from(g).map_err(|_| Error::overflow("hcf"))
}

/// Extended Euclid: returns `(g, s, t)` with `g = gcd(a, b) >= 0` and
/// `a*s + b*t = g`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a as i128, b as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (old_r, old_s, old_t) = (-old_r, -old_s, -old_t);
    }
    (old_r as i64, old_s as i64, old_t as i64)
}

/// Inverse of `a` modulo `m >= 1`, reduced into `[0, m)`.
pub fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    debug_assert!(m >= 1);
    if m == 1 {
        return Some(0);
    }
    let (g, s, _) = ext_gcd(a.rem_euclid(m), m);
    (g == 1).then(|| s.rem_euclid(m))
}

/// Prime factorization by trial division, primes in increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "factorize requires n >= 1");
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == [(n, 1)]
}

/// Sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

pub fn mobius(n: u64) -> i8 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn is_squarefree(n: u64) -> bool {
    mobius(n) != 0
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(1u64, |acc, (p, e)| acc * (p - 1) * p.pow(e - 1))
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// `d_k(n)`: the number of ordered `k`-tuples of positive integers with
/// product `n`.
pub fn divisor_count_k(n: u64, k: u32) -> Result<u128> {
    assert!(n >= 1 && k >= 1, "divisor_count_k requires n, k >= 1");
    factorize(n).into_iter().try_fold(1u128, |acc, (_, e)| {
        let c = binomial(e as u128 + k as u128 - 1, k as u128 - 1)
            .ok_or_else(|| Error::overflow("divisor_count_k"))?;
        acc.checked_mul(c)
            .ok_or_else(|| Error::overflow("divisor_count_k"))
    })
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi(a: ExactInt, n: ExactInt) -> Result<i8> {
    if n <= 0 || n % 2 == 0 {
        return Err(Error::InvalidInput(format!(
            "jacobi symbol needs an odd positive modulus, got {n}"
        )));
    }
    let mut n = n as u128;
    let mut a = a.rem_euclid(n as i128) as u128;
    let mut sign = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    Ok(if n == 1 { sign } else { 0 })
}

fn residue(v: ExactInt, m: u64) -> u128 {
    v.rem_euclid(m as i128) as u128
}

/// Number of `t` in `[0, q)` with `t^2 a + b ≡ 0 (mod q)`, by direct scan.
pub fn rho(q: u64, a: ExactInt, b: ExactInt) -> u64 {
    assert!(q >= 1, "rho requires q >= 1");
    let m = q as u128;
    let (ar, br) = (residue(a, q), residue(b, q));
    (0..m)
        .filter(|&t| {
            let t2 = (t * t) % m;
            ((ar * t2) % m + br) % m == 0
        })
        .count() as u64
}

/// `Σ_{d | q} μ(d)² (−ab/d)` with the symbol taken as zero for even `d`.
/// Defined for every `q >= 1`.
pub fn jacobi_divisor_sum(q: u64, a: ExactInt, b: ExactInt) -> i64 {
    assert!(q >= 1, "jacobi_divisor_sum requires q >= 1");
    let mut sum = 0i64;
    let mut d = 1u64;
    while d <= q {
        if q % d == 0 && d % 2 == 1 && is_squarefree(d) {
            let m = d as u128;
            let prod = (residue(a, d) * residue(b, d)) % m;
            let minus_ab = ((m - prod) % m) as i128;
            // d is odd and positive here
            sum += jacobi(minus_ab, d as i128).expect("odd modulus") as i64;
        }
        d += 1;
    }
    sum
}

/// The Jacobi-sum evaluation of `rho`, valid for odd `q` only.
pub fn rho_jacobi(q: u64, a: ExactInt, b: ExactInt) -> Result<i64> {
    if q % 2 == 0 {
        return Err(Error::InvalidInput(format!(
            "the Jacobi-sum form of rho needs odd q, got {q}"
        )));
    }
    Ok(jacobi_divisor_sum(q, a, b))
}
