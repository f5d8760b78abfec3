//! Universal torsor coordinates for points of `U`.
//!
//! A primitive point `x` in `U` is written as `x_i = B_i y_j y_k y_l` with
//! non-zero `y_1..y_4` and six positive `z_{ij}`, where
//!
//! * `B_i = z_{ij} z_{ik} z_{il}` (the pairs containing `i`),
//! * `A_i = z_{jk} z_{jl} z_{kl}` (the pairs avoiding `i`),
//! * `P = ∏ z_{ij} = A_i B_i`,
//!
//! subject to `A_1 y_1 + A_2 y_2 + A_3 y_3 + A_4 y_4 = 0`, pairwise coprime
//! `y`, pairwise coprime `z`, `hcf(y_i, z_{ij}) = 1`, and none of the partial
//! sums `A_1 y_1 + A_j y_j` vanishing.
//!
//! Both `(y, z)` and `(-y, z)` are valid whenever one is, reconstructing to
//! `x` and `-x`. The canonical representative returned by [`decompose`]
//! therefore always reconstructs to `x` itself and carries `sign = +1`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::arith::{checked_add, checked_mul, checked_product, checked_sub, exact_div, hcf, ExactInt};
use crate::error::{Error, Result};
use crate::index::{others, pair_index, Pair};
use crate::surface::{in_open_subset, is_primitive, CayleyPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TorsorCoords {
    pub y: [ExactInt; 4],
    /// Indexed in [`Pair::ALL`] order: 12, 13, 14, 23, 24, 34.
    pub z: [ExactInt; 6],
}

/// A violated torsor constraint, as reported by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    ZeroY(usize),
    NonPositiveZ(Pair),
    /// Two distinct `z` values share a factor.
    ZNotCoprime(Pair, Pair),
    /// Two `y` values share a factor.
    YNotCoprime(usize, usize),
    /// `y_i` shares a factor with some `z_{ij}`.
    YShareFactorWithZ(usize, Pair),
    /// `A_1 y_1 + ... + A_4 y_4` is this non-zero value.
    TorsorEquation(ExactInt),
    /// `A_1 y_1 + A_j y_j = 0` for this `j`.
    PartialSumVanishes(usize),
    /// A derived product left the 128-bit range.
    Unrepresentable,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroY(i) => write!(f, "y_{} is zero", i + 1),
            Violation::NonPositiveZ(p) => write!(f, "z_{} is not positive", p.label()),
            Violation::ZNotCoprime(p, q) => write!(
                f,
                "z values must be pairwise coprime: hcf(z_{}, z_{}) > 1",
                p.label(),
                q.label()
            ),
            Violation::YNotCoprime(i, j) => write!(
                f,
                "y values must be pairwise coprime: hcf(y_{}, y_{}) > 1",
                i + 1,
                j + 1
            ),
            Violation::YShareFactorWithZ(i, p) => write!(
                f,
                "y_{} must be coprime to z_{}",
                i + 1,
                p.label()
            ),
            Violation::TorsorEquation(v) => {
                write!(f, "torsor equation fails: A1y1+A2y2+A3y3+A4y4 = {v}")
            }
            Violation::PartialSumVanishes(j) => {
                write!(f, "partial sum A1y1+A{0}y{0} vanishes", j + 1)
            }
            Violation::Unrepresentable => write!(f, "derived products overflow 128 bits"),
        }
    }
}

impl TorsorCoords {
    pub fn z(&self, i: usize, j: usize) -> ExactInt {
        self.z[pair_index(i, j)]
    }

    /// `A_i`, the product of the three `z` values whose pair avoids `i`.
    pub fn a(&self, i: usize) -> Result<ExactInt> {
        let [j, k, l] = others(i);
        checked_product(&[self.z(j, k), self.z(j, l), self.z(k, l)], "torsor A_i")
    }

    /// `B_i`, the product of the three `z` values whose pair contains `i`.
    pub fn b(&self, i: usize) -> Result<ExactInt> {
        let [j, k, l] = others(i);
        checked_product(&[self.z(i, j), self.z(i, k), self.z(i, l)], "torsor B_i")
    }

    pub fn p(&self) -> Result<ExactInt> {
        checked_product(&self.z, "torsor P")
    }

    pub fn all_a(&self) -> Result<[ExactInt; 4]> {
        Ok([self.a(0)?, self.a(1)?, self.a(2)?, self.a(3)?])
    }

    pub fn all_b(&self) -> Result<[ExactInt; 4]> {
        Ok([self.b(0)?, self.b(1)?, self.b(2)?, self.b(3)?])
    }

    pub fn negated(&self) -> Option<TorsorCoords> {
        let mut y = [0; 4];
        for (o, &v) in y.iter_mut().zip(&self.y) {
            *o = v.checked_neg()?;
        }
        Some(TorsorCoords { y, z: self.z })
    }
}

fn coprime(a: ExactInt, b: ExactInt) -> bool {
    matches!(hcf(&[a, b]), Ok(1))
}

/// Every violated constraint, in a fixed order. Empty iff `t` is valid.
pub fn validate(t: &TorsorCoords) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, &y) in t.y.iter().enumerate() {
        if y == 0 {
            out.push(Violation::ZeroY(i));
        }
    }
    for p in Pair::ALL {
        if t.z[p.index()] <= 0 {
            out.push(Violation::NonPositiveZ(p));
        }
    }
    for (n, p) in Pair::ALL.iter().enumerate() {
        for q in &Pair::ALL[n + 1..] {
            if !coprime(t.z[p.index()], t.z[q.index()]) {
                out.push(Violation::ZNotCoprime(*p, *q));
            }
        }
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if !coprime(t.y[i], t.y[j]) {
                out.push(Violation::YNotCoprime(i, j));
            }
        }
    }
    for i in 0..4 {
        for j in others(i) {
            if !coprime(t.y[i], t.z(i, j)) {
                out.push(Violation::YShareFactorWithZ(i, Pair::new(i, j)));
            }
        }
    }
    match weighted_terms(t) {
        Ok(u) => {
            match u.iter().try_fold(0i128, |s, &v| s.checked_add(v)) {
                Some(0) => {}
                Some(s) => out.push(Violation::TorsorEquation(s)),
                None => out.push(Violation::Unrepresentable),
            }
            for j in 1..4 {
                if u[0].checked_add(u[j]) == Some(0) {
                    out.push(Violation::PartialSumVanishes(j));
                }
            }
        }
        Err(_) => out.push(Violation::Unrepresentable),
    }
    out
}

/// The four terms `A_i y_i`.
fn weighted_terms(t: &TorsorCoords) -> Result<[ExactInt; 4]> {
    let a = t.all_a()?;
    let mut u = [0; 4];
    for i in 0..4 {
        u[i] = checked_mul(a[i], t.y[i], "torsor A_i y_i")?;
    }
    Ok(u)
}

/// Canonical torsor data for a primitive point of `U`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decomposition {
    /// `reconstruct(coords) == sign * x`. Always `+1` for the canonical form.
    pub sign: i8,
    pub coords: TorsorCoords,
}

pub fn decompose(x: &CayleyPoint) -> Result<Decomposition> {
    if !is_primitive(x) {
        return Err(Error::NotPrimitive);
    }
    if !in_open_subset(x)? {
        return Err(Error::NotInOpenSubset);
    }
    let v = x.coords();
    let internal = |what: String| Error::Internal(format!("decompose {x}: {what}"));

    let mut y_abs = [0i128; 4];
    for i in 0..4 {
        let [j, k, l] = others(i);
        y_abs[i] = hcf(&[v[j], v[k], v[l]])?;
    }
    let mut zi = [0i128; 4];
    for i in 0..4 {
        let [j, k, l] = others(i);
        let d = checked_product(&[y_abs[j], y_abs[k], y_abs[l]], "decompose")?;
        zi[i] = exact_div(v[i], d, "decompose z_i").map_err(|e| internal(e.to_string()))?;
    }
    let mut z = [0i128; 6];
    for p in Pair::ALL {
        z[p.index()] = hcf(&[zi[p.i()], zi[p.j()]])?;
    }
    let partial = TorsorCoords { y: y_abs, z };
    for i in 0..4 {
        let w = exact_div(zi[i], partial.b(i)?, "decompose w_i")
            .map_err(|e| internal(e.to_string()))?;
        if w.abs() != 1 {
            return Err(internal(format!("w_{} = {w} is not a unit", i + 1)));
        }
    }

    // y signs s_i must satisfy s_j s_k s_l = sgn(x_i). With S = s_1 s_2 s_3 s_4
    // this reads S s_i = sgn(x_i), so S = ∏ sgn(x_i) and s_i = S sgn(x_i).
    let sgn: Vec<i128> = v.iter().map(|c| c.signum()).collect();
    let s_all: i128 = sgn.iter().product();
    let mut y = [0i128; 4];
    for i in 0..4 {
        y[i] = s_all * sgn[i] * y_abs[i];
    }
    let coords = TorsorCoords { y, z };
    let violations = validate(&coords);
    if let Some(first) = violations.first() {
        return Err(internal(first.to_string()));
    }
    let back = reconstruct(&coords)?;
    if back != *x {
        return Err(internal(format!("reconstructs to {back}")));
    }
    Ok(Decomposition { sign: 1, coords })
}

/// `x_i = B_i y_j y_k y_l`.
pub fn reconstruct(t: &TorsorCoords) -> Result<CayleyPoint> {
    if let Some(first) = validate(t).into_iter().next() {
        return Err(Error::InvalidTorsor(first));
    }
    raw_reconstruct(t)
}

fn raw_reconstruct(t: &TorsorCoords) -> Result<CayleyPoint> {
    let mut x = [0i128; 4];
    for i in 0..4 {
        let [j, k, l] = others(i);
        x[i] = checked_product(&[t.b(i)?, t.y[j], t.y[k], t.y[l]], "reconstruct")?;
    }
    Ok(CayleyPoint(x))
}

/// `v_{ij} = (z_{ik} z_{il} y_j + z_{jk} z_{jl} y_i) / z_{ij}`, exact, in
/// [`Pair::ALL`] order.
pub fn v_matrix(t: &TorsorCoords) -> Result<[ExactInt; 6]> {
    if let Some(first) = validate(t).into_iter().next() {
        return Err(Error::InvalidTorsor(first));
    }
    let mut v = [0i128; 6];
    for p in Pair::ALL {
        let (i, j) = (p.i(), p.j());
        let q = p.complement();
        let (k, l) = (q.i(), q.j());
        let num = checked_add(
            checked_product(&[t.z(i, k), t.z(i, l), t.y[j]], "v_matrix")?,
            checked_product(&[t.z(j, k), t.z(j, l), t.y[i]], "v_matrix")?,
            "v_matrix",
        )?;
        v[p.index()] = exact_div(num, t.z(i, j), "v_matrix")?;
    }
    Ok(v)
}

/// Checks `v_{ij} v_{ik} = z_{il}^2 y_j y_k - z_{jk}^2 y_i y_l` for every
/// ordered choice of distinct `i, j, k` (with `l` the remaining index).
pub fn check_quadratic_identity(t: &TorsorCoords) -> Result<bool> {
    let v = v_matrix(t)?;
    const OP: &str = "quadratic identity";
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                if i == j || j == k || i == k {
                    continue;
                }
                let l = 6 - i - j - k;
                let lhs = checked_mul(v[pair_index(i, j)], v[pair_index(i, k)], OP)?;
                let zil = t.z(i, l);
                let zjk = t.z(j, k);
                let rhs = checked_sub(
                    checked_product(&[zil, zil, t.y[j], t.y[k]], OP)?,
                    checked_product(&[zjk, zjk, t.y[i], t.y[l]], OP)?,
                    OP,
                )?;
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// The documented JSON object for a decomposition.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionJson {
    pub sign: i8,
    pub y: [ExactInt; 4],
    pub z: BTreeMap<String, ExactInt>,
    #[serde(rename = "A")]
    pub a: [ExactInt; 4],
    #[serde(rename = "B")]
    pub b: [ExactInt; 4],
    #[serde(rename = "P")]
    pub p: ExactInt,
    pub v: BTreeMap<String, ExactInt>,
}

impl Decomposition {
    pub fn to_json(&self) -> Result<DecompositionJson> {
        let t = &self.coords;
        let v = v_matrix(t)?;
        let label = |vals: &[ExactInt; 6]| {
            Pair::ALL
                .iter()
                .map(|p| (p.label(), vals[p.index()]))
                .collect::<BTreeMap<_, _>>()
        };
        Ok(DecompositionJson {
            sign: self.sign,
            y: t.y,
            z: label(&t.z),
            a: t.all_a()?,
            b: t.all_b()?,
            p: t.p()?,
            v: label(&v),
        })
    }
}
