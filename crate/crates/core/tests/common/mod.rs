//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use cayley::arith::gcd_u128;
use cayley::torsor::TorsorCoords;

/// Index in `Z^3` of `{n : m_i | n_i, m_4 | n_1 + n_2 + n_3}`, computed as
/// the size of the image of `n -> (n_1, n_2, n_3, n_1 + n_2 + n_3)` in
/// `⊕ Z/m_i` by closing `{0}` under the three generators.
pub fn divisibility_index_closure(m: [u64; 4]) -> u64 {
    let gens = [[1, 0, 0, 1], [0, 1, 0, 1], [0, 0, 1, 1]];
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([[0u64; 4]]);
    seen.insert([0u64; 4]);
    while let Some(v) = queue.pop_front() {
        for g in &gens {
            let w = [0, 1, 2, 3].map(|i| (v[i] + g[i]) % m[i]);
            if seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    seen.len() as u64
}

/// The same index by counting lattice points in the period box `[0, L)^3`,
/// `L = lcm(m_i)`: the index is `L^3` over that count.
pub fn divisibility_index_box(m: [u64; 4]) -> u64 {
    let l = m.iter().fold(1u64, |a, &b| a / gcd_u128(a as u128, b as u128) as u64 * b);
    let mut inside = 0u64;
    for n1 in (0..l).step_by(m[0] as usize) {
        for n2 in (0..l).step_by(m[1] as usize) {
            for n3 in (0..l).step_by(m[2] as usize) {
                if (n1 + n2 + n3) % m[3] == 0 {
                    inside += 1;
                }
            }
        }
    }
    l * l * l / inside
}

/// Every `(m_1, .., m_4)` of positive integers with product at most `limit`.
pub fn moduli_up_to(limit: u64) -> Vec<[u64; 4]> {
    let mut out = Vec::new();
    for a in 1..=limit {
        for b in 1..=limit / a {
            for c in 1..=limit / (a * b) {
                for d in 1..=limit / (a * b * c) {
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out
}

/// `A_1 y_1 + .. + A_4 y_4`, written out from the z-products directly.
pub fn torsor_form(t: &TorsorCoords) -> i128 {
    let [z12, z13, z14, z23, z24, z34] = t.z;
    let a = [z23 * z24 * z34, z13 * z14 * z34, z12 * z14 * z24, z12 * z13 * z23];
    (0..4).map(|i| a[i] * t.y[i]).sum()
}

/// Each `v_{ij}` written out by hand in `12, 13, 14, 23, 24, 34` order.
pub fn v_by_hand(t: &TorsorCoords) -> Option<[i128; 6]> {
    let [z12, z13, z14, z23, z24, z34] = t.z;
    let [y1, y2, y3, y4] = t.y;
    let num = [
        (z13 * z14 * y2 + z23 * z24 * y1, z12),
        (z12 * z14 * y3 + z23 * z34 * y1, z13),
        (z12 * z13 * y4 + z24 * z34 * y1, z14),
        (z12 * z24 * y3 + z13 * z34 * y2, z23),
        (z12 * z23 * y4 + z14 * z34 * y2, z24),
        (z13 * z23 * y4 + z14 * z24 * y3, z34),
    ];
    let mut v = [0; 6];
    for (o, (n, d)) in v.iter_mut().zip(num) {
        if n % d != 0 {
            return None;
        }
        *o = n / d;
    }
    Some(v)
}
