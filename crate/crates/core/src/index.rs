//! Unordered index pairs `{i, j}` of `{1, 2, 3, 4}`.
//!
//! Internally indices are 0-based; `Display` and the JSON keys use the
//! 1-based labels `"12"`, `"13"`, ... .

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pair {
    lo: u8,
    hi: u8,
}

impl Pair {
    /// Canonical order: 12, 13, 14, 23, 24, 34.
    pub const ALL: [Pair; 6] = [
        Pair { lo: 0, hi: 1 },
        Pair { lo: 0, hi: 2 },
        Pair { lo: 0, hi: 3 },
        Pair { lo: 1, hi: 2 },
        Pair { lo: 1, hi: 3 },
        Pair { lo: 2, hi: 3 },
    ];

    pub fn new(i: usize, j: usize) -> Pair {
        assert!(i < 4 && j < 4 && i != j, "bad pair ({i}, {j})");
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        Pair {
            lo: lo as u8,
            hi: hi as u8,
        }
    }

    pub fn i(self) -> usize {
        self.lo as usize
    }

    pub fn j(self) -> usize {
        self.hi as usize
    }

    /// Position in [`Pair::ALL`].
    pub fn index(self) -> usize {
        pair_index(self.i(), self.j())
    }

    /// The pair made of the two remaining indices.
    pub fn complement(self) -> Pair {
        let mut rest = (0..4).filter(|&m| m != self.i() && m != self.j());
        let a = rest.next().unwrap();
        let b = rest.next().unwrap();
        Pair::new(a, b)
    }

    pub fn contains(self, m: usize) -> bool {
        self.i() == m || self.j() == m
    }

    pub fn label(self) -> String {
        format!("{}{}", self.lo + 1, self.hi + 1)
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.lo + 1, self.hi + 1)
    }
}

#[inline]
pub const fn pair_index(i: usize, j: usize) -> usize {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    match (a, b) {
        (0, 1) => 0,
        (0, 2) => 1,
        (0, 3) => 2,
        (1, 2) => 3,
        (1, 3) => 4,
        (2, 3) => 5,
        _ => panic!("pair_index: indices must be distinct and below 4"),
    }
}

/// The three indices other than `i`, ascending.
#[inline]
pub const fn others(i: usize) -> [usize; 3] {
    match i {
        0 => [1, 2, 3],
        1 => [0, 2, 3],
        2 => [0, 1, 3],
        3 => [0, 1, 2],
        _ => panic!("others: index must be below 4"),
    }
}
