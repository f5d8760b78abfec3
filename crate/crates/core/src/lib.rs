//! Counting integral points on the Cayley cubic
//! `X2X3X4 + X1X3X4 + X1X2X4 + X1X2X3 = 0` away from its nine lines.
//!
//! [`enumeration`] holds the two counting engines (a brute-force oracle and
//! an enumerator over universal torsor coordinates, see [`torsor`]). The
//! remaining modules supply the arithmetic, lattice-point and density tools
//! checked alongside them.

pub mod arith;
pub mod cli;
pub mod densities;
pub mod dyadic;
pub mod empirical;
pub mod enumeration;
pub mod error;
pub mod index;
pub mod lattice;
pub mod rng;
pub mod surface;
pub mod torsor;

pub use enumeration::{count_naive, count_star, count_torsor, CountReport, Method, StarMethod};
pub use error::{Error, Result};
pub use surface::CayleyPoint;
pub use torsor::{decompose, reconstruct, Decomposition, TorsorCoords};
