//! The group Z_N^d: parameters, points and flat-index arithmetic.
//!
//! Points are stored by flat index in row-major order, coordinate 0 most
//! significant: `flat = sum_i coords[i] * n^(d-1-i)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on `n^d` for dense storage.
pub const DEFAULT_GRID_CAP: usize = 1 << 20;

/// The group Z_n^d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct GridParams {
    n: usize,
    d: usize,
    total: usize,
}

#[derive(Serialize, Deserialize)]
struct RawGrid {
    n: usize,
    d: usize,
}

impl TryFrom<RawGrid> for GridParams {
    type Error = Error;

    fn try_from(raw: RawGrid) -> Result<Self> {
        GridParams::new(raw.n, raw.d)
    }
}

impl From<GridParams> for RawGrid {
    fn from(g: GridParams) -> Self {
        RawGrid { n: g.n, d: g.d }
    }
}

impl GridParams {
    /// Z_n^d with the default storage cap.
    pub fn new(n: usize, d: usize) -> Result<Self> {
        Self::with_cap(n, d, DEFAULT_GRID_CAP)
    }

    pub fn with_cap(n: usize, d: usize, cap: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("modulus n = {n} must be >= 2")));
        }
        if d < 1 {
            return Err(Error::InvalidGrid(format!("dimension d = {d} must be >= 1")));
        }
        let mut total: u64 = 1;
        for _ in 0..d {
            total = total.saturating_mul(n as u64);
            if total > cap as u64 {
                return Err(Error::GridCapExceeded { total, cap });
            }
        }
        Ok(GridParams {
            n,
            d,
            total: total as usize,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    /// `n^d`.
    #[inline]
    pub fn total(&self) -> usize {
        self.total
    }

    /// `n^d` as a float, the normalisation used throughout.
    #[inline]
    pub fn volume(&self) -> f64 {
        self.total as f64
    }

    pub fn contains(&self, index: usize) -> bool {
        index < self.total
    }

    pub fn encode(&self, coords: &[usize]) -> Result<usize> {
        if coords.len() != self.d {
            return Err(Error::InvalidParameter(format!(
                "point has {} coordinates, grid dimension is {}",
                coords.len(),
                self.d
            )));
        }
        let mut flat = 0;
        for &c in coords {
            if c >= self.n {
                return Err(Error::InvalidParameter(format!(
                    "coordinate {c} out of range for modulus {}",
                    self.n
                )));
            }
            flat = flat * self.n + c;
        }
        Ok(flat)
    }

    /// Writes the coordinates of `index` into `out` (length `d`).
    #[inline]
    pub fn decode_into(&self, mut index: usize, out: &mut [usize]) {
        debug_assert_eq!(out.len(), self.d);
        for slot in out.iter_mut().rev() {
            *slot = index % self.n;
            index /= self.n;
        }
    }

    pub fn decode(&self, index: usize) -> Point {
        let mut coords = vec![0; self.d];
        self.decode_into(index, &mut coords);
        Point { coords }
    }

    /// Componentwise `a + b` mod n on flat indices.
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.combine(a, b, |x, y| (x + y) % self.n)
    }

    /// Componentwise `a - b` mod n on flat indices.
    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.combine(a, b, |x, y| (x + self.n - y) % self.n)
    }

    pub fn neg(&self, a: usize) -> usize {
        self.sub(0, a)
    }

    /// `t * a` mod n.
    pub fn scale(&self, t: usize, a: usize) -> usize {
        let t = t % self.n;
        self.combine(a, 0, |x, _| (x * t) % self.n)
    }

    /// Dot product `a . b` reduced mod n.
    pub fn dot(&self, a: usize, b: usize) -> usize {
        let (mut a, mut b) = (a, b);
        let mut acc = 0;
        for _ in 0..self.d {
            acc = (acc + (a % self.n) * (b % self.n)) % self.n;
            a /= self.n;
            b /= self.n;
        }
        acc
    }

    fn combine(&self, a: usize, b: usize, op: impl Fn(usize, usize) -> usize) -> usize {
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.d {
            out += op(a % self.n, b % self.n) * place;
            a /= self.n;
            b /= self.n;
            place *= self.n;
        }
        out
    }

    /// All coordinates in flat order, `d` entries per point.
    pub fn coordinate_table(&self) -> Vec<u32> {
        let mut table = vec![0u32; self.total * self.d];
        let mut coords = vec![0usize; self.d];
        for (idx, chunk) in table.chunks_exact_mut(self.d).enumerate() {
            self.decode_into(idx, &mut coords);
            for (slot, &c) in chunk.iter_mut().zip(&coords) {
                *slot = c as u32;
            }
        }
        table
    }
}

impl fmt::Display for GridParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z_{}^{}", self.n, self.d)
    }
}

/// A point of Z_n^d as explicit coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point {
    pub coords: Vec<usize>,
}

impl Point {
    pub fn new(coords: Vec<usize>) -> Self {
        Point { coords }
    }
}

impl From<Vec<usize>> for Point {
    fn from(coords: Vec<usize>) -> Self {
        Point { coords }
    }
}

/// Trial-division primality test.
pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}
