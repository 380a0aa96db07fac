use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridParams;
use crate::set::IndexSet;

/// Which side of the transform a [`Signal`] lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Space,
    Frequency,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Space => f.write_str("space"),
            Domain::Frequency => f.write_str("frequency"),
        }
    }
}

/// A dense complex-valued function on Z_n^d, in flat order.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    grid: GridParams,
    domain: Domain,
    values: Vec<Complex64>,
}

impl Signal {
    pub fn new(grid: GridParams, domain: Domain, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.total() {
            return Err(Error::InvalidSignal(format!(
                "expected {} values for {grid}, got {}",
                grid.total(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidSignal(format!("non-finite value at index {i}")));
        }
        Ok(Signal {
            grid,
            domain,
            values,
        })
    }

    pub fn zeros(grid: GridParams, domain: Domain) -> Self {
        Signal {
            grid,
            domain,
            values: vec![Complex64::new(0.0, 0.0); grid.total()],
        }
    }

    pub fn from_real(grid: GridParams, domain: Domain, values: &[f64]) -> Result<Self> {
        Self::new(
            grid,
            domain,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    /// Point mass at `index`.
    pub fn delta(grid: GridParams, index: usize) -> Self {
        let mut s = Self::zeros(grid, Domain::Space);
        s.values[index] = Complex64::new(1.0, 0.0);
        s
    }

    /// The 0/1 indicator of `set`, in the space domain.
    pub fn indicator(set: &IndexSet) -> Self {
        let mut s = Self::zeros(set.grid(), Domain::Space);
        for &i in set.indices() {
            s.values[i] = Complex64::new(1.0, 0.0);
        }
        s
    }

    pub(crate) fn from_parts_unchecked(
        grid: GridParams,
        domain: Domain,
        values: Vec<Complex64>,
    ) -> Self {
        debug_assert_eq!(values.len(), grid.total());
        Signal {
            grid,
            domain,
            values,
        }
    }

    #[inline]
    pub fn grid(&self) -> GridParams {
        self.grid
    }

    #[inline]
    pub fn domain(&self) -> Domain {
        self.domain
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Same values, relabelled domain.
    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn expect_domain(&self, expected: Domain) -> Result<()> {
        if self.domain != expected {
            return Err(Error::DomainMismatch {
                expected,
                found: self.domain,
            });
        }
        Ok(())
    }

    pub fn expect_grid(&self, grid: GridParams) -> Result<()> {
        if self.grid != grid {
            return Err(Error::GridMismatch(self.grid.to_string(), grid.to_string()));
        }
        Ok(())
    }

    /// `(sum |v|^p)^(1/p)`; `p = inf` gives the max modulus.
    pub fn norm(&self, p: f64) -> f64 {
        lp_norm(&self.values, p)
    }

    /// `sum |v|^2`.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    /// `max |a - b| / max(max |b|, floor)`, the relative infinity-norm gap.
    pub fn relative_distance(&self, other: &Signal) -> f64 {
        let diff = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        diff / other.max_abs().max(f64::MIN_POSITIVE)
    }

    pub fn max_abs_diff(&self, other: &Signal) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn lp_norm(values: &[Complex64], p: f64) -> f64 {
    if p.is_infinite() {
        values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    } else if p == 1.0 {
        values.iter().map(|v| v.norm()).sum()
    } else if p == 2.0 {
        values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    } else {
        values
            .iter()
            .map(|v| v.norm().powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }
}
