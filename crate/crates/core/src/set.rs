use crate::error::{Error, Result};
use crate::grid::GridParams;

/// A subset of Z_n^d held as sorted, distinct flat indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexSet {
    grid: GridParams,
    indices: Vec<usize>,
}

impl IndexSet {
    /// Builds a set from arbitrary indices; sorts them and drops duplicates.
    pub fn new(grid: GridParams, mut indices: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| !grid.contains(i)) {
            return Err(Error::InvalidSet(format!(
                "index {bad} out of range for {grid} (total {})",
                grid.total()
            )));
        }
        indices.sort_unstable();
        indices.dedup();
        Ok(IndexSet { grid, indices })
    }

    /// Requires `indices` to already be strictly increasing.
    pub fn from_sorted(grid: GridParams, indices: Vec<usize>) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSet(
                "indices must be strictly increasing".into(),
            ));
        }
        Self::new(grid, indices)
    }

    pub fn empty(grid: GridParams) -> Self {
        IndexSet {
            grid,
            indices: Vec::new(),
        }
    }

    pub fn full(grid: GridParams) -> Self {
        IndexSet {
            grid,
            indices: (0..grid.total()).collect(),
        }
    }

    pub(crate) fn from_mask(grid: GridParams, mask: &[bool]) -> Self {
        IndexSet {
            grid,
            indices: mask
                .iter()
                .enumerate()
                .filter_map(|(i, &m)| m.then_some(i))
                .collect(),
        }
    }

    #[inline]
    pub fn grid(&self) -> GridParams {
        self.grid
    }

    #[inline]
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    /// `|S| / n^d`.
    pub fn density(&self) -> f64 {
        self.len() as f64 / self.grid.volume()
    }

    /// Membership vector of length `n^d`.
    pub fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.grid.total()];
        for &i in &self.indices {
            mask[i] = true;
        }
        mask
    }

    pub fn complement(&self) -> IndexSet {
        let mask = self.mask();
        IndexSet {
            grid: self.grid,
            indices: (0..self.grid.total()).filter(|&i| !mask[i]).collect(),
        }
    }

    pub fn expect_grid(&self, grid: GridParams) -> Result<()> {
        if self.grid != grid {
            return Err(Error::GridMismatch(self.grid.to_string(), grid.to_string()));
        }
        Ok(())
    }

    pub fn expect_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptySet)
        } else {
            Ok(())
        }
    }
}
