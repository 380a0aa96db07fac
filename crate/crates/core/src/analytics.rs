//! Structure constants of subsets of Z_n^d.
//!
//! For a nonempty set `S`:
//!
//! * `phi(S)`: the largest `|S^(m)|` over nonzero frequencies `m`.
//! * Salem level: the smallest `L` with `|S^(m)| <= L n^(-d) |S|^(1/2)` for
//!   all `m != 0`, i.e. `phi(S) n^d / sqrt|S|`.
//! * Size level `|S| / n^(d/2)`.
//! * Additive energy: the number of quadruples `(x, y, x', y')` in `S^4`
//!   with `x + y = x' + y'`, computed both by direct counting and from the
//!   fourth moment of the spectrum.
//! * Energy level: the worst `energy(U) / |U|^2` over nonempty `U` in `S`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{is_prime, GridParams, Point};
use crate::rng;
use crate::set::IndexSet;
use crate::spectral::indicator_spectrum;

/// Largest `|U|` accepted by [`additive_energy`]; the count costs `|U|^3`.
pub const ENERGY_BRUTE_FORCE_CAP: usize = 4096;
/// Largest `|S|` for which [`lambda_energy`] enumerates all subsets.
pub const LAMBDA_ENERGY_SUBSET_CAP: usize = 20;
/// Maximum distance from an integer tolerated by [`energy_via_fourier`],
/// relative to `max(1, value)`.
pub const ENERGY_RESIDUE_TOL: f64 = 1e-6;

/// `max_{m != 0} |A^(m)|` from the indicator's spectrum.
pub fn phi(set: &IndexSet) -> Result<f64> {
    set.expect_nonempty()?;
    let spectrum = indicator_spectrum(set)?;
    Ok(spectrum.values()[1..]
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max))
}

/// Minimal Salem level `phi(S) n^d / sqrt|S|`; never exceeds `sqrt|S|`.
pub fn salem_level(set: &IndexSet) -> Result<f64> {
    let peak = phi(set)?;
    Ok(peak * set.grid().volume() / (set.len() as f64).sqrt())
}

/// `n^(-d) sqrt((1 + eps) |A| d ln n)`: the Fourier peak that a uniformly
/// random `A` with `|A| <= n^d / 2` stays below with high probability.
pub fn random_set_peak_bound(grid: GridParams, size: usize, eps: f64) -> f64 {
    ((1.0 + eps) * size as f64 * grid.d() as f64 * (grid.n() as f64).ln()).sqrt() / grid.volume()
}

/// `|S| / n^(d/2)`.
pub fn size_level(set: &IndexSet) -> f64 {
    set.len() as f64 / set.grid().volume().sqrt()
}

/// Counts `x + y = x' + y'` by fixing `x, y, x'` and testing membership of
/// `y' = x + y - x'`.
pub fn additive_energy(set: &IndexSet) -> Result<u64> {
    if set.len() > ENERGY_BRUTE_FORCE_CAP {
        return Err(Error::CapExceeded(format!(
            "additive energy of {} points exceeds the brute-force cap {ENERGY_BRUTE_FORCE_CAP}",
            set.len()
        )));
    }
    let grid = set.grid();
    let mask = set.mask();
    let points = set.indices();
    let mut count = 0u64;
    for &x in points {
        for &y in points {
            let s = grid.add(x, y);
            count += points
                .iter()
                .filter(|&&x2| mask[grid.sub(s, x2)])
                .count() as u64;
        }
    }
    Ok(count)
}

/// `round(n^(3d) sum_z |U^(z)|^4)`.
pub fn energy_via_fourier(set: &IndexSet) -> Result<u64> {
    set.expect_nonempty()?;
    let grid = set.grid();
    let spectrum = indicator_spectrum(set)?;
    let fourth: f64 = spectrum
        .values()
        .iter()
        .map(|v| {
            let q = v.norm_sqr();
            q * q
        })
        .sum();
    let value = fourth * grid.volume().powi(3);
    let rounded = value.round();
    let residue = (value - rounded).abs();
    if residue >= ENERGY_RESIDUE_TOL * value.max(1.0) {
        return Err(Error::EnergyResidue { value, residue });
    }
    Ok(rounded as u64)
}

/// Worst subset energy ratio, or an upper-bound surrogate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaEnergy {
    pub value: f64,
    /// `true` when every nonempty subset was enumerated.
    pub exact: bool,
}

/// Upper bound on `energy(S) / |S|^2` from the spectrum of `S` itself:
/// `min(|S|, size_level^2 + salem_level^2 (1 - dens))`.
///
/// The zero frequency contributes `|S|^4 / n^d` to the fourth moment and is
/// kept separate; bounding it by the Salem level as well is not valid (a
/// perfect difference set such as `{0, 1, 3}` in Z_7 has energy 15 while
/// `salem_level^2 |S|^2 = 6`).
pub fn energy_level_upper_bound(set: &IndexSet) -> Result<f64> {
    let salem = salem_level(set)?;
    let size = size_level(set);
    let bound = size * size + salem * salem * (1.0 - set.density());
    Ok(bound.min(set.len() as f64))
}

/// `max energy(U) / |U|^2` over nonempty `U` in `S` when `|S| <= subset_cap`
/// (exact), otherwise [`energy_level_upper_bound`] (inexact).
///
/// Subsets are visited in Gray-code order with the pair-sum histogram updated
/// one element at a time, so each step costs `O(|S|)`.
pub fn lambda_energy(set: &IndexSet, subset_cap: usize) -> Result<LambdaEnergy> {
    set.expect_nonempty()?;
    if set.len() > subset_cap {
        return Ok(LambdaEnergy {
            value: energy_level_upper_bound(set)?,
            exact: false,
        });
    }
    let (num, den) = max_subset_energy_ratio(set);
    Ok(LambdaEnergy {
        value: num as f64 / den as f64,
        exact: true,
    })
}

/// Returns `(energy(U), |U|^2)` of the maximising subset.
fn max_subset_energy_ratio(set: &IndexSet) -> (u64, u64) {
    let grid = set.grid();
    let points = set.indices();
    let s = points.len();
    let sums: Vec<usize> = (0..s * s)
        .map(|k| grid.add(points[k / s], points[k % s]))
        .collect();

    let mut counts = vec![0i64; grid.total()];
    let mut energy: i64 = 0;
    let mut active = vec![false; s];
    let mut size: u64 = 0;
    let mut best = (1u64, 1u64);

    let bump = |counts: &mut [i64], energy: &mut i64, idx: usize, delta: i64| {
        let old = counts[idx];
        let new = old + delta;
        counts[idx] = new;
        *energy += new * new - old * old;
    };

    for step in 1u64..(1u64 << s) {
        let i = step.trailing_zeros() as usize;
        if active[i] {
            active[i] = false;
            size -= 1;
            bump(&mut counts, &mut energy, sums[i * s + i], -1);
            for j in (0..s).filter(|&j| active[j]) {
                bump(&mut counts, &mut energy, sums[i * s + j], -2);
            }
        } else {
            for j in (0..s).filter(|&j| active[j]) {
                bump(&mut counts, &mut energy, sums[i * s + j], 2);
            }
            bump(&mut counts, &mut energy, sums[i * s + i], 1);
            active[i] = true;
            size += 1;
        }
        if size > 0 {
            let e = energy as u64;
            if e * best.1 > best.0 * size * size {
                best = (e, size * size);
            }
        }
    }
    best
}

/// All derived constants of a set in one record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetProfile {
    pub size: usize,
    pub dens: f64,
    pub phi: f64,
    pub lambda_salem: f64,
    pub lambda_size: f64,
    /// Quadruple count; the brute-force value when available.
    pub energy: u64,
    pub energy_brute_force: Option<u64>,
    pub energy_fourier: u64,
    pub lambda_energy: f64,
    pub lambda_energy_exact: bool,
    /// Bound on `energy(S) / |S|^2`, see [`energy_level_upper_bound`].
    pub lambda_energy_upper: f64,
}

impl SetProfile {
    /// `Some(true)` when both energy computations ran and agree.
    pub fn energies_agree(&self) -> Option<bool> {
        self.energy_brute_force.map(|e| e == self.energy_fourier)
    }
}

pub fn profile(set: &IndexSet) -> Result<SetProfile> {
    set.expect_nonempty()?;
    let peak = phi(set)?;
    let size = set.len();
    let lambda_salem = peak * set.grid().volume() / (size as f64).sqrt();
    let energy_fourier = energy_via_fourier(set)?;
    let energy_brute_force = if size <= ENERGY_BRUTE_FORCE_CAP {
        Some(additive_energy(set)?)
    } else {
        None
    };
    let lambda = lambda_energy(set, LAMBDA_ENERGY_SUBSET_CAP)?;
    Ok(SetProfile {
        size,
        dens: set.density(),
        phi: peak,
        lambda_salem,
        lambda_size: size_level(set),
        energy: energy_brute_force.unwrap_or(energy_fourier),
        energy_brute_force,
        energy_fourier,
        lambda_energy: lambda.value,
        lambda_energy_exact: lambda.exact,
        lambda_energy_upper: energy_level_upper_bound(set)?,
    })
}

/// Uniform `size`-subset of Z_n^d by partial Fisher-Yates.
pub fn random_set(grid: GridParams, size: usize, seed: u64) -> Result<IndexSet> {
    if size == 0 || size > grid.total() {
        return Err(Error::InvalidParameter(format!(
            "random set size {size} outside 1..={}",
            grid.total()
        )));
    }
    let mut rng = rng::seeded(seed);
    let total = grid.total();
    let mut perm: Vec<usize> = (0..total).collect();
    for i in 0..size {
        let j = rng.random_range(i..total);
        perm.swap(i, j);
    }
    perm.truncate(size);
    IndexSet::new(grid, perm)
}

/// Linear span of `generators` over the field Z_n (n prime).
pub fn subgroup_span(grid: GridParams, generators: &[Point]) -> Result<IndexSet> {
    if !is_prime(grid.n()) {
        return Err(Error::CompositeModulus(grid.n()));
    }
    let encoded = generators
        .iter()
        .map(|p| grid.encode(&p.coords))
        .collect::<Result<Vec<_>>>()?;
    let mut mask = vec![false; grid.total()];
    mask[0] = true;
    close_under_multiples(grid, &mut mask, &encoded);
    Ok(IndexSet::from_mask(grid, &mask))
}

/// Replaces `mask` by `mask + <g>` for every generator in turn.
fn close_under_multiples(grid: GridParams, mask: &mut [bool], generators: &[usize]) {
    for &g in generators {
        let current: Vec<usize> = (0..grid.total()).filter(|&i| mask[i]).collect();
        let multiples: Vec<usize> = (0..grid.n()).map(|t| grid.scale(t, g)).collect();
        for &s in &current {
            for &m in &multiples {
                mask[grid.add(s, m)] = true;
            }
        }
    }
}

/// Nonempty and closed under addition (hence a subgroup of a finite group).
pub fn is_subgroup(set: &IndexSet) -> bool {
    if set.is_empty() {
        return false;
    }
    let grid = set.grid();
    let mask = set.mask();
    set.indices()
        .iter()
        .all(|&a| set.indices().iter().all(|&b| mask[grid.add(a, b)]))
}

/// `E^perp = {m : x.m = 0 mod n for all x in E}` for a subgroup `E`.
pub fn annihilator(subgroup: &IndexSet) -> Result<IndexSet> {
    if !is_subgroup(subgroup) {
        return Err(Error::NotSubgroup(
            "set is empty or not closed under addition".into(),
        ));
    }
    let grid = subgroup.grid();
    // A generating set suffices: greedily keep elements outside the span so far.
    let mut generators = Vec::new();
    let mut span = vec![false; grid.total()];
    span[0] = true;
    for &x in subgroup.indices() {
        if !span[x] {
            generators.push(x);
            close_under_multiples(grid, &mut span, &[x]);
        }
    }
    let mask: Vec<bool> = (0..grid.total())
        .map(|m| generators.iter().all(|&g| grid.dot(g, m) == 0))
        .collect();
    Ok(IndexSet::from_mask(grid, &mask))
}
