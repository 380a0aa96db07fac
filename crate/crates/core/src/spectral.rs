//! The discrete Fourier transform on Z_n^d.
//!
//! Normalisation: `F(m) = n^(-d) sum_x chi(-x.m) f(x)` forward and
//! `f(x) = sum_m chi(x.m) F(m)` inverse, with `chi(t) = exp(2 pi i t / n)`.
//! Every constant elsewhere in the crate assumes this convention.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::Result;
use crate::grid::GridParams;
use crate::set::IndexSet;
use crate::signal::{Domain, Signal};

/// Above this many points [`dft_forward`] and [`dft_inverse`] switch to the
/// per-axis fast path.
pub const FAST_PATH_THRESHOLD: usize = 4096;

/// Default relative threshold for [`support`].
pub const SUPPORT_REL_TOL: f64 = 1e-9;
/// Values at or below this modulus never count as support.
pub const SUPPORT_ABS_FLOOR: f64 = 1e-12;

const PLANCHEREL_FLOOR: f64 = 1e-300;

/// `chi(t) = exp(2 pi i (t mod n) / n)`.
pub fn character(grid: GridParams, t: i64) -> Complex64 {
    let n = grid.n() as i64;
    let t = t.rem_euclid(n);
    root(grid.n(), t as usize)
}

#[inline]
fn root(n: usize, k: usize) -> Complex64 {
    // Exact values at the quarter turns keep small-n tables free of 1e-17 noise.
    let k = k % n;
    if (4 * k).is_multiple_of(n) {
        return match 4 * k / n {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)
}

/// `chi(k)` for `k` in `0..n`.
pub(crate) fn character_table(n: usize) -> Vec<Complex64> {
    (0..n).map(|k| root(n, k)).collect()
}

/// Forward transform, `F(m) = n^(-d) sum_x chi(-x.m) f(x)`.
pub fn dft_forward(f: &Signal) -> Result<Signal> {
    f.expect_domain(Domain::Space)?;
    if f.grid().total() > FAST_PATH_THRESHOLD {
        dft_forward_fast(f)
    } else {
        dft_forward_naive(f)
    }
}

/// Inverse transform, `f(x) = sum_m chi(x.m) F(m)`.
pub fn dft_inverse(spectrum: &Signal) -> Result<Signal> {
    spectrum.expect_domain(Domain::Frequency)?;
    if spectrum.grid().total() > FAST_PATH_THRESHOLD {
        dft_inverse_fast(spectrum)
    } else {
        dft_inverse_naive(spectrum)
    }
}

/// The O(total^2) direct sum. Permanent correctness oracle for the fast path.
pub fn dft_forward_naive(f: &Signal) -> Result<Signal> {
    f.expect_domain(Domain::Space)?;
    let grid = f.grid();
    let mut out = naive_sum(grid, f.values(), -1);
    let scale = 1.0 / grid.volume();
    out.iter_mut().for_each(|v| *v *= scale);
    Ok(Signal::from_parts_unchecked(grid, Domain::Frequency, out))
}

pub fn dft_inverse_naive(spectrum: &Signal) -> Result<Signal> {
    spectrum.expect_domain(Domain::Frequency)?;
    let grid = spectrum.grid();
    let out = naive_sum(grid, spectrum.values(), 1);
    Ok(Signal::from_parts_unchecked(grid, Domain::Space, out))
}

/// Per-axis mixed-radix transform.
pub fn dft_forward_fast(f: &Signal) -> Result<Signal> {
    f.expect_domain(Domain::Space)?;
    let grid = f.grid();
    let mut values = f.values().to_vec();
    per_axis_fft(grid, &mut values, true);
    let scale = 1.0 / grid.volume();
    values.iter_mut().for_each(|v| *v *= scale);
    Ok(Signal::from_parts_unchecked(grid, Domain::Frequency, values))
}

pub fn dft_inverse_fast(spectrum: &Signal) -> Result<Signal> {
    spectrum.expect_domain(Domain::Frequency)?;
    let grid = spectrum.grid();
    let mut values = spectrum.values().to_vec();
    per_axis_fft(grid, &mut values, false);
    Ok(Signal::from_parts_unchecked(grid, Domain::Space, values))
}

/// `out(m) = sum_x chi(sign * x.m) input(x)`, unnormalised.
fn naive_sum(grid: GridParams, input: &[Complex64], sign: i64) -> Vec<Complex64> {
    let n = grid.n();
    let d = grid.d();
    let table = character_table(n);
    let coords = grid.coordinate_table();

    let row = |m: usize| -> Complex64 {
        let freq = &coords[m * d..(m + 1) * d];
        // Odometer over x: each coordinate that ticks (including a wrap
        // n-1 -> 0) moves x.m by +m_i mod n.
        let mut x = vec![0usize; d];
        let mut dot = 0usize;
        let mut acc = Complex64::new(0.0, 0.0);
        for value in input {
            let k = if sign < 0 { (n - dot) % n } else { dot };
            acc += table[k] * value;
            let mut axis = d;
            while axis > 0 {
                axis -= 1;
                dot = (dot + freq[axis] as usize) % n;
                x[axis] += 1;
                if x[axis] < n {
                    break;
                }
                x[axis] = 0;
            }
        }
        acc
    };

    let total = grid.total();
    if total >= 256 {
        (0..total).into_par_iter().map(row).collect()
    } else {
        (0..total).map(row).collect()
    }
}

fn per_axis_fft(grid: GridParams, values: &mut [Complex64], forward: bool) {
    let n = grid.n();
    let d = grid.d();
    let mut planner = FftPlanner::<f64>::new();
    let fft = if forward {
        planner.plan_fft_forward(n)
    } else {
        planner.plan_fft_inverse(n)
    };
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for axis in 0..d {
        let stride = n.pow((d - 1 - axis) as u32);
        let outer = grid.total() / (n * stride);
        for o in 0..outer {
            for i in 0..stride {
                let base = o * n * stride + i;
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = values[base + k * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    values[base + k * stride] = *v;
                }
            }
        }
    }
}

/// Spectrum of the indicator of `set`, summing over its points only:
/// `O(|S| n^d)` instead of `O(n^(2d))` below the fast-path threshold.
pub fn indicator_spectrum(set: &IndexSet) -> Result<Signal> {
    let grid = set.grid();
    let total = grid.total();
    if total > FAST_PATH_THRESHOLD {
        return dft_forward(&Signal::indicator(set));
    }
    let (n, d) = (grid.n(), grid.d());
    let table = character_table(n);
    let coords = grid.coordinate_table();
    let points: Vec<&[u32]> = set.indices().iter().map(|&x| &coords[x * d..(x + 1) * d]).collect();
    let mut dots = vec![0usize; points.len()];
    let mut freq = vec![0usize; d];
    let scale = 1.0 / grid.volume();
    let mut values = Vec::with_capacity(total);
    for _ in 0..total {
        let acc: Complex64 = dots.iter().map(|&k| table[(n - k) % n]).sum();
        values.push(acc * scale);
        // Same odometer as the naive transform, run over m.
        let mut axis = d;
        while axis > 0 {
            axis -= 1;
            for (dot, x) in dots.iter_mut().zip(&points) {
                *dot = (*dot + x[axis] as usize) % n;
            }
            freq[axis] += 1;
            if freq[axis] < n {
                break;
            }
            freq[axis] = 0;
        }
    }
    Ok(Signal::from_parts_unchecked(grid, Domain::Frequency, values))
}

/// Relative Plancherel defect
/// `|sum |f|^2 - n^d sum |F|^2| / max(sum |f|^2, 1e-300)`.
pub fn plancherel_gap(f: &Signal) -> Result<f64> {
    let spectrum = dft_forward(f)?;
    let space = f.energy();
    let freq = spectrum.energy() * f.grid().volume();
    Ok((space - freq).abs() / space.max(PLANCHEREL_FLOOR))
}

/// Sharp frequency cut-off: zero the spectrum on `missing` and invert.
pub fn band_limit(f: &Signal, missing: &IndexSet) -> Result<Signal> {
    missing.expect_grid(f.grid())?;
    let spectrum = dft_forward(f)?;
    let mut values = spectrum.into_values();
    for &m in missing.indices() {
        values[m] = Complex64::new(0.0, 0.0);
    }
    dft_inverse(&Signal::from_parts_unchecked(
        f.grid(),
        Domain::Frequency,
        values,
    ))
}

/// Numerical support: `{x : |f(x)| > max(tau_rel * max|f|, 1e-12)}`.
pub fn support(f: &Signal, tau_rel: f64) -> IndexSet {
    let peak = f.max_abs();
    let grid = f.grid();
    if peak == 0.0 {
        return IndexSet::empty(grid);
    }
    let threshold = (tau_rel * peak).max(SUPPORT_ABS_FLOOR);
    let mask: Vec<bool> = f.values().iter().map(|v| v.norm() > threshold).collect();
    IndexSet::from_mask(grid, &mask)
}

/// [`support`] at the default threshold.
pub fn default_support(f: &Signal) -> IndexSet {
    support(f, SUPPORT_REL_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid(n: usize, d: usize) -> GridParams {
        GridParams::new(n, d).unwrap()
    }

    fn assert_values(s: &Signal, expected: &[(f64, f64)], tol: f64) {
        for (v, &(re, im)) in s.values().iter().zip(expected) {
            assert_abs_diff_eq!(v.re, re, epsilon = tol);
            assert_abs_diff_eq!(v.im, im, epsilon = tol);
        }
    }

    #[test]
    fn indicator_spectrum_matches_transform() {
        for (n, d) in [(7, 2), (12, 1), (4, 3)] {
            let g = grid(n, d);
            let set = IndexSet::new(g, (0..g.total()).filter(|i| i % 3 != 1).collect()).unwrap();
            let fast = indicator_spectrum(&set).unwrap();
            let naive = dft_forward_naive(&Signal::indicator(&set)).unwrap();
            assert!(fast.max_abs_diff(&naive) <= 1e-14);
        }
    }

    #[test]
    fn characters() {
        let g4 = grid(4, 1);
        assert_eq!(character(g4, 0), Complex64::new(1.0, 0.0));
        assert_eq!(character(g4, 1), Complex64::new(0.0, 1.0));
        assert_eq!(character(g4, -3), Complex64::new(0.0, 1.0));
        let c = character(grid(8, 1), 1);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(c.re, h, epsilon = 1e-15);
        assert_abs_diff_eq!(c.im, h, epsilon = 1e-15);
        for t in -20..20 {
            assert_abs_diff_eq!(character(grid(7, 1), t).norm(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn forward_examples() {
        let g = grid(4, 1);
        let f = dft_forward(&Signal::delta(g, 0)).unwrap();
        assert_values(&f, &[(0.25, 0.0); 4], 1e-15);

        let ones = Signal::from_real(grid(3, 2), Domain::Space, &[1.0; 9]).unwrap();
        let f = dft_forward(&ones).unwrap();
        assert_abs_diff_eq!(f.values()[0].re, 1.0, epsilon = 1e-15);
        assert!(f.values()[1..].iter().all(|v| v.norm() < 1e-15));

        let ind = Signal::from_real(g, Domain::Space, &[1.0, 0.0, 1.0, 0.0]).unwrap();
        let f = dft_forward(&ind).unwrap();
        assert_values(&f, &[(0.5, 0.0), (0.0, 0.0), (0.5, 0.0), (0.0, 0.0)], 1e-15);
    }

    #[test]
    fn domain_tags_enforced() {
        let g = grid(4, 1);
        let spec = Signal::zeros(g, Domain::Frequency);
        assert!(dft_forward(&spec).is_err());
        assert!(dft_inverse(&Signal::zeros(g, Domain::Space)).is_err());
    }

    #[test]
    fn inverse_examples() {
        let g = grid(8, 1);
        let zero = dft_inverse(&Signal::zeros(g, Domain::Frequency)).unwrap();
        assert!(zero.is_zero());
        let flat = Signal::from_real(g, Domain::Frequency, &[0.125; 8]).unwrap();
        let back = dft_inverse(&flat).unwrap();
        assert!(back.max_abs_diff(&Signal::delta(g, 0)) < 1e-14);
    }

    #[test]
    fn plancherel_examples() {
        let g = grid(8, 1);
        assert_eq!(plancherel_gap(&Signal::zeros(g, Domain::Space)).unwrap(), 0.0);
        assert!(plancherel_gap(&Signal::delta(g, 0)).unwrap() < 1e-15);
    }

    #[test]
    fn band_limit_examples() {
        let g = grid(8, 1);
        let f = Signal::delta(g, 0);
        let same = band_limit(&f, &IndexSet::empty(g)).unwrap();
        assert!(same.max_abs_diff(&f) < 1e-15);
        let none = band_limit(&f, &IndexSet::full(g)).unwrap();
        assert!(none.is_zero());

        // Hand evaluation: r(x) = delta_0(x) - (1/8)(-1)^x.
        let r = band_limit(&f, &IndexSet::new(g, vec![4]).unwrap()).unwrap();
        let expected: Vec<(f64, f64)> = (0..8)
            .map(|x| {
                let sign = if x % 2 == 0 { 1.0 } else { -1.0 };
                let delta = if x == 0 { 1.0 } else { 0.0 };
                (delta - sign / 8.0, 0.0)
            })
            .collect();
        assert_values(&r, &expected, 1e-15);
        assert_abs_diff_eq!(r.values()[0].re, 0.875, epsilon = 1e-15);
        assert_abs_diff_eq!(r.values()[3].re, 0.125, epsilon = 1e-15);
        assert_abs_diff_eq!(r.values()[2].re, -0.125, epsilon = 1e-15);

        let other = IndexSet::empty(grid(4, 1));
        assert!(band_limit(&f, &other).is_err());
    }

    #[test]
    fn support_examples() {
        let g = grid(4, 1);
        assert!(default_support(&Signal::zeros(g, Domain::Space)).is_empty());
        assert_eq!(default_support(&Signal::delta(g, 0)).indices(), &[0]);
        let ind = Signal::from_real(g, Domain::Space, &[1.0, 0.0, 1.0, 0.0]).unwrap();
        let spec = dft_forward(&ind).unwrap();
        assert_eq!(default_support(&spec).indices(), &[0, 2]);
        // absolute floor
        let tiny = Signal::from_real(g, Domain::Space, &[1e-13, 0.0, 0.0, 0.0]).unwrap();
        assert!(default_support(&tiny).is_empty());
    }

    #[test]
    fn fast_path_above_threshold() {
        // 65^2 = 4225 > 4096 routes through the fast path.
        let g = grid(65, 2);
        let values: Vec<f64> = (0..g.total()).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect();
        let f = Signal::from_real(g, Domain::Space, &values).unwrap();
        let fast = dft_forward(&f).unwrap();
        let naive = dft_forward_naive(&f).unwrap();
        assert!(fast.relative_distance(&naive) < 1e-10);
        let back = dft_inverse(&fast).unwrap();
        assert!(back.relative_distance(&f) < 1e-10);
    }
}
