//! Recovery of a signal from its spectrum with a set of frequencies missing.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytics::salem_level;
use crate::bounds::{recovery_condition, ConditionExtras, ConditionId, ConditionVerdict};
use crate::error::{Error, Result};
use crate::grid::GridParams;
use crate::linalg::PivotedQr;
use crate::set::IndexSet;
use crate::signal::{Domain, Signal};
use crate::spectral::{character_table, default_support, dft_forward, dft_inverse};

/// Largest number of supports an exhaustive search may visit.
pub const COMBINATORIAL_BUDGET: f64 = 1e6;
pub const DEFAULT_RANK_TOL: f64 = 1e-8;
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-8;
/// Relative residual below which a recovered signal counts as consistent
/// with the observations.
pub const CONSISTENCY_TOL: f64 = 1e-8;
/// Largest imaginary part tolerated by [`alphabet_round`].
pub const ALPHABET_IMAG_TOL: f64 = 1e-6;

/// Spectrum of an unknown signal, observed everywhere except on `missing`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedSpectrum {
    grid: GridParams,
    missing: IndexSet,
    /// Full-length; entries on `missing` are zero.
    values: Vec<Complex64>,
}

impl MaskedSpectrum {
    /// Values on `missing` are discarded.
    pub fn new(grid: GridParams, missing: IndexSet, mut values: Vec<Complex64>) -> Result<Self> {
        missing.expect_grid(grid)?;
        let checked = Signal::new(grid, Domain::Frequency, std::mem::take(&mut values))?;
        values = checked.into_values();
        for &m in missing.indices() {
            values[m] = Complex64::new(0.0, 0.0);
        }
        Ok(MaskedSpectrum {
            grid,
            missing,
            values,
        })
    }

    /// Hides `missing` from a known spectrum.
    pub fn from_spectrum(spectrum: &Signal, missing: IndexSet) -> Result<Self> {
        spectrum.expect_domain(Domain::Frequency)?;
        Self::new(spectrum.grid(), missing, spectrum.values().to_vec())
    }

    /// The exact spectrum of `f` with `missing` hidden.
    pub fn observe(f: &Signal, missing: IndexSet) -> Result<Self> {
        Self::from_spectrum(&dft_forward(f)?, missing)
    }

    pub fn grid(&self) -> GridParams {
        self.grid
    }

    pub fn missing(&self) -> &IndexSet {
        &self.missing
    }

    /// Full-length values with zeros on the missing frequencies.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn observed(&self, m: usize) -> Option<Complex64> {
        (!self.missing.contains(m)).then(|| self.values[m])
    }

    /// `r(x) = sum_{m not in S} observed(m) chi(x.m)`.
    pub fn partial_inverse(&self) -> Result<Signal> {
        dft_inverse(&Signal::from_parts_unchecked(
            self.grid,
            Domain::Frequency,
            self.values.clone(),
        ))
    }

    /// Relative `l2` misfit on the observed frequencies between `f^` and the
    /// data. Absolute when the data are all zero.
    pub fn residual(&self, f: &Signal) -> Result<f64> {
        f.expect_grid(self.grid)?;
        let spectrum = dft_forward(f)?;
        let mask = self.missing.mask();
        let (mut diff, mut data) = (0.0, 0.0);
        for (m, (a, b)) in spectrum.values().iter().zip(&self.values).enumerate() {
            if !mask[m] {
                diff += (a - b).norm_sqr();
                data += b.norm_sqr();
            }
        }
        Ok(if data > 0.0 { (diff / data).sqrt() } else { diff.sqrt() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dra,
    Alphabet,
    Enumeration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryReport {
    #[serde(skip)]
    pub recovered: Signal,
    pub method: Method,
    /// A priori bound on `max_x |r(x) - f(x)|`; absent for enumeration.
    pub error_bound: Option<f64>,
    pub conditions: Vec<ConditionVerdict>,
    pub guaranteed: bool,
    /// Relative misfit of `recovered` on the observed frequencies.
    pub residual: f64,
    /// Sparsity fed to the conditions.
    pub sparsity: usize,
    /// `sparsity` is the support size of `recovered`, not a prior.
    pub sparsity_a_posteriori: bool,
    /// A different signal of the same support size also fits the data.
    pub ambiguous: bool,
    /// Outcome of the brute-force uniqueness certificate, when computed.
    pub unique: Option<bool>,
}

/// `G(x) = 1` iff `|r(x)| >= 1/2`.
pub fn dra_round(r: &Signal) -> Signal {
    let values = r
        .values()
        .iter()
        .map(|v| Complex64::new(if v.norm() >= 0.5 { 1.0 } else { 0.0 }, 0.0))
        .collect();
    Signal::from_parts_unchecked(r.grid(), r.domain(), values)
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DraOptions {
    /// Known bound on `|supp f|`; otherwise the recovered support is used.
    pub sparsity: Option<usize>,
    pub p: Option<f64>,
    pub c_pq: Option<f64>,
}

/// `n^(-d/2) sqrt(|S| t)`, scaled by the largest signal magnitude.
fn rounding_error_bound(grid: GridParams, s: usize, t: usize, amplitude: f64) -> f64 {
    amplitude * ((s * t) as f64 / grid.volume()).sqrt()
}

/// Verdicts shared by the rounding methods, with the sparsity `t`.
fn rounding_conditions(m: &MaskedSpectrum, t: usize, a_posteriori: bool, options: &DraOptions) -> Result<Vec<ConditionVerdict>> {
    let grid = m.grid;
    let s = m.missing.len();
    let mut out = vec![recovery_condition(ConditionId::RoundingPlain, t, s, grid, &ConditionExtras::default())?];
    if let (Some(p), Some(c)) = (options.p, options.c_pq) {
        let extras = ConditionExtras {
            p: Some(p),
            c_pq: Some(c),
            ..Default::default()
        };
        out.push(recovery_condition(ConditionId::RoundingRestriction, t, s, grid, &extras)?);
    }
    if !m.missing.is_empty() {
        let extras = ConditionExtras {
            lambda_salem: Some(salem_level(&m.missing)?),
            dens: Some(m.missing.density()),
            ..Default::default()
        };
        let mut v = recovery_condition(ConditionId::SalemRecovery, t, s, grid, &extras)?;
        // Always judged on the recovered support.
        v.a_posteriori = true;
        out.push(v);
    }
    for v in out.iter_mut() {
        v.a_posteriori |= a_posteriori;
    }
    Ok(out)
}

/// Whether a condition that grants a guarantee is satisfied. The Salem
/// verdict is reported but never grants one on its own.
fn granted(conditions: &[ConditionVerdict]) -> bool {
    conditions
        .iter()
        .any(|v| v.satisfied && v.id != ConditionId::SalemRecovery)
}

/// Direct rounding: `G = dra_round(r)` with `r` the inverse transform of the
/// observed part of the spectrum.
///
/// With a prior sparsity the report is guaranteed when a rounding condition
/// holds and the error bound is below 1/2. Without one the conditions are
/// evaluated on `|supp G|` and a guarantee additionally requires `G` to be
/// nonzero and to reproduce the observations: an empty `G` says nothing
/// about a nonempty support.
pub fn dra_recover(m: &MaskedSpectrum, options: &DraOptions) -> Result<RecoveryReport> {
    let r = m.partial_inverse()?;
    let recovered = dra_round(&r);
    let rec_size = recovered.values().iter().filter(|v| v.re != 0.0).count();
    let (t, a_posteriori) = match options.sparsity {
        Some(t) => (t, false),
        None => (rec_size, true),
    };
    let error_bound = rounding_error_bound(m.grid, m.missing.len(), t, 1.0);
    let conditions = rounding_conditions(m, t, a_posteriori, options)?;
    let residual = m.residual(&recovered)?;
    let guaranteed = granted(&conditions)
        && error_bound < 0.5
        && (!a_posteriori || (rec_size > 0 && residual <= CONSISTENCY_TOL));
    Ok(RecoveryReport {
        recovered,
        method: Method::Dra,
        error_bound: Some(error_bound),
        conditions,
        guaranteed,
        residual,
        sparsity: t,
        sparsity_a_posteriori: a_posteriori,
        ambiguous: false,
        unique: None,
    })
}

fn check_alphabet(alphabet: &[f64]) -> Result<()> {
    if alphabet.is_empty() {
        return Err(Error::InvalidParameter("empty alphabet".into()));
    }
    if alphabet.iter().any(|a| !a.is_finite()) || alphabet.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "alphabet must be finite and strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Maps every value to the nearest alphabet letter by real part, ties going
/// to the smaller letter.
pub fn alphabet_round(r: &Signal, alphabet: &[f64]) -> Result<Signal> {
    check_alphabet(alphabet)?;
    let mut values = Vec::with_capacity(r.values().len());
    for (x, v) in r.values().iter().enumerate() {
        if v.im.abs() > ALPHABET_IMAG_TOL {
            return Err(Error::InvalidSignal(format!(
                "imaginary part {} at index {x} exceeds {ALPHABET_IMAG_TOL}",
                v.im
            )));
        }
        let k = alphabet.partition_point(|&a| a < v.re);
        let letter = if k == 0 {
            alphabet[0]
        } else if k == alphabet.len() {
            alphabet[k - 1]
        } else {
            let (lo, hi) = (alphabet[k - 1], alphabet[k]);
            if hi - v.re < v.re - lo {
                hi
            } else {
                lo
            }
        };
        values.push(Complex64::new(letter, 0.0));
    }
    Ok(Signal::from_parts_unchecked(r.grid(), r.domain(), values))
}

/// Rounding to a finite real alphabet. The error bound is the rounding
/// bound scaled by the largest letter magnitude and is compared with half
/// the smallest gap.
pub fn alphabet_recover(m: &MaskedSpectrum, alphabet: &[f64], options: &DraOptions) -> Result<RecoveryReport> {
    check_alphabet(alphabet)?;
    let r = m.partial_inverse()?;
    let recovered = alphabet_round(&r, alphabet)?;
    let rec_size = recovered.values().iter().filter(|v| v.re != 0.0).count();
    let (t, a_posteriori) = match options.sparsity {
        Some(t) => (t, false),
        None => (rec_size, true),
    };
    let amplitude = alphabet.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let error_bound = rounding_error_bound(m.grid, m.missing.len(), t, amplitude);
    let half_gap = alphabet
        .windows(2)
        .map(|w| (w[1] - w[0]) / 2.0)
        .fold(f64::INFINITY, f64::min);
    let conditions = vec![ConditionVerdict {
        id: ConditionId::AlphabetMargin,
        lhs: error_bound,
        threshold: half_gap,
        satisfied: error_bound < half_gap,
        a_posteriori,
    }];
    let residual = m.residual(&recovered)?;
    let guaranteed =
        conditions[0].satisfied && (!a_posteriori || (rec_size > 0 && residual <= CONSISTENCY_TOL));
    Ok(RecoveryReport {
        recovered,
        method: Method::Alphabet,
        error_bound: Some(error_bound),
        conditions,
        guaranteed,
        residual,
        sparsity: t,
        sparsity_a_posteriori: a_posteriori,
        ambiguous: false,
        unique: None,
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn check_budget(needed: f64) -> Result<()> {
    if needed > COMBINATORIAL_BUDGET {
        return Err(Error::BudgetExceeded {
            needed,
            budget: COMBINATORIAL_BUDGET,
        });
    }
    Ok(())
}

/// Advances `c` to the next `k`-subset of `lo..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Calls `visit` on every `k`-subset of `0..n` whose first element is
/// `first`, in lexicographic order, until it returns `false`.
fn for_each_with_first(first: usize, k: usize, n: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    if k == 0 || first + k > n {
        return;
    }
    let mut c: Vec<usize> = (first..first + k).collect();
    loop {
        if !visit(&c) {
            return;
        }
        // The first slot stays fixed.
        if !next_combination(&mut c[1..], n) {
            return;
        }
    }
}

/// For each `x`, the column `(c chi(-x.m))_{m not in S}`.
fn character_columns(grid: GridParams, missing: &IndexSet, scale: f64) -> Vec<Vec<Complex64>> {
    let n = grid.n();
    let table = character_table(n);
    let mask = missing.mask();
    let rows: Vec<usize> = (0..grid.total()).filter(|&m| !mask[m]).collect();
    (0..grid.total())
        .into_par_iter()
        .map(|x| {
            rows.iter()
                .map(|&m| table[(n - grid.dot(x, m)) % n] * scale)
                .collect()
        })
        .collect()
}

/// Whether every signal with at most `t` nonzeros is determined by its
/// spectrum off `missing`: every `2t` columns of `[chi(-x.m)]_{m not in S}`
/// are independent.
pub fn uniqueness_certificate(grid: GridParams, t: usize, missing: &IndexSet, tol: f64) -> Result<bool> {
    missing.expect_grid(grid)?;
    let total = grid.total();
    let width = 2 * t;
    if width > total {
        return Err(Error::InvalidParameter(format!(
            "2t = {width} exceeds the grid size {total}"
        )));
    }
    check_budget(binomial(total, width))?;
    if width == 0 || missing.is_empty() {
        return Ok(true);
    }
    if width > total - missing.len() {
        return Ok(false);
    }
    let columns = character_columns(grid, missing, 1.0);
    let ok = (0..total).into_par_iter().all(|first| {
        let mut ok = true;
        let mut picked = Vec::with_capacity(width);
        for_each_with_first(first, width, total, |support| {
            picked.clear();
            picked.extend(support.iter().map(|&x| columns[x].clone()));
            ok = PivotedQr::new(&picked, tol).full_column_rank();
            ok
        });
        ok
    });
    Ok(ok)
}

struct Fit {
    support: Vec<usize>,
    coeffs: Vec<Complex64>,
}

/// Sparsest fit by exhaustive search: supports of size `0, 1, ..., t`, each
/// size in lexicographic order, solved by least squares; the first support
/// whose relative residual is at most `residual_tol` wins. A second fit of
/// the same size giving a different signal marks the report ambiguous.
///
/// The report is guaranteed when the classical condition holds for `t`,
/// which makes the fit unique among `t`-sparse signals.
pub fn enumeration_recover(m: &MaskedSpectrum, t: usize, residual_tol: f64) -> Result<RecoveryReport> {
    let grid = m.grid;
    let total = grid.total();
    let t = t.min(total);
    check_budget((0..=t).map(|k| binomial(total, k)).sum())?;

    let mask = m.missing.mask();
    let y: Vec<Complex64> = (0..total).filter(|&i| !mask[i]).map(|i| m.values[i]).collect();
    let y_norm = y.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let relative = |res: f64| if y_norm > 0.0 { res / y_norm } else { res };
    let columns = character_columns(grid, &m.missing, 1.0 / grid.volume());

    let try_fit = |support: &[usize]| -> Option<Fit> {
        let picked: Vec<Vec<Complex64>> = support.iter().map(|&x| columns[x].clone()).collect();
        let (coeffs, res) = PivotedQr::new(&picked, DEFAULT_RANK_TOL).solve(&y);
        (relative(res) <= residual_tol).then(|| Fit {
            support: support.to_vec(),
            coeffs,
        })
    };

    let mut found: Vec<Fit> = Vec::new();
    if relative(y_norm) <= residual_tol {
        found.push(Fit {
            support: Vec::new(),
            coeffs: Vec::new(),
        });
    }
    for k in 1..=t {
        if !found.is_empty() {
            break;
        }
        // Each worker keeps its first two fits; concatenating in order of the
        // first element preserves lexicographic order.
        let per_first: Vec<Vec<Fit>> = (0..total)
            .into_par_iter()
            .map(|first| {
                let mut fits = Vec::new();
                for_each_with_first(first, k, total, |support| {
                    if let Some(fit) = try_fit(support) {
                        fits.push(fit);
                    }
                    fits.len() < 2
                });
                fits
            })
            .collect();
        found = per_first.into_iter().flatten().collect();
    }

    let to_signal = |fit: &Fit| {
        let mut values = vec![Complex64::new(0.0, 0.0); total];
        for (&x, &c) in fit.support.iter().zip(&fit.coeffs) {
            values[x] = c;
        }
        Signal::from_parts_unchecked(grid, Domain::Space, values)
    };
    let first = found.first().ok_or(Error::NoFit(t))?;
    let recovered = to_signal(first);
    let scale = recovered.max_abs().max(f64::MIN_POSITIVE);
    let ambiguous = found[1..]
        .iter()
        .any(|other| to_signal(other).max_abs_diff(&recovered) > 1e-6 * scale);

    let ds = recovery_condition(ConditionId::DonohoStark, t, m.missing.len(), grid, &ConditionExtras::default())?;
    let unique = if 2 * t <= total && binomial(total, 2 * t) <= COMBINATORIAL_BUDGET {
        Some(uniqueness_certificate(grid, t, &m.missing, DEFAULT_RANK_TOL)?)
    } else {
        None
    };
    let residual = m.residual(&recovered)?;
    Ok(RecoveryReport {
        guaranteed: ds.satisfied && !ambiguous,
        recovered,
        method: Method::Enumeration,
        error_bound: None,
        conditions: vec![ds],
        residual,
        sparsity: t,
        sparsity_a_posteriori: false,
        ambiguous,
        unique,
    })
}

/// Support size of `f` under the default threshold.
pub fn sparsity(f: &Signal) -> usize {
    default_support(f).len()
}
