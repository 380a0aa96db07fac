//! Restriction estimates, uncertainty-principle audits and the sufficient
//! conditions used by recovery.
//!
//! A `(p, q)` restriction estimate for `S` is
//!
//! ```text
//! ( |S|^-1 sum_{m in S} |f^(m)|^q )^(1/q) <= C_{p,q} n^(-d) ||f||_p
//! ```
//!
//! for every `f`. The checks here evaluate both sides for a concrete `f`;
//! none of them certifies an inequality symbolically.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{lambda_energy, random_set, salem_level, size_level, LAMBDA_ENERGY_SUBSET_CAP};
use crate::error::{Error, Result};
use crate::grid::GridParams;
use crate::rng::{self, derive_seed};
use crate::set::IndexSet;
use crate::signal::{lp_norm, Domain, Signal};
use crate::spectral::{character_table, dft_forward, dft_inverse};

/// Relative tolerance for reporting an inequality as tight.
pub const TIGHT_TOL: f64 = 1e-9;
/// Relative slack granted to `lhs <= rhs` checks of restriction bounds.
pub const BOUND_SLACK: f64 = 1e-12;
/// Largest fraction of `f`'s spectral mass allowed outside `S` for `f` to
/// count as band-limited to `S`.
pub const BAND_LIMIT_TOL: f64 = 1e-10;

fn within_slack(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs * (1.0 + BOUND_SLACK) + f64::MIN_POSITIVE
}

fn is_tight(lhs: f64, rhs: f64) -> bool {
    (lhs - rhs).abs() <= TIGHT_TOL * lhs.abs().max(rhs.abs())
}

/// `1 / p'` for the conjugate exponent `1/p + 1/p' = 1`.
fn inverse_conjugate(p: f64) -> f64 {
    if p.is_infinite() {
        1.0
    } else {
        1.0 - 1.0 / p
    }
}

/// Averaged `l^q` norm of `spectrum` over `set`; `q = inf` is the max.
pub fn restriction_lhs(spectrum: &Signal, set: &IndexSet, q: f64) -> Result<f64> {
    spectrum.expect_domain(Domain::Frequency)?;
    set.expect_grid(spectrum.grid())?;
    set.expect_nonempty()?;
    if !(q >= 1.0) {
        return Err(Error::InvalidParameter(format!("exponent q = {q} must be >= 1")));
    }
    Ok(averaged_norm(spectrum.values(), set, q))
}

fn averaged_norm(values: &[num_complex::Complex64], set: &IndexSet, q: f64) -> f64 {
    let picked = set.indices().iter().map(|&m| values[m].norm());
    if q.is_infinite() {
        picked.fold(0.0, f64::max)
    } else {
        (picked.map(|v| v.powf(q)).sum::<f64>() / set.len() as f64).powf(1.0 / q)
    }
}

fn check_exponents(p: f64, q: f64) -> Result<()> {
    if !(p >= 1.0) || !(q >= p) {
        return Err(Error::InvalidParameter(format!(
            "restriction exponents need 1 <= p <= q, got p = {p}, q = {q}"
        )));
    }
    Ok(())
}

/// `restriction_lhs(f^, S, q) / (n^(-d) ||f||_p)`, zero for `f = 0`.
fn restriction_ratio(
    values: &[num_complex::Complex64],
    spectrum: &[num_complex::Complex64],
    set: &IndexSet,
    p: f64,
    q: f64,
) -> f64 {
    let denom = lp_norm(values, p) / set.grid().volume();
    if denom == 0.0 {
        return 0.0;
    }
    averaged_norm(spectrum, set, q) / denom
}

/// Lower estimate of the best `C_{p,q}` for `set`: the largest ratio over
/// every delta, the extension `g(x) = sum_{m in S} chi(x.m)`, `trials`
/// Gaussian signals and `trials` random-set indicators.
///
/// Trial `k` draws from `derive_seed(seed, [family, k])`, so the family for
/// `trials` is contained in the family for `trials + 1`.
pub fn empirical_restriction_constant(
    set: &IndexSet,
    p: f64,
    q: f64,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    check_exponents(p, q)?;
    set.expect_nonempty()?;
    let grid = set.grid();
    let total = grid.total();
    let table = character_table(grid.n());
    let norm = 1.0 / grid.volume();

    // delta_a^(m) = n^(-d) chi(-a.m), no transform needed.
    let delta_best = (0..total)
        .into_par_iter()
        .map(|a| {
            let mut spectrum = vec![num_complex::Complex64::new(0.0, 0.0); total];
            for &m in set.indices() {
                let k = (grid.n() - grid.dot(a, m)) % grid.n();
                spectrum[m] = table[k] * norm;
            }
            let mut values = vec![num_complex::Complex64::new(0.0, 0.0); total];
            values[a] = num_complex::Complex64::new(1.0, 0.0);
            restriction_ratio(&values, &spectrum, set, p, q)
        })
        .reduce(|| 0.0, f64::max);

    let extension = dft_inverse(&Signal::indicator(set).with_domain(Domain::Frequency))?;
    let ext_spectrum = dft_forward(&extension)?;
    let ext_ratio = restriction_ratio(extension.values(), ext_spectrum.values(), set, p, q);

    let trial_best = (0..trials)
        .into_par_iter()
        .map(|k| -> Result<f64> {
            let mut r = rng::seeded(derive_seed(seed, &[0, k as u64]));
            let gauss = rng::gaussian_signal(&mut r, grid, Domain::Space);
            let gs = dft_forward(&gauss)?;
            let a = restriction_ratio(gauss.values(), gs.values(), set, p, q);

            let mut r = rng::seeded(derive_seed(seed, &[1, k as u64]));
            let size = r.random_range(1..=total);
            let ind = Signal::indicator(&random_set(grid, size, r.random())?);
            let is = dft_forward(&ind)?;
            let b = restriction_ratio(ind.values(), is.values(), set, p, q);
            Ok(a.max(b))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    Ok(delta_best.max(ext_ratio).max(trial_best))
}

/// `(lambda_size^(-1/2) lambda_energy^(1/4), exact)`: the `(4/3, 2)`
/// restriction constant built from additive energy.
pub fn l43_constant(set: &IndexSet) -> Result<(f64, bool)> {
    let energy = lambda_energy(set, LAMBDA_ENERGY_SUBSET_CAP)?;
    let constant = size_level(set).powf(-0.5) * energy.value.powf(0.25);
    Ok((constant, energy.exact))
}

/// A single evaluated `lhs <= rhs` bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl BoundCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        BoundCheck {
            lhs,
            rhs,
            holds: within_slack(lhs, rhs),
        }
    }
}

/// Outcome of [`check_l43_restriction`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct L43Check {
    pub bound: BoundCheck,
    pub constant: f64,
    pub lambda_size: f64,
    /// `false` when the energy level is the upper-bound surrogate.
    pub energy_exact: bool,
}

/// Evaluates the `(4/3, 2)` energy restriction bound
/// `rms_{S} |f^| <= lambda_size^(-1/2) lambda_energy^(1/4) n^(-d) ||f||_{4/3}`.
pub fn check_l43_restriction(f: &Signal, set: &IndexSet) -> Result<L43Check> {
    set.expect_grid(f.grid())?;
    let spectrum = dft_forward(f)?;
    let lhs = restriction_lhs(&spectrum, set, 2.0)?;
    let (constant, exact) = l43_constant(set)?;
    let rhs = constant * f.norm(4.0 / 3.0) / f.grid().volume();
    Ok(L43Check {
        bound: BoundCheck::new(lhs, rhs),
        constant,
        lambda_size: size_level(set),
        energy_exact: exact,
    })
}

/// Outcome of [`check_salem_restriction`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SalemRestrictionCheck {
    pub p: f64,
    pub lambda_salem: f64,
    pub dens: f64,
    /// Whether the spectrum of `f` vanishes off `S` (to [`BAND_LIMIT_TOL`]).
    pub band_limited: bool,
    /// `p = 1` bound; `None` when not applicable.
    pub l1: Option<BoundCheck>,
    /// `p = 2` Plancherel bound; always applicable.
    pub l2: BoundCheck,
    /// Interpolated bound at `p`; `None` when not applicable.
    pub interpolated: Option<BoundCheck>,
}

impl SalemRestrictionCheck {
    /// All applicable bounds hold.
    pub fn holds(&self) -> bool {
        self.l2.holds
            && self.l1.is_none_or(|b| b.holds)
            && self.interpolated.is_none_or(|b| b.holds)
    }
}

/// The Salem restriction constant at exponent `p` in `[1, 2]`:
/// `((1-dens)^(-1/2) L^(1/2) |S|^(-1/4))^(1 - 2/p') (n^d/|S|)^(1/p')`,
/// i.e. the geometric interpolation of the `p = 1` and `p = 2` constants.
/// `None` when `dens = 1` and `p < 2`.
pub fn salem_restriction_constant(lambda_salem: f64, size: usize, grid: GridParams, p: f64) -> Option<f64> {
    let dens = size as f64 / grid.volume();
    let inv_pc = inverse_conjugate(p);
    let theta = 1.0 - 2.0 * inv_pc;
    let endpoint_l1 = if dens < 1.0 {
        lambda_salem.sqrt() * (size as f64).powf(-0.25) / (1.0 - dens).sqrt()
    } else if theta == 0.0 {
        1.0
    } else {
        return None;
    };
    let endpoint_l2 = (grid.volume() / size as f64).powf(inv_pc);
    Some(endpoint_l1.powf(theta) * endpoint_l2)
}

/// Evaluates the Salem-level restriction bounds on `S`:
///
/// * `p = 1`: `rms_S |f^| <= n^(-d) |S|^(-1/4) L^(1/2) ||f||_1 / sqrt(1 - dens)`
/// * `p = 2`: `rms_S |f^| <= |S|^(-1/2) n^(-d/2) ||f||_2`
/// * `p` itself, via [`salem_restriction_constant`].
///
/// The `p = 1` bound (and so the interpolation) relies on `f^` vanishing
/// off `S`; for other `f` those two are reported as not applicable, as they
/// are when `dens(S) = 1`.
pub fn check_salem_restriction(f: &Signal, set: &IndexSet, p: f64) -> Result<SalemRestrictionCheck> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("Salem restriction needs p in [1, 2], got {p}")));
    }
    set.expect_grid(f.grid())?;
    let grid = f.grid();
    let spectrum = dft_forward(f)?;
    let lhs = restriction_lhs(&spectrum, set, 2.0)?;
    let lambda = salem_level(set)?;
    let dens = set.density();
    let band_limited = is_band_limited(&spectrum, set);
    let volume = grid.volume();
    let size = set.len() as f64;

    let l2 = BoundCheck::new(lhs, size.powf(-0.5) * volume.powf(-0.5) * f.norm(2.0));
    let applicable = band_limited && dens < 1.0;
    let l1 = applicable.then(|| {
        let rhs = size.powf(-0.25) * lambda.sqrt() * f.norm(1.0) / volume / (1.0 - dens).sqrt();
        BoundCheck::new(lhs, rhs)
    });
    let interpolated = if band_limited {
        salem_restriction_constant(lambda, set.len(), grid, p)
            .map(|c| BoundCheck::new(lhs, c * f.norm(p) / volume))
    } else {
        None
    };
    Ok(SalemRestrictionCheck {
        p,
        lambda_salem: lambda,
        dens,
        band_limited,
        l1,
        l2,
        interpolated,
    })
}

fn is_band_limited(spectrum: &Signal, set: &IndexSet) -> bool {
    let mask = set.mask();
    let (inside, outside) = spectrum
        .values()
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(i, o), (m, v)| {
            if mask[m] {
                (i + v.norm_sqr(), o)
            } else {
                (i, o + v.norm_sqr())
            }
        });
    outside <= BAND_LIMIT_TOL * BAND_LIMIT_TOL * (inside + outside)
}

/// Which uncertainty inequality to audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UpKind {
    /// `|E| |Sigma| >= n^d`.
    Classical,
    /// `|E|^(1/p) |Sigma| >= n^d / C_{p,q}` with a supplied constant.
    Restriction,
    /// `|E| |Sigma|^(3/4) >= n^d sqrt((1 - dens) / L)`.
    Salem,
    /// The restriction form with the interpolated Salem constant at `p`.
    Interpolated,
}

impl fmt::Display for UpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            UpKind::Classical => "classical",
            UpKind::Restriction => "restriction",
            UpKind::Salem => "salem",
            UpKind::Interpolated => "interpolated",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditOptions {
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub c_pq: Option<f64>,
    /// Relative support threshold.
    pub tau_rel: f64,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            p: None,
            q: None,
            c_pq: None,
            tau_rel: crate::spectral::SUPPORT_REL_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditInputs {
    pub n: usize,
    pub d: usize,
    pub e_size: usize,
    pub sigma_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    /// `1/p'`, which stays finite at `p = 1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_conjugate_inverse: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_pq: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_salem: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dens: Option<f64>,
}

/// One evaluated uncertainty inequality, `lhs >= rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpAudit {
    pub kind: UpKind,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs >= rhs`, with equality judged at [`TIGHT_TOL`].
    pub holds: bool,
    pub tight: bool,
    pub inputs: AuditInputs,
}

/// Audits one uncertainty inequality for `f` with `E = supp f` and
/// `Sigma = supp f^`.
pub fn up_audit(f: &Signal, kind: UpKind, options: &AuditOptions) -> Result<UpAudit> {
    f.expect_domain(Domain::Space)?;
    let grid = f.grid();
    let e = crate::spectral::support(f, options.tau_rel);
    if e.is_empty() {
        return Err(Error::InvalidSignal("uncertainty audit of the zero signal".into()));
    }
    let spectrum = dft_forward(f)?;
    let sigma = crate::spectral::support(&spectrum, options.tau_rel);
    let e_size = e.len() as f64;
    let s_size = sigma.len() as f64;
    let volume = grid.volume();
    let mut inputs = AuditInputs {
        n: grid.n(),
        d: grid.d(),
        e_size: e.len(),
        sigma_size: sigma.len(),
        p: None,
        q: None,
        p_conjugate_inverse: None,
        c_pq: None,
        lambda_salem: None,
        dens: None,
    };

    let (lhs, rhs) = match kind {
        UpKind::Classical => (e_size * s_size, volume),
        UpKind::Restriction => {
            let p = options.p.ok_or(Error::MissingParameter("p"))?;
            let c = options.c_pq.ok_or(Error::MissingParameter("c_pq"))?;
            let q = options.q.unwrap_or(2.0);
            check_exponents(p, q)?;
            inputs.p = Some(p);
            inputs.q = Some(q);
            inputs.p_conjugate_inverse = Some(inverse_conjugate(p));
            inputs.c_pq = Some(c);
            (e_size.powf(1.0 / p) * s_size, volume / c)
        }
        UpKind::Salem => {
            let lambda = salem_level(&sigma)?;
            let dens = sigma.density();
            inputs.lambda_salem = Some(lambda);
            inputs.dens = Some(dens);
            let rhs = if dens < 1.0 {
                volume * ((1.0 - dens) / lambda).sqrt()
            } else {
                0.0
            };
            (e_size * s_size.powf(0.75), rhs)
        }
        UpKind::Interpolated => {
            let p = options.p.ok_or(Error::MissingParameter("p"))?;
            if !(1.0..=2.0).contains(&p) {
                return Err(Error::InvalidParameter(format!("interpolated audit needs p in [1, 2], got {p}")));
            }
            let lambda = salem_level(&sigma)?;
            let c = salem_restriction_constant(lambda, sigma.len(), grid, p);
            inputs.p = Some(p);
            inputs.q = Some(2.0);
            inputs.p_conjugate_inverse = Some(inverse_conjugate(p));
            inputs.c_pq = c;
            inputs.lambda_salem = Some(lambda);
            inputs.dens = Some(sigma.density());
            (e_size.powf(1.0 / p) * s_size, c.map_or(0.0, |c| volume / c))
        }
    };
    let tight = is_tight(lhs, rhs);
    Ok(UpAudit {
        kind,
        lhs,
        rhs,
        holds: lhs >= rhs || tight,
        tight,
        inputs,
    })
}

/// Identifier of a sufficient recovery condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConditionId {
    /// `t s < n^d / 2`: uniqueness from the classical principle.
    #[serde(rename = "DS-2.1")]
    DonohoStark,
    /// `t^(1/p) s < n^d / (2^(1/p) C)`: uniqueness from a restriction estimate.
    #[serde(rename = "COR-4.1")]
    RestrictionUniqueness,
    /// `t s < n^d / 4`: direct rounding of a binary signal.
    #[serde(rename = "DRA-4.3i")]
    RoundingPlain,
    /// `t^(1/p) s < n^d / (2 C)`: direct rounding with a restriction estimate.
    #[serde(rename = "DRA-4.3ii")]
    RoundingRestriction,
    /// `t s^(3/4) < n^d sqrt((1 - dens) / L) / 2`: Salem-level recovery.
    #[serde(rename = "SALEM-4.5")]
    SalemRecovery,
    /// Finite-alphabet rounding: error bound below half the alphabet gap.
    #[serde(rename = "ALPHABET")]
    AlphabetMargin,
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConditionId::DonohoStark => "DS-2.1",
            ConditionId::RestrictionUniqueness => "COR-4.1",
            ConditionId::RoundingPlain => "DRA-4.3i",
            ConditionId::RoundingRestriction => "DRA-4.3ii",
            ConditionId::SalemRecovery => "SALEM-4.5",
            ConditionId::AlphabetMargin => "ALPHABET",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ConditionExtras {
    pub p: Option<f64>,
    pub c_pq: Option<f64>,
    pub lambda_salem: Option<f64>,
    pub dens: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionVerdict {
    pub id: ConditionId,
    pub lhs: f64,
    pub threshold: f64,
    /// `lhs < threshold`.
    pub satisfied: bool,
    /// The sparsity was read off the recovered output rather than known in advance.
    #[serde(default)]
    pub a_posteriori: bool,
}

impl ConditionVerdict {
    pub(crate) fn new(id: ConditionId, lhs: f64, threshold: f64) -> Self {
        ConditionVerdict {
            id,
            lhs,
            threshold,
            satisfied: lhs < threshold,
            a_posteriori: false,
        }
    }
}

/// Evaluates a sufficient condition for signal sparsity `t` and `s` missing
/// frequencies. The inequalities are strict.
pub fn recovery_condition(
    id: ConditionId,
    t: usize,
    s: usize,
    grid: GridParams,
    extras: &ConditionExtras,
) -> Result<ConditionVerdict> {
    let t = t as f64;
    let s = s as f64;
    let volume = grid.volume();
    let p_and_c = || -> Result<(f64, f64)> {
        let p = extras.p.ok_or(Error::MissingParameter("p"))?;
        let c = extras.c_pq.ok_or(Error::MissingParameter("c_pq"))?;
        if !(p >= 1.0) || !(c > 0.0) {
            return Err(Error::InvalidParameter(format!("need p >= 1 and C > 0, got p = {p}, C = {c}")));
        }
        Ok((p, c))
    };
    let verdict = match id {
        ConditionId::DonohoStark => ConditionVerdict::new(id, t * s, volume / 2.0),
        ConditionId::RoundingPlain => ConditionVerdict::new(id, t * s, volume / 4.0),
        ConditionId::RestrictionUniqueness => {
            let (p, c) = p_and_c()?;
            ConditionVerdict::new(id, t.powf(1.0 / p) * s, volume / (2f64.powf(1.0 / p) * c))
        }
        ConditionId::RoundingRestriction => {
            let (p, c) = p_and_c()?;
            ConditionVerdict::new(id, t.powf(1.0 / p) * s, volume / (2.0 * c))
        }
        ConditionId::SalemRecovery => {
            let lambda = extras.lambda_salem.ok_or(Error::MissingParameter("lambda_salem"))?;
            let dens = extras.dens.ok_or(Error::MissingParameter("dens"))?;
            let threshold = if dens < 1.0 && lambda > 0.0 {
                0.5 * volume * ((1.0 - dens) / lambda).sqrt()
            } else {
                0.0
            };
            ConditionVerdict::new(id, t * s.powf(0.75), threshold)
        }
        ConditionId::AlphabetMargin => {
            return Err(Error::InvalidParameter(
                "the alphabet margin is evaluated by alphabet recovery, not from sizes".into(),
            ))
        }
    };
    Ok(verdict)
}
