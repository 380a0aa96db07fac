use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use upslab_core::analytics::{additive_energy, phi, profile, random_set, random_set_peak_bound, SetProfile};
use upslab_core::io::{masked_from_json, set_from_json, signal_from_json, signal_to_json};
use upslab_core::recovery::{
    alphabet_recover, dra_recover, enumeration_recover, DraOptions, MaskedSpectrum, RecoveryReport,
    DEFAULT_RESIDUAL_TOL,
};
use upslab_core::rng::{derive_seed, seeded};
use upslab_core::spectral::{dft_forward, dft_inverse};
use upslab_core::{Domain, Error, GridParams, IndexSet, Signal};

use crate::config::{parse_reals, Config};
use crate::error::{CliError, CliResult, EXIT_UNGUARANTEED};
use crate::output::{pgm, scale_to_byte, Csv, Outputs};
use crate::{Direction, MethodArg};

pub struct Context {
    pub cfg: Config,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub cap: usize,
}

impl Context {
    fn seed(&self) -> CliResult<u64> {
        self.seed.ok_or_else(|| CliError::bad_input("missing --seed"))
    }

    fn read_input(&self, flag: Option<PathBuf>) -> CliResult<String> {
        let path: PathBuf = self.cfg.require(flag, "input")?;
        std::fs::read_to_string(&path).map_err(|e| CliError::bad_input(format!("{}: {e}", path.display())))
    }

    fn grid(&self, n: Option<usize>, d: Option<usize>) -> CliResult<GridParams> {
        let n = self.cfg.require(n, "n")?;
        let d = self.cfg.pick(d, "d")?.unwrap_or(1);
        Ok(GridParams::with_cap(n, d, self.cap)?)
    }

    fn trials(&self, flag: Option<usize>) -> CliResult<usize> {
        let trials = self.cfg.require(flag, "trials")?;
        if trials == 0 {
            return Err(CliError::bad_input("--trials must be at least 1"));
        }
        Ok(trials)
    }
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("reports always serialise");
    s.push('\n');
    s
}

pub fn dft(ctx: &Context, input: Option<PathBuf>, direction: Option<Direction>) -> CliResult<u8> {
    let direction = ctx.cfg.pick(direction, "direction")?.unwrap_or(Direction::Forward);
    let f = signal_from_json(&ctx.read_input(input)?, ctx.cap)?;
    let g = match direction {
        Direction::Forward => dft_forward(&f)?,
        Direction::Inverse => dft_inverse(&f)?,
    };
    let mut out = Outputs::default();
    out.emit(ctx.out.as_deref(), signal_to_json(&g));
    out.flush()?;
    Ok(0)
}

#[derive(Serialize)]
struct ProfileDoc<'a> {
    n: usize,
    d: usize,
    #[serde(flatten)]
    profile: &'a SetProfile,
    energies_agree: Option<bool>,
}

pub fn profile_set(ctx: &Context, input: Option<PathBuf>) -> CliResult<u8> {
    let set = set_from_json(&ctx.read_input(input)?, ctx.cap)?;
    let prof = profile(&set)?;
    if prof.energies_agree() == Some(false) {
        return Err(CliError::inconsistent(format!(
            "brute-force energy {:?} disagrees with the Fourier count {}",
            prof.energy_brute_force, prof.energy_fourier
        )));
    }
    let doc = ProfileDoc {
        n: set.grid().n(),
        d: set.grid().d(),
        profile: &prof,
        energies_agree: prof.energies_agree(),
    };
    let mut out = Outputs::default();
    out.emit(ctx.out.as_deref(), json_line(&doc));
    out.flush()?;
    Ok(0)
}

pub struct RecoverArgs {
    pub input: Option<PathBuf>,
    pub method: Option<MethodArg>,
    pub sparsity: Option<usize>,
    pub alphabet: Option<String>,
    pub p: Option<f64>,
    pub c_pq: Option<f64>,
    pub residual_tol: Option<f64>,
    pub report: Option<PathBuf>,
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    version: u32,
    n: usize,
    d: usize,
    #[serde(flatten)]
    report: &'a RecoveryReport,
}

pub fn recover(ctx: &Context, args: RecoverArgs) -> CliResult<u8> {
    let cfg = &ctx.cfg;
    let method = cfg.pick(args.method, "method")?.unwrap_or(MethodArg::Dra);
    let m: MaskedSpectrum = masked_from_json(&ctx.read_input(args.input)?, ctx.cap)?;
    let options = DraOptions {
        sparsity: cfg.pick(args.sparsity, "sparsity")?,
        p: cfg.pick(args.p, "p")?,
        c_pq: cfg.pick(args.c_pq, "c_pq")?,
    };
    let report = match method {
        MethodArg::Dra => dra_recover(&m, &options)?,
        MethodArg::Alphabet => {
            let alphabet = match args.alphabet {
                Some(s) => parse_reals(&s)?,
                None => cfg.pick::<Vec<f64>>(None, "alphabet")?.unwrap_or_else(|| vec![0.0, 1.0]),
            };
            alphabet_recover(&m, &alphabet, &options)?
        }
        MethodArg::Enum => {
            let t = options
                .sparsity
                .ok_or_else(|| CliError::bad_input("enumeration needs --sparsity"))?;
            let tol = cfg.pick(args.residual_tol, "residual_tol")?.unwrap_or(DEFAULT_RESIDUAL_TOL);
            enumeration_recover(&m, t, tol)?
        }
    };
    let doc = ReportDoc {
        version: upslab_core::io::FORMAT_VERSION,
        n: m.grid().n(),
        d: m.grid().d(),
        report: &report,
    };
    let report_path = cfg.pick(args.report, "report")?;
    let mut out = Outputs::default();
    if let Some(path) = ctx.out.as_deref() {
        out.emit(Some(path), signal_to_json(&report.recovered));
    }
    out.emit(report_path.as_deref(), json_line(&doc));
    out.flush()?;
    Ok(if report.guaranteed { 0 } else { EXIT_UNGUARANTEED })
}

pub fn sample_salem(
    ctx: &Context,
    n: Option<usize>,
    d: Option<usize>,
    size: Option<usize>,
    eps: Option<f64>,
    trials: Option<usize>,
) -> CliResult<u8> {
    let grid = ctx.grid(n, d)?;
    let size: usize = ctx.cfg.require(size, "size")?;
    let eps = ctx.cfg.pick(eps, "eps")?.unwrap_or(1.0);
    let trials = ctx.trials(trials)?;
    let seed = ctx.seed()?;
    if size == 0 || 2 * size > grid.total() {
        return Err(CliError::bad_input(format!(
            "set size {size} must lie in 1..={} (at most half of {grid})",
            grid.total() / 2
        )));
    }
    if !(eps > 0.0) {
        return Err(CliError::bad_input("--eps must be positive"));
    }
    let bound = random_set_peak_bound(grid, size, eps);
    let peaks = (0..trials)
        .into_par_iter()
        .map(|trial| phi(&random_set(grid, size, derive_seed(seed, &[trial as u64]))?))
        .collect::<Result<Vec<f64>, Error>>()?;
    let mut csv = Csv::new(&["trial", "phi", "bound", "satisfied"]);
    let mut satisfied = 0;
    for (trial, p) in peaks.iter().enumerate() {
        let ok = *p < bound;
        satisfied += ok as usize;
        csv.row(&[trial.to_string(), p.to_string(), bound.to_string(), ok.to_string()]);
    }
    let mut out = Outputs::default();
    out.emit(ctx.out.as_deref(), csv.into_string());
    out.say(format!(
        "satisfied {satisfied}/{trials} fraction {}",
        satisfied as f64 / trials as f64
    ));
    out.flush()?;
    Ok(0)
}

/// `({t e_0 : t in Z_n})`, a subgroup of order `n`.
fn axis_line(grid: GridParams) -> CliResult<IndexSet> {
    let step = grid.total() / grid.n();
    Ok(IndexSet::new(grid, (0..grid.n()).map(|t| t * step).collect())?)
}

struct EnergyRow {
    energy: u64,
    size: usize,
}

impl EnergyRow {
    fn of(set: &IndexSet) -> Result<Self, Error> {
        Ok(EnergyRow {
            energy: additive_energy(set)?,
            size: set.len(),
        })
    }

    fn ratio(&self) -> f64 {
        self.energy as f64 / (self.size * self.size) as f64
    }
}

pub fn energy_stats(
    ctx: &Context,
    n: Option<usize>,
    d: Option<usize>,
    sigma_size: Option<usize>,
    u_size: Option<usize>,
    trials: Option<usize>,
) -> CliResult<u8> {
    let grid = ctx.grid(n, d)?;
    let sigma_size: usize = ctx.cfg.require(sigma_size, "sigma_size")?;
    let u_size: usize = ctx.cfg.require(u_size, "u_size")?;
    let trials = ctx.trials(trials)?;
    let seed = ctx.seed()?;
    if sigma_size > grid.total() || sigma_size * sigma_size <= grid.total() {
        return Err(CliError::bad_input(format!(
            "--sigma-size {sigma_size} must exceed n^(d/2) = {} and fit in {grid}",
            grid.volume().sqrt()
        )));
    }
    if u_size == 0 || u_size > sigma_size {
        return Err(CliError::bad_input(format!("--u-size must lie in 1..={sigma_size}")));
    }
    let rows = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<(EnergyRow, EnergyRow), Error> {
            let sigma = random_set(grid, sigma_size, derive_seed(seed, &[trial as u64, 0]))?;
            let mut rng = seeded(derive_seed(seed, &[trial as u64, 1]));
            let picks = rand::seq::index::sample(&mut rng, sigma_size, u_size);
            let u = IndexSet::new(grid, picks.iter().map(|i| sigma.indices()[i]).collect())?;
            Ok((EnergyRow::of(&sigma)?, EnergyRow::of(&u)?))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let control = EnergyRow::of(&axis_line(grid)?)?;

    let header = ["trial", "kind", "u_size", "energy", "ratio"];
    let mut csv = Csv::new(&header);
    let row = |csv: &mut Csv, trial: &str, kind: &str, r: &EnergyRow| {
        csv.row(&[
            trial.to_string(),
            kind.to_string(),
            r.size.to_string(),
            r.energy.to_string(),
            r.ratio().to_string(),
        ])
    };
    for (trial, (s, u)) in rows.iter().enumerate() {
        row(&mut csv, &trial.to_string(), "sigma", s);
        row(&mut csv, &trial.to_string(), "subset", u);
    }
    row(&mut csv, "control", "subgroup", &control);
    let count = trials as f64;
    let mut means = Vec::new();
    for (kind, pick) in [("sigma", 0usize), ("subset", 1)] {
        let it = || rows.iter().map(|r| if pick == 0 { &r.0 } else { &r.1 });
        let energy = it().map(|r| r.energy as f64).sum::<f64>() / count;
        let ratio = it().map(EnergyRow::ratio).sum::<f64>() / count;
        let size = if pick == 0 { sigma_size } else { u_size };
        csv.row(&["mean".into(), kind.into(), size.to_string(), energy.to_string(), ratio.to_string()]);
        means.push((kind, ratio));
    }
    let mut out = Outputs::default();
    out.emit(ctx.out.as_deref(), csv.into_string());
    for (kind, ratio) in means {
        out.say(format!("mean {kind} ratio {ratio}"));
    }
    out.flush()?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
pub fn sweep_dra(
    ctx: &Context,
    n: Option<usize>,
    d: Option<usize>,
    e_sizes: Option<String>,
    s_sizes: Option<String>,
    trials: Option<usize>,
    pgm_path: Option<PathBuf>,
) -> CliResult<u8> {
    let grid = ctx.grid(n, d)?;
    let e_sizes = ctx.cfg.sizes(e_sizes, "e_sizes")?;
    let s_sizes = ctx.cfg.sizes(s_sizes, "s_sizes")?;
    let trials = ctx.trials(trials)?;
    let seed = ctx.seed()?;
    let total = grid.total();
    if let Some(e) = e_sizes.iter().find(|&&e| e == 0 || e > total) {
        return Err(CliError::bad_input(format!("support size {e} outside 1..={total}")));
    }
    if let Some(s) = s_sizes.iter().find(|&&s| s > total) {
        return Err(CliError::bad_input(format!("mask size {s} outside 0..={total}")));
    }
    let cells: Vec<(usize, usize)> = e_sizes
        .iter()
        .flat_map(|&e| s_sizes.iter().map(move |&s| (e, s)))
        .collect();
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..trials).map(move |t| (c, t)))
        .collect();
    let outcomes = jobs
        .par_iter()
        .map(|&(c, trial)| -> Result<bool, Error> {
            let (e, s) = cells[c];
            let mut rng = seeded(derive_seed(seed, &[e as u64, s as u64, trial as u64]));
            let truth = Signal::indicator(&random_set(grid, e, rng.random())?);
            let missing = if s == 0 {
                IndexSet::empty(grid)
            } else {
                random_set(grid, s, rng.random())?
            };
            let m = MaskedSpectrum::observe(&truth, missing)?;
            let rep = dra_recover(&m, &DraOptions { sparsity: Some(e), ..Default::default() })?;
            Ok(rep.recovered == truth)
        })
        .collect::<Result<Vec<bool>, Error>>()?;

    let mut csv = Csv::new(&["e_size", "s_size", "successes", "trials", "condition_i_holds"]);
    let mut pixels = Vec::with_capacity(cells.len());
    let mut broken = Vec::new();
    for (c, &(e, s)) in cells.iter().enumerate() {
        let successes = outcomes[c * trials..(c + 1) * trials].iter().filter(|&&ok| ok).count();
        let holds = 4 * e * s < total;
        if holds && successes != trials {
            broken.push(format!("({e},{s}): {successes}/{trials}"));
        }
        csv.row(&[
            e.to_string(),
            s.to_string(),
            successes.to_string(),
            trials.to_string(),
            holds.to_string(),
        ]);
        pixels.push(((255 * successes + trials / 2) / trials) as u8);
    }
    if !broken.is_empty() {
        return Err(CliError::inconsistent(format!(
            "guaranteed cells failed: {}",
            broken.join(", ")
        )));
    }
    let pgm_path = ctx.cfg.pick(pgm_path, "pgm")?.or_else(|| {
        ctx.out.as_ref().map(|p| p.with_extension("pgm"))
    });
    let mut out = Outputs::default();
    out.emit(ctx.out.as_deref(), csv.into_string());
    if let Some(path) = pgm_path.as_deref() {
        out.emit(Some(path), pgm(s_sizes.len(), e_sizes.len(), &pixels));
    }
    out.flush()?;
    Ok(0)
}

pub fn demo_figure(ctx: &Context, input: Option<PathBuf>, prefix: Option<String>) -> CliResult<u8> {
    let set = set_from_json(&ctx.read_input(input)?, ctx.cap)?;
    let grid = set.grid();
    if grid.d() != 2 {
        return Err(CliError::bad_input(format!("demo-figure needs a planar set, got {grid}")));
    }
    let prefix: String = match ctx.cfg.pick(prefix, "prefix")? {
        Some(p) => p,
        None => ctx
            .out
            .as_ref()
            .map(|p| p.to_string_lossy().into_owned())
            .ok_or_else(|| CliError::bad_input("missing --prefix"))?,
    };
    let spectrum = dft_forward(&Signal::indicator(&set))?;
    debug_assert_eq!(spectrum.domain(), Domain::Frequency);
    let peak = spectrum.max_abs();
    let set_pixels: Vec<u8> = set.mask().iter().map(|&b| if b { 255 } else { 0 }).collect();
    let spec_pixels: Vec<u8> = spectrum.values().iter().map(|v| scale_to_byte(v.norm(), peak)).collect();
    let n = grid.n();
    let mut out = Outputs::default();
    out.emit(Some(Path::new(&format!("{prefix}_set.pgm"))), pgm(n, n, &set_pixels));
    out.emit(Some(Path::new(&format!("{prefix}_spectrum.pgm"))), pgm(n, n, &spec_pixels));
    out.flush()?;
    Ok(0)
}
