//! Versioned JSON documents for signals, index sets and masked spectra.
//!
//! ```text
//! signal:   {"version":1,"n":_,"d":_,"domain":"space"|"frequency","re":[..],"im":[..]}
//! set:      {"version":1,"n":_,"d":_,"indices":[..]}        strictly increasing
//! masked:   {"version":1,"n":_,"d":_,"missing":[..],"re":[..],"im":[..]}
//! ```
//!
//! Masked spectra carry `n^d` values with zeros written at missing indices;
//! those entries are ignored on read.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridParams;
use crate::recovery::MaskedSpectrum;
use crate::set::IndexSet;
use crate::signal::{Domain, Signal};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SignalDoc {
    version: u32,
    n: usize,
    d: usize,
    domain: Domain,
    re: Vec<f64>,
    im: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SetDoc {
    version: u32,
    n: usize,
    d: usize,
    indices: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaskedDoc {
    version: u32,
    n: usize,
    d: usize,
    missing: Vec<usize>,
    re: Vec<f64>,
    im: Vec<f64>,
}

fn parse<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}

fn render<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string(doc).expect("documents always serialise");
    s.push('\n');
    s
}

fn check_version(version: u32) -> Result<()> {
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    Ok(())
}

fn split(values: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    values.iter().map(|v| (v.re, v.im)).unzip()
}

fn join(re: Vec<f64>, im: Vec<f64>) -> Result<Vec<Complex64>> {
    if re.len() != im.len() {
        return Err(Error::Format(format!(
            "re has {} entries but im has {}",
            re.len(),
            im.len()
        )));
    }
    Ok(re.into_iter().zip(im).map(|(a, b)| Complex64::new(a, b)).collect())
}

pub fn signal_to_json(f: &Signal) -> String {
    let (re, im) = split(f.values());
    render(&SignalDoc {
        version: FORMAT_VERSION,
        n: f.grid().n(),
        d: f.grid().d(),
        domain: f.domain(),
        re,
        im,
    })
}

/// Parses a signal, refusing grids with more than `cap` points.
pub fn signal_from_json(text: &str, cap: usize) -> Result<Signal> {
    let doc: SignalDoc = parse(text)?;
    check_version(doc.version)?;
    let grid = GridParams::with_cap(doc.n, doc.d, cap)?;
    Signal::new(grid, doc.domain, join(doc.re, doc.im)?)
}

pub fn set_to_json(set: &IndexSet) -> String {
    render(&SetDoc {
        version: FORMAT_VERSION,
        n: set.grid().n(),
        d: set.grid().d(),
        indices: set.indices().to_vec(),
    })
}

pub fn set_from_json(text: &str, cap: usize) -> Result<IndexSet> {
    let doc: SetDoc = parse(text)?;
    check_version(doc.version)?;
    let grid = GridParams::with_cap(doc.n, doc.d, cap)?;
    IndexSet::from_sorted(grid, doc.indices)
}

pub fn masked_to_json(m: &MaskedSpectrum) -> String {
    let (re, im) = split(m.values());
    render(&MaskedDoc {
        version: FORMAT_VERSION,
        n: m.grid().n(),
        d: m.grid().d(),
        missing: m.missing().indices().to_vec(),
        re,
        im,
    })
}

pub fn masked_from_json(text: &str, cap: usize) -> Result<MaskedSpectrum> {
    let doc: MaskedDoc = parse(text)?;
    check_version(doc.version)?;
    let grid = GridParams::with_cap(doc.n, doc.d, cap)?;
    let missing = IndexSet::from_sorted(grid, doc.missing)?;
    let mut values = join(doc.re, doc.im)?;
    // Ignored entries may hold anything, including non-finite values.
    for &m in missing.indices() {
        if let Some(v) = values.get_mut(m) {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    MaskedSpectrum::new(grid, missing, values)
}
