#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use upslab_core::analytics::random_set;
use upslab_core::io::{masked_to_json, set_to_json, signal_to_json};
use upslab_core::recovery::MaskedSpectrum;
use upslab_core::{GridParams, IndexSet, Signal};

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn upslab(dir: &Path, args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_upslab"))
        .args(args)
        .current_dir(dir)
        .env_remove("UPSLAB_GRID_CAP")
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

pub fn write(dir: &Path, name: &str, contents: &str) {
    std::fs::write(dir.join(name), contents).unwrap();
}

/// One command run against fixed inputs. `"stdout"` in `outputs` stands for
/// the captured standard output.
pub struct GoldenCase {
    pub name: &'static str,
    pub inputs: Vec<(&'static str, String)>,
    pub args: Vec<&'static str>,
    pub outputs: Vec<&'static str>,
    pub code: i32,
}

pub fn delta_z4() -> String {
    signal_to_json(&Signal::delta(GridParams::new(4, 1).unwrap(), 0))
}

pub fn masked_z8() -> String {
    let g = GridParams::new(8, 1).unwrap();
    let m = MaskedSpectrum::observe(&Signal::delta(g, 0), IndexSet::new(g, vec![4]).unwrap()).unwrap();
    masked_to_json(&m)
}

pub fn masked_subgroup_z4() -> String {
    let g = GridParams::new(4, 1).unwrap();
    let f = Signal::indicator(&IndexSet::new(g, vec![0, 2]).unwrap());
    masked_to_json(&MaskedSpectrum::observe(&f, IndexSet::new(g, vec![0, 2]).unwrap()).unwrap())
}

pub fn sparse_array_7x7() -> String {
    set_to_json(&random_set(GridParams::new(7, 2).unwrap(), 9, 1).unwrap())
}

pub fn golden_cases() -> Vec<GoldenCase> {
    vec![
        GoldenCase {
            name: "dft",
            inputs: vec![("delta.json", delta_z4())],
            args: vec!["dft", "delta.json", "--direction", "forward", "--out", "spectrum.json"],
            outputs: vec!["spectrum.json"],
            code: 0,
        },
        GoldenCase {
            name: "profile_set",
            inputs: vec![("set.json", "{\"version\":1,\"n\":7,\"d\":1,\"indices\":[0,1,3]}\n".into())],
            args: vec!["profile-set", "set.json", "--out", "profile.json"],
            outputs: vec!["profile.json"],
            code: 0,
        },
        GoldenCase {
            name: "recover",
            inputs: vec![("masked.json", masked_z8())],
            args: vec!["recover", "masked.json", "--method", "dra", "--out", "recovered.json", "--report", "report.json"],
            outputs: vec!["recovered.json", "report.json"],
            code: 0,
        },
        GoldenCase {
            name: "sample_salem",
            inputs: vec![],
            args: vec![
                "sample-salem", "--n", "16", "--d", "2", "--size", "40", "--eps", "1", "--trials", "8", "--seed", "11",
                "--out", "salem.csv",
            ],
            outputs: vec!["salem.csv", "stdout"],
            code: 0,
        },
        GoldenCase {
            name: "energy_stats",
            inputs: vec![("config.json", "{\"n\":7,\"d\":2,\"sigma_size\":10,\"u_size\":4,\"trials\":6}\n".into())],
            args: vec!["energy-stats", "--config", "config.json", "--seed", "3", "--out", "energy.csv"],
            outputs: vec!["energy.csv", "stdout"],
            code: 0,
        },
        GoldenCase {
            name: "sweep_dra",
            inputs: vec![],
            args: vec![
                "sweep-dra", "--n", "8", "--d", "2", "--e-sizes", "1:6", "--s-sizes", "0:12:2", "--trials", "6", "--seed",
                "5", "--out", "sweep.csv",
            ],
            outputs: vec!["sweep.csv", "sweep.pgm"],
            code: 0,
        },
        GoldenCase {
            name: "demo_figure",
            inputs: vec![("array.json", sparse_array_7x7())],
            args: vec!["demo-figure", "array.json", "--prefix", "fig"],
            outputs: vec!["fig_set.pgm", "fig_spectrum.pgm"],
            code: 0,
        },
    ]
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

/// Runs `case` in a fresh directory and returns its outputs in order.
pub fn run_case(case: &GoldenCase) -> Result<Vec<(&'static str, Vec<u8>)>, String> {
    let dir = tempfile::tempdir().unwrap();
    for (name, contents) in &case.inputs {
        write(dir.path(), name, contents);
    }
    let run = upslab(dir.path(), &case.args);
    if run.code != case.code {
        return Err(format!("{}: exit {} (expected {}): {}", case.name, run.code, case.code, run.stderr));
    }
    case.outputs
        .iter()
        .map(|&name| {
            let bytes = if name == "stdout" {
                run.stdout.clone().into_bytes()
            } else {
                std::fs::read(dir.path().join(name)).map_err(|e| format!("{}: {name}: {e}", case.name))?
            };
            Ok((name, bytes))
        })
        .collect()
}

/// Compares a run of `case` with the checked-in files; `UPSLAB_BLESS=1`
/// rewrites them instead.
pub fn check_golden(case: &GoldenCase) -> Result<(), String> {
    let outputs = run_case(case)?;
    let dir = golden_dir().join(case.name);
    let bless = std::env::var_os("UPSLAB_BLESS").is_some();
    if bless {
        std::fs::create_dir_all(&dir).unwrap();
    }
    for (name, bytes) in outputs {
        let path = dir.join(name);
        if bless {
            std::fs::write(&path, &bytes).unwrap();
            continue;
        }
        let expected = std::fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        if expected != bytes {
            return Err(format!("{} differs from {}", name, path.display()));
        }
    }
    Ok(())
}
