mod common;

use common::{upslab, write};
use upslab_core::analytics::{annihilator, subgroup_span};
use upslab_core::io::{set_to_json, signal_from_json, signal_to_json};
use upslab_core::{GridParams, IndexSet, Point, Signal, DEFAULT_GRID_CAP};

fn read(dir: &std::path::Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap()
}

/// Pixels of a P2 image.
fn pgm_pixels(text: &str) -> (usize, usize, Vec<u8>) {
    let mut it = text.split_whitespace();
    assert_eq!(it.next(), Some("P2"));
    let w: usize = it.next().unwrap().parse().unwrap();
    let h: usize = it.next().unwrap().parse().unwrap();
    assert_eq!(it.next(), Some("255"));
    let px: Vec<u8> = it.map(|t| t.parse().unwrap()).collect();
    assert_eq!(px.len(), w * h);
    (w, h, px)
}

#[test]
fn dft_examples() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    write(p, "delta.json", &common::delta_z4());
    let run = upslab(p, &["dft", "delta.json", "--out", "spec.json"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let spec = signal_from_json(&read(p, "spec.json"), DEFAULT_GRID_CAP).unwrap();
    assert!(spec.values().iter().all(|v| (v.re - 0.25).abs() < 1e-15 && v.im == 0.0));

    assert_eq!(upslab(p, &["dft", "spec.json", "--direction", "inverse", "--out", "back.json"]).code, 0);
    let back = signal_from_json(&read(p, "back.json"), DEFAULT_GRID_CAP).unwrap();
    assert!(back.max_abs_diff(&Signal::delta(back.grid(), 0)) <= 1e-10);

    let run = upslab(p, &["dft", "spec.json", "--direction", "forward", "--out", "bad.json"]);
    assert_eq!(run.code, 2);
    assert!(!p.join("bad.json").exists());

    write(p, "junk.json", "{\"version\":1,\"n\":4}");
    assert_eq!(upslab(p, &["dft", "junk.json"]).code, 2);
    assert_eq!(upslab(p, &["dft", "missing.json"]).code, 2);

    write(p, "big.json", &signal_to_json(&Signal::delta(GridParams::new(4, 2).unwrap(), 0)));
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_upslab"))
        .args(["dft", "big.json"])
        .current_dir(p)
        .env("UPSLAB_GRID_CAP", "8")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn profile_examples() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    write(p, "a.json", "{\"version\":1,\"n\":4,\"d\":1,\"indices\":[0,2]}");
    let run = upslab(p, &["profile-set", "a.json"]);
    assert_eq!(run.code, 0);
    let v = json(&run.stdout);
    assert_eq!(v["energy_brute_force"], 8);
    assert_eq!(v["energy_fourier"], 8);
    assert_eq!(v["energies_agree"], true);
    assert!((v["lambda_salem"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-12);

    write(p, "b.json", "{\"version\":1,\"n\":8,\"d\":1,\"indices\":[0]}");
    let v = json(&upslab(p, &["profile-set", "b.json"]).stdout);
    assert!((v["lambda_salem"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    write(p, "c.json", "{\"version\":1,\"n\":7,\"d\":1,\"indices\":[0,1,3]}");
    let v = json(&upslab(p, &["profile-set", "c.json"]).stdout);
    assert_eq!(v["energy"], 15);
    assert!((v["lambda_energy"].as_f64().unwrap() - 5.0 / 3.0).abs() < 1e-12);
    assert_eq!(v["lambda_energy_exact"], true);

    write(p, "d.json", "{\"version\":1,\"n\":7,\"d\":1,\"indices\":[3,1]}");
    assert_eq!(upslab(p, &["profile-set", "d.json"]).code, 2);
}

#[test]
fn recover_examples() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    write(p, "m8.json", &common::masked_z8());
    let run = upslab(p, &["recover", "m8.json", "--out", "rec.json"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let rec = signal_from_json(&read(p, "rec.json"), DEFAULT_GRID_CAP).unwrap();
    assert_eq!(rec, Signal::delta(rec.grid(), 0));
    let report = json(&run.stdout);
    assert_eq!(report["guaranteed"], true);
    assert_eq!(report["conditions"][0]["id"], "DRA-4.3i");
    assert!((report["error_bound"].as_f64().unwrap() - 0.125f64.sqrt()).abs() < 1e-12);

    // Full spectrum, enumeration up to the whole grid.
    let g = GridParams::new(8, 1).unwrap();
    let f = Signal::from_real(g, upslab_core::Domain::Space, &[0.0, 1.5, 0.0, -2.0, 0.0, 0.0, 0.25, 0.0]).unwrap();
    let m = upslab_core::recovery::MaskedSpectrum::observe(&f, IndexSet::empty(g)).unwrap();
    write(p, "full.json", &upslab_core::io::masked_to_json(&m));
    let run = upslab(p, &["recover", "full.json", "--method", "enum", "--sparsity", "8", "--out", "f.json"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let rec = signal_from_json(&read(p, "f.json"), DEFAULT_GRID_CAP).unwrap();
    assert!(rec.max_abs_diff(&f) <= 1e-10);

    write(p, "m4.json", &common::masked_subgroup_z4());
    let run = upslab(p, &["recover", "m4.json", "--out", "r4.json", "--report", "r4report.json"]);
    assert_eq!(run.code, 1);
    assert!(p.join("r4.json").exists());
    assert_eq!(json(&read(p, "r4report.json"))["guaranteed"], false);
    let run = upslab(p, &["recover", "m4.json", "--sparsity", "2"]);
    assert_eq!(run.code, 1);
    let report = json(&run.stdout);
    assert!(report["conditions"].as_array().unwrap().iter().all(|c| c["satisfied"] == false));

    let big = GridParams::new(64, 1).unwrap();
    let m = upslab_core::recovery::MaskedSpectrum::observe(&Signal::delta(big, 3), IndexSet::new(big, vec![1]).unwrap()).unwrap();
    write(p, "big.json", &upslab_core::io::masked_to_json(&m));
    assert_eq!(upslab(p, &["recover", "big.json", "--method", "enum", "--sparsity", "5"]).code, 5);
    assert_eq!(upslab(p, &["recover", "big.json", "--method", "enum"]).code, 2);

    let run = upslab(p, &["recover", "m8.json", "--method", "alphabet", "--alphabet", "0,1"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert_eq!(json(&run.stdout)["conditions"][0]["id"], "ALPHABET");
}

#[test]
fn sample_salem_examples() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let run = upslab(p, &["sample-salem", "--n", "16", "--size", "9", "--trials", "3", "--seed", "1"]);
    assert_eq!(run.code, 2);
    assert_eq!(upslab(p, &["sample-salem", "--n", "16", "--size", "8", "--trials", "3", "--seed", "1"]).code, 0);
    let unseeded = upslab(p, &["sample-salem", "--n", "16", "--size", "8", "--trials", "3"]);
    assert_eq!(unseeded.code, 2);
    assert!(unseeded.stderr.contains("seed"), "{}", unseeded.stderr);
    for out in ["a.csv", "b.csv"] {
        assert_eq!(upslab(p, &["sample-salem", "--n", "32", "--size", "7", "--trials", "1", "--seed", "9", "--out", out]).code, 0);
    }
    assert_eq!(read(p, "a.csv"), read(p, "b.csv"));
    assert!(read(p, "a.csv").starts_with("trial,phi,bound,satisfied\n0,"));
}

#[test]
fn energy_stats_examples() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let run = upslab(p, &["energy-stats", "--n", "7", "--d", "2", "--sigma-size", "10", "--u-size", "1", "--trials", "20", "--seed", "4", "--out", "e.csv"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let csv = read(p, "e.csv");
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if f[1] == "subset" {
            assert_eq!(f[4], "1");
        }
        if f[0] == "control" {
            assert_eq!((f[2], f[4]), ("7", "7"));
        }
    }
    let run = upslab(p, &["energy-stats", "--n", "7", "--d", "2", "--sigma-size", "10", "--u-size", "5", "--trials", "200", "--seed", "4", "--out", "e2.csv"]);
    assert_eq!(run.code, 0);
    let mean: f64 = read(p, "e2.csv")
        .lines()
        .find(|l| l.starts_with("mean,sigma,"))
        .unwrap()
        .split(',')
        .nth(4)
        .unwrap()
        .parse()
        .unwrap();
    assert!((1.0..=10.0).contains(&mean));
    assert_eq!(upslab(p, &["energy-stats", "--n", "7", "--d", "2", "--sigma-size", "7", "--u-size", "2", "--trials", "2", "--seed", "1"]).code, 2);
    assert_eq!(upslab(p, &["energy-stats", "--n", "7", "--d", "2", "--sigma-size", "9", "--u-size", "10", "--trials", "2", "--seed", "1"]).code, 2);
}

#[test]
fn sweep_dra_examples() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let run = upslab(p, &["sweep-dra", "--n", "16", "--e-sizes", "1:8", "--s-sizes", "0:8", "--trials", "10", "--seed", "2", "--out", "s.csv"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let csv = read(p, "s.csv");
    let (w, h, px) = pgm_pixels(&read(p, "s.pgm"));
    assert_eq!((w, h), (9, 8));
    for (k, line) in csv.lines().skip(1).enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        let (e, s): (usize, usize) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        assert_eq!(f[4] == "true", 4 * e * s < 16);
        if e == 1 && s == 1 {
            assert_eq!(f[2], "10");
        }
        if 4 * e * s < 16 {
            assert_eq!(px[k], 255);
        }
    }
    assert_eq!(upslab(p, &["sweep-dra", "--n", "16", "--e-sizes", "0:2", "--s-sizes", "1", "--trials", "2", "--seed", "2"]).code, 2);
    let capped = std::process::Command::new(env!("CARGO_BIN_EXE_upslab"))
        .args(["sweep-dra", "--n", "64", "--d", "2", "--e-sizes", "1", "--s-sizes", "1", "--trials", "1", "--seed", "1"])
        .current_dir(p)
        .env("UPSLAB_GRID_CAP", "1000")
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(3));
}

#[test]
fn demo_figure_examples() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let g = GridParams::new(7, 2).unwrap();
    write(p, "full.json", &set_to_json(&IndexSet::full(g)));
    assert_eq!(upslab(p, &["demo-figure", "full.json", "--prefix", "full"]).code, 0);
    let (_, _, px) = pgm_pixels(&read(p, "full_spectrum.pgm"));
    assert_eq!(px[0], 255);
    assert!(px[1..].iter().all(|&v| v == 0));

    let line = subgroup_span(g, &[Point::new(vec![1, 3])]).unwrap();
    let perp = annihilator(&line).unwrap();
    write(p, "line.json", &set_to_json(&line));
    assert_eq!(upslab(p, &["demo-figure", "line.json", "--prefix", "line"]).code, 0);
    let (w, h, px) = pgm_pixels(&read(p, "line_spectrum.pgm"));
    assert_eq!((w, h), (7, 7));
    for (m, &v) in px.iter().enumerate() {
        assert_eq!(v, if perp.contains(m) { 255 } else { 0 });
    }
    let (_, _, set_px) = pgm_pixels(&read(p, "line_set.pgm"));
    assert_eq!(set_px.iter().filter(|&&v| v == 255).count(), 7);

    write(p, "flat.json", "{\"version\":1,\"n\":7,\"d\":1,\"indices\":[1]}");
    assert_eq!(upslab(p, &["demo-figure", "flat.json", "--prefix", "x"]).code, 2);
    assert!(!p.join("x_set.pgm").exists());
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    write(p, "cfg.json", "{\"n\":16,\"size\":9,\"trials\":2,\"seed\":1}");
    assert_eq!(upslab(p, &["sample-salem", "--config", "cfg.json"]).code, 2);
    let run = upslab(p, &["sample-salem", "--config", "cfg.json", "--size", "4"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(run.stdout.starts_with("trial,phi,bound,satisfied\n"));
    assert!(run.stderr.starts_with("satisfied ") && run.stderr.contains("/2 fraction "));
    write(p, "nested.json", "{\"grid\":{\"n\":4}}");
    assert_eq!(upslab(p, &["sample-salem", "--config", "nested.json"]).code, 2);
}

#[test]
fn golden_files() {
    for case in common::golden_cases() {
        common::check_golden(&case).unwrap();
    }
}
