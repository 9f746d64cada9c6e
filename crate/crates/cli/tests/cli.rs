use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use uscpol::classical::SpectralMap;

const TOMO: &str = "Omega_d = 0.7\nomega_e = 0.7\nOmega_e = 0.2\nk_grid = 0.02:3:150\n\
                    omega_grid = 0:3.2:800\nomega_e_sweep = 0.4:0.9:5, 1.5:2.6:5\n";

fn uscpol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uscpol"))
        .args(args)
        .env_remove("USCPOL_THREADS")
        .output()
        .expect("binary runs")
}

fn config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run_ok(args: &[&str]) {
    let out = uscpol(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn dispersion_brackets_the_bare_modes() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "fig1.cfg", "Omega_d = 0.5\nomega_e = 1.2\nOmega_e = 0.1\nk_grid = 0.1:3:30\n");
    let out = tmp.path().join("out");
    run_ok(&["dispersion", "--config", s(&cfg), "--out", s(&out)]);
    let (header, rows) = csv(&out.join("dispersion.csv"));
    assert_eq!(&header[..4], ["k", "omega_k", "omega_lp", "omega_up"]);
    assert_eq!(rows.len(), 30);
    for r in &rows {
        let (wk, lp, up) = (r[1], r[2], r[3]);
        assert!(lp < wk.min(1.0) && up > wk.max(1.0), "{r:?}");
        // three-mode weights sum to one
        for m in 0..3 {
            let w: f64 = r[8 + 4 * m..11 + 4 * m].iter().sum();
            assert!((w - 1.0).abs() < 1e-9);
        }
    }
    let m = manifest(&out);
    assert_eq!(m["task"]["command"], "dispersion");
    assert_eq!(m["outputs"][0]["file"], "dispersion.csv");
}

#[test]
fn uncoupled_dresser_gives_bare_lines() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "bare.cfg", "Omega_d = 0\nomega_e = 1.2\nOmega_e = 0.1\nk_grid = 0.1:3:20\n");
    let out = tmp.path().join("out");
    run_ok(&["dispersion", "--config", s(&cfg), "--out", s(&out)]);
    let (_, rows) = csv(&out.join("dispersion.csv"));
    for r in rows {
        let (lo, hi) = (r[1].min(1.0), r[1].max(1.0));
        assert!((r[2] - lo).abs() < 1e-12 && (r[3] - hi).abs() < 1e-12, "{r:?}");
    }
}

#[test]
fn malformed_config_exits_2_with_position() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "bad.cfg", "Omega_d = 1\nomega_e = abc\n");
    let out = uscpol(&["dispersion", "--config", s(&cfg), "--out", s(&tmp.path().join("o"))]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2") && err.contains("column"), "{err}");
}

#[test]
fn binary_format_is_only_for_transmission() {
    let tmp = TempDir::new().unwrap();
    let out = uscpol(&["vacuum", "--format", "bin", "--out", s(tmp.path())]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn vacuum_at_zero_wavevector_exits_3() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "v.cfg", "Omega_d = 0.2\nomega_e = 0.7\nOmega_e = 0.1\nk_grid = 0:1:5\n");
    let out = uscpol(&["vacuum", "--config", s(&cfg), "--out", s(&tmp.path().join("o"))]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unresolvable_tomography_exits_4() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(
        tmp.path(),
        "t.cfg",
        "Omega_d = 0\nomega_e = 2.5\nOmega_e = 0.05\nk_grid = 0.02:1:100\nomega_grid = 0:3:500\nomega_e_sweep = 2.4:2.6:2\n",
    );
    let out = uscpol(&["tomography", "--config", s(&cfg), "--out", s(&tmp.path().join("o"))]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn transmission_binary_reads_back() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "tr.cfg", "Omega_d = 0.5\nomega_e = 0.8\nOmega_e = 0.1\nk_grid = 0.1:2:12\nomega_grid = 0.1:2:40\n");
    let (a, b) = (tmp.path().join("bin"), tmp.path().join("csv"));
    run_ok(&["transmission", "--config", s(&cfg), "--format", "bin", "--out", s(&a)]);
    run_ok(&["transmission", "--config", s(&cfg), "--out", s(&b)]);
    let bin = SpectralMap::read_binary(std::fs::File::open(a.join("transmission.bin")).unwrap()).unwrap();
    let text = std::fs::File::open(b.join("transmission.csv")).unwrap();
    let from_csv = SpectralMap::read_csv(std::io::BufReader::new(text)).unwrap();
    assert_eq!((bin.k.len(), bin.omega.len()), (12, 40));
    for (x, y) in bin.values.iter().zip(&from_csv.values) {
        assert!((x - y).norm() <= 1e-8 * x.norm().max(1e-300));
    }
    assert_eq!(manifest(&a)["format"], "bin");
}

#[test]
fn reruns_are_byte_identical_and_replay_checks_hashes() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "t.cfg", TOMO);
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    run_ok(&["tomography", "--config", s(&cfg), "--out", s(&a), "--threads", "1"]);
    run_ok(&["tomography", "--config", s(&cfg), "--out", s(&b), "--threads", "4"]);
    for f in ["tomography.csv", "records.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    assert_eq!(manifest(&a)["outputs"], manifest(&b)["outputs"]);

    let out = uscpol(&["replay", s(&a.join("manifest.json")), "--out", s(&c)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("all hashes match"));

    // a tampered hash must be reported
    let mut m = manifest(&a);
    m["outputs"][0]["sha256"] = Value::String("0".repeat(64));
    let bad = config(tmp.path(), "bad.json", &m.to_string());
    let out = uscpol(&["replay", s(&bad), "--out", s(&c)]);
    assert!(!out.status.success());
}

#[test]
fn tomography_from_saved_maps_matches_simulation() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "t.cfg", TOMO);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_ok(&["tomography", "--config", s(&cfg), "--out", s(&a), "--save-maps"]);
    assert!(a.join("maps/map_009.bin").exists());
    run_ok(&["tomography", "--config", s(&cfg), "--out", s(&b), "--maps", s(&a.join("maps"))]);
    assert_eq!(
        std::fs::read(a.join("tomography.csv")).unwrap(),
        std::fs::read(b.join("tomography.csv")).unwrap()
    );
    let (_, rows) = csv(&a.join("tomography.csv"));
    assert_eq!(rows.len(), 30);
    assert!(rows.iter().all(|r| r[1] > 0.0 && r[3] < 0.5));
}

#[test]
fn potential_oracle_agrees() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "p.cfg", "Omega_d = 1\nomega_e = 1.2071067811865475\nOmega_e = 0.1\nr_grid = 0.1:5:20:log\n");
    let out = tmp.path().join("o");
    run_ok(&["potential", "--oracle", "--config", s(&cfg), "--out", s(&out)]);
    let m = manifest(&out);
    assert!(m["diagnostics"]["max_rel_diff_vs_hankel"].as_f64().unwrap() < 1e-2);
    let (header, rows) = csv(&out.join("potential.csv"));
    assert_eq!(header, ["r", "U", "U_normalized", "U_hankel", "rel_diff"]);
    assert!(rows.iter().all(|r| r[2].abs() <= 1.0 + 1e-12));
}

#[test]
fn remaining_commands_write_their_tables() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "e.cfg", "Omega_d = 0.5\nomega_e = 0.8\nOmega_e = 0.05\nk_grid = 0.1:2:10\nomega_grid = 0.1:2:10\n");
    for (cmd, files) in [
        ("emission", &["emission.csv"][..]),
        ("permittivity", &["permittivity.csv", "roots.csv"][..]),
        ("vacuum", &["vacuum.csv"][..]),
    ] {
        let out = tmp.path().join(cmd);
        run_ok(&[cmd, "--config", s(&cfg), "--out", s(&out)]);
        for f in files {
            assert!(out.join(f).exists(), "{cmd}: {f}");
        }
    }
    let m = manifest(&tmp.path().join("permittivity"));
    assert!(m["diagnostics"]["max_abs_form_discrepancy"].as_f64().unwrap() < 1e-10);
}
