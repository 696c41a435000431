use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_duffjoint");

const CONFIG_WITH_WAKE: &str = "\
r_mm = 20.24
d_mm = 27.68
K_N_per_m = 81.0
I_kg_m2 = 3.1e-5
zetaI_N_m_s = 2.2e-4
Q0I_N_m = 1e-4

[wake]
flow_speed_m_s = 0.3
vorticity_1_s = 1.5
vortex_spacing_m = 0.12
fluid_density_kg_m3 = 1000.0
c_omega = 1.0
c_amp = 1e-3
";

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .output()
        .expect("binary runs")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

fn num(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("not a number: {s}"))
}

fn assert_manifests(dir: &Path) {
    for entry in fs::read_dir(dir).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        if name.ends_with(".manifest.json") {
            continue;
        }
        let sidecar = dir.join(format!("{name}.manifest.json"));
        let text = fs::read_to_string(&sidecar).unwrap_or_else(|_| panic!("{name} has no manifest"));
        let m: serde_json::Value = serde_json::from_str(&text).unwrap();
        for key in ["command", "config", "parameters", "outputs", "code_version", "timestamp"] {
            assert!(m.get(key).is_some(), "{name} manifest lacks {key}");
        }
        assert_eq!(m["timestamp"], "2023-11-14T22:13:20Z");
    }
}

#[test]
fn torque_curve_shows_hardening_and_softening() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["torque-curve", "--tensions", "0.5,1.5", "--relative-to", "fstar", "--points", "101"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (h, rows) = read_csv(&dir.path().join("torque_curve.csv"));
    let (fcol, tcol, qcol) = (column(&h, "F_N"), column(&h, "theta_rad"), column(&h, "torque_N_m"));
    let tensions: Vec<f64> = {
        let mut v: Vec<f64> = rows.iter().map(|r| num(&r[fcol])).collect();
        v.dedup();
        v
    };
    assert_eq!(tensions.len(), 2);
    for (i, &f) in tensions.iter().enumerate() {
        let curve: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| num(&r[fcol]) == f)
            .map(|r| (num(&r[tcol]), num(&r[qcol])))
            .collect();
        // Secant stiffness at a large angle relative to the slope at the origin.
        let near = curve.iter().find(|(t, _)| *t > 0.0).unwrap();
        let far = curve.iter().find(|(t, _)| *t >= 0.5).unwrap();
        let ratio = (far.1 / far.0) / (near.1 / near.0);
        if i == 0 {
            assert!(ratio > 1.0, "below F* the joint should harden, ratio {ratio}");
        } else {
            assert!(ratio < 1.0, "above F* the joint should soften, ratio {ratio}");
        }
    }
    assert_manifests(dir.path());
}

#[test]
fn compare_cut_agrees_within_five_percent() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["compare", "--freq-hz", "1.5", "--tensions", "0.5,0.8,1.1,1.4", "--relative-to", "fstar"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (h, rows) = read_csv(&dir.path().join("compare.csv"));
    assert_eq!(rows.len(), 4);
    let cols = ["hb_amplitude_rad", "volterra_amplitude_rad", "sim_amplitude_rad"].map(|c| column(&h, c));
    for r in &rows {
        let v = cols.map(|c| num(&r[c]));
        let hi = v.iter().cloned().fold(f64::MIN, f64::max);
        let lo = v.iter().cloned().fold(f64::MAX, f64::min);
        assert!(hi - lo <= 0.05 * hi, "row {r:?}");
    }
    assert_manifests(dir.path());
}

#[test]
fn unknown_subcommand_fails_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out");
    let out = run(&target, &["resonate"]);
    assert!(!out.status.success());
    assert!(!target.exists());
}

#[test]
fn bad_config_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("joint.toml");
    fs::write(&cfg, CONFIG_WITH_WAKE.replace("K_N_per_m", "K_N_m")).unwrap();
    let target = dir.path().join("out");
    let out = run(&target, &["--config", cfg.to_str().unwrap(), "taylor"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("K_N_m"), "{err}");
    assert!(!target.exists());
}

#[test]
fn runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["hb-surface", "--grid", "20x15"];
    assert!(run(a.path(), &args).status.success());
    assert!(run(b.path(), &args).status.success());
    for name in ["hb_surface.csv", "hb_surface.json", "hb_surface.csv.manifest.json"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
}

#[test]
fn every_subcommand_writes_manifests() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("joint.toml");
    fs::write(&cfg, CONFIG_WITH_WAKE).unwrap();
    let out_dir = dir.path().join("out");
    let cfg = cfg.to_str().unwrap();
    let cases: &[&[&str]] = &[
        &["taylor"],
        &["error-map", "--grid", "10x10"],
        &["maxima-line", "--grid", "30x20"],
        &["maxima-line", "--grid", "30x20", "--linear-surrogate"],
        &["volterra-response", "--tension-n", "0.3", "--freq-hz", "1.5", "--max-order", "5"],
        &["simulate", "--tension-n", "0.4", "--freq-hz", "2.0", "--model", "cubic"],
        &["wake-forcing", "--tension-n", "0.4"],
    ];
    for args in cases {
        let mut full = vec!["--config", cfg];
        full.extend_from_slice(args);
        let out = run(&out_dir, &full);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    for name in [
        "taylor.csv",
        "error_map.csv",
        "validity_angle.csv",
        "maxima_line.csv",
        "volterra_spectrum.csv",
        "volterra_response.json",
        "trajectory.csv",
        "wake_forcing.csv",
    ] {
        assert!(out_dir.join(name).exists(), "{name}");
    }
    assert_manifests(&out_dir);
}

#[test]
fn volterra_order_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["volterra-response", "--tension-n", "0.3", "--freq-hz", "1.5", "--max-order", "4"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("max order"));
}
