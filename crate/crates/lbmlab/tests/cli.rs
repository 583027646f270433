//! End-to-end checks of the command-line surface: flag/config precedence,
//! exit codes, manifest and CSV outputs, and byte-level determinism across
//! worker counts.

use std::path::Path;
use std::process::Command;

fn lbmlab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lbmlab"))
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn tune_quartic_prints_the_special_sigma() {
    let dir = tempdir("tune-quartic");
    let output = lbmlab()
        .args(["tune", "--model", "D2Q9-NS", "--objective", "quartic"])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("sigma4 = 0.28867513"), "stdout: {stdout}");
    assert!(read(&dir, "tune.csv").contains("sigma4,2.8867513459481287e-1"));
}

#[test]
fn unknown_flag_is_a_config_error() {
    let output = lbmlab()
        .args(["dispersion", "--model", "D2Q13-NS", "--bad-flag"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
}

#[test]
fn unknown_config_key_is_a_config_error() {
    let dir = tempdir("badkey");
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "model = D2Q9-NS\nwibble = 3\n").unwrap();
    let output = lbmlab()
        .args(["stability", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("wibble"), "stderr: {err}");
}

#[test]
fn rate_out_of_range_is_a_domain_error() {
    let output = lbmlab()
        .args(["stability", "--model", "D2Q9-NS", "--s3", "2.5"])
        .arg("--out")
        .arg(tempdir("range"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn flags_override_config_values() {
    let dir = tempdir("precedence");
    let cfg = dir.join("run.cfg");
    // Config asks for an out-of-range rate; the flag overrides it back in.
    std::fs::write(&cfg, "model = D2Q9-NS\ns3 = 2.5 # overridden by the flag\n").unwrap();
    let output = lbmlab()
        .args(["stability", "--s3", "1.0", "--grid", "8", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    // The manifest records the resolved value.
    assert!(read(&dir, "manifest.txt").contains("s3=1"));
}

#[test]
fn dispersion_outputs_and_determinism_across_jobs() {
    let run = |jobs: &str, dir: &Path| {
        let output = lbmlab()
            .args([
                "dispersion",
                "--model",
                "D2Q9-AD",
                "--alpha",
                "-2",
                "--d1",
                "-1",
                "--s1",
                "0.8",
                "--s3",
                "0.9",
                "--s4",
                "1.1",
                "--vx",
                "0.1",
                "--theta",
                "0",
                "--theta",
                "30",
                "--jobs",
                jobs,
            ])
            .arg("--out")
            .arg(dir)
            .output()
            .unwrap();
        assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    };
    let d1 = tempdir("disp-jobs1");
    let d2 = tempdir("disp-jobs4");
    run("1", &d1);
    run("4", &d2);
    for name in ["modes.csv", "coefficients.csv"] {
        assert_eq!(read(&d1, name), read(&d2, name), "{name} differs across worker counts");
    }
    let coeffs = read(&d1, "coefficients.csv");
    assert!(coeffs.starts_with("direction,mode,a1,a2,a3,a4,residual\n"));
    // Density-mode a2 equals kappa = (alpha+4)/6 sigma1 = 0.25 at both angles.
    for line in coeffs.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        let a2: f64 = cells[3].parse().unwrap();
        assert!((a2 - 0.25).abs() < 1e-9, "{line}");
    }
}

#[test]
fn simulate_plane_wave_writes_results() {
    let dir = tempdir("planewave");
    let output = lbmlab()
        .args([
            "simulate",
            "--experiment",
            "plane-wave",
            "--model",
            "D2Q9-NS",
            "--s3",
            "1.1",
            "--s4",
            "0.9",
            "--s6",
            "1.0",
            "--s8",
            "0.9",
            "--vx",
            "0.06",
            "--nk",
            "5,0",
            "--domain",
            "96",
        ])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let csv = read(&dir, "planewave.csv");
    let line = csv.lines().nth(1).unwrap();
    let cells: Vec<&str> = line.split(',').collect();
    let measured: f64 = cells[3].parse().unwrap();
    let theory: f64 = cells[4].parse().unwrap();
    assert!((measured - theory).abs() <= 5e-4 * theory.abs());
    assert!(read(&dir, "manifest.txt").contains("subcommand=simulate/plane-wave"));
}

#[test]
fn verify_emits_transport_rows() {
    let dir = tempdir("verify");
    let output = lbmlab()
        .args([
            "verify", "--model", "D2Q9-AD", "--alpha", "-2", "--d1", "-1", "--s1", "0.8",
            "--s3", "0.9", "--s4", "1.1",
        ])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let csv = read(&dir, "verify.csv");
    assert!(csv.starts_with("model,condition,parameters,predicted,measured,relative_error\n"));
    let kappa_row = csv.lines().find(|l| l.contains("kappa")).expect("kappa row");
    let rel: f64 = kappa_row.split(',').next_back().unwrap().parse().unwrap();
    assert!(rel <= 1e-6, "kappa relative error {rel}");
}

fn tempdir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("lbmlab-cli-test-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
