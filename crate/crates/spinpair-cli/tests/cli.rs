//! End to end checks against the compiled binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn spinpair(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_spinpair"));
    cmd.args(args);
    cmd
}

fn run_ok(args: &[&str]) -> String {
    let out = spinpair(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "expected success for {args:?}, got {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 stdout")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn line_value(stdout: &str, key: &str) -> f64 {
    let line = stdout
        .lines()
        .find(|l| l.starts_with(key))
        .unwrap_or_else(|| panic!("no {key} line in {stdout:?}"));
    line[key.len()..].trim().parse().expect("numeric field")
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("spinpair_test_{}_{name}", std::process::id()))
}

fn column(header: &str, sep: char, name: &str) -> usize {
    header
        .split(sep)
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name} in {header}"))
}

#[test]
fn point_matches_axial_fixture() {
    let stdout = run_ok(&["point", "--j", "1", "--t", "1"]);
    let expected = (1f64.sinh() - 1.0) / (1.0 + 1f64.cosh());
    let got = line_value(&stdout, "concurrence");
    assert!(
        (got - expected).abs() < 1e-9,
        "got {got}, expected {expected}"
    );
    assert!(
        stdout.lines().any(|l| l == "path analytic_bz"),
        "missing path line in {stdout:?}"
    );
    let roots = stdout
        .lines()
        .find(|l| l.starts_with("roots"))
        .expect("roots line");
    assert_eq!(roots.split_whitespace().count(), 5);
}

#[test]
fn point_requires_temperature() {
    let out = spinpair(&["point", "--j", "1"]).output().unwrap();
    assert_eq!(exit_code(&out), 2);
    assert!(!out.stderr.is_empty());
}

#[test]
fn negative_temperature_is_usage_error() {
    let out = spinpair(&["point", "--j", "1", "--t", "-1"])
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn conflicting_field_forms_rejected() {
    let out = spinpair(&["point", "--j", "1", "--t", "1", "--bz", "1", "--bmag", "1"])
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = spinpair(&["point", "--frobnicate", "1"]).output().unwrap();
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn threshold_fixture_both_orientations() {
    let expected = 1.0 / 1f64.asinh();
    for args in [
        ["threshold", "--j", "1"],
        ["threshold", "--k", "1"],
    ] {
        let stdout = run_ok(&args);
        let got = line_value(&stdout, "t_star");
        assert!(
            (got - expected).abs() < 1e-6,
            "args {args:?}: got {got}, expected {expected}"
        );
        assert!(stdout.lines().any(|l| l.starts_with("bracket ")));
        assert!(stdout.lines().any(|l| l.starts_with("evaluations ")));
    }
}

#[test]
fn threshold_reports_absence() {
    // matched couplings keep the state separable at every temperature
    let stdout = run_ok(&["threshold", "--j", "1", "--k", "1"]);
    assert!(stdout.lines().any(|l| l == "t_star none"), "{stdout:?}");
}

#[test]
fn sweep_csv_shape() {
    let stdout = run_ok(&[
        "sweep",
        "--j",
        "1",
        "--axis",
        "t=0.1:2.1:5",
        "--quantity",
        "concurrence",
    ]);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(
        lines[0],
        "j,k,gamma,gamma_prime,bx,by,bz,bmag,theta_deg,t,concurrence,path"
    );
    assert_eq!(lines.len(), 6);
    for row in &lines[1..] {
        assert_eq!(row.split(',').count(), 12, "row {row:?}");
    }
    let t_col = column(lines[0], ',', "t");
    let first: f64 = lines[1].split(',').nth(t_col).unwrap().parse().unwrap();
    let last: f64 = lines[5].split(',').nth(t_col).unwrap().parse().unwrap();
    assert_eq!(first, 0.1);
    assert_eq!(last, 2.1);
}

#[test]
fn sweep_is_deterministic_across_worker_counts() {
    let args = [
        "sweep",
        "--j",
        "1",
        "--gamma",
        "0.4",
        "--axis",
        "bz=0:2:7",
        "--axis",
        "t=0.2:1.4:4",
        "--quantity",
        "concurrence",
    ];
    let mut single = spinpair(&args);
    single.env("SPINPAIR_THREADS", "1");
    let mut dual = spinpair(&args);
    dual.env("SPINPAIR_THREADS", "2");
    let a = single.output().unwrap();
    let b = dual.output().unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn bad_worker_count_is_usage_error() {
    let mut cmd = spinpair(&["point", "--j", "1", "--t", "1"]);
    cmd.env("SPINPAIR_THREADS", "zero");
    let out = cmd.output().unwrap();
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn sweep_tsv_format() {
    let stdout = run_ok(&[
        "sweep",
        "--j",
        "1",
        "--axis",
        "t=1,2",
        "--format",
        "tsv",
    ]);
    let header = stdout.lines().next().unwrap();
    assert!(header.contains('\t'));
    assert!(!header.contains(','));
}

#[test]
fn sweep_rejects_malformed_axis() {
    let out = spinpair(&["sweep", "--j", "1", "--axis", "t=1:2"])
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 2);
    let out = spinpair(&["sweep", "--j", "1", "--axis", "volume=1,2"])
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn sweep_output_file_matches_stdout() {
    let path = scratch("sweep_out.csv");
    let args_base = [
        "sweep",
        "--j",
        "1",
        "--axis",
        "t=0.5:1.5:3",
        "--quantity",
        "concurrence",
    ];
    let stdout = run_ok(&args_base);
    let mut with_file: Vec<&str> = args_base.to_vec();
    let path_str = path.to_str().unwrap();
    with_file.extend_from_slice(&["--output", path_str]);
    let silent = run_ok(&with_file);
    assert!(silent.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written, stdout);
    std::fs::remove_file(&path).ok();
}

#[test]
fn csv_cells_reparse_exactly() {
    let stdout = run_ok(&["sweep", "--j", "1", "--axis", "t=0.3:2.7:6"]);
    let mut lines = stdout.lines();
    let header = lines.next().unwrap();
    let cols = header.split(',').count();
    for row in lines {
        for (i, cell) in row.split(',').enumerate() {
            if i == cols - 1 {
                continue;
            }
            let v: f64 = cell.parse().expect("numeric cell");
            assert_eq!(format!("{v:.11e}"), cell, "cell {cell} drifts on reparse");
        }
    }
}

#[test]
fn config_merges_under_flags() {
    let path = scratch("defaults.conf");
    std::fs::write(&path, "# shared defaults\nj = 2\nt = 1\n").unwrap();
    let stdout = run_ok(&["point", "--config", path.to_str().unwrap(), "--j", "1"]);
    let expected = (1f64.sinh() - 1.0) / (1.0 + 1f64.cosh());
    let got = line_value(&stdout, "concurrence");
    assert!(
        (got - expected).abs() < 1e-9,
        "flag --j 1 must override config j=2 while t=1 comes from config; got {got}"
    );
    std::fs::remove_file(&path).ok();
}

#[test]
fn config_rejects_unknown_key() {
    let path = scratch("bad.conf");
    std::fs::write(&path, "jay = 2\n").unwrap();
    let out = spinpair(&["point", "--config", path.to_str().unwrap(), "--t", "1"])
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 2);
    std::fs::remove_file(&path).ok();
}

#[test]
fn figure_fig3b_jumps_near_sqrt2() {
    let stdout = run_ok(&["figure", "--name", "fig3b", "--theta", "90", "--j", "1"]);
    let mut lines = stdout.lines();
    let header = lines.next().unwrap();
    let b_col = column(header, ',', "bmag");
    let c_col = column(header, ',', "concurrence_t0");
    let mut points = Vec::new();
    for row in lines {
        let cells: Vec<&str> = row.split(',').collect();
        let b: f64 = cells[b_col].parse().unwrap();
        let c: f64 = cells[c_col].parse().unwrap();
        points.push((b, c));
    }
    assert!(points.len() > 100);
    let mut jump_at = 0.0;
    let mut jump = 0.0;
    for pair in points.windows(2) {
        let d = (pair[1].1 - pair[0].1).abs();
        if d > jump {
            jump = d;
            jump_at = 0.5 * (pair[0].0 + pair[1].0);
        }
    }
    let locus = 2f64.sqrt();
    assert!(
        (jump_at - locus).abs() < 0.011,
        "largest step at {jump_at}, expected near {locus}"
    );
    assert!(jump > 0.3, "jump size {jump} too small for a discontinuity");
}

#[test]
fn figure_rejects_unknown_preset() {
    let out = spinpair(&["figure", "fig9"]).output().unwrap();
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn closed_stdout_pipe_is_not_an_error() {
    // a consumer that stops reading (head, grep -q) must not produce a
    // panic backtrace or a failure exit
    use std::io::Read;
    let mut child = spinpair(&["sweep", "--j", "1", "--axis", "t=0.001:3:40000"])
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    let mut first = [0u8; 64];
    child.stdout.as_mut().unwrap().read_exact(&mut first).unwrap();
    drop(child.stdout.take());
    let status = child.wait().unwrap();
    let mut stderr = String::new();
    child.stderr.take().unwrap().read_to_string(&mut stderr).unwrap();
    assert!(status.success(), "exit {status:?}, stderr: {stderr}");
    assert!(stderr.is_empty(), "unexpected stderr: {stderr}");
}
