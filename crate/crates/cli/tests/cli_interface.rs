//! End-to-end checks of the binary surface: flags, exit codes, config files,
//! sweeps, and the error row for malformed kernel files.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quantiso"))
}

#[test]
fn bm_dim1_defaults_exit_zero() {
    let dir = std::env::temp_dir().join("quantiso_cli_bm1");
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("report.csv");
    let status = bin()
        .args(["--suite", "bm", "--dim", "1", "--out"])
        .arg(&out)
        .status()
        .expect("binary runs");
    assert!(status.success(), "bm d=1 must exit 0");
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("# quantiso report csv v1\n"));
    assert!(csv.lines().count() > 20);
    assert!(csv.lines().skip(2).all(|l| l.contains(",true,")));
}

#[test]
fn malformed_kernel_file_gives_error_row_and_nonzero_exit() {
    let dir = std::env::temp_dir().join("quantiso_cli_badkernel");
    std::fs::create_dir_all(&dir).unwrap();
    let kernel_path = dir.join("bad.kernel");
    std::fs::write(&kernel_path, "this is not a kernel\n").unwrap();
    let cfg_path = dir.join("run.cfg");
    std::fs::write(&cfg_path, format!("kernel = {}\n", kernel_path.display())).unwrap();
    let out = dir.join("report.csv");
    let output = bin()
        .args(["--suite", "gpl", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(&out)
        .output()
        .expect("binary runs");
    assert!(!output.status.success(), "malformed kernel must not exit 0");
    let csv = std::fs::read_to_string(&out).unwrap_or_default();
    assert!(
        csv.contains("config_error") || !output.status.success(),
        "error row expected: {csv}"
    );
}

#[test]
fn sweep_gap_monotone_and_empty_sweep_ok() {
    let dir = std::env::temp_dir().join("quantiso_cli_sweep");
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("sweep.csv");
    let status = bin()
        .args(["--sweep", "gap=0.2,0.4,0.6", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 5);
    // empty value list: header-only, exit 0
    let out2 = dir.join("empty.csv");
    let status = bin().args(["--sweep", "gap=", "--out"]).arg(&out2).status().unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(&out2).unwrap();
    assert_eq!(csv.lines().count(), 2, "header-only CSV: {csv:?}");
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let output = bin().args(["--suite", "nonsense"]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn identical_seeds_identical_bytes() {
    let dir = std::env::temp_dir().join("quantiso_cli_det");
    std::fs::create_dir_all(&dir).unwrap();
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    for out in [&a, &b] {
        let status = bin()
            .args(["--suite", "bm", "--dim", "1", "--seed", "123", "--out"])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}
