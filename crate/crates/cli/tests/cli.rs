//! End-to-end CLI checks against the built binary.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_turbohedge"))
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("turbohedge-cli-{tag}-{}", std::process::id()));
    std::fs::remove_dir_all(&dir).ok();
    dir
}

#[test]
fn run_writes_expected_files() {
    let out = tmp_dir("run");
    let status = bin()
        .args([
            "run",
            "--scenario",
            "single:1.4",
            "--gsnr-db",
            "10",
            "--blocks",
            "30",
            "--seed",
            "3",
            "--tau",
            "10",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let bler = std::fs::read_to_string(out.join("bler.csv")).unwrap();
    assert!(bler.starts_with("method,alpha_true,gsnr_db,blocks,block_errors,bler,bit_errors,ber\n"));
    assert_eq!(bler.lines().count(), 2);
    let trace = std::fs::read_to_string(out.join("weights_proposed_g10.csv")).unwrap();
    assert!(trace.starts_with("block,zeta_1"));
    assert_eq!(trace.lines().count(), 31);
    assert!(out.join("manifest.txt").exists());
    std::fs::remove_dir_all(&out).ok();
}

#[test]
fn rerun_from_manifest_reproduces_bler_csv() {
    let out1 = tmp_dir("rerun-a");
    let out2 = tmp_dir("rerun-b");
    let status = bin()
        .args([
            "run",
            "--scenario",
            "mixture:1.4,1.6",
            "--gsnr-db",
            "10,12",
            "--blocks",
            "20",
            "--seed",
            "9",
            "--out",
        ])
        .arg(&out1)
        .status()
        .unwrap();
    assert!(status.success());
    let status = bin()
        .args(["rerun", "--manifest"])
        .arg(out1.join("manifest.txt"))
        .arg("--out")
        .arg(&out2)
        .status()
        .unwrap();
    assert!(status.success());
    let a = std::fs::read_to_string(out1.join("bler.csv")).unwrap();
    let b = std::fs::read_to_string(out2.join("bler.csv")).unwrap();
    assert_eq!(a, b);
    let ta = std::fs::read_to_string(out1.join("weights_proposed_g10.csv")).unwrap();
    let tb = std::fs::read_to_string(out2.join("weights_proposed_g10.csv")).unwrap();
    assert_eq!(ta, tb);
    std::fs::remove_dir_all(&out1).ok();
    std::fs::remove_dir_all(&out2).ok();
}

#[test]
fn early_stop_table_writes_grid_csv() {
    let out = tmp_dir("table");
    let status = bin()
        .args([
            "early-stop-table",
            "--alphas",
            "1.4",
            "--gsnr-db",
            "10",
            "--taus",
            "5,10",
            "--blocks",
            "20",
            "--seed",
            "2",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let table = std::fs::read_to_string(out.join("early_stop.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next().unwrap(), "tau,g10_a1.4");
    assert!(lines.next().unwrap().starts_with("5,"));
    assert!(lines.next().unwrap().starts_with("10,"));
    std::fs::remove_dir_all(&out).ok();
}

#[test]
fn beta_sweep_labels_methods() {
    let out = tmp_dir("sweep");
    let status = bin()
        .args([
            "beta-sweep",
            "--scenario",
            "single:1.4",
            "--betas",
            "0.9,1.0",
            "--gsnr-db",
            "10",
            "--blocks",
            "15",
            "--seed",
            "4",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let bler = std::fs::read_to_string(out.join("bler.csv")).unwrap();
    assert!(bler.contains("proposed-b0.9,"));
    assert!(bler.contains("proposed-b1,"));
    std::fs::remove_dir_all(&out).ok();
}

#[test]
fn rejects_bad_flags() {
    assert!(!bin()
        .args([
            "run",
            "--scenario",
            "single:2.5",
            "--blocks",
            "5",
            "--out",
            "/tmp/x-bad"
        ])
        .status()
        .unwrap()
        .success());
    assert!(!bin()
        .args([
            "run",
            "--scenario",
            "single:1.4",
            "--rate",
            "9/10",
            "--blocks",
            "5",
            "--out",
            "/tmp/x-bad"
        ])
        .status()
        .unwrap()
        .success());
    assert!(!bin()
        .args([
            "run",
            "--scenario",
            "single:1.4",
            "--loss",
            "psychic",
            "--blocks",
            "5",
            "--out",
            "/tmp/x-bad"
        ])
        .status()
        .unwrap()
        .success());
}
