//! End-to-end checks of the binary: output shapes, file formats and exit
//! codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_discordkit")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn tmpdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("discordkit-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn discord_of_a_bell_state_file() {
    let dir = tmpdir("bell");
    let out = run_in(
        &dir,
        &["family", "--r2", "--epsilon", "1", "--p", "0.5", "--out", "bell.json"],
    );
    assert!(out.status.success());
    let out = run_in(&dir, &["discord", "--state", "bell.json"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("delta_ab = 1.000000"), "{text}");
    assert!(text.contains("rank     = 1"), "{text}");
}

#[test]
fn family_cusp_record() {
    let dir = tmpdir("cusp");
    let out = run_in(
        &dir,
        &["family", "--r3", "--epsilon", "0.3333333", "--m", "0.5"],
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("delta_ab = 0.333333"), "{text}");
    assert!(text.contains("E        = 0.000000"), "{text}");
}

#[test]
fn survey_then_hist_round_trip() {
    let dir = tmpdir("survey");
    let out = run_in(
        &dir,
        &["survey", "--rank", "2", "--samples", "200", "--seed", "7", "--out", "recs.csv"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("fraction delta>J"), "{text}");
    let recs = std::fs::read_to_string(dir.join("recs.csv")).unwrap();
    assert!(recs.starts_with("# rank=2 n=200 seed=7"));
    assert!(recs.contains("delta_ab,delta_ba,J,I,E,purity,rank"));

    let out = run_in(
        &dir,
        &["hist", "--records", "recs.csv", "--quantity", "delta", "--bins", "40", "--out", "h.csv"],
    );
    assert!(out.status.success());
    let h = std::fs::read_to_string(dir.join("h.csv")).unwrap();
    assert!(h.contains("bin_lo,bin_hi,density"), "{h}");

    let out = run_in(
        &dir,
        &["hist", "--records", "recs.csv", "--grid-y", "E", "--bins", "20", "--out", "g.csv"],
    );
    assert!(out.status.success());
    let g = std::fs::read_to_string(dir.join("g.csv")).unwrap();
    assert!(g.contains("x_lo,x_hi,y_lo,y_hi,count"), "{g}");
}

#[test]
fn survey_is_reproducible_byte_for_byte() {
    let dir = tmpdir("repro");
    for (out, workers) in [("a.csv", "1"), ("b.csv", "2")] {
        let o = run_in(
            &dir,
            &[
                "survey", "--rank", "3", "--samples", "150", "--seed", "11", "--workers", workers,
                "--out", out,
            ],
        );
        assert!(o.status.success());
    }
    let a = std::fs::read(dir.join("a.csv")).unwrap();
    let b = std::fs::read(dir.join("b.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn env_var_overrides_workers() {
    let dir = tmpdir("env");
    let out = Command::new(bin())
        .current_dir(&dir)
        .env("DISCORDKIT_THREADS", "1")
        .args(["survey", "--rank", "2", "--samples", "50", "--seed", "5", "--out", "e.csv"])
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn domain_errors_exit_one() {
    let dir = tmpdir("errors");
    // missing file
    let out = run_in(&dir, &["discord", "--state", "missing.json"]);
    assert_eq!(out.status.code(), Some(1));
    // trace off by 0.01
    std::fs::write(
        dir.join("bad.json"),
        r#"{"matrix": [
            [[0.51,0],[0,0],[0,0],[0,0]],
            [[0,0],[0.5,0],[0,0],[0,0]],
            [[0,0],[0,0],[0,0],[0,0]],
            [[0,0],[0,0],[0,0],[0,0]]
        ]}"#,
    )
    .unwrap();
    let out = run_in(&dir, &["discord", "--state", "bad.json"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("trace is not one"), "{err}");
    // 3x4 matrix is a schema error
    std::fs::write(
        dir.join("shape.json"),
        r#"{"matrix": [
            [[0.25,0],[0,0],[0,0],[0,0]],
            [[0,0],[0.25,0],[0,0],[0,0]],
            [[0,0],[0,0],[0.5,0],[0,0]]
        ]}"#,
    )
    .unwrap();
    let out = run_in(&dir, &["discord", "--state", "shape.json"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("schema"), "{err}");
    // family parameter out of range
    let out = run_in(&dir, &["family", "--r2", "--epsilon", "1.5", "--p", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tmpdir("usage");
    let out = run_in(&dir, &["survey", "--rank", "9", "--samples", "1", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run_in(&dir, &["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_documents_units_and_basis() {
    let out = run_in(&std::env::temp_dir(), &["--help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("bits"), "{text}");
    assert!(text.contains("|00>"), "{text}");
}
