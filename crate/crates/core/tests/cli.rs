//! The `sroi` binary end to end.

mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::*;
use sroi::io::{read_labelmap, write_labelmap, write_mask};
use sroi::{BinaryMask, LabelMap};

fn sroi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sroi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn save(dir: &Path, name: &str, bytes: &[u8]) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, bytes).unwrap();
    p
}

#[test]
fn subdivides_rectangle() {
    let dir = tempfile::tempdir().unwrap();
    let input = save(dir.path(), "rect64x16.pgm", &write_mask(&rect(64, 16)));
    let output = dir.path().join("out.pgm");
    let run = sroi(&[
        "subdivide",
        "--input",
        s(&input),
        "--k",
        "4",
        "--output",
        s(&output),
    ]);
    assert_eq!(
        run.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let labels = read_labelmap(&fs::read(&output).unwrap()).unwrap();
    assert_eq!(recount(&labels), vec![0, 256, 256, 256, 256]);
}

#[test]
fn zero_k_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = save(dir.path(), "m.pgm", &write_mask(&rect(9, 1)));
    let output = dir.path().join("out.pgm");
    let run = sroi(&[
        "subdivide",
        "--input",
        s(&input),
        "--k",
        "0",
        "--output",
        s(&output),
    ]);
    assert_eq!(run.status.code(), Some(1));
    assert!(!run.stderr.is_empty());
    assert!(!output.exists());
}

#[test]
fn oversized_k_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let input = save(dir.path(), "strip.pgm", &write_mask(&rect(9, 1)));
    let output = dir.path().join("out.pgm");
    let run = sroi(&[
        "subdivide",
        "--input",
        s(&input),
        "--k",
        "500",
        "--output",
        s(&output),
    ]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("k too large for region"));
    assert!(!output.exists());
}

#[test]
fn centerline_of_strip() {
    let dir = tempfile::tempdir().unwrap();
    let input = save(dir.path(), "strip.pgm", &write_mask(&rect(9, 1)));
    let output = dir.path().join("line.csv");
    let run = sroi(&["centerline", "--input", s(&input), "--output", s(&output)]);
    assert_eq!(run.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&output).unwrap().lines().count(), 9);
}

#[test]
fn centerline_of_rectangle_is_central() {
    let dir = tempfile::tempdir().unwrap();
    let input = save(dir.path(), "rect.pgm", &write_mask(&rect(64, 8)));
    let output = dir.path().join("line.csv");
    assert_eq!(
        sroi(&["centerline", "--input", s(&input), "--output", s(&output)])
            .status
            .code(),
        Some(0)
    );
    let text = fs::read_to_string(&output).unwrap();
    let ys: Vec<usize> = text
        .lines()
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    let n = ys.len();
    assert!(ys
        .iter()
        .enumerate()
        .all(|(i, &y)| i <= 3 || i + 4 >= n || y == 3 || y == 4));
}

#[test]
fn disconnected_mask_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mask = BinaryMask::from_fn(dims(10, 3), |c| c.x != 5);
    let input = save(dir.path(), "split.pgm", &write_mask(&mask));
    let output = dir.path().join("line.csv");
    let run = sroi(&["centerline", "--input", s(&input), "--output", s(&output)]);
    assert_eq!(run.status.code(), Some(2));
    assert!(!output.exists());
    let labels = dir.path().join("out.pgm");
    let run = sroi(&[
        "subdivide",
        "--input",
        s(&input),
        "--k",
        "2",
        "--output",
        s(&labels),
    ]);
    assert_eq!(run.status.code(), Some(2));
    assert!(!labels.exists());
}

#[test]
fn unreadable_input() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.pgm");
    let output = dir.path().join("out.pgm");
    let run = sroi(&[
        "subdivide",
        "--input",
        s(&missing),
        "--k",
        "2",
        "--output",
        s(&output),
    ]);
    assert_eq!(run.status.code(), Some(1));
    let garbage = save(dir.path(), "bad.pgm", b"P7 nonsense");
    let run = sroi(&["stats", "--input", s(&garbage)]);
    assert_eq!(run.status.code(), Some(1));
    assert!(!output.exists());
}

#[test]
fn failed_run_keeps_previous_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = save(dir.path(), "strip.pgm", &write_mask(&rect(9, 1)));
    let output = save(dir.path(), "out.pgm", b"previous");
    let run = sroi(&[
        "subdivide",
        "--input",
        s(&input),
        "--k",
        "500",
        "--output",
        s(&output),
    ]);
    assert_eq!(run.status.code(), Some(2));
    assert_eq!(fs::read(&output).unwrap(), b"previous");
    let leftovers: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(leftovers.len(), 2);
}

#[test]
fn stats_of_empty_map() {
    let dir = tempfile::tempdir().unwrap();
    let input = save(
        dir.path(),
        "zero.pgm",
        &write_labelmap(&LabelMap::zeros(dims(6, 4))).unwrap(),
    );
    let run = sroi(&["stats", "--input", s(&input)]);
    assert_eq!(run.status.code(), Some(0));
    assert!(run.stdout.is_empty());
}

#[test]
fn stats_of_annulus_map() {
    let dir = tempfile::tempdir().unwrap();
    let input = save(
        dir.path(),
        "ring.pgm",
        &p5_bytes(&Annulus::standard().mask()),
    );
    let labels = dir.path().join("labels.pgm");
    let run = sroi(&[
        "subdivide",
        "--input",
        s(&input),
        "--k",
        "16",
        "--output",
        s(&labels),
    ]);
    assert_eq!(
        run.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let run = sroi(&["stats", "--input", s(&labels)]);
    assert_eq!(run.status.code(), Some(0));
    let text = String::from_utf8(run.stdout).unwrap();
    let counts = recount(&read_labelmap(&fs::read(&labels).unwrap()).unwrap());
    assert_eq!(text.lines().count(), 16);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let label = v["label"].as_u64().unwrap() as usize;
        assert_eq!(v["area"].as_u64().unwrap() as usize, counts[label]);
    }
}

#[test]
fn repeated_runs_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mask = blob(&mut rng(7), 40, 32);
    let input = save(dir.path(), "blob.pgm", &write_mask(&mask));
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("out{run}.pgm"));
        let dump = dir.path().join(format!("dump{run}"));
        let status = sroi(&[
            "subdivide",
            "--input",
            s(&input),
            "--k",
            "3",
            "--output",
            s(&out),
            "--dump",
            s(&dump),
        ])
        .status;
        outputs.push((status.code(), fs::read(&out).ok(), dump));
    }
    assert_eq!(outputs[0].0, outputs[1].0);
    assert_eq!(outputs[0].1, outputs[1].1);
    for name in [
        "distance.csv",
        "arrival1.csv",
        "arrival2.csv",
        "centerline.csv",
        "cuts.csv",
        "stats.jsonl",
    ] {
        assert_eq!(
            fs::read(outputs[0].2.join(name)).ok(),
            fs::read(outputs[1].2.join(name)).ok(),
            "{name}"
        );
    }
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(sroi(&["--help"]).status.code(), Some(0));
    assert_eq!(sroi(&["--version"]).status.code(), Some(0));
    assert_eq!(sroi(&[]).status.code(), Some(1));
}
