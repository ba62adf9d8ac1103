#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("data")
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("golden")
}

/// Golden cases: name, then arguments. Arguments ending in `.toml` are
/// resolved against the data directory.
pub const CASES: &[(&str, &[&str])] = &[
    (
        "split-radius",
        &["split-radius", "2", "1", "1", "0", "3/2", "2"],
    ),
    (
        "split-radius-h3",
        &["split-radius", "2", "3", "4", "7/2", "10"],
    ),
    (
        "split-radius-p3",
        &["--machine", "split-radius", "3", "2", "1/2", "3/2", "5/2"],
    ),
    ("split-radius-bad-prime", &["split-radius", "4", "1", "1"]),
    ("tate", &["tate-intervals", "2", "1", "3", "13", "9"]),
    (
        "tate-machine",
        &["--machine", "tate-intervals", "3", "2", "4", "7", "4"],
    ),
    ("tate-bad-l", &["tate-intervals", "2", "1", "3", "3", "9"]),
    ("tate-sweep", &["tate-sweep"]),
    (
        "rigidity-theta",
        &["verify-rigidity", "--input", "theta.toml"],
    ),
    (
        "rigidity-circle",
        &[
            "verify-rigidity",
            "--input",
            "circle.toml",
            "--max-degree",
            "3",
        ],
    ),
    (
        "rigidity-tree",
        &["verify-rigidity", "--input", "tree.toml"],
    ),
    (
        "rigidity-bouquet-machine",
        &["--machine", "verify-rigidity", "--input", "bouquet.toml"],
    ),
    (
        "rigidity-bad-edge",
        &["verify-rigidity", "--input", "bad-edge.toml"],
    ),
    ("pi1-z3-circle", &["pi1", "--input", "gog-z3-circle.toml"]),
    ("pi1-poly-circle", &["pi1", "--input", "poly-circle.toml"]),
    ("pi1-poly-square", &["pi1", "--input", "poly-square.toml"]),
    (
        "abelianize-theta",
        &["abelianize", "--input", "gog-theta-trivial.toml"],
    ),
    (
        "abelianize-z3-circle",
        &["abelianize", "--input", "gog-z3-circle.toml"],
    ),
    (
        "abelianize-amalgam",
        &["--machine", "abelianize", "--input", "gog-amalgam.toml"],
    ),
    (
        "saturation-times2",
        &[
            "saturation-check",
            "--input",
            "times2.toml",
            "--primes",
            "2",
        ],
    ),
    (
        "saturation-identity",
        &[
            "saturation-check",
            "--input",
            "identity2.toml",
            "--primes",
            "2,3",
            "--bound",
            "2",
        ],
    ),
    (
        "kummer-times2",
        &["kummer-check", "--input", "times2.toml", "--primes", "2"],
    ),
    (
        "kummer-times2-except",
        &[
            "kummer-check",
            "--input",
            "times2.toml",
            "--all-primes-except",
            "2",
        ],
    ),
    ("faces-cone", &["faces", "--input", "cone.toml"]),
    (
        "faces-nonsaturated",
        &["--machine", "faces", "--input", "nonsaturated.toml"],
    ),
    (
        "covers-bouquet",
        &["cover-enum", "--input", "bouquet.toml", "--max-degree", "3"],
    ),
    (
        "current-cusped",
        &["current-group", "--input", "cusped.toml"],
    ),
    (
        "current-theta-z4",
        &["current-group", "--input", "theta.toml", "--ring", "Z/4"],
    ),
    (
        "cospec-identity",
        &["cospec", "--input", "cospec-identity.toml"],
    ),
    (
        "cospec-chain",
        &["--machine", "cospec", "--input", "cospec-chain.toml"],
    ),
    ("schreier-s3", &["schreier", "--input", "s3-extension.toml"]),
    ("schreier-z4", &["schreier", "--input", "z4-extension.toml"]),
    ("wrong-kind", &["faces", "--input", "theta.toml"]),
];

/// Runs the binary and renders stdout, stderr and exit status as one
/// string, with data paths made relative.
pub fn run_case(args: &[&str], threads: Option<usize>) -> String {
    let dir = data_dir();
    let resolved: Vec<String> = args
        .iter()
        .map(|a| {
            if a.ends_with(".toml") {
                dir.join(a).display().to_string()
            } else {
                a.to_string()
            }
        })
        .collect();
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_anabel"));
    cmd.args(&resolved);
    if let Some(t) = threads {
        cmd.env("RAYON_NUM_THREADS", t.to_string());
    }
    let out = cmd.output().expect("binary runs");
    let prefix = format!("{}/", dir.display());
    let stdout = String::from_utf8_lossy(&out.stdout).replace(&prefix, "");
    let stderr = String::from_utf8_lossy(&out.stderr).replace(&prefix, "");
    format!(
        "{stdout}--- stderr\n{stderr}--- exit {}\n",
        out.status.code().unwrap_or(-1)
    )
}
