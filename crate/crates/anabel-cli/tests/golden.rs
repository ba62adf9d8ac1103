mod common;

use std::fs;

use common::{golden_dir, run_case, CASES};

/// Set `ANABEL_BLESS=1` to rewrite the golden files.
#[test]
fn golden_files_match() {
    let bless = std::env::var_os("ANABEL_BLESS").is_some();
    let mut failures = Vec::new();
    for (name, args) in CASES {
        let got = run_case(args, None);
        let path = golden_dir().join(format!("{name}.txt"));
        if bless {
            fs::write(&path, &got).unwrap();
            continue;
        }
        let want = fs::read_to_string(&path).unwrap_or_default();
        if got != want {
            failures.push(format!("{name}:\n--- want\n{want}--- got\n{got}"));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn exit_codes() {
    let code = |name: &str| {
        let (_, args) = CASES.iter().find(|(n, _)| *n == name).unwrap();
        run_case(args, None).lines().last().unwrap().to_string()
    };
    assert_eq!(code("rigidity-theta"), "--- exit 0");
    assert_eq!(code("rigidity-tree"), "--- exit 1");
    assert_eq!(code("saturation-times2"), "--- exit 1");
    assert_eq!(code("rigidity-bad-edge"), "--- exit 2");
    assert_eq!(code("tate-bad-l"), "--- exit 2");
    assert_eq!(code("wrong-kind"), "--- exit 2");
}

#[test]
fn errors_name_file_and_location() {
    let (_, args) = CASES
        .iter()
        .find(|(n, _)| *n == "rigidity-bad-edge")
        .unwrap();
    let out = run_case(args, None);
    assert!(out.contains("bad-edge.toml: edges:"), "{out}");
}
