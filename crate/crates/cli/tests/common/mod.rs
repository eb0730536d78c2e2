//! Golden-file cases shared by the golden and acceptance targets.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

pub const CASES: &[(&str, &[&str])] = &[
    ("check_conic", &["check", "--tri", "fig8.json", "--params", "params_v3.json"]),
    ("check_in_t", &["check", "--tri", "fig8.json", "--params", "[[1,0],[1,0]]"]),
    ("check_off", &["check", "--tri", "fig8.json", "--params", "[[0,0],[0,0]]"]),
    ("check_bad_count", &["check", "--tri", "fig8.json", "--params", "[[0,0]]"]),
    ("check_missing_file", &["check", "--tri", "nope.json", "--params", "[[0,0],[0,0]]"]),
    ("orth_trace", &["orth", "--rep", "rep.json"]),
    ("orth_axis", &["orth", "--rep", "rep.json", "--method", "axis"]),
    ("orth_unknown_method", &["orth", "--rep", "rep.json", "--method", "nope"]),
    ("realize", &["realize", "--gram", "gram3.json"]),
    ("realize_ordered", &["realize", "--gram", "gram3.json", "--pivot", "ordered", "--order", "2,0,1"]),
    ("realize_shuffled", &["realize", "--gram", "gram3.json", "--pivot", "shuffled", "--seed", "7"]),
    ("realize_degenerate", &["realize", "--gram", "gram_degenerate.json"]),
    ("realize_rank4", &["realize", "--gram", "gram_rank4.json"]),
    ("coherent_conic", &["coherent", "--tri", "fig8.json", "--params", "params_v3.json"]),
    ("coherent_line", &["coherent", "--tri", "fig8.json", "--params", "params_line.json"]),
    ("reconstruct_conic", &["reconstruct", "--tri", "fig8.json", "--params", "params_v3.json"]),
    ("reconstruct_in_t", &["reconstruct", "--tri", "fig8.json", "--params", "[[1,0],[1,0]]"]),
    ("trace_run", &["trace", "--tri", "fig8.json", "--run", "run.json"]),
    (
        "trace_inline",
        &["trace", "--tri", "fig8.json", "--start", "params_v3.json", "--direction", "[[0,1],[0,0]]", "--max-steps", "5"],
    ),
    ("trace_singular", &["trace", "--tri", "fig8.json", "--start", "[[1,0],[1,0]]", "--direction", "[[1,0],[0,0]]"]),
    ("trace_off_variety", &["trace", "--tri", "fig8.json", "--start", "[[0,0],[0,0]]", "--direction", "[[1,0],[0,0]]"]),
    ("fig8_v3", &["fig8", "--V", "3+0i"]),
    ("fig8_complex", &["fig8", "--V", "1+2i"]),
    ("fig8_reducible", &["fig8", "--V", "2"]),
    ("fig8_complete_structure", &["fig8", "--V", "1.5+0.8660254037844386i"]),
    ("fig8_pretty", &["fig8", "--V", "4", "--output", "pretty"]),
    ("fig8_selftest", &["fig8", "--selftest"]),
    ("fig8_triangulation", &["fig8", "--triangulation"]),
];

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

pub fn render(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_orthocalc"))
        .args(args)
        .current_dir(data_dir())
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs");
    let mut s = format!("exit: {}\n", out.status.code().unwrap_or(-1));
    s.push_str(&String::from_utf8(out.stdout).unwrap());
    let errors: Vec<String> = String::from_utf8(out.stderr)
        .unwrap()
        .lines()
        .filter(|l| l.starts_with("error:"))
        .map(str::to_owned)
        .collect();
    if !errors.is_empty() {
        s.push_str("--- stderr\n");
        for e in errors {
            s.push_str(&e);
            s.push('\n');
        }
    }
    s
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Names of cases whose output differs from the stored file.
pub fn mismatches() -> Vec<&'static str> {
    let mut out = Vec::new();
    for (name, args) in CASES {
        let want = std::fs::read_to_string(golden_dir().join(format!("{name}.txt"))).unwrap_or_default();
        if want != render(args) {
            out.push(*name);
        }
    }
    out
}
