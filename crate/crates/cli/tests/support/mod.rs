#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

/// `(fixture, subcommand, format, expected exit code)`.
pub const CASES: &[(&str, &str, &str, i32)] = &[
    ("poisson_r2", "verify", "text", 0),
    ("poisson_r2", "verify", "json", 0),
    ("so3", "verify", "text", 1),
    ("so3", "classify", "json", 1),
    ("symplectic_r3", "verify", "text", 1),
    ("symplectic_r3", "roundtrip", "text", 0),
    ("spencer_degree2", "verify", "text", 0),
    ("contact_r3", "verify", "text", 1),
    ("dirac_graph", "verify", "text", 1),
    ("foliation_r2", "verify", "text", 1),
    ("lcs_r4", "verify", "text", 1),
    ("kplectic_r3", "verify", "text", 1),
    ("kplectic_r3", "roundtrip", "text", 0),
    ("minimal", "verify", "text", 0),
];

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn fixture(name: &str) -> PathBuf {
    fixture_dir().join(format!("{name}.nq"))
}

pub fn golden(name: &str, sub: &str, format: &str) -> PathBuf {
    fixture_dir().join("golden").join(format!("{name}.{sub}.{format}"))
}

/// Runs the binary and returns stdout, stderr and the exit code.
pub fn nqcalc(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_nqcalc"))
        .args(args)
        .env("NQCALC_SEED", "0")
        .output()
        .expect("run nqcalc");
    (
        String::from_utf8(out.stdout).expect("utf8"),
        String::from_utf8(out.stderr).expect("utf8"),
        out.status.code().unwrap_or(-1),
    )
}

pub fn run_case(name: &str, sub: &str, format: &str) -> (String, i32) {
    let path = fixture(name);
    let (out, _, code) = nqcalc(&[sub, path.to_str().unwrap(), "--format", format]);
    (out, code)
}
