mod support;

use support::{golden, nqcalc, run_case, CASES};

#[test]
fn reports_match_golden_files() {
    let bless = std::env::var_os("NQCALC_BLESS").is_some();
    for &(name, sub, format, code) in CASES {
        let (first, c1) = run_case(name, sub, format);
        let (second, c2) = run_case(name, sub, format);
        assert_eq!(first, second, "{name} {sub} {format}: output differs between runs");
        assert_eq!((c1, c2), (code, code), "{name} {sub} {format}: exit code\n{first}");
        let path = golden(name, sub, format);
        if bless {
            std::fs::write(&path, &first).unwrap();
            continue;
        }
        let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(first, expected, "{name} {sub} {format} differs from {}", path.display());
    }
}

#[test]
fn json_reports_parse() {
    let (out, _) = run_case("poisson_r2", "verify", "json");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["summary"]["pass"], 2);
    assert_eq!(v["commands"][0]["name"], "verify compat P");
    assert_eq!(v["commands"][0]["verdict"], "pass");
}

#[test]
fn only_selects_one_command() {
    let path = support::fixture("so3");
    let (out, _, code) = nqcalc(&["verify", path.to_str().unwrap(), "--only", "verify algebroid so3"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("1 commands: 1 pass"));
    let (_, err, code) = nqcalc(&["verify", path.to_str().unwrap(), "--only", "nothing"]);
    assert_eq!(code, 2);
    assert!(err.contains("no command named"));
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.nq");
    std::fs::write(&bad, "[context]\nbase = x\n\n[bivector P]\nentry(x, q) = 1\n").unwrap();
    let (_, err, code) = nqcalc(&["verify", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("5:10: unresolved reference `q`"), "{err}");
    let (_, err, code) = nqcalc(&["verify", dir.path().join("missing.nq").to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn seed_changes_sampled_instances_only() {
    let path = support::fixture("spencer_degree2");
    let run = |seed: &str| {
        let out = std::process::Command::new(env!("CARGO_BIN_EXE_nqcalc"))
            .args(["verify", path.to_str().unwrap(), "--only", "cartan"])
            .env("NQCALC_SEED", seed)
            .output()
            .unwrap();
        (String::from_utf8(out.stdout).unwrap(), out.status.code())
    };
    let (a, ca) = run("7");
    let (b, _) = run("7");
    assert_eq!(a, b);
    assert_eq!(ca, Some(0), "{a}");
    assert!(a.contains("seed 7"));
    let (_, code) = run("seven");
    assert_eq!(code, Some(2));
}

#[test]
fn timing_is_opt_in() {
    let path = support::fixture("poisson_r2");
    let (out, _, _) = nqcalc(&["verify", path.to_str().unwrap(), "--timing"]);
    assert!(out.contains("time: "));
    let (out, _) = run_case("poisson_r2", "verify", "text");
    assert!(!out.contains("time: "));
}
