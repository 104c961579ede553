use std::fs;
use std::path::{Path, PathBuf};

use clonesim::circuitlang::{execute, parse, unparse};

fn files(kind: &str) -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus").join(kind);
    let mut v: Vec<PathBuf> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

/// Reads the `# error: CODE line N` marker on the first line.
fn marker(text: &str) -> (String, usize) {
    let first = text.lines().next().unwrap();
    let rest = first.strip_prefix("# error: ").expect("marker line");
    let mut parts = rest.split_whitespace();
    let code = parts.next().unwrap().to_string();
    assert_eq!(parts.next(), Some("line"));
    (code, parts.next().unwrap().parse().unwrap())
}

#[test]
fn valid_programs_round_trip() {
    let valid = files("valid");
    assert!(valid.len() >= 15);
    for path in &valid {
        let text = fs::read_to_string(path).unwrap();
        let p = parse(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let again = parse(&unparse(&p)).unwrap();
        assert_eq!(again, p, "{}", path.display());
        assert_eq!(unparse(&again), unparse(&p));
    }
}

#[test]
fn valid_programs_execute_and_pass() {
    for path in files("valid") {
        let p = parse(&fs::read_to_string(&path).unwrap()).unwrap();
        let r = execute(&p).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!((r.final_trace - 1.0).abs() <= 1e-9);
        assert!(r.all_passed(), "{}: {:?}", path.display(), r.expects);
    }
}

#[test]
fn malformed_programs_report_code_and_line() {
    let bad = files("malformed");
    assert!(bad.len() >= 10);
    for path in &bad {
        let text = fs::read_to_string(path).unwrap();
        let (code, line) = marker(&text);
        let e = parse(&text).expect_err(&path.display().to_string());
        assert_eq!(e.code.as_str(), code, "{}", path.display());
        assert_eq!(e.line, line, "{}", path.display());
        assert!(e.column >= 1);
        assert!(!e.expected.is_empty());
    }
}
