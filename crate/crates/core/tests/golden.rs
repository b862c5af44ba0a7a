//! Committed recipe outputs under `tests/golden/` must be reproduced row
//! for row. Long sweeps are checked through a cheap sub-sweep whose rows
//! must appear verbatim in the committed file.

use std::path::PathBuf;
use std::process::Command;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(root().join("tests/golden").join(format!("{name}.csv"))).unwrap()
}

fn run_recipe(name: &str, command: &str, extra: &[&str]) -> String {
    let recipe = root().join("../../recipes").join(format!("{name}.toml"));
    let out = Command::new(env!("CARGO_BIN_EXE_cs-ustat"))
        .env_remove("CS_USTAT_THREADS")
        .arg("--config")
        .arg(&recipe)
        .args(["-o", "-", command])
        .args(extra)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn split(csv: &str) -> (&str, Vec<&str>) {
    let mut lines = csv.lines();
    (lines.next().unwrap(), lines.collect())
}

fn assert_reproduced(name: &str, command: &str) {
    let committed = golden(name);
    let (want_header, want) = split(&committed);
    let fresh = run_recipe(name, command, &[]);
    let (got_header, got) = split(&fresh);
    assert_eq!(got_header, want_header, "{name}");
    assert_eq!(got.len(), want.len(), "{name}");
    for (i, (g, w)) in got.iter().zip(&want).enumerate() {
        assert_eq!(g, w, "{name}: data row {i}");
    }
}

fn assert_contained(name: &str, command: &str, extra: &[&str]) {
    let committed = golden(name);
    let (want_header, want) = split(&committed);
    let fresh = run_recipe(name, command, extra);
    let (got_header, got) = split(&fresh);
    assert_eq!(got_header, want_header, "{name}");
    assert!(!got.is_empty());
    for row in got {
        assert!(want.contains(&row), "{name}: row not in golden file: {row}");
    }
}

#[test]
fn concentration_curves() {
    assert_reproduced("concentration_eigmin", "ustat");
    assert_reproduced("concentration_eigmax", "ustat");
}

#[test]
fn rate_curves() {
    assert_reproduced("rate_curves", "rate");
}

#[test]
fn worst_case_eigenvalue_table() {
    assert_reproduced("worst_case_eigenvalues", "bounds");
    let table = golden("worst_case_eigenvalues");
    let (_, rows) = split(&table);
    assert!(rows.contains(&"worst-case-eig,0.1,0.1,sigma2_min,0.095,0"));
    assert!(rows.contains(&"worst-case-eig,0.1,0.1,sigma2_max,3.952,0"));
}

#[test]
fn bp_contour_cells() {
    assert_contained("bp_contour", "recover", &["--n", "200", "--k", "1,2"]);
}

#[test]
fn lasso_sigma_cells() {
    assert_contained("lasso_sigma_unit", "recover", &["--k", "2", "--sigma", "0.1"]);
}

#[test]
fn lasso_uniform_magnitude_cells() {
    assert_contained("lasso_sigma_uniform", "recover", &["--k", "2", "--sigma", "1e-3", "--trials", "2000"]);
    assert_contained("lasso_contour", "recover", &["--n", "200,300", "--k", "2"]);
}
