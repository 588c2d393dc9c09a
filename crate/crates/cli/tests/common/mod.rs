#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

/// Set to regenerate the golden files instead of comparing against them.
pub const BLESS_ENV: &str = "HIERARCHY_FORGE_BLESS";

/// (golden directory, arguments); small orders keep the debug build fast.
pub const GOLDEN_CASES: &[(&str, &[&str])] = &[
    ("riccati", &["riccati", "--epsilon", "0.3"]),
    ("table1", &["table1", "--epsilon", "1"]),
    ("fig1", &["fig1", "--gamma", "1", "--delta", "0.01"]),
    ("fig2", &["fig2", "--gamma", "0.001"]),
    ("fig3", &["fig3", "--order", "16"]),
    ("linear_repro", &["linear-repro", "--epsilon", "1/2", "--depth", "4", "--order", "16"]),
    ("nonlinear_coverage", &["nonlinear-coverage", "--depth", "4", "--order", "20"]),
    ("moments", &["moments", "--tmax", "0.5", "--depth", "6", "--order", "40"]),
];

pub fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hierarchy-forge"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("HIERARCHY_FORGE_OUT")
        .output()
        .expect("binary runs")
}

pub fn read_dir(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .map(|entries| {
            entries
                .map(|e| {
                    let e = e.unwrap();
                    (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
                })
                .collect()
        })
        .unwrap_or_default()
}

pub fn golden_dir(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Runs the case twice; both runs must match each other and the golden files.
pub fn check_golden(name: &str, args: &[&str]) -> Result<(), String> {
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    for dir in [first.path(), second.path()] {
        let out = run(args, dir);
        if !out.status.success() {
            return Err(format!("{name}: exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
        }
    }
    let produced = read_dir(first.path());
    if produced != read_dir(second.path()) {
        return Err(format!("{name}: two runs differ"));
    }
    let golden = golden_dir(name);
    if std::env::var_os(BLESS_ENV).is_some() {
        let _ = std::fs::remove_dir_all(&golden);
        std::fs::create_dir_all(&golden).unwrap();
        for (file, bytes) in &produced {
            std::fs::write(golden.join(file), bytes).unwrap();
        }
        return Ok(());
    }
    let expected = read_dir(&golden);
    if expected.is_empty() {
        return Err(format!("{name}: no golden files in {}", golden.display()));
    }
    if expected.keys().ne(produced.keys()) {
        return Err(format!("{name}: file set {:?} vs golden {:?}", produced.keys(), expected.keys()));
    }
    for (file, bytes) in &expected {
        if produced[file] != *bytes {
            return Err(format!("{name}/{file}: differs from golden"));
        }
    }
    Ok(())
}

/// CSV body as rows of cells (header dropped).
pub fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}
