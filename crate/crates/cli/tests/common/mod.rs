#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_moralframe"))
}

pub fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(name)
}

pub fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

pub fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// `key: value` summary lines printed on success.
pub fn summary(stdout: &str, key: &str) -> String {
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no {key} in {stdout}"))
        .to_owned()
}

/// Rows of a TSV artifact below its manifest line, split into cells.
pub fn tsv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().expect("header").split('\t').map(str::to_owned).collect();
    let rows = lines.map(|l| l.split('\t').map(str::to_owned).collect()).collect();
    (header, rows)
}

/// All-zero frame model: every class gets probability 1/12, below any
/// reasonable vote floor, so the classifier function always abstains.
pub fn write_zero_frame_model(path: &Path, dim: usize) {
    let mut text = String::from("# linear-model v1\ntask=frame\n");
    text.push_str(&format!("dim={dim}\nclasses=12\nepochs=0\nlearning_rate=0.1\nl2=0\nseed=0\nfinal_loss=0\nweights\n"));
    for _ in 0..12 {
        text.push_str(&vec!["0"; dim + 1].join(" "));
        text.push('\n');
    }
    fs::write(path, text).unwrap();
}

/// Uniform prior and accuracy 0.9 for every function: one dictionary vote
/// gives a posterior of 0.9 on its class.
pub fn write_params(path: &Path) {
    let mut text = String::from("# label-model-params v1\nnum_classes=12\nnum_lfs=13\n");
    for j in 0..12 {
        text.push_str(&format!("class_prior.{j}={}\n", 1.0 / 12.0));
    }
    for l in 0..13 {
        text.push_str(&format!("accuracy.{l}=0.9\npropensity.{l}=0.5\n"));
    }
    fs::write(path, text).unwrap();
}

/// Phrases with one seed-dictionary hit, paired with the hit's frame.
pub const HIT_PHRASES: [(&str, &str); 6] = [
    ("we protect the vulnerable", "Care"),
    ("this will harm workers", "Harm"),
    ("that is not fair", "Fairness"),
    ("an oppressive tyranny", "Oppression"),
    ("liberation matters", "Freedom"),
    ("they betrayed us", "Betrayal"),
];

/// Phrases without any dictionary term.
pub const MISS_PHRASES: [&str; 4] = ["nice weather today", "stay home", "see you soon", "numbers keep rising"];

/// Phrase table with the hits first, then the misses.
pub fn write_coverage_phrases(path: &Path) {
    let mut text = String::from("doc_id\tindex\ttext\ttrigger_terms\n");
    let all = HIT_PHRASES.iter().map(|(t, _)| *t).chain(MISS_PHRASES);
    for (i, t) in all.enumerate() {
        text.push_str(&format!("d{i}\t0\t{t}\t\n"));
    }
    fs::write(path, text).unwrap();
}
