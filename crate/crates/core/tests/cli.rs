mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn tmhcrf(args: &[&str]) -> Run {
    let out: Output = Command::new(env!("CARGO_BIN_EXE_tmhcrf")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn ok(args: &[&str]) -> String {
    let r = tmhcrf(args);
    assert_eq!(r.code, 0, "{args:?}: {}", r.stderr);
    r.stdout
}

struct Work(TempDir);

impl Work {
    fn new() -> Self {
        Work(tempfile::tempdir().unwrap())
    }

    fn path(&self, name: &str) -> String {
        self.0.path().join(name).to_str().unwrap().to_string()
    }

    fn write(&self, name: &str, text: &str) -> String {
        fs::write(self.0.path().join(name), text).unwrap();
        self.path(name)
    }

    fn read(&self, name: &str) -> String {
        fs::read_to_string(self.0.path().join(name)).unwrap()
    }

    /// Trains the toy model and returns its path.
    fn toy_model(&self) -> String {
        let data = self.write("toy.txt", common::TOY);
        let cfg = self.write("toy.cfg", common::TOY_CONFIG);
        let model = self.path("toy.model");
        let out = ok(&["train", "--config", &cfg, "--train", &data, "--model", &model]);
        assert!(out.contains("features\t10\n"), "{out}");
        model
    }
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

#[test]
fn toy_train_and_predict() {
    let w = Work::new();
    let model = w.toy_model();
    let input = w.write("q.txt", ">toy\nEAFD\n");
    assert_eq!(ok(&["predict", "--model", &model, "--input", &input]), "toy\t0110\n");

    let trace = w.path("trace.tsv");
    let cfg = w.path("toy.cfg");
    let data = w.path("toy.txt");
    let out = ok(&["train", "--config", &cfg, "--train", &data, "--model", &model, "--trace", &trace]);
    assert!(out.contains("termination\tconverged\n"), "{out}");
    let trace = w.read("trace.tsv");
    assert!(trace.starts_with("iteration\tobjective\tgrad_norm\n"));
    assert!(trace.lines().count() > 2);
}

#[test]
fn empty_input_gives_empty_output() {
    let w = Work::new();
    let model = w.toy_model();
    let input = w.write("empty.txt", "");
    assert_eq!(ok(&["predict", "--model", &model, "--input", &input]), "");
}

#[test]
fn marginals_are_probabilities() {
    let w = Work::new();
    let model = w.toy_model();
    let input = w.write("q.txt", ">a\nEAFD\n>b\nCAAFDDE\n");
    let out = ok(&["predict", "--model", &model, "--input", &input, "--emit-marginals"]);
    let rows: Vec<Vec<&str>> = out.lines().map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows.len(), 2);
    for (row, len) in rows.iter().zip([4, 7]) {
        assert_eq!(row.len(), 3);
        assert_eq!(row[1].len(), len);
        let p: Vec<f64> = row[2].split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(p.len(), len);
        assert!(p.iter().all(|x| (0.0..=1.0).contains(x)));
    }
}

#[test]
fn eval_segment_fixture() {
    let w = Work::new();
    let gold = w.write("gold.txt", ">p\nAAAAAAAAAAAAAAAAAA\n000111110001111100\n");
    let tsv = w.path("m.tsv");
    let metric = |pred: &str| {
        let pred = w.write("pred.txt", &format!("p\t{pred}\n"));
        let shown = ok(&["eval", "--gold", &gold, "--pred", &pred, "--tsv", &tsv]);
        assert!(shown.contains("Qtmh_obs"));
        let table = w.read("m.tsv");
        table
            .lines()
            .find_map(|l| l.strip_prefix("Qtmh_obs\t").map(str::to_string))
            .unwrap()
    };
    assert_eq!(metric("000111110001111100"), "100.00");
    assert_eq!(metric("000111111111111100"), "50.00");

    let stray = w.write("stray.txt", "q\t0101\n");
    let r = tmhcrf(&["eval", "--gold", &gold, "--pred", &stray]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains('q'), "{}", r.stderr);
}

#[test]
fn analyze_modes() {
    let w = Work::new();
    let data = common::structured_dataset(12, 5, 0.1);
    let train = w.write("train.txt", &data.to_text());
    let model = w.path("m.txt");
    ok(&["train", "--preset", "exp1", "--train", &train, "--model", &model]);

    let central = ok(&["analyze", "--model", &model, "--input", &train, "--mode", "central"]);
    let mut lines = central.lines();
    assert_eq!(lines.next(), Some("residue\tcount\tfrequency"));
    let total: f64 = lines.map(|l| l.split('\t').nth(2).unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9);

    let out = w.path("profile.tsv");
    ok(&["analyze", "--model", &model, "--input", &train, "--mode", "profile", "--radius", "5", "--set", "KR", "--out", &out]);
    let profile = w.read("profile.tsv");
    assert_eq!(profile.lines().count(), 1 + 11);
    assert!(profile.lines().nth(1).unwrap().starts_with("-5\t"));

    let r = tmhcrf(&["analyze", "--model", &model, "--input", &train, "--mode", "profile", "--set", "nonsense?"]);
    assert_eq!(r.code, 2);
}

#[test]
fn config_dump_matches_goldens() {
    for i in 1..=8 {
        let want = fs::read_to_string(golden(&format!("exp{i}.cfg"))).unwrap();
        assert_eq!(ok(&["config-dump", "--preset", &format!("exp{i}")]), want, "exp{i}");
    }
    // a dumped config read back reproduces itself
    let w = Work::new();
    let cfg = w.write("c.cfg", &fs::read_to_string(golden("exp5.cfg")).unwrap());
    assert_eq!(ok(&["config-dump", "--config", &cfg]), w.read("c.cfg"));
}

#[test]
fn full_preset_uses_extended_topology() {
    let w = Work::new();
    let data = common::structured_dataset(4, 2, 0.1);
    let train = w.write("train.txt", &data.to_text());
    let model = w.path("m.txt");
    ok(&["train", "--preset", "exp8", "--train", &train, "--model", &model, "--max-iters", "3"]);
    assert!(w.read("m.txt").lines().any(|l| l == "topology extended"));
    ok(&["train", "--preset", "exp3", "--train", &train, "--model", &model, "--max-iters", "3"]);
    assert!(w.read("m.txt").lines().any(|l| l == "topology binary"));
}

#[test]
fn exit_codes() {
    let w = Work::new();
    let model = w.toy_model();
    let input = w.write("q.txt", ">toy\nEAFD\n");

    // usage
    assert_eq!(tmhcrf(&["predict", "--bogus"]).code, 2);
    assert_eq!(tmhcrf(&["config-dump", "--preset", "exp9"]).code, 2);
    let bad = w.write("bad.cfg", "group.basic = on\nfeature.window = 4\n");
    let r = tmhcrf(&["config-dump", "--config", &bad]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains('2'), "{}", r.stderr);

    // data
    let missing = w.path("absent.txt");
    let r = tmhcrf(&["predict", "--model", &model, "--input", &missing]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains(&missing), "{}", r.stderr);
    let r = tmhcrf(&["predict", "--model", &model, "--input", &input, "--preset", "exp8"]);
    assert_eq!(r.code, 3);
    let junk = w.write("junk.txt", ">a\nAC\n0\n");
    assert_eq!(tmhcrf(&["train", "--train", &junk, "--model", &w.path("x")]).code, 3);

    // numerical: a model whose weights are not finite
    let text = w.read("toy.model");
    let last = text.lines().last().unwrap();
    let (head, _) = last.rsplit_once('\t').unwrap();
    let broken = w.write("broken.model", &text.replace(last, &format!("{head}\tNaN")));
    assert_eq!(tmhcrf(&["predict", "--model", &broken, "--input", &input]).code, 4);
}

#[test]
fn deterministic_runs_are_byte_identical() {
    let w = Work::new();
    let data = common::structured_dataset(10, 4, 0.15);
    let train = w.write("train.txt", &data.to_text());
    let mut outputs = Vec::new();
    for i in 0..2 {
        let model = w.path(&format!("m{i}"));
        let pred = w.path(&format!("p{i}"));
        ok(&["--deterministic", "train", "--preset", "exp4", "--train", &train, "--model", &model]);
        ok(&["predict", "--model", &model, "--input", &train, "--out", &pred, "--emit-marginals"]);
        outputs.push((w.read(&format!("m{i}")), w.read(&format!("p{i}"))));
    }
    assert_eq!(outputs[0], outputs[1]);
    // the model's own configuration passes the compatibility check
    ok(&["predict", "--model", &w.path("m0"), "--input", &train, "--preset", "exp4"]);
}
