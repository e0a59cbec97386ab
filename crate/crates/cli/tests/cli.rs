use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bsbl::bench::planted_instance;
use bsbl::data_io::write_csv_matrix;
use bsbl::solver::brute_force_oracle;
use nalgebra::DMatrix;

fn bsbl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bsbl")).args(args).output().expect("binary runs")
}

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn fixture(name: &str) -> String {
    manifest_dir().join("fixtures/planted_10x16").join(name).to_string_lossy().into_owned()
}

fn tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(path.strip_prefix(root).unwrap().to_path_buf(), fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn synth_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let o = bsbl(&["synth", "--seed", "7", "--out", dir.to_str().unwrap(), "--height", "12", "--width", "10"]);
        assert!(o.status.success(), "{o:?}");
    }
    let (ta, tb) = (tree(&a), tree(&b));
    assert_eq!(ta.len(), 5 * 10);
    assert_eq!(ta, tb);

    let c = tmp.path().join("c");
    bsbl(&["synth", "--seed", "8", "--out", c.to_str().unwrap(), "--height", "12", "--width", "10"]);
    assert_ne!(tree(&c), ta);
}

#[test]
fn fixture_is_the_planted_instance() {
    let inst = planted_instance(14, 10, 4, 4, 1, 0.8, None).unwrap();
    assert_eq!(inst.active, vec![2]);
    assert_eq!(brute_force_oracle(&inst.problem, 1).unwrap().support, vec![2]);

    let tmp = tempfile::tempdir().unwrap();
    let y = inst.problem.y();
    let x = &inst.x_true;
    let files = [
        ("phi.csv", inst.problem.phi().clone()),
        ("y.csv", DMatrix::from_column_slice(y.len(), 1, y.as_slice())),
        ("x_true.csv", DMatrix::from_column_slice(x.len(), 1, x.as_slice())),
    ];
    for (name, m) in files {
        let path = tmp.path().join(name);
        write_csv_matrix(&path, &m).unwrap();
        assert_eq!(fs::read(&path).unwrap(), fs::read(fixture(name)).unwrap(), "{name}");
    }
}

#[test]
fn recover_finds_planted_block() {
    let o = bsbl(&["recover", "--phi", &fixture("phi.csv"), "--y", &fixture("y.csv"), "--block-size", "4", "--solver", "bsbl"]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).lines().any(|l| l == "support: {2}"), "{}", stdout(&o));

    let o = bsbl(&["recover", "--phi", &fixture("phi.csv"), "--y", &fixture("y.csv"), "--blocks", "4,4,4,4", "--format", "json"]);
    assert!(o.status.success(), "{o:?}");
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["support"], serde_json::json!([2]));
}

#[test]
fn bench_example_config_covers_grid() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("report.csv");
    let config = manifest_dir().join("configs/example.toml");
    let o = bsbl(&["bench", config.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), bsbl::bench::CSV_HEADER.join(","));
    assert_eq!(lines.count(), 2 * 2 * 2 * 4);

    let again = tmp.path().join("again.csv");
    bsbl(&["bench", config.to_str().unwrap(), "--out", again.to_str().unwrap()]);
    assert_eq!(fs::read(&out).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn classify_recognises_a_training_image() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("faces");
    let o = bsbl(&["synth", "--seed", "3", "--out", dir.to_str().unwrap(), "--classes", "3", "--per-class", "6", "--height", "12", "--width", "10"]);
    assert!(o.status.success(), "{o:?}");
    let image = dir.join("class_001/img_002.pgm");
    assert!(image.exists());
    let o = bsbl(&["classify", "--dict", dir.to_str().unwrap(), image.to_str().unwrap(), "--downsample", "6x5"]);
    assert!(o.status.success(), "{o:?}");
    let text = stdout(&o);
    assert!(text.starts_with("predicted: class_001\n"), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("residual ")).count(), 3);

    let o = bsbl(&["classify", "--dict", dir.to_str().unwrap(), image.to_str().unwrap(), "--robust", "--solver", "l1", "--format", "json"]);
    assert!(o.status.success(), "{o:?}");
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["predicted"], "class_001");
    assert_eq!(v["robust"], true);
}

#[test]
fn selftest_passes() {
    let o = bsbl(&["selftest"]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).contains("selftest passed"));
}

#[test]
fn exit_codes() {
    assert_eq!(bsbl(&["recover", "--bogus"]).status.code(), Some(1));
    assert_eq!(bsbl(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(bsbl(&["--help"]).status.code(), Some(0));
    assert_eq!(bsbl(&["bench", "/nonexistent/config.toml"]).status.code(), Some(1));
    assert_eq!(bsbl(&["recover", "--phi", &fixture("phi.csv"), "--y", &fixture("y.csv"), "--block-size", "5"]).status.code(), Some(1));
    assert_eq!(bsbl(&["recover", "--phi", &fixture("phi.csv"), "--y", &fixture("y.csv"), "--block-size", "4", "--solver", "magic"]).status.code(), Some(1));

    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, "seed = 1\ntrials = 0\n").unwrap();
    assert_eq!(bsbl(&["bench", bad.to_str().unwrap()]).status.code(), Some(1));

    // Well-formed arguments, unreadable data.
    let missing = tmp.path().join("missing.csv");
    let o = bsbl(&["recover", "--phi", missing.to_str().unwrap(), "--y", &fixture("y.csv"), "--block-size", "4"]);
    assert_eq!(o.status.code(), Some(2));
}
