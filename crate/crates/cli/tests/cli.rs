use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn cosbias() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cosbias"));
    c.env_remove("COSBIAS_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    cosbias().args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

struct Bundles {
    dir: TempDir,
}

impl Bundles {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let o = run(&["witness", "write", "--out-dir", dir.path().to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        Bundles { dir }
    }

    fn path(&self, witness: &str, file: &str) -> String {
        self.dir.path().join(witness).join(file).to_string_lossy().into_owned()
    }

    fn set(&self, witness: &str, set: &str) -> String {
        self.path(witness, &format!("sets/{set}.txt"))
    }
}

fn weat_args(b: &Bundles, w: &str, x: &str, y: &str) -> Vec<String> {
    vec![
        "weat".into(),
        "--embeddings".into(),
        b.path(w, "embeddings.txt"),
        "--targets-x".into(),
        b.set(w, x),
        "--targets-y".into(),
        b.set(w, y),
        "--attr-a".into(),
        b.set(w, "a"),
        "--attr-b".into(),
        b.set(w, "b"),
    ]
}

fn run_owned(args: &[String]) -> Output {
    cosbias().args(args).output().unwrap()
}

#[test]
fn weat_on_extremal_bundle_reports_two() {
    let b = Bundles::new();
    let mut args = weat_args(&b, "weat_extremal", "x", "y");
    args.extend(["--permutations".into(), "100".into()]);
    let o = run_owned(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert!((v["effect_size"].as_f64().unwrap() - 2.0).abs() <= 1e-9);
    assert!(v["p_value"].is_f64());
    assert_eq!(v["manifest"]["command"], "weat");
    assert_eq!(v["manifest"]["inputs"].as_array().unwrap().len(), 5);
}

#[test]
fn zero_permutations_omits_p_value() {
    let b = Bundles::new();
    let mut args = weat_args(&b, "weat_extremal", "x", "y");
    args.extend(["--permutations".into(), "0".into()]);
    let v = json(&run_owned(&args));
    assert!(v.get("p_value").is_none());
    assert!(v["effect_size"].is_f64());
}

#[test]
fn missing_token_fails_and_names_it() {
    let b = Bundles::new();
    let extra = b.dir.path().join("extra.txt");
    std::fs::write(&extra, "# comment\nx_0\nzebra\n").unwrap();
    let mut args = weat_args(&b, "weat_extremal", "x", "y");
    args[4] = extra.to_string_lossy().into_owned();
    let o = run_owned(&args);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("zebra"), "{}", stderr(&o));
}

#[test]
fn undefined_effect_size_exits_two_with_report() {
    let b = Bundles::new();
    let w = "variance_collapse";
    let out = b.dir.path().join("undefined.json");
    let mut args = weat_args(&b, w, "x_equal", "y_equal");
    args.extend(["--out".into(), out.to_string_lossy().into_owned()]);
    let o = run_owned(&args);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert!(v["effect_size"].is_null());
}

#[test]
fn same_sees_what_weat_misses() {
    let b = Bundles::new();
    let w = "weat_blindspot";
    let weat = json(&run_owned(&weat_args(&b, w, "x", "y")));
    assert!(weat["effect_size"].as_f64().unwrap().abs() <= 1e-9);
    let o = run(&[
        "same",
        "--embeddings",
        &b.path(w, "embeddings.txt"),
        "--targets",
        &b.set(w, "x"),
        &b.set(w, "y"),
        "--attrs",
        &b.set(w, "a"),
        &b.set(w, "b"),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["mode"], "binary");
    assert!(v["set_score"].as_f64().unwrap() > 0.7);
}

#[test]
fn direct_bias_pca_flags_the_neutral_word() {
    let b = Bundles::new();
    let w = "direct_bias_failure";
    let o = run(&[
        "direct-bias",
        "--embeddings",
        &b.path(w, "embeddings.txt"),
        "--targets",
        &b.set(w, "neutral"),
        "--defining-sets",
        &b.path(w, "defining_sets.json"),
        "--direction",
        "pca",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!((json(&o)["direct_bias"].as_f64().unwrap() - 1.0).abs() <= 1e-9);

    let o = run(&[
        "direct-bias",
        "--embeddings",
        &b.path(w, "embeddings.txt"),
        "--targets",
        &b.set(w, "neutral"),
        "--defining-sets",
        &b.path(w, "defining_sets.json"),
        "--direction",
        "mean",
    ]);
    assert!(json(&o)["direct_bias"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn one_vs_rest_gives_a_row_per_set() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    std::fs::write(p("emb.txt"), "5 3\nr 1 0 0\ng 0 1 0\nb 0 0 1\nw1 1 1 0\nw2 0 1 1\n").unwrap();
    for (name, body) in [("r.txt", "r\n"), ("g.txt", "g\n"), ("b.txt", "b\n"), ("w.txt", "w1\nw2\n")] {
        std::fs::write(p(name), body).unwrap();
    }
    let o = run(&[
        "skew-stereo", "--embeddings", &p("emb.txt"), "--targets", &p("w.txt"),
        "--attrs", &p("r.txt"), &p("g.txt"), &p("b.txt"), "--contrast", "one-vs-rest",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = json(&o)["rows"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["second"], "rest");

    // in the hand example the two sets left over for a1 cancel
    let b = Bundles::new();
    let w = "same_multi_above_one";
    let o = run(&[
        "skew-stereo", "--embeddings", &b.path(w, "embeddings.txt"), "--targets", &b.set(w, "w"),
        "--attrs", &b.set(w, "a0"), &b.set(w, "a1"), &b.set(w, "a2"), "--contrast", "one-vs-rest",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["undefined"], true);

    let o = run(&[
        "same",
        "--embeddings",
        &b.path(w, "embeddings.txt"),
        "--targets",
        &b.set(w, "w"),
        "--attrs",
        &b.set(w, "a0"),
        &b.set(w, "a1"),
        &b.set(w, "a2"),
        "--sweep",
    ]);
    let v = json(&o);
    assert_eq!(v["mode"], "multi");
    assert!((v["set_score"].as_f64().unwrap() - 1.2071067811865475).abs() <= 1e-9);
    assert_eq!(v["reference_sweep"]["scores"].as_array().unwrap().len(), 3);
}

#[test]
fn mac_on_antipodal_bundle_is_one() {
    let b = Bundles::new();
    let w = "mac_blindspot";
    let csv = b.dir.path().join("mac.csv");
    let o = run(&[
        "mac",
        "--embeddings",
        &b.path(w, "embeddings.txt"),
        "--targets",
        &b.set(w, "t"),
        "--attrs",
        &b.set(w, "a1"),
        &b.set(w, "a2"),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!((json(&o)["score"].as_f64().unwrap() - 1.0).abs() <= 1e-12);
    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("token,a1,a2\n"));
}

#[test]
fn every_bundle_checks_out() {
    let b = Bundles::new();
    for entry in std::fs::read_dir(b.dir.path()).unwrap() {
        let dir = entry.unwrap().path();
        let o = run(&["witness", "check", dir.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}: {}", dir.display(), stderr(&o));
        assert_eq!(json(&o)["passed"], true);
    }
}

#[test]
fn validate_passes_and_reports_the_discrepancy() {
    let o = run(&["validate", "--suite", "all", "--iterations", "2000", "--restarts", "16", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["passed"], true);
    let probe = v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["name"] == "same_multi_bound_probe")
        .expect("probe entry");
    assert!(probe["discrepancy"].is_string());
    assert_eq!(v["manifest"]["seed"], 3);
}

#[test]
fn seed_flag_overrides_environment() {
    let from_env = cosbias()
        .env("COSBIAS_SEED", "11")
        .args(["validate", "--suite", "theorems", "--iterations", "10", "--restarts", "2"])
        .output()
        .unwrap();
    assert_eq!(json(&from_env)["manifest"]["seed"], 11);
    let from_flag = cosbias()
        .env("COSBIAS_SEED", "11")
        .args(["validate", "--suite", "theorems", "--iterations", "10", "--restarts", "2", "--seed", "5"])
        .output()
        .unwrap();
    assert_eq!(json(&from_flag)["manifest"]["seed"], 5);
}

fn synth(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["synth", "--out-dir", out.to_str().unwrap(), "--seed", "9"];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn noise_free_cell_recovers_planted_bias() {
    let dir = tempfile::tempdir().unwrap();
    let o = synth(dir.path(), &["--noise", "0", "--robustness-iterations", "5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut reader = csv::Reader::from_path(dir.path().join("grid_runs.csv")).unwrap();
    let headers = reader.headers().unwrap().clone();
    let col = headers.iter().position(|h| h == "r2_same").unwrap();
    let rows: Vec<_> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0][col].parse::<f64>().unwrap() >= 0.99);
}

#[test]
fn synth_is_byte_identical_across_runs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let extra = ["--mu", "0.3,0.6", "--sigma", "0.1,0.2", "--words", "40", "--replicates", "2", "--noise", "0.05", "--robustness-iterations", "10"];
    assert!(synth(a.path(), &extra).status.success());
    assert!(synth(b.path(), &extra).status.success());
    let files: Vec<PathBuf> = std::fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert!(files.len() >= 10);
    for f in files {
        let name = f.file_name().unwrap();
        let (x, y) = (std::fs::read_to_string(&f).unwrap(), std::fs::read_to_string(b.path().join(name)).unwrap());
        if name == "grid.json" {
            let strip = |s: &str| s.lines().filter(|l| !l.contains("\"timestamp\"")).collect::<Vec<_>>().join("\n");
            assert_eq!(strip(&x), strip(&y));
        } else {
            assert_eq!(x, y, "{name:?}");
        }
    }
}

#[test]
fn invalid_grid_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = synth(dir.path(), &["--mu", "1.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("mu"), "{}", stderr(&o));
}
