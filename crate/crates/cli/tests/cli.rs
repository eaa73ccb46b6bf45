use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mono(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mono"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o)).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

#[test]
fn classify_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = mono(&["--json", "classify", "--quad", "1,-1", "--lin", "1,1"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["verdict"]["status"], "Regular");
    assert_eq!(v["verdict"]["witness"]["indices"], serde_json::json!([0, 1]));

    let o = mono(&["--json", "classify", "--quad", "2,3", "--lin", "5"], dir.path());
    assert_eq!(json(&o)["verdict"]["status"], "NotRegular");
}

#[test]
fn count_agrees_with_enumeration() {
    let dir = tempfile::tempdir().unwrap();
    let o = mono(
        &[
            "--json", "count", "--quad", "1", "--lin", "1,-1", "--n", "200", "--engine", "both",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["engine"], "both");
    // x - y = z^2 over [200]: sum over z of (200 - z^2) for z^2 < 200
    let expected: u64 = (1..=14u64).map(|z| 200 - z * z).sum();
    assert_eq!(v["count"], expected.to_string());
}

#[test]
fn colouring_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = mono(
        &[
            "colouring",
            "gen",
            "--kind",
            "random",
            "--n",
            "60",
            "--r",
            "3",
            "--seed",
            "9",
            "-o",
            "c.txt",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let o = mono(
        &["colouring", "lift", "c.txt", "--mode", "halving", "-o", "l.txt"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let lifted = fs::read_to_string(dir.path().join("l.txt")).unwrap();
    assert!(lifted.starts_with("120 4\n"), "{lifted}");

    let o = mono(
        &[
            "--json",
            "count",
            "--quad",
            "1",
            "--lin",
            "1,-1",
            "--colouring",
            "l.txt",
            "--engine",
            "both",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(json(&o)["per_colour"].as_array().unwrap().len(), 4);

    let o = mono(
        &["--json", "hindman", "--colouring", "c.txt", "--lift", "halving"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    for cfg in json(&o)["configs"].as_array().unwrap() {
        let s = &cfg["solution"];
        let sq = |k: &str| s[k].as_i64().unwrap().pow(2);
        assert_eq!(sq("x1") - sq("x2"), sq("y") + s["z"].as_i64().unwrap());
    }
}

#[test]
fn random_colouring_without_seed_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = mono(
        &["colouring", "gen", "--kind", "random", "--n", "10", "--r", "2"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn modular_lift_out_of_domain_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    mono(
        &[
            "colouring",
            "gen",
            "--kind",
            "congruence",
            "--n",
            "10",
            "--r",
            "2",
            "-o",
            "c.txt",
        ],
        dir.path(),
    );
    let o = mono(
        &[
            "colouring",
            "lift",
            "c.txt",
            "--mode",
            "modular",
            "--a",
            "1",
            "--b",
            "2",
            "--target",
            "10",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("m = 6"), "{}", stderr(&o));
}

#[test]
fn oversized_requests_exit_with_capacity_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = mono(
        &["count", "--quad", "1,1", "--lin", "1", "--n", "100000000000"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("capacity"), "{}", stderr(&o));
}

#[test]
fn gauss_sum_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = mono(
        &["--json", "expsum", "gauss", "--q", "7", "--a", "1", "--b", "2"],
        dir.path(),
    );
    let v = json(&o);
    let abs = v["abs"].as_f64().unwrap();
    assert!((abs - 7f64.sqrt().recip()).abs() < 1e-12, "{abs}");
}

#[test]
fn majorant_csv_starts_with_l1() {
    let dir = tempfile::tempdir().unwrap();
    let o = mono(
        &[
            "expsum", "majorant", "--n", "100", "--w", "2", "--grid", "8", "-o", "f.csv",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("f.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,alpha,re,im,abs"));
    // support x^2 + x <= 100, weights 2x + 1: 3 + 5 + ... + 19
    assert!(lines.next().unwrap().starts_with("0,0e0,9.9e1,"));
    assert_eq!(text.lines().count(), 9);
}

#[test]
fn bohr_set_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = mono(
        &[
            "--json", "bohr", "--n", "1000", "--theta", "1/7", "--eta", "0.01", "--c", "2", "--w", "2", "-o", "b.csv",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let v = json(&o);
    // phases 4k^2/7 and k/7 vanish exactly when 7 | k
    let expected: Vec<u64> = (1..=1000 / 14).map(|k| 14 * k).collect();
    assert_eq!(v["elements"], serde_json::json!(expected));
    let csv = fs::read_to_string(dir.path().join("b.csv")).unwrap();
    assert_eq!(csv.lines().count(), expected.len() + 1);
}

fn write_spec(dir: &Path, name: &str, spec: &str) {
    fs::write(dir.join(name), spec).unwrap();
}

const SCALING: &str = r#"{
    "kind": "scaling",
    "equation": {"quad": [1], "lin": [1, -1]},
    "colouring": "extremal",
    "r": 2,
    "n_grid": [4096, 8192, 16384, 32768, 65536],
    "output": "out"
}"#;

#[test]
fn scaling_experiment_slope_and_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    write_spec(dir.path(), "s.json", SCALING);
    let o = mono(&["--json", "experiment", "run", "s.json"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let slope = json(&o)["summary"]["fits"][0]["slope"].as_f64().unwrap();
    assert!((slope - 0.75).abs() <= 0.15, "slope {slope}");

    let out = dir.path().join("out");
    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    assert!(csv.starts_with("N,r,colour,count\n4096,2,1,"), "{csv}");
    assert_eq!(csv.lines().count(), 1 + 5 * 2);
    let plot = fs::read_to_string(out.join("plot.gp")).unwrap();
    assert!(plot.contains("'results.csv'"));
    let fit: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("fit.json")).unwrap()).unwrap();
    assert_eq!(fit["fits"][0]["residuals"].as_array().unwrap().len(), 5);
    let log = fs::read_to_string(out.join("run.log")).unwrap();
    assert!(log.contains("started_unix="));
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let spec = r#"{"kind": "scaling", "equation": {"quad": [1, -1], "lin": [1, 1]}, "colouring": "random",
                   "seed": 42, "r": 3, "n_grid": [300, 600, 1200, 2400], "output": "a"}"#;
    write_spec(dir.path(), "s.json", spec);
    let run = |threads: &str, out: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_mono"))
            .args(["experiment", "run", "s.json", "-o", out])
            .env("MONO_THREADS", threads)
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
    };
    run("1", "a");
    run("1", "b");
    run("3", "c");
    for file in ["results.csv", "fit.json", "plot.gp"] {
        let a = fs::read(dir.path().join("a").join(file)).unwrap();
        for other in ["b", "c"] {
            assert_eq!(
                a,
                fs::read(dir.path().join(other).join(file)).unwrap(),
                "{other}/{file}"
            );
        }
    }
}

#[test]
fn invalid_thread_count_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    write_spec(dir.path(), "s.json", SCALING);
    let o = Command::new(env!("CARGO_BIN_EXE_mono"))
        .args(["experiment", "run", "s.json"])
        .env("MONO_THREADS", "0")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn schema_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (SCALING.replace("[4096, 8192, 16384, 32768, 65536]", "[4096]"), "n_grid"),
        (SCALING.replace("[4096, 8192, 16384, 32768, 65536]", "[4096, 8192, 8192, 9000]"), "n_grid[2]"),
        (SCALING.replace("\"extremal\"", "\"random\""), "seed"),
        (SCALING.replace("\"r\": 2", "\"r\": \"two\""), "r"),
        (SCALING.replace("[1, -1]}", "[1, -1], \"cubic\": [1]}"), "equation.cubic"),
        (SCALING.replace("scaling", "sweep"), "kind"),
        (r#"{"kind": "moment-scan", "p": 5, "n_grid": [8, 16, 32], "w_grid": [2], "output": "o"}"#.into(), "p"),
        (
            r#"{"kind": "hypothesis-check", "check": "minor-arc", "n_grid": [1024], "w_grid": [3], "seed": 1, "output": "o"}"#
                .into(),
            "w_grid[0]",
        ),
    ];
    for (spec, path) in cases {
        write_spec(dir.path(), "bad.json", &spec);
        let o = mono(&["--json", "experiment", "run", "bad.json"], dir.path());
        assert_eq!(o.status.code(), Some(2), "{spec}");
        let err = json(&o)["error"].as_str().unwrap().to_owned();
        assert!(err.contains(&format!("spec error at {path}:")), "{path}: {err}");
    }
}

#[test]
fn moment_scan_matches_direct_command() {
    let dir = tempfile::tempdir().unwrap();
    let spec = r#"{"kind": "moment-scan", "p": 4, "n_grid": [64, 128, 256], "w_grid": [2, 6], "output": "m"}"#;
    write_spec(dir.path(), "m.json", spec);
    let o = mono(&["experiment", "run", "m.json"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("m/results.csv")).unwrap();
    let row = csv.lines().find(|l| l.starts_with("128,6,")).unwrap().to_owned();
    let o = mono(
        &["--json", "expsum", "moment", "--p", "4", "--n", "128", "--w", "6"],
        dir.path(),
    );
    let direct = json(&o)["moment"].as_str().unwrap().to_owned();
    assert_eq!(row, format!("128,6,4,{direct}"));
}

#[test]
fn hypothesis_checks_run() {
    let dir = tempfile::tempdir().unwrap();
    let spec = r#"{"kind": "hypothesis-check", "check": "hua", "n_grid": [4096, 8192, 16384], "output": "h"}"#;
    write_spec(dir.path(), "h.json", spec);
    let o = mono(&["--json", "experiment", "run", "h.json"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let fits = json(&o)["summary"]["fits"].as_array().unwrap().clone();
    assert_eq!(fits.len(), 4);
    for f in fits {
        let slope = f["slope"].as_f64().unwrap();
        assert!(slope < -0.3 && slope > -0.7, "{f}");
    }

    let spec = r#"{"kind": "hypothesis-check", "check": "minor-arc", "n_grid": [65536], "seed": 3, "output": "m"}"#;
    write_spec(dir.path(), "m.json", spec);
    let o = mono(&["experiment", "run", "m.json"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("m/results.csv")).unwrap();
    let max: f64 = csv.lines().nth(1).unwrap().rsplit(',').next().unwrap().parse().unwrap();
    assert!(max <= 0.2, "{max}");
}

#[test]
fn congruence_modulus_and_per_colour_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = mono(
        &[
            "colouring",
            "gen",
            "--kind",
            "congruence",
            "--n",
            "30",
            "--r",
            "3",
            "--mod",
            "3",
            "-o",
            "c.txt",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let o = mono(
        &[
            "colouring",
            "gen",
            "--kind",
            "extremal",
            "--n",
            "30",
            "--r",
            "3",
            "--mod",
            "4",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));

    let o = mono(
        &[
            "count",
            "--quad",
            "1",
            "--lin",
            "1,-1",
            "--colouring",
            "c.txt",
            "--per-colour",
            "--engine",
            "brute",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1 + 3 + 1, "{text}");
    assert!(text.lines().last().unwrap().starts_with("max: colour "));
}
