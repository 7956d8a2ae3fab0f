use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

fn colrep(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_colrep"))
        .args(args)
        .current_dir(dir)
        .env_remove("COLREP_TOLERANCE")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn ok(args: &[&str], dir: &Path) -> Output {
    let out = colrep(args, dir);
    assert_eq!(
        code(&out),
        0,
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn json_file(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn vector(path: &Path) -> Vec<f64> {
    serde_json::from_value(json_file(path)).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn figure_checks_pass() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        &[
            "hf",
            "check",
            s(&fixture("fig2.json")),
            "perfect",
            "--t",
            "3",
        ],
        d,
    );
    ok(
        &[
            "hf",
            "check",
            s(&fixture("fig3.json")),
            "separating",
            "--shape",
            "1,2",
        ],
        d,
    );
    ok(
        &[
            "hf",
            "check",
            s(&fixture("fig4.json")),
            "distributing",
            "--t",
            "5",
            "--s",
            "2",
        ],
        d,
    );
    let out = ok(
        &[
            "hf",
            "check",
            s(&fixture("fig6.json")),
            "strengthening",
            "--d",
            "4x6,3x13",
            "--tau",
            "5",
            "--shape",
            "1,4",
            "--shape",
            "2,3",
        ],
        d,
    );
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["holds"], true);
    assert_eq!(report["exhaustive"], true);
    assert_eq!(report["result"]["verdict"], "holds");
}

#[test]
fn failing_check_writes_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = colrep(
        &[
            "hf",
            "check",
            s(&fixture("fig2.json")),
            "separating",
            "--shape",
            "1,3",
            "-o",
            s(&report),
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 5);
    let r = json_file(&report);
    assert_eq!(r["holds"], false);
    assert_eq!(r["result"]["verdict"], "fails");
    assert_eq!(r["result"]["columns"].as_array().unwrap().len(), 4);

    let out = colrep(
        &[
            "hf",
            "check",
            s(&fixture("fig2.json")),
            "perfect",
            "--t",
            "4",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 5);
}

#[test]
fn gen_linear_dimensions_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let path = d.join("p.json");
    ok(
        &[
            "hf",
            "gen-linear",
            "--q",
            "3",
            "--alpha",
            "2",
            "--m",
            "4",
            "-o",
            s(&path),
        ],
        d,
    );
    let p = colrep::HashFamily::read(&path).unwrap();
    assert_eq!((p.rows(), p.cols()), (4, 9));
    assert!(p.row_labels().is_some());

    assert_eq!(
        code(&colrep(
            &["hf", "gen-linear", "--q", "6", "--alpha", "2", "--m", "3"],
            d
        )),
        10
    );
    assert_eq!(
        code(&colrep(
            &["hf", "gen-linear", "--q", "3", "--alpha", "2", "--m", "5"],
            d
        )),
        10
    );
    assert_eq!(code(&colrep(&["hf", "gen-linear", "--q", "3"], d)), 2);
}

#[test]
fn parse_and_io_errors_leave_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let bad = d.join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out_path = d.join("report.json");
    let out = colrep(
        &[
            "hf",
            "check",
            s(&bad),
            "perfect",
            "--t",
            "2",
            "-o",
            s(&out_path),
        ],
        d,
    );
    assert_eq!(code(&out), 4);
    assert!(!out_path.exists());
    let out = colrep(
        &[
            "hf",
            "check",
            s(&d.join("absent.json")),
            "perfect",
            "--t",
            "2",
        ],
        d,
    );
    assert_eq!(code(&out), 3);
    let out = colrep(
        &[
            "hf",
            "check",
            s(&fixture("fig3.json")),
            "separating",
            "--shape",
            "1,x",
        ],
        d,
    );
    assert_eq!(code(&out), 10);
}

#[test]
fn compose_fig1_matches_hand_computation() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let csv = d.join("b.csv");
    ok(
        &[
            "compose",
            "--pattern",
            s(&fixture("fig1_pattern.json")),
            "--ingredient",
            s(&fixture("fig1_a.json")),
            "-o",
            s(&d.join("b.json")),
            "--csv",
            s(&csv),
        ],
        d,
    );
    assert_eq!(
        std::fs::read_to_string(&csv).unwrap(),
        "1,2,3,1\n4,5,6,4\n3,1,2,1\n6,4,5,4\n"
    );

    let out = colrep(
        &[
            "compose",
            "--pattern",
            s(&fixture("fig5_pattern.json")),
            "--ingredient",
            s(&fixture("fig5_a2.json")),
            "--ingredient",
            s(&fixture("fig5_a1.json")),
            "-o",
            s(&d.join("bad.json")),
        ],
        d,
    );
    assert_eq!(code(&out), 6);
    assert!(!d.join("bad.json").exists());
}

#[test]
fn compose_with_missing_symbols_has_zero_columns() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("p.json"),
        r#"{"m": 2, "n": 3, "k": [2, 2], "rows": [[1, 0, 2], [0, 2, 1]]}"#,
    )
    .unwrap();
    std::fs::write(
        d.join("a.json"),
        r#"{"r": 1, "k": 2, "entries": [[5.0, 7.0]], "scheme": "l0_brute_force"}"#,
    )
    .unwrap();
    let csv = d.join("b.csv");
    ok(
        &[
            "compose",
            "--pattern",
            "p.json",
            "--ingredient",
            "a.json",
            "-o",
            "b.json",
            "--csv",
            s(&csv),
        ],
        d,
    );
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), "5,0,7\n0,7,5\n");
}

/// Pattern, ingredient and composition for linear q = 5, α = 2, m = 3.
fn linear_setup(d: &Path, rows: Option<&str>) -> PathBuf {
    ok(
        &[
            "hf",
            "gen-linear",
            "--q",
            "5",
            "--alpha",
            "2",
            "--m",
            "3",
            "-o",
            "p.json",
        ],
        d,
    );
    let mut make = vec!["ingredient", "make", "--k", "5", "--t", "2", "-o", "a.json"];
    if let Some(r) = rows {
        make.extend(["--rows", r]);
    }
    ok(&make, d);
    ok(
        &[
            "compose",
            "--pattern",
            "p.json",
            "--ingredient",
            "a.json",
            "-o",
            "c.json",
        ],
        d,
    );
    d.join("c.json")
}

#[test]
fn round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    linear_setup(d, None);
    for (seed, mode) in [(1, "general"), (2, "sublinear"), (3, "strengthened")] {
        let seed = seed.to_string();
        ok(
            &[
                "sample", "c.json", "--random", "2", "--seed", &seed, "--record", "x.json", "-o",
                "y.json",
            ],
            d,
        );
        let mut args = vec![
            "recover", mode, "c.json", "y.json", "--t", "2", "-o", "r.json",
        ];
        if mode == "strengthened" {
            args.extend(["--d", "2x3"]);
        }
        ok(&args, d);
        let r = json_file(&d.join("r.json"));
        assert_eq!(r["mode"], mode);
        let x = vector(&d.join("x.json"));
        let xr: Vec<f64> = serde_json::from_value(r["x"].clone()).unwrap();
        let err = x
            .iter()
            .zip(&xr)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "{mode}: {err}");
        if mode == "sublinear" {
            assert!(r["candidates"]["positive_candidates"].as_u64().unwrap() <= 4);
        }
    }

    ok(
        &[
            "sample",
            "c.json",
            "--random",
            "2",
            "--seed",
            "4",
            "--nonnegative",
            "-o",
            "y.json",
            "--record",
            "x.json",
        ],
        d,
    );
    ok(
        &[
            "recover", "positive", "c.json", "y.json", "--t", "2", "-o", "r.json",
        ],
        d,
    );
    let r = json_file(&d.join("r.json"));
    assert!(r["support"]["negative"].as_array().unwrap().is_empty());
}

#[test]
fn zero_measurements_recover_zero() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    linear_setup(d, None);
    std::fs::write(
        d.join("zeros.json"),
        serde_json::to_string(&vec![0.0; 12]).unwrap(),
    )
    .unwrap();
    let out = ok(
        &["recover", "general", "c.json", "zeros.json", "--t", "2"],
        d,
    );
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(r["x"]
        .as_array()
        .unwrap()
        .iter()
        .all(|v| v.as_f64() == Some(0.0)));
}

#[test]
fn recovery_error_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    linear_setup(d, None);
    std::fs::write(d.join("short.json"), "[1.0, 2.0]").unwrap();
    assert_eq!(
        code(&colrep(
            &["recover", "general", "c.json", "short.json", "--t", "2"],
            d
        )),
        6
    );
    std::fs::write(d.join("text.json"), "\"hello\"").unwrap();
    assert_eq!(
        code(&colrep(
            &["recover", "general", "c.json", "text.json", "--t", "2"],
            d
        )),
        4
    );
    ok(&["sample", "c.json", "--random", "1", "-o", "y.json"], d);
    assert_eq!(
        code(&colrep(
            &["recover", "strengthened", "c.json", "y.json", "--t", "2"],
            d
        )),
        2
    );
    assert_eq!(
        code(&colrep(
            &["recover", "noisy", "c.json", "y.json", "--t", "2", "--s", "-1"],
            d
        )),
        10
    );

    let fig1 = fixture("fig1.compose.json");
    std::fs::write(d.join("y4.json"), "[1.0, 2.0, 3.0, 4.0]").unwrap();
    assert_eq!(
        code(&colrep(
            &["recover", "sublinear", s(&fig1), "y4.json", "--t", "1"],
            d
        )),
        7
    );

    std::fs::write(
        d.join("p0.json"),
        r#"{"m": 1, "n": 2, "k": [1], "rows": [[1, 0]]}"#,
    )
    .unwrap();
    std::fs::write(
        d.join("id.json"),
        r#"{"r": 1, "k": 1, "entries": [[1.0]], "scheme": "l0_brute_force"}"#,
    )
    .unwrap();
    ok(
        &[
            "compose",
            "--pattern",
            "p0.json",
            "--ingredient",
            "id.json",
            "-o",
            "c0.json",
        ],
        d,
    );
    std::fs::write(d.join("y1.json"), "[1.0]").unwrap();
    assert_eq!(
        code(&colrep(
            &["recover", "noisy", "c0.json", "y1.json", "--t", "1", "--s", "0.1"],
            d
        )),
        11
    );
}

#[test]
fn sublinear_needs_alpha_rows() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        &[
            "hf",
            "gen-linear",
            "--q",
            "5",
            "--alpha",
            "3",
            "--m",
            "2",
            "-o",
            "p.json",
        ],
        d,
    );
    ok(
        &["ingredient", "make", "--k", "5", "--t", "1", "-o", "a.json"],
        d,
    );
    ok(
        &[
            "compose",
            "--pattern",
            "p.json",
            "--ingredient",
            "a.json",
            "-o",
            "c.json",
        ],
        d,
    );
    ok(
        &[
            "sample", "c.json", "--random", "1", "--seed", "9", "-o", "y.json",
        ],
        d,
    );
    assert_eq!(
        code(&colrep(
            &["recover", "sublinear", "c.json", "y.json", "--t", "1"],
            d
        )),
        8
    );
}

#[test]
fn noisy_mode_reports_intervals() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    linear_setup(d, Some("6"));
    ok(
        &[
            "sample", "c.json", "--random", "2", "--seed", "5", "--tail", "0.05", "--record",
            "x.json", "-o", "y.json",
        ],
        d,
    );
    ok(
        &[
            "recover", "noisy", "c.json", "y.json", "--t", "2", "--s", "0.05", "--eps", "1e-6",
            "--refit", "-o", "r.json",
        ],
        d,
    );
    let r = json_file(&d.join("r.json"));
    let x = vector(&d.join("x.json"));
    let lower: Vec<f64> = serde_json::from_value(r["estimate"]["lower"].clone()).unwrap();
    let upper: Vec<f64> = serde_json::from_value(r["estimate"]["upper"].clone()).unwrap();
    let cut = 0.05 + 1e-6;
    for j in 0..x.len() {
        assert!(
            lower[j] - cut < x[j] && x[j] < upper[j] + cut,
            "coordinate {j}"
        );
    }
    assert!(r["estimate"]["refit"].is_array());
}

#[test]
fn ingredient_make_and_certify() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        &[
            "ingredient",
            "make",
            "--k",
            "4",
            "--t",
            "1",
            "--rows",
            "3",
            "--scheme",
            "l1",
            "-o",
            "a.json",
        ],
        d,
    );
    let a = colrep::Ingredient::read(d.join("a.json")).unwrap();
    assert_eq!((a.rows(), a.cols()), (3, 4));
    assert_eq!(a.scheme(), &colrep::SchemeKind::L1Program);

    let out = ok(
        &[
            "ingredient",
            "certify",
            "a.json",
            "--kind",
            "l0",
            "--t",
            "1",
            "-o",
            "b.json",
        ],
        d,
    );
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["holds"], true);
    assert_eq!(
        colrep::Ingredient::read(d.join("b.json"))
            .unwrap()
            .certified_t(),
        Some(1)
    );

    assert_eq!(
        code(&colrep(
            &[
                "ingredient",
                "certify",
                "a.json",
                "--kind",
                "l0",
                "--t",
                "2"
            ],
            d
        )),
        5
    );
    let out = colrep(
        &[
            "ingredient",
            "make",
            "--k",
            "4",
            "--t",
            "2",
            "--rows",
            "2",
            "-o",
            "c.json",
        ],
        d,
    );
    assert_eq!(code(&out), 5);
    assert!(!d.join("c.json").exists());
    assert_eq!(
        code(&colrep(
            &[
                "ingredient",
                "make",
                "--k",
                "3",
                "--t",
                "1",
                "--nodes",
                "1,1,2"
            ],
            d
        )),
        10
    );
    assert_eq!(
        code(&colrep(
            &[
                "ingredient",
                "make",
                "--k",
                "3",
                "--t",
                "1",
                "--nodes",
                "1,2"
            ],
            d
        )),
        6
    );
}

#[test]
fn tolerance_override() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    linear_setup(d, None);
    ok(&["sample", "c.json", "--random", "2", "-o", "y.json"], d);
    ok(
        &[
            "--tolerance",
            "1e-6",
            "recover",
            "general",
            "c.json",
            "y.json",
            "--t",
            "2",
        ],
        d,
    );
    assert_eq!(
        code(&colrep(
            &[
                "--tolerance",
                "-1",
                "recover",
                "general",
                "c.json",
                "y.json",
                "--t",
                "2"
            ],
            d
        )),
        10
    );
    let out = Command::new(env!("CARGO_BIN_EXE_colrep"))
        .args(["recover", "general", "c.json", "y.json", "--t", "2"])
        .current_dir(d)
        .env("COLREP_TOLERANCE", "1e-7")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
}

#[test]
fn outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    linear_setup(d, None);
    let run = |name: &str| {
        ok(
            &[
                "sample", "c.json", "--random", "2", "--seed", "11", "-o", name,
            ],
            d,
        );
        ok(
            &[
                "--sequential",
                "recover",
                "general",
                "c.json",
                name,
                "--t",
                "2",
            ],
            d,
        )
        .stdout
    };
    let a = run("y1.json");
    let b = run("y2.json");
    assert_eq!(a, b);
    assert_eq!(
        std::fs::read(d.join("y1.json")).unwrap(),
        std::fs::read(d.join("y2.json")).unwrap()
    );
    let parallel = ok(&["recover", "general", "c.json", "y1.json", "--t", "2"], d).stdout;
    assert_eq!(a, parallel);
}

#[test]
fn bench_writes_csv_and_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        &[
            "bench",
            "--points",
            "7:2,11:2",
            "--trials",
            "3",
            "--reps",
            "1",
            "-o",
            "bench.csv",
            "--plot",
            "plot.py",
        ],
        d,
    );
    let csv = std::fs::read_to_string(d.join("bench.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "n,t,alpha,naive_time,sublinear_time,candidate_count,q,m"
    );
    assert_eq!(lines.len(), 3);
    for line in &lines[1..] {
        let f: Vec<&str> = line.split(',').collect();
        assert!(f[5].parse::<usize>().unwrap() <= 4);
    }
    assert!(std::fs::read_to_string(d.join("plot.py"))
        .unwrap()
        .contains("bench.csv"));

    ok(
        &[
            "bench", "--points", "5:2", "--t", "0", "--trials", "2", "--reps", "1", "-o",
            "zero.csv",
        ],
        d,
    );
    let zero = std::fs::read_to_string(d.join("zero.csv")).unwrap();
    assert_eq!(zero.lines().nth(1).unwrap().split(',').nth(5), Some("0"));
    assert_eq!(code(&colrep(&["bench", "--points", "6:2"], d)), 10);
}
