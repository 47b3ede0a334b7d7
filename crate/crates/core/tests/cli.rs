use std::io::Write;
use std::process::{Command, Stdio};

use freegroup::cli::{run, EXIT_DATA, EXIT_OK, EXIT_USAGE};

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn call(args: &[&str], stdin: &str) -> Output {
    let mut input = stdin.as_bytes();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("freegroup").chain(args.iter().copied());
    let code = run(argv, &mut input, &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

#[test]
fn check_prints_labels() {
    let o = call(&["check", "--n", "2"], "-1 -2 1 2\n1\n\n");
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert_eq!(o.stdout, "111\n010\n");
    let o = call(&["check", "--n", "2", "--format", "jsonl"], "-1 -2 1 2\n");
    assert_eq!(o.stdout, "{\"label\":[1,1,1],\"word\":[-1,-2,1,2]}\n");
}

#[test]
fn expand_prints_reduced_words() {
    assert_eq!(
        call(&["expand", "[x1, x2]", "--n", "2"], "").stdout,
        "-1 -2 1 2\n"
    );
    let o = call(&["expand", "--n", "3"], "[x, y]\n\n[[x1, x2], [x1, x2 x3]]\n");
    assert_eq!(o.stdout.lines().count(), 2);
    assert_eq!(
        call(&["expand", "[x1, x2]", "--format", "jsonl"], "").stdout,
        "[-1,-2,1,2]\n"
    );
    assert_eq!(call(&["expand", "x1 x1^-1"], "").stdout, "\n");
}

#[test]
fn exit_codes() {
    assert_eq!(call(&["check", "--bogus"], "").code, EXIT_USAGE);
    assert_eq!(call(&["frobnicate"], "").code, EXIT_USAGE);
    assert_eq!(call(&["check", "--n", "0"], "").code, EXIT_USAGE);
    assert_eq!(call(&["stats", "--format", "tokens"], "").code, EXIT_USAGE);
    assert_eq!(
        call(&["baseline", "random", "--completions", "x.jsonl"], "").code,
        EXIT_USAGE
    );
    assert_eq!(call(&["check", "--n", "2"], "3\n").code, EXIT_DATA);
    assert_eq!(call(&["check"], "x\n").code, EXIT_DATA);
    assert_eq!(call(&["expand", "[x1, x2"], "").code, EXIT_DATA);
    assert_eq!(
        call(&["evaluate", "--n", "2"], "{\"prefix\":[1]}\n").code,
        EXIT_DATA
    );
    assert_eq!(call(&["evaluate", "--n", "2"], "").code, EXIT_DATA);
    let help = call(&["--help"], "");
    assert_eq!(help.code, EXIT_OK);
    assert!(help.stdout.contains("baseline"));
}

#[test]
fn baseline_reports_a_ratio() {
    for method in ["random", "greedy", "evo"] {
        let o = call(
            &[
                "baseline", method, "--n", "2", "--batch", "20", "--budget", "500", "--seed", "3",
            ],
            "",
        );
        assert_eq!(o.code, EXIT_OK, "{method}: {}", o.stderr);
        let last = o.stdout.lines().last().unwrap();
        let ratio: f64 = last.strip_prefix("completion_ratio=").unwrap().parse().unwrap();
        assert!((0.0..=1.0).contains(&ratio));
        assert_eq!(
            o.stdout.lines().count() - 1,
            (ratio * 20.0).round() as usize,
            "{method}"
        );
    }
    let o = call(
        &[
            "baseline", "greedy", "--n", "3", "--batch", "10", "--format", "jsonl",
        ],
        "",
    );
    let v: serde_json::Value = serde_json::from_str(o.stdout.trim()).unwrap();
    assert_eq!(v["method"], "greedy");
    assert!(v["report"]["reduction_ratio"].as_f64().is_some());
}

#[test]
fn dataset_formats() {
    let o = call(&["dataset", "--n", "2", "--count", "4", "--format", "tokens"], "");
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let lines: Vec<_> = o.stdout.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(
        lines[0].starts_with("R1 R2 : ") || lines[0].starts_with("R0 R1 R2 : "),
        "{}",
        lines[0]
    );
    let o = call(
        &[
            "dataset",
            "--n",
            "2",
            "--count",
            "4",
            "--format",
            "tokens",
            "--no-prompt",
        ],
        "",
    );
    assert!(!o.stdout.contains(':'));
    let o = call(
        &["dataset", "--n", "4", "--mode", "nontrivial", "--count", "1000"],
        "",
    );
    assert!(o.stdout.lines().all(|l| l.contains("\"label\":[1,1,1,1,1]")));
    let records =
        freegroup::datasets::deserialize_jsonl(&call(&["dataset", "--count", "10"], "").stdout).unwrap();
    assert_eq!(records.len(), 10);
}

#[test]
fn greedy_completions_feed_evaluate() {
    let dir = std::env::temp_dir().join(format!("freegroup-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("completions.jsonl");
    let path_str = path.to_str().unwrap();
    let o = call(
        &[
            "baseline",
            "greedy",
            "--n",
            "3",
            "--batch",
            "50",
            "--seed",
            "1",
            "--completions",
            path_str,
        ],
        "",
    );
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let ratio = o.stdout.lines().last().unwrap().to_string();

    let e = call(&["evaluate", "--n", "3", "--input", path_str], "");
    assert_eq!(e.code, EXIT_OK, "{}", e.stderr);
    let report: serde_json::Value = serde_json::from_str(e.stdout.trim()).unwrap();
    assert_eq!(format!("completion_ratio={}", report["completion_ratio"]), ratio);
    assert_eq!(report["batch_size"], 50);

    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(call(&["evaluate", "--n", "3"], &text).stdout, e.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn stats_csv_and_summary() {
    let o = call(&["stats", "--n", "3", "--count", "200", "--seed", "2"], "");
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let mut lines = o.stdout.lines();
    assert_eq!(lines.next(), Some("sampler,length,valleys"));
    assert_eq!(lines.count(), 400);
    let o = call(
        &[
            "stats", "--n", "3", "--count", "200", "--seed", "2", "--format", "jsonl",
        ],
        "",
    );
    let v: serde_json::Value = serde_json::from_str(o.stdout.trim()).unwrap();
    assert_eq!(v["ks_statistic"], 0.0);
}

#[test]
fn out_flag_writes_a_file() {
    let path = std::env::temp_dir().join(format!("freegroup-out-{}.txt", std::process::id()));
    let o = call(&["sample", "--count", "3", "--out", path.to_str().unwrap()], "");
    assert_eq!((o.code, o.stdout.as_str()), (EXIT_OK, ""));
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 3);
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn binary_matches_the_library_entry_point() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_freegroup"))
        .args(["check", "--n", "2"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"-1 -2 1 2\n").unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "111\n");

    let out = Command::new(env!("CARGO_BIN_EXE_freegroup"))
        .args(["expand", "[x1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_DATA));
}
