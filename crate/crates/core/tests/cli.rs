use std::fs;
use std::path::PathBuf;

use ecfs::cli::dispatch;
use ecfs::format::{parse_instance, parse_schedule};
use ecfs::metrics::CSV_HEADER;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = dispatch(
        std::iter::once("ecfs").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn bound_prints_value_and_witness() {
    let (code, out, _) = run(&["bound", &fixture("gap_C2.ecfs")]);
    assert_eq!(code, 0);
    assert_eq!(out, "L 2 witness 0 1 2\n");
    let (_, out, _) = run(&["bound", &fixture("ten_jobs.ecfs")]);
    assert_eq!(out, "L 10 witness 0 1 1\n");
}

#[test]
fn run_propalloc_on_ten_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let sched = dir.path().join("s.sched");
    let (code, out, _) = run(&[
        "run",
        "--alg",
        "propalloc",
        "--eps",
        "1",
        &fixture("ten_jobs.ecfs"),
        "--out",
        sched.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[1], "propalloc");
    assert_eq!(row[3], "2");
    assert!(row[4].parse::<u64>().unwrap() <= 10);
    assert_eq!(lines.count(), 1);

    let (code, out, _) = run(&[
        "validate",
        &fixture("ten_jobs.ecfs"),
        sched.to_str().unwrap(),
        "--aug",
        "2",
    ]);
    assert_eq!((code, out.as_str()), (0, "valid\n"));
    let (code, out, _) = run(&["validate", &fixture("ten_jobs.ecfs"), sched.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.starts_with("capacity 0 1 "));
}

#[test]
fn validate_reference_fixture() {
    let (code, out, _) = run(&["validate", &fixture("sjf_T4.ecfs"), &fixture("sjf_T4.sched")]);
    assert_eq!((code, out.as_str()), (0, "valid\n"));
}

#[test]
fn run_writes_csv_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("m.csv");
    let trace = dir.path().join("t.jsonl");
    let (code, out, _) = run(&[
        "run",
        "--alg",
        "sjf",
        "--eps",
        "1/2",
        &fixture("mixed.ecfs"),
        "--csv",
        csv.to_str().unwrap(),
        "--trace",
        trace.to_str().unwrap(),
        "--p",
        "1,2,3",
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 4);
    let trace = fs::read_to_string(&trace).unwrap();
    let first: serde_json::Value = serde_json::from_str(trace.lines().next().unwrap()).unwrap();
    assert_eq!(first["round"], 1);
    assert_eq!(first["arrivals"], serde_json::json!([0, 1]));
    assert!(first["loads"].get("3").is_some());
}

#[test]
fn batch_directory_runs_every_instance() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["gap_C2.ecfs", "triangle.ecfs", "ten_jobs.ecfs"] {
        fs::copy(fixture(name), dir.path().join(name)).unwrap();
    }
    let out_dir = dir.path().join("out");
    fs::create_dir(&out_dir).unwrap();
    let (code, out, _) = run(&[
        "run",
        "--alg",
        "fifo",
        "--k",
        "2",
        "--batch-dir",
        dir.path().to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1 + 3 * 2);
    for stem in ["gap_C2", "triangle", "ten_jobs"] {
        let s = parse_schedule(&fs::read_to_string(out_dir.join(format!("{stem}.sched"))).unwrap()).unwrap();
        assert!(s.is_nonsplitting());
    }
}

#[test]
fn oracle_and_decompose() {
    let dir = tempfile::tempdir().unwrap();
    let sched = dir.path().join("w.sched");
    let (code, out, _) = run(&[
        "oracle",
        &fixture("triangle.ecfs"),
        "--nonsplitting",
        "--out",
        sched.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.starts_with("max_response 3\n"));
    let (code, _, _) = run(&["validate", &fixture("triangle.ecfs"), sched.to_str().unwrap()]);
    assert_eq!(code, 0);

    let (_, out, _) = run(&[
        "oracle",
        &fixture("triangle.ecfs"),
        "--objective",
        "avg",
        "--refinement",
        "2",
    ]);
    assert!(out.starts_with("avg_response 2\n"));
    assert!(out.contains("grid 2"));

    let (code, _, err) = run(&["oracle", &fixture("gap_C2.ecfs"), "--budget", "2"]);
    assert_eq!(code, 1);
    assert!(err.contains("budget"));

    let (code, out, _) = run(&["decompose", &fixture("triangle.ecfs")]);
    assert_eq!(code, 0);
    assert_eq!(out, "max_degree 2\nfactors 1\nfactor 0 0 1 2\n");
}

#[test]
fn adversary_families() {
    let (code, out, _) = run(&["adversary", "--family", "gap", "--C", "3"]);
    assert_eq!(code, 0);
    assert_eq!(parse_instance(&out).unwrap().job_count(), 21);

    let (code, out, _) = run(&["adversary", "--family", "propalloc-avg", "--k", "3"]);
    assert_eq!(code, 0);
    assert_eq!(parse_instance(&out).unwrap().job_count(), 4);

    let (code, _, _) = run(&["adversary", "--family", "sjf-max", "--T", "5"]);
    assert_eq!(code, 2);

    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("c.ecfs");
    let sched = dir.path().join("c.sched");
    let trace = dir.path().join("c.jsonl");
    let (code, out, _) = run(&[
        "adversary",
        "--family",
        "chain",
        "--K",
        "1",
        "--C",
        "1",
        "--alg",
        "propalloc",
        "--out",
        inst.to_str().unwrap(),
        "--schedule",
        sched.to_str().unwrap(),
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let max: u64 = out
        .lines()
        .find_map(|l| l.strip_prefix("max_response "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(max >= 1);
    let rounds = fs::read_to_string(&trace).unwrap().lines().count();
    assert!(fs::read_to_string(&trace)
        .unwrap()
        .contains("\"phase\":\"subroutine k=0 c=0\""));
    let (code, _, _) = run(&["validate", inst.to_str().unwrap(), sched.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains(&format!("rounds {rounds}\n")));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    assert_eq!(run(&[]).0, 2);
    assert_eq!(run(&["run", "--alg", "nope", &fixture("triangle.ecfs")]).0, 2);
    assert_eq!(
        run(&[
            "run",
            "--alg",
            "propalloc",
            "--eps",
            "-1",
            &fixture("triangle.ecfs")
        ])
        .0,
        2
    );
    assert_eq!(run(&["run", "--alg", "batch", &fixture("mixed.ecfs")]).0, 2);
    assert_eq!(run(&["bound", "/nonexistent.ecfs"]).0, 2);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("adversary"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ecfs");
    fs::write(
        &bad,
        "ecfs v1\nnodes 2\nnode 0 1\nnode 1 1\njobs 1\njob 0 1 1 1 1\n",
    )
    .unwrap();
    let (code, _, err) = run(&["bound", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line 6"));
}

#[test]
fn horizon_exceeded_exits_one() {
    let (code, _, err) = run(&[
        "run",
        "--alg",
        "propalloc",
        "--eps",
        "1",
        &fixture("ten_jobs.ecfs"),
        "--max-rounds",
        "2",
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("horizon"));
}

#[test]
fn generate_is_seeded() {
    let a = run(&["generate", "--seed", "5", "--unit"]).1;
    let b = run(&["generate", "--seed", "5", "--unit"]).1;
    assert_eq!(a, b);
    assert!(parse_instance(&a).unwrap().is_unit());
    assert_ne!(a, run(&["generate", "--seed", "6", "--unit"]).1);
}
