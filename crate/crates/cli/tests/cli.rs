use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn gccm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gccm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!(
            "bad JSON ({e}): {}\n{}",
            String::from_utf8_lossy(&o.stdout),
            String::from_utf8_lossy(&o.stderr)
        )
    })
}

fn assert_schema(report: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schema/solve_report.v1.json");
    let schema: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(report).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "schema violations: {errors:?}");
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn star5(dir: &Path) -> PathBuf {
    write(dir, "star.txt", "0 1\n0 2\n0 3\n0 4\n0 5\n")
}

fn counterexample(dir: &Path) -> PathBuf {
    let p = dir.join("g2.txt");
    let o = gccm(&["gen", "--kind", "counterexample", "--r", "2", "--out", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    p
}

#[test]
fn solve_star_k1() {
    let dir = tempfile::tempdir().unwrap();
    let g = star5(dir.path());
    let o = gccm(&["solve", "--graph", g.to_str().unwrap(), "--k", "1", "--mode", "grover"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_schema(&r);
    assert_eq!(r["farness"], 5);
    assert_eq!(r["iterations"], 0);
    assert_eq!(r["solutionSet"], serde_json::json!([0]));
    assert_eq!(r["closeness"], "1/1");
}

#[test]
fn solve_all_modes_on_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let g = counterexample(dir.path());
    for mode in ["brute", "bb", "grover", "ilpind"] {
        let o = gccm(&["solve", "--graph", g.to_str().unwrap(), "--k", "2", "--mode", mode]);
        assert_eq!(code(&o), 0, "{mode}");
        let r = json(&o);
        assert_schema(&r);
        assert_eq!(r["farness"], 9, "{mode}");
        assert_eq!(r["status"], "optimal");
        assert_eq!(r["mode"], mode);
    }
}

#[test]
fn solve_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let g = star5(dir.path());
    let gs = g.to_str().unwrap();
    assert_eq!(code(&gccm(&["solve", "--graph", gs, "--k", "0"])), 1);
    assert_eq!(code(&gccm(&["solve", "--graph", gs, "--k", "7"])), 1);
    assert_eq!(code(&gccm(&["solve", "--graph", gs, "--k", "1", "--mode", "magic"])), 1);
    assert_eq!(code(&gccm(&["solve", "--graph", gs, "--k", "1", "--backend", "gurobi"])), 1);
    assert_eq!(code(&gccm(&["solve", "--graph", "/nonexistent", "--k", "1"])), 1);
    let empty = write(dir.path(), "empty.txt", "# nothing\n");
    assert_eq!(code(&gccm(&["solve", "--graph", empty.to_str().unwrap(), "--k", "1"])), 1);
    let split = write(dir.path(), "split.txt", "0 1\n2 3\n");
    let o = gccm(&["solve", "--graph", split.to_str().unwrap(), "--k", "1"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("disconnected"));
    assert_eq!(code(&gccm(&["--help"])), 0);
}

#[test]
fn solve_timeout_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("grid.txt");
    let gen = gccm(&["gen", "--kind", "grid", "--rows", "6", "--cols", "6", "--out", g.to_str().unwrap()]);
    assert_eq!(code(&gen), 0);
    let o = gccm(&["solve", "--graph", g.to_str().unwrap(), "--k", "3", "--time-limit", "0"]);
    assert_eq!(code(&o), 2);
    let r = json(&o);
    assert_schema(&r);
    assert_eq!(r["status"], "timeout");
    assert!(r["farness"].is_null());
}

#[test]
fn external_backend_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = counterexample(dir.path());
    let backend = format!("cmd:{} lp-solve --lp {{lp}} --sol {{sol}}", env!("CARGO_BIN_EXE_gccm"));
    for mode in ["grover", "ilpind"] {
        let o = gccm(&["solve", "--graph", g.to_str().unwrap(), "--k", "2", "--mode", mode, "--backend", &backend]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(json(&o)["farness"], 9);
    }
    let o = gccm(&["solve", "--graph", g.to_str().unwrap(), "--k", "2", "--backend", "cmd:exit 4"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn approx_examples() {
    let dir = tempfile::tempdir().unwrap();
    let g = counterexample(dir.path());
    let gs = g.to_str().unwrap();
    let run = |args: &[&str]| {
        let mut all = vec!["approx", "--graph", gs];
        all.extend_from_slice(args);
        let o = gccm(&all);
        assert_eq!(code(&o), 0);
        let r = json(&o);
        assert_schema(&r);
        assert_eq!(r["status"], "approx");
        r["farness"].as_u64().unwrap()
    };
    assert_eq!(run(&["--k", "2", "--algo", "greedy"]), 13);
    assert_eq!(run(&["--k", "2", "--algo", "greedy-ls"]), 9);
    assert_eq!(run(&["--k", "2", "--algo", "greedy-ls", "--use-dominated", "false"]), 9);
    assert_eq!(run(&["--k", "11", "--algo", "greedy"]), 0);
    let a = run(&["--k", "2", "--algo", "ls", "--seed", "4"]);
    let b = run(&["--k", "2", "--algo", "ls", "--seed", "4"]);
    assert_eq!(a, b);
    assert!(a <= 45);
}

#[test]
fn reduce_examples() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("star.txt", "0 1\n0 2\n0 3\n0 4\n0 5\n", 5, 5),
        ("k3.txt", "0 1\n1 2\n0 2\n", 2, 0),
        ("p2.txt", "0 1\n", 1, 1),
    ];
    for (name, text, dom, abs) in cases {
        let g = write(dir.path(), name, text);
        let o = gccm(&["reduce", "--graph", g.to_str().unwrap(), "--k", "1"]);
        assert_eq!(code(&o), 0);
        let r = json(&o);
        assert_eq!((r["dom"].as_u64(), r["abs"].as_u64()), (Some(dom), Some(abs)), "{name}");
    }
}

#[test]
fn metis_input() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "p5.metis", "% path\n5 4\n2\n1 3\n2 4\n3 5\n4\n");
    let o = gccm(&["solve", "--graph", g.to_str().unwrap(), "--format", "metis", "--k", "1"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["farness"], 6);
    assert_eq!(r["solutionSet"], serde_json::json!([3]));
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn bench_rows_and_order() {
    let dir = tempfile::tempdir().unwrap();
    let graphs = dir.path().join("graphs");
    fs::create_dir(&graphs).unwrap();
    let g2 = graphs.join("g2.txt");
    let o = gccm(&["gen", "--kind", "counterexample", "--r", "2", "--out", g2.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let out = dir.path().join("one.csv");
    let o = gccm(&[
        "bench", "--graphs", graphs.to_str().unwrap(), "--k-min", "2", "--k-max", "3", "--modes", "grover",
        "--repeats", "1", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_csv(&out);
    assert_eq!(rows[0], ["graph", "k", "mode", "repeat", "status", "farness", "iterations", "total_ms"]);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1][..6], ["g2", "2", "grover", "0", "optimal", "9"]);

    // The farness column agrees with a single solve.
    let solo = gccm(&["solve", "--graph", g2.to_str().unwrap(), "--k", "3"]);
    assert_eq!(rows[2][5], json(&solo)["farness"].to_string());

    let p = graphs.join("p7.txt");
    gccm(&["gen", "--kind", "path", "--n", "7", "--out", p.to_str().unwrap()]);
    let strip = |rows: Vec<Vec<String>>| -> Vec<Vec<String>> { rows.into_iter().map(|r| r[..7].to_vec()).collect() };
    let mut runs = Vec::new();
    for jobs in ["1", "3"] {
        let out = dir.path().join(format!("jobs{jobs}.csv"));
        let o = gccm(&[
            "bench", "--graphs", graphs.to_str().unwrap(), "--k-min", "2", "--k-max", "3", "--modes", "grover,ilpind,bb",
            "--repeats", "2", "--jobs", jobs, "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
        runs.push(strip(read_csv(&out)));
    }
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0].len(), 1 + 2 * 2 * 3 * 2);
}

#[test]
fn bench_timeout_rows() {
    let dir = tempfile::tempdir().unwrap();
    let graphs = dir.path().join("graphs");
    fs::create_dir(&graphs).unwrap();
    let g = graphs.join("grid.txt");
    gccm(&["gen", "--kind", "grid", "--rows", "6", "--cols", "6", "--out", g.to_str().unwrap()]);
    let out = dir.path().join("t.csv");
    let o = gccm(&[
        "bench", "--graphs", graphs.to_str().unwrap(), "--k-min", "3", "--k-max", "3", "--modes", "ilpind",
        "--repeats", "1", "--time-limit", "0", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let rows = read_csv(&out);
    assert_eq!(rows[1][4], "timeout");
    assert_eq!(rows[1][5], "");
}

#[test]
fn gen_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let edges = |p: &Path| fs::read_to_string(p).unwrap().lines().filter(|l| !l.starts_with('#')).count();
    let p = dir.path().join("p5.txt");
    assert_eq!(code(&gccm(&["gen", "--kind", "path", "--n", "5", "--out", p.to_str().unwrap()])), 0);
    assert_eq!(edges(&p), 4);
    let grid = dir.path().join("grid.txt");
    gccm(&["gen", "--kind", "grid", "--rows", "3", "--cols", "3", "--out", grid.to_str().unwrap()]);
    assert_eq!(edges(&grid), 12);
    let side: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("grid.txt.json")).unwrap()).unwrap();
    assert_eq!((side["n"].as_u64(), side["m"].as_u64()), (Some(9), Some(12)));

    let g2 = counterexample(dir.path());
    let side: Value = serde_json::from_str(&fs::read_to_string(g2.with_extension("txt.json")).unwrap()).unwrap();
    assert_eq!(side["landmarks"]["center"], 0);
    assert_eq!(side["landmarks"]["ends"].as_array().unwrap().len(), 2);
    assert_eq!(side["n"], 11);

    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for p in [&a, &b] {
        gccm(&["gen", "--kind", "gnp", "--n", "30", "--p", "0.1", "--seed", "3", "--out", p.to_str().unwrap()]);
    }
    assert_eq!(fs::read_to_string(&a).unwrap(), fs::read_to_string(&b).unwrap());
    assert_eq!(code(&gccm(&["gen", "--kind", "gnp", "--n", "30", "--out", a.to_str().unwrap()])), 1);
    assert_eq!(code(&gccm(&["gen", "--kind", "counterexample", "--r", "1", "--out", a.to_str().unwrap()])), 1);
}
