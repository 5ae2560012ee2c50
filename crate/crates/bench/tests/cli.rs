use std::process::Command;

fn wedge_env(args: &[&str], env: &[(&str, &str)]) -> (i32, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_wedge"));
    cmd.args(args).env_remove("WEDGE_WORKERS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn wedge(args: &[&str]) -> (i32, String, String) {
    wedge_env(args, &[])
}

fn digest_of(stderr: &str) -> String {
    stderr
        .split_whitespace()
        .find_map(|t| t.strip_prefix("digest="))
        .expect("no digest in summary")
        .to_string()
}

fn sweep_rows(out: &str) -> Vec<Vec<String>> {
    out.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn bfs_on_a_path() {
    let (code, out, err) = wedge(&[
        "run", "--app", "bfs", "--gen", "path:8", "--root", "0", "--engine", "wedge",
    ]);
    assert_eq!(code, 0, "{err}");
    let rows: Vec<&str> = out.lines().skip(1).collect();
    // 7 iterations that each reach one new vertex, then one that empties the frontier
    assert_eq!(rows.len(), 8);
    for (i, row) in rows.iter().enumerate() {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[0], (i + 1).to_string());
        assert_eq!(fields[6], if i < 7 { "1" } else { "0" });
    }
}

#[test]
fn missing_graph_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing.el");
    let (code, out, err) = wedge(&["run", "--app", "cc", "--graph", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.contains("missing.el"));
}

#[test]
fn malformed_graph_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.el");
    std::fs::write(&path, "0 1\n1 x\n").unwrap();
    let (code, _, err) = wedge(&["run", "--app", "cc", "--graph", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn digest_is_invariant_across_engines_and_tuning() {
    for (app, spec) in [
        ("bfs", "rmat:6:4"),
        ("cc", "grid:5:7"),
        ("sssp", "rmat:6:4"),
        ("sssp", "path:4"),
    ] {
        let mut digests = Vec::new();
        for engine in ["wedge", "full", "push"] {
            for workers in ["1", "3"] {
                for width in ["1", "4"] {
                    for (threshold, precision) in [("0.5", "1"), ("1.0", "16"), ("0.05", "4")] {
                        let (code, _, err) = wedge(&[
                            "run",
                            "--app",
                            app,
                            "--gen",
                            spec,
                            "--seed",
                            "5",
                            "--root",
                            "0",
                            "--engine",
                            engine,
                            "--workers",
                            workers,
                            "--vector-width",
                            width,
                            "--threshold",
                            threshold,
                            "--precision",
                            precision,
                        ]);
                        assert_eq!(code, 0, "{err}");
                        digests.push(digest_of(&err));
                    }
                }
            }
        }
        let (_, _, err) = wedge(&[
            "run",
            "--app",
            app,
            "--gen",
            spec,
            "--seed",
            "5",
            "--root",
            "0",
            "--engine",
            "push",
            "--parallel-push",
            "--workers",
            "4",
        ]);
        digests.push(digest_of(&err));
        assert!(
            digests.iter().all(|d| d == &digests[0]),
            "{app} on {spec}: {digests:?}"
        );
    }
}

#[test]
fn workers_from_environment() {
    let args = [
        "run", "--app", "cc", "--gen", "grid:6:6", "--format", "json",
    ];
    let (code, out, _) = wedge_env(&args, &[("WEDGE_WORKERS", "3")]);
    assert_eq!(code, 0);
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["config"]["workers"], 3);
    let (_, out, _) = wedge_env(
        &[&args[..], &["--workers", "2"]].concat(),
        &[("WEDGE_WORKERS", "3")],
    );
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["config"]["workers"], 2);
}

#[test]
fn json_report_shape() {
    let (code, out, _) = wedge(&[
        "run",
        "--app",
        "bfs",
        "--gen",
        "grid:4:4",
        "--root",
        "0",
        "--workers",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    let rows = report["iterations"].as_array().unwrap();
    assert_eq!(report["totals"]["iterations"], rows.len());
    assert_eq!(report["totals"]["converged"], true);
    assert_eq!(report["config"]["threshold"], 0.01);
    assert_eq!(report["config"]["precision"], 8);
    assert_eq!(report["config"]["edges"], 48);
    assert!(report["digest"].as_str().unwrap().starts_with("0x"));
    let touched: u64 = rows
        .iter()
        .map(|r| r["vectors_touched"].as_u64().unwrap())
        .sum();
    assert_eq!(report["totals"]["vectors_touched"], touched);
}

#[test]
fn precision_sweep_keeps_results() {
    let (code, out, err) = wedge(&[
        "sweep",
        "--sweep",
        "precision",
        "--values",
        "1,2,4,8,16",
        "--app",
        "cc",
        "--gen",
        "grid:16:16",
    ]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(
        out.lines().next().unwrap(),
        "value,iterations,wedge_iterations,full_iterations,vectors_touched,edges_processed,wall_ms,converged,digest"
    );
    let rows = sweep_rows(&out);
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r[8] == rows[0][8]));
}

#[test]
fn threshold_sweep_extremes() {
    let (code, out, err) = wedge(&[
        "sweep",
        "--sweep",
        "threshold",
        "--values",
        "0.0,1.0",
        "--app",
        "cc",
        "--gen",
        "grid:8:8",
    ]);
    assert_eq!(code, 0, "{err}");
    let rows = sweep_rows(&out);
    let num = |r: &Vec<String>, i: usize| r[i].parse::<usize>().unwrap();
    assert_eq!(num(&rows[0], 2), 0);
    assert_eq!(num(&rows[0], 3), num(&rows[0], 1));
    assert_eq!(num(&rows[1], 2), num(&rows[1], 1) - 1);
    assert_eq!(rows[0][8], rows[1][8]);
}

#[test]
fn sweep_errors() {
    for values in ["", " , ", "abc", "3"] {
        let (code, _, _) = wedge(&[
            "sweep",
            "--sweep",
            "precision",
            "--values",
            values,
            "--app",
            "cc",
            "--gen",
            "path:5",
        ]);
        assert_eq!(code, 1, "values {values:?}");
    }
    let (code, _, _) = wedge(&[
        "sweep",
        "--sweep",
        "threshold",
        "--app",
        "cc",
        "--gen",
        "path:5",
    ]);
    assert_eq!(code, 1);
}

#[test]
fn generate_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.el");
    let (code, _, _) = wedge(&["generate", "--gen", "path:3", "--out", p.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(std::fs::read_to_string(&p).unwrap(), "0 1\n1 2\n");

    let (_, a, _) = wedge(&["generate", "--gen", "rmat:4:8", "--seed", "1"]);
    let (_, b, _) = wedge(&["generate", "--gen", "rmat:4:8", "--seed", "1"]);
    assert_eq!(a, b);
    assert!(!a.is_empty());

    let (_, grid, _) = wedge(&["generate", "--gen", "grid:2:2"]);
    assert_eq!(grid.lines().count(), 8);

    let w = dir.path().join("w.el");
    let (code, _, _) = wedge(&[
        "generate",
        "--gen",
        "rmat:5:4",
        "--weights",
        "9",
        "--out",
        w.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let parsed = wedge_core::io::parse_edge_list(&std::fs::read_to_string(&w).unwrap()).unwrap();
    assert!(parsed.is_weighted());
    assert!(parsed
        .edges()
        .iter()
        .all(|e| (1..=9).contains(&e.weight.unwrap())));

    let (code, _, _) = wedge(&[
        "generate",
        "--gen",
        "path:3",
        "--out",
        dir.path().join("no/such/dir.el").to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    let (code, _, _) = wedge(&["generate", "--gen", "ring:3"]);
    assert_eq!(code, 1);
}

#[test]
fn generated_file_runs_like_the_generator() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("g.el");
    wedge(&[
        "generate",
        "--gen",
        "rmat:7:8",
        "--seed",
        "9",
        "--weights",
        "50",
        "--out",
        p.to_str().unwrap(),
    ]);
    let (code, _, from_file) = wedge(&[
        "run",
        "--app",
        "sssp",
        "--graph",
        p.to_str().unwrap(),
        "--root",
        "0",
    ]);
    assert_eq!(code, 0);
    let (_, _, from_gen) = wedge(&[
        "run",
        "--app",
        "sssp",
        "--gen",
        "rmat:7:8",
        "--seed",
        "9",
        "--max-weight",
        "50",
        "--root",
        "0",
    ]);
    assert_eq!(digest_of(&from_file), digest_of(&from_gen));
}
