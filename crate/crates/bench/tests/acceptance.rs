//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any failed.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use common::{
    active_lanes, bfs_depths, component_min_labels, covered_lanes, dijkstra, random_graph,
    random_subset,
};
use wedge_core::frontier::edge_sum_below_threshold;
use wedge_core::io::{self, GenSpec};
use wedge_core::push_ref::run_push_with_observer;
use wedge_core::{
    bfs_program, cc_program, run_until_convergence, run_with_observer, sssp_program,
    transform_frontier, value_digest, ApplicationProgram, Depth, Dist, EdgeList, EngineConfig,
    FrontierPrecision, FullnessThreshold, Graph, IterationStats, Mode, RunResult, VertexFrontier,
    VertexId,
};

const CASES: u64 = 200;
const WIDTHS: [usize; 3] = [1, 2, 4];

/// Per-iteration (values after the iteration, output frontier members).
type Trace = Vec<(Vec<u64>, Vec<VertexId>)>;

fn record<V: Copy + Into<u64>>(trace: &mut Trace, values: &[V], out: &VertexFrontier) {
    trace.push((
        values.iter().map(|&v| v.into()).collect(),
        out.members().collect(),
    ));
}

fn pull_trace<P: ApplicationProgram>(
    g: &Graph,
    program: &P,
    config: &EngineConfig,
) -> (Trace, RunResult<P::Value>) {
    let mut trace = Trace::new();
    let r = run_with_observer(&g.pull, &g.index, program, &g.degrees, config, |_, v, f| {
        record(&mut trace, v, f)
    })
    .unwrap();
    assert!(r.converged());
    (trace, r)
}

fn push_trace<P: ApplicationProgram>(g: &Graph, program: &P) -> Trace {
    let mut trace = Trace::new();
    let r = run_push_with_observer(&g.push, program, &g.degrees, 10_000, |_, v, f| {
        record(&mut trace, v, f)
    })
    .unwrap();
    assert!(r.converged());
    trace
}

fn config(threshold: f64, vpg: usize, workers: usize) -> EngineConfig {
    EngineConfig::default()
        .with_threshold(FullnessThreshold::new(threshold).unwrap())
        .with_precision(FrontierPrecision::new(vpg).unwrap())
        .with_workers(workers)
}

/// Compares push, full-scan, and wedge traces for every width and precision.
fn all_engines_agree<P: ApplicationProgram>(edges: &EdgeList, program: &P, workers: usize) {
    let reference = push_trace(&Graph::build(edges, 1).unwrap(), program);
    for w in WIDTHS {
        let g = Graph::build(edges, w).unwrap();
        assert_eq!(push_trace(&g, program), reference, "push, W={w}");
        let (full, r) = pull_trace(&g, program, &config(0.0, 4, workers));
        assert!(r.stats.iter().all(|s| s.mode == Mode::FullScan));
        assert_eq!(full, reference, "full scan, W={w}");
        for vpg in FrontierPrecision::ALL {
            let (wedge, _) = pull_trace(&g, program, &config(1.0, vpg, workers));
            assert_eq!(wedge, reference, "wedge, W={w} vpg={vpg}");
        }
    }
}

fn weighted_case(seed: u64) -> EdgeList {
    let edges = random_graph(seed, 64, 256, seed % 2 == 1);
    if edges.is_weighted() {
        edges
    } else {
        io::synthesize_weights(&edges, 20).unwrap()
    }
}

fn criterion_1() {
    for seed in 0..CASES {
        let edges = random_graph(seed, 64, 256, seed % 2 == 1);
        let n = edges.vertex_count();
        let root = (seed as usize % n) as VertexId;
        let workers = 1 + seed as usize % 3;
        all_engines_agree(&edges, &bfs_program(root, n).unwrap(), workers);
        all_engines_agree(&io::symmetrize(&edges, false), &cc_program(), workers);
        all_engines_agree(
            &weighted_case(seed),
            &sssp_program(root, n).unwrap(),
            workers,
        );
    }
}

fn transform_case(seed: u64, w: usize) -> (Graph, VertexFrontier, BTreeSet<VertexId>) {
    let edges = random_graph(seed, 64, 256, false);
    let g = Graph::build(&edges, w).unwrap();
    let members: BTreeSet<VertexId> = random_subset(seed, g.vertex_count()).into_iter().collect();
    let f = VertexFrontier::from_vertices(g.vertex_count(), members.iter().copied(), &g.degrees)
        .unwrap();
    (g, f, members)
}

fn covered(g: &Graph, f: &VertexFrontier, vpg: usize) -> (BTreeSet<(usize, usize)>, usize) {
    let p = FrontierPrecision::new(vpg).unwrap();
    let t = transform_frontier(f, &g.index, p, 7, 3).unwrap();
    let lanes = covered_lanes(&g.pull, t.frontier.covered_in(0..g.pull.vector_count()));
    (lanes, t.frontier.set_bit_count())
}

fn criterion_2() {
    for seed in 0..CASES {
        for w in WIDTHS {
            let (g, f, members) = transform_case(seed, w);
            let active = active_lanes(&g.pull, &members);
            for vpg in FrontierPrecision::ALL {
                let (lanes, _) = covered(&g, &f, vpg);
                assert!(lanes.is_superset(&active), "seed {seed} W={w} vpg={vpg}");
            }
            if w == 1 {
                assert_eq!(covered(&g, &f, 1).0, active, "seed {seed}");
            }
        }
    }
}

fn criterion_3() {
    for seed in 0..CASES {
        for w in WIDTHS {
            let (g, f, members) = transform_case(seed, w);
            let active = active_lanes(&g.pull, &members).len();
            for vpg in FrontierPrecision::ALL {
                let (lanes, bits) = covered(&g, &f, vpg);
                assert!(lanes.len() <= bits * vpg * w);
                assert!(lanes.len() - active <= bits * (vpg * w - 1));
            }
        }
    }
}

fn criterion_4() {
    for seed in 0..CASES {
        for w in WIDTHS {
            let (g, f, _) = transform_case(seed, w);
            let mut finer: Option<(BTreeSet<(usize, usize)>, usize)> = None;
            for vpg in FrontierPrecision::ALL {
                let (lanes, bits) = covered(&g, &f, vpg);
                if let Some((fl, fb)) = &finer {
                    assert!(lanes.is_superset(fl), "seed {seed} W={w} vpg={vpg}");
                    assert!(bits <= *fb);
                }
                finer = Some((lanes, bits));
            }
        }
    }
}

fn criterion_5() {
    for seed in 0..CASES {
        for w in WIDTHS {
            let (g, f, members) = transform_case(seed, w);
            let recount: u64 = members
                .iter()
                .map(|&v| g.index.positions_of(v).len() as u64)
                .sum();
            for vpg in FrontierPrecision::ALL {
                let p = FrontierPrecision::new(vpg).unwrap();
                let t = transform_frontier(&f, &g.index, p, 5, 2).unwrap();
                assert_eq!(t.entries_visited, recount, "seed {seed} W={w} vpg={vpg}");
            }
        }
    }
}

fn replay_matches(stats: &[IterationStats], total: u64, t: f64) {
    let t = FullnessThreshold::new(t).unwrap();
    for s in stats {
        let expected = if edge_sum_below_threshold(s.frontier_in_edges, total, t) {
            Mode::Wedge
        } else {
            Mode::FullScan
        };
        assert_eq!(s.mode, expected, "iteration {}", s.iteration);
    }
}

fn criterion_6() {
    let thresholds = [0.0, 0.01, 0.05, 0.2, 0.5, 0.9, 1.0];
    for seed in 0..CASES {
        let edges = io::symmetrize(&random_graph(seed, 64, 256, false), false);
        let g = Graph::build(&edges, 2).unwrap();
        let total = g.edge_count() as u64;
        let n = g.vertex_count();
        for &t in &thresholds {
            let cfg = config(t, 4, 2);
            let runs = [
                run_until_convergence(
                    &g.pull,
                    &g.index,
                    &bfs_program(0, n).unwrap(),
                    &g.degrees,
                    &cfg,
                )
                .unwrap()
                .stats,
                run_until_convergence(&g.pull, &g.index, &cc_program(), &g.degrees, &cfg)
                    .unwrap()
                    .stats,
            ];
            for stats in &runs {
                replay_matches(stats, total, t);
                if t == 0.0 {
                    assert!(stats.iter().all(|s| s.mode == Mode::FullScan));
                }
                if t == 1.0 {
                    // every iteration whose frontier leaves some edge inactive
                    for s in stats {
                        assert_eq!(s.mode == Mode::Wedge, s.frontier_in_edges < total);
                    }
                    for s in stats.iter().skip(1) {
                        assert_eq!(s.mode, Mode::Wedge, "seed {seed}");
                    }
                }
            }
        }
    }
}

fn rmat(scale: u32, edge_factor: usize, seed: u64) -> EdgeList {
    io::generate(&GenSpec::rmat(scale, edge_factor, seed)).unwrap()
}

fn criterion_7() {
    let edges = rmat(14, 16, 1);
    let g = Graph::build(&edges, 4).unwrap();
    let n = g.vertex_count();
    let cfg = EngineConfig::bfs().with_workers(4);
    let r = run_until_convergence(
        &g.pull,
        &g.index,
        &bfs_program(0, n).unwrap(),
        &g.degrees,
        &cfg,
    )
    .unwrap();
    assert!(r.converged());
    let wedge: Vec<&IterationStats> = r.stats.iter().filter(|s| s.mode == Mode::Wedge).collect();
    assert!(!wedge.is_empty(), "no Wedge-mode iterations");
    let touched: u64 = wedge.iter().map(|s| s.vectors_touched).sum();
    let budget = wedge.len() as u64 * g.pull.vector_count() as u64;
    println!(
        "    rmat(14,16): {} iterations, {} wedge, touched {touched} of {budget} ({:.2}%)",
        r.stats.len(),
        wedge.len(),
        100.0 * touched as f64 / budget as f64
    );
    assert!(2 * touched < budget);
    for s in &wedge {
        assert!(
            s.vectors_touched <= s.covered_vectors.unwrap(),
            "iteration {}",
            s.iteration
        );
    }
}

fn deterministic_across_workers<P: ApplicationProgram>(g: &Graph, program: &P, base: EngineConfig) {
    let mut first: Option<(u64, Vec<IterationStats>)> = None;
    for workers in [1, 2, 4, 8] {
        let cfg = base.with_workers(workers);
        let r = run_until_convergence(&g.pull, &g.index, program, &g.degrees, &cfg).unwrap();
        let seen = (
            value_digest(&r.values),
            r.stats
                .iter()
                .map(IterationStats::without_timings)
                .collect::<Vec<_>>(),
        );
        match &first {
            None => first = Some(seen),
            Some(f) => assert_eq!(&seen, f, "workers={workers}"),
        }
    }
}

fn criterion_8() {
    let edges = rmat(12, 16, 1);
    let n = edges.vertex_count();
    let small = EngineConfig::default().with_slice_size(64);
    deterministic_across_workers(
        &Graph::build(&edges, 4).unwrap(),
        &bfs_program(0, n).unwrap(),
        EngineConfig::bfs().with_slice_size(64),
    );
    deterministic_across_workers(
        &Graph::build(&io::symmetrize(&edges, false), 4).unwrap(),
        &cc_program(),
        small,
    );
    deterministic_across_workers(
        &Graph::build(&io::synthesize_weights(&edges, 255).unwrap(), 4).unwrap(),
        &sssp_program(0, n).unwrap(),
        small,
    );
}

fn bfs_single_activation(edges: &EdgeList, root: VertexId, cfg: &EngineConfig) {
    let g = Graph::build(edges, 4).unwrap();
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    let r = run_with_observer(
        &g.pull,
        &g.index,
        &bfs_program(root, n).unwrap(),
        &g.degrees,
        cfg,
        |_, _, out| {
            for v in out.members() {
                assert!(!seen[v as usize], "vertex {v} activated twice");
                seen[v as usize] = true;
            }
        },
    )
    .unwrap();
    let expected: Vec<Depth> = bfs_depths(edges, root)
        .into_iter()
        .map(|d| d.map_or(Depth::UNVISITED, Depth))
        .collect();
    assert_eq!(r.values, expected);
}

fn cc_monotone(edges: &EdgeList, cfg: &EngineConfig) {
    let sym = io::symmetrize(edges, false);
    let g = Graph::build(&sym, 4).unwrap();
    let mut prev: Vec<u64> = (0..g.vertex_count() as u64).collect();
    let r = run_with_observer(
        &g.pull,
        &g.index,
        &cc_program(),
        &g.degrees,
        cfg,
        |_, values, _| {
            for (p, v) in prev.iter_mut().zip(values) {
                assert!(u64::from(*v) <= *p, "label increased");
                *p = u64::from(*v);
            }
        },
    )
    .unwrap();
    let labels: Vec<u32> = r.values.iter().map(|l| l.0).collect();
    assert_eq!(labels, component_min_labels(&sym));
}

fn sssp_matches_dijkstra(edges: &EdgeList, root: VertexId, cfg: &EngineConfig) {
    assert!(edges.len() <= 10_000);
    let g = Graph::build(edges, 4).unwrap();
    let r = run_until_convergence(
        &g.pull,
        &g.index,
        &sssp_program(root, g.vertex_count()).unwrap(),
        &g.degrees,
        cfg,
    )
    .unwrap();
    let expected: Vec<Dist> = dijkstra(edges, root)
        .into_iter()
        .map(|d| d.map_or(Dist::INF, Dist))
        .collect();
    assert_eq!(r.values, expected);
}

fn criterion_9() {
    let default = EngineConfig::default().with_workers(2);
    let bfs = EngineConfig::bfs().with_workers(2);
    for seed in 0..CASES {
        let edges = random_graph(seed, 64, 256, false);
        let root = (seed as usize % edges.vertex_count()) as VertexId;
        bfs_single_activation(&edges, root, &bfs);
        bfs_single_activation(&edges, root, &config(1.0, 1, 2));
        cc_monotone(&edges, &default);
        sssp_matches_dijkstra(&weighted_case(seed), root, &default);
    }
    // larger inputs near the edge-count limit
    let mid = rmat(9, 16, 3);
    assert!(mid.len() <= 10_000);
    bfs_single_activation(&mid, 0, &bfs);
    cc_monotone(&mid, &default);
    sssp_matches_dijkstra(&io::synthesize_weights(&mid, 255).unwrap(), 0, &default);
    let grid = io::generate(&GenSpec::Grid { rows: 50, cols: 50 }).unwrap();
    sssp_matches_dijkstra(&io::synthesize_weights(&grid, 100).unwrap(), 1234, &default);
}

fn wedge(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_wedge"))
        .args(args)
        .env_remove("WEDGE_WORKERS")
        .output()
        .expect("failed to launch wedge");
    (
        out.status.code().expect("terminated by signal"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn is_decimal(field: &str, places: usize) -> bool {
    match field.split_once('.') {
        Some((int, frac)) => {
            !int.is_empty()
                && int.bytes().all(|b| b.is_ascii_digit())
                && frac.len() == places
                && frac.bytes().all(|b| b.is_ascii_digit())
        }
        None => false,
    }
}

fn is_count(field: &str) -> bool {
    !field.is_empty() && field.bytes().all(|b| b.is_ascii_digit())
}

fn criterion_10() {
    let (code, out, err) = wedge(&[
        "run",
        "--app",
        "bfs",
        "--gen",
        "rmat:14:16",
        "--seed",
        "1",
        "--root",
        "0",
        "--workers",
        "4",
    ]);
    assert_eq!(code, 0, "{err}");
    let mut lines = out.lines();
    assert_eq!(
        lines.next(),
        Some("iteration,mode,transform_ms,pull_ms,active_edge_pct,vectors_touched,frontier_out")
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();

    // same run through the library, for the deterministic columns
    let edges = rmat(14, 16, 1);
    let g = Graph::build(&edges, 4).unwrap();
    let cfg = EngineConfig::bfs().with_workers(4);
    let r = run_until_convergence(
        &g.pull,
        &g.index,
        &bfs_program(0, g.vertex_count()).unwrap(),
        &g.degrees,
        &cfg,
    )
    .unwrap();
    assert_eq!(rows.len(), r.stats.len());
    for (i, (row, s)) in rows.iter().zip(&r.stats).enumerate() {
        assert_eq!(row.len(), 7, "row {}", i + 1);
        assert_eq!(row[0], (i + 1).to_string());
        assert_eq!(row[1], s.mode.as_str());
        assert!(matches!(row[1], "wedge" | "full"));
        assert!(
            is_decimal(row[2], 3) && is_decimal(row[3], 3),
            "timings in row {}",
            i + 1
        );
        if s.mode == Mode::FullScan {
            assert_eq!(row[2], "0.000");
        }
        assert!(is_decimal(row[4], 4));
        let pct: f64 = row[4].parse().unwrap();
        assert!((pct - s.active_edge_fraction * 100.0).abs() <= 5e-5);
        assert!(is_count(row[5]) && is_count(row[6]));
        assert_eq!(row[5], s.vectors_touched.to_string());
        assert_eq!(row[6], s.frontier_out_size.to_string());
    }
    assert!(err.contains(&format!("digest={:#018x}", value_digest(&r.values))));

    let (code, _, _) = wedge(&["run", "--app", "cc", "--gen", "path:40", "--max-iters", "2"]);
    assert_eq!(code, 2, "max-iters");
    let dir = std::env::temp_dir().join("wedge-acceptance-missing.el");
    let missing = dir.to_str().unwrap();
    for (args, what) in [
        (
            &["run", "--app", "cc", "--graph", missing][..],
            "missing file",
        ),
        (
            &["run", "--app", "bfs", "--gen", "path:8"][..],
            "missing root",
        ),
        (
            &["run", "--app", "pagerank", "--gen", "path:8"][..],
            "unknown app",
        ),
        (
            &["run", "--app", "bfs", "--gen", "path:8", "--root", "9"][..],
            "root out of range",
        ),
        (
            &[
                "run",
                "--app",
                "cc",
                "--gen",
                "path:8",
                "--threshold",
                "1.5",
            ][..],
            "bad threshold",
        ),
        (
            &[
                "sweep",
                "--sweep",
                "precision",
                "--values",
                "",
                "--app",
                "cc",
                "--gen",
                "path:8",
            ][..],
            "empty sweep",
        ),
        (&["bogus"][..], "unknown subcommand"),
    ] {
        let (code, out, err) = wedge(args);
        assert_eq!(code, 1, "{what}");
        assert!(out.is_empty(), "{what}: nothing on stdout");
        assert!(!err.is_empty(), "{what}: message on stderr");
    }
}

fn main() {
    let criteria: [(&str, fn()); 10] = [
        (
            "oracle equivalence across engines, widths, precisions",
            criterion_1,
        ),
        ("coverage soundness and exactness", criterion_2),
        ("superfluous-work bounds", criterion_3),
        ("precision nesting", criterion_4),
        ("transform work accounting", criterion_5),
        ("threshold replay and extremes", criterion_6),
        ("work reduction on sparse BFS frontiers", criterion_7),
        ("determinism across worker counts", criterion_8),
        (
            "BFS single activation, CC monotonicity, SSSP vs Dijkstra",
            criterion_9,
        ),
        ("CLI schema and exit codes", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check));
        let secs = start.elapsed().as_secs_f64();
        let verdict = if outcome.is_ok() { "PASS" } else { "FAIL" };
        if outcome.is_err() {
            failed += 1;
        }
        println!("criterion {:>2}: {verdict} ({secs:.1}s) {name}", i + 1);
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
