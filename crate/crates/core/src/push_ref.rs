//! Push-based reference engine.
//!
//! Walks the out-edges of every frontier member over the CSR push topology
//! and aggregates messages at the destinations. It shares the double-buffered
//! value semantics of the pull engine so the two can be compared iteration by
//! iteration. The serial path is the correctness oracle; the parallel path
//! exists for timing comparisons and needs min-combining messages.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use crate::engine::{
    check_len, check_weights, ApplicationProgram, IterationStats, Mode, RunResult, RunStatus,
    ValueBuffers,
};
use crate::error::{Error, Result};
use crate::frontier::VertexFrontier;
use crate::graph::{OutDegrees, PushTopology, VertexId};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PushIterationStats {
    /// Out-edges traversed; equals the frontier's out-degree sum.
    pub edges_touched: u64,
    pub frontier_out_size: usize,
    pub push_time: Duration,
}

fn check_push_inputs<P: ApplicationProgram>(
    topology: &PushTopology,
    frontier: &VertexFrontier,
    buffers: &ValueBuffers<P::Value>,
    program: &P,
    degrees: &OutDegrees,
) -> Result<()> {
    let n = topology.vertex_count();
    check_len("vertex frontier", frontier.vertex_count(), n)?;
    check_len("value buffers", buffers.len(), n)?;
    check_len("out-degree table", degrees.len(), n)?;
    check_weights(program, topology.is_weighted())
}

/// One serial push iteration over the members of `frontier`.
pub fn run_iteration_push<P: ApplicationProgram>(
    topology: &PushTopology,
    frontier: &VertexFrontier,
    buffers: &mut ValueBuffers<P::Value>,
    program: &P,
    degrees: &OutDegrees,
) -> Result<(VertexFrontier, PushIterationStats)> {
    check_push_inputs(topology, frontier, buffers, program, degrees)?;
    let start = Instant::now();
    let n = topology.vertex_count();
    let (previous, next) = buffers.split();
    let mut aggregates: Vec<Option<P::Message>> = vec![None; n];
    let mut edges_touched = 0u64;

    for s in frontier.members() {
        let src_value = previous[s as usize];
        for (d, weight) in topology.out_edges(s) {
            edges_touched += 1;
            let d = d as usize;
            if !program.should_process(previous[d]) {
                continue;
            }
            let m = program.gather(src_value, weight);
            aggregates[d] = Some(match aggregates[d] {
                Some(a) => program.combine(a, m),
                None => m,
            });
        }
    }

    let out = VertexFrontier::new(n);
    let mut out_size = 0;
    for (d, agg) in aggregates.into_iter().enumerate() {
        let (value, activate) = match agg {
            Some(m) => program.apply(previous[d], Some(m)),
            None => (previous[d], false),
        };
        next[d] = value;
        if activate {
            out.insert(d as VertexId, degrees)?;
            out_size += 1;
        }
    }

    Ok((
        out,
        PushIterationStats {
            edges_touched,
            frontier_out_size: out_size,
            push_time: start.elapsed(),
        },
    ))
}

/// Programs whose messages combine by minimum under an order-preserving
/// `u64` encoding, so destinations can be updated with an atomic min.
pub trait MinMessage: ApplicationProgram {
    fn encode(m: Self::Message) -> u64;
    fn decode(word: u64) -> Self::Message;
}

// Marks "no message"; encodings must stay below it.
const NO_MESSAGE: u64 = u64::MAX;

/// Parallel push iteration using per-destination atomic min updates.
pub fn run_iteration_push_parallel<P: MinMessage>(
    topology: &PushTopology,
    frontier: &VertexFrontier,
    buffers: &mut ValueBuffers<P::Value>,
    program: &P,
    degrees: &OutDegrees,
    workers: usize,
) -> Result<(VertexFrontier, PushIterationStats)> {
    check_push_inputs(topology, frontier, buffers, program, degrees)?;
    if workers == 0 {
        return Err(Error::InvalidConfig("workers must be at least 1".into()));
    }
    let start = Instant::now();
    let n = topology.vertex_count();
    let aggregates: Vec<AtomicU64> = (0..n).map(|_| AtomicU64::new(NO_MESSAGE)).collect();
    let touched = AtomicU64::new(0);
    let out = VertexFrontier::new(n);
    let out_size = AtomicUsize::new(0);
    let chunk = n.div_ceil(workers).max(1);

    {
        let (previous, next) = buffers.split();
        std::thread::scope(|s| {
            for lo in (0..n).step_by(chunk) {
                let hi = (lo + chunk).min(n);
                let (aggregates, touched) = (&aggregates, &touched);
                s.spawn(move || {
                    let mut local = 0u64;
                    for src in frontier.bits().ones_in(lo..hi) {
                        let src_value = previous[src];
                        for (d, weight) in topology.out_edges(src as VertexId) {
                            local += 1;
                            if program.should_process(previous[d as usize]) {
                                let word = P::encode(program.gather(src_value, weight));
                                debug_assert!(word != NO_MESSAGE);
                                aggregates[d as usize].fetch_min(word, Ordering::Relaxed);
                            }
                        }
                    }
                    touched.fetch_add(local, Ordering::Relaxed);
                });
            }
        });

        std::thread::scope(|s| {
            for (i, slots) in next.chunks_mut(chunk).enumerate() {
                let lo = i * chunk;
                let (aggregates, out, out_size) = (&aggregates, &out, &out_size);
                s.spawn(move || {
                    let mut count = 0;
                    let mut credit = 0u64;
                    for (k, slot) in slots.iter_mut().enumerate() {
                        let d = lo + k;
                        let word = aggregates[d].load(Ordering::Relaxed);
                        let agg = (word != NO_MESSAGE).then(|| P::decode(word));
                        let (value, activate) = match agg {
                            Some(m) => program.apply(previous[d], Some(m)),
                            None => (previous[d], false),
                        };
                        *slot = value;
                        if activate && out.mark(d as VertexId) {
                            count += 1;
                            credit += degrees.get(d as VertexId) as u64;
                        }
                    }
                    out.credit_edges(credit);
                    out_size.fetch_add(count, Ordering::Relaxed);
                });
            }
        });
    }

    Ok((
        out,
        PushIterationStats {
            edges_touched: touched.into_inner(),
            frontier_out_size: out_size.into_inner(),
            push_time: start.elapsed(),
        },
    ))
}

/// Frontier-driven push loop with the same termination rule as the pull
/// engine.
pub fn run_until_convergence_push<P: ApplicationProgram>(
    topology: &PushTopology,
    program: &P,
    degrees: &OutDegrees,
    max_iterations: usize,
) -> Result<RunResult<P::Value>> {
    run_push_with_observer(topology, program, degrees, max_iterations, |_, _, _| {})
}

pub fn run_push_with_observer<P, F>(
    topology: &PushTopology,
    program: &P,
    degrees: &OutDegrees,
    max_iterations: usize,
    observe: F,
) -> Result<RunResult<P::Value>>
where
    P: ApplicationProgram,
    F: FnMut(&IterationStats, &[P::Value], &VertexFrontier),
{
    drive_push(
        topology,
        program,
        degrees,
        max_iterations,
        observe,
        |f, b| run_iteration_push(topology, f, b, program, degrees),
    )
}

/// Push loop using the parallel atomic-min iteration.
pub fn run_until_convergence_push_parallel<P: MinMessage>(
    topology: &PushTopology,
    program: &P,
    degrees: &OutDegrees,
    max_iterations: usize,
    workers: usize,
) -> Result<RunResult<P::Value>> {
    drive_push(
        topology,
        program,
        degrees,
        max_iterations,
        |_, _, _| {},
        |f, b| run_iteration_push_parallel(topology, f, b, program, degrees, workers),
    )
}

fn drive_push<P, F, S>(
    topology: &PushTopology,
    program: &P,
    degrees: &OutDegrees,
    max_iterations: usize,
    mut observe: F,
    mut step: S,
) -> Result<RunResult<P::Value>>
where
    P: ApplicationProgram,
    F: FnMut(&IterationStats, &[P::Value], &VertexFrontier),
    S: FnMut(
        &VertexFrontier,
        &mut ValueBuffers<P::Value>,
    ) -> Result<(VertexFrontier, PushIterationStats)>,
{
    if max_iterations == 0 {
        return Err(Error::InvalidConfig(
            "max_iterations must be at least 1".into(),
        ));
    }
    let n = topology.vertex_count();
    check_len("out-degree table", degrees.len(), n)?;
    check_weights(program, topology.is_weighted())?;
    let total_edges = topology.edge_count() as u64;
    let mut buffers = ValueBuffers::from_program(program, n);
    let mut frontier = VertexFrontier::from_vertices(n, program.initial_frontier(n), degrees)?;
    let mut stats = Vec::new();

    let status = loop {
        if frontier.is_empty() {
            break RunStatus::Converged;
        }
        if stats.len() == max_iterations {
            break RunStatus::MaxIterations;
        }
        let frontier_in_edges = frontier.edge_sum();
        let frontier_in_size = frontier.len();
        let (out, push) = step(&frontier, &mut buffers)?;
        let row = IterationStats {
            iteration: stats.len() + 1,
            mode: Mode::Push,
            transform_time: None,
            pull_time: push.push_time,
            frontier_in_size,
            frontier_in_edges,
            active_edge_fraction: if total_edges == 0 {
                0.0
            } else {
                frontier_in_edges as f64 / total_edges as f64
            },
            vectors_touched: 0,
            covered_vectors: None,
            transform_entries: None,
            edges_processed: push.edges_touched,
            frontier_out_size: push.frontier_out_size,
        };
        observe(&row, buffers.next(), &out);
        stats.push(row);
        buffers.swap();
        frontier = out;
    };

    Ok(RunResult {
        values: buffers.into_previous(),
        stats,
        status,
    })
}
