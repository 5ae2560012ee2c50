//! Pull-only iteration engine.
//!
//! Every iteration is a pull over destination-grouped edge vectors, either
//! over the whole topology or restricted to the vectors covered by a Wedge
//! Frontier. Before each iteration the driver compares the incoming
//! frontier's out-edge count against the fullness threshold and transforms
//! the frontier only when it is sparse enough.
//!
//! Vertex values are double-buffered: an iteration reads `previous` and
//! writes each slot of `next` exactly once.

use std::fmt::Debug;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::frontier::{
    should_transform, transform_frontier, FrontierPrecision, FullnessThreshold, VertexFrontier,
    WedgeFrontier, DEFAULT_SLICE_SIZE,
};
use crate::graph::{EdgeIndex, OutDegrees, PullTopology, VertexId, Weight};

/// Gather/combine/apply contract for a frontier-driven application.
///
/// `combine` must be associative and commutative, and `apply(old, None)`
/// must return `(old, false)`. All methods may be called concurrently.
pub trait ApplicationProgram: Sync {
    type Value: Copy + PartialEq + Debug + Send + Sync + Into<u64>;
    type Message: Copy + PartialEq + Debug + Send + Sync;

    fn initial_value(&self, v: VertexId) -> Self::Value;

    fn initial_frontier(&self, vertex_count: usize) -> Vec<VertexId>;

    /// Destinations failing this test are skipped entirely.
    fn should_process(&self, _dst: Self::Value) -> bool {
        true
    }

    fn gather(&self, src: Self::Value, weight: Option<Weight>) -> Self::Message;

    fn combine(&self, a: Self::Message, b: Self::Message) -> Self::Message;

    /// Returns the new value and whether the vertex joins the next frontier.
    fn apply(&self, old: Self::Value, agg: Option<Self::Message>) -> (Self::Value, bool);

    fn requires_weights(&self) -> bool {
        false
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueBuffers<V> {
    previous: Vec<V>,
    next: Vec<V>,
}

impl<V: Copy> ValueBuffers<V> {
    pub fn new(values: Vec<V>) -> Self {
        Self {
            next: values.clone(),
            previous: values,
        }
    }

    pub fn from_program<P: ApplicationProgram<Value = V>>(
        program: &P,
        vertex_count: usize,
    ) -> Self {
        Self::new(
            (0..vertex_count)
                .map(|v| program.initial_value(v as VertexId))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.previous.len()
    }

    pub fn is_empty(&self) -> bool {
        self.previous.is_empty()
    }

    pub fn previous(&self) -> &[V] {
        &self.previous
    }

    pub fn next(&self) -> &[V] {
        &self.next
    }

    pub(crate) fn split(&mut self) -> (&[V], &mut [V]) {
        (&self.previous, &mut self.next)
    }

    /// Makes the values just written the read side of the next iteration.
    pub fn swap(&mut self) {
        std::mem::swap(&mut self.previous, &mut self.next);
    }

    pub fn into_previous(self) -> Vec<V> {
        self.previous
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    FullScan,
    Wedge,
    Push,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::FullScan => "full",
            Mode::Wedge => "wedge",
            Mode::Push => "push",
        }
    }
}

/// Work counters from a single pull pass.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PullStats {
    pub vectors_touched: u64,
    pub edges_processed: u64,
    pub frontier_out_size: usize,
    pub pull_time: Duration,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationStats {
    /// 1-based.
    pub iteration: usize,
    pub mode: Mode,
    pub transform_time: Option<Duration>,
    pub pull_time: Duration,
    pub frontier_in_size: usize,
    /// Out-degree sum of the incoming frontier; the threshold decision input.
    pub frontier_in_edges: u64,
    pub active_edge_fraction: f64,
    pub vectors_touched: u64,
    /// Vectors covered by the Wedge Frontier (wedge mode only).
    pub covered_vectors: Option<u64>,
    /// Edge-index entries read by the transform (wedge mode only).
    pub transform_entries: Option<u64>,
    /// Edges whose messages were gathered (pull) or traversed (push).
    pub edges_processed: u64,
    pub frontier_out_size: usize,
}

impl IterationStats {
    /// Copy with wall-clock fields zeroed, for run-to-run comparisons.
    pub fn without_timings(&self) -> Self {
        Self {
            transform_time: self.transform_time.map(|_| Duration::ZERO),
            pull_time: Duration::ZERO,
            ..self.clone()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EngineConfig {
    pub threshold: FullnessThreshold,
    pub precision: FrontierPrecision,
    pub workers: usize,
    pub slice_size: usize,
    pub max_iterations: usize,
}

impl Default for EngineConfig {
    /// Tuning used for CC and SSSP: 4 vectors per bit, 20% threshold.
    fn default() -> Self {
        Self {
            threshold: FullnessThreshold::default(),
            precision: FrontierPrecision::default(),
            workers: 1,
            slice_size: DEFAULT_SLICE_SIZE,
            max_iterations: 10_000,
        }
    }
}

impl EngineConfig {
    /// Tuning used for BFS: 8 vectors per bit, 1% threshold.
    pub fn bfs() -> Self {
        Self {
            threshold: FullnessThreshold::new(0.01).unwrap(),
            precision: FrontierPrecision::new(8).unwrap(),
            ..Self::default()
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_threshold(mut self, threshold: FullnessThreshold) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn with_precision(mut self, precision: FrontierPrecision) -> Self {
        self.precision = precision;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn with_slice_size(mut self, slice_size: usize) -> Self {
        self.slice_size = slice_size;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::InvalidConfig("workers must be at least 1".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig(
                "max_iterations must be at least 1".into(),
            ));
        }
        if self.slice_size == 0 {
            return Err(Error::InvalidConfig("slice_size must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Converged,
    /// Stopped at the iteration cap with a non-empty frontier.
    MaxIterations,
}

#[derive(Clone, Debug)]
pub struct RunResult<V> {
    pub values: Vec<V>,
    pub stats: Vec<IterationStats>,
    pub status: RunStatus,
}

impl<V> RunResult<V> {
    pub fn converged(&self) -> bool {
        self.status == RunStatus::Converged
    }

    pub fn iterations(&self) -> usize {
        self.stats.len()
    }
}

/// FNV-1a over the little-endian 64-bit encoding of each value.
pub fn value_digest<V: Copy + Into<u64>>(values: &[V]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    for &v in values {
        for b in v.into().to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(PRIME);
        }
    }
    h
}

pub(crate) fn check_weights<P: ApplicationProgram>(program: &P, weighted: bool) -> Result<()> {
    if program.requires_weights() && !weighted {
        Err(Error::MissingWeights)
    } else {
        Ok(())
    }
}

pub(crate) fn check_len(what: &'static str, got: usize, expected: usize) -> Result<()> {
    if got == expected {
        Ok(())
    } else {
        Err(Error::SizeMismatch {
            what,
            got,
            expected,
        })
    }
}

struct Partial {
    vectors_touched: u64,
    edges_processed: u64,
    out_size: usize,
    out_edges: u64,
}

/// Pulls over the given ascending vector positions, all of which lie in the
/// destination range `verts`. `next` holds exactly the slots of `verts`.
#[allow(clippy::too_many_arguments)]
fn pull_range<P, I>(
    topology: &PullTopology,
    program: &P,
    previous: &[P::Value],
    next: &mut [P::Value],
    verts: std::ops::Range<usize>,
    positions: I,
    out: &VertexFrontier,
    degrees: &OutDegrees,
) -> Partial
where
    P: ApplicationProgram,
    I: Iterator<Item = usize>,
{
    let mut writer = SlotWriter {
        program,
        previous,
        next,
        base: verts.start,
        cursor: verts.start,
        out,
        degrees,
        out_size: 0,
        out_edges: 0,
        #[cfg(debug_assertions)]
        writes: 0,
    };
    let mut vectors_touched = 0u64;
    let mut edges_processed = 0u64;
    let mut current: Option<usize> = None;
    let mut skip = false;
    let mut agg: Option<P::Message> = None;

    for p in positions {
        let vector = topology.vector(p);
        let d = vector.dst as usize;
        debug_assert!(verts.contains(&d));
        if current != Some(d) {
            if let Some(prev_d) = current {
                writer.finish(prev_d, agg.take());
            }
            current = Some(d);
            skip = !program.should_process(previous[d]);
        }
        if skip {
            continue;
        }
        vectors_touched += 1;
        for (src, weight) in vector.lanes() {
            let m = program.gather(previous[src as usize], weight);
            agg = Some(match agg {
                Some(a) => program.combine(a, m),
                None => m,
            });
            edges_processed += 1;
        }
    }
    if let Some(d) = current {
        writer.finish(d, agg.take());
    }
    writer.copy_forward(verts.end);
    #[cfg(debug_assertions)]
    assert_eq!(
        writer.writes,
        verts.len(),
        "each next slot is written exactly once"
    );

    Partial {
        vectors_touched,
        edges_processed,
        out_size: writer.out_size,
        out_edges: writer.out_edges,
    }
}

/// Writes `next` strictly in ascending vertex order.
struct SlotWriter<'a, P: ApplicationProgram> {
    program: &'a P,
    previous: &'a [P::Value],
    next: &'a mut [P::Value],
    base: usize,
    cursor: usize,
    out: &'a VertexFrontier,
    degrees: &'a OutDegrees,
    out_size: usize,
    out_edges: u64,
    #[cfg(debug_assertions)]
    writes: usize,
}

impl<P: ApplicationProgram> SlotWriter<'_, P> {
    /// Unchanged values for every vertex in `cursor..end`.
    fn copy_forward(&mut self, end: usize) {
        debug_assert!(end >= self.cursor);
        self.next[self.cursor - self.base..end - self.base]
            .copy_from_slice(&self.previous[self.cursor..end]);
        #[cfg(debug_assertions)]
        {
            self.writes += end - self.cursor;
        }
        self.cursor = end;
    }

    fn finish(&mut self, d: usize, agg: Option<P::Message>) {
        self.copy_forward(d);
        let (value, activate) = match agg {
            Some(m) => self.program.apply(self.previous[d], Some(m)),
            None => (self.previous[d], false),
        };
        self.next[d - self.base] = value;
        #[cfg(debug_assertions)]
        {
            self.writes += 1;
        }
        self.cursor = d + 1;
        if activate && self.out.mark(d as VertexId) {
            self.out_size += 1;
            self.out_edges += self.degrees.get(d as VertexId) as u64;
        }
    }
}

/// Runs `body` once per destination partition, in parallel when `workers > 1`.
fn for_each_partition<P, F>(
    topology: &PullTopology,
    buffers: &mut ValueBuffers<P::Value>,
    workers: usize,
    body: F,
) -> Partial
where
    P: ApplicationProgram,
    F: Fn(&[P::Value], &mut [P::Value], std::ops::Range<usize>, std::ops::Range<usize>) -> Partial
        + Sync,
{
    let pieces = topology.partition(workers);
    let (previous, next) = buffers.split();
    let mut chunks = Vec::with_capacity(pieces.len());
    let mut rest = next;
    for (verts, vecs) in pieces {
        let (head, tail) = rest.split_at_mut(verts.len());
        chunks.push((head, verts, vecs));
        rest = tail;
    }

    let partials: Vec<Partial> = if chunks.len() <= 1 {
        chunks
            .into_iter()
            .map(|(next, verts, vecs)| body(previous, next, verts, vecs))
            .collect()
    } else {
        let body = &body;
        std::thread::scope(|s| {
            let handles: Vec<_> = chunks
                .into_iter()
                .map(|(next, verts, vecs)| s.spawn(move || body(previous, next, verts, vecs)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("pull worker panicked"))
                .collect()
        })
    };

    partials.into_iter().fold(
        Partial {
            vectors_touched: 0,
            edges_processed: 0,
            out_size: 0,
            out_edges: 0,
        },
        |mut acc, p| {
            acc.vectors_touched += p.vectors_touched;
            acc.edges_processed += p.edges_processed;
            acc.out_size += p.out_size;
            acc.out_edges += p.out_edges;
            acc
        },
    )
}

fn check_pull_inputs<P: ApplicationProgram>(
    topology: &PullTopology,
    buffers: &ValueBuffers<P::Value>,
    program: &P,
    degrees: &OutDegrees,
    workers: usize,
) -> Result<()> {
    let n = topology.vertex_count();
    check_len("value buffers", buffers.len(), n)?;
    check_len("out-degree table", degrees.len(), n)?;
    check_weights(program, topology.is_weighted())?;
    if workers == 0 {
        return Err(Error::InvalidConfig("workers must be at least 1".into()));
    }
    Ok(())
}

/// One pull iteration over every edge vector, with no frontier.
pub fn run_iteration_full<P: ApplicationProgram>(
    topology: &PullTopology,
    buffers: &mut ValueBuffers<P::Value>,
    program: &P,
    degrees: &OutDegrees,
    workers: usize,
) -> Result<(VertexFrontier, PullStats)> {
    check_pull_inputs(topology, buffers, program, degrees, workers)?;
    let start = Instant::now();
    let out = VertexFrontier::new(topology.vertex_count());
    let partial =
        for_each_partition::<P, _>(topology, buffers, workers, |prev, next, verts, vecs| {
            pull_range(topology, program, prev, next, verts, vecs, &out, degrees)
        });
    out.credit_edges(partial.out_edges);
    Ok((
        out,
        PullStats {
            vectors_touched: partial.vectors_touched,
            edges_processed: partial.edges_processed,
            frontier_out_size: partial.out_size,
            pull_time: start.elapsed(),
        },
    ))
}

/// One pull iteration restricted to the vectors covered by `wedge`.
pub fn run_iteration_wedge<P: ApplicationProgram>(
    topology: &PullTopology,
    wedge: &WedgeFrontier,
    buffers: &mut ValueBuffers<P::Value>,
    program: &P,
    degrees: &OutDegrees,
    workers: usize,
) -> Result<(VertexFrontier, PullStats)> {
    check_pull_inputs(topology, buffers, program, degrees, workers)?;
    check_len(
        "wedge frontier",
        wedge.vector_count(),
        topology.vector_count(),
    )?;
    let start = Instant::now();
    let out = VertexFrontier::new(topology.vertex_count());
    let partial =
        for_each_partition::<P, _>(topology, buffers, workers, |prev, next, verts, vecs| {
            pull_range(
                topology,
                program,
                prev,
                next,
                verts,
                wedge.covered_in(vecs),
                &out,
                degrees,
            )
        });
    out.credit_edges(partial.out_edges);
    Ok((
        out,
        PullStats {
            vectors_touched: partial.vectors_touched,
            edges_processed: partial.edges_processed,
            frontier_out_size: partial.out_size,
            pull_time: start.elapsed(),
        },
    ))
}

/// Runs `program` until its frontier empties or the iteration cap is hit.
pub fn run_until_convergence<P: ApplicationProgram>(
    topology: &PullTopology,
    index: &EdgeIndex,
    program: &P,
    degrees: &OutDegrees,
    config: &EngineConfig,
) -> Result<RunResult<P::Value>> {
    run_with_observer(topology, index, program, degrees, config, |_, _, _| {})
}

/// As [`run_until_convergence`], calling `observe(stats, values, frontier)`
/// after every iteration with the freshly written values and the output
/// frontier.
pub fn run_with_observer<P, F>(
    topology: &PullTopology,
    index: &EdgeIndex,
    program: &P,
    degrees: &OutDegrees,
    config: &EngineConfig,
    mut observe: F,
) -> Result<RunResult<P::Value>>
where
    P: ApplicationProgram,
    F: FnMut(&IterationStats, &[P::Value], &VertexFrontier),
{
    config.validate()?;
    let n = topology.vertex_count();
    check_len("edge index", index.vertex_count(), n)?;
    check_len(
        "edge index vectors",
        index.vector_count(),
        topology.vector_count(),
    )?;
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
        if stats.len() == config.max_iterations {
            break RunStatus::MaxIterations;
        }
        let frontier_in_edges = frontier.edge_sum();
        let frontier_in_size = frontier.len();
        let (out, pull, mode, transform_time, covered, entries) =
            if should_transform(&frontier, total_edges, config.threshold) {
                let t0 = Instant::now();
                let transformed = transform_frontier(
                    &frontier,
                    index,
                    config.precision,
                    config.slice_size,
                    config.workers,
                )?;
                let transform_time = t0.elapsed();
                let (out, pull) = run_iteration_wedge(
                    topology,
                    &transformed.frontier,
                    &mut buffers,
                    program,
                    degrees,
                    config.workers,
                )?;
                (
                    out,
                    pull,
                    Mode::Wedge,
                    Some(transform_time),
                    Some(transformed.frontier.covered_vector_count() as u64),
                    Some(transformed.entries_visited),
                )
            } else {
                let (out, pull) =
                    run_iteration_full(topology, &mut buffers, program, degrees, config.workers)?;
                (out, pull, Mode::FullScan, None, None, None)
            };

        let row = IterationStats {
            iteration: stats.len() + 1,
            mode,
            transform_time,
            pull_time: pull.pull_time,
            frontier_in_size,
            frontier_in_edges,
            active_edge_fraction: if total_edges == 0 {
                0.0
            } else {
                frontier_in_edges as f64 / total_edges as f64
            },
            vectors_touched: pull.vectors_touched,
            covered_vectors: covered,
            transform_entries: entries,
            edges_processed: pull.edges_processed,
            frontier_out_size: pull.frontier_out_size,
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
