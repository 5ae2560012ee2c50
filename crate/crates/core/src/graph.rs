//! Immutable graph representations.
//!
//! The pull topology groups in-edges by destination and packs them into
//! fixed-width edge vectors. Every vector carries its destination id, so a
//! traversal over vectors alone recovers both endpoints of each edge. The
//! edge index maps every source vertex to the vector positions holding its
//! out-edges; it is what the frontier transformation reads.

use crate::error::{Error, Result};

pub type VertexId = u32;
pub type Weight = u32;

/// Padding marker for unused vector lanes.
pub const INVALID_LANE: VertexId = VertexId::MAX;

/// Widest supported edge vector (valid masks are carried in a `u64`).
pub const MAX_VECTOR_WIDTH: usize = 64;

pub const DEFAULT_VECTOR_WIDTH: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub src: VertexId,
    pub dst: VertexId,
    pub weight: Option<Weight>,
}

impl Edge {
    pub fn new(src: VertexId, dst: VertexId) -> Self {
        Self {
            src,
            dst,
            weight: None,
        }
    }

    pub fn weighted(src: VertexId, dst: VertexId, weight: Weight) -> Self {
        Self {
            src,
            dst,
            weight: Some(weight),
        }
    }
}

/// A validated edge list over a dense vertex range `0..vertex_count`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeList {
    vertex_count: usize,
    edges: Vec<Edge>,
}

impl EdgeList {
    pub fn new(vertex_count: usize, edges: Vec<Edge>) -> Result<Self> {
        if vertex_count > INVALID_LANE as usize {
            return Err(Error::VertexOutOfRange {
                vertex: vertex_count as u64,
                vertex_count: INVALID_LANE as usize,
            });
        }
        let weighted = edges.first().map(|e| e.weight.is_some());
        for e in &edges {
            for v in [e.src, e.dst] {
                if v as usize >= vertex_count {
                    return Err(Error::VertexOutOfRange {
                        vertex: v as u64,
                        vertex_count,
                    });
                }
            }
            if Some(e.weight.is_some()) != weighted {
                return Err(Error::MixedWeights);
            }
            if e.weight == Some(0) {
                return Err(Error::ZeroWeight);
            }
        }
        Ok(Self {
            vertex_count,
            edges,
        })
    }

    pub fn from_pairs(vertex_count: usize, pairs: &[(VertexId, VertexId)]) -> Result<Self> {
        Self::new(
            vertex_count,
            pairs.iter().map(|&(s, d)| Edge::new(s, d)).collect(),
        )
    }

    pub fn from_weighted(
        vertex_count: usize,
        triples: &[(VertexId, VertexId, Weight)],
    ) -> Result<Self> {
        Self::new(
            vertex_count,
            triples
                .iter()
                .map(|&(s, d, w)| Edge::weighted(s, d, w))
                .collect(),
        )
    }

    /// Caller guarantees the invariants `new` checks.
    pub(crate) fn from_parts_unchecked(vertex_count: usize, edges: Vec<Edge>) -> Self {
        debug_assert!(Self::new(vertex_count, edges.clone()).is_ok());
        Self {
            vertex_count,
            edges,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// True when the edges carry weights. An empty list counts as unweighted.
    pub fn is_weighted(&self) -> bool {
        self.edges.first().is_some_and(|e| e.weight.is_some())
    }

    pub fn into_edges(self) -> Vec<Edge> {
        self.edges
    }
}

/// Borrowed view of one edge vector.
#[derive(Clone, Copy, Debug)]
pub struct EdgeVector<'a> {
    pub dst: VertexId,
    srcs: &'a [VertexId],
    weights: Option<&'a [Weight]>,
}

impl<'a> EdgeVector<'a> {
    pub fn width(&self) -> usize {
        self.srcs.len()
    }

    /// Valid lanes are packed at the front of the vector.
    pub fn valid_count(&self) -> usize {
        self.srcs
            .iter()
            .position(|&s| s == INVALID_LANE)
            .unwrap_or(self.srcs.len())
    }

    pub fn valid_mask(&self) -> u64 {
        let n = self.valid_count();
        if n == 64 {
            u64::MAX
        } else {
            (1u64 << n) - 1
        }
    }

    /// `None` marks a padding lane.
    pub fn lane(&self, i: usize) -> Option<(VertexId, Option<Weight>)> {
        let src = self.srcs[i];
        (src != INVALID_LANE).then(|| (src, self.weights.map(|w| w[i])))
    }

    pub fn lanes(&self) -> impl Iterator<Item = (VertexId, Option<Weight>)> + 'a {
        let srcs = self.srcs;
        let weights = self.weights;
        srcs.iter()
            .take_while(|&&s| s != INVALID_LANE)
            .enumerate()
            .map(move |(i, &s)| (s, weights.map(|w| w[i])))
    }
}

/// Destination-grouped, vector-packed in-edge structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PullTopology {
    vertex_count: usize,
    width: usize,
    edge_count: usize,
    dsts: Vec<VertexId>,
    srcs: Vec<VertexId>,
    weights: Option<Vec<Weight>>,
    // first vector of each destination; used to partition work, never to traverse
    vertex_offsets: Vec<usize>,
}

impl PullTopology {
    pub fn build(edges: &EdgeList, vector_width: usize) -> Result<Self> {
        if vector_width == 0 || !vector_width.is_power_of_two() || vector_width > MAX_VECTOR_WIDTH {
            return Err(Error::InvalidVectorWidth {
                got: vector_width,
                max: MAX_VECTOR_WIDTH,
            });
        }
        let n = edges.vertex_count();
        let mut sorted: Vec<Edge> = edges.edges().to_vec();
        sorted.sort_unstable_by_key(|e| (e.dst, e.src, e.weight));

        let weighted = edges.is_weighted();
        let mut dsts = Vec::new();
        let mut srcs = Vec::new();
        let mut weights = weighted.then(Vec::new);
        let mut vertex_offsets = vec![0usize; n + 1];

        for group in sorted.chunk_by(|a, b| a.dst == b.dst) {
            let dst = group[0].dst;
            vertex_offsets[dst as usize + 1] = group.len().div_ceil(vector_width);
            for chunk in group.chunks(vector_width) {
                dsts.push(dst);
                for lane in 0..vector_width {
                    match chunk.get(lane) {
                        Some(e) => {
                            srcs.push(e.src);
                            if let Some(w) = weights.as_mut() {
                                w.push(e.weight.unwrap_or(0));
                            }
                        }
                        None => {
                            srcs.push(INVALID_LANE);
                            if let Some(w) = weights.as_mut() {
                                w.push(0);
                            }
                        }
                    }
                }
            }
        }
        for v in 0..n {
            vertex_offsets[v + 1] += vertex_offsets[v];
        }
        if dsts.len() > u32::MAX as usize {
            return Err(Error::InvalidConfig(
                "too many edge vectors for 32-bit positions".into(),
            ));
        }

        Ok(Self {
            vertex_count: n,
            width: vector_width,
            edge_count: sorted.len(),
            dsts,
            srcs,
            weights,
            vertex_offsets,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn vector_width(&self) -> usize {
        self.width
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn vector_count(&self) -> usize {
        self.dsts.len()
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    pub fn vector(&self, i: usize) -> EdgeVector<'_> {
        let lanes = i * self.width..(i + 1) * self.width;
        EdgeVector {
            dst: self.dsts[i],
            srcs: &self.srcs[lanes.clone()],
            weights: self.weights.as_deref().map(|w| &w[lanes]),
        }
    }

    pub fn vectors(&self) -> impl Iterator<Item = EdgeVector<'_>> + '_ {
        (0..self.vector_count()).map(move |i| self.vector(i))
    }

    /// Range of vector positions whose destination is `v`.
    pub fn vectors_of(&self, v: VertexId) -> std::ops::Range<usize> {
        self.vertex_offsets[v as usize]..self.vertex_offsets[v as usize + 1]
    }

    /// All `(src, dst, weight)` edges in topology order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.vectors().flat_map(|v| {
            let dst = v.dst;
            v.lanes()
                .map(move |(src, weight)| Edge { src, dst, weight })
        })
    }

    /// Splits the vertex range into at most `parts` contiguous pieces with
    /// roughly equal vector counts. Returns `(vertices, vectors)` per piece;
    /// no destination straddles two pieces.
    pub fn partition(&self, parts: usize) -> Vec<(std::ops::Range<usize>, std::ops::Range<usize>)> {
        let n = self.vertex_count;
        let total = self.vector_count();
        let parts = parts.max(1);
        let mut out = Vec::with_capacity(parts);
        let mut lo = 0usize;
        for k in 1..=parts {
            let hi = if k == parts {
                n
            } else {
                let target = total * k / parts;
                // first vertex whose vectors start at or after target
                self.vertex_offsets[..n]
                    .partition_point(|&off| off < target)
                    .max(lo)
            };
            if hi > lo || (k == parts && out.is_empty()) {
                out.push((lo..hi, self.vertex_offsets[lo]..self.vertex_offsets[hi]));
            }
            lo = hi;
        }
        out
    }
}

/// Source-grouped CSR over out-edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PushTopology {
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
    weights: Option<Vec<Weight>>,
}

impl PushTopology {
    pub fn build(edges: &EdgeList) -> Self {
        let n = edges.vertex_count();
        let mut sorted: Vec<Edge> = edges.edges().to_vec();
        sorted.sort_unstable_by_key(|e| (e.src, e.dst, e.weight));
        let mut offsets = vec![0usize; n + 1];
        for e in &sorted {
            offsets[e.src as usize + 1] += 1;
        }
        for v in 0..n {
            offsets[v + 1] += offsets[v];
        }
        let weights = edges
            .is_weighted()
            .then(|| sorted.iter().map(|e| e.weight.unwrap_or(0)).collect());
        Self {
            offsets,
            targets: sorted.iter().map(|e| e.dst).collect(),
            weights,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn targets(&self) -> &[VertexId] {
        &self.targets
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    pub fn out_edges(&self, v: VertexId) -> impl Iterator<Item = (VertexId, Option<Weight>)> + '_ {
        let range = self.offsets[v as usize]..self.offsets[v as usize + 1];
        let weights = self.weights.as_deref();
        range.map(move |i| (self.targets[i], weights.map(|w| w[i])))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutDegrees(Vec<u32>);

impl OutDegrees {
    pub fn compute(edges: &EdgeList) -> Self {
        let mut degrees = vec![0u32; edges.vertex_count()];
        for e in edges.edges() {
            degrees[e.src as usize] += 1;
        }
        Self(degrees)
    }

    pub fn get(&self, v: VertexId) -> u32 {
        self.0[v as usize]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&d| d as u64).sum()
    }
}

/// Per-source lists of vector positions in a [`PullTopology`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeIndex {
    offsets: Vec<usize>,
    positions: Vec<u32>,
    vector_count: usize,
}

impl EdgeIndex {
    pub fn build(topology: &PullTopology) -> Self {
        let n = topology.vertex_count();
        let mut counts = vec![0usize; n + 1];
        // count with per-source dedup of repeated positions
        let mut last_seen = vec![u32::MAX; n];
        for (p, vector) in topology.vectors().enumerate() {
            for (src, _) in vector.lanes() {
                if last_seen[src as usize] != p as u32 {
                    last_seen[src as usize] = p as u32;
                    counts[src as usize + 1] += 1;
                }
            }
        }
        for v in 0..n {
            counts[v + 1] += counts[v];
        }
        let offsets = counts;
        let mut cursor = offsets.clone();
        let mut positions = vec![0u32; offsets[n]];
        last_seen.fill(u32::MAX);
        for (p, vector) in topology.vectors().enumerate() {
            for (src, _) in vector.lanes() {
                let s = src as usize;
                if last_seen[s] != p as u32 {
                    last_seen[s] = p as u32;
                    positions[cursor[s]] = p as u32;
                    cursor[s] += 1;
                }
            }
        }
        Self {
            offsets,
            positions,
            vector_count: topology.vector_count(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Vector count of the topology this index was built from.
    pub fn vector_count(&self) -> usize {
        self.vector_count
    }

    pub fn positions_of(&self, v: VertexId) -> &[u32] {
        &self.positions[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn positions(&self) -> &[u32] {
        &self.positions
    }
}

/// Everything the engines need, built once from an edge list.
#[derive(Clone, Debug)]
pub struct Graph {
    pub pull: PullTopology,
    pub push: PushTopology,
    pub degrees: OutDegrees,
    pub index: EdgeIndex,
}

impl Graph {
    pub fn build(edges: &EdgeList, vector_width: usize) -> Result<Self> {
        let pull = PullTopology::build(edges, vector_width)?;
        let index = EdgeIndex::build(&pull);
        Ok(Self {
            push: PushTopology::build(edges),
            degrees: OutDegrees::compute(edges),
            pull,
            index,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.pull.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.pull.edge_count()
    }
}
