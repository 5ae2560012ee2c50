//! Vertex frontier, Wedge Frontier, and the transformation between them.
//!
//! The vertex frontier is what the pull engine produces: one bit per source
//! vertex whose value changed. The Wedge Frontier is what the pull engine
//! consumes: one bit per group of contiguous edge vectors in the pull
//! topology. Transforming one into the other walks the edge index for every
//! member vertex and sets the group bit of each listed vector position.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use crate::bitmask::AtomicBitmask;
use crate::error::{Error, Result};
use crate::graph::{EdgeIndex, OutDegrees, VertexId};

pub const DEFAULT_SLICE_SIZE: usize = 4096;

/// Source-oriented vertex frontier with a running out-degree sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexFrontier {
    bits: AtomicBitmask,
    edge_sum: AtomicU64Eq,
}

impl VertexFrontier {
    pub fn new(vertex_count: usize) -> Self {
        Self {
            bits: AtomicBitmask::new(vertex_count),
            edge_sum: AtomicU64Eq(AtomicU64::new(0)),
        }
    }

    pub fn from_vertices(
        vertex_count: usize,
        vertices: impl IntoIterator<Item = VertexId>,
        degrees: &OutDegrees,
    ) -> Result<Self> {
        let f = Self::new(vertex_count);
        for v in vertices {
            f.insert(v, degrees)?;
        }
        Ok(f)
    }

    pub fn vertex_count(&self) -> usize {
        self.bits.len()
    }

    /// Safe to call concurrently. Returns true if `v` was newly inserted.
    pub fn insert(&self, v: VertexId, degrees: &OutDegrees) -> Result<bool> {
        if v as usize >= self.bits.len() {
            return Err(Error::VertexOutOfRange {
                vertex: v as u64,
                vertex_count: self.bits.len(),
            });
        }
        let fresh = self.bits.set(v as usize);
        if fresh {
            self.edge_sum
                .0
                .fetch_add(degrees.get(v) as u64, Ordering::Relaxed);
        }
        Ok(fresh)
    }

    /// Sets the bit without touching the edge sum; the caller credits the
    /// degrees of newly marked vertices in bulk via `credit_edges`.
    #[inline]
    pub(crate) fn mark(&self, v: VertexId) -> bool {
        self.bits.set(v as usize)
    }

    pub(crate) fn credit_edges(&self, edges: u64) {
        self.edge_sum.0.fetch_add(edges, Ordering::Relaxed);
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.bits.get(v as usize)
    }

    /// Sum of out-degrees over members.
    pub fn edge_sum(&self) -> u64 {
        self.edge_sum.0.load(Ordering::Relaxed)
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.none()
    }

    pub fn members(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.bits.ones().map(|v| v as VertexId)
    }

    pub fn bits(&self) -> &AtomicBitmask {
        &self.bits
    }

    /// Recomputes the out-degree sum from scratch.
    pub fn recount(&self, degrees: &OutDegrees) -> u64 {
        self.members().map(|v| degrees.get(v) as u64).sum()
    }
}

#[derive(Debug)]
struct AtomicU64Eq(AtomicU64);

impl Clone for AtomicU64Eq {
    fn clone(&self) -> Self {
        Self(AtomicU64::new(self.0.load(Ordering::Relaxed)))
    }
}

impl PartialEq for AtomicU64Eq {
    fn eq(&self, other: &Self) -> bool {
        self.0.load(Ordering::Relaxed) == other.0.load(Ordering::Relaxed)
    }
}

impl Eq for AtomicU64Eq {}

/// Number of edge vectors represented by one Wedge Frontier bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FrontierPrecision(u32);

impl FrontierPrecision {
    pub const ALL: [usize; 5] = [1, 2, 4, 8, 16];

    pub fn new(vectors_per_group: usize) -> Result<Self> {
        if Self::ALL.contains(&vectors_per_group) {
            Ok(Self(vectors_per_group as u32))
        } else {
            Err(Error::InvalidPrecision(vectors_per_group))
        }
    }

    pub fn vectors_per_group(self) -> usize {
        self.0 as usize
    }

    pub fn shift(self) -> u32 {
        self.0.trailing_zeros()
    }

    #[inline]
    pub fn group_of(self, position: usize) -> usize {
        position >> self.shift()
    }

    pub fn group_count(self, vector_count: usize) -> usize {
        vector_count.div_ceil(self.vectors_per_group())
    }
}

impl Default for FrontierPrecision {
    fn default() -> Self {
        Self(4)
    }
}

/// Fraction of total edges below which the frontier is transformed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FullnessThreshold(f64);

impl FullnessThreshold {
    pub fn new(fraction: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&fraction) {
            Ok(Self(fraction))
        } else {
            Err(Error::InvalidThreshold(fraction))
        }
    }

    pub fn fraction(self) -> f64 {
        self.0
    }
}

impl Default for FullnessThreshold {
    fn default() -> Self {
        Self(0.20)
    }
}

/// True when the frontier's out-edges are strictly fewer than
/// `threshold * total_edges`. Ties go to the full scan. A graph with no
/// edges never transforms.
pub fn should_transform(
    frontier: &VertexFrontier,
    total_edges: u64,
    threshold: FullnessThreshold,
) -> bool {
    edge_sum_below_threshold(frontier.edge_sum(), total_edges, threshold)
}

/// The decision predicate on a bare edge sum, for replaying recorded runs.
pub fn edge_sum_below_threshold(
    edge_sum: u64,
    total_edges: u64,
    threshold: FullnessThreshold,
) -> bool {
    total_edges > 0 && (edge_sum as f64) < threshold.fraction() * total_edges as f64
}

/// Destination-oriented frontier over groups of edge vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WedgeFrontier {
    bits: AtomicBitmask,
    precision: FrontierPrecision,
    vector_count: usize,
}

impl WedgeFrontier {
    pub fn new(vector_count: usize, precision: FrontierPrecision) -> Self {
        Self {
            bits: AtomicBitmask::new(precision.group_count(vector_count)),
            precision,
            vector_count,
        }
    }

    pub fn precision(&self) -> FrontierPrecision {
        self.precision
    }

    pub fn vector_count(&self) -> usize {
        self.vector_count
    }

    pub fn group_count(&self) -> usize {
        self.bits.len()
    }

    pub fn set_group(&self, group: usize) -> bool {
        self.bits.set(group)
    }

    #[inline]
    pub fn set_position(&self, position: usize) -> bool {
        self.bits.set(self.precision.group_of(position))
    }

    pub fn is_group_set(&self, group: usize) -> bool {
        self.bits.get(group)
    }

    pub fn covers(&self, position: usize) -> bool {
        position < self.vector_count && self.bits.get(self.precision.group_of(position))
    }

    pub fn set_groups(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn set_bit_count(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.none()
    }

    pub fn bits(&self) -> &AtomicBitmask {
        &self.bits
    }

    /// Covered vector positions, ascending.
    pub fn covered_vectors(&self) -> CoveredVectors<'_> {
        self.covered_in(0..self.vector_count)
    }

    /// Covered vector positions within `range`, ascending.
    pub fn covered_in(&self, range: std::ops::Range<usize>) -> CoveredVectors<'_> {
        let end = range.end.min(self.vector_count);
        let start = range.start.min(end);
        let vpg = self.precision.vectors_per_group();
        let groups = if start < end {
            self.precision.group_of(start)..self.precision.group_of(end - 1) + 1
        } else {
            0..0
        };
        CoveredVectors {
            groups: self.bits.ones_in(groups),
            current: 0..0,
            vpg,
            start,
            end,
        }
    }

    pub fn covered_vector_count(&self) -> usize {
        let vpg = self.precision.vectors_per_group();
        self.set_groups()
            .map(|g| ((g + 1) * vpg).min(self.vector_count) - g * vpg)
            .sum()
    }
}

pub struct CoveredVectors<'a> {
    groups: crate::bitmask::Ones<'a>,
    current: std::ops::Range<usize>,
    vpg: usize,
    start: usize,
    end: usize,
}

impl Iterator for CoveredVectors<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if let Some(p) = self.current.next() {
                return Some(p);
            }
            let g = self.groups.next()?;
            self.current = (g * self.vpg).max(self.start)..((g + 1) * self.vpg).min(self.end);
        }
    }
}

/// Vector positions covered by `frontier`, clipped to `vector_count`.
pub fn wedge_covered_vectors(frontier: &WedgeFrontier, vector_count: usize) -> CoveredVectors<'_> {
    frontier.covered_in(0..vector_count)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transformed {
    pub frontier: WedgeFrontier,
    /// Edge-index entries read while transforming.
    pub entries_visited: u64,
}

/// Builds the Wedge Frontier for `frontier`.
///
/// The vertex range is cut into `slice_size`-vertex slices which `workers`
/// threads claim dynamically. The result does not depend on `workers` or
/// `slice_size`.
pub fn transform_frontier(
    frontier: &VertexFrontier,
    index: &EdgeIndex,
    precision: FrontierPrecision,
    slice_size: usize,
    workers: usize,
) -> Result<Transformed> {
    if frontier.vertex_count() != index.vertex_count() {
        return Err(Error::SizeMismatch {
            what: "vertex frontier",
            got: frontier.vertex_count(),
            expected: index.vertex_count(),
        });
    }
    if slice_size == 0 || workers == 0 {
        return Err(Error::InvalidConfig(
            "slice size and worker count must be at least 1".into(),
        ));
    }
    let wedge = WedgeFrontier::new(index.vector_count(), precision);
    let n = frontier.vertex_count();
    let slice_count = n.div_ceil(slice_size);
    let next_slice = AtomicUsize::new(0);
    let visited = AtomicU64::new(0);

    let run = || {
        let mut local = 0u64;
        loop {
            let s = next_slice.fetch_add(1, Ordering::Relaxed);
            if s >= slice_count {
                break;
            }
            let lo = s * slice_size;
            let hi = (lo + slice_size).min(n);
            for v in frontier.bits().ones_in(lo..hi) {
                let positions = index.positions_of(v as VertexId);
                local += positions.len() as u64;
                for &p in positions {
                    wedge.set_position(p as usize);
                }
            }
        }
        visited.fetch_add(local, Ordering::Relaxed);
    };

    let threads = workers.min(slice_count);
    if threads <= 1 {
        run();
    } else {
        std::thread::scope(|s| {
            for _ in 1..threads {
                s.spawn(run);
            }
            run();
        });
    }

    Ok(Transformed {
        frontier: wedge,
        entries_visited: visited.into_inner(),
    })
}
