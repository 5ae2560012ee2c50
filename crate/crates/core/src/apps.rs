//! BFS, connected components, and single-source shortest paths as
//! [`ApplicationProgram`]s.

use crate::engine::ApplicationProgram;
use crate::error::{Error, Result};
use crate::graph::{VertexId, Weight};
use crate::push_ref::MinMessage;

/// BFS depth; `UNVISITED` until reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Depth(pub u32);

impl Depth {
    pub const UNVISITED: Depth = Depth(u32::MAX);

    pub fn is_visited(self) -> bool {
        self != Self::UNVISITED
    }
}

impl From<Depth> for u64 {
    fn from(d: Depth) -> u64 {
        d.0 as u64
    }
}

/// Component label: the smallest vertex id seen so far.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(pub VertexId);

impl From<Label> for u64 {
    fn from(l: Label) -> u64 {
        l.0 as u64
    }
}

/// Shortest-path distance; `INF` until reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dist(pub u64);

impl Dist {
    pub const INF: Dist = Dist(u64::MAX);
}

impl From<Dist> for u64 {
    fn from(d: Dist) -> u64 {
        d.0
    }
}

fn check_root(root: VertexId, vertex_count: usize) -> Result<()> {
    if (root as usize) < vertex_count {
        Ok(())
    } else {
        Err(Error::VertexOutOfRange {
            vertex: root as u64,
            vertex_count,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bfs {
    root: VertexId,
}

pub fn bfs_program(root: VertexId, vertex_count: usize) -> Result<Bfs> {
    check_root(root, vertex_count)?;
    Ok(Bfs { root })
}

impl ApplicationProgram for Bfs {
    type Value = Depth;
    /// Source depth; `u32::MAX` carries no information.
    type Message = u32;

    fn initial_value(&self, v: VertexId) -> Depth {
        if v == self.root {
            Depth(0)
        } else {
            Depth::UNVISITED
        }
    }

    fn initial_frontier(&self, _vertex_count: usize) -> Vec<VertexId> {
        vec![self.root]
    }

    fn should_process(&self, dst: Depth) -> bool {
        !dst.is_visited()
    }

    fn gather(&self, src: Depth, _weight: Option<Weight>) -> u32 {
        src.0
    }

    fn combine(&self, a: u32, b: u32) -> u32 {
        a.min(b)
    }

    fn apply(&self, old: Depth, agg: Option<u32>) -> (Depth, bool) {
        match agg {
            Some(m) if m != u32::MAX && !old.is_visited() => (Depth(m + 1), true),
            _ => (old, false),
        }
    }
}

impl MinMessage for Bfs {
    fn encode(m: u32) -> u64 {
        m as u64
    }

    fn decode(word: u64) -> u32 {
        word as u32
    }
}

/// Min-label propagation. Expects a symmetrized edge list.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConnectedComponents;

pub fn cc_program() -> ConnectedComponents {
    ConnectedComponents
}

impl ApplicationProgram for ConnectedComponents {
    type Value = Label;
    type Message = VertexId;

    fn initial_value(&self, v: VertexId) -> Label {
        Label(v)
    }

    fn initial_frontier(&self, vertex_count: usize) -> Vec<VertexId> {
        (0..vertex_count as VertexId).collect()
    }

    fn gather(&self, src: Label, _weight: Option<Weight>) -> VertexId {
        src.0
    }

    fn combine(&self, a: VertexId, b: VertexId) -> VertexId {
        a.min(b)
    }

    fn apply(&self, old: Label, agg: Option<VertexId>) -> (Label, bool) {
        match agg {
            Some(m) if m < old.0 => (Label(m), true),
            _ => (old, false),
        }
    }
}

impl MinMessage for ConnectedComponents {
    fn encode(m: VertexId) -> u64 {
        m as u64
    }

    fn decode(word: u64) -> VertexId {
        word as VertexId
    }
}

/// Bellman-Ford relaxation; vertices may re-enter the frontier any number
/// of times.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sssp {
    root: VertexId,
}

pub fn sssp_program(root: VertexId, vertex_count: usize) -> Result<Sssp> {
    check_root(root, vertex_count)?;
    Ok(Sssp { root })
}

// Keeps candidate distances clear of the push engine's "no message" word.
const DIST_CAP: u64 = u64::MAX - 1;

impl ApplicationProgram for Sssp {
    type Value = Dist;
    type Message = u64;

    fn initial_value(&self, v: VertexId) -> Dist {
        if v == self.root {
            Dist(0)
        } else {
            Dist::INF
        }
    }

    fn initial_frontier(&self, _vertex_count: usize) -> Vec<VertexId> {
        vec![self.root]
    }

    fn gather(&self, src: Dist, weight: Option<Weight>) -> u64 {
        if src == Dist::INF {
            return DIST_CAP;
        }
        let w = weight.expect("weights are checked before an SSSP run") as u64;
        src.0.saturating_add(w).min(DIST_CAP)
    }

    fn combine(&self, a: u64, b: u64) -> u64 {
        a.min(b)
    }

    fn apply(&self, old: Dist, agg: Option<u64>) -> (Dist, bool) {
        match agg {
            Some(m) if m < old.0 && m != DIST_CAP => (Dist(m), true),
            _ => (old, false),
        }
    }

    fn requires_weights(&self) -> bool {
        true
    }
}

impl MinMessage for Sssp {
    fn encode(m: u64) -> u64 {
        m
    }

    fn decode(word: u64) -> u64 {
        word
    }
}
