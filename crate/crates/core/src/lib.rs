//! Pull-only shared-memory graph processing with an edge-group frontier.
//!
//! A pull engine consumes a destination-oriented frontier whose bits mark
//! groups of edge vectors in the in-edge topology. That frontier is produced
//! from the ordinary source-oriented vertex frontier by a parallel
//! transformation step, run only when the vertex frontier is sparse enough.
//! A push-based reference engine is included as a correctness oracle.

pub mod apps;
pub mod bitmask;
pub mod engine;
pub mod error;
pub mod frontier;
pub mod graph;
pub mod io;
pub mod push_ref;

pub use apps::{
    bfs_program, cc_program, sssp_program, Bfs, ConnectedComponents, Depth, Dist, Label, Sssp,
};
pub use engine::{
    run_iteration_full, run_iteration_wedge, run_until_convergence, run_with_observer,
    value_digest, ApplicationProgram, EngineConfig, IterationStats, Mode, PullStats, RunResult,
    RunStatus, ValueBuffers,
};
pub use error::{Error, ParseError, Result};
pub use frontier::{
    should_transform, transform_frontier, wedge_covered_vectors, FrontierPrecision,
    FullnessThreshold, Transformed, VertexFrontier, WedgeFrontier,
};
pub use graph::{
    Edge, EdgeIndex, EdgeList, EdgeVector, Graph, OutDegrees, PullTopology, PushTopology, VertexId,
    Weight,
};
pub use push_ref::{run_iteration_push, run_until_convergence_push, PushIterationStats};
