//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wedge_core::{Edge, EdgeList, VertexId};

/// Random graph with up to `max_v` vertices and `max_e` edges.
pub fn random_graph(seed: u64, max_v: usize, max_e: usize, weighted: bool) -> EdgeList {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_v);
    let m = rng.gen_range(0..=max_e);
    let edges = (0..m)
        .map(|_| Edge {
            src: rng.gen_range(0..n as u32),
            dst: rng.gen_range(0..n as u32),
            weight: weighted.then(|| rng.gen_range(1..=20)),
        })
        .collect();
    EdgeList::new(n, edges).unwrap()
}

pub fn random_subset(seed: u64, n: usize) -> Vec<VertexId> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let p: f64 = rng.gen();
    (0..n as VertexId).filter(|_| rng.gen_bool(p)).collect()
}

pub fn bfs_depths(edges: &EdgeList, root: VertexId) -> Vec<Option<u32>> {
    let n = edges.vertex_count();
    let mut adj = vec![Vec::new(); n];
    for e in edges.edges() {
        adj[e.src as usize].push(e.dst);
    }
    let mut depth = vec![None; n];
    depth[root as usize] = Some(0);
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        let d = depth[v as usize].unwrap();
        for &w in &adj[v as usize] {
            if depth[w as usize].is_none() {
                depth[w as usize] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    depth
}

/// Minimum vertex id of each weakly connected component.
pub fn component_min_labels(edges: &EdgeList) -> Vec<u32> {
    let n = edges.vertex_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for e in edges.edges() {
        let a = find(&mut parent, e.src as usize);
        let b = find(&mut parent, e.dst as usize);
        // keep the smaller id as root so the root is the component minimum
        if a < b {
            parent[b] = a;
        } else {
            parent[a] = b;
        }
    }
    (0..n).map(|v| find(&mut parent, v) as u32).collect()
}

pub fn dijkstra(edges: &EdgeList, root: VertexId) -> Vec<Option<u64>> {
    let n = edges.vertex_count();
    let mut adj = vec![Vec::new(); n];
    for e in edges.edges() {
        adj[e.src as usize].push((e.dst, e.weight.unwrap() as u64));
    }
    let mut dist = vec![None; n];
    let mut heap = BinaryHeap::from([Reverse((0u64, root))]);
    while let Some(Reverse((d, v))) = heap.pop() {
        if dist[v as usize].is_some() {
            continue;
        }
        dist[v as usize] = Some(d);
        for &(w, wt) in &adj[v as usize] {
            if dist[w as usize].is_none() {
                heap.push(Reverse((d + wt, w)));
            }
        }
    }
    dist
}

/// Edges (by topology lane identity) covered by a set of vector positions.
pub fn covered_lanes(
    topology: &wedge_core::PullTopology,
    positions: impl IntoIterator<Item = usize>,
) -> BTreeSet<(usize, usize)> {
    positions
        .into_iter()
        .flat_map(|p| (0..topology.vector(p).valid_count()).map(move |l| (p, l)))
        .collect()
}

/// Lanes whose source is in `frontier`, by brute-force scan.
pub fn active_lanes(
    topology: &wedge_core::PullTopology,
    frontier: &BTreeSet<VertexId>,
) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for p in 0..topology.vector_count() {
        let v = topology.vector(p);
        for (l, (src, _)) in v.lanes().enumerate() {
            if frontier.contains(&src) {
                out.insert((p, l));
            }
        }
    }
    out
}
