//! Edge-list text format, synthetic generators, and edge-list transforms.
//!
//! The text format has one edge per line, `src dst` or `src dst weight`,
//! whitespace separated. Lines starting with `#` or `%` are comments, except
//! that `# vertices N` fixes the vertex count; otherwise it is one more than
//! the largest id.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, ParseError, Result};
use crate::graph::{Edge, EdgeList, VertexId, Weight, INVALID_LANE};

pub fn parse_edge_list(text: &str) -> std::result::Result<EdgeList, ParseError> {
    let mut edges = Vec::new();
    let mut declared: Option<(usize, usize)> = None;
    let mut weighted: Option<bool> = None;
    let mut max_id: Option<VertexId> = None;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let mut tokens = comment.split_whitespace();
            if tokens.next() == Some("vertices") {
                let n = tokens
                    .next()
                    .and_then(|t| t.parse::<usize>().ok())
                    .filter(|_| tokens.next().is_none())
                    .ok_or_else(|| ParseError::new(line_no, "malformed vertices header"))?;
                declared = Some((n, line_no));
            }
            continue;
        }
        if line.starts_with('%') {
            continue;
        }

        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 && tokens.len() != 3 {
            return Err(ParseError::new(
                line_no,
                format!("expected 2 or 3 fields, found {}", tokens.len()),
            ));
        }
        let src = parse_id(tokens[0], line_no)?;
        let dst = parse_id(tokens[1], line_no)?;
        let weight = match tokens.get(2) {
            Some(t) => {
                let w = parse_number::<u64>(t, line_no, "weight")?;
                if w == 0 || w > Weight::MAX as u64 {
                    return Err(ParseError::new(
                        line_no,
                        format!("weight {w} out of range 1..={}", Weight::MAX),
                    ));
                }
                Some(w as Weight)
            }
            None => None,
        };
        match weighted {
            None => weighted = Some(weight.is_some()),
            Some(w) if w != weight.is_some() => {
                return Err(ParseError::new(
                    line_no,
                    "mixed weighted and unweighted edges",
                ))
            }
            _ => {}
        }
        max_id = Some(max_id.map_or(src.max(dst), |m| m.max(src).max(dst)));
        edges.push(Edge { src, dst, weight });
    }

    let inferred = max_id.map_or(0, |m| m as usize + 1);
    let vertex_count = match declared {
        Some((n, line)) if n < inferred => {
            return Err(ParseError::new(
                line,
                format!(
                    "header declares {n} vertices but ids reach {}",
                    inferred - 1
                ),
            ))
        }
        Some((n, _)) => n,
        None => inferred,
    };
    EdgeList::new(vertex_count, edges).map_err(|e| ParseError::new(0, e.to_string()))
}

fn parse_number<T: FromStr>(
    token: &str,
    line: usize,
    what: &str,
) -> std::result::Result<T, ParseError> {
    if token.starts_with('-') {
        return Err(ParseError::new(line, format!("negative {what} {token:?}")));
    }
    token
        .parse::<T>()
        .map_err(|_| ParseError::new(line, format!("malformed {what} {token:?}")))
}

fn parse_id(token: &str, line: usize) -> std::result::Result<VertexId, ParseError> {
    let id = parse_number::<u64>(token, line, "vertex id")?;
    if id >= INVALID_LANE as u64 {
        return Err(ParseError::new(line, format!("vertex id {id} too large")));
    }
    Ok(id as VertexId)
}

/// Inverse of [`parse_edge_list`]. A header is written only when the vertex
/// count cannot be inferred from the edges.
pub fn serialize_edge_list(edges: &EdgeList) -> String {
    let inferred = edges
        .edges()
        .iter()
        .map(|e| e.src.max(e.dst) as usize + 1)
        .max()
        .unwrap_or(0);
    let mut out = String::with_capacity(edges.len() * 12);
    if inferred != edges.vertex_count() {
        writeln!(out, "# vertices {}", edges.vertex_count()).unwrap();
    }
    for e in edges.edges() {
        match e.weight {
            Some(w) => writeln!(out, "{} {} {}", e.src, e.dst, w).unwrap(),
            None => writeln!(out, "{} {}", e.src, e.dst).unwrap(),
        }
    }
    out
}

/// Collapses repeated `(src, dst)` pairs, keeping the smallest weight.
/// Output is sorted by `(src, dst)`.
pub fn dedup(edges: &EdgeList) -> EdgeList {
    let mut best: BTreeMap<(VertexId, VertexId), Option<Weight>> = BTreeMap::new();
    for e in edges.edges() {
        best.entry((e.src, e.dst))
            .and_modify(|w| *w = (*w).min(e.weight))
            .or_insert(e.weight);
    }
    EdgeList::from_parts_unchecked(
        edges.vertex_count(),
        best.into_iter()
            .map(|((src, dst), weight)| Edge { src, dst, weight })
            .collect(),
    )
}

/// Adds the reverse of every edge. Self-loops are not doubled.
pub fn symmetrize(edges: &EdgeList, dedup_pairs: bool) -> EdgeList {
    let mut out = Vec::with_capacity(edges.len() * 2);
    for e in edges.edges() {
        out.push(*e);
        if e.src != e.dst {
            out.push(Edge {
                src: e.dst,
                dst: e.src,
                weight: e.weight,
            });
        }
    }
    let sym = EdgeList::from_parts_unchecked(edges.vertex_count(), out);
    if dedup_pairs {
        dedup(&sym)
    } else {
        sym
    }
}

const HASH_K: u64 = 0x9E37_79B9_7F4A_7C15;

/// Multiplicative-hash weight for edge `(src, dst)`, in `1..=max_weight`.
pub fn hashed_weight(src: VertexId, dst: VertexId, max_weight: Weight) -> Weight {
    let h = ((src as u64).wrapping_mul(HASH_K) ^ dst as u64).wrapping_mul(HASH_K);
    1 + ((h >> 48) % max_weight as u64) as Weight
}

pub fn synthesize_weights(edges: &EdgeList, max_weight: Weight) -> Result<EdgeList> {
    if edges.is_weighted() {
        return Err(Error::AlreadyWeighted);
    }
    if max_weight == 0 {
        return Err(Error::InvalidConfig("max_weight must be at least 1".into()));
    }
    Ok(EdgeList::from_parts_unchecked(
        edges.vertex_count(),
        edges
            .edges()
            .iter()
            .map(|e| Edge::weighted(e.src, e.dst, hashed_weight(e.src, e.dst, max_weight)))
            .collect(),
    ))
}

pub const RMAT_DEFAULT_PROBS: [f64; 4] = [0.57, 0.19, 0.19, 0.05];

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GenSpec {
    Path {
        n: usize,
    },
    Grid {
        rows: usize,
        cols: usize,
    },
    Rmat {
        scale: u32,
        edge_factor: usize,
        probs: [f64; 4],
        seed: u64,
    },
}

impl GenSpec {
    pub fn rmat(scale: u32, edge_factor: usize, seed: u64) -> Self {
        GenSpec::Rmat {
            scale,
            edge_factor,
            probs: RMAT_DEFAULT_PROBS,
            seed,
        }
    }

    /// Parses `path:N`, `grid:R:C`, or `rmat:SCALE:EF[:A:B:C:D]`.
    pub fn parse(text: &str, seed: u64) -> Result<Self> {
        let bad = || Error::InvalidGenSpec(text.to_string());
        let parts: Vec<&str> = text.split(':').collect();
        let int = |s: &str| s.parse::<usize>().map_err(|_| bad());
        let spec = match parts.as_slice() {
            ["path", n] => GenSpec::Path { n: int(n)? },
            ["grid", r, c] => GenSpec::Grid {
                rows: int(r)?,
                cols: int(c)?,
            },
            ["rmat", s, ef] => GenSpec::rmat(int(s)? as u32, int(ef)?, seed),
            ["rmat", s, ef, a, b, c, d] => {
                let p = |s: &str| s.parse::<f64>().map_err(|_| bad());
                GenSpec::Rmat {
                    scale: int(s)? as u32,
                    edge_factor: int(ef)?,
                    probs: [p(a)?, p(b)?, p(c)?, p(d)?],
                    seed,
                }
            }
            _ => return Err(bad()),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            GenSpec::Path { n } if n >= 1 && n < INVALID_LANE as usize => Ok(()),
            GenSpec::Grid { rows, cols }
                if rows >= 1 && cols >= 1 && rows.saturating_mul(cols) < INVALID_LANE as usize =>
            {
                Ok(())
            }
            GenSpec::Rmat {
                scale,
                edge_factor,
                probs,
                ..
            } => {
                if !(1..=31).contains(&scale) || edge_factor == 0 {
                    return Err(Error::InvalidGenSpec(format!(
                        "rmat scale must be in 1..=31 and edge factor at least 1, got {scale}, {edge_factor}"
                    )));
                }
                let sum: f64 = probs.iter().sum();
                if probs.iter().any(|p| !(0.0..=1.0).contains(p)) || (sum - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidGenSpec(format!(
                        "rmat probabilities must be non-negative and sum to 1, got {probs:?}"
                    )));
                }
                Ok(())
            }
            _ => Err(Error::InvalidGenSpec(format!(
                "sizes must be at least 1: {self:?}"
            ))),
        }
    }
}

pub fn generate(spec: &GenSpec) -> Result<EdgeList> {
    spec.validate()?;
    let (n, edges) = match *spec {
        GenSpec::Path { n } => (
            n,
            (0..n.saturating_sub(1))
                .map(|i| Edge::new(i as VertexId, i as VertexId + 1))
                .collect(),
        ),
        GenSpec::Grid { rows, cols } => {
            let id = |r: usize, c: usize| (r * cols + c) as VertexId;
            let mut edges = Vec::with_capacity(4 * rows * cols);
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        edges.push(Edge::new(id(r, c), id(r, c + 1)));
                        edges.push(Edge::new(id(r, c + 1), id(r, c)));
                    }
                    if r + 1 < rows {
                        edges.push(Edge::new(id(r, c), id(r + 1, c)));
                        edges.push(Edge::new(id(r + 1, c), id(r, c)));
                    }
                }
            }
            (rows * cols, edges)
        }
        GenSpec::Rmat {
            scale,
            edge_factor,
            probs,
            seed,
        } => {
            let n = 1usize << scale;
            let m = edge_factor * n;
            let [a, b, c, _] = probs;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut edges = Vec::with_capacity(m);
            for _ in 0..m {
                let (mut src, mut dst) = (0u32, 0u32);
                for _ in 0..scale {
                    let r: f64 = rng.gen();
                    let (sb, db) = if r < a {
                        (0, 0)
                    } else if r < a + b {
                        (0, 1)
                    } else if r < a + b + c {
                        (1, 0)
                    } else {
                        (1, 1)
                    };
                    src = (src << 1) | sb;
                    dst = (dst << 1) | db;
                }
                edges.push(Edge::new(src, dst));
            }
            (n, edges)
        }
    };
    Ok(EdgeList::from_parts_unchecked(n, edges))
}
