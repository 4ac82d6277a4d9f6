//! Device connectivity graphs.
//!
//! An [`Architecture`] is a connected, simple, undirected graph over physical
//! qubits, optionally carrying a declared Hamiltonian path that supplies the
//! elimination order for the non-recursive router. All-pairs hop distances
//! are computed once at construction.

mod dft;
mod paths;
mod steiner;

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dft::{bfs_spanning_tree, dft_postorder, RootedSpanningTree};
pub(crate) use dft::{bfs_spanning_tree_within, dft_postorder_within};
pub use paths::{floyd_warshall, ShortestPaths, UNREACHABLE};
pub use steiner::SteinerTree;

/// Names accepted by [`Architecture::builtin`].
pub const BUILTIN_NAMES: [&str; 5] = ["square-9", "square-16", "ibm-qx5", "rigetti-16q-aspen", "ibm-q20-tokyo"];

const IBM_QX5_JSON: &str = include_str!("../../data/ibm-qx5.json");
const RIGETTI_ASPEN_JSON: &str = include_str!("../../data/rigetti-16q-aspen.json");
const IBM_TOKYO_JSON: &str = include_str!("../../data/ibm-q20-tokyo.json");

#[derive(Debug, Error)]
pub enum ArchError {
    #[error("architecture must have at least one vertex")]
    Empty,
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("graph is disconnected ({0} is unreachable from {1})")]
    Disconnected(usize, usize),
    #[error("invalid hamiltonian path: {0}")]
    InvalidHamiltonianPath(String),
    #[error("unknown architecture {0:?} (expected one of {list})", list = BUILTIN_NAMES.join(", "))]
    Unknown(String),
    #[error("terminal {0} is outside the allowed vertex set")]
    TerminalNotAllowed(usize),
    #[error("terminal {terminal} cannot be connected to root {root} within the allowed vertices")]
    Unreachable { root: usize, terminal: usize },
    #[error("no decreasing Steiner tree from root {root} reaches terminal {terminal}")]
    NoDecreasingTree { root: usize, terminal: usize },
    #[error("root {root} is not the maximum terminal under the ordering")]
    RootNotMaximal { root: usize },
    #[error("edge set is not a spanning tree: {0}")]
    NotASpanningTree(String),
    #[error("DFT start vertex {0} is not a leaf of the spanning tree")]
    NotALeaf(usize),
    #[error("invalid architecture JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot read architecture file: {0}")]
    Io(#[from] std::io::Error),
}

/// A set of vertices of a fixed universe `0..n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    member: Vec<bool>,
    len: usize,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        Self {
            member: vec![false; n],
            len: 0,
        }
    }

    pub fn full(n: usize) -> Self {
        Self {
            member: vec![true; n],
            len: n,
        }
    }

    pub fn from_vertices<I: IntoIterator<Item = usize>>(n: usize, vertices: I) -> Self {
        let mut s = Self::empty(n);
        for v in vertices {
            s.insert(v);
        }
        s
    }

    /// Size of the universe.
    pub fn universe(&self) -> usize {
        self.member.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_full(&self) -> bool {
        self.len == self.member.len()
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        self.member.get(v).copied().unwrap_or(false)
    }

    pub fn insert(&mut self, v: usize) -> bool {
        if self.member[v] {
            return false;
        }
        self.member[v] = true;
        self.len += 1;
        true
    }

    pub fn remove(&mut self, v: usize) -> bool {
        if !self.member[v] {
            return false;
        }
        self.member[v] = false;
        self.len -= 1;
        true
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.member.iter().enumerate().filter_map(|(v, &m)| m.then_some(v))
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// On-disk description of an architecture.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArchitectureSpec {
    pub name: String,
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default)]
    pub hamiltonian_path: Option<Vec<usize>>,
}

#[derive(Clone)]
pub struct Architecture {
    name: String,
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    is_edge: Vec<bool>,
    hamiltonian_path: Option<Vec<usize>>,
    paths: ShortestPaths,
}

impl Architecture {
    /// Validates and builds an architecture. Edges are unordered; `hamiltonian_path`, when
    /// present, must visit every vertex once along edges.
    pub fn new(
        name: impl Into<String>,
        n: usize,
        edges: &[(usize, usize)],
        hamiltonian_path: Option<Vec<usize>>,
    ) -> Result<Self, ArchError> {
        if n == 0 {
            return Err(ArchError::Empty);
        }
        let mut is_edge = vec![false; n * n];
        let mut adjacency = vec![Vec::new(); n];
        let mut normalized = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            for vertex in [u, v] {
                if vertex >= n {
                    return Err(ArchError::VertexOutOfRange { vertex, n });
                }
            }
            if u == v {
                return Err(ArchError::SelfLoop(u));
            }
            if is_edge[u * n + v] {
                return Err(ArchError::DuplicateEdge(u, v));
            }
            is_edge[u * n + v] = true;
            is_edge[v * n + u] = true;
            adjacency[u].push(v);
            adjacency[v].push(u);
            normalized.push((u.min(v), u.max(v)));
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        normalized.sort_unstable();
        let paths = floyd_warshall(n, &normalized)?;

        if let Some(path) = &hamiltonian_path {
            if path.len() != n {
                return Err(ArchError::InvalidHamiltonianPath(format!(
                    "has {} vertices, expected {n}",
                    path.len()
                )));
            }
            let mut seen = vec![false; n];
            for &v in path {
                if v >= n || std::mem::replace(&mut seen[v], true) {
                    return Err(ArchError::InvalidHamiltonianPath(format!(
                        "vertex {v} is out of range or repeated"
                    )));
                }
            }
            if let Some(w) = path.windows(2).find(|w| !is_edge[w[0] * n + w[1]]) {
                return Err(ArchError::InvalidHamiltonianPath(format!(
                    "{}-{} is not an edge",
                    w[0], w[1]
                )));
            }
        }

        Ok(Self {
            name: name.into(),
            n,
            edges: normalized,
            adjacency,
            is_edge,
            hamiltonian_path,
            paths,
        })
    }

    pub fn from_spec(spec: ArchitectureSpec) -> Result<Self, ArchError> {
        let edges: Vec<(usize, usize)> = spec.edges.iter().map(|e| (e[0], e[1])).collect();
        Self::new(spec.name, spec.n, &edges, spec.hamiltonian_path)
    }

    pub fn from_json(text: &str) -> Result<Self, ArchError> {
        Self::from_spec(serde_json::from_str(text)?)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self, ArchError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_spec(&self) -> ArchitectureSpec {
        ArchitectureSpec {
            name: self.name.clone(),
            n: self.n,
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
            hamiltonian_path: self.hamiltonian_path.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_spec()).expect("architecture serializes")
    }

    /// One of the benchmark devices; see [`BUILTIN_NAMES`].
    pub fn builtin(name: &str) -> Result<Self, ArchError> {
        match name {
            "square-9" => Ok(Self::grid(3, 3)),
            "square-16" => Ok(Self::grid(4, 4)),
            "ibm-qx5" => Self::from_json(IBM_QX5_JSON),
            "rigetti-16q-aspen" => Self::from_json(RIGETTI_ASPEN_JSON),
            "ibm-q20-tokyo" => Self::from_json(IBM_TOKYO_JSON),
            other => Err(ArchError::Unknown(other.to_string())),
        }
    }

    /// `rows × cols` square lattice labelled boustrophedon-style, so that
    /// `[0, 1, …, rows·cols − 1]` is a Hamiltonian path.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let label = |r: usize, c: usize| {
            if r.is_multiple_of(2) {
                r * cols + c
            } else {
                r * cols + cols - 1 - c
            }
        };
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    edges.push((label(r, c), label(r, c + 1)));
                }
                if r + 1 < rows {
                    edges.push((label(r, c), label(r + 1, c)));
                }
            }
        }
        let n = rows * cols;
        Self::new(format!("square-{n}"), n, &edges, Some((0..n).collect())).expect("grid is a valid architecture")
    }

    /// Path graph `0 - 1 - … - n−1`.
    pub fn line(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Self::new(format!("line-{n}"), n, &edges, Some((0..n).collect())).expect("line is valid")
    }

    /// Star with centre 0 and `leaves` leaves; no Hamiltonian path when `leaves > 2`.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
        Self::new(format!("star-{leaves}"), leaves + 1, &edges, None).expect("star is valid")
    }

    /// Heap-ordered binary tree on `n` vertices (children of `v` are `2v+1`, `2v+2`).
    pub fn binary_tree(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| ((v - 1) / 2, v)).collect();
        Self::new(format!("binary-tree-{n}"), n, &edges, None).expect("tree is valid")
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Self::new(format!("complete-{n}"), n, &edges, Some((0..n).collect())).expect("valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.is_edge[u * self.n + v]
    }

    /// Neighbours of `v` in ascending order.
    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn hamiltonian_path(&self) -> Option<&[usize]> {
        self.hamiltonian_path.as_deref()
    }

    pub fn shortest_paths(&self) -> &ShortestPaths {
        &self.paths
    }

    #[inline]
    pub fn distance(&self, u: usize, v: usize) -> u32 {
        self.paths.dist(u, v)
    }

    /// Mean hop distance over unordered pairs of distinct vertices.
    pub fn mean_distance(&self) -> f64 {
        let pairs = self.n * (self.n - 1) / 2;
        if pairs == 0 {
            return 0.0;
        }
        let total: u64 = (0..self.n)
            .flat_map(|u| (u + 1..self.n).map(move |v| (u, v)))
            .map(|(u, v)| u64::from(self.distance(u, v)))
            .sum();
        total as f64 / pairs as f64
    }
}

impl fmt::Debug for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Architecture")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("edges", &self.edges)
            .field("hamiltonian_path", &self.hamiltonian_path)
            .finish()
    }
}
