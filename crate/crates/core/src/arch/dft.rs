use std::collections::VecDeque;

use super::{ArchError, Architecture, VertexSet};

/// A spanning tree with a post-order depth-first numbering.
///
/// The traversal starts at a leaf, so that leaf receives the largest label.
/// The tree is then rooted at the vertex labelled 0. Removing vertices in
/// ascending label order never disconnects what remains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedSpanningTree {
    label: Vec<Option<usize>>,
    order: Vec<usize>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
}

impl RootedSpanningTree {
    /// Number of vertices covered by the tree.
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// The vertex labelled 0.
    pub fn root(&self) -> usize {
        self.order[0]
    }

    pub fn label(&self, v: usize) -> Option<usize> {
        self.label[v]
    }

    /// Vertices indexed by label.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Parent when rooted at the vertex labelled 0.
    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Labels as a dense rank vector over the architecture's vertices;
    /// uncovered vertices get `usize::MAX`.
    pub fn ranks(&self) -> Vec<usize> {
        self.label.iter().map(|l| l.unwrap_or(usize::MAX)).collect()
    }
}

/// Edges of the breadth-first spanning tree from `root`, neighbours in ascending order.
pub fn bfs_spanning_tree(a: &Architecture, root: usize) -> Vec<(usize, usize)> {
    bfs_spanning_tree_within(a, &VertexSet::full(a.n()), root)
}

pub(crate) fn bfs_spanning_tree_within(a: &Architecture, members: &VertexSet, root: usize) -> Vec<(usize, usize)> {
    let mut seen = VertexSet::empty(a.n());
    seen.insert(root);
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &w in a.neighbors(u) {
            if members.contains(w) && seen.insert(w) {
                edges.push((u, w));
                queue.push_back(w);
            }
        }
    }
    edges
}

/// Post-order numbering of `spanning` by depth-first traversal from `start_leaf`.
pub fn dft_postorder(
    a: &Architecture,
    start_leaf: usize,
    spanning: &[(usize, usize)],
) -> Result<RootedSpanningTree, ArchError> {
    dft_postorder_within(a, &VertexSet::full(a.n()), start_leaf, spanning)
}

pub(crate) fn dft_postorder_within(
    a: &Architecture,
    members: &VertexSet,
    start_leaf: usize,
    spanning: &[(usize, usize)],
) -> Result<RootedSpanningTree, ArchError> {
    let n = a.n();
    let size = members.len();
    if !members.contains(start_leaf) {
        return Err(ArchError::NotASpanningTree(format!(
            "start {start_leaf} is not covered"
        )));
    }
    if spanning.len() + 1 != size {
        return Err(ArchError::NotASpanningTree(format!(
            "{} edges for {size} vertices",
            spanning.len()
        )));
    }
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in spanning {
        if !members.contains(u) || !members.contains(v) || !a.has_edge(u, v) {
            return Err(ArchError::NotASpanningTree(format!(
                "{u}-{v} is not an edge of the graph"
            )));
        }
        adj[u].push(v);
        adj[v].push(u);
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    if size > 1 && adj[start_leaf].len() != 1 {
        return Err(ArchError::NotALeaf(start_leaf));
    }

    let mut label = vec![None; n];
    let mut order = Vec::with_capacity(size);
    let mut visited = VertexSet::empty(n);
    visited.insert(start_leaf);
    // Iterative DFS: (vertex, next neighbour index).
    let mut stack = vec![(start_leaf, 0usize)];
    while let Some((v, i)) = stack.last_mut() {
        if let Some(&w) = adj[*v].get(*i) {
            *i += 1;
            if visited.insert(w) {
                stack.push((w, 0));
            }
        } else {
            let v = *v;
            label[v] = Some(order.len());
            order.push(v);
            stack.pop();
        }
    }
    if order.len() != size {
        return Err(ArchError::NotASpanningTree("edges do not connect every vertex".into()));
    }

    let mut parent = vec![None; n];
    let mut children = vec![Vec::new(); n];
    let mut queue = VecDeque::from([order[0]]);
    let mut seen = VertexSet::empty(n);
    seen.insert(order[0]);
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if seen.insert(w) {
                parent[w] = Some(u);
                children[u].push(w);
                queue.push_back(w);
            }
        }
    }
    Ok(RootedSpanningTree {
        label,
        order,
        parent,
        children,
    })
}
