use std::collections::VecDeque;

use super::paths::{bfs_distances_with, UNREACHABLE};
use super::{ArchError, Architecture, VertexSet};

/// A tree subgraph of an architecture, rooted and spanning a terminal set.
///
/// Vertices outside the tree have no parent and no children. Children lists
/// are kept in ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SteinerTree {
    root: usize,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    members: VertexSet,
    terminals: VertexSet,
}

impl SteinerTree {
    fn from_parents(root: usize, parent: Vec<Option<usize>>, members: VertexSet, terminals: VertexSet) -> Self {
        let mut children = vec![Vec::new(); parent.len()];
        for v in members.iter() {
            if let Some(p) = parent[v] {
                children[p].push(v);
            }
        }
        Self {
            root,
            parent,
            children,
            members,
            terminals,
        }
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// Size of the vertex universe the tree lives in.
    pub fn universe(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.contains(v)
    }

    pub fn is_terminal(&self, v: usize) -> bool {
        self.terminals.contains(v)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Tree vertices in ascending order.
    pub fn vertices(&self) -> Vec<usize> {
        self.members.to_vec()
    }

    pub fn terminals(&self) -> Vec<usize> {
        self.terminals.to_vec()
    }

    /// Non-terminal tree vertices.
    pub fn steiner_points(&self) -> Vec<usize> {
        self.members.iter().filter(|&v| !self.terminals.contains(v)).collect()
    }

    /// `(parent, child)` pairs, ordered by child.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.members
            .iter()
            .filter_map(|v| self.parent[v].map(|p| (p, v)))
            .collect()
    }

    /// Vertices grouped by depth from the root, each level in ascending order.
    pub fn levels(&self) -> Vec<Vec<usize>> {
        let mut levels = vec![vec![self.root]];
        loop {
            let mut next: Vec<usize> = levels
                .last()
                .unwrap()
                .iter()
                .flat_map(|&v| self.children[v].iter().copied())
                .collect();
            if next.is_empty() {
                return levels;
            }
            next.sort_unstable();
            levels.push(next);
        }
    }

    pub fn depth(&self, mut v: usize) -> usize {
        let mut d = 0;
        while let Some(p) = self.parent[v] {
            v = p;
            d += 1;
        }
        d
    }

    pub fn leaves(&self) -> Vec<usize> {
        self.members
            .iter()
            .filter(|&v| self.children[v].is_empty() && v != self.root)
            .collect()
    }
}

fn check_terminals(terminals: &[usize], root: usize, allowed: &VertexSet) -> Result<(), ArchError> {
    let n = allowed.universe();
    for &t in terminals.iter().chain(std::iter::once(&root)) {
        if t >= n {
            return Err(ArchError::VertexOutOfRange { vertex: t, n });
        }
        if !allowed.contains(t) {
            return Err(ArchError::TerminalNotAllowed(t));
        }
    }
    Ok(())
}

impl Architecture {
    /// Approximate Steiner tree over the subgraph induced by `allowed`.
    ///
    /// Builds the minimum spanning tree of the terminals' distance closure,
    /// expands each of its edges to a shortest path, then re-roots the union
    /// by breadth-first search from `root` and prunes non-terminal leaves.
    /// The root is always treated as a terminal.
    pub fn steiner_tree(
        &self,
        terminals: &[usize],
        root: usize,
        allowed: &VertexSet,
    ) -> Result<SteinerTree, ArchError> {
        check_terminals(terminals, root, allowed)?;
        let n = self.n;
        let term_set = {
            let mut s = VertexSet::from_vertices(n, terminals.iter().copied());
            s.insert(root);
            s
        };
        let terms = term_set.to_vec();

        // Distances to each terminal; the full graph reuses the all-pairs table.
        let restricted = !allowed.is_full();
        let dist_to: Vec<Vec<u32>> = if restricted {
            terms
                .iter()
                .map(|&t| bfs_distances_with(|v| self.neighbors(v).iter().copied(), n, t, allowed))
                .collect()
        } else {
            terms
                .iter()
                .map(|&t| (0..n).map(|v| self.distance(v, t)).collect())
                .collect()
        };

        let mut pairs = Vec::new();
        for i in 0..terms.len() {
            for j in i + 1..terms.len() {
                let d = dist_to[j][terms[i]];
                if d == UNREACHABLE {
                    return Err(ArchError::Unreachable {
                        root: terms[i],
                        terminal: terms[j],
                    });
                }
                pairs.push((d, terms[i], terms[j], j));
            }
        }
        pairs.sort_unstable();

        let mut component: Vec<usize> = (0..terms.len()).collect();
        fn find(c: &mut [usize], mut x: usize) -> usize {
            while c[x] != x {
                c[x] = c[c[x]];
                x = c[x];
            }
            x
        }
        let index_of = |v: usize| terms.binary_search(&v).unwrap();

        let mut union_adj = vec![Vec::new(); n];
        let mut in_union = VertexSet::empty(n);
        in_union.insert(root);
        for (_, u, v, vi) in pairs {
            let (cu, cv) = (find(&mut component, index_of(u)), find(&mut component, vi));
            if cu == cv {
                continue;
            }
            component[cu] = cv;
            let to_v = &dist_to[vi];
            let mut cur = u;
            in_union.insert(cur);
            while cur != v {
                let next = *self
                    .neighbors(cur)
                    .iter()
                    .find(|&&w| allowed.contains(w) && to_v[w] != UNREACHABLE && to_v[w] + 1 == to_v[cur])
                    .expect("distance table is consistent");
                union_adj[cur].push(next);
                union_adj[next].push(cur);
                in_union.insert(next);
                cur = next;
            }
        }
        for adj in &mut union_adj {
            adj.sort_unstable();
            adj.dedup();
        }

        let mut parent = vec![None; n];
        let mut seen = VertexSet::empty(n);
        let mut order = vec![root];
        seen.insert(root);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &w in &union_adj[u] {
                if seen.insert(w) {
                    parent[w] = Some(u);
                    order.push(w);
                    queue.push_back(w);
                }
            }
        }
        debug_assert_eq!(seen, in_union);

        // Prune non-terminal leaves, deepest discoveries first.
        let mut child_count = vec![0usize; n];
        for &v in &order {
            if let Some(p) = parent[v] {
                child_count[p] += 1;
            }
        }
        for &v in order.iter().rev() {
            if child_count[v] == 0 && !term_set.contains(v) {
                seen.remove(v);
                if let Some(p) = parent[v].take() {
                    child_count[p] -= 1;
                }
            }
        }
        Ok(SteinerTree::from_parents(root, parent, seen, term_set))
    }

    /// Steiner tree in which every parent ranks above its children, except
    /// along edges whose endpoints are both in `nondesc`.
    ///
    /// Grows greedily from the root: each round runs a breadth-first search
    /// from the current tree over permitted directed edges and attaches the
    /// nearest uncovered terminal (lowest index on ties) along its search path.
    pub fn decreasing_steiner_tree(
        &self,
        terminals: &[usize],
        root: usize,
        rank: &[usize],
        nondesc: &VertexSet,
        allowed: &VertexSet,
    ) -> Result<SteinerTree, ArchError> {
        check_terminals(terminals, root, allowed)?;
        let n = self.n;
        if terminals.iter().any(|&t| rank[t] > rank[root]) {
            return Err(ArchError::RootNotMaximal { root });
        }
        let mut term_set = VertexSet::from_vertices(n, terminals.iter().copied());
        term_set.insert(root);
        let legal = |u: usize, v: usize| rank[u] > rank[v] || (nondesc.contains(u) && nondesc.contains(v));

        let mut members = VertexSet::empty(n);
        members.insert(root);
        let mut parent = vec![None; n];
        let mut uncovered: Vec<usize> = term_set.iter().filter(|&t| t != root).collect();

        let mut dist = vec![UNREACHABLE; n];
        let mut pred = vec![usize::MAX; n];
        while !uncovered.is_empty() {
            dist.fill(UNREACHABLE);
            let mut queue = VecDeque::new();
            for v in members.iter() {
                dist[v] = 0;
                queue.push_back(v);
            }
            while let Some(u) = queue.pop_front() {
                for &w in self.neighbors(u) {
                    if dist[w] == UNREACHABLE && allowed.contains(w) && legal(u, w) {
                        dist[w] = dist[u] + 1;
                        pred[w] = u;
                        queue.push_back(w);
                    }
                }
            }
            let (pos, &target) = uncovered
                .iter()
                .enumerate()
                .filter(|(_, &t)| dist[t] != UNREACHABLE)
                .min_by_key(|(_, &t)| (dist[t], t))
                .ok_or(ArchError::NoDecreasingTree {
                    root,
                    terminal: uncovered[0],
                })?;
            let mut v = target;
            while !members.contains(v) {
                members.insert(v);
                parent[v] = Some(pred[v]);
                v = pred[v];
            }
            uncovered.remove(pos);
            uncovered.retain(|&t| !members.contains(t));
        }
        Ok(SteinerTree::from_parents(root, parent, members, term_set))
    }
}
