use super::{ArchError, VertexSet};

pub const UNREACHABLE: u32 = u32::MAX;

/// All-pairs hop distances with next-hop tables for path reconstruction.
///
/// `next_hop(u, v)` is the lowest-indexed neighbour of `u` that lies on some
/// shortest `u → v` path, which makes reconstructed paths deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortestPaths {
    n: usize,
    dist: Vec<u32>,
    next: Vec<usize>,
}

impl ShortestPaths {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dist(&self, u: usize, v: usize) -> u32 {
        self.dist[u * self.n + v]
    }

    #[inline]
    pub fn next_hop(&self, u: usize, v: usize) -> usize {
        self.next[u * self.n + v]
    }

    /// Vertices of the reconstructed shortest path from `u` to `v`, inclusive.
    pub fn path(&self, u: usize, v: usize) -> Vec<usize> {
        let mut path = vec![u];
        let mut cur = u;
        while cur != v {
            cur = self.next_hop(cur, v);
            path.push(cur);
        }
        path
    }
}

/// Floyd-Warshall over an unweighted undirected graph. Fails if the graph is disconnected.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize)]) -> Result<ShortestPaths, ArchError> {
    let mut dist = vec![UNREACHABLE; n * n];
    let mut adjacency = vec![Vec::new(); n];
    for v in 0..n {
        dist[v * n + v] = 0;
    }
    for &(u, v) in edges {
        dist[u * n + v] = 1;
        dist[v * n + u] = 1;
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    for k in 0..n {
        for i in 0..n {
            let dik = dist[i * n + k];
            if dik == UNREACHABLE {
                continue;
            }
            for j in 0..n {
                let dkj = dist[k * n + j];
                if dkj != UNREACHABLE && dik + dkj < dist[i * n + j] {
                    dist[i * n + j] = dik + dkj;
                }
            }
        }
    }
    if let Some(idx) = dist.iter().position(|&d| d == UNREACHABLE) {
        return Err(ArchError::Disconnected(idx % n, idx / n));
    }

    let mut next = vec![0; n * n];
    for u in 0..n {
        adjacency[u].sort_unstable();
        for v in 0..n {
            next[u * n + v] = if u == v {
                u
            } else {
                let want = dist[u * n + v] - 1;
                *adjacency[u]
                    .iter()
                    .find(|&&w| dist[w * n + v] == want)
                    .expect("a neighbour on a shortest path exists")
            };
        }
    }
    Ok(ShortestPaths { n, dist, next })
}

/// Hop distances from `source` within the subgraph induced by `allowed`.
pub(crate) fn bfs_distances_with<F, I>(neighbors: F, n: usize, source: usize, allowed: &VertexSet) -> Vec<u32>
where
    F: Fn(usize) -> I,
    I: IntoIterator<Item = usize>,
{
    let mut dist = vec![UNREACHABLE; n];
    let mut queue = std::collections::VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        for w in neighbors(u) {
            if allowed.contains(w) && dist[w] == UNREACHABLE {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arch::Architecture;

    #[test]
    fn grid_distances() {
        let a = Architecture::grid(3, 3);
        let sp = a.shortest_paths();
        assert_eq!(sp.dist(0, 8), 4);
        assert_eq!(sp.dist(0, 1), 1);
        for u in 0..9 {
            assert_eq!(sp.dist(u, u), 0);
            for v in 0..9 {
                assert_eq!(sp.dist(u, v), sp.dist(v, u));
                assert_eq!(sp.dist(u, v) == 1, a.has_edge(u, v));
            }
        }
    }

    #[test]
    fn next_hop_prefers_lower_index() {
        let a = Architecture::grid(3, 3);
        // 0 → 7 can go through 1 or 5; 1 wins.
        assert_eq!(a.shortest_paths().path(0, 7), vec![0, 1, 4, 7]);
        assert_eq!(a.shortest_paths().path(0, 2), vec![0, 1, 2]);
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        assert!(matches!(
            floyd_warshall(4, &[(0, 1), (2, 3)]),
            Err(ArchError::Disconnected(..))
        ));
    }

    #[test]
    fn matches_bfs_on_builtins() {
        for name in super::super::BUILTIN_NAMES {
            let a = Architecture::builtin(name).unwrap();
            let all = VertexSet::full(a.n());
            for s in 0..a.n() {
                let d = bfs_distances_with(|v| a.neighbors(v).to_vec(), a.n(), s, &all);
                for (t, &dt) in d.iter().enumerate() {
                    assert_eq!(dt, a.distance(s, t));
                }
            }
        }
    }
}
