//! Connectivity-constrained Gauss-Jordan elimination.
//!
//! Every row operation recorded here acts along an architecture edge, so the
//! reversed trace is a CNOT circuit that respects the device. Rows and
//! columns are indexed by vertex; elimination order comes from a `rank`
//! vector (position along a Hamiltonian path, or a post-order numbering).

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::arch::{
    bfs_spanning_tree_within, dft_postorder_within, ArchError, Architecture, RootedSpanningTree, SteinerTree, VertexSet,
};
use crate::gf2::{gauss_synthesize, pmh_synthesize, MatrixError, ParityMatrix, RowOp};
use crate::rng::{derive_seed, seeded};

pub use crate::circuit::trace_to_circuit;

#[derive(Debug, Error)]
pub enum RouterError {
    #[error("matrix is singular")]
    Singular,
    #[error("matrix has {matrix} rows but the architecture has {arch} vertices")]
    DimensionMismatch { matrix: usize, arch: usize },
    #[error("architecture {0:?} declares no hamiltonian path; use the recursive router")]
    NoHamiltonianPath(String),
    #[error(transparent)]
    Arch(#[from] ArchError),
    #[error(transparent)]
    Matrix(MatrixError),
}

impl From<MatrixError> for RouterError {
    fn from(e: MatrixError) -> Self {
        match e {
            MatrixError::Singular => RouterError::Singular,
            other => RouterError::Matrix(other),
        }
    }
}

/// A matrix under elimination together with the trace that produced it.
#[derive(Debug, Clone)]
pub struct EliminationState<'a> {
    matrix: ParityMatrix,
    arch: &'a Architecture,
    ops: Vec<RowOp>,
}

impl<'a> EliminationState<'a> {
    pub fn new(p: &ParityMatrix, arch: &'a Architecture) -> Result<Self, RouterError> {
        if p.n() != arch.n() {
            return Err(RouterError::DimensionMismatch {
                matrix: p.n(),
                arch: arch.n(),
            });
        }
        Ok(Self {
            matrix: p.clone(),
            arch,
            ops: Vec::new(),
        })
    }

    pub fn matrix(&self) -> &ParityMatrix {
        &self.matrix
    }

    pub fn ops(&self) -> &[RowOp] {
        &self.ops
    }

    pub fn into_ops(self) -> Vec<RowOp> {
        self.ops
    }

    fn apply(&mut self, src: usize, tgt: usize) {
        debug_assert!(self.arch.has_edge(src, tgt), "{src}->{tgt} is not an edge");
        self.matrix.add_row_unchecked(src, tgt);
        self.ops.push(RowOp::new(src, tgt));
    }
}

/// A 0/1 vector under tree-constrained row additions.
pub(crate) trait TreeColumn {
    fn bit(&self, v: usize) -> bool;
    /// Adds entry `src` into entry `tgt`.
    fn add(&mut self, src: usize, tgt: usize);
}

struct MatrixColumn<'s, 'a> {
    state: &'s mut EliminationState<'a>,
    col: usize,
}

impl TreeColumn for MatrixColumn<'_, '_> {
    fn bit(&self, v: usize) -> bool {
        self.state.matrix.get(v, self.col)
    }

    fn add(&mut self, src: usize, tgt: usize) {
        self.state.apply(src, tgt);
    }
}

/// Fills every tree entry with a 1, then empties all but the root.
///
/// Fill runs in rounds against the round-start values: each zero vertex, in
/// breadth-first order, takes a 1 from its parent or else its lowest child,
/// provided neither end was touched earlier in the round and the operation
/// is permitted. Empty runs from the deepest level up; within a level,
/// entries that already held a 1 go first by index, then filled entries in
/// reverse order of filling.
pub(crate) fn fill_and_empty<C: TreeColumn>(
    column: &mut C,
    tree: &SteinerTree,
    permitted: impl Fn(usize, usize) -> bool,
) -> Result<(), RouterError> {
    let n = tree.universe();
    let levels = tree.levels();
    let bfs: Vec<usize> = levels.concat();
    let mut filled = Vec::new();
    let mut was_filled = vec![false; n];
    let mut had_one = vec![false; n];
    let mut touched = vec![false; n];
    loop {
        for &v in &bfs {
            had_one[v] = column.bit(v);
            touched[v] = false;
        }
        if bfs.iter().all(|&v| had_one[v]) {
            break;
        }
        let mut progress = false;
        for &v in &bfs {
            if had_one[v] || touched[v] {
                continue;
            }
            let source = tree
                .parent(v)
                .into_iter()
                .chain(tree.children(v).iter().copied())
                .find(|&s| had_one[s] && !touched[s] && permitted(s, v));
            if let Some(s) = source {
                column.add(s, v);
                touched[s] = true;
                touched[v] = true;
                was_filled[v] = true;
                filled.push(v);
                progress = true;
            }
        }
        if !progress {
            return Err(RouterError::Singular);
        }
    }

    for level in levels.iter().skip(1).rev() {
        let original = level.iter().copied().filter(|&v| !was_filled[v]);
        let refilled = filled.iter().rev().copied().filter(|v| level.binary_search(v).is_ok());
        for v in original.chain(refilled).collect::<Vec<_>>() {
            let p = tree.parent(v).expect("non-root vertex has a parent");
            column.add(p, v);
        }
    }
    Ok(())
}

/// Clears column `k` below the diagonal on the rows in `allowed`.
pub fn steiner_down(
    state: &mut EliminationState<'_>,
    k: usize,
    allowed: &VertexSet,
    rank: &[usize],
) -> Result<(), RouterError> {
    let mut terminals = vec![k];
    terminals.extend(allowed.iter().filter(|&j| rank[j] > rank[k] && state.matrix.get(j, k)));
    if terminals.len() == 1 && state.matrix.get(k, k) {
        return Ok(());
    }
    let tree = state.arch.steiner_tree(&terminals, k, allowed)?;
    fill_and_empty(&mut MatrixColumn { state, col: k }, &tree, |_, _| true)
}

/// Clears column `k` above the diagonal on the rows in `allowed`, using only
/// operations from a higher-ranked row to a lower-ranked one, except between
/// two rows of `nondesc`.
pub fn steiner_up(
    state: &mut EliminationState<'_>,
    k: usize,
    allowed: &VertexSet,
    nondesc: &VertexSet,
    rank: &[usize],
) -> Result<(), RouterError> {
    if !state.matrix.get(k, k) {
        return Err(RouterError::Singular);
    }
    let mut terminals = vec![k];
    terminals.extend(allowed.iter().filter(|&j| rank[j] < rank[k] && state.matrix.get(j, k)));
    if terminals.len() == 1 {
        return Ok(());
    }
    let tree = state
        .arch
        .decreasing_steiner_tree(&terminals, k, rank, nondesc, allowed)?;
    let permitted = |s: usize, t: usize| rank[s] > rank[t] || (nondesc.contains(s) && nondesc.contains(t));
    fill_and_empty(&mut MatrixColumn { state, col: k }, &tree, permitted)
}

fn finish(state: EliminationState<'_>) -> Result<Vec<RowOp>, RouterError> {
    if state.matrix.is_identity() {
        Ok(state.into_ops())
    } else {
        Err(RouterError::Singular)
    }
}

/// Elimination along the architecture's declared Hamiltonian path.
pub fn steiner_gauss(p: &ParityMatrix, a: &Architecture) -> Result<Vec<RowOp>, RouterError> {
    let path = a
        .hamiltonian_path()
        .ok_or_else(|| RouterError::NoHamiltonianPath(a.name().to_string()))?;
    let mut state = EliminationState::new(p, a)?;
    let n = a.n();
    let mut rank = vec![0; n];
    for (i, &v) in path.iter().enumerate() {
        rank[v] = i;
    }

    let mut remaining = VertexSet::full(n);
    for &k in path {
        steiner_down(&mut state, k, &remaining, &rank)?;
        remaining.remove(k);
    }
    debug_assert!(state.matrix.is_upper_triangular_under(&rank));

    let none = VertexSet::empty(n);
    let mut remaining = VertexSet::full(n);
    for &k in path.iter().rev() {
        steiner_up(&mut state, k, &remaining, &none, &rank)?;
        remaining.remove(k);
    }
    finish(state)
}

/// How the recursive router picks its spanning tree and traversal start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpanningChoice {
    /// Breadth-first tree from the lowest-indexed vertex; traversal starts
    /// at the highest-indexed leaf.
    #[default]
    Lowest,
    /// Random root and random starting leaf, reproducible from the seed.
    Seeded(u64),
}

impl SpanningChoice {
    fn pick(self, a: &Architecture, members: &VertexSet, depth: u64) -> (Vec<(usize, usize)>, usize) {
        let vertices = members.to_vec();
        let (root, mut rng) = match self {
            SpanningChoice::Lowest => (vertices[0], None),
            SpanningChoice::Seeded(seed) => {
                let mut key = vec![depth];
                key.extend(vertices.iter().map(|&v| v as u64));
                let mut rng = seeded(derive_seed(seed, "spanning-tree", &key));
                (*vertices.choose(&mut rng).unwrap(), Some(rng))
            }
        };
        let spanning = bfs_spanning_tree_within(a, members, root);
        let mut degree = vec![0usize; a.n()];
        for &(u, v) in &spanning {
            degree[u] += 1;
            degree[v] += 1;
        }
        let leaves: Vec<usize> = vertices.iter().copied().filter(|&v| degree[v] <= 1).collect();
        let start = match rng.as_mut() {
            None => *leaves.last().unwrap(),
            Some(rng) => leaves[rng.gen_range(0..leaves.len())],
        };
        (spanning, start)
    }
}

/// Elimination for arbitrary connected architectures.
pub fn steiner_gauss_rec(p: &ParityMatrix, a: &Architecture) -> Result<Vec<RowOp>, RouterError> {
    steiner_gauss_rec_with(p, a, SpanningChoice::default())
}

pub fn steiner_gauss_rec_with(
    p: &ParityMatrix,
    a: &Architecture,
    choice: SpanningChoice,
) -> Result<Vec<RowOp>, RouterError> {
    let mut state = EliminationState::new(p, a)?;
    eliminate_within(&mut state, &VertexSet::full(a.n()), choice, 0)?;
    finish(state)
}

/// Reduces the block of rows and columns `members` to the identity. The
/// rows in `members` must be zero outside the block's columns.
fn eliminate_within(
    state: &mut EliminationState<'_>,
    members: &VertexSet,
    choice: SpanningChoice,
    depth: u64,
) -> Result<(), RouterError> {
    let a = state.arch;
    let (spanning, start) = choice.pick(a, members, depth);
    let tree = dft_postorder_within(a, members, start, &spanning)?;
    let rank = tree.ranks();
    let order = tree.order();

    let mut remaining = members.clone();
    for &k in order {
        steiner_down(state, k, &remaining, &rank)?;
        remaining.remove(k);
    }

    // Children still present under the tree rooted at label 0.
    let mut live_children: Vec<usize> = (0..a.n()).map(|v| tree.children(v).len()).collect();
    let mut remaining = members.clone();
    while !remaining.is_empty() {
        let k = order.iter().rev().copied().find(|&v| remaining.contains(v)).unwrap();
        let k_leaf = order
            .iter()
            .rev()
            .copied()
            .find(|&v| remaining.contains(v) && live_children[v] == 0)
            .expect("a finite tree has a leaf");

        let w = tree_path(&tree, k_leaf, k);
        debug_assert!(
            {
                let mut top: Vec<usize> = order
                    .iter()
                    .rev()
                    .copied()
                    .filter(|&v| remaining.contains(v))
                    .take(w.len())
                    .collect();
                let mut sorted = w.clone();
                top.sort_unstable();
                sorted.sort_unstable();
                top == sorted
            },
            "path block is not the top of the remaining order"
        );
        let block = VertexSet::from_vertices(a.n(), w.iter().copied());
        steiner_up(state, k_leaf, &remaining, &block, &rank)?;
        if block.len() > 1 {
            eliminate_within(state, &block, choice, depth + 1)?;
        }

        remaining.remove(k_leaf);
        if let Some(p) = tree.parent(k_leaf) {
            live_children[p] -= 1;
        }
    }
    Ok(())
}

/// Vertices on the tree path between `u` and `v`, inclusive.
fn tree_path(tree: &RootedSpanningTree, u: usize, v: usize) -> Vec<usize> {
    let ancestors = |mut x: usize| {
        let mut chain = vec![x];
        while let Some(p) = tree.parent(x) {
            chain.push(p);
            x = p;
        }
        chain
    };
    let up = ancestors(u);
    let vp = ancestors(v);
    let meet = *up.iter().find(|x| vp.contains(x)).expect("same tree");
    let mut path: Vec<usize> = up.iter().copied().take_while(|&x| x != meet).collect();
    path.push(meet);
    let tail: Vec<usize> = vp.iter().copied().take_while(|&x| x != meet).collect();
    path.extend(tail.into_iter().rev());
    path
}

/// Which synthesis routine to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Hamiltonian-path router when a path is declared, recursive router otherwise.
    #[default]
    Auto,
    SteinerGauss,
    SteinerGaussRec(SpanningChoice),
    /// Unconstrained Patel-Markov-Hayes with the given section width.
    Pmh(usize),
    /// Unconstrained Gauss-Jordan.
    Gauss,
}

impl Method {
    pub fn is_constrained(self) -> bool {
        !matches!(self, Method::Pmh(_) | Method::Gauss)
    }
}

/// Elimination trace for `p` under `method`.
pub fn synthesize(p: &ParityMatrix, a: &Architecture, method: Method) -> Result<Vec<RowOp>, RouterError> {
    match method {
        Method::Auto if a.hamiltonian_path().is_some() => steiner_gauss(p, a),
        Method::Auto => steiner_gauss_rec(p, a),
        Method::SteinerGauss => steiner_gauss(p, a),
        Method::SteinerGaussRec(choice) => steiner_gauss_rec_with(p, a, choice),
        Method::Pmh(block) => Ok(pmh_synthesize(p, block)?),
        Method::Gauss => Ok(gauss_synthesize(p)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{from_circuit, Gate};
    use crate::examples::{steiner_down_example, steiner_up_example};
    use crate::gf2::random_invertible;
    use proptest::prelude::{any, prop_assert, proptest, ProptestConfig, Strategy};

    fn ops(pairs: &[(usize, usize)]) -> Vec<RowOp> {
        pairs.iter().map(|&(s, t)| RowOp::new(s, t)).collect()
    }

    fn grid() -> Architecture {
        Architecture::builtin("square-9").unwrap()
    }

    fn check_trace(p: &ParityMatrix, a: &Architecture, trace: &[RowOp]) {
        let mut m = p.clone();
        m.apply_ops(trace).unwrap();
        assert!(m.is_identity());
        for op in trace {
            assert!(a.has_edge(op.src, op.tgt), "{op} is not an edge");
        }
        assert_eq!(&from_circuit(&trace_to_circuit(trace, a.n())).unwrap(), p);
    }

    #[test]
    fn down_worked_example() {
        let a = grid();
        let mut state = EliminationState::new(&steiner_down_example(), &a).unwrap();
        let rank: Vec<usize> = (0..9).collect();
        steiner_down(&mut state, 0, &VertexSet::full(9), &rank).unwrap();
        assert_eq!(state.ops(), ops(&[(0, 1), (7, 4), (4, 7), (1, 2), (1, 4), (0, 1)]));
        let col = state.matrix().column(0);
        assert_eq!(col.ones().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn down_example_circuit_fragment() {
        let trace = ops(&[(0, 1), (7, 4), (4, 7), (1, 2), (1, 4), (0, 1)]);
        let c = trace_to_circuit(&trace, 9);
        let expected: Vec<Gate> = [(0, 1), (1, 4), (1, 2), (4, 7), (7, 4), (0, 1)]
            .iter()
            .map(|&(control, target)| Gate::Cnot { control, target })
            .collect();
        assert_eq!(c.gates(), expected.as_slice());
    }

    #[test]
    fn up_worked_example() {
        let a = grid();
        let p = steiner_up_example();
        assert!(p.is_upper_triangular());
        let mut state = EliminationState::new(&p, &a).unwrap();
        let rank: Vec<usize> = (0..9).collect();
        steiner_up(&mut state, 8, &VertexSet::full(9), &VertexSet::empty(9), &rank).unwrap();
        assert_eq!(state.ops(), ops(&[(8, 3), (8, 7), (3, 2), (7, 4), (8, 7), (8, 3)]));
        assert_eq!(state.matrix().column(8).ones().collect::<Vec<_>>(), vec![8]);
        assert!(state.matrix().is_upper_triangular());
    }

    #[test]
    fn trivial_columns_record_nothing() {
        let a = grid();
        let rank: Vec<usize> = (0..9).collect();
        let mut state = EliminationState::new(&ParityMatrix::identity(9), &a).unwrap();
        for k in 0..9 {
            steiner_down(&mut state, k, &VertexSet::full(9), &rank).unwrap();
            steiner_up(&mut state, k, &VertexSet::full(9), &VertexSet::empty(9), &rank).unwrap();
        }
        assert!(state.ops().is_empty());

        // One adjacent sub-diagonal 1.
        let mut p = ParityMatrix::identity(9);
        p.set(5, 0, true);
        let mut state = EliminationState::new(&p, &a).unwrap();
        steiner_down(&mut state, 0, &VertexSet::full(9), &rank).unwrap();
        assert_eq!(state.ops(), ops(&[(0, 5)]));
    }

    #[test]
    fn full_elimination_starts_with_the_example_ops() {
        let a = grid();
        let p = steiner_down_example();
        let trace = steiner_gauss(&p, &a).unwrap();
        assert_eq!(
            &trace[..6],
            ops(&[(0, 1), (7, 4), (4, 7), (1, 2), (1, 4), (0, 1)]).as_slice()
        );
        check_trace(&p, &a, &trace);
    }

    #[test]
    fn identity_gives_empty_traces() {
        for a in [grid(), Architecture::star(4), Architecture::binary_tree(7)] {
            let id = ParityMatrix::identity(a.n());
            assert!(synthesize(&id, &a, Method::Auto).unwrap().is_empty());
            assert!(steiner_gauss_rec(&id, &a).unwrap().is_empty());
        }
    }

    #[test]
    fn errors() {
        let star = Architecture::star(4);
        assert!(matches!(
            steiner_gauss(&ParityMatrix::identity(5), &star),
            Err(RouterError::NoHamiltonianPath(_))
        ));
        assert!(matches!(
            steiner_gauss(&ParityMatrix::identity(4), &grid()),
            Err(RouterError::DimensionMismatch { matrix: 4, arch: 9 })
        ));
        let mut singular = ParityMatrix::identity(9);
        singular.set(4, 4, false);
        assert!(matches!(steiner_gauss(&singular, &grid()), Err(RouterError::Singular)));
        assert!(matches!(
            steiner_gauss_rec(&singular, &grid()),
            Err(RouterError::Singular)
        ));
    }

    #[test]
    fn grid_soundness_500() {
        let a = grid();
        let rank: Vec<usize> = (0..9).collect();
        for seed in 0..500 {
            let p = random_invertible(9, seed);
            let trace = steiner_gauss(&p, &a).unwrap();
            check_trace(&p, &a, &trace);

            // Phase one alone leaves an upper triangle.
            let mut state = EliminationState::new(&p, &a).unwrap();
            let mut remaining = VertexSet::full(9);
            for k in 0..9 {
                steiner_down(&mut state, k, &remaining, &rank).unwrap();
                remaining.remove(k);
            }
            assert!(state.matrix().is_upper_triangular());
        }
    }

    #[test]
    fn recursive_matches_on_paths() {
        for n in [2, 5, 9] {
            let a = Architecture::line(n);
            for seed in 0..30 {
                let p = random_invertible(n, seed);
                assert_eq!(steiner_gauss_rec(&p, &a).unwrap(), steiner_gauss(&p, &a).unwrap());
            }
        }
    }

    #[test]
    fn recursive_on_trees_without_paths() {
        let star = Architecture::star(4);
        for seed in 0..20 {
            let p = random_invertible(5, seed);
            check_trace(&p, &star, &steiner_gauss_rec(&p, &star).unwrap());
        }
        let tree = Architecture::binary_tree(11);
        for seed in 0..50 {
            let p = random_invertible(11, seed);
            check_trace(&p, &tree, &steiner_gauss_rec(&p, &tree).unwrap());
            let seeded = steiner_gauss_rec_with(&p, &tree, SpanningChoice::Seeded(seed)).unwrap();
            check_trace(&p, &tree, &seeded);
        }
    }

    #[test]
    fn tree_paths() {
        let a = Architecture::binary_tree(7);
        let spanning = crate::arch::bfs_spanning_tree(&a, 0);
        let t = crate::arch::dft_postorder(&a, 6, &spanning).unwrap();
        let p = tree_path(&t, 3, 4);
        assert_eq!(p, vec![3, 1, 4]);
        assert_eq!(tree_path(&t, 5, 5), vec![5]);
    }

    fn arb_graph() -> impl Strategy<Value = Architecture> {
        // Random connected graphs: a random tree plus extra edges.
        (3usize..12, any::<u64>(), 0usize..8).prop_map(|(n, seed, extra)| {
            let mut rng = seeded(seed);
            let mut edges = Vec::new();
            for v in 1..n {
                edges.push((rng.gen_range(0..v), v));
            }
            for _ in 0..extra {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                if u != v && !edges.contains(&(u.min(v), u.max(v))) && !edges.contains(&(u.max(v), u.min(v))) {
                    edges.push((u.min(v), u.max(v)));
                }
            }
            Architecture::new("random", n, &edges, None).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn recursive_router_is_sound(a in arb_graph(), seed in any::<u64>(), choice_seed in proptest::option::of(any::<u64>())) {
            let p = random_invertible(a.n(), seed);
            let choice = choice_seed.map_or(SpanningChoice::Lowest, SpanningChoice::Seeded);
            let trace = steiner_gauss_rec_with(&p, &a, choice).unwrap();
            check_trace(&p, &a, &trace);
        }

        #[test]
        fn steiner_up_keeps_upper_triangle(seed in any::<u64>()) {
            let a = grid();
            let rank: Vec<usize> = (0..9).collect();
            let mut state = EliminationState::new(&random_invertible(9, seed), &a).unwrap();
            let mut remaining = VertexSet::full(9);
            for k in 0..9 {
                steiner_down(&mut state, k, &remaining, &rank).unwrap();
                remaining.remove(k);
            }
            let mut remaining = VertexSet::full(9);
            for k in (0..9).rev() {
                steiner_up(&mut state, k, &remaining, &VertexSet::empty(9), &rank).unwrap();
                prop_assert!(state.matrix().is_upper_triangular());
                remaining.remove(k);
            }
            prop_assert!(state.matrix().is_identity());
        }
    }
}
