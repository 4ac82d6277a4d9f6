//! Genetic search over qubit placements.
//!
//! A placement sends logical qubit `i` to physical vertex `perm[i]`, which
//! conjugates the parity matrix by the corresponding permutation. Fitness is
//! the CNOT count of the routed synthesis of the placed matrix.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::exec::Execution;
use crate::gf2::{ParityMatrix, RowOp};
use crate::rng::{derive_seed, seeded, Rng as ChaRng};
use crate::router::RouterError;

#[derive(Debug, Error)]
pub enum PlacementError {
    #[error("placement is not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("placement has {placement} entries but the matrix has {matrix} rows")]
    SizeMismatch { placement: usize, matrix: usize },
    #[error("invalid GA parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Synthesis(#[from] RouterError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Placement {
    perm: Vec<usize>,
}

impl Placement {
    pub fn identity(n: usize) -> Self {
        Self { perm: (0..n).collect() }
    }

    pub fn new(perm: Vec<usize>) -> Result<Self, PlacementError> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(PlacementError::NotAPermutation(n));
            }
        }
        Ok(Self { perm })
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// Physical vertex of logical qubit `i`.
    pub fn physical(&self, i: usize) -> usize {
        self.perm[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn inverse(&self) -> Placement {
        let mut inv = vec![0; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p] = i;
        }
        Placement { perm: inv }
    }
}

/// Genetic-algorithm hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaParams {
    pub population: usize,
    pub iterations: usize,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    pub seed: u64,
}

impl GaParams {
    pub const CROSSOVER: f64 = 0.8;
    pub const MUTATION: f64 = 0.2;

    /// Population and iteration counts by device size: 30/15 up to 9 qubits,
    /// 50/100 up to 16, 100/100 beyond.
    pub fn for_size(n: usize, seed: u64) -> Self {
        let (population, iterations) = match n {
            0..=9 => (30, 15),
            10..=16 => (50, 100),
            _ => (100, 100),
        };
        Self {
            population,
            iterations,
            crossover_prob: Self::CROSSOVER,
            mutation_prob: Self::MUTATION,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), PlacementError> {
        if self.population < 2 {
            return Err(PlacementError::InvalidParams(format!(
                "population must be at least 2, got {}",
                self.population
            )));
        }
        for (name, p) in [("crossover", self.crossover_prob), ("mutation", self.mutation_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(PlacementError::InvalidParams(format!(
                    "{name} probability {p} is outside [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

/// `result[perm[i]][perm[j]] = p[i][j]`.
pub fn apply_placement(p: &ParityMatrix, pl: &Placement) -> Result<ParityMatrix, PlacementError> {
    let n = p.n();
    if pl.len() != n {
        return Err(PlacementError::SizeMismatch {
            placement: pl.len(),
            matrix: n,
        });
    }
    let mut out = ParityMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            out.set(pl.perm[i], pl.perm[j], p.get(i, j));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct PlacementResult {
    pub placement: Placement,
    /// Elimination trace of the placed matrix, on physical qubits.
    pub trace: Vec<RowOp>,
    pub gate_count: usize,
    /// Best gate count after each generation, starting with the initial population.
    pub history: Vec<usize>,
}

type Synth<'a> = dyn Fn(&ParityMatrix) -> Result<Vec<RowOp>, RouterError> + Sync + 'a;

/// Searches for the placement whose routed synthesis of `p` uses the fewest CNOTs.
pub fn optimize_placement(
    p: &ParityMatrix,
    params: &GaParams,
    synth: &Synth<'_>,
    exec: Execution,
) -> Result<PlacementResult, PlacementError> {
    let cost = |pl: &Placement| -> Result<usize, PlacementError> { Ok(synth(&apply_placement(p, pl)?)?.len()) };
    let search = optimize_permutation(p.n(), params, &cost, exec)?;
    let trace = synth(&apply_placement(p, &search.placement)?)?;
    debug_assert_eq!(trace.len(), search.cost);
    Ok(PlacementResult {
        gate_count: trace.len(),
        placement: search.placement,
        trace,
        history: search.history,
    })
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub placement: Placement,
    pub cost: usize,
    /// Best cost after each generation, starting with the initial population.
    pub history: Vec<usize>,
}

/// Genetic minimisation of `cost` over permutations of `0..n`.
///
/// Tournament selection of size 3, order crossover, single-transposition
/// mutation and one elite. The initial population holds the identity plus
/// random permutations. Every offspring draws from its own RNG stream keyed
/// by generation and slot, so the result does not depend on `exec`. Costs
/// are cached per permutation.
pub fn optimize_permutation<E>(
    n: usize,
    params: &GaParams,
    cost: &(dyn Fn(&Placement) -> Result<usize, E> + Sync),
    exec: Execution,
) -> Result<SearchResult, E>
where
    E: From<PlacementError> + Send,
{
    params.validate()?;
    let mut cache: HashMap<Vec<usize>, usize> = HashMap::new();

    let mut init_rng = seeded(derive_seed(params.seed, "ga-init", &[]));
    let mut population = vec![(0..n).collect::<Vec<usize>>()];
    while population.len() < params.population {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut init_rng);
        population.push(perm);
    }

    let evaluate = |population: &[Vec<usize>], cache: &mut HashMap<Vec<usize>, usize>| -> Result<Vec<usize>, E> {
        let mut fresh: Vec<Vec<usize>> = population.iter().filter(|x| !cache.contains_key(*x)).cloned().collect();
        fresh.sort_unstable();
        fresh.dedup();
        let costs = exec.try_map(&fresh, |_, perm| cost(&Placement { perm: perm.clone() }))?;
        cache.extend(fresh.into_iter().zip(costs));
        Ok(population.iter().map(|x| cache[x]).collect())
    };

    let mut fitness = evaluate(&population, &mut cache)?;
    let best_of = |fitness: &[usize]| (0..fitness.len()).min_by_key(|&i| (fitness[i], i)).unwrap();
    let mut history = vec![fitness[best_of(&fitness)]];

    for generation in 0..params.iterations {
        let elite = best_of(&fitness);
        let mut next = Vec::with_capacity(params.population);
        next.push(population[elite].clone());
        for slot in 1..params.population {
            let mut rng = seeded(derive_seed(params.seed, "ga", &[generation as u64, slot as u64]));
            let a = tournament(&fitness, &mut rng);
            let b = tournament(&fitness, &mut rng);
            let mut child = if rng.gen_bool(params.crossover_prob) {
                order_crossover(&population[a], &population[b], &mut rng)
            } else {
                population[a].clone()
            };
            if n >= 2 && rng.gen_bool(params.mutation_prob) {
                let i = rng.gen_range(0..n);
                let mut j = rng.gen_range(0..n - 1);
                if j >= i {
                    j += 1;
                }
                child.swap(i, j);
            }
            next.push(child);
        }
        population = next;
        fitness = evaluate(&population, &mut cache)?;
        history.push(fitness[best_of(&fitness)]);
    }

    let best = best_of(&fitness);
    Ok(SearchResult {
        placement: Placement {
            perm: population[best].clone(),
        },
        cost: fitness[best],
        history,
    })
}

fn tournament(fitness: &[usize], rng: &mut ChaRng) -> usize {
    (0..3)
        .map(|_| rng.gen_range(0..fitness.len()))
        .min_by_key(|&i| (fitness[i], i))
        .unwrap()
}

/// OX1: copy a random slice from `a`, fill the rest with `b`'s genes in
/// order, both starting just after the slice and wrapping around.
fn order_crossover(a: &[usize], b: &[usize], rng: &mut ChaRng) -> Vec<usize> {
    let n = a.len();
    if n < 2 {
        return a.to_vec();
    }
    let (mut lo, mut hi) = (rng.gen_range(0..n), rng.gen_range(0..n));
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let mut child = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for i in lo..=hi {
        child[i] = a[i];
        used[a[i]] = true;
    }
    let mut pos = (hi + 1) % n;
    for k in 0..n {
        let gene = b[(hi + 1 + k) % n];
        if !used[gene] {
            child[pos] = gene;
            used[gene] = true;
            pos = (pos + 1) % n;
        }
    }
    child
}
