//! Unconstrained synthesis baselines: plain Gauss-Jordan and the
//! Patel-Markov-Hayes block heuristic.
//!
//! Every function here returns an *elimination trace*: the row operations
//! which, applied in order, reduce the input to the identity. The CNOT
//! circuit realising the input is that trace read backwards.

use std::collections::HashMap;

use rand::Rng;

use super::{MatrixError, ParityMatrix, RowOp};
use crate::rng::seeded;

/// A random invertible matrix built from `2n²` random row additions
/// applied to the identity.
pub fn random_invertible(n: usize, seed: u64) -> ParityMatrix {
    let mut m = ParityMatrix::identity(n);
    if n < 2 {
        return m;
    }
    let mut rng = seeded(seed);
    for _ in 0..2 * n * n {
        let src = rng.gen_range(0..n);
        let mut tgt = rng.gen_range(0..n - 1);
        if tgt >= src {
            tgt += 1;
        }
        m.add_row_unchecked(src, tgt);
    }
    m
}

/// Gauss-Jordan elimination with no connectivity constraint.
///
/// Pivot choice is the lowest row index at or below the diagonal holding a 1;
/// the pivot row is added into the diagonal row instead of swapping.
pub fn gauss_synthesize(p: &ParityMatrix) -> Result<Vec<RowOp>, MatrixError> {
    let n = p.n();
    let mut m = p.clone();
    let mut ops = Vec::new();
    for col in 0..n {
        if !m.get(col, col) {
            let pivot = (col + 1..n).find(|&r| m.get(r, col)).ok_or(MatrixError::Singular)?;
            m.add_row_unchecked(pivot, col);
            ops.push(RowOp::new(pivot, col));
        }
        for r in 0..n {
            if r != col && m.get(r, col) {
                m.add_row_unchecked(col, r);
                ops.push(RowOp::new(col, r));
            }
        }
    }
    debug_assert!(m.is_identity());
    Ok(ops)
}

/// Default section width for [`pmh_synthesize`]: `⌈log2(n) / 2⌉`, at least 1.
pub fn default_pmh_block_size(n: usize) -> usize {
    if n <= 1 {
        return 1;
    }
    ((n as f64).log2() / 2.0).ceil().max(1.0) as usize
}

/// Patel-Markov-Hayes synthesis.
///
/// Columns are split into sections of `block_size`; within a section,
/// duplicate sub-row patterns are cancelled against their first occurrence
/// before ordinary elimination clears what remains. The lower pass runs on
/// the matrix and then on its transpose, whose row operations are column
/// operations on the original.
pub fn pmh_synthesize(p: &ParityMatrix, block_size: usize) -> Result<Vec<RowOp>, MatrixError> {
    let block_size = block_size.clamp(1, 64);
    let mut m = p.clone();
    let lower = lower_pass(&mut m, block_size)?;
    let mut mt = m.transpose();
    let upper = lower_pass(&mut mt, block_size)?;
    debug_assert!(mt.is_identity());

    // lower·P = U and M·Uᵀ = I give U⁻¹ = Mᵀ, i.e. the transposed upper ops in reverse.
    let mut ops = lower;
    ops.extend(upper.into_iter().rev().map(RowOp::transposed));
    Ok(ops)
}

/// Clears everything below the diagonal, leaving `m` upper triangular with unit diagonal.
fn lower_pass(m: &mut ParityMatrix, block_size: usize) -> Result<Vec<RowOp>, MatrixError> {
    let n = m.n();
    let mut ops = Vec::new();
    let mut start = 0;
    while start < n {
        let end = (start + block_size).min(n);

        let mut seen: HashMap<u64, usize> = HashMap::new();
        for row in start..n {
            let pattern = m.row(row).window(start, end);
            if pattern == 0 {
                continue;
            }
            match seen.get(&pattern) {
                Some(&first) => {
                    m.add_row_unchecked(first, row);
                    ops.push(RowOp::new(first, row));
                }
                None => {
                    seen.insert(pattern, row);
                }
            }
        }

        for col in start..end {
            let mut diag = m.get(col, col);
            for row in col + 1..n {
                if !m.get(row, col) {
                    continue;
                }
                if !diag {
                    m.add_row_unchecked(row, col);
                    ops.push(RowOp::new(row, col));
                    diag = true;
                }
                m.add_row_unchecked(col, row);
                ops.push(RowOp::new(col, row));
            }
            if !diag {
                return Err(MatrixError::Singular);
            }
        }
        start = end;
    }
    Ok(ops)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn replay(p: &ParityMatrix, ops: &[RowOp]) -> ParityMatrix {
        let mut m = p.clone();
        m.apply_ops(ops).unwrap();
        m
    }

    #[test]
    fn random_invertible_small_cases() {
        assert_eq!(random_invertible(1, 42), ParityMatrix::identity(1));
        let m = random_invertible(3, 7);
        assert_eq!(m.rank(), 3);
        assert_eq!(m, random_invertible(3, 7));
        assert_ne!(random_invertible(8, 1), random_invertible(8, 2));
    }

    #[test]
    fn gauss_trivial_cases() {
        assert!(gauss_synthesize(&ParityMatrix::identity(5)).unwrap().is_empty());
        let m = ParityMatrix::from_bits(&[[1, 0], [1, 1]]).unwrap();
        assert_eq!(gauss_synthesize(&m).unwrap(), vec![RowOp::new(0, 1)]);
    }

    #[test]
    fn gauss_replays_to_identity() {
        for seed in 0..50 {
            let p = random_invertible(6, seed);
            let ops = gauss_synthesize(&p).unwrap();
            assert!(replay(&p, &ops).is_identity());
        }
    }

    #[test]
    fn singular_inputs_are_rejected() {
        let m = ParityMatrix::from_bits(&[[1, 1, 0], [1, 1, 0], [0, 0, 1]]).unwrap();
        assert_eq!(gauss_synthesize(&m), Err(MatrixError::Singular));
        assert_eq!(pmh_synthesize(&m, 2), Err(MatrixError::Singular));
    }

    #[test]
    fn pmh_replays_to_identity() {
        assert!(pmh_synthesize(&ParityMatrix::identity(9), 2).unwrap().is_empty());
        for n in [2, 5, 9, 16, 20] {
            for block in [1, 2, 3] {
                for seed in 0..20 {
                    let p = random_invertible(n, seed);
                    let ops = pmh_synthesize(&p, block).unwrap();
                    assert!(replay(&p, &ops).is_identity(), "n={n} block={block} seed={seed}");
                }
            }
        }
    }

    #[test]
    fn default_block_size() {
        assert_eq!(default_pmh_block_size(1), 1);
        assert_eq!(default_pmh_block_size(2), 1);
        assert_eq!(default_pmh_block_size(9), 2);
        assert_eq!(default_pmh_block_size(16), 2);
        assert_eq!(default_pmh_block_size(20), 3);
    }

    #[test]
    fn pmh_beats_gauss_on_average() {
        let (mut pmh, mut gauss) = (0, 0);
        for seed in 0..200 {
            let p = random_invertible(9, seed);
            pmh += pmh_synthesize(&p, default_pmh_block_size(9)).unwrap().len();
            gauss += gauss_synthesize(&p).unwrap().len();
        }
        assert!(pmh <= gauss, "pmh {pmh} gauss {gauss}");
    }
}
