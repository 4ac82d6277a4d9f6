//! Linear algebra over GF(2): packed bit vectors, parity matrices, row
//! operations and the unconstrained synthesis baselines.

mod bitvec;
mod matrix;
mod synth;

pub use bitvec::BitVec;
pub use matrix::{MatrixError, ParityMatrix, RowOp};
pub use synth::{default_pmh_block_size, gauss_synthesize, pmh_synthesize, random_invertible};
