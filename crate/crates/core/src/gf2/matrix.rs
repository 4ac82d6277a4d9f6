use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::BitVec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("row index {index} out of range for {n} rows")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("row operation adds row {0} to itself")]
    SameRow(usize),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix must be square and non-empty (got {rows} rows, row {row} has {cols} columns)")]
    NotSquare { rows: usize, row: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cannot parse matrix: {0}")]
    Parse(String),
}

/// The primitive operation `R_tgt := R_tgt + R_src`.
///
/// Applied to a parity matrix it is the effect of post-composing
/// `CNOT(control = src, target = tgt)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RowOp {
    pub src: usize,
    pub tgt: usize,
}

impl RowOp {
    pub const fn new(src: usize, tgt: usize) -> Self {
        Self { src, tgt }
    }

    /// Checks the operation against an `n`-row matrix.
    pub fn validate(&self, n: usize) -> Result<(), MatrixError> {
        for index in [self.src, self.tgt] {
            if index >= n {
                return Err(MatrixError::IndexOutOfRange { index, n });
            }
        }
        if self.src == self.tgt {
            return Err(MatrixError::SameRow(self.src));
        }
        Ok(())
    }

    /// The same pair with the roles swapped (the transpose of the elementary matrix).
    pub const fn transposed(self) -> Self {
        Self {
            src: self.tgt,
            tgt: self.src,
        }
    }
}

impl fmt::Display for RowOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.src, self.tgt)
    }
}

/// Square matrix over GF(2) describing the action of a CNOT circuit on basis states.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ParityMatrix {
    rows: Vec<BitVec>,
}

impl ParityMatrix {
    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "parity matrices have at least one row");
        Self {
            rows: (0..n).map(|i| BitVec::unit(n, i)).collect(),
        }
    }

    pub fn from_rows(rows: Vec<BitVec>) -> Result<Self, MatrixError> {
        let n = rows.len();
        if n == 0 {
            return Err(MatrixError::NotSquare {
                rows: 0,
                row: 0,
                cols: 0,
            });
        }
        if let Some((row, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(MatrixError::NotSquare {
                rows: n,
                row,
                cols: r.len(),
            });
        }
        Ok(Self { rows })
    }

    /// Builds a matrix from rows of `0`/`1` integers.
    pub fn from_bits<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self, MatrixError> {
        let rows = rows
            .iter()
            .map(|r| {
                let bits = r.as_ref();
                if let Some(&b) = bits.iter().find(|&&b| b > 1) {
                    return Err(MatrixError::Parse(format!("entry {b} is not a bit")));
                }
                Ok(BitVec::from_bools(&bits.iter().map(|&b| b == 1).collect::<Vec<_>>()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_rows(rows)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.rows[row].get(col)
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.rows[row].set(col, value);
    }

    #[inline]
    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    /// Column `c` as a vector.
    pub fn column(&self, c: usize) -> BitVec {
        let mut v = BitVec::zeros(self.n());
        for (r, row) in self.rows.iter().enumerate() {
            if row.get(c) {
                v.set(r, true);
            }
        }
        v
    }

    /// Applies `op`, validating indices first.
    pub fn row_add(&mut self, op: RowOp) -> Result<(), MatrixError> {
        op.validate(self.n())?;
        self.add_row_unchecked(op.src, op.tgt);
        Ok(())
    }

    /// Returns a copy with `op` applied.
    pub fn with_row_add(&self, op: RowOp) -> Result<Self, MatrixError> {
        let mut m = self.clone();
        m.row_add(op)?;
        Ok(m)
    }

    /// Applies every operation in order.
    pub fn apply_ops(&mut self, ops: &[RowOp]) -> Result<(), MatrixError> {
        for &op in ops {
            self.row_add(op)?;
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn add_row_unchecked(&mut self, src: usize, tgt: usize) {
        debug_assert_ne!(src, tgt);
        let (s, t) = if src < tgt {
            let (lo, hi) = self.rows.split_at_mut(tgt);
            (&lo[src], &mut hi[0])
        } else {
            let (lo, hi) = self.rows.split_at_mut(src);
            (&hi[0], &mut lo[tgt])
        };
        t.xor_assign(s);
    }

    pub fn is_identity(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, r)| r.count_ones() == 1 && r.get(i))
    }

    pub fn is_upper_triangular(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, r)| r.first_one().is_none_or(|c| c >= i))
    }

    /// Upper-triangularity with rows and columns ordered by `rank[v]` instead of `v`.
    pub fn is_upper_triangular_under(&self, rank: &[usize]) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, r)| r.ones().all(|c| rank[c] >= rank[i]))
    }

    /// Rank over GF(2) by plain elimination.
    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let n = self.n();
        let mut rank = 0;
        for col in 0..n {
            let Some(pivot) = (rank..n).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(rank, pivot);
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.n()
    }

    pub fn inverse(&self) -> Result<Self, MatrixError> {
        let n = self.n();
        let mut work = self.rows.clone();
        let mut inv = Self::identity(n).rows;
        for col in 0..n {
            let pivot = (col..n).find(|&r| work[r].get(col)).ok_or(MatrixError::Singular)?;
            work.swap(col, pivot);
            inv.swap(col, pivot);
            let (wp, ip) = (work[col].clone(), inv[col].clone());
            for r in 0..n {
                if r != col && work[r].get(col) {
                    work[r].xor_assign(&wp);
                    inv[r].xor_assign(&ip);
                }
            }
        }
        Ok(Self { rows: inv })
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.n() != other.n() {
            return Err(MatrixError::DimensionMismatch {
                expected: self.n(),
                found: other.n(),
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut acc = BitVec::zeros(self.n());
                for k in r.ones() {
                    acc.xor_assign(&other.rows[k]);
                }
                acc
            })
            .collect();
        Ok(Self { rows })
    }

    /// Matrix-vector product `self · x`.
    pub fn mul_vec(&self, x: &BitVec) -> BitVec {
        assert_eq!(x.len(), self.n());
        let mut out = BitVec::zeros(self.n());
        for (i, r) in self.rows.iter().enumerate() {
            if r.dot(x) {
                out.set(i, true);
            }
        }
        out
    }

    /// Row-vector product `x^T · self`.
    pub fn vec_mul(&self, x: &BitVec) -> BitVec {
        assert_eq!(x.len(), self.n());
        let mut out = BitVec::zeros(self.n());
        for i in x.ones() {
            out.xor_assign(&self.rows[i]);
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.n();
        Self {
            rows: (0..n).map(|c| self.column(c)).collect(),
        }
    }
}

impl fmt::Debug for ParityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ParityMatrix({}x{})", self.n(), self.n())?;
        fmt::Display::fmt(self, f)
    }
}

/// One row per line, entries separated by single spaces.
impl fmt::Display for ParityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            let line: Vec<&str> = (0..r.len()).map(|c| if r.get(c) { "1" } else { "0" }).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Accepts rows of `0`/`1` either space-separated or contiguous; blank lines and `#` comments
/// are ignored.
impl FromStr for ParityMatrix {
    type Err = MatrixError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let rows = s
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(|l| {
                let compact: String = l.chars().filter(|c| !c.is_whitespace() && *c != ',').collect();
                BitVec::from_bit_str(&compact).ok_or_else(|| MatrixError::Parse(format!("invalid row {l:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_rows(rows)
    }
}
