//! Worked-example inputs from the elimination walkthrough, shared by unit
//! tests, the acceptance suite and the documentation.

use crate::gf2::ParityMatrix;

/// 9×9 parity matrix whose first column is cleared by `steiner_down(0)` on the
/// 3×3 grid using six row operations.
pub fn steiner_down_example() -> ParityMatrix {
    ParityMatrix::from_bits(&[
        [1, 0, 1, 1, 1, 1, 0, 0, 1],
        [0, 1, 1, 0, 1, 1, 1, 1, 0],
        [1, 0, 0, 0, 1, 1, 1, 0, 1],
        [0, 1, 0, 0, 0, 0, 0, 0, 0],
        [0, 1, 1, 1, 1, 0, 1, 1, 1],
        [0, 0, 0, 0, 1, 0, 1, 0, 0],
        [0, 0, 1, 0, 0, 1, 0, 0, 1],
        [1, 1, 1, 1, 0, 0, 1, 1, 0],
        [0, 0, 1, 0, 0, 1, 0, 1, 1],
    ])
    .expect("square")
}

/// Upper-triangular 9×9 matrix whose last column is cleared by `steiner_up(8)`.
pub fn steiner_up_example() -> ParityMatrix {
    ParityMatrix::from_bits(&[
        [1, 0, 1, 1, 1, 1, 0, 0, 0],
        [0, 1, 1, 0, 1, 1, 1, 1, 0],
        [0, 0, 1, 1, 0, 0, 1, 0, 1],
        [0, 0, 0, 1, 1, 1, 0, 1, 0],
        [0, 0, 0, 0, 1, 0, 0, 1, 1],
        [0, 0, 0, 0, 0, 1, 0, 1, 0],
        [0, 0, 0, 0, 0, 0, 1, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 1, 0],
        [0, 0, 0, 0, 0, 0, 0, 0, 1],
    ])
    .expect("square")
}

/// The 4-qubit matrix `P` of the CNOT+Rz phase-polynomial example.
pub fn phase_poly_linear_example() -> ParityMatrix {
    ParityMatrix::from_bits(&[[1, 0, 0, 0], [1, 1, 1, 0], [0, 0, 1, 0], [0, 0, 1, 1]]).expect("square")
}
