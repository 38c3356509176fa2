//! Semilinear algebra over K0 = Q3 or Q3(zeta4).

mod linalg;
mod matrix;
mod scalar;

pub use linalg::{
    char_poly, combine_matrices, coordinates_in, equivariant_solution_space, fixed_space,
    flatten_elem, flatten_matrix, matrix_basis, nullspace, rank, rref, solve, to_rational,
    SolutionSpace, RATIONAL_HEIGHT,
};
pub use matrix::{K0Matrix, K0Vector};
pub use scalar::{rat, K0Elem, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemilinearError {
    #[error("matrix is singular")]
    Singular,
    #[error("twist mismatch: {0} vs {1}")]
    TwistMismatch(u32, u32),
    #[error("matrices live over different K0")]
    FieldMismatch,
    #[error("characteristic polynomial is not rational at the available precision")]
    NotRational,
    #[error("cannot parse entry ({}, {}) {text:?} at offset {position}", entry.0, entry.1)]
    Parse {
        entry: (usize, usize),
        position: usize,
        text: String,
    },
}
