//! Regularization operators L for the penalty term: identity and unscaled
//! discrete first/second derivative stencils.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// The n x n identity, the L = I choice of the filter-factor derivation.
pub fn identity_operator(n: usize) -> Result<DenseMatrix> {
    if n < 1 {
        return Err(Error::InvalidDimension("identity operator needs n >= 1".into()));
    }
    Ok(DenseMatrix::identity(n))
}

/// (n-1) x n forward-difference operator with rows (-1, 1).
pub fn first_derivative_operator(n: usize) -> Result<DenseMatrix> {
    if n < 2 {
        return Err(Error::InvalidDimension(
            "first derivative operator needs n >= 2".into(),
        ));
    }
    let mut l = Array2::zeros((n - 1, n));
    for i in 0..n - 1 {
        l[(i, i)] = -1.0;
        l[(i, i + 1)] = 1.0;
    }
    Ok(DenseMatrix::from_array(l).expect("stencil entries are finite"))
}

/// (n-2) x n second-difference operator with rows (1, -2, 1).
pub fn second_derivative_operator(n: usize) -> Result<DenseMatrix> {
    if n < 3 {
        return Err(Error::InvalidDimension(
            "second derivative operator needs n >= 3".into(),
        ));
    }
    let mut l = Array2::zeros((n - 2, n));
    for i in 0..n - 2 {
        l[(i, i)] = 1.0;
        l[(i, i + 1)] = -2.0;
        l[(i, i + 2)] = 1.0;
    }
    Ok(DenseMatrix::from_array(l).expect("stencil entries are finite"))
}

/// Operator selected by derivative order d in {0, 1, 2}.
pub fn derivative_operator(n: usize, d: u8) -> Result<DenseMatrix> {
    match d {
        0 => identity_operator(n),
        1 => first_derivative_operator(n),
        2 => second_derivative_operator(n),
        _ => Err(Error::InvalidParameter(format!(
            "derivative order must be 0, 1, or 2, got {d}"
        ))),
    }
}
