//! Dense matrix/vector types and the decompositions every other module builds on:
//! SVD, direct solve, numerical rank, condition number, minimal-norm solution.

use std::io::{self, Write};

use ndarray::{s, Array1, Array2, ShapeBuilder};
use ndarray_linalg::error::LinalgError;
use ndarray_linalg::{Solve, SVD};

use crate::error::{Error, Result};

/// Formats a value with 17 significant digits, enough to round-trip f64 exactly.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Dense row-major real matrix. Construction rejects NaN and infinite entries
/// and empty dimensions, so downstream code can assume finite data.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    data: Array2<f64>,
}

impl DenseMatrix {
    pub fn from_array(data: Array2<f64>) -> Result<Self> {
        if data.nrows() < 1 || data.ncols() < 1 {
            return Err(Error::InvalidDimension(format!(
                "matrix dimensions must be at least 1x1, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        if let Some(((i, j), v)) = data.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite(format!("matrix entry ({i}, {j}) = {v}")));
        }
        Ok(Self { data })
    }

    pub fn from_shape_fn(
        rows: usize,
        cols: usize,
        f: impl FnMut((usize, usize)) -> f64,
    ) -> Result<Self> {
        Self::from_array(Array2::from_shape_fn((rows, cols), f))
    }

    /// Builds from nested rows; every row must have the same length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidDimension("ragged rows".into()));
        }
        if m < 1 || n < 1 {
            return Err(Error::InvalidDimension(
                "matrix dimensions must be at least 1x1".into(),
            ));
        }
        Self::from_shape_fn(m, n, |(i, j)| rows[i][j])
    }

    pub fn identity(n: usize) -> Self {
        Self::from_array_unchecked(Array2::eye(n))
    }

    pub(crate) fn from_array_unchecked(data: Array2<f64>) -> Self {
        debug_assert!(data.iter().all(|v| v.is_finite()));
        Self { data }
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[(i, j)]
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_array_unchecked(self.data.t().to_owned())
    }

    pub fn matvec(&self, v: &Vector) -> Vector {
        assert_eq!(self.cols(), v.len(), "matvec dimension mismatch");
        Vector::from_array_unchecked(self.data.dot(v.as_array()))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols(), other.rows(), "matmul dimension mismatch");
        Self::from_array_unchecked(self.data.dot(&other.data))
    }

    /// AᵗA, the Gram matrix of the columns.
    pub fn gram(&self) -> Self {
        Self::from_array_unchecked(self.data.t().dot(&self.data))
    }

    /// Aᵗv without materializing the transpose.
    pub fn tr_matvec(&self, v: &Vector) -> Vector {
        assert_eq!(self.rows(), v.len(), "tr_matvec dimension mismatch");
        Vector::from_array_unchecked(self.data.t().dot(v.as_array()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    /// Plain-text dump: header line "rows cols", then one line per row of
    /// 17-significant-digit entries.
    pub fn dump(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "{} {}", self.rows(), self.cols())?;
        for row in self.data.rows() {
            let line: Vec<String> = row.iter().map(|&v| fmt17(v)).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Dense real vector with the same finiteness guarantee as [`DenseMatrix`].
#[derive(Clone, Debug, PartialEq)]
pub struct Vector {
    data: Array1<f64>,
}

impl Vector {
    pub fn from_array(data: Array1<f64>) -> Result<Self> {
        if let Some((i, v)) = data.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite(format!("vector entry {i} = {v}")));
        }
        Ok(Self { data })
    }

    pub fn from_vec(data: Vec<f64>) -> Result<Self> {
        Self::from_array(Array1::from_vec(data))
    }

    pub fn from_fn(len: usize, f: impl FnMut(usize) -> f64) -> Result<Self> {
        Self::from_array(Array1::from_shape_fn(len, f))
    }

    pub fn zeros(len: usize) -> Self {
        Self::from_array_unchecked(Array1::zeros(len))
    }

    pub(crate) fn from_array_unchecked(data: Array1<f64>) -> Self {
        debug_assert!(data.iter().all(|v| v.is_finite()));
        Self { data }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.data[i]
    }

    pub fn as_array(&self) -> &Array1<f64> {
        &self.data
    }

    pub fn as_slice(&self) -> &[f64] {
        self.data.as_slice().expect("vector is contiguous")
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.data.iter()
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        assert_eq!(self.len(), other.len(), "dot dimension mismatch");
        self.data.dot(&other.data)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "add dimension mismatch");
        Self::from_array_unchecked(&self.data + &other.data)
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "sub dimension mismatch");
        Self::from_array_unchecked(&self.data - &other.data)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::from_array_unchecked(&self.data * c)
    }

    /// Plain-text dump in the matrix format, as a column (len x 1).
    pub fn dump(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "{} 1", self.len())?;
        for &v in self.data.iter() {
            writeln!(w, "{}", fmt17(v))?;
        }
        Ok(())
    }
}

/// Thin SVD A = U diag(sigma) Vᵗ with k = min(m, n) columns in each factor and
/// singular values in non-increasing order.
#[derive(Clone, Debug)]
pub struct SvdResult {
    pub u_factor: DenseMatrix,
    pub singular_values: Vector,
    pub v_factor: DenseMatrix,
}

impl SvdResult {
    pub fn m(&self) -> usize {
        self.u_factor.rows()
    }

    pub fn n(&self) -> usize {
        self.v_factor.rows()
    }

    pub fn k(&self) -> usize {
        self.singular_values.len()
    }

    /// Default rank tolerance max(m, n) * ulp(sigma_1), the convention under
    /// which the reference rank and condition values reproduce.
    pub fn default_tol(&self) -> f64 {
        let s1 = self.singular_values.get(0);
        self.m().max(self.n()) as f64 * ulp(s1)
    }
}

/// Distance from `x` to the next representable f64 above it.
fn ulp(x: f64) -> f64 {
    debug_assert!(x >= 0.0 && x.is_finite());
    f64::from_bits(x.to_bits() + 1) - x
}

/// Copies into a new column-major array. LAPACK reads the raw buffer in
/// column-major order, so passing a row-major buffer would factor Aᵗ instead
/// of A; for singular values far below eps*sigma_1 the two runs differ by
/// many orders of magnitude, and only the untransposed one reproduces the
/// reference condition numbers.
fn to_fortran_order(a: &Array2<f64>) -> Array2<f64> {
    let mut fa = Array2::zeros(a.raw_dim().f());
    fa.assign(a);
    fa
}

/// Thin singular value decomposition of a dense matrix.
pub fn svd(a: &DenseMatrix) -> Result<SvdResult> {
    let (m, n) = (a.rows(), a.cols());
    let k = m.min(n);
    let fa = to_fortran_order(a.as_array());
    let (u, sigma, vt) = fa.svd(true, true).map_err(|_| Error::NonConvergence)?;
    let u = u.expect("U requested");
    let vt = vt.expect("Vt requested");
    let u_thin = u.slice(s![.., ..k]).to_owned();
    let v_thin = vt.slice(s![..k, ..]).t().to_owned();
    Ok(SvdResult {
        u_factor: DenseMatrix::from_array_unchecked(u_thin.as_standard_layout().to_owned()),
        singular_values: Vector::from_array_unchecked(sigma),
        v_factor: DenseMatrix::from_array_unchecked(v_thin.as_standard_layout().to_owned()),
    })
}

/// Number of singular values strictly above `tol`
/// (default: max(m, n) * ulp(sigma_1)).
pub fn numerical_rank(s: &SvdResult, tol: Option<f64>) -> usize {
    let tol = tol.unwrap_or_else(|| s.default_tol());
    s.singular_values.iter().filter(|&&x| x > tol).count()
}

/// sigma_1 / sigma_k; +inf when the smallest singular value is zero. The
/// reference problems reach condition numbers past 1e230, so an overflow to
/// +inf is an expected outcome, not an error.
pub fn condition_number(s: &SvdResult) -> f64 {
    let s1 = s.singular_values.get(0);
    let sk = s.singular_values.get(s.k() - 1);
    if sk == 0.0 {
        f64::INFINITY
    } else {
        s1 / sk
    }
}

/// Minimal-norm least-squares solution: the truncated-SVD pseudoinverse
/// applied to b, keeping only components with sigma_i > tol.
pub fn min_norm_solution(s: &SvdResult, b: &Vector, tol: Option<f64>) -> Vector {
    assert_eq!(b.len(), s.m(), "rhs length must equal matrix row count");
    let tol = tol.unwrap_or_else(|| s.default_tol());
    let r = numerical_rank(s, Some(tol));
    if r == 0 {
        return Vector::zeros(s.n());
    }
    let u_r = s.u_factor.as_array().slice(s![.., ..r]);
    let v_r = s.v_factor.as_array().slice(s![.., ..r]);
    let mut coef = u_r.t().dot(b.as_array());
    for (c, &sig) in coef
        .iter_mut()
        .zip(s.singular_values.as_slice()[..r].iter())
    {
        *c /= sig;
    }
    Vector::from_array_unchecked(v_r.dot(&coef))
}

/// Solves the square system M x = rhs by LU with partial pivoting.
pub fn solve_linear(m: &DenseMatrix, rhs: &Vector) -> Result<Vector> {
    if m.rows() != m.cols() {
        return Err(Error::InvalidDimension(format!(
            "solve_linear needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if rhs.len() != m.rows() {
        return Err(Error::InvalidDimension(format!(
            "rhs length {} does not match matrix size {}",
            rhs.len(),
            m.rows()
        )));
    }
    let fm = to_fortran_order(m.as_array());
    match fm.solve(rhs.as_array()) {
        Ok(x) => Vector::from_array(x).map_err(|_| Error::SingularToWorkingPrecision),
        Err(LinalgError::Lapack { .. }) => Err(Error::SingularToWorkingPrecision),
        Err(e) => Err(Error::InvalidDimension(e.to_string())),
    }
}
