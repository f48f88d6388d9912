//! Data-perturbation models: seeded white noise, correlated (filtered) white
//! noise applied to both the matrix and the data, and deterministic smoothing.
//!
//! Randomness contract: ChaCha8 seeded by a u64, standard-normal draws via
//! the ziggurat transform. Same inputs and seed give bitwise-identical output
//! on every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Vector};

/// Which perturbation model to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseKind {
    White,
    FilteredWhite,
    Smoothing,
    None,
}

/// A perturbation request. `kind` selects which of the remaining fields are
/// read; the others are ignored.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub eta: f64,
    pub a_coeff: f64,
    pub mu: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn none() -> Self {
        Self { kind: NoiseKind::None, eta: 0.0, a_coeff: 0.0, mu: 0.0, seed: 0 }
    }

    pub fn white(eta: f64, seed: u64) -> Self {
        Self { kind: NoiseKind::White, eta, a_coeff: 0.0, mu: 0.0, seed }
    }

    pub fn filtered_white(eta: f64, a_coeff: f64, seed: u64) -> Self {
        Self { kind: NoiseKind::FilteredWhite, eta, a_coeff, mu: 0.0, seed }
    }

    pub fn smoothing(mu: f64) -> Self {
        Self { kind: NoiseKind::Smoothing, eta: 0.0, a_coeff: 0.0, mu, seed: 0 }
    }
}

fn normal_draws(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "noise deviation eta must be finite and >= 0, got {eta}"
        )));
    }
    Ok(())
}

/// Add independent N(0, eta^2) noise to each entry of b.
pub fn white_noise(b: &Vector, eta: f64, seed: u64) -> Result<Vector> {
    check_eta(eta)?;
    let eps = normal_draws(b.len(), seed);
    Vector::from_fn(b.len(), |i| b.get(i) + eta * eps[i])
}

/// Perturb A and b with one shared AR(1) noise sequence:
/// e_1 = eta*eps_1, e_i = a*e_{i-1} + eta*eps_i, then row i of A and entry i
/// of b each receive e_i.
pub fn filtered_white_noise(
    a_mat: &DenseMatrix,
    b: &Vector,
    eta: f64,
    a_coeff: f64,
    seed: u64,
) -> Result<(DenseMatrix, Vector)> {
    check_eta(eta)?;
    if !(0.0..=1.0).contains(&a_coeff) {
        return Err(Error::InvalidParameter(format!(
            "filtered-noise coefficient must lie in [0, 1], got {a_coeff}"
        )));
    }
    let m = a_mat.rows();
    if b.len() != m {
        return Err(Error::InvalidDimension(format!(
            "b has length {} but A has {} rows",
            b.len(),
            m
        )));
    }
    let eps = normal_draws(m, seed);
    let mut e = vec![0.0f64; m];
    for i in 0..m {
        e[i] = if i == 0 { eta * eps[0] } else { a_coeff * e[i - 1] + eta * eps[i] };
    }
    let mut a_t = a_mat.as_array().clone();
    for (i, mut row) in a_t.rows_mut().into_iter().enumerate() {
        row.mapv_inplace(|x| x + e[i]);
    }
    let a_t = DenseMatrix::from_array(a_t)?;
    let b_t = Vector::from_fn(m, |i| b.get(i) + e[i])?;
    Ok((a_t, b_t))
}

/// Deterministic smoothing: interior entries receive mu times the sum of
/// their grid neighbours (four for A, two for b); the boundary ring is left
/// unchanged.
pub fn smoothing_perturbation(
    a_mat: &DenseMatrix,
    b: &Vector,
    mu: f64,
) -> Result<(DenseMatrix, Vector)> {
    let (m, n) = (a_mat.rows(), a_mat.cols());
    if m < 3 || n < 3 || b.len() < 3 {
        return Err(Error::InvalidDimension(format!(
            "smoothing needs at least 3 rows, columns, and data entries, got {m}x{n} and {}",
            b.len()
        )));
    }
    if b.len() != m {
        return Err(Error::InvalidDimension(format!(
            "b has length {} but A has {m} rows",
            b.len()
        )));
    }
    if !mu.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "smoothing parameter must be finite, got {mu}"
        )));
    }
    let a = a_mat.as_array();
    let mut a_t = a.clone();
    for i in 1..m - 1 {
        for j in 1..n - 1 {
            a_t[[i, j]] = a[[i, j]] + mu * (a[[i - 1, j]] + a[[i + 1, j]] + a[[i, j - 1]] + a[[i, j + 1]]);
        }
    }
    let a_t = DenseMatrix::from_array(a_t)?;
    let b_t = Vector::from_fn(m, |i| {
        if i == 0 || i == m - 1 {
            b.get(i)
        } else {
            b.get(i) + mu * (b.get(i - 1) + b.get(i + 1))
        }
    })?;
    Ok((a_t, b_t))
}

/// Apply the perturbation selected by `spec` to the pair (A, b).
pub fn apply_noise(
    spec: &NoiseSpec,
    a_mat: &DenseMatrix,
    b: &Vector,
) -> Result<(DenseMatrix, Vector)> {
    match spec.kind {
        NoiseKind::None => Ok((a_mat.clone(), b.clone())),
        NoiseKind::White => Ok((a_mat.clone(), white_noise(b, spec.eta, spec.seed)?)),
        NoiseKind::FilteredWhite => {
            filtered_white_noise(a_mat, b, spec.eta, spec.a_coeff, spec.seed)
        }
        NoiseKind::Smoothing => smoothing_perturbation(a_mat, b, spec.mu),
    }
}
