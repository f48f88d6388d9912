//! Stabilized-regularized and Tikhonov regularization for discrete
//! ill-conditioned least-squares problems.

pub mod analysis;
pub mod error;
pub mod linalg;
pub mod operators;
pub mod perturbation;
pub mod problems;
pub mod solvers;
