//! Experiment-level computations: log-spaced gamma grids, error metrics,
//! sweep records, L-curve tables, and sensitivity-bound reports.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{numerical_rank, svd, DenseMatrix, Vector};

/// Which solver produced a sweep record.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Tikhonov,
    Stabreg,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::Tikhonov, Method::Stabreg];

    pub fn label(&self) -> &'static str {
        match self {
            Method::Tikhonov => "tikhonov",
            Method::Stabreg => "stabreg",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tikhonov" => Ok(Method::Tikhonov),
            "stabreg" => Ok(Method::Stabreg),
            _ => Err(Error::InvalidParameter(format!(
                "unknown method '{s}' (expected tikhonov or stabreg)"
            ))),
        }
    }
}

/// The scalar quality measures of one regularized solution.
#[derive(Clone, Copy, Debug)]
pub struct ErrorMetrics {
    /// ||u* - u||
    pub abs_err_sol: f64,
    /// ||u* - u|| / ||u*||
    pub rel_err_sol: f64,
    /// ||A u* - A u||
    pub abs_err_data: f64,
    /// ||A u* - A u|| / ||A u*||
    pub rel_err_data: f64,
    /// ||A u - b_used||, against the right-hand side actually solved
    pub residual: f64,
    /// ||L u||
    pub seminorm: f64,
    /// ||u||
    pub sol_norm: f64,
}

/// One row of a gamma sweep: a method, a gamma, and the metrics there.
#[derive(Clone, Copy, Debug)]
pub struct SweepResult {
    pub gamma: f64,
    pub method: Method,
    pub abs_err_sol: f64,
    pub rel_err_sol: f64,
    pub abs_err_data: f64,
    pub rel_err_data: f64,
    pub residual: f64,
    pub seminorm: f64,
    pub sol_norm: f64,
}

impl SweepResult {
    pub fn from_metrics(gamma: f64, method: Method, m: &ErrorMetrics) -> Self {
        Self {
            gamma,
            method,
            abs_err_sol: m.abs_err_sol,
            rel_err_sol: m.rel_err_sol,
            abs_err_data: m.abs_err_data,
            rel_err_data: m.rel_err_data,
            residual: m.residual,
            seminorm: m.seminorm,
            sol_norm: m.sol_norm,
        }
    }
}

/// `count` log-uniformly spaced values from lo to hi, endpoints exact.
pub fn gamma_grid(lo: f64, hi: f64, count: usize) -> Result<Vector> {
    if !(lo > 0.0) || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "gamma grid needs 0 < lo < hi finite, got lo = {lo}, hi = {hi}"
        )));
    }
    if count < 2 {
        return Err(Error::InvalidParameter(format!(
            "gamma grid needs at least 2 points, got {count}"
        )));
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    Vector::from_fn(count, |i| {
        if i == 0 {
            lo
        } else if i == count - 1 {
            hi
        } else {
            (llo + (lhi - llo) * i as f64 / (count - 1) as f64).exp()
        }
    })
}

/// Fill every metric from its definition, with Euclidean norms throughout.
pub fn error_metrics(
    u_star: &Vector,
    u: &Vector,
    a: &DenseMatrix,
    b_used: &Vector,
    l_op: &DenseMatrix,
) -> Result<ErrorMetrics> {
    if u.len() != u_star.len() || u.len() != a.cols() || u.len() != l_op.cols() {
        return Err(Error::InvalidDimension(format!(
            "solution length {} does not match u* ({}), A columns ({}), or L columns ({})",
            u.len(),
            u_star.len(),
            a.cols(),
            l_op.cols()
        )));
    }
    if b_used.len() != a.rows() {
        return Err(Error::InvalidDimension(format!(
            "b has length {} but A has {} rows",
            b_used.len(),
            a.rows()
        )));
    }
    let sol_ref = u_star.norm();
    if sol_ref == 0.0 {
        return Err(Error::DegenerateReference(
            "exact solution has zero norm; relative errors undefined".into(),
        ));
    }
    let d_star = a.matvec(u_star);
    let data_ref = d_star.norm();
    if data_ref == 0.0 {
        return Err(Error::DegenerateReference(
            "exact data A u* has zero norm; relative errors undefined".into(),
        ));
    }
    let d = a.matvec(u);
    let abs_err_sol = u_star.sub(u).norm();
    let abs_err_data = d_star.sub(&d).norm();
    Ok(ErrorMetrics {
        abs_err_sol,
        rel_err_sol: abs_err_sol / sol_ref,
        abs_err_data,
        rel_err_data: abs_err_data / data_ref,
        residual: d.sub(b_used).norm(),
        seminorm: l_op.matvec(u).norm(),
        sol_norm: u.norm(),
    })
}

/// One L-curve sample: the residual/seminorm trade-off at a gamma.
#[derive(Clone, Copy, Debug)]
pub struct LCurvePoint {
    pub residual: f64,
    pub seminorm: f64,
    pub sol_norm: f64,
    pub gamma: f64,
}

/// Project sweep rows onto L-curve tuples, sorted by gamma ascending.
/// Diagnostic data only; no corner detection.
pub fn lcurve_points(sweeps: &[SweepResult]) -> Vec<LCurvePoint> {
    let mut pts: Vec<LCurvePoint> = sweeps
        .iter()
        .map(|s| LCurvePoint {
            residual: s.residual,
            seminorm: s.seminorm,
            sol_norm: s.sol_norm,
            gamma: s.gamma,
        })
        .collect();
    pts.sort_by(|p, q| p.gamma.total_cmp(&q.gamma));
    pts
}

/// Both sides of the data-space and solution-space sensitivity bounds for
/// one pair of solutions computed from b and b-tilde.
///
/// The solution-space fields are present only when A has full column rank;
/// otherwise `rank_deficient` is set and they are None.
#[derive(Clone, Copy, Debug)]
pub struct BoundReport {
    /// ||A (u - u-tilde)||
    pub lhs_data: f64,
    /// ||(I + gamma A A') (b - b-tilde)||
    pub rhs_data: f64,
    /// ||u - u-tilde||
    pub lhs_sol: Option<f64>,
    /// sqrt(1/lambda_n) * rhs_data
    pub rhs_sol: Option<f64>,
    /// smallest eigenvalue of A'A, i.e. sigma_min^2
    pub lambda_n: Option<f64>,
    pub rank_deficient: bool,
}

/// Evaluate the sensitivity bounds relating the solution shift to the data
/// shift at one gamma. The caller supplies the two solutions; this routine
/// only measures.
pub fn bound_report(
    a: &DenseMatrix,
    b: &Vector,
    b_tilde: &Vector,
    u_g: &Vector,
    u_g_tilde: &Vector,
    gamma: f64,
) -> Result<BoundReport> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "gamma must be finite and > 0, got {gamma}"
        )));
    }
    let (m, n) = (a.rows(), a.cols());
    if b.len() != m || b_tilde.len() != m {
        return Err(Error::InvalidDimension(format!(
            "data vectors must have length {m}, got {} and {}",
            b.len(),
            b_tilde.len()
        )));
    }
    if u_g.len() != n || u_g_tilde.len() != n {
        return Err(Error::InvalidDimension(format!(
            "solution vectors must have length {n}, got {} and {}",
            u_g.len(),
            u_g_tilde.len()
        )));
    }
    let du = u_g.sub(u_g_tilde);
    let lhs_data = a.matvec(&du).norm();
    let db = b.sub(b_tilde);
    // (I + gamma A A') db = db + gamma A (A' db)
    let rhs_vec = db.add(&a.matvec(&a.tr_matvec(&db)).scale(gamma));
    let rhs_data = rhs_vec.norm();
    let s = svd(a)?;
    let full_rank = numerical_rank(&s, None) == n && m >= n;
    if full_rank {
        let sigma_min = s.singular_values.get(n - 1);
        let lambda_n = sigma_min * sigma_min;
        Ok(BoundReport {
            lhs_data,
            rhs_data,
            lhs_sol: Some(du.norm()),
            rhs_sol: Some((1.0 / lambda_n).sqrt() * rhs_data),
            lambda_n: Some(lambda_n),
            rank_deficient: false,
        })
    } else {
        Ok(BoundReport {
            lhs_data,
            rhs_data,
            lhs_sol: None,
            rhs_sol: None,
            lambda_n: None,
            rank_deficient: true,
        })
    }
}
