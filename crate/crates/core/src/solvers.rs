//! Regularized solvers and their spectral analysis: the classical Tikhonov
//! normal system, the stabilized-regularized augmented system, filter-factor
//! profiles, filtered SVD expansions, and the covariance/bias diagnostics.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::linalg::{solve_linear, DenseMatrix, SvdResult, Vector};

/// How the penalty target g is supplied.
///
/// `Exact` carries g = L u* built from the unperturbed exact solution; with
/// it the stabilized-regularized solution is independent of gamma on
/// consistent problems. `Zero` drops the g term entirely, which is the
/// setting used with perturbed data; no gamma-independence holds there, the
/// method acts as a spectral filter instead.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GMode {
    Zero,
    Exact,
    Given,
}

/// Regularization settings shared by both solvers: the parameter gamma, the
/// penalty matrix L (p x n), and the penalty target g.
#[derive(Clone, Debug)]
pub struct RegConfig {
    pub gamma: f64,
    pub l_op: DenseMatrix,
    pub g: Option<Vector>,
    pub g_mode: GMode,
}

impl RegConfig {
    /// Penalty with g dropped (the perturbed-data protocol).
    pub fn zero(gamma: f64, l_op: DenseMatrix) -> Result<Self> {
        let cfg = Self { gamma, l_op, g: None, g_mode: GMode::Zero };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Penalty targeting g = L u* computed from the exact solution.
    pub fn exact_for(gamma: f64, l_op: DenseMatrix, u_star: &Vector) -> Result<Self> {
        if u_star.len() != l_op.cols() {
            return Err(Error::InvalidDimension(format!(
                "u_star has length {} but L has {} columns",
                u_star.len(),
                l_op.cols()
            )));
        }
        let g = l_op.matvec(u_star);
        let cfg = Self { gamma, l_op, g: Some(g), g_mode: GMode::Exact };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Penalty with an explicitly supplied target g.
    pub fn given(gamma: f64, l_op: DenseMatrix, g: Vector) -> Result<Self> {
        let cfg = Self { gamma, l_op, g: Some(g), g_mode: GMode::Given };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gamma must be finite and > 0, got {}",
                self.gamma
            )));
        }
        if let Some(g) = &self.g {
            if g.len() != self.l_op.rows() {
                return Err(Error::InvalidDimension(format!(
                    "g has length {} but L has {} rows",
                    g.len(),
                    self.l_op.rows()
                )));
            }
        }
        Ok(())
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if self.l_op.cols() != n {
            return Err(Error::InvalidDimension(format!(
                "L has {} columns but the system has {n} unknowns",
                self.l_op.cols()
            )));
        }
        Ok(())
    }

    /// The g vector actually entering the right-hand side, if any.
    fn effective_g(&self) -> Option<&Vector> {
        match self.g_mode {
            GMode::Zero => None,
            GMode::Exact | GMode::Given => self.g.as_ref(),
        }
    }
}

fn check_system(a: &DenseMatrix, b: &Vector, cfg: &RegConfig) -> Result<()> {
    if b.len() != a.rows() {
        return Err(Error::InvalidDimension(format!(
            "b has length {} but A has {} rows",
            b.len(),
            a.rows()
        )));
    }
    cfg.check_n(a.cols())
}

/// Penalty contribution to the normal matrix and right-hand side:
/// (gamma L'L, gamma L'g).
fn penalty_terms(cfg: &RegConfig) -> (Array2<f64>, Option<Vector>) {
    let ltl = cfg.l_op.gram();
    let mut pen = ltl.as_array().clone();
    pen.mapv_inplace(|x| cfg.gamma * x);
    let rhs_term = cfg.effective_g().map(|g| cfg.l_op.tr_matvec(g).scale(cfg.gamma));
    (pen, rhs_term)
}

/// Tikhonov solution from precomputed A'A and A'b:
/// (A'A + gamma L'L) u = A'b + gamma L'g.
pub fn tikhonov_solve_precomputed(
    ata: &DenseMatrix,
    atb: &Vector,
    cfg: &RegConfig,
) -> Result<Vector> {
    let n = ata.cols();
    if ata.rows() != n || atb.len() != n {
        return Err(Error::InvalidDimension(format!(
            "A'A must be square with matching A'b, got {}x{} and {}",
            ata.rows(),
            n,
            atb.len()
        )));
    }
    cfg.validate()?;
    cfg.check_n(n)?;
    let (pen, rhs_term) = penalty_terms(cfg);
    let m = ata.as_array() + &pen;
    let mut rhs = atb.clone();
    if let Some(t) = rhs_term {
        rhs = rhs.add(&t);
    }
    solve_linear(&DenseMatrix::from_array(m)?, &rhs)
}

/// Classical Tikhonov regularization.
pub fn tikhonov_solve(a: &DenseMatrix, b: &Vector, cfg: &RegConfig) -> Result<Vector> {
    cfg.validate()?;
    check_system(a, b, cfg)?;
    tikhonov_solve_precomputed(&a.gram(), &a.tr_matvec(b), cfg)
}

/// Stabilized-regularized solution from precomputed A'A and A'b:
/// ((I + gamma A'A) A'A + gamma L'L) u = (I + gamma A'A) A'b + gamma L'g.
pub fn stabreg_solve_precomputed(
    ata: &DenseMatrix,
    atb: &Vector,
    cfg: &RegConfig,
) -> Result<Vector> {
    let n = ata.cols();
    if ata.rows() != n || atb.len() != n {
        return Err(Error::InvalidDimension(format!(
            "A'A must be square with matching A'b, got {}x{} and {}",
            ata.rows(),
            n,
            atb.len()
        )));
    }
    cfg.validate()?;
    cfg.check_n(n)?;
    let (pen, rhs_term) = penalty_terms(cfg);
    let ata_arr = ata.as_array();
    let mut m = ata_arr.dot(ata_arr);
    m.mapv_inplace(|x| cfg.gamma * x);
    m += ata_arr;
    m += &pen;
    let ata_atb = ata.matvec(atb);
    let mut rhs = atb.add(&ata_atb.scale(cfg.gamma));
    if let Some(t) = rhs_term {
        rhs = rhs.add(&t);
    }
    solve_linear(&DenseMatrix::from_array(m)?, &rhs)
}

/// The stabilized-regularized method: Tikhonov penalty plus the
/// normal-equation stabilizer.
pub fn stabreg_solve(a: &DenseMatrix, b: &Vector, cfg: &RegConfig) -> Result<Vector> {
    cfg.validate()?;
    check_system(a, b, cfg)?;
    stabreg_solve_precomputed(&a.gram(), &a.tr_matvec(b), cfg)
}

/// Singular values paired with per-component filter factors in [0, 1].
#[derive(Clone, Debug)]
pub struct FilterProfile {
    pub singular_values: Vector,
    pub factors: Vector,
}

fn check_sigma(sigma: &Vector) -> Result<()> {
    if sigma.iter().any(|&s| s < 0.0) {
        return Err(Error::InvalidParameter(
            "singular values must be nonnegative".into(),
        ));
    }
    Ok(())
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "gamma must be finite and > 0, got {gamma}"
        )));
    }
    Ok(())
}

/// Stabilized-regularized filter factors
/// phi_i = (s^2 + gamma s^4) / (s^2 + gamma s^4 + gamma).
pub fn stabreg_filter_factors(sigma: &Vector, gamma: f64) -> Result<FilterProfile> {
    check_sigma(sigma)?;
    check_gamma(gamma)?;
    let factors = Vector::from_fn(sigma.len(), |i| {
        let s2 = sigma.get(i) * sigma.get(i);
        let num = s2 + gamma * s2 * s2;
        num / (num + gamma)
    })?;
    Ok(FilterProfile { singular_values: sigma.clone(), factors })
}

/// Tikhonov filter factors phi_i = s^2 / (s^2 + gamma).
pub fn tikhonov_filter_factors(sigma: &Vector, gamma: f64) -> Result<FilterProfile> {
    check_sigma(sigma)?;
    check_gamma(gamma)?;
    let factors = Vector::from_fn(sigma.len(), |i| {
        let s2 = sigma.get(i) * sigma.get(i);
        s2 / (s2 + gamma)
    })?;
    Ok(FilterProfile { singular_values: sigma.clone(), factors })
}

/// Large-gamma limit of the stabilized-regularized factors,
/// phi_i = s^4 / (s^4 + 1).
pub fn limit_filter_factors(sigma: &Vector) -> Result<FilterProfile> {
    check_sigma(sigma)?;
    let factors = Vector::from_fn(sigma.len(), |i| {
        let s4 = sigma.get(i).powi(4);
        s4 / (s4 + 1.0)
    })?;
    Ok(FilterProfile { singular_values: sigma.clone(), factors })
}

/// Damping factors 1 - phi of the stabilized-regularized method in the
/// closed form gamma / (s^2 + gamma s^4 + gamma).
pub fn stabreg_damping_factors(sigma: &Vector, gamma: f64) -> Result<Vector> {
    check_sigma(sigma)?;
    check_gamma(gamma)?;
    Vector::from_fn(sigma.len(), |i| {
        let s2 = sigma.get(i) * sigma.get(i);
        gamma / (s2 + gamma * s2 * s2 + gamma)
    })
}

/// Damping factors 1 - phi of Tikhonov in the closed form
/// gamma / (s^2 + gamma).
pub fn tikhonov_damping_factors(sigma: &Vector, gamma: f64) -> Result<Vector> {
    check_sigma(sigma)?;
    check_gamma(gamma)?;
    Vector::from_fn(sigma.len(), |i| {
        let s2 = sigma.get(i) * sigma.get(i);
        gamma / (s2 + gamma)
    })
}

/// Filtered SVD expansion: sum over i of phi_i (u_i'b / s_i) v_i, skipping
/// zero singular values (their factor is 0 by construction).
pub fn filtered_solution(s: &SvdResult, b: &Vector, profile: &FilterProfile) -> Result<Vector> {
    if profile.factors.len() != s.k() || profile.singular_values.len() != s.k() {
        return Err(Error::InvalidDimension(format!(
            "profile has length {} but the SVD carries {} singular values",
            profile.factors.len(),
            s.k()
        )));
    }
    if b.len() != s.m() {
        return Err(Error::InvalidDimension(format!(
            "b has length {} but U has {} rows",
            b.len(),
            s.m()
        )));
    }
    let mut out = ndarray::Array1::<f64>::zeros(s.n());
    for i in 0..s.k() {
        let sv = s.singular_values.get(i);
        if sv == 0.0 {
            continue;
        }
        let ui_b = s.u_factor.as_array().column(i).dot(b.as_array());
        let coef = profile.factors.get(i) * ui_b / sv;
        out.scaled_add(coef, &s.v_factor.as_array().column(i));
    }
    Vector::from_array(out)
}

/// Worst-component variance of the stabilized-regularized estimator under
/// white noise of deviation eta:
/// eta^2 * max_i [(1 + gamma s^2) s / (s^2 + gamma s^4 + gamma)]^2,
/// the max over nonzero singular values (zero if there are none).
pub fn covariance_norm(sigma: &Vector, gamma: f64, eta: f64) -> Result<f64> {
    check_sigma(sigma)?;
    check_gamma(gamma)?;
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "eta must be finite and >= 0, got {eta}"
        )));
    }
    let mut worst = 0.0f64;
    for &sv in sigma.iter() {
        if sv == 0.0 {
            continue;
        }
        let s2 = sv * sv;
        let r = (1.0 + gamma * s2) * sv / (s2 + gamma * s2 * s2 + gamma);
        worst = worst.max(r * r);
    }
    Ok(eta * eta * worst)
}

/// Systematic deviation of the stabilized-regularized estimator from u*:
/// sum over i of (1 - phi_i) <u*, v_i> v_i.
pub fn bias_vector(s: &SvdResult, u_star: &Vector, gamma: f64) -> Result<Vector> {
    check_gamma(gamma)?;
    if u_star.len() != s.n() {
        return Err(Error::InvalidDimension(format!(
            "u_star has length {} but V has {} rows",
            u_star.len(),
            s.n()
        )));
    }
    let damping = stabreg_damping_factors(&s.singular_values, gamma)?;
    let mut out = ndarray::Array1::<f64>::zeros(s.n());
    for i in 0..s.k() {
        let vi_u = s.v_factor.as_array().column(i).dot(u_star.as_array());
        let coef = damping.get(i) * vi_u;
        out.scaled_add(coef, &s.v_factor.as_array().column(i));
    }
    Vector::from_array(out)
}
