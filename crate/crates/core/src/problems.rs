//! Test-problem generators: four classical discrete ill-conditioned systems
//! (shaw, heat, phillips, gravity), each returning the triple (A, b, u*).

use std::collections::BTreeMap;
use std::f64::consts::PI;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Vector};

/// A generated problem: square system A u = b with known exact solution u*.
#[derive(Clone, Debug)]
pub struct ProblemInstance {
    pub name: String,
    pub a: DenseMatrix,
    pub b: Vector,
    pub u_star: Vector,
    pub params: BTreeMap<String, f64>,
}

/// Source constants of the one-dimensional image model: two Gaussian humps
/// with intensity a, width c, position x.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShawParams {
    pub a1: f64,
    pub a2: f64,
    pub c1: f64,
    pub c2: f64,
    pub x1: f64,
    pub x2: f64,
}

impl ShawParams {
    /// Symmetric preset: equal humps mirrored about 0.
    pub fn symmetric() -> Self {
        Self { a1: 1.0, a2: 1.0, c1: 4.0, c2: 4.0, x1: 0.5, x2: -0.5 }
    }

    /// Asymmetric preset: the classical unequal-hump constants.
    pub fn asymmetric() -> Self {
        Self { a1: 2.0, a2: 1.0, c1: 6.0, c2: 2.0, x1: 0.8, x2: -0.5 }
    }

    /// Preset by name: "shaw-sym" or "shaw-asym".
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "shaw-sym" => Ok(Self::symmetric()),
            "shaw-asym" => Ok(Self::asymmetric()),
            _ => Err(Error::InvalidParameter(format!(
                "unknown shaw preset '{name}' (expected shaw-sym or shaw-asym)"
            ))),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.c1 <= 0.0 || self.c2 <= 0.0 {
            return Err(Error::InvalidParameter(
                "shaw widths c1, c2 must be positive".into(),
            ));
        }
        Ok(())
    }

    fn u_star(&self, x: f64) -> f64 {
        self.a1 * (-self.c1 * (x - self.x1).powi(2)).exp()
            + self.a2 * (-self.c2 * (x - self.x2).powi(2)).exp()
    }
}

fn shaw_kernel(s: f64, x: f64) -> f64 {
    let psi = PI * (s.sin() + x.sin());
    let c = (s.cos() + x.cos()).powi(2);
    // sinc has a removable singularity at psi = 0
    let sinc2 = if psi == 0.0 { 1.0 } else { (psi.sin() / psi).powi(2) };
    c * sinc2
}

/// One-dimensional image restoration: midpoint quadrature-collocation of the
/// Fredholm kernel on [-pi/2, pi/2], with b := A u*.
pub fn shaw(n: usize, params: ShawParams) -> Result<ProblemInstance> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidDimension(format!(
            "shaw needs even n >= 2, got {n}"
        )));
    }
    params.validate()?;
    let h = PI / n as f64;
    // collocation at the grid points, quadrature at the cell midpoints
    let s: Vec<f64> = (1..=n).map(|i| -PI / 2.0 + i as f64 * h).collect();
    let xm: Vec<f64> = (1..=n).map(|j| -PI / 2.0 + (j as f64 - 0.5) * h).collect();
    let a = Array2::from_shape_fn((n, n), |(i, j)| h * shaw_kernel(s[i], xm[j]));
    let a = DenseMatrix::from_array(a)?;
    let u_star = Vector::from_fn(n, |j| params.u_star(xm[j]))?;
    let b = a.matvec(&u_star);
    let params_map = BTreeMap::from([
        ("a1".into(), params.a1),
        ("a2".into(), params.a2),
        ("c1".into(), params.c1),
        ("c2".into(), params.c2),
        ("x1".into(), params.x1),
        ("x2".into(), params.x2),
    ]);
    Ok(ProblemInstance { name: "shaw".into(), a, b, u_star, params: params_map })
}

fn heat_kernel(tau: f64, kappa: f64) -> f64 {
    if tau <= 0.0 {
        // lim tau -> 0+ is 0: the exponential dominates the tau^(-3/2) pole
        0.0
    } else {
        (-1.0 / (4.0 * kappa * kappa * tau)).exp() / (2.0 * kappa * PI.sqrt() * tau.powf(1.5))
    }
}

fn heat_u_star(t: f64) -> f64 {
    if t < 0.1 {
        75.0 * t * t
    } else if t < 0.15 {
        0.75 + (20.0 * t - 2.0) * (3.0 - 20.0 * t)
    } else if t <= 0.5 {
        0.75 * (2.0 * (3.0 - 20.0 * t)).exp()
    } else {
        0.0
    }
}

/// Inverse heat conduction: midpoint rule for the Volterra convolution kernel
/// on [0, 1]; the matrix is lower-triangular Toeplitz. b := A u*.
pub fn heat(n: usize, kappa: f64) -> Result<ProblemInstance> {
    if n < 4 {
        return Err(Error::InvalidDimension(format!("heat needs n >= 4, got {n}")));
    }
    if kappa <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "heat needs kappa > 0, got {kappa}"
        )));
    }
    let h = 1.0 / n as f64;
    // a_ij = h * K(s_i - t_j*) depends only on i - j: one kernel column suffices
    let col: Vec<f64> = (0..n)
        .map(|k| h * heat_kernel((k as f64 + 0.5) * h, kappa))
        .collect();
    let a = Array2::from_shape_fn((n, n), |(i, j)| if j <= i { col[i - j] } else { 0.0 });
    let a = DenseMatrix::from_array(a)?;
    let u_star = Vector::from_fn(n, |j| heat_u_star((j as f64 + 0.5) * h))?;
    let b = a.matvec(&u_star);
    let params_map = BTreeMap::from([("kappa".into(), kappa)]);
    Ok(ProblemInstance { name: "heat".into(), a, b, u_star, params: params_map })
}

// 8-point Gauss-Legendre nodes and weights on [-1, 1].
const GL_X: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_W: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_0,
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

fn phillips_u_star(t: f64) -> f64 {
    if t.abs() < 3.0 { 1.0 + (PI * t / 3.0).cos() } else { 0.0 }
}

fn phillips_b(s: f64) -> f64 {
    let a = s.abs();
    if a < 6.0 {
        (6.0 - a) * (1.0 + 0.5 * (PI * s / 3.0).cos()) + 9.0 / (2.0 * PI) * (PI * a / 3.0).sin()
    } else {
        0.0
    }
}

/// Integral of f over cell i of the [-6, 6] grid by 8-point Gauss-Legendre.
fn phillips_cell_integral(i: usize, h: f64, f: impl Fn(f64) -> f64) -> f64 {
    let lo = -6.0 + i as f64 * h;
    let mut tot = 0.0;
    for p in 0..8 {
        let t = lo + 0.5 * h * (GL_X[p] + 1.0);
        tot += 0.5 * h * GL_W[p] * f(t);
    }
    tot
}

/// Galerkin discretization with orthonormal box functions on [-6, 6] of the
/// even convolution kernel K(s, x) = u*(s - x); A is symmetric Toeplitz and
/// banded by the kernel support |s - x| < 3. The closed-form b of the model
/// is projected onto the same basis. n must be divisible by 4 so the kernel
/// and data kinks land on cell boundaries.
pub fn phillips(n: usize) -> Result<ProblemInstance> {
    if n < 4 || n % 4 != 0 {
        return Err(Error::InvalidDimension(format!(
            "phillips needs n >= 4 divisible by 4, got {n}"
        )));
    }
    let h = 12.0 / n as f64;
    let band = (3.0 / h).ceil() as usize + 1;
    // The double cell integral of u*(s - x) depends only on |i - j|: evaluate
    // one offset per band entry with a tensor Gauss-Legendre rule.
    let mut tk = vec![0.0f64; n];
    for (k, t) in tk.iter_mut().enumerate() {
        if k > band {
            break;
        }
        let mut tot = 0.0;
        for p in 0..8 {
            let sig = 0.5 * h * (GL_X[p] + 1.0);
            let wp = 0.5 * h * GL_W[p];
            for q in 0..8 {
                let xi = 0.5 * h * (GL_X[q] + 1.0);
                let wq = 0.5 * h * GL_W[q];
                tot += wp * wq * phillips_u_star(k as f64 * h + sig - xi);
            }
        }
        *t = tot / h;
    }
    let a = Array2::from_shape_fn((n, n), |(i, j)| tk[i.abs_diff(j)]);
    let a = DenseMatrix::from_array(a)?;
    let scale = 1.0 / h.sqrt();
    let b = Vector::from_fn(n, |i| scale * phillips_cell_integral(i, h, phillips_b))?;
    let u_star = Vector::from_fn(n, |j| scale * phillips_cell_integral(j, h, phillips_u_star))?;
    Ok(ProblemInstance { name: "phillips".into(), a, b, u_star, params: BTreeMap::new() })
}

/// Gravity surveying: midpoint quadrature of the depth-d surface kernel with
/// source on [0, 1] and measurements on [a, b]. b := A u*.
pub fn gravity(n: usize, h_depth: f64, a_lo: f64, b_hi: f64) -> Result<ProblemInstance> {
    if n < 2 {
        return Err(Error::InvalidDimension(format!("gravity needs n >= 2, got {n}")));
    }
    if h_depth <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "gravity needs depth > 0, got {h_depth}"
        )));
    }
    if b_hi <= a_lo {
        return Err(Error::InvalidParameter(format!(
            "gravity needs b > a, got a = {a_lo}, b = {b_hi}"
        )));
    }
    let nf = n as f64;
    let x: Vec<f64> = (1..=n).map(|j| (j as f64 - 0.5) / nf).collect();
    let s: Vec<f64> = (1..=n)
        .map(|i| a_lo + (b_hi - a_lo) * (i as f64 - 0.5) / nf)
        .collect();
    let a = Array2::from_shape_fn((n, n), |(i, j)| {
        let d = s[i] - x[j];
        (1.0 / nf) * h_depth / (h_depth * h_depth + d * d).powf(1.5)
    });
    let a = DenseMatrix::from_array(a)?;
    let u_star = Vector::from_fn(n, |j| (PI * x[j]).sin() + 0.5 * (2.0 * PI * x[j]).sin())?;
    let b = a.matvec(&u_star);
    let params_map = BTreeMap::from([
        ("h_depth".into(), h_depth),
        ("a".into(), a_lo),
        ("b".into(), b_hi),
    ]);
    Ok(ProblemInstance { name: "gravity".into(), a, b, u_star, params: params_map })
}
