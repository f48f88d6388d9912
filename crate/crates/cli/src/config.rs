//! Experiment configuration: JSON-file schema, command-line overrides, and
//! construction of the core objects (problem, operator, noise) it describes.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use stabreg_core::analysis::{gamma_grid, Method};
use stabreg_core::linalg::DenseMatrix;
use stabreg_core::operators::derivative_operator;
use stabreg_core::perturbation::NoiseSpec;
use stabreg_core::problems::{gravity, heat, phillips, shaw, ProblemInstance, ShawParams};
use stabreg_core::solvers::GMode;

use crate::{CliError, Result};

/// Generator-specific knobs. Unset fields fall back to each generator's
/// classical defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemParams {
    /// heat: kernel parameter kappa (default 1).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    /// gravity: source depth (default 0.25).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_depth: Option<f64>,
    /// gravity: observation interval endpoints (default [0, 1]).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    /// shaw: named source preset, "shaw-sym" or "shaw-asym" (default shaw-sym).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    /// shaw: individual source constants, overriding the preset per field.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x2: Option<f64>,
}

/// Perturbation section: which model and its magnitude parameters. The RNG
/// seed comes from the top-level config seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    /// One of none | white | filtered | smoothing.
    pub kind: String,
    pub eta: f64,
    /// filtered: autoregression coefficient in [0, 1].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_coeff: Option<f64>,
    /// smoothing: blending weight, >= 0.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self { kind: "none".into(), eta: 0.0, a_coeff: None, mu: None }
    }
}

/// Full experiment description. Every field has a default, may be set in a
/// JSON config file, and (for the common ones) may be overridden by flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// One of shaw | heat | phillips | gravity.
    pub problem: String,
    pub n: usize,
    pub problem_params: ProblemParams,
    /// Regularization operator: 0 identity, 1 first difference, 2 second.
    pub operator_order: u8,
    /// "zero" or "exact": whether the penalty is anchored at the origin or at
    /// the minimal-norm solution of the clean system.
    pub g_mode: String,
    pub noise: NoiseConfig,
    pub gamma_lo: f64,
    pub gamma_hi: f64,
    pub gamma_count: usize,
    /// Explicit regularization parameter list; overrides the lo/hi/count grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gammas: Option<Vec<f64>>,
    pub methods: Vec<String>,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub workers: usize,
    /// Hard refusal cap for profile meshes (memory guard).
    pub n_cap: usize,
    /// Mesh-refinement mode for the profiles command: one output per n.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    /// Singular-value grid for the filters command.
    pub sigma_lo: f64,
    pub sigma_hi: f64,
    pub sigma_count: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problem: "shaw".into(),
            n: 64,
            problem_params: ProblemParams::default(),
            operator_order: 0,
            g_mode: "zero".into(),
            noise: NoiseConfig::default(),
            gamma_lo: 1e-5,
            gamma_hi: 1e5,
            gamma_count: 21,
            gammas: None,
            methods: vec!["tikhonov".into(), "stabreg".into()],
            seed: 0,
            output_dir: PathBuf::from("out"),
            workers: 1,
            n_cap: 32000,
            n_list: None,
            sigma_lo: 1e-4,
            sigma_hi: 1.0,
            sigma_count: 100,
        }
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub problem: Option<String>,
    pub n: Option<usize>,
    pub gamma_lo: Option<f64>,
    pub gamma_hi: Option<f64>,
    pub gamma_count: Option<usize>,
    pub gammas: Option<Vec<f64>>,
    pub noise: Option<String>,
    pub eta: Option<f64>,
    pub seed: Option<u64>,
    pub g_mode: Option<String>,
    pub operator: Option<u8>,
    pub methods: Option<Vec<String>>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    /// Builds the effective config: defaults, then the file, then the flags.
    pub fn load(config_path: Option<&Path>, ov: &Overrides) -> Result<Self> {
        let mut cfg = match config_path {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    CliError::Validation(format!("config file {}: {e}", path.display()))
                })?;
                serde_json::from_str(&text).map_err(|e| {
                    CliError::Validation(format!("config file {}: {e}", path.display()))
                })?
            }
            None => Self::default(),
        };
        ov.apply(&mut cfg);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(CliError::Validation(msg));
        match self.problem.as_str() {
            "shaw" | "heat" | "phillips" | "gravity" => {}
            other => {
                return fail(format!(
                    "problem: unknown generator '{other}' (expected shaw, heat, phillips, or gravity)"
                ))
            }
        }
        if self.n == 0 {
            return fail("n: must be at least 1".into());
        }
        if self.operator_order > 2 {
            return fail(format!(
                "operator_order: {} is not one of 0, 1, 2",
                self.operator_order
            ));
        }
        match self.g_mode.as_str() {
            "zero" | "exact" => {}
            other => return fail(format!("g_mode: unknown mode '{other}' (expected zero or exact)")),
        }
        match self.noise.kind.as_str() {
            "none" | "white" | "filtered" | "smoothing" => {}
            other => {
                return fail(format!(
                    "noise.kind: unknown kind '{other}' (expected none, white, filtered, or smoothing)"
                ))
            }
        }
        if !self.noise.eta.is_finite() || self.noise.eta < 0.0 {
            return fail(format!("noise.eta: must be finite and >= 0, got {}", self.noise.eta));
        }
        if self.noise.kind == "filtered" {
            match self.noise.a_coeff {
                Some(a) if (0.0..=1.0).contains(&a) => {}
                Some(a) => return fail(format!("noise.a_coeff: must lie in [0, 1], got {a}")),
                None => return fail("noise.a_coeff: required for filtered noise".into()),
            }
        }
        if self.noise.kind == "smoothing" {
            match self.noise.mu {
                Some(mu) if mu.is_finite() && mu >= 0.0 => {}
                Some(mu) => return fail(format!("noise.mu: must be finite and >= 0, got {mu}")),
                None => return fail("noise.mu: required for smoothing perturbations".into()),
            }
        }
        match &self.gammas {
            Some(gs) => {
                if gs.is_empty() {
                    return fail("gammas: explicit list must not be empty".into());
                }
                if let Some(bad) = gs.iter().find(|g| !g.is_finite() || **g <= 0.0) {
                    return fail(format!("gammas: entries must be finite and > 0, got {bad}"));
                }
            }
            None => {
                if !(self.gamma_lo > 0.0) || !self.gamma_lo.is_finite() {
                    return fail(format!("gamma_lo: must be finite and > 0, got {}", self.gamma_lo));
                }
                if !self.gamma_hi.is_finite() || self.gamma_hi <= self.gamma_lo {
                    return fail(format!(
                        "gamma_hi: must be finite and > gamma_lo = {}, got {}",
                        self.gamma_lo, self.gamma_hi
                    ));
                }
                if self.gamma_count < 2 {
                    return fail(format!("gamma_count: must be at least 2, got {}", self.gamma_count));
                }
            }
        }
        if self.methods.is_empty() {
            return fail("methods: at least one of tikhonov, stabreg required".into());
        }
        for m in &self.methods {
            if m.parse::<Method>().is_err() {
                return fail(format!("methods: unknown method '{m}' (expected tikhonov or stabreg)"));
            }
        }
        if self.methods.len() > Method::ALL.len() {
            return fail("methods: duplicate entries".into());
        }
        if self.methods.len() == 2 && self.methods[0] == self.methods[1] {
            return fail("methods: duplicate entries".into());
        }
        if self.workers == 0 {
            return fail("workers: must be at least 1".into());
        }
        if let Some(ns) = &self.n_list {
            if ns.is_empty() {
                return fail("n_list: must not be empty".into());
            }
            if ns.iter().any(|&n| n == 0) {
                return fail("n_list: entries must be at least 1".into());
            }
        }
        if !(self.sigma_lo > 0.0) || !self.sigma_hi.is_finite() || self.sigma_hi <= self.sigma_lo {
            return fail(format!(
                "sigma_lo/sigma_hi: need 0 < {} < {}",
                self.sigma_lo, self.sigma_hi
            ));
        }
        if self.sigma_count < 2 {
            return fail(format!("sigma_count: must be at least 2, got {}", self.sigma_count));
        }
        Ok(())
    }

    /// One-line JSON of the effective config, embedded in output headers.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serialization cannot fail")
    }

    /// The regularization parameters to visit, in run order.
    pub fn gamma_values(&self) -> Result<Vec<f64>> {
        match &self.gammas {
            Some(gs) => Ok(gs.clone()),
            None => {
                let grid = gamma_grid(self.gamma_lo, self.gamma_hi, self.gamma_count)?;
                Ok(grid.iter().copied().collect())
            }
        }
    }

    pub fn parsed_methods(&self) -> Vec<Method> {
        self.methods
            .iter()
            .map(|m| m.parse().expect("validated method label"))
            .collect()
    }

    pub fn parsed_g_mode(&self) -> GMode {
        match self.g_mode.as_str() {
            "exact" => GMode::Exact,
            _ => GMode::Zero,
        }
    }

    pub fn noise_spec(&self) -> NoiseSpec {
        match self.noise.kind.as_str() {
            "white" => NoiseSpec::white(self.noise.eta, self.seed),
            "filtered" => NoiseSpec::filtered_white(
                self.noise.eta,
                self.noise.a_coeff.unwrap_or(0.0),
                self.seed,
            ),
            "smoothing" => NoiseSpec::smoothing(self.noise.mu.unwrap_or(0.0)),
            _ => NoiseSpec::none(),
        }
    }

    /// Instantiates the configured problem at dimension `n`.
    pub fn build_problem_at(&self, n: usize) -> Result<ProblemInstance> {
        let p = &self.problem_params;
        let instance = match self.problem.as_str() {
            "shaw" => {
                let mut sp = match &p.preset {
                    Some(name) => ShawParams::preset(name)?,
                    None => ShawParams::symmetric(),
                };
                if let Some(v) = p.a1 {
                    sp.a1 = v;
                }
                if let Some(v) = p.a2 {
                    sp.a2 = v;
                }
                if let Some(v) = p.c1 {
                    sp.c1 = v;
                }
                if let Some(v) = p.c2 {
                    sp.c2 = v;
                }
                if let Some(v) = p.x1 {
                    sp.x1 = v;
                }
                if let Some(v) = p.x2 {
                    sp.x2 = v;
                }
                shaw(n, sp)?
            }
            "heat" => heat(n, p.kappa.unwrap_or(1.0))?,
            "phillips" => phillips(n)?,
            "gravity" => gravity(n, p.h_depth.unwrap_or(0.25), p.a.unwrap_or(0.0), p.b.unwrap_or(1.0))?,
            other => {
                return Err(CliError::Validation(format!("problem: unknown generator '{other}'")))
            }
        };
        Ok(instance)
    }

    pub fn build_problem(&self) -> Result<ProblemInstance> {
        self.build_problem_at(self.n)
    }

    pub fn build_operator_at(&self, n: usize) -> Result<DenseMatrix> {
        Ok(derivative_operator(n, self.operator_order)?)
    }

    pub fn build_operator(&self) -> Result<DenseMatrix> {
        self.build_operator_at(self.n)
    }
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(v) = &self.problem {
            cfg.problem = v.clone();
        }
        if let Some(v) = self.n {
            cfg.n = v;
        }
        if let Some(v) = self.gamma_lo {
            cfg.gamma_lo = v;
        }
        if let Some(v) = self.gamma_hi {
            cfg.gamma_hi = v;
        }
        if let Some(v) = self.gamma_count {
            cfg.gamma_count = v;
        }
        if let Some(v) = &self.gammas {
            cfg.gammas = Some(v.clone());
        }
        if let Some(v) = &self.noise {
            cfg.noise.kind = v.clone();
        }
        if let Some(v) = self.eta {
            cfg.noise.eta = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = &self.g_mode {
            cfg.g_mode = v.clone();
        }
        if let Some(v) = self.operator {
            cfg.operator_order = v;
        }
        if let Some(v) = &self.methods {
            cfg.methods = v.clone();
        }
        if let Some(v) = &self.out {
            cfg.output_dir = v.clone();
        }
        if let Some(v) = self.workers {
            cfg.workers = v;
        }
    }
}
