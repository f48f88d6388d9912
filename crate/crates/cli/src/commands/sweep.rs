//! `stabreg sweep`: solve the configured problem across the regularization
//! parameter grid and tabulate every error measure per (gamma, method).

use std::io::Write;

use rayon::prelude::*;
use stabreg_core::analysis::{error_metrics, Method, SweepResult};
use stabreg_core::linalg::{fmt17, min_norm_solution, svd, DenseMatrix, Vector};
use stabreg_core::perturbation::apply_noise;
use stabreg_core::solvers::{
    stabreg_solve_precomputed, tikhonov_solve_precomputed, GMode, RegConfig,
};

use crate::config::ExperimentConfig;
use crate::output::{create_output, csv_fields, SWEEP_HEADER};
use crate::{CliError, Result};

/// Everything a sweep needs after the problem is set up. Shared by the
/// profiles command, which runs the same pipeline but keeps the solutions.
pub struct SweepContext {
    pub a_used: DenseMatrix,
    pub b_used: Vector,
    pub l: DenseMatrix,
    pub ata: DenseMatrix,
    pub atb: Vector,
    /// Error-metric reference: the generator's exact solution, or the
    /// minimal-norm solution of the clean system when g_mode is exact.
    pub reference: Vector,
    /// Anchor for the penalty offset g = L u under g_mode = exact.
    pub g_anchor: Option<Vector>,
}

impl SweepContext {
    pub fn build(cfg: &ExperimentConfig, n: usize) -> Result<Self> {
        let problem = cfg.build_problem_at(n)?;
        let l = cfg.build_operator_at(problem.a.cols())?;
        let (a_used, b_used) = apply_noise(&cfg.noise_spec(), &problem.a, &problem.b)?;
        let (reference, g_anchor) = match cfg.parsed_g_mode() {
            GMode::Exact | GMode::Given => {
                let s = svd(&problem.a)?;
                let udag = min_norm_solution(&s, &problem.b, None);
                (udag.clone(), Some(udag))
            }
            GMode::Zero => (problem.u_star.clone(), None),
        };
        let ata = a_used.gram();
        let atb = a_used.tr_matvec(&b_used);
        Ok(Self { a_used, b_used, l, ata, atb, reference, g_anchor })
    }

    pub fn reg_config(&self, gamma: f64) -> stabreg_core::error::Result<RegConfig> {
        match &self.g_anchor {
            Some(anchor) => RegConfig::exact_for(gamma, self.l.clone(), anchor),
            None => RegConfig::zero(gamma, self.l.clone()),
        }
    }

    pub fn solve(&self, gamma: f64, method: Method) -> stabreg_core::error::Result<Vector> {
        let reg = self.reg_config(gamma)?;
        match method {
            Method::Tikhonov => tikhonov_solve_precomputed(&self.ata, &self.atb, &reg),
            Method::Stabreg => stabreg_solve_precomputed(&self.ata, &self.atb, &reg),
        }
    }
}

/// Run one (gamma, method) cell to a result row; errors become row text.
fn run_cell(ctx: &SweepContext, gamma: f64, method: Method) -> std::result::Result<SweepResult, String> {
    let u = ctx.solve(gamma, method).map_err(|e| e.to_string())?;
    let m = error_metrics(&ctx.reference, &u, &ctx.a_used, &ctx.b_used, &ctx.l)
        .map_err(|e| e.to_string())?;
    Ok(SweepResult::from_metrics(gamma, method, &m))
}

pub fn worker_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Validation(format!("workers: {e}")))
}

pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<()> {
    let ctx = SweepContext::build(cfg, cfg.n)?;
    let gammas = cfg.gamma_values()?;
    let methods = cfg.parsed_methods();
    let tasks: Vec<(f64, Method)> = gammas
        .iter()
        .flat_map(|&g| methods.iter().map(move |&m| (g, m)))
        .collect();

    let pool = worker_pool(cfg.workers)?;
    let rows: Vec<std::result::Result<SweepResult, String>> = pool.install(|| {
        tasks.par_iter().map(|&(g, m)| run_cell(&ctx, g, m)).collect()
    });

    let mut w = create_output(&cfg.output_dir, "sweep.csv", cfg)?;
    writeln!(w, "{SWEEP_HEADER}")?;
    let mut ok_rows = 0usize;
    for (i, row) in rows.iter().enumerate() {
        match row {
            Ok(r) => {
                writeln!(
                    w,
                    "{},{},{}",
                    fmt17(r.gamma),
                    r.method.label(),
                    csv_fields(&[
                        r.abs_err_sol,
                        r.rel_err_sol,
                        r.abs_err_data,
                        r.rel_err_data,
                        r.residual,
                        r.seminorm,
                        r.sol_norm,
                    ])
                )?;
                ok_rows += 1;
            }
            Err(msg) => {
                let (g, m) = tasks[i];
                writeln!(w, "# error: gamma={} method={}: {msg}", fmt17(g), m.label())?;
            }
        }
    }
    w.flush()?;

    write_plot_script(cfg, &methods)?;
    println!("wrote {}", cfg.output_dir.join("sweep.csv").display());
    println!("wrote {}", cfg.output_dir.join("sweep.gp").display());

    if ok_rows == 0 {
        return Err(CliError::Numerical(
            "every sweep cell failed; sweep.csv carries the per-row messages".into(),
        ));
    }
    Ok(())
}

fn write_plot_script(cfg: &ExperimentConfig, methods: &[Method]) -> Result<()> {
    let panels = [
        (3, "absolute solution error"),
        (4, "relative solution error"),
        (5, "absolute data error"),
        (6, "relative data error"),
    ];
    let mut w = create_output(&cfg.output_dir, "sweep.gp", cfg)?;
    writeln!(w, "set datafile separator \",\"")?;
    writeln!(w, "set terminal pngcairo size 1200,900")?;
    writeln!(w, "set output \"sweep.png\"")?;
    writeln!(w, "set logscale xy")?;
    writeln!(w, "set xlabel \"gamma\"")?;
    writeln!(w, "set key bottom left")?;
    writeln!(w, "set multiplot layout 2,2")?;
    for (col, title) in panels {
        writeln!(w, "set title \"{title}\"")?;
        let curves: Vec<String> = methods
            .iter()
            .map(|m| {
                format!(
                    "\"sweep.csv\" using 1:(strcol(2) eq \"{label}\" ? ${col} : 1/0) \
                     with linespoints title \"{label}\"",
                    label = m.label()
                )
            })
            .collect();
        writeln!(w, "plot {}", curves.join(", \\\n     "))?;
    }
    writeln!(w, "unset multiplot")?;
    w.flush()?;
    Ok(())
}
