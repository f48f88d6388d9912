//! `stabreg filters`: tabulate the three filter-factor families over a
//! logarithmic singular-value grid.

use std::io::Write;

use stabreg_core::analysis::gamma_grid;
use stabreg_core::linalg::{fmt17, Vector};
use stabreg_core::solvers::{limit_filter_factors, stabreg_filter_factors, tikhonov_filter_factors};

use crate::config::ExperimentConfig;
use crate::output::{create_output, csv_fields};
use crate::Result;

/// Parameter values plotted when the config gives no explicit list.
const DEFAULT_GAMMAS: [f64; 6] = [1e-6, 1e-3, 1.0, 1e3, 1e6, 1e12];

pub fn cmd_filters(cfg: &ExperimentConfig) -> Result<()> {
    let sigma_grid = gamma_grid(cfg.sigma_lo, cfg.sigma_hi, cfg.sigma_count)?;
    let sigma = Vector::from_vec(sigma_grid.iter().copied().collect())?;
    let gammas: Vec<f64> = cfg.gammas.clone().unwrap_or_else(|| DEFAULT_GAMMAS.to_vec());

    let limit = limit_filter_factors(&sigma)?;
    let mut w = create_output(&cfg.output_dir, "filters.csv", cfg)?;
    writeln!(w, "sigma,gamma,phi_stabreg,phi_tikhonov,phi_limit")?;
    for &gamma in &gammas {
        let ps = stabreg_filter_factors(&sigma, gamma)?;
        let pt = tikhonov_filter_factors(&sigma, gamma)?;
        for i in 0..sigma.len() {
            writeln!(
                w,
                "{}",
                csv_fields(&[
                    sigma.get(i),
                    gamma,
                    ps.factors.get(i),
                    pt.factors.get(i),
                    limit.factors.get(i),
                ])
            )?;
        }
    }
    w.flush()?;

    write_plot_script(cfg, &gammas)?;
    println!("wrote {}", cfg.output_dir.join("filters.csv").display());
    println!("wrote {}", cfg.output_dir.join("filters.gp").display());
    Ok(())
}

fn write_plot_script(cfg: &ExperimentConfig, gammas: &[f64]) -> Result<()> {
    let mut w = create_output(&cfg.output_dir, "filters.gp", cfg)?;
    writeln!(w, "set datafile separator \",\"")?;
    writeln!(w, "set terminal pngcairo size 900,600")?;
    writeln!(w, "set output \"filters.png\"")?;
    writeln!(w, "set logscale xy")?;
    writeln!(w, "set xlabel \"sigma\"")?;
    writeln!(w, "set ylabel \"filter factor\"")?;
    writeln!(w, "set key bottom right")?;
    let mut curves = Vec::new();
    for &gamma in gammas {
        // the literal matches the 17-digit CSV text so the equality filter
        // selects exactly this block
        let lit = fmt17(gamma);
        curves.push(format!(
            "\"filters.csv\" using 1:($2 == {lit} ? $3 : 1/0) with lines title \"stabilized, gamma={gamma:e}\""
        ));
        curves.push(format!(
            "\"filters.csv\" using 1:($2 == {lit} ? $4 : 1/0) with lines dashtype 2 title \"tikhonov, gamma={gamma:e}\""
        ));
    }
    curves.push(
        "\"filters.csv\" using 1:5 with lines lw 2 lc rgb \"black\" title \"large-gamma limit\""
            .to_string(),
    );
    writeln!(w, "plot {}", curves.join(", \\\n     "))?;
    w.flush()?;
    Ok(())
}
