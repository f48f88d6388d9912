//! `stabreg profiles`: componentwise solution and data reconstructions,
//! either one file per regularization parameter or, in mesh mode, one file
//! per problem dimension at a fixed parameter.

use std::io::Write;

use rayon::prelude::*;
use stabreg_core::analysis::Method;
use stabreg_core::linalg::{fmt17, Vector};

use crate::commands::sweep::{worker_pool, SweepContext};
use crate::config::ExperimentConfig;
use crate::output::create_output;
use crate::{CliError, Result};

/// Dimensions at or above this emit a memory warning.
const WARN_N: usize = 10000;

fn mesh_guard(cfg: &ExperimentConfig, n: usize) -> Result<()> {
    let gib = (n as f64) * (n as f64) * 8.0 / (1024.0f64 * 1024.0 * 1024.0);
    if n > cfg.n_cap {
        return Err(CliError::Validation(format!(
            "n = {n} exceeds the profile cap n_cap = {} (one dense {n}x{n} matrix needs \
             about {gib:.1} GiB); raise n_cap in the config to proceed",
            cfg.n_cap
        )));
    }
    if n >= WARN_N {
        eprintln!("warning: n = {n} needs about {gib:.1} GiB per dense matrix");
    }
    Ok(())
}

pub fn cmd_profiles(cfg: &ExperimentConfig) -> Result<()> {
    match (&cfg.gammas, &cfg.n_list) {
        (None, None) => Err(CliError::Validation(
            "profiles: provide an explicit parameter list (--gammas) or an n_list in the config file"
                .into(),
        )),
        (_, Some(ns)) => mesh_mode(cfg, ns.clone()),
        (Some(gs), None) => gamma_mode(cfg, gs.clone()),
    }
}

/// One solved column per method; a failed solve leaves an all-NaN column and
/// a comment line naming the failure.
struct SolvedSet {
    columns: Vec<(Method, std::result::Result<Vector, String>)>,
}

fn solve_set(ctx: &SweepContext, methods: &[Method], gamma: f64) -> SolvedSet {
    let columns = methods
        .iter()
        .map(|&m| (m, ctx.solve(gamma, m).map_err(|e| e.to_string())))
        .collect();
    SolvedSet { columns }
}

fn write_profile_pair(
    cfg: &ExperimentConfig,
    ctx: &SweepContext,
    set: &SolvedSet,
    tag: &str,
    extra_comments: &[String],
) -> Result<()> {
    let n = ctx.reference.len();
    let labels: Vec<&str> = set.columns.iter().map(|(m, _)| m.label()).collect();

    let mut w = create_output(&cfg.output_dir, &format!("solution_{tag}.csv"), cfg)?;
    for c in extra_comments {
        writeln!(w, "# {c}")?;
    }
    for (m, r) in &set.columns {
        if let Err(msg) = r {
            writeln!(w, "# error: method={}: {msg}", m.label())?;
        }
    }
    writeln!(w, "i,u_star,{}", labels.join(","))?;
    for i in 0..n {
        let mut fields = vec![format!("{}", i + 1), fmt17(ctx.reference.get(i))];
        for (_, r) in &set.columns {
            fields.push(fmt17(r.as_ref().map(|u| u.get(i)).unwrap_or(f64::NAN)));
        }
        writeln!(w, "{}", fields.join(","))?;
    }
    w.flush()?;

    let m_rows = ctx.b_used.len();
    let data_cols: Vec<Option<Vector>> = set
        .columns
        .iter()
        .map(|(_, r)| r.as_ref().ok().map(|u| ctx.a_used.matvec(u)))
        .collect();
    let mut w = create_output(&cfg.output_dir, &format!("data_{tag}.csv"), cfg)?;
    for c in extra_comments {
        writeln!(w, "# {c}")?;
    }
    writeln!(w, "i,b,{}", labels.join(","))?;
    for i in 0..m_rows {
        let mut fields = vec![format!("{}", i + 1), fmt17(ctx.b_used.get(i))];
        for col in &data_cols {
            fields.push(fmt17(col.as_ref().map(|v| v.get(i)).unwrap_or(f64::NAN)));
        }
        writeln!(w, "{}", fields.join(","))?;
    }
    w.flush()?;

    println!("wrote {}", cfg.output_dir.join(format!("solution_{tag}.csv")).display());
    println!("wrote {}", cfg.output_dir.join(format!("data_{tag}.csv")).display());
    Ok(())
}

fn gamma_mode(cfg: &ExperimentConfig, gammas: Vec<f64>) -> Result<()> {
    mesh_guard(cfg, cfg.n)?;
    let ctx = SweepContext::build(cfg, cfg.n)?;
    let methods = cfg.parsed_methods();

    let pool = worker_pool(cfg.workers)?;
    let sets: Vec<SolvedSet> = pool.install(|| {
        gammas.par_iter().map(|&g| solve_set(&ctx, &methods, g)).collect()
    });

    let mut tags = Vec::new();
    for (k, (gamma, set)) in gammas.iter().zip(&sets).enumerate() {
        let tag = format!("gamma_{}", k + 1);
        let comments = vec![format!("gamma = {}", fmt17(*gamma))];
        write_profile_pair(cfg, &ctx, set, &tag, &comments)?;
        tags.push((tag, format!("gamma = {gamma:e}")));
    }
    write_plot_script(cfg, &methods, &tags)?;
    Ok(())
}

fn mesh_mode(cfg: &ExperimentConfig, ns: Vec<usize>) -> Result<()> {
    let gamma = match cfg.gammas.as_deref() {
        Some([g]) => *g,
        _ => {
            return Err(CliError::Validation(
                "profiles: mesh mode (n_list) needs exactly one regularization parameter in gammas"
                    .into(),
            ))
        }
    };
    for &n in &ns {
        mesh_guard(cfg, n)?;
    }
    let methods = cfg.parsed_methods();
    let mut tags = Vec::new();
    // serial on purpose: each dimension may hold multiple n x n matrices
    for &n in &ns {
        let ctx = SweepContext::build(cfg, n)?;
        let set = solve_set(&ctx, &methods, gamma);
        let tag = format!("n_{n}");
        let comments = vec![format!("n = {n}"), format!("gamma = {}", fmt17(gamma))];
        write_profile_pair(cfg, &ctx, &set, &tag, &comments)?;
        tags.push((tag, format!("n = {n}")));
    }
    write_plot_script(cfg, &methods, &tags)?;
    Ok(())
}

fn write_plot_script(
    cfg: &ExperimentConfig,
    methods: &[Method],
    tags: &[(String, String)],
) -> Result<()> {
    let mut w = create_output(&cfg.output_dir, "profiles.gp", cfg)?;
    writeln!(w, "set datafile separator \",\"")?;
    writeln!(w, "set terminal pngcairo size 900,600")?;
    writeln!(w, "set xlabel \"component index\"")?;
    for (tag, title) in tags {
        writeln!(w, "set output \"solution_{tag}.png\"")?;
        writeln!(w, "set title \"solution profiles, {title}\"")?;
        let mut curves = vec![format!(
            "\"solution_{tag}.csv\" using 1:2 with lines lw 2 title \"u_star\""
        )];
        for (j, m) in methods.iter().enumerate() {
            curves.push(format!(
                "\"solution_{tag}.csv\" using 1:{} with lines title \"{}\"",
                j + 3,
                m.label()
            ));
        }
        writeln!(w, "plot {}", curves.join(", \\\n     "))?;
        writeln!(w, "set output \"data_{tag}.png\"")?;
        writeln!(w, "set title \"data reconstructions, {title}\"")?;
        let mut curves = vec![format!(
            "\"data_{tag}.csv\" using 1:2 with lines lw 2 title \"b\""
        )];
        for (j, m) in methods.iter().enumerate() {
            curves.push(format!(
                "\"data_{tag}.csv\" using 1:{} with lines title \"{}\"",
                j + 3,
                m.label()
            ));
        }
        writeln!(w, "plot {}", curves.join(", \\\n     "))?;
    }
    w.flush()?;
    println!("wrote {}", cfg.output_dir.join("profiles.gp").display());
    Ok(())
}
