//! Output-file conventions shared by every subcommand: each file opens with
//! `# config: <one-line JSON>` and `# seed: <N>` comment lines, numbers are
//! printed with 17 significant digits, and reruns with an identical config
//! are bitwise identical.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use stabreg_core::linalg::fmt17;

use crate::config::ExperimentConfig;
use crate::Result;

/// Frozen sweep CSV header; a compatibility contract, never reordered.
pub const SWEEP_HEADER: &str =
    "gamma,method,abs_err_sol,rel_err_sol,abs_err_data,rel_err_data,residual,seminorm,sol_norm";

/// Creates `dir/name` with the standard comment header already written.
pub fn create_output(dir: &Path, name: &str, cfg: &ExperimentConfig) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut w = BufWriter::new(File::create(&path)?);
    write_header(&mut w, cfg)?;
    Ok(w)
}

pub fn write_header(w: &mut impl Write, cfg: &ExperimentConfig) -> Result<()> {
    writeln!(w, "# config: {}", cfg.canonical_json())?;
    writeln!(w, "# seed: {}", cfg.seed)?;
    Ok(())
}

/// Joins float fields into one 17-significant-digit CSV record.
pub fn csv_fields(values: &[f64]) -> String {
    values.iter().map(|&v| fmt17(v)).collect::<Vec<_>>().join(",")
}

pub fn output_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}
