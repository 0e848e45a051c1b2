//! Figure presets, TOML configs, CSV output and one-off queries behind the
//! `pass-sim` binary.
//!
//! Every figure is described by a [`FigureConfig`]; the built-in presets are
//! just configs, so `--dump-config` followed by `--config` reproduces the
//! same files. Each curve is written to its own CSV with the columns
//! `x,value,method,scenario,ci_half_width,n_samples,seed`. Numbers use nine
//! significant digits. Deterministic methods report `ci_half_width = 0` and
//! `n_samples = 0`.

pub mod config;
pub mod figures;
pub mod presets;
pub mod query;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub use config::{CurveSpec, Figure, FigureConfig, Quantity, RoomSection, SweepSpec, SystemSection};
pub use figures::{run_figure, CurveOutput};
pub use presets::{preset, preset_notes};
pub use query::{evaluate, placement_offsets, rate_query, RateQuery};

use crate::error::Result;

/// CSV header shared by every figure file.
pub const CSV_HEADER: &str = "x,value,method,scenario,ci_half_width,n_samples,seed";

/// Formats `v` with nine significant digits, dropping trailing zeros, in the
/// style of C's `%.9g`.
pub fn format_sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// One data row of a figure CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub x: f64,
    pub value: f64,
    pub method: String,
    pub scenario: String,
    pub ci_half_width: f64,
    pub n_samples: u64,
    pub seed: u64,
}

/// Renders rows under [`CSV_HEADER`].
pub fn render_csv(rows: &[CsvRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            format_sig9(r.x),
            format_sig9(r.value),
            r.method,
            r.scenario,
            format_sig9(r.ci_half_width),
            r.n_samples,
            r.seed
        );
    }
    out
}

/// Writes each curve to `dir`, creating it if needed. Returns the paths in
/// curve order.
pub fn write_outputs(outputs: &[CurveOutput], dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut paths = Vec::with_capacity(outputs.len());
    for o in outputs {
        let path = dir.join(&o.file_name);
        fs::write(&path, render_csv(&o.rows))?;
        paths.push(path);
    }
    Ok(paths)
}
