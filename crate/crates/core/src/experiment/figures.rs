//! Figure sweeps.

use crate::channel::{ArrayLayout, ScenarioKind, SharedPa};
use crate::error::{PassError, Result};
use crate::montecarlo::{estimate_spsu_spmu_gap, Execution};
use crate::placement::{coherent_offsets, far_zone_offsets, spacing_profile};
use crate::rates::{rate_spmu_quadrature, rate_spsu, Method};
use crate::system::RandomSource;

use super::config::{CurveSpec, Figure, FigureConfig, Quantity};
use super::query::{check_method, evaluate};
use super::CsvRow;

/// Rows of one curve and the file they go to.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveOutput {
    pub label: String,
    pub file_name: String,
    pub rows: Vec<CsvRow>,
}

fn slug(label: &str) -> String {
    let mut out = String::with_capacity(label.len());
    for c in label.chars() {
        match c {
            c if c.is_ascii_alphanumeric() => out.push(c.to_ascii_lowercase()),
            '=' => {}
            '.' => out.push('p'),
            _ if !out.ends_with('-') && !out.is_empty() => out.push('-'),
            _ => {}
        }
    }
    out.trim_end_matches('-').to_string()
}

fn file_name(figure: Figure, idx: usize, label: &str) -> String {
    let s = slug(label);
    if s.is_empty() {
        format!("{figure}_{idx:02}.csv")
    } else {
        format!("{figure}_{idx:02}_{s}.csv")
    }
}

const GAP_TAG: &str = "spsu-minus-spmu-center";

/// Checks every curve before any work starts, so a bad config fails fast.
fn check_plan(cfg: &FigureConfig) -> Result<()> {
    for c in &cfg.curves {
        let kind = cfg.curve_scenario(c);
        match cfg.figure {
            Figure::Fig3 => {
                if !matches!(kind, ScenarioKind::Mpsu { .. }) {
                    return Err(PassError::Config(format!("curve '{}': spacing needs an mpsu scenario", c.label)));
                }
                if c.d0.is_none() && !matches!(kind, ScenarioKind::Mpsu { layout: ArrayLayout::FarZone, .. }) {
                    return Err(PassError::Config(format!("curve '{}': phase-aligned spacing needs d0", c.label)));
                }
            }
            Figure::Fig9 => {
                if kind != (ScenarioKind::Spmu { pa: SharedPa::Center }) {
                    return Err(PassError::Config(format!(
                        "curve '{}': the gap figure compares against the centre shared PA (kind = \"spmu\", pa = \"center\")",
                        c.label
                    )));
                }
                for &m in cfg.curve_methods(c) {
                    if !matches!(m, Method::Theorem | Method::Montecarlo) {
                        return Err(PassError::Config(format!(
                            "curve '{}': the gap figure supports theorem and montecarlo, not '{m}'",
                            c.label
                        )));
                    }
                }
            }
            _ => {
                for &m in cfg.curve_methods(c) {
                    check_method(&kind, m).map_err(|e| PassError::Config(format!("curve '{}': {e}", c.label)))?;
                }
            }
        }
    }
    Ok(())
}

/// Computes every curve of `cfg`. Monte Carlo points use stream = sweep
/// index, so curves share user drops at equal powers.
pub fn run_figure(cfg: &FigureConfig) -> Result<Vec<CurveOutput>> {
    cfg.validate()?;
    check_plan(cfg)?;
    cfg.curves
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let rows = match cfg.figure {
                Figure::Fig3 => spacing_rows(cfg, c)?,
                Figure::Fig9 => gap_rows(cfg, c)?,
                _ => rate_rows(cfg, c)?,
            };
            log::info!("{}: curve '{}' done ({} rows)", cfg.figure, c.label, rows.len());
            Ok(CurveOutput { label: c.label.clone(), file_name: file_name(cfg.figure, i, &c.label), rows })
        })
        .collect()
}

fn spacing_rows(cfg: &FigureConfig, c: &CurveSpec) -> Result<Vec<CsvRow>> {
    let kind = cfg.curve_scenario(c);
    let ScenarioKind::Mpsu { n_pas, layout, .. } = kind else {
        return Err(PassError::Config(format!("curve '{}': spacing needs an mpsu scenario", c.label)));
    };
    let lambda = cfg.system.params(0.0)?.wavelength();
    let (offsets, method) = match layout {
        ArrayLayout::Coherent => {
            let d0 = c.d0.ok_or_else(|| PassError::Config(format!("curve '{}' needs d0", c.label)))?;
            (coherent_offsets(d0, lambda, n_pas)?, "coherent_spacing")
        }
        ArrayLayout::FarZone => (far_zone_offsets(lambda, n_pas), "far_zone_spacing"),
    };
    if offsets.len() < 2 {
        return Ok(Vec::new());
    }
    Ok(spacing_profile(&offsets)?
        .entries()
        .iter()
        .map(|&(n, dx)| CsvRow {
            x: n as f64,
            value: dx,
            method: method.into(),
            scenario: kind.tag().into(),
            ci_half_width: 0.0,
            n_samples: 0,
            seed: cfg.sweep.seed,
        })
        .collect())
}

fn rate_rows(cfg: &FigureConfig, c: &CurveSpec) -> Result<Vec<CsvRow>> {
    let kind = cfg.curve_scenario(c);
    let room = cfg.curve_room(c).geometry()?;
    let sweep = &cfg.sweep;
    let mut rows = Vec::new();
    for &method in cfg.curve_methods(c) {
        if method == Method::Maclaurin && !(room.height() > room.extent()) {
            log::warn!(
                "{}: curve '{}': series rate skipped, it needs h > D (h = {}, D = {})",
                cfg.figure,
                c.label,
                room.height(),
                room.extent()
            );
            continue;
        }
        for (idx, &p) in sweep.power_dbm.iter().enumerate() {
            let params = cfg.system.params(p)?;
            let source = RandomSource::new(sweep.seed, idx as u64);
            let e = evaluate(&kind, method, &params, &room, sweep.quantity, sweep.samples, &source)?;
            rows.push(CsvRow {
                x: p,
                value: e.value,
                method: method.as_str().into(),
                scenario: kind.tag().into(),
                ci_half_width: e.ci_half_width,
                n_samples: e.n_samples,
                seed: sweep.seed,
            });
        }
    }
    Ok(rows)
}

fn gap_rows(cfg: &FigureConfig, c: &CurveSpec) -> Result<Vec<CsvRow>> {
    let room = cfg.curve_room(c).geometry()?;
    let sweep = &cfg.sweep;
    let users = cfg.system.num_users as f64;
    // both estimators give the sum-rate gap
    let scale = match sweep.quantity {
        Quantity::Sum => 1.0,
        Quantity::PerUser => 1.0 / users,
    };
    let mut rows = Vec::new();
    for &method in cfg.curve_methods(c) {
        for (idx, &p) in sweep.power_dbm.iter().enumerate() {
            let params = cfg.system.params(p)?;
            let (value, ci, n) = match method {
                Method::Theorem => {
                    let gap = rate_spsu(&params, &room).value - rate_spmu_quadrature(&params, &room)?.value;
                    (users * gap, 0.0, 0)
                }
                _ => {
                    let source = RandomSource::new(sweep.seed, idx as u64);
                    let e = estimate_spsu_spmu_gap(&room, &params, sweep.samples, &source, Execution::default())?;
                    (e.mean, e.ci_half_width, e.n_samples)
                }
            };
            rows.push(CsvRow {
                x: p,
                value: scale * value,
                method: method.as_str().into(),
                scenario: GAP_TAG.into(),
                ci_half_width: scale * ci,
                n_samples: n,
                seed: sweep.seed,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::presets::preset;

    #[test]
    fn slugs() {
        assert_eq!(slug("N=4"), "n4");
        assert_eq!(slug("near zone d0=1.5"), "near-zone-d01p5");
        assert_eq!(slug("  SISO corner AP "), "siso-corner-ap");
        assert_eq!(file_name(Figure::Fig10, 2, "SISO corner AP"), "fig10_02_siso-corner-ap.csv");
        assert_eq!(file_name(Figure::Fig4, 0, "--"), "fig4_00.csv");
    }

    #[test]
    fn spacing_figure() {
        let out = run_figure(&preset(Figure::Fig3)).unwrap();
        assert_eq!(out.len(), 3);
        let near = &out[0].rows;
        assert_eq!(near.len(), 20);
        assert_eq!(near[0].x, -10.0);
        // near-side spacings exceed far-side ones in the near zone
        assert!(near.first().unwrap().value > near.last().unwrap().value);
        assert!(near.iter().all(|r| r.method == "coherent_spacing"));
        assert!(out[2].rows.iter().all(|r| r.method == "far_zone_spacing"));
    }

    #[test]
    fn series_skipped_below_ceiling() {
        let cfg = preset(Figure::Fig7)
            .with_overrides(&["room.height=2", "room.extent=2", "sweep.samples=4096", "sweep.power_dbm=[0, 10]"])
            .unwrap();
        let out = run_figure(&cfg).unwrap();
        for curve in &out {
            assert!(curve.rows.iter().all(|r| r.method != "maclaurin"), "{}", curve.label);
            assert!(curve.rows.iter().any(|r| r.method == "theorem"));
        }
    }

    #[test]
    fn invalid_method_rejected_before_work() {
        let cfg = preset(Figure::Fig8).with_overrides(&["sweep.methods=[\"theorem\"]"]).unwrap();
        assert!(matches!(run_figure(&cfg), Err(PassError::Config(_))));
        let cfg = preset(Figure::Fig9).with_overrides(&["sweep.methods=approx"]).unwrap();
        assert!(matches!(run_figure(&cfg), Err(PassError::Config(_))));
    }

    #[test]
    fn gap_figure_positive() {
        let cfg = preset(Figure::Fig9).with_overrides(&["sweep.samples=20000", "sweep.power_dbm=0,30"]).unwrap();
        let out = run_figure(&cfg).unwrap();
        for curve in out {
            for r in &curve.rows {
                assert!(r.value > 0.0, "{} {:?}", curve.label, r);
            }
            let th: Vec<_> = curve.rows.iter().filter(|r| r.method == "theorem").collect();
            let mc: Vec<_> = curve.rows.iter().filter(|r| r.method == "montecarlo").collect();
            for (a, b) in th.iter().zip(&mc) {
                assert!((a.value - b.value).abs() < 4.0 * b.ci_half_width + 1e-3, "{a:?} {b:?}");
            }
        }
    }
}
