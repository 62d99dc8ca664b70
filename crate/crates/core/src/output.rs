//! Artifact writers: per-run CSV time series, tidy cross-run statistics
//! tables, and JSON sidecars. Every writer is deterministic — row order
//! depends only on the data, never on thread interleaving.

use std::fs::{self, File};
use std::io::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::analytics::{PhaseCurves, StatSummary, TailFit};
use crate::config::Config;
use crate::engine::{RunRecord, SessionRecord};

/// Writes one run's session-level time series.
///
/// Columns: session, close, fundamental, spread_pre_match, spread_end,
/// lf_buy_vol, lf_sell_vol, hf_buy_vol, hf_sell_vol, lf_exec_vol,
/// hf_exec_vol, n_trades.
pub fn write_run_csv(path: &Path, run: &RunRecord) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    w.write_record([
        "session",
        "close",
        "fundamental",
        "spread_pre_match",
        "spread_end",
        "lf_buy_vol",
        "lf_sell_vol",
        "hf_buy_vol",
        "hf_sell_vol",
        "lf_exec_vol",
        "hf_exec_vol",
        "n_trades",
    ])?;
    for s in &run.sessions {
        w.write_record([
            s.session.to_string(),
            fmt(s.close),
            fmt(s.fundamental),
            opt(s.spread_pre_match),
            opt(s.spread_end),
            s.lf_buy_vol.to_string(),
            s.lf_sell_vol.to_string(),
            s.hf_buy_vol.to_string(),
            s.hf_sell_vol.to_string(),
            s.lf_exec_vol.to_string(),
            s.hf_exec_vol.to_string(),
            s.n_trades.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// JSON sidecar describing how a run was produced.
#[derive(Debug, Serialize)]
pub struct RunSidecar<'a> {
    pub scenario: &'a str,
    pub seed: u64,
    pub sessions: u32,
    pub config: &'a Config,
    pub summary: &'a crate::engine::PopulationSummary,
}

pub fn write_run_sidecar(path: &Path, cfg: &Config, run: &RunRecord) -> Result<()> {
    let sidecar = RunSidecar {
        scenario: &run.scenario,
        seed: run.seed,
        sessions: run.sessions.len() as u32,
        config: cfg,
        summary: &run.summary,
    };
    write_json(path, &sidecar)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Tidy per-run statistics: one row per seed.
pub fn write_per_run_csv(path: &Path, summary: &StatSummary) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "scenario",
        "seed",
        "sigma_p",
        "n_crashes",
        "mean_duration",
        "corr_submitted_total",
        "corr_submitted_hf",
        "corr_submitted_lf",
        "corr_executed_total",
        "corr_executed_hf",
        "corr_executed_lf",
    ])?;
    for r in &summary.per_run {
        w.write_record([
            summary.scenario.clone(),
            r.seed.to_string(),
            fmt(r.sigma_p),
            r.n_crashes.to_string(),
            r.mean_duration.map(fmt).unwrap_or_default(),
            opt(r.correlations.submitted.unconditional.total),
            opt(r.correlations.submitted.unconditional.hf),
            opt(r.correlations.submitted.unconditional.lf),
            opt(r.correlations.executed.unconditional.total),
            opt(r.correlations.executed.unconditional.hf),
            opt(r.correlations.executed.unconditional.lf),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Sample autocorrelation rows: lag, acf value, confidence band half-width.
pub fn write_acf_csv(path: &Path, series: &str, acf: &[f64], band: f64) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["series", "lag", "acf", "band"])?;
    for (i, value) in acf.iter().enumerate() {
        w.write_record([
            series.to_string(),
            (i + 1).to_string(),
            fmt(*value),
            fmt(band),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Cross-run correlation table in long form: one row per
/// (measure, phase, counterpart) cell.
pub fn write_correlations_csv(path: &Path, summary: &StatSummary) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["measure", "phase", "counterpart", "mean", "se", "n"])?;
    for (measure, agg) in [
        ("submitted", &summary.correlations_submitted),
        ("executed", &summary.correlations_executed),
    ] {
        for (phase, cells) in [
            ("unconditional", &agg.unconditional),
            ("flash_crashes", &agg.flash_crashes),
            ("normal_times", &agg.normal_times),
        ] {
            for (counterpart, value) in
                [("total", cells.total), ("hf", cells.hf), ("lf", cells.lf)]
            {
                if let Some(m) = value {
                    w.write_record([
                        measure.to_string(),
                        phase.to_string(),
                        counterpart.to_string(),
                        fmt(m.mean),
                        fmt(m.se),
                        m.n.to_string(),
                    ])?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// A labelled curve sampled on a shared grid (CCDFs, densities).
pub fn write_curves_csv(
    path: &Path,
    value_name: &str,
    curves: &[(String, Vec<f64>, Vec<f64>)],
) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["label", "x", value_name])?;
    for (label, xs, ys) in curves {
        for (x, y) in xs.iter().zip(ys) {
            w.write_record([label.clone(), fmt(*x), fmt(*y)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Per-session sell-concentration samples in long form.
pub fn write_concentration_csv(
    path: &Path,
    samples: &[crate::analytics::ConcentrationSample],
) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["seed", "session", "ratio", "phase"])?;
    for s in samples {
        w.write_record([
            s.seed.to_string(),
            s.session.to_string(),
            fmt(s.ratio),
            s.phase.name().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Phase-conditioned concentration curves (density + CCDFs) in long form.
pub fn write_phase_curves_csv(path: &Path, grid: &[f64], curves: &[PhaseCurves]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["phase", "n", "x", "density", "kernel_ccdf", "empirical_ccdf"])?;
    for c in curves {
        for (i, x) in grid.iter().enumerate() {
            w.write_record([
                c.phase.name().to_string(),
                c.n.to_string(),
                fmt(*x),
                fmt(c.density[i]),
                fmt(c.kernel_ccdf[i]),
                fmt(c.empirical_ccdf[i]),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Pooled tail fit plus the empirical tail CCDF used to produce it.
pub fn write_tail_csv(path: &Path, fit: &TailFit) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["alpha", "xmin", "ks", "n_tail"])?;
    w.write_record([
        fmt(fit.alpha),
        fmt(fit.xmin),
        fmt(fit.ks),
        fit.n_tail.to_string(),
    ])?;
    w.flush()?;
    Ok(())
}

/// One row per sweep point: scenario statistics against the swept parameter.
pub fn write_sweep_csv(path: &Path, param: &str, rows: &[(f64, &StatSummary)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        param,
        "sigma_p_mean",
        "sigma_p_se",
        "crashes_mean",
        "crashes_se",
        "duration_mean",
        "duration_se",
        "n_runs",
    ])?;
    for (value, s) in rows {
        w.write_record([
            fmt(*value),
            opt_mean(s.sigma_p),
            opt_se(s.sigma_p),
            opt_mean(s.crash_count),
            opt_se(s.crash_count),
            opt_mean(s.crash_duration),
            opt_se(s.crash_duration),
            s.n_runs.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a plain-text report, creating parent directories as needed.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

fn fmt(v: f64) -> String {
    // Shortest round-trip float formatting keeps files byte-stable.
    format!("{v}")
}

fn opt<T: Into<Option<f64>>>(v: T) -> String {
    v.into().map(fmt).unwrap_or_default()
}

fn opt_mean(v: Option<crate::analytics::MeanSe>) -> String {
    v.map(|m| fmt(m.mean)).unwrap_or_default()
}

fn opt_se(v: Option<crate::analytics::MeanSe>) -> String {
    v.map(|m| fmt(m.se)).unwrap_or_default()
}

/// Restores closing prices from a run CSV written by [`write_run_csv`].
pub fn read_run_csv(path: &Path) -> Result<Vec<SessionRecord>> {
    let mut r = csv::Reader::from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut sessions = Vec::new();
    for record in r.records() {
        let rec = record?;
        let get = |i: usize| -> Result<f64> {
            rec.get(i)
                .context("short row")?
                .parse::<f64>()
                .context("bad number")
        };
        let get_opt = |i: usize| -> Option<f64> {
            rec.get(i).filter(|s| !s.is_empty()).and_then(|s| s.parse().ok())
        };
        sessions.push(SessionRecord {
            session: get(0)? as u32,
            close: get(1)?,
            fundamental: get(2)?,
            spread_pre_match: get_opt(3),
            spread_end: get_opt(4),
            lf_buy_vol: get(5)? as u64,
            lf_sell_vol: get(6)? as u64,
            hf_buy_vol: get(7)? as u64,
            hf_sell_vol: get(8)? as u64,
            lf_exec_vol: get(9)? as u64,
            hf_exec_vol: get(10)? as u64,
            n_trades: get(11)? as u32,
        });
    }
    Ok(sessions)
}
