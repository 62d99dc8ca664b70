//! Named experiment batches: scenario configuration, Monte-Carlo
//! execution, artifact/figure emission, and text reports.

use std::path::Path;

use anyhow::{bail, Context, Result};

use crate::analytics::{
    acf, acf_band, concentration_curves, grid, kernel_ccdf, kernel_density, label_runs,
    log_returns, median, quantile, sell_concentration_ratios, silverman_bandwidth, summarize,
    AggCells, CrashConfig, MeanSe, PhaseLabel, StatSummary,
};
use crate::book::AgentClass;
use crate::config::Config;
use crate::engine::{run_monte_carlo, RunRecord};
use crate::output;
use crate::scalar::std_normal_pdf;
use crate::svg::{box_plot, BoxStats, Chart, Series};

/// Order-cancellation horizons covered by the `gamma-sweep` experiment.
pub const GAMMA_SWEEP: [u32; 5] = [1, 5, 10, 15, 20];

/// Experiment names accepted by the CLI.
pub const EXPERIMENTS: [&str; 4] = ["baseline", "only-lft", "scenarios", "gamma-sweep"];

/// Derives a scenario's configuration from the base configuration.
pub fn scenario_config(base: &Config, scenario: &str) -> Result<Config> {
    let mut cfg = base.clone();
    match scenario {
        "baseline" => {}
        "only-lft" => cfg.n_h = 0,
        other => {
            if let Some(gamma) = other.strip_prefix("gamma-h-") {
                cfg.gamma_h = gamma.parse().with_context(|| format!("bad scenario {other}"))?;
            } else {
                bail!("unknown scenario: {other}");
            }
        }
    }
    let issues = cfg.validate();
    if !issues.is_empty() {
        bail!("invalid scenario configuration: {}", issues.join("; "));
    }
    Ok(cfg)
}

/// One completed Monte-Carlo batch, with phase labels and statistics.
pub struct Batch {
    pub scenario: String,
    pub config: Config,
    pub runs: Vec<RunRecord>,
    pub labels: Vec<Vec<PhaseLabel>>,
    pub stats: StatSummary,
}

/// Runs a scenario over the configured number of Monte-Carlo seeds.
pub fn run_batch(base: &Config, scenario: &str) -> Result<Batch> {
    let config = scenario_config(base, scenario)?;
    let seeds = config.derive_seeds(config.mc);
    let runs = run_monte_carlo(&config, &seeds, scenario)?;
    let crash_cfg = CrashConfig::from(&config);
    let labels = label_runs(&runs, &crash_cfg);
    let stats = summarize(&runs, &crash_cfg);
    Ok(Batch { scenario: scenario.to_string(), config, runs, labels, stats })
}

/// Mean sample autocorrelation across runs, of raw or absolute returns.
pub fn mean_acf(runs: &[RunRecord], max_lag: usize, absolute: bool) -> Vec<f64> {
    let mut sum = vec![0.0; max_lag];
    let mut count = 0usize;
    for run in runs {
        let mut r = match log_returns(&run.closes()) {
            Ok(r) => r,
            Err(_) => continue,
        };
        if absolute {
            for v in &mut r {
                *v = v.abs();
            }
        }
        if let Ok(a) = acf(&r, max_lag) {
            for (s, v) in sum.iter_mut().zip(a) {
                *s += v;
            }
            count += 1;
        }
    }
    if count > 0 {
        for s in &mut sum {
            *s /= count as f64;
        }
    }
    sum
}

/// Session bid-ask spreads pooled across runs, grouped by market phase.
/// Uses the end-of-session spread, which reflects resting quotes after
/// matching but before expiry.
pub fn spread_samples(batch: &Batch) -> Vec<(PhaseLabel, Vec<f64>)> {
    let mut by_phase: [Vec<f64>; 3] = Default::default();
    for (run, labels) in batch.runs.iter().zip(&batch.labels) {
        for (s, &label) in run.sessions.iter().zip(labels) {
            if let Some(spread) = s.spread_end {
                by_phase[label as usize].push(spread);
            }
        }
    }
    [PhaseLabel::NormalTimes, PhaseLabel::Crash, PhaseLabel::Recovery]
        .into_iter()
        .map(|p| (p, std::mem::take(&mut by_phase[p as usize])))
        .collect()
}

/// Pooled log returns of every run in the batch.
pub fn pooled_returns(batch: &Batch) -> Vec<f64> {
    batch
        .runs
        .iter()
        .flat_map(|r| log_returns(&r.closes()).unwrap_or_default())
        .collect()
}

/// Writes the statistics artifacts of one batch into `dir`.
pub fn write_batch_artifacts(batch: &Batch, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    output::write_json(&dir.join("summary.json"), &batch.stats)?;
    output::write_per_run_csv(&dir.join("per_run.csv"), &batch.stats)?;
    output::write_correlations_csv(&dir.join("correlations.csv"), &batch.stats)?;

    if let Some(run) = batch.runs.first() {
        output::write_run_csv(&dir.join("run_0.csv"), run)?;
        output::write_run_sidecar(&dir.join("run_0.json"), &batch.config, run)?;
    }

    let max_lag = 50;
    let n = batch.config.t.saturating_sub(1) as usize;
    let band: f64 = acf_band(n);
    output::write_acf_csv(&dir.join("acf_returns.csv"), "returns", &mean_acf(&batch.runs, max_lag, false), band)?;
    output::write_acf_csv(
        &dir.join("acf_abs_returns.csv"),
        "abs_returns",
        &mean_acf(&batch.runs, max_lag, true),
        band,
    )?;

    if let Some(fit) = &batch.stats.tail {
        output::write_tail_csv(&dir.join("tail.csv"), fit)?;
    }

    let returns = pooled_returns(batch);
    if !returns.is_empty() {
        let h = silverman_bandwidth(&returns);
        let lo = returns.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = returns.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let xs = grid(lo, hi, 200);
        let density = kernel_density(&returns, h, &xs);
        output::write_curves_csv(
            &dir.join("returns_density.csv"),
            "density",
            &[("returns".to_string(), xs, density)],
        )?;
    }

    let spreads = spread_samples(batch);
    let spread_hi = spreads
        .iter()
        .flat_map(|(_, v)| v.iter().cloned())
        .fold(0.0_f64, f64::max);
    if spread_hi > 0.0 {
        let xs = grid(0.0, spread_hi, 200);
        let curves: Vec<_> = spreads
            .iter()
            .filter(|(_, v)| !v.is_empty())
            .map(|(p, v)| {
                let h = silverman_bandwidth(v);
                (p.name().to_string(), xs.clone(), kernel_ccdf(v, h, &xs))
            })
            .collect();
        output::write_curves_csv(&dir.join("spread_ccdf.csv"), "ccdf", &curves)?;
    }

    let unit = grid(0.0, 1.0, 101);
    for (class, tag) in [(AgentClass::Hf, "hf"), (AgentClass::Lf, "lf")] {
        let samples = sell_concentration_ratios(&batch.runs, &batch.labels, class);
        if samples.is_empty() {
            continue;
        }
        output::write_concentration_csv(
            &dir.join(format!("concentration_sessions_{tag}.csv")),
            &samples,
        )?;
        let curves = concentration_curves(&samples, &unit);
        output::write_phase_curves_csv(
            &dir.join(format!("concentration_curves_{tag}.csv")),
            &unit,
            &curves,
        )?;
    }
    Ok(())
}

/// Writes the figures of one batch into `dir`.
pub fn write_batch_figures(batch: &Batch, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    if let Some(run) = batch.runs.first() {
        let closes: Vec<(f64, f64)> = run
            .sessions
            .iter()
            .map(|s| (s.session as f64, s.close))
            .collect();
        let fundamental: Vec<(f64, f64)> = run
            .sessions
            .iter()
            .map(|s| (s.session as f64, s.fundamental))
            .collect();
        Chart::new("Closing price and fundamental value", "trading session", "price")
            .with(Series::new("price", closes))
            .with(Series::new("fundamental", fundamental))
            .write_svg(&dir.join("price_fundamental.svg"))?;
    }

    let max_lag = 50;
    let band: f64 = acf_band(batch.config.t.saturating_sub(1) as usize);
    let lags = |a: &[f64]| -> Vec<(f64, f64)> {
        a.iter().enumerate().map(|(i, v)| ((i + 1) as f64, *v)).collect()
    };
    let flat = |v: f64| vec![(1.0, v), (max_lag as f64, v)];
    Chart::new("Autocorrelation of returns", "lag", "acf")
        .with(Series::new("returns", lags(&mean_acf(&batch.runs, max_lag, false))))
        .with(Series::new("abs returns", lags(&mean_acf(&batch.runs, max_lag, true))))
        .with(Series::new("band", flat(band)))
        .with(Series::new("-band", flat(-band)))
        .write_svg(&dir.join("acf.svg"))?;

    let returns = pooled_returns(batch);
    if let Some(fit) = &batch.stats.tail {
        let mut mags: Vec<f64> = returns.iter().filter(|r| **r < 0.0).map(|r| -r).collect();
        mags.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = mags.len();
        let empirical: Vec<(f64, f64)> = mags
            .iter()
            .enumerate()
            .map(|(i, &x)| (x, (n - i) as f64 / n as f64))
            .collect();
        let tail_frac = fit.n_tail as f64 / n as f64;
        let fitted: Vec<(f64, f64)> = mags
            .iter()
            .filter(|&&x| x >= fit.xmin)
            .map(|&x| (x, tail_frac * (x / fit.xmin).powf(-fit.alpha)))
            .collect();
        Chart::new("Negative return tail CCDF", "|return|", "P(X > x)")
            .log_log()
            .with(Series::new("empirical", empirical))
            .with(Series::new(format!("power law a={:.2}", fit.alpha), fitted))
            .write_svg(&dir.join("tail_ccdf.svg"))?;
    }

    if returns.len() > 1 {
        let mean = returns.iter().sum::<f64>() / returns.len() as f64;
        let sd = (returns.iter().map(|r| (r - mean).powi(2)).sum::<f64>()
            / (returns.len() as f64 - 1.0))
            .sqrt();
        let lo = returns.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = returns.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let xs = grid(lo, hi, 200);
        let h = silverman_bandwidth(&returns);
        let density = kernel_density(&returns, h, &xs);
        let kernel: Vec<(f64, f64)> = xs.iter().cloned().zip(density).collect();
        let normal: Vec<(f64, f64)> = xs
            .iter()
            .map(|&x| (x, std_normal_pdf((x - mean) / sd) / sd))
            .collect();
        Chart::new("Density of pooled returns", "return", "density")
            .log_y()
            .with(Series::new("returns", kernel))
            .with(Series::new("normal fit", normal))
            .write_svg(&dir.join("returns_density.svg"))?;
    }

    let spreads = spread_samples(batch);
    let spread_hi = spreads
        .iter()
        .flat_map(|(_, v)| v.iter().cloned())
        .fold(0.0_f64, f64::max);
    if spread_hi > 0.0 {
        let xs = grid(0.0, spread_hi, 200);
        let mut chart = Chart::new("Bid-ask spread CCDF by phase", "spread", "P(X > x)").log_y();
        for (phase, v) in &spreads {
            if v.is_empty() {
                continue;
            }
            let h = silverman_bandwidth(v);
            let ys = kernel_ccdf(v, h, &xs);
            chart = chart.with(Series::new(phase.name(), xs.iter().cloned().zip(ys).collect()));
        }
        chart.write_svg(&dir.join("spread_ccdf.svg"))?;
    }

    let unit = grid(0.0, 1.0, 101);
    for (class, tag, title) in [
        (AgentClass::Hf, "hf", "HF sell concentration by phase"),
        (AgentClass::Lf, "lf", "LF sell concentration by phase"),
    ] {
        let samples = sell_concentration_ratios(&batch.runs, &batch.labels, class);
        if samples.is_empty() {
            continue;
        }
        let mut chart = Chart::new(title, "sell volume share", "density");
        for c in concentration_curves(&samples, &unit) {
            chart = chart.with(Series::new(
                c.phase.name(),
                unit.iter().cloned().zip(c.density.clone()).collect(),
            ));
        }
        chart.write_svg(&dir.join(format!("concentration_{tag}.svg")))?;
    }
    Ok(())
}

/// Box-plot figure of per-run crash counts across the sweep.
pub fn write_sweep_figure(batches: &[Batch], dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let boxes: Vec<BoxStats> = batches
        .iter()
        .map(|b| {
            let counts: Vec<f64> = b.stats.per_run.iter().map(|r| r.n_crashes as f64).collect();
            BoxStats {
                label: format!("gamma_h={}", b.config.gamma_h),
                // 99.3% coverage whiskers of a normal box plot
                low: quantile(&counts, 0.0035).unwrap_or(0.0),
                q1: quantile(&counts, 0.25).unwrap_or(0.0),
                median: median(&counts).unwrap_or(0.0),
                q3: quantile(&counts, 0.75).unwrap_or(0.0),
                high: quantile(&counts, 0.9965).unwrap_or(0.0),
            }
        })
        .collect();
    box_plot(
        "Flash crashes per run vs cancellation horizon",
        "flash crashes",
        &boxes,
        &dir.join("gamma_sweep_crashes.svg"),
    )
}

fn fmt_mean_se(m: Option<MeanSe>) -> String {
    match m {
        Some(m) => format!("{:.4} ({:.4})", m.mean, m.se),
        None => "-".to_string(),
    }
}

fn fmt_cells(c: &AggCells) -> String {
    let one = |v: Option<MeanSe>| match v {
        Some(m) => format!("{:+.3} ({:.3})", m.mean, m.se),
        None => "      -      ".to_string(),
    };
    format!("{}  {}  {}", one(c.total), one(c.hf), one(c.lf))
}

/// Market-statistics comparison table across scenarios.
pub fn render_scenario_table(summaries: &[&StatSummary]) -> String {
    let mut out = String::new();
    out.push_str("Market volatility and flash crashes (cross-run mean, standard error)\n");
    out.push_str(&format!(
        "{:<12} {:>18} {:>18} {:>18}\n",
        "scenario", "sigma_P", "crashes/run", "crash duration"
    ));
    for s in summaries {
        out.push_str(&format!(
            "{:<12} {:>18} {:>18} {:>18}\n",
            s.scenario,
            fmt_mean_se(s.sigma_p),
            fmt_mean_se(s.crash_count),
            fmt_mean_se(s.crash_duration),
        ));
    }
    out
}

/// Phase-conditioned return/volume correlation table for one scenario.
pub fn render_correlation_table(s: &StatSummary) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "Correlations between returns and volumes, scenario {} (mean, se)\n",
        s.scenario
    ));
    out.push_str(&format!(
        "{:<10} {:<14} {:^15}  {:^15}  {:^15}\n",
        "measure", "phase", "total", "hf", "lf"
    ));
    for (measure, agg) in [
        ("submitted", &s.correlations_submitted),
        ("executed", &s.correlations_executed),
    ] {
        for (phase, cells) in [
            ("unconditional", &agg.unconditional),
            ("flash crashes", &agg.flash_crashes),
            ("normal times", &agg.normal_times),
        ] {
            out.push_str(&format!(
                "{:<10} {:<14} {}\n",
                measure,
                phase,
                fmt_cells(cells)
            ));
        }
    }
    out
}

/// Sweep table: flash-crash statistics against the cancellation horizon.
pub fn render_sweep_table(batches: &[Batch]) -> String {
    let mut out = String::new();
    out.push_str("Flash crashes vs HF order cancellation horizon\n");
    out.push_str(&format!(
        "{:>8} {:>18} {:>18} {:>18}\n",
        "gamma_h", "crashes/run", "crash duration", "sigma_P"
    ));
    for b in batches {
        out.push_str(&format!(
            "{:>8} {:>18} {:>18} {:>18}\n",
            b.config.gamma_h,
            fmt_mean_se(b.stats.crash_count),
            fmt_mean_se(b.stats.crash_duration),
            fmt_mean_se(b.stats.sigma_p),
        ));
    }
    out
}

/// Runs one named experiment, writing artifacts (and figures) to `out`.
/// Returns the report text that was also written to `report.txt`.
pub fn run_experiment(name: &str, base: &Config, out: &Path, figures: bool) -> Result<String> {
    let report = match name {
        "baseline" | "only-lft" => {
            let batch = run_batch(base, name)?;
            write_batch_artifacts(&batch, out)?;
            if figures {
                write_batch_figures(&batch, &out.join("figs"))?;
            }
            format!(
                "{}\n{}",
                render_scenario_table(&[&batch.stats]),
                render_correlation_table(&batch.stats)
            )
        }
        "scenarios" => {
            let baseline = run_batch(base, "baseline")?;
            let only_lft = run_batch(base, "only-lft")?;
            write_batch_artifacts(&baseline, &out.join("baseline"))?;
            write_batch_artifacts(&only_lft, &out.join("only-lft"))?;
            if figures {
                write_batch_figures(&baseline, &out.join("baseline/figs"))?;
                write_batch_figures(&only_lft, &out.join("only-lft/figs"))?;
            }
            format!(
                "{}\n{}",
                render_scenario_table(&[&baseline.stats, &only_lft.stats]),
                render_correlation_table(&baseline.stats)
            )
        }
        "gamma-sweep" => {
            let mut batches = Vec::new();
            for gamma in GAMMA_SWEEP {
                let scenario = format!("gamma-h-{gamma}");
                let batch = run_batch(base, &scenario)?;
                write_batch_artifacts(&batch, &out.join(&scenario))?;
                batches.push(batch);
            }
            let rows: Vec<(f64, &StatSummary)> = batches
                .iter()
                .map(|b| (b.config.gamma_h as f64, &b.stats))
                .collect();
            output::write_sweep_csv(&out.join("sweep.csv"), "gamma_h", &rows)?;
            if figures {
                write_sweep_figure(&batches, &out.join("figs"))?;
            }
            render_sweep_table(&batches)
        }
        other => bail!("unknown experiment: {other} (expected one of {EXPERIMENTS:?})"),
    };
    output::write_text(&out.join("report.txt"), &report)?;
    Ok(report)
}
