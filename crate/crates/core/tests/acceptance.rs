//! Acceptance suite: one test per acceptance criterion, each ending in a
//! single PASS/FAIL line. The Monte-Carlo batches (50 seeds, 1,200
//! sessions) are computed once and shared between criteria, so the whole
//! suite takes several minutes.

mod common;

use std::sync::OnceLock;

use lobsim::analytics::{
    acf, acf_band, concentration_curves, empirical_ccdf, excess_kurtosis, fit_magnitudes, grid,
    log_returns, median, sell_concentration_ratios, tail_fit, AggCells, MeanSe, PhaseLabel,
};
use lobsim::book::AgentClass;
use lobsim::config::Config;
use lobsim::experiment::{
    mean_acf, pooled_returns, render_correlation_table, render_scenario_table, run_batch,
    spread_samples, Batch,
};
use lobsim::lf;
use lobsim::hf;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn batch(cell: &'static OnceLock<Batch>, scenario: &str) -> &'static Batch {
    cell.get_or_init(|| {
        run_batch(&Config::default(), scenario)
            .unwrap_or_else(|e| panic!("{scenario} batch failed: {e}"))
    })
}

fn baseline() -> &'static Batch {
    static CELL: OnceLock<Batch> = OnceLock::new();
    batch(&CELL, "baseline")
}

fn only_lft() -> &'static Batch {
    static CELL: OnceLock<Batch> = OnceLock::new();
    batch(&CELL, "only-lft")
}

fn gamma_batches() -> &'static Vec<Batch> {
    static CELL: OnceLock<Vec<Batch>> = OnceLock::new();
    CELL.get_or_init(|| {
        [5u32, 10, 15, 20]
            .iter()
            .map(|g| {
                let name = format!("gamma-h-{g}");
                run_batch(&Config::default(), &name)
                    .unwrap_or_else(|e| panic!("{name} batch failed: {e}"))
            })
            .collect()
    })
}

/// Prints the verdict line for a criterion and fails the test when any
/// violation was recorded.
fn verdict(name: &str, violations: &[String]) {
    if violations.is_empty() {
        println!("{name}: PASS");
    } else {
        println!("{name}: FAIL ({})", violations.join("; "));
        panic!("{name} failed:\n  {}", violations.join("\n  "));
    }
}

fn mean_se(m: &Option<MeanSe>, what: &str) -> (f64, f64) {
    match m {
        Some(m) => (m.mean, m.se),
        None => panic!("{what} is unexpectedly absent"),
    }
}

#[test]
fn stylized_facts_baseline() {
    let b = baseline();
    let mut violations = Vec::new();

    // (a) raw-return autocorrelations insignificant: at least 90% of
    // lags 1-20 of the cross-run mean ACF inside the 99.3% band for a
    // single series (the convention of the reference figure: averaged
    // ACF plotted against the +/- 2.58/sqrt(n) whiskers).
    let n_returns = b.config.t as usize - 1;
    let band: f64 = acf_band(n_returns);
    let raw_acf = mean_acf(&b.runs, 20, false);
    let inside = raw_acf.iter().filter(|v| v.abs() <= band).count();
    let frac = inside as f64 / raw_acf.len() as f64;
    if frac < 0.90 {
        violations.push(format!("only {frac:.3} of raw-return ACF lags 1-20 are insignificant (need >= 0.90)"));
    }

    // (b) volatility clustering: cross-run mean ACF of |r| positive at
    // lags 1-20 and stronger at lag 1 than the squared-return ACF.
    let abs_acf = mean_acf(&b.runs, 20, true);
    if let Some((lag, v)) = abs_acf.iter().enumerate().find(|(_, v)| **v <= 0.0) {
        violations.push(format!("mean |r| ACF not positive at lag {} ({v:.4})", lag + 1));
    }
    let mut sq_lag1 = 0.0;
    let mut count = 0usize;
    for run in &b.runs {
        let r = log_returns(&run.closes()).expect("returns");
        let sq: Vec<f64> = r.iter().map(|v| v * v).collect();
        if let Ok(a) = acf(&sq, 1) {
            sq_lag1 += a[0];
            count += 1;
        }
    }
    sq_lag1 /= count as f64;
    if abs_acf[0] < sq_lag1 {
        violations.push(format!(
            "lag-1 ACF of |r| ({:.4}) below squared-return ACF ({sq_lag1:.4})",
            abs_acf[0]
        ));
    }

    // (c) fat tails: pooled excess kurtosis > 1 and a finite power-law
    // tail exponent.
    let pooled = pooled_returns(b);
    let kurt = excess_kurtosis(&pooled).expect("kurtosis");
    if kurt <= 1.0 {
        violations.push(format!("pooled excess kurtosis {kurt:.3} <= 1"));
    }
    match tail_fit(&pooled) {
        Ok(fit) if fit.alpha.is_finite() && fit.alpha > 0.0 => {}
        Ok(fit) => violations.push(format!("tail fit returned non-finite exponent {}", fit.alpha)),
        Err(e) => violations.push(format!("tail fit failed: {e}")),
    }

    verdict("stylized facts (baseline)", &violations);
}

#[test]
fn scenario_bands_baseline_vs_only_lft() {
    let base = &baseline().stats;
    let lft = &only_lft().stats;
    let mut violations = Vec::new();

    let (sigma, _) = mean_se(&base.sigma_p, "baseline sigma_p");
    if !(0.010..=0.040).contains(&sigma) {
        violations.push(format!("sigma_P {sigma:.4} outside [0.010, 0.040] (target 0.020)"));
    }
    let (crashes, _) = mean_se(&base.crash_count, "baseline crash count");
    if !(3.0..=18.0).contains(&crashes) {
        violations.push(format!("flash crashes per run {crashes:.2} outside [3, 18] (target 8.8)"));
    }
    match &base.crash_duration {
        Some(d) if (7.0..=28.0).contains(&d.mean) => {}
        Some(d) => violations.push(format!("mean crash duration {:.2} outside [7, 28] (target 14.1)", d.mean)),
        None => violations.push("no crash durations in the baseline batch".into()),
    }

    let (sigma_lft, _) = mean_se(&lft.sigma_p, "only-LFT sigma_p");
    if sigma <= 2.0 * sigma_lft {
        violations.push(format!("sigma_P {sigma:.4} not more than twice the only-LFT value {sigma_lft:.4}"));
    }
    let (crashes_lft, _) = mean_se(&lft.crash_count, "only-LFT crash count");
    if crashes_lft != 0.0 {
        violations.push(format!("only-LFT scenario has {crashes_lft:.2} flash crashes per run (need 0)"));
    }

    verdict("scenario statistics bands", &violations);
}

#[test]
fn volume_correlation_signs() {
    let c = &baseline().stats.correlations_submitted;
    let mut violations = Vec::new();

    let cell = |c: &AggCells, what: &str| -> (f64, f64) {
        match &c.hf {
            Some(m) => (m.mean, m.se),
            None => panic!("HF correlation absent in {what}"),
        }
    };
    let (hf_crash, se_crash) = cell(&c.flash_crashes, "flash crashes");
    let (hf_normal, se_normal) = cell(&c.normal_times, "normal times");
    if hf_crash >= 0.0 {
        violations.push(format!("crash-phase HF volume correlation {hf_crash:.4} not negative"));
    }
    let gap = hf_normal - hf_crash;
    let se = (se_crash.powi(2) + se_normal.powi(2)).sqrt();
    if gap < 2.0 * se {
        violations.push(format!(
            "crash-phase HF correlation only {gap:.4} below normal times (need >= 2 SE = {:.4})",
            2.0 * se
        ));
    }

    for (cells, what) in [(&c.unconditional, "unconditional"), (&c.normal_times, "normal times")] {
        match &cells.lf {
            Some(m) if m.mean >= 0.0 => {}
            Some(m) => violations.push(format!("{what} LF volume correlation {:.4} negative", m.mean)),
            None => violations.push(format!("{what} LF volume correlation absent")),
        }
    }

    verdict("volume correlation signs", &violations);
}

#[test]
fn crash_anatomy() {
    let b = baseline();
    let mut violations = Vec::new();

    // Crash-phase spread distribution weakly dominates normal times.
    let phases = spread_samples(b);
    let normal = &phases[0].1;
    let crash = &phases[1].1;
    if crash.is_empty() {
        violations.push("no crash-phase spread observations".into());
    } else {
        let hi = normal.iter().chain(crash).cloned().fold(0.0, f64::max);
        let grid = grid(0.0, hi, 128);
        let ccdf_n = empirical_ccdf(normal, &grid);
        let ccdf_c = empirical_ccdf(crash, &grid);
        if let Some((i, _)) = ccdf_c
            .iter()
            .zip(&ccdf_n)
            .enumerate()
            .find(|(_, (c, n))| **c < **n - 1e-12)
        {
            violations.push(format!(
                "crash spread CCDF below normal times at grid point {i} ({:.4} < {:.4})",
                ccdf_c[i], ccdf_n[i]
            ));
        }
    }

    // Sell concentration during crashes: HF above 0.9, LF below 0.1.
    let hf_samples = sell_concentration_ratios(&b.runs, &b.labels, AgentClass::Hf);
    let lf_samples = sell_concentration_ratios(&b.runs, &b.labels, AgentClass::Lf);
    let phase_median = |samples: &[lobsim::analytics::ConcentrationSample], phase: PhaseLabel| {
        let vals: Vec<f64> = samples.iter().filter(|s| s.phase == phase).map(|s| s.ratio).collect();
        median(&vals)
    };
    match phase_median(&hf_samples, PhaseLabel::Crash) {
        Some(m) if m > 0.9 => {}
        Some(m) => violations.push(format!("crash-phase HF sell-concentration median {m:.3} <= 0.9")),
        None => violations.push("no crash-phase HF concentration samples".into()),
    }
    match phase_median(&lf_samples, PhaseLabel::Crash) {
        Some(m) if m < 0.1 => {}
        Some(m) => violations.push(format!("crash-phase LF sell-concentration median {m:.3} >= 0.1")),
        None => violations.push("no crash-phase LF concentration samples".into()),
    }

    // Recovery-phase HF concentration close to normal times.
    let grid = grid(0.0, 1.0, 101);
    let curves = concentration_curves(&hf_samples, &grid);
    let find = |phase: PhaseLabel| curves.iter().find(|c| c.phase == phase);
    match (find(PhaseLabel::NormalTimes), find(PhaseLabel::Recovery)) {
        (Some(n), Some(r)) => {
            let sup = n
                .kernel_ccdf
                .iter()
                .zip(&r.kernel_ccdf)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if sup > 0.1 {
                violations.push(format!(
                    "recovery-phase HF concentration CCDF differs from normal times by {sup:.3} (> 0.1)"
                ));
            }
        }
        _ => violations.push("missing normal- or recovery-phase HF concentration curve".into()),
    }

    verdict("flash-crash anatomy", &violations);
}

#[test]
fn cancellation_rate_sweep() {
    let mut batches: Vec<&Batch> = vec![baseline()];
    batches.extend(gamma_batches().iter());
    let mut violations = Vec::new();

    let gammas: Vec<u32> = batches.iter().map(|b| b.config.gamma_h).collect();
    assert_eq!(gammas, vec![1, 5, 10, 15, 20]);

    let crashes: Vec<f64> = batches
        .iter()
        .map(|b| mean_se(&b.stats.crash_count, "crash count").0)
        .collect();
    for w in crashes.windows(2) {
        if w[0] <= w[1] {
            violations.push(format!("crash counts not strictly decreasing: {crashes:?}"));
            break;
        }
    }

    let sigmas: Vec<f64> = batches
        .iter()
        .map(|b| mean_se(&b.stats.sigma_p, "sigma_p").0)
        .collect();
    for w in sigmas.windows(2) {
        if w[0] < w[1] - 1e-12 {
            violations.push(format!("sigma_P not non-increasing: {sigmas:?}"));
            break;
        }
    }

    let duration = |b: &Batch| b.stats.crash_duration.as_ref().map(|d| d.mean);
    match (duration(batches[0]), duration(batches[4])) {
        (Some(d1), Some(d20)) if d20 > d1 => {}
        (Some(d1), Some(d20)) => {
            violations.push(format!("mean duration at gamma_H=20 ({d20:.2}) not above gamma_H=1 ({d1:.2})"))
        }
        (d1, d20) => violations.push(format!("missing durations: gamma_H=1 {d1:?}, gamma_H=20 {d20:?}")),
    }

    verdict("order-lifetime sweep", &violations);
}

#[test]
fn micro_oracles() {
    let mut violations = Vec::new();

    // Matching agrees with the brute-force reference on random books.
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce97);
    for case in 0..1_000 {
        let orders = common::random_orders(&mut rng, 12);
        let mut book = common::book_from_orders(&orders);
        if book.match_session(3) != common::brute_force_match(&orders, 3) {
            violations.push(format!("matcher diverges from reference on random case {case}"));
            break;
        }
    }

    // Logit switching frequency matches the closed form within 3 SE.
    let n = 100_000usize;
    let (pi_c, pi_f, zeta) = (1.0, 0.5, 1.0);
    let p: f64 = lf::logit_chartist_prob(pi_c, pi_f, zeta);
    let hits = (0..n)
        .filter(|_| lf::switch_strategy(pi_c, pi_f, zeta, &mut rng) == lf::Strategy::Chartist)
        .count();
    let freq = hits as f64 / n as f64;
    let se = (p * (1.0 - p) / n as f64).sqrt();
    if (freq - p).abs() > 3.0 * se {
        violations.push(format!("chartist frequency {freq:.4} vs closed form {p:.4} (3 SE = {:.4})", 3.0 * se));
    }

    // Seller counts among 4 independent side draws are Binomial(4, 1/2):
    // chi-square over the five counts, 1% critical value at 4 dof.
    let sessions = 100_000usize;
    let mut observed = [0u64; 5];
    for _ in 0..sessions {
        let sellers = (0..4).filter(|_| hf::hf_side(&mut rng) == lobsim::Side::Sell).count();
        observed[sellers] += 1;
    }
    let weights = [1.0, 4.0, 6.0, 4.0, 1.0];
    let chi2: f64 = observed
        .iter()
        .zip(weights)
        .map(|(&o, w)| {
            let e = w / 16.0 * sessions as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    if chi2 >= 13.2767 {
        violations.push(format!("seller-count chi-square {chi2:.2} exceeds the 1% critical value 13.28"));
    }

    // Tail fit recovers a known Pareto exponent.
    let mut sample: Vec<f64> = (0..100_000)
        .map(|_| rng.gen_range(f64::EPSILON..1.0f64).powf(-1.0 / 3.0))
        .collect();
    match fit_magnitudes(&mut sample) {
        Ok(fit) if (fit.alpha - 3.0).abs() <= 0.1 => {}
        Ok(fit) => violations.push(format!("Pareto fit alpha {:.3} outside 3.0 +/- 0.1", fit.alpha)),
        Err(e) => violations.push(format!("Pareto fit failed: {e}")),
    }

    verdict("micro-oracles", &violations);
}

#[test]
fn determinism_across_thread_counts() {
    let mut cfg = Config::default();
    cfg.mc = 10;
    let tables: Vec<(String, String, String)> = [1usize, 4]
        .iter()
        .map(|&threads| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .expect("thread pool");
            let batch = pool
                .install(|| run_batch(&cfg, "baseline"))
                .expect("baseline batch");
            (
                render_scenario_table(&[&batch.stats]),
                render_correlation_table(&batch.stats),
                serde_json::to_string_pretty(&batch.stats).expect("summary json"),
            )
        })
        .collect();
    let mut violations = Vec::new();
    if tables[0] != tables[1] {
        violations.push("statistic tables differ between 1 and 4 worker threads".to_string());
    }
    verdict("determinism across thread counts", &violations);
}
