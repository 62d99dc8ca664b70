//! Simulation configuration: baseline parameter set, flat `key = value`
//! parsing with full validation, and deterministic seed derivation.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// All model and artifact parameters. `Default` is the baseline scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    /// Monte-Carlo replications.
    pub mc: u32,
    /// Trading sessions per run.
    pub t: u32,
    /// Number of low-frequency traders.
    pub n_l: u32,
    /// Number of high-frequency traders (0 in the only-LFT scenario).
    pub n_h: u32,
    /// LF mean trading period (sessions).
    pub theta: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    /// Chartist demand slope.
    pub alpha_c: f64,
    /// Chartist demand-noise std.
    pub sigma_c: f64,
    /// Fundamentalist demand slope.
    pub alpha_f: f64,
    /// Fundamentalist demand-noise std.
    pub sigma_f: f64,
    /// Fundamental-value shock std.
    pub sigma_y: f64,
    /// Price/fundamental drift.
    pub delta: f64,
    /// LF limit-price offset std.
    pub sigma_z: f64,
    /// Intensity of strategy switching.
    pub zeta: f64,
    /// LF resting periods.
    pub gamma_l: u32,
    /// HF resting periods.
    pub gamma_h: u32,
    /// HF activation-threshold support.
    pub eta_min: f64,
    pub eta_max: f64,
    /// Volume weight in the HF order-size distribution.
    pub lambda: f64,
    /// HF price-offset support.
    pub kappa_min: f64,
    pub kappa_max: f64,
    // Implementation parameters (not part of the model equations).
    pub initial_price: f64,
    pub tick_size: f64,
    /// Order size = round(|demand| * demand_scale).
    pub demand_scale: f64,
    /// HF net-position bound.
    pub position_cap: i64,
    /// HF order cap as a fraction of the opposite-side volume.
    pub book_fraction_cap: f64,
    /// Minimum relative drop that qualifies as a crash.
    pub crash_threshold: f64,
    /// Maximum sessions from onset to recovery.
    pub recovery_window: u32,
    /// Trailing window for the crash reference price.
    pub reference_window: u32,
    pub master_seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            mc: 50,
            t: 1_200,
            n_l: 10_000,
            n_h: 100,
            theta: 20.0,
            theta_min: 10.0,
            theta_max: 40.0,
            alpha_c: 0.04,
            sigma_c: 0.05,
            alpha_f: 0.04,
            sigma_f: 0.01,
            sigma_y: 0.01,
            delta: 0.0001,
            sigma_z: 0.01,
            zeta: 1.0,
            gamma_l: 20,
            gamma_h: 1,
            eta_min: 0.0,
            eta_max: 0.2,
            lambda: 0.625,
            kappa_min: 0.0,
            kappa_max: 0.01,
            initial_price: 100.0,
            tick_size: 0.01,
            demand_scale: 100.0,
            position_cap: 3_000,
            book_fraction_cap: 0.25,
            crash_threshold: 0.05,
            recovery_window: 30,
            reference_window: 30,
            master_seed: 42,
        }
    }
}

const KEYS: &[&str] = &[
    "mc",
    "t",
    "n_l",
    "n_h",
    "theta",
    "theta_min",
    "theta_max",
    "alpha_c",
    "sigma_c",
    "alpha_f",
    "sigma_f",
    "sigma_y",
    "delta",
    "sigma_z",
    "zeta",
    "gamma_l",
    "gamma_h",
    "eta_min",
    "eta_max",
    "lambda",
    "kappa_min",
    "kappa_max",
    "initial_price",
    "tick_size",
    "demand_scale",
    "position_cap",
    "book_fraction_cap",
    "crash_threshold",
    "recovery_window",
    "reference_window",
    "master_seed",
];

/// Configuration rejection carrying every violation found.
#[derive(Debug, Error, PartialEq, Eq)]
pub struct ConfigError {
    pub issues: Vec<String>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration: {}", self.issues.join("; "))
    }
}

impl Config {
    /// Parses the flat `key = value` format (`#` starts a comment).
    /// Absent keys keep their baseline defaults. Key matching is
    /// case-insensitive so `gamma_H` and `gamma_h` are equivalent.
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        let mut cfg = Config::default();
        let mut issues = Vec::new();
        let mut seen = HashSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                issues.push(format!("line {}: expected `key = value`, got `{}`", lineno + 1, line));
                continue;
            };
            let key = key.trim().to_ascii_lowercase();
            let value = value.trim();
            if !KEYS.contains(&key.as_str()) {
                issues.push(format!("line {}: unknown key `{}`", lineno + 1, key.trim()));
                continue;
            }
            if !seen.insert(key.clone()) {
                issues.push(format!("line {}: duplicate key `{}`", lineno + 1, key));
                continue;
            }
            if let Err(e) = cfg.set(&key, value) {
                issues.push(format!("line {}: {}", lineno + 1, e));
            }
        }
        issues.extend(cfg.validate());
        if issues.is_empty() {
            Ok(cfg)
        } else {
            Err(ConfigError { issues })
        }
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        macro_rules! num {
            ($ty:ty) => {
                value
                    .parse::<$ty>()
                    .map_err(|_| format!("key `{}`: cannot parse `{}` as {}", key, value, stringify!($ty)))?
            };
        }
        match key {
            "mc" => self.mc = num!(u32),
            "t" => self.t = num!(u32),
            "n_l" => self.n_l = num!(u32),
            "n_h" => self.n_h = num!(u32),
            "theta" => self.theta = num!(f64),
            "theta_min" => self.theta_min = num!(f64),
            "theta_max" => self.theta_max = num!(f64),
            "alpha_c" => self.alpha_c = num!(f64),
            "sigma_c" => self.sigma_c = num!(f64),
            "alpha_f" => self.alpha_f = num!(f64),
            "sigma_f" => self.sigma_f = num!(f64),
            "sigma_y" => self.sigma_y = num!(f64),
            "delta" => self.delta = num!(f64),
            "sigma_z" => self.sigma_z = num!(f64),
            "zeta" => self.zeta = num!(f64),
            "gamma_l" => self.gamma_l = num!(u32),
            "gamma_h" => self.gamma_h = num!(u32),
            "eta_min" => self.eta_min = num!(f64),
            "eta_max" => self.eta_max = num!(f64),
            "lambda" => self.lambda = num!(f64),
            "kappa_min" => self.kappa_min = num!(f64),
            "kappa_max" => self.kappa_max = num!(f64),
            "initial_price" => self.initial_price = num!(f64),
            "tick_size" => self.tick_size = num!(f64),
            "demand_scale" => self.demand_scale = num!(f64),
            "position_cap" => self.position_cap = num!(i64),
            "book_fraction_cap" => self.book_fraction_cap = num!(f64),
            "crash_threshold" => self.crash_threshold = num!(f64),
            "recovery_window" => self.recovery_window = num!(u32),
            "reference_window" => self.reference_window = num!(u32),
            "master_seed" => self.master_seed = num!(u64),
            _ => unreachable!("key list checked by caller"),
        }
        Ok(())
    }

    /// Every violated bound, empty when the config is valid.
    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        let mut check = |ok: bool, msg: &str| {
            if !ok {
                v.push(msg.to_string());
            }
        };
        check(self.mc >= 1, "mc must be >= 1");
        check(self.t >= 1, "t must be >= 1");
        check(self.n_l >= 1, "n_l must be >= 1");
        check(self.theta > 0.0, "theta must be > 0");
        check(self.theta_min > 0.0, "theta_min must be > 0");
        check(self.theta_min <= self.theta_max, "theta_min must be <= theta_max");
        check(self.alpha_c > 0.0 && self.alpha_c < 1.0, "alpha_c must lie in (0, 1)");
        check(self.alpha_f > 0.0 && self.alpha_f < 1.0, "alpha_f must lie in (0, 1)");
        check(self.sigma_c >= 0.0, "sigma_c must be >= 0");
        check(self.sigma_f >= 0.0, "sigma_f must be >= 0");
        check(self.sigma_y >= 0.0, "sigma_y must be >= 0");
        check(self.sigma_z >= 0.0, "sigma_z must be >= 0");
        check(self.delta >= 0.0, "delta must be >= 0");
        check(self.zeta > 0.0, "zeta must be > 0");
        check(self.gamma_l >= 1, "gamma_l must be >= 1");
        check(self.gamma_h >= 1, "gamma_h must be >= 1");
        check(self.eta_min >= 0.0, "eta_min must be >= 0");
        check(self.eta_min < self.eta_max, "eta_min must be < eta_max");
        check(self.lambda > 0.0 && self.lambda < 1.0, "lambda must lie in (0, 1)");
        check(self.kappa_min >= 0.0, "kappa_min must be >= 0");
        check(self.kappa_min < self.kappa_max, "kappa_min must be < kappa_max");
        check(self.initial_price > 0.0, "initial_price must be > 0");
        check(self.tick_size > 0.0, "tick_size must be > 0");
        check(self.demand_scale > 0.0, "demand_scale must be > 0");
        check(self.position_cap >= 1, "position_cap must be >= 1");
        check(
            self.book_fraction_cap > 0.0 && self.book_fraction_cap <= 1.0,
            "book_fraction_cap must lie in (0, 1]",
        );
        check(
            self.crash_threshold > 0.0 && self.crash_threshold < 1.0,
            "crash_threshold must lie in (0, 1)",
        );
        check(self.recovery_window >= 1, "recovery_window must be >= 1");
        check(self.reference_window >= 1, "reference_window must be >= 1");
        v
    }

    /// Canonical echo of the config; `parse(to_text())` round-trips exactly.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| s.push_str(&format!("{} = {}\n", k, v));
        kv("mc", self.mc.to_string());
        kv("t", self.t.to_string());
        kv("n_l", self.n_l.to_string());
        kv("n_h", self.n_h.to_string());
        kv("theta", self.theta.to_string());
        kv("theta_min", self.theta_min.to_string());
        kv("theta_max", self.theta_max.to_string());
        kv("alpha_c", self.alpha_c.to_string());
        kv("sigma_c", self.sigma_c.to_string());
        kv("alpha_f", self.alpha_f.to_string());
        kv("sigma_f", self.sigma_f.to_string());
        kv("sigma_y", self.sigma_y.to_string());
        kv("delta", self.delta.to_string());
        kv("sigma_z", self.sigma_z.to_string());
        kv("zeta", self.zeta.to_string());
        kv("gamma_l", self.gamma_l.to_string());
        kv("gamma_h", self.gamma_h.to_string());
        kv("eta_min", self.eta_min.to_string());
        kv("eta_max", self.eta_max.to_string());
        kv("lambda", self.lambda.to_string());
        kv("kappa_min", self.kappa_min.to_string());
        kv("kappa_max", self.kappa_max.to_string());
        kv("initial_price", self.initial_price.to_string());
        kv("tick_size", self.tick_size.to_string());
        kv("demand_scale", self.demand_scale.to_string());
        kv("position_cap", self.position_cap.to_string());
        kv("book_fraction_cap", self.book_fraction_cap.to_string());
        kv("crash_threshold", self.crash_threshold.to_string());
        kv("recovery_window", self.recovery_window.to_string());
        kv("reference_window", self.reference_window.to_string());
        kv("master_seed", self.master_seed.to_string());
        s
    }

    /// Per-run seeds derived from `master_seed` via a SplitMix64 chain.
    pub fn derive_seeds(&self, count: u32) -> Vec<u64> {
        let mut state = self.master_seed;
        (0..count).map(|_| splitmix64(&mut state)).collect()
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
