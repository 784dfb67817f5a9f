//! Seeded Monte Carlo trials and binomial rate estimates.
//!
//! Trial `k` of experiment `name` under master seed `s` draws from a
//! ChaCha8 stream seeded with `SHA-256(name ‖ 0x00 ‖ s_le ‖ k_le)`, so every
//! trial is reproducible on its own and independent of worker count and
//! execution order.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// What a trial function reports.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrialOutcome {
    pub success: bool,
    pub metrics: BTreeMap<String, f64>,
    pub indicators: Vec<bool>,
}

impl TrialOutcome {
    pub fn new(success: bool) -> Self {
        Self {
            success,
            ..Self::default()
        }
    }

    pub fn metric(mut self, name: &str, value: f64) -> Self {
        self.metrics.insert(name.to_owned(), value);
        self
    }

    pub fn indicators(mut self, values: Vec<bool>) -> Self {
        self.indicators = values;
        self
    }
}

/// One trial's record. A trial whose function failed has `success = false`
/// and the failure message in `error`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialReport {
    pub trial: usize,
    /// First 128 bits of the stream seed.
    pub seed: u128,
    pub success: bool,
    pub metrics: BTreeMap<String, f64>,
    pub indicators: Vec<bool>,
    pub error: Option<String>,
}

impl TrialReport {
    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).copied()
    }
}

/// Seed material and stream for one trial.
pub fn derive_stream(name: &str, master_seed: u64, trial: u64) -> (u128, ChaCha8Rng) {
    let mut hasher = Sha256::new();
    hasher.update(name.as_bytes());
    hasher.update([0u8]);
    hasher.update(master_seed.to_le_bytes());
    hasher.update(trial.to_le_bytes());
    let digest: [u8; 32] = hasher.finalize().into();
    let prefix = u128::from_be_bytes(digest[..16].try_into().expect("16 bytes"));
    (prefix, ChaCha8Rng::from_seed(digest))
}

/// Runs `trials` independent trials, on `workers` threads when given and on
/// the global pool otherwise. Reports come back in trial order.
pub fn run_trials<F>(
    name: &str,
    trials: usize,
    master_seed: u64,
    workers: Option<usize>,
    f: F,
) -> Result<Vec<TrialReport>>
where
    F: Fn(usize, &mut ChaCha8Rng) -> Result<TrialOutcome> + Sync,
{
    if trials == 0 {
        return Err(Error::precondition("trials must be at least 1"));
    }
    let one = |k: usize| {
        let (seed, mut rng) = derive_stream(name, master_seed, k as u64);
        let outcome = catch_unwind(AssertUnwindSafe(|| f(k, &mut rng)))
            .unwrap_or_else(|p| Err(Error::Infeasible(panic_message(p.as_ref()))));
        match outcome {
            Ok(o) => TrialReport {
                trial: k,
                seed,
                success: o.success,
                metrics: o.metrics,
                indicators: o.indicators,
                error: None,
            },
            Err(e) => TrialReport {
                trial: k,
                seed,
                success: false,
                metrics: BTreeMap::new(),
                indicators: Vec::new(),
                error: Some(e.to_string()),
            },
        }
    };
    let run = || (0..trials).into_par_iter().map(one).collect::<Vec<_>>();
    match workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::Config(e.to_string()))?;
            Ok(pool.install(run))
        }
        None => Ok(run()),
    }
}

fn panic_message(p: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = p.downcast_ref::<&str>() {
        format!("trial panicked: {s}")
    } else if let Some(s) = p.downcast_ref::<String>() {
        format!("trial panicked: {s}")
    } else {
        "trial panicked".to_owned()
    }
}

/// Normal quantile for a two-sided 95% interval.
pub const Z95: f64 = 1.96;

/// A binomial proportion with its Wilson score interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateEstimate {
    pub successes: usize,
    pub trials: usize,
    pub point: f64,
    pub lower: f64,
    pub upper: f64,
}

impl RateEstimate {
    pub fn wilson(successes: usize, trials: usize) -> Result<Self> {
        Self::wilson_z(successes, trials, Z95)
    }

    pub fn wilson_z(successes: usize, trials: usize, z: f64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::precondition("rate needs at least one trial"));
        }
        if successes > trials {
            return Err(Error::precondition("more successes than trials"));
        }
        let n = trials as f64;
        let p = successes as f64 / n;
        let z2 = z * z;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        Ok(Self {
            successes,
            trials,
            point: p,
            lower: (center - half).clamp(0.0, p),
            upper: (center + half).clamp(p, 1.0),
        })
    }

    /// Rate of `true` among the flags.
    pub fn of(flags: impl IntoIterator<Item = bool>) -> Result<Self> {
        let (hits, total) = flags
            .into_iter()
            .fold((0, 0), |(h, t), b| (h + b as usize, t + 1));
        Self::wilson(hits, total)
    }

    /// Standard error of the point estimate.
    pub fn standard_error(&self) -> f64 {
        (self.point * (1.0 - self.point) / self.trials as f64).sqrt()
    }
}

pub fn failure_rate(reports: &[TrialReport]) -> Result<RateEstimate> {
    RateEstimate::of(reports.iter().map(|r| !r.success))
}

pub fn success_rate(reports: &[TrialReport]) -> Result<RateEstimate> {
    RateEstimate::of(reports.iter().map(|r| r.success))
}

/// Whether an observed frequency over `trials` Bernoulli(`p`) draws lies
/// within `k` standard errors of `p`. A zero standard error demands equality.
pub fn within_standard_errors(observed: f64, p: f64, trials: usize, k: f64) -> bool {
    let se = (p * (1.0 - p) / trials as f64).sqrt();
    (observed - p).abs() <= k * se
}
