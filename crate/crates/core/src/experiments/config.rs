use std::fmt;
use std::str::FromStr;

use serde_json::Value;

use crate::adversary::consistency_crossing_n;
use crate::error::{Error, Result};

/// Default master seed when neither the environment nor the config sets one.
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Environment variable overriding [`DEFAULT_SEED`].
pub const SEED_ENV: &str = "TVLAB_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExperimentKind {
    VerifyDistances,
    MajorityLearner,
    ConfidentFail,
    StvToPac,
    WtvExact,
    WtvAdversary,
    CoverProfile,
    UeEtvRoundtrip,
    UcFails,
    PacToWtv,
}

impl ExperimentKind {
    pub const ALL: [Self; 10] = [
        Self::VerifyDistances,
        Self::MajorityLearner,
        Self::ConfidentFail,
        Self::StvToPac,
        Self::WtvExact,
        Self::WtvAdversary,
        Self::CoverProfile,
        Self::UeEtvRoundtrip,
        Self::UcFails,
        Self::PacToWtv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::VerifyDistances => "verify-distances",
            Self::MajorityLearner => "majority-learner",
            Self::ConfidentFail => "confident-fail",
            Self::StvToPac => "stv-to-pac",
            Self::WtvExact => "wtv-exact",
            Self::WtvAdversary => "wtv-adversary",
            Self::CoverProfile => "cover-profile",
            Self::UeEtvRoundtrip => "ue-etv-roundtrip",
            Self::UcFails => "uc-fails",
            Self::PacToWtv => "pac-to-wtv",
        }
    }

    /// Config keys the experiment reads, in header order.
    pub fn keys(self) -> &'static [&'static str] {
        match self {
            Self::VerifyDistances => &["n", "rho_grid", "truncation", "seed"],
            Self::MajorityLearner => &["n", "rho", "delta", "sample_size", "trials", "seed"],
            Self::ConfidentFail => &["n", "rho", "t", "trials", "seed"],
            Self::StvToPac => &["n", "rho", "eps", "delta", "sample_size", "trials", "seed"],
            Self::WtvExact => &["truncation", "special", "delta", "sample_size", "trials", "seed"],
            Self::WtvAdversary => &["truncation", "t", "trials", "seed"],
            Self::CoverProfile => &["truncation", "special", "eps_grid"],
            Self::UeEtvRoundtrip => &["n", "rho", "eps", "delta", "trials", "seed"],
            Self::UcFails => &["n", "k", "sample_sizes", "trials", "seed"],
            Self::PacToWtv => &["n", "rho", "eps", "delta", "pairs", "trials", "seed"],
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

/// Largest categorical truncation whose `3^n` points fit the brute force.
pub const MAX_VERIFY_TRUNCATION: usize = 13;

/// Every key a config file may contain.
pub const ALL_KEYS: [&str; 16] = [
    "experiment",
    "n",
    "rho",
    "rho_grid",
    "truncation",
    "special",
    "eps",
    "delta",
    "eps_grid",
    "t",
    "sample_size",
    "sample_sizes",
    "k",
    "pairs",
    "trials",
    "seed",
];

/// Fully resolved parameters of one experiment run.
///
/// `sample_size = None` means the size rule of the experiment decides; for
/// `uc-fails`, `n` is the domain size `N` and `k = None` means `k = N`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub n: usize,
    pub rho: f64,
    pub rho_grid: Vec<f64>,
    pub truncation: usize,
    pub special: usize,
    pub eps: f64,
    pub delta: f64,
    pub eps_grid: Vec<f64>,
    pub t: u32,
    pub sample_size: Option<usize>,
    pub sample_sizes: Vec<usize>,
    pub k: Option<usize>,
    pub pairs: usize,
    pub trials: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    /// Defaults of `kind` with the given master seed.
    pub fn defaults(kind: ExperimentKind, seed: u64) -> Self {
        use ExperimentKind::*;
        let mut c = Self {
            experiment: kind,
            n: 8,
            rho: 0.05,
            rho_grid: vec![0.0, 0.05, 0.25],
            truncation: 8,
            special: 5,
            eps: 0.3,
            delta: 0.1,
            eps_grid: vec![0.5, 0.25, 0.125],
            t: 2,
            sample_size: None,
            sample_sizes: vec![10, 100],
            k: None,
            pairs: 100,
            trials: 1_000,
            seed,
        };
        match kind {
            VerifyDistances => {}
            MajorityLearner => {
                c.n = 16;
                c.rho = 0.1;
                c.trials = 10_000;
            }
            ConfidentFail => {
                c.n = 100_000;
                c.rho = 0.3;
                c.t = 3;
                c.trials = 500;
            }
            StvToPac | PacToWtv => c.trials = 2_000,
            WtvExact => {
                c.truncation = 512;
                c.delta = 0.05;
                c.trials = 10_000;
            }
            WtvAdversary => {
                c.truncation = consistency_crossing_n(2, std::f64::consts::LN_2)
                    .expect("crossing exists for t = 2");
            }
            CoverProfile => c.truncation = 512,
            UeEtvRoundtrip => c.n = 4,
            UcFails => {
                c.n = 10_000;
                c.trials = 100;
            }
        }
        c
    }

    /// Default seed from [`SEED_ENV`], else [`DEFAULT_SEED`].
    pub fn env_seed() -> Result<u64> {
        match std::env::var(SEED_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{SEED_ENV}={v} is not an unsigned integer"))),
            Err(_) => Ok(DEFAULT_SEED),
        }
    }

    /// Sets one key from its text form.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        if key == "experiment" {
            let kind: ExperimentKind = value.parse()?;
            if kind != self.experiment {
                return Err(Error::Config(format!(
                    "config is for `{kind}`, not `{}`",
                    self.experiment
                )));
            }
            return Ok(());
        }
        if !ALL_KEYS.contains(&key) {
            return Err(Error::Config(format!("unknown key `{key}`")));
        }
        if !self.experiment.keys().contains(&key) {
            return Err(Error::Config(format!(
                "key `{key}` is not used by `{}`",
                self.experiment
            )));
        }
        match key {
            "n" => self.n = parse(key, value)?,
            "rho" => self.rho = parse(key, value)?,
            "rho_grid" => self.rho_grid = parse_list(key, value)?,
            "truncation" => self.truncation = parse(key, value)?,
            "special" => self.special = parse(key, value)?,
            "eps" => self.eps = parse(key, value)?,
            "delta" => self.delta = parse(key, value)?,
            "eps_grid" => self.eps_grid = parse_list(key, value)?,
            "t" => self.t = parse(key, value)?,
            "sample_size" => self.sample_size = parse_optional(key, value)?,
            "sample_sizes" => self.sample_sizes = parse_list(key, value)?,
            "k" => self.k = parse_optional(key, value)?,
            "pairs" => self.pairs = parse(key, value)?,
            "trials" => self.trials = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            _ => unreachable!("checked against ALL_KEYS"),
        }
        Ok(())
    }

    /// Applies a flat `key = value` file; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (line_no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", line_no + 1))
            })?;
            self.apply(key.trim(), value)
                .map_err(|e| Error::Config(format!("line {}: {e}", line_no + 1)))?;
        }
        Ok(())
    }

    /// The experiment named in a config file, if any.
    pub fn experiment_in(text: &str) -> Result<Option<ExperimentKind>> {
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if let Some((k, v)) = line.split_once('=') {
                if k.trim() == "experiment" {
                    return v.trim().parse().map(Some);
                }
            }
        }
        Ok(None)
    }

    /// Resolved value of a key, as it appears in the header record.
    pub fn value_of(&self, key: &str) -> Value {
        let list = |v: &[f64]| Value::from(v.to_vec());
        match key {
            "n" => self.n.into(),
            "rho" => self.rho.into(),
            "rho_grid" => list(&self.rho_grid),
            "truncation" => self.truncation.into(),
            "special" => self.special.into(),
            "eps" => self.eps.into(),
            "delta" => self.delta.into(),
            "eps_grid" => list(&self.eps_grid),
            "t" => self.t.into(),
            "sample_size" => self.sample_size.map_or(Value::Null, Value::from),
            "sample_sizes" => self.sample_sizes.clone().into(),
            "k" => self.k.map_or(Value::Null, Value::from),
            "pairs" => self.pairs.into(),
            "trials" => self.trials.into(),
            "seed" => self.seed.into(),
            _ => Value::Null,
        }
    }

    /// `(key, value)` for every key the experiment reads.
    pub fn resolved(&self) -> Vec<(&'static str, Value)> {
        self.experiment
            .keys()
            .iter()
            .map(|&k| (k, self.value_of(k)))
            .collect()
    }

    /// Checks the ranges the experiment's preconditions need.
    pub fn validate(&self) -> Result<()> {
        use ExperimentKind::*;
        let bad = |msg: String| Err(Error::Config(msg));
        let uses = |k: &str| self.experiment.keys().contains(&k);
        if uses("trials") && self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if uses("rho") && !(self.rho >= 0.0 && self.rho < 0.5) {
            return bad(format!("rho = {} outside [0, 1/2)", self.rho));
        }
        if uses("rho_grid") && (self.rho_grid.is_empty() || self.rho_grid.iter().any(|r| !(*r >= 0.0 && *r < 0.5))) {
            return bad("rho_grid values must lie in [0, 1/2)".into());
        }
        if uses("eps") && !(self.eps > 0.0 && self.eps <= 1.0) {
            return bad(format!("eps = {} outside (0, 1]", self.eps));
        }
        if uses("delta") && !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta = {} outside (0, 1)", self.delta));
        }
        if uses("eps_grid") && (self.eps_grid.is_empty() || self.eps_grid.iter().any(|e| !(*e > 0.0 && *e <= 1.0))) {
            return bad("eps_grid values must lie in (0, 1]".into());
        }
        if uses("t") && self.t == 0 {
            return bad("t must be at least 1".into());
        }
        if uses("truncation") && self.truncation == 0 {
            return bad("truncation must be at least 1".into());
        }
        if uses("special") && self.special >= self.truncation {
            return bad(format!(
                "special = {} must be below truncation = {}",
                self.special, self.truncation
            ));
        }
        if self.sample_size == Some(0) {
            return bad("sample_size must be at least 1".into());
        }
        match self.experiment {
            VerifyDistances => {
                if !(2..=crate::distance::BRUTE_FORCE_MAX_DIM).contains(&self.n) {
                    return bad(format!("n = {} outside 2..=20 for brute force", self.n));
                }
                if !(2..=MAX_VERIFY_TRUNCATION).contains(&self.truncation) {
                    return bad(format!(
                        "truncation = {} outside 2..={MAX_VERIFY_TRUNCATION} for brute force",
                        self.truncation
                    ));
                }
            }
            MajorityLearner => {
                if self.n == 0 {
                    return bad("n must be at least 1".into());
                }
            }
            WtvAdversary | CoverProfile | WtvExact => {}
            ConfidentFail => {
                if self.n < 2 || !self.n.is_multiple_of(2) {
                    return bad(format!("n = {} must be even and at least 2", self.n));
                }
            }
            StvToPac | UeEtvRoundtrip | PacToWtv => {
                if !(2..=crate::classes::MAX_ENUMERATED_CUBE_DIM).contains(&self.n) {
                    return bad(format!("n = {} outside 2..=16 for an enumerated family", self.n));
                }
                if self.experiment == PacToWtv && self.pairs == 0 {
                    return bad("pairs must be at least 1".into());
                }
            }
            UcFails => {
                if self.n == 0 || self.n > u32::MAX as usize {
                    return bad(format!("domain size n = {} out of range", self.n));
                }
                if self.sample_sizes.is_empty() || self.sample_sizes.contains(&0) {
                    return bad("sample_sizes must be nonempty and positive".into());
                }
                let k = self.k.unwrap_or(self.n);
                if let Some(&m) = self.sample_sizes.iter().find(|&&m| m > k) {
                    return bad(format!("sample size {m} exceeds support bound k = {k}"));
                }
            }
        }
        Ok(())
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("bad value `{value}` for `{key}`")))
}

fn parse_optional<T: FromStr>(key: &str, value: &str) -> Result<Option<T>> {
    if value == "auto" {
        Ok(None)
    } else {
        parse(key, value).map(Some)
    }
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect()
}
