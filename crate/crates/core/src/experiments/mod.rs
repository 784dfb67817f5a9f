//! Named experiments with typed configs and self-describing results.
//!
//! A result is a sequence of records: one header echoing the resolved
//! config, then per-trial and per-quantity records, rate summaries and
//! pass/fail verdicts. It serializes to JSON lines or to a long-format CSV.

mod config;
mod runners;

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

pub use config::{ExperimentConfig, ExperimentKind, ALL_KEYS, DEFAULT_SEED, SEED_ENV};

use crate::error::{Error, Result};
use crate::harness::{RateEstimate, TrialReport};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum Record {
    Header {
        experiment: String,
        version: String,
        config: BTreeMap<String, Value>,
    },
    Trial {
        trial: usize,
        /// Hex of the first 128 bits of the trial's stream seed.
        seed: String,
        success: bool,
        metrics: BTreeMap<String, f64>,
        /// One `0`/`1` per event indicator.
        indicators: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        error: Option<String>,
    },
    Quantity {
        name: String,
        value: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        reference: Option<f64>,
        tags: BTreeMap<String, String>,
    },
    Summary {
        name: String,
        successes: usize,
        trials: usize,
        point: f64,
        lower: f64,
        upper: f64,
    },
    Verdict {
        check: String,
        passed: bool,
        observed: f64,
        relation: String,
        threshold: f64,
    },
}

impl Record {
    fn trial(r: &TrialReport) -> Self {
        Record::Trial {
            trial: r.trial,
            seed: format!("{:032x}", r.seed),
            success: r.success,
            metrics: r.metrics.clone(),
            indicators: r.indicators.iter().map(|&b| if b { '1' } else { '0' }).collect(),
            error: r.error.clone(),
        }
    }
}

/// Comparison a verdict applies to `observed` against `threshold`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    AtLeast,
    AtMost,
    Equal,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::AtLeast => ">=",
            Relation::AtMost => "<=",
            Relation::Equal => "==",
        }
    }

    fn holds(self, observed: f64, threshold: f64) -> bool {
        match self {
            Relation::AtLeast => observed >= threshold,
            Relation::AtMost => observed <= threshold,
            Relation::Equal => observed == threshold,
        }
    }
}

/// Everything an experiment run produced.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub records: Vec<Record>,
}

impl ExperimentResult {
    fn new(config: &ExperimentConfig) -> Self {
        let header = Record::Header {
            experiment: config.experiment.name().to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            config: config
                .resolved()
                .into_iter()
                .map(|(k, v)| (k.to_owned(), v))
                .collect(),
        };
        Self {
            config: config.clone(),
            records: vec![header],
        }
    }

    fn trials(&mut self, reports: &[TrialReport]) {
        self.records.extend(reports.iter().map(Record::trial));
    }

    fn quantity(&mut self, name: &str, value: f64, reference: Option<f64>, tags: &[(&str, String)]) {
        self.records.push(Record::Quantity {
            name: name.to_owned(),
            value,
            reference,
            tags: tags.iter().map(|(k, v)| ((*k).to_owned(), v.clone())).collect(),
        });
    }

    fn summary(&mut self, name: &str, r: &RateEstimate) {
        self.records.push(Record::Summary {
            name: name.to_owned(),
            successes: r.successes,
            trials: r.trials,
            point: r.point,
            lower: r.lower,
            upper: r.upper,
        });
    }

    fn verdict(&mut self, check: &str, observed: f64, relation: Relation, threshold: f64) {
        self.records.push(Record::Verdict {
            check: check.to_owned(),
            passed: relation.holds(observed, threshold),
            observed,
            relation: relation.symbol().to_owned(),
            threshold,
        });
    }

    /// Whether every verdict passed.
    pub fn passed(&self) -> bool {
        self.verdicts().all(|(_, passed, _)| passed)
    }

    /// `(check, passed, observed)` for every verdict.
    pub fn verdicts(&self) -> impl Iterator<Item = (&str, bool, f64)> + '_ {
        self.records.iter().filter_map(|r| match r {
            Record::Verdict {
                check,
                passed,
                observed,
                ..
            } => Some((check.as_str(), *passed, *observed)),
            _ => None,
        })
    }

    pub fn verdict_named(&self, check: &str) -> Option<(bool, f64)> {
        self.verdicts()
            .find(|(c, _, _)| *c == check)
            .map(|(_, p, o)| (p, o))
    }

    pub fn summary_named(&self, name: &str) -> Option<RateEstimate> {
        self.records.iter().find_map(|r| match r {
            Record::Summary {
                name: n,
                successes,
                trials,
                point,
                lower,
                upper,
            } if n == name => Some(RateEstimate {
                successes: *successes,
                trials: *trials,
                point: *point,
                lower: *lower,
                upper: *upper,
            }),
            _ => None,
        })
    }

    /// `(value, reference)` of every quantity with this name.
    pub fn quantities_named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = (f64, Option<f64>)> + 'a {
        self.records.iter().filter_map(move |r| match r {
            Record::Quantity {
                name: n,
                value,
                reference,
                ..
            } if n == name => Some((*value, *reference)),
            _ => None,
        })
    }

    pub fn trial_count(&self) -> usize {
        self.records
            .iter()
            .filter(|r| matches!(r, Record::Trial { .. }))
            .count()
    }

    /// One JSON object per line, LF-terminated.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("records serialize"));
            out.push('\n');
        }
        out
    }

    /// Long-format table with columns
    /// `record,name,trial,field,value,reference,tags`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
        let csv_err = |e: csv::Error| Error::Config(format!("csv: {e}"));
        w.write_record(["record", "name", "trial", "field", "value", "reference", "tags"])
            .map_err(csv_err)?;
        let num = |x: f64| serde_json::to_string(&x).expect("number serializes");
        let experiment = self.config.experiment.name();
        for r in &self.records {
            let mut row = |kind: &str, name: &str, trial: String, field: &str, value: String, reference: String, tags: String| {
                w.write_record([kind, name, &trial, field, &value, &reference, &tags])
            };
            match r {
                Record::Header { config, .. } => {
                    for (k, v) in config {
                        row("header", experiment, String::new(), k, v.to_string(), String::new(), String::new())
                            .map_err(csv_err)?;
                    }
                }
                Record::Trial {
                    trial,
                    seed,
                    success,
                    metrics,
                    indicators,
                    error,
                } => {
                    let t = trial.to_string();
                    row("trial", experiment, t.clone(), "seed", seed.clone(), String::new(), String::new())
                        .map_err(csv_err)?;
                    row("trial", experiment, t.clone(), "success", (*success as u8).to_string(), String::new(), String::new())
                        .map_err(csv_err)?;
                    for (k, v) in metrics {
                        row("trial", experiment, t.clone(), k, num(*v), String::new(), String::new()).map_err(csv_err)?;
                    }
                    if !indicators.is_empty() {
                        row("trial", experiment, t.clone(), "indicators", indicators.clone(), String::new(), String::new())
                            .map_err(csv_err)?;
                    }
                    if let Some(e) = error {
                        row("trial", experiment, t, "error", e.clone(), String::new(), String::new()).map_err(csv_err)?;
                    }
                }
                Record::Quantity {
                    name,
                    value,
                    reference,
                    tags,
                } => {
                    let tags = tags
                        .iter()
                        .map(|(k, v)| format!("{k}={v}"))
                        .collect::<Vec<_>>()
                        .join(";");
                    row("quantity", name, String::new(), "value", num(*value), reference.map(num).unwrap_or_default(), tags)
                        .map_err(csv_err)?;
                }
                Record::Summary {
                    name,
                    successes,
                    trials,
                    point,
                    lower,
                    upper,
                } => {
                    for (field, v) in [
                        ("successes", successes.to_string()),
                        ("trials", trials.to_string()),
                        ("point", num(*point)),
                        ("lower", num(*lower)),
                        ("upper", num(*upper)),
                    ] {
                        row("summary", name, String::new(), field, v, String::new(), String::new()).map_err(csv_err)?;
                    }
                }
                Record::Verdict {
                    check,
                    passed,
                    observed,
                    relation,
                    threshold,
                } => {
                    row("verdict", check, String::new(), "passed", (*passed as u8).to_string(), String::new(), String::new())
                        .map_err(csv_err)?;
                    row("verdict", check, String::new(), "observed", num(*observed), num(*threshold), relation.clone())
                        .map_err(csv_err)?;
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv of UTF-8 fields"))
    }
}

/// Validates the config and runs the experiment on `workers` threads (the
/// global pool when `None`). The records do not depend on `workers`.
pub fn run_experiment(config: &ExperimentConfig, workers: Option<usize>) -> Result<ExperimentResult> {
    config.validate()?;
    let mut out = ExperimentResult::new(config);
    use ExperimentKind::*;
    match config.experiment {
        VerifyDistances => runners::verify_distances(config, &mut out)?,
        MajorityLearner => runners::majority_learner(config, workers, &mut out)?,
        ConfidentFail => runners::confident_fail(config, workers, &mut out)?,
        StvToPac => runners::stv_to_pac(config, workers, &mut out)?,
        WtvExact => runners::wtv_exact(config, workers, &mut out)?,
        WtvAdversary => runners::wtv_adversary(config, workers, &mut out)?,
        CoverProfile => runners::cover_profile(config, &mut out)?,
        UeEtvRoundtrip => runners::ue_etv_roundtrip(config, workers, &mut out)?,
        UcFails => runners::uc_fails(config, workers, &mut out)?,
        PacToWtv => runners::pac_to_wtv(config, workers, &mut out)?,
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jsonl_and_csv_shapes() {
        let cfg = ExperimentConfig::defaults(ExperimentKind::CoverProfile, 1);
        let mut r = ExperimentResult::new(&cfg);
        r.quantity("size", 3.0, Some(17.0), &[("eps", "0.25".into())]);
        r.summary("rate", &RateEstimate::wilson(9, 10).unwrap());
        r.verdict("rate at least 0.8", 0.9, Relation::AtLeast, 0.8);
        r.verdict("never", 1.0, Relation::Equal, 0.0);
        let lines: Vec<_> = r.to_jsonl().lines().map(str::to_owned).collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[0].starts_with(r#"{"record":"header","experiment":"cover-profile""#));
        assert!(lines[0].contains(r#""eps_grid":[0.5,0.25,0.125]"#));
        assert!(lines[1].contains(r#""reference":17.0"#));
        assert!(!r.passed());
        assert_eq!(r.verdict_named("rate at least 0.8"), Some((true, 0.9)));
        let csv = r.to_csv().unwrap();
        assert!(csv.starts_with("record,name,trial,field,value,reference,tags\n"));
        assert!(csv.contains("quantity,size,,value,3.0,17.0,eps=0.25\n"));
        assert!(csv.contains("verdict,never,,passed,0,,\n"));
    }
}
