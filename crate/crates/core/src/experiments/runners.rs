use rand::seq::index;
use rand::Rng;

use super::{ExperimentConfig, ExperimentResult, Relation};
use crate::adversary::{
    consistency_crossing_n, consistency_set, exact_posterior, flip_event_probability,
    unique_consistency_probability, uniform_cube_adversary, weighted_categorical_adversary,
};
use crate::classes::{
    categorical_distance_closed_form, cube_distance_closed_form, sample, BenedekItaiInstance,
    CategoricalInstance, NoisyCubeInstance, Teacher,
};
use crate::covers::{categorical_canonical_cover, greedy_cover};
use crate::distance::{brute_force_distances, exact_distance, growth_count, DistanceMatrix};
use crate::distribution::DistributionSpec;
use crate::domain::{Hypothesis, Point};
use crate::error::{Error, Result};
use crate::harness::{derive_stream, failure_rate, run_trials, success_rate, RateEstimate, TrialOutcome, TrialReport};
use crate::learners::{
    categorical_good_set, categorical_wtv_learner, empirical_errors, erm, etv_to_ue,
    lower_bound_params, majority_constant_learner, noisy_majority_confident, pac_to_wtv as build_pac_wtv,
    pac_wtv_good_set, stv_to_pac as run_stv_to_pac, true_errors, ue_to_etv, EmpiricalErrorEstimator,
    ExactEtvOracle, ExactStvOracle, FiniteFamily, MajorityConstant, SampleSizePlan, SizeRule, UeEtvSamples,
};
use crate::scalar::Real;

/// Closed form vs brute force agreement demanded by `verify-distances`.
pub const DISTANCE_TOLERANCE: f64 = 1e-12;

/// Centers (cube) or special indices (categorical) checked exhaustively up to
/// this dimension; above it a few seeded ones are drawn.
const EXHAUSTIVE_CENTER_DIM: usize = 8;
const SEEDED_CENTERS: usize = 4;

type Workers = Option<usize>;

fn bits(x: &[u32]) -> String {
    x.iter().map(|&b| char::from_digit(b, 10).unwrap_or('?')).collect()
}

fn indicator_rate(reports: &[TrialReport], k: usize) -> Result<RateEstimate> {
    RateEstimate::of(reports.iter().map(|r| r.indicators.get(k).copied().unwrap_or(false)))
}

/// Records the trials and the count of trials whose function failed.
fn record_trials(out: &mut ExperimentResult, reports: &[TrialReport]) {
    out.trials(reports);
    let errored = reports.iter().filter(|r| r.error.is_some()).count();
    out.verdict("trials without errors", errored as f64, Relation::Equal, 0.0);
}

pub(super) fn verify_distances(cfg: &ExperimentConfig, out: &mut ExperimentResult) -> Result<()> {
    let name = cfg.experiment.name();
    let (_, mut rng) = derive_stream(name, cfg.seed, 0);
    let mut worst = 0.0f64;
    let mut pairs = 0usize;

    let n = cfg.n;
    let centers: Vec<Point> = if n <= EXHAUSTIVE_CENTER_DIM {
        (0..1u64 << n).map(|b| Point::from_bits(n, b)).collect()
    } else {
        let inst = NoisyCubeInstance::<f64>::new(n, 0.0)?;
        (0..SEEDED_CENTERS).map(|_| inst.random_center(&mut rng)).collect()
    };
    for &rho in &cfg.rho_grid {
        let inst = NoisyCubeInstance::<f64>::new(n, rho)?;
        let class = inst.dictators();
        for x in &centers {
            let d = inst.distribution(x.clone())?;
            let brute = brute_force_distances(&d, &class)?;
            for i in 0..n {
                for j in (i + 1)..n {
                    let closed = cube_distance_closed_form(x, rho, i, j)?;
                    let core = exact_distance(&d, class.get(i), class.get(j))?;
                    let reference = brute.get(i, j);
                    worst = worst.max((closed - reference).abs()).max((core - reference).abs());
                    pairs += 1;
                    out.quantity(
                        "cube_distance",
                        closed,
                        Some(reference),
                        &[
                            ("rho", rho.to_string()),
                            ("center", bits(x)),
                            ("i", i.to_string()),
                            ("j", j.to_string()),
                        ],
                    );
                }
            }
        }
    }

    let m = cfg.truncation;
    let inst = CategoricalInstance::<f64>::new(m)?;
    let class = inst.indicators();
    let specials: Vec<usize> = if m <= EXHAUSTIVE_CENTER_DIM {
        (0..m).collect()
    } else {
        let mut s = index::sample(&mut rng, m, SEEDED_CENTERS.min(m)).into_vec();
        s.sort_unstable();
        s
    };
    for &special in &specials {
        let d = inst.distribution(special)?;
        let brute = brute_force_distances(&d, &class)?;
        for j in 0..m {
            for k in (j + 1)..m {
                let closed = categorical_distance_closed_form(&inst, special, j, k)?;
                let core = exact_distance(&d, class.get(j), class.get(k))?;
                let reference = brute.get(j, k);
                worst = worst.max((closed - reference).abs()).max((core - reference).abs());
                pairs += 1;
                out.quantity(
                    "categorical_distance",
                    closed,
                    Some(reference),
                    &[("special", special.to_string()), ("j", j.to_string()), ("k", k.to_string())],
                );
            }
        }
    }
    out.quantity("pairs_checked", pairs as f64, None, &[]);
    out.verdict("max closed-form gap", worst, Relation::AtMost, DISTANCE_TOLERANCE);
    Ok(())
}

pub(super) fn majority_learner(cfg: &ExperimentConfig, workers: Workers, out: &mut ExperimentResult) -> Result<()> {
    let inst = NoisyCubeInstance::<f64>::new(cfg.n, cfg.rho)?;
    let m = match cfg.sample_size {
        Some(m) => m,
        None => SizeRule::MAJORITY.size(1.0, cfg.delta, 1)?,
    };
    let tol = f64::exact_tolerance();
    let reports = run_trials(cfg.experiment.name(), cfg.trials, cfg.seed, workers, |_, rng| {
        let d = inst.distribution(inst.random_center(rng))?;
        let target = Hypothesis::Dictator(rng.gen_range(0..inst.n()));
        let teacher = Teacher::new(&d, &target);
        let h = majority_constant_learner(&teacher.labeled(m, rng)?)?;
        let err = teacher.error_of(&h)?;
        Ok(TrialOutcome::new(err <= cfg.rho + tol).metric("error", err))
    })?;
    record_trials(out, &reports);
    out.quantity("sample_size", m as f64, None, &[]);
    let rate = success_rate(&reports)?;
    out.summary("error_at_most_rho", &rate);
    out.verdict("success rate", rate.point, Relation::AtLeast, 1.0 - cfg.delta);
    Ok(())
}

/// Failure-rate floor for noisy majority at the default parameters.
pub const CONFIDENT_FAILURE_FLOOR: f64 = 0.85;

pub(super) fn confident_fail(cfg: &ExperimentConfig, workers: Workers, out: &mut ExperimentResult) -> Result<()> {
    let inst = NoisyCubeInstance::<f64>::new(cfg.n, cfg.rho)?;
    let t = cfg.t as usize;
    let n = cfg.n;
    let reports = run_trials(cfg.experiment.name(), cfg.trials, cfg.seed, workers, |_, rng| {
        let draw = uniform_cube_adversary(&inst, rng)?;
        let DistributionSpec::NoisyCube(cube) = &draw.distribution else {
            return Err(Error::Unsupported("cube adversary returned another family".into()));
        };
        let x = cube.center();
        let ts = sample(&draw.distribution, t, rng)?;
        let flipped = (0..n).any(|j| ts.iter().all(|p| p[j] != x[j]));
        let guess = noisy_majority_confident(&ts)?;
        let ok = guess.is_success(x);
        Ok(TrialOutcome::new(ok)
            .metric("labeled", guess.labeled_count() as f64)
            .indicators(vec![flipped, !ok]))
    })?;
    record_trials(out, &reports);

    let events = flip_event_probability(n, cfg.rho, cfg.t)?;
    let flips = indicator_rate(&reports, 0)?;
    let p = events.some_always_flipped;
    out.summary("some_coordinate_always_flipped", &flips);
    out.quantity("flip_probability", flips.point, Some(p), &[]);
    out.quantity("expected_unanimous", events.expected_unanimous, None, &[]);
    out.quantity("unanimous_bound", events.unanimous_bound, None, &[]);
    if cfg.rho > 0.0 {
        let lb = lower_bound_params(n as f64, cfg.rho)?;
        out.quantity("lower_bound_t_threshold", lb.t_threshold as f64, None, &[]);
        out.quantity("lower_bound_conditions_met", lb.conditions_met as u8 as f64, None, &[]);
    }
    let se = (p * (1.0 - p) / cfg.trials as f64).sqrt();
    out.verdict("flip frequency gap in standard errors", (flips.point - p).abs(), Relation::AtMost, 3.0 * se);

    let failures = failure_rate(&reports)?;
    out.summary("noisy_majority_failure", &failures);
    out.verdict("failure rate", failures.point, Relation::AtLeast, CONFIDENT_FAILURE_FLOOR);
    Ok(())
}

pub(super) fn stv_to_pac(cfg: &ExperimentConfig, workers: Workers, out: &mut ExperimentResult) -> Result<()> {
    let inst = NoisyCubeInstance::<f64>::new(cfg.n, cfg.rho)?;
    let class = inst.dictators();
    let family = FiniteFamily::new(inst.enumerate_family()?, &class)?;
    let unlabeled = match cfg.sample_size {
        Some(m) => m,
        None => SampleSizePlan::finite_class(class.len()).n_stv(cfg.eps / 4.0, cfg.delta)?,
    };
    let reports = run_trials(cfg.experiment.name(), cfg.trials, cfg.seed, workers, |_, rng| {
        let d = family.member(rng.gen_range(0..family.len()));
        let target = class.get(rng.gen_range(0..class.len())).clone();
        let teacher = Teacher::new(d, &target);
        let oracle = ExactStvOracle {
            distribution: d.clone(),
        };
        let got = run_stv_to_pac(&oracle, &family, &class, cfg.eps, cfg.delta, &teacher, unlabeled, rng)?;
        let err = teacher.error_of(&got.hypothesis)?;
        Ok(TrialOutcome::new(err <= cfg.eps)
            .metric("error", err)
            .metric("cover_size", got.cover_size as f64)
            .metric("labeled_size", got.labeled_size as f64)
            .metric("family_index", got.family_index as f64))
    })?;
    record_trials(out, &reports);
    out.quantity("unlabeled_size", unlabeled as f64, None, &[]);
    let rate = success_rate(&reports)?;
    out.summary("error_at_most_eps", &rate);
    out.verdict("success rate", rate.point, Relation::AtLeast, 1.0 - cfg.delta);
    Ok(())
}

/// Per-index membership floors for the zero-error WTV learner.
pub const MEMBERSHIP_FLOOR: f64 = 0.95;
pub const MEMBERSHIP_WILSON_FLOOR: f64 = 0.94;

pub(super) fn wtv_exact(cfg: &ExperimentConfig, workers: Workers, out: &mut ExperimentResult) -> Result<()> {
    let inst = CategoricalInstance::<f64>::new(cfg.truncation)?;
    let special = cfg.special;
    let d = inst.distribution(special)?;
    let n = inst.n();
    let m = match cfg.sample_size {
        Some(m) => m,
        None => SizeRule::CATEGORICAL_WTV.size(1.0, cfg.delta, 1)?,
    };
    let truth = DistanceMatrix::from_fn(n, |j, k| categorical_distance_closed_form(&inst, special, j, k))?;
    let reports = run_trials(cfg.experiment.name(), cfg.trials, cfg.seed, workers, |_, rng| {
        let t = sample(&d, m, rng)?;
        let learned = categorical_wtv_learner(&inst, &t)?;
        let good: Vec<usize> = categorical_good_set(&inst, special, &learned.means).into_iter().collect();
        let mut worst = 0.0f64;
        for (a, &j) in good.iter().enumerate() {
            for &k in &good[a + 1..] {
                worst = worst.max((learned.estimate.get(j, k) - truth.get(j, k)).abs());
            }
        }
        let mut member = vec![false; n];
        for &j in &good {
            member[j] = true;
        }
        Ok(TrialOutcome::new(worst == 0.0)
            .metric("max_error", worst)
            .metric("good_size", good.len() as f64)
            .indicators(member))
    })?;
    record_trials(out, &reports);
    out.quantity("sample_size", m as f64, None, &[]);
    let zero = success_rate(&reports)?;
    out.summary("zero_error_on_good_set", &zero);
    out.verdict("zero-error trial rate", zero.point, Relation::Equal, 1.0);

    let mut min_point = f64::INFINITY;
    let mut min_lower = f64::INFINITY;
    for j in 0..n {
        let r = indicator_rate(&reports, j)?;
        min_point = min_point.min(r.point);
        min_lower = min_lower.min(r.lower);
        out.summary(&format!("member_{j}"), &r);
    }
    out.verdict("min membership frequency", min_point, Relation::AtLeast, MEMBERSHIP_FLOOR);
    out.verdict("min membership Wilson lower bound", min_lower, Relation::AtLeast, MEMBERSHIP_WILSON_FLOOR);
    Ok(())
}

pub const MULTI_CONSISTENT_FLOOR: f64 = 0.45;
pub const ERM_FAILURE_FLOOR: f64 = 0.20;
/// Posterior entries must match `1/|W|` this closely.
pub const POSTERIOR_TOLERANCE: f64 = 1e-12;

pub(super) fn wtv_adversary(cfg: &ExperimentConfig, workers: Workers, out: &mut ExperimentResult) -> Result<()> {
    let inst = CategoricalInstance::<f64>::new(cfg.truncation)?;
    let class = inst.indicators();
    let t = cfg.t;
    let reports = run_trials(cfg.experiment.name(), cfg.trials, cfg.seed, workers, |_, rng| {
        let draw = weighted_categorical_adversary(&inst, t, rng)?;
        let teacher = Teacher::new(&draw.distribution, &draw.target);
        let s = teacher.labeled(t as usize, rng)?;
        let w = consistency_set(&s, &inst)?;
        let post = exact_posterior(&w, &inst, t)?;
        let uniform = 1.0 / w.len() as f64;
        let gap = (0..inst.n())
            .map(|j| (post[j] - if w.contains(j) { uniform } else { 0.0 }).abs())
            .fold(0.0, f64::max);
        let err = teacher.error_of(&erm(&class, &s)?)?;
        Ok(TrialOutcome::new(gap <= POSTERIOR_TOLERANCE)
            .metric("index", draw.index as f64)
            .metric("consistent", w.len() as f64)
            .metric("posterior_gap", gap)
            .metric("erm_error", err)
            .indicators(vec![w.len() >= 2, err >= 0.25, w.len() == 1]))
    })?;
    record_trials(out, &reports);

    let crossing = consistency_crossing_n(t, std::f64::consts::LN_2)?;
    out.quantity("crossing_n", crossing as f64, None, &[]);
    let uniform = success_rate(&reports)?;
    out.summary("posterior_uniform", &uniform);
    let multi = indicator_rate(&reports, 0)?;
    out.summary("multiple_consistent", &multi);
    let erm_fail = indicator_rate(&reports, 1)?;
    out.summary("erm_error_at_least_quarter", &erm_fail);
    let unique = indicator_rate(&reports, 2)?;
    out.summary("unique_consistent", &unique);
    out.quantity(
        "unique_consistency_probability",
        unique.point,
        Some(unique_consistency_probability(&inst, t)?),
        &[],
    );
    let conditional: Vec<f64> = reports
        .iter()
        .filter(|r| r.indicators.first() == Some(&true))
        .filter_map(|r| r.metric("erm_error"))
        .collect();
    if !conditional.is_empty() {
        let mean = conditional.iter().sum::<f64>() / conditional.len() as f64;
        out.quantity("erm_error_given_multiple", mean, None, &[]);
    }
    out.verdict("posterior uniform rate", uniform.point, Relation::Equal, 1.0);
    out.verdict("multiple-consistent frequency", multi.point, Relation::AtLeast, MULTI_CONSISTENT_FLOOR);
    out.verdict("ERM error >= 1/4 frequency", erm_fail.point, Relation::AtLeast, ERM_FAILURE_FLOOR);
    Ok(())
}

pub(super) fn cover_profile(cfg: &ExperimentConfig, out: &mut ExperimentResult) -> Result<()> {
    let inst = CategoricalInstance::<f64>::new(cfg.truncation)?;
    let class = inst.indicators();
    let special = cfg.special;
    let d = inst.distribution(special)?;
    let mut grid = cfg.eps_grid.clone();
    grid.sort_by(|a, b| b.partial_cmp(a).expect("validated grid"));
    for eps in grid {
        let tag = [("eps", eps.to_string())];
        let canonical = categorical_canonical_cover(&inst, special, eps)?;
        let canonical_radius =
            canonical.max_radius_with(|h, c| categorical_distance_closed_form(&inst, special, h, c))?;
        let greedy = greedy_cover(&d, &class, eps)?;
        let greedy_radius = greedy.max_radius_with(|h, c| exact_distance(&d, class.get(h), class.get(c)))?;
        let bound = 2f64.powf(2.0 / eps) + 1.0;
        out.quantity("canonical_size", canonical.len() as f64, Some(bound), &tag);
        out.quantity("canonical_radius", canonical_radius, Some(eps), &tag);
        out.quantity("greedy_size", greedy.len() as f64, Some(canonical.len() as f64), &tag);
        out.quantity("greedy_radius", greedy_radius, Some(eps), &tag);
        out.verdict(&format!("canonical size bound at eps={eps}"), canonical.len() as f64, Relation::AtMost, bound);
        out.verdict(&format!("canonical radius at eps={eps}"), canonical_radius, Relation::AtMost, eps);
        out.verdict(&format!("greedy radius at eps={eps}"), greedy_radius, Relation::AtMost, eps);
        out.verdict(
            &format!("greedy no larger than canonical at eps={eps}"),
            greedy.len() as f64,
            Relation::AtMost,
            canonical.len() as f64,
        );
    }
    Ok(())
}

pub(super) fn ue_etv_roundtrip(cfg: &ExperimentConfig, workers: Workers, out: &mut ExperimentResult) -> Result<()> {
    let inst = NoisyCubeInstance::<f64>::new(cfg.n, cfg.rho)?;
    let class = inst.dictators();
    let family = FiniteFamily::new(inst.enumerate_family()?, &class)?;
    let (eps, delta) = (cfg.eps, cfg.delta);
    let k = class.len();
    let cover_size = SizeRule::CHERNOFF.size(eps / 8.0, delta / 3.0, k)?;
    let map_size = SizeRule::CHERNOFF.size(eps / 8.0, delta / (3.0 * k as f64), k)?;
    let distance_size = SizeRule::CHERNOFF.size(eps / 4.0, delta / 3.0, k * k)?;
    let labeled_size = SizeRule::PAC_TO_WTV.size(eps, delta, k)?;
    let reports = run_trials(cfg.experiment.name(), cfg.trials, cfg.seed, workers, |_, rng| {
        let member = rng.gen_range(0..family.len());
        let d = family.member(member);
        let a = sample(d, cover_size, rng)?;
        let b = sample(d, map_size, rng)?;
        let c = sample(d, distance_size, rng)?;
        let samples = UeEtvSamples {
            cover: &a,
            map: &b,
            distances: &c,
        };
        let tv = match ue_to_etv(&EmpiricalErrorEstimator, &family, &class, samples, eps) {
            Ok(o) => family.distances(member).max_gap(family.distances(o.family_index), None),
            Err(Error::Infeasible(_)) => f64::INFINITY,
            Err(e) => return Err(e),
        };

        let target = class.get(rng.gen_range(0..k)).clone();
        let teacher = Teacher::new(d, &target);
        let s = teacher.labeled(labeled_size, rng)?;
        let oracle = ExactEtvOracle {
            distribution: d.clone(),
        };
        let lifted = etv_to_ue(&oracle, |dp| greedy_cover(dp, &class, eps / 4.0), &class, &c, &s)?;
        let truth = true_errors(d, &class, &target)?;
        let worst = lifted
            .estimates
            .iter()
            .zip(&truth)
            .map(|(e, t)| (e - t).abs())
            .fold(0.0, f64::max);
        let forward = tv <= eps;
        let backward = worst <= eps;
        Ok(TrialOutcome::new(forward && backward)
            .metric("tv", if tv.is_finite() { tv } else { -1.0 })
            .metric("estimate_error", worst)
            .indicators(vec![forward, backward]))
    })?;
    record_trials(out, &reports);
    for (name, v) in [
        ("cover_sample_size", cover_size),
        ("map_sample_size", map_size),
        ("distance_sample_size", distance_size),
        ("labeled_sample_size", labeled_size),
    ] {
        out.quantity(name, v as f64, None, &[]);
    }
    let fwd = indicator_rate(&reports, 0)?;
    let bwd = indicator_rate(&reports, 1)?;
    out.summary("ue_to_etv_tv_within_eps", &fwd);
    out.summary("etv_to_ue_uniformly_accurate", &bwd);
    out.verdict("ue_to_etv success rate", fwd.point, Relation::AtLeast, 1.0 - delta);
    out.verdict("etv_to_ue success rate", bwd.point, Relation::AtLeast, 1.0 - delta);
    Ok(())
}

pub(super) fn uc_fails(cfg: &ExperimentConfig, workers: Workers, out: &mut ExperimentResult) -> Result<()> {
    let size = cfg.n;
    let inst = BenedekItaiInstance::<f64>::new(size, cfg.k.unwrap_or(size))?;
    let d = inst.distribution();
    let ones = inst.all_ones();
    let per = cfg.trials;
    let sizes = &cfg.sample_sizes;
    let tol = f64::exact_tolerance();
    let reports = run_trials(cfg.experiment.name(), per * sizes.len(), cfg.seed, workers, |k, rng| {
        let m = sizes[k / per];
        let s = Teacher::new(&d, &ones).labeled(m, rng)?;
        let w = inst.witness(&s)?;
        let empirical = empirical_errors::<f64>(std::slice::from_ref(&w), &s)?[0];
        let truth = exact_distance(&d, &w, &ones)?;
        let floor = 1.0 - m as f64 / size as f64;
        Ok(TrialOutcome::new(empirical == 0.0 && truth >= floor - tol)
            .metric("sample_size", m as f64)
            .metric("empirical_error", empirical)
            .metric("true_error", truth)
            .metric("floor", floor))
    })?;
    record_trials(out, &reports);
    for (g, &m) in sizes.iter().enumerate() {
        let r = success_rate(&reports[g * per..(g + 1) * per])?;
        out.summary(&format!("witness_valid_m{m}"), &r);
        out.verdict(&format!("witness valid rate at |S|={m}"), r.point, Relation::Equal, 1.0);
    }
    Ok(())
}

pub(super) fn pac_to_wtv(cfg: &ExperimentConfig, workers: Workers, out: &mut ExperimentResult) -> Result<()> {
    let name = cfg.experiment.name();
    let inst = NoisyCubeInstance::<f64>::new(cfg.n, cfg.rho)?;
    let class = inst.dictators();
    let n = class.len();
    let (_, mut setup) = derive_stream(&format!("{name}/setup"), cfg.seed, 0);
    let center = inst.random_center(&mut setup);
    let pairs: Vec<(usize, usize)> = (0..cfg.pairs)
        .map(|_| {
            let h = setup.gen_range(0..n);
            let g = setup.gen_range(0..n - 1);
            (h, if g >= h { g + 1 } else { g })
        })
        .collect();
    let d = inst.distribution(center.clone())?;
    let exact = DistanceMatrix::exact(&d, &class)?;
    let (eps, delta) = (cfg.eps, cfg.delta);
    let t_size = SizeRule::MAJORITY.size(1.0, delta, 1)?;
    let reports = run_trials(name, cfg.trials, cfg.seed, workers, |_, rng| {
        let t = sample(&d, t_size, rng)?;
        let growth = growth_count(&class, &t)?;
        let t_prime = sample(&d, SizeRule::PAC_TO_WTV.size(eps, delta, growth)?, rng)?;
        let built = build_pac_wtv::<f64>(&MajorityConstant, &class, &t, &t_prime)?;
        let good = pac_wtv_good_set(&d, &class, &built.representatives, eps)?;
        let hits: Vec<bool> = pairs
            .iter()
            .map(|&(h, g)| {
                good.contains(&h) && good.contains(&g) && (built.estimate.get(h, g) - exact.get(h, g)).abs() <= eps
            })
            .collect();
        Ok(TrialOutcome::new(hits.iter().all(|&b| b))
            .metric("labelings", built.labelings as f64)
            .metric("good_size", good.len() as f64)
            .metric("t_prime_size", t_prime.len() as f64)
            .indicators(hits))
    })?;
    record_trials(out, &reports);
    out.quantity("t_size", t_size as f64, None, &[("center", bits(&center))]);
    let mut min_point = f64::INFINITY;
    for (p, &(h, g)) in pairs.iter().enumerate() {
        let r = indicator_rate(&reports, p)?;
        min_point = min_point.min(r.point);
        out.summary(&format!("pair_{p}_{h}_{g}"), &r);
    }
    out.summary("all_pairs_jointly", &success_rate(&reports)?);
    out.verdict("min pair frequency", min_point, Relation::AtLeast, 1.0 - 3.0 * delta);
    Ok(())
}
