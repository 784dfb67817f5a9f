use std::collections::BTreeSet;

use super::{empirical_errors, DistanceEstimate, EtvLearner, FiniteFamily, UniformEstimator};
use crate::covers::CoverMapPair;
use crate::distance::EvaluationTable;
use crate::distribution::DistributionSpec;
use crate::domain::{HypothesisClass, LabeledSample, UnlabeledSample};
use crate::error::{Error, Result};
use crate::scalar::{cast, count, Real};

/// The three unlabeled samples used by [`ue_to_etv`].
#[derive(Clone, Copy, Debug)]
pub struct UeEtvSamples<'a> {
    /// Labelings of this sample seed the cover.
    pub cover: &'a UnlabeledSample,
    /// Labelings of this sample by cover elements build the covering map.
    pub map: &'a UnlabeledSample,
    /// Fresh points for empirical distances between cover elements.
    pub distances: &'a UnlabeledSample,
}

#[derive(Clone, Debug)]
pub struct UeEtvOutcome<R> {
    pub family_index: usize,
    pub distribution: DistributionSpec<R>,
    /// Cover `C` as ascending class indices.
    pub cover: Vec<usize>,
    /// `c(h)` as a class index, for every `h`.
    pub map: Vec<usize>,
    /// `d̃(h, h') = d̂(c(h), c(h'))`.
    pub estimate: DistanceEstimate<R>,
}

fn estimates_for<R: Real>(
    ue: &(impl UniformEstimator<R> + ?Sized),
    class: &HypothesisClass,
    s: &LabeledSample,
) -> Result<Vec<R>> {
    let est = ue.estimate(class, s)?;
    if est.len() != class.len() {
        return Err(Error::Dimension {
            expected: class.len(),
            found: est.len(),
        });
    }
    Ok(est)
}

fn argmin<R: Real>(values: impl IntoIterator<Item = (usize, R)>) -> usize {
    let mut best: Option<(usize, R)> = None;
    for (i, v) in values {
        if best.is_none_or(|(_, b)| v < b) {
            best = Some((i, v));
        }
    }
    best.expect("nonempty candidates").0
}

/// ETV learner from a uniform estimator over a finite family.
///
/// The cover is the set of estimator-minimizers over every labeling of the
/// cover sample; `c(h)` minimizes the estimate of `h` among estimators
/// trained on the cover elements' labelings of the map sample; distances
/// on the cover come from the distance sample and extend through `c`; the
/// first family member matching every extended estimate within `ε/2` is
/// returned.
pub fn ue_to_etv<R: Real>(
    ue: &(impl UniformEstimator<R> + ?Sized),
    family: &FiniteFamily<R>,
    class: &HypothesisClass,
    samples: UeEtvSamples<'_>,
    eps: R,
) -> Result<UeEtvOutcome<R>> {
    for t in [samples.cover, samples.map, samples.distances] {
        if t.is_empty() {
            return Err(Error::precondition("samples must be nonempty"));
        }
        class.domain().same_as(t.domain())?;
    }

    let table = EvaluationTable::new(class.iter(), samples.cover);
    let mut cover = BTreeSet::new();
    for r in table.distinct_rows() {
        let labels = (0..samples.cover.len()).map(|k| table.value(r, k)).collect();
        let s = LabeledSample::new(samples.cover.clone(), labels)?;
        let est = estimates_for(ue, class, &s)?;
        cover.insert(argmin(est.into_iter().enumerate()));
    }
    let cover: Vec<usize> = cover.into_iter().collect();

    let per_center: Vec<Vec<R>> = cover
        .iter()
        .map(|&c| {
            let labels = samples.map.iter().map(|x| class.get(c).eval(x)).collect();
            estimates_for(ue, class, &LabeledSample::new(samples.map.clone(), labels)?)
        })
        .collect::<Result<_>>()?;
    let slot: Vec<usize> = (0..class.len())
        .map(|h| argmin(per_center.iter().map(|e| e[h]).enumerate()))
        .collect();
    let map: Vec<usize> = slot.iter().map(|&p| cover[p]).collect();

    let eval = EvaluationTable::new(cover.iter().map(|&c| class.get(c)), samples.distances);
    let m = count::<R>(samples.distances.len());
    let lookup = slot.clone();
    let estimate = DistanceEstimate::new(
        class.len(),
        move |i, j| count::<R>(eval.disagreements(lookup[i], lookup[j])) / m,
        None,
    );
    let all: Vec<usize> = (0..class.len()).collect();
    let family_index = family
        .realize(&all, eps / cast(2.0), |i, j| estimate.get(i, j))
        .ok_or_else(|| Error::Infeasible("no family member matches the estimates".into()))?;
    Ok(UeEtvOutcome {
        family_index,
        distribution: family.member(family_index).clone(),
        cover,
        map,
        estimate,
    })
}

/// Uniform estimates lifted from a cover of the ETV learner's output.
#[derive(Clone, Debug)]
pub struct LiftedEstimate<R> {
    pub distribution: DistributionSpec<R>,
    pub cover: CoverMapPair<R>,
    /// `𝓔_S(h) = err_S(c(h))` for every class index.
    pub estimates: Vec<R>,
}

/// Uniform estimator from an ETV learner: learn `D'` from `T`, take a cover
/// of `D'` from `cover_source`, and estimate every `h` by the empirical error
/// of its representative on `S`.
pub fn etv_to_ue<R: Real>(
    etv: &(impl EtvLearner<R> + ?Sized),
    cover_source: impl FnOnce(&DistributionSpec<R>) -> Result<CoverMapPair<R>>,
    class: &HypothesisClass,
    t: &UnlabeledSample,
    s: &LabeledSample,
) -> Result<LiftedEstimate<R>> {
    let distribution = etv.learn(class, t)?;
    let cover = cover_source(&distribution)?;
    if cover.map().len() != class.len() || cover.map().iter().any(Option::is_none) {
        return Err(Error::precondition("cover must map every hypothesis"));
    }
    let centers: Vec<_> = cover.cover().iter().map(|&c| class.get(c).clone()).collect();
    let errors = empirical_errors::<R>(&centers, s)?;
    let estimates = cover
        .map()
        .iter()
        .map(|p| errors[p.expect("checked")])
        .collect();
    Ok(LiftedEstimate {
        distribution,
        cover,
        estimates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{label, sample, NoisyCubeInstance};
    use crate::covers::greedy_cover;
    use crate::distance::tv_class_conditional;
    use crate::domain::{Hypothesis, Point};
    use crate::learners::{EmpiricalErrorEstimator, ExactEtvOracle};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn singleton_family_is_returned() {
        let inst = NoisyCubeInstance::<f64>::new(4, 0.05).unwrap();
        let class = inst.dictators();
        let d = inst.distribution(Point::from_bits(4, 0b1001)).unwrap();
        let family = FiniteFamily::new(vec![d.clone()], &class).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = sample(&d, 400, &mut rng).unwrap();
        let b = sample(&d, 400, &mut rng).unwrap();
        let c = sample(&d, 400, &mut rng).unwrap();
        let samples = UeEtvSamples {
            cover: &a,
            map: &b,
            distances: &c,
        };
        let out = ue_to_etv(&EmpiricalErrorEstimator, &family, &class, samples, 0.3).unwrap();
        assert_eq!(out.family_index, 0);
        assert!(tv_class_conditional(&d, &out.distribution, &class).unwrap() <= 0.3);
        for (h, &c) in out.map.iter().enumerate() {
            assert!(crate::distance::exact_distance(&d, class.get(h), class.get(c)).unwrap() <= 0.3);
        }
    }

    #[test]
    fn lifted_estimate_on_cover_members_is_their_error() {
        let inst = NoisyCubeInstance::<f64>::new(4, 0.05).unwrap();
        let class = inst.dictators();
        let d = inst.distribution(Point::from_bits(4, 0b0011)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = sample(&d, 10, &mut rng).unwrap();
        let s = label(&sample(&d, 200, &mut rng).unwrap(), &Hypothesis::Dictator(0)).unwrap();
        let oracle = ExactEtvOracle {
            distribution: d.clone(),
        };
        let out = etv_to_ue(&oracle, |e| greedy_cover(e, &class, 0.075), &class, &t, &s).unwrap();
        let direct: Vec<f64> = EmpiricalErrorEstimator.estimate(&class, &s).unwrap();
        for &c in out.cover.cover() {
            assert_eq!(out.estimates[c], direct[c]);
        }
    }

    #[test]
    fn zero_error_cover_gives_zero_estimates() {
        let inst = NoisyCubeInstance::<f64>::new(3, 0.0).unwrap();
        let class = inst.dictators();
        let d = inst.distribution(Point::zeros(3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = sample(&d, 5, &mut rng).unwrap();
        // ρ = 0 with an all-zero center: every dictator labels everything 0
        let s = label(&t, &Hypothesis::Constant(false)).unwrap();
        let oracle = ExactEtvOracle { distribution: d };
        let out = etv_to_ue(&oracle, |e| greedy_cover(e, &class, 0.1), &class, &t, &s).unwrap();
        assert!(out.estimates.iter().all(|&e| e == 0.0));
    }
}
