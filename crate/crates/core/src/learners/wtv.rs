use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use super::{DistanceEstimate, PacLearner};
use crate::classes::{categorical_pair_distance, CategoricalInstance};
use crate::covers::CoverMapPair;
use crate::distance::{exact_distance, EvaluationTable};
use crate::distribution::DistributionSpec;
use crate::domain::{Hypothesis, HypothesisClass, LabeledSample, UnlabeledSample};
use crate::error::{Error, Result};
use crate::scalar::{cast, count, Real};

/// Output of the PAC-to-WTV construction.
#[derive(Clone, Debug)]
pub struct PacWtv<R> {
    pub estimate: DistanceEstimate<R>,
    /// `c_T(h)` for every class index.
    pub representatives: Vec<Hypothesis>,
    /// Number of distinct labelings of `T`, i.e. runs of the PAC learner.
    pub labelings: usize,
}

fn check_sample(class: &HypothesisClass, t: &UnlabeledSample) -> Result<()> {
    if t.is_empty() {
        return Err(Error::precondition("sample must be nonempty"));
    }
    class.domain().same_as(t.domain())
}

/// WTV learner from a PAC learner: run `pac` on every labeling of `T`
/// realized by the class (`c_T(h) = pac(T, h(T))`), then estimate
/// `d̃(h, h') = d̂_{T'}(c_T(h), c_T(h'))`.
pub fn pac_to_wtv<R: Real>(
    pac: &(impl PacLearner + ?Sized),
    class: &HypothesisClass,
    t: &UnlabeledSample,
    t_prime: &UnlabeledSample,
) -> Result<PacWtv<R>> {
    check_sample(class, t)?;
    check_sample(class, t_prime)?;
    let table = EvaluationTable::new(class.iter(), t);
    let mut group_of_row: HashMap<&[u64], usize> = HashMap::new();
    let mut outputs: Vec<Hypothesis> = Vec::new();
    let mut group = Vec::with_capacity(class.len());
    for h in 0..class.len() {
        let next = group_of_row.len();
        let g = *group_of_row.entry(table.row(h)).or_insert(next);
        if g == outputs.len() {
            let labels = (0..t.len()).map(|k| table.value(h, k)).collect();
            let s = LabeledSample::new(t.clone(), labels)?;
            outputs.push(pac.learn(class, &s)?);
        }
        group.push(g);
    }
    let labelings = outputs.len();

    // representatives can coincide across labelings; evaluate each once
    let mut distinct: Vec<Hypothesis> = Vec::new();
    let out_id: Vec<usize> = outputs
        .iter()
        .map(|o| {
            distinct.iter().position(|d| d == o).unwrap_or_else(|| {
                distinct.push(o.clone());
                distinct.len() - 1
            })
        })
        .collect();
    for o in &distinct {
        o.check_domain(t_prime.domain())?;
    }
    let eval = EvaluationTable::new(&distinct, t_prime);
    let m = count::<R>(t_prime.len());
    let rep: Vec<usize> = group.iter().map(|&g| out_id[g]).collect();
    let representatives = rep.iter().map(|&r| distinct[r].clone()).collect();
    let estimate = DistanceEstimate::new(
        class.len(),
        move |i, j| count::<R>(eval.disagreements(rep[i], rep[j])) / m,
        None,
    );
    Ok(PacWtv {
        estimate,
        representatives,
        labelings,
    })
}

/// Analysis set of the PAC-to-WTV construction:
/// `{g : d_D(g, c_T(g)) ≤ ε/3}`.
pub fn pac_wtv_good_set<R: Real>(
    d: &DistributionSpec<R>,
    class: &HypothesisClass,
    representatives: &[Hypothesis],
    eps: R,
) -> Result<BTreeSet<usize>> {
    let third = eps / cast(3.0);
    let mut good = BTreeSet::new();
    for (g, (h, c)) in class.iter().zip(representatives).enumerate() {
        if exact_distance(d, h, c)? <= third {
            good.insert(g);
        }
    }
    Ok(good)
}

/// The empirical distance estimator on `T`, as a WTV output.
pub fn ubme_wtv<R: Real>(class: &HypothesisClass, t: &UnlabeledSample) -> Result<DistanceEstimate<R>> {
    check_sample(class, t)?;
    Ok(DistanceEstimate::from_table(
        Arc::new(EvaluationTable::new(class.iter(), t)),
        None,
    ))
}

/// Analysis set of the empirical estimator:
/// `{h : |d̃(h, c(h)) − d_D(h, c(h))| ≤ ε/8}` for a covering map `c`.
pub fn ubme_good_set<R: Real>(
    estimate: &DistanceEstimate<R>,
    d: &DistributionSpec<R>,
    class: &HypothesisClass,
    cover: &CoverMapPair<R>,
    eps: R,
) -> Result<BTreeSet<usize>> {
    let eighth = eps / cast(8.0);
    let mut good = BTreeSet::new();
    for h in 0..class.len() {
        if let Some(c) = cover.representative(h) {
            let truth = exact_distance(d, class.get(h), class.get(c))?;
            if (estimate.get(h, c) - truth).abs() <= eighth {
                good.insert(h);
            }
        }
    }
    Ok(good)
}

/// Output of the categorical WTV learner.
#[derive(Clone, Debug)]
pub struct CategoricalWtv<R> {
    pub estimate: DistanceEstimate<R>,
    /// `μ_ℓ^T`, the empirical mean of `f_ℓ`.
    pub means: Vec<R>,
}

/// Zero-error WTV learner for the categorical indicators: an indicator
/// whose empirical mean is below 1/3 is taken as non-special, and pairs of
/// non-special indicators get the closed-form distance, every other pair 1/2.
pub fn categorical_wtv_learner<R: Real>(
    inst: &CategoricalInstance<R>,
    t: &UnlabeledSample,
) -> Result<CategoricalWtv<R>> {
    if t.is_empty() {
        return Err(Error::precondition("sample must be nonempty"));
    }
    inst.domain().same_as(t.domain())?;
    let mut zeros = vec![0usize; inst.n()];
    for x in t.iter() {
        for (z, &v) in zeros.iter_mut().zip(x) {
            *z += (v == 0) as usize;
        }
    }
    let m = count::<R>(t.len());
    let means: Vec<R> = zeros.iter().map(|&z| count::<R>(z) / m).collect();
    let third = R::one() / cast(3.0);
    let below: Vec<bool> = means.iter().map(|&mu| mu < third).collect();
    let eps = inst.eps().to_vec();
    let estimate = DistanceEstimate::new(
        inst.n(),
        move |j, k| {
            if below[j] && below[k] {
                categorical_pair_distance(eps[j], eps[k])
            } else {
                cast(0.5)
            }
        },
        None,
    );
    Ok(CategoricalWtv { estimate, means })
}

/// Indicators with good empirical averages under `D_special`:
/// `{f_ℓ : |E[f_ℓ] − μ_ℓ^T| < 1/6}`.
pub fn categorical_good_set<R: Real>(
    inst: &CategoricalInstance<R>,
    special: usize,
    means: &[R],
) -> BTreeSet<usize> {
    let sixth = R::one() / cast(6.0);
    means
        .iter()
        .enumerate()
        .filter(|&(l, &mu)| (inst.mean(special, l) - mu).abs() < sixth)
        .map(|(l, _)| l)
        .collect()
}
