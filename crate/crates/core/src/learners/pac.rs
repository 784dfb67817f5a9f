use rand::Rng;

use super::{FiniteFamily, StvLearner};
use crate::classes::Teacher;
use crate::covers::greedy_cover_among;
use crate::distance::EvaluationTable;
use crate::domain::{Hypothesis, HypothesisClass, LabeledSample};
use crate::error::{Error, Result};
use crate::learners::SizeRule;
use crate::scalar::{cast, Real};

/// Empirical risk minimizer over the class; ties go to the lowest index.
pub fn erm(class: &HypothesisClass, s: &LabeledSample) -> Result<Hypothesis> {
    let all: Vec<usize> = (0..class.len()).collect();
    Ok(class.get(erm_among(class, &all, s)?).clone())
}

/// Index of the empirical risk minimizer among `members`; ties go to the
/// lowest class index.
pub fn erm_among(class: &HypothesisClass, members: &[usize], s: &LabeledSample) -> Result<usize> {
    if s.is_empty() {
        return Err(Error::precondition("ERM needs a nonempty sample"));
    }
    if members.is_empty() {
        return Err(Error::precondition("ERM needs at least one candidate"));
    }
    class.domain().same_as(s.domain())?;
    let table = EvaluationTable::new(members.iter().map(|&i| class.get(i)), s.points());
    let labels = EvaluationTable::pack(s.labels());
    let best = (0..members.len())
        .min_by_key(|&r| (table.mistakes(r, &labels), members[r]))
        .expect("nonempty");
    Ok(members[best])
}

/// Constant hypothesis matching the majority label; ties go to 0.
pub fn majority_constant_learner(s: &LabeledSample) -> Result<Hypothesis> {
    if s.is_empty() {
        return Err(Error::precondition("majority needs a nonempty sample"));
    }
    let ones = s.labels().iter().filter(|&&y| y).count();
    Ok(Hypothesis::Constant(2 * ones > s.len()))
}

/// What the STV-to-PAC pipeline did on one run.
#[derive(Clone, Debug, PartialEq)]
pub struct StvToPacOutcome {
    /// Class index of the returned hypothesis.
    pub index: usize,
    pub hypothesis: Hypothesis,
    /// Family member that realized the estimates.
    pub family_index: usize,
    pub cover_size: usize,
    pub unlabeled_size: usize,
    pub labeled_size: usize,
}

/// PAC learner from an STV learner over a finite family:
///
/// 1. estimate distances from `unlabeled_size` unlabeled points;
/// 2. find the first family member whose distances match the estimates on
///    `G_T` within `ε/4`, and greedily `ε/4`-cover `G_T` under it;
/// 3. run ERM over the cover on `⌈(32/ε)(ln|C_T| + ln(4/δ))⌉` fresh labeled
///    examples.
#[allow(clippy::too_many_arguments)]
pub fn stv_to_pac<R: Real, G: Rng + ?Sized>(
    stv: &(impl StvLearner<R> + ?Sized),
    family: &FiniteFamily<R>,
    class: &HypothesisClass,
    eps: R,
    delta: R,
    teacher: &Teacher<'_, R>,
    unlabeled_size: usize,
    rng: &mut G,
) -> Result<StvToPacOutcome> {
    let t = teacher.unlabeled(unlabeled_size, rng)?;
    let estimate = stv.estimate(class, &t)?;
    if estimate.size() != class.len() {
        return Err(Error::Dimension {
            expected: class.len(),
            found: estimate.size(),
        });
    }
    let good: Vec<usize> = estimate
        .known_good()
        .ok_or_else(|| Error::precondition("STV output must carry a known good set"))?
        .iter()
        .copied()
        .collect();
    if good.is_empty() {
        return Err(Error::Infeasible("STV learner returned an empty good set".into()));
    }
    let quarter = eps / cast(4.0);
    let family_index = family
        .realize(&good, quarter, |i, j| estimate.get(i, j))
        .ok_or_else(|| Error::Infeasible("no family member realizes the STV estimates".into()))?;
    let near = family.distances(family_index);
    let cover = greedy_cover_among(class.len(), &good, quarter, |a, b| Ok(near.get(a, b)))?;
    let labeled_size = SizeRule::STV_TO_PAC_ERM.size(
        eps.to_f64().expect("finite"),
        delta.to_f64().expect("finite"),
        cover.len(),
    )?;
    let s = teacher.labeled(labeled_size, rng)?;
    let index = erm_among(class, cover.cover(), &s)?;
    Ok(StvToPacOutcome {
        index,
        hypothesis: class.get(index).clone(),
        family_index,
        cover_size: cover.len(),
        unlabeled_size,
        labeled_size,
    })
}
