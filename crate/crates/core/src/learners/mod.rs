//! Learner constructions: PAC learners, TV learners (exact, strong, weak),
//! conversions to and from uniform estimation, and confident learners.
//!
//! Handle-style inputs are traits with blanket impls for closures, so both
//! honest learners and adversarial mocks plug into the same reductions.

mod confident;
mod estimation;
mod pac;
mod wtv;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::distance::{exact_distance, DistanceMatrix, EvaluationTable};
use crate::distribution::DistributionSpec;
use crate::domain::{Hypothesis, HypothesisClass, LabeledSample, UnlabeledSample};
use crate::error::{Error, Result};
use crate::scalar::{count, Real};

pub use confident::{
    confident_from_stv, lower_bound_params, noisy_majority_confident, LowerBoundParams,
};
pub use estimation::{etv_to_ue, ue_to_etv, LiftedEstimate, UeEtvOutcome, UeEtvSamples};
pub use pac::{erm, erm_among, majority_constant_learner, stv_to_pac, StvToPacOutcome};
pub use wtv::{
    categorical_good_set, categorical_wtv_learner, pac_to_wtv, pac_wtv_good_set, ubme_good_set,
    ubme_wtv, CategoricalWtv, PacWtv,
};

/// `d̃`: an approximate metric on class indices, optionally with a good set
/// `G_T` the learner itself can name.
#[derive(Clone)]
pub struct DistanceEstimate<R> {
    size: usize,
    estimator: Arc<dyn Fn(usize, usize) -> R + Send + Sync>,
    known_good: Option<BTreeSet<usize>>,
}

impl<R: Real> DistanceEstimate<R> {
    /// `f` is only called with `i < j`; the diagonal is zero.
    pub fn new(
        size: usize,
        f: impl Fn(usize, usize) -> R + Send + Sync + 'static,
        known_good: Option<BTreeSet<usize>>,
    ) -> Self {
        Self {
            size,
            estimator: Arc::new(f),
            known_good,
        }
    }

    pub fn from_matrix(m: DistanceMatrix<R>, known_good: Option<BTreeSet<usize>>) -> Self {
        Self::new(m.size(), move |i, j| m.get(i, j), known_good)
    }

    /// Empirical distances of the table rows, `disagreements / |T|`.
    pub fn from_table(table: Arc<EvaluationTable>, known_good: Option<BTreeSet<usize>>) -> Self {
        let m = count::<R>(table.sample_len().max(1));
        Self::new(
            table.rows(),
            move |i, j| count::<R>(table.disagreements(i, j)) / m,
            known_good,
        )
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> R {
        assert!(i < self.size && j < self.size, "index outside estimate");
        if i == j {
            R::zero()
        } else {
            (self.estimator)(i.min(j), i.max(j))
        }
    }

    pub fn known_good(&self) -> Option<&BTreeSet<usize>> {
        self.known_good.as_ref()
    }

    /// Largest `|d̃ − other|` over pairs drawn from `among`.
    pub fn max_error_among(&self, among: &[usize], mut other: impl FnMut(usize, usize) -> R) -> R {
        let mut worst = R::zero();
        for (a, &i) in among.iter().enumerate() {
            for &j in &among[a + 1..] {
                worst = worst.max((self.get(i, j) - other(i, j)).abs());
            }
        }
        worst
    }
}

impl<R> fmt::Debug for DistanceEstimate<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DistanceEstimate")
            .field("size", &self.size)
            .field("known_good", &self.known_good)
            .finish_non_exhaustive()
    }
}

/// A string over `{0, 1, ⊥}`; `None` is `⊥`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConfidentOutput(pub Vec<Option<bool>>);

impl ConfidentOutput {
    pub fn abstain(n: usize) -> Self {
        Self(vec![None; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn labeled_count(&self) -> usize {
        self.0.iter().filter(|v| v.is_some()).count()
    }

    /// No labeled coordinate contradicts `x`.
    pub fn agrees_with(&self, x: &[u32]) -> bool {
        self.0.len() == x.len()
            && self
                .0
                .iter()
                .zip(x)
                .all(|(v, &b)| v.is_none_or(|v| v as u32 == b))
    }

    /// Labels at least half the coordinates and never contradicts `x`.
    pub fn is_success(&self, x: &[u32]) -> bool {
        2 * self.labeled_count() >= self.len() && self.agrees_with(x)
    }
}

impl fmt::Display for ConfidentOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.0 {
            f.write_str(match v {
                Some(false) => "0",
                Some(true) => "1",
                None => "⊥",
            })?;
        }
        Ok(())
    }
}

/// `⌈(scale / ε^eps_power) · (ln K + ln(delta_numerator / δ))⌉`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SizeRule {
    pub scale: f64,
    pub eps_power: i32,
    pub delta_numerator: f64,
}

impl SizeRule {
    /// `K` simultaneous additive-`ε/2` estimates by Hoeffding.
    pub const CHERNOFF: Self = Self::new(2.0, 2, 2.0);
    /// Realizable ERM over `K` hypotheses.
    pub const ERM: Self = Self::new(8.0, 1, 1.0);
    /// Final ERM stage of the STV-to-PAC pipeline.
    pub const STV_TO_PAC_ERM: Self = Self::new(32.0, 1, 4.0);
    /// Distance sample `T'` of the PAC-to-WTV construction, `K` = growth count.
    pub const PAC_TO_WTV: Self = Self::new(8.0, 2, 2.0);
    /// Empirical estimator as a WTV learner, `K` = cover size.
    pub const UBME_WTV: Self = Self::new(512.0, 2, 1.0);
    /// Zero-error categorical WTV learner (deviation 1/6, `K` = 1).
    pub const CATEGORICAL_WTV: Self = Self::new(72.0, 0, 2.0);
    /// Majority-label learner on the noisy cube (`K` = 1).
    pub const MAJORITY: Self = Self::new(48.0, 0, 1.0);

    pub const fn new(scale: f64, eps_power: i32, delta_numerator: f64) -> Self {
        Self {
            scale,
            eps_power,
            delta_numerator,
        }
    }

    pub fn size(&self, eps: f64, delta: f64, k: usize) -> Result<usize> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::precondition(format!("accuracy {eps} outside (0, 1]")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::precondition(format!("confidence {delta} outside (0, 1)")));
        }
        if k == 0 {
            return Err(Error::precondition("size rule needs K >= 1"));
        }
        let log_term = (k as f64).ln() + (self.delta_numerator / delta).ln();
        let raw = self.scale / eps.powi(self.eps_power) * log_term.max(0.0);
        Ok((raw.ceil() as usize).max(1))
    }
}

/// Sample-size functions of a finite class of `complexity` hypotheses.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleSizePlan {
    pub complexity: usize,
    pub pac: SizeRule,
    pub stv: SizeRule,
    pub wtv: SizeRule,
    pub etv: SizeRule,
    pub ue: SizeRule,
}

impl SampleSizePlan {
    /// ERM for PAC, Hoeffding over all `K²` pairs for the TV notions and over
    /// `K` errors for uniform estimation.
    pub fn finite_class(complexity: usize) -> Self {
        Self {
            complexity,
            pac: SizeRule::ERM,
            stv: SizeRule::CHERNOFF,
            wtv: SizeRule::CHERNOFF,
            etv: SizeRule::CHERNOFF,
            ue: SizeRule::CHERNOFF,
        }
    }

    fn pairs(&self) -> usize {
        self.complexity.saturating_mul(self.complexity)
    }

    pub fn n_pac(&self, eps: f64, delta: f64) -> Result<usize> {
        self.pac.size(eps, delta, self.complexity)
    }

    pub fn n_stv(&self, eps: f64, delta: f64) -> Result<usize> {
        self.stv.size(eps, delta, self.pairs())
    }

    pub fn n_wtv(&self, eps: f64, delta: f64) -> Result<usize> {
        self.wtv.size(eps, delta, self.pairs())
    }

    pub fn n_etv(&self, eps: f64, delta: f64) -> Result<usize> {
        self.etv.size(eps, delta, self.pairs())
    }

    pub fn n_ue(&self, eps: f64, delta: f64) -> Result<usize> {
        self.ue.size(eps, delta, self.complexity)
    }
}

/// Labeled sample in, hypothesis out.
pub trait PacLearner {
    fn learn(&self, class: &HypothesisClass, s: &LabeledSample) -> Result<Hypothesis>;
}

impl<F> PacLearner for F
where
    F: Fn(&HypothesisClass, &LabeledSample) -> Result<Hypothesis>,
{
    fn learn(&self, class: &HypothesisClass, s: &LabeledSample) -> Result<Hypothesis> {
        self(class, s)
    }
}

/// Unlabeled sample in, distance estimate with a known good set out.
pub trait StvLearner<R> {
    fn estimate(&self, class: &HypothesisClass, t: &UnlabeledSample) -> Result<DistanceEstimate<R>>;
}

impl<R, F> StvLearner<R> for F
where
    F: Fn(&HypothesisClass, &UnlabeledSample) -> Result<DistanceEstimate<R>>,
{
    fn estimate(&self, class: &HypothesisClass, t: &UnlabeledSample) -> Result<DistanceEstimate<R>> {
        self(class, t)
    }
}

/// Labeled sample in, estimated error of every class member out.
pub trait UniformEstimator<R> {
    fn estimate(&self, class: &HypothesisClass, s: &LabeledSample) -> Result<Vec<R>>;
}

impl<R, F> UniformEstimator<R> for F
where
    F: Fn(&HypothesisClass, &LabeledSample) -> Result<Vec<R>>,
{
    fn estimate(&self, class: &HypothesisClass, s: &LabeledSample) -> Result<Vec<R>> {
        self(class, s)
    }
}

/// Unlabeled sample in, a family member close in `TV_{H∆H}` out.
pub trait EtvLearner<R> {
    fn learn(&self, class: &HypothesisClass, t: &UnlabeledSample) -> Result<DistributionSpec<R>>;
}

impl<R, F> EtvLearner<R> for F
where
    F: Fn(&HypothesisClass, &UnlabeledSample) -> Result<DistributionSpec<R>>,
{
    fn learn(&self, class: &HypothesisClass, t: &UnlabeledSample) -> Result<DistributionSpec<R>> {
        self(class, t)
    }
}

/// Empirical risk minimization over the whole class.
#[derive(Clone, Copy, Debug, Default)]
pub struct Erm;

impl PacLearner for Erm {
    fn learn(&self, class: &HypothesisClass, s: &LabeledSample) -> Result<Hypothesis> {
        erm(class, s)
    }
}

/// Outputs the constant matching the majority label.
#[derive(Clone, Copy, Debug, Default)]
pub struct MajorityConstant;

impl PacLearner for MajorityConstant {
    fn learn(&self, _class: &HypothesisClass, s: &LabeledSample) -> Result<Hypothesis> {
        majority_constant_learner(s)
    }
}

/// `err_S(h)` for every `h`.
#[derive(Clone, Copy, Debug, Default)]
pub struct EmpiricalErrorEstimator;

impl<R: Real> UniformEstimator<R> for EmpiricalErrorEstimator {
    fn estimate(&self, class: &HypothesisClass, s: &LabeledSample) -> Result<Vec<R>> {
        empirical_errors(class.hypotheses(), s)
    }
}

/// `err_S(h)` for each listed hypothesis.
pub fn empirical_errors<R: Real>(hyps: &[Hypothesis], s: &LabeledSample) -> Result<Vec<R>> {
    if s.is_empty() {
        return Err(Error::precondition("empirical error needs a nonempty sample"));
    }
    for h in hyps {
        h.check_domain(s.domain())?;
    }
    let table = EvaluationTable::new(hyps, s.points());
    let labels = EvaluationTable::pack(s.labels());
    let m = count::<R>(s.len());
    Ok((0..hyps.len())
        .map(|i| count::<R>(table.mistakes(i, &labels)) / m)
        .collect())
}

/// Reports the true distances under a known distribution, with `G_T = H`.
#[derive(Clone, Debug)]
pub struct ExactStvOracle<R> {
    pub distribution: DistributionSpec<R>,
}

impl<R: Real> StvLearner<R> for ExactStvOracle<R> {
    fn estimate(&self, class: &HypothesisClass, _t: &UnlabeledSample) -> Result<DistanceEstimate<R>> {
        let m = DistanceMatrix::exact(&self.distribution, class)?;
        Ok(DistanceEstimate::from_matrix(m, Some((0..class.len()).collect())))
    }
}

/// Returns the true distribution.
#[derive(Clone, Debug)]
pub struct ExactEtvOracle<R> {
    pub distribution: DistributionSpec<R>,
}

impl<R: Real> EtvLearner<R> for ExactEtvOracle<R> {
    fn learn(&self, _class: &HypothesisClass, _t: &UnlabeledSample) -> Result<DistributionSpec<R>> {
        Ok(self.distribution.clone())
    }
}

/// A finite list of candidate distributions with their exact distance
/// matrices over one class, for the "find a member realizing these
/// estimates" steps.
#[derive(Clone, Debug)]
pub struct FiniteFamily<R> {
    members: Vec<DistributionSpec<R>>,
    distances: Vec<DistanceMatrix<R>>,
}

impl<R: Real> FiniteFamily<R> {
    pub fn new(members: Vec<DistributionSpec<R>>, class: &HypothesisClass) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::precondition("family must be nonempty"));
        }
        let distances = members
            .iter()
            .map(|d| DistanceMatrix::exact(d, class))
            .collect::<Result<_>>()?;
        Ok(Self { members, distances })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[DistributionSpec<R>] {
        &self.members
    }

    pub fn member(&self, k: usize) -> &DistributionSpec<R> {
        &self.members[k]
    }

    pub fn distances(&self, k: usize) -> &DistanceMatrix<R> {
        &self.distances[k]
    }

    /// First member whose exact distances match `estimate` within `tol` on
    /// every pair of `among`.
    pub fn realize(&self, among: &[usize], tol: R, estimate: impl Fn(usize, usize) -> R) -> Option<usize> {
        self.distances.iter().position(|m| {
            among.iter().enumerate().all(|(a, &i)| {
                among[a + 1..]
                    .iter()
                    .all(|&j| (m.get(i, j) - estimate(i, j)).abs() <= tol)
            })
        })
    }
}

/// `err_{D×target}(h)` for every class member.
pub fn true_errors<R: Real>(
    d: &DistributionSpec<R>,
    class: &HypothesisClass,
    target: &Hypothesis,
) -> Result<Vec<R>> {
    class.iter().map(|h| exact_distance(d, h, target)).collect()
}
