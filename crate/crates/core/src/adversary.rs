//! Randomized adversaries from the lower bounds, consistency events and the
//! exact posterior they induce.

use rand::distributions::{Distribution as _, WeightedIndex};
use rand::Rng;

use crate::classes::{CategoricalInstance, NoisyCubeInstance};
use crate::distribution::DistributionSpec;
use crate::domain::{Hypothesis, LabeledSample};
use crate::error::{Error, Result};
use crate::scalar::{cast, count, CompensatedSum, Real};

/// The adversary's pick of distribution and target.
///
/// `index` is the class index of `target`. For the cube adversary the drawn
/// center lives in `distribution`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdversaryDraw<R> {
    pub distribution: DistributionSpec<R>,
    pub target: Hypothesis,
    pub index: usize,
}

/// Uniform center `x ∈ {0,1}^n`, returning `D_x^ρ` with the fixed target `1_0`.
pub fn uniform_cube_adversary<R: Real, G: Rng + ?Sized>(
    inst: &NoisyCubeInstance<R>,
    rng: &mut G,
) -> Result<AdversaryDraw<R>> {
    Ok(AdversaryDraw {
        distribution: inst.distribution(inst.random_center(rng))?,
        target: Hypothesis::Dictator(0),
        index: 0,
    })
}

/// `Pr[i] = ε_i^t / Σ_j ε_j^t`, normalized in log space.
pub fn adversary_weights<R: Real>(inst: &CategoricalInstance<R>, t: u32) -> Result<Vec<R>> {
    if t == 0 {
        return Err(Error::precondition("sample budget t must be at least 1"));
    }
    let tt = count::<R>(t as usize);
    let logs: Vec<R> = inst.eps().iter().map(|&e| tt * e.ln()).collect();
    let top = logs.iter().copied().fold(R::neg_infinity(), R::max);
    let unnorm: Vec<R> = logs.iter().map(|&l| (l - top).exp()).collect();
    let z = unnorm.iter().copied().collect::<CompensatedSum<R>>().value();
    Ok(unnorm.into_iter().map(|w| w / z).collect())
}

/// Draws `(D_i, f_i)` with probability proportional to `ε_i^t`.
pub fn weighted_categorical_adversary<R: Real, G: Rng + ?Sized>(
    inst: &CategoricalInstance<R>,
    t: u32,
    rng: &mut G,
) -> Result<AdversaryDraw<R>> {
    let weights: Vec<f64> = adversary_weights(inst, t)?
        .iter()
        .map(|w| w.to_f64().expect("finite weight"))
        .collect();
    let pick = WeightedIndex::new(&weights).map_err(|e| Error::InvalidDistribution(e.to_string()))?;
    let index = pick.sample(rng);
    Ok(AdversaryDraw {
        distribution: inst.distribution(index)?,
        target: Hypothesis::ZeroIndicator(index),
        index,
    })
}

/// Indices `j` whose pair `(D_j, f_j)` is consistent with every example.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistencySet {
    n: usize,
    members: Vec<usize>,
}

impl ConsistencySet {
    /// `members` must be distinct indices below `n`.
    pub fn new(n: usize, mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if let Some(&j) = members.iter().find(|&&j| j >= n) {
            return Err(Error::Dimension {
                expected: n,
                found: j + 1,
            });
        }
        Ok(Self { n, members })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Ascending member indices.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.members.binary_search(&j).is_ok()
    }
}

/// `W`: every example has `x_j ∈ {0,1}` (the support of `D_j` at its
/// special coordinate) and `f_j(x) = y`.
pub fn consistency_set<R: Real>(s: &LabeledSample, inst: &CategoricalInstance<R>) -> Result<ConsistencySet> {
    inst.domain().same_as(s.domain())?;
    let mut alive = vec![true; inst.n()];
    for (x, y) in s.examples() {
        for (a, &v) in alive.iter_mut().zip(x) {
            *a &= v != 2 && (v == 0) == y;
        }
    }
    let members = alive
        .iter()
        .enumerate()
        .filter(|&(_, &a)| a)
        .map(|(j, _)| j)
        .collect();
    ConsistencySet::new(inst.n(), members)
}

/// Posterior over the drawn index given the event `E_W`, from the Bayes
/// expansion `prior(i) · Π_{j∈W∖i} ε_j^t · Π_{j∉W} (1 − ε_j^t)` in log space.
pub fn exact_posterior<R: Real>(w: &ConsistencySet, inst: &CategoricalInstance<R>, t: u32) -> Result<Vec<R>> {
    if w.is_empty() {
        return Err(Error::precondition("consistency set must be nonempty"));
    }
    if w.n() != inst.n() {
        return Err(Error::Dimension {
            expected: inst.n(),
            found: w.n(),
        });
    }
    let prior = adversary_weights(inst, t)?;
    let tt = count::<R>(t as usize);
    let log_hit: Vec<R> = inst.eps().iter().map(|&e| tt * e.ln()).collect();
    let outside: R = (0..inst.n())
        .filter(|&j| !w.contains(j))
        .map(|j| (-log_hit[j].exp()).ln_1p())
        .collect::<CompensatedSum<R>>()
        .value();
    let logs: Vec<R> = w
        .members()
        .iter()
        .map(|&i| {
            let mut acc = CompensatedSum::new();
            acc.add(prior[i].ln());
            for &j in w.members().iter().filter(|&&j| j != i) {
                acc.add(log_hit[j]);
            }
            acc.add(outside);
            acc.value()
        })
        .collect();
    let top = logs.iter().copied().fold(R::neg_infinity(), R::max);
    let z = logs
        .iter()
        .map(|&l| (l - top).exp())
        .collect::<CompensatedSum<R>>()
        .value();
    let mut post = vec![R::zero(); inst.n()];
    for (&i, &l) in w.members().iter().zip(&logs) {
        post[i] = (l - top).exp() / z;
    }
    Ok(post)
}

/// `Pr[|W| = 1 | i]` and the bound `e^{−Σ_{j≠i} ε_j^t}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConsistencyProbability<R> {
    pub exact: R,
    pub bound: R,
}

/// `Π_{j≠i}(1 − ε_j^t)` by compensated log-space summation, with its
/// exponential upper bound.
pub fn multi_consistency_probability<R: Real>(
    inst: &CategoricalInstance<R>,
    i: usize,
    t: u32,
) -> Result<ConsistencyProbability<R>> {
    if t == 0 {
        return Err(Error::precondition("sample budget t must be at least 1"));
    }
    if i >= inst.n() {
        return Err(Error::Dimension {
            expected: inst.n(),
            found: i + 1,
        });
    }
    let mut log_exact = CompensatedSum::new();
    let mut hits = CompensatedSum::new();
    for (j, &e) in inst.eps().iter().enumerate() {
        if j != i {
            let p = e.powi(t as i32);
            log_exact.add((-p).ln_1p());
            hits.add(p);
        }
    }
    Ok(ConsistencyProbability {
        exact: log_exact.value().exp(),
        bound: (-hits.value()).exp(),
    })
}

/// `Pr[|W| = 1]` averaged over the weighted adversary's draw.
pub fn unique_consistency_probability<R: Real>(inst: &CategoricalInstance<R>, t: u32) -> Result<R> {
    let prior = adversary_weights(inst, t)?;
    let mut acc = CompensatedSum::new();
    for (i, &p) in prior.iter().enumerate() {
        acc.add(p * multi_consistency_probability(inst, i, t)?.exact);
    }
    Ok(acc.value())
}

/// Upper limit for [`consistency_crossing_n`].
pub const MAX_CROSSING_N: usize = 1 << 28;

/// Smallest truncation `n` with `Σ_{j=1}^{n−1} ε_j^t ≥ target` (0-based
/// `j`, so the largest rate `ε_0` is left out). Since removing any single
/// index from `0..n` leaves a sum at least this large, every draw then has
/// `Pr[|W| = 1 | i] ≤ e^{−target}`.
pub fn consistency_crossing_n(t: u32, target: f64) -> Result<usize> {
    if t == 0 {
        return Err(Error::precondition("sample budget t must be at least 1"));
    }
    let mut acc = CompensatedSum::<f64>::new();
    let mut n = 1;
    while acc.value() < target {
        if n >= MAX_CROSSING_N {
            return Err(Error::Infeasible(format!(
                "partial sums stay below {target} up to n = {MAX_CROSSING_N}"
            )));
        }
        acc.add(crate::classes::categorical_rate::<f64>(n).powi(t as i32));
        n += 1;
    }
    Ok(n)
}

/// Event probabilities behind the noisy-majority failure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlipEvents<R> {
    /// `1 − (1 − ρ^t)^n`: some coordinate flipped in all `t` samples.
    pub some_always_flipped: R,
    /// `n(ρ^t + (1−ρ)^t)`: expected number of coordinates whose `t`
    /// observations all agree.
    pub expected_unanimous: R,
    /// `2n(1−ρ)^t`, the simpler upper bound on the same expectation.
    pub unanimous_bound: R,
}

pub fn flip_event_probability<R: Real>(n: usize, rho: R, t: u32) -> Result<FlipEvents<R>> {
    if !(rho >= R::zero() && rho <= cast(0.5)) {
        return Err(Error::precondition(format!("noise rate {rho} outside [0, 1/2]")));
    }
    if t == 0 || n == 0 {
        return Err(Error::precondition("n and t must be at least 1"));
    }
    let nn = count::<R>(n);
    let flip_all = rho.powi(t as i32);
    let keep_all = (R::one() - rho).powi(t as i32);
    Ok(FlipEvents {
        some_always_flipped: -(nn * (-flip_all).ln_1p()).exp_m1(),
        expected_unanimous: nn * (flip_all + keep_all),
        unanimous_bound: cast::<R>(2.0) * nn * keep_all,
    })
}
