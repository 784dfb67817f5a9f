use rand::Rng;

use super::{ConfidentOutput, DistanceEstimate};
use crate::domain::UnlabeledSample;
use crate::error::{Error, Result};
use crate::scalar::{cast, Real};

/// Confident learner for dictators from an STV output: guess the bit of the
/// lowest-index member `1_i` of `G_T`, then set every other `x̂_j` in `G_T`
/// equal to it iff `d̃(1_i, 1_j) < 1/2`. Coordinates outside `G_T` get `⊥`.
pub fn confident_from_stv<R: Real, G: Rng + ?Sized>(
    estimate: &DistanceEstimate<R>,
    n: usize,
    rng: &mut G,
) -> Result<ConfidentOutput> {
    if estimate.size() != n {
        return Err(Error::Dimension {
            expected: n,
            found: estimate.size(),
        });
    }
    let good = estimate
        .known_good()
        .ok_or_else(|| Error::precondition("STV output must carry a known good set"))?;
    let mut out = ConfidentOutput::abstain(n);
    let Some(&anchor) = good.iter().next() else {
        return Ok(out);
    };
    let guess: bool = rng.gen();
    let half = cast::<R>(0.5);
    for &j in good {
        out.0[j] = Some(if estimate.get(anchor, j) < half {
            guess
        } else {
            !guess
        });
    }
    Ok(out)
}

/// Noisy majority rule: `⊥` on the `n/2` coordinates whose empirical means
/// are closest to 1/2 (ties to the lower index), the majority bit elsewhere
/// (ties to 0).
pub fn noisy_majority_confident(t: &UnlabeledSample) -> Result<ConfidentOutput> {
    let n = t.domain().dim();
    if t.domain().alphabet() != 2 {
        return Err(Error::precondition("noisy majority needs a cube sample"));
    }
    if !n.is_multiple_of(2) {
        return Err(Error::precondition(format!("dimension {n} must be even")));
    }
    if t.is_empty() {
        return Err(Error::precondition("sample must be nonempty"));
    }
    let mut ones = vec![0u64; n];
    for x in t.iter() {
        for (c, &b) in ones.iter_mut().zip(x) {
            *c += b as u64;
        }
    }
    let m = t.len() as u64;
    // |2·ones − m| orders coordinates by |μ − 1/2|
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| ((2 * ones[i]).abs_diff(m), i));
    let mut out: Vec<Option<bool>> = ones.iter().map(|&c| Some(2 * c > m)).collect();
    for &i in &order[..n / 2] {
        out[i] = None;
    }
    Ok(ConfidentOutput(out))
}

/// Sample budget below which confident learning of noisy dictators fails,
/// and whether `(n, ρ)` meets the lower bound's hypothesis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LowerBoundParams {
    /// `⌊2·log2(n) / (5·log2(1/ρ))⌋`.
    pub t_threshold: u64,
    /// `ρ > 12·log2(1/ρ) / log2(n)`.
    pub conditions_met: bool,
}

/// `n` is passed as a float so dimensions like `2^200` can be evaluated.
/// Any `ρ ∈ (0, 1/2)` is accepted; the flag reports whether the bound applies.
pub fn lower_bound_params(n: f64, rho: f64) -> Result<LowerBoundParams> {
    if !(n > 2.0) || !n.is_finite() {
        return Err(Error::precondition(format!("dimension {n} must exceed 2")));
    }
    if !(rho > 0.0 && rho < 0.5) {
        return Err(Error::precondition(format!("noise rate {rho} outside (0, 1/2)")));
    }
    let log_n = n.log2();
    let log_inv = (1.0 / rho).log2();
    Ok(LowerBoundParams {
        t_threshold: (2.0 * log_n / (5.0 * log_inv)).floor() as u64,
        conditions_met: rho > 12.0 * log_inv / log_n,
    })
}
