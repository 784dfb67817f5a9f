//! The concrete families: dictators on the noisy hypercube, zero-indicators
//! under the categorical family, and a finite Benedek–Itai analogue. Also
//! sampling and realizable labeling.

use std::collections::BTreeSet;
use std::marker::PhantomData;

use rand::distributions::{Distribution as _, WeightedIndex};
use rand::Rng;

use crate::distance::exact_distance;
use crate::distribution::DistributionSpec;
use crate::domain::{Domain, Hypothesis, HypothesisClass, LabeledSample, Point, Symbol, UnlabeledSample};
use crate::error::{Error, Result};
use crate::scalar::{cast, count, Real};

/// `2^64` as a float, for turning probabilities into integer thresholds.
const TWO_POW_64: f64 = 18_446_744_073_709_551_616.0;

#[inline]
fn threshold<R: Real>(p: R) -> u64 {
    // saturating float-to-int cast; p ≤ 1/2 in every caller
    (p.to_f64().expect("finite probability") * TWO_POW_64) as u64
}

/// Draws `m` i.i.d. points from `d`.
pub fn sample<R: Real, G: Rng + ?Sized>(
    d: &DistributionSpec<R>,
    m: usize,
    rng: &mut G,
) -> Result<UnlabeledSample> {
    if m == 0 {
        return Err(Error::precondition("sample size must be at least 1"));
    }
    let domain = d.domain();
    let n = domain.dim();
    let mut data: Vec<Symbol> = Vec::with_capacity(m * n);
    match d {
        DistributionSpec::NoisyCube(cube) => {
            let flip = threshold(cube.rho());
            let center = cube.center();
            for _ in 0..m {
                data.extend(
                    center
                        .iter()
                        .map(|&b| if rng.next_u64() < flip { 1 - b } else { b }),
                );
            }
        }
        DistributionSpec::Categorical(cat) => {
            let cuts: Vec<(u64, u64)> = cat
                .eps()
                .iter()
                .map(|&e| (threshold(e), threshold(e + e)))
                .collect();
            let special = cat.special();
            for _ in 0..m {
                data.extend(cuts.iter().enumerate().map(|(c, &(zero, one))| {
                    let u = rng.next_u64();
                    if c == special {
                        (u >> 63) as Symbol
                    } else if u < zero {
                        0
                    } else if u < one {
                        1
                    } else {
                        2
                    }
                }));
            }
        }
        DistributionSpec::Table(table) => {
            let weights: Vec<f64> = table
                .mass()
                .iter()
                .map(|m| m.to_f64().expect("finite mass"))
                .collect();
            let pick = WeightedIndex::new(&weights)
                .map_err(|e| Error::InvalidDistribution(e.to_string()))?;
            for _ in 0..m {
                data.extend_from_slice(&table.points()[pick.sample(rng)]);
            }
        }
    }
    Ok(UnlabeledSample::from_raw(domain, data))
}

/// Pairs every point with its label under `h`.
pub fn label(t: &UnlabeledSample, h: &Hypothesis) -> Result<LabeledSample> {
    h.check_domain(t.domain())?;
    let labels = t.iter().map(|x| h.eval(x)).collect();
    LabeledSample::new(t.clone(), labels)
}

/// The adversary's choice `(D, h)`, seen by learners only through samples.
#[derive(Clone, Copy, Debug)]
pub struct Teacher<'a, R> {
    pub distribution: &'a DistributionSpec<R>,
    pub target: &'a Hypothesis,
}

impl<'a, R: Real> Teacher<'a, R> {
    pub fn new(distribution: &'a DistributionSpec<R>, target: &'a Hypothesis) -> Self {
        Self {
            distribution,
            target,
        }
    }

    pub fn unlabeled<G: Rng + ?Sized>(&self, m: usize, rng: &mut G) -> Result<UnlabeledSample> {
        sample(self.distribution, m, rng)
    }

    pub fn labeled<G: Rng + ?Sized>(&self, m: usize, rng: &mut G) -> Result<LabeledSample> {
        label(&sample(self.distribution, m, rng)?, self.target)
    }

    /// True error `err_{D×h}(g) = d_D(g, h)`.
    pub fn error_of(&self, g: &Hypothesis) -> Result<R> {
        exact_distance(self.distribution, g, self.target)
    }
}

/// Dictators `1_i` on `{0,1}^n` under the noisy-cube family `{D_x^ρ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct NoisyCubeInstance<R> {
    n: usize,
    rho: R,
}

/// Largest dimension for which the whole noisy-cube family may be listed.
pub const MAX_ENUMERATED_CUBE_DIM: usize = 16;

impl<R: Real> NoisyCubeInstance<R> {
    pub fn new(n: usize, rho: R) -> Result<Self> {
        if n == 0 {
            return Err(Error::precondition("cube dimension must be at least 1"));
        }
        if !(rho >= R::zero() && rho < cast(0.5)) {
            return Err(Error::precondition(format!("noise rate {rho} outside [0, 1/2)")));
        }
        Ok(Self { n, rho })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rho(&self) -> R {
        self.rho
    }

    pub fn domain(&self) -> Domain {
        Domain::cube(self.n).expect("n >= 1")
    }

    pub fn distribution(&self, center: Point) -> Result<DistributionSpec<R>> {
        if center.dim() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: center.dim(),
            });
        }
        DistributionSpec::noisy_cube(center, self.rho)
    }

    pub fn dictators(&self) -> HypothesisClass {
        HypothesisClass::new(self.domain(), (0..self.n).map(Hypothesis::Dictator).collect())
            .expect("n >= 1")
    }

    pub fn random_center<G: Rng + ?Sized>(&self, rng: &mut G) -> Point {
        Point::from_raw((0..self.n).map(|_| rng.gen::<bool>() as Symbol).collect())
    }

    /// Every `D_x^ρ`, ordered by the integer whose bits are `x`.
    pub fn enumerate_family(&self) -> Result<Vec<DistributionSpec<R>>> {
        if self.n > MAX_ENUMERATED_CUBE_DIM {
            return Err(Error::precondition(format!(
                "family enumeration limited to n <= {MAX_ENUMERATED_CUBE_DIM}"
            )));
        }
        (0..1u64 << self.n)
            .map(|bits| self.distribution(Point::from_bits(self.n, bits)))
            .collect()
    }
}

/// `d_{D_x^ρ}(1_i, 1_j)`: `2ρ(1−ρ)` when `x_i = x_j`, else `1 − 2ρ(1−ρ)`.
pub fn cube_distance_closed_form<R: Real>(x: &Point, rho: R, i: usize, j: usize) -> Result<R> {
    if i == j {
        return Err(Error::precondition("closed form needs two distinct dictators"));
    }
    if i.max(j) >= x.dim() {
        return Err(Error::Dimension {
            expected: x.dim(),
            found: i.max(j) + 1,
        });
    }
    if !(rho >= R::zero() && rho < cast(0.5)) {
        return Err(Error::precondition(format!("noise rate {rho} outside [0, 1/2)")));
    }
    let once = cast::<R>(2.0) * rho * (R::one() - rho);
    Ok(if x[i] == x[j] { once } else { R::one() - once })
}

/// Zero-indicators `f_j(x) = 1{x_j = 0}` under the categorical family
/// `{D_i}`, truncated to `n` coordinates, with `eps(j) = 1/log2(j + 256)`
/// for 0-based `j` (so `eps(0) = 1/8`).
#[derive(Clone, Debug, PartialEq)]
pub struct CategoricalInstance<R> {
    eps: Vec<R>,
}

impl<R: Real> CategoricalInstance<R> {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::precondition("truncation must be at least 1"));
        }
        Ok(Self {
            eps: (0..n).map(categorical_rate).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.eps.len()
    }

    pub fn eps(&self) -> &[R] {
        &self.eps
    }

    pub fn domain(&self) -> Domain {
        Domain::ternary(self.n()).expect("n >= 1")
    }

    pub fn distribution(&self, special: usize) -> Result<DistributionSpec<R>> {
        DistributionSpec::categorical(special, self.eps.clone())
    }

    pub fn indicators(&self) -> HypothesisClass {
        HypothesisClass::new(
            self.domain(),
            (0..self.n()).map(Hypothesis::ZeroIndicator).collect(),
        )
        .expect("n >= 1")
    }

    /// `E_{D_special}[f_j]`.
    pub fn mean(&self, special: usize, j: usize) -> R {
        if j == special {
            cast(0.5)
        } else {
            self.eps[j]
        }
    }

    fn check_index(&self, j: usize) -> Result<()> {
        if j >= self.n() {
            return Err(Error::Dimension {
                expected: self.n(),
                found: j + 1,
            });
        }
        Ok(())
    }
}

/// `1 / log2(j + 256)` for 0-based coordinate `j`.
pub fn categorical_rate<R: Real>(j: usize) -> R {
    R::one() / count::<R>(j + 256).log2()
}

/// `ε_j(1−ε_k) + ε_k(1−ε_j)`: distance of two non-special indicators.
#[inline]
pub fn categorical_pair_distance<R: Real>(ej: R, ek: R) -> R {
    ej * (R::one() - ek) + ek * (R::one() - ej)
}

/// `d_{D_special}(f_j, f_k)`: `1/2` when `special ∈ {j, k}`, else
/// `ε_j(1−ε_k) + ε_k(1−ε_j)`.
pub fn categorical_distance_closed_form<R: Real>(
    inst: &CategoricalInstance<R>,
    special: usize,
    j: usize,
    k: usize,
) -> Result<R> {
    if j == k {
        return Err(Error::precondition("closed form needs two distinct indicators"));
    }
    for idx in [special, j, k] {
        inst.check_index(idx)?;
    }
    Ok(if special == j || special == k {
        cast(0.5)
    } else {
        categorical_pair_distance(inst.eps[j], inst.eps[k])
    })
}

/// Finite stand-in for the uniform distribution on `[0,1]` with all
/// finite-support indicators: uniform over `N` symbols, indicators of sets of
/// size at most `k`, plus the all-ones hypothesis.
#[derive(Clone, Debug, PartialEq)]
pub struct BenedekItaiInstance<R> {
    size: usize,
    max_support: usize,
    _scalar: PhantomData<R>,
}

impl<R: Real> BenedekItaiInstance<R> {
    pub fn new(size: usize, max_support: usize) -> Result<Self> {
        if size == 0 || size > Symbol::MAX as usize {
            return Err(Error::precondition(format!("domain size {size} out of range")));
        }
        Ok(Self {
            size,
            max_support: max_support.min(size),
            _scalar: PhantomData,
        })
    }

    /// Support bound defaults to the domain size.
    pub fn with_full_support(size: usize) -> Result<Self> {
        Self::new(size, size)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn max_support(&self) -> usize {
        self.max_support
    }

    pub fn domain(&self) -> Domain {
        Domain::new(1, self.size as Symbol).expect("size >= 1")
    }

    pub fn distribution(&self) -> DistributionSpec<R> {
        let points = (0..self.size as Symbol).map(|v| Point::from_raw(vec![v])).collect();
        DistributionSpec::uniform(self.domain(), points).expect("uniform table is valid")
    }

    pub fn all_ones(&self) -> Hypothesis {
        Hypothesis::Constant(true)
    }

    pub fn indicator(&self, support: impl IntoIterator<Item = Symbol>) -> Result<Hypothesis> {
        let set: BTreeSet<Symbol> = support.into_iter().collect();
        if set.len() > self.max_support {
            return Err(Error::precondition(format!(
                "support of size {} exceeds bound {}",
                set.len(),
                self.max_support
            )));
        }
        if let Some(&v) = set.iter().find(|&&v| v as usize >= self.size) {
            return Err(Error::precondition(format!("symbol {v} outside domain")));
        }
        Ok(Hypothesis::Support(set.into()))
    }

    /// Indicator of the sampled points: consistent with any sample labeled
    /// by the all-ones hypothesis.
    pub fn witness(&self, s: &LabeledSample) -> Result<Hypothesis> {
        self.domain().same_as(s.domain())?;
        self.indicator(s.points().iter().map(|x| x[0]))
    }

    /// `d(1, 1_S) = 1 − |S|/N` under the uniform distribution.
    pub fn error_of_support(&self, support_size: usize) -> R {
        R::one() - count::<R>(support_size) / count::<R>(self.size)
    }

    /// The whole class, for tiny instances: all supports of size at most `k`
    /// (by increasing size, then lexicographically), then all-ones.
    pub fn enumerate_class(&self) -> Result<HypothesisClass> {
        if self.size > 16 {
            return Err(Error::precondition("class enumeration limited to N <= 16"));
        }
        let mut hyps = Vec::new();
        let mut masks: Vec<u32> = (0..1u32 << self.size)
            .filter(|m| m.count_ones() as usize <= self.max_support)
            .collect();
        masks.sort_by_key(|m| (m.count_ones(), m.reverse_bits()));
        for m in masks {
            hyps.push(Hypothesis::support(
                (0..self.size as Symbol).filter(|v| m >> v & 1 == 1),
            ));
        }
        hyps.push(self.all_ones());
        HypothesisClass::new(self.domain(), hyps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::{brute_force_distance, empirical_distance};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cube_closed_form_examples() {
        let x = Point::from_bits(3, 0b001);
        assert_eq!(cube_distance_closed_form(&x, 0.0, 1, 2).unwrap(), 0.0);
        assert_eq!(cube_distance_closed_form(&x, 0.0, 0, 1).unwrap(), 1.0);
        // four joint flip outcomes of bits 1, 2 at ρ = 0.1: disagreement on
        // (flip, keep) and (keep, flip)
        let oracle: f64 = 0.1 * 0.9 + 0.9 * 0.1;
        let v = cube_distance_closed_form(&x, 0.1f64, 1, 2).unwrap();
        assert!((v - oracle).abs() < 1e-15);
        assert!((v - 0.18).abs() < 1e-12);
        assert!(cube_distance_closed_form(&x, 0.1, 1, 1).is_err());
    }

    #[test]
    fn categorical_rates() {
        let inst = CategoricalInstance::<f64>::new(300).unwrap();
        assert_eq!(inst.eps()[0], 0.125);
        assert!(inst.eps().windows(2).all(|w| w[1] < w[0]));
        assert!((inst.eps()[256] - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn categorical_closed_form_examples() {
        let inst = CategoricalInstance::<f64>::new(300).unwrap();
        assert_eq!(categorical_distance_closed_form(&inst, 4, 4, 9).unwrap(), 0.5);
        assert_eq!(categorical_distance_closed_form(&inst, 9, 4, 9).unwrap(), 0.5);
        // coordinates 0 and 256 have ε = 1/8 and 1/9:
        // 1/8·8/9 + 1/9·7/8 = 15/72 = 5/24
        let v = categorical_distance_closed_form(&inst, 5, 0, 256).unwrap();
        assert!((v - 5.0 / 24.0).abs() < 1e-12);
        // cross-check by enumerating the 9 joint values of the two coordinates
        let (e0, e1) = (inst.eps()[0], inst.eps()[256]);
        let law = |e: f64| [e, e, 1.0 - 2.0 * e];
        let mut brute = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                if (a == 0) != (b == 0) {
                    brute += law(e0)[a] * law(e1)[b];
                }
            }
        }
        assert!((v - brute).abs() < 1e-12);
        assert!(categorical_distance_closed_form(&inst, 5, 3, 3).is_err());
        let e = 0.2f64;
        assert!((categorical_pair_distance(e, e) - 2.0 * e * (1.0 - e)).abs() < 1e-15);
    }

    #[test]
    fn closed_forms_match_brute_force_in_f32() {
        let inst = CategoricalInstance::<f32>::new(5).unwrap();
        let d = inst.distribution(2).unwrap();
        let class = inst.indicators();
        for j in 0..5 {
            for k in (j + 1)..5 {
                let closed = categorical_distance_closed_form(&inst, 2, j, k).unwrap();
                let brute = brute_force_distance(&d, class.get(j), class.get(k)).unwrap();
                assert!((closed - brute).abs() < f32::exact_tolerance(), "{j} {k}");
            }
        }
    }

    #[test]
    fn zero_noise_cube_reproduces_center() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = Point::from_bits(10, 0b1011001110);
        let d = DistributionSpec::noisy_cube(x.clone(), 0.0f64).unwrap();
        let t = sample(&d, 50, &mut rng).unwrap();
        assert!(t.iter().all(|y| y == x.coords()));
    }

    #[test]
    fn degenerate_table_repeats_its_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let dom = Domain::ternary(2).unwrap();
        let p = Point::new(&dom, vec![2, 1]).unwrap();
        let d = DistributionSpec::table(dom, vec![p.clone()], vec![1.0f64]).unwrap();
        let t = sample(&d, 20, &mut rng).unwrap();
        assert!(t.iter().all(|y| y == p.coords()));
        assert!(sample(&d, 0, &mut rng).is_err());
    }

    #[test]
    fn sampling_is_deterministic_given_stream() {
        let inst = CategoricalInstance::<f64>::new(20).unwrap();
        let d = inst.distribution(3).unwrap();
        let a = sample(&d, 30, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = sample(&d, 30, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|x| x[3] < 2));
    }

    #[test]
    fn labels_follow_the_hypothesis() {
        let dom = Domain::cube(3).unwrap();
        let t = UnlabeledSample::new(dom, &[Point::from_bits(3, 0b010), Point::from_bits(3, 0b100)])
            .unwrap();
        let ones = label(&t, &Hypothesis::Constant(true)).unwrap();
        assert!(ones.labels().iter().all(|&y| y));
        let s = label(&t, &Hypothesis::Dictator(1)).unwrap();
        assert_eq!(s.labels(), &[true, false]);
        assert!(matches!(
            label(&t, &Hypothesis::Dictator(3)),
            Err(Error::Dimension { .. })
        ));
        let bi = BenedekItaiInstance::<f64>::with_full_support(8).unwrap();
        let pts = UnlabeledSample::new(bi.domain(), &[Point::from_raw(vec![1]), Point::from_raw(vec![2])])
            .unwrap();
        let zeros = label(&pts, &bi.indicator([5, 6]).unwrap()).unwrap();
        assert!(zeros.labels().iter().all(|&y| !y));
    }

    #[test]
    fn benedek_itai_witness() {
        let bi = BenedekItaiInstance::<f64>::with_full_support(100).unwrap();
        let d = bi.distribution();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = sample(&d, 30, &mut rng).unwrap();
        let s = label(&t, &bi.all_ones()).unwrap();
        let w = bi.witness(&s).unwrap();
        let distinct: BTreeSet<Symbol> = t.iter().map(|x| x[0]).collect();
        assert_eq!(empirical_distance::<f64>(&t, &w, &bi.all_ones()).unwrap(), 0.0);
        let err = exact_distance(&d, &w, &bi.all_ones()).unwrap();
        assert!((err - bi.error_of_support(distinct.len())).abs() < 1e-12);
        let small = BenedekItaiInstance::<f64>::new(100, 3).unwrap();
        assert!(small.witness(&s).is_err());
    }

    #[test]
    fn tiny_benedek_itai_class() {
        let bi = BenedekItaiInstance::<f64>::new(4, 2).unwrap();
        let class = bi.enumerate_class().unwrap();
        // 1 + 4 + 6 supports, plus all-ones
        assert_eq!(class.len(), 12);
        let d = bi.distribution();
        for h in class.iter().take(11) {
            let m = crate::distance::exact_mean(&d, h).unwrap();
            assert!(m <= 2.0 / 4.0 + 1e-12);
        }
    }
}
