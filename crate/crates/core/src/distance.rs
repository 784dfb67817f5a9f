//! Classification distances: exact, brute force, empirical and the
//! class-conditional total variation distance.

use std::collections::{HashMap, HashSet};

use crate::distribution::DistributionSpec;
use crate::domain::{Event, Hypothesis, HypothesisClass, Symbol, UnlabeledSample};
use crate::error::{Error, Result};
use crate::scalar::{count, CompensatedSum, Real};

/// Largest joint support enumerated by the per-coordinate product path.
const MAX_LOCAL_ASSIGNMENTS: usize = 1 << 20;

/// Largest dimension accepted by the brute-force oracles.
pub const BRUTE_FORCE_MAX_DIM: usize = 20;

/// Largest domain accepted by the brute-force oracles.
pub const BRUTE_FORCE_MAX_POINTS: usize = 1 << 22;

/// Exact probability of `event` under `d`.
///
/// Product distributions enumerate only the joint law of the coordinates the
/// event reads; tables sum over their support.
pub fn exact_measure<R: Real>(d: &DistributionSpec<R>, event: &Event) -> Result<R> {
    let domain = d.domain();
    let (h, g) = event.parts();
    h.check_domain(&domain)?;
    g.check_domain(&domain)?;
    match d {
        DistributionSpec::Table(t) => Ok(t
            .points()
            .iter()
            .zip(t.mass())
            .filter(|(x, _)| event.contains(x))
            .map(|(_, &m)| m)
            .collect::<CompensatedSum<R>>()
            .value()),
        _ => product_measure(d, event),
    }
}

fn product_measure<R: Real>(d: &DistributionSpec<R>, event: &Event) -> Result<R> {
    let (h, g) = event.parts();
    let mut coords = h.coords();
    coords.extend(g.coords());
    coords.sort_unstable();
    coords.dedup();

    let marginals: Vec<Vec<R>> = coords
        .iter()
        .map(|&c| d.coordinate_marginal(c).expect("product distribution"))
        .collect();
    let assignments = marginals
        .iter()
        .try_fold(1usize, |acc, m| acc.checked_mul(m.len()))
        .filter(|&n| n <= MAX_LOCAL_ASSIGNMENTS)
        .ok_or_else(|| {
            Error::Unsupported(format!(
                "event reads {} coordinates; joint support too large",
                coords.len()
            ))
        })?;

    let mut digits = vec![0 as Symbol; coords.len()];
    let mut acc = CompensatedSum::new();
    for _ in 0..assignments {
        let value = |c: usize| {
            let k = coords.binary_search(&c).expect("coordinate read by event");
            digits[k]
        };
        if h.eval_with(value) != g.eval_with(value) {
            let p = digits
                .iter()
                .zip(&marginals)
                .fold(R::one(), |p, (&v, m)| p * m[v as usize]);
            acc.add(p);
        }
        // mixed-radix increment
        for (digit, m) in digits.iter_mut().zip(&marginals) {
            *digit += 1;
            if (*digit as usize) < m.len() {
                break;
            }
            *digit = 0;
        }
    }
    Ok(acc.value())
}

/// `d_D(h, h') = Pr_{x~D}[h(x) != h'(x)]`, computed exactly.
pub fn exact_distance<R: Real>(d: &DistributionSpec<R>, h: &Hypothesis, g: &Hypothesis) -> Result<R> {
    if h == g {
        h.check_domain(&d.domain())?;
        return Ok(R::zero());
    }
    exact_measure(d, &Event::symmetric_difference(h.clone(), g.clone()))
}

/// `Pr_{x~D}[h(x) = 1]`.
pub fn exact_mean<R: Real>(d: &DistributionSpec<R>, h: &Hypothesis) -> Result<R> {
    exact_distance(d, h, &Hypothesis::Constant(false))
}

/// Calls `visit(x, mass)` for every point of the domain of `d`.
fn enumerate_domain<R: Real>(
    d: &DistributionSpec<R>,
    mut visit: impl FnMut(&[Symbol], R),
) -> Result<()> {
    let domain = d.domain();
    let points = domain
        .size()
        .filter(|&n| domain.dim() <= BRUTE_FORCE_MAX_DIM && n <= BRUTE_FORCE_MAX_POINTS)
        .ok_or_else(|| {
            Error::precondition(format!(
                "brute force limited to dimension {BRUTE_FORCE_MAX_DIM} and {BRUTE_FORCE_MAX_POINTS} points"
            ))
        })?;
    let table: Option<HashMap<&[Symbol], R>> = match d {
        DistributionSpec::Table(t) => {
            let mut map: HashMap<&[Symbol], R> = HashMap::new();
            for (p, &m) in t.points().iter().zip(t.mass()) {
                let slot = map.entry(p.coords()).or_insert(R::zero());
                *slot = *slot + m;
            }
            Some(map)
        }
        _ => None,
    };
    let marginals: Vec<Vec<R>> = (0..domain.dim())
        .map(|c| d.coordinate_marginal(c).unwrap_or_default())
        .collect();
    let alphabet = domain.alphabet();
    let mut x = vec![0 as Symbol; domain.dim()];
    for _ in 0..points {
        let mass = match &table {
            Some(map) => map.get(x.as_slice()).copied().unwrap_or(R::zero()),
            None => x
                .iter()
                .zip(&marginals)
                .fold(R::one(), |p, (&v, m)| p * m[v as usize]),
        };
        visit(&x, mass);
        for v in x.iter_mut() {
            *v += 1;
            if *v < alphabet {
                break;
            }
            *v = 0;
        }
    }
    Ok(())
}

/// Oracle for [`exact_distance`]: sums the mass of every disagreeing point of
/// the full domain. Limited to small domains.
pub fn brute_force_distance<R: Real>(
    d: &DistributionSpec<R>,
    h: &Hypothesis,
    g: &Hypothesis,
) -> Result<R> {
    let domain = d.domain();
    h.check_domain(&domain)?;
    g.check_domain(&domain)?;
    let mut acc = CompensatedSum::new();
    enumerate_domain(d, |x, m| {
        if h.eval(x) != g.eval(x) {
            acc.add(m);
        }
    })?;
    Ok(acc.value())
}

/// All pairwise brute-force distances of a class in one pass over the domain.
pub fn brute_force_distances<R: Real>(
    d: &DistributionSpec<R>,
    class: &HypothesisClass,
) -> Result<DistanceMatrix<R>> {
    d.domain().same_as(class.domain())?;
    let k = class.len();
    let mut sums = vec![CompensatedSum::<R>::new(); k * k];
    let mut bits = vec![false; k];
    enumerate_domain(d, |x, m| {
        if m == R::zero() {
            return;
        }
        for (b, h) in bits.iter_mut().zip(class.iter()) {
            *b = h.eval(x);
        }
        for i in 0..k {
            for j in (i + 1)..k {
                if bits[i] != bits[j] {
                    sums[i * k + j].add(m);
                }
            }
        }
    })?;
    let mut values = vec![R::zero(); k * k];
    for i in 0..k {
        for j in (i + 1)..k {
            let v = sums[i * k + j].value();
            values[i * k + j] = v;
            values[j * k + i] = v;
        }
    }
    Ok(DistanceMatrix { size: k, values })
}

/// `(1/|T|) Σ_{x∈T} 1{h(x) != h'(x)}`.
pub fn empirical_distance<R: Real>(t: &UnlabeledSample, h: &Hypothesis, g: &Hypothesis) -> Result<R> {
    if t.is_empty() {
        return Err(Error::precondition("empirical distance needs a nonempty sample"));
    }
    h.check_domain(t.domain())?;
    g.check_domain(t.domain())?;
    let disagreements = t.iter().filter(|x| h.eval(x) != g.eval(x)).count();
    Ok(count::<R>(disagreements) / count::<R>(t.len()))
}

/// `TV_{H∆H}(D, D')`: the largest gap between the two measures of any
/// symmetric difference of a pair of hypotheses.
pub fn tv_class_conditional<R: Real>(
    d: &DistributionSpec<R>,
    e: &DistributionSpec<R>,
    class: &HypothesisClass,
) -> Result<R> {
    d.domain().same_as(class.domain())?;
    e.domain().same_as(class.domain())?;
    let a = DistanceMatrix::exact(d, class)?;
    let b = DistanceMatrix::exact(e, class)?;
    Ok(a.max_gap(&b, None))
}

/// Number of distinct labelings `(h(x))_{x∈T}` realized by the class.
pub fn growth_count(class: &HypothesisClass, t: &UnlabeledSample) -> Result<usize> {
    if t.is_empty() {
        return Err(Error::precondition("growth count needs a nonempty sample"));
    }
    class.domain().same_as(t.domain())?;
    let table = EvaluationTable::new(class.iter(), t);
    Ok(table.distinct_rows().len())
}

/// Symmetric matrix of pairwise distances over a class.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix<R> {
    size: usize,
    values: Vec<R>,
}

impl<R: Real> DistanceMatrix<R> {
    /// Exact distances under `d` for every pair of the class.
    pub fn exact(d: &DistributionSpec<R>, class: &HypothesisClass) -> Result<Self> {
        Self::from_fn(class.len(), |i, j| exact_distance(d, class.get(i), class.get(j)))
    }

    /// Builds from a pair function evaluated on `i < j`.
    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> Result<R>) -> Result<Self> {
        let mut values = vec![R::zero(); size * size];
        for i in 0..size {
            for j in (i + 1)..size {
                let v = f(i, j)?;
                values[i * size + j] = v;
                values[j * size + i] = v;
            }
        }
        Ok(Self { size, values })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> R {
        self.values[i * self.size + j]
    }

    /// Largest `|self(i,j) - other(i,j)|`, over all pairs or over pairs of `among`.
    pub fn max_gap(&self, other: &Self, among: Option<&[usize]>) -> R {
        let all: Vec<usize>;
        let ids = match among {
            Some(ids) => ids,
            None => {
                all = (0..self.size).collect();
                &all
            }
        };
        let mut worst = R::zero();
        for (a, &i) in ids.iter().enumerate() {
            for &j in &ids[a + 1..] {
                worst = worst.max((self.get(i, j) - other.get(i, j)).abs());
            }
        }
        worst
    }
}

/// Bit-packed evaluations of several hypotheses on one sample.
#[derive(Clone, Debug)]
pub struct EvaluationTable {
    words: usize,
    len: usize,
    rows: Vec<u64>,
}

impl EvaluationTable {
    pub fn new<'a>(hypotheses: impl IntoIterator<Item = &'a Hypothesis>, t: &UnlabeledSample) -> Self {
        let len = t.len();
        let words = len.div_ceil(64);
        let mut rows = Vec::new();
        for h in hypotheses {
            let start = rows.len();
            rows.resize(start + words, 0u64);
            for (k, x) in t.iter().enumerate() {
                if h.eval(x) {
                    rows[start + k / 64] |= 1 << (k % 64);
                }
            }
        }
        Self { words, len, rows }
    }

    /// Packs a label vector in the same layout as the rows.
    pub fn pack(labels: &[bool]) -> Vec<u64> {
        let mut row = vec![0u64; labels.len().div_ceil(64)];
        for (k, &b) in labels.iter().enumerate() {
            if b {
                row[k / 64] |= 1 << (k % 64);
            }
        }
        row
    }

    pub fn sample_len(&self) -> usize {
        self.len
    }

    pub fn rows(&self) -> usize {
        if self.words == 0 {
            0
        } else {
            self.rows.len() / self.words
        }
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.rows[i * self.words..(i + 1) * self.words]
    }

    pub fn value(&self, i: usize, k: usize) -> bool {
        self.row(i)[k / 64] >> (k % 64) & 1 == 1
    }

    /// Number of sample points where rows `i` and `j` differ.
    #[inline]
    pub fn disagreements(&self, i: usize, j: usize) -> usize {
        hamming(self.row(i), self.row(j))
    }

    /// Number of sample points where row `i` differs from packed `labels`.
    pub fn mistakes(&self, i: usize, labels: &[u64]) -> usize {
        hamming(self.row(i), labels)
    }

    /// First row index of each distinct labeling, in row order.
    pub fn distinct_rows(&self) -> Vec<usize> {
        let mut seen = HashSet::new();
        (0..self.rows())
            .filter(|&i| seen.insert(self.row(i)))
            .collect()
    }
}

#[inline]
fn hamming(a: &[u64], b: &[u64]) -> usize {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x ^ y).count_ones() as usize)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{CustomRule, Domain, Point};

    fn dictators(n: usize) -> HypothesisClass {
        HypothesisClass::new(
            Domain::cube(n).unwrap(),
            (0..n).map(Hypothesis::Dictator).collect(),
        )
        .unwrap()
    }

    #[test]
    fn cube_dictators_agreeing_bits() {
        // bits i, j of the center agree: disagreement iff exactly one flips,
        // 2ρ(1−ρ) = 2·0.25·0.75
        let d = DistributionSpec::<f64>::noisy_cube(Point::from_bits(4, 0b0011), 0.25).unwrap();
        let v = exact_distance(&d, &Hypothesis::Dictator(0), &Hypothesis::Dictator(1)).unwrap();
        assert!((v - 0.375).abs() < 1e-12);
        let w = brute_force_distance(&d, &Hypothesis::Dictator(0), &Hypothesis::Dictator(1)).unwrap();
        assert!((v - w).abs() < 1e-12);
    }

    #[test]
    fn identical_hypotheses_have_distance_zero() {
        let d = DistributionSpec::<f64>::noisy_cube(Point::from_bits(3, 5), 0.1).unwrap();
        for i in 0..3 {
            let h = Hypothesis::Dictator(i);
            assert_eq!(exact_distance(&d, &h, &h).unwrap(), 0.0);
        }
    }

    #[test]
    fn categorical_special_pair_is_one_half() {
        let d = DistributionSpec::<f64>::categorical(1, vec![0.125, 0.11, 0.1]).unwrap();
        for j in [0, 2] {
            let v = exact_distance(&d, &Hypothesis::ZeroIndicator(1), &Hypothesis::ZeroIndicator(j))
                .unwrap();
            assert!((v - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn domain_mismatch_is_a_dimension_error() {
        let d = DistributionSpec::<f64>::noisy_cube(Point::zeros(2), 0.1).unwrap();
        let err = exact_distance(&d, &Hypothesis::Dictator(0), &Hypothesis::Dictator(5)).unwrap_err();
        assert!(matches!(err, Error::Dimension { .. }));
        let other = dictators(3);
        assert!(matches!(
            tv_class_conditional(&d, &d, &other),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn empirical_distance_counts() {
        let cube = Domain::cube(2).unwrap();
        let single = UnlabeledSample::new(cube, &[Point::from_bits(2, 0b01)]).unwrap();
        let (h, g) = (Hypothesis::Dictator(0), Hypothesis::Dictator(1));
        assert_eq!(empirical_distance::<f64>(&single, &h, &g).unwrap(), 1.0);
        assert_eq!(empirical_distance::<f64>(&single, &h, &h).unwrap(), 0.0);
        let four = UnlabeledSample::new(
            cube,
            &[0b00, 0b11, 0b01, 0b11].map(|b| Point::from_bits(2, b)),
        )
        .unwrap();
        assert_eq!(empirical_distance::<f64>(&four, &h, &g).unwrap(), 0.25);
        let empty = UnlabeledSample::new(cube, &[]).unwrap();
        assert!(matches!(
            empirical_distance::<f64>(&empty, &h, &g),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn tv_between_neighbouring_centers() {
        // centers differ in one coordinate; ρ = 0.25, all dictators
        let h = dictators(3);
        let d = DistributionSpec::<f64>::noisy_cube(Point::from_bits(3, 0b000), 0.25).unwrap();
        let e = DistributionSpec::<f64>::noisy_cube(Point::from_bits(3, 0b001), 0.25).unwrap();
        assert_eq!(tv_class_conditional(&d, &d, &h).unwrap(), 0.0);
        // oracle: brute-force both matrices
        let a = brute_force_distances(&d, &h).unwrap();
        let b = brute_force_distances(&e, &h).unwrap();
        let oracle = a.max_gap(&b, None);
        assert!((oracle - 0.25).abs() < 1e-12);
        assert!((tv_class_conditional(&d, &e, &h).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn tv_of_disjoint_tables_is_one() {
        let dom = Domain::cube(2).unwrap();
        let d = DistributionSpec::<f64>::table(dom, vec![Point::from_bits(2, 0b01)], vec![1.0]).unwrap();
        let e = DistributionSpec::<f64>::table(dom, vec![Point::from_bits(2, 0b11)], vec![1.0]).unwrap();
        let h = dictators(2);
        // enumeration: d_D(h0,h1) = 1 on (1,0), d_D'(h0,h1) = 0 on (1,1)
        assert_eq!(brute_force_distance(&d, h.get(0), h.get(1)).unwrap(), 1.0);
        assert_eq!(brute_force_distance(&e, h.get(0), h.get(1)).unwrap(), 0.0);
        assert_eq!(tv_class_conditional(&d, &e, &h).unwrap(), 1.0);
    }

    #[test]
    fn growth_counts() {
        let cube = Domain::cube(4).unwrap();
        let basis: Vec<Point> = (0..4).map(|i| Point::from_bits(4, 1 << i)).collect();
        let t = UnlabeledSample::new(cube, &basis).unwrap();
        // brute force: collect labelings of the dictator class on e_1..e_4
        let mut seen: Vec<Vec<bool>> = Vec::new();
        for i in 0..4 {
            let row: Vec<bool> = basis.iter().map(|x| x[i] == 1).collect();
            if !seen.contains(&row) {
                seen.push(row);
            }
        }
        assert_eq!(seen.len(), 4);
        assert_eq!(growth_count(&dictators(4), &t).unwrap(), 4);
        let one = HypothesisClass::new(cube, vec![Hypothesis::Dictator(2)]).unwrap();
        assert_eq!(growth_count(&one, &t).unwrap(), 1);
        let rule = CustomRule::new("same", vec![1], |v| v[0] == 1).unwrap();
        let twins =
            HypothesisClass::new(cube, vec![Hypothesis::Dictator(1), Hypothesis::Custom(rule)]).unwrap();
        assert_eq!(growth_count(&twins, &t).unwrap(), 1);
    }

    #[test]
    fn custom_rules_use_the_product_path() {
        let d = DistributionSpec::<f64>::noisy_cube(Point::from_bits(3, 0b110), 0.2).unwrap();
        let xor = CustomRule::new("xor", vec![0, 2], |v| v[0] != v[1]).unwrap();
        let (h, g) = (Hypothesis::Custom(xor), Hypothesis::Dictator(1));
        let exact = exact_distance(&d, &h, &g).unwrap();
        let brute = brute_force_distance(&d, &h, &g).unwrap();
        assert!((exact - brute).abs() < 1e-12);
    }

    #[test]
    fn brute_force_is_capped() {
        let d = DistributionSpec::<f64>::noisy_cube(Point::zeros(21), 0.1).unwrap();
        assert!(brute_force_distance(&d, &Hypothesis::Dictator(0), &Hypothesis::Dictator(1)).is_err());
    }
}
