//! ε-covers, covering maps and metric-entropy profiles for finite classes.

use crate::classes::{categorical_distance_closed_form, CategoricalInstance};
use crate::distance::{exact_distance, DistanceMatrix};
use crate::distribution::DistributionSpec;
use crate::domain::HypothesisClass;
use crate::error::{Error, Result};
use crate::scalar::{cast, Real};

/// Largest class handed to [`exhaustive_min_cover`].
pub const EXHAUSTIVE_COVER_MAX: usize = 20;

/// A subset `C` of class indices together with a covering map `c: H → C`.
///
/// `map[h]` is the position in `cover` of the representative of `h`, or
/// `None` when the pair was built for a subset of the class that omits `h`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverMapPair<R> {
    cover: Vec<usize>,
    map: Vec<Option<usize>>,
    radius: R,
}

impl<R: Real> CoverMapPair<R> {
    pub fn cover(&self) -> &[usize] {
        &self.cover
    }

    pub fn map(&self) -> &[Option<usize>] {
        &self.map
    }

    pub fn radius(&self) -> R {
        self.radius
    }

    /// Number of cover elements.
    pub fn len(&self) -> usize {
        self.cover.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cover.is_empty()
    }

    /// Class index of the representative `c(h)`.
    pub fn representative(&self, h: usize) -> Option<usize> {
        self.map.get(h).copied().flatten().map(|p| self.cover[p])
    }

    /// `max_h dist(h, c(h))` over every mapped hypothesis.
    pub fn max_radius_with(&self, mut dist: impl FnMut(usize, usize) -> Result<R>) -> Result<R> {
        let mut worst = R::zero();
        for h in 0..self.map.len() {
            if let Some(c) = self.representative(h) {
                if c != h {
                    worst = worst.max(dist(h, c)?);
                }
            }
        }
        Ok(worst)
    }

    /// Checks `d_D(h, c(h)) ≤ radius` for every mapped `h`, returning the
    /// largest distance found.
    pub fn verify(&self, d: &DistributionSpec<R>, class: &HypothesisClass) -> Result<R> {
        if self.map.len() != class.len() {
            return Err(Error::Dimension {
                expected: class.len(),
                found: self.map.len(),
            });
        }
        let worst = self.max_radius_with(|h, c| exact_distance(d, class.get(h), class.get(c)))?;
        if worst > self.radius + R::exact_tolerance() {
            return Err(Error::Infeasible(format!(
                "cover radius {worst} exceeds {}",
                self.radius
            )));
        }
        Ok(worst)
    }
}

/// First-uncovered scan over `members` in the given order: each member maps
/// to the first existing cover element within `eps`, or joins the cover.
/// `size` is the number of hypotheses in the whole class.
pub fn greedy_cover_among<R: Real>(
    size: usize,
    members: &[usize],
    eps: R,
    mut dist: impl FnMut(usize, usize) -> Result<R>,
) -> Result<CoverMapPair<R>> {
    if !(eps > R::zero()) {
        return Err(Error::precondition(format!("cover radius {eps} must be positive")));
    }
    let mut cover: Vec<usize> = Vec::new();
    let mut map = vec![None; size];
    for &h in members {
        if h >= size {
            return Err(Error::Dimension {
                expected: size,
                found: h + 1,
            });
        }
        let mut slot = None;
        for (p, &c) in cover.iter().enumerate() {
            if c == h || dist(c, h)? <= eps {
                slot = Some(p);
                break;
            }
        }
        map[h] = Some(slot.unwrap_or_else(|| {
            cover.push(h);
            cover.len() - 1
        }));
    }
    Ok(CoverMapPair {
        cover,
        map,
        radius: eps,
    })
}

/// Greedy ε-cover of the whole class under `D`, scanning by index.
pub fn greedy_cover<R: Real>(
    d: &DistributionSpec<R>,
    class: &HypothesisClass,
    eps: R,
) -> Result<CoverMapPair<R>> {
    let members: Vec<usize> = (0..class.len()).collect();
    greedy_cover_among(class.len(), &members, eps, |a, b| {
        exact_distance(d, class.get(a), class.get(b))
    })
}

/// Smallest ε-cover by exhaustive search over subsets, for `|H| ≤ 20`.
/// Among covers of minimum size the lexicographically first is returned.
pub fn exhaustive_min_cover<R: Real>(distances: &DistanceMatrix<R>, eps: R) -> Result<CoverMapPair<R>> {
    let size = distances.size();
    if size == 0 || size > EXHAUSTIVE_COVER_MAX {
        return Err(Error::precondition(format!(
            "exhaustive cover search needs 1..={EXHAUSTIVE_COVER_MAX} hypotheses, got {size}"
        )));
    }
    if !(eps > R::zero()) {
        return Err(Error::precondition(format!("cover radius {eps} must be positive")));
    }
    // reach[h]: bitmask of candidates within eps of h
    let reach: Vec<u32> = (0..size)
        .map(|h| {
            (0..size)
                .filter(|&c| c == h || distances.get(h, c) <= eps)
                .fold(0u32, |m, c| m | 1 << c)
        })
        .collect();
    for k in 1..=size as u32 {
        let mut best: Option<u32> = None;
        for_each_subset(size as u32, k, |s| {
            if best.is_none() && reach.iter().all(|&r| r & s != 0) {
                best = Some(s);
            }
        });
        if let Some(s) = best {
            let cover: Vec<usize> = (0..size).filter(|&c| s >> c & 1 == 1).collect();
            let map = (0..size)
                .map(|h| cover.iter().position(|&c| reach[h] >> c & 1 == 1))
                .collect();
            return Ok(CoverMapPair {
                cover,
                map,
                radius: eps,
            });
        }
    }
    unreachable!("the whole class is always a cover")
}

/// Visits every `k`-subset of `{0..n}` as a bitmask, in increasing order
/// of the mask's reversed bits (lexicographic in the element lists).
fn for_each_subset(n: u32, k: u32, mut visit: impl FnMut(u32)) {
    fn go(start: u32, n: u32, left: u32, acc: u32, visit: &mut impl FnMut(u32)) {
        if left == 0 {
            visit(acc);
            return;
        }
        for c in start..=(n - left) {
            go(c + 1, n, left - 1, acc | 1 << c, visit);
        }
    }
    go(0, n, k, 0, &mut visit);
}

/// Explicit cover of the categorical indicators under `D_special`: every
/// `f_j` with `E[f_j] ≥ ε/2`, plus the first `f_k` with `E[f_k] < ε/2`,
/// which represents all remaining indicators.
pub fn categorical_canonical_cover<R: Real>(
    inst: &CategoricalInstance<R>,
    special: usize,
    eps: R,
) -> Result<CoverMapPair<R>> {
    if !(eps > R::zero() && eps <= R::one()) {
        return Err(Error::precondition(format!("cover radius {eps} outside (0, 1]")));
    }
    if special >= inst.n() {
        return Err(Error::Dimension {
            expected: inst.n(),
            found: special + 1,
        });
    }
    let half = eps / cast(2.0);
    let mut cover = Vec::new();
    let mut map = vec![None; inst.n()];
    let mut sink = None;
    for j in 0..inst.n() {
        if inst.mean(special, j) >= half {
            cover.push(j);
            map[j] = Some(cover.len() - 1);
        } else {
            let p = *sink.get_or_insert_with(|| {
                cover.push(j);
                cover.len() - 1
            });
            map[j] = Some(p);
        }
    }
    Ok(CoverMapPair {
        cover,
        map,
        radius: eps,
    })
}

/// Checks a categorical cover through the closed-form distances.
pub fn verify_categorical_cover<R: Real>(
    pair: &CoverMapPair<R>,
    inst: &CategoricalInstance<R>,
    special: usize,
) -> Result<R> {
    let worst = pair.max_radius_with(|h, c| categorical_distance_closed_form(inst, special, h, c))?;
    if worst > pair.radius + R::exact_tolerance() {
        return Err(Error::Infeasible(format!(
            "cover radius {worst} exceeds {}",
            pair.radius
        )));
    }
    Ok(worst)
}

/// Cover sizes on a grid of radii, sorted by increasing radius.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyProfile<R> {
    points: Vec<(R, usize)>,
}

impl<R: Real> EntropyProfile<R> {
    /// Sorts the grid and enforces non-increasing sizes: a cover at a smaller
    /// radius is also a cover at every larger one.
    pub fn from_sizes(mut points: Vec<(R, usize)>) -> Result<Self> {
        if let Some(&(e, _)) = points.iter().find(|(e, _)| !(*e > R::zero() && *e <= R::one())) {
            return Err(Error::precondition(format!("grid value {e} outside (0, 1]")));
        }
        points.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite grid"));
        for k in 1..points.len() {
            points[k].1 = points[k].1.min(points[k - 1].1);
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(R, usize)] {
        &self.points
    }

    pub fn size_at(&self, eps: R) -> Option<usize> {
        self.points.iter().find(|(e, _)| *e == eps).map(|&(_, s)| s)
    }
}

fn check_grid<R: Real>(grid: &[R]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::precondition("radius grid is empty"));
    }
    match grid.iter().find(|&&e| !(e > R::zero() && e <= R::one())) {
        Some(e) => Err(Error::precondition(format!("grid value {e} outside (0, 1]"))),
        None => Ok(()),
    }
}

/// Greedy cover sizes of `H` under `D` at each grid radius.
pub fn entropy_profile<R: Real>(
    d: &DistributionSpec<R>,
    class: &HypothesisClass,
    grid: &[R],
) -> Result<EntropyProfile<R>> {
    check_grid(grid)?;
    let sizes = grid
        .iter()
        .map(|&e| Ok((e, greedy_cover(d, class, e)?.len())))
        .collect::<Result<_>>()?;
    EntropyProfile::from_sizes(sizes)
}

/// Sizes of the explicit categorical cover at each grid radius.
pub fn canonical_entropy_profile<R: Real>(
    inst: &CategoricalInstance<R>,
    special: usize,
    grid: &[R],
) -> Result<EntropyProfile<R>> {
    check_grid(grid)?;
    let sizes = grid
        .iter()
        .map(|&e| Ok((e, categorical_canonical_cover(inst, special, e)?.len())))
        .collect::<Result<_>>()?;
    EntropyProfile::from_sizes(sizes)
}
