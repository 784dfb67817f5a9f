//! Marginal distributions over finite domains.

use std::collections::HashMap;

use crate::domain::{Domain, Point, Symbol};
use crate::error::{Error, Result};
use crate::scalar::{cast, CompensatedSum, Real};

/// `D_x^ρ`: every bit of `center` flipped independently with probability `rho`.
#[derive(Clone, Debug, PartialEq)]
pub struct NoisyCube<R> {
    center: Point,
    rho: R,
}

impl<R: Real> NoisyCube<R> {
    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn rho(&self) -> R {
        self.rho
    }
}

/// `D_i` over `{0,1,2}^n`: the special coordinate is a fair bit, every other
/// coordinate `j` is 0 or 1 with probability `eps[j]` each and 2 otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct Categorical<R> {
    special: usize,
    eps: Vec<R>,
}

impl<R: Real> Categorical<R> {
    pub fn special(&self) -> usize {
        self.special
    }

    pub fn eps(&self) -> &[R] {
        &self.eps
    }
}

/// Explicit probability table over finitely many points.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteTable<R> {
    domain: Domain,
    points: Vec<Point>,
    mass: Vec<R>,
}

impl<R: Real> FiniteTable<R> {
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn mass(&self) -> &[R] {
        &self.mass
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DistributionSpec<R> {
    NoisyCube(NoisyCube<R>),
    Categorical(Categorical<R>),
    Table(FiniteTable<R>),
}

impl<R: Real> DistributionSpec<R> {
    pub fn noisy_cube(center: Point, rho: R) -> Result<Self> {
        Domain::cube(center.dim())?.check(&center)?;
        if !(rho >= R::zero() && rho < cast(0.5)) {
            return Err(Error::InvalidDistribution(format!(
                "noise rate {rho} outside [0, 1/2)"
            )));
        }
        Ok(DistributionSpec::NoisyCube(NoisyCube { center, rho }))
    }

    /// `special` is a 0-based coordinate.
    pub fn categorical(special: usize, eps: Vec<R>) -> Result<Self> {
        if special >= eps.len() {
            return Err(Error::InvalidDistribution(format!(
                "special coordinate {special} outside truncation {}",
                eps.len()
            )));
        }
        let quarter = cast::<R>(0.25);
        if let Some(e) = eps.iter().find(|&&e| !(e > R::zero() && e <= quarter)) {
            return Err(Error::InvalidDistribution(format!(
                "categorical rate {e} outside (0, 1/4]"
            )));
        }
        Ok(DistributionSpec::Categorical(Categorical { special, eps }))
    }

    pub fn table(domain: Domain, points: Vec<Point>, mass: Vec<R>) -> Result<Self> {
        if points.is_empty() || points.len() != mass.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} points with {} masses",
                points.len(),
                mass.len()
            )));
        }
        for p in &points {
            domain.check(p)?;
        }
        if let Some(m) = mass.iter().find(|&&m| !(m >= R::zero())) {
            return Err(Error::InvalidDistribution(format!("negative mass {m}")));
        }
        let total = mass.iter().copied().collect::<CompensatedSum<R>>().value();
        let tol = if R::exact_tolerance() < cast(1e-9) {
            R::exact_tolerance()
        } else {
            cast(1e-5)
        };
        if (total - R::one()).abs() > tol {
            return Err(Error::InvalidDistribution(format!(
                "masses sum to {total}, not 1"
            )));
        }
        Ok(DistributionSpec::Table(FiniteTable {
            domain,
            points,
            mass,
        }))
    }

    /// Uniform table over the given distinct points.
    pub fn uniform(domain: Domain, points: Vec<Point>) -> Result<Self> {
        let m = R::one() / crate::scalar::count::<R>(points.len().max(1));
        let mass = vec![m; points.len()];
        Self::table(domain, points, mass)
    }

    pub fn domain(&self) -> Domain {
        match self {
            DistributionSpec::NoisyCube(d) => Domain::cube(d.center.dim()).expect("dim >= 1"),
            DistributionSpec::Categorical(d) => Domain::ternary(d.eps.len()).expect("dim >= 1"),
            DistributionSpec::Table(d) => d.domain,
        }
    }

    pub fn dim(&self) -> usize {
        self.domain().dim()
    }

    /// Whether coordinates are independent, so measures factor per coordinate.
    pub fn is_product(&self) -> bool {
        !matches!(self, DistributionSpec::Table(_))
    }

    /// Law of coordinate `c` for product distributions, indexed by symbol.
    pub fn coordinate_marginal(&self, c: usize) -> Option<Vec<R>> {
        match self {
            DistributionSpec::NoisyCube(d) => {
                let keep = R::one() - d.rho;
                Some(if d.center[c] == 0 {
                    vec![keep, d.rho]
                } else {
                    vec![d.rho, keep]
                })
            }
            DistributionSpec::Categorical(d) => {
                let half = cast::<R>(0.5);
                Some(if c == d.special {
                    vec![half, half, R::zero()]
                } else {
                    let e = d.eps[c];
                    vec![e, e, R::one() - e - e]
                })
            }
            DistributionSpec::Table(_) => None,
        }
    }

    /// Probability of the single point `x`.
    pub fn point_mass(&self, x: &[Symbol]) -> Result<R> {
        self.domain().check(x)?;
        Ok(match self {
            DistributionSpec::Table(t) => t
                .points
                .iter()
                .zip(&t.mass)
                .filter(|(p, _)| p.coords() == x)
                .map(|(_, &m)| m)
                .collect::<CompensatedSum<R>>()
                .value(),
            _ => x
                .iter()
                .enumerate()
                .map(|(c, &v)| self.coordinate_marginal(c).expect("product")[v as usize])
                .fold(R::one(), |acc, p| acc * p),
        })
    }

    /// Marginal law of the listed coordinates, as a distribution of the same
    /// family. Categorical projections must keep the special coordinate.
    pub fn marginal(&self, coords: &[usize]) -> Result<Self> {
        let dim = self.dim();
        if let Some(&c) = coords.iter().find(|&&c| c >= dim) {
            return Err(Error::Dimension {
                expected: dim,
                found: c + 1,
            });
        }
        match self {
            DistributionSpec::NoisyCube(d) => {
                let center = Point::from_raw(coords.iter().map(|&c| d.center[c]).collect());
                Self::noisy_cube(center, d.rho)
            }
            DistributionSpec::Categorical(d) => {
                let special = coords.iter().position(|&c| c == d.special).ok_or_else(|| {
                    Error::precondition("categorical marginal must keep the special coordinate")
                })?;
                Self::categorical(special, coords.iter().map(|&c| d.eps[c]).collect())
            }
            DistributionSpec::Table(t) => {
                let domain = Domain::new(coords.len(), t.domain.alphabet())?;
                let mut merged: Vec<(Point, CompensatedSum<R>)> = Vec::new();
                let mut index: HashMap<Vec<Symbol>, usize> = HashMap::new();
                for (p, &m) in t.points.iter().zip(&t.mass) {
                    let key: Vec<Symbol> = coords.iter().map(|&c| p[c]).collect();
                    let slot = *index.entry(key.clone()).or_insert_with(|| {
                        merged.push((Point::from_raw(key), CompensatedSum::new()));
                        merged.len() - 1
                    });
                    merged[slot].1.add(m);
                }
                let (points, mass) = merged.into_iter().map(|(p, s)| (p, s.value())).unzip();
                Self::table(domain, points, mass)
            }
        }
    }
}
