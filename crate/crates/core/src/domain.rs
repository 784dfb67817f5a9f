//! Points, hypotheses, classes and samples over finite product domains.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A coordinate value.
pub type Symbol = u32;

/// Finite domain `{0, .., alphabet-1}^dim`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Domain {
    dim: usize,
    alphabet: Symbol,
}

impl Domain {
    pub fn new(dim: usize, alphabet: Symbol) -> Result<Self> {
        if dim == 0 {
            return Err(Error::precondition("domain dimension must be at least 1"));
        }
        if alphabet == 0 {
            return Err(Error::precondition("alphabet must be nonempty"));
        }
        Ok(Self { dim, alphabet })
    }

    /// The hypercube `{0,1}^dim`.
    pub fn cube(dim: usize) -> Result<Self> {
        Self::new(dim, 2)
    }

    /// `{0,1,2}^dim`, the truncated categorical domain.
    pub fn ternary(dim: usize) -> Result<Self> {
        Self::new(dim, 3)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alphabet(&self) -> Symbol {
        self.alphabet
    }

    /// Number of points, or `None` if it overflows `usize`.
    pub fn size(&self) -> Option<usize> {
        (self.alphabet as usize).checked_pow(self.dim as u32)
    }

    pub fn contains(&self, x: &[Symbol]) -> bool {
        x.len() == self.dim && x.iter().all(|&v| v < self.alphabet)
    }

    pub fn check(&self, x: &[Symbol]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: x.len(),
            });
        }
        if let Some(v) = x.iter().find(|&&v| v >= self.alphabet) {
            return Err(Error::precondition(format!(
                "coordinate value {v} outside alphabet of size {}",
                self.alphabet
            )));
        }
        Ok(())
    }

    pub(crate) fn same_as(&self, other: &Domain) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }
}

/// A point of a finite domain.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point(Vec<Symbol>);

impl Point {
    pub fn new(domain: &Domain, coords: Vec<Symbol>) -> Result<Self> {
        domain.check(&coords)?;
        Ok(Self(coords))
    }

    pub(crate) fn from_raw(coords: Vec<Symbol>) -> Self {
        Self(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    /// Cube point whose coordinates are the low `dim` bits of `bits`;
    /// coordinates past bit 63 are zero.
    pub fn from_bits(dim: usize, bits: u64) -> Self {
        Self(
            (0..dim)
                .map(|i| (u32::try_from(i).ok().and_then(|i| bits.checked_shr(i)).unwrap_or(0) & 1) as Symbol)
                .collect(),
        )
    }

    pub fn coords(&self) -> &[Symbol] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<Symbol> {
        self.0
    }
}

impl Deref for Point {
    type Target = [Symbol];

    fn deref(&self) -> &[Symbol] {
        &self.0
    }
}

/// Boolean rule over a few coordinates, for classes that are not one of the
/// built-in families. The closure sees the values of `coords`, in order.
#[derive(Clone)]
pub struct CustomRule {
    name: Arc<str>,
    coords: Arc<[usize]>,
    rule: Arc<dyn Fn(&[Symbol]) -> bool + Send + Sync>,
}

/// Largest number of coordinates a [`CustomRule`] may read.
pub const MAX_RULE_COORDS: usize = 16;

impl CustomRule {
    pub fn new(
        name: &str,
        coords: Vec<usize>,
        rule: impl Fn(&[Symbol]) -> bool + Send + Sync + 'static,
    ) -> Result<Self> {
        if coords.len() > MAX_RULE_COORDS {
            return Err(Error::precondition(format!(
                "custom rule reads {} coordinates, at most {MAX_RULE_COORDS} allowed",
                coords.len()
            )));
        }
        Ok(Self {
            name: name.into(),
            coords: coords.into(),
            rule: Arc::new(rule),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

/// A binary classifier over a finite domain, evaluated lazily.
#[derive(Clone)]
pub enum Hypothesis {
    Constant(bool),
    /// `1` iff `x[i] == 1`.
    Dictator(usize),
    /// `1` iff `x[i] == 0`.
    ZeroIndicator(usize),
    /// `1` iff `x[0]` belongs to the set.
    Support(Arc<BTreeSet<Symbol>>),
    Custom(CustomRule),
}

impl Hypothesis {
    pub fn support(values: impl IntoIterator<Item = Symbol>) -> Self {
        Hypothesis::Support(Arc::new(values.into_iter().collect()))
    }

    #[inline]
    pub fn eval(&self, x: &[Symbol]) -> bool {
        self.eval_with(|c| x[c])
    }

    /// Evaluates with coordinate values supplied by `value`. Only the
    /// coordinates in [`Hypothesis::coords`] are queried.
    #[inline]
    pub fn eval_with(&self, value: impl Fn(usize) -> Symbol) -> bool {
        match self {
            Hypothesis::Constant(b) => *b,
            Hypothesis::Dictator(i) => value(*i) == 1,
            Hypothesis::ZeroIndicator(i) => value(*i) == 0,
            Hypothesis::Support(set) => set.contains(&value(0)),
            Hypothesis::Custom(rule) => {
                let mut buf = [0; MAX_RULE_COORDS];
                let k = rule.coords.len();
                for (slot, &c) in buf.iter_mut().zip(rule.coords.iter()) {
                    *slot = value(c);
                }
                (rule.rule)(&buf[..k])
            }
        }
    }

    /// Coordinates the hypothesis depends on.
    pub fn coords(&self) -> Vec<usize> {
        match self {
            Hypothesis::Constant(_) => Vec::new(),
            Hypothesis::Dictator(i) | Hypothesis::ZeroIndicator(i) => vec![*i],
            Hypothesis::Support(_) => vec![0],
            Hypothesis::Custom(rule) => rule.coords.to_vec(),
        }
    }

    pub fn check_domain(&self, domain: &Domain) -> Result<()> {
        match self.coords().into_iter().max() {
            Some(c) if c >= domain.dim() => Err(Error::Dimension {
                expected: domain.dim(),
                found: c + 1,
            }),
            _ => Ok(()),
        }
    }

    /// Moves the hypothesis onto a projected domain. Returns `None` when a
    /// coordinate it reads is dropped by `map`.
    pub fn reindex(&self, map: impl Fn(usize) -> Option<usize>) -> Option<Self> {
        Some(match self {
            Hypothesis::Constant(b) => Hypothesis::Constant(*b),
            Hypothesis::Dictator(i) => Hypothesis::Dictator(map(*i)?),
            Hypothesis::ZeroIndicator(i) => Hypothesis::ZeroIndicator(map(*i)?),
            Hypothesis::Support(set) => {
                if map(0)? != 0 {
                    return None;
                }
                Hypothesis::Support(set.clone())
            }
            Hypothesis::Custom(rule) => {
                let coords: Option<Vec<usize>> = rule.coords.iter().map(|&c| map(c)).collect();
                Hypothesis::Custom(CustomRule {
                    name: rule.name.clone(),
                    coords: coords?.into(),
                    rule: rule.rule.clone(),
                })
            }
        })
    }
}

impl PartialEq for Hypothesis {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Hypothesis::Constant(a), Hypothesis::Constant(b)) => a == b,
            (Hypothesis::Dictator(a), Hypothesis::Dictator(b)) => a == b,
            (Hypothesis::ZeroIndicator(a), Hypothesis::ZeroIndicator(b)) => a == b,
            (Hypothesis::Support(a), Hypothesis::Support(b)) => a == b,
            (Hypothesis::Custom(a), Hypothesis::Custom(b)) => {
                Arc::ptr_eq(&a.rule, &b.rule) && a.coords == b.coords
            }
            _ => false,
        }
    }
}

impl fmt::Debug for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hypothesis::Constant(b) => write!(f, "Constant({})", *b as u8),
            Hypothesis::Dictator(i) => write!(f, "Dictator({i})"),
            Hypothesis::ZeroIndicator(i) => write!(f, "ZeroIndicator({i})"),
            Hypothesis::Support(set) => write!(f, "Support(|S|={})", set.len()),
            Hypothesis::Custom(rule) => write!(f, "Custom({}, {:?})", rule.name, rule.coords),
        }
    }
}

/// A nonempty, densely indexed hypothesis class. A hypothesis' id is its
/// position in the class.
#[derive(Clone, Debug)]
pub struct HypothesisClass {
    domain: Domain,
    hypotheses: Vec<Hypothesis>,
}

impl HypothesisClass {
    pub fn new(domain: Domain, hypotheses: Vec<Hypothesis>) -> Result<Self> {
        if hypotheses.is_empty() {
            return Err(Error::precondition("hypothesis class must be nonempty"));
        }
        for h in &hypotheses {
            h.check_domain(&domain)?;
        }
        Ok(Self { domain, hypotheses })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, id: usize) -> &Hypothesis {
        &self.hypotheses[id]
    }

    pub fn hypotheses(&self) -> &[Hypothesis] {
        &self.hypotheses
    }

    pub fn iter(&self) -> impl Iterator<Item = &Hypothesis> {
        self.hypotheses.iter()
    }

    /// Id of the first member equal to `h`.
    pub fn position(&self, h: &Hypothesis) -> Option<usize> {
        self.hypotheses.iter().position(|g| g == h)
    }
}

/// Unlabeled sample, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnlabeledSample {
    domain: Domain,
    data: Vec<Symbol>,
}

impl UnlabeledSample {
    pub fn new(domain: Domain, points: &[Point]) -> Result<Self> {
        let mut data = Vec::with_capacity(points.len() * domain.dim());
        for p in points {
            domain.check(p)?;
            data.extend_from_slice(p);
        }
        Ok(Self { domain, data })
    }

    /// Wraps row-major data whose values are already known to be in range.
    pub(crate) fn from_raw(domain: Domain, data: Vec<Symbol>) -> Self {
        debug_assert_eq!(data.len() % domain.dim(), 0);
        Self { domain, data }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.domain.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn point(&self, k: usize) -> &[Symbol] {
        let d = self.domain.dim();
        &self.data[k * d..(k + 1) * d]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[Symbol]> + '_ {
        self.data.chunks_exact(self.domain.dim())
    }

    pub fn to_points(&self) -> Vec<Point> {
        self.iter().map(|x| Point(x.to_vec())).collect()
    }

    /// Keeps only `coords`, in the given order.
    pub fn project(&self, coords: &[usize]) -> Result<Self> {
        let domain = Domain::new(coords.len(), self.domain.alphabet())?;
        if let Some(&c) = coords.iter().find(|&&c| c >= self.domain.dim()) {
            return Err(Error::Dimension {
                expected: self.domain.dim(),
                found: c + 1,
            });
        }
        let data = self
            .iter()
            .flat_map(|x| coords.iter().map(move |&c| x[c]))
            .collect();
        Ok(Self { domain, data })
    }
}

/// Sample of `(point, label)` pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledSample {
    points: UnlabeledSample,
    labels: Vec<bool>,
}

impl LabeledSample {
    pub fn new(points: UnlabeledSample, labels: Vec<bool>) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::precondition(format!(
                "{} points but {} labels",
                points.len(),
                labels.len()
            )));
        }
        Ok(Self { points, labels })
    }

    pub fn points(&self) -> &UnlabeledSample {
        &self.points
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn domain(&self) -> &Domain {
        self.points.domain()
    }

    pub fn examples(&self) -> impl ExactSizeIterator<Item = (&[Symbol], bool)> + '_ {
        self.points.iter().zip(self.labels.iter().copied())
    }
}

/// The symmetric difference `h ∆ h'`: points where the two hypotheses disagree.
#[derive(Clone, Debug)]
pub struct Event {
    left: Hypothesis,
    right: Hypothesis,
}

impl Event {
    pub fn symmetric_difference(left: Hypothesis, right: Hypothesis) -> Self {
        Self { left, right }
    }

    #[inline]
    pub fn contains(&self, x: &[Symbol]) -> bool {
        self.left.eval(x) != self.right.eval(x)
    }

    pub fn parts(&self) -> (&Hypothesis, &Hypothesis) {
        (&self.left, &self.right)
    }
}
