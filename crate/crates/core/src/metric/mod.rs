//! Metric spaces, compact sets and the Hausdorff distance.

mod euclidean;
mod finite;
pub(crate) mod grid;

use std::fmt::Debug;

use thiserror::Error;

use crate::maps::PointMap;
use crate::scalar::{max_of, min_of, Scalar};

pub use euclidean::EuclideanSpace;
pub use finite::{validate_metric, FiniteMetricSpace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("EmptySpace: a metric space needs at least one point")]
    EmptySpace,
    #[error("NotSquare: row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("LabelCount: {labels} labels for a {size}-point matrix")]
    LabelCount { labels: usize, size: usize },
    #[error("DuplicateLabel({0})")]
    DuplicateLabel(String),
    #[error("NegativeEntry({0},{1})")]
    NegativeEntry(usize, usize),
    #[error("NonzeroDiagonal({0})")]
    NonzeroDiagonal(usize),
    #[error("AsymmetricMatrix({0},{1})")]
    AsymmetricMatrix(usize, usize),
    #[error("ZeroOffDiagonal({0},{1})")]
    ZeroOffDiagonal(usize, usize),
    /// `d[i][k] > d[i][via] + d[via][k]`.
    #[error("TriangleViolation({i},{k},{via})")]
    TriangleViolation { i: usize, k: usize, via: usize },
    #[error("EmptySet: compact sets are non-empty")]
    EmptySet,
    #[error("MixedAmbient: {0} is not a point of the ambient space")]
    MixedAmbient(String),
    #[error("DomainMiss({0})")]
    DomainMiss(String),
    #[error("UnknownLabel({0})")]
    UnknownLabel(String),
}

/// A metric space whose points can be enumerated or generated on demand.
pub trait MetricSpace {
    type Scalar: Scalar;
    type Point: Clone + Debug + PartialEq;

    fn distance(&self, a: &Self::Point, b: &Self::Point) -> Self::Scalar;

    /// Whether `p` is a point of this space.
    fn contains(&self, p: &Self::Point) -> bool;

    /// Point identity: exact equality, or distance below the scalar's
    /// dedup epsilon in float mode.
    fn coincide(&self, a: &Self::Point, b: &Self::Point) -> bool {
        if a == b {
            return true;
        }
        !Self::Scalar::EXACT && self.distance(a, b) < Self::Scalar::dedup_epsilon()
    }

    /// Removes repeated points, keeping first occurrences in order.
    fn dedup(&self, points: Vec<Self::Point>) -> Vec<Self::Point> {
        let mut kept: Vec<Self::Point> = Vec::with_capacity(points.len());
        for p in points {
            if !kept.iter().any(|q| self.coincide(q, &p)) {
                kept.push(p);
            }
        }
        kept
    }

    /// `max_{a ∈ from} min_{b ∈ to} d(a, b)`.
    fn directed_hausdorff(&self, from: &[Self::Point], to: &[Self::Point]) -> Self::Scalar {
        brute_directed_hausdorff(self, from, to)
    }

    fn describe(&self, p: &Self::Point) -> String {
        format!("{p:?}")
    }
}

pub(crate) fn brute_directed_hausdorff<M: MetricSpace + ?Sized>(
    space: &M,
    from: &[M::Point],
    to: &[M::Point],
) -> M::Scalar {
    let mut worst = M::Scalar::zero();
    for a in from {
        let mut best: Option<M::Scalar> = None;
        for b in to {
            let d = space.distance(a, b);
            if d <= worst {
                // `a` cannot raise the maximum any more.
                best = Some(d);
                break;
            }
            best = Some(match best {
                Some(cur) => min_of(&cur, &d),
                None => d,
            });
        }
        if let Some(b) = best {
            worst = max_of(&worst, &b);
        }
    }
    worst
}

use num_traits::Zero;

/// Non-empty, duplicate-free finite point set standing for a compact set.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactSet<P> {
    members: Vec<P>,
}

impl<P: Clone + Debug + PartialEq> CompactSet<P> {
    /// Deduplicates `points` and checks that each one lies in `space`.
    pub fn new<M>(space: &M, points: Vec<P>) -> Result<Self, MetricError>
    where
        M: MetricSpace<Point = P>,
    {
        if points.is_empty() {
            return Err(MetricError::EmptySet);
        }
        if let Some(p) = points.iter().find(|p| !space.contains(p)) {
            return Err(MetricError::MixedAmbient(space.describe(p)));
        }
        Ok(CompactSet {
            members: space.dedup(points),
        })
    }

    pub fn singleton(p: P) -> Self {
        CompactSet { members: vec![p] }
    }

    pub(crate) fn from_unique(members: Vec<P>) -> Self {
        debug_assert!(!members.is_empty());
        CompactSet { members }
    }

    pub fn members(&self) -> &[P] {
        &self.members
    }

    pub fn into_members(self) -> Vec<P> {
        self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn first(&self) -> &P {
        &self.members[0]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, P> {
        self.members.iter()
    }

    pub fn union<M>(&self, space: &M, other: &Self) -> Self
    where
        M: MetricSpace<Point = P>,
    {
        let mut all = self.members.clone();
        all.extend(other.members.iter().cloned());
        CompactSet {
            members: space.dedup(all),
        }
    }

    pub fn contains_point<M>(&self, space: &M, p: &P) -> bool
    where
        M: MetricSpace<Point = P>,
    {
        self.members.iter().any(|q| space.coincide(q, p))
    }

    pub fn is_subset_of<M>(&self, space: &M, other: &Self) -> bool
    where
        M: MetricSpace<Point = P>,
    {
        self.members.iter().all(|p| other.contains_point(space, p))
    }

    /// Set equality up to point identity.
    pub fn same_set<M>(&self, space: &M, other: &Self) -> bool
    where
        M: MetricSpace<Point = P>,
    {
        self.is_subset_of(space, other) && other.is_subset_of(space, self)
    }

    pub fn diameter<M>(&self, space: &M) -> M::Scalar
    where
        M: MetricSpace<Point = P>,
    {
        let mut diam = M::Scalar::zero();
        for (i, a) in self.members.iter().enumerate() {
            for b in &self.members[i + 1..] {
                diam = max_of(&diam, &space.distance(a, b));
            }
        }
        diam
    }
}

fn check_ambient<M: MetricSpace>(space: &M, set: &CompactSet<M::Point>) -> Result<(), MetricError> {
    match set.iter().find(|p| !space.contains(p)) {
        Some(p) => Err(MetricError::MixedAmbient(space.describe(p))),
        None => Ok(()),
    }
}

/// `d_H(A, B) = max{max_a d(a, B), max_b d(A, b)}`.
pub fn hausdorff_distance<M: MetricSpace>(
    space: &M,
    a: &CompactSet<M::Point>,
    b: &CompactSet<M::Point>,
) -> Result<M::Scalar, MetricError> {
    check_ambient(space, a)?;
    check_ambient(space, b)?;
    let ab = space.directed_hausdorff(a.members(), b.members());
    let ba = space.directed_hausdorff(b.members(), a.members());
    Ok(max_of(&ab, &ba))
}

/// `{f(x) : x ∈ K}` with duplicates merged.
pub fn set_image<M, F>(
    space: &M,
    f: &F,
    set: &CompactSet<M::Point>,
) -> Result<CompactSet<M::Point>, MetricError>
where
    M: MetricSpace,
    F: PointMap<M::Point> + ?Sized,
{
    let images = image_points(space, f, set.members())?;
    Ok(CompactSet::from_unique(space.dedup(images)))
}

pub(crate) fn image_points<M, F>(
    space: &M,
    f: &F,
    points: &[M::Point],
) -> Result<Vec<M::Point>, MetricError>
where
    M: MetricSpace,
    F: PointMap<M::Point> + ?Sized,
{
    points
        .iter()
        .map(|x| match f.image(x) {
            Some(y) if space.contains(&y) => Ok(y),
            Some(y) => Err(MetricError::MixedAmbient(space.describe(&y))),
            None => Err(MetricError::DomainMiss(space.describe(x))),
        })
        .collect()
}
