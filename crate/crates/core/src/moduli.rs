//! Continuity moduli and the contraction taxonomy.
//!
//! A modulus is a piecewise-linear concave function `φ` with `φ(0) = 0`.
//! Concavity gives subadditivity for free and keeps every evaluation exact
//! in rational mode. The Banach/Rakotch/Matkowski verdicts are finite-scale
//! checks: Rakotch only quantifies over a supplied grid of lower cut-offs
//! and Matkowski iterates `φ` under fixed caps.

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::maps::PointMap;
use crate::metric::{MetricError, MetricSpace};
use crate::scalar::{max_of, Scalar};

/// Iteration cap for the Matkowski check.
pub const MATKOWSKI_MAX_ITER: usize = 10_000;
/// Matkowski iterates must fall below `MATKOWSKI_REL_EPS * d_max`.
pub const MATKOWSKI_REL_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModulusError {
    #[error("NotAnchored: a modulus must satisfy φ(0) = 0")]
    NotAnchored,
    #[error("NotIncreasing: breakpoint {0} does not increase t")]
    NotIncreasing(usize),
    #[error("Decreasing: segment {0} has negative slope")]
    Decreasing(usize),
    #[error("NotConcave: segment {0} is steeper than the one before")]
    NotConcave(usize),
    #[error("NegativeArgument")]
    NegativeArgument,
    #[error("EmptyGrid")]
    EmptyGrid,
    #[error("NonPositiveScale: d_max must be positive")]
    NonPositiveScale,
    #[error("GridOutOfRange: grid value {0} outside (0, d_max]")]
    GridOutOfRange(String),
}

/// Anything usable as an upper envelope `t ↦ bound(t)` for image distances.
pub trait Gauge<S> {
    fn gauge(&self, t: &S) -> S;
}

/// Piecewise-linear concave continuity modulus.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityModulus<S> {
    breakpoints: Vec<(S, S)>,
    tail_slope: S,
}

impl<S: Scalar> ContinuityModulus<S> {
    /// Builds a modulus from `(t, φ(t))` breakpoints and the slope used past
    /// the last one. A missing `(0, 0)` anchor is prepended.
    pub fn new(mut breakpoints: Vec<(S, S)>, tail_slope: S) -> Result<Self, ModulusError> {
        match breakpoints.first() {
            Some((t, v)) if t.is_zero() => {
                if !v.is_zero() {
                    return Err(ModulusError::NotAnchored);
                }
            }
            Some((t, _)) if t.is_negative() => return Err(ModulusError::NotIncreasing(0)),
            _ => breakpoints.insert(0, (S::zero(), S::zero())),
        }
        let mut prev_slope: Option<S> = None;
        for i in 1..breakpoints.len() {
            let (t0, v0) = &breakpoints[i - 1];
            let (t1, v1) = &breakpoints[i];
            if t1 <= t0 {
                return Err(ModulusError::NotIncreasing(i));
            }
            let slope = (v1.clone() - v0.clone()) / (t1.clone() - t0.clone());
            if slope.is_negative() {
                return Err(ModulusError::Decreasing(i - 1));
            }
            if let Some(p) = &prev_slope {
                if !S::le_tol(&slope, p) {
                    return Err(ModulusError::NotConcave(i - 1));
                }
            }
            prev_slope = Some(slope);
        }
        if tail_slope.is_negative() {
            return Err(ModulusError::Decreasing(breakpoints.len() - 1));
        }
        if let Some(p) = &prev_slope {
            if !S::le_tol(&tail_slope, p) {
                return Err(ModulusError::NotConcave(breakpoints.len() - 1));
            }
        }
        Ok(ContinuityModulus {
            breakpoints,
            tail_slope,
        })
    }

    /// `φ(t) = slope · t`.
    pub fn linear(slope: S) -> Result<Self, ModulusError> {
        Self::new(vec![], slope)
    }

    pub fn identity() -> Self {
        Self::linear(S::one()).expect("identity is a modulus")
    }

    pub fn breakpoints(&self) -> &[(S, S)] {
        &self.breakpoints
    }

    pub fn tail_slope(&self) -> &S {
        &self.tail_slope
    }

    /// Slopes of consecutive segments, tail last.
    pub fn slopes(&self) -> Vec<S> {
        let mut out: Vec<S> = self
            .breakpoints
            .windows(2)
            .map(|w| (w[1].1.clone() - w[0].1.clone()) / (w[1].0.clone() - w[0].0.clone()))
            .collect();
        out.push(self.tail_slope.clone());
        out
    }

    /// Right derivative at zero, i.e. `lim_{t→0+} φ(t)/t`.
    pub fn initial_slope(&self) -> S {
        self.slopes().swap_remove(0)
    }

    /// Linear interpolation between breakpoints, tail extension beyond.
    pub fn eval(&self, t: &S) -> Result<S, ModulusError> {
        if t.is_negative() {
            return Err(ModulusError::NegativeArgument);
        }
        let idx = self.breakpoints.partition_point(|(bt, _)| bt <= t);
        // idx >= 1 because the first breakpoint is (0, 0) and t >= 0
        let (t0, v0) = &self.breakpoints[idx - 1];
        let slope = if idx < self.breakpoints.len() {
            let (t1, v1) = &self.breakpoints[idx];
            (v1.clone() - v0.clone()) / (t1.clone() - t0.clone())
        } else {
            self.tail_slope.clone()
        };
        Ok(v0.clone() + slope * (t.clone() - t0.clone()))
    }

    /// `sup φ(t)/t` over `[lo, hi]`, or over `(0, hi]` when `lo = 0`.
    ///
    /// On each linear piece `φ(t)/t` is monotone, so only piece endpoints
    /// matter; the left end `0` contributes the initial slope as a limit.
    pub fn sup_ratio(&self, lo: &S, hi: &S) -> S {
        let mut best = if lo.is_zero() {
            self.initial_slope()
        } else {
            self.ratio_at(lo)
        };
        best = max_of(&best, &self.ratio_at(hi));
        for (t, _) in &self.breakpoints {
            if t > lo && t < hi {
                best = max_of(&best, &self.ratio_at(t));
            }
        }
        best
    }

    fn ratio_at(&self, t: &S) -> S {
        self.eval(t).expect("t > 0") / t.clone()
    }

    /// `φ(t) < t` at every listed positive distance.
    pub fn strictly_below_identity(&self, distances: &[S]) -> bool {
        distances
            .iter()
            .filter(|t| t.is_positive())
            .all(|t| self.eval(t).map(|v| v < *t).unwrap_or(false))
    }
}

impl<S: Scalar> Gauge<S> for ContinuityModulus<S> {
    fn gauge(&self, t: &S) -> S {
        self.eval(t).expect("distances are nonnegative")
    }
}

/// Finite-scale contraction verdicts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub banach: bool,
    pub rakotch: bool,
    pub matkowski: bool,
    /// Raw grid verdict before the implication chain was applied.
    pub rakotch_grid: bool,
    /// Raw iterate verdict before the implication chain was applied.
    pub matkowski_iterates: bool,
    /// Iterations used by the Matkowski check.
    pub iterations: usize,
}

/// Classifies `φ` on `(0, d_max]`.
///
/// * Banach: `sup_{(0, d_max]} φ(t)/t < 1` (exact).
/// * Rakotch: `sup_{[δ, d_max]} φ(t)/t < 1` for every `δ` in the grid.
/// * Matkowski: `φ^n(d_max) < 1e-9·d_max` within `10^4` iterations,
///   evaluated in `f64`.
///
/// The output always satisfies banach ⇒ rakotch ⇒ matkowski. An exact
/// Banach verdict certifies Matkowski even when the iterate cap is hit;
/// a failed Matkowski check vetoes a grid-only Rakotch verdict.
pub fn classify_modulus<S: Scalar>(
    phi: &ContinuityModulus<S>,
    d_max: &S,
    delta_grid: &[S],
) -> Result<Classification, ModulusError> {
    if !d_max.is_positive() {
        return Err(ModulusError::NonPositiveScale);
    }
    if delta_grid.is_empty() {
        return Err(ModulusError::EmptyGrid);
    }
    if let Some(bad) = delta_grid.iter().find(|d| !d.is_positive() || *d > d_max) {
        return Err(ModulusError::GridOutOfRange(bad.to_literal()));
    }
    let one = S::one();
    let banach = phi.sup_ratio(&S::zero(), d_max) < one;
    let rakotch_grid = delta_grid
        .iter()
        .all(|delta| phi.sup_ratio(delta, d_max) < one);

    // Iterated in f64: exact iterates approaching a positive fixed point
    // grow unbounded denominators.
    let knots: Vec<(f64, f64)> = phi
        .breakpoints
        .iter()
        .map(|(t, v)| (t.to_f64_lossy(), v.to_f64_lossy()))
        .collect();
    let tail = phi.tail_slope.to_f64_lossy();
    let eval = |t: f64| {
        let idx = knots.partition_point(|(bt, _)| *bt <= t).max(1);
        let (t0, v0) = knots[idx - 1];
        let slope = match knots.get(idx) {
            Some(&(t1, v1)) => (v1 - v0) / (t1 - t0),
            None => tail,
        };
        v0 + slope * (t - t0)
    };
    let eps = d_max.to_f64_lossy() * MATKOWSKI_REL_EPS;
    let mut t = d_max.to_f64_lossy();
    let mut iterations = 0;
    let mut matkowski_iterates = false;
    while iterations < MATKOWSKI_MAX_ITER {
        if t < eps {
            matkowski_iterates = true;
            break;
        }
        let next = eval(t);
        iterations += 1;
        if next >= t {
            // positive fixed point or growth: iterates never vanish
            break;
        }
        t = next;
    }
    if !matkowski_iterates && t < eps {
        matkowski_iterates = true;
    }

    let matkowski = matkowski_iterates || banach;
    let rakotch = banach || (rakotch_grid && matkowski);
    Ok(Classification {
        banach,
        rakotch,
        matkowski,
        rakotch_grid,
        matkowski_iterates,
        iterations,
    })
}

/// Outcome of a pairwise scan: `None` when the bound holds everywhere,
/// otherwise the first violating pair in scan order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairVerdict<P> {
    pub witness: Option<(P, P)>,
}

impl<P> PairVerdict<P> {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

fn images<M, F>(space: &M, domain: &[M::Point], f: &F) -> Result<Vec<M::Point>, MetricError>
where
    M: MetricSpace,
    F: PointMap<M::Point> + ?Sized,
{
    crate::metric::image_points(space, f, domain)
}

/// `d(f x, f x') ≤ bound(d(x, x'))` for all pairs of `domain`.
pub fn check_phi_contracting<M, F, G>(
    space: &M,
    domain: &[M::Point],
    f: &F,
    bound: &G,
) -> Result<PairVerdict<M::Point>, MetricError>
where
    M: MetricSpace,
    F: PointMap<M::Point> + ?Sized,
    G: Gauge<M::Scalar> + ?Sized,
{
    check_modulus_between(space, space, domain, f, bound)
}

/// Same as [`check_phi_contracting`] for a map between two spaces.
pub fn check_modulus_between<A, B, F, G>(
    source: &A,
    target: &B,
    domain: &[A::Point],
    f: &F,
    bound: &G,
) -> Result<PairVerdict<A::Point>, MetricError>
where
    A: MetricSpace,
    B: MetricSpace<Scalar = A::Scalar>,
    F: PointMap<A::Point, B::Point> + ?Sized,
    G: Gauge<A::Scalar> + ?Sized,
{
    let imgs = domain
        .iter()
        .map(|x| match f.image(x) {
            Some(y) if target.contains(&y) => Ok(y),
            Some(y) => Err(MetricError::MixedAmbient(target.describe(&y))),
            None => Err(MetricError::DomainMiss(source.describe(x))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    for i in 0..domain.len() {
        for j in i + 1..domain.len() {
            let lhs = target.distance(&imgs[i], &imgs[j]);
            let rhs = bound.gauge(&source.distance(&domain[i], &domain[j]));
            if !A::Scalar::le_tol(&lhs, &rhs) {
                return Ok(PairVerdict {
                    witness: Some((domain[i].clone(), domain[j].clone())),
                });
            }
        }
    }
    Ok(PairVerdict { witness: None })
}

/// Strict contraction `d(f x, f x') < d(x, x')` on distinct pairs.
pub fn check_edelstein<M, F>(
    space: &M,
    domain: &[M::Point],
    f: &F,
) -> Result<PairVerdict<M::Point>, MetricError>
where
    M: MetricSpace,
    F: PointMap<M::Point> + ?Sized,
{
    let imgs = images(space, domain, f)?;
    for i in 0..domain.len() {
        for j in i + 1..domain.len() {
            if space.coincide(&domain[i], &domain[j]) {
                continue;
            }
            let lhs = space.distance(&imgs[i], &imgs[j]);
            let rhs = space.distance(&domain[i], &domain[j]);
            if lhs >= rhs {
                return Ok(PairVerdict {
                    witness: Some((domain[i].clone(), domain[j].clone())),
                });
            }
        }
    }
    Ok(PairVerdict { witness: None })
}

/// Oscillation `ω_f(δ) = max{d(f x, f x') : d(x, x') ≤ δ}` sampled at the
/// realized distances of the domain, starting with `(0, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillationProfile<S> {
    steps: Vec<(S, S)>,
}

impl<S: Scalar> OscillationProfile<S> {
    pub fn steps(&self) -> &[(S, S)] {
        &self.steps
    }

    /// Step-function value at `t`: ω at the largest realized `δ ≤ t`.
    pub fn at(&self, t: &S) -> S {
        let idx = self.steps.partition_point(|(d, _)| d <= t);
        if idx == 0 {
            S::zero()
        } else {
            self.steps[idx - 1].1.clone()
        }
    }

    /// Whether `ω ≤ φ` at every realized distance.
    pub fn bounded_by(&self, phi: &ContinuityModulus<S>) -> bool {
        self.steps.iter().all(|(d, w)| S::le_tol(w, &phi.gauge(d)))
    }
}

impl<S: Scalar> Gauge<S> for OscillationProfile<S> {
    fn gauge(&self, t: &S) -> S {
        self.at(t)
    }
}

pub fn empirical_oscillation<M, F>(
    space: &M,
    domain: &[M::Point],
    f: &F,
) -> Result<OscillationProfile<M::Scalar>, MetricError>
where
    M: MetricSpace,
    F: PointMap<M::Point> + ?Sized,
{
    let imgs = images(space, domain, f)?;
    let mut pairs: Vec<(M::Scalar, M::Scalar)> = Vec::new();
    for i in 0..domain.len() {
        for j in i + 1..domain.len() {
            pairs.push((
                space.distance(&domain[i], &domain[j]),
                space.distance(&imgs[i], &imgs[j]),
            ));
        }
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("comparable distances"));
    let mut steps: Vec<(M::Scalar, M::Scalar)> = vec![(M::Scalar::zero(), M::Scalar::zero())];
    for (d, img) in pairs {
        let running = max_of(&steps.last().expect("non-empty").1, &img);
        match steps.last_mut() {
            Some(last) if last.0 == d => last.1 = running,
            _ => steps.push((d, running)),
        }
    }
    Ok(OscillationProfile { steps })
}
