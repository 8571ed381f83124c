//! Finitely supported probability measures and the Wasserstein-1 lift.
//!
//! Distances between measures are solved exactly by a transportation
//! simplex, so strict inequalities between transport costs can be asserted
//! without float noise in rational mode.

mod simplex;

use std::fmt::Debug;

use num_traits::{FromPrimitive, One, Zero};
use rand::seq::index::sample;
use rand::Rng as _;
use thiserror::Error;

use crate::maps::PointMap;
use crate::metric::{image_points, MetricError, MetricSpace};
use crate::moduli::{check_phi_contracting, ContinuityModulus, Gauge};
use crate::rng;
use crate::scalar::{max_of, min_of, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeasureError {
    #[error("EmptySupport")]
    EmptySupport,
    #[error("WeightCount: {support} support points but {weights} weights")]
    WeightCount { support: usize, weights: usize },
    #[error("NonPositiveWeight({0})")]
    NonPositiveWeight(usize),
    #[error("MassNotOne: weights sum to {0}")]
    MassNotOne(String),
    #[error("DuplicateSupport({0})")]
    DuplicateSupport(String),
    #[error("PlanShape: plan is {rows}x{cols}, measures need {want_rows}x{want_cols}")]
    PlanShape {
        rows: usize,
        cols: usize,
        want_rows: usize,
        want_cols: usize,
    },
    #[error("NotContractingInput: {0}")]
    NotContractingInput(String),
    #[error("InvalidTrials: n_trials must be at least 1")]
    InvalidTrials,
    #[error("DomainTooSmall: random measures need at least two points")]
    DomainTooSmall,
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Probability measure with finite support.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure<P, S> {
    support: Vec<P>,
    weights: Vec<S>,
}

impl<P: Clone + Debug + PartialEq, S: Scalar> DiscreteMeasure<P, S> {
    pub fn new<M>(space: &M, support: Vec<P>, weights: Vec<S>) -> Result<Self, MeasureError>
    where
        M: MetricSpace<Point = P, Scalar = S>,
    {
        if support.is_empty() {
            return Err(MeasureError::EmptySupport);
        }
        if support.len() != weights.len() {
            return Err(MeasureError::WeightCount {
                support: support.len(),
                weights: weights.len(),
            });
        }
        if let Some(p) = support.iter().find(|p| !space.contains(p)) {
            return Err(MetricError::MixedAmbient(space.describe(p)).into());
        }
        if let Some(i) = weights.iter().position(|w| !w.is_positive()) {
            return Err(MeasureError::NonPositiveWeight(i));
        }
        let total = weights.iter().fold(S::zero(), |a, w| a + w.clone());
        if !unit_mass(&total) {
            return Err(MeasureError::MassNotOne(total.to_literal()));
        }
        for (i, p) in support.iter().enumerate() {
            if support[..i].iter().any(|q| space.coincide(p, q)) {
                return Err(MeasureError::DuplicateSupport(space.describe(p)));
            }
        }
        Ok(DiscreteMeasure { support, weights })
    }

    /// Equal weights on the given distinct points.
    pub fn uniform<M>(space: &M, support: Vec<P>) -> Result<Self, MeasureError>
    where
        M: MetricSpace<Point = P, Scalar = S>,
    {
        let n = S::from_usize(support.len()).ok_or(MeasureError::EmptySupport)?;
        let w = if n.is_zero() { S::zero() } else { S::one() / n };
        let weights = vec![w; support.len()];
        DiscreteMeasure::new(space, support, weights)
    }
}

impl<P, S> DiscreteMeasure<P, S> {
    pub fn support(&self) -> &[P] {
        &self.support
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }
}

impl<P: PartialEq, S: Scalar> DiscreteMeasure<P, S> {
    /// Mass at `p`, zero off the support.
    pub fn mass_at(&self, p: &P) -> S {
        self.support
            .iter()
            .position(|q| q == p)
            .map(|i| self.weights[i].clone())
            .unwrap_or_else(S::zero)
    }

    /// Same measure regardless of support order.
    pub fn same_measure(&self, other: &Self) -> bool {
        self.len() == other.len()
            && self
                .support
                .iter()
                .zip(&self.weights)
                .all(|(p, w)| other.mass_at(p) == *w)
    }
}

fn unit_mass<S: Scalar>(total: &S) -> bool {
    if S::EXACT {
        total.is_one()
    } else {
        S::le_tol(total, &S::one()) && S::le_tol(&S::one(), total)
    }
}

/// `δ_x`.
pub fn dirac<P, S: Scalar>(x: P) -> DiscreteMeasure<P, S> {
    DiscreteMeasure {
        support: vec![x],
        weights: vec![S::one()],
    }
}

/// Merges weights of support points with the same image, in order of
/// first occurrence.
fn merge<M: MetricSpace>(
    space: &M,
    points: Vec<M::Point>,
    weights: &[M::Scalar],
) -> (Vec<M::Point>, Vec<M::Scalar>, Vec<usize>) {
    let mut support: Vec<M::Point> = Vec::new();
    let mut merged: Vec<M::Scalar> = Vec::new();
    let mut slot = Vec::with_capacity(points.len());
    for (p, w) in points.into_iter().zip(weights) {
        match support.iter().position(|q| space.coincide(q, &p)) {
            Some(k) => {
                merged[k] = merged[k].clone() + w.clone();
                slot.push(k);
            }
            None => {
                slot.push(support.len());
                support.push(p);
                merged.push(w.clone());
            }
        }
    }
    (support, merged, slot)
}

/// `Pf(μ)(B) = μ(f⁻¹(B))`.
pub fn pushforward<M, F>(
    space: &M,
    f: &F,
    mu: &DiscreteMeasure<M::Point, M::Scalar>,
) -> Result<DiscreteMeasure<M::Point, M::Scalar>, MeasureError>
where
    M: MetricSpace,
    F: PointMap<M::Point> + ?Sized,
{
    let images = image_points(space, f, mu.support())?;
    let (support, weights, _) = merge(space, images, mu.weights());
    Ok(DiscreteMeasure { support, weights })
}

/// Coupling of two measures as a dense row-major matrix; rows follow the
/// support of the first marginal, columns that of the second.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan<S> {
    rows: usize,
    cols: usize,
    mass: Vec<S>,
}

impl<S: Scalar> TransportPlan<S> {
    pub fn from_matrix(matrix: Vec<Vec<S>>) -> Self {
        let rows = matrix.len();
        let cols = matrix.first().map_or(0, Vec::len);
        TransportPlan {
            rows,
            cols,
            mass: matrix.into_iter().flatten().collect(),
        }
    }

    /// The product coupling `μ ⊗ η`.
    pub fn product<P>(mu: &DiscreteMeasure<P, S>, eta: &DiscreteMeasure<P, S>) -> Self {
        let mass = mu
            .weights
            .iter()
            .flat_map(|a| eta.weights.iter().map(move |b| a.clone() * b.clone()))
            .collect();
        TransportPlan {
            rows: mu.len(),
            cols: eta.len(),
            mass,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.mass[i * self.cols + j]
    }

    pub fn matrix(&self) -> Vec<Vec<S>> {
        if self.cols == 0 {
            return vec![Vec::new(); self.rows];
        }
        self.mass.chunks(self.cols).map(<[S]>::to_vec).collect()
    }

    /// `π_1 λ`.
    pub fn row_marginal(&self) -> Vec<S> {
        (0..self.rows)
            .map(|i| (0..self.cols).fold(S::zero(), |a, j| a + self.get(i, j).clone()))
            .collect()
    }

    /// `π_2 λ`.
    pub fn col_marginal(&self) -> Vec<S> {
        (0..self.cols)
            .map(|j| (0..self.rows).fold(S::zero(), |a, i| a + self.get(i, j).clone()))
            .collect()
    }

    pub fn total_mass(&self) -> S {
        self.mass.iter().fold(S::zero(), |a, m| a + m.clone())
    }

    /// Whether this plan couples `mu` and `eta` (exact in rational mode).
    pub fn couples<P>(&self, mu: &DiscreteMeasure<P, S>, eta: &DiscreteMeasure<P, S>) -> bool {
        let close = |a: &[S], b: &[S]| {
            a.len() == b.len()
                && a.iter().zip(b).all(|(x, y)| {
                    if S::EXACT {
                        x == y
                    } else {
                        S::le_tol(x, y) && S::le_tol(y, x)
                    }
                })
        };
        self.mass.iter().all(|m| !m.is_negative())
            && close(&self.row_marginal(), mu.weights())
            && close(&self.col_marginal(), eta.weights())
    }

    /// `∫ g(x, x') dλ` for a cost on support index pairs.
    pub fn integrate(&self, mut g: impl FnMut(usize, usize) -> S) -> S {
        let mut total = S::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let m = self.get(i, j);
                if !m.is_zero() {
                    total = total + m.clone() * g(i, j);
                }
            }
        }
        total
    }

    /// `∫ d dλ` for the given marginals.
    pub fn cost<M>(
        &self,
        space: &M,
        mu: &DiscreteMeasure<M::Point, S>,
        eta: &DiscreteMeasure<M::Point, S>,
    ) -> S
    where
        M: MetricSpace<Scalar = S>,
    {
        self.integrate(|i, j| space.distance(&mu.support[i], &eta.support[j]))
    }
}

fn check_support<M: MetricSpace>(
    space: &M,
    mu: &DiscreteMeasure<M::Point, M::Scalar>,
) -> Result<(), MetricError> {
    match mu.support().iter().find(|p| !space.contains(p)) {
        Some(p) => Err(MetricError::MixedAmbient(space.describe(p))),
        None => Ok(()),
    }
}

/// Exact `W_1(μ, η)` and one optimal coupling.
pub fn wasserstein1<M: MetricSpace>(
    space: &M,
    mu: &DiscreteMeasure<M::Point, M::Scalar>,
    eta: &DiscreteMeasure<M::Point, M::Scalar>,
) -> Result<(M::Scalar, TransportPlan<M::Scalar>), MeasureError> {
    check_support(space, mu)?;
    check_support(space, eta)?;
    let cost: Vec<M::Scalar> = mu
        .support()
        .iter()
        .flat_map(|a| eta.support().iter().map(move |b| space.distance(a, b)))
        .collect();
    let sol = simplex::solve(mu.weights(), eta.weights(), &cost);
    let plan = TransportPlan {
        rows: mu.len(),
        cols: eta.len(),
        mass: sol.flow,
    };
    Ok((sol.cost, plan))
}

/// `(f × f)_* λ`, indexed by the supports of `Pf(μ)` and `Pf(η)`.
pub fn coupling_pushforward<M, F>(
    space: &M,
    f: &F,
    mu: &DiscreteMeasure<M::Point, M::Scalar>,
    eta: &DiscreteMeasure<M::Point, M::Scalar>,
    plan: &TransportPlan<M::Scalar>,
) -> Result<TransportPlan<M::Scalar>, MeasureError>
where
    M: MetricSpace,
    F: PointMap<M::Point> + ?Sized,
{
    if plan.rows != mu.len() || plan.cols != eta.len() {
        return Err(MeasureError::PlanShape {
            rows: plan.rows,
            cols: plan.cols,
            want_rows: mu.len(),
            want_cols: eta.len(),
        });
    }
    let (rows, _, row_slot) = merge(space, image_points(space, f, mu.support())?, mu.weights());
    let (cols, _, col_slot) = merge(space, image_points(space, f, eta.support())?, eta.weights());
    let mut mass = vec![M::Scalar::zero(); rows.len() * cols.len()];
    for i in 0..plan.rows {
        for j in 0..plan.cols {
            let cell = row_slot[i] * cols.len() + col_slot[j];
            mass[cell] = mass[cell].clone() + plan.get(i, j).clone();
        }
    }
    Ok(TransportPlan {
        rows: rows.len(),
        cols: cols.len(),
        mass,
    })
}

/// Seeded random measure: 2 to 6 distinct support points of `domain` and
/// weights cut from `[0, 1]` at sorted distinct multiples of `1/1000`.
pub fn random_measure<M: MetricSpace>(
    space: &M,
    domain: &[M::Point],
    rng: &mut rng::Rng,
) -> Result<DiscreteMeasure<M::Point, M::Scalar>, MeasureError> {
    let domain = space.dedup(domain.to_vec());
    if domain.len() < 2 {
        return Err(MeasureError::DomainTooSmall);
    }
    let k = rng.gen_range(2..=domain.len().min(6));
    let support: Vec<M::Point> = sample(rng, domain.len(), k)
        .iter()
        .map(|i| domain[i].clone())
        .collect();
    let mut cuts: Vec<usize> = sample(rng, 999, k - 1).iter().map(|c| c + 1).collect();
    cuts.sort_unstable();
    let denom = M::Scalar::from_u32(1000).expect("small integer");
    let mut prev = 0;
    let mut weights = Vec::with_capacity(k);
    for c in cuts.into_iter().chain(std::iter::once(1000)) {
        weights.push(M::Scalar::from_usize(c - prev).expect("small integer") / denom.clone());
        prev = c;
    }
    DiscreteMeasure::new(space, support, weights)
}

/// Per-trial record of the contraction transfer to measures.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftTrial<S> {
    /// `W_1(μ, η)`.
    pub before: S,
    /// `W_1(Pfμ, Pfη)`.
    pub after: S,
    /// `∫ d(f x, f x') dλ*` for the optimal `λ*` of `(μ, η)`.
    pub image_cost: S,
    /// `∫ φ(d(x, x')) dλ*`.
    pub phi_cost: S,
    /// `λ*(X_δ)` with `δ` the smallest positive distance in the domain.
    pub x_delta_mass: S,
    pub strict: bool,
    /// `after ≤ image_cost ≤ phi_cost`.
    pub chain_holds: bool,
    /// `(f × f)_* λ*` has marginals `Pfμ` and `Pfη`.
    pub marginals_exact: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftReport<S> {
    pub trials: Vec<LiftTrial<S>>,
    pub strict_fraction: f64,
    /// Largest `after / before`.
    pub max_ratio: S,
    /// Smallest `before - image_cost`.
    pub coupling_gap_min: S,
}

/// Draws `n_trials` seeded pairs of distinct random measures on `domain`
/// and records how `Pf` moves their Wasserstein distance.
///
/// With `enforce_precondition`, `f` must satisfy `φ` on `domain` and `φ`
/// must lie strictly below the identity at every realized distance.
pub fn verify_measure_contraction<M, F>(
    space: &M,
    domain: &[M::Point],
    f: &F,
    phi: &ContinuityModulus<M::Scalar>,
    n_trials: usize,
    seed: u64,
    enforce_precondition: bool,
) -> Result<LiftReport<M::Scalar>, MeasureError>
where
    M: MetricSpace,
    F: PointMap<M::Point> + ?Sized,
{
    if n_trials == 0 {
        return Err(MeasureError::InvalidTrials);
    }
    let domain = space.dedup(domain.to_vec());
    if domain.len() < 2 {
        return Err(MeasureError::DomainTooSmall);
    }
    let mut distances = Vec::new();
    for i in 0..domain.len() {
        for j in i + 1..domain.len() {
            distances.push(space.distance(&domain[i], &domain[j]));
        }
    }
    let delta = distances
        .iter()
        .skip(1)
        .fold(distances[0].clone(), |m, d| min_of(&m, d));
    if enforce_precondition {
        let verdict = check_phi_contracting(space, &domain, f, phi)?;
        if let Some((a, b)) = verdict.witness {
            return Err(MeasureError::NotContractingInput(format!(
                "modulus fails on ({}, {})",
                space.describe(&a),
                space.describe(&b)
            )));
        }
        if !phi.strictly_below_identity(&distances) {
            return Err(MeasureError::NotContractingInput(
                "modulus is not strictly below the identity".into(),
            ));
        }
    }
    let mut trials = Vec::with_capacity(n_trials);
    for t in 0..n_trials {
        let mut rng = rng::split(seed, t as u64);
        let mu = random_measure(space, &domain, &mut rng)?;
        let mut eta = random_measure(space, &domain, &mut rng)?;
        while eta.same_measure(&mu) {
            eta = random_measure(space, &domain, &mut rng)?;
        }
        trials.push(lift_trial(space, f, phi, &mu, &eta, &delta)?);
    }
    let strict = trials.iter().filter(|t| t.strict).count();
    let max_ratio = trials
        .iter()
        .map(|t| t.after.clone() / t.before.clone())
        .fold(M::Scalar::zero(), |m, r| max_of(&m, &r));
    let coupling_gap_min = trials
        .iter()
        .map(|t| t.before.clone() - t.image_cost.clone())
        .reduce(|m, g| min_of(&m, &g))
        .expect("at least one trial");
    Ok(LiftReport {
        strict_fraction: strict as f64 / n_trials as f64,
        trials,
        max_ratio,
        coupling_gap_min,
    })
}

fn lift_trial<M, F>(
    space: &M,
    f: &F,
    phi: &ContinuityModulus<M::Scalar>,
    mu: &DiscreteMeasure<M::Point, M::Scalar>,
    eta: &DiscreteMeasure<M::Point, M::Scalar>,
    delta: &M::Scalar,
) -> Result<LiftTrial<M::Scalar>, MeasureError>
where
    M: MetricSpace,
    F: PointMap<M::Point> + ?Sized,
{
    let (before, plan) = wasserstein1(space, mu, eta)?;
    let f_mu = pushforward(space, f, mu)?;
    let f_eta = pushforward(space, f, eta)?;
    let (after, _) = wasserstein1(space, &f_mu, &f_eta)?;
    let img_mu = image_points(space, f, mu.support())?;
    let img_eta = image_points(space, f, eta.support())?;
    let image_cost = plan.integrate(|i, j| space.distance(&img_mu[i], &img_eta[j]));
    let phi_cost =
        plan.integrate(|i, j| phi.gauge(&space.distance(&mu.support()[i], &eta.support()[j])));
    let x_delta_mass = plan.integrate(|i, j| {
        if space.distance(&mu.support()[i], &eta.support()[j]) >= *delta {
            M::Scalar::one()
        } else {
            M::Scalar::zero()
        }
    });
    let lifted = coupling_pushforward(space, f, mu, eta, &plan)?;
    let le = M::Scalar::le_tol;
    Ok(LiftTrial {
        strict: after < before,
        chain_holds: le(&after, &image_cost) && le(&image_cost, &phi_cost),
        marginals_exact: lifted.couples(&f_mu, &f_eta),
        before,
        after,
        image_cost,
        phi_cost,
        x_delta_mass,
    })
}
