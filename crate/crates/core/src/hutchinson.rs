//! Function systems, the Hutchinson operator and its attractor.
//!
//! A system acts on compact sets by `K ↦ ⋃_f f(K)`. Iteration stops at the
//! first step whose successive Hausdorff distance is within tolerance; the
//! infinite address map is only represented through truncated codes and the
//! diameters of their code images.

use std::fmt::Debug;

use num_traits::{Signed, Zero};
use rand::seq::index::sample;
use rand::Rng as _;
use thiserror::Error;

use crate::maps::{Coords, PointMap};
use crate::metric::{hausdorff_distance, image_points, CompactSet, MetricError, MetricSpace};
use crate::moduli::{check_phi_contracting, ContinuityModulus};
use crate::rng;
use crate::scalar::{max_of, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HutchinsonError<S: Debug> {
    #[error("EmptySystem: a function system needs at least one map")]
    EmptySystem,
    #[error("ModulusClaim: map {map} breaks its modulus on ({a}, {b})")]
    ModulusClaim { map: usize, a: String, b: String },
    #[error("InvalidTolerance: tolerance must be positive")]
    InvalidTolerance,
    #[error("NonConvergence({max_iter})")]
    NonConvergence { max_iter: usize, history: Vec<S> },
    #[error("EmptyCode")]
    EmptyCode,
    #[error("CodeIndex({0}): no such map")]
    CodeIndex(usize),
    #[error("InvalidSteps: n_steps must exceed burn_in")]
    InvalidSteps,
    #[error("EmptyCloud")]
    EmptyCloud,
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Finite family of self-maps sharing one ambient space.
#[derive(Debug, Clone, PartialEq)]
pub struct IfSystem<F> {
    maps: Vec<F>,
}

impl<F> IfSystem<F> {
    pub fn new<S: Debug>(maps: Vec<F>) -> Result<Self, HutchinsonError<S>> {
        if maps.is_empty() {
            return Err(HutchinsonError::EmptySystem);
        }
        Ok(IfSystem { maps })
    }

    pub fn maps(&self) -> &[F] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// Checks a per-map modulus claim on `domain`.
    pub fn verify_moduli<M>(
        &self,
        space: &M,
        domain: &[M::Point],
        moduli: &[ContinuityModulus<M::Scalar>],
    ) -> Result<(), HutchinsonError<M::Scalar>>
    where
        M: MetricSpace,
        F: PointMap<M::Point>,
    {
        for (i, (f, phi)) in self.maps.iter().zip(moduli).enumerate() {
            let verdict = check_phi_contracting(space, domain, f, phi)?;
            if let Some((a, b)) = verdict.witness {
                return Err(HutchinsonError::ModulusClaim {
                    map: i,
                    a: space.describe(&a),
                    b: space.describe(&b),
                });
            }
        }
        Ok(())
    }
}

/// Common Lipschitz bound `max_i sup φ_i(t)/t` over `(0, d_max]`.
pub fn lipschitz_bound<S: Scalar>(moduli: &[ContinuityModulus<S>], d_max: &S) -> S {
    moduli
        .iter()
        .map(|phi| phi.sup_ratio(&S::zero(), d_max))
        .fold(S::zero(), |m, l| max_of(&m, &l))
}

/// `F(K) = ⋃_f f(K)`, deduplicated, in map-major order.
pub fn hutchinson_image<M, F>(
    space: &M,
    system: &IfSystem<F>,
    set: &CompactSet<M::Point>,
) -> Result<CompactSet<M::Point>, MetricError>
where
    M: MetricSpace,
    F: PointMap<M::Point>,
{
    let mut all = Vec::with_capacity(set.len() * system.len());
    for f in system.maps() {
        all.extend(image_points(space, f, set.members())?);
    }
    Ok(CompactSet::from_unique(space.dedup(all)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttractorRun<P, S> {
    /// The last iterate computed, `K_{n+1}` for the halting step `n`.
    pub set: CompactSet<P>,
    /// `d_H(K_k, K_{k+1})` for every step taken.
    pub history: Vec<S>,
}

impl<P, S> AttractorRun<P, S> {
    pub fn steps(&self) -> usize {
        self.history.len()
    }
}

/// Iterates the Hutchinson operator from `start` until
/// `d_H(K_n, K_{n+1}) ≤ tol`, returning `K_{n+1}` and the step history.
pub fn iterate_to_attractor<M, F>(
    space: &M,
    system: &IfSystem<F>,
    start: &CompactSet<M::Point>,
    tol: &M::Scalar,
    max_iter: usize,
) -> Result<AttractorRun<M::Point, M::Scalar>, HutchinsonError<M::Scalar>>
where
    M: MetricSpace,
    F: PointMap<M::Point>,
{
    if !tol.is_positive() {
        return Err(HutchinsonError::InvalidTolerance);
    }
    let mut current = start.clone();
    let mut history = Vec::new();
    for _ in 0..max_iter {
        let next = hutchinson_image(space, system, &current)?;
        let step = hausdorff_distance(space, &current, &next)?;
        let done = step <= *tol;
        history.push(step);
        current = next;
        if done {
            return Ok(AttractorRun {
                set: current,
                history,
            });
        }
    }
    Err(HutchinsonError::NonConvergence { max_iter, history })
}

/// Truncated address: indices `f_0, f_1, ..., f_n` into a system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Code {
    word: Vec<usize>,
}

impl Code {
    pub fn new(word: Vec<usize>) -> Self {
        Code { word }
    }

    pub fn repeated(index: usize, len: usize) -> Self {
        Code {
            word: vec![index; len],
        }
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// The code with one more letter appended.
    pub fn extended(&self, index: usize) -> Code {
        let mut word = self.word.clone();
        word.push(index);
        Code { word }
    }

    fn check<F, S: Debug>(&self, system: &IfSystem<F>) -> Result<(), HutchinsonError<S>> {
        if self.word.is_empty() {
            return Err(HutchinsonError::EmptyCode);
        }
        match self.word.iter().find(|&&i| i >= system.len()) {
            Some(&i) => Err(HutchinsonError::CodeIndex(i)),
            None => Ok(()),
        }
    }
}

/// `f_0 ∘ … ∘ f_n (D)` as a set.
pub fn code_image<M, F>(
    space: &M,
    system: &IfSystem<F>,
    code: &Code,
    set: &CompactSet<M::Point>,
) -> Result<CompactSet<M::Point>, HutchinsonError<M::Scalar>>
where
    M: MetricSpace,
    F: PointMap<M::Point>,
{
    code.check(system)?;
    let mut points = set.members().to_vec();
    for &i in code.word().iter().rev() {
        points = space.dedup(image_points(space, &system.maps()[i], &points)?);
    }
    Ok(CompactSet::from_unique(points))
}

/// `f_0 ∘ … ∘ f_n (x_0)` for the first member `x_0` of `set`.
///
/// Moves by at most [`code_diameter`] when another representative of
/// `set` is used.
pub fn code_point<M, F>(
    space: &M,
    system: &IfSystem<F>,
    code: &Code,
    set: &CompactSet<M::Point>,
) -> Result<M::Point, HutchinsonError<M::Scalar>>
where
    M: MetricSpace,
    F: PointMap<M::Point>,
{
    code.check(system)?;
    let mut x = set.first().clone();
    for &i in code.word().iter().rev() {
        x = image_points(space, &system.maps()[i], std::slice::from_ref(&x))?
            .pop()
            .expect("one image per point");
    }
    Ok(x)
}

/// Diameter of `f_0 ∘ … ∘ f_n (D)`.
pub fn code_diameter<M, F>(
    space: &M,
    system: &IfSystem<F>,
    code: &Code,
    set: &CompactSet<M::Point>,
) -> Result<M::Scalar, HutchinsonError<M::Scalar>>
where
    M: MetricSpace,
    F: PointMap<M::Point>,
{
    Ok(code_image(space, system, code, set)?.diameter(space))
}

/// Orbit of `x0` under uniformly random map choices; the points after the
/// first `burn_in` steps are returned as a set.
pub fn chaos_game<M, F>(
    space: &M,
    system: &IfSystem<F>,
    x0: &M::Point,
    n_steps: usize,
    burn_in: usize,
    seed: u64,
) -> Result<CompactSet<M::Point>, HutchinsonError<M::Scalar>>
where
    M: MetricSpace,
    F: PointMap<M::Point>,
{
    if n_steps <= burn_in {
        return Err(HutchinsonError::InvalidSteps);
    }
    if !space.contains(x0) {
        return Err(MetricError::MixedAmbient(space.describe(x0)).into());
    }
    let mut rng = rng::seeded(seed);
    let mut x = x0.clone();
    let mut orbit = Vec::with_capacity(n_steps - burn_in);
    for step in 1..=n_steps {
        let f = &system.maps()[rng.gen_range(0..system.len())];
        x = f
            .image(&x)
            .ok_or_else(|| MetricError::DomainMiss(space.describe(&x)))?;
        if step > burn_in {
            orbit.push(x.clone());
        }
    }
    Ok(CompactSet::from_unique(space.dedup(orbit)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionReport<S> {
    /// Largest `d_H(F(A), F(B)) / d_H(A, B)`; zero when every pair was
    /// degenerate.
    pub max_ratio: S,
    pub ratios: Vec<S>,
    /// Pairs skipped because `A = B`.
    pub skipped: usize,
}

/// Samples `n_pairs` pairs of subsets (size 1 to 8) of `cloud` and reports
/// the largest Hausdorff contraction ratio of the Hutchinson operator.
pub fn hyperspace_contraction_report<M, F>(
    space: &M,
    system: &IfSystem<F>,
    cloud: &[M::Point],
    n_pairs: usize,
    seed: u64,
) -> Result<ContractionReport<M::Scalar>, HutchinsonError<M::Scalar>>
where
    M: MetricSpace,
    F: PointMap<M::Point>,
{
    if cloud.is_empty() {
        return Err(HutchinsonError::EmptyCloud);
    }
    let cloud = space.dedup(cloud.to_vec());
    let mut ratios = Vec::with_capacity(n_pairs);
    let mut skipped = 0;
    let mut max_ratio = M::Scalar::zero();
    for pair in 0..n_pairs {
        let mut rng = rng::split(seed, pair as u64);
        let mut draw = || {
            let size = rng.gen_range(1..=cloud.len().min(8));
            let picks = sample(&mut rng, cloud.len(), size);
            CompactSet::new(space, picks.iter().map(|i| cloud[i].clone()).collect())
        };
        let a = draw()?;
        let b = draw()?;
        let before = hausdorff_distance(space, &a, &b)?;
        if before.is_zero() {
            skipped += 1;
            continue;
        }
        let fa = hutchinson_image(space, system, &a)?;
        let fb = hutchinson_image(space, system, &b)?;
        let ratio = hausdorff_distance(space, &fa, &fb)? / before;
        max_ratio = max_of(&max_ratio, &ratio);
        ratios.push(ratio);
    }
    Ok(ContractionReport {
        max_ratio,
        ratios,
        skipped,
    })
}

/// `n` seeded points on the lattice `lo + (hi - lo)·k/1024` in `dim`
/// dimensions; exact in every scalar type.
pub fn lattice_cloud<S: Scalar>(dim: usize, n: usize, lo: &S, hi: &S, seed: u64) -> Vec<Coords<S>> {
    let mut rng = rng::seeded(seed);
    let denom = S::from_u32(1024).expect("small integer");
    (0..n)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    let k = S::from_u32(rng.gen_range(0..=1024)).expect("small integer");
                    lo.clone() + (hi.clone() - lo.clone()) * k / denom.clone()
                })
                .collect()
        })
        .collect()
}
