//! Katětov functions and one-point amalgamation.
//!
//! A map on a subset `B ⊂ A` with continuity modulus `φ` extends one point
//! at a time: the next point `a` is sent to a point `y` whose distances are
//! prescribed by
//!
//! ```text
//! k(z) = min_{b ∈ B} d(z, f b) + φ(d(b, a))
//! ```
//!
//! over the whole current ambient. When no such point exists it is
//! adjoined, so the ambient grows as a finite stand-in for the Urysohn
//! space.

use num_traits::Signed;
use rand::seq::index::sample;
use rand::Rng as _;
use thiserror::Error;

use crate::hutchinson::{hutchinson_image, IfSystem};
use crate::maps::{PointMap, TableMap};
use crate::metric::{CompactSet, FiniteMetricSpace, MetricError, MetricSpace};
use crate::moduli::{check_modulus_between, check_phi_contracting, ContinuityModulus, Gauge};
use crate::rng;
use crate::scalar::{min_of, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KatetovError {
    #[error("AlreadyAssigned({0})")]
    AlreadyAssigned(String),
    #[error("EmptyBase: the partial map has no assigned points")]
    EmptyBase,
    #[error("ModulusViolation({a}, {b})")]
    ModulusViolation { a: String, b: String },
    #[error("MapModulusViolation: map {map} on ({a}, {b})")]
    MapModulusViolation { map: usize, a: String, b: String },
    #[error("ValueCount: {values} values for {points} points")]
    ValueCount { values: usize, points: usize },
    #[error("NegativeValue({0})")]
    NegativeValue(String),
    #[error("NotKatetov({z}, {w}): {rule}")]
    NotKatetov {
        z: String,
        w: String,
        rule: &'static str,
    },
    #[error("ZeroDistance({0})")]
    ZeroDistance(String),
    #[error("InjectivityUnavailable: {0}")]
    InjectivityUnavailable(String),
    #[error("OrderMismatch: {0}")]
    OrderMismatch(String),
    #[error("NotSelfSimilar: F(X) differs from X")]
    NotSelfSimilar,
    #[error("NotIsometric({a}, {b})")]
    NotIsometric { a: String, b: String },
    #[error("SystemMismatch: {maps} maps but {moduli} moduli")]
    SystemMismatch { maps: usize, moduli: usize },
    #[error("AmbientBudgetExceeded({0})")]
    AmbientBudgetExceeded(usize),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Prescribed distances from a prospective new point to every point of a
/// finite space, indexed like the space.
#[derive(Debug, Clone, PartialEq)]
pub struct KatetovFunction<S> {
    values: Vec<S>,
}

impl<S: Scalar> KatetovFunction<S> {
    /// Checks `|k z − k z'| ≤ d(z, z') ≤ k z + k z'` for all pairs.
    pub fn new(space: &FiniteMetricSpace<S>, values: Vec<S>) -> Result<Self, KatetovError> {
        if values.len() != space.len() {
            return Err(KatetovError::ValueCount {
                values: values.len(),
                points: space.len(),
            });
        }
        if let Some(z) = values.iter().position(Signed::is_negative) {
            return Err(KatetovError::NegativeValue(space.label(z).into()));
        }
        for z in 0..values.len() {
            for w in z + 1..values.len() {
                let d = space.d(z, w);
                let gap = (values[z].clone() - values[w].clone()).abs();
                if !S::le_tol(&gap, d) {
                    return Err(KatetovError::NotKatetov {
                        z: space.label(z).into(),
                        w: space.label(w).into(),
                        rule: "|k(z) - k(w)| > d(z, w)",
                    });
                }
                if !S::le_tol(d, &(values[z].clone() + values[w].clone())) {
                    return Err(KatetovError::NotKatetov {
                        z: space.label(z).into(),
                        w: space.label(w).into(),
                        rule: "d(z, w) > k(z) + k(w)",
                    });
                }
            }
        }
        Ok(KatetovFunction { values })
    }

    /// `z ↦ min_s d(z, s) + k(s)` over anchor pairs `(s, k(s))`.
    ///
    /// This is the largest 1-Lipschitz extension, and a Katětov function
    /// whenever the anchors are consistent.
    pub fn min_extension(
        space: &FiniteMetricSpace<S>,
        anchors: &[(usize, S)],
    ) -> Result<Self, KatetovError> {
        if anchors.is_empty() {
            return Err(KatetovError::EmptyBase);
        }
        let values = (0..space.len())
            .map(|z| {
                anchors
                    .iter()
                    .map(|(s, v)| space.d(z, *s).clone() + v.clone())
                    .reduce(|a, b| min_of(&a, &b))
                    .expect("anchors are non-empty")
            })
            .collect();
        KatetovFunction::new(space, values)
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn at(&self, z: usize) -> &S {
        &self.values[z]
    }

    /// The point of `space` with `k(z) = 0`, if any.
    pub fn zero(&self) -> Option<usize> {
        self.values.iter().position(|v| *v <= S::dedup_epsilon())
    }
}

/// Adjoins a point realizing `k`; returns the new space and the index of
/// the realizing point.
///
/// With `allow_collapse`, a function vanishing at `z` is realized by `z`
/// itself and the space is returned unchanged.
pub fn realize_point<S: Scalar>(
    ambient: &FiniteMetricSpace<S>,
    k: &KatetovFunction<S>,
    label: &str,
    allow_collapse: bool,
) -> Result<(FiniteMetricSpace<S>, usize), KatetovError> {
    let k = KatetovFunction::new(ambient, k.values.clone())?;
    if let Some(z) = k.zero() {
        if allow_collapse {
            return Ok((ambient.clone(), z));
        }
        return Err(KatetovError::ZeroDistance(ambient.label(z).into()));
    }
    let grown = ambient.adjoin(label.into(), &k.values)?;
    let at = grown.len() - 1;
    Ok((grown, at))
}

/// The Katětov function of the next point `a`, given the current partial
/// map `assigned` from `domain` into `ambient`.
pub fn katetov_from_map<S: Scalar>(
    domain: &FiniteMetricSpace<S>,
    assigned: &TableMap,
    phi: &ContinuityModulus<S>,
    ambient: &FiniteMetricSpace<S>,
    a: usize,
) -> Result<KatetovFunction<S>, KatetovError> {
    if !domain.contains(&a) {
        return Err(MetricError::MixedAmbient(domain.describe(&a)).into());
    }
    if assigned.get(a).is_some() {
        return Err(KatetovError::AlreadyAssigned(domain.label(a).into()));
    }
    let base = assigned.domain();
    if base.is_empty() {
        return Err(KatetovError::EmptyBase);
    }
    let verdict = check_modulus_between(domain, ambient, &base, assigned, phi)?;
    if let Some((x, y)) = verdict.witness {
        return Err(KatetovError::ModulusViolation {
            a: domain.label(x).into(),
            b: domain.label(y).into(),
        });
    }
    let anchors = anchors_for(&base, assigned, |b| phi.gauge(domain.d(b, a)));
    KatetovFunction::min_extension(ambient, &anchors)
}

fn anchors_for<S>(
    base: &[usize],
    f: &TableMap,
    mut weight: impl FnMut(usize) -> S,
) -> Vec<(usize, S)> {
    base.iter()
        .map(|&b| (f.get(b).expect("base point is assigned"), weight(b)))
        .collect()
}

/// One step of an extension run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionStep<S> {
    /// Index of the map being extended (always 0 for a single map).
    pub map: usize,
    pub point: String,
    pub image: String,
    /// Katětov vector over the ambient before this step; empty when an
    /// existing point was reused.
    pub katetov: Vec<S>,
    pub reused: bool,
    pub ambient_size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extension<S> {
    pub ambient: FiniteMetricSpace<S>,
    /// Total map from the domain into `ambient`.
    pub map: TableMap,
    pub transcript: Vec<ExtensionStep<S>>,
}

/// Extends `f: B → ambient` to all of `domain` with `ω ≤ φ`, visiting the
/// points of `A ∖ B` in `order` (insertion order when `None`).
///
/// Entries of `order` already in `B` are skipped. Every step adjoins a
/// fresh point; with `injective` the extension is refused if `φ` vanishes
/// at a positive distance of `domain`, otherwise zero distances collapse
/// onto existing points.
pub fn extend_map<S: Scalar>(
    domain: &FiniteMetricSpace<S>,
    f: &TableMap,
    phi: &ContinuityModulus<S>,
    ambient: &FiniteMetricSpace<S>,
    order: Option<&[usize]>,
    injective: bool,
) -> Result<Extension<S>, KatetovError> {
    let n = domain.len();
    let mut map = TableMap::partial((0..n).map(|p| f.get(p)).collect());
    let base = map.domain();
    if base.is_empty() {
        return Err(KatetovError::EmptyBase);
    }
    if let Some(y) = base
        .iter()
        .filter_map(|&b| map.get(b))
        .find(|y| !ambient.contains(y))
    {
        return Err(MetricError::MixedAmbient(ambient.describe(&y)).into());
    }
    let verdict = check_modulus_between(domain, ambient, &base, &map, phi)?;
    if let Some((x, y)) = verdict.witness {
        return Err(KatetovError::ModulusViolation {
            a: domain.label(x).into(),
            b: domain.label(y).into(),
        });
    }
    if injective {
        if let Some(t) = domain
            .realized_distances()
            .into_iter()
            .find(|t| phi.gauge(t) <= S::dedup_epsilon())
        {
            return Err(KatetovError::InjectivityUnavailable(format!(
                "modulus vanishes at {}",
                t.to_literal()
            )));
        }
        for (i, &b) in base.iter().enumerate() {
            if base[..i].iter().any(|&c| map.get(c) == map.get(b)) {
                return Err(KatetovError::InjectivityUnavailable(format!(
                    "{} shares its image",
                    domain.label(b)
                )));
            }
        }
    }
    let order: Vec<usize> = match order {
        Some(o) => o.to_vec(),
        None => (0..n).filter(|p| map.get(*p).is_none()).collect(),
    };
    if let Some(&p) = order.iter().find(|&&p| p >= n) {
        return Err(KatetovError::OrderMismatch(format!(
            "#{p} is not a domain point"
        )));
    }
    if let Some(p) = (0..n).find(|p| map.get(*p).is_none() && !order.contains(p)) {
        return Err(KatetovError::OrderMismatch(format!(
            "{} is never visited",
            domain.label(p)
        )));
    }
    let mut ambient = ambient.clone();
    let mut transcript = Vec::new();
    for a in order {
        if map.get(a).is_some() {
            continue;
        }
        let assigned = map.domain();
        let anchors = anchors_for(&assigned, &map, |b| phi.gauge(domain.d(b, a)));
        let k = KatetovFunction::min_extension(&ambient, &anchors)?;
        let label = ambient.fresh_label("y");
        let (grown, y) = realize_point(&ambient, &k, &label, !injective)?;
        transcript.push(ExtensionStep {
            map: 0,
            point: domain.label(a).into(),
            image: grown.label(y).into(),
            katetov: k.values,
            reused: grown.len() == ambient.len(),
            ambient_size: grown.len(),
        });
        ambient = grown;
        map.set(a, y);
    }
    Ok(Extension {
        ambient,
        map,
        transcript,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemExtension<S> {
    pub ambient: FiniteMetricSpace<S>,
    /// Extended maps, total self-maps of `ambient`.
    pub system: IfSystem<TableMap>,
    /// Image of `X` inside `ambient`.
    pub embedded: CompactSet<usize>,
    pub transcript: Vec<ExtensionStep<S>>,
}

/// Extends every map of a self-similar system on `x` to the whole ambient.
///
/// `embedding[i]` is the ambient point standing for point `i` of `x` and
/// must be isometric. Unassigned ambient points are visited in `order`
/// (index order when `None`); for each map the first existing point that
/// keeps `ω ≤ φ` is reused, otherwise the Katětov point is adjoined and
/// queued for all maps. The ambient may not grow past `max_ambient`.
pub fn extend_system<S: Scalar>(
    x: &FiniteMetricSpace<S>,
    system: &IfSystem<TableMap>,
    moduli: &[ContinuityModulus<S>],
    ambient: &FiniteMetricSpace<S>,
    embedding: &[usize],
    order: Option<&[usize]>,
    max_ambient: usize,
) -> Result<SystemExtension<S>, KatetovError> {
    if moduli.len() != system.len() {
        return Err(KatetovError::SystemMismatch {
            maps: system.len(),
            moduli: moduli.len(),
        });
    }
    let points = x.points();
    for (i, (f, phi)) in system.maps().iter().zip(moduli).enumerate() {
        let verdict = check_phi_contracting(x, &points, f, phi)?;
        if let Some((a, b)) = verdict.witness {
            return Err(KatetovError::MapModulusViolation {
                map: i,
                a: x.label(a).into(),
                b: x.label(b).into(),
            });
        }
    }
    let whole = CompactSet::new(x, points.clone())?;
    let image = hutchinson_image(x, system, &whole).map_err(KatetovError::from)?;
    if !image.same_set(x, &whole) {
        return Err(KatetovError::NotSelfSimilar);
    }
    if embedding.len() != x.len() {
        return Err(KatetovError::ValueCount {
            values: embedding.len(),
            points: x.len(),
        });
    }
    if let Some(p) = embedding.iter().find(|p| !ambient.contains(p)) {
        return Err(MetricError::MixedAmbient(ambient.describe(p)).into());
    }
    for a in 0..x.len() {
        for b in a + 1..x.len() {
            if ambient.d(embedding[a], embedding[b]) != x.d(a, b) {
                return Err(KatetovError::NotIsometric {
                    a: x.label(a).into(),
                    b: x.label(b).into(),
                });
            }
        }
    }

    let mut ambient = ambient.clone();
    let mut maps: Vec<Vec<Option<usize>>> = system
        .maps()
        .iter()
        .map(|f| {
            let mut images = vec![None; ambient.len()];
            for (p, &e) in embedding.iter().enumerate() {
                images[e] = Some(embedding[f.get(p).expect("self-similar maps are total")]);
            }
            images
        })
        .collect();
    let mut queue: std::collections::VecDeque<usize> = match order {
        Some(o) => {
            if let Some(&p) = o.iter().find(|&&p| p >= ambient.len()) {
                return Err(KatetovError::OrderMismatch(format!(
                    "#{p} is not an ambient point"
                )));
            }
            o.iter().copied().collect()
        }
        None => (0..ambient.len()).collect(),
    };
    if let Some(p) = (0..ambient.len()).find(|p| !embedding.contains(p) && !queue.contains(p)) {
        return Err(KatetovError::OrderMismatch(format!(
            "{} is never visited",
            ambient.label(p)
        )));
    }
    let mut transcript = Vec::new();
    while let Some(w) = queue.pop_front() {
        for (i, phi) in moduli.iter().enumerate() {
            if maps[i][w].is_some() {
                continue;
            }
            let anchors: Vec<(usize, S)> = (0..ambient.len())
                .filter_map(|u| maps[i][u].map(|img| (img, phi.gauge(ambient.d(u, w)))))
                .collect();
            let admissible = (0..ambient.len()).find(|&z| {
                anchors
                    .iter()
                    .all(|(img, bound)| S::le_tol(ambient.d(z, *img), bound))
            });
            if let Some(z) = admissible {
                transcript.push(ExtensionStep {
                    map: i,
                    point: ambient.label(w).into(),
                    image: ambient.label(z).into(),
                    katetov: Vec::new(),
                    reused: true,
                    ambient_size: ambient.len(),
                });
                maps[i][w] = Some(z);
                continue;
            }
            if ambient.len() >= max_ambient {
                return Err(KatetovError::AmbientBudgetExceeded(max_ambient));
            }
            let k = KatetovFunction::min_extension(&ambient, &anchors)?;
            let label = ambient.fresh_label("u");
            let (grown, y) = realize_point(&ambient, &k, &label, false)?;
            ambient = grown;
            for images in maps.iter_mut() {
                images.push(None);
            }
            maps[i][w] = Some(y);
            queue.push_back(y);
            transcript.push(ExtensionStep {
                map: i,
                point: ambient.label(w).into(),
                image: label,
                katetov: k.values,
                reused: false,
                ambient_size: ambient.len(),
            });
        }
    }
    let maps: Vec<TableMap> = maps.into_iter().map(TableMap::partial).collect();
    let all = ambient.points();
    for (i, (f, phi)) in maps.iter().zip(moduli).enumerate() {
        if let Some((a, b)) = check_phi_contracting(&ambient, &all, f, phi)?.witness {
            return Err(KatetovError::MapModulusViolation {
                map: i,
                a: ambient.label(a).into(),
                b: ambient.label(b).into(),
            });
        }
    }
    let embedded = CompactSet::new(&ambient, embedding.to_vec())?;
    Ok(SystemExtension {
        ambient,
        system: IfSystem::new::<S>(maps).expect("at least one map"),
        embedded,
        transcript,
    })
}

/// Result of growing a finite approximation of the Urysohn space.
#[derive(Debug, Clone, PartialEq)]
pub struct UrysohnGrowth<S> {
    pub space: FiniteMetricSpace<S>,
    /// Rounds in which no admissible function was found.
    pub skipped_rounds: Vec<usize>,
}

/// Attempts per round before it is skipped.
pub const URYSOHN_ATTEMPTS: usize = 1000;

/// Each round picks a random subset of the current space and random grid
/// values on it; if those form a Katětov function on the subset, its
/// min-extension is realized as a new point.
pub fn build_urysohn_approx<S: Scalar>(
    seed_space: &FiniteMetricSpace<S>,
    rounds: usize,
    grid: &[S],
    seed: u64,
) -> Result<UrysohnGrowth<S>, KatetovError> {
    if let Some(g) = grid.iter().find(|g| !g.is_positive()) {
        return Err(KatetovError::NegativeValue(g.to_literal()));
    }
    let mut space = seed_space.clone();
    let mut skipped_rounds = Vec::new();
    if grid.is_empty() {
        skipped_rounds.extend(0..rounds);
        return Ok(UrysohnGrowth {
            space,
            skipped_rounds,
        });
    }
    for round in 0..rounds {
        let mut rng = rng::split(seed, round as u64);
        let mut realized = false;
        for _ in 0..URYSOHN_ATTEMPTS {
            let anchors = random_anchors(&space, grid, space.len(), &mut rng);
            if !consistent(&space, &anchors) {
                continue;
            }
            let k = KatetovFunction::min_extension(&space, &anchors)?;
            let label = space.fresh_label("u");
            let (grown, _) = realize_point(&space, &k, &label, false)?;
            space = grown;
            realized = true;
            break;
        }
        if !realized {
            skipped_rounds.push(round);
        }
    }
    Ok(UrysohnGrowth {
        space,
        skipped_rounds,
    })
}

fn random_anchors<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    grid: &[S],
    max_size: usize,
    rng: &mut rng::Rng,
) -> Vec<(usize, S)> {
    let size = rng.gen_range(1..=max_size.min(space.len()));
    sample(rng, space.len(), size)
        .iter()
        .map(|p| (p, grid[rng.gen_range(0..grid.len())].clone()))
        .collect()
}

/// Katětov inequalities restricted to the anchor set.
fn consistent<S: Scalar>(space: &FiniteMetricSpace<S>, anchors: &[(usize, S)]) -> bool {
    anchors.iter().enumerate().all(|(i, (p, kp))| {
        anchors[i + 1..].iter().all(|(q, kq)| {
            let d = space.d(*p, *q);
            S::le_tol(&(kp.clone() - kq.clone()).abs(), d)
                && S::le_tol(d, &(kp.clone() + kq.clone()))
        })
    })
}

/// Fraction of sampled one-point extension problems over 4-point subsets
/// already solved, within `tolerance` in every coordinate, by a point
/// outside the subset.
///
/// Subsets on which no grid-valued Katětov function turns up within
/// [`URYSOHN_ATTEMPTS`] draws are left out of the count.
pub fn extension_coverage<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    grid: &[S],
    tolerance: &S,
    n_checks: usize,
    seed: u64,
) -> f64 {
    if space.len() < 5 || grid.is_empty() {
        return 0.0;
    }
    let (mut posed, mut hits) = (0usize, 0usize);
    for check in 0..n_checks {
        let mut rng = rng::split(seed, check as u64);
        let subset: Vec<usize> = sample(&mut rng, space.len(), 4).into_vec();
        let anchors = (0..URYSOHN_ATTEMPTS)
            .map(|_| {
                subset
                    .iter()
                    .map(|&p| (p, grid[rng.gen_range(0..grid.len())].clone()))
                    .collect::<Vec<(usize, S)>>()
            })
            .find(|candidate| consistent(space, candidate));
        let Some(anchors) = anchors else { continue };
        posed += 1;
        let solved = (0..space.len()).filter(|p| !subset.contains(p)).any(|p| {
            anchors
                .iter()
                .all(|(s, k)| S::le_tol(&(space.d(p, *s).clone() - k.clone()).abs(), tolerance))
        });
        if solved {
            hits += 1;
        }
    }
    if posed == 0 {
        0.0
    } else {
        hits as f64 / posed as f64
    }
}

/// `max_{x, x'} d(f x, f x') − φ(d(x, x'))` over all pairs of `domain`.
pub fn modulus_excess<S: Scalar>(
    domain: &FiniteMetricSpace<S>,
    target: &FiniteMetricSpace<S>,
    f: &TableMap,
    phi: &ContinuityModulus<S>,
) -> Option<S> {
    let mut worst: Option<S> = None;
    for a in 0..domain.len() {
        for b in a + 1..domain.len() {
            let (fa, fb) = (f.image(&a)?, f.image(&b)?);
            let excess = target.d(fa, fb).clone() - phi.gauge(domain.d(a, b));
            worst = Some(match worst {
                Some(w) if w >= excess => w,
                _ => excess,
            });
        }
    }
    Some(worst.unwrap_or_else(S::zero))
}
