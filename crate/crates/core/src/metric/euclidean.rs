use super::grid::{CellIndex, Grid};
use super::{brute_directed_hausdorff, MetricError, MetricSpace};
use crate::maps::Coords;
use crate::scalar::{max_of, Scalar};

/// Euclidean space of dimension 1 to 3 with the ℓ2 distance.
///
/// Large point clouds use a bucket grid for deduplication and
/// nearest-neighbour search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EuclideanSpace<S> {
    dim: usize,
    _scalar: std::marker::PhantomData<S>,
}

/// Below this many distance evaluations the plain double loop wins.
const BRUTE_FORCE_WORK: usize = 1 << 14;

impl<S: Scalar> EuclideanSpace<S> {
    pub fn new(dim: usize) -> Result<Self, MetricError> {
        if !(1..=3).contains(&dim) {
            return Err(MetricError::MixedAmbient(format!("dimension {dim}")));
        }
        Ok(EuclideanSpace {
            dim,
            _scalar: std::marker::PhantomData,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn shadow(&self, p: &Coords<S>) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (o, v) in out.iter_mut().zip(p.iter()) {
            *o = v.to_f64_lossy();
        }
        out
    }

    /// Cell size giving about one point per cell over the bounding box,
    /// but never below `min_cell`.
    fn cell_size(&self, shadows: &[[f64; 3]], min_cell: f64) -> f64 {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for s in shadows {
            for a in 0..self.dim {
                lo[a] = lo[a].min(s[a]);
                hi[a] = hi[a].max(s[a]);
            }
        }
        let extent = (0..self.dim).map(|a| hi[a] - lo[a]).fold(0.0, f64::max);
        let per_axis = (shadows.len() as f64).powf(1.0 / self.dim as f64).max(1.0);
        let mut cell = extent / per_axis;
        let floor = extent.max(
            lo.iter()
                .chain(&hi)
                .take(self.dim)
                .fold(0.0f64, |m, v| m.max(v.abs())),
        ) * 1e-12;
        if !(cell > floor) || !cell.is_finite() {
            cell = if floor > 0.0 { floor * 4.0 } else { 1.0 };
        }
        cell.max(min_cell)
    }

    fn key(&self, x: &[f64; 3], cell: f64) -> [i64; 3] {
        let mut k = [0i64; 3];
        for a in 0..self.dim {
            k[a] = (x[a] / cell).floor() as i64;
        }
        k
    }

    /// Cell index over `points` and their shadows in cell order.
    fn index_for(&self, points: &[Coords<S>]) -> (CellIndex, Vec<[f64; 3]>) {
        let shadows: Vec<[f64; 3]> = points.iter().map(|p| self.shadow(p)).collect();
        let cell = self.cell_size(&shadows, 0.0);
        let index = CellIndex::build(self.dim, cell, &shadows);
        let sorted = index.order().iter().map(|&i| shadows[i as usize]).collect();
        (index, sorted)
    }

    fn nearest(
        &self,
        grid: &CellIndex,
        shadows: &[[f64; 3]],
        to: &[Coords<S>],
        query: &Coords<S>,
        good_enough: &S,
    ) -> S {
        let qs = self.shadow(query);
        let key = grid.key(&qs);
        let (start, end) = grid.ring_bounds(&key);
        let budget = 4 * to.len() + 64;
        let mut visited = 0usize;
        let mut best: Option<(S, f64)> = None;
        let mut r = start;
        let mut settled = false;
        while r <= end {
            visited += grid.for_each_ring_cell(&key, r, |cell| {
                if settled {
                    return;
                }
                for pos in grid.cell_range(cell) {
                    let approx = shadow_dist(&qs, &shadows[pos], self.dim);
                    if let Some((_, bf)) = &best {
                        // generous margin keeps the exact comparison authoritative
                        if approx > bf * (1.0 + 1e-6) + 1e-300 {
                            continue;
                        }
                    }
                    let d = self.distance(query, &to[grid.order()[pos] as usize]);
                    if best.as_ref().is_none_or(|(b, _)| d < *b) {
                        // a point this close cannot raise the running maximum
                        settled = d <= *good_enough;
                        best = Some((d, approx));
                        if settled {
                            return;
                        }
                    }
                }
            });
            if let Some((b, bf)) = &best {
                if b <= good_enough {
                    break;
                }
                let lower = r as f64 * grid.cell();
                if *bf * (1.0 + 1e-9) <= lower {
                    break;
                }
            }
            if visited > budget {
                let tail = brute_directed_hausdorff(self, std::slice::from_ref(query), to);
                return tail;
            }
            r += 1;
        }
        best.map(|(b, _)| b).unwrap_or_else(S::zero)
    }
}

fn shadow_dist(a: &[f64; 3], b: &[f64; 3], dim: usize) -> f64 {
    (0..dim)
        .map(|i| (a[i] - b[i]) * (a[i] - b[i]))
        .sum::<f64>()
        .sqrt()
}

impl<S: Scalar> MetricSpace for EuclideanSpace<S> {
    type Scalar = S;
    type Point = Coords<S>;

    fn distance(&self, a: &Coords<S>, b: &Coords<S>) -> S {
        if self.dim == 1 {
            return (a[0].clone() - b[0].clone()).abs();
        }
        let sq = a.iter().zip(b.iter()).fold(S::zero(), |acc, (x, y)| {
            let t = x.clone() - y.clone();
            acc + t.clone() * t
        });
        sq.sqrt()
    }

    fn contains(&self, p: &Coords<S>) -> bool {
        p.len() == self.dim && p.iter().all(|v| v.to_f64_lossy().is_finite())
    }

    fn dedup(&self, points: Vec<Coords<S>>) -> Vec<Coords<S>> {
        if points.len() < 64 {
            let mut kept: Vec<Coords<S>> = Vec::with_capacity(points.len());
            for p in points {
                if !kept.iter().any(|q| self.coincide(q, &p)) {
                    kept.push(p);
                }
            }
            return kept;
        }
        let eps = S::dedup_epsilon().to_f64_lossy();
        let shadows: Vec<[f64; 3]> = points.iter().map(|p| self.shadow(p)).collect();
        let cell = self.cell_size(&shadows, (eps * 1000.0).max(1e-9));
        let (mut lo, mut hi) = ([i64::MAX; 3], [i64::MIN; 3]);
        for s in &shadows {
            let k = self.key(s, cell);
            for a in 0..3 {
                lo[a] = lo[a].min(k[a]);
                hi[a] = hi[a].max(k[a]);
            }
        }
        let mut grid = Grid::new(self.dim, cell, lo, hi, points.len());
        let mut kept: Vec<Coords<S>> = Vec::with_capacity(points.len());
        // shadows are rounded, so reach a little past the tolerance
        let reach = 2.0 * eps + 1e-12 * grid.cell();
        for (p, shadow) in points.into_iter().zip(shadows) {
            let key = grid.key(&shadow);
            let fresh = if S::EXACT {
                grid.insert_unless(key, |i| kept[i] == p)
            } else {
                let mut dup = false;
                grid.for_each_cell_within(&shadow, reach, |k| {
                    if !dup && *k != key {
                        grid.for_each_in_cell(k, |i| dup |= self.coincide(&kept[i], &p));
                    }
                });
                !dup && grid.insert_unless(key, |i| self.coincide(&kept[i], &p))
            };
            if fresh {
                kept.push(p);
            }
        }
        kept
    }

    fn directed_hausdorff(&self, from: &[Coords<S>], to: &[Coords<S>]) -> S {
        if from.len().saturating_mul(to.len()) <= BRUTE_FORCE_WORK || to.len() < 32 {
            return brute_directed_hausdorff(self, from, to);
        }
        let (grid, shadows) = self.index_for(to);
        let mut worst = S::zero();
        for a in from {
            let d = self.nearest(&grid, &shadows, to, a, &worst);
            worst = max_of(&worst, &d);
        }
        worst
    }
}
