//! Point maps: explicit tables between finite spaces and affine maps on
//! Euclidean coordinates.

use arrayvec::ArrayVec;

use crate::scalar::Scalar;

/// Coordinates of a Euclidean point (dimension 1 to 3).
pub type Coords<S> = ArrayVec<S, 3>;

/// Builds coordinates from a slice. Panics above dimension 3.
pub fn coords<S: Clone>(values: &[S]) -> Coords<S> {
    values.iter().cloned().collect()
}

/// A map sending points of type `P` to points of type `Q`.
///
/// `None` means the point lies outside the declared domain.
pub trait PointMap<P, Q = P> {
    fn image(&self, p: &P) -> Option<Q>;
}

impl<P, Q, M: PointMap<P, Q> + ?Sized> PointMap<P, Q> for &M {
    fn image(&self, p: &P) -> Option<Q> {
        (**self).image(p)
    }
}

/// Explicit map between point indices of finite spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableMap {
    images: Vec<Option<usize>>,
}

impl TableMap {
    /// Total map on `0..images.len()`.
    pub fn total(images: Vec<usize>) -> Self {
        TableMap {
            images: images.into_iter().map(Some).collect(),
        }
    }

    /// Partial map; `None` entries are outside the domain.
    pub fn partial(images: Vec<Option<usize>>) -> Self {
        TableMap { images }
    }

    pub fn identity(n: usize) -> Self {
        Self::total((0..n).collect())
    }

    pub fn constant(n: usize, target: usize) -> Self {
        Self::total(vec![target; n])
    }

    /// Number of slots, defined or not.
    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn domain(&self) -> Vec<usize> {
        (0..self.images.len())
            .filter(|&i| self.images[i].is_some())
            .collect()
    }

    pub fn is_total_on(&self, n: usize) -> bool {
        n <= self.images.len() && self.images[..n].iter().all(Option::is_some)
    }

    pub fn get(&self, p: usize) -> Option<usize> {
        self.images.get(p).copied().flatten()
    }

    pub fn set(&mut self, p: usize, q: usize) {
        if p >= self.images.len() {
            self.images.resize(p + 1, None);
        }
        self.images[p] = Some(q);
    }

    /// `self ∘ inner` (apply `inner` first).
    pub fn after(&self, inner: &TableMap) -> TableMap {
        TableMap::partial(
            inner
                .images
                .iter()
                .map(|p| p.and_then(|p| self.get(p)))
                .collect(),
        )
    }

    pub fn as_slice(&self) -> &[Option<usize>] {
        &self.images
    }
}

impl PointMap<usize> for TableMap {
    fn image(&self, p: &usize) -> Option<usize> {
        self.get(*p)
    }
}

/// `x ↦ Mx + b` on coordinates of fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap<S> {
    linear: Vec<Vec<S>>,
    offset: Vec<S>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AffineError {
    #[error("dimension {0} outside 1..=3")]
    BadDimension(usize),
    #[error("matrix is not {0}x{0}")]
    ShapeMismatch(usize),
}

impl<S: Scalar> AffineMap<S> {
    pub fn new(linear: Vec<Vec<S>>, offset: Vec<S>) -> Result<Self, AffineError> {
        let d = offset.len();
        if !(1..=3).contains(&d) {
            return Err(AffineError::BadDimension(d));
        }
        if linear.len() != d || linear.iter().any(|row| row.len() != d) {
            return Err(AffineError::ShapeMismatch(d));
        }
        Ok(AffineMap { linear, offset })
    }

    /// Uniform scaling by `ratio` followed by translation.
    pub fn similarity(ratio: S, offset: Vec<S>) -> Result<Self, AffineError> {
        let d = offset.len();
        let linear = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| if i == j { ratio.clone() } else { S::zero() })
                    .collect()
            })
            .collect();
        Self::new(linear, offset)
    }

    pub fn identity(dim: usize) -> Result<Self, AffineError> {
        Self::similarity(S::one(), vec![S::zero(); dim])
    }

    pub fn constant(target: Vec<S>) -> Result<Self, AffineError> {
        Self::similarity(S::zero(), target)
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn linear(&self) -> &[Vec<S>] {
        &self.linear
    }

    pub fn offset(&self) -> &[S] {
        &self.offset
    }

    pub fn apply(&self, x: &[S]) -> Option<Coords<S>> {
        if x.len() != self.dim() {
            return None;
        }
        Some(
            self.linear
                .iter()
                .zip(&self.offset)
                .map(|(row, b)| {
                    row.iter()
                        .zip(x)
                        .fold(b.clone(), |acc, (m, xi)| acc + m.clone() * xi.clone())
                })
                .collect(),
        )
    }
}

impl<S: Scalar> PointMap<Coords<S>> for AffineMap<S> {
    fn image(&self, p: &Coords<S>) -> Option<Coords<S>> {
        self.apply(p)
    }
}
