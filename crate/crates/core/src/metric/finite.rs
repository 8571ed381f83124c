use std::collections::HashSet;

use super::{MetricError, MetricSpace};
use crate::scalar::Scalar;

/// Finite metric space given by an explicit distance matrix over labels.
///
/// Points are indices into the label list; insertion order is preserved
/// and is part of the reproducibility contract.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace<S> {
    labels: Vec<String>,
    dist: Vec<S>,
}

/// Checks the metric axioms and returns the space, or the first offending
/// entry or triple.
///
/// Check order: shape, labels, negative entries, diagonal, symmetry, zero
/// off-diagonal entries, then triangles scanned as `i < k` with every
/// intermediate `via`.
pub fn validate_metric<S: Scalar>(
    labels: Vec<String>,
    matrix: Vec<Vec<S>>,
) -> Result<FiniteMetricSpace<S>, MetricError> {
    let n = matrix.len();
    if n == 0 {
        return Err(MetricError::EmptySpace);
    }
    if let Some((row, r)) = matrix.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(MetricError::NotSquare {
            row,
            len: r.len(),
            expected: n,
        });
    }
    if labels.len() != n {
        return Err(MetricError::LabelCount {
            labels: labels.len(),
            size: n,
        });
    }
    let mut seen = HashSet::new();
    for l in &labels {
        if !seen.insert(l.as_str()) {
            return Err(MetricError::DuplicateLabel(l.clone()));
        }
    }
    for (i, row) in matrix.iter().enumerate() {
        if let Some(j) = row.iter().position(|d| d.is_negative()) {
            return Err(MetricError::NegativeEntry(i, j));
        }
    }
    if let Some(i) = (0..n).find(|&i| !matrix[i][i].is_zero()) {
        return Err(MetricError::NonzeroDiagonal(i));
    }
    for i in 0..n {
        for j in i + 1..n {
            if !symmetric(&matrix[i][j], &matrix[j][i]) {
                return Err(MetricError::AsymmetricMatrix(i, j));
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if matrix[i][j] <= S::dedup_epsilon() {
                return Err(MetricError::ZeroOffDiagonal(i, j));
            }
        }
    }
    for i in 0..n {
        for k in i + 1..n {
            for via in 0..n {
                if via == i || via == k {
                    continue;
                }
                let detour = matrix[i][via].clone() + matrix[via][k].clone();
                if !S::le_tol(&matrix[i][k], &detour) {
                    return Err(MetricError::TriangleViolation { i, k, via });
                }
            }
        }
    }
    let dist = matrix.into_iter().flatten().collect();
    Ok(FiniteMetricSpace { labels, dist })
}

fn symmetric<S: Scalar>(a: &S, b: &S) -> bool {
    if S::EXACT {
        a == b
    } else {
        S::le_tol(a, b) && S::le_tol(b, a)
    }
}

impl<S: Scalar> FiniteMetricSpace<S> {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, p: usize) -> &str {
        &self.labels[p]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn points(&self) -> Vec<usize> {
        (0..self.len()).collect()
    }

    pub fn d(&self, a: usize, b: usize) -> &S {
        &self.dist[a * self.len() + b]
    }

    pub fn matrix(&self) -> Vec<Vec<S>> {
        let n = self.len();
        (0..n)
            .map(|i| self.dist[i * n..(i + 1) * n].to_vec())
            .collect()
    }

    /// Distinct positive distances realized by pairs, ascending.
    pub fn realized_distances(&self) -> Vec<S> {
        let mut ds: Vec<S> = Vec::new();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                ds.push(self.d(i, j).clone());
            }
        }
        sort_dedup(ds)
    }

    /// Subspace on the given points, in the given order.
    pub fn subspace(&self, points: &[usize]) -> Result<FiniteMetricSpace<S>, MetricError> {
        let labels = points.iter().map(|&p| self.labels[p].clone()).collect();
        let matrix = points
            .iter()
            .map(|&a| points.iter().map(|&b| self.d(a, b).clone()).collect())
            .collect();
        validate_metric(labels, matrix)
    }

    /// One-point extension: a new point at distance `row[z]` from each
    /// existing `z`.
    ///
    /// Only triples through the new point are checked; the rest of the
    /// space is already metric.
    pub fn adjoin(&self, label: String, row: &[S]) -> Result<FiniteMetricSpace<S>, MetricError> {
        let n = self.len();
        if row.len() != n {
            return Err(MetricError::NotSquare {
                row: n,
                len: row.len() + 1,
                expected: n + 1,
            });
        }
        if self.index_of(&label).is_some() {
            return Err(MetricError::DuplicateLabel(label));
        }
        if let Some(z) = row.iter().position(|v| v.is_negative()) {
            return Err(MetricError::NegativeEntry(z, n));
        }
        if let Some(z) = row.iter().position(|v| *v <= S::dedup_epsilon()) {
            return Err(MetricError::ZeroOffDiagonal(z, n));
        }
        for z in 0..n {
            for w in 0..n {
                if z == w {
                    continue;
                }
                // new point as an endpoint
                if !S::le_tol(&row[z], &(row[w].clone() + self.d(w, z).clone())) {
                    return Err(MetricError::TriangleViolation { i: z, k: n, via: w });
                }
                // new point as the intermediate
                if z < w && !S::le_tol(self.d(z, w), &(row[z].clone() + row[w].clone())) {
                    return Err(MetricError::TriangleViolation { i: z, k: w, via: n });
                }
            }
        }
        let m = n + 1;
        let mut dist = Vec::with_capacity(m * m);
        for i in 0..n {
            dist.extend_from_slice(&self.dist[i * n..(i + 1) * n]);
            dist.push(row[i].clone());
        }
        dist.extend(row.iter().cloned());
        dist.push(S::zero());
        let mut labels = self.labels.clone();
        labels.push(label);
        Ok(FiniteMetricSpace { labels, dist })
    }

    /// Label not yet used, of the form `{prefix}{k}`.
    pub fn fresh_label(&self, prefix: &str) -> String {
        let mut k = self.len();
        loop {
            let candidate = format!("{prefix}{k}");
            if self.index_of(&candidate).is_none() {
                return candidate;
            }
            k += 1;
        }
    }
}

pub(crate) fn sort_dedup<S: Scalar>(mut ds: Vec<S>) -> Vec<S> {
    ds.sort_by(|a, b| a.partial_cmp(b).expect("distances are comparable"));
    ds.dedup();
    ds
}

impl<S: Scalar> MetricSpace for FiniteMetricSpace<S> {
    type Scalar = S;
    type Point = usize;

    fn distance(&self, a: &usize, b: &usize) -> S {
        self.d(*a, *b).clone()
    }

    fn contains(&self, p: &usize) -> bool {
        *p < self.len()
    }

    fn coincide(&self, a: &usize, b: &usize) -> bool {
        a == b
    }

    fn dedup(&self, points: Vec<usize>) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::with_capacity(points.len());
        for p in points {
            match seen.get_mut(p) {
                Some(flag) if *flag => {}
                Some(flag) => {
                    *flag = true;
                    out.push(p);
                }
                // out-of-range points are kept so callers can report them
                None => {
                    if !out.contains(&p) {
                        out.push(p)
                    }
                }
            }
        }
        out
    }

    fn describe(&self, p: &usize) -> String {
        match self.labels.get(*p) {
            Some(l) => l.clone(),
            None => format!("#{p}"),
        }
    }
}
