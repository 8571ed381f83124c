#![allow(dead_code)]

use proptest::prelude::*;
use urysohn_ifs::{validate_metric, Rational, RationalSpace};

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i}")).collect()
}

/// Symmetric matrix with zero diagonal from upper-triangle entries.
pub fn symmetric(n: usize, upper: &[Rational]) -> Vec<Vec<Rational>> {
    let mut m = vec![vec![q(0, 1); n]; n];
    let mut it = upper.iter();
    for i in 0..n {
        for j in i + 1..n {
            let v = it.next().expect("enough entries").clone();
            m[i][j] = v.clone();
            m[j][i] = v;
        }
    }
    m
}

/// Symmetric zero-diagonal matrices with entries in `1..=6` over a common
/// denominator; roughly half of them break a triangle inequality.
pub fn any_matrix(max_n: usize) -> impl Strategy<Value = Vec<Vec<Rational>>> {
    (2..=max_n, 1i64..=4).prop_flat_map(|(n, den)| {
        prop::collection::vec(1i64..=6 * den, n * (n - 1) / 2).prop_map(move |ups| {
            let ups: Vec<Rational> = ups.into_iter().map(|u| q(u, den)).collect();
            symmetric(n, &ups)
        })
    })
}

/// Entries in `[k, 2k]` always satisfy the triangle inequality.
pub fn metric_space(min_n: usize, max_n: usize) -> impl Strategy<Value = RationalSpace> {
    (min_n..=max_n, 1i64..=5).prop_flat_map(|(n, k)| {
        prop::collection::vec(0i64..=4 * k, n * (n - 1) / 2).prop_map(move |ups| {
            let ups: Vec<Rational> = ups.into_iter().map(|u| q(4 * k + u, 4)).collect();
            validate_metric(labels(n), symmetric(n, &ups)).expect("banded entries form a metric")
        })
    })
}

/// Plain double loop over the two directed distances.
pub fn hausdorff_oracle(space: &RationalSpace, a: &[usize], b: &[usize]) -> Rational {
    let directed = |from: &[usize], to: &[usize]| {
        from.iter()
            .map(|&x| to.iter().map(|&y| space.d(x, y).clone()).min().unwrap())
            .max()
            .unwrap()
    };
    directed(a, b).max(directed(b, a))
}

/// Non-empty subset of `0..n` from a bit mask.
pub fn subset(n: usize, mask: u32) -> Vec<usize> {
    let s: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
    if s.is_empty() {
        vec![mask as usize % n]
    } else {
        s
    }
}
