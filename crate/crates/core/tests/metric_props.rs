mod common;

use common::*;
use proptest::prelude::*;
use urysohn_ifs::{
    hausdorff_distance, set_image, validate_metric, CompactSet, MetricError, Rational, TableMap,
};

fn triangle_scan(m: &[Vec<Rational>]) -> Option<(usize, usize, usize)> {
    let n = m.len();
    for i in 0..n {
        for k in i + 1..n {
            for via in (0..n).filter(|&v| v != i && v != k) {
                if m[i][k] > &m[i][via] + &m[via][k] {
                    return Some((i, k, via));
                }
            }
        }
    }
    None
}

proptest! {
    #[test]
    fn validator_agrees_with_triple_scan(m in any_matrix(7)) {
        let n = m.len();
        let got = validate_metric(labels(n), m.clone());
        match triangle_scan(&m) {
            None => prop_assert!(got.is_ok()),
            Some((i, k, via)) => {
                prop_assert_eq!(got.unwrap_err(), MetricError::TriangleViolation { i, k, via })
            }
        }
    }

    #[test]
    fn hausdorff_matches_double_max(s in metric_space(2, 8), ma in 1u32..256, mb in 1u32..256) {
        let (a, b) = (subset(s.len(), ma), subset(s.len(), mb));
        let ka = CompactSet::new(&s, a.clone()).unwrap();
        let kb = CompactSet::new(&s, b.clone()).unwrap();
        prop_assert_eq!(hausdorff_distance(&s, &ka, &kb).unwrap(), hausdorff_oracle(&s, &a, &b));
    }

    #[test]
    fn hausdorff_is_a_metric_on_subsets(
        s in metric_space(2, 7), ma in 1u32..128, mb in 1u32..128, mc in 1u32..128,
    ) {
        let set = |m| CompactSet::new(&s, subset(s.len(), m)).unwrap();
        let (a, b, c) = (set(ma), set(mb), set(mc));
        let d = |x: &CompactSet<usize>, y: &CompactSet<usize>| hausdorff_distance(&s, x, y).unwrap();
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert_eq!(d(&a, &b) == q(0, 1), a.same_set(&s, &b));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
    }

    #[test]
    fn set_image_is_monotone(
        s in metric_space(2, 7), images in prop::collection::vec(0usize..7, 7), ma in 1u32..128, mb in 1u32..128,
    ) {
        let n = s.len();
        let f = TableMap::total(images.iter().take(n).map(|&i| i % n).collect());
        let a = subset(n, ma);
        let mut ab = subset(n, mb);
        ab.extend(a.iter().filter(|p| !ab.contains(p)).copied().collect::<Vec<_>>());
        let fa = set_image(&s, &f, &CompactSet::new(&s, a).unwrap()).unwrap();
        let fab = set_image(&s, &f, &CompactSet::new(&s, ab).unwrap()).unwrap();
        prop_assert!(fa.is_subset_of(&s, &fab));
    }
}

#[test]
fn first_violation_is_reported() {
    let m = symmetric(3, &[q(1, 1), q(3, 1), q(1, 1)]);
    assert_eq!(
        validate_metric(labels(3), m).unwrap_err(),
        MetricError::TriangleViolation { i: 0, k: 2, via: 1 }
    );
}
