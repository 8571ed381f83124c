mod common;

use common::*;
use proptest::prelude::*;
use urysohn_ifs::moduli::{classify_modulus, ContinuityModulus};
use urysohn_ifs::Rational;

/// Concave piecewise-linear modulus from non-increasing slopes.
fn modulus() -> impl Strategy<Value = ContinuityModulus<Rational>> {
    (
        prop::collection::vec((1i64..=8, 0i64..=12), 0..5),
        0i64..=12,
    )
        .prop_map(|(pieces, tail)| {
            let mut slopes: Vec<i64> = pieces.iter().map(|p| p.1).chain([tail]).collect();
            slopes.sort_unstable_by(|a, b| b.cmp(a));
            let (mut t, mut v) = (q(0, 1), q(0, 1));
            let mut breakpoints = Vec::new();
            for (i, (len, _)) in pieces.iter().enumerate() {
                t += q(*len, 2);
                v += q(*len, 2) * q(slopes[i], 8);
                breakpoints.push((t.clone(), v.clone()));
            }
            ContinuityModulus::new(breakpoints, q(*slopes.last().unwrap(), 8)).unwrap()
        })
}

fn arg() -> impl Strategy<Value = Rational> {
    (0i64..=200, 1i64..=8).prop_map(|(n, d)| q(n, d))
}

proptest! {
    #[test]
    fn modulus_is_monotone_concave_subadditive(phi in modulus(), s in arg(), t in arg()) {
        let at = |x: &Rational| phi.eval(x).unwrap();
        prop_assert_eq!(at(&q(0, 1)), q(0, 1));
        if s <= t {
            prop_assert!(at(&s) <= at(&t));
        }
        let mid = (&s + &t) / q(2, 1);
        prop_assert!((at(&s) + at(&t)) / q(2, 1) <= at(&mid));
        prop_assert!(at(&(&s + &t)) <= at(&s) + at(&t));
    }

    #[test]
    fn verdicts_respect_implication_chain(phi in modulus(), d_max in 1i64..=30) {
        let d_max = q(d_max, 1);
        let grid = vec![q(1, 100), q(1, 10), q(1, 2), d_max.clone()];
        let c = classify_modulus(&phi, &d_max, &grid).unwrap();
        prop_assert!(!c.banach || c.rakotch);
        prop_assert!(!c.rakotch || c.matkowski);
        // concavity makes φ(t)/t non-increasing, so its supremum is the
        // slope of the first piece
        prop_assert_eq!(c.banach, phi.slopes()[0] < q(1, 1));
    }
}

#[test]
fn sampled_saturating_modulus_interpolates() {
    let phi = ContinuityModulus::new(
        vec![(q(1, 1), q(1, 2)), (q(2, 1), q(2, 3)), (q(4, 1), q(4, 5))],
        q(0, 1),
    )
    .unwrap();
    // halfway between 2/3 and 4/5
    assert_eq!(phi.eval(&q(3, 1)).unwrap(), q(11, 15));
}
