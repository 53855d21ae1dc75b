//! Property tests for the exact-arithmetic foundations: ring axioms on
//! random small polynomials, canonical-form idempotence, the
//! integrate/differentiate inverse pair, and the Grassmann dimension formula.

use std::sync::Arc;

use proptest::prelude::*;

use carnot::linalg::Subspace;
use carnot::poly::{MultiPoly, PolyRing};
use carnot::scalar::Scalar;

fn ring() -> Arc<PolyRing> {
    PolyRing::new(vec!["x", "y", "z"])
}

fn scalar_strategy() -> impl Strategy<Value = Scalar> {
    (-20i64..=20, 1i64..=9).prop_map(|(n, d)| Scalar::ratio(n, d))
}

fn poly_strategy() -> impl Strategy<Value = MultiPoly> {
    let term = (proptest::collection::vec(0u32..3, 3), scalar_strategy());
    proptest::collection::vec(term, 0..6).prop_map(|terms| {
        let r = ring();
        let mut acc = MultiPoly::zero(&r);
        for (exps, c) in terms {
            let mut mono = MultiPoly::constant(&r, c);
            for (var, e) in ["x", "y", "z"].iter().zip(exps) {
                let v = MultiPoly::var(&r, var).unwrap();
                mono = &mono * &v.pow(e);
            }
            acc = &acc + &mono;
        }
        acc
    })
}

fn vector_strategy(n: usize) -> impl Strategy<Value = Vec<Scalar>> {
    proptest::collection::vec((-5i64..=5).prop_map(Scalar::from_int), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn scalar_field_axioms(a in scalar_strategy(), b in scalar_strategy(), c in scalar_strategy()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        if !b.is_zero() {
            prop_assert_eq!(&(&a / &b) * &b, a.clone());
        }
    }

    #[test]
    fn scalar_canonical_form_is_idempotent(a in scalar_strategy()) {
        // Rendering and reparsing is the canonicalization; a fixed point
        // after one pass.
        let once: Scalar = a.to_string().parse().unwrap();
        let twice: Scalar = once.to_string().parse().unwrap();
        prop_assert_eq!(&once, &a);
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn poly_ring_axioms(p in poly_strategy(), q in poly_strategy(), r in poly_strategy()) {
        prop_assert_eq!(&(&p + &q) * &r, &(&p * &r) + &(&q * &r));
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&(&p - &q) + &q, p.clone());
    }

    #[test]
    fn integrate_then_differentiate_is_identity(p in poly_strategy()) {
        let integrated = p.integrate("y").unwrap();
        prop_assert_eq!(integrated.differentiate("y").unwrap(), p);
    }

    #[test]
    fn poly_display_round_trips(p in poly_strategy()) {
        let text = p.to_string();
        prop_assert_eq!(carnot::poly::parse_poly(&ring(), &text).unwrap(), p);
    }

    #[test]
    fn grassmann_dimension_formula(
        us in proptest::collection::vec(vector_strategy(4), 1..4),
        ws in proptest::collection::vec(vector_strategy(4), 1..4),
    ) {
        let u = Subspace::from_vectors(4, us);
        let w = Subspace::from_vectors(4, ws);
        let sum = u.sum(&w).unwrap();
        let inter = u.intersect(&w).unwrap();
        prop_assert_eq!(u.dim() + w.dim(), sum.dim() + inter.dim());
        prop_assert!(sum.contains(&u).unwrap());
        prop_assert!(u.contains(&inter).unwrap());
    }
}
