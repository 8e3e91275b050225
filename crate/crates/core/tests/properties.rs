use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use proptest::prelude::*;

use huffcensus_core::counting::{branch_step_counted, count_trees_upto, enumerate_classes};
use huffcensus_core::genfun::{bivariate_g, eval_d_certified, eval_nd, series_f, tail_bounds};
use huffcensus_core::numerics::{rat, Precision, RationalInterval};
use huffcensus_core::representations::{BoundedDegreeSequence, HuffmanSequence, ReprKind, Representation};

fn small_rational() -> impl Strategy<Value = BigRational> {
    (-200i64..200, 1i64..50).prop_map(|(n, d)| rat(n, d))
}

fn interval() -> impl Strategy<Value = RationalInterval> {
    (small_rational(), small_rational()).prop_map(|(a, b)| RationalInterval::hull_of(a, b))
}

/// An interval together with a point inside it.
fn interval_with_point() -> impl Strategy<Value = (RationalInterval, BigRational)> {
    (interval(), 0i64..=16).prop_map(|(x, k)| {
        let p = x.lo() + (x.hi() - x.lo()) * rat(k, 16);
        (x, p)
    })
}

/// A random valid bounded degree sequence built level by level.
fn degree_sequence() -> impl Strategy<Value = BoundedDegreeSequence> {
    (2u32..=5, prop::collection::vec(0u64..1000, 0..8)).prop_map(|(t, picks)| {
        let mut b = vec![1u64];
        for pick in picks {
            let cap = t as u64 * b.last().unwrap();
            b.push(1 + pick % cap.min(12));
        }
        BoundedDegreeSequence { t, b }
    })
}

proptest! {
    #[test]
    fn arithmetic_contains_point_results((x, p) in interval_with_point(), (y, q) in interval_with_point()) {
        prop_assert!(x.add(&y).contains(&(&p + &q)));
        prop_assert!(x.sub(&y).contains(&(&p - &q)));
        prop_assert!(x.mul(&y).contains(&(&p * &q)));
        if let Ok(z) = x.div(&y) {
            prop_assert!(z.contains(&(&p / &q)));
        }
        for n in 0..5u64 {
            prop_assert!(x.pow(n).contains(&num_traits::pow(p.clone(), n as usize)));
        }
    }

    #[test]
    fn inclusion_monotone(x in interval(), y in interval(), grow in 0i64..20) {
        let wide = x.widen(&rat(grow, 7));
        prop_assert!(x.add(&y).is_subset_of(&wide.add(&y)));
        prop_assert!(x.mul(&y).is_subset_of(&wide.mul(&y)));
        prop_assert!(x.pow(3).is_subset_of(&wide.pow(3)));
        if let (Ok(a), Ok(b)) = (y.div(&wide), y.div(&x)) {
            prop_assert!(b.is_subset_of(&a));
        }
    }

    #[test]
    fn rounding_only_widens(x in interval(), bits in 1u32..40) {
        let r = x.round_outward(bits);
        prop_assert!(x.is_subset_of(&r));
        prop_assert!(r.width() <= x.width() + rat(2, 1) / BigRational::from_integer(BigInt::one() << bits));
        prop_assert!(x.pow(3).is_subset_of(&x.pow_with(3, Precision::Bits(bits))));
    }

    #[test]
    fn decimal_render_is_faithful(x in small_rational(), digits in 0u32..6) {
        let text = RationalInterval::point(x.clone()).decimal_render(digits).unwrap();
        let back = huffcensus_core::numerics::parse_decimal(&text).unwrap();
        let half_ulp = rat(1, 2) / BigRational::from_integer(num_traits::pow(BigInt::from(10), digits as usize));
        prop_assert!((back - x).abs() <= half_ulp);
    }

    #[test]
    fn bijections_round_trip(d in degree_sequence()) {
        let degrees = Representation::Degrees(d.clone());
        prop_assert!(degrees.validate().is_ok());
        let h = degrees.to_huffman().unwrap();
        for kind in ReprKind::ALL {
            let x = degrees.convert(kind).unwrap();
            prop_assert!(x.validate().is_ok());
            prop_assert_eq!(x.to_huffman().unwrap(), h.clone());
            prop_assert_eq!(x.convert(ReprKind::Degrees).unwrap(), degrees.clone());
            let json = x.to_json();
            prop_assert_eq!(Representation::from_json(&json).unwrap(), x.clone());
            prop_assert_eq!(Representation::from_text(d.t, kind, &x.to_text()).unwrap(), x);
        }
    }

    #[test]
    fn perturbed_sequences_are_rejected(d in degree_sequence(), level in 0usize..8) {
        let h = Representation::Degrees(d).to_huffman().unwrap();
        let i = level % h.a.len();
        let mut bad = h.clone();
        bad.a[i] += 1;
        prop_assert!(Representation::Huffman(bad).validate().is_err());
    }
}

#[test]
fn series_matches_dynamic_programme() {
    for t in 2..=6 {
        let dp = count_trees_upto(t, 20).unwrap();
        assert_eq!(series_f(t, 20).unwrap().coeffs, dp, "t = {t}");
    }
}

#[test]
fn bivariate_marginal_matches_series() {
    for t in 2..=4 {
        let g = bivariate_g(t, 12).unwrap();
        let series: Vec<BigInt> = series_f(t, 12).unwrap().coeffs.into_iter().map(BigInt::from).collect();
        assert_eq!(g.series_at_u_one(), series);
        for (k, layer) in g.layers.iter().enumerate() {
            assert!(layer.q_valuation().is_none_or(|v| v >= k));
        }
    }
}

#[test]
fn truncation_differences_respect_tail_bound() {
    for (t, radius) in [(2u32, rat(3, 5)), (3, rat(4, 5)), (5, rat(9, 10))] {
        for k in 1..4 {
            let Ok(tail) = tail_bounds(t, &radius, k) else { continue };
            for j in -4i64..=4 {
                let q = &radius * rat(j, 4);
                let (nk, dk, _) = eval_nd(t, &q, k).unwrap();
                for extra in 1..3 {
                    let (nk2, dk2, _) = eval_nd(t, &q, k + extra).unwrap();
                    assert!((&dk2 - &dk).abs() <= tail.bound_d, "t={t} k={k} q={q}");
                    assert!((&nk2 - &nk).abs() <= tail.bound_n, "t={t} k={k} q={q}");
                }
            }
        }
    }
}

#[test]
fn derivative_tail_bound_holds() {
    for (t, radius) in [(2u32, rat(1, 2)), (3, rat(3, 5))] {
        for k in 2..4 {
            let tail = tail_bounds(t, &radius, k).unwrap();
            let Some(bound) = tail.bound_dprime else { continue };
            let (_, _, dk) = eval_nd(t, &radius, k).unwrap();
            let (_, _, far) = eval_nd(t, &radius, k + 3).unwrap();
            assert!((far - dk).abs() <= bound, "t={t} k={k}");
        }
    }
}

#[test]
fn certified_width_shrinks_geometrically() {
    let radius = rat(11, 20);
    let q = RationalInterval::point(radius.clone());
    for digits in [5u32, 10, 20, 40] {
        let width = eval_d_certified(2, &q, digits).unwrap().width();
        assert!(width <= BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), digits as usize)));
    }
    let bounds: Vec<BigRational> = (1..7).map(|k| tail_bounds(2, &radius, k).unwrap().bound_d).collect();
    for pair in bounds.windows(2) {
        assert!(pair[1] <= &pair[0] * &radius);
    }
}

#[test]
fn branching_never_duplicates() {
    for t in 2u32..=5 {
        let mut set: BTreeSet<HuffmanSequence> = [HuffmanSequence { t, a: vec![1] }].into_iter().collect();
        for step in 1..=10u64 {
            let outcome = branch_step_counted(t, &set);
            assert_eq!(outcome.emitted, outcome.sequences.len(), "t={t} step={step}");
            let r = 1 + step * (t as u64 - 1);
            assert_eq!(outcome.sequences.len(), enumerate_classes(t, r, ReprKind::Huffman).unwrap().count());
            set = outcome.sequences;
        }
    }
}

#[test]
fn counts_grow_like_powers_of_two() {
    for t in 2..=8u32 {
        let counts = count_trees_upto(t, 40).unwrap();
        for (n, c) in counts.iter().enumerate() {
            assert!(c <= &(BigUint::one() << n));
        }
        // ratios settle below 2
        let ratio = counts[40].to_f64().unwrap() / counts[39].to_f64().unwrap();
        assert!(ratio > 1.7 && ratio < 2.0, "t={t} ratio={ratio}");
    }
}
