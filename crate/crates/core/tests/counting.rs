use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use tandem_core::closed_forms::{baxter_b, exact_p1_endpoint, lgv_qnk, marked_qnk_tilde};
use tandem_core::oracle::{
    count_marked, count_refined, count_walks, double_tandem_d, double_tandem_d_tilde,
    double_tandem_symmetry_check, quadrant_count, visit_walks, CountQuery, Endpoint,
};
use tandem_core::series::{halfplane_gf, w_series, y1_series};
use tandem_core::steps::{periodicity, walk_stats};
use tandem_core::{Region, Signature, Step, TandemWalk, WeightSpec};

fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn step() -> impl Strategy<Value = Step> {
    prop_oneof![Just(Step::SE), (0u32..3, 0u32..3).prop_map(|(i, j)| Step::Face(i, j))]
}

fn small_spec() -> impl Strategy<Value = WeightSpec> {
    prop::collection::vec(0i64..3, 2..4)
        .prop_filter("some level used", |z| z.iter().any(|&v| v > 0))
        .prop_map(|z| WeightSpec::from_ints(&z))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn boundary_stats_do_not_depend_on_the_embedding(
        steps in prop::collection::vec(step(), 0..25),
        x0 in -5i64..5,
        y0 in -5i64..5,
    ) {
        let w = TandemWalk::new(steps);
        let pts = w.trajectory((x0, y0));
        let x_min = pts.iter().map(|p| p.0).min().unwrap();
        let y_min = pts.iter().map(|p| p.1).min().unwrap();
        let (xe, ye) = *pts.last().unwrap();
        let s = walk_stats(&w);
        prop_assert_eq!(
            (s.a as i64, s.b as i64, s.c as i64, s.d as i64),
            (x0 - x_min, y0 - y_min, xe - x_min, ye - y_min)
        );
        let (dx, dy) = w.displacement();
        prop_assert_eq!(s.c as i64 - s.a as i64, dx);
        prop_assert_eq!(s.d as i64 - s.b as i64, dy);
    }

    #[test]
    fn regions_are_nested(spec in small_spec(), a in 0i64..3, b in 0i64..3, n in 0usize..6) {
        let count = |region| count_walks(&CountQuery::new(spec.clone(), (a, b), Endpoint::Any, n, region));
        let (q, h, all) = (count(Region::Quadrant), count(Region::UpperHalfplane), count(Region::None));
        prop_assert!(q <= h && h <= all);
        let total: BigRational = BigRational::one()
            + spec.z.iter().enumerate().map(|(r, z)| z * int(r as i64 + 1)).fold(BigRational::zero(), |s, v| s + v);
        prop_assert_eq!(all, num_traits::pow(total, n));
    }

    #[test]
    fn nonzero_counts_respect_the_period(spec in small_spec(), n in 0usize..8, i in 0i64..5, j in 0i64..5) {
        let levels = spec.levels();
        prop_assume!(levels != vec![0]);
        let per = periodicity(&levels).unwrap();
        let c = quadrant_count(&spec, (0, 0), (i, j), n);
        if !c.is_zero() {
            prop_assert!(per.reachable(n as u64, (i, j)));
        }
    }
}

#[test]
fn marked_counts_match_transported_walks() {
    // Every walk from the origin is Φ⁻¹ of exactly one marked orientation, with signature equal
    // to its boundary statistics and one plain edge more than its length.
    let spec = WeightSpec::all_ones(2);
    let mut tally: BTreeMap<(usize, Signature), i64> = BTreeMap::new();
    for n in 0..=5 {
        visit_walks(&spec, n, (0, 0), Region::None, |w| {
            let s = walk_stats(w);
            *tally.entry((n, Signature::new(s.a, s.b, s.c, s.d))).or_default() += 1;
        })
        .unwrap();
    }
    for ((n, sig), count) in &tally {
        assert_eq!(count_marked(&spec, *sig, n + 1).unwrap(), int(*count), "n={n} sig={sig:?}");
    }
    assert!(count_marked(&spec, Signature::new(0, 0, 0, 0), 0).is_err());
}

#[test]
fn ten_step_walk_monomial() {
    // Walks of length 10 with signature (3,2;1,2) and level counts (0,3,2,1) exist.
    let spec = WeightSpec::all_ones(3);
    let key = vec![0, 3, 2, 1];
    let term = |a: i64, b: i64, c: i64, d: i64| -> BigInt {
        if a < 0 || b < 0 || c < 0 || d < 0 {
            return BigInt::zero();
        }
        let m = count_refined(&spec, (a, b), Endpoint::Point(c, d), 10, Region::Quadrant).unwrap();
        m.get(&key).cloned().unwrap_or_default()
    };
    let marked = term(3, 2, 1, 2) - term(3, 1, 1, 1) - term(2, 2, 0, 2) + term(2, 1, 0, 1);
    assert!(marked >= BigInt::one(), "{marked}");
}

#[test]
fn marked_lgv_symmetry() {
    for n in 1..=7 {
        for k in 0..=n {
            for a in 0..=3 {
                for b in 0..=3 {
                    for c in 0..=3 {
                        for d in 0..=3 {
                            assert_eq!(marked_qnk_tilde(n, k, a, b, c, d), marked_qnk_tilde(n, k, d, b, c, a));
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn lgv_marginals_match_the_oracle() {
    for n in 1..=6i64 {
        // A face step of level above 2n cannot occur in a quadrant walk of length n from (0,b)
        // to the x-axis with b, c <= 2.
        let spec = WeightSpec::all_ones(2 * n as usize);
        for b in 0..=2 {
            for c in 0..=2 {
                let sum = (0..=n).fold(BigInt::zero(), |s, k| s + lgv_qnk(n, k, 0, b, c, 0));
                // The determinant needs a face step; the run of n SE steps is added by hand.
                let se_run = BigInt::from(u8::from(b == n && c == n));
                let dp = quadrant_count(&spec, (0, b), (c, 0), n as usize);
                assert_eq!(BigRational::from_integer(sum + se_run), dp, "n={n} b={b} c={c}");
            }
        }
    }
    assert_eq!((0..=4).fold(BigInt::zero(), |s, k| s + lgv_qnk(4, k, 0, 0, 0, 0)), baxter_b(3).unwrap());
}

#[test]
fn p1_endpoint_formula_matches_the_oracle() {
    let spec = WeightSpec::from_ints(&[0, 1]);
    for n in 0..=9u64 {
        for i in 0..=9u64 {
            for j in 0..=9u64 {
                let dp = quadrant_count(&spec, (0, 0), (i as i64, j as i64), n as usize);
                assert_eq!(BigRational::from_integer(exact_p1_endpoint(n, i, j)), dp, "n={n} ({i},{j})");
            }
        }
    }
}

#[test]
fn double_tandem_checks() {
    for l in 0..=8usize {
        for m in 0..=(8 - l) {
            assert!(double_tandem_symmetry_check(1, 0, 0, 0, l, m).unwrap());
            for (a, b, c, d) in [(1, 0, 0, 0), (0, 1, 2, 0), (2, 1, 1, 2)] {
                let (full, tilde) = (double_tandem_d(a, b, c, d, l, m), double_tandem_d_tilde(a, b, c, d, l, m));
                assert!(full >= tilde && tilde >= BigInt::zero());
            }
        }
    }
    assert!(double_tandem_symmetry_check(2, 1, 1, 2, 3, 3).unwrap());
}

#[test]
fn x_at_one_gives_w() {
    let spec = WeightSpec::from_ints(&[1, 0, 2]);
    let y = y1_series(&spec, 8, true).unwrap();
    let w = w_series(&spec, 8).unwrap();
    for n in 0..=8 {
        let at_one = y.coeff(n).terms().fold(BigRational::zero(), |s, (_, c)| s + c);
        assert_eq!(at_one, w.coeff(n).constant_term());
    }
}

#[test]
fn halfplane_first_passage() {
    let spec = WeightSpec::from_ints(&[1, 1]);
    let w = w_series(&spec, 10).unwrap();
    let h0 = halfplane_gf(&spec, 0, 0, 9).unwrap();
    let h1 = halfplane_gf(&spec, 0, 1, 9).unwrap();
    let w2 = &w * &w;
    for n in 0..=9 {
        assert_eq!(h0.coeff(n).constant_term(), w.coeff(n + 1).constant_term());
        assert_eq!(h1.coeff(n).constant_term(), w2.coeff(n + 1).constant_term());
    }
}
