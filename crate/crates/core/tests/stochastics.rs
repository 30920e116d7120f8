use std::f64::consts::PI;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;

use tandem_core::oracle::{count_walks, CountQuery, Endpoint};
use tandem_core::stochastics::{
    check_harmonicity, drift_and_covariance, exit_identity, g0, g_density, global_harmonic_residual,
    harmonic_v, harmonic_v_f64, kappa, kappa_bipolar, limit_diagnostics, normalize_weights,
    survival_probability, v_infinity, v_infinity_shifted, StepDistribution,
};
use tandem_core::{Region, WeightSpec};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// A zero-drift distribution built from integer face weights: z ∝ Σ C(r+1,2) u_r, z_r ∝ u_r.
fn zero_drift(u: &[i64]) -> StepDistribution<BigRational> {
    let z: i64 = u.iter().enumerate().map(|(r, v)| v * (r as i64 + 1) * r as i64 / 2).sum();
    let total: i64 = z + u.iter().enumerate().map(|(r, v)| v * (r as i64 + 1)).sum::<i64>();
    StepDistribution::new(q(z, total), u.iter().map(|v| q(*v, total)).collect()).unwrap()
}

fn face_weights() -> impl Strategy<Value = Vec<i64>> {
    (prop::collection::vec(0i64..4, 1..4), 1i64..4).prop_map(|(mut u, top)| {
        u.push(top);
        u
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn normalized_weights_have_zero_drift(w in prop::collection::vec(0.0f64..5.0, 2..6)) {
        prop_assume!(w[1..].iter().any(|&v| v > 0.1));
        let n = normalize_weights(&w).unwrap();
        prop_assert!(n.dist.normalization_residual().abs() < 1e-12);
        prop_assert!(n.dist.drift().abs() < 1e-10);
        prop_assert!(n.alpha > 0.0 && n.gamma > 0.0);
        // α² = Σ C(r+1,2) w_r α^{-r} and γ = Σ C(r+2,2) w_r α^{-r}.
        let sum = |k: usize| -> f64 {
            w.iter().enumerate().map(|(r, v)| ((r + k) * (r + k - 1) / 2) as f64 * v * n.alpha.powi(-(r as i32))).sum()
        };
        prop_assert!((sum(1) / (n.alpha * n.alpha) - 1.0).abs() < 1e-9);
        prop_assert!((sum(2) / n.gamma - 1.0).abs() < 1e-9);
    }

    #[test]
    fn harmonic_function_is_exactly_harmonic(u in face_weights()) {
        let d = zero_drift(&u);
        prop_assert!(d.is_zero_drift());
        prop_assert!(check_harmonicity(&d, 6, 6).unwrap().is_zero());
        for (a, b) in [(0, 0), (1, 2), (4, 0)] {
            let v = harmonic_v(&d, a, b).unwrap();
            prop_assert!(v.rational_part > BigRational::zero());
        }
        prop_assert!(global_harmonic_residual(&d, v_infinity, 5).is_zero());
        prop_assert!(global_harmonic_residual(&d, v_infinity_shifted, 5).is_zero());
    }

    #[test]
    fn survival_is_monotone(a in 0usize..4, b in 0usize..4) {
        let d = StepDistribution::uniform_p1().to_f64();
        let s: Vec<f64> = (0..12).map(|n| survival_probability(&d, a, b, n)).collect();
        prop_assert_eq!(s[0], 1.0);
        prop_assert!(s.windows(2).all(|p| p[1] <= p[0] + 1e-15));
    }
}

#[test]
fn moments_of_single_level_distributions() {
    let m = drift_and_covariance(&StepDistribution::uniform_p1()).unwrap();
    assert_eq!(m.sigma2, q(1, 3));
    let m = drift_and_covariance(&StepDistribution::single_level(2).unwrap()).unwrap();
    assert_eq!(m.sigma2, q(2, 3));
    // Too much SE weight pushes the walk to the south-east.
    let d = StepDistribution::new(q(2, 3), vec![q(1, 6), q(1, 12)]).unwrap();
    assert!(!d.is_zero_drift());
}

#[test]
fn normalization_examples() {
    let t = normalize_weights(&[0.0, 1.0]).unwrap();
    assert!((t.alpha - 1.0).abs() < 1e-13 && (t.gamma - 3.0).abs() < 1e-12);
    let f = normalize_weights(&[0.0, 0.0, 1.0]).unwrap();
    assert!((f.alpha - 3f64.powf(0.25)).abs() < 1e-12);
    assert!((f.gamma - 2.0 * 3f64.sqrt()).abs() < 1e-12);
}

#[test]
fn harmonic_values() {
    let p1 = StepDistribution::uniform_p1();
    let p2 = StepDistribution::single_level(2).unwrap();
    assert!((harmonic_v(&p1, 0, 0).unwrap().to_f64() - 6.0 * 3f64.sqrt()).abs() < 1e-12);
    assert!((harmonic_v(&p2, 0, 0).unwrap().to_f64() - 2.0 * 6f64.sqrt()).abs() < 1e-12);
    // σ³V(a,b) approaches (a+1)(b+1)(a+b+2) far from the axes.
    for d in [&p1, &p2] {
        let s3 = d.sigma2().to_f64().unwrap().powf(1.5);
        let v = harmonic_v_f64(&d.to_f64(), 60, 60).unwrap();
        assert!((v * s3 / (61.0 * 61.0 * 122.0) - 1.0).abs() < 0.02);
    }
}

#[test]
fn kappa_examples() {
    let tri = kappa_bipolar(&[3], 0, 0).unwrap();
    assert!((tri.kappa - 243.0 / (3f64.sqrt() * PI)).abs() < 1e-10);
    assert!((tri.kappa / 81.0 - 3f64.sqrt() / PI).abs() < 1e-12);
    let quad = kappa_bipolar(&[4], 0, 0).unwrap();
    assert!((quad.kappa - 36.0 / (3f64.sqrt() * PI)).abs() < 1e-10);
    assert!((quad.kappa / 16.0 - 9.0 / (4.0 * 3f64.sqrt() * PI)).abs() < 1e-12);
    // The general formula agrees with the bipolar specialization.
    let general = kappa(&[0.0, 1.0], 0, 0, 0, 0).unwrap();
    assert!((general.kappa / tri.kappa - 1.0).abs() < 1e-12);
    let general = kappa(&[0.0, 1.0, 1.0], 0, 2, 1, 0).unwrap();
    let special = kappa_bipolar(&[3, 4], 2, 1).unwrap();
    assert!((general.kappa / special.kappa - 1.0).abs() < 1e-10);
}

#[test]
fn local_limit_constant_for_p1() {
    // ι V(0,0)² / (4√3πσ²) with ι = 3, V(0,0) = 6√3 and σ² = 1/3.
    let v = 6.0 * 3f64.sqrt();
    let c = 3.0 * v * v / (4.0 * 3f64.sqrt() * PI / 3.0);
    assert!((c - 81.0 * 3f64.sqrt() / PI).abs() < 1e-10);
    assert!((c - kappa(&[0.0, 1.0], 0, 0, 0, 0).unwrap().kappa).abs() < 1e-10);
}

#[test]
fn survival_examples() {
    let d = StepDistribution::uniform_p1().to_f64();
    assert_eq!(survival_probability(&d, 0, 0, 0), 1.0);
    assert!((survival_probability(&d, 0, 0, 1) - 1.0 / 3.0).abs() < 1e-15);
    let spec = WeightSpec::from_ints(&[0, 1]);
    for (a, b) in [(0, 0), (1, 0), (2, 1)] {
        let count = count_walks(&CountQuery::new(spec.clone(), (a, b), Endpoint::Any, 3, Region::Quadrant));
        let want = count.to_f64().unwrap() / 27.0;
        assert!((survival_probability(&d, a as usize, b as usize, 3) - want).abs() < 1e-15);
    }
}

#[test]
fn unreachable_local_probabilities_vanish() {
    let d = StepDistribution::uniform_p1().to_f64();
    let t = limit_diagnostics(&d, (0, 0), (0, 0), 30).unwrap();
    for row in &t.rows {
        if row.n % 3 != 0 {
            assert_eq!(row.local, 0.0, "n={}", row.n);
            assert!(row.local_ratio.is_none());
        } else {
            assert!(row.local > 0.0);
        }
    }
    let biased = StepDistribution::new(q(2, 3), vec![q(1, 6), q(1, 12)]).unwrap().to_f64();
    assert!(limit_diagnostics(&biased, (0, 0), (0, 0), 5).is_err());
}

#[test]
fn limit_density() {
    assert_eq!(g_density(2.0, 0.0), 0.0);
    assert_eq!(g_density(-1.0, 1.0), 0.0);
    let s = 6f64.sqrt() / 2.0;
    assert!((g_density(s, s) - g0()).abs() < 1e-15);
    // Integrates to 1 over the quadrant.
    let h = 0.02;
    let mut total = 0.0;
    for i in 0..600 {
        for j in 0..600 {
            total += g_density((i as f64 + 0.5) * h, (j as f64 + 0.5) * h) * h * h;
        }
    }
    assert!((total - 1.0).abs() < 1e-4, "{total}");
}

#[test]
fn exit_identity_examples() {
    let p2 = StepDistribution::single_level(2).unwrap();
    let e = exit_identity(&p2, 0, 0, 500).unwrap();
    assert_eq!(e.lhs, q(-2, 3));
    assert!(e.relative_error() < 0.15);
    let p1 = StepDistribution::uniform_p1();
    for (a, b) in [(0, 0), (3, 1)] {
        let e = exit_identity(&p1, a, b, 50).unwrap();
        assert!(e.lhs.is_zero() && e.rhs_estimate == 0.0);
    }
}
