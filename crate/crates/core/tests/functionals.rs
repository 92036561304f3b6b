use ineq_forge_core::functionals::*;
use ineq_forge_core::radial_calculus::{LogWeight, MeasureSpec, RadialProfile, Shape};
use ineq_forge_core::special::hp_exterior_radius;
use ineq_forge_core::{Error, FamilyTag, WeightChainSpec};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn constant() -> RadialProfile {
    RadialProfile::new(Shape::Constant, LogWeight::ZERO, (f64::NEG_INFINITY, f64::INFINITY), 0).unwrap()
}

#[test]
fn gaussian_functional_of_one_is_three_quarters() {
    let g = gaussian_functional(&constant(), 3).unwrap();
    assert!((g.total - 0.75).abs() < 1e-10);
    assert!((g.potential("mass").unwrap() - 1.5).abs() < 1e-10);
    assert!((g.potential("moment").unwrap() + 0.75).abs() < 1e-10);
}

#[test]
fn gaussian_trial_square_form_agrees() {
    let u = RadialProfile::gaussian_trial(0.5).unwrap();
    let g = gaussian_functional(&u, 3).unwrap();
    assert!(rel(g.total, g.square_form.unwrap()) < 1e-8);
    assert!(g.total >= -g.tolerance());
}

#[test]
fn gaussian_measure_is_normalized() {
    for d in 1..=6 {
        let m = MeasureSpec::gaussian(d);
        let one = m
            .integrate(|_| 1.0, 0.0, f64::INFINITY, ineq_forge_core::quadrature::Tolerance::new(1e-15, 1e-13))
            .unwrap();
        assert!((one.value - 1.0).abs() < 1e-10, "d={d}: {}", one.value);
    }
}

#[test]
fn total_is_signed_sum_of_parts() {
    let u = RadialProfile::bump_with(0.3, 2.0, 3, vec![1.0, -0.4, 0.2]).unwrap();
    for v in [
        hardy_functional(&u, 4).unwrap(),
        gaussian_functional(&u, 3).unwrap(),
        hp_functional(&u, 3, -1.5).unwrap(),
    ] {
        let sum = v.dirichlet + v.potentials.iter().map(|p| p.1).sum::<f64>();
        assert!(rel(sum, v.total) < 1e-12);
    }
}

#[test]
fn hardy_trial_is_near_extremal() {
    // (4x(1−x))² has ∫b'²/∫b² = 12, so in log r with L = log(1/ε) the ratio
    // H/∫|∇u|² is exactly 12/(12 + L²/4).
    let u = RadialProfile::hardy_trial(3, 1e-40).unwrap();
    let h = hardy_functional(&u, 3).unwrap();
    let ratio = h.total / h.dirichlet;
    assert!(ratio > 0.0 && ratio < 0.05, "ratio {ratio}");
    let l = 40.0 * std::f64::consts::LN_10;
    assert!(rel(ratio, 12.0 / (12.0 + 0.25 * l * l)) < 1e-8);
}

#[test]
fn hp_functional_of_flat_profile_is_nonnegative() {
    let u = RadialProfile::bump_with(0.0, 40.0, 8, vec![]).unwrap();
    let v = hp_functional(&u, 3, -3.0).unwrap();
    assert!(v.total >= -1e-8, "{}", v.total);
}

#[test]
fn kelvin_duality_example() {
    let r = hp_exterior_radius(5).unwrap();
    let u = RadialProfile::bump_with(0.3, 0.9 / r, 3, vec![1.0, 0.5]).unwrap();
    let j = hp_exterior_functional(&u, 5, -1.0).unwrap();
    let i = hp_functional(&u.kelvin(5).unwrap(), 5, -1.0).unwrap();
    assert!(rel(j.total, i.total) < 1e-8, "{} vs {}", j.total, i.total);
}

#[test]
fn exterior_functional_checks_support() {
    let u = RadialProfile::bump(0.5, 3.0).unwrap();
    assert!(matches!(hp_exterior_functional(&u, 5, -1.0), Err(Error::Domain(_))));
}

#[test]
fn kelvin_preserves_dirichlet_energy_and_hardy_term() {
    let u = RadialProfile::bump_with(0.4, 2.5, 3, vec![1.0, -0.7]).unwrap();
    let v = u.kelvin(3).unwrap();
    let hu = hardy_functional(&u, 3).unwrap();
    let hv = hardy_functional(&v, 3).unwrap();
    assert!(rel(hu.dirichlet, hv.dirichlet) < 1e-10);
    assert!(rel(hu.potential("hardy").unwrap(), hv.potential("hardy").unwrap()) < 1e-10);
}

#[test]
fn weighted_rhs_examples() {
    let u = RadialProfile::bump(0.4, 3.0).unwrap();
    let spec = WeightChainSpec::new(FamilyTag::GaussianHighDim { d: 4 }, 8).unwrap();
    // N = 0: W_0 = 1, so the rhs is (d−2)²/4 ∫u²/r² dμ.
    let direct = {
        let g = MeasureSpec::gaussian(4).point_weight();
        let base = LogWeight::new(ineq_forge_core::special::sphere_area(4).ln(), 2.0, 0.0, 0.0);
        u.integrate_quadratic(base.plus(g), |_, w, _| w * w, ineq_forge_core::quadrature::Tolerance::new(0.0, 1e-13))
            .unwrap()
            .value
    };
    assert!(rel(weighted_rhs(&u, &spec, 0).unwrap(), direct) < 1e-10);
    let mut last = 0.0;
    for n in 0..=5 {
        let r = weighted_rhs(&u, &spec, n).unwrap();
        assert!(r >= last);
        last = r;
    }
}

#[test]
fn plane_rhs_needs_support_outside_critical_radius() {
    let spec = WeightChainSpec::new(FamilyTag::GaussianPlane { a: 2.0 }, 4).unwrap();
    let inside = RadialProfile::bump(0.5, 3.0).unwrap();
    assert!(matches!(weighted_rhs(&inside, &spec, 1), Err(Error::Domain(_))));
    let outside = RadialProfile::bump(1.3, 3.0).unwrap();
    assert!(weighted_rhs(&outside, &spec, 1).unwrap() > 0.0);
}

#[test]
fn square_forms_match_remainders() {
    let cases = [
        (FamilyTag::HardyInterior { d: 3, a: 1.0 }, RadialProfile::bump(0.01, 0.9).unwrap()),
        (FamilyTag::GaussianHighDim { d: 3 }, RadialProfile::bump(0.2, 3.0).unwrap()),
        (FamilyTag::HpLowDim { d: 4, alpha: -2.0 }, RadialProfile::bump(0.2, 3.0).unwrap()),
    ];
    for (family, u) in cases {
        let spec = WeightChainSpec::new(family, 6).unwrap();
        let f = family_functional(&u, family).unwrap();
        for k in 0..=4 {
            let sq = square_form(&u, &spec, k).unwrap();
            let expected = f.total - seeded_rhs(&u, &spec, k).unwrap();
            assert!(rel(sq, expected) < 1e-8, "{} k={k}: {sq} vs {expected}", family.name());
        }
    }
}

#[test]
fn lambda_examples_and_continuity() {
    assert_eq!(lambda_constant(-5.0, 3).unwrap(), LambdaConstant::Value(10.0));
    assert_eq!(lambda_constant(-2.0, 3).unwrap(), LambdaConstant::Value(2.25));
    assert_eq!(lambda_constant(-1.0, 4).unwrap(), LambdaConstant::InequalityFails);
    for d in 2..=8u32 {
        let df = d as f64;
        // Both adjacent formulas agree at the two regime boundaries.
        let a = -df;
        assert_eq!(-2.0 * a, -2.0 * (df + 2.0 * a));
        let b = -(df + 2.0) / 2.0;
        assert_eq!(-2.0 * (df + 2.0 * b), 0.25 * (df - 2.0 + 2.0 * b).powi(2));
        for x in [a, b] {
            if let (LambdaConstant::Value(l), LambdaConstant::Value(r)) =
                (lambda_constant(x - 1e-9, d).unwrap(), lambda_constant(x + 1e-9, d).unwrap())
            {
                assert!((l - r).abs() < 1e-7);
            }
        }
    }
}

#[test]
fn mouhot_examples() {
    let x1 = RadialProfile::coordinate(0.0).unwrap();
    assert!((mouhot_ratio(&x1, 3).unwrap() - 5.0).abs() < 1e-8);
    assert!((mouhot_ratio(&x1, 5).unwrap() - 7.0).abs() < 1e-8);
    let radial = RadialProfile::poly_gauss(vec![1.0, 0.0, 1.0], 0.1, 0).unwrap();
    assert!(matches!(mouhot_ratio(&radial, 3), Err(Error::Precondition(_))));
    // u = r² − d has zero gaussian mean; it is the ℓ = 0 Hermite mode.
    let centered = mouhot_ratio_centered(&RadialProfile::poly_gauss(vec![0.0, 0.0, 1.0], 0.0, 0).unwrap(), 3).unwrap();
    let direct = mouhot_ratio(&RadialProfile::poly_gauss(vec![-3.0, 0.0, 1.0], 0.0, 0).unwrap(), 3).unwrap();
    assert!(rel(centered, direct) < 1e-9);
    assert!(direct <= 10.0);
}
