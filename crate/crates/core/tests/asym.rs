use std::f64::consts::PI;

use orthocount_core::asym::*;
use orthocount_core::perp::Potential;
use proptest::prelude::*;

fn families() -> Vec<FamilyData> {
    vec![
        FamilyData::Point { isotropy: 1 },
        FamilyData::Point { isotropy: 3 },
        FamilyData::Cusp { vol: 1.0 },
        FamilyData::Cusp { vol: 0.37 },
        FamilyData::Geodesic { length: 2.0 * (1.5 + 1.25f64.sqrt()).ln(), m: 1 },
        FamilyData::Geodesic { length: 4.1, m: 2 },
    ]
}

/// Sphere volumes from the Gamma function closed form at half-integers.
fn sphere_gamma(m: u32) -> f64 {
    let k = (m + 1) as f64 / 2.0;
    let gamma = if m % 2 == 1 {
        (1..(m + 1) / 2).map(|j| j as f64).product::<f64>()
    } else {
        let j = m / 2;
        PI.sqrt() * (0..j).map(|i| (i as f64 + 0.5)).product::<f64>()
    };
    2.0 * PI.powf(k) / gamma
}

/// Masses written out directly from the definitions.
fn skin(n: u32, a: &FamilyData) -> f64 {
    match *a {
        FamilyData::Point { isotropy } => sphere_gamma(n - 1) / isotropy as f64,
        FamilyData::Cusp { vol } => 2f64.powi(n as i32 - 1) * (n - 1) as f64 * vol,
        FamilyData::Geodesic { length, m } => sphere_gamma(n - 2) * length / m as f64,
    }
}

#[test]
fn sphere_volume_recursion_matches_gamma() {
    assert_eq!(sphere_volume(0), 2.0);
    assert_eq!(sphere_volume(1), 2.0 * PI);
    assert_eq!(sphere_volume(2), 4.0 * PI);
    for m in 0..8 {
        assert!((sphere_volume(m) / sphere_gamma(m) - 1.0).abs() < 1e-14, "{m}");
    }
}

#[test]
fn bowen_margulis_examples() {
    let m = ManifoldData::modular();
    assert!((bowen_margulis_mass(&m) - 13.15947253478581).abs() < 1e-12);
    assert!((bowen_margulis_mass(&ManifoldData::new(2, 1.0).unwrap()) - 4.0 * PI).abs() < 1e-14);
    assert!((bowen_margulis_mass(&ManifoldData::new(3, 1.0).unwrap()) - 16.0 * PI).abs() < 1e-13);
    assert!(ManifoldData::new(4, 1.0).is_err());
    assert!(ManifoldData::new(2, -1.0).is_err());
}

#[test]
fn skinning_examples() {
    let m2 = ManifoldData::new(2, 1.0).unwrap();
    assert_eq!(skinning_mass(&m2, &FamilyData::Cusp { vol: 1.0 }), 2.0);
    assert_eq!(skinning_mass(&m2, &FamilyData::Geodesic { length: 2.5, m: 1 }), 5.0);
    let m3 = ManifoldData::new(3, 1.0).unwrap();
    assert!((skinning_mass(&m3, &FamilyData::Point { isotropy: 1 }) - 4.0 * PI).abs() < 1e-14);
}

#[test]
fn every_pair_passes_the_composition_audit() {
    for n in [2, 3] {
        for vol in [PI / 3.0, 1.0, 0.9427] {
            let m = ManifoldData::new(n, vol).unwrap();
            for am in families() {
                for ap in families() {
                    let p = pair_constant(&m, &am, &ap).unwrap();
                    assert!(p.audit_passed, "{am:?} {ap:?} n={n}");
                    let oracle = skin(n, &am) * skin(n, &ap) / ((n - 1) as f64 * bowen_margulis_mass(&m));
                    assert!((p.c / oracle - 1.0).abs() < 1e-12, "{am:?} {ap:?} n={n}");
                    assert_eq!(p.delta, (n - 1) as f64);
                    let swapped = pair_constant(&m, &ap, &am).unwrap();
                    assert!((swapped.c / p.c - 1.0).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn modular_pair_constants() {
    let m = ManifoldData::modular();
    let cusp = FamilyData::Cusp { vol: 1.0 };
    let p = pair_constant(&m, &cusp, &cusp).unwrap();
    assert!((p.c - 0.303963550927013).abs() < 1e-12);
    assert!((p.c - 2.0 * 2.0 / (4.0 * PI * PI / 3.0)).abs() < 1e-15);
    let p = pair_constant(&m, &FamilyData::Point { isotropy: 1 }, &cusp).unwrap();
    assert!((p.c - 3.0 / PI).abs() < 1e-14);
    let (a, b) = (1.3, 2.9);
    let p = pair_constant(&m, &FamilyData::Geodesic { length: a, m: 1 }, &FamilyData::Geodesic { length: b, m: 1 }).unwrap();
    assert!((p.c - 3.0 * a * b / (PI * PI)).abs() < 1e-14);
    assert!(pair_constant(&m, &FamilyData::Cusp { vol: 0.0 }, &cusp).is_err());
}

#[test]
fn predicted_counts() {
    let m = ManifoldData::modular();
    let cusp = FamilyData::Cusp { vol: 1.0 };
    let p = pair_constant(&m, &cusp, &cusp).unwrap();
    for q in [10.0f64, 100.0, 400.0] {
        let t = 2.0 * q.ln();
        let n0 = predicted_count(&p, t, &Potential::Zero).unwrap();
        assert!((n0 / (3.0 / (PI * PI) * q * q) - 1.0).abs() < 1e-12);
        let nh = predicted_count(&p, t, &Potential::Constant(-0.5)).unwrap();
        assert!((nh / (3.0 / (PI * PI) * 2.0 * q) - 1.0).abs() < 1e-12);
        assert_eq!(predicted_count(&p, t, &Potential::Constant(0.0)).unwrap(), n0);
    }
    assert_eq!(predicted_count(&p, 3.0, &Potential::Constant(-1.0)), Err(AsymError::ZeroExponent));
    assert_eq!(weighted_exponent(&p, &Potential::Constant(-0.25)).unwrap(), 0.75);
}

#[test]
fn geodesic_form_audit_reports_both_candidates() {
    let (a, b, v) = (2.0, 3.0, PI / 3.0);
    let exact = a * b / (PI * v);
    let au = GeodesicFormAudit::new(exact * 0.75, a, b, v, 0.75);
    assert!(au.inverse_pi_rel_err < 1e-14);
    assert!((au.pi_form / au.inverse_pi_form - PI * PI).abs() < 1e-12);
    assert!(au.supports_inverse_pi(0.25));
    let au = GeodesicFormAudit::new(au.pi_form, a, b, v, 0.75);
    assert!(!au.supports_inverse_pi(0.25));
}

proptest! {
    #[test]
    fn shell_factor_matches_difference(c in 0.01f64..3.0, t in 4.0f64..20.0, sigma in -0.6f64..0.6) {
        let m = ManifoldData::modular();
        let cusp = FamilyData::Cusp { vol: 1.0 };
        let p = pair_constant(&m, &cusp, &cusp).unwrap();
        let f = Potential::Constant(sigma);
        let df = weighted_exponent(&p, &f).unwrap();
        let hi = predicted_count(&p, t, &f).unwrap();
        let lo = predicted_count(&p, t - c, &f).unwrap();
        prop_assert!(((hi - lo) / (shell_factor(df, c) * hi) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn cusp_volume_scales_with_height(a in 0.1f64..5.0, h in 0.2f64..5.0) {
        prop_assert!((cusp_volume(2, a, h) * h - a).abs() < 1e-12 * a.max(1.0));
        prop_assert!((cusp_volume(3, a, h) * 2.0 * h * h - a).abs() < 1e-12 * a.max(1.0));
    }
}
