use std::collections::BTreeMap;

use orthocount_core::exec::Sequential;
use orthocount_core::geom::*;
use orthocount_core::groups::*;
use orthocount_core::perp::*;
use orthocount_core::C64;
use proptest::prelude::*;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn phi(n: u64) -> u64 {
    (1..=n).filter(|k| gcd(*k, n) == 1).count() as u64
}

fn cusp_spectrum(q: u64) -> OrthoSpectrum {
    let f = EquivariantFamily::modular_cusp();
    find_common_perpendiculars(&f, &f, &preset_modular(), 2.0 * (q as f64).ln() + 1e-9).unwrap()
}

fn rounded(xs: impl IntoIterator<Item = f64>) -> Vec<i64> {
    let mut v: Vec<i64> = xs.into_iter().map(|x| (x * 1e7).round() as i64).collect();
    v.sort();
    v
}

fn s() -> Isometry {
    Isometry::real(0.0, -1.0, 1.0, 0.0).unwrap()
}

fn t() -> Isometry {
    Isometry::real(1.0, 1.0, 0.0, 1.0).unwrap()
}

#[test]
fn farey_small_counts() {
    assert_eq!(cusp_spectrum(3).records.len(), 3);
    assert_eq!(cusp_spectrum(5).records.len(), 9);
}

#[test]
fn farey_multiset_up_to_150() {
    let sp = cusp_spectrum(150);
    let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
    for r in &sp.records {
        let q = (r.perp.length / 2.0).exp().round() as u64;
        assert!((r.perp.length - 2.0 * (q as f64).ln()).abs() < 1e-9);
        assert_eq!(r.multiplicity, Multiplicity::ONE);
        *hist.entry(q).or_default() += 1;
    }
    let want: BTreeMap<u64, u64> = (2..=150).map(|q| (q, phi(q))).collect();
    assert_eq!(hist, want);
}

#[test]
fn farey_total_300() {
    let want: u64 = (2..=300).map(phi).sum();
    assert_eq!(cusp_spectrum(300).records.len() as u64, want);
}

#[test]
fn feet_of_farey_perpendiculars() {
    // The perpendicular to Horoball(p/q, 1/q²) is vertical above p/q.
    let sp = cusp_spectrum(12);
    let mut got: Vec<i64> = sp.records.iter().map(|r| (r.foot_minus_datum[0] * 1e9).round() as i64).collect();
    got.sort();
    let mut want = Vec::new();
    for q in 2..=12u64 {
        for p in 1..q {
            if gcd(p, q) == 1 {
                want.push((p as f64 / q as f64 * 1e9).round() as i64);
            }
        }
    }
    want.sort();
    assert_eq!(got, want);
}

#[test]
fn weighted_count_constant_potential() {
    let f = EquivariantFamily::modular_cusp();
    let opts = EngineOptions { potential: Potential::Constant(-0.5), ..EngineOptions::default() };
    let t = 2.0 * 5f64.ln() + 1e-9;
    let sp = find_common_perpendiculars_with(&f, &f, &preset_modular(), t, &opts, &Sequential).unwrap();
    let n = counting_function(&sp, &Potential::Constant(-0.5), &[t]).unwrap()[0].1;
    let want: f64 = (2..=5u64).map(|q| phi(q) as f64 / q as f64).sum();
    assert!((n - want).abs() < 1e-9, "{n} vs {want}");
    for r in &sp.records {
        assert!((r.weight - (-0.5 * r.perp.length).exp()).abs() < 1e-12);
    }
}

#[test]
fn counting_function_is_monotone_and_bounded() {
    let sp = cusp_spectrum(40);
    let grid: Vec<f64> = (0..=40).map(|k| k as f64 * sp.t_max / 40.0).collect();
    let n = counting_function(&sp, &Potential::Zero, &grid).unwrap();
    assert!(n.windows(2).all(|w| w[0].1 <= w[1].1));
    assert!(matches!(
        counting_function(&sp, &Potential::Zero, &[sp.t_max + 1.0]),
        Err(PerpError::GridBeyondSpectrum { .. })
    ));
}

#[test]
fn shells_telescope() {
    let sp = cusp_spectrum(60);
    let c = 0.7;
    let grid: Vec<f64> = (0..8).map(|k| sp.t_max - k as f64 * c).rev().collect();
    let n = counting_function(&sp, &Potential::Zero, &grid).unwrap();
    for w in n.windows(2) {
        let shell = sp.records.iter().filter(|r| r.perp.length > w[0].0 && r.perp.length <= w[1].0).count();
        assert_eq!(w[1].1 - w[0].1, shell as f64);
    }
}

#[test]
fn axis_spectrum_matches_displacement_ball() {
    let g = preset_modular();
    let fa = EquivariantFamily::modular_axis();
    let t_max = 5.0;
    let sp = find_common_perpendiculars(&fa, &fa, &g, t_max).unwrap();
    // Both feet can be moved within τ/2 of the orbit of i, which lies on the axis.
    let tau = 2.0 * 1.5f64.acosh();
    let x0 = Point::h2(0.0, 1.0);
    let ball = enumerate_displacement_ball(&g, &x0, t_max + tau + 0.5, &BallLimits::default(), &Sequential).unwrap();
    let mut bodies: Vec<ConvexBody> = Vec::new();
    let mut lengths = Vec::new();
    for e in &ball.elements {
        let (b, _) = fa.canonicalize(&fa.base.apply(&e.g));
        if bodies.iter().any(|x| x.approx_eq(&b, 1e-7)) {
            continue;
        }
        bodies.push(b);
        if let Ok(p) = common_perpendicular(&fa.base, &b) {
            if p.length <= t_max {
                lengths.push(p.length);
            }
        }
    }
    assert!(!lengths.is_empty());
    assert_eq!(rounded(lengths), rounded(sp.lengths()));
}

#[test]
fn point_cusp_duality() {
    let g = preset_modular();
    let pt = EquivariantFamily::point(Point::h2(0.0, 1.0), vec![s()], "i").unwrap();
    let cu = EquivariantFamily::modular_cusp();
    let a = find_common_perpendiculars(&pt, &cu, &g, 6.0).unwrap();
    let b = find_common_perpendiculars(&cu, &pt, &g, 6.0).unwrap();
    assert!(a.records.len() > 50);
    assert_eq!(rounded(a.lengths()), rounded(b.lengths()));
}

#[test]
fn cusp_axis_duality() {
    let g = preset_modular();
    let fa = EquivariantFamily::modular_axis();
    let cu = EquivariantFamily::modular_cusp();
    let a = find_common_perpendiculars(&cu, &fa, &g, 6.0).unwrap();
    let b = find_common_perpendiculars(&fa, &cu, &g, 6.0).unwrap();
    assert!(a.records.len() > 10);
    assert_eq!(rounded(a.lengths()), rounded(b.lengths()));
    let pairs = |sp: &OrthoSpectrum, swap: bool| {
        let mut v: Vec<(i64, i64, i64)> = sp
            .records
            .iter()
            .map(|r| {
                let (m, p) = (r.foot_minus_datum[0], r.foot_plus_datum[0]);
                let (x, y) = if swap { (p, m) } else { (m, p) };
                ((r.perp.length * 1e6).round() as i64, (x * 1e6).round() as i64, (y * 1e6).round() as i64)
            })
            .collect();
        v.sort();
        v
    };
    assert_eq!(pairs(&a, false), pairs(&b, true));
}

#[test]
fn conjugation_by_a_non_lattice_isometry() {
    let g = preset_modular();
    let h = Isometry::real(2.0, 0.3, 0.5, (1.0 + 0.15) / 2.0).unwrap();
    let f = EquivariantFamily::modular_cusp();
    let a = find_common_perpendiculars(&f, &f, &g, 2.0 * 9f64.ln() + 1e-9).unwrap();
    let gh = g.conjugate(&h).unwrap();
    let fh = f.conjugate(&h).unwrap();
    let b = find_common_perpendiculars(&fh, &fh, &gh, 2.0 * 9f64.ln() + 1e-9).unwrap();
    assert_eq!(rounded(a.lengths()), rounded(b.lengths()));
}

#[test]
fn budget_overflow_returns_partial() {
    let f = EquivariantFamily::modular_cusp();
    let opts = EngineOptions { max_bodies: 50, ..EngineOptions::default() };
    match find_common_perpendiculars_with(&f, &f, &preset_modular(), 12.0, &opts, &Sequential) {
        Err(PerpError::BudgetExceeded { partial, .. }) => {
            assert_eq!(partial.completeness, Completeness::Incomplete);
            assert!(!partial.records.is_empty());
        }
        other => panic!("expected a budget error, got {other:?}"),
    }
}

#[test]
fn tangencies_are_reported_not_counted() {
    let sp = cusp_spectrum(4);
    assert!(!sp.tangencies.is_empty());
    assert!(sp.records.iter().all(|r| r.perp.length > 0.0));
}

#[test]
fn witness_words_evaluate_to_witnesses() {
    let sp = cusp_spectrum(7);
    for r in &sp.records {
        let w = witness_word(&preset_modular(), &r.witness);
        let mut m = Isometry::identity(Dim::Two);
        if w != "e" {
            for tok in w.split(' ') {
                let step = if tok == "S" {
                    s()
                } else {
                    let k: i32 = tok.trim_start_matches("T^").parse().unwrap();
                    Isometry::real(1.0, k as f64, 0.0, 1.0).unwrap()
                };
                m = m * step;
            }
        }
        assert!(m.approx_eq(&r.witness, 1e-9), "{w}");
    }
}

#[test]
fn multiplicity_generic_cusp_normal() {
    let g = preset_modular();
    let f = EquivariantFamily::modular_cusp();
    let v = UnitTangent::new(Point::h2(0.3, 1.0), C64::new(0.0, 0.0), -1.0).unwrap();
    let m = multiplicity(&v, &f, &g).unwrap();
    assert_eq!(m.value, Multiplicity::ONE);
}

#[test]
fn multiplicity_with_rotation_about_the_normal() {
    // r rotates by a quarter turn about the geodesic from −1 to 1; it fixes
    // the horizontal vector at (0, 1) and moves the vertical axis to the
    // geodesic from −i to i, which has the same outer normal there.
    let e = C64::new(0.5f64.sqrt(), 0.5f64.sqrt());
    let one = C64::new(1.0, 0.0);
    let rot = Isometry::new(Dim::Three, e, C64::new(0.0, 0.0), C64::new(0.0, 0.0), e.conj()).unwrap();
    let m = Isometry::scaled(Dim::Three, one, -one, one, one).unwrap();
    let r = (m.inverse() * rot) * m;
    let g = GroupSpec::custom(Dim::Three, vec![r], "quarter-turn").unwrap();
    let axis = ConvexBody::geodesic(Dim::Three, BoundaryPoint::Finite(C64::new(0.0, 0.0)), BoundaryPoint::Infinity).unwrap();
    let f = EquivariantFamily::new(axis, vec![r * r], "vertical").unwrap();
    let v = UnitTangent::new(Point::h3(C64::new(0.0, 0.0), 1.0), one, 0.0).unwrap();
    let rep = multiplicity(&v, &f, &g).unwrap();
    assert_eq!((rep.members, rep.stabilizer), (2, 4));
    assert_eq!(rep.value, Multiplicity::new(1, 2));
    assert!(!rep.capped);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn lattice_conjugation_preserves_spectrum(word in prop::collection::vec(0usize..3, 1..5)) {
        let letters = [s(), t(), t().inverse()];
        let h = word.iter().fold(Isometry::identity(Dim::Two), |m, &i| m * letters[i]);
        let g = preset_modular();
        let f = EquivariantFamily::modular_cusp();
        let fh = f.conjugate(&h).unwrap();
        let tm = 2.0 * 8f64.ln() + 1e-9;
        let a = find_common_perpendiculars(&f, &f, &g, tm).unwrap();
        let b = find_common_perpendiculars(&fh, &f, &g, tm).unwrap();
        prop_assert_eq!(rounded(a.lengths()), rounded(b.lengths()));
    }

    #[test]
    fn records_are_perpendicular_and_flow_consistent(q in 3u64..20) {
        let sp = cusp_spectrum(q);
        for r in &sp.records {
            let end = geodesic_flow(&r.perp.v_minus, r.perp.length);
            prop_assert!(end.deviation(&r.perp.v_plus) < 1e-8);
            prop_assert!(r.perp.length <= sp.t_max);
        }
    }
}
