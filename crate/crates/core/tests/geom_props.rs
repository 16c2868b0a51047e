use orthocount_core::geom::numeric::{boundary_params, numeric_body_distance, path_length};
use orthocount_core::geom::*;
use orthocount_core::C64;
use proptest::prelude::*;

fn point2() -> impl Strategy<Value = Point> {
    (-3.0..3.0f64, -2.0..2.0f64).prop_map(|(x, l)| Point::h2(x, l.exp()))
}

fn point3() -> impl Strategy<Value = Point> {
    (-3.0..3.0f64, -3.0..3.0f64, -2.0..2.0f64).prop_map(|(x, y, l)| Point::h3(C64::new(x, y), l.exp()))
}

fn iso2() -> impl Strategy<Value = Isometry> {
    (0.3..2.0f64, prop::bool::ANY, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, neg, b, c)| {
        let a = if neg { -a } else { a };
        Isometry::real(a, b, c, (1.0 + b * c) / a).unwrap()
    })
}

fn cplx() -> impl Strategy<Value = C64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(x, y)| C64::new(x, y))
}

fn iso3() -> impl Strategy<Value = Isometry> {
    (cplx(), cplx(), cplx()).prop_filter("a away from 0", |(a, _, _)| a.norm() > 0.3).prop_map(|(a, b, c)| {
        Isometry::new(Dim::Three, a, b, c, (C64::new(1.0, 0.0) + b * c) / a).unwrap()
    })
}

fn bpt2() -> impl Strategy<Value = BoundaryPoint> {
    prop_oneof![1 => Just(BoundaryPoint::Infinity), 6 => (-4.0..4.0f64).prop_map(BoundaryPoint::real)]
}

fn body2() -> impl Strategy<Value = ConvexBody> {
    prop_oneof![
        point2().prop_map(ConvexBody::Point),
        (bpt2(), -2.0..1.0f64).prop_map(|(c, l)| ConvexBody::horoball(Dim::Two, c, l.exp()).unwrap()),
        (bpt2(), bpt2())
            .prop_filter("distinct", |(a, b)| !a.approx_eq(b, 1e-3))
            .prop_map(|(a, b)| ConvexBody::geodesic(Dim::Two, a, b).unwrap()),
    ]
}

fn bpt3() -> impl Strategy<Value = BoundaryPoint> {
    prop_oneof![1 => Just(BoundaryPoint::Infinity), 6 => (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(x, y)| BoundaryPoint::Finite(C64::new(x, y)))]
}

fn body3() -> impl Strategy<Value = ConvexBody> {
    prop_oneof![
        point3().prop_map(ConvexBody::Point),
        (bpt3(), -2.0..1.0f64).prop_map(|(c, l)| ConvexBody::horoball(Dim::Three, c, l.exp()).unwrap()),
        (bpt3(), bpt3())
            .prop_filter("distinct", |(a, b)| !a.approx_eq(b, 1e-3))
            .prop_map(|(a, b)| ConvexBody::geodesic(Dim::Three, a, b).unwrap()),
    ]
}

fn tangent2() -> impl Strategy<Value = UnitTangent> {
    (point2(), 0.0..core::f64::consts::TAU)
        .prop_map(|(p, a)| UnitTangent::new(p, C64::new(a.cos(), 0.0), a.sin()).unwrap())
}

fn tangent3() -> impl Strategy<Value = UnitTangent> {
    (point3(), 0.0..core::f64::consts::TAU, -1.2..1.2f64).prop_map(|(p, a, e)| {
        UnitTangent::new(p, C64::new(a.cos() * e.cos(), a.sin() * e.cos()), e.sin()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn metric_axioms(p in point3(), q in point3(), r in point3()) {
        let pq = hyp_dist(&p, &q).unwrap();
        prop_assert_eq!(pq, hyp_dist(&q, &p).unwrap());
        prop_assert!(hyp_dist(&p, &p).unwrap() == 0.0);
        prop_assert!(pq <= hyp_dist(&p, &r).unwrap() + hyp_dist(&r, &q).unwrap() + 1e-10);
    }

    #[test]
    fn isometries_preserve_distance(g in iso3(), p in point3(), q in point3()) {
        let d = hyp_dist(&p, &q).unwrap();
        let e = hyp_dist(&g.apply_point(&p), &g.apply_point(&q)).unwrap();
        prop_assert!((d - e).abs() <= 1e-9 * (1.0 + d));
    }

    #[test]
    fn busemann_cocycle(xi in bpt3(), x in point3(), y in point3(), z in point3()) {
        let lhs = busemann(xi, &x, &z).unwrap() + busemann(xi, &z, &y).unwrap();
        prop_assert!((lhs - busemann(xi, &x, &y).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn busemann_equivariance(g in iso3(), xi in bpt3(), x in point3(), y in point3()) {
        let b = busemann(xi, &x, &y).unwrap();
        let gb = busemann(g.apply_boundary(&xi), &g.apply_point(&x), &g.apply_point(&y)).unwrap();
        prop_assert!((b - gb).abs() < 1e-9);
    }

    #[test]
    fn busemann_is_a_limit(xi in bpt2(), x in point2(), y in point2()) {
        // Distances from a far point on the ray from (0,1) towards xi.
        let far = match xi {
            BoundaryPoint::Infinity => Point::h2(0.0, 1e7),
            BoundaryPoint::Finite(c) => Point::h2(c.re, 1e-7),
        };
        let approx = hyp_dist(&far, &x).unwrap() - hyp_dist(&far, &y).unwrap();
        prop_assert!((approx - busemann(xi, &x, &y).unwrap()).abs() < 1e-5);
    }

    #[test]
    fn flow_group_law(v in tangent3(), a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let lhs = geodesic_flow(&geodesic_flow(&v, a), b);
        let rhs = geodesic_flow(&v, a + b);
        prop_assert!(lhs.deviation(&rhs) < 1e-8);
        prop_assert!((hyp_dist(&v.base, &geodesic_flow(&v, a).base).unwrap() - a.abs()).abs() < 1e-9);
    }

    #[test]
    fn flow_shifts_time(v in tangent2(), t in -3.0..3.0f64) {
        let w = geodesic_flow(&v, t);
        prop_assert!((w.time() - v.time() - t).abs() < 1e-8);
        let (m, p) = v.endpoints();
        let (m2, p2) = w.endpoints();
        prop_assert!(m.approx_eq(&m2, 1e-9) && p.approx_eq(&p2, 1e-9));
    }

    #[test]
    fn tangent_equivariance(g in iso3(), v in tangent3(), t in -2.0..2.0f64) {
        let a = geodesic_flow(&v.apply(&g), t);
        let b = geodesic_flow(&v, t).apply(&g);
        prop_assert!(a.deviation(&b) < 1e-8);
    }

    #[test]
    fn perpendicular_invariance(g in iso2(), a in body2(), b in body2()) {
        if let Ok(p) = common_perpendicular(&a, &b) {
            let q = common_perpendicular(&a.apply(&g), &b.apply(&g)).unwrap();
            prop_assert!((p.length - q.length).abs() < 1e-9 * (1.0 + p.length));
            let w = geodesic_flow(&p.v_minus, p.length);
            prop_assert!(w.deviation(&p.v_plus) < 1e-8);
        }
    }

    #[test]
    fn perpendicular_invariance_3d(g in iso3(), a in body3(), b in body3()) {
        if let Ok(p) = common_perpendicular(&a, &b) {
            let q = common_perpendicular(&a.apply(&g), &b.apply(&g)).unwrap();
            prop_assert!((p.length - q.length).abs() < 1e-9 * (1.0 + p.length));
            prop_assert!(a.contains(&p.foot_minus, 1e-8) && b.contains(&p.foot_plus, 1e-8));
        }
    }

    #[test]
    fn perpendicular_is_shortest(a in body3(), b in body3(), s in prop::collection::vec(-3.0..3.0f64, 4)) {
        if let Ok(p) = common_perpendicular(&a, &b) {
            let na = boundary_params(&a);
            let nb = boundary_params(&b);
            let x = numeric::boundary_point(&a, &s[..na]);
            let y = numeric::boundary_point(&b, &s[2..2 + nb]);
            prop_assert!(hyp_dist(&x, &y).unwrap() >= p.length - 1e-8);
        }
    }

    #[test]
    fn hamenstadt_scaling(v in tangent2(), x in -1.0..1.0f64, s in -2.0..2.0f64) {
        // A second vector on the strong unstable leaf of v.
        let (m, _) = v.endpoints();
        let n = ConvexBody::horoball(Dim::Two, m, 1.0).unwrap().normalizer();
        let ninv = n.inverse();
        let b = n.apply_point(&v.base);
        let z = UnitTangent::new(Point::h2(b.z.re + x * b.h, b.h), C64::new(0.0, 0.0), -1.0).unwrap().apply(&ninv);
        let d = hamenstadt_distance(&v, &z, Leaf::Su).unwrap();
        prop_assert!((d - x.abs()).abs() < 1e-8);
        let ds = hamenstadt_distance(&geodesic_flow(&v, s), &geodesic_flow(&z, s), Leaf::Su).unwrap();
        prop_assert!((ds - s.exp() * d).abs() < 1e-8 * (1.0 + ds));
        let (vf, zf) = (v.flip(), z.flip());
        let dss = hamenstadt_distance(&geodesic_flow(&vf, s), &geodesic_flow(&zf, s), Leaf::Ss).unwrap();
        prop_assert!((dss - (-s).exp() * d).abs() < 1e-8 * (1.0 + dss));
        // Distance between base points never exceeds the leaf distance.
        prop_assert!(hyp_dist(&v.base, &z.base).unwrap() <= d + 1e-9);
    }

    #[test]
    fn nbhd_constructive(w in tangent2(), x in -0.99..0.99f64, s in -0.99..0.99f64, eta in 0.05..1.0f64, etap in 0.05..1.0f64) {
        // z on the strong stable leaf of w at leaf distance |x|·η′, flowed by s·η.
        let (_, p) = w.endpoints();
        let n = ConvexBody::horoball(Dim::Two, p, 1.0).unwrap().normalizer();
        let b = n.apply_point(&w.base);
        let z = UnitTangent::new(Point::h2(b.z.re + x * etap * b.h, b.h), C64::new(0.0, 0.0), 1.0).unwrap().apply(&n.inverse());
        let v = geodesic_flow(&z, s * eta);
        let spec = DynNbhdSpec::new(w, eta, etap, Sign::Plus).unwrap();
        prop_assert!(dyn_nbhd_contains(&spec, &v));
        let spec_m = DynNbhdSpec::new(w.flip(), eta, etap, Sign::Minus).unwrap();
        prop_assert!(dyn_nbhd_contains(&spec_m, &v.flip()));
        prop_assert!(!dyn_nbhd_contains(&spec, &geodesic_flow(&v, 2.0 * eta)));
    }

    #[test]
    fn right_triangle_tan_bound(c in point2(), ang in 0.0..core::f64::consts::TAU, la in 0.01..4.0f64, lb in 0.01..4.0f64) {
        // Right angle at C; α at A opposite the side a = CB; b = CA.
        let u = UnitTangent::new(c, C64::new(ang.cos(), 0.0), ang.sin()).unwrap();
        let w = UnitTangent::new(c, C64::new(-ang.sin(), 0.0), ang.cos()).unwrap();
        let a_pt = geodesic_flow(&u, lb).base;
        let b_pt = geodesic_flow(&w, la).base;
        let t1 = UnitTangent::towards(&a_pt, &c).unwrap();
        let t2 = UnitTangent::towards(&a_pt, &b_pt).unwrap();
        let alpha = (t1.dz.re * t2.dz.re + t1.dh * t2.dh).clamp(-1.0, 1.0).acos();
        let bound = trig(TrigQuery::TriangleTanBound { b: lb }).unwrap();
        prop_assert!(alpha.tan() <= bound * (1.0 + 1e-9));
        prop_assert!((alpha.tan() - la.tanh() / lb.sinh()).abs() < 1e-7 * (1.0 + bound));
    }
}

#[test]
fn closed_form_distance_matches_path_oracle() {
    let p = Point::h2(0.0, 1.0);
    let q = Point::h2(1.0, 1.0);
    let approx = path_length(&p, &q, 400);
    let exact = hyp_dist(&p, &q).unwrap();
    assert!(approx >= exact - 1e-12);
    assert!(approx - exact < 1e-4, "{approx} vs {exact}");
}

#[test]
fn closed_forms_match_numeric_minimization() {
    let cases = [
        (
            ConvexBody::horoball(Dim::Two, BoundaryPoint::Infinity, core::f64::consts::E).unwrap(),
            ConvexBody::geodesic_real(-1.0, 1.0).unwrap(),
        ),
        (ConvexBody::geodesic_real(-1.0, 1.0).unwrap(), ConvexBody::geodesic_real(-3.0, 3.0).unwrap()),
        (ConvexBody::geodesic_real(0.2, 1.0).unwrap(), ConvexBody::geodesic_real(2.0, 5.0).unwrap()),
        (
            ConvexBody::horoball(Dim::Two, BoundaryPoint::real(0.3), 0.2).unwrap(),
            ConvexBody::geodesic_real(1.0, 4.0).unwrap(),
        ),
        (
            ConvexBody::horoball(Dim::Two, BoundaryPoint::real(0.3), 0.2).unwrap(),
            ConvexBody::horoball(Dim::Two, BoundaryPoint::real(1.7), 0.5).unwrap(),
        ),
        (ConvexBody::Point(Point::h2(0.5, 0.3)), ConvexBody::geodesic_real(1.0, 4.0).unwrap()),
        (
            ConvexBody::geodesic(Dim::Three, BoundaryPoint::Finite(C64::new(0.0, 1.0)), BoundaryPoint::real(2.0)).unwrap(),
            ConvexBody::geodesic(Dim::Three, BoundaryPoint::Finite(C64::new(-1.0, -1.0)), BoundaryPoint::Finite(C64::new(3.0, 0.5))).unwrap(),
        ),
        (
            ConvexBody::horoball(Dim::Three, BoundaryPoint::Finite(C64::new(0.4, -1.0)), 0.7).unwrap(),
            ConvexBody::geodesic(Dim::Three, BoundaryPoint::Finite(C64::new(-1.0, -1.0)), BoundaryPoint::Finite(C64::new(3.0, 0.5))).unwrap(),
        ),
    ];
    for (a, b) in cases {
        let exact = common_perpendicular(&a, &b).unwrap().length;
        let n = boundary_params(&a) + boundary_params(&b);
        let starts: Vec<Vec<f64>> = (0..6).map(|k| vec![0.7 * k as f64 - 1.7; n]).collect();
        let num = numeric_body_distance(&a, &b, &starts, 2.0);
        assert!((num - exact).abs() < 1e-8, "{a:?} {b:?}: {num} vs {exact}");
    }
}

#[test]
fn nearly_vertical_vectors_keep_their_near_endpoint() {
    let base = Point::h2(-2.8001364907638893, 0.15551905697259738);
    for dz in [3.4e-15, -3.4e-15, 1e-12, -1e-9] {
        let v = UnitTangent::new(base, C64::new(dz, 0.0), 1.0).unwrap();
        let (m, _) = v.endpoints();
        assert!((m.finite().unwrap() - base.z).norm() < 1e-8, "{dz}: {m:?}");
        let w = UnitTangent::new(base, C64::new(dz, 0.0), -1.0).unwrap();
        let (_, p) = w.endpoints();
        assert!((p.finite().unwrap() - base.z).norm() < 1e-8, "{dz}: {p:?}");
        let moved = geodesic_flow(&v, 0.5);
        assert!((moved.base.z - base.z).norm() < 1e-8);
        assert!((moved.base.h - base.h * 0.5f64.exp()).abs() < 1e-9);
    }
}
