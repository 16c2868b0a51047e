use orthocount_core::geom::creation::*;

#[test]
fn creation_gaps_decay_like_half_the_flow_time() {
    let rep = creation_harness(200, &[0.1, 0.5, 1.0], 1.0, 2024).unwrap();
    assert_eq!(rep.samples.len(), 600);
    assert!(rep.c0 <= 100.0, "{}", rep.c0);
    for s in &rep.samples {
        let bound = rep.c0 * (-s.t / 2.0).exp();
        assert!(s.length_gap <= bound);
        assert!(s.foot_gap_minus <= bound && s.foot_gap_plus <= bound);
        assert!(s.s.abs() < 2.0 * s.eta);
        assert!((4.0 - 1.0..=10.0 + 1.0).contains(&s.t));
    }
}

#[test]
fn harness_is_reproducible() {
    let a = creation_harness(10, &[0.5], 1.0, 9).unwrap();
    let b = creation_harness(10, &[0.5], 1.0, 9).unwrap();
    assert_eq!(a, b);
    assert!(creation_harness(1, &[0.0], 1.0, 9).is_err());
}
