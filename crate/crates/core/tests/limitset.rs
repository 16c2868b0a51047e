use std::collections::{BTreeSet, HashMap};
use std::f64::consts::PI;

use orthocount_core::exec::Sequential;
use orthocount_core::geom::*;
use orthocount_core::groups::*;
use orthocount_core::limitset::*;
use orthocount_core::C64;
use proptest::prelude::*;

fn sym() -> GroupSpec {
    preset_schottky_symmetric(3.0, 1.0).unwrap()
}

const BASE: PieceBase = PieceBase::Axis { letter: 0 };

fn words(p: &[LimitPiece]) -> BTreeSet<Vec<u16>> {
    p.iter().map(|x| x.word.clone()).collect()
}

#[test]
fn base_piece_alone_above_its_diameter() {
    let g = sym();
    let all = orbit_pieces(&g, BASE, 1e-3, &Sequential).unwrap();
    let d0 = all[0].diameter;
    let p = orbit_pieces(&g, BASE, d0 * 1.0001, &Sequential).unwrap();
    assert_eq!(p.len(), 1);
    assert!(p[0].word.is_empty());
    assert!(matches!(orbit_pieces(&g, BASE, 0.0, &Sequential), Err(LimitError::InvalidArgument(_))));
    assert!(matches!(orbit_pieces(&preset_modular(), BASE, 0.1, &Sequential), Err(LimitError::NotSchottky)));
}

#[test]
fn pruned_search_matches_exhaustive_words() {
    let g = sym();
    let k = depth_bound(&g, 0.1).unwrap();
    assert!(k <= 12, "{k}");
    let pruned = orbit_pieces(&g, BASE, 0.1, &Sequential).unwrap();
    let deep = exhaustive_pieces(&g, BASE, 0.1, 12).unwrap();
    assert_eq!(pruned.len(), deep.len());
    assert_eq!(words(&pruned), words(&deep));
    assert!(pruned.iter().all(|p| p.word.len() <= k));
    let mut by_word: HashMap<Vec<u16>, f64> = deep.iter().map(|p| (p.word.clone(), p.diameter)).collect();
    for p in &pruned {
        let d = by_word.remove(&p.word).unwrap();
        assert!((d - p.diameter).abs() < 1e-12);
    }
}

#[test]
fn every_piece_is_counted_once_per_coset() {
    let g = sym();
    let pieces = orbit_pieces(&g, BASE, 0.01, &Sequential).unwrap();
    assert_eq!(words(&pieces).len(), pieces.len());
    let inv = g.inverse_letter(0) as u16;
    for p in pieces.iter().skip(1) {
        let last = *p.word.last().unwrap();
        assert!(last != 0 && last != inv);
        for w in p.word.windows(2) {
            assert_ne!(g.inverse_letter(w[0] as usize) as u16, w[1]);
        }
    }
}

#[test]
fn discs_are_nested_and_contain_their_pieces() {
    let g = sym();
    let pieces = exhaustive_pieces(&g, BASE, 1e-9, 6).unwrap();
    let discs: HashMap<Vec<u16>, Circle> = pieces.iter().map(|p| (p.word.clone(), p.disc)).collect();
    let root = root_disc(&g);
    for p in &pieces {
        for e in p.endpoints {
            assert!((e - p.disc.center).norm() <= p.disc.radius * (1.0 + 1e-12));
        }
        assert!((p.disc.center).norm() + p.disc.radius <= root.radius * (1.0 + 1e-12));
        for cut in 1..p.word.len() {
            if let Some(up) = discs.get(&p.word[..cut]) {
                assert!((p.disc.center - up.center).norm() + p.disc.radius < up.radius, "{:?}", p.word);
            }
        }
    }
}

#[test]
fn diameter_counts_of_synthetic_lengths() {
    // Lengths 2 log q with multiplicity φ(q), as for the modular cusp.
    let mut lengths = Vec::new();
    for q in 2u64..=60 {
        for p in 1..q {
            if (1..=p).filter(|d| p % d == 0 && q % d == 0).count() == 1 {
                lengths.push(2.0 * (q as f64).ln());
            }
        }
    }
    let pieces: Vec<LimitPiece> = lengths
        .iter()
        .map(|l| LimitPiece {
            word: vec![1],
            disc: Circle::new(C64::new(0.0, 0.0), 1.0),
            diameter: 2.0 * (-l).exp(),
            endpoints: [C64::new(0.0, 0.0); 2],
        })
        .collect();
    let grid: Vec<f64> = [3.1, 7.7, 20.5, 101.3, 450.2, 1500.9].to_vec();
    let rep = diameter_counts(&pieces, &grid, 1801.0).unwrap();
    for (t, c) in grid.iter().zip(&rep.counts) {
        let want = lengths.iter().filter(|l| **l <= (2.0 * t).ln()).count() as u64;
        assert_eq!(*c, want);
    }
    assert!(rep.counts.windows(2).all(|w| w[0] <= w[1]));
    assert!(matches!(diameter_counts(&pieces, &grid, 1000.0), Err(LimitError::InsufficientRange(_))));
}

#[test]
fn rescaling_the_group_rescales_diameters() {
    let g = sym();
    let h = Isometry::new(Dim::Three, C64::new(2f64.sqrt(), 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0 / 2f64.sqrt(), 0.0)).unwrap();
    let g2 = g.conjugate(&h).unwrap();
    let t_enum = 2000.0;
    let a = orbit_pieces(&g, BASE, 1.0 / t_enum, &Sequential).unwrap();
    let b = orbit_pieces(&g2, BASE, 2.0 / t_enum, &Sequential).unwrap();
    assert_eq!(a.len(), b.len());
    let grid: Vec<f64> = (0..8).map(|k| 10f64.powf(1.0 + 0.25 * k as f64)).collect();
    let half: Vec<f64> = grid.iter().map(|t| t / 2.0).collect();
    let ra = diameter_counts(&a, &grid, t_enum).unwrap();
    let rb = diameter_counts(&b, &half, t_enum / 2.0).unwrap();
    assert_eq!(ra.counts, rb.counts);
    assert!((ra.delta_hat - rb.delta_hat).abs() < 1e-9);
}

#[test]
fn perpendicular_length_is_log_of_two_over_diameter() {
    let g = sym();
    let top = ConvexBody::horoball(Dim::Three, BoundaryPoint::Infinity, 1.0).unwrap();
    let pieces = orbit_pieces(&g, BASE, 1e-5, &Sequential).unwrap();
    assert!(pieces.len() > 50, "{}", pieces.len());
    for p in pieces {
        let axis = ConvexBody::geodesic(Dim::Three, BoundaryPoint::Finite(p.endpoints[0]), BoundaryPoint::Finite(p.endpoints[1])).unwrap();
        // Axes of diameter at least 2 meet the horoball.
        if p.diameter >= 2.0 {
            assert!(common_perpendicular(&top, &axis).is_err());
            continue;
        }
        let perp = common_perpendicular(&top, &axis).unwrap();
        assert!((perp.length - (2.0 / p.diameter).ln()).abs() < 1e-9, "{:?}", p.word);
    }
}

fn unit(a: f64) -> f64 {
    let w = C64::from_polar(1.0, a);
    let z = C64::new(0.0, 1.0) * (1.0 + w) / (1.0 - w);
    z.re
}

proptest! {
    #[test]
    fn cot_half_angle_is_sinh_distance(a in 0.05f64..6.2, gap in 0.05f64..3.1) {
        let b = a + gap;
        prop_assume!((b - 2.0 * PI).abs() > 0.05 && b < 2.0 * PI - 0.05);
        let hull = ConvexBody::geodesic_real(unit(a), unit(b)).unwrap();
        let o = cayley_from_disc(C64::new(0.0, 0.0)).unwrap();
        let d = hyp_dist(&o, &closest_point(&hull, &o).unwrap()).unwrap();
        let theta = gap / 2.0;
        prop_assert!((1.0 / theta.tan() - d.sinh()).abs() < 1e-8 * (1.0 + d.sinh()));
        let th = trig(TrigQuery::Parallelism { d }).unwrap();
        prop_assert!((th - theta).abs() < 1e-9);
    }
}

#[test]
fn single_disc_pixel_count() {
    let r = 0.5;
    let p = LimitPiece { word: vec![], disc: Circle::new(C64::new(0.0, 0.0), r), diameter: 1.0, endpoints: [C64::new(0.0, 0.0); 2] };
    let w = Window { center: C64::new(0.0, 0.0), half_width: 1.0 };
    let n = 400;
    let img = render_ppm(&[p.clone()], n, &w).unwrap();
    let header = format!("P6\n{n} {n}\n255\n");
    assert!(img.starts_with(header.as_bytes()));
    let body = &img[header.len()..];
    assert_eq!(body.len(), 3 * n * n);
    let set = body.chunks(3).filter(|c| c[0] != 255).count() as f64;
    let px = 2.0 / n as f64;
    let want = PI * r * r / (px * px);
    assert!((set / want - 1.0).abs() < 0.02, "{set} {want}");
    assert_eq!(render_ppm(&[p], n, &w).unwrap(), img);
    assert!(render_ppm(&[], 5000, &w).is_err());
}

#[test]
fn limit_set_image_is_deterministic() {
    let g = sym();
    let pieces = orbit_pieces(&g, BASE, 0.01, &Sequential).unwrap();
    let w = Window::fit(&pieces);
    let a = render_ppm(&pieces, 128, &w).unwrap();
    let b = render_ppm(&pieces, 128, &w).unwrap();
    assert_eq!(a, b);
    assert!(a[15..].iter().any(|x| *x != 255));
}

#[test]
fn contraction_bound_controls_depth() {
    let g = sym();
    let lam = contraction_bound(&g);
    assert!(lam > 0.0 && lam < 1.0);
    let far = preset_schottky_symmetric(6.0, 1.0).unwrap();
    assert!(contraction_bound(&far) < lam);
    assert!(depth_bound(&far, 0.1).unwrap() <= depth_bound(&g, 0.1).unwrap());
    for p in exhaustive_pieces(&g, BASE, 1e-12, 8).unwrap().iter().filter(|p| !p.word.is_empty()) {
        let k = p.word.len() as i32;
        assert!(2.0 * p.disc.radius <= 2.0 * lam.powi(k - 1) * (1.0 + 1e-9));
    }
}
