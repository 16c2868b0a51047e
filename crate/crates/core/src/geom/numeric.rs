//! Derivative-free minimizers used as independent oracles for the closed
//! forms of the kernel.

use alloc::vec::Vec;

use num_traits::Float;

use super::point::dist_raw;
use super::{ConvexBody, Dim, Point};
use crate::C64;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a minimum of a unimodal `f` on `[lo, hi]`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, floor: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iters = 0;
    while hi - lo > floor.max(4.0 * f64::EPSILON * (lo.abs() + hi.abs())) && iters < 200 {
        iters += 1;
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Coordinate descent with golden-section line searches in windows of
/// shrinking width around the current iterate.
pub fn coordinate_descent<F: FnMut(&[f64]) -> f64>(mut f: F, start: &[f64], width: f64, floor: f64) -> (Vec<f64>, f64) {
    let mut x = start.to_vec();
    let mut best = f(&x);
    let mut w = width;
    let mut rounds = 0;
    while w > floor && rounds < 400 {
        rounds += 1;
        let before = best;
        for i in 0..x.len() {
            let c = x[i];
            let (xi, fi) = golden_section(
                |t| {
                    let mut y = x.clone();
                    y[i] = t;
                    f(&y)
                },
                c - w,
                c + w,
                floor,
            );
            if fi < best {
                best = fi;
                x[i] = xi;
            }
        }
        if before - best <= 1e-15 * best.abs().max(1e-300) {
            w *= 0.5;
        }
    }
    (x, best)
}

/// Number of real parameters describing the boundary of a body.
pub fn boundary_params(b: &ConvexBody) -> usize {
    match (b, b.dim()) {
        (ConvexBody::Point(_), _) => 0,
        (ConvexBody::Geodesic { .. }, _) => 1,
        (ConvexBody::Horoball { .. }, Dim::Two) => 1,
        (ConvexBody::Horoball { .. }, Dim::Three) => 2,
    }
}

/// Point of the body's boundary for the given parameters: arclength along a
/// geodesic, or horospherical coordinates on a horosphere.
pub fn boundary_point(b: &ConvexBody, params: &[f64]) -> Point {
    let dim = b.dim();
    let inv = b.normalizer().inverse();
    let std = match b {
        ConvexBody::Point(p) => return *p,
        ConvexBody::Geodesic { .. } => Point::raw(dim, C64::new(0.0, 0.0), params[0].exp()),
        ConvexBody::Horoball { .. } => {
            let im = if dim == Dim::Three { params[1] } else { 0.0 };
            Point::raw(dim, C64::new(params[0], im), 1.0)
        }
    };
    inv.apply_point(&std)
}

/// Numerically minimized distance between the boundaries of two bodies.
pub fn numeric_body_distance(a: &ConvexBody, b: &ConvexBody, starts: &[Vec<f64>], width: f64) -> f64 {
    let na = boundary_params(a);
    let f = |x: &[f64]| dist_raw(&boundary_point(a, &x[..na]), &boundary_point(b, &x[na..]));
    starts
        .iter()
        .map(|s| coordinate_descent(f, s, width, 1e-12).1)
        .fold(f64::INFINITY, f64::min)
}

/// Riemannian length of the best path from `p` to `q` in the vertical plane
/// through them, among paths `x(s) = x_p + s Δx + Σ a_j sin(jπs)`,
/// `log h(s) = (1 − s) log h_p + s log h_q + Σ b_j sin(jπs)`, integrated
/// over `k` segments. Converges to the distance from above.
pub fn path_length(p: &Point, q: &Point, k: usize) -> f64 {
    const M: usize = 4;
    let dz = q.z - p.z;
    let lp = p.h.ln();
    let lq = q.h.ln();
    let len = |c: &[f64]| {
        let at = |s: f64| {
            let mut x = s * dz.norm();
            let mut l = (1.0 - s) * lp + s * lq;
            for j in 0..M {
                let w = ((j + 1) as f64 * core::f64::consts::PI * s).sin();
                x += c[j] * w;
                l += c[M + j] * w;
            }
            (x, l.exp())
        };
        let mut total = 0.0;
        let (mut x0, mut h0) = at(0.0);
        for i in 1..=k {
            let (x1, h1) = at(i as f64 / k as f64);
            let e = ((x1 - x0).powi(2) + (h1 - h0).powi(2)).sqrt();
            // Exact length of the Euclidean segment, along which h is affine.
            let r = h1 / h0;
            total += if (r - 1.0).abs() < 1e-9 { e / h0 } else { e * r.ln() / (h1 - h0) };
            x0 = x1;
            h0 = h1;
        }
        total
    };
    let start = [0.0; 2 * M];
    coordinate_descent(len, &start, 1.0, 1e-7).1
}
