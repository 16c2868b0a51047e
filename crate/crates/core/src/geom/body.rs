use num_traits::Float;

use super::point::chordal;
use super::{BoundaryPoint, Dim, GeomError, Isometry, Point};
use crate::C64;

/// Nonempty proper closed convex body of one of the three supported kinds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConvexBody {
    Point(Point),
    /// `level` is the Euclidean diameter of the bounding sphere for a finite
    /// center and the height of the bounding plane for the center at infinity.
    Horoball { center: BoundaryPoint, level: f64, dim: Dim },
    Geodesic { ends: [BoundaryPoint; 2], dim: Dim },
}

fn check_boundary(dim: Dim, x: &BoundaryPoint) -> Result<(), GeomError> {
    match x {
        BoundaryPoint::Finite(z) if !z.re.is_finite() || !z.im.is_finite() => {
            Err(GeomError::InvalidBody("non-finite boundary coordinate"))
        }
        BoundaryPoint::Finite(z) if dim == Dim::Two && z.im != 0.0 => {
            Err(GeomError::InvalidBody("planar boundary point with imaginary part"))
        }
        _ => Ok(()),
    }
}

fn fix(dim: Dim, x: BoundaryPoint) -> BoundaryPoint {
    match (dim, x) {
        (Dim::Two, BoundaryPoint::Finite(z)) => BoundaryPoint::Finite(C64::new(z.re, 0.0)),
        _ => x,
    }
}

impl ConvexBody {
    pub fn horoball(dim: Dim, center: BoundaryPoint, level: f64) -> Result<Self, GeomError> {
        check_boundary(dim, &center)?;
        if !(level > 0.0) || !level.is_finite() {
            return Err(GeomError::InvalidBody("horoball level must be positive"));
        }
        Ok(ConvexBody::Horoball { center, level, dim })
    }

    pub fn geodesic(dim: Dim, a: BoundaryPoint, b: BoundaryPoint) -> Result<Self, GeomError> {
        check_boundary(dim, &a)?;
        check_boundary(dim, &b)?;
        if chordal(a, b) <= 1e-12 {
            return Err(GeomError::InvalidBody("geodesic endpoints coincide"));
        }
        Ok(ConvexBody::Geodesic { ends: [a, b], dim })
    }

    /// Planar geodesic between two real endpoints.
    pub fn geodesic_real(a: f64, b: f64) -> Result<Self, GeomError> {
        Self::geodesic(Dim::Two, BoundaryPoint::real(a), BoundaryPoint::real(b))
    }

    pub fn dim(&self) -> Dim {
        match self {
            ConvexBody::Point(p) => p.dim,
            ConvexBody::Horoball { dim, .. } | ConvexBody::Geodesic { dim, .. } => *dim,
        }
    }

    pub fn apply(&self, g: &Isometry) -> ConvexBody {
        match *self {
            ConvexBody::Point(p) => ConvexBody::Point(g.apply_point(&p)),
            ConvexBody::Geodesic { ends, dim } => ConvexBody::Geodesic {
                ends: [fix(dim, g.apply_boundary(&ends[0])), fix(dim, g.apply_boundary(&ends[1]))],
                dim,
            },
            ConvexBody::Horoball { center, level, dim } => {
                let on = match center {
                    BoundaryPoint::Infinity => Point::raw(dim, C64::new(0.0, 0.0), level),
                    BoundaryPoint::Finite(c) => Point::raw(dim, c, level),
                };
                let x = g.apply_point(&on);
                let center = fix(dim, g.apply_boundary(&center));
                let level = match center {
                    BoundaryPoint::Infinity => x.h,
                    BoundaryPoint::Finite(c) => ((x.z - c).norm_sqr() + x.h * x.h) / x.h,
                };
                ConvexBody::Horoball { center, level, dim }
            }
        }
    }

    /// Isometry taking the body to standard position: the point `(0,1)`, the
    /// horoball `{h ≥ 1}`, or the geodesic from `0` to `∞`.
    pub fn normalizer(&self) -> Isometry {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        match *self {
            ConvexBody::Point(p) => {
                let s = p.h.sqrt();
                let m = Isometry { a: one / s, b: -p.z / s, c: zero, d: one * s, dim: p.dim };
                m.canonical()
            }
            ConvexBody::Horoball { center: BoundaryPoint::Infinity, level, dim } => {
                let s = level.sqrt();
                Isometry { a: one / s, b: zero, c: zero, d: one * s, dim }
            }
            ConvexBody::Horoball { center: BoundaryPoint::Finite(c), level, dim } => {
                Isometry::scaled(dim, zero, -one * level, one, -c).expect("positive level")
            }
            ConvexBody::Geodesic { ends, dim } => geodesic_normalizer(dim, ends[0], ends[1]),
        }
    }

    /// Whether `x` lies in the body, up to `tol` in distance.
    pub fn contains(&self, x: &Point, tol: f64) -> bool {
        let n = self.normalizer();
        let y = n.apply_point(x);
        match self {
            ConvexBody::Point(p) => super::point::dist_raw(p, x) <= tol,
            ConvexBody::Horoball { .. } => y.h.ln() >= -tol,
            ConvexBody::Geodesic { .. } => (y.z.norm() / y.h).asinh() <= tol,
        }
    }

    /// Equality of bodies up to `tol` (distance for points, chordal distance
    /// for boundary data, relative error for horoball levels).
    pub fn approx_eq(&self, other: &ConvexBody, tol: f64) -> bool {
        match (self, other) {
            (ConvexBody::Point(p), ConvexBody::Point(q)) => {
                p.dim == q.dim && super::point::dist_raw(p, q) <= tol
            }
            (
                ConvexBody::Horoball { center: c1, level: l1, dim: d1 },
                ConvexBody::Horoball { center: c2, level: l2, dim: d2 },
            ) => d1 == d2 && chordal(*c1, *c2) <= tol && (l1 / l2).ln().abs() <= tol,
            (ConvexBody::Geodesic { ends: e1, dim: d1 }, ConvexBody::Geodesic { ends: e2, dim: d2 }) => {
                d1 == d2
                    && ((chordal(e1[0], e2[0]) <= tol && chordal(e1[1], e2[1]) <= tol)
                        || (chordal(e1[0], e2[1]) <= tol && chordal(e1[1], e2[0]) <= tol))
            }
            _ => false,
        }
    }

    /// Boundary points at infinity of the body.
    pub fn ideal_points(&self) -> alloc::vec::Vec<BoundaryPoint> {
        match *self {
            ConvexBody::Point(_) => alloc::vec![],
            ConvexBody::Horoball { center, .. } => alloc::vec![center],
            ConvexBody::Geodesic { ends, .. } => alloc::vec![ends[0], ends[1]],
        }
    }
}

/// Isometry sending `p` to `0` and `q` to `∞`.
pub(crate) fn geodesic_normalizer(dim: Dim, p: BoundaryPoint, q: BoundaryPoint) -> Isometry {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    match (p, q) {
        (BoundaryPoint::Infinity, BoundaryPoint::Finite(q)) => {
            Isometry { a: zero, b: -one, c: one, d: -q, dim }.canonical()
        }
        (BoundaryPoint::Finite(p), BoundaryPoint::Infinity) => {
            Isometry { a: one, b: -p, c: zero, d: one, dim }.canonical()
        }
        (BoundaryPoint::Finite(p), BoundaryPoint::Finite(q)) => {
            if dim == Dim::Two && p.re < q.re {
                Isometry::scaled(dim, -one, p, one, -q).expect("distinct endpoints")
            } else {
                Isometry::scaled(dim, one, -p, one, -q).expect("distinct endpoints")
            }
        }
        _ => Isometry::identity(dim),
    }
}

/// Closest point of `d` to the point `x`.
pub fn closest_point(d: &ConvexBody, x: &Point) -> Result<Point, GeomError> {
    if d.dim() != x.dim {
        return Err(GeomError::DimensionMismatch);
    }
    let n = d.normalizer();
    let y = n.apply_point(x);
    let std = match d {
        ConvexBody::Point(_) => Point::origin(x.dim),
        ConvexBody::Horoball { .. } => Point::raw(x.dim, y.z, y.h.max(1.0)),
        ConvexBody::Geodesic { .. } => {
            Point::raw(x.dim, C64::new(0.0, 0.0), (y.z.norm_sqr() + y.h * y.h).sqrt())
        }
    };
    let out = n.inverse().apply_point(&std);
    Ok(match d {
        ConvexBody::Point(p) => *p,
        _ => out,
    })
}

/// Point of `d` minimizing the Busemann function of `xi`.
pub fn closest_point_boundary(d: &ConvexBody, xi: &BoundaryPoint) -> Result<Point, GeomError> {
    let dim = d.dim();
    check_boundary(dim, xi)?;
    let n = d.normalizer();
    let e = n.apply_boundary(xi);
    let std = match (d, e) {
        (ConvexBody::Point(p), _) => return Ok(*p),
        (ConvexBody::Horoball { .. }, BoundaryPoint::Infinity) => {
            return Err(GeomError::BoundaryInsideBody)
        }
        (ConvexBody::Horoball { .. }, BoundaryPoint::Finite(c)) => Point::raw(dim, c, 1.0),
        (ConvexBody::Geodesic { .. }, BoundaryPoint::Infinity) => {
            return Err(GeomError::BoundaryInsideBody)
        }
        (ConvexBody::Geodesic { .. }, BoundaryPoint::Finite(c)) => {
            let r = c.norm();
            if r <= 1e-12 || r.recip() <= 1e-12 {
                return Err(GeomError::BoundaryInsideBody);
            }
            Point::raw(dim, C64::new(0.0, 0.0), r)
        }
    };
    Ok(n.inverse().apply_point(&std))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::hyp_dist;

    #[test]
    fn apex_is_closest() {
        let g = ConvexBody::geodesic_real(-1.0, 1.0).unwrap();
        let p = closest_point(&g, &Point::h2(0.0, 2.0)).unwrap();
        assert!(hyp_dist(&p, &Point::h2(0.0, 1.0)).unwrap() < 1e-12);
        let q = closest_point_boundary(&g, &BoundaryPoint::Infinity).unwrap();
        assert!(hyp_dist(&q, &Point::h2(0.0, 1.0)).unwrap() < 1e-12);
        assert_eq!(
            closest_point_boundary(&g, &BoundaryPoint::real(1.0)),
            Err(GeomError::BoundaryInsideBody)
        );
    }

    #[test]
    fn vertical_projection_to_horoball() {
        let hb = ConvexBody::horoball(Dim::Two, BoundaryPoint::Infinity, 1.0).unwrap();
        let p = closest_point(&hb, &Point::h2(0.0, 0.25)).unwrap();
        assert!(hyp_dist(&p, &Point::h2(0.0, 1.0)).unwrap() < 1e-12);
    }

    #[test]
    fn parabolic_keeps_horoball() {
        let t = Isometry::real(1.0, 1.0, 0.0, 1.0).unwrap();
        let hb = ConvexBody::horoball(Dim::Two, BoundaryPoint::Infinity, 1.0).unwrap();
        assert!(hb.apply(&t).approx_eq(&hb, 1e-12));
    }

    #[test]
    fn inversion_maps_horoball_to_ford_circle() {
        let s = Isometry::real(0.0, -1.0, 1.0, 0.0).unwrap();
        let hb = ConvexBody::horoball(Dim::Two, BoundaryPoint::Infinity, 1.0).unwrap();
        let img = hb.apply(&s);
        let want = ConvexBody::horoball(Dim::Two, BoundaryPoint::real(0.0), 1.0).unwrap();
        assert!(img.approx_eq(&want, 1e-12));
    }

    #[test]
    fn normalizers_reach_standard_position() {
        let g = ConvexBody::geodesic_real(2.0, -3.0).unwrap();
        let n = g.normalizer();
        assert!(n.det().re > 0.0);
        let std = g.apply(&n);
        let axis = ConvexBody::geodesic(Dim::Two, BoundaryPoint::real(0.0), BoundaryPoint::Infinity).unwrap();
        assert!(std.approx_eq(&axis, 1e-12));
        let hb = ConvexBody::horoball(Dim::Two, BoundaryPoint::real(0.5), 0.25).unwrap();
        let top = ConvexBody::horoball(Dim::Two, BoundaryPoint::Infinity, 1.0).unwrap();
        assert!(hb.apply(&hb.normalizer()).approx_eq(&top, 1e-12));
    }
}
