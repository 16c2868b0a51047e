use num_traits::Float;

use super::body::closest_point;
use super::point::{chordal, dist_raw};
use super::{BoundaryPoint, ConvexBody, GeomError, Point, UnitTangent};
use crate::C64;

const TANGENT_TOL: f64 = 1e-9;

/// Common perpendicular from `D⁻` to `D⁺`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CommonPerp {
    pub length: f64,
    /// Initial vector, an outer normal of `D⁻`.
    pub v_minus: UnitTangent,
    /// Terminal vector, an inner normal of `D⁺`.
    pub v_plus: UnitTangent,
    pub foot_minus: Point,
    pub foot_plus: Point,
}

/// Why a pair of bodies has no common perpendicular.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PerpOutcome {
    Intersect,
    Tangent,
}

impl From<PerpOutcome> for GeomError {
    fn from(o: PerpOutcome) -> Self {
        match o {
            PerpOutcome::Intersect => GeomError::BodiesIntersect,
            PerpOutcome::Tangent => GeomError::Tangent,
        }
    }
}

/// Length and feet of the perpendicular from the standard body of `d_minus`'s
/// kind to `b`, in normalized coordinates.
fn standard(d_minus: &ConvexBody, b: &ConvexBody) -> Result<(f64, Point, Point), PerpOutcome> {
    use PerpOutcome::*;
    let dim = b.dim();
    let zero = C64::new(0.0, 0.0);
    let classify = |l: f64| {
        if l > TANGENT_TOL {
            Ok(l)
        } else if l >= -TANGENT_TOL {
            Err(Tangent)
        } else {
            Err(Intersect)
        }
    };
    match d_minus {
        ConvexBody::Point(_) => {
            let o = Point::origin(dim);
            let q = match b {
                ConvexBody::Point(q) => *q,
                _ if b.contains(&o, 1e-12) => return Err(Intersect),
                _ => closest_point(b, &o).map_err(|_| Intersect)?,
            };
            let l = dist_raw(&o, &q);
            if l <= 1e-12 {
                return Err(Intersect);
            }
            Ok((l, o, q))
        }
        ConvexBody::Horoball { .. } => match *b {
            ConvexBody::Point(q) => {
                if q.h >= 1.0 {
                    return Err(Intersect);
                }
                Ok((-q.h.ln(), Point::raw(dim, q.z, 1.0), q))
            }
            ConvexBody::Horoball { center: BoundaryPoint::Infinity, .. } => Err(Intersect),
            ConvexBody::Horoball { center: BoundaryPoint::Finite(c), level, .. } => {
                let l = classify(-level.ln())?;
                Ok((l, Point::raw(dim, c, 1.0), Point::raw(dim, c, level)))
            }
            ConvexBody::Geodesic { ends, .. } => {
                let (Some(a), Some(e)) = (ends[0].finite(), ends[1].finite()) else {
                    return Err(Intersect);
                };
                let r = 0.5 * (a - e).norm();
                let m = (a + e) * 0.5;
                let l = classify(-r.ln())?;
                Ok((l, Point::raw(dim, m, 1.0), Point::raw(dim, m, r)))
            }
        },
        ConvexBody::Geodesic { .. } => {
            let at_end = |x: &BoundaryPoint| match x {
                BoundaryPoint::Infinity => true,
                BoundaryPoint::Finite(c) => c.norm() <= 1e-12,
            };
            match *b {
                ConvexBody::Point(q) => {
                    let l = (q.z.norm() / q.h).asinh();
                    if l <= 1e-12 {
                        return Err(Intersect);
                    }
                    let foot = Point::raw(dim, zero, (q.z.norm_sqr() + q.h * q.h).sqrt());
                    Ok((l, foot, q))
                }
                ConvexBody::Horoball { center, level, .. } => {
                    if at_end(&center) {
                        return Err(Intersect);
                    }
                    let c = center.finite().unwrap_or(zero);
                    let l = classify((2.0 * c.norm() / level).ln())?;
                    let foot = Point::raw(dim, zero, c.norm());
                    let q = closest_point(b, &foot).map_err(|_| Intersect)?;
                    Ok((l, foot, q))
                }
                ConvexBody::Geodesic { ends, .. } => {
                    let (e0, e1) = (at_end(&ends[0]), at_end(&ends[1]));
                    if e0 && e1 {
                        return Err(Intersect);
                    }
                    if e0 || e1 {
                        return Err(Tangent);
                    }
                    let (a, e) = (ends[0].finite().unwrap_or(zero), ends[1].finite().unwrap_or(zero));
                    let w = (e / a).sqrt();
                    let l = ((w + 1.0) / (w - 1.0)).norm().ln().abs();
                    if l <= TANGENT_TOL {
                        return Err(Intersect);
                    }
                    let foot = Point::raw(dim, zero, (a.norm() * e.norm()).sqrt());
                    let q = closest_point(b, &foot).map_err(|_| Intersect)?;
                    Ok((l, foot, q))
                }
            }
        }
    }
}

/// The common perpendicular from `dm` to `dp`. Bodies whose closures meet in
/// a single point give [`GeomError::Tangent`]; overlapping bodies give
/// [`GeomError::BodiesIntersect`].
pub fn common_perpendicular(dm: &ConvexBody, dp: &ConvexBody) -> Result<CommonPerp, GeomError> {
    if dm.dim() != dp.dim() {
        return Err(GeomError::DimensionMismatch);
    }
    for x in dm.ideal_points() {
        for y in dp.ideal_points() {
            if chordal(x, y) <= 1e-12 {
                return Err(shared_ideal_point(dm, dp).into());
            }
        }
    }
    let n = dm.normalizer();
    let b = dp.apply(&n);
    let (length, fm, fp) = standard(dm, &b)?;
    let inv = n.inverse();
    let foot_minus = match dm {
        ConvexBody::Point(p) => *p,
        _ => inv.apply_point(&fm),
    };
    let foot_plus = match dp {
        ConvexBody::Point(p) => *p,
        _ => inv.apply_point(&fp),
    };
    let v_minus = UnitTangent::towards(&foot_minus, &foot_plus)?;
    let v_plus = UnitTangent::towards(&foot_plus, &foot_minus)?.flip();
    Ok(CommonPerp { length, v_minus, v_plus, foot_minus, foot_plus })
}

/// Two bodies sharing a point at infinity: horoballs with the same center
/// are nested; a geodesic ending at a horoball's center enters it; two
/// geodesics with one common end are asymptotic.
fn shared_ideal_point(dm: &ConvexBody, dp: &ConvexBody) -> PerpOutcome {
    match (dm, dp) {
        (ConvexBody::Geodesic { .. }, ConvexBody::Geodesic { .. }) => {
            if dm.approx_eq(dp, 1e-12) {
                PerpOutcome::Intersect
            } else {
                PerpOutcome::Tangent
            }
        }
        _ => PerpOutcome::Intersect,
    }
}
