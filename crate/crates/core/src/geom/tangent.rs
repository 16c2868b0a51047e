use num_traits::Float;

use super::body::geodesic_normalizer;
use super::point::{chordal, dist_raw, height_towards};
use super::{BoundaryPoint, Dim, GeomError, Isometry, Point};
use crate::tol::Tolerances;
use crate::C64;

/// Unit tangent vector. The direction is stored as a Euclidean unit vector
/// `(dz, dh)`; the hyperbolic vector is `h · (dz, dh)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitTangent {
    pub base: Point,
    pub dz: C64,
    pub dh: f64,
}

impl UnitTangent {
    pub fn new(base: Point, dz: C64, dh: f64) -> Result<Self, GeomError> {
        let n = (dz.norm_sqr() + dh * dh).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(GeomError::InvalidTangent("zero direction"));
        }
        if base.dim == Dim::Two && dz.im != 0.0 {
            return Err(GeomError::InvalidTangent("planar vector with imaginary part"));
        }
        Ok(UnitTangent { base, dz: dz / n, dh: dh / n })
    }

    /// The unit vector at `base` tangent to the geodesic from `minus` to
    /// `plus`, pointing towards `plus`. `base` must lie on that geodesic.
    pub fn on_geodesic(base: Point, minus: BoundaryPoint, plus: BoundaryPoint) -> Self {
        let (dz, dh) = direction_on(&base, minus, plus);
        UnitTangent { base, dz, dh }
    }

    /// The unit vector at the point of the geodesic `(minus, plus)` closest
    /// to `near`.
    pub fn from_endpoints(minus: BoundaryPoint, plus: BoundaryPoint, near: &Point) -> Result<Self, GeomError> {
        if chordal(minus, plus) <= 1e-12 {
            return Err(GeomError::InvalidTangent("endpoints coincide"));
        }
        let n = geodesic_normalizer(near.dim, minus, plus);
        let y = n.apply_point(near);
        let top = Point::raw(near.dim, C64::new(0.0, 0.0), (y.z.norm_sqr() + y.h * y.h).sqrt());
        Ok(Self::on_geodesic(n.inverse().apply_point(&top), minus, plus))
    }

    /// Initial vector of the geodesic segment from `p` to `q`.
    pub fn towards(p: &Point, q: &Point) -> Result<Self, GeomError> {
        if p.dim != q.dim {
            return Err(GeomError::DimensionMismatch);
        }
        let dz = q.z - p.z;
        let horiz = dz.norm();
        if horiz <= 1e-15 * (p.h + q.h) {
            if q.h == p.h {
                return Err(GeomError::InvalidTangent("coincident points"));
            }
            return Ok(UnitTangent { base: *p, dz: C64::new(0.0, 0.0), dh: (q.h - p.h).signum() });
        }
        // The geodesic is the semicircle centred on the line through p and q
        // whose centre is equidistant from both.
        let u = dz / horiz;
        let s = (q.h * q.h - p.h * p.h + horiz * horiz) / (2.0 * horiz);
        let r = (s * s + p.h * p.h).sqrt();
        Ok(UnitTangent { base: *p, dz: u * (p.h / r), dh: s / r })
    }

    pub fn dim(&self) -> Dim {
        self.base.dim
    }

    /// Endpoints `(v₋, v₊)` of the geodesic line carrying the vector.
    pub fn endpoints(&self) -> (BoundaryPoint, BoundaryPoint) {
        let ez = self.dz.norm();
        let z = self.base.z;
        let h = self.base.h;
        if ez <= 1e-15 {
            let foot = BoundaryPoint::Finite(z);
            return if self.dh > 0.0 { (foot, BoundaryPoint::Infinity) } else { (BoundaryPoint::Infinity, foot) };
        }
        let u = self.dz / ez;
        let t = h * self.dh / ez;
        let r = (t * t + h * h).sqrt();
        // Offsets t ∓ r along u; the small one is rewritten to avoid
        // cancellation when the vector is nearly vertical.
        let (lo, hi) = if t >= 0.0 { (-h * h / (t + r), t + r) } else { (t - r, h * h / (r - t)) };
        (BoundaryPoint::Finite(fix(self.dim(), z + u * lo)), BoundaryPoint::Finite(fix(self.dim(), z + u * hi)))
    }

    /// Signed time coordinate: distance along the geodesic from the point
    /// closest to `(0, 1)`.
    pub fn time(&self) -> f64 {
        let (m, p) = self.endpoints();
        let n = geodesic_normalizer(self.dim(), m, p);
        let b = n.apply_point(&self.base);
        let o = n.apply_point(&Point::origin(self.dim()));
        let r = (o.z.norm_sqr() + o.h * o.h).sqrt();
        ((b.z.norm_sqr() + b.h * b.h).sqrt() / r).ln()
    }

    /// The antipodal vector `ι v`.
    pub fn flip(&self) -> Self {
        UnitTangent { base: self.base, dz: -self.dz, dh: -self.dh }
    }

    pub fn apply(&self, g: &Isometry) -> Self {
        let (m, p) = self.endpoints();
        let base = g.apply_point(&self.base);
        Self::on_geodesic(base, g.apply_boundary(&m), g.apply_boundary(&p))
    }

    /// Distance between base points plus Euclidean angle between directions.
    pub fn deviation(&self, other: &UnitTangent) -> f64 {
        let d = dist_raw(&self.base, &other.base);
        let chord = ((self.dz - other.dz).norm_sqr() + (self.dh - other.dh).powi(2)).sqrt();
        d + 2.0 * (0.5 * chord).min(1.0).asin()
    }
}

fn fix(dim: Dim, mut z: C64) -> C64 {
    if dim == Dim::Two {
        z.im = 0.0;
    }
    z
}

fn direction_on(x: &Point, minus: BoundaryPoint, plus: BoundaryPoint) -> (C64, f64) {
    let zero = C64::new(0.0, 0.0);
    match (minus, plus) {
        (_, BoundaryPoint::Infinity) => (zero, 1.0),
        (BoundaryPoint::Infinity, _) => (zero, -1.0),
        (BoundaryPoint::Finite(p), BoundaryPoint::Finite(q)) => {
            let diam = (q - p).norm();
            let u = (q - p) / diam;
            let m = (p + q) * 0.5;
            let s = ((x.z - m) * u.conj()).re;
            let r = (s * s + x.h * x.h).sqrt();
            (u * (x.h / r), -s / r)
        }
    }
}

/// Geodesic flow for time `t`.
pub fn geodesic_flow(v: &UnitTangent, t: f64) -> UnitTangent {
    if t == 0.0 {
        return *v;
    }
    let (m, p) = v.endpoints();
    let n = geodesic_normalizer(v.dim(), m, p);
    let b = n.apply_point(&v.base);
    let y = (b.z.norm_sqr() + b.h * b.h).sqrt() * t.exp();
    let base = n.inverse().apply_point(&Point::raw(v.dim(), C64::new(0.0, 0.0), y));
    UnitTangent::on_geodesic(base, m, p)
}

/// Leaf of a Hamenstädt distance: strong unstable or strong stable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Leaf {
    Su,
    Ss,
}

const LEAF_TOL: f64 = 1e-8;

fn same_leaf(w: &UnitTangent, z: &UnitTangent, side: Leaf) -> Result<BoundaryPoint, GeomError> {
    if w.dim() != z.dim() {
        return Err(GeomError::DimensionMismatch);
    }
    let (wm, wp) = w.endpoints();
    let (zm, zp) = z.endpoints();
    let (a, b) = match side {
        Leaf::Su => (wm, zm),
        Leaf::Ss => (wp, zp),
    };
    if chordal(a, b) > LEAF_TOL {
        return Err(GeomError::NotSameLeaf);
    }
    let level = (height_towards(a, &z.base) / height_towards(a, &w.base)).ln();
    if level.abs() > LEAF_TOL {
        return Err(GeomError::NotSameLeaf);
    }
    Ok(a)
}

/// Hamenstädt distance `lim e^{d(w(t), z(t))/2 − t}` on the strong unstable
/// leaf (flowing forward) or strong stable leaf (flowing backward).
///
/// The limit is evaluated at `T` and `2T` and extrapolated assuming an error
/// proportional to `e^{-2T}`.
pub fn hamenstadt_distance(w: &UnitTangent, z: &UnitTangent, side: Leaf) -> Result<f64, GeomError> {
    same_leaf(w, z, side)?;
    let tol = Tolerances::DEFAULT;
    let sgn = match side {
        Leaf::Su => 1.0,
        Leaf::Ss => -1.0,
    };
    let f = |t: f64| {
        let a = geodesic_flow(w, sgn * t);
        let b = geodesic_flow(z, sgn * t);
        (0.5 * dist_raw(&a.base, &b.base) - t).exp()
    };
    let (t1, t2) = (tol.limit_t1, tol.limit_t2);
    let (f1, f2) = (f(t1), f(t2));
    let q = (-2.0 * t1).exp();
    Ok(((f2 - q * f1) / (1.0 - q)).max(0.0))
}

/// Exact Hamenstädt distance: after moving the common endpoint to infinity
/// the leaf is a horizontal horosphere and the distance is the Euclidean
/// horizontal distance divided by the height.
pub(crate) fn hamenstadt_exact(w: &UnitTangent, z: &UnitTangent, side: Leaf) -> Result<f64, GeomError> {
    let xi = same_leaf(w, z, side)?;
    let (wm, wp) = w.endpoints();
    let other = if xi == wm { wp } else { wm };
    let n = geodesic_normalizer(w.dim(), other, xi);
    let a = n.apply_point(&w.base);
    let b = n.apply_point(&z.base);
    Ok((a.z - b.z).norm() / (a.h * b.h).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

/// The dynamical neighbourhood `⋃_{|s|<η} g^s B^±(w, η′)`, where `B⁺` is a
/// strong stable ball and `B⁻` a strong unstable ball.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DynNbhdSpec {
    pub w: UnitTangent,
    pub eta: f64,
    pub eta_prime: f64,
    pub sign: Sign,
}

impl DynNbhdSpec {
    pub fn new(w: UnitTangent, eta: f64, eta_prime: f64, sign: Sign) -> Result<Self, GeomError> {
        if !(eta > 0.0 && eta_prime > 0.0) {
            return Err(GeomError::DomainError("eta and eta' must be positive"));
        }
        Ok(DynNbhdSpec { w, eta, eta_prime, sign })
    }

    /// Flow offset `s` and leaf distance of `v`, or `None` if `v` does not
    /// share the relevant endpoint with `w`.
    pub fn coordinates(&self, v: &UnitTangent) -> Option<(f64, f64)> {
        let (wm, wp) = self.w.endpoints();
        let (vm, vp) = v.endpoints();
        let (s, side) = match self.sign {
            Sign::Plus => {
                if chordal(wp, vp) > LEAF_TOL {
                    return None;
                }
                ((height_towards(wp, &v.base) / height_towards(wp, &self.w.base)).ln(), Leaf::Ss)
            }
            Sign::Minus => {
                if chordal(wm, vm) > LEAF_TOL {
                    return None;
                }
                ((height_towards(wm, &self.w.base) / height_towards(wm, &v.base)).ln(), Leaf::Su)
            }
        };
        let back = geodesic_flow(v, -s);
        let d = hamenstadt_exact(&back, &self.w, side).ok()?;
        Some((s, d))
    }
}

pub fn dyn_nbhd_contains(spec: &DynNbhdSpec, v: &UnitTangent) -> bool {
    match spec.coordinates(v) {
        Some((s, d)) => s.abs() < spec.eta && d < spec.eta_prime,
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn down(x: f64, h: f64) -> UnitTangent {
        UnitTangent::new(Point::h2(x, h), C64::new(0.0, 0.0), -1.0).unwrap()
    }

    #[test]
    fn flow_down_vertical() {
        let v = geodesic_flow(&down(0.0, 1.0), 1.0);
        assert!((v.base.h - (-1.0f64).exp()).abs() < 1e-15);
        assert!((v.dh + 1.0).abs() < 1e-15);
    }

    #[test]
    fn horospherical_distance() {
        let d = hamenstadt_distance(&down(0.3, 1.0), &down(1.5, 1.0), Leaf::Su).unwrap();
        assert!((d - 1.2).abs() < 1e-12, "{d}");
        assert!(hamenstadt_distance(&down(0.3, 1.0), &down(0.3, 1.0), Leaf::Su).unwrap() < 1e-12);
        assert_eq!(
            hamenstadt_distance(&down(0.3, 1.0), &down(1.5, 2.0), Leaf::Su),
            Err(GeomError::NotSameLeaf)
        );
    }

    #[test]
    fn endpoints_roundtrip() {
        let v = UnitTangent::new(Point::h2(0.5, 2.0), C64::new(0.6, 0.0), 0.8).unwrap();
        let (m, p) = v.endpoints();
        let w = UnitTangent::on_geodesic(v.base, m, p);
        assert!(v.deviation(&w) < 1e-14);
    }

    #[test]
    fn towards_hits_target() {
        let p = Point::h2(0.2, 0.7);
        let q = Point::h2(-1.3, 2.1);
        let v = UnitTangent::towards(&p, &q).unwrap();
        let d = dist_raw(&p, &q);
        let w = geodesic_flow(&v, d);
        assert!(dist_raw(&w.base, &q) < 1e-12);
    }

    #[test]
    fn time_origin() {
        let v = UnitTangent::new(Point::h2(0.0, 1.0), C64::new(1.0, 0.0), 0.0).unwrap();
        assert!(v.time().abs() < 1e-14);
        assert!((geodesic_flow(&v, 0.7).time() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn nbhd_rejects_large_offset() {
        let w = down(0.0, 1.0);
        let spec = DynNbhdSpec::new(w, 0.1, 0.1, Sign::Plus).unwrap();
        assert!(dyn_nbhd_contains(&spec, &w));
        assert!(!dyn_nbhd_contains(&spec, &geodesic_flow(&w, 0.2)));
        assert!(dyn_nbhd_contains(&spec, &geodesic_flow(&w, 0.05)));
    }
}
