use num_traits::Float;

use super::GeomError;
use crate::C64;

/// Ambient dimension of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dim {
    Two,
    Three,
}

impl Dim {
    pub fn n(self) -> u32 {
        match self {
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }
}

/// A point `(z, h)` of the upper half-space. In H² the horizontal part is real.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub z: C64,
    pub h: f64,
    pub dim: Dim,
}

impl Point {
    pub fn new(dim: Dim, z: C64, h: f64) -> Result<Self, GeomError> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(GeomError::InvalidPoint("height must be positive and finite"));
        }
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(GeomError::InvalidPoint("horizontal coordinate must be finite"));
        }
        if dim == Dim::Two && z.im != 0.0 {
            return Err(GeomError::InvalidPoint("planar point with imaginary part"));
        }
        Ok(Point { z, h, dim })
    }

    /// Point `(x, y)` of the upper half-plane. Panics if `y <= 0`.
    pub fn h2(x: f64, y: f64) -> Self {
        Self::new(Dim::Two, C64::new(x, 0.0), y).expect("valid planar point")
    }

    /// Point `(z, h)` of upper half-space. Panics if `h <= 0`.
    pub fn h3(z: C64, h: f64) -> Self {
        Self::new(Dim::Three, z, h).expect("valid point")
    }

    /// The base point `(0, 1)`.
    pub fn origin(dim: Dim) -> Self {
        Point { z: C64::new(0.0, 0.0), h: 1.0, dim }
    }

    /// Drops rounding noise in the imaginary part of planar points.
    pub(crate) fn raw(dim: Dim, mut z: C64, h: f64) -> Self {
        if dim == Dim::Two {
            z.im = 0.0;
        }
        Point { z, h, dim }
    }
}

/// A point of the sphere at infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryPoint {
    Finite(C64),
    Infinity,
}

impl BoundaryPoint {
    pub fn real(x: f64) -> Self {
        BoundaryPoint::Finite(C64::new(x, 0.0))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, BoundaryPoint::Infinity)
    }

    pub fn finite(&self) -> Option<C64> {
        match *self {
            BoundaryPoint::Finite(z) => Some(z),
            BoundaryPoint::Infinity => None,
        }
    }

    /// Equality up to `tol`, measured in the chordal metric of the Riemann
    /// sphere so that large finite values approach infinity continuously.
    pub fn approx_eq(&self, other: &BoundaryPoint, tol: f64) -> bool {
        chordal(*self, *other) <= tol
    }

}

/// Chordal distance on the Riemann sphere.
pub fn chordal(a: BoundaryPoint, b: BoundaryPoint) -> f64 {
    match (a, b) {
        (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => 0.0,
        (BoundaryPoint::Finite(z), BoundaryPoint::Infinity)
        | (BoundaryPoint::Infinity, BoundaryPoint::Finite(z)) => 2.0 / (1.0 + z.norm_sqr()).sqrt(),
        (BoundaryPoint::Finite(z), BoundaryPoint::Finite(w)) => {
            2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
        }
    }
}

/// Hyperbolic distance, stable for nearby points.
pub fn hyp_dist(p: &Point, q: &Point) -> Result<f64, GeomError> {
    if p.dim != q.dim {
        return Err(GeomError::DimensionMismatch);
    }
    Ok(dist_raw(p, q))
}

pub(crate) fn dist_raw(p: &Point, q: &Point) -> f64 {
    let dz = (p.z - q.z).norm_sqr();
    let dh = p.h - q.h;
    let e = (dz + dh * dh).sqrt();
    2.0 * (e / (2.0 * (p.h * q.h).sqrt())).asinh()
}

/// Height of `x` after moving `xi` to infinity by `z -> -1/(z - xi)`.
pub(crate) fn height_towards(xi: BoundaryPoint, x: &Point) -> f64 {
    match xi {
        BoundaryPoint::Infinity => x.h,
        BoundaryPoint::Finite(c) => x.h / ((x.z - c).norm_sqr() + x.h * x.h),
    }
}

/// Busemann cocycle `β_ξ(x, y) = lim d(ρ(t), x) − d(ρ(t), y)` for a ray `ρ`
/// converging to `ξ`.
pub fn busemann(xi: BoundaryPoint, x: &Point, y: &Point) -> Result<f64, GeomError> {
    if x.dim != y.dim {
        return Err(GeomError::DimensionMismatch);
    }
    Ok((height_towards(xi, y) / height_towards(xi, x)).ln())
}

/// Poincaré disc to upper half-plane: `w -> i(1 + w)/(1 − w)`.
pub fn cayley_from_disc(w: C64) -> Result<Point, GeomError> {
    if !(w.norm() < 1.0) {
        return Err(GeomError::InvalidPoint("outside the unit disc"));
    }
    let i = C64::new(0.0, 1.0);
    let z = i * (1.0 + w) / (1.0 - w);
    Point::new(Dim::Two, C64::new(z.re, 0.0), z.im)
}

/// Upper half-plane to Poincaré disc: `z -> (z − i)/(z + i)`.
pub fn cayley_to_disc(p: &Point) -> Result<C64, GeomError> {
    if p.dim != Dim::Two {
        return Err(GeomError::DimensionMismatch);
    }
    let z = C64::new(p.z.re, p.h);
    let i = C64::new(0.0, 1.0);
    Ok((z - i) / (z + i))
}
