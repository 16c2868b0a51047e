use core::ops::Mul;

use num_traits::Float;

use super::{BoundaryPoint, Dim, GeomError, Point};
use crate::C64;

/// Orientation-preserving isometry `[[a, b], [c, d]]` of unit determinant,
/// modulo sign. Planar isometries have real entries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Isometry {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
    pub dim: Dim,
}

const DET_TOL: f64 = 1e-12;
const POLE_TOL: f64 = 1e-14;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

impl Isometry {
    /// Validates the determinant and stores the sign-canonical representative.
    pub fn new(dim: Dim, a: C64, b: C64, cc: C64, d: C64) -> Result<Self, GeomError> {
        let det = a * d - b * cc;
        let scale = [a, b, cc, d].iter().fold(1.0f64, |m, e| m.max(e.norm_sqr()));
        if (det - 1.0).norm() > DET_TOL * scale {
            return Err(GeomError::InvalidIsometry(det.re));
        }
        if dim == Dim::Two && [a, b, cc, d].iter().any(|e| e.im != 0.0) {
            return Err(GeomError::InvalidIsometry(det.re));
        }
        Ok(Isometry { a, b, c: cc, d, dim }.canonical())
    }

    pub fn real(a: f64, b: f64, cc: f64, d: f64) -> Result<Self, GeomError> {
        Self::new(Dim::Two, c(a), c(b), c(cc), c(d))
    }

    /// Divides by a square root of the determinant. Fails on singular input.
    /// Planar matrices must have positive determinant.
    pub fn scaled(dim: Dim, a: C64, b: C64, cc: C64, d: C64) -> Result<Self, GeomError> {
        let det = a * d - b * cc;
        if det.norm() == 0.0 || !det.norm().is_finite() {
            return Err(GeomError::InvalidIsometry(0.0));
        }
        let s = if dim == Dim::Two {
            if det.re <= 0.0 {
                return Err(GeomError::InvalidIsometry(det.re));
            }
            c(det.re.sqrt())
        } else {
            det.sqrt()
        };
        let m = Isometry { a: a / s, b: b / s, c: cc / s, d: d / s, dim };
        Ok(m.clean().canonical())
    }

    pub fn identity(dim: Dim) -> Self {
        Isometry { a: c(1.0), b: c(0.0), c: c(0.0), d: c(1.0), dim }
    }

    pub fn entries(&self) -> [C64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> C64 {
        self.a + self.d
    }

    pub fn inverse(&self) -> Self {
        Isometry { a: self.d, b: -self.b, c: -self.c, d: self.a, dim: self.dim }.canonical()
    }

    fn clean(mut self) -> Self {
        if self.dim == Dim::Two {
            self.a.im = 0.0;
            self.b.im = 0.0;
            self.c.im = 0.0;
            self.d.im = 0.0;
        }
        self
    }

    /// Chooses the sign making the first non-negligible entry positive (real
    /// part, or imaginary part when the real part vanishes).
    pub fn canonical(self) -> Self {
        let e = self.entries();
        let big = e.iter().fold(0.0f64, |m, x| m.max(x.norm()));
        let lead = e.iter().find(|x| x.norm() > 1e-7 * big).copied().unwrap_or(c(1.0));
        let neg = if lead.re.abs() > 1e-7 * lead.norm() { lead.re < 0.0 } else { lead.im < 0.0 };
        if neg {
            Isometry { a: -self.a, b: -self.b, c: -self.c, d: -self.d, dim: self.dim }
        } else {
            self
        }
    }

    /// Largest entrywise difference between the canonical forms, minimized
    /// over the sign ambiguity.
    pub fn distance(&self, other: &Isometry) -> f64 {
        let x = self.entries();
        let y = other.entries();
        let plus = (0..4).map(|i| (x[i] - y[i]).norm()).fold(0.0, f64::max);
        let minus = (0..4).map(|i| (x[i] + y[i]).norm()).fold(0.0, f64::max);
        plus.min(minus)
    }

    pub fn approx_eq(&self, other: &Isometry, tol: f64) -> bool {
        self.distance(other) <= tol
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.approx_eq(&Isometry::identity(self.dim), tol)
    }

    pub fn apply_point(&self, p: &Point) -> Point {
        let w = self.c * p.z + self.d;
        let h2 = p.h * p.h;
        let den = w.norm_sqr() + self.c.norm_sqr() * h2;
        let z = ((self.a * p.z + self.b) * w.conj() + self.a * self.c.conj() * h2) / den;
        Point::raw(p.dim, z, p.h / den)
    }

    pub fn apply_boundary(&self, x: &BoundaryPoint) -> BoundaryPoint {
        match *x {
            BoundaryPoint::Infinity => {
                if self.c.norm() <= POLE_TOL * self.a.norm() {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite(self.fix_dim(self.a / self.c))
                }
            }
            BoundaryPoint::Finite(z) => {
                let num = self.a * z + self.b;
                let den = self.c * z + self.d;
                if den.norm() <= POLE_TOL * num.norm() {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite(self.fix_dim(num / den))
                }
            }
        }
    }

    fn fix_dim(&self, mut z: C64) -> C64 {
        if self.dim == Dim::Two {
            z.im = 0.0;
        }
        z
    }

    /// Divides by a square root of the determinant to undo accumulated drift.
    pub fn renormalized(&self) -> Self {
        Isometry::scaled(self.dim, self.a, self.b, self.c, self.d).unwrap_or(*self)
    }
}

impl Mul for Isometry {
    type Output = Isometry;

    fn mul(self, o: Isometry) -> Isometry {
        Isometry {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
            dim: self.dim,
        }
        .canonical()
    }
}

impl Mul for &Isometry {
    type Output = Isometry;

    fn mul(self, o: &Isometry) -> Isometry {
        *self * *o
    }
}
