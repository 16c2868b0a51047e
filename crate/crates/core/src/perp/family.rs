use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use num_traits::Float;

use super::PerpError;
use crate::geom::{closest_point, BoundaryPoint, ConvexBody, Dim, Isometry, Point, UnitTangent};
use crate::C64;

const KEY_TOL: f64 = 1e-7;
const SNAP: f64 = 1e-9;

/// Key length used for bodies and for the coset index.
pub const KEY_LEN: usize = 8;

/// Symmetry of the base body as seen in its normalized frame.
#[derive(Clone, Debug)]
enum Symmetry {
    /// Finite stabilizer; canonical form is the least variant.
    Finite,
    /// Horoball `{h ≥ 1}`: translation lattice (one or two vectors) and
    /// representatives of the rotation parts.
    Cusp { basis: Vec<C64>, rotations: Vec<Isometry> },
    /// Axis `(0, ∞)`: primitive translation `diag(a, 1/a)` with `log|a²| = tau`,
    /// an optional end-swapping element `z ↦ μ/z` stored with `log|μ|`, and
    /// rotation representatives.
    Axis { prim: Option<(Isometry, f64)>, reflection: Option<(Isometry, f64)>, rotations: Vec<Isometry> },
}

/// A Γ-equivariant family `(γD)` of convex bodies: a base body and
/// generators of its setwise stabilizer.
#[derive(Clone, Debug)]
pub struct EquivariantFamily {
    pub base: ConvexBody,
    pub stabilizer: Vec<Isometry>,
    /// Word bound used to close the stabilizer generators into a finite
    /// set of symmetries.
    pub word_bound: u32,
    pub label: String,
    norm: Isometry,
    norm_inv: Isometry,
    closure: Vec<Isometry>,
    sym: Symmetry,
}

fn close(gens: &[Isometry], dim: Dim, bound: u32) -> Vec<Isometry> {
    let mut letters: Vec<Isometry> = Vec::new();
    for g in gens {
        for h in [*g, g.inverse()] {
            if !h.is_identity(1e-9) && !letters.iter().any(|l| l.approx_eq(&h, 1e-9)) {
                letters.push(h);
            }
        }
    }
    let mut all = vec![Isometry::identity(dim)];
    let mut frontier = all.clone();
    for _ in 0..bound {
        let mut next = Vec::new();
        for f in &frontier {
            for l in &letters {
                let h = (*f * *l).renormalized();
                let scale = h.entries().iter().fold(1.0f64, |m, e| m.max(e.norm()));
                if !all.iter().any(|x| x.approx_eq(&h, 1e-8 * scale)) {
                    all.push(h);
                    next.push(h);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    all
}

fn small(x: C64, scale: f64) -> bool {
    x.norm() <= 1e-9 * scale
}

fn pow(g: &Isometry, k: i64) -> Isometry {
    let mut base = if k < 0 { g.inverse() } else { *g };
    let mut n = k.unsigned_abs();
    let mut acc = Isometry::identity(g.dim);
    while n > 0 {
        if n & 1 == 1 {
            acc = acc * base;
        }
        base = base * base;
        n >>= 1;
    }
    acc
}

fn translation(dim: Dim, t: C64) -> Isometry {
    let one = C64::new(1.0, 0.0);
    Isometry { a: one, b: t, c: C64::new(0.0, 0.0), d: one, dim }
}

/// Integer part with values within `SNAP` below an integer rounded up.
fn snap_floor(x: f64) -> f64 {
    let k = x.floor();
    if x - k > 1.0 - SNAP {
        k + 1.0
    } else {
        k
    }
}

fn frac(x: f64) -> f64 {
    (x - snap_floor(x)).max(0.0)
}

fn sphere(x: &BoundaryPoint) -> [f64; 3] {
    match x {
        BoundaryPoint::Infinity => [0.0, 0.0, 1.0],
        BoundaryPoint::Finite(z) => {
            let n = 1.0 + z.norm_sqr();
            [2.0 * z.re / n, 2.0 * z.im / n, (z.norm_sqr() - 1.0) / n]
        }
    }
}

/// Lexicographic order with ties below `KEY_TOL`.
pub(crate) fn key_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > KEY_TOL {
            return x.partial_cmp(y).unwrap_or(Ordering::Equal);
        }
    }
    Ordering::Equal
}

/// Order-independent numeric key of a body.
pub fn body_key(b: &ConvexBody) -> [f64; KEY_LEN] {
    let mut k = [0.0; KEY_LEN];
    match b {
        ConvexBody::Point(p) => {
            k[1] = p.z.re;
            k[2] = p.z.im;
            k[3] = p.h.ln();
        }
        ConvexBody::Horoball { center, level, .. } => {
            k[0] = if center.is_infinite() { 2.0 } else { 1.0 };
            k[1..4].copy_from_slice(&sphere(center));
            k[4] = level.ln();
        }
        ConvexBody::Geodesic { ends, .. } => {
            k[0] = 3.0;
            let mut s = [sphere(&ends[0]), sphere(&ends[1])];
            if key_cmp(&s[0], &s[1]) == Ordering::Greater {
                s.swap(0, 1);
            }
            k[1..4].copy_from_slice(&s[0]);
            k[4..7].copy_from_slice(&s[1]);
        }
    }
    k
}

/// Horizontal anchor of a body in the cusp frame.
fn cusp_anchor(b: &ConvexBody) -> C64 {
    match b {
        ConvexBody::Point(p) => p.z,
        ConvexBody::Horoball { center: BoundaryPoint::Finite(c), .. } => *c,
        ConvexBody::Horoball { .. } => C64::new(0.0, 0.0),
        ConvexBody::Geodesic { ends, .. } => match (ends[0], ends[1]) {
            (BoundaryPoint::Finite(a), BoundaryPoint::Finite(b)) => (a + b) * 0.5,
            (BoundaryPoint::Finite(a), _) | (_, BoundaryPoint::Finite(a)) => a,
            _ => C64::new(0.0, 0.0),
        },
    }
}

fn log_abs(x: &BoundaryPoint) -> Option<f64> {
    match x {
        BoundaryPoint::Finite(z) if z.norm() > 1e-300 => Some(z.norm().ln()),
        _ => None,
    }
}

/// Log-height of the projection of a body onto the axis `(0, ∞)`.
fn axis_anchor(b: &ConvexBody) -> f64 {
    match b {
        ConvexBody::Point(p) => 0.5 * (p.z.norm_sqr() + p.h * p.h).ln(),
        ConvexBody::Horoball { center, level, .. } => log_abs(center).unwrap_or(level.ln()),
        ConvexBody::Geodesic { ends, .. } => match (log_abs(&ends[0]), log_abs(&ends[1])) {
            (Some(a), Some(b)) => 0.5 * (a + b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => 0.0,
        },
    }
}

impl EquivariantFamily {
    /// Family with the given base and stabilizer generators; every
    /// generator must preserve the base.
    pub fn new(base: ConvexBody, stabilizer: Vec<Isometry>, label: &str) -> Result<Self, PerpError> {
        Self::with_word_bound(base, stabilizer, label, 6)
    }

    pub fn with_word_bound(base: ConvexBody, stabilizer: Vec<Isometry>, label: &str, word_bound: u32) -> Result<Self, PerpError> {
        let dim = base.dim();
        for g in &stabilizer {
            if g.dim != dim {
                return Err(PerpError::DimensionMismatch);
            }
            if !base.apply(g).approx_eq(&base, 1e-8) {
                return Err(PerpError::InvalidFamily("stabilizer generator does not preserve the base"));
            }
        }
        let norm = base.normalizer();
        let norm_inv = norm.inverse();
        let conj: Vec<Isometry> = stabilizer.iter().map(|g| (norm * *g) * norm_inv).collect();
        let closure = close(&conj, dim, word_bound);
        let sym = match base {
            ConvexBody::Point(_) => Symmetry::Finite,
            ConvexBody::Horoball { .. } => cusp_symmetry(&closure, dim)?,
            ConvexBody::Geodesic { .. } => axis_symmetry(&closure, dim),
        };
        Ok(EquivariantFamily { base, stabilizer, word_bound, label: label.into(), norm, norm_inv, closure, sym })
    }

    /// The cusp family `Horoball(∞, 1)` of the modular group, stabilized by `T`.
    pub fn modular_cusp() -> Self {
        let base = ConvexBody::horoball(Dim::Two, BoundaryPoint::Infinity, 1.0).expect("valid");
        let t = Isometry::real(1.0, 1.0, 0.0, 1.0).expect("unimodular");
        Self::new(base, vec![t], "modular-cusp").expect("T preserves the horoball")
    }

    /// The axis family of a hyperbolic element of the modular group with
    /// real matrix `m`, stabilized by `m` and optional extra symmetries.
    pub fn axis(m: &Isometry, extra: Vec<Isometry>, label: &str) -> Result<Self, PerpError> {
        let tr = m.trace().re;
        if m.dim != Dim::Two || tr.abs() <= 2.0 {
            return Err(PerpError::InvalidFamily("axis needs a hyperbolic planar element"));
        }
        let (a, c, d) = (m.a.re, m.c.re, m.d.re);
        if c.abs() < 1e-300 {
            return Err(PerpError::InvalidFamily("axis through infinity"));
        }
        let disc = (tr * tr - 4.0).sqrt();
        let p = ((a - d) - disc) / (2.0 * c);
        let q = ((a - d) + disc) / (2.0 * c);
        let base = ConvexBody::geodesic_real(p, q).map_err(PerpError::Geom)?;
        let mut gens = vec![*m];
        gens.extend(extra);
        Self::new(base, gens, label)
    }

    /// Axis family of `A = [[2,1],[1,1]]` in the modular group; `S` swaps the
    /// endpoints, and `⟨A, S⟩` is the full stabilizer.
    pub fn modular_axis() -> Self {
        let a = Isometry::real(2.0, 1.0, 1.0, 1.0).expect("unimodular");
        let s = Isometry::real(0.0, -1.0, 1.0, 0.0).expect("unimodular");
        Self::axis(&a, vec![s], "modular-axis").expect("hyperbolic")
    }

    /// Orbit family of a point with a finite stabilizer.
    pub fn point(p: Point, stabilizer: Vec<Isometry>, label: &str) -> Result<Self, PerpError> {
        Self::new(ConvexBody::Point(p), stabilizer, label)
    }

    pub fn dim(&self) -> Dim {
        self.base.dim()
    }

    /// The family `g𝒟`, with base `g·base` and conjugated stabilizer.
    pub fn conjugate(&self, g: &Isometry) -> Result<Self, PerpError> {
        let gi = g.inverse();
        let stab = self.stabilizer.iter().map(|s| (*g * *s) * gi).collect();
        Self::with_word_bound(self.base.apply(g), stab, &self.label, self.word_bound)
    }

    pub(crate) fn normalizer(&self) -> &Isometry {
        &self.norm
    }

    pub(crate) fn normalizer_inv(&self) -> &Isometry {
        &self.norm_inv
    }


    /// Distance from the base body to `p`.
    pub fn distance_to(&self, p: &Point) -> f64 {
        let y = self.norm.apply_point(p);
        std_distance(&self.base, &y)
    }

    /// Point of the base used as the orbit reference for this family.
    pub fn reference_point(&self) -> Point {
        closest_point(&self.base, &Point::origin(self.dim())).expect("same dimension")
    }

    /// Stabilizer elements (from the closure) fixing the reference point, in
    /// the original frame. Always contains the identity.
    pub(crate) fn reference_fixer(&self) -> Vec<Isometry> {
        let x = self.norm.apply_point(&self.reference_point());
        let mut out = vec![Isometry::identity(self.dim())];
        for g in &self.closure {
            if g.is_identity(1e-9) {
                continue;
            }
            if crate::geom::hyp_dist(&g.apply_point(&x), &x).map_or(false, |d| d <= 1e-9) {
                out.push((self.norm_inv * *g) * self.norm);
            }
        }
        out
    }

    /// Supremum over points of the base boundary of the distance to the
    /// stabilizer orbit of the reference point (an upper bound).
    pub fn covering_radius(&self) -> f64 {
        match &self.sym {
            Symmetry::Finite => 0.0,
            Symmetry::Cusp { basis, .. } => {
                let full = basis.len() == self.dim().n() as usize - 1;
                if !full {
                    return f64::INFINITY;
                }
                let r = basis.iter().map(|b| b.norm()).sum::<f64>() / 2.0;
                // The reference point may sit at any height on the horosphere.
                let h = self.norm.apply_point(&self.reference_point()).h;
                2.0 * (r / (2.0 * h)).asinh()
            }
            Symmetry::Axis { prim: Some((_, tau)), .. } => tau / 2.0,
            Symmetry::Axis { prim: None, .. } => f64::INFINITY,
        }
    }

    /// Canonical representative of `b` modulo the stabilizer and the
    /// stabilizer element `s` (original frame) with `s·b` equal to it.
    pub fn canonicalize(&self, b: &ConvexBody) -> (ConvexBody, Isometry) {
        let y = b.apply(&self.norm);
        let (c, m) = self.reduce(&y);
        let s = (self.norm_inv * m) * self.norm;
        (c.apply(&self.norm_inv), s)
    }

    /// Reduction in the normalized frame: returns the canonical body and the
    /// symmetry (normalized frame) producing it.
    pub(crate) fn reduce(&self, b: &ConvexBody) -> (ConvexBody, Isometry) {
        let dim = self.dim();
        let std = self.base.apply(&self.norm);
        if b.approx_eq(&std, 1e-7) {
            return (std, Isometry::identity(dim));
        }
        let mut best: Option<(ConvexBody, Isometry, [f64; KEY_LEN])> = None;
        let mut offer = |c: ConvexBody, m: Isometry| {
            let k = body_key(&c);
            let better = match &best {
                None => true,
                Some((_, _, bk)) => key_cmp(&k, bk) == Ordering::Less,
            };
            if better {
                best = Some((c, m, k));
            }
        };
        match &self.sym {
            Symmetry::Finite => {
                for g in &self.closure {
                    offer(b.apply(g), *g);
                }
            }
            Symmetry::Cusp { basis, rotations } => {
                for r in rotations {
                    let br = b.apply(r);
                    let z = cusp_anchor(&br);
                    let shift = lattice_shift(basis, z);
                    let t = translation(dim, -shift);
                    offer(br.apply(&t), t * *r);
                }
            }
            Symmetry::Axis { prim, reflection, rotations } => {
                let mut flips = vec![(Isometry::identity(dim), 0.0)];
                if let Some((r, _)) = reflection {
                    flips.push((*r, 0.0));
                }
                let lo = reflection.map(|(_, c)| c / 2.0).unwrap_or(0.0);
                for r in rotations {
                    for (f, _) in &flips {
                        let v = *f * *r;
                        let bv = b.apply(&v);
                        let (bt, m) = match prim {
                            Some((p, tau)) => {
                                let u = axis_anchor(&bv);
                                let k = snap_floor((u - lo) / tau) as i64;
                                let step = pow(p, -k);
                                (bv.apply(&step), step * v)
                            }
                            None => (bv, v),
                        };
                        if let (Some((_, tau)), Some(_)) = (prim, reflection) {
                            let u = axis_anchor(&bt);
                            if u > lo + tau / 2.0 + SNAP * (1.0 + tau) {
                                continue;
                            }
                        }
                        offer(bt, m);
                    }
                }
            }
        }
        let (c, m, _) = best.expect("identity variant always offered");
        (c, m)
    }

    /// Coordinates of the outer normal `v` in a fundamental domain of the
    /// stabilizer, scaled to `[0, 1)`: position on the body, plus the side
    /// of a planar axis or the direction at a point.
    pub fn foot_datum(&self, v: &UnitTangent) -> [f64; 2] {
        let w = v.apply(&self.norm);
        match &self.sym {
            Symmetry::Cusp { basis, .. } => {
                let c = lattice_coords(basis, w.base.z);
                [frac(c[0]), frac(c[1])]
            }
            Symmetry::Axis { prim, reflection, .. } => {
                let mut u = 0.5 * (w.base.z.norm_sqr() + w.base.h * w.base.h).ln();
                let mut around = if self.dim() == Dim::Two {
                    if w.dz.re < 0.0 { 0.5 } else { 0.0 }
                } else {
                    frac(w.base.z.arg() / (2.0 * PI))
                };
                // In the plane the end swap also swaps the sides of the axis.
                let lo = match reflection {
                    Some((_, log_mu)) if self.dim() == Dim::Two => {
                        let lo = log_mu / 2.0;
                        if around > 0.0 {
                            u = 2.0 * lo - u;
                            around = 0.0;
                        }
                        lo
                    }
                    _ => 0.0,
                };
                let along = match prim {
                    Some((_, tau)) => frac((u - lo) / tau),
                    None => u - lo,
                };
                [along, around]
            }
            Symmetry::Finite => [frac(w.dz.arg() / (2.0 * PI)), 0.5 * (w.dh + 1.0)],
        }
    }

    /// Number of stabilizer elements (from the closure) preserving `b`.
    pub fn stabilizer_order_of(&self, b: &ConvexBody) -> usize {
        let y = b.apply(&self.norm);
        self.closure.iter().filter(|g| y.apply(g).approx_eq(&y, 1e-8)).count()
    }

    /// Number of stabilizer elements (from the closure) fixing `v`.
    pub fn vector_stabilizer_order(&self, v: &UnitTangent) -> usize {
        let w = v.apply(&self.norm);
        self.closure.iter().filter(|g| w.apply(g).deviation(&w) <= 1e-8).count()
    }
}

/// Distance from the standard body of the same kind as `base` to `y`.
pub(crate) fn std_distance(base: &ConvexBody, y: &Point) -> f64 {
    match base {
        ConvexBody::Point(_) => {
            let o = Point::origin(y.dim);
            let num = y.z.norm_sqr() + (y.h - o.h).powi(2);
            2.0 * (num.sqrt() / (2.0 * y.h.sqrt())).asinh()
        }
        ConvexBody::Horoball { .. } => (-y.h.ln()).max(0.0),
        ConvexBody::Geodesic { .. } => (y.z.norm() / y.h).asinh(),
    }
}

fn lattice_coords(basis: &[C64], z: C64) -> [f64; 2] {
    match basis.len() {
        0 => [0.0, 0.0],
        1 => {
            let t = basis[0];
            let q = z / t;
            [q.re, 0.0]
        }
        _ => {
            let (u, v) = (basis[0], basis[1]);
            let det = u.re * v.im - u.im * v.re;
            [(z.re * v.im - z.im * v.re) / det, (u.re * z.im - u.im * z.re) / det]
        }
    }
}

fn lattice_shift(basis: &[C64], z: C64) -> C64 {
    let c = lattice_coords(basis, z);
    let mut s = C64::new(0.0, 0.0);
    for (i, b) in basis.iter().enumerate() {
        s += *b * snap_floor(c[i]);
    }
    s
}

fn cusp_symmetry(closure: &[Isometry], dim: Dim) -> Result<Symmetry, PerpError> {
    let mut trans: Vec<C64> = Vec::new();
    let mut rotations: Vec<(C64, Isometry)> = vec![(C64::new(1.0, 0.0), Isometry::identity(dim))];
    for g in closure {
        let scale = g.entries().iter().fold(1.0f64, |m, e| m.max(e.norm()));
        if !small(g.c, scale) {
            return Err(PerpError::InvalidFamily("stabilizer moves the cusp"));
        }
        let omega = g.a / g.d;
        if (omega.norm() - 1.0).abs() > 1e-9 {
            return Err(PerpError::InvalidFamily("stabilizer does not preserve the horosphere"));
        }
        if (omega - 1.0).norm() <= 1e-9 {
            let t = g.b / g.d;
            if t.norm() > 1e-9 {
                trans.push(t);
            }
        } else if !rotations.iter().any(|(w, _)| (w - omega).norm() <= 1e-9) {
            rotations.push((omega, *g));
        }
    }
    let mut basis: Vec<C64> = Vec::new();
    trans.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap_or(Ordering::Equal));
    if let Some(first) = trans.first() {
        basis.push(*first);
        if dim == Dim::Three {
            if let Some(second) = trans.iter().find(|t| (**t / *first).im.abs() > 1e-9) {
                basis.push(*second);
                // Lagrange–Gauss reduction.
                loop {
                    if basis[1].norm() < basis[0].norm() {
                        basis.swap(0, 1);
                    }
                    let mu = ((basis[1] * basis[0].conj()).re / basis[0].norm_sqr()).round();
                    if mu == 0.0 {
                        break;
                    }
                    let b0 = basis[0];
                    basis[1] -= b0 * mu;
                }
            }
        }
    }
    Ok(Symmetry::Cusp { basis, rotations: rotations.into_iter().map(|(_, g)| g).collect() })
}

fn axis_symmetry(closure: &[Isometry], dim: Dim) -> Symmetry {
    let mut prim: Option<(Isometry, f64)> = None;
    let mut reflection: Option<(Isometry, f64)> = None;
    let mut rotations: Vec<(C64, Isometry)> = vec![(C64::new(1.0, 0.0), Isometry::identity(dim))];
    for g in closure {
        let scale = g.entries().iter().fold(1.0f64, |m, e| m.max(e.norm()));
        if small(g.b, scale) && small(g.c, scale) {
            let lambda = g.a / g.d;
            let t = lambda.norm().ln();
            if t.abs() > 1e-9 {
                let (h, t) = if t > 0.0 { (*g, t) } else { (g.inverse(), -t) };
                if prim.map_or(true, |(_, best)| t < best - 1e-9) {
                    prim = Some((h, t));
                }
            } else if (lambda - 1.0).norm() > 1e-9 && !rotations.iter().any(|(w, _)| (w - lambda).norm() <= 1e-9) {
                rotations.push((lambda, *g));
            }
        } else if small(g.a, scale) && small(g.d, scale) && reflection.is_none() {
            let mu = g.b / g.c;
            reflection = Some((*g, mu.norm().ln()));
        }
    }
    Symmetry::Axis { prim, reflection, rotations: rotations.into_iter().map(|(_, g)| g).collect() }
}
