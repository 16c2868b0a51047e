//! Numeric harness for the creation of common perpendiculars: vectors in
//! the intersection of flowed dynamical neighbourhoods of the outer normal
//! bundle of `D⁻` and the inner normal bundle of `D⁺` lie within
//! `c₀ e^{−t/2}` of a common perpendicular of length close to `t + s`.

use alloc::vec::Vec;

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    closest_point, closest_point_boundary, common_perpendicular, geodesic_flow, hyp_dist, BoundaryPoint, ConvexBody,
    DynNbhdSpec, GeomError, Isometry, Point, Sign, UnitTangent,
};

/// Gaps of one sampled vector, each to be compared with `c₀ e^{−t/2}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CreationSample {
    pub ell: f64,
    pub t: f64,
    pub eta: f64,
    /// Flow offset `s⁻ − s⁺`, in `]−2η, 2η[`.
    pub s: f64,
    /// `|ℓ − (t + s)|`.
    pub length_gap: f64,
    /// `d(π(w∓), p∓)` for the projections `w∓` of the vector.
    pub foot_gap_minus: f64,
    pub foot_gap_plus: f64,
    /// Distance from the base point to the perpendicular.
    pub base_gap: f64,
    /// `max d(π(g^{±t/2} w∓), π(w)) − η`, clamped at zero.
    pub flow_gap: f64,
}

impl CreationSample {
    /// Largest gap times `e^{t/2}`.
    pub fn scaled(&self) -> f64 {
        let m = self
            .length_gap
            .max(self.foot_gap_minus)
            .max(self.foot_gap_plus)
            .max(self.base_gap)
            .max(self.flow_gap);
        m * (self.t / 2.0).exp()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CreationReport {
    pub samples: Vec<CreationSample>,
    /// The smallest `c₀` bounding every sample.
    pub c0: f64,
    /// Samples rejected for lying outside one of the neighbourhoods.
    pub rejected: usize,
}

fn random_isometry(rng: &mut ChaCha8Rng) -> Isometry {
    let a: f64 = rng.random_range(0.5..2.0);
    let b: f64 = rng.random_range(-1.0..1.0);
    let c: f64 = rng.random_range(-1.0..1.0);
    Isometry::real(a, b, c, (1.0 + b * c) / a).expect("unimodular")
}

/// Unit normal to the geodesic body `d` on the geodesic from `from` to its
/// reflection `to` across `d`.
fn normal_on(d: &ConvexBody, from: BoundaryPoint, to: BoundaryPoint) -> Result<UnitTangent, GeomError> {
    let foot = closest_point_boundary(d, &from)?;
    Ok(UnitTangent::on_geodesic(foot, from, to))
}

fn inverse_scaled(rho2: f64, x: f64) -> BoundaryPoint {
    BoundaryPoint::real(rho2 / x)
}

/// One accepted sample for the pair of geodesics at distance `ell`, or
/// `None` after `attempts` rejections (counted in `rejected`).
pub fn creation_sample(
    ell: f64,
    eta: f64,
    r: f64,
    rng: &mut ChaCha8Rng,
    attempts: usize,
    rejected: &mut usize,
) -> Result<Option<CreationSample>, GeomError> {
    if !(ell > 0.0 && eta > 0.0 && eta <= 1.0 && r > 0.0) {
        return Err(GeomError::DomainError("need ell > 0, 0 < eta <= 1 and r > 0"));
    }
    let rho = ell.exp();
    // Normalized frame: D⁻ the unit semicircle, D⁺ the semicircle of radius
    // e^ℓ, the perpendicular the segment of the imaginary axis between them.
    let dm0 = ConvexBody::geodesic_real(-1.0, 1.0)?;
    let dp0 = ConvexBody::geodesic_real(-rho, rho)?;
    for _ in 0..attempts {
        let xm: f64 = rng.random_range(-2.0..2.0);
        let xp: f64 = rng.random_range(-2.0..2.0) / rho;
        if xm.abs() < 1e-9 || xp.abs() < 1e-12 {
            *rejected += 1;
            continue;
        }
        let (em, ep) = (BoundaryPoint::real(xm), BoundaryPoint::real(1.0 / xp));
        let near = Point::h2(0.0, (ell / 2.0 + rng.random_range(-eta..eta)).exp());
        let w0 = UnitTangent::from_endpoints(em, ep, &near)?;
        let t = ell + rng.random_range(-eta..eta);
        let wm0 = normal_on(&dm0, BoundaryPoint::real(xp), ep)?;
        let wp0 = normal_on(&dp0, em, inverse_scaled(rho * rho, xm))?;

        let h = random_isometry(rng);
        let (dm, dp) = (dm0.apply(&h), dp0.apply(&h));
        let (w, wm, wp) = (w0.apply(&h), wm0.apply(&h), wp0.apply(&h));

        let minus = DynNbhdSpec::new(wm, eta, r, Sign::Plus)?.coordinates(&geodesic_flow(&w, -t / 2.0));
        let plus = DynNbhdSpec::new(wp, eta, r, Sign::Minus)?.coordinates(&geodesic_flow(&w, t / 2.0));
        let ((sm, dmm), (sp, dpp)) = match (minus, plus) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                *rejected += 1;
                continue;
            }
        };
        if !(sm.abs() < eta && dmm < r && sp.abs() < eta && dpp < r) {
            *rejected += 1;
            continue;
        }
        let perp = common_perpendicular(&dm, &dp)?;
        let s = sm - sp;
        let axis = ConvexBody::geodesic(dm.dim(), perp.v_minus.endpoints().0, perp.v_minus.endpoints().1)?;
        let on_axis = closest_point(&axis, &w.base)?;
        let flow_gap = hyp_dist(&geodesic_flow(&wm, t / 2.0).base, &w.base)?
            .max(hyp_dist(&geodesic_flow(&wp, -t / 2.0).base, &w.base)?)
            - eta;
        return Ok(Some(CreationSample {
            ell: perp.length,
            t,
            eta,
            s,
            length_gap: (perp.length - (t + s)).abs(),
            foot_gap_minus: hyp_dist(&wm.base, &perp.foot_minus)?,
            foot_gap_plus: hyp_dist(&wp.base, &perp.foot_plus)?,
            base_gap: hyp_dist(&on_axis, &w.base)?,
            flow_gap: flow_gap.max(0.0),
        }));
    }
    Ok(None)
}

/// Runs `configs` random configurations with `ℓ ∈ [4, 10]` for every `η`
/// in `etas`, with leaf radius `r`.
pub fn creation_harness(configs: usize, etas: &[f64], r: f64, seed: u64) -> Result<CreationReport, GeomError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::new();
    let mut rejected = 0;
    for _ in 0..configs {
        let ell = rng.random_range(4.0..10.0);
        for &eta in etas {
            if let Some(s) = creation_sample(ell, eta, r, &mut rng, 10_000, &mut rejected)? {
                samples.push(s);
            }
        }
    }
    let c0 = samples.iter().map(CreationSample::scaled).fold(0.0, f64::max);
    Ok(CreationReport { samples, c0, rejected })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaps_are_exponentially_small() {
        let rep = creation_harness(20, &[0.1, 0.5, 1.0], 1.0, 7).unwrap();
        assert_eq!(rep.samples.len(), 60);
        for s in &rep.samples {
            assert!(s.s.abs() < 2.0 * s.eta);
        }
        assert!(rep.c0 <= 100.0, "{}", rep.c0);
    }
}
