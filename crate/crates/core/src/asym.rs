//! Closed-form asymptotic constants for constant curvature lattices.

use alloc::format;
use alloc::string::String;
use core::f64::consts::PI;

use num_traits::Float;
use thiserror::Error;

use crate::perp::Potential;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum AsymError {
    #[error("only zero and constant potentials have closed-form predictions")]
    UnsupportedPotential,
    #[error("exponent δ + σ vanishes")]
    ZeroExponent,
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ManifoldData {
    pub n: u32,
    pub vol_m: f64,
}

impl ManifoldData {
    pub fn new(n: u32, vol_m: f64) -> Result<Self, AsymError> {
        if !(n == 2 || n == 3) {
            return Err(AsymError::InvalidInput("dimension must be 2 or 3"));
        }
        if !(vol_m > 0.0) || !vol_m.is_finite() {
            return Err(AsymError::InvalidInput("volume must be positive"));
        }
        Ok(ManifoldData { n, vol_m })
    }

    /// The modular orbifold, of area `π/3`.
    pub fn modular() -> Self {
        ManifoldData { n: 2, vol_m: PI / 3.0 }
    }
}

/// Quotient data of a family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FamilyData {
    /// Orbit of a point with isotropy group of the given order.
    Point { isotropy: u32 },
    /// Cusp neighbourhood with volume of the bounding horosphere quotient.
    Cusp { vol: f64 },
    /// Closed geodesic: `length` is the volume of `Γ_D \ D` and `m` the
    /// order of the pointwise fixer of `D`.
    Geodesic { length: f64, m: u32 },
}

impl FamilyData {
    fn validate(&self) -> Result<(), AsymError> {
        let ok = match *self {
            FamilyData::Point { isotropy } => isotropy >= 1,
            FamilyData::Cusp { vol } => vol > 0.0 && vol.is_finite(),
            FamilyData::Geodesic { length, m } => length > 0.0 && length.is_finite() && m >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(AsymError::InvalidInput("family data must be positive"))
        }
    }

    fn id(&self) -> &'static str {
        match self {
            FamilyData::Point { .. } => "point",
            FamilyData::Cusp { .. } => "cusp",
            FamilyData::Geodesic { .. } => "geodesic",
        }
    }
}

/// `Vol(S^m) = 2π^{(m+1)/2} / Γ((m+1)/2)`, by the two-step recursion.
pub fn sphere_volume(m: u32) -> f64 {
    match m {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (m as f64 - 1.0) * sphere_volume(m - 2),
    }
}

/// Volume of a cusp neighbourhood of height `h` over a lattice of coarea `a`.
pub fn cusp_volume(n: u32, coarea: f64, h: f64) -> f64 {
    coarea / ((n as f64 - 1.0) * h.powi(n as i32 - 1))
}

pub fn bowen_margulis_mass(m: &ManifoldData) -> f64 {
    2f64.powi(m.n as i32 - 1) * sphere_volume(m.n - 1) * m.vol_m
}

pub fn skinning_mass(m: &ManifoldData, a: &FamilyData) -> f64 {
    let n = m.n;
    match *a {
        FamilyData::Point { isotropy } => sphere_volume(n - 1) / isotropy as f64,
        FamilyData::Cusp { vol } => 2f64.powi(n as i32 - 1) * (n as f64 - 1.0) * vol,
        FamilyData::Geodesic { length, m } => sphere_volume(n - 2) * length / m as f64,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub c: f64,
    pub delta: f64,
    pub formula_id: String,
    /// The same constant from skinning and Bowen–Margulis masses.
    pub composition: f64,
    pub audit_passed: bool,
}

/// Pairwise closed forms, written out per kind pair.
fn closed_form(m: &ManifoldData, am: &FamilyData, ap: &FamilyData) -> f64 {
    use FamilyData::*;
    let n = m.n as f64;
    let sn1 = sphere_volume(m.n - 1);
    let sn2 = sphere_volume(m.n - 2);
    let two = 2f64.powi(m.n as i32 - 1);
    let v = m.vol_m;
    match (*am, *ap) {
        (Cusp { vol: a }, Cusp { vol: b }) => two * (n - 1.0) * a * b / (sn1 * v),
        (Point { isotropy: i }, Cusp { vol: b }) | (Cusp { vol: b }, Point { isotropy: i }) => b / (i as f64 * v),
        (Point { isotropy: i }, Point { isotropy: j }) => sn1 / (i as f64 * j as f64 * (n - 1.0) * two * v),
        (Geodesic { length: a, m: p }, Geodesic { length: b, m: q }) => {
            sn2 * sn2 * a * b / (p as f64 * q as f64 * (n - 1.0) * two * sn1 * v)
        }
        (Cusp { vol: a }, Geodesic { length: b, m: q }) | (Geodesic { length: b, m: q }, Cusp { vol: a }) => {
            sn2 * a * b / (q as f64 * sn1 * v)
        }
        (Point { isotropy: i }, Geodesic { length: b, m: q }) | (Geodesic { length: b, m: q }, Point { isotropy: i }) => {
            sn2 * b / (i as f64 * q as f64 * (n - 1.0) * two * v)
        }
    }
}

/// Constant `c` of `N(t) ∼ c e^{δt}` for a lattice, with `δ = n − 1`. The
/// per-pair closed form is checked against `σ⁻σ⁺/(δ‖m_BM‖)` to `1e−12`.
pub fn pair_constant(m: &ManifoldData, am: &FamilyData, ap: &FamilyData) -> Result<Prediction, AsymError> {
    am.validate()?;
    ap.validate()?;
    let delta = m.n as f64 - 1.0;
    let c = closed_form(m, am, ap);
    let composition = skinning_mass(m, am) * skinning_mass(m, ap) / (delta * bowen_margulis_mass(m));
    let audit_passed = ((c - composition) / composition).abs() <= 1e-12;
    Ok(Prediction { c, delta, formula_id: format!("{}-{}", am.id(), ap.id()), composition, audit_passed })
}

/// Predicted `N(t)`; a constant potential `σ` shifts the exponent to
/// `δ + σ` and rescales by `δ/(δ + σ)`.
pub fn predicted_count(pred: &Prediction, t: f64, f: &Potential) -> Result<f64, AsymError> {
    match f {
        Potential::Zero => Ok(pred.c * (pred.delta * t).exp()),
        Potential::Constant(s) => {
            let df = pred.delta + s;
            if df.abs() < 1e-15 {
                return Err(AsymError::ZeroExponent);
            }
            Ok(pred.c * pred.delta / df * (df * t).exp())
        }
        Potential::Custom { .. } => Err(AsymError::UnsupportedPotential),
    }
}

/// Exponent `δ_F` of the weighted count.
pub fn weighted_exponent(pred: &Prediction, f: &Potential) -> Result<f64, AsymError> {
    match f {
        Potential::Zero => Ok(pred.delta),
        Potential::Constant(s) => Ok(pred.delta + s),
        Potential::Custom { .. } => Err(AsymError::UnsupportedPotential),
    }
}

/// Fraction of `N(t)` expected in the shell `(t − c, t]`.
pub fn shell_factor(delta_f: f64, c: f64) -> f64 {
    1.0 - (-delta_f * c).exp()
}

/// Comparison of a fitted geodesic–geodesic constant in the plane with
/// the two candidate closed forms `ℓ⁻ℓ⁺/(π Vol)` and `π ℓ⁻ℓ⁺/Vol`, each
/// multiplied by the same stabilizer correction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeodesicFormAudit {
    pub fitted: f64,
    pub inverse_pi_form: f64,
    pub pi_form: f64,
    pub inverse_pi_rel_err: f64,
    pub pi_rel_err: f64,
}

impl GeodesicFormAudit {
    pub fn new(fitted: f64, l_minus: f64, l_plus: f64, vol_m: f64, correction: f64) -> Self {
        let inverse_pi_form = l_minus * l_plus / (PI * vol_m) * correction;
        let pi_form = PI * l_minus * l_plus / vol_m * correction;
        GeodesicFormAudit {
            fitted,
            inverse_pi_form,
            pi_form,
            inverse_pi_rel_err: (fitted / inverse_pi_form - 1.0).abs(),
            pi_rel_err: (fitted / pi_form - 1.0).abs(),
        }
    }

    /// Whether the data support the `1/π` form within `tol` and reject
    /// the `π` form.
    pub fn supports_inverse_pi(&self, tol: f64) -> bool {
        self.inverse_pi_rel_err <= tol && self.pi_rel_err > tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_volumes() {
        assert_eq!(sphere_volume(0), 2.0);
        assert_eq!(sphere_volume(1), 2.0 * PI);
        assert!((sphere_volume(2) - 4.0 * PI).abs() < 1e-15);
        assert!((sphere_volume(3) - 2.0 * PI * PI).abs() < 1e-14);
    }

    #[test]
    fn bm_masses() {
        let m = ManifoldData::modular();
        assert!((bowen_margulis_mass(&m) - 4.0 * PI * PI / 3.0).abs() < 1e-12);
        assert!((bowen_margulis_mass(&ManifoldData::new(2, 1.0).unwrap()) - 4.0 * PI).abs() < 1e-14);
        assert!((bowen_margulis_mass(&ManifoldData::new(3, 1.0).unwrap()) - 16.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn skinning_examples() {
        let m2 = ManifoldData::new(2, 1.0).unwrap();
        assert_eq!(skinning_mass(&m2, &FamilyData::Cusp { vol: 1.0 }), 2.0);
        assert_eq!(skinning_mass(&m2, &FamilyData::Geodesic { length: 1.5, m: 1 }), 3.0);
        let m3 = ManifoldData::new(3, 1.0).unwrap();
        assert!((skinning_mass(&m3, &FamilyData::Point { isotropy: 1 }) - 4.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn modular_constants() {
        let m = ManifoldData::modular();
        let p = pair_constant(&m, &FamilyData::Cusp { vol: 1.0 }, &FamilyData::Cusp { vol: 1.0 }).unwrap();
        assert!((p.c - 3.0 / (PI * PI)).abs() < 1e-15 && p.audit_passed);
        let p = pair_constant(&m, &FamilyData::Point { isotropy: 1 }, &FamilyData::Cusp { vol: 1.0 }).unwrap();
        assert!((p.c - 3.0 / PI).abs() < 1e-14 && p.audit_passed);
        let p = pair_constant(&m, &FamilyData::Geodesic { length: 2.0, m: 1 }, &FamilyData::Geodesic { length: 3.0, m: 1 }).unwrap();
        assert!((p.c - 18.0 / (PI * PI)).abs() < 1e-14 && p.audit_passed);
    }

    #[test]
    fn potential_shift() {
        let m = ManifoldData::modular();
        let p = pair_constant(&m, &FamilyData::Cusp { vol: 1.0 }, &FamilyData::Cusp { vol: 1.0 }).unwrap();
        let t = 2.0 * 400f64.ln();
        let n = predicted_count(&p, t, &Potential::Constant(-0.5)).unwrap();
        assert!((n / (3.0 / (PI * PI) * 800.0) - 1.0).abs() < 1e-12);
        let z = predicted_count(&p, t, &Potential::Zero).unwrap();
        assert_eq!(predicted_count(&p, t, &Potential::Constant(0.0)).unwrap(), z);
        assert_eq!(predicted_count(&p, 1.0, &Potential::Constant(-1.0)), Err(AsymError::ZeroExponent));
    }
}
