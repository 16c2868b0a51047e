use num_traits::Float;

use super::GeomError;

/// Classical identities of hyperbolic trigonometry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TrigQuery {
    /// Upper bound `1/sinh b` for `tan α` in a triangle with a non-acute
    /// angle opposite the side adjacent to `α` and that angle.
    TriangleTanBound { b: f64 },
    /// Side `b₂` of a Lambert quadrilateral with side `b₁` and acute angle
    /// `φ`: `cosh b₂ = sinh b₁ / √(sinh² b₁ sin² φ − cos² φ)`.
    LambertSide { b1: f64, phi: f64 },
    /// Angle of parallelism `θ` at distance `d`: `cot θ = sinh d`.
    Parallelism { d: f64 },
}

pub fn trig(q: TrigQuery) -> Result<f64, GeomError> {
    match q {
        TrigQuery::TriangleTanBound { b } => Ok(1.0 / b.sinh()),
        TrigQuery::LambertSide { b1, phi } => {
            let s = b1.sinh();
            let rad = s * s * phi.sin().powi(2) - phi.cos().powi(2);
            if !(rad > 0.0) {
                return Err(GeomError::DomainError("Lambert radicand is not positive"));
            }
            Ok((s / rad.sqrt()).max(1.0).acosh())
        }
        TrigQuery::Parallelism { d } => Ok((1.0 / d.sinh()).atan()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambert_right_angle() {
        let b = trig(TrigQuery::LambertSide { b1: 1.3, phi: core::f64::consts::FRAC_PI_2 }).unwrap();
        assert!(b.abs() < 1e-7);
        assert!(trig(TrigQuery::LambertSide { b1: 0.1, phi: 0.2 }).is_err());
    }

    #[test]
    fn parallelism_quarter_turn() {
        let theta = trig(TrigQuery::Parallelism { d: 1.0f64.asinh() }).unwrap();
        assert!((theta - core::f64::consts::FRAC_PI_4).abs() < 1e-15);
    }
}
