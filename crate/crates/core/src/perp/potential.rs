use alloc::sync::Arc;
use core::fmt;

use num_traits::Float;

use crate::geom::{geodesic_flow, UnitTangent};

/// Potential on the unit tangent bundle, integrated along perpendiculars.
#[derive(Clone)]
pub enum Potential {
    Zero,
    Constant(f64),
    /// Arbitrary function integrated by the composite midpoint rule with
    /// the given step.
    Custom {
        f: Arc<dyn Fn(&UnitTangent) -> f64 + Send + Sync>,
        step: f64,
    },
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::Zero => write!(f, "Zero"),
            Potential::Constant(s) => write!(f, "Constant({s})"),
            Potential::Custom { step, .. } => write!(f, "Custom {{ step: {step} }}"),
        }
    }
}

impl Potential {
    pub fn custom<F: Fn(&UnitTangent) -> f64 + Send + Sync + 'static>(f: F, step: f64) -> Self {
        Potential::Custom { f: Arc::new(f), step }
    }

    /// Largest absolute value over the given vectors.
    pub fn sampled_bound(&self, samples: &[UnitTangent]) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Constant(s) => s.abs(),
            Potential::Custom { f, .. } => samples.iter().map(|v| f(v).abs()).fold(0.0, f64::max),
        }
    }
}

fn midpoint(f: &(dyn Fn(&UnitTangent) -> f64 + Send + Sync), v: &UnitTangent, ell: f64, n: usize) -> f64 {
    let h = ell / n as f64;
    (0..n).map(|i| f(&geodesic_flow(v, (i as f64 + 0.5) * h))).sum::<f64>() * h
}

/// `∫₀^ℓ F(gᵗ v) dt` together with an error estimate (zero for exact cases).
pub fn potential_integral_with_error(pot: &Potential, v: &UnitTangent, ell: f64) -> (f64, f64) {
    match pot {
        Potential::Zero => (0.0, 0.0),
        Potential::Constant(s) => (s * ell, 0.0),
        Potential::Custom { f, step } => {
            let n = ((ell / step).ceil() as usize).max(1);
            let coarse = midpoint(f.as_ref(), v, ell, n);
            let fine = midpoint(f.as_ref(), v, ell, 2 * n);
            // Midpoint error is quadratic in the step.
            (fine + (fine - coarse) / 3.0, (fine - coarse).abs() / 3.0)
        }
    }
}

pub fn potential_integral(pot: &Potential, v: &UnitTangent, ell: f64) -> f64 {
    potential_integral_with_error(pot, v, ell).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;
    use crate::C64;

    #[test]
    fn exact_cases() {
        let v = UnitTangent::new(Point::h2(0.0, 1.0), C64::new(0.0, 0.0), -1.0).unwrap();
        assert_eq!(potential_integral(&Potential::Zero, &v, 5.0), 0.0);
        let i = potential_integral(&Potential::Constant(-0.5), &v, 2.0 * 3f64.ln());
        assert!((i + 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn height_along_ray() {
        let v = UnitTangent::new(Point::h2(0.0, 1.0), C64::new(0.0, 0.0), -1.0).unwrap();
        let p = Potential::custom(|w: &UnitTangent| w.base.h, 0.01);
        let want = 1.0 - (-1.0f64).exp();
        let got = potential_integral(&p, &v, 1.0);
        assert!(((got - want) / want).abs() < 1e-6);
    }
}
