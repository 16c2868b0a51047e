//! Numerical tolerances shared by every module.

/// One record holding every tolerance and limit-extrapolation constant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Geometric equality of points, lengths and boundary points.
    pub geom_eq: f64,
    /// Allowed deviation of a matrix determinant from one.
    pub det: f64,
    /// First evaluation time of renormalized limits (Hamenstädt distances).
    pub limit_t1: f64,
    /// Second evaluation time; `limit_t2 = 2 * limit_t1`.
    pub limit_t2: f64,
    /// Quantization grid of dedup keys.
    pub dedup_grid: f64,
    /// Confirmation tolerance for candidate dedup collisions.
    pub dedup_confirm: f64,
    /// Smallest bracket width of the numeric minimizers.
    pub step_floor: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        geom_eq: 1e-9,
        det: 1e-12,
        limit_t1: 20.0,
        limit_t2: 40.0,
        dedup_grid: 1e-6,
        dedup_confirm: 1e-9,
        step_floor: 1e-12,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Geometric equality tolerance.
pub const GEOM_EQ: f64 = Tolerances::DEFAULT.geom_eq;
