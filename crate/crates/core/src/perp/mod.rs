//! Equivariant families, their ortholength spectra and counting functions.

mod engine;
mod family;
mod potential;

use alloc::boxed::Box;
use alloc::vec::Vec;

use thiserror::Error;

use crate::geom::{closest_point_boundary, ConvexBody, GeomError, UnitTangent};
use crate::groups::{enumerate_word_ball, GroupError, GroupSpec, WordBall};

pub use engine::{
    counting_function, find_common_perpendiculars, find_common_perpendiculars_with, witness_word, EngineOptions,
    Multiplicity, OrthoSpectrum, PerpRecord,
};
pub use family::{body_key, EquivariantFamily, KEY_LEN};
pub use potential::{potential_integral, potential_integral_with_error, Potential};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum PerpError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("invalid family: {0}")]
    InvalidFamily(&'static str),
    #[error("dimension mismatch")]
    DimensionMismatch,
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("budget exceeded: {reason}")]
    BudgetExceeded { reason: &'static str, partial: Box<OrthoSpectrum> },
    #[error("grid point {t} beyond spectrum range {t_max}")]
    GridBeyondSpectrum { t: f64, t_max: f64 },
}

/// Result of [`multiplicity`] with the raw counts behind it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MultiplicityReport {
    pub value: Multiplicity,
    /// Distinct family members whose outer normal bundle contains the vector.
    pub members: u32,
    /// Group elements fixing the vector.
    pub stabilizer: u32,
    /// Set when the search hit its element cap before its word bound.
    pub capped: bool,
}

/// Caps of the bounded searches in [`multiplicity`].
pub const MULTIPLICITY_MAX_ELEMENTS: usize = 10_000;
pub const MULTIPLICITY_WORD_BOUND: u32 = 12;

/// Whether `v` is an outer unit normal of `d`: its base lies on the
/// boundary and is the closest point of `d` to the forward endpoint.
pub fn in_outer_normal_bundle(v: &UnitTangent, d: &ConvexBody, tol: f64) -> bool {
    let (_, plus) = v.endpoints();
    match closest_point_boundary(d, &plus) {
        Ok(p) => crate::geom::hyp_dist(&p, &v.base).map_or(false, |x| x <= tol),
        Err(_) => false,
    }
}

/// `m(v) = #{members with v in their outer normal bundle} / #Stab(v)`,
/// both counted over a bounded word ball of the group.
pub fn multiplicity(v: &UnitTangent, family: &EquivariantFamily, g: &GroupSpec) -> Result<MultiplicityReport, PerpError> {
    if v.dim() != g.dim || family.dim() != g.dim {
        return Err(PerpError::DimensionMismatch);
    }
    let (ball, capped): (WordBall, bool) = match enumerate_word_ball(g, MULTIPLICITY_WORD_BOUND, MULTIPLICITY_MAX_ELEMENTS) {
        Ok(b) => (b, false),
        Err(GroupError::BudgetExceeded { partial, .. }) => (*partial, true),
        Err(e) => return Err(e.into()),
    };
    let mut members: Vec<ConvexBody> = Vec::new();
    let mut stab = 0u32;
    for e in &ball.elements {
        let b = family.base.apply(&e.g);
        if in_outer_normal_bundle(v, &b, 1e-8) && !members.iter().any(|m| m.approx_eq(&b, 1e-8)) {
            members.push(b);
        }
        if v.apply(&e.g).deviation(v) <= 1e-8 {
            stab += 1;
        }
    }
    let n = members.len() as u32;
    if n == 0 {
        return Err(PerpError::InvalidArgument("vector is not normal to any family member found"));
    }
    Ok(MultiplicityReport { value: Multiplicity::new(n, stab.max(1)), members: n, stabilizer: stab.max(1), capped })
}
