//! Hyperbolic kernel for H² and H³ in the upper half-space model.
//!
//! Points of H³ are `(z, h)` with `z` complex and `h > 0`. The plane H² sits
//! inside as the points with real `z`, so one set of formulas serves both
//! dimensions; the [`Dim`] tag records which space a value belongs to and
//! mixing tags is an error.

mod body;
pub mod creation;
mod error;
mod isometry;
pub mod numeric;
mod perp;
mod point;
mod tangent;
mod trig;

pub use body::{closest_point, closest_point_boundary, ConvexBody};
pub use error::GeomError;
pub use isometry::Isometry;
pub use perp::{common_perpendicular, CommonPerp, PerpOutcome};
pub use point::{busemann, cayley_from_disc, cayley_to_disc, hyp_dist, BoundaryPoint, Dim, Point};
pub use tangent::{dyn_nbhd_contains, geodesic_flow, hamenstadt_distance, DynNbhdSpec, Leaf, Sign, UnitTangent};
pub use trig::{trig, TrigQuery};
