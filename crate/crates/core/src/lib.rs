//! Common perpendiculars between equivariant families of convex bodies in
//! real hyperbolic 2- and 3-space, their ortholength spectra, and the
//! machinery needed to compare the resulting counting functions with their
//! predicted exponential asymptotics.
//!
//! The crate is `no_std` with `alloc`. File formats, configuration and the
//! command-line front end live in the `orthocount` crate.
#![cfg_attr(not(any(feature = "std", test)), no_std)]
// `Float` supplies the float math methods when std is absent from the build
// graph. Any crate that links std (a dev-dependency is enough) makes the
// inherent methods visible and the import unused.
#![allow(unused_imports)]

extern crate alloc;

pub mod asym;
pub mod dedup;
pub mod exec;
pub mod geom;
pub mod groups;
pub mod limitset;
pub mod perp;
pub mod stats;
pub mod tol;

pub use num_complex::Complex64 as C64;
