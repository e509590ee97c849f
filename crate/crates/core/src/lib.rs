//! Equilibria of the Euler-Helfrich energy with elastic boundary.
//!
//! Without the default `std` feature the crate is `no_std` and only needs
//! `alloc`; float math then comes from `libm`. It covers:
//!
//! * [`elastica`]: closed critical curves of the bending energy circular at rest,
//!   obtained from the first integrals and a shooting procedure.
//! * [`delaunay`]: constant mean curvature surfaces of revolution and the critical
//!   nodoidal annuli.
//! * [`mesh`], [`meshgen`], [`geometry`]: triangle meshes and discrete curvature.
//! * [`energy`]: energy evaluation, lower bounds and equilibrium residuals.
//! * [`flow`]: fixed boundary mean curvature flow.
//!
//! Sign conventions: the surface normal points out of convex domains, so the unit
//! sphere has `H = -1`, and the geodesic curvature of the boundary of a flat unit
//! disc is `-1`.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod curve;
pub mod delaunay;
pub mod elastica;
pub mod energy;
mod error;
pub mod flow;
pub mod geometry;
pub mod mesh;
pub mod meshgen;
pub mod numeric;
mod vec3;

pub use error::{Error, Result};
pub use vec3::Vec3;
