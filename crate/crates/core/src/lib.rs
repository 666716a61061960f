//! Surfaces of osculating circles.
//!
//! Given a space curve `alpha` with non-vanishing curvature, the surface
//! sweeps its osculating circles:
//!
//! ```text
//! X(s, u) = alpha(s) + r(s) (sin u T(s) + (1 - cos u) N(s))
//! ```
//!
//! The crate evaluates the surface and its closed-form fundamental forms and
//! curvatures, checks them against a finite-difference oracle that only
//! sees surface positions, and classifies surfaces (planar, spherical,
//! canal, Weingarten, constant curvature).

// `!(x > y)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod cli;
pub mod curve;
pub mod error;
pub mod export;
pub mod forms;
pub mod frenet;
pub mod grid;
pub mod mesh;
pub mod oracle;
pub mod surface;
mod taylor;

pub use curve::{arc_length_rescale, CurveJet, CurveKind, CurveSpec, Shape, Vec3};
pub use error::{Error, Result};
pub use frenet::{frenet_at, frenet_derivative_check, FrenetData, FrenetResiduals};
