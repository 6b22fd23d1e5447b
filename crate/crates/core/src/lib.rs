//! c-curvature (extended Ma–Trudinger–Wang tensor) of two-dimensional
//! Riemannian surfaces, computed from a Gauss curvature field given in a
//! Fermi chart.
//!
//! Layers, bottom up: [`ode`] (integration, quadrature, zero finding),
//! [`field`] (curvature fields and metric reconstruction), [`jacobi`]
//! (Jacobi fields and their variations along a probe geodesic), [`ccurv`]
//! (the tensor and its closed-form companions), [`constants`] (universal
//! constants and smallness thresholds) and [`verify`] (bound checks and scans).

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod ccurv;
pub mod constants;
mod error;
pub mod field;
pub mod jacobi;
pub mod numeric;
pub mod ode;
pub mod verify;

pub use error::{Error, Result};
