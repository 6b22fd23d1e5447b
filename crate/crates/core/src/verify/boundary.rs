use crate::field::CurvatureField;
use crate::jacobi::{conjugate_distance, solve_bundle, ProbeConfig};
use crate::ode::Tolerance;
use crate::{Error, Result};
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

/// Below this `|Df₁|` the implicit-curve formula is not evaluated.
pub const MIN_GRADIENT: f64 = 1e-6;

/// Curvature of the boundary of the no-conjugate domain at `v₀ = (0, ℓ₀)`,
/// with the derivatives of `f₁(·, 1)` that enter it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryCurvature {
    pub k: f64,
    pub ell0: f64,
    pub d1: f64,
    pub d2: f64,
    pub d11: f64,
    pub d12: f64,
    pub d22: f64,
}

/// `k = −(D₁₁f₁(D₂f₁)² − 2D₁₂f₁D₁f₁D₂f₁ + D₂₂f₁(D₁f₁)²)/|Df₁|³` at the
/// first conjugate point along the axis.
///
/// `D₁₂` comes from polarization with `ν = (∂₁ + ∂₂)/√2`.
pub fn noconj_boundary_curvature(
    field: &CurvatureField,
    tol: Tolerance,
) -> Result<BoundaryCurvature> {
    let ell0 = conjugate_distance(field, tol)?.min(PI);
    let end = |phi: f64| -> Result<_> {
        Ok(solve_bundle(field, ProbeConfig::new(ell0, 0.0, phi)?, tol)?.at_end())
    };
    let (e1, e2, ed) = (end(FRAC_PI_2)?, end(0.0)?, end(FRAC_PI_4)?);
    let (d1, d2) = (e1.fp1, e2.fp1);
    let (d11, d22) = (e1.fpp1, e2.fpp1);
    let d12 = ed.fpp1 - 0.5 * d11 - 0.5 * d22;
    let g = d1.hypot(d2);
    if g < MIN_GRADIENT {
        return Err(Error::DegenerateBoundary(g));
    }
    let k = -(d11 * d2 * d2 - 2.0 * d12 * d1 * d2 + d22 * d1 * d1) / (g * g * g);
    Ok(BoundaryCurvature {
        k,
        ell0,
        d1,
        d2,
        d11,
        d12,
        d22,
    })
}
