use super::sphere::c_curvature_sphere;
use super::{c_curvature_from_values, FValues};
use crate::field::CurvatureField;
use crate::jacobi::{solve_bundle, ProbeConfig};
use crate::ode::{solution_map, ForcedOscillator, Tolerance};
use crate::{Error, Result};
use serde::Serialize;
use std::f64::consts::PI;

/// `ψ₀, ψ₁, ψ₂` built from `∂K(0)` and `φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaclaurinData {
    pub psi0: f64,
    pub psi1: f64,
    pub psi2: f64,
}

impl MaclaurinData {
    pub fn new(field: &CurvatureField, phi: f64) -> Result<Self> {
        let j = field.jet(0.0, 0.0)?;
        let (sp, cp) = phi.sin_cos();
        Ok(MaclaurinData {
            psi0: j.d2,
            psi1: 3.0 * cp * j.d2 + sp * j.d1,
            psi2: (2.0 + 4.0 * cp * cp) * j.d2 + 4.0 * sp * cp * j.d1,
        })
    }

    /// `|ψ₀| ≤ ε, |ψ₁| ≤ 4ε, |ψ₂| ≤ 8ε`.
    pub fn within_bounds(&self, eps: f64) -> bool {
        self.psi0.abs() <= eps && self.psi1.abs() <= 4.0 * eps && self.psi2.abs() <= 8.0 * eps
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaclaurinResidual {
    pub residual: f64,
    pub bound: f64,
    pub psi: MaclaurinData,
    pub kappa: f64,
    pub rbar0: f64,
}

impl MaclaurinResidual {
    pub fn holds(&self) -> bool {
        self.residual <= self.bound
    }
}

/// Absolute value of the first-order Maclaurin remainder of `(f₁/f̄₁)³𝒞 − 𝒞̄`
/// and its bound `(C₁³π⁸/f̄₁³) ε r₀² (338 sin²ϑ + 268 cos²ϑ sin²φ)`.
///
/// `eps` is the field's `|K − 1|_{C²}` and `c1` the constant `C₁`.
pub fn maclaurin_residual(
    field: &CurvatureField,
    probe: ProbeConfig,
    eps: f64,
    c1: f64,
    tol: Tolerance,
) -> Result<MaclaurinResidual> {
    if !(0.0..=1.0 / (PI * PI)).contains(&eps) {
        return Err(Error::Hypothesis(format!("ε = {eps} exceeds 1/π²")));
    }
    let kappa = field.k(0.0, 0.0)?;
    let r0 = probe.r0;
    let rbar = kappa.sqrt() * r0;
    if !(rbar < PI) {
        return Err(Error::Hypothesis(format!("r̄₀ = {rbar} is not below π")));
    }
    let f: FValues = solve_bundle(field, probe, tol)?.at_end().into();
    let c = c_curvature_from_values(f, probe)?;
    let cbar = c_curvature_sphere(kappa, rbar, probe.theta, probe.phi)?;
    let psi = MaclaurinData::new(field, probe.phi)?;

    let f0b = rbar.cos();
    let f1b = rbar.sin() / rbar;
    let s_t = solution_map(&ForcedOscillator::new(rbar, |t| t)?, 1.0)?;
    let s_t2 = solution_map(&ForcedOscillator::new(rbar, |t| t * t)?, 1.0)?;
    let s_t2_t = solution_map(&ForcedOscillator::new(rbar, |t| t * t - t)?, 1.0)?;

    let (st, ct) = probe.theta.sin_cos();
    let sp = probe.phi.sin();
    let ctp = (probe.theta + probe.phi).cos();
    let bracket = s_t - f0b * s_t2 / f1b;
    let expr = (f.f1 / f1b).powi(3) * c - cbar - r0 * psi.psi2 * st * st / f1b * bracket
        + 2.0 * r0 * psi.psi0 * s_t2_t / f1b * (ct * ct - ctp * ctp)
        + 4.0 * r0 * psi.psi1 * ct * st * sp / f1b * bracket;
    let bound = c1.powi(3) * PI.powi(8) / f1b.powi(3)
        * eps
        * r0
        * r0
        * (338.0 * st * st + 268.0 * ct * ct * sp * sp);
    Ok(MaclaurinResidual {
        residual: expr.abs(),
        bound,
        psi,
        kappa,
        rbar0: rbar,
    })
}
