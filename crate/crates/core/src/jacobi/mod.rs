//! Jacobi fields along the probe axis `X(t) = (0, t·r0)` together with their
//! first and second variations in a direction `ν`, conjugate distance along
//! the axis, and off-axis geodesics.

mod offaxis;

pub use offaxis::{geodesic_energy, geodesic_shoot, jacobi_off_axis, OFF_AXIS_TOL};

use crate::field::CurvatureField;
use crate::ode::{integrate_span, refine_on, zero_bracket, Options, Tolerance, Trajectory};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Probe `(r0, ϑ, φ)`: `V₀ = r0 ∂₂`, `ξ = sinϑ ∂₁ + cosϑ ∂₂`, `ν = sinφ ∂₁ + cosφ ∂₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub r0: f64,
    pub theta: f64,
    pub phi: f64,
}

impl ProbeConfig {
    /// Angles are reduced to `[0, 2π)`.
    pub fn new(r0: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(r0 > 0.0 && r0 <= PI) {
            return Err(Error::Invalid(format!("r0 must lie in (0, π], got {r0}")));
        }
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::Invalid("angles must be finite".into()));
        }
        let red = |a: f64| {
            let r = a.rem_euclid(TAU);
            if r >= TAU {
                0.0
            } else {
                r
            }
        };
        Ok(ProbeConfig {
            r0,
            theta: red(theta),
            phi: red(phi),
        })
    }

    pub fn xi(&self) -> [f64; 2] {
        [self.theta.sin(), self.theta.cos()]
    }

    pub fn nu(&self) -> [f64; 2] {
        [self.phi.sin(), self.phi.cos()]
    }

    pub fn v0(&self) -> [f64; 2] {
        [0.0, self.r0]
    }
}

/// State layout of the coupled bundle system.
pub mod idx {
    pub const F0: usize = 0;
    pub const DF0: usize = 1;
    pub const F1: usize = 2;
    pub const DF1: usize = 3;
    pub const FP0: usize = 4;
    pub const DFP0: usize = 5;
    pub const FP1: usize = 6;
    pub const DFP1: usize = 7;
    pub const FPP0: usize = 8;
    pub const DFPP0: usize = 9;
    pub const FPP1: usize = 10;
    pub const DFPP1: usize = 11;
    pub const X1: usize = 12;
    pub const DX1: usize = 13;
    pub const X2: usize = 14;
    pub const DX2: usize = 15;
    pub const DIM: usize = 16;
}

/// Bundle values at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BundlePoint {
    pub t: f64,
    pub f0: f64,
    pub f1: f64,
    pub df0_dt: f64,
    pub df1_dt: f64,
    pub fp0: f64,
    pub fp1: f64,
    pub dfp0_dt: f64,
    pub dfp1_dt: f64,
    pub fpp0: f64,
    pub fpp1: f64,
    pub dfpp0_dt: f64,
    pub dfpp1_dt: f64,
    pub dnnx1: f64,
    pub dnnx2: f64,
    pub ddnnx1_dt: f64,
    pub ddnnx2_dt: f64,
}

impl BundlePoint {
    fn from_state(t: f64, y: &[f64]) -> Self {
        use idx::*;
        BundlePoint {
            t,
            f0: y[F0],
            f1: y[F1],
            df0_dt: y[DF0],
            df1_dt: y[DF1],
            fp0: y[FP0],
            fp1: y[FP1],
            dfp0_dt: y[DFP0],
            dfp1_dt: y[DFP1],
            fpp0: y[FPP0],
            fpp1: y[FPP1],
            dfpp0_dt: y[DFPP0],
            dfpp1_dt: y[DFPP1],
            dnnx1: y[X1],
            dnnx2: y[X2],
            ddnnx1_dt: y[DX1],
            ddnnx2_dt: y[DX2],
        }
    }

    /// `D^k f_a` for `k ∈ {0,1,2}`, `a ∈ {0,1}`.
    pub fn d(&self, k: usize, a: usize) -> f64 {
        match (k, a) {
            (0, 0) => self.f0,
            (0, 1) => self.f1,
            (1, 0) => self.fp0,
            (1, 1) => self.fp1,
            (2, 0) => self.fpp0,
            (2, 1) => self.fpp1,
            _ => panic!("derivative order {k} / index {a} out of range"),
        }
    }
}

/// Trajectory of the bundle on `t ∈ [0, 1]`.
#[derive(Debug, Clone)]
pub struct JacobiBundle {
    pub probe: ProbeConfig,
    traj: Trajectory,
}

impl JacobiBundle {
    pub fn len(&self) -> usize {
        self.traj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traj.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        self.traj.times()
    }

    pub fn point(&self, i: usize) -> BundlePoint {
        BundlePoint::from_state(self.traj.times()[i], self.traj.state(i))
    }

    pub fn at_end(&self) -> BundlePoint {
        self.point(self.len() - 1)
    }

    /// Dense-output interpolation.
    pub fn at(&self, t: f64) -> BundlePoint {
        BundlePoint::from_state(t, &self.traj.state_at(t))
    }

    pub fn points(&self) -> impl Iterator<Item = BundlePoint> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    pub fn trajectory(&self) -> &Trajectory {
        &self.traj
    }
}

fn bundle_rhs(
    field: &CurvatureField,
    p: ProbeConfig,
    t: f64,
    y: &[f64],
    dy: &mut [f64],
) -> Result<()> {
    use idx::*;
    let r0 = p.r0;
    let (sp, cp) = p.phi.sin_cos();
    let j = field.jet(0.0, t * r0)?;
    let k = j.k;
    let f1 = y[F1];
    let kp = sp * f1 * j.d1 + t * cp * j.d2;
    let kpp = j.d1 * y[X1]
        + j.d2 * y[X2]
        + j.d11 * f1 * f1 * sp * sp
        + 2.0 * j.d12 * t * f1 * sp * cp
        + j.d22 * t * t * cp * cp;
    let r2k = r0 * r0 * k;

    dy[F0] = y[DF0];
    dy[DF0] = -r2k * y[F0];
    dy[F1] = y[DF1];
    dy[DF1] = -r2k * y[F1];

    let src1 = 2.0 * r0 * cp * k + r0 * r0 * kp;
    dy[FP0] = y[DFP0];
    dy[DFP0] = -r2k * y[FP0] - src1 * y[F0];
    dy[FP1] = y[DFP1];
    dy[DFP1] = -r2k * y[FP1] - src1 * y[F1];

    dy[X1] = y[DX1];
    dy[DX1] = -r2k * y[X1]
        - 4.0 * r0 * cp * sp * k * f1
        - r0 * r0 * sp * sp * f1 * f1 * j.d1
        - 2.0 * r0 * r0 * sp * cp * t * f1 * j.d2;
    dy[X2] = y[DX2];
    dy[DX2] = 4.0 * r0 * sp * sp * k * f1 * y[DF1] + r0 * r0 * sp * sp * f1 * f1 * j.d2;

    for (fa, fpa, fppa, dfppa) in [(F0, FP0, FPP0, DFPP0), (F1, FP1, FPP1, DFPP1)] {
        dy[fppa] = y[dfppa];
        dy[dfppa] = -r2k * y[fppa]
            - (2.0 * k * y[fa]
                + 4.0 * r0 * cp * (kp * y[fa] + k * y[fpa])
                + r0 * r0 * (kpp * y[fa] + 2.0 * kp * y[fpa]));
    }
    Ok(())
}

fn bundle_y0() -> [f64; idx::DIM] {
    let mut y = [0.0; idx::DIM];
    y[idx::F0] = 1.0;
    y[idx::DF1] = 1.0;
    y
}

/// Integrate the coupled 16-dimensional bundle system on `[0, 1]`.
pub fn solve_bundle(
    field: &CurvatureField,
    probe: ProbeConfig,
    tol: Tolerance,
) -> Result<JacobiBundle> {
    solve_bundle_with(field, probe, &Options::with_tol(tol))
}

/// As [`solve_bundle`] with explicit step options (e.g. forced output times).
pub fn solve_bundle_with(
    field: &CurvatureField,
    probe: ProbeConfig,
    opts: &Options,
) -> Result<JacobiBundle> {
    let sys = |t: f64, y: &[f64], dy: &mut [f64]| bundle_rhs(field, probe, t, y, dy);
    let traj = integrate_span(&sys, 0.0, &bundle_y0(), 1.0, opts)?;
    Ok(JacobiBundle { probe, traj })
}

/// Distance `ℓ₀` along the axis to the first conjugate point of the origin.
pub fn conjugate_distance(field: &CurvatureField, tol: Tolerance) -> Result<f64> {
    let s_end = field.patch().x2_max;
    let sys = |s: f64, y: &[f64], dy: &mut [f64]| {
        let k = field.k(0.0, s)?;
        dy[0] = y[1];
        dy[1] = -k * y[0];
        Ok(())
    };
    let opts = Options::with_tol(tol);
    let tr = integrate_span(&sys, 0.0, &[0.0, 1.0], s_end, &opts)?;
    let (lo, hi) = zero_bracket(&tr, 0, crate::ode::T_EXCLUDE).ok_or(Error::NoConjugatePoint)?;
    let i0 = tr.times().iter().rposition(|&t| t <= lo).unwrap_or(0);
    let (t0, y0) = (tr.times()[i0], tr.state(i0).to_vec());
    let mut failure = None;
    let u_at = |s: f64| -> f64 {
        if s <= t0 {
            return y0[0];
        }
        match integrate_span(&sys, t0, &y0, s, &opts) {
            Ok(seg) => seg.last_state()[0],
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        }
    };
    let root = refine_on(u_at, lo, hi, 1e-12);
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::WaveParams;

    fn tol() -> Tolerance {
        Tolerance::tight()
    }

    #[test]
    fn unit_sphere_values() {
        let f = CurvatureField::constant(1.0).unwrap();
        for phi in [0.0, 0.7, 2.0] {
            let b = solve_bundle(&f, ProbeConfig::new(1.0, 0.3, phi).unwrap(), tol()).unwrap();
            let e = b.at_end();
            assert!((e.f0 - 1f64.cos()).abs() < 1e-9);
            assert!((e.f1 - 1f64.sin()).abs() < 1e-9);
        }
        let b = solve_bundle(&f, ProbeConfig::new(1.0, 0.3, 0.0).unwrap(), tol()).unwrap();
        assert!((b.at_end().fp1 - (1f64.cos() - 1f64.sin())).abs() < 1e-9);
    }

    #[test]
    fn initial_conditions() {
        let f = CurvatureField::cosine_bump(1e-3, WaveParams::default()).unwrap();
        let b = solve_bundle(&f, ProbeConfig::new(2.0, 1.0, 1.0).unwrap(), tol()).unwrap();
        let p = b.point(0);
        assert_eq!(
            (p.t, p.f0, p.f1, p.df0_dt, p.df1_dt),
            (0.0, 1.0, 0.0, 0.0, 1.0)
        );
        for v in [
            p.fp0,
            p.fp1,
            p.fpp0,
            p.fpp1,
            p.dnnx1,
            p.dnnx2,
            p.dfp0_dt,
            p.dfpp1_dt,
            p.ddnnx1_dt,
            p.ddnnx2_dt,
        ] {
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn constant_curvature_bar_derivatives() {
        for kappa in [1.0f64, 1.1, 4.0] {
            let f = CurvatureField::constant(kappa).unwrap();
            let (r0, phi) = (0.7, 1.1);
            let b = solve_bundle(&f, ProbeConfig::new(r0, 0.0, phi).unwrap(), tol())
                .unwrap()
                .at_end();
            let sk = kappa.sqrt();
            let r = sk * r0;
            let (s, c) = r.sin_cos();
            let cp = phi.cos();
            let fp0 = -sk * s * cp;
            let fpp0 = kappa * (-s / r + (s / r - c) * cp * cp);
            let fp1 = sk / r * (c - s / r) * cp;
            let fpp1 = kappa / (r * r) * (c - s / r + (3.0 * (s / r - c) - r * s) * cp * cp);
            for (a, b) in [(b.fp0, fp0), (b.fpp0, fpp0), (b.fp1, fp1), (b.fpp1, fpp1)] {
                assert!((a - b).abs() < 1e-9, "kappa {kappa}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn conjugate_distances() {
        let l = conjugate_distance(&CurvatureField::constant(1.0).unwrap(), tol()).unwrap();
        assert!((l - PI).abs() < 1e-10, "{l}");
        let l = conjugate_distance(&CurvatureField::constant(4.0).unwrap(), tol()).unwrap();
        assert!((l - PI / 2.0).abs() < 1e-10, "{l}");
        let f = CurvatureField::cosine_bump(1e-3, WaveParams::default()).unwrap();
        let l = conjugate_distance(&f, tol()).unwrap();
        assert!(l >= PI / 1.001f64.sqrt() && l <= PI, "{l}");
    }

    #[test]
    fn probe_validation() {
        assert!(ProbeConfig::new(0.0, 0.0, 0.0).is_err());
        assert!(ProbeConfig::new(3.5, 0.0, 0.0).is_err());
        let p = ProbeConfig::new(1.0, -0.5, 7.0).unwrap();
        assert!(p.theta >= 0.0 && p.theta < TAU && p.phi >= 0.0 && p.phi < TAU);
    }
}
