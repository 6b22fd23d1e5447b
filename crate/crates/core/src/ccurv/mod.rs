//! The c-curvature `𝒞(m₀,V₀)(ξ,ν)` and its companions.

mod aux;
mod maclaurin;
mod sphere;

pub use aux::{h1, h2, h_mu_functions, mu1, mu1_minorant, s_bar_split, HMu, SBarSplit};
pub use maclaurin::{maclaurin_residual, MaclaurinData, MaclaurinResidual};
pub use sphere::{c_curvature_sphere, sphere_terms, SERIES_SWITCH, T1_SERIES_SWITCH};

use crate::field::CurvatureField;
use crate::jacobi::{
    conjugate_distance, jacobi_off_axis, solve_bundle, BundlePoint, ProbeConfig, OFF_AXIS_TOL,
};
use crate::numeric::neville_at_zero;
use crate::ode::Tolerance;
use crate::{Error, Result};
use serde::Serialize;

/// Probes are restricted to `r₀ ≤ (1 − PROBE_CAP)·ℓ₀`.
pub const PROBE_CAP: f64 = 1e-6;

/// `ratio` is reported only above this `𝒜₂`.
pub const A2_MIN: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Variational,
    FdOracle,
    SphereClosedForm,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Variational => "variational",
            Method::FdOracle => "fd-oracle",
            Method::SphereClosedForm => "sphere-closed-form",
        }
    }
}

/// `E₁, E₂, E₃` with `f₁³𝒞 = −sin²ϑ E₁ + (cos²ϑ − cos²(ϑ+φ)) E₂ + cosϑ sinϑ sinφ E₃`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Parts {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CCurvSample {
    pub value: f64,
    pub a2: f64,
    pub ratio: Option<f64>,
    pub parts: Parts,
    pub probe: ProbeConfig,
    pub method: Method,
    /// `"degenerate"` for rank ≤ 1 probes (`𝒜₂ ≤ A2_MIN`).
    pub flags: Vec<&'static str>,
}

impl CCurvSample {
    fn new(value: f64, parts: Parts, probe: ProbeConfig, method: Method) -> Self {
        let a2 = a2(probe);
        let mut flags = Vec::new();
        let ratio = if a2 > A2_MIN {
            Some(value / a2)
        } else {
            flags.push("degenerate");
            None
        };
        CCurvSample {
            value,
            a2,
            ratio,
            parts,
            probe,
            method,
            flags,
        }
    }
}

/// `𝒜₂ = sin²(ϑ−φ) + r₀² sin²ϑ + r₀² sin²φ`.
pub fn a2(probe: ProbeConfig) -> f64 {
    let d = (probe.theta - probe.phi).sin();
    let st = probe.theta.sin();
    let sp = probe.phi.sin();
    let r2 = probe.r0 * probe.r0;
    d * d + r2 * st * st + r2 * sp * sp
}

/// Bundle values entering the formula, at `t = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FValues {
    pub f0: f64,
    pub f1: f64,
    pub fp0: f64,
    pub fp1: f64,
    pub fpp0: f64,
    pub fpp1: f64,
}

impl From<BundlePoint> for FValues {
    fn from(b: BundlePoint) -> Self {
        FValues {
            f0: b.f0,
            f1: b.f1,
            fp0: b.fp0,
            fp1: b.fp1,
            fpp0: b.fpp0,
            fpp1: b.fpp1,
        }
    }
}

/// `𝒞` from the values at `t = 1`, term by term as in the general formula.
pub fn c_curvature_from_values(f: FValues, probe: ProbeConfig) -> Result<f64> {
    if !(f.f1 > 0.0) {
        return Err(Error::BeyondConjugacy { f1: f.f1 });
    }
    let FValues {
        f0,
        f1,
        fp0,
        fp1,
        fpp0,
        fpp1,
    } = f;
    let r0 = probe.r0;
    let (st, ct) = probe.theta.sin_cos();
    let sp = probe.phi.sin();
    let ctp = (probe.theta + probe.phi).cos();
    let f12 = f1 * f1;
    let line1 = -st
        * st
        * (fpp0 / f1 - f0 * fpp1 / f12 - 2.0 * fp0 * fp1 / f12 + 2.0 * f0 * fp1 * fp1 / (f12 * f1));
    let line2 = 2.0 / (r0 * r0) * (ct * ct - ctp * ctp) * (1.0 - f0 / f1);
    let line3 = 4.0 / r0 * ct * st * sp * (fp0 / f1 - f0 * fp1 / f12);
    Ok(line1 + line2 + line3)
}

pub fn parts(f: FValues, r0: f64) -> Parts {
    let FValues {
        f0,
        f1,
        fp0,
        fp1,
        fpp0,
        fpp1,
    } = f;
    Parts {
        e1: f1 * f1 * fpp0 - f0 * f1 * fpp1 - 2.0 * f1 * fp0 * fp1 + 2.0 * f0 * fp1 * fp1,
        e2: 2.0 / (r0 * r0) * f1 * f1 * (f1 - f0),
        e3: 4.0 / r0 * f1 * (f1 * fp0 - f0 * fp1),
    }
}

/// The two regrouped forms of the general formula.
pub fn alt_values(f: FValues, probe: ProbeConfig) -> Result<(f64, f64)> {
    if !(f.f1 > 0.0) {
        return Err(Error::BeyondConjugacy { f1: f.f1 });
    }
    let FValues {
        f0,
        f1,
        fp0,
        fp1,
        fpp0,
        fpp1,
    } = f;
    let r0 = probe.r0;
    let (st, ct) = probe.theta.sin_cos();
    let (sp, cp) = probe.phi.sin_cos();
    let f12 = f1 * f1;
    let core = fpp0 / f1 - f0 * fpp1 / f12 - 2.0 * fp0 * fp1 / f12;
    let sq = fp1 / f1 * st + sp * ct / r0;
    let alt_a = -st * st * core - 2.0 * f0 / f1 * sq * sq
        + 2.0 / (r0 * r0) * (1.0 - f0 / f1) * (2.0 * ct * cp * st * sp - st * st * sp * sp)
        + 2.0 / (r0 * r0) * ct * ct * sp * sp
        + 4.0 / r0 * ct * st * sp * fp0 / f1;
    let mix = cp * st + ct * sp;
    let alt_b =
        -st * st * (core + 2.0 * f0 * fp1 * fp1 / (f12 * f1) + 2.0 / (r0 * r0) * (1.0 - f0 / f1))
            + 2.0 / (r0 * r0) * (1.0 - f0 / f1) * mix * mix
            + 4.0 / r0 * ct * st * sp * (fp0 / f1 - f0 * fp1 / f12);
    Ok((alt_a, alt_b))
}

/// Conjugate distance, or `None` when the patch holds no conjugate point.
pub fn probe_limit(field: &CurvatureField, tol: Tolerance) -> Result<Option<f64>> {
    match conjugate_distance(field, tol) {
        Ok(l) => Ok(Some(l)),
        Err(Error::NoConjugatePoint) => Ok(None),
        Err(e) => Err(e),
    }
}

fn check_cap(probe: ProbeConfig, ell0: Option<f64>) -> Result<()> {
    if let Some(l) = ell0 {
        let cap = (1.0 - PROBE_CAP) * l;
        if probe.r0 > cap {
            return Err(Error::ProbeCap { r0: probe.r0, cap });
        }
    }
    Ok(())
}

fn values(
    field: &CurvatureField,
    probe: ProbeConfig,
    tol: Tolerance,
    ell0: Option<f64>,
) -> Result<FValues> {
    check_cap(probe, ell0)?;
    let b = solve_bundle(field, probe, tol)?;
    Ok(b.at_end().into())
}

/// Variational c-curvature at a probe.
pub fn c_curvature(
    field: &CurvatureField,
    probe: ProbeConfig,
    tol: Tolerance,
) -> Result<CCurvSample> {
    let ell0 = probe_limit(field, tol)?;
    c_curvature_capped(field, probe, tol, ell0)
}

/// As [`c_curvature`] with a precomputed conjugate distance.
pub fn c_curvature_capped(
    field: &CurvatureField,
    probe: ProbeConfig,
    tol: Tolerance,
    ell0: Option<f64>,
) -> Result<CCurvSample> {
    let f = values(field, probe, tol, ell0)?;
    let value = c_curvature_from_values(f, probe)?;
    Ok(CCurvSample::new(
        value,
        parts(f, probe.r0),
        probe,
        Method::Variational,
    ))
}

/// `(general, altA, altB)` from one bundle solve.
pub fn alt_forms(
    field: &CurvatureField,
    probe: ProbeConfig,
    tol: Tolerance,
) -> Result<(f64, f64, f64)> {
    let ell0 = probe_limit(field, tol)?;
    let f = values(field, probe, tol, ell0)?;
    let g = c_curvature_from_values(f, probe)?;
    let (a, b) = alt_values(f, probe)?;
    Ok((g, a, b))
}

/// Sample of the closed form on a constant field.
pub fn sphere_sample(kappa: f64, probe: ProbeConfig) -> Result<CCurvSample> {
    let rbar = kappa.sqrt() * probe.r0;
    let value = c_curvature_sphere(kappa, rbar, probe.theta, probe.phi)?;
    let (s, c) = rbar.sin_cos();
    let sk = kappa.sqrt();
    let cp = probe.phi.cos();
    let f = FValues {
        f0: c,
        f1: s / rbar,
        fp0: -sk * s * cp,
        fp1: sk / rbar * (c - s / rbar) * cp,
        fpp0: kappa * (-s / rbar + (s / rbar - c) * cp * cp),
        fpp1: kappa / (rbar * rbar) * (c - s / rbar + (3.0 * (s / rbar - c) - rbar * s) * cp * cp),
    };
    Ok(CCurvSample::new(
        value,
        parts(f, probe.r0),
        probe,
        Method::SphereClosedForm,
    ))
}

/// `A(m₀, v)(ξ) = 1 − (1 − f₀/f₁)(1 − (ξ·U)²)` with `U = v/|v|`.
fn a_form(field: &CurvatureField, v: [f64; 2], xi: [f64; 2], tol: Tolerance) -> Result<f64> {
    let (f0, f1) = jacobi_off_axis(field, v, tol)?;
    if !(f1 > 0.0) {
        return Err(Error::BeyondConjugacy { f1 });
    }
    let n = v[0].hypot(v[1]);
    let xu = (xi[0] * v[0] + xi[1] * v[1]) / n;
    Ok(1.0 - (1.0 - f0 / f1) * (1.0 - xu * xu))
}

/// `−(A₊ − 2A₀ + A₋)/h²` along `v₀ + λν`.
pub fn c_curvature_fd_oracle(field: &CurvatureField, probe: ProbeConfig, h: f64) -> Result<f64> {
    c_curvature_fd_oracle_with(field, probe, h, OFF_AXIS_TOL)
}

pub fn c_curvature_fd_oracle_with(
    field: &CurvatureField,
    probe: ProbeConfig,
    h: f64,
    tol: Tolerance,
) -> Result<f64> {
    if !(1e-4..=1e-2).contains(&h) {
        return Err(Error::Invalid(format!(
            "fd step must lie in [1e-4, 1e-2], got {h}"
        )));
    }
    let v0 = probe.v0();
    let nu = probe.nu();
    let xi = probe.xi();
    let at = |l: f64| a_form(field, [v0[0] + l * nu[0], v0[1] + l * nu[1]], xi, tol);
    let (ap, a0, am) = (at(h)?, at(0.0)?, at(-h)?);
    Ok(-(ap - 2.0 * a0 + am) / (h * h))
}

/// Richardson-style limit of `𝒞` as `r₀ → 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NearZeroLimit {
    pub limit: f64,
    pub spread: f64,
    pub samples: Vec<(f64, f64)>,
}

/// Polynomial extrapolation to `r₀ = 0` of `𝒞` along a decreasing `r` sequence.
pub fn near_zero_limit(
    field: &CurvatureField,
    theta: f64,
    phi: f64,
    r_sequence: &[f64],
    tol: Tolerance,
) -> Result<NearZeroLimit> {
    if r_sequence.len() < 2
        || r_sequence.windows(2).any(|w| !(w[1] < w[0]))
        || r_sequence.iter().any(|&r| !(r > 0.0))
    {
        return Err(Error::Invalid(
            "r_sequence must be positive and strictly decreasing".into(),
        ));
    }
    let ell0 = probe_limit(field, tol)?;
    let mut samples = Vec::with_capacity(r_sequence.len());
    for &r in r_sequence {
        let s = c_curvature_capped(field, ProbeConfig::new(r, theta, phi)?, tol, ell0)?;
        samples.push((r, s.value));
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let (limit, spread) = neville_at_zero(&xs, &ys);
    if !limit.is_finite() || spread > 1e-3 * limit.abs().max(1.0) {
        return Err(Error::Extrapolation { spread });
    }
    Ok(NearZeroLimit {
        limit,
        spread,
        samples,
    })
}

/// Default sequence for [`near_zero_limit`].
pub fn default_r_sequence() -> Vec<f64> {
    (0..6).map(|i| 0.2 / f64::powi(2.0, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::WaveParams;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn tol() -> Tolerance {
        Tolerance::tight()
    }

    fn sphere() -> CurvatureField {
        CurvatureField::constant(1.0).unwrap()
    }

    #[test]
    fn rank_one_vanishes() {
        let s = c_curvature(
            &sphere(),
            ProbeConfig::new(FRAC_PI_2, 0.0, 0.0).unwrap(),
            tol(),
        )
        .unwrap();
        assert!(s.value.abs() < 1e-10);
        assert_eq!(s.a2, 0.0);
        assert!(s.ratio.is_none() && s.flags == ["degenerate"]);
    }

    #[test]
    fn sphere_value() {
        let s = c_curvature(
            &sphere(),
            ProbeConfig::new(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2).unwrap(),
            tol(),
        )
        .unwrap();
        assert!((s.value - (1.0 - 8.0 / (PI * PI))).abs() < 1e-7);
        assert_eq!(s.method, Method::Variational);
    }

    #[test]
    fn parts_recombine() {
        let f = CurvatureField::cosine_bump(1e-3, WaveParams::default()).unwrap();
        let p = ProbeConfig::new(1.3, 0.4, 2.2).unwrap();
        let s = c_curvature(&f, p, tol()).unwrap();
        let b = solve_bundle(&f, p, tol()).unwrap().at_end();
        let (st, ct) = p.theta.sin_cos();
        let ctp = (p.theta + p.phi).cos();
        let lhs = b.f1.powi(3) * s.value;
        let rhs = -st * st * s.parts.e1
            + (ct * ct - ctp * ctp) * s.parts.e2
            + ct * st * p.phi.sin() * s.parts.e3;
        assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));
    }

    #[test]
    fn alternative_forms_agree() {
        let cases = [
            (sphere(), ProbeConfig::new(2.0, 1.0, 2.0).unwrap()),
            (sphere(), ProbeConfig::new(3.0, FRAC_PI_2, 0.1).unwrap()),
            (
                CurvatureField::cosine_bump(1e-3, WaveParams::default()).unwrap(),
                ProbeConfig::new(1.0, 2.0, 5.0).unwrap(),
            ),
        ];
        for (f, p) in cases {
            let (g, a, b) = alt_forms(&f, p, tol()).unwrap();
            assert!(
                (g - a).abs() <= 1e-10 * g.abs() && (g - b).abs() <= 1e-10 * g.abs(),
                "{g} {a} {b}"
            );
        }
    }

    #[test]
    fn a2_examples() {
        assert_eq!(a2(ProbeConfig::new(1.0, 0.0, 0.0).unwrap()), 0.0);
        assert!((a2(ProbeConfig::new(1.0, FRAC_PI_2, 0.0).unwrap()) - 2.0).abs() < 1e-15);
        assert!((a2(ProbeConfig::new(2.0, FRAC_PI_2, FRAC_PI_2).unwrap()) - 8.0).abs() < 1e-14);
    }

    #[test]
    fn probe_cap_enforced() {
        assert!(matches!(
            c_curvature(&sphere(), ProbeConfig::new(PI, 1.0, 1.0).unwrap(), tol()),
            Err(Error::ProbeCap { .. })
        ));
    }

    #[test]
    fn fd_oracle_matches_sphere() {
        let p = ProbeConfig::new(1.0, FRAC_PI_2, FRAC_PI_2).unwrap();
        let fd = c_curvature_fd_oracle(&sphere(), p, 1e-3).unwrap();
        let exact = c_curvature_sphere(1.0, 1.0, FRAC_PI_2, FRAC_PI_2).unwrap();
        assert!((fd - exact).abs() < 1e-4, "{fd} vs {exact}");
        let fd0 = c_curvature_fd_oracle(&sphere(), ProbeConfig::new(1.0, 0.0, 0.0).unwrap(), 1e-3)
            .unwrap();
        assert!(fd0.abs() < 1e-6);
        assert!(c_curvature_fd_oracle(&sphere(), p, 0.1).is_err());
    }

    #[test]
    fn fd_oracle_matches_variational_on_bump() {
        let f = CurvatureField::cosine_bump(1e-3, WaveParams::default()).unwrap();
        for (p, h) in [
            (ProbeConfig::new(1.0, 1.0, 2.0).unwrap(), 1e-3),
            (ProbeConfig::new(1.5, 0.7, 1.1).unwrap(), 3e-3),
        ] {
            let v = c_curvature(&f, p, tol()).unwrap().value;
            let fd = c_curvature_fd_oracle(&f, p, h).unwrap();
            assert!((v - fd).abs() <= 1e-4 * v.abs(), "{v} vs {fd}");
        }
    }

    #[test]
    fn sphere_sample_matches_variational() {
        let p = ProbeConfig::new(1.7, 0.9, 2.5).unwrap();
        let s = sphere_sample(1.1, p).unwrap();
        let v = c_curvature(&CurvatureField::constant(1.1).unwrap(), p, tol()).unwrap();
        assert!((s.value - v.value).abs() < 1e-9 * s.value.abs());
        assert!((s.parts.e1 - v.parts.e1).abs() < 1e-9);
    }

    #[test]
    fn near_zero_limits() {
        let r = default_r_sequence();
        let l = near_zero_limit(&sphere(), FRAC_PI_2, 0.0, &r, tol()).unwrap();
        assert!((l.limit - 2.0 / 3.0).abs() < 1e-5, "{}", l.limit);
        let l = near_zero_limit(&sphere(), 1.2, 1.2, &r, tol()).unwrap();
        assert!(l.limit.abs() < 1e-5);
        let l = near_zero_limit(
            &CurvatureField::constant(1.1).unwrap(),
            FRAC_PI_2,
            0.0,
            &r,
            tol(),
        )
        .unwrap();
        assert!((l.limit - 2.2 / 3.0).abs() < 1e-5, "{}", l.limit);
        assert!(near_zero_limit(&sphere(), 1.0, 0.0, &[0.1, 0.2], tol()).is_err());
    }
}
