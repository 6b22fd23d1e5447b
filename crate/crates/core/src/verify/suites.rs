use super::lemma::measured_epsilon;
use super::BoundCheckReport;
use crate::ccurv::{h1, h2, maclaurin_residual, mu1, mu1_minorant};
use crate::field::CurvatureField;
use crate::jacobi::{conjugate_distance, solve_bundle, JacobiBundle, ProbeConfig};
use crate::ode::Tolerance;
use crate::{Error, Result};
use std::f64::consts::{FRAC_PI_2, PI};

/// `μ₁(τ) ≥ MU1_CASE1·δ₂²` on `[0.49δ₂, 1]`.
pub const MU1_CASE1: f64 = 4.38e-3;
/// `μ₁(τ) ≥ MU1_CASE2` on `[1, (1 − δ₁/4)π]`.
pub const MU1_CASE2: f64 = 2.6e-4;

const GRID: usize = 10_000;

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..=n).map(move |i| lo + (hi - lo) * i as f64 / n as f64)
}

/// The three angular inequalities used to compare `𝒞` with `𝒜₂`, each as
/// `(lhs, rhs)` with `lhs ≤ rhs` expected:
///
/// - `|cos²ϑ − cos²(ϑ+φ)| ≤ sin²ϑ + 2cos²ϑ sin²φ`
/// - `2|cosϑ sinϑ sinφ| ≤ sin²ϑ + cos²ϑ sin²φ`
/// - `𝒜₂/(4π²) ≤ sin²ϑ + cos²ϑ sin²φ` for `r₀ ≤ π`
pub fn trig_bounds(r0: f64, theta: f64, phi: f64) -> [(f64, f64); 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, _) = phi.sin_cos();
    let c2 = (theta + phi).cos();
    let base = st * st + ct * ct * sp * sp;
    let d = (theta - phi).sin();
    let a2 = d * d + r0 * r0 * (st * st + sp * sp);
    [
        ((ct * ct - c2 * c2).abs(), st * st + 2.0 * ct * ct * sp * sp),
        (2.0 * (ct * st * sp).abs(), base),
        (a2 / (4.0 * PI * PI), base),
    ]
}

/// Maclaurin residual against its bound at each probe (id `corollary`).
pub fn corollary_sweep(
    field: &CurvatureField,
    probes: &[ProbeConfig],
    eps: f64,
    c1: f64,
    tol: Tolerance,
) -> Result<BoundCheckReport> {
    let mut report = BoundCheckReport::new();
    report.epsilon = Some(eps);
    for &p in probes {
        let m = maclaurin_residual(field, p, eps, c1, tol)?;
        report.record(
            "corollary",
            m.residual,
            m.bound,
            &[("r0", p.r0), ("theta", p.theta), ("phi", p.phi)],
        );
    }
    Ok(report)
}

/// Monotonicity of `h₁` on `[0, π]` and `h₂` on `[0, π/2]`, and the
/// alternating-series minorants on `(0, 1]` (as ratios minorant/h ≤ 1).
pub fn hfunc_check() -> BoundCheckReport {
    let mut r = BoundCheckReport::new();
    for (id, h, hi) in [
        ("h1.increasing", h1 as fn(f64) -> f64, PI),
        ("h2.increasing", h2 as fn(f64) -> f64, FRAC_PI_2),
    ] {
        let taus: Vec<f64> = grid(0.0, hi, GRID).collect();
        for w in taus.windows(2) {
            r.record_with_slack(id, h(w[0]) - h(w[1]), 0.0, 1e-12, &[("tau", w[1])]);
        }
    }
    for tau in grid(0.0, 1.0, GRID).skip(1) {
        let t6 = tau.powi(6);
        let m1 = 2.0 / 315.0 * t6 * (7.0 - tau * tau);
        let m2 = 0.8 * t6 * (2.0 / 9.0 - tau * tau / 21.0);
        r.record_with_slack("h1.minorant", m1 / h1(tau), 1.0, 1e-12, &[("tau", tau)]);
        r.record_with_slack("h2.minorant", m2 / h2(tau), 1.0, 1e-12, &[("tau", tau)]);
    }
    r
}

/// The two `μ₁` minorants on dense grids, the small-argument minorant of
/// `μ₁` on `(0, 1]`, and the anchors `h₁(1)/π² ≥ 3.9e-3` and
/// `(3.2/π³)h₂(1/2) ≥ 2.6e-4`. All comparisons are strict (no slack).
pub fn mu1_minorant_check(delta1: f64, delta2: f64) -> BoundCheckReport {
    let mut r = BoundCheckReport::new();
    let floor1 = MU1_CASE1 * delta2 * delta2;
    for tau in grid(0.49 * delta2, 1.0, GRID) {
        r.record_with_slack("mu1.case1", floor1, mu1(tau), 0.0, &[("tau", tau)]);
    }
    for tau in grid(1.0, (1.0 - delta1 / 4.0) * PI, GRID) {
        r.record_with_slack("mu1.case2", MU1_CASE2, mu1(tau), 0.0, &[("tau", tau)]);
    }
    for tau in grid(0.0, 1.0, GRID).skip(1) {
        r.record_with_slack(
            "mu1.minorant",
            mu1_minorant(tau) / mu1(tau),
            1.0,
            1e-12,
            &[("tau", tau)],
        );
    }
    r.record_with_slack(
        "anchor.h1",
        3.9e-3,
        h1(1.0) / (PI * PI),
        0.0,
        &[("tau", 1.0)],
    );
    r.record_with_slack(
        "anchor.h2",
        MU1_CASE2,
        3.2 / PI.powi(3) * h2(0.5),
        0.0,
        &[("tau", 0.5)],
    );
    r
}

/// Sturm pinching `sin(√M r₀t)/(√M r₀) ≤ f₁(t) ≤ sin(r₀t)/r₀` at every
/// stored node with `r₀t ≤ ℓ₀` (ids `sturm.lower`, `sturm.upper`).
pub fn record_sturm(r: &mut BoundCheckReport, max_k: f64, bundle: &JacobiBundle, ell0: f64) {
    let r0 = bundle.probe.r0;
    let sm = max_k.sqrt();
    for p in bundle.points().skip(1) {
        let s = r0 * p.t;
        if s > ell0 {
            break;
        }
        let at = [("r0", r0), ("phi", bundle.probe.phi), ("t", p.t)];
        r.record("sturm.upper", p.f1, s.sin() / r0, &at);
        if sm * s <= PI {
            r.record("sturm.lower", (sm * s).sin() / (sm * r0), p.f1, &at);
        }
    }
}

/// Sturm pinching along the axis trajectories for each `r₀`, the bracket
/// `π/√(1+ε) ≤ ℓ₀ ≤ π` (`conj.*`) and `π(1 − ε/2) ≤ √κ ℓ₀ ≤ π(1 + ε/2)`
/// (`rbar.*`).
pub fn sturm_and_pinch_suite(
    field: &CurvatureField,
    r0_grid: &[f64],
    tol: Tolerance,
) -> Result<BoundCheckReport> {
    let eps = measured_epsilon(field)?;
    if eps > 1.0 / (PI * PI) {
        return Err(Error::Hypothesis(format!(
            "|K - 1|_C2 = {eps:e} exceeds 1/pi^2"
        )));
    }
    let mut r = BoundCheckReport::new();
    r.epsilon = Some(eps);
    let ell0 = conjugate_distance(field, tol)?;
    for &r0 in r0_grid {
        let b = solve_bundle(field, ProbeConfig::new(r0, 0.0, 0.0)?, tol)?;
        record_sturm(&mut r, field.max_k(), &b, ell0);
    }
    let at = [("ell0", ell0)];
    r.record("conj.lower", PI / (1.0 + eps).sqrt(), ell0, &at);
    r.record("conj.upper", ell0, PI, &at);
    let rbar = field.kappa0().sqrt() * ell0;
    r.record("rbar.lower", PI * (1.0 - eps / 2.0), rbar, &at);
    r.record("rbar.upper", rbar, PI * (1.0 + eps / 2.0), &at);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::WaveParams;

    #[test]
    fn trig_bounds_hold_on_a_grid() {
        for i in 0..40 {
            for j in 0..40 {
                let (th, ph) = (i as f64 * 0.157, j as f64 * 0.157);
                for (l, r) in trig_bounds(PI, th, ph) {
                    assert!(l <= r + 1e-12, "{th} {ph}: {l} > {r}");
                }
            }
        }
    }

    #[test]
    fn h_functions_pass() {
        let r = hfunc_check();
        assert!(r.passed(), "{:?}", r.failed().collect::<Vec<_>>());
        assert_eq!(r.checks.len(), 4);
    }

    #[test]
    fn mu1_minorants_pass_at_published_deltas() {
        let r = mu1_minorant_check(1.48e-15, 0.01);
        assert!(r.passed(), "{:?}", r.failed().collect::<Vec<_>>());
        // the first-case floor is nearly attained at the left end
        let c = r.get("mu1.case1").unwrap();
        assert!((c.at["tau"] - 0.0049).abs() < 1e-12);
        assert!(c.margin / c.lhs < 0.25);
    }

    #[test]
    fn sphere_saturates_sturm_bounds() {
        let f = CurvatureField::constant(1.0).unwrap();
        let r = sturm_and_pinch_suite(&f, &[0.5, 2.0, 3.0], Tolerance::tight()).unwrap();
        assert!(r.passed(), "{:?}", r.failed().collect::<Vec<_>>());
        for id in ["sturm.lower", "sturm.upper"] {
            assert!(r.get(id).unwrap().margin.abs() < 1e-9);
        }
    }

    #[test]
    fn constant_above_one_is_strict_on_the_upper_side() {
        let f = CurvatureField::constant(1.05).unwrap();
        let r = sturm_and_pinch_suite(&f, &[2.0], Tolerance::tight()).unwrap();
        assert!(r.passed(), "{:?}", r.failed().collect::<Vec<_>>());
        assert!(r.get("sturm.upper").unwrap().margin > 0.0);
    }

    #[test]
    fn perturbed_bracket() {
        let f = CurvatureField::cosine_bump(1e-3, WaveParams::default()).unwrap();
        let r = sturm_and_pinch_suite(&f, &[1.0, 2.5], Tolerance::tight()).unwrap();
        assert!(r.passed(), "{:?}", r.failed().collect::<Vec<_>>());
    }
}
