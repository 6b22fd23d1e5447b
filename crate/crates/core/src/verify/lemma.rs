use super::BoundCheckReport;
use crate::ccurv::MaclaurinData;
use crate::constants::BTable;
use crate::field::{c2_norm_estimate, CurvatureField};
use crate::jacobi::{solve_bundle_with, BundlePoint, JacobiBundle, ProbeConfig};
use crate::ode::{Options, Tolerance};
use crate::{Error, Result};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

/// Grid per axis for the measured `|K − 1|_{C²}`.
pub const EPS_GRID: usize = 129;

/// Forced output times per unit interval of the lemma solves.
const STOPS: usize = 64;

/// `|K − 1|_{C²}` sampled on the field's patch.
pub fn measured_epsilon(field: &CurvatureField) -> Result<f64> {
    c2_norm_estimate(field, field.patch(), (EPS_GRID, EPS_GRID))
}

/// `D_ν^k f̄_a(v₀, t)` for the constant-curvature fields `cos(√κ|v|t)` and
/// `sin(√κ|v|t)/(√κ|v|)`, indexed `[k][a]`.
pub fn bar_derivatives(kappa: f64, r0: f64, phi: f64, t: f64) -> [[f64; 2]; 3] {
    let sk = kappa.sqrt();
    let u = sk * r0 * t;
    let (s, c) = u.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let g0 = [c, -sk * t * s, -kappa * t * t * c];
    // u·cos u − sin u, kept accurate for small u
    let ucs = if u.abs() < 0.1 {
        let x = u * u;
        -u * x * (1.0 / 3.0 - x * (1.0 / 30.0 - x * (1.0 / 840.0 - x / 45360.0)))
    } else {
        u * c - s
    };
    let g1 = [
        s / (sk * r0),
        ucs / (sk * r0 * r0),
        -sk * t * t * s / r0 - 2.0 * ucs / (sk * r0 * r0 * r0),
    ];
    let mut out = [[0.0; 2]; 3];
    for (a, g) in [g0, g1].iter().enumerate() {
        out[0][a] = g[0];
        out[1][a] = g[1] * cp;
        out[2][a] = g[2] * cp * cp + g[1] * sp * sp / r0;
    }
    out
}

/// `𝒮_ω(tⁿ)(t)` for `n ∈ {1, 2}`.
pub fn s_power(omega: f64, n: u32, t: f64) -> f64 {
    let x = omega * t;
    let q = x * x;
    match n {
        1 => {
            if x.abs() < 0.1 {
                t.powi(3)
                    * (1.0 / 6.0
                        - q * (1.0 / 120.0
                            - q * (1.0 / 5040.0 - q * (1.0 / 362880.0 - q / 39916800.0))))
            } else {
                (x - x.sin()) / omega.powi(3)
            }
        }
        2 => {
            if x.abs() < 0.1 {
                t.powi(4)
                    * (1.0 / 12.0
                        - q * (1.0 / 360.0
                            - q * (1.0 / 20160.0 - q * (1.0 / 1814400.0 - q / 239500800.0))))
            } else {
                (q + 2.0 * (x.cos() - 1.0)) / omega.powi(4)
            }
        }
        _ => panic!("s_power is defined for n = 1, 2"),
    }
}

fn uniform_times() -> Vec<f64> {
    (0..=STOPS).map(|i| i as f64 / STOPS as f64).collect()
}

fn solve_with_stops(
    field: &CurvatureField,
    r0: f64,
    phi: f64,
    tol: Tolerance,
) -> Result<JacobiBundle> {
    let opts = Options {
        stops: (1..STOPS).map(|i| i as f64 / STOPS as f64).collect(),
        ..Options::with_tol(tol)
    };
    solve_bundle_with(field, ProbeConfig::new(r0, 0.0, phi)?, &opts)
}

fn at_times(b: &JacobiBundle, times: &[f64]) -> Vec<BundlePoint> {
    times
        .iter()
        .map(|&t| match b.trajectory().node_at(t) {
            Some(i) => b.point(i),
            None => b.at(t),
        })
        .collect()
}

/// Running sup over `t` of one expression.
#[derive(Clone, Copy)]
struct Sup {
    value: f64,
    t: f64,
}

impl Sup {
    fn new() -> Self {
        Sup { value: 0.0, t: 0.0 }
    }

    fn update(&mut self, v: f64, t: f64) {
        if v.abs() > self.value {
            self.value = v.abs();
            self.t = t;
        }
    }
}

/// The three conclusion lines of the perturbation lemma for every
/// `(k, a)` (ids `lemma.<line>.<k>.<a>`) and the polarization bounds on
/// `D₁₂` (ids `polar.1.<a>`, `polar.2.<a>`), over a `(r₀, φ)` grid.
///
/// Norms are suprema over the stored nodes of `t ∈ [0, 1]`.
pub fn verify_lemma_bounds(
    field: &CurvatureField,
    b: &BTable,
    r0_grid: &[f64],
    phi_grid: &[f64],
    tol: Tolerance,
) -> Result<BoundCheckReport> {
    let eps = measured_epsilon(field)?;
    if eps > 1.0 / (PI * PI) {
        return Err(Error::Hypothesis(format!(
            "|K - 1|_C2 = {eps:e} exceeds 1/pi^2"
        )));
    }
    let kappa = field.kappa0();
    let times = uniform_times();
    let mut report = BoundCheckReport::new();
    report.epsilon = Some(eps);

    for &r0 in r0_grid {
        let omega = kappa.sqrt() * r0;
        for &phi in phi_grid {
            let bundle = solve_with_stops(field, r0, phi, tol)?;
            let psi = MaclaurinData::new(field, phi)?;
            let psi = [psi.psi0, psi.psi1, psi.psi2];
            let mut sups = [[[Sup::new(); 2]; 3]; 3];
            for p in bundle.points() {
                let bar = bar_derivatives(kappa, r0, phi, p.t);
                for k in 0..3 {
                    for a in 0..2 {
                        let d = p.d(k, a);
                        let diff = d - bar[k][a];
                        let s = s_power(omega, a as u32 + 1, p.t);
                        let first = r0.powi(3 - k as i32) * psi[k] * s;
                        sups[0][k][a].update(d, p.t);
                        sups[1][k][a].update(diff, p.t);
                        sups[2][k][a].update(diff + first, p.t);
                    }
                }
            }
            for k in 0..3 {
                for a in 0..2 {
                    let rhs = [
                        b.get(1, k, a),
                        b.get(2, k, a) * eps * r0.powi(2 - k as i32),
                        b.get(3, k, a) * eps * r0.powi(4 - k as i32),
                    ];
                    for line in 0..3 {
                        let s = sups[line][k][a];
                        report.record(
                            &format!("lemma.{}.{k}.{a}", line + 1),
                            s.value,
                            rhs[line],
                            &[("r0", r0), ("phi", phi), ("t", s.t)],
                        );
                    }
                }
            }
        }

        let along = |phi| -> Result<Vec<BundlePoint>> {
            Ok(at_times(&solve_with_stops(field, r0, phi, tol)?, &times))
        };
        let (d1, d2, dd) = (along(FRAC_PI_2)?, along(0.0)?, along(FRAC_PI_4)?);
        for a in 0..2 {
            let mut sup = Sup::new();
            for i in 0..times.len() {
                let d12 = dd[i].d(2, a) - 0.5 * d1[i].d(2, a) - 0.5 * d2[i].d(2, a);
                sup.update(d12, times[i]);
            }
            // D₁₂ f̄ₐ vanishes at v₀ = (0, r₀)
            let at = [("r0", r0), ("t", sup.t)];
            report.record(
                &format!("polar.1.{a}"),
                sup.value,
                2.0 * b.get(1, 2, a),
                &at,
            );
            report.record(
                &format!("polar.2.{a}"),
                sup.value,
                2.0 * b.get(2, 2, a) * eps,
                &at,
            );
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::b_constants;
    use crate::field::WaveParams;
    use crate::ode::{solution_map, ForcedOscillator};

    #[test]
    fn s_power_matches_quadrature() {
        for omega in [0.05, 0.7, 2.0, 3.1] {
            for t in [0.01, 0.3, 1.0] {
                for n in [1u32, 2] {
                    let osc = ForcedOscillator::new(omega, move |s: f64| s.powi(n as i32)).unwrap();
                    let q = solution_map(&osc, t).unwrap();
                    let c = s_power(omega, n, t);
                    assert!(
                        (q - c).abs() < 1e-12 * c.abs().max(1e-3),
                        "{omega} {n} {t}: {q} {c}"
                    );
                }
            }
        }
        assert!((s_power(1.0, 1, 1.0) - (1.0 - 1f64.sin())).abs() < 1e-15);
    }

    #[test]
    fn bar_derivatives_match_difference_quotients() {
        let (kappa, r0, phi, t): (f64, f64, f64, f64) = (1.3, 0.9, 0.8, 0.7);
        let f = |v: [f64; 2]| {
            let r = kappa.sqrt() * v[0].hypot(v[1]);
            [(r * t).cos(), (r * t).sin() / r]
        };
        let (sp, cp) = phi.sin_cos();
        let h = 1e-4;
        let at = |l: f64| f([l * sp, r0 + l * cp]);
        let d = bar_derivatives(kappa, r0, phi, t);
        for a in 0..2 {
            let (p, m, z) = (at(h)[a], at(-h)[a], at(0.0)[a]);
            assert!((d[0][a] - z).abs() < 1e-15);
            assert!((d[1][a] - (p - m) / (2.0 * h)).abs() < 1e-8);
            assert!((d[2][a] - (p - 2.0 * z + m) / (h * h)).abs() < 1e-6);
        }
    }

    #[test]
    fn bar_derivatives_small_argument_branch() {
        let a = bar_derivatives(1.0, 0.5, 0.3, 0.1999);
        let b = bar_derivatives(1.0, 0.5, 0.3, 0.2001);
        for k in 0..3 {
            for i in 0..2 {
                assert!((a[k][i] - b[k][i]).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn unperturbed_lines_vanish() {
        let f = CurvatureField::constant(1.0).unwrap();
        let r = verify_lemma_bounds(&f, &b_constants(), &[1.5], &[0.0, 1.0], Tolerance::tight())
            .unwrap();
        assert_eq!(r.epsilon, Some(0.0));
        assert_eq!(r.checks.len(), 18 + 4);
        assert!(r.passed(), "{:?}", r.failed().collect::<Vec<_>>());
        for c in &r.checks {
            if !c.id.starts_with("lemma.1") && c.id != "polar.1.0" && c.id != "polar.1.1" {
                assert!(c.lhs < 1e-9, "{} {}", c.id, c.lhs);
            }
        }
    }

    #[test]
    fn rejects_large_epsilon() {
        let f = CurvatureField::cosine_bump(0.1, WaveParams::default()).unwrap();
        let e = verify_lemma_bounds(&f, &b_constants(), &[1.0], &[0.0], Tolerance::tight());
        assert!(matches!(e, Err(Error::Hypothesis(_))));
    }
}
