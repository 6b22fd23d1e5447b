use crate::{Error, Result};
use std::f64::consts::PI;

/// Below this `r̄₀` the four closed-form ratios are replaced by their series.
pub const SERIES_SWITCH: f64 = 1e-3;

/// `T₁ = h₁(r)/(r² sin²r)` is `O(r⁴)` smaller than its summands and keeps its
/// series up to this larger switch.
pub const T1_SERIES_SWITCH: f64 = 0.1;

const T1_SERIES: [f64; 5] = [
    2.0 / 45.0,
    8.0 / 945.0,
    2.0 / 1575.0,
    16.0 / 93555.0,
    2764.0 / 127702575.0,
];

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

/// `(T₁, T₂, T₃, T₄)` at `r`, the r̄₀-dependent factors of the four terms.
pub fn sphere_terms(r: f64) -> [f64; 4] {
    if r < SERIES_SWITCH {
        let x = r * r;
        return [
            x * poly(&T1_SERIES, x),
            poly(
                &[1.0 / 3.0, 2.0 / 15.0, 2.0 / 63.0, 4.0 / 675.0, 2.0 / 2079.0],
                x,
            ),
            poly(
                &[
                    1.0 / 3.0,
                    1.0 / 45.0,
                    2.0 / 945.0,
                    1.0 / 4725.0,
                    2.0 / 93555.0,
                ],
                x,
            ),
            poly(
                &[
                    -1.0 / 3.0,
                    -1.0 / 15.0,
                    -2.0 / 189.0,
                    -1.0 / 675.0,
                    -2.0 / 10395.0,
                ],
                x,
            ),
        ];
    }
    let (s, c) = r.sin_cos();
    let r2 = r * r;
    let s2 = s * s;
    [
        if r < T1_SERIES_SWITCH {
            r2 * poly(&T1_SERIES, r2)
        } else {
            (r2 + r * c * s - 2.0 * s2) / (r2 * s2)
        },
        (s - r * c) / (s2 * s),
        (s - r * c) / (r2 * s),
        (s2 - r2) / (r2 * s2),
    ]
}

/// Constant-curvature c-curvature `𝒞̄` for `K ≡ κ` at `r̄₀ = √κ r₀`.
///
/// The fourth term carries `cos φ`.
pub fn c_curvature_sphere(kappa: f64, rbar0: f64, theta: f64, phi: f64) -> Result<f64> {
    if !(rbar0 > 0.0 && rbar0 < PI) {
        return Err(Error::Invalid(format!(
            "rbar0 must lie in (0, π), got {rbar0}"
        )));
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::Invalid(format!(
            "kappa must be positive, got {kappa}"
        )));
    }
    let [t1, t2, t3, t4] = sphere_terms(rbar0);
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let v = st * st * sp * sp * t1
        + 2.0 * st * st * cp * cp * t2
        + 2.0 * ct * ct * sp * sp * t3
        + 4.0 * ct * st * cp * sp * t4;
    Ok(kappa * v)
}
