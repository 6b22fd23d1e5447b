use super::sphere::c_curvature_sphere;
use crate::{Error, Result};
use serde::Serialize;
use std::f64::consts::PI;

const SERIES_BELOW: f64 = 0.1;

const H1_SERIES: [f64; 6] = [
    2.0 / 45.0,
    -2.0 / 315.0,
    2.0 / 4725.0,
    -8.0 / 467775.0,
    4.0 / 8513505.0,
    -2.0 / 212837625.0,
];
const H2_SERIES: [f64; 6] = [
    8.0 / 45.0,
    -4.0 / 105.0,
    19.0 / 4725.0,
    -37.0 / 133650.0,
    283.0 / 20638800.0,
    -3503.0 / 6810804000.0,
];

fn series6(c: &[f64; 6], tau: f64) -> f64 {
    let x = tau * tau;
    x * x * x * c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

/// `h₁(τ) = τ² + τ sinτ cosτ − 2 sin²τ`.
pub fn h1(tau: f64) -> f64 {
    if tau.abs() < SERIES_BELOW {
        return series6(&H1_SERIES, tau);
    }
    let (s, c) = tau.sin_cos();
    tau * tau + tau * s * c - 2.0 * s * s
}

/// `h₂(τ) = (τ + sinτ cosτ) sinτ − 2τ² cosτ`.
pub fn h2(tau: f64) -> f64 {
    if tau.abs() < SERIES_BELOW {
        return series6(&H2_SERIES, tau);
    }
    let (s, c) = tau.sin_cos();
    (tau + s * c) * s - 2.0 * tau * tau * c
}

/// `μ₁(τ)`, the minimum of the three `S̄₂` weights.
pub fn mu1(tau: f64) -> f64 {
    let [a, b, c] = mu1_terms(tau);
    a.min(b).min(c)
}

fn mu1_terms(tau: f64) -> [f64; 3] {
    let s = tau.sin();
    let half = 8.0 * (tau / 2.0).cos() * h2(tau / 2.0);
    [
        h1(tau) / (tau * tau * s * s),
        half / (tau * s * s * s),
        half / (tau * tau * tau * s),
    ]
}

/// `min((14/315)τ²(1 − τ²/7), (1/45)τ²(1 − 5τ²/28))`.
pub fn mu1_minorant(tau: f64) -> f64 {
    let x = tau * tau;
    (14.0 / 315.0 * x * (1.0 - x / 7.0)).min(x / 45.0 * (1.0 - 5.0 * x / 28.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HMu {
    pub tau: f64,
    pub h1: f64,
    pub h2: f64,
    pub mu1: f64,
    /// `(2/315)τ⁶(7 − τ²)`
    pub h1_minorant: f64,
    /// `(4/5)τ⁶(2/9 − τ²/21)`
    pub h2_minorant: f64,
    pub mu1_minorant: f64,
}

pub fn h_mu_functions(tau: f64) -> Result<HMu> {
    if !(tau > 0.0 && tau < PI) {
        return Err(Error::Invalid(format!("tau must lie in (0, π), got {tau}")));
    }
    let t6 = tau.powi(6);
    Ok(HMu {
        tau,
        h1: h1(tau),
        h2: h2(tau),
        mu1: mu1(tau),
        h1_minorant: 2.0 / 315.0 * t6 * (7.0 - tau * tau),
        h2_minorant: 0.8 * t6 * (2.0 / 9.0 - tau * tau / 21.0),
        mu1_minorant: mu1_minorant(tau),
    })
}

/// Split of `(1/κ)𝒞̄` into the square `S̄₁` and the remainder `S̄₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SBarSplit {
    pub s1: f64,
    pub s2: f64,
    /// `(1/κ)𝒞̄` from the closed form.
    pub total: f64,
    /// `μ₁(r̄₀)(sin²ϑ + cos²ϑ sin²φ)`, a lower bound for `S̄₂`.
    pub s2_lower: f64,
}

pub fn s_bar_split(rbar0: f64, theta: f64, phi: f64) -> Result<SBarSplit> {
    let total = c_curvature_sphere(1.0, rbar0, theta, phi)?;
    let r = rbar0;
    let s = r.sin();
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let num = r * r - s * s;
    let d = st * cp * (num / (r * s * s * s)).sqrt() - ct * sp * (num / (r * r * r * s)).sqrt();
    let s1 = 2.0 * d * d;
    let [m1, m2, m3] = mu1_terms(r);
    let s2 = st * st * sp * sp * m1 + st * st * cp * cp * m2 + ct * ct * sp * sp * m3;
    Ok(SBarSplit {
        s1,
        s2,
        total,
        s2_lower: mu1(r) * (st * st + ct * ct * sp * sp),
    })
}
