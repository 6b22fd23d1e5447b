use super::ConstantsTable;
use crate::numeric::{bisect, ceil_sig, floor_sig};
use crate::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};

/// `δ₂`, fixed by the near-origin analysis.
pub const DELTA2: f64 = 0.01;

/// Number of `ε` samples in `[0, 2x]` used for the worst split of `x = ε/2 + δ`.
const SPLIT_SAMPLES: usize = 11;
const BISECT_REL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parameter {
    /// `ε/2 + δ₁`
    HalfEpsPlusDelta,
    Epsilon,
    Delta,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition {
    pub id: &'static str,
    pub parameter: Parameter,
    /// Largest admissible value of the parameter.
    pub threshold: f64,
}

/// Published choices, with directed rounding applied to the raw thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Chosen {
    pub eta1: f64,
    pub delta1: f64,
    pub sigma1: f64,
    pub eta2: f64,
    pub delta2: f64,
    pub sigma2: f64,
    pub eta3: f64,
    pub sigma3: f64,
    pub beta: f64,
    pub gamma: f64,
    pub c: f64,
    pub eta: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub conditions: Vec<Condition>,
    /// Raw (unrounded) derived quantities.
    pub raw: BTreeMap<String, f64>,
    pub chosen: Chosen,
    /// Whether (epsdel-ineq7) is the tightest of the `δ₁` conditions.
    pub ineq7_dominates: bool,
}

impl ThresholdReport {
    pub fn condition(&self, id: &str) -> Option<f64> {
        self.conditions
            .iter()
            .find(|c| c.id == id)
            .map(|c| c.threshold)
    }

    pub fn raw(&self, key: &str) -> f64 {
        self.raw[key]
    }

    /// `thresholds.*` and `chosen.*` keys.
    pub fn entries(&self) -> Vec<(String, f64)> {
        let mut out: Vec<(String, f64)> = self
            .conditions
            .iter()
            .map(|c| (format!("thresholds.{}", c.id), c.threshold))
            .collect();
        out.extend(
            self.raw
                .iter()
                .map(|(k, v)| (format!("thresholds.{k}"), *v)),
        );
        let c = &self.chosen;
        for (k, v) in [
            ("eta1", c.eta1),
            ("delta1", c.delta1),
            ("sigma1", c.sigma1),
            ("eta2", c.eta2),
            ("delta2", c.delta2),
            ("sigma2", c.sigma2),
            ("eta3", c.eta3),
            ("sigma3", c.sigma3),
            ("beta", c.beta),
            ("gamma", c.gamma),
            ("C", c.c),
            ("eta", c.eta),
            ("sigma", c.sigma),
        ] {
            out.push((format!("chosen.{k}"), v));
        }
        out
    }
}

/// Largest `x` with `slack(ε, x − ε/2) ≥ 0` for every sampled `ε ∈ [0, 2x]`.
fn solve_x<F: Fn(f64, f64) -> f64>(slack: F) -> Result<f64> {
    let worst = |x: f64| {
        (0..SPLIT_SAMPLES)
            .map(|i| {
                let eps = 2.0 * x * i as f64 / (SPLIT_SAMPLES - 1) as f64;
                slack(eps, x - eps / 2.0)
            })
            .fold(f64::INFINITY, |m, s| {
                if s.is_nan() {
                    f64::NEG_INFINITY
                } else {
                    m.min(s)
                }
            })
    };
    solve_monotone(worst, 0.999)
}

/// Largest `p ∈ [0, hi]` with `g(p) ≥ 0`, for `g` non-increasing.
fn solve_monotone<F: Fn(f64) -> f64>(g: F, hi: f64) -> Result<f64> {
    if !(g(0.0) > 0.0) {
        return Err(Error::Constants("condition fails at the origin".into()));
    }
    if g(hi) >= 0.0 {
        return Ok(hi);
    }
    bisect(
        |p| if g(p) >= 0.0 { 1.0 } else { -1.0 },
        0.0,
        hi,
        BISECT_REL,
    )
}

/// Smallest positive root of `a x² + b x + c`.
fn positive_root(a: f64, b: f64, c: f64) -> f64 {
    let d = (b * b - 4.0 * a * c).sqrt();
    // Stable form for c < 0 < a, b.
    let q = -0.5 * (b + b.signum() * d);
    let r = [q / a, c / q];
    r.into_iter()
        .filter(|x| *x > 0.0)
        .fold(f64::INFINITY, f64::min)
}

pub fn smallness_thresholds(t: &ConstantsTable) -> Result<ThresholdReport> {
    let p = PI;
    let p2 = p * p;
    let b = |j, k, a| t.b(j, k, a);
    let c = &t.c;
    let (c2, c3, c4) = (t.cap(2), t.cap(3), t.cap(4));
    let pinch = t.pinching();
    let q = |x: f64| x / (1.0 - x);

    let r1 = |e: f64, d: f64| {
        let x = e / 2.0 + d;
        e * (b(2, 2, 1) + b(2, 0, 0) / 8.0)
            + x * x / 16.0
            + 2.0 * p * b(1, 1, 1) * (x * (1.0 + e / 2.0) + e * b(2, 1, 0))
            + q(x)
                * (b(1, 2, 0) + 2.0 / (p2 * (1.0 - x).powi(2)) * (1.0 + e * p2 * b(2, 0, 0) + q(x)))
    };
    let r2 = |e: f64, d: f64| {
        let x = e / 2.0 + d;
        r1(e, d) + 8.0 * b(1, 1, 1) * (x * (1.0 + e / 2.0) * p + e * p * b(2, 1, 0))
    };

    let mut conditions = Vec::new();
    let mut push_x = |id: &'static str, f: &dyn Fn(f64, f64) -> f64| -> Result<f64> {
        let v = solve_x(f)?;
        conditions.push(Condition {
            id,
            parameter: Parameter::HalfEpsPlusDelta,
            threshold: v,
        });
        Ok(v)
    };

    let x1 = push_x("epsdel-ineq1", &|e, d| {
        let x = e / 2.0 + d;
        (1.0 / 7704.0) / p * (1.0 - (e / 2.0) / (1.0 - x) - p2 / 2.0 * x * x) - e * p * b(2, 1, 1)
    })?;
    let x2 = push_x("epsdel-ineq2", &|e, d| {
        let x = e / 2.0 + d;
        0.5 - (2.0 * e / (1.0 - x) + 2.0 * p2 * x * x + e * p2 / 2.0 * (1.0 + e / 2.0) + 3.0 * q(x))
    })?;
    let x3 = push_x("epsdel-ineq3", &|e, d| 1.0 / (24.0 * p2) - r1(e, d))?;
    let x3b = push_x("epsdel-ineq3bis", &|e, d| {
        let x = e / 2.0 + d;
        1.0 / (16.0 * 3f64.sqrt() * (p2 + 5.0)) - q(x).sqrt()
    })?;
    let x4 = push_x("epsdel-ineq4", &|e, d| 1.0 / (24.0 * p2) - r2(e, d))?;
    let x5 = push_x("epsdel-ineq5", &|e, d| {
        let x = e / 2.0 + d;
        1.0 / (15408.0 * p) - (e * p * b(2, 1, 1) + (e / 2.0) / (p * (1.0 - x)) + x * x * p / 2.0)
    })?;
    let x6 = push_x("epsdel-ineq6", &|e, d| {
        1.0 / (2.0 * p2 * 15408f64.powi(2)) - q(e / 2.0 + d) * pinch
    })?;
    let x7 = push_x("epsdel-ineq7", &|e, d| {
        1.0 / (100.0 * p2 * 15408f64.powi(2)) - q(e / 2.0 + d) * pinch
    })?;
    let x8 = push_x("epsdel-ineq8", &|e, d| {
        let x = e / 2.0 + d;
        3f64.sqrt() / (8.0 * p2)
            - (x / ((1.0 - x).powi(3) * p2) * (1.2 + (1.0 + e / 2.0).powi(2) * p2)
                + e * (b(2, 2, 1) + 3.2 * b(2, 1, 1))
                + 7.0 * p * b(1, 1, 1) * (x * (1.0 + e / 2.0) + e * b(2, 1, 0))
                + q(x) * (b(1, 2, 0) + 36.0 / (5.0 * p2)))
    })?;
    let e4bis = 1.0 / (p2 * b(2, 1, 1)) * (1.0 / (p * 192f64.sqrt()) - 1.0 / 3852.0);
    conditions.push(Condition {
        id: "epsdel-ineq4bis",
        parameter: Parameter::Epsilon,
        threshold: e4bis,
    });

    let ineq7_dominates =
        [x1, x2, x3, x3b, x4, x5, x6, x8].iter().all(|&x| x7 <= x) && x7 <= e4bis / 2.0;

    // Near-origin conditions, evaluated with ε → 0 for δ and δ = δ₂ for ε.
    conditions.push(Condition {
        id: "epsdel-ineq9",
        parameter: Parameter::Delta,
        threshold: p / 2.0,
    });
    conditions.push(Condition {
        id: "epsdel-ineq10",
        parameter: Parameter::Delta,
        threshold: 2.0 / 5f64.sqrt(),
    });
    let num11 = 1.0 / 180.0 - 1.15 * DELTA2 * (c[11] + c[12] + c[14] / 2.0);
    let num12 = 1.0 / 180.0 - 1.15 * DELTA2 * (c[13] + c[14] / 2.0);
    if !(num11 > 0.0 && num12 > 0.0) {
        return Err(Error::Constants(
            "δ₂ violates the near-origin conditions".into(),
        ));
    }
    let e11 = num11 / (c2 + 19.0 * c[17] * DELTA2);
    let e12 = num12 / (c3 + 13.0 * c[17] * DELTA2);
    conditions.push(Condition {
        id: "epsdel-ineq11",
        parameter: Parameter::Epsilon,
        threshold: e11,
    });
    conditions.push(Condition {
        id: "epsdel-ineq12",
        parameter: Parameter::Epsilon,
        threshold: e12,
    });

    // η₁, δ₁ from (epsdel-ineq7).
    let eta1 = floor_sig(x7, 3);
    let delta1 = floor_sig(eta1 / 2.0, 3);

    let s1 = 2.19e-3 * 1f64.sin().powi(3) / c4 * DELTA2 * DELTA2;
    conditions.push(Condition {
        id: "eps-ineq-else1",
        parameter: Parameter::Epsilon,
        threshold: s1,
    });
    let lhs2 = |e: f64| {
        1.2 - (1.0 + e / 2.0) * (1.0 + 2.0 * e / (delta1 * (1.0 - delta1 * delta1 * p2 / 96.0)))
    };
    let s2 = solve_monotone(lhs2, 1.0)?;
    conditions.push(Condition {
        id: "eps-ineq-else2",
        parameter: Parameter::Epsilon,
        threshold: s2,
    });
    let s3 = 1.3e-4 / (p.powi(3) * c4) * (p / 4.0 * delta1).sin().powi(3);
    conditions.push(Condition {
        id: "eps-ineq-else3",
        parameter: Parameter::Epsilon,
        threshold: s3,
    });

    // Boundary-curvature constants.
    let (b111, b121, b211, b221) = (b(1, 1, 1), b(1, 2, 1), b(2, 1, 1), b(2, 2, 1));
    let beta_root1 = positive_root(p2 / 8.0, 0.5 + b221 * p2, -0.5);
    let beta_root2 = positive_root(
        p2 * b121 * b211 * b211,
        4.0 * p * b111 * b121 * b211,
        -1.0 / (16.0 * p.powi(4)),
    );
    let beta = beta_root1.min(beta_root2);
    let gamma = 1.0 / (32.0 * p.powi(4) * SQRT_2 * b111.powi(3));
    let c_upper = (2.0 * p).powi(3) * 6.0 * b121 * b111 * b111;

    // ς values.
    let sigma1 = [18.0, 1.0 / (4.0 * p2), 435.0, 8.7, 0.3]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let sigma2 = 10.0 / (360.0 * 11.0);
    let mu1_lower = floor_sig(0.49f64.powi(2) * (1.0 - 5.0 / 28.0) / 45.0, 3);
    let sigma3_case1 =
        1.0 / (4.0 * p2) * (5.0f64 / 6.0).powi(3) * (mu1_lower / 2.0) * DELTA2 * DELTA2;
    let sigma3_case2 = 1.0 / (4.0 * p2) * (5.0f64 / 6.0).powi(3) * 1.3e-4;

    let eps_c2 = num11;
    let eta2_raw = e11;
    let eta3_raw = s1.min(s3).min(s2);

    let chosen_eta2 = floor_sig(eta2_raw, 2);
    let chosen_eta3 = floor_sig(eta3_raw, 2);
    let chosen_sigma3 = floor_sig(sigma3_case1.min(sigma3_case2), 3);
    let chosen = Chosen {
        eta1,
        delta1,
        sigma1,
        eta2: chosen_eta2,
        delta2: DELTA2,
        sigma2,
        eta3: chosen_eta3,
        sigma3: chosen_sigma3,
        beta: floor_sig(beta, 2),
        gamma: floor_sig(gamma, 2),
        c: ceil_sig(c_upper, 2),
        eta: eta1.min(chosen_eta2).min(chosen_eta3),
        sigma: sigma1.min(sigma2).min(chosen_sigma3),
    };

    let mut raw = BTreeMap::new();
    for (k, v) in [
        ("pinching", pinch),
        ("eps-C2", eps_c2),
        ("eta1", x7),
        ("eta2", eta2_raw),
        ("eta3", eta3_raw),
        ("eta3-case1", s1),
        ("eta3-case2", s3),
        ("mu1-lower", mu1_lower),
        ("sigma1", sigma1),
        ("sigma2", sigma2),
        ("sigma3-case1", sigma3_case1),
        ("sigma3-case2", sigma3_case2),
        ("beta-root1", beta_root1),
        ("beta-root2", beta_root2),
        ("beta", beta),
        ("gamma", gamma),
        ("C", c_upper),
    ] {
        raw.insert(k.to_string(), v);
    }
    for (k, v) in &raw {
        if !(v.is_finite() && *v > 0.0) {
            return Err(Error::Constants(format!("{k} = {v} is not positive")));
        }
    }
    Ok(ThresholdReport {
        conditions,
        raw,
        chosen,
        ineq7_dominates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report() -> ThresholdReport {
        smallness_thresholds(&ConstantsTable::default_table().unwrap()).unwrap()
    }

    #[test]
    fn ineq7_closed_form() {
        let t = ConstantsTable::default_table().unwrap();
        let r = smallness_thresholds(&t).unwrap();
        let s = 1.0 / (100.0 * PI * PI * 15408f64.powi(2) * t.pinching());
        let x = s / (1.0 + s);
        assert!((r.condition("epsdel-ineq7").unwrap() - x).abs() < 1e-11 * x);
        assert!(r.ineq7_dominates);
    }

    #[test]
    fn sigma_values_exact() {
        let r = report();
        assert_eq!(r.chosen.sigma1, 1.0 / (4.0 * PI * PI));
        assert_eq!(r.chosen.sigma2, 1.0 / 396.0);
        assert_eq!(r.chosen.sigma, r.chosen.sigma3);
        assert_eq!(r.chosen.eta, r.chosen.eta3);
    }

    #[test]
    fn quadratic_roots() {
        let t = ConstantsTable::default_table().unwrap();
        let r = smallness_thresholds(&t).unwrap();
        let p = PI;
        let (b111, b121, b211, b221) = (t.b(1, 1, 1), t.b(1, 2, 1), t.b(2, 1, 1), t.b(2, 2, 1));
        let x = r.raw("beta-root1");
        assert!((p * p / 8.0 * x * x + (0.5 + b221 * p * p) * x - 0.5).abs() < 1e-14);
        let x = r.raw("beta-root2");
        let q = p * p * b121 * b211 * b211 * x * x + 4.0 * p * b111 * b121 * b211 * x
            - 1.0 / (16.0 * p.powi(4));
        assert!(q.abs() < 1e-14 / (16.0 * p.powi(4)));
        assert!(r.raw("beta") == x && x < r.raw("beta-root1"));
        assert!((positive_root(1.0, -3.0, 2.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn else2_solution_is_tight() {
        let r = report();
        let d1 = r.chosen.delta1;
        let e = r.condition("eps-ineq-else2").unwrap();
        let g =
            |e: f64| (1.0 + e / 2.0) * (1.0 + 2.0 * e / (d1 * (1.0 - d1 * d1 * PI * PI / 96.0)));
        assert!(g(e) <= 1.2 && g(e * (1.0 + 1e-9)) > 1.2);
    }
}
