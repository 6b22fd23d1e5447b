//! Verification campaigns: perturbation bounds on the Jacobi fields,
//! Maclaurin residuals, the conjugate-boundary curvature, the μ₁ and h
//! minorants, Sturm pinching, and the almost-positivity scan.

mod boundary;
mod lemma;
mod scan;
mod suites;

pub use boundary::{noconj_boundary_curvature, BoundaryCurvature, MIN_GRADIENT};
pub use lemma::{bar_derivatives, measured_epsilon, s_power, verify_lemma_bounds, EPS_GRID};
pub use scan::{
    scan_apcc, ProbeFailure, ScanGrid, ScanReport, ScanSettings, CSV_COLUMNS, PROVEN_ETA, RANK1_TOL,
};
pub use suites::{
    corollary_sweep, hfunc_check, mu1_minorant_check, record_sturm, sturm_and_pinch_suite,
    trig_bounds, MU1_CASE1, MU1_CASE2,
};

use serde::Serialize;
use std::collections::BTreeMap;

/// Relative slack of a bound check: `lhs ≤ rhs + SLACK·max(1, |rhs|)`.
pub const SLACK: f64 = 1e-9;

/// One bound family with its worst case over all evaluated points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub id: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs` at the worst point.
    pub margin: f64,
    pub slack: f64,
    pub pass: bool,
    /// Points evaluated and points failing.
    pub count: usize,
    pub failures: usize,
    /// Coordinates of the worst point.
    pub at: BTreeMap<&'static str, f64>,
}

impl BoundCheck {
    /// Negative exactly when the point fails.
    fn scaled_margin(&self) -> f64 {
        (self.margin + self.slack) / self.rhs.abs().max(1.0)
    }

    fn absorb(&mut self, other: BoundCheck) {
        let (count, failures) = (self.count + other.count, self.failures + other.failures);
        if other.scaled_margin() < self.scaled_margin() {
            *self = other;
        }
        self.count = count;
        self.failures = failures;
        self.pass = failures == 0;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BoundCheckReport {
    pub checks: Vec<BoundCheck>,
    /// `|K − 1|_{C²}` used by the right-hand sides, when relevant.
    pub epsilon: Option<f64>,
}

impl BoundCheckReport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record `lhs ≤ rhs` with the default slack.
    pub fn record(&mut self, id: &str, lhs: f64, rhs: f64, at: &[(&'static str, f64)]) {
        let slack = SLACK * rhs.abs().max(1.0);
        self.record_with_slack(id, lhs, rhs, slack, at);
    }

    /// Record `lhs ≤ rhs + slack`, keeping the worst point per id.
    pub fn record_with_slack(
        &mut self,
        id: &str,
        lhs: f64,
        rhs: f64,
        slack: f64,
        at: &[(&'static str, f64)],
    ) {
        let pass = lhs <= rhs + slack;
        let entry = BoundCheck {
            id: id.to_string(),
            lhs,
            rhs,
            margin: rhs - lhs,
            slack,
            pass,
            count: 1,
            failures: usize::from(!pass),
            at: at.iter().copied().collect(),
        };
        self.absorb(entry);
    }

    fn absorb(&mut self, entry: BoundCheck) {
        match self.checks.iter_mut().find(|c| c.id == entry.id) {
            None => self.checks.push(entry),
            Some(c) => c.absorb(entry),
        }
    }

    pub fn merge(&mut self, other: BoundCheckReport) {
        for c in other.checks {
            self.absorb(c);
        }
        if self.epsilon.is_none() {
            self.epsilon = other.epsilon;
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed(&self) -> impl Iterator<Item = &BoundCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn get(&self, id: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.id == id)
    }

    /// The check with the smallest scaled margin.
    pub fn worst(&self) -> Option<&BoundCheck> {
        self.checks
            .iter()
            .min_by(|a, b| a.scaled_margin().total_cmp(&b.scaled_margin()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_keeps_worst_point_and_counts() {
        let mut r = BoundCheckReport::new();
        r.record("a", 1.0, 2.0, &[("x", 0.0)]);
        r.record("a", 1.9, 2.0, &[("x", 1.0)]);
        r.record("a", 0.5, 2.0, &[("x", 2.0)]);
        let c = r.get("a").unwrap();
        assert_eq!((c.count, c.failures, c.pass), (3, 0, true));
        assert_eq!(c.at["x"], 1.0);
        r.record("a", 2.5, 2.0, &[("x", 3.0)]);
        r.record("a", 1.99, 2.0, &[("x", 4.0)]);
        let c = r.get("a").unwrap();
        assert_eq!((c.count, c.failures, c.pass), (5, 1, false));
        assert_eq!(c.at["x"], 3.0);
        assert!(!r.passed());
    }

    #[test]
    fn slack_is_relative_to_rhs() {
        let mut r = BoundCheckReport::new();
        r.record("big", 1e6 + 1e-4, 1e6, &[]);
        r.record("small", 0.5e-9, 0.0, &[]);
        r.record("over", 2e-9, 0.0, &[]);
        assert!(r.get("big").unwrap().pass);
        assert!(r.get("small").unwrap().pass);
        assert!(!r.get("over").unwrap().pass);
    }
}
