use super::{ConstantsTable, ThresholdReport};
use crate::numeric::round_sig;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// `|computed − published| ≤ tol`
    Abs(f64),
    /// `|computed − published| ≤ tol·|published|`
    Rel(f64),
    /// `computed == published`
    Exact,
    /// `computed` rounded to the published significant figures is `≤ published`.
    AtMost(i32),
    /// `lo ≤ computed ≤ hi`, published given as `lo`.
    Within(f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Published {
    pub key: &'static str,
    pub value: f64,
    pub rule: Rule,
}

/// Published anchors and the precision each is checked at.
pub const PUBLISHED: [Published; 20] = [
    Published {
        key: "pi*B.1.1.1",
        value: 39.05,
        rule: Rule::Abs(0.01),
    },
    Published {
        key: "chosen.beta",
        value: 4.5e-10,
        rule: Rule::Rel(0.05),
    },
    Published {
        key: "chosen.gamma",
        value: 1.1e-7,
        rule: Rule::Rel(0.05),
    },
    Published {
        key: "chosen.C",
        value: 7.4e7,
        rule: Rule::Rel(0.05),
    },
    Published {
        key: "chosen.eta1",
        value: 2.96e-15,
        rule: Rule::Rel(0.01),
    },
    Published {
        key: "chosen.delta1",
        value: 1.48e-15,
        rule: Rule::Rel(0.01),
    },
    Published {
        key: "C.2",
        value: 1.4e18,
        rule: Rule::AtMost(2),
    },
    Published {
        key: "C.4",
        value: 3.6e18,
        rule: Rule::AtMost(2),
    },
    Published {
        key: "thresholds.eps-C2",
        value: 1.214e-3,
        rule: Rule::Rel(0.05),
    },
    Published {
        key: "chosen.eta2",
        value: 8.6e-22,
        rule: Rule::Rel(0.10),
    },
    Published {
        key: "chosen.eta3",
        value: 1.8e-69,
        rule: Rule::Rel(0.10),
    },
    Published {
        key: "thresholds.eta3-case1",
        value: 3.62e-26,
        rule: Rule::Rel(0.02),
    },
    Published {
        key: "chosen.sigma1",
        value: 1.0 / (4.0 * PI * PI),
        rule: Rule::Exact,
    },
    Published {
        key: "chosen.sigma2",
        value: 1.0 / 396.0,
        rule: Rule::Exact,
    },
    Published {
        key: "chosen.sigma3",
        value: 3.21e-9,
        rule: Rule::Rel(1e-12),
    },
    Published {
        key: "chosen.eta",
        value: 1.8e-69,
        rule: Rule::Rel(0.10),
    },
    Published {
        key: "chosen.sigma",
        value: 3.21e-9,
        rule: Rule::Rel(1e-12),
    },
    Published {
        key: "thresholds.pinching",
        value: 1438.0,
        rule: Rule::Within(1438.0, 1441.0),
    },
    Published {
        key: "thresholds.mu1-lower",
        value: 4.38e-3,
        rule: Rule::Rel(1e-12),
    },
    Published {
        key: "chosen.delta2",
        value: 0.01,
        rule: Rule::Exact,
    },
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PaperCheck {
    pub key: &'static str,
    pub computed: f64,
    pub published: f64,
    pub rule: Rule,
    pub pass: bool,
}

fn lookup(key: &str, table: &ConstantsTable, report: &ThresholdReport) -> Option<f64> {
    if key == "pi*B.1.1.1" {
        return Some(PI * table.b(1, 1, 1));
    }
    table
        .entries()
        .into_iter()
        .map(|(k, v, _)| (k, v))
        .chain(report.entries())
        .find(|(k, _)| k == key)
        .map(|(_, v)| v)
}

/// Compare computed values against every published anchor.
pub fn check_paper(table: &ConstantsTable, report: &ThresholdReport) -> Vec<PaperCheck> {
    PUBLISHED
        .iter()
        .map(|p| {
            let computed = lookup(p.key, table, report).unwrap_or(f64::NAN);
            let pass = match p.rule {
                Rule::Abs(t) => (computed - p.value).abs() <= t,
                Rule::Rel(t) => (computed - p.value).abs() <= t * p.value.abs(),
                Rule::Exact => computed == p.value,
                Rule::AtMost(d) => round_sig(computed, d) <= p.value,
                Rule::Within(lo, hi) => (lo..=hi).contains(&computed),
            };
            PaperCheck {
                key: p.key,
                computed,
                published: p.value,
                rule: p.rule,
                pass,
            }
        })
        .collect()
}
