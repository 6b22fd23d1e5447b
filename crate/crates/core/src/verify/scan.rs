use super::lemma::measured_epsilon;
use crate::ccurv::{c_curvature_capped, probe_limit, CCurvSample};
use crate::field::CurvatureField;
use crate::jacobi::ProbeConfig;
use crate::ode::Tolerance;
use crate::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, TAU};
use std::io::Write;

/// Smallness threshold of the proven regime (the published `η`).
pub const PROVEN_ETA: f64 = 1.8e-69;

/// Bound on `|𝒞|` at rank-1 probes.
pub const RANK1_TOL: f64 = 1e-8;

pub const CSV_COLUMNS: [&str; 8] = ["r0", "theta", "phi", "C", "A2", "ratio", "method", "flags"];

const MIN_NODES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanGrid {
    pub nr: usize,
    pub nth: usize,
    pub nph: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanSettings {
    pub sigma: f64,
    pub conj_margin: f64,
    pub tol: Tolerance,
}

impl Default for ScanSettings {
    fn default() -> Self {
        ScanSettings {
            sigma: 3.21e-9,
            conj_margin: 1e-3,
            tol: Tolerance::tight(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeFailure {
    pub probe: ProbeConfig,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub field_id: String,
    pub grid: ScanGrid,
    pub r0_nodes: Vec<f64>,
    pub theta_nodes: Vec<f64>,
    pub phi_nodes: Vec<f64>,
    /// Conjugate distance along the axis, when inside the patch.
    pub ell0: Option<f64>,
    pub conj_margin: f64,
    pub samples: Vec<CCurvSample>,
    /// Minimum of `𝒞/𝒜₂` over probes of rank 2.
    pub min_ratio: f64,
    pub argmin: Option<ProbeConfig>,
    /// Probes with `𝒞 < ς𝒜₂ − slack`.
    pub violations: Vec<ProbeConfig>,
    /// Largest `|𝒞|` over rank-1 probes.
    pub rank1_max: f64,
    pub rank1_ok: bool,
    pub failures: Vec<ProbeFailure>,
    pub sigma_used: f64,
    pub epsilon_used: f64,
    pub regime: &'static str,
}

impl ScanReport {
    /// Slack of the violation test at a probe.
    pub fn slack(&self, a2: f64) -> f64 {
        1e-9 * (self.sigma_used * a2).max(1.0)
    }

    /// True when the scan found no violation, no solver failure, and all
    /// rank-1 probes vanish.
    pub fn clean(&self) -> bool {
        self.violations.is_empty() && self.failures.is_empty() && self.rank1_ok
    }

    /// `min 𝒞/𝒜₂` recomputed from the stored samples.
    pub fn recompute_min_ratio(&self) -> f64 {
        self.samples
            .iter()
            .filter_map(|s| s.ratio)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scan report serializes")
    }

    /// Flat CSV with the columns of [`CSV_COLUMNS`].
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::Invalid(format!("csv output: {e}"));
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_COLUMNS).map_err(io)?;
        for s in &self.samples {
            let ratio = s.ratio.map(|r| r.to_string()).unwrap_or_default();
            w.write_record([
                s.probe.r0.to_string(),
                s.probe.theta.to_string(),
                s.probe.phi.to_string(),
                s.value.to_string(),
                s.a2.to_string(),
                ratio,
                s.method.name().to_string(),
                s.flags.join(";"),
            ])
            .map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::Invalid(format!("csv output: {e}")))
    }
}

fn nodes(n: usize, hi: f64, from_zero: bool) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if from_zero {
                hi * i as f64 / n as f64
            } else {
                hi * (i + 1) as f64 / n as f64
            }
        })
        .collect()
}

/// Evaluate `𝒞` on the tensor grid `r₀ ∈ (0, (1 − margin)ℓ₀]`,
/// `ϑ, φ ∈ [0, 2π)` and collect the almost-positivity statistics.
///
/// Probes are evaluated in parallel and gathered in grid order, so the
/// report does not depend on the thread count.
pub fn scan_apcc(
    field: &CurvatureField,
    grid: ScanGrid,
    settings: ScanSettings,
) -> Result<ScanReport> {
    if grid.nr < MIN_NODES || grid.nth < MIN_NODES || grid.nph < MIN_NODES {
        return Err(Error::Invalid(format!(
            "scan grids need at least {MIN_NODES} nodes per axis"
        )));
    }
    if !(1e-6..=0.1).contains(&settings.conj_margin) {
        return Err(Error::Invalid(format!(
            "conj_margin must lie in [1e-6, 0.1], got {}",
            settings.conj_margin
        )));
    }
    if !(settings.sigma >= 0.0 && settings.sigma.is_finite()) {
        return Err(Error::Invalid(format!(
            "sigma must be finite and >= 0, got {}",
            settings.sigma
        )));
    }
    let eps = measured_epsilon(field)?;
    let ell0 = probe_limit(field, settings.tol)?;
    let reach = ell0.unwrap_or(PI.min(field.patch().x2_max)).min(PI);
    let r_max = (1.0 - settings.conj_margin) * reach;

    let r0_nodes = nodes(grid.nr, r_max, false);
    let theta_nodes = nodes(grid.nth, TAU, true);
    let phi_nodes = nodes(grid.nph, TAU, true);
    let mut probes = Vec::with_capacity(grid.nr * grid.nth * grid.nph);
    for &r0 in &r0_nodes {
        for &theta in &theta_nodes {
            for &phi in &phi_nodes {
                probes.push(ProbeConfig::new(r0, theta, phi)?);
            }
        }
    }
    let results: Vec<Result<CCurvSample>> = probes
        .par_iter()
        .map(|&p| c_curvature_capped(field, p, settings.tol, ell0))
        .collect();

    let mut report = ScanReport {
        field_id: field.id(),
        grid,
        r0_nodes,
        theta_nodes,
        phi_nodes,
        ell0,
        conj_margin: settings.conj_margin,
        samples: Vec::with_capacity(probes.len()),
        min_ratio: f64::INFINITY,
        argmin: None,
        violations: Vec::new(),
        rank1_max: 0.0,
        rank1_ok: true,
        failures: Vec::new(),
        sigma_used: settings.sigma,
        epsilon_used: eps,
        regime: if eps <= PROVEN_ETA {
            "proven regime"
        } else {
            "exploratory beyond proven regime"
        },
    };
    for (probe, r) in probes.into_iter().zip(results) {
        match r {
            Err(e) => report.failures.push(ProbeFailure {
                probe,
                error: e.to_string(),
            }),
            Ok(s) => {
                match s.ratio {
                    None => report.rank1_max = report.rank1_max.max(s.value.abs()),
                    Some(ratio) => {
                        if ratio < report.min_ratio {
                            report.min_ratio = ratio;
                            report.argmin = Some(probe);
                        }
                        if s.value < settings.sigma * s.a2 - report.slack(s.a2) {
                            report.violations.push(probe);
                        }
                    }
                }
                report.samples.push(s);
            }
        }
    }
    report.rank1_ok = report.rank1_max <= RANK1_TOL;
    Ok(report)
}
