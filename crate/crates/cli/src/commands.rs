use crate::args::{
    Command, ConstantsArgs, CorollaryArgs, EvalArgs, FieldArgs, GridArgs, LemmaArgs, Mu1Args,
    ScanArgs, SturmArgs, VerifyCommand,
};
use crate::manifest::sha256_hex;
use crate::output::{bound_report, num, object, sig9, Output, EXIT_NUMERICAL, EXIT_VIOLATION};
use ccurv_core::ccurv::{c_curvature, c_curvature_fd_oracle};
use ccurv_core::constants::{check_paper, smallness_thresholds, ConstantsTable, ThresholdReport};
use ccurv_core::field::{CurvatureField, FieldConfig};
use ccurv_core::jacobi::{conjugate_distance, ProbeConfig};
use ccurv_core::ode::Tolerance;
use ccurv_core::verify::{
    corollary_sweep, hfunc_check, measured_epsilon, mu1_minorant_check, noconj_boundary_curvature,
    scan_apcc, sturm_and_pinch_suite, verify_lemma_bounds, ScanGrid, ScanSettings,
};
use ccurv_core::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::f64::consts::TAU;

/// What a run produced besides its output, for the manifest.
#[derive(Debug, Default)]
pub struct RunInfo {
    pub field_hash: Option<String>,
    pub grid: Option<Value>,
}

fn load_field(args: &FieldArgs, info: &mut RunInfo) -> Result<CurvatureField> {
    let bytes = std::fs::read(&args.field)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", args.field.display())))?;
    info.field_hash = Some(sha256_hex(&bytes));
    let (_, field) = FieldConfig::load(&args.field)?;
    Ok(field)
}

fn tables(grid: usize, info: &mut RunInfo) -> Result<(ConstantsTable, ThresholdReport)> {
    info.grid = Some(json!({ "sup_grid": grid }));
    let table = ConstantsTable::build(grid, ccurv_core::constants::DEFAULT_REFINE_TOL)?;
    let report = smallness_thresholds(&table)?;
    Ok((table, report))
}

pub fn run(command: &Command, tol: Tolerance, info: &mut RunInfo) -> Result<Output> {
    match command {
        Command::Constants(a) => constants(a, info),
        Command::Thresholds(a) => thresholds(a, info),
        Command::Eval(a) => eval(a, tol, info),
        Command::Scan(a) => scan(a, tol, info),
        Command::Conjugate(a) => conjugate(a, tol, info),
        Command::Boundary(a) => boundary(a, tol, info),
        Command::Verify(v) => match v {
            VerifyCommand::Lemma(a) => lemma(a, tol, info),
            VerifyCommand::Corollary(a) => corollary(a, tol, info),
            VerifyCommand::Hfuncs => Ok(bound_report(&hfunc_check())),
            VerifyCommand::Sturm(a) => sturm(a, tol, info),
            VerifyCommand::Mu1(a) => mu1(a, info),
        },
    }
}

fn constants(a: &ConstantsArgs, info: &mut RunInfo) -> Result<Output> {
    let (table, report) = tables(a.grid.grid, info)?;
    let mut map = serde_json::Map::new();
    let mut o = Output::new(Value::Null);
    for (k, v, _) in table.entries() {
        o.row(k.clone(), v);
        map.insert(k, num(v));
    }
    o.row("pinching", table.pinching());
    map.insert("pinching".into(), num(table.pinching()));
    for (k, v) in report.entries() {
        o.row(k.clone(), v);
        map.insert(k, num(v));
    }
    if a.check_paper {
        let checks = check_paper(&table, &report);
        for c in &checks {
            o.notes.push(format!(
                "{} {}: computed {} published {} ({:?})",
                if c.pass { "ok  " } else { "FAIL" },
                c.key,
                sig9(c.computed),
                sig9(c.published),
                c.rule
            ));
        }
        if checks.iter().any(|c| !c.pass) {
            o.exit = EXIT_VIOLATION;
        }
        map.insert(
            "paper_checks".into(),
            serde_json::to_value(&checks).expect("checks serialize"),
        );
    }
    o.json = Value::Object(map);
    Ok(o)
}

fn thresholds(a: &GridArgs, info: &mut RunInfo) -> Result<Output> {
    let (_, report) = tables(a.grid, info)?;
    let mut o = Output::new(serde_json::to_value(&report).expect("report serializes"));
    for (k, v) in report.entries() {
        o.row(k, v);
    }
    Ok(o)
}

fn eval(a: &EvalArgs, tol: Tolerance, info: &mut RunInfo) -> Result<Output> {
    let field = load_field(&a.field, info)?;
    let probe = ProbeConfig::new(a.r0, a.theta, a.phi)?;
    let s = c_curvature(&field, probe, tol)?;
    let mut o = Output::new(Value::Null);
    o.row("C", s.value);
    o.row("A2", s.a2);
    match s.ratio {
        Some(r) => o.row("ratio", r),
        None => o.row("ratio", "degenerate"),
    }
    o.row("E1", s.parts.e1);
    o.row("E2", s.parts.e2);
    o.row("E3", s.parts.e3);
    o.row("method", s.method.name());
    o.row("flags", s.flags.join(";"));
    let mut j = serde_json::to_value(&s).expect("sample serializes");
    if a.oracle {
        let fd = c_curvature_fd_oracle(&field, probe, 1e-3)?;
        let gap = (s.value - fd).abs() / s.value.abs().max(f64::MIN_POSITIVE);
        o.row("C_fd", fd);
        o.row("rel_gap", gap);
        j["oracle"] = json!({ "value": fd, "h": 1e-3, "rel_gap": gap });
    }
    o.json = j;
    Ok(o)
}

fn scan(a: &ScanArgs, tol: Tolerance, info: &mut RunInfo) -> Result<Output> {
    let field = load_field(&a.field, info)?;
    let grid = ScanGrid {
        nr: a.nr,
        nth: a.nth,
        nph: a.nph,
    };
    info.grid = Some(serde_json::to_value(grid).expect("grid serializes"));
    let settings = ScanSettings {
        sigma: a.sigma,
        conj_margin: a.conj_margin,
        tol,
    };
    let r = scan_apcc(&field, grid, settings)?;
    let mut csv = Vec::new();
    r.write_csv(&mut csv)?;
    let mut o = Output::new(serde_json::from_str(&r.to_json()).expect("report is json"));
    o.csv = Some(String::from_utf8(csv).expect("csv is utf-8"));
    o.row("field", r.field_id.clone());
    o.row("regime", r.regime);
    o.row("epsilon", r.epsilon_used);
    o.row("sigma", r.sigma_used);
    match r.ell0 {
        Some(l) => o.row("ell0", l),
        None => o.row("ell0", "none in patch"),
    }
    o.row("probes", r.samples.len() + r.failures.len());
    o.row("min_ratio", r.min_ratio);
    if let Some(p) = r.argmin {
        o.row(
            "argmin",
            format!(
                "r0 {} theta {} phi {}",
                sig9(p.r0),
                sig9(p.theta),
                sig9(p.phi)
            ),
        );
    }
    o.row("violations", r.violations.len());
    o.row("rank1_max", r.rank1_max);
    o.row("failures", r.failures.len());
    if !r.violations.is_empty() || !r.rank1_ok {
        o.exit = EXIT_VIOLATION;
    } else if !r.failures.is_empty() {
        o.exit = EXIT_NUMERICAL;
    }
    Ok(o)
}

fn conjugate(a: &FieldArgs, tol: Tolerance, info: &mut RunInfo) -> Result<Output> {
    let field = load_field(a, info)?;
    let ell0 = conjugate_distance(&field, tol)?;
    let mut o = Output::new(object(&[("ell0", num(ell0))]));
    o.row("ell0", ell0);
    Ok(o)
}

fn boundary(a: &FieldArgs, tol: Tolerance, info: &mut RunInfo) -> Result<Output> {
    let field = load_field(a, info)?;
    let b = noconj_boundary_curvature(&field, tol)?;
    let mut o = Output::new(serde_json::to_value(b).expect("boundary serializes"));
    o.row("k", b.k);
    o.row("ell0", b.ell0);
    o.row("D1", b.d1);
    o.row("D2", b.d2);
    o.row("D11", b.d11);
    o.row("D12", b.d12);
    o.row("D22", b.d22);
    Ok(o)
}

fn lemma(a: &LemmaArgs, tol: Tolerance, info: &mut RunInfo) -> Result<Output> {
    let field = load_field(&a.field, info)?;
    info.grid = Some(json!({ "r0": a.r0, "phi": a.phi }));
    let b = ccurv_core::constants::b_constants();
    Ok(bound_report(&verify_lemma_bounds(
        &field, &b, &a.r0, &a.phi, tol,
    )?))
}

fn corollary(a: &CorollaryArgs, tol: Tolerance, info: &mut RunInfo) -> Result<Output> {
    let field = load_field(&a.field, info)?;
    let (table, _) = tables(ccurv_core::constants::DEFAULT_GRID, info)?;
    info.grid = Some(json!({ "probes": a.probes, "seed": a.seed }));
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let probes = (0..a.probes)
        .map(|_| {
            ProbeConfig::new(
                rng.gen_range(0.2..2.8),
                rng.gen_range(0.0..TAU),
                rng.gen_range(0.0..TAU),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let eps = measured_epsilon(&field)?;
    let r = corollary_sweep(&field, &probes, eps, table.composites.c[0], tol)?;
    Ok(bound_report(&r))
}

fn sturm(a: &SturmArgs, tol: Tolerance, info: &mut RunInfo) -> Result<Output> {
    let field = load_field(&a.field, info)?;
    info.grid = Some(json!({ "r0": a.r0 }));
    Ok(bound_report(&sturm_and_pinch_suite(&field, &a.r0, tol)?))
}

fn mu1(a: &Mu1Args, info: &mut RunInfo) -> Result<Output> {
    let (d1, d2) = match (a.delta1, a.delta2) {
        (Some(d1), Some(d2)) => (d1, d2),
        _ => {
            let (_, r) = tables(ccurv_core::constants::DEFAULT_GRID, info)?;
            (
                a.delta1.unwrap_or(r.chosen.delta1),
                a.delta2.unwrap_or(r.chosen.delta2),
            )
        }
    };
    if !(d1 > 0.0 && d1 < 1.0 && d2 > 0.0 && d2 < 1.0) {
        return Err(Error::Invalid(format!(
            "delta1 and delta2 must lie in (0, 1), got {d1}, {d2}"
        )));
    }
    info.grid = Some(json!({ "delta1": d1, "delta2": d2 }));
    Ok(bound_report(&mu1_minorant_check(d1, d2)))
}
