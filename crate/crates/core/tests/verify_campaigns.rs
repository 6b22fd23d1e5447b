use ccurv_core::constants::b_constants;
use ccurv_core::field::{CurvatureField, WaveParams};
use ccurv_core::ode::Tolerance;
use ccurv_core::verify::{scan_apcc, verify_lemma_bounds, ScanGrid, ScanSettings};

fn bump(a: f64) -> CurvatureField {
    CurvatureField::cosine_bump(a, WaveParams::default()).unwrap()
}

fn grid(nr: usize, n: usize) -> ScanGrid {
    ScanGrid { nr, nth: n, nph: n }
}

#[test]
fn scan_reports_are_reproducible() {
    let f = bump(1e-4);
    let a = scan_apcc(&f, grid(8, 8), ScanSettings::default()).unwrap();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let b = pool.install(|| scan_apcc(&f, grid(8, 8), ScanSettings::default()).unwrap());
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.regime, "exploratory beyond proven regime");
    let bits = |r: &ccurv_core::verify::ScanReport| {
        r.samples
            .iter()
            .map(|s| s.value.to_bits())
            .collect::<Vec<_>>()
    };
    assert_eq!(bits(&a), bits(&b));
}

#[test]
fn sphere_min_ratio_is_stable_under_refinement() {
    let f = CurvatureField::constant(1.0).unwrap();
    let coarse = scan_apcc(&f, grid(8, 8), ScanSettings::default()).unwrap();
    let fine = scan_apcc(&f, grid(8, 16), ScanSettings::default()).unwrap();
    assert!(coarse.min_ratio > 0.0);
    assert!(
        (coarse.min_ratio - fine.min_ratio).abs() <= 1e-6,
        "{} vs {}",
        coarse.min_ratio,
        fine.min_ratio
    );
}

/// Lines 2 and 3 measure the perturbation itself, which grows linearly in ε,
/// so the margin against the bounds at the largest ε shrinks as ε grows
/// while the ratio to the ε-scaled bound stays put.
#[test]
fn lemma_margins_shrink_as_epsilon_grows() {
    let b = b_constants();
    let tol = Tolerance::tight();
    // amplitudes giving ε of roughly 1e-6, 1e-5 and 1e-4
    let reports: Vec<_> = [1.34e-7, 1.34e-6, 1.34e-5]
        .iter()
        .map(|&a| verify_lemma_bounds(&bump(a), &b, &[1.0, 2.0], &[0.0, 1.0], tol).unwrap())
        .collect();
    let last = reports.last().unwrap();
    for r in &reports {
        assert!(r.passed(), "{:?}", r.failed().collect::<Vec<_>>());
    }
    for c in &last.checks {
        if !(c.id.starts_with("lemma.2") || c.id.starts_with("lemma.3")) {
            continue;
        }
        let margins: Vec<f64> = reports
            .iter()
            .map(|r| c.rhs - r.get(&c.id).unwrap().lhs)
            .collect();
        assert!(
            margins.windows(2).all(|w| w[1] < w[0]),
            "{}: {margins:?}",
            c.id
        );
        let ratios: Vec<f64> = reports
            .iter()
            .map(|r| {
                let x = r.get(&c.id).unwrap();
                x.lhs / x.rhs
            })
            .collect();
        assert!(
            (ratios[0] - ratios[2]).abs() <= 1e-2 * ratios[2],
            "{}: {ratios:?}",
            c.id
        );
    }
}
