use super::{CurvatureField, Patch};
use crate::ode::{integrate_span, Options, Tolerance};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

/// Degeneracy guard on `w = √G`.
pub const W_MIN: f64 = 0.1;

const METRIC_TOL: Tolerance = Tolerance {
    rel: 1e-13,
    abs: 1e-15,
};

/// `w = √G` and its first derivatives at `(x¹, x²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FermiMetricSample {
    pub w: f64,
    pub dw_dx1: f64,
    pub dw_dx2: f64,
    pub x1: f64,
    pub x2: f64,
}

impl FermiMetricSample {
    pub fn g(&self) -> f64 {
        self.w * self.w
    }

    pub fn dg_dx1(&self) -> f64 {
        2.0 * self.w * self.dw_dx1
    }

    pub fn dg_dx2(&self) -> f64 {
        2.0 * self.w * self.dw_dx2
    }
}

fn axis_sample(x2: f64) -> FermiMetricSample {
    FermiMetricSample {
        w: 1.0,
        dw_dx1: 0.0,
        dw_dx2: 0.0,
        x1: 0.0,
        x2,
    }
}

/// Integrate `∂₁₁w = −K w` together with `∂₁₁(∂₂w) = −(∂₂K)w − K ∂₂w`
/// from the axis to `x1 ≠ 0` at fixed `x2`.
///
/// Each point is integrated on its own, so a sample depends only on its
/// location (grids that share nodes share values bitwise).
fn integrate_point(field: &CurvatureField, x2: f64, x1: f64) -> Result<FermiMetricSample> {
    let sign = x1.signum();
    let sys = |s: f64, y: &[f64], dy: &mut [f64]| {
        let j = field.jet(sign * s, x2)?;
        dy[0] = sign * y[1];
        dy[1] = -sign * j.k * y[0];
        dy[2] = sign * y[3];
        dy[3] = -sign * (j.d2 * y[0] + j.k * y[2]);
        Ok(())
    };
    let opts = Options::with_tol(METRIC_TOL);
    let tr = integrate_span(&sys, 0.0, &[1.0, 0.0, 0.0, 0.0], x1.abs(), &opts)?;
    if let Some(i) = (0..tr.len()).find(|&i| tr.state(i)[0] <= W_MIN) {
        return Err(Error::MetricDegenerate {
            x1: sign * tr.times()[i],
            x2,
            w: tr.state(i)[0],
        });
    }
    let y = tr.last_state();
    Ok(FermiMetricSample {
        w: y[0],
        dw_dx1: y[1],
        dw_dx2: y[2],
        x1,
        x2,
    })
}

/// Metric samples at `(x1, x2)` for every `x1` in `x1_nodes`.
pub fn metric_column(
    field: &CurvatureField,
    x2: f64,
    x1_nodes: &[f64],
) -> Result<Vec<FermiMetricSample>> {
    x1_nodes
        .iter()
        .map(|&x1| reconstruct_metric(field, x2, x1))
        .collect()
}

/// `w`, `∂₁w`, `∂₂w` at `(x1, x2)`.
pub fn reconstruct_metric(field: &CurvatureField, x2: f64, x1: f64) -> Result<FermiMetricSample> {
    if !field.patch().contains(x1, x2) || !x1.is_finite() || !x2.is_finite() {
        return Err(Error::OutOfPatch { x1, x2 });
    }
    if x1 == 0.0 {
        return Ok(axis_sample(x2));
    }
    if field.is_flat() {
        return Ok(FermiMetricSample {
            x1,
            ..axis_sample(x2)
        });
    }
    integrate_point(field, x2, x1)
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                b
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// Sampled `sup (|K − 1| + |dK|_g + |∇dK|_g)` over a `n1 × n2` grid of the patch.
///
/// Grids `n` and `2n − 1` are nested, so refinement in that sequence never
/// decreases the estimate.
pub fn c2_norm_estimate(field: &CurvatureField, patch: Patch, grid: (usize, usize)) -> Result<f64> {
    let (n1, n2) = grid;
    if n1 < 32 || n2 < 32 {
        return Err(Error::Invalid(format!(
            "grid must be at least 32×32, got {n1}×{n2}"
        )));
    }
    if field.is_constant() {
        return Ok((field.kappa0() - 1.0).abs());
    }
    let x1s = linspace(-patch.x1_max, patch.x1_max, n1);
    let x2s = linspace(patch.x2_min, patch.x2_max, n2);
    let column_max = |x2: f64| -> Result<f64> {
        let samples = metric_column(field, x2, &x1s)?;
        let mut m: f64 = 0.0;
        for s in samples {
            let j = field.jet(s.x1, x2)?;
            let g = s.g();
            let g1 = s.dg_dx1();
            let g2 = s.dg_dx2();
            let gam1_22 = -0.5 * g1;
            let gam2_12 = g1 / (2.0 * g);
            let gam2_22 = g2 / (2.0 * g);
            let h11 = j.d11;
            let h12 = j.d12 - gam2_12 * j.d2;
            let h22 = j.d22 - gam1_22 * j.d1 - gam2_22 * j.d2;
            let grad = (j.d1 * j.d1 + j.d2 * j.d2 / g).sqrt();
            let hess = (h11 * h11 + 2.0 * h12 * h12 / g + h22 * h22 / (g * g)).sqrt();
            m = m.max((j.k - 1.0).abs() + grad + hess);
        }
        Ok(m)
    };
    let maxima: Vec<Result<f64>> = x2s.par_iter().map(|&x2| column_max(x2)).collect();
    let mut eps: f64 = 0.0;
    for m in maxima {
        eps = eps.max(m?);
    }
    Ok(eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::WaveParams;

    #[test]
    fn unit_sphere_metric() {
        let f = CurvatureField::constant(1.0).unwrap();
        let s = reconstruct_metric(&f, 0.4, 0.5).unwrap();
        assert!((s.w - 0.5f64.cos()).abs() < 1e-12);
        assert!((s.dw_dx1 + 0.5f64.sin()).abs() < 1e-12);
        assert_eq!(s.dw_dx2, 0.0);
    }

    #[test]
    fn axis_values_are_exact() {
        let f = CurvatureField::cosine_bump(1e-3, WaveParams::default()).unwrap();
        let s = reconstruct_metric(&f, 1.3, 0.0).unwrap();
        assert_eq!((s.w, s.dw_dx1, s.dw_dx2), (1.0, 0.0, 0.0));
    }

    #[test]
    fn flat_field_metric_is_euclidean() {
        let f = CurvatureField::flat_for_validation();
        let s = reconstruct_metric(&f, 0.0, 0.7).unwrap();
        assert_eq!(s.w, 1.0);
    }

    #[test]
    fn constant_curvature_closed_form_on_patch() {
        for kappa in [1.0, 1.1, 1.3] {
            let f = CurvatureField::constant(kappa).unwrap();
            let xs: Vec<f64> = (0..25).map(|i| -1.2 + 0.1 * i as f64).collect();
            for s in metric_column(&f, 0.5, &xs).unwrap() {
                assert!((s.w - (kappa.sqrt() * s.x1).cos()).abs() < 1e-9, "{:?}", s);
            }
        }
    }

    #[test]
    fn degenerate_metric_is_reported() {
        let f = CurvatureField::constant(4.0).unwrap();
        assert!(matches!(
            reconstruct_metric(&f, 0.0, 1.2),
            Err(Error::MetricDegenerate { .. })
        ));
    }

    #[test]
    fn variational_dw_dx2_matches_differences() {
        let p = WaveParams {
            wave1: 1.0,
            wave2: 2.0,
            phase: 0.3,
        };
        let f = CurvatureField::cosine_bump(5e-2, p).unwrap();
        let h = 1e-4;
        for &(x1, x2) in &[(0.5, 1.0), (-0.9, 2.0), (1.1, 0.2)] {
            let s = reconstruct_metric(&f, x2, x1).unwrap();
            let fd = (reconstruct_metric(&f, x2 + h, x1).unwrap().w
                - reconstruct_metric(&f, x2 - h, x1).unwrap().w)
                / (2.0 * h);
            assert!((s.dw_dx2 - fd).abs() < 1e-6, "{} vs {}", s.dw_dx2, fd);
        }
    }

    #[test]
    fn c2_norm_of_constant_fields() {
        let p = Patch::default();
        assert_eq!(
            c2_norm_estimate(&CurvatureField::constant(1.0).unwrap(), p, (32, 32)).unwrap(),
            0.0
        );
        let e = c2_norm_estimate(&CurvatureField::constant(1.05).unwrap(), p, (32, 32)).unwrap();
        assert_eq!(e, (1.05f64 - 1.0).abs());
        assert!(c2_norm_estimate(&CurvatureField::constant(1.0).unwrap(), p, (16, 32)).is_err());
    }

    #[test]
    fn c2_norm_refinement_is_monotone() {
        let f = CurvatureField::cosine_bump(1e-3, WaveParams::default()).unwrap();
        let p = Patch::default();
        let a = c2_norm_estimate(&f, p, (33, 33)).unwrap();
        let b = c2_norm_estimate(&f, p, (65, 65)).unwrap();
        assert!(b >= a, "{b} < {a}");
    }
}
