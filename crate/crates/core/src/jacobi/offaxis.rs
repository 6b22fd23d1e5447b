use crate::field::{reconstruct_metric, CurvatureField};
use crate::ode::{integrate_span, Options, Tolerance, Trajectory};
use crate::{Error, Result};
use std::f64::consts::PI;

/// Default tolerance for off-axis solves used by finite-difference stencils.
pub const OFF_AXIS_TOL: Tolerance = Tolerance {
    rel: 1e-13,
    abs: 1e-15,
};

/// Geodesic acceleration in the Fermi chart, `G = w²`.
fn geodesic_accel(field: &CurvatureField, x: [f64; 2], v: [f64; 2]) -> Result<[f64; 2]> {
    let m = reconstruct_metric(field, x[1], x[0])?;
    let (w, w1, w2) = (m.w, m.dw_dx1, m.dw_dx2);
    Ok([
        w * w1 * v[1] * v[1],
        -2.0 * (w1 / w) * v[0] * v[1] - (w2 / w) * v[1] * v[1],
    ])
}

fn check_v(v: [f64; 2]) -> Result<()> {
    let n = v[0].hypot(v[1]);
    if !n.is_finite() || n > PI {
        return Err(Error::Invalid(format!("|v| must be at most π, got {n}")));
    }
    Ok(())
}

/// Shoot the geodesic `t ↦ exp(t v)` from the origin of the Fermi chart.
///
/// State layout: `[X¹, X², Ẋ¹, Ẋ²]`.
pub fn geodesic_shoot(
    field: &CurvatureField,
    v: [f64; 2],
    t_end: f64,
    tol: Tolerance,
) -> Result<Trajectory> {
    check_v(v)?;
    let sys = |_t: f64, y: &[f64], dy: &mut [f64]| {
        let a = geodesic_accel(field, [y[0], y[1]], [y[2], y[3]])?;
        dy[0] = y[2];
        dy[1] = y[3];
        dy[2] = a[0];
        dy[3] = a[1];
        Ok(())
    };
    integrate_span(
        &sys,
        0.0,
        &[0.0, 0.0, v[0], v[1]],
        t_end,
        &Options::with_tol(tol),
    )
}

/// `|Ẋ|_g` at a state of [`geodesic_shoot`].
pub fn geodesic_energy(field: &CurvatureField, state: &[f64]) -> Result<f64> {
    let m = reconstruct_metric(field, state[1], state[0])?;
    Ok((state[2] * state[2] + m.g() * state[3] * state[3]).sqrt())
}

/// `(f₀(1), f₁(1))` along `t ↦ exp(t v)`, solving `f̈ + |v|² K(X(t)) f = 0`.
///
/// Geodesic and Jacobi equations are advanced as one system.
pub fn jacobi_off_axis(field: &CurvatureField, v: [f64; 2], tol: Tolerance) -> Result<(f64, f64)> {
    check_v(v)?;
    let speed2 = v[0] * v[0] + v[1] * v[1];
    let sys = |_t: f64, y: &[f64], dy: &mut [f64]| {
        let a = geodesic_accel(field, [y[0], y[1]], [y[2], y[3]])?;
        let k = field.k(y[0], y[1])?;
        dy[0] = y[2];
        dy[1] = y[3];
        dy[2] = a[0];
        dy[3] = a[1];
        dy[4] = y[5];
        dy[5] = -speed2 * k * y[4];
        dy[6] = y[7];
        dy[7] = -speed2 * k * y[6];
        Ok(())
    };
    let y0 = [0.0, 0.0, v[0], v[1], 1.0, 0.0, 0.0, 1.0];
    let tr = integrate_span(&sys, 0.0, &y0, 1.0, &Options::with_tol(tol))?;
    let y = tr.last_state();
    Ok((y[4], y[6]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::WaveParams;

    #[test]
    fn axis_shot_is_straight() {
        let f = CurvatureField::cosine_bump(1e-3, WaveParams::default()).unwrap();
        let tr = geodesic_shoot(&f, [0.0, 1.0], 1.0, Tolerance::tight()).unwrap();
        let y = tr.last_state();
        assert!(y[0].abs() < 1e-9 && (y[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn orthogonal_shot_is_coordinate_line() {
        let f = CurvatureField::constant(1.0).unwrap();
        let tr = geodesic_shoot(&f, [0.3, 0.0], 1.0, Tolerance::tight()).unwrap();
        for i in 0..tr.len() {
            let (t, y) = (tr.times()[i], tr.state(i));
            assert!((y[0] - 0.3 * t).abs() < 1e-9 && y[1].abs() < 1e-12);
        }
    }

    #[test]
    fn energy_conserved() {
        let f = CurvatureField::constant(1.0).unwrap();
        let tr = geodesic_shoot(&f, [0.1, 1.0], 1.0, Tolerance::tight()).unwrap();
        let e0 = geodesic_energy(&f, tr.state(0)).unwrap();
        for i in 0..tr.len() {
            assert!((geodesic_energy(&f, tr.state(i)).unwrap() - e0).abs() < 1e-8);
        }
    }

    #[test]
    fn constant_curvature_closed_forms() {
        let one = CurvatureField::constant(1.0).unwrap();
        for v in [[0.0, 1.0], [0.6, 0.8]] {
            let (f0, f1) = jacobi_off_axis(&one, v, OFF_AXIS_TOL).unwrap();
            assert!(
                (f0 - 1f64.cos()).abs() < 1e-9 && (f1 - 1f64.sin()).abs() < 1e-9,
                "{v:?}"
            );
        }
        let four = CurvatureField::constant(4.0).unwrap();
        let (f0, f1) = jacobi_off_axis(&four, [0.0, 0.5], OFF_AXIS_TOL).unwrap();
        assert!((f0 - 1f64.cos()).abs() < 1e-9 && (f1 - 1f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn rejects_long_vectors() {
        let f = CurvatureField::constant(1.0).unwrap();
        assert!(geodesic_shoot(&f, [3.0, 1.0], 1.0, Tolerance::tight()).is_err());
    }
}
