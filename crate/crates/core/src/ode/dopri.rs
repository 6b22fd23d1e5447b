use super::{OdeSystem, Tolerance, Trajectory};
use crate::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Step-control options.
#[derive(Debug, Clone)]
pub struct Options {
    pub tol: Tolerance,
    /// Upper bound on the step size.
    pub max_step: f64,
    /// Initial step; chosen automatically when `None`.
    pub first_step: Option<f64>,
    pub max_steps: usize,
    /// Times the integrator must land on exactly (sorted, inside the span).
    pub stops: Vec<f64>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            tol: Tolerance::default(),
            max_step: f64::INFINITY,
            first_step: None,
            max_steps: 1_000_000,
            stops: Vec::new(),
        }
    }
}

impl Options {
    pub fn with_tol(tol: Tolerance) -> Self {
        Options {
            tol,
            ..Options::default()
        }
    }
}

/// Integrate `y' = f(t, y)` from `t = 0` to `t_end`.
pub fn integrate_ivp<S: OdeSystem + ?Sized>(
    system: &S,
    y0: &[f64],
    t_end: f64,
    tol: Tolerance,
) -> Result<Trajectory> {
    integrate_span(system, 0.0, y0, t_end, &Options::with_tol(tol))
}

fn error_norm(y: &[f64], y_new: &[f64], err: &[f64], tol: Tolerance) -> f64 {
    let n = y.len() as f64;
    let s: f64 = y
        .iter()
        .zip(y_new)
        .zip(err)
        .map(|((a, b), e)| {
            let sc = tol.abs + tol.rel * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum();
    (s / n).sqrt()
}

fn initial_step<S: OdeSystem + ?Sized>(
    system: &S,
    t0: f64,
    y0: &[f64],
    f0: &[f64],
    tol: Tolerance,
    span: f64,
) -> Result<f64> {
    let n = y0.len();
    let sc: Vec<f64> = y0.iter().map(|y| tol.abs + tol.rel * y.abs()).collect();
    let d0 = (y0
        .iter()
        .zip(&sc)
        .map(|(y, s)| (y / s).powi(2))
        .sum::<f64>()
        / n as f64)
        .sqrt();
    let d1 = (f0
        .iter()
        .zip(&sc)
        .map(|(f, s)| (f / s).powi(2))
        .sum::<f64>()
        / n as f64)
        .sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(span);
    let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, f)| y + h0 * f).collect();
    let mut f1 = vec![0.0; n];
    system.rhs(t0 + h0, &y1, &mut f1)?;
    let d2 = (f1
        .iter()
        .zip(f0)
        .zip(&sc)
        .map(|((a, b), s)| ((a - b) / s).powi(2))
        .sum::<f64>()
        / n as f64)
        .sqrt()
        / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / 5.0)
    };
    Ok((100.0 * h0).min(h1).min(span))
}

/// Integrate from `t0` to `t1 > t0` with explicit options.
pub fn integrate_span<S: OdeSystem + ?Sized>(
    system: &S,
    t0: f64,
    y0: &[f64],
    t1: f64,
    opts: &Options,
) -> Result<Trajectory> {
    if !(t1 > t0) {
        return Err(Error::Invalid(format!(
            "integration span [{t0}, {t1}] is empty"
        )));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { t: t0 });
    }
    let tol = opts.tol;
    let n = y0.len();
    let mut traj = Trajectory::new(n, tol);
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; n];
    system.rhs(t, &y, &mut k1)?;
    traj.push(t, &y, &k1);

    let mut stops: Vec<f64> = opts
        .stops
        .iter()
        .copied()
        .filter(|&s| s > t0 && s < t1)
        .collect();
    stops.sort_by(f64::total_cmp);
    stops.dedup();
    stops.push(t1);
    let mut next_stop = 0usize;

    let span = t1 - t0;
    let mut h = match opts.first_step {
        Some(h) => h,
        None => initial_step(system, t, &y, &k1, tol, span)?,
    }
    .min(opts.max_step);

    let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) = (
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
    );
    let mut yt = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut err = vec![0.0; n];
    let mut steps = 0usize;
    let mut rejected_last = false;

    while t < t1 {
        if steps >= opts.max_steps {
            return Err(Error::TooManySteps { t });
        }
        let target = stops[next_stop];
        let mut lands = false;
        if t + h >= target || target - (t + h) < 1e-12 * span {
            h = target - t;
            lands = true;
        }
        if h <= 16.0 * f64::EPSILON * t.abs().max(span) {
            return Err(Error::StepUnderflow { t, h });
        }

        for i in 0..n {
            yt[i] = y[i] + h * A21 * k1[i];
        }
        system.rhs(t + C2 * h, &yt, &mut k2)?;
        for i in 0..n {
            yt[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        system.rhs(t + C3 * h, &yt, &mut k3)?;
        for i in 0..n {
            yt[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        system.rhs(t + C4 * h, &yt, &mut k4)?;
        for i in 0..n {
            yt[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        system.rhs(t + C5 * h, &yt, &mut k5)?;
        for i in 0..n {
            yt[i] =
                y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        system.rhs(t + h, &yt, &mut k6)?;
        for i in 0..n {
            y_new[i] =
                y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        let t_new = if lands { target } else { t + h };
        system.rhs(t_new, &y_new, &mut k7)?;
        for i in 0..n {
            err[i] =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let en = error_norm(&y, &y_new, &err, tol);
        if !en.is_finite() {
            if y_new.iter().any(|v| !v.is_finite()) && h <= 1e-10 * span {
                return Err(Error::NonFinite { t });
            }
            h *= 0.1;
            rejected_last = true;
            continue;
        }
        steps += 1;
        if en <= 1.0 {
            if y_new.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { t: t_new });
            }
            t = t_new;
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut k1, &mut k7);
            traj.push(t, &y, &k1);
            traj.max_error_estimate = traj.max_error_estimate.max(en);
            if lands {
                next_stop += 1;
            }
            let mut fac = if en == 0.0 { 5.0 } else { 0.9 * en.powf(-0.2) };
            fac = fac.clamp(0.2, 5.0);
            if rejected_last {
                fac = fac.min(1.0);
            }
            h = (h * fac).min(opts.max_step);
            rejected_last = false;
        } else {
            let fac = (0.9 * en.powf(-0.2)).clamp(0.1, 1.0);
            h *= fac;
            rejected_last = true;
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn oscillator(omega: f64) -> impl Fn(f64, &[f64], &mut [f64]) -> Result<()> {
        move |_t, y, dy| {
            dy[0] = y[1];
            dy[1] = -omega * omega * y[0];
            Ok(())
        }
    }

    #[test]
    fn constant_solution() {
        let sys = |_t: f64, _y: &[f64], dy: &mut [f64]| {
            dy[0] = 0.0;
            Ok(())
        };
        let tr = integrate_ivp(&sys, &[1.0], 1.0, Tolerance::default()).unwrap();
        assert_eq!(tr.last_state()[0], 1.0);
        assert_eq!(tr.t_end(), 1.0);
        assert_eq!(tr.t_start(), 0.0);
    }

    #[test]
    fn cosine_oracle() {
        let tol = Tolerance::default();
        let tr = integrate_ivp(&oscillator(1.0), &[1.0, 0.0], 1.0, tol).unwrap();
        assert!((tr.last_state()[0] - 1f64.cos()).abs() < 10.0 * tol.rel);
    }

    #[test]
    fn sine_pi_oracle() {
        let tol = Tolerance::default();
        let tr = integrate_ivp(&oscillator(PI), &[0.0, 1.0], 1.0, tol).unwrap();
        assert!(
            tr.last_state()[0].abs() < 10.0 * tol.rel,
            "{}",
            tr.last_state()[0]
        );
    }

    #[test]
    fn tighter_tolerance_reduces_error() {
        let mut prev = f64::INFINITY;
        for k in 0..5 {
            let rel = 1e-6 / 2f64.powi(3 * k);
            let tol = Tolerance {
                rel,
                abs: rel * 1e-2,
            };
            let tr = integrate_ivp(&oscillator(3.0), &[1.0, 0.0], 1.0, tol).unwrap();
            let e = (tr.last_state()[0] - 3f64.cos()).abs();
            assert!(e < prev, "k = {k}: {e} !< {prev}");
            prev = e;
        }
    }

    #[test]
    fn stops_are_hit_exactly() {
        let opts = Options {
            stops: vec![0.25, 0.5, 0.75],
            ..Options::default()
        };
        let tr = integrate_span(&oscillator(1.0), 0.0, &[1.0, 0.0], 1.0, &opts).unwrap();
        for s in [0.25, 0.5, 0.75, 1.0] {
            let i = tr.node_at(s).expect("stop missing");
            assert!((tr.state(i)[0] - s.cos()).abs() < 1e-9);
        }
        assert!(tr.times().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn blow_up_is_reported() {
        let sys = |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[0] * y[0];
            Ok(())
        };
        let r = integrate_ivp(&sys, &[1.0], 2.0, Tolerance::default());
        assert!(matches!(
            r,
            Err(Error::StepUnderflow { .. })
                | Err(Error::NonFinite { .. })
                | Err(Error::TooManySteps { .. })
        ));
    }

    #[test]
    fn deterministic() {
        let a = integrate_ivp(&oscillator(2.0), &[1.0, 0.5], 1.0, Tolerance::default()).unwrap();
        let b = integrate_ivp(&oscillator(2.0), &[1.0, 0.5], 1.0, Tolerance::default()).unwrap();
        assert_eq!(a.times(), b.times());
        assert_eq!(a.last_state(), b.last_state());
    }
}
