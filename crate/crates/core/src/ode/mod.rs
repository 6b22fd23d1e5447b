//! Initial-value integration, the forced-oscillator solution map and zero
//! location on dense output.
//!
//! The integrator is the Dormand–Prince 5(4) embedded pair with FSAL and
//! cubic Hermite dense output between accepted steps.

mod dopri;
mod oscillator;
mod quadrature;

pub use dopri::{integrate_ivp, integrate_span, Options};
pub use oscillator::{solution_map, solution_map_ivp, ForcedOscillator};
pub use quadrature::{integrate_gk, Quadrature};

use crate::{Error, Result};

/// Right-hand side of a first-order system `y' = f(t, y)`.
pub trait OdeSystem {
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()>;
}

impl<F> OdeSystem for F
where
    F: Fn(f64, &[f64], &mut [f64]) -> Result<()>,
{
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        self(t, y, dy)
    }
}

/// Relative and absolute error tolerances of the embedded pair.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel: 1e-10,
            abs: 1e-12,
        }
    }
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Result<Self> {
        let ok = |x: f64| x > 0.0 && x <= 1e-2;
        if !ok(rel) || !ok(abs) {
            return Err(Error::Invalid(format!(
                "tolerances must lie in (0, 1e-2], got rel = {rel:e}, abs = {abs:e}"
            )));
        }
        Ok(Tolerance { rel, abs })
    }

    /// Tight tolerances used by the c-curvature evaluators.
    pub fn tight() -> Self {
        Tolerance {
            rel: 1e-12,
            abs: 1e-14,
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Tolerance {
            rel: self.rel * factor,
            abs: self.abs * factor,
        }
    }
}

/// Accepted steps of an integration, with derivatives kept for cubic
/// Hermite interpolation.
#[derive(Debug, Clone)]
pub struct Trajectory {
    dim: usize,
    times: Vec<f64>,
    states: Vec<f64>,
    derivs: Vec<f64>,
    /// Largest normalized local error estimate over accepted steps.
    pub max_error_estimate: f64,
    pub tolerance: Tolerance,
}

impl Trajectory {
    pub(crate) fn new(dim: usize, tolerance: Tolerance) -> Self {
        Trajectory {
            dim,
            times: Vec::new(),
            states: Vec::new(),
            derivs: Vec::new(),
            max_error_estimate: 0.0,
            tolerance,
        }
    }

    pub(crate) fn push(&mut self, t: f64, y: &[f64], dy: &[f64]) {
        self.times.push(t);
        self.states.extend_from_slice(y);
        self.derivs.extend_from_slice(dy);
    }

    /// Build a trajectory from samples of a known function (values and
    /// derivatives), e.g. to test zero finding.
    pub fn from_samples(
        times: Vec<f64>,
        states: Vec<Vec<f64>>,
        derivs: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if times.is_empty() || times.len() != states.len() || times.len() != derivs.len() {
            return Err(Error::Invalid(
                "sample arrays must be non-empty and of equal length".into(),
            ));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Invalid(
                "sample times must be strictly increasing".into(),
            ));
        }
        let dim = states[0].len();
        let mut tr = Trajectory::new(dim, Tolerance::default());
        for ((t, y), dy) in times.iter().zip(&states).zip(&derivs) {
            if y.len() != dim || dy.len() != dim {
                return Err(Error::Invalid("inconsistent state dimension".into()));
            }
            tr.push(*t, y, dy);
        }
        Ok(tr)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i * self.dim..(i + 1) * self.dim]
    }

    pub fn deriv(&self, i: usize) -> &[f64] {
        &self.derivs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn last_state(&self) -> &[f64] {
        self.state(self.len() - 1)
    }

    pub fn t_start(&self) -> f64 {
        self.times[0]
    }

    pub fn t_end(&self) -> f64 {
        self.times[self.len() - 1]
    }

    /// Index of the node whose time equals `t` exactly, if any.
    pub fn node_at(&self, t: f64) -> Option<usize> {
        self.times.binary_search_by(|x| x.total_cmp(&t)).ok()
    }

    fn segment(&self, t: f64) -> usize {
        match self.times.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(i) => i.min(self.len().saturating_sub(2)),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.len().saturating_sub(2)),
        }
    }

    /// Cubic Hermite interpolation of one component.
    pub fn component_at(&self, t: f64, c: usize) -> f64 {
        if self.len() == 1 {
            return self.state(0)[c];
        }
        let i = self.segment(t);
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (y0, y1) = (self.state(i)[c], self.state(i + 1)[c]);
        let (d0, d1) = (self.deriv(i)[c], self.deriv(i + 1)[c]);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
    }

    /// Cubic Hermite interpolation of the full state.
    pub fn state_at(&self, t: f64) -> Vec<f64> {
        (0..self.dim).map(|c| self.component_at(t, c)).collect()
    }
}

/// Default exclusion window for [`first_zero`].
pub const T_EXCLUDE: f64 = 1e-6;
/// Default residual target for [`first_zero`].
pub const ZERO_TOL: f64 = 1e-12;

/// First sign change of `component` after [`T_EXCLUDE`], refined by bisection
/// on the dense output.
pub fn first_zero(traj: &Trajectory, component: usize) -> Option<f64> {
    first_zero_with(traj, component, T_EXCLUDE, ZERO_TOL)
}

pub fn first_zero_with(
    traj: &Trajectory,
    component: usize,
    t_exclude: f64,
    zero_tol: f64,
) -> Option<f64> {
    let (lo, hi) = zero_bracket(traj, component, t_exclude)?;
    Some(refine_on(
        |t| traj.component_at(t, component),
        lo,
        hi,
        zero_tol,
    ))
}

/// Bracket `[t_lo, t_hi]` around the first sign change after `t_exclude`.
pub fn zero_bracket(traj: &Trajectory, component: usize, t_exclude: f64) -> Option<(f64, f64)> {
    if component >= traj.dim() || traj.len() < 2 || traj.t_end() <= t_exclude {
        return None;
    }
    let start = t_exclude.max(traj.t_start());
    let s0 = traj.component_at(start, component);
    if s0 == 0.0 {
        return None;
    }
    let sign = s0.signum();
    let mut prev = start;
    for (i, &t) in traj.times().iter().enumerate() {
        if t <= start {
            continue;
        }
        let v = traj.state(i)[component];
        if v == 0.0 {
            return Some((prev, t));
        }
        if v.signum() != sign {
            return Some((prev, t));
        }
        prev = t;
    }
    None
}

/// Bisection on a scalar function with a sign change on `[lo, hi]`.
pub fn refine_on<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, zero_tol: f64) -> f64 {
    let sign_lo = f(lo).signum();
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let v = f(mid);
        if v == 0.0 {
            return mid;
        }
        if v.abs() <= zero_tol && (hi - lo) <= 1e-12 * hi.abs().max(1.0) {
            return mid;
        }
        if (hi - lo) <= 4.0 * f64::EPSILON * hi.abs().max(1.0) {
            return mid;
        }
        if v.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    mid
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sampled(
        f: impl Fn(f64) -> f64,
        df: impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        n: usize,
    ) -> Trajectory {
        let times: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
        let states = times.iter().map(|&t| vec![f(t)]).collect();
        let derivs = times.iter().map(|&t| vec![df(t)]).collect();
        Trajectory::from_samples(times, states, derivs).unwrap()
    }

    #[test]
    fn zero_of_sampled_sine() {
        let tr = sampled(|t| (PI * t).sin(), |t| PI * (PI * t).cos(), 0.0, 1.5, 1500);
        let z = first_zero(&tr, 0).unwrap();
        assert!((z - 1.0).abs() < 1e-10, "{z}");
    }

    #[test]
    fn no_zero_for_positive_function() {
        let tr = sampled(|t| 1.0 + t, |_| 1.0, 0.0, 1.0, 50);
        assert!(first_zero(&tr, 0).is_none());
    }

    #[test]
    fn zero_of_cosine_from_integration() {
        let sys = |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
            Ok(())
        };
        let opts = Options {
            tol: Tolerance::tight(),
            max_step: 0.002,
            ..Options::default()
        };
        let tr = integrate_span(&sys, 0.0, &[1.0, 0.0], 3.0, &opts).unwrap();
        let z = first_zero(&tr, 0).unwrap();
        assert!((z - PI / 2.0).abs() < 1e-10, "{z}");
    }

    #[test]
    fn tolerance_validation() {
        assert!(Tolerance::new(1e-10, 1e-12).is_ok());
        assert!(Tolerance::new(0.0, 1e-12).is_err());
        assert!(Tolerance::new(1e-10, 0.1).is_err());
    }

    #[test]
    fn hermite_is_exact_for_cubics() {
        let f = |t: f64| 1.0 - 2.0 * t + 0.5 * t * t * t;
        let df = |t: f64| -2.0 + 1.5 * t * t;
        let tr = sampled(f, df, 0.0, 2.0, 3);
        for k in 0..20 {
            let t = 0.1 * k as f64;
            assert!((tr.component_at(t, 0) - f(t)).abs() < 1e-14);
        }
    }
}
