use super::{integrate_gk, integrate_span, Options, Tolerance};
use crate::{Error, Result};

/// The problem `ü + ω²u = f(t)`, `u(0) = u̇(0) = 0`, on `[0, 1]`.
pub struct ForcedOscillator<F> {
    omega: f64,
    forcing: F,
}

impl<F: Fn(f64) -> f64> ForcedOscillator<F> {
    pub fn new(omega: f64, forcing: F) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::Invalid(format!(
                "omega must be positive, got {omega}"
            )));
        }
        Ok(ForcedOscillator { omega, forcing })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn forcing(&self, t: f64) -> f64 {
        (self.forcing)(t)
    }
}

/// Absolute tolerance of the quadrature behind [`solution_map`].
pub const QUAD_ABS_TOL: f64 = 1e-12;

/// `𝒮_ω(f)(t) = ∫₀ᵗ sin(ω(t−τ))/ω · f(τ) dτ` by adaptive quadrature.
pub fn solution_map<F: Fn(f64) -> f64>(spec: &ForcedOscillator<F>, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    let w = spec.omega;
    let q = integrate_gk(
        |tau| (w * (t - tau)).sin() / w * spec.forcing(tau),
        0.0,
        t,
        QUAD_ABS_TOL,
        1e-14,
    )?;
    Ok(q.value)
}

/// The same quantity by integrating the initial-value problem.
pub fn solution_map_ivp<F: Fn(f64) -> f64>(
    spec: &ForcedOscillator<F>,
    t: f64,
    tol: Tolerance,
) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    let w2 = spec.omega * spec.omega;
    let sys = |s: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = y[1];
        dy[1] = spec.forcing(s) - w2 * y[0];
        Ok(())
    };
    let tr = integrate_span(&sys, 0.0, &[0.0, 0.0], t, &Options::with_tol(tol))?;
    Ok(tr.last_state()[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_forcing() {
        let s = ForcedOscillator::new(1.0, |_| 0.0).unwrap();
        assert_eq!(solution_map(&s, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn linear_forcing_closed_form() {
        let s = ForcedOscillator::new(1.0, |t| t).unwrap();
        let v = solution_map(&s, 1.0).unwrap();
        assert!((v - (1.0 - 1f64.sin())).abs() < 1e-12);
    }

    #[test]
    fn quadratic_forcing_closed_form() {
        let s = ForcedOscillator::new(2.0, |t| t * t).unwrap();
        let v = solution_map(&s, 1.0).unwrap();
        let want = (4.0 + 2.0 * 2f64.cos() - 2.0) / 16.0;
        assert!((v - want).abs() < 1e-12, "{v} vs {want}");
    }

    #[test]
    fn agrees_with_ivp() {
        let s = ForcedOscillator::new(2.7, |t: f64| (3.0 * t).cos() + t * t).unwrap();
        let tol = Tolerance::default();
        for &t in &[0.2, 0.5, 1.0] {
            let a = solution_map(&s, t).unwrap();
            let b = solution_map_ivp(&s, t, tol).unwrap();
            assert!(
                (a - b).abs() < 10.0 * tol.rel * 1f64.max(a.abs()),
                "{a} vs {b}"
            );
        }
    }

    #[test]
    fn omega_must_be_positive() {
        assert!(ForcedOscillator::new(0.0, |t| t).is_err());
        assert!(ForcedOscillator::new(-1.0, |t| t).is_err());
    }
}
