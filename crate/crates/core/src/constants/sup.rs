use crate::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, TAU};

/// Minimum grid size accepted by [`sup_constants`].
pub const MIN_GRID: usize = 100_000;
/// Default number of grid intervals.
pub const DEFAULT_GRID: usize = 1 << 17;
/// Default golden-section tolerance in `τ`.
pub const DEFAULT_REFINE_TOL: f64 = 1e-10;
/// Series switch for integrands that are entire in `τ`.
pub const SERIES_BELOW: f64 = 0.5;
/// Series switch for integrands with `sin τ` in a denominator (radius `π`).
pub const SERIES_BELOW_SIN: f64 = 0.1;

/// Spacing of the fixed lattice used for the final snap (`2⁻³⁶`).
const LATTICE: f64 = 1.0 / 68_719_476_736.0;
const LATTICE_HALF_WIDTH: i64 = 64;

struct Integrand {
    index: usize,
    upper: f64,
    /// Below this `τ` the Maclaurin series is used.
    switch: f64,
    direct: fn(f64) -> f64,
    /// Coefficients of `τ⁰, τ¹, …`.
    series: &'static [f64],
}

fn sin2(t: f64) -> f64 {
    let s = t.sin();
    s * s
}

const INTEGRANDS: [Integrand; 12] = [
    Integrand {
        index: 6,
        upper: TAU,
        switch: SERIES_BELOW,
        direct: |t| (t - t.sin()) / (t * t * t),
        series: &[
            1.0 / 6.0,
            0.0,
            -1.0 / 120.0,
            0.0,
            1.0 / 5040.0,
            0.0,
            -1.0 / 362880.0,
            0.0,
            1.0 / 39916800.0,
            0.0,
            -1.0 / 6227020800.0,
            0.0,
            1.0 / 1307674368000.0,
        ],
    },
    Integrand {
        index: 7,
        upper: TAU,
        switch: SERIES_BELOW,
        direct: |t| (t * t + 2.0 * (t.cos() - 1.0)) / (t * t * t * t),
        series: &[
            1.0 / 12.0,
            0.0,
            -1.0 / 360.0,
            0.0,
            1.0 / 20160.0,
            0.0,
            -1.0 / 1814400.0,
            0.0,
            1.0 / 239500800.0,
            0.0,
            -1.0 / 43589145600.0,
            0.0,
            1.0 / 10461394944000.0,
        ],
    },
    Integrand {
        index: 8,
        upper: TAU,
        switch: SERIES_BELOW,
        direct: |t| (t * t.cos() - t.sin()) / (t * t),
        series: &[
            0.0,
            -1.0 / 3.0,
            0.0,
            1.0 / 30.0,
            0.0,
            -1.0 / 840.0,
            0.0,
            1.0 / 45360.0,
            0.0,
            -1.0 / 3991680.0,
            0.0,
            1.0 / 518918400.0,
            0.0,
            -1.0 / 93405312000.0,
        ],
    },
    Integrand {
        index: 9,
        upper: TAU,
        switch: SERIES_BELOW,
        direct: |t| (t * t.cos() - t.sin()) / (t * t * t),
        series: &[
            -1.0 / 3.0,
            0.0,
            1.0 / 30.0,
            0.0,
            -1.0 / 840.0,
            0.0,
            1.0 / 45360.0,
            0.0,
            -1.0 / 3991680.0,
            0.0,
            1.0 / 518918400.0,
            0.0,
            -1.0 / 93405312000.0,
        ],
    },
    Integrand {
        index: 10,
        upper: TAU,
        switch: SERIES_BELOW,
        direct: |t| (t.cos() * t.sin() - t) / (t * t * t),
        series: &[
            -2.0 / 3.0,
            0.0,
            2.0 / 15.0,
            0.0,
            -4.0 / 315.0,
            0.0,
            2.0 / 2835.0,
            0.0,
            -4.0 / 155925.0,
            0.0,
            4.0 / 6081075.0,
            0.0,
            -8.0 / 638512875.0,
            0.0,
            2.0 / 10854718875.0,
        ],
    },
    Integrand {
        index: 11,
        upper: FRAC_PI_2,
        switch: SERIES_BELOW_SIN,
        direct: |t| {
            (t * t + t * t.cos() * t.sin() - 2.0 * sin2(t)) / (t.powi(5) * sin2(t))
                - 2.0 / (45.0 * t)
        },
        series: &[
            0.0,
            8.0 / 945.0,
            0.0,
            2.0 / 1575.0,
            0.0,
            16.0 / 93555.0,
            0.0,
            2764.0 / 127702575.0,
            0.0,
            16.0 / 6081075.0,
        ],
    },
    Integrand {
        index: 12,
        upper: FRAC_PI_2,
        switch: SERIES_BELOW_SIN,
        direct: |t| {
            2.0 * (t.sin() - t * t.cos()) / (t.powi(3) * t.sin().powi(3))
                - 2.0 / (3.0 * t.powi(3)) * (1.0 + 2.0 * t * t / 5.0)
        },
        series: &[
            0.0,
            4.0 / 63.0,
            0.0,
            8.0 / 675.0,
            0.0,
            4.0 / 2079.0,
            0.0,
            5528.0 / 19348875.0,
            0.0,
            8.0 / 200475.0,
        ],
    },
    Integrand {
        index: 13,
        upper: FRAC_PI_2,
        switch: SERIES_BELOW_SIN,
        direct: |t| {
            2.0 * (t.sin() - t * t.cos()) / (t.powi(5) * t.sin())
                - 2.0 / (3.0 * t.powi(3)) * (1.0 + t * t / 15.0)
        },
        series: &[
            0.0,
            4.0 / 945.0,
            0.0,
            2.0 / 4725.0,
            0.0,
            4.0 / 93555.0,
            0.0,
            2764.0 / 638512875.0,
            0.0,
            8.0 / 18243225.0,
        ],
    },
    Integrand {
        index: 14,
        upper: FRAC_PI_2,
        switch: SERIES_BELOW_SIN,
        direct: |t| {
            4.0 * (sin2(t) - t * t) / (t.powi(5) * sin2(t))
                + 4.0 / (3.0 * t.powi(3)) * (1.0 + t * t / 5.0)
        },
        series: &[
            0.0,
            -8.0 / 189.0,
            0.0,
            -4.0 / 675.0,
            0.0,
            -8.0 / 10395.0,
            0.0,
            -5528.0 / 58046625.0,
            0.0,
            -16.0 / 1403325.0,
        ],
    },
    Integrand {
        index: 15,
        upper: FRAC_PI_2,
        switch: SERIES_BELOW_SIN,
        direct: |t| (t - t.sin()) / (t * t.sin()),
        series: &[
            0.0,
            1.0 / 6.0,
            0.0,
            7.0 / 360.0,
            0.0,
            31.0 / 15120.0,
            0.0,
            127.0 / 604800.0,
            0.0,
            73.0 / 3421440.0,
        ],
    },
    Integrand {
        index: 16,
        upper: FRAC_PI_2,
        switch: SERIES_BELOW_SIN,
        direct: |t| (t * t * t.cos() - sin2(t)) / (t * sin2(t)),
        series: &[
            0.0,
            -1.0 / 6.0,
            0.0,
            -7.0 / 120.0,
            0.0,
            -31.0 / 3024.0,
            0.0,
            -127.0 / 86400.0,
            0.0,
            -73.0 / 380160.0,
        ],
    },
    Integrand {
        index: 17,
        upper: FRAC_PI_2,
        switch: SERIES_BELOW,
        direct: |t| (2.0 * t.cos() - 2.0 + t * t.sin()) / t.powi(6) + 1.0 / (12.0 * t * t),
        series: &[
            1.0 / 180.0,
            0.0,
            -1.0 / 6720.0,
            0.0,
            1.0 / 453600.0,
            0.0,
            -1.0 / 47900160.0,
            0.0,
            1.0 / 7264857600.0,
            0.0,
            -1.0 / 1494484992000.0,
            0.0,
            1.0 / 400148356608000.0,
        ],
    },
];

impl Integrand {
    fn eval(&self, t: f64) -> f64 {
        if t < self.switch {
            self.series.iter().rev().fold(0.0, |acc, &a| acc * t + a)
        } else {
            (self.direct)(t)
        }
    }

    fn abs(&self, t: f64) -> f64 {
        self.eval(t).abs()
    }
}

/// Integrand of `c_i` (`6 ≤ i ≤ 17`) at `τ`, with the series switch applied.
pub fn integrand(i: usize, tau: f64) -> Option<f64> {
    INTEGRANDS
        .iter()
        .find(|g| g.index == i)
        .map(|g| g.eval(tau))
}

/// Interval `[0, b]` of the supremum defining `c_i`.
pub fn sup_interval(i: usize) -> Option<(f64, f64)> {
    INTEGRANDS
        .iter()
        .find(|g| g.index == i)
        .map(|g| (0.0, g.upper))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupResult {
    pub index: usize,
    /// Refined lower bound of the supremum.
    pub value: f64,
    pub argmax: f64,
    /// Best grid value before refinement.
    pub grid_value: f64,
    /// Grid spacing.
    pub spacing: f64,
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

fn sup_one(g: &Integrand, n: usize, refine_tol: f64) -> SupResult {
    let (a, b) = (0.0, g.upper);
    let h = (b - a) / n as f64;
    let node = |i: usize| if i == n { b } else { a + h * i as f64 };
    let (best_i, best) = (0..=n).into_par_iter().map(|i| (i, g.abs(node(i)))).reduce(
        || (usize::MAX, f64::NEG_INFINITY),
        |x, y| {
            if y.1 > x.1 || (y.1 == x.1 && y.0 < x.0) {
                y
            } else {
                x
            }
        },
    );
    let lo = node(best_i.saturating_sub(1));
    let hi = node((best_i + 1).min(n));
    let t_star = golden_max(|t| g.abs(t), lo, hi, refine_tol);
    let k0 = (t_star / LATTICE).round() as i64;
    let (mut value, mut argmax) = (best, node(best_i));
    for k in (k0 - LATTICE_HALF_WIDTH)..=(k0 + LATTICE_HALF_WIDTH) {
        let t = k as f64 * LATTICE;
        if t < a || t > b {
            continue;
        }
        let v = g.abs(t);
        if v > value {
            value = v;
            argmax = t;
        }
    }
    SupResult {
        index: g.index,
        value,
        argmax,
        grid_value: best,
        spacing: h,
    }
}

/// Suprema `c₆ … c₁₇` by grid scan with `n_grid` intervals, golden-section
/// refinement around the best cell and a snap to a fixed lattice.
///
/// Grids with `n` and `4n` intervals are nested and the snap lattice does not
/// depend on the grid, so refinement never lowers a value.
pub fn sup_constants(n_grid: usize, refine_tol: f64) -> Result<Vec<SupResult>> {
    if n_grid < MIN_GRID {
        return Err(Error::Invalid(format!(
            "n_grid must be at least {MIN_GRID}, got {n_grid}"
        )));
    }
    if !(refine_tol > 0.0 && refine_tol <= 1e-6) {
        return Err(Error::Invalid(format!(
            "refine_tol must lie in (0, 1e-6], got {refine_tol}"
        )));
    }
    Ok(INTEGRANDS
        .iter()
        .map(|g| sup_one(g, n_grid, refine_tol))
        .collect())
}
