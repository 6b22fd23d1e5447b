//! Gauss curvature fields given in the Fermi chart of the probe axis
//! `x¹ = 0`, reconstruction of the metric `dx¹² + G dx²²`, and the sampled
//! C² norm `|K − 1|_{C²}`.

mod config;
mod metric;
mod spline;

pub use config::FieldConfig;
pub use metric::{c2_norm_estimate, metric_column, reconstruct_metric, FermiMetricSample, W_MIN};
pub use spline::{BicubicTable, CubicSpline};

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Field families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Constant,
    CosineBump,
    ProductWave,
    UserTable,
}

impl Family {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "constant" => Ok(Family::Constant),
            "cosine-bump" => Ok(Family::CosineBump),
            "product-wave" => Ok(Family::ProductWave),
            "user-table" => Ok(Family::UserTable),
            other => Err(Error::Config(format!("unknown family '{other}'"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Constant => "constant",
            Family::CosineBump => "cosine-bump",
            Family::ProductWave => "product-wave",
            Family::UserTable => "user-table",
        }
    }
}

/// Rectangle `|x¹| ≤ x1_max`, `x2_min ≤ x² ≤ x2_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Patch {
    pub x1_max: f64,
    pub x2_min: f64,
    pub x2_max: f64,
}

impl Default for Patch {
    fn default() -> Self {
        Patch {
            x1_max: 1.2,
            x2_min: -0.2,
            x2_max: PI + 0.2,
        }
    }
}

impl Patch {
    pub fn contains(&self, x1: f64, x2: f64) -> bool {
        let slack = 1e-12;
        x1.abs() <= self.x1_max + slack && x2 >= self.x2_min - slack && x2 <= self.x2_max + slack
    }
}

/// `K` and its first and second coordinate derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Jet {
    pub k: f64,
    pub d1: f64,
    pub d2: f64,
    pub d11: f64,
    pub d12: f64,
    pub d22: f64,
}

/// Wave vector and phase of the perturbed families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveParams {
    pub wave1: f64,
    pub wave2: f64,
    pub phase: f64,
}

impl Default for WaveParams {
    fn default() -> Self {
        WaveParams {
            wave1: 1.0,
            wave2: 1.0,
            phase: 0.0,
        }
    }
}

/// An immutable curvature field on a patch.
///
/// Perturbed families have the form `K = 1 + amplitude·(1 + p(x))/2` with
/// `|p| ≤ 1`, so `min K = 1` holds by construction.
#[derive(Debug, Clone)]
pub struct CurvatureField {
    family: Family,
    kappa0: f64,
    amplitude: f64,
    params: WaveParams,
    patch: Patch,
    table: Option<Arc<BicubicTable>>,
    flat: bool,
}

const MAX_AMPLITUDE: f64 = 0.1;
const MAX_WAVE: f64 = 10.0;
const MAX_KAPPA: f64 = 16.0;

impl CurvatureField {
    /// `K ≡ kappa` with `1 ≤ kappa ≤ 16`.
    pub fn constant(kappa: f64) -> Result<Self> {
        if !(1.0..=MAX_KAPPA).contains(&kappa) {
            return Err(Error::Invalid(format!(
                "constant curvature must lie in [1, {MAX_KAPPA}], got {kappa}"
            )));
        }
        Ok(CurvatureField {
            family: Family::Constant,
            kappa0: kappa,
            amplitude: 0.0,
            params: WaveParams::default(),
            patch: Patch::default(),
            table: None,
            flat: false,
        })
    }

    /// The flat field `K ≡ 0`, for validating the metric and geodesic code only.
    pub fn flat_for_validation() -> Self {
        CurvatureField {
            family: Family::Constant,
            kappa0: 0.0,
            amplitude: 0.0,
            params: WaveParams::default(),
            patch: Patch::default(),
            table: None,
            flat: true,
        }
    }

    fn perturbed(family: Family, amplitude: f64, params: WaveParams) -> Result<Self> {
        if !(0.0..=MAX_AMPLITUDE).contains(&amplitude) {
            return Err(Error::Invalid(format!(
                "amplitude must lie in [0, {MAX_AMPLITUDE}], got {amplitude}"
            )));
        }
        if params.wave1.abs() > MAX_WAVE
            || params.wave2.abs() > MAX_WAVE
            || !params.phase.is_finite()
        {
            return Err(Error::Invalid(format!(
                "wave numbers must be finite with |k| ≤ {MAX_WAVE}"
            )));
        }
        let mut f = CurvatureField {
            family,
            kappa0: 1.0,
            amplitude,
            params,
            patch: Patch::default(),
            table: None,
            flat: false,
        };
        f.kappa0 = f.eval(0.0, 0.0).k;
        f.check_min_k()?;
        Ok(f)
    }

    /// `p = cos(k₁x¹ + k₂x² + phase)`.
    pub fn cosine_bump(amplitude: f64, params: WaveParams) -> Result<Self> {
        Self::perturbed(Family::CosineBump, amplitude, params)
    }

    /// `p = cos(k₁x¹ + phase)·cos(k₂x²)`.
    pub fn product_wave(amplitude: f64, params: WaveParams) -> Result<Self> {
        Self::perturbed(Family::ProductWave, amplitude, params)
    }

    /// Bicubic-spline interpolation of tabulated values; the patch is the
    /// table extent clipped to the default patch.
    pub fn from_table(table: BicubicTable) -> Result<Self> {
        let (x1_lo, x1_hi, x2_lo, x2_hi) = table.extent();
        if x1_lo > 0.0 || x1_hi < 0.0 || x2_lo > 0.0 || x2_hi < 0.0 {
            return Err(Error::Invalid("table must contain the origin".into()));
        }
        let d = Patch::default();
        let patch = Patch {
            x1_max: x1_hi.min(-x1_lo).min(d.x1_max),
            x2_min: x2_lo.max(d.x2_min),
            x2_max: x2_hi.min(d.x2_max),
        };
        let mut f = CurvatureField {
            family: Family::UserTable,
            kappa0: 1.0,
            amplitude: 0.0,
            params: WaveParams::default(),
            patch,
            table: Some(Arc::new(table)),
            flat: false,
        };
        f.kappa0 = f.eval(0.0, 0.0).k;
        let max = f.sample_extrema(96).1;
        f.amplitude = max - 1.0;
        f.check_min_k()?;
        Ok(f)
    }

    /// Restrict or enlarge the patch on which the field may be evaluated.
    pub fn with_patch(mut self, patch: Patch) -> Self {
        self.patch = patch;
        self
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn kappa0(&self) -> f64 {
        self.kappa0
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn params(&self) -> WaveParams {
        self.params
    }

    pub fn patch(&self) -> Patch {
        self.patch
    }

    pub fn is_flat(&self) -> bool {
        self.flat
    }

    /// True when every derivative of `K` vanishes identically.
    pub fn is_constant(&self) -> bool {
        self.family == Family::Constant || self.amplitude == 0.0 && self.family != Family::UserTable
    }

    /// Short identifier used in reports.
    pub fn id(&self) -> String {
        match self.family {
            Family::Constant => format!("constant(kappa={})", self.kappa0),
            Family::CosineBump | Family::ProductWave => format!(
                "{}(amplitude={}, wave=({}, {}), phase={})",
                self.family.name(),
                self.amplitude,
                self.params.wave1,
                self.params.wave2,
                self.params.phase
            ),
            Family::UserTable => "user-table".to_string(),
        }
    }

    /// Upper bound of `K` on the patch.
    pub fn max_k(&self) -> f64 {
        match self.family {
            Family::Constant => self.kappa0,
            Family::CosineBump | Family::ProductWave => 1.0 + self.amplitude,
            Family::UserTable => 1.0 + self.amplitude,
        }
    }

    /// Lower bound of `K` on the patch.
    pub fn min_k(&self) -> f64 {
        match self.family {
            Family::Constant => self.kappa0,
            _ => 1.0,
        }
    }

    /// Jet at a point of the patch.
    pub fn jet(&self, x1: f64, x2: f64) -> Result<Jet> {
        if !self.patch.contains(x1, x2) || !x1.is_finite() || !x2.is_finite() {
            return Err(Error::OutOfPatch { x1, x2 });
        }
        Ok(self.eval(x1, x2))
    }

    pub fn k(&self, x1: f64, x2: f64) -> Result<f64> {
        self.jet(x1, x2).map(|j| j.k)
    }

    fn eval(&self, x1: f64, x2: f64) -> Jet {
        let a = 0.5 * self.amplitude;
        let WaveParams {
            wave1: k1,
            wave2: k2,
            phase,
        } = self.params;
        match self.family {
            Family::Constant => Jet {
                k: self.kappa0,
                ..Jet::default()
            },
            Family::CosineBump => {
                let th = k1 * x1 + k2 * x2 + phase;
                let (s, c) = th.sin_cos();
                Jet {
                    k: 1.0 + a * (1.0 + c),
                    d1: -a * k1 * s,
                    d2: -a * k2 * s,
                    d11: -a * k1 * k1 * c,
                    d12: -a * k1 * k2 * c,
                    d22: -a * k2 * k2 * c,
                }
            }
            Family::ProductWave => {
                let (sa, ca) = (k1 * x1 + phase).sin_cos();
                let (sb, cb) = (k2 * x2).sin_cos();
                Jet {
                    k: 1.0 + a * (1.0 + ca * cb),
                    d1: -a * k1 * sa * cb,
                    d2: -a * k2 * ca * sb,
                    d11: -a * k1 * k1 * ca * cb,
                    d12: a * k1 * k2 * sa * sb,
                    d22: -a * k2 * k2 * ca * cb,
                }
            }
            Family::UserTable => self.table.as_ref().expect("table field").eval(x1, x2),
        }
    }

    fn sample_extrema(&self, n: usize) -> (f64, f64) {
        let p = self.patch;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..=n {
            let x1 = -p.x1_max + 2.0 * p.x1_max * i as f64 / n as f64;
            for j in 0..=n {
                let x2 = p.x2_min + (p.x2_max - p.x2_min) * j as f64 / n as f64;
                let k = self.eval(x1, x2).k;
                lo = lo.min(k);
                hi = hi.max(k);
            }
        }
        (lo, hi)
    }

    fn check_min_k(&self) -> Result<()> {
        let (lo, _) = self.sample_extrema(128);
        if lo < 1.0 - 1e-12 {
            return Err(Error::Invalid(format!(
                "field violates min K = 1 (sampled min {lo})"
            )));
        }
        Ok(())
    }
}

/// Factory used by the CLI and the tests.
pub fn make_field(
    family: Family,
    kappa0: f64,
    amplitude: f64,
    params: WaveParams,
) -> Result<CurvatureField> {
    match family {
        Family::Constant => {
            if amplitude != 0.0 {
                return Err(Error::Invalid("constant family takes amplitude 0".into()));
            }
            CurvatureField::constant(kappa0)
        }
        Family::CosineBump => CurvatureField::cosine_bump(amplitude, params),
        Family::ProductWave => CurvatureField::product_wave(amplitude, params),
        Family::UserTable => Err(Error::Invalid(
            "user-table fields are built from a table file".into(),
        )),
    }
}
