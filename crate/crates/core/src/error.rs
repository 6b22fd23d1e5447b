use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("step size underflow at t = {t:e} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("non-finite state at t = {t:e}")]
    NonFinite { t: f64 },
    #[error("step budget exhausted at t = {t:e}")]
    TooManySteps { t: f64 },
    #[error("quadrature did not converge (estimated error {err:e})")]
    Quadrature { err: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("point ({x1}, {x2}) is outside the field patch")]
    OutOfPatch { x1: f64, x2: f64 },
    #[error("metric degenerates at x1 = {x1}, x2 = {x2} (w = {w})")]
    MetricDegenerate { x1: f64, x2: f64, w: f64 },
    #[error("probe beyond conjugacy: f1(1) = {f1:e}")]
    BeyondConjugacy { f1: f64 },
    #[error("r0 = {r0} exceeds the probe cap {cap} below the conjugate distance")]
    ProbeCap { r0: f64, cap: f64 },
    #[error("no conjugate point before the end of the patch")]
    NoConjugatePoint,
    #[error("extrapolation did not converge (spread {spread:e})")]
    Extrapolation { spread: f64 },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("degenerate boundary formula: |Df1| = {0:e}")]
    DegenerateBoundary(f64),
    #[error("inconsistent constants: {0}")]
    Constants(String),
    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
