use super::Jet;
use crate::{Error, Result};

/// Natural cubic spline through `(x_i, y_i)`.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        let n = x.len();
        if n < 3 || y.len() != n {
            return Err(Error::Invalid("spline needs at least three points".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Invalid(
                "spline abscissae must be strictly increasing".into(),
            ));
        }
        let mut m = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            let a = h0 / 6.0;
            let b = (h0 + h1) / 3.0;
            let cc = h1 / 6.0;
            let r = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
            let denom = b - a * c[i - 1];
            c[i] = cc / denom;
            d[i] = (r - a * d[i - 1]) / denom;
        }
        for i in (1..n - 1).rev() {
            m[i] = d[i] - c[i] * m[i + 1];
        }
        Ok(CubicSpline {
            x: x.to_vec(),
            y: y.to_vec(),
            m,
        })
    }

    /// Value, first and second derivative at `t` (linear extension of the
    /// end cubics outside the knots is not provided; `t` is clamped).
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        let n = self.x.len();
        let t = t.clamp(self.x[0], self.x[n - 1]);
        let i = match self.x.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => i.min(n - 2),
            Err(i) => (i - 1).min(n - 2),
        };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let v = a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d1 = (self.y[i + 1] - self.y[i]) / h
            + (-(3.0 * a * a - 1.0) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0;
        let d2 = a * m0 + b * m1;
        (v, d1, d2)
    }
}

/// Tensor-product natural cubic spline of `K` on a rectangular grid.
#[derive(Debug, Clone)]
pub struct BicubicTable {
    x1: Vec<f64>,
    x2: Vec<f64>,
    rows: Vec<CubicSpline>,
}

impl BicubicTable {
    /// `values[j][i]` is `K(x1[i], x2[j])`.
    pub fn new(x1: Vec<f64>, x2: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() != x2.len() || x2.len() < 3 {
            return Err(Error::Invalid(
                "table needs one row of values per x2 node (at least three)".into(),
            ));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("table values must be finite".into()));
        }
        let rows = values
            .iter()
            .map(|r| CubicSpline::new(&x1, r))
            .collect::<Result<Vec<_>>>()?;
        if x2.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Invalid(
                "x2 nodes must be strictly increasing".into(),
            ));
        }
        Ok(BicubicTable { x1, x2, rows })
    }

    /// Parse the plain-text table format: lines `x1 = …`, `x2 = …`, then one
    /// `k = …` line per `x2` node; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut x1 = None;
        let mut x2 = None;
        let mut rows = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, val) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("table line {}: expected key = values", no + 1))
            })?;
            let nums = val
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|e| Error::Config(format!("table line {}: {e}", no + 1)))
                })
                .collect::<Result<Vec<f64>>>()?;
            match key.trim() {
                "x1" => x1 = Some(nums),
                "x2" => x2 = Some(nums),
                "k" => rows.push(nums),
                other => {
                    return Err(Error::Config(format!(
                        "table line {}: unknown key '{other}'",
                        no + 1
                    )))
                }
            }
        }
        let x1 = x1.ok_or_else(|| Error::Config("table lacks x1 nodes".into()))?;
        let x2 = x2.ok_or_else(|| Error::Config("table lacks x2 nodes".into()))?;
        BicubicTable::new(x1, x2, rows).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn extent(&self) -> (f64, f64, f64, f64) {
        (
            self.x1[0],
            self.x1[self.x1.len() - 1],
            self.x2[0],
            self.x2[self.x2.len() - 1],
        )
    }

    pub fn eval(&self, x1: f64, x2: f64) -> Jet {
        let n = self.rows.len();
        let mut v = Vec::with_capacity(n);
        let mut d = Vec::with_capacity(n);
        let mut dd = Vec::with_capacity(n);
        for r in &self.rows {
            let (a, b, c) = r.eval(x1);
            v.push(a);
            d.push(b);
            dd.push(c);
        }
        let sv = CubicSpline::new(&self.x2, &v).expect("validated nodes");
        let sd = CubicSpline::new(&self.x2, &d).expect("validated nodes");
        let sdd = CubicSpline::new(&self.x2, &dd).expect("validated nodes");
        let (k, d2, d22) = sv.eval(x2);
        let (d1, d12, _) = sd.eval(x2);
        let (d11, _, _) = sdd.eval(x2);
        Jet {
            k,
            d1,
            d2,
            d11,
            d12,
            d22,
        }
    }
}
