//! Universal constants: the `B_{jka}` recursions, the suprema `c₆ … c₁₇`,
//! the composites `C₁ … C₄`, the smallness-condition chain and the published
//! choices of `η` and `ς`.

mod published;
mod sup;
mod thresholds;

pub use published::{check_paper, PaperCheck, PUBLISHED};
pub use sup::{
    integrand, sup_constants, sup_interval, SupResult, DEFAULT_GRID, DEFAULT_REFINE_TOL, MIN_GRID,
    SERIES_BELOW, SERIES_BELOW_SIN,
};
pub use thresholds::{smallness_thresholds, Chosen, Condition, Parameter, ThresholdReport, DELTA2};

use crate::numeric::sum_compensated;
use crate::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedForm,
    SupremumSearch,
}

/// `B_{jka}` for `j ∈ {1,2,3}`, `k ∈ {0,1,2}`, `a ∈ {0,1}`, plus `c₁ … c₅`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BTable {
    b: [[[f64; 2]; 3]; 3],
    pub c1_5: [f64; 5],
}

impl BTable {
    pub fn get(&self, j: usize, k: usize, a: usize) -> f64 {
        self.b[j - 1][k][a]
    }
}

/// `c₁ … c₅`.
pub fn small_c() -> [f64; 5] {
    let p = PI;
    let c1 = p + 1.0 / p;
    let c2 = 4.0 * sum_compensated([3.0 / (4.0 * p), 1.0 / (p * p), 1.0]);
    let c3 = 1.0 / (2.0 * p) + 2.0 * (1.0 + 1.0 / (p * p)) * (2.0 + p * p);
    let c4 = sum_compensated([5.5, 10.0 * p, 8.0 / p, 2.0 * p * p * p]);
    let c5 = sum_compensated([1.0, 1.0 / (p * p), 2.0 * c1 * c1]);
    [c1, c2, c3, c4, c5]
}

/// The `B_{jka}` recursion in dependency order.
pub fn b_constants() -> BTable {
    let p = PI;
    let p2 = p * p;
    let c = small_c();
    let (c1, c4, c5) = (c[0], c[3], c[4]);
    let mut b = [[[0.0; 2]; 3]; 3];
    b[0][0] = [2.0, 1.0];
    b[1][0] = [1.0, 0.5];
    for a in 0..2 {
        let b10 = b[0][0][a];
        let b20 = b[1][0][a];
        let b21 = sum_compensated([1.0, p2, 2.0 * b20 * (1.0 + p2), b10 * (2.0 + p * SQRT_2)]);
        let b11 = p + (1.0 + b21) / p;
        let b22 = sum_compensated([
            6.0,
            p2 * (4.0 + c5),
            (4.0 * SQRT_2 + p * c4) * p * b10,
            2.0 * SQRT_2 * p2 * b11,
            2.0 * (1.0 + p2) * (b20 + 2.0 * b21),
        ]);
        let b12 = c5 + b22 / p2;
        let b30 = b10 / 4.0 + p / 2.0 * (1.0 + 1.0 / p2);
        let b31 = sum_compensated([
            b10 / 2.0 * (2.0 + p + 1.0 / p),
            b20 * (1.0 + 1.0 / p2),
            b21 / (2.0 * p2),
            (3.0 * p + 1.0) / 2.0 * (1.0 + 1.0 / p2),
        ]);
        let b32 = sum_compensated([
            3.0 * c1,
            (5.0 + 4.0 * c1 + c4) * b10 / 2.0,
            (SQRT_2 + 2.0) * b11,
            b12 / 2.0,
            (1.0 + 1.0 / p2) * (b20 + 2.0 * b21),
        ]);
        b[0][1][a] = b11;
        b[0][2][a] = b12;
        b[1][1][a] = b21;
        b[1][2][a] = b22;
        b[2][0][a] = b30;
        b[2][1][a] = b31;
        b[2][2][a] = b32;
    }
    BTable { b, c1_5: c }
}

/// `C₁ … C₄` and the printed-formula variant of `C₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Composites {
    pub c: [f64; 4],
    /// `C₁` with the maximum over `B₁ₖₐ, B₃ₖₐ` only.
    pub c1_printed: f64,
}

/// `C₁` takes its maximum over `B₁ₖₐ, B₂ₖₐ, B₃ₖₐ` and the `c`-terms.
pub fn composite_constants(b: &BTable, c: &[f64; 18]) -> Composites {
    let p = PI;
    let mut bmax13 = f64::NEG_INFINITY;
    let mut bmax2 = f64::NEG_INFINITY;
    for k in 0..3 {
        for a in 0..2 {
            bmax13 = bmax13.max(b.get(1, k, a)).max(b.get(3, k, a));
            bmax2 = bmax2.max(b.get(2, k, a));
        }
    }
    let ct = [
        8.0 * c[6],
        8.0 * c[7],
        19.0 / 18.0 * c[8],
        10.0 / 9.0 * c[9],
        c[10],
    ];
    let ct_max = ct.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let c1_printed = bmax13.max(ct_max);
    let c1 = c1_printed.max(bmax2);
    let c13 = c1 * c1 * c1;
    let mix = c[15] * c[6] + c[16] * c[7];
    let c67 = (c[6] + c[7]) * c[15];
    let c2 = sum_compensated([338.0 * c13 * p.powi(11) / 8.0, 2.06 * (8.0 * mix + c67)]);
    let c3 = sum_compensated([268.0 * c13 * p.powi(11) / 8.0, 4.11 * (2.0 * mix + c67)]);
    let c4 = sum_compensated([338.0 * p.powi(10) * c13, 20.0 * p * (c[6] + c[7])]);
    Composites {
        c: [c1, c2, c3, c4],
        c1_printed,
    }
}

/// Every constant with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantsTable {
    pub b: BTable,
    /// `c[i]` for `1 ≤ i ≤ 17`; `c[0]` is unused.
    pub c: [f64; 18],
    pub sup: Vec<SupResult>,
    pub composites: Composites,
}

impl ConstantsTable {
    pub fn build(n_grid: usize, refine_tol: f64) -> Result<Self> {
        let b = b_constants();
        let sup = sup_constants(n_grid, refine_tol)?;
        let mut c = [0.0; 18];
        c[1..6].copy_from_slice(&b.c1_5);
        for s in &sup {
            c[s.index] = s.value;
        }
        let composites = composite_constants(&b, &c);
        let t = ConstantsTable {
            b,
            c,
            sup,
            composites,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn default_table() -> Result<Self> {
        Self::build(DEFAULT_GRID, DEFAULT_REFINE_TOL)
    }

    pub fn b(&self, j: usize, k: usize, a: usize) -> f64 {
        self.b.get(j, k, a)
    }

    pub fn cap(&self, i: usize) -> f64 {
        self.composites.c[i - 1]
    }

    /// `B₁₂₀ + 1.5 B₁₂₁ + 2 B₁₁₀ B₁₁₁ + 36/(5π²)`.
    pub fn pinching(&self) -> f64 {
        sum_compensated([
            self.b(1, 2, 0),
            1.5 * self.b(1, 2, 1),
            2.0 * self.b(1, 1, 0) * self.b(1, 1, 1),
            36.0 / (5.0 * PI * PI),
        ])
    }

    /// Entries keyed `B.j.k.a`, `c.i`, `C.i`, in a stable order.
    pub fn entries(&self) -> Vec<(String, f64, Provenance)> {
        let mut out = Vec::new();
        for j in 1..=3 {
            for k in 0..3 {
                for a in 0..2 {
                    out.push((
                        format!("B.{j}.{k}.{a}"),
                        self.b(j, k, a),
                        Provenance::ClosedForm,
                    ));
                }
            }
        }
        for i in 1..=17 {
            let p = if i <= 5 {
                Provenance::ClosedForm
            } else {
                Provenance::SupremumSearch
            };
            out.push((format!("c.{i}"), self.c[i], p));
        }
        for i in 1..=4 {
            out.push((format!("C.{i}"), self.cap(i), Provenance::ClosedForm));
        }
        out.push((
            "C.1.printed".into(),
            self.composites.c1_printed,
            Provenance::ClosedForm,
        ));
        out
    }

    pub fn as_map(&self) -> BTreeMap<String, f64> {
        self.entries().into_iter().map(|(k, v, _)| (k, v)).collect()
    }

    fn validate(&self) -> Result<()> {
        for (k, v, _) in self.entries() {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Constants(format!(
                    "{k} = {v} is not positive and finite"
                )));
            }
        }
        Ok(())
    }
}
