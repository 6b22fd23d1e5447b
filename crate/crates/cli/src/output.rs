use ccurv_core::verify::BoundCheckReport;
use serde_json::{json, Value};
use std::fmt::Write;

/// Exit codes.
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(usize),
    Text(String),
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Num(x) => sig9(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => x.to_string(),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => {
                format!("\"{}\"", s.replace('"', "\"\""))
            }
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// Result of one subcommand, renderable in every format.
#[derive(Debug, Clone)]
pub struct Output {
    pub json: Value,
    /// Header and rows for text and CSV; text aligns the columns.
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Replaces the CSV rendering of `rows` (scan samples).
    pub csv: Option<String>,
    /// Free text lines printed before the table in text mode.
    pub notes: Vec<String>,
    pub exit: i32,
}

impl Output {
    pub fn new(json: Value) -> Self {
        Output {
            json,
            header: vec!["key", "value"],
            rows: Vec::new(),
            csv: None,
            notes: Vec::new(),
            exit: 0,
        }
    }

    pub fn row(&mut self, key: impl Into<String>, value: impl Into<Cell>) {
        self.rows.push(vec![Cell::Text(key.into()), value.into()]);
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.json).expect("output serializes");
        s.push('\n');
        s
    }

    pub fn render_csv(&self) -> String {
        if let Some(c) = &self.csv {
            return c.clone();
        }
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(Cell::csv).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        for n in &self.notes {
            let _ = writeln!(s, "{n}");
        }
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(Cell::text).collect())
            .collect();
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.len()).collect();
        for r in &cells {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |items: &[String]| -> String {
            let n = items.len();
            let mut out = String::new();
            for (i, (c, w)) in items.iter().zip(&widths).enumerate() {
                out.push_str(c);
                if i + 1 < n {
                    out.push_str(&" ".repeat(w - c.chars().count() + 2));
                }
            }
            out
        };
        if self.header.len() > 2 {
            let h: Vec<String> = self.header.iter().map(|h| h.to_string()).collect();
            let _ = writeln!(s, "{}", line(&h));
        }
        for r in &cells {
            let _ = writeln!(s, "{}", line(r));
        }
        s
    }
}

/// Nine significant digits, fixed notation for moderate magnitudes.
pub fn sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-4..9).contains(&exp) {
        format!("{:.*}", (8 - exp) as usize, x)
    } else {
        sci
    }
}

/// Table of a bound-check report; exit 4 when any family fails.
pub fn bound_report(report: &BoundCheckReport) -> Output {
    let mut o = Output::new(serde_json::to_value(report).expect("report serializes"));
    o.header = vec![
        "id", "lhs", "rhs", "margin", "slack", "count", "failures", "status",
    ];
    for c in &report.checks {
        o.rows.push(vec![
            c.id.clone().into(),
            c.lhs.into(),
            c.rhs.into(),
            c.margin.into(),
            c.slack.into(),
            c.count.into(),
            c.failures.into(),
            if c.pass { "pass" } else { "FAIL" }.into(),
        ]);
    }
    if let Some(eps) = report.epsilon {
        o.notes.push(format!("epsilon {}", sig9(eps)));
    }
    let failed = report.failed().count();
    o.notes.push(format!(
        "{} of {} families pass",
        report.checks.len() - failed,
        report.checks.len()
    ));
    if failed > 0 {
        o.exit = EXIT_VIOLATION;
    }
    o
}

pub fn object(pairs: &[(&str, Value)]) -> Value {
    let mut m = serde_json::Map::new();
    for (k, v) in pairs {
        m.insert(k.to_string(), v.clone());
    }
    Value::Object(m)
}

pub fn num(x: f64) -> Value {
    json!(x)
}
