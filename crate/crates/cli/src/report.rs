//! Structured results and their JSON and aligned-text renderings.

use std::fmt::Write as _;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Number(f64),
    Flag(bool),
    Text(String),
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Self::Number(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Self::Flag(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Self::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Self::Text(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|value - expected| <= tolerance`.
    Approx,
    /// `value >= expected - tolerance`.
    AtLeast,
    /// `value <= expected`.
    AtMost,
    /// `value < expected`.
    Below,
    Equals,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expected {
    pub relation: Comparison,
    pub value: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quantity {
    pub name: String,
    pub value: Value,
    pub expected: Option<Expected>,
    pub passed: bool,
}

impl Quantity {
    /// Reported without an expected value; always passes.
    pub fn info(name: &str, value: impl Into<Value>) -> Self {
        Self {
            name: name.to_string(),
            value: value.into(),
            expected: None,
            passed: true,
        }
    }

    pub fn approx(name: &str, value: f64, expected: f64, tolerance: f64) -> Self {
        Self::compared(
            name,
            value,
            Comparison::Approx,
            expected,
            Some(tolerance),
            (value - expected).abs() <= tolerance,
        )
    }

    pub fn at_least(name: &str, value: f64, bound: f64, tolerance: f64) -> Self {
        Self::compared(
            name,
            value,
            Comparison::AtLeast,
            bound,
            Some(tolerance),
            value >= bound - tolerance,
        )
    }

    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self::compared(name, value, Comparison::AtMost, bound, None, value <= bound)
    }

    pub fn below(name: &str, value: f64, bound: f64) -> Self {
        Self::compared(name, value, Comparison::Below, bound, None, value < bound)
    }

    pub fn equals(name: &str, value: impl Into<Value>, expected: impl Into<Value>) -> Self {
        let (value, expected) = (value.into(), expected.into());
        Self {
            name: name.to_string(),
            passed: value == expected,
            value,
            expected: Some(Expected {
                relation: Comparison::Equals,
                value: expected,
                tolerance: None,
            }),
        }
    }

    fn compared(
        name: &str,
        value: f64,
        relation: Comparison,
        expected: f64,
        tolerance: Option<f64>,
        passed: bool,
    ) -> Self {
        Self {
            name: name.to_string(),
            value: value.into(),
            expected: Some(Expected {
                relation,
                value: expected.into(),
                tolerance,
            }),
            passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub passed: bool,
    pub quantities: Vec<Quantity>,
    /// File names of CSV artifacts, relative to the output directory.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub artifacts: Vec<String>,
}

impl CheckReport {
    pub fn new(check: &str, quantities: Vec<Quantity>) -> Self {
        Self {
            check: check.to_string(),
            passed: quantities.iter().all(|q| q.passed),
            quantities,
            artifacts: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::Error => "ERROR",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub name: String,
    pub description: String,
    pub model: String,
    pub coupling: f64,
    pub hbar: f64,
    pub seed: u64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub checks: Vec<CheckReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchReport {
    pub scenarios: Vec<ScenarioReport>,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

impl BatchReport {
    /// Sorts by scenario name and tallies outcomes.
    pub fn new(mut scenarios: Vec<ScenarioReport>) -> Self {
        scenarios.sort_by(|a, b| a.name.cmp(&b.name));
        let count = |s: Status| scenarios.iter().filter(|r| r.status == s).count();
        Self {
            passed: count(Status::Pass),
            failed: count(Status::Fail),
            errors: count(Status::Error),
            scenarios,
        }
    }

    /// 0 when everything passed, 1 when a check failed, 2 on any error.
    pub fn exit_code(&self) -> i32 {
        if self.errors > 0 {
            2
        } else if self.failed > 0 {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports contain only plain data");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for sc in &self.scenarios {
            render_scenario(&mut out, sc);
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "{} scenario(s): {} passed, {} failed, {} errors",
            self.scenarios.len(),
            self.passed,
            self.failed,
            self.errors
        );
        out
    }
}

fn render_scenario(out: &mut String, sc: &ScenarioReport) {
    let _ = writeln!(out, "== {} [{}]", sc.name, sc.status.label());
    if !sc.description.is_empty() {
        let _ = writeln!(out, "   {}", sc.description);
    }
    let _ = writeln!(
        out,
        "   model {}, K = {}, hbar = {}, seed = {}",
        sc.model,
        number(sc.coupling),
        number(sc.hbar),
        sc.seed
    );
    if let Some(e) = &sc.error {
        let _ = writeln!(out, "   error: {e}");
    }
    let header = ["check", "quantity", "value", "expected", "result"].map(String::from);
    let mut rows = vec![header];
    for check in &sc.checks {
        for (i, q) in check.quantities.iter().enumerate() {
            let label = if i == 0 { check.check.clone() } else { String::new() };
            let result = match (&q.expected, q.passed) {
                (None, _) => String::new(),
                (Some(_), true) => "pass".into(),
                (Some(_), false) => "FAIL".into(),
            };
            rows.push([label, q.name.clone(), value(&q.value), expectation(q.expected.as_ref()), result]);
        }
    }
    let artifacts: Vec<&str> = sc.checks.iter().flat_map(|c| c.artifacts.iter().map(String::as_str)).collect();
    if rows.len() > 1 {
        render_table(out, &rows);
    }
    if !artifacts.is_empty() {
        let _ = writeln!(out, "   artifacts: {}", artifacts.join(", "));
    }
}

fn render_table(out: &mut String, rows: &[[String; 5]]) {
    let mut widths = [0usize; 5];
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    for row in rows {
        let mut line = String::from("   ");
        for (i, (cell, w)) in row.iter().zip(widths).enumerate() {
            if i + 1 == row.len() {
                line.push_str(cell);
            } else {
                let _ = write!(line, "{cell:<w$}  ");
            }
        }
        let _ = writeln!(out, "{}", line.trim_end());
    }
}

/// Fixed-point for moderate magnitudes, scientific otherwise.
pub fn number(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    let a = v.abs();
    if a == 0.0 {
        "0".into()
    } else if (1e-3..1e6).contains(&a) {
        let s = format!("{v:.12}");
        let s = s.trim_end_matches('0');
        s.trim_end_matches('.').to_string()
    } else {
        let s = format!("{v:.6e}");
        let (mantissa, exponent) = s.split_once('e').expect("scientific format has an exponent");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{exponent}")
    }
}

fn value(v: &Value) -> String {
    match v {
        Value::Number(x) => number(*x),
        Value::Flag(b) => b.to_string(),
        Value::Text(t) => t.clone(),
    }
}

fn expectation(e: Option<&Expected>) -> String {
    let Some(e) = e else {
        return String::new();
    };
    let v = value(&e.value);
    match (e.relation, e.tolerance) {
        (Comparison::Approx, Some(t)) => format!("{v} +/- {}", number(t)),
        (Comparison::Approx, None) => format!("~ {v}"),
        (Comparison::AtLeast, Some(t)) => format!(">= {v} - {}", number(t)),
        (Comparison::AtLeast, None) => format!(">= {v}"),
        (Comparison::AtMost, _) => format!("<= {v}"),
        (Comparison::Below, _) => format!("< {v}"),
        (Comparison::Equals, _) => format!("= {v}"),
    }
}
