use std::fmt::Write as _;

use serde::Serialize;

use crate::classify::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub paper: String,
    /// Normalized; zero when skipped.
    pub max_residual: f64,
    pub tol: f64,
    pub verdict: Verdict,
    /// Points at which the check was asserted.
    pub points: usize,
    pub max_abs_residual: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub gated_on: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisRecord {
    pub id: String,
    pub paper: String,
    pub max_residual: f64,
    pub max_abs_residual: f64,
    pub tol: f64,
    pub met_points: usize,
    pub points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub canonical_abs_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub suite: String,
    pub structure: String,
    pub seed: u64,
    pub tol: Tolerances,
    pub checks: Vec<CheckRecord>,
    pub hypotheses: Vec<HypothesisRecord>,
    /// Unix seconds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl CheckReport {
    pub fn empty(suite: &str, structure: &str, seed: u64, tol: Tolerances) -> Self {
        Self {
            suite: suite.into(),
            structure: structure.into(),
            seed,
            tol,
            checks: Vec::new(),
            hypotheses: Vec::new(),
            timestamp: None,
        }
    }

    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.verdict == Verdict::Fail)
    }

    pub fn check(&self, id: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn hypothesis(&self, id: &str) -> Option<&HypothesisRecord> {
        self.hypotheses.iter().find(|h| h.id == id)
    }

    /// Append another report's checks; hypotheses already present are kept.
    pub fn merge(&mut self, other: CheckReport) {
        self.checks.extend(other.checks);
        for h in other.hypotheses {
            if self.hypothesis(&h.id).is_none() {
                self.hypotheses.push(h);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
}

fn sci(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.3e}")
    }
}

/// Serialize a report. JSON field order is fixed by the struct layout.
pub fn emit_report(r: &CheckReport, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(r).expect("reports always serialize");
            s.push('\n');
            s.into_bytes()
        }
        ReportFormat::Text => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "suite {}  structure {}  seed {}  tol algebraic={:e} deriv={:e} curvature={:e}",
                r.suite, r.structure, r.seed, r.tol.algebraic, r.tol.deriv, r.tol.curvature
            );
            if let Some(t) = r.timestamp {
                let _ = writeln!(s, "timestamp {t}");
            }
            let _ = writeln!(
                s,
                "{:<24} {:<26} {:>11} {:>11} {:>9} {:>7}",
                "check", "paper", "residual", "tol", "verdict", "points"
            );
            for c in &r.checks {
                let _ = writeln!(
                    s,
                    "{:<24} {:<26} {:>11} {:>11} {:>9} {:>7}",
                    c.id,
                    c.paper,
                    sci(c.max_residual),
                    sci(c.tol),
                    c.verdict.as_str(),
                    c.points
                );
            }
            if !r.hypotheses.is_empty() {
                let _ = writeln!(s);
                let _ = writeln!(
                    s,
                    "{:<24} {:<26} {:>11} {:>11} {:>11}",
                    "hypothesis", "paper", "residual", "abs", "met"
                );
                for h in &r.hypotheses {
                    let _ = writeln!(
                        s,
                        "{:<24} {:<26} {:>11} {:>11} {:>7}/{}",
                        h.id,
                        h.paper,
                        sci(h.max_residual),
                        sci(h.max_abs_residual),
                        h.met_points,
                        h.points
                    );
                    if let Some(c) = h.canonical_abs_residual {
                        let _ = writeln!(s, "{:<24} at X = Y = e1: {}", "", sci(c));
                    }
                }
            }
            s.into_bytes()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_is_valid_json() {
        let r = CheckReport::empty("identity", "x", 7, Tolerances::default());
        let bytes = emit_report(&r, ReportFormat::Json);
        let v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(v["checks"], serde_json::json!([]));
        assert_eq!(v["seed"], 7);
        assert!(v.get("timestamp").is_none());
        assert_eq!(bytes, emit_report(&r, ReportFormat::Json));
        let text = String::from_utf8(bytes).unwrap();
        let at: Vec<usize> = ["\"suite\"", "\"structure\"", "\"seed\"", "\"tol\"", "\"checks\""]
            .iter()
            .map(|k| text.find(k).unwrap())
            .collect();
        assert!(at.windows(2).all(|w| w[0] < w[1]));
    }
}
