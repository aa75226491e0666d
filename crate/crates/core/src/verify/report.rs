use std::fmt::Write as _;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseStatus {
    Pass,
    Fail,
    Skipped,
    /// Recorded for reference; no bound is asserted.
    Info,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseRecord {
    pub label: String,
    pub inputs: String,
    pub measured: f64,
    pub bound: f64,
    pub status: CaseStatus,
}

/// A numeric table emitted alongside a report (one row per depth, say).
#[derive(Clone, Debug, Default, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub environment: Vec<(String, String)>,
    pub cases: Vec<CaseRecord>,
    pub table: Option<Table>,
}

/// Decimal with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>) -> Self {
        VerificationReport {
            suite: suite.into(),
            environment: Vec::new(),
            cases: Vec::new(),
            table: None,
        }
    }

    pub fn env(&mut self, key: &str, value: impl ToString) {
        self.environment.push((key.to_string(), value.to_string()));
    }

    /// Record `measured <= bound`.
    pub fn check_le(&mut self, label: impl Into<String>, inputs: impl Into<String>, measured: f64, bound: f64) -> bool {
        let ok = measured <= bound;
        self.push(
            label,
            inputs,
            measured,
            bound,
            if ok { CaseStatus::Pass } else { CaseStatus::Fail },
        );
        ok
    }

    pub fn push(
        &mut self,
        label: impl Into<String>,
        inputs: impl Into<String>,
        measured: f64,
        bound: f64,
        status: CaseStatus,
    ) {
        self.cases.push(CaseRecord {
            label: label.into(),
            inputs: inputs.into(),
            measured,
            bound,
            status,
        });
    }

    pub fn count(&self, status: CaseStatus) -> usize {
        self.cases.iter().filter(|c| c.status == status).count()
    }

    pub fn verdict(&self) -> Verdict {
        if self.count(CaseStatus::Fail) > 0 {
            Verdict::Fail
        } else if self.count(CaseStatus::Pass) == 0 {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        }
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{:<28} {:?}: {} pass, {} fail, {} skipped",
            self.suite,
            self.verdict(),
            self.count(CaseStatus::Pass),
            self.count(CaseStatus::Fail),
            self.count(CaseStatus::Skipped),
        )
    }

    /// Machine-readable case listing; environment lines are `#` comments.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# suite={}", self.suite);
        for (k, v) in &self.environment {
            let _ = writeln!(out, "# {k}={v}");
        }
        let _ = writeln!(out, "# verdict={:?}", self.verdict());
        out.push_str("case,label,inputs,measured,bound,status\n");
        for (n, c) in self.cases.iter().enumerate() {
            let _ = writeln!(
                out,
                "{n},{},{},{},{},{:?}",
                c.label,
                c.inputs.replace(',', ";"),
                fmt_f64(c.measured),
                fmt_f64(c.bound),
                c.status
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_rules() {
        let mut r = VerificationReport::new("t");
        assert_eq!(r.verdict(), Verdict::Inconclusive);
        r.push("a", "", 0.0, 0.0, CaseStatus::Skipped);
        r.push("b", "", 0.0, 0.0, CaseStatus::Info);
        assert_eq!(r.verdict(), Verdict::Inconclusive);
        assert!(r.check_le("c", "", 1.0, 2.0));
        assert_eq!(r.verdict(), Verdict::Pass);
        assert!(!r.check_le("d", "", 3.0, 2.0));
        assert_eq!(r.verdict(), Verdict::Fail);
    }

    #[test]
    fn csv_keeps_measured_and_bound() {
        let mut r = VerificationReport::new("t");
        r.env("seed", 7);
        r.check_le("x", "a,b", 0.5, 1.0);
        let csv = r.to_csv();
        assert!(csv.contains("# seed=7"));
        assert!(csv.contains("0,x,a;b,5.0000000000000000e-1,1.0000000000000000e0,Pass"));
    }
}
