//! Check verdicts and deterministic report rendering.

use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::fixture::Verdict;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "NOT-APPLICABLE")]
    NotApplicable,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::NotApplicable => "NOT-APPLICABLE",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::Pass, witness: None }
    }

    pub fn fail(name: impl Into<String>, witness: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::Fail, witness: Some(witness.into()) }
    }

    pub fn not_applicable(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::NotApplicable, witness: Some(reason.into()) }
    }

    pub fn from_verdict(name: impl Into<String>, v: Verdict) -> Self {
        let status = if v.pass { Status::Pass } else { Status::Fail };
        Check { name: name.into(), status, witness: v.witness }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Pass or not applicable.
    pub fn ok(&self) -> bool {
        self.status != Status::Fail
    }
}

/// A labelled table of `k/N` strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatrixBlock {
    pub label: String,
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub entries: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub command: String,
    pub fixture: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subject: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stamp: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub facts: Vec<(String, String)>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub matrices: Vec<MatrixBlock>,
    pub checks: Vec<Check>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl Report {
    pub fn new(command: impl Into<String>, fixture: impl Into<String>) -> Self {
        Report { command: command.into(), fixture: fixture.into(), ..Default::default() }
    }

    pub fn fact(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.facts.push((key.into(), value.into()));
    }

    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("report serializes") + "\n",
            Format::Csv => self.csv(),
            Format::Text => self.text(),
        }
    }

    fn csv(&self) -> String {
        let mut out = String::new();
        for m in &self.matrices {
            let _ = writeln!(out, "# {}", m.label);
            let _ = writeln!(out, ",{}", m.cols.join(","));
            for (r, row) in m.rows.iter().zip(&m.entries) {
                let _ = writeln!(out, "{},{}", r, row.join(","));
            }
        }
        if !self.facts.is_empty() {
            out.push_str("fact,value\n");
            for (k, v) in &self.facts {
                let _ = writeln!(out, "\"{}\",\"{}\"", k.replace('"', "\"\""), v.replace('"', "\"\""));
            }
        }
        out.push_str("check,status,witness\n");
        for c in &self.checks {
            let w = c.witness.as_deref().unwrap_or("").replace('"', "\"\"");
            let _ = writeln!(out, "\"{}\",{},\"{}\"", c.name, c.status, w);
        }
        out
    }

    fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} on {}", self.command, self.fixture);
        if let Some(s) = &self.subject {
            let _ = writeln!(out, "subject: {s}");
        }
        if let Some(s) = &self.stamp {
            let _ = writeln!(out, "*** {s} ***");
        }
        for (k, v) in &self.facts {
            let _ = writeln!(out, "{k}: {v}");
        }
        for m in &self.matrices {
            let _ = writeln!(out, "\n{} ({} x {})", m.label, m.rows.len(), m.cols.len());
            let width = m.entries.iter().flatten().map(String::len).chain(m.cols.iter().map(String::len)).max().unwrap_or(1);
            let rw = m.rows.iter().map(String::len).max().unwrap_or(0);
            let _ = write!(out, "{:rw$}", "");
            for c in &m.cols {
                let _ = write!(out, "  {c:>width$}");
            }
            out.push('\n');
            for (r, row) in m.rows.iter().zip(&m.entries) {
                let _ = write!(out, "{r:rw$}");
                for e in row {
                    let _ = write!(out, "  {e:>width$}");
                }
                out.push('\n');
            }
        }
        if !self.checks.is_empty() {
            out.push('\n');
        }
        for c in &self.checks {
            match &c.witness {
                Some(w) => {
                    let _ = writeln!(out, "[{}] {}: {}", c.status, c.name, w);
                }
                None => {
                    let _ = writeln!(out, "[{}] {}", c.status, c.name);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_are_stable() {
        let mut r = Report::new("ctp", "dbl4");
        r.matrices.push(MatrixBlock {
            label: "pairing".into(),
            rows: vec!["phi0".into()],
            cols: vec!["psi0".into()],
            entries: vec![vec!["2/4".into()]],
        });
        r.checks.push(Check::pass("duality identity"));
        r.checks.push(Check::fail("kernel", "x=[1]"));
        assert!(r.failed());
        for f in [Format::Json, Format::Csv, Format::Text] {
            assert_eq!(r.render(f), r.clone().render(f));
        }
        assert!(r.render(Format::Csv).contains("phi0,2/4"));
        assert!(r.render(Format::Text).contains("[FAIL] kernel: x=[1]"));
    }
}
