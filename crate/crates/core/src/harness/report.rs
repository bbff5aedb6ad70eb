//! Verdicts and the per-scenario report.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::harness::checks::CheckKind;
use crate::harness::config::Regime;
use crate::solver::RunStatus;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
    /// The check could not be evaluated.
    Error,
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::NotApplicable => "N/A",
            Status::Error => "ERROR",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: CheckKind,
    pub status: Status,
    /// The quantity compared against the bound.
    pub measured: Option<f64>,
    pub bound: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: String,
    /// Artifact files holding the underlying series.
    pub data: Vec<String>,
}

impl Verdict {
    pub fn new(check: CheckKind, pass: bool, measured: f64, bound: f64, tolerance: f64, data: &[&str]) -> Self {
        Verdict {
            check,
            status: if pass { Status::Pass } else { Status::Fail },
            measured: Some(measured),
            bound: Some(bound),
            tolerance: Some(tolerance),
            detail: String::new(),
            data: data.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn not_applicable(check: CheckKind, why: impl Into<String>) -> Self {
        Verdict {
            check,
            status: Status::NotApplicable,
            measured: None,
            bound: None,
            tolerance: None,
            detail: why.into(),
            data: Vec::new(),
        }
    }

    pub fn error(check: CheckKind, why: impl Into<String>) -> Self {
        Verdict {
            status: Status::Error,
            ..Self::not_applicable(check, why)
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn passed(&self) -> bool {
        matches!(self.status, Status::Pass | Status::NotApplicable)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub scenario: String,
    pub regime: Regime,
    pub run: RunStatus,
    pub verdicts: Vec<Verdict>,
}

impl TheoremReport {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(Verdict::passed)
    }

    pub fn verdict(&self, check: CheckKind) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.check == check)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let run = match self.run {
            RunStatus::Completed => "completed".to_string(),
            RunStatus::Running => "stopped".to_string(),
            RunStatus::BlewUp { t_detect } => format!("blew up at t = {t_detect}"),
        };
        let _ = writeln!(out, "scenario {} ({}), run {}", self.scenario, self.regime.name(), run);
        let num = |v: Option<f64>| v.map(|x| format!("{x:.6e}")).unwrap_or_else(|| "-".into());
        for v in &self.verdicts {
            let _ = write!(
                out,
                "{:<5} {:<28} measured={} bound={} tol={}",
                v.status.label(),
                v.check.name(),
                num(v.measured),
                num(v.bound),
                num(v.tolerance)
            );
            if !v.detail.is_empty() {
                let _ = write!(out, "  {}", v.detail);
            }
            if !v.data.is_empty() {
                let _ = write!(out, "  [{}]", v.data.join(", "));
            }
            out.push('\n');
        }
        let _ = writeln!(out, "overall: {}", if self.all_pass() { "PASS" } else { "FAIL" });
        out
    }
}
