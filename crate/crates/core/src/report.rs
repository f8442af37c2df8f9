//! Machine-readable verification reports. The schema is described in
//! `docs/report-schema.md`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::executor::{format_trace, ExecOptions, ExecStats, Tag, VerdictKind, VerificationReport};
use crate::interp::Inputs;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationDoc {
    pub kind: VerdictKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<u32>,
    pub message: String,
    pub trace: Vec<Tag>,
    pub witness: Inputs,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub program: String,
    pub params: BTreeMap<String, i64>,
    pub bits: u32,
    pub check_overflow: bool,
    pub verdict: VerdictKind,
    pub exit_code: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violation: Option<ViolationDoc>,
    pub stats: ExecStats,
    pub pruned: Vec<String>,
    /// Only present when timing was requested, so that reports stay
    /// reproducible by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl ReportDocument {
    pub fn new(report: &VerificationReport, params: &BTreeMap<String, i64>, opts: &ExecOptions) -> Self {
        ReportDocument {
            schema_version: SCHEMA_VERSION,
            program: report.program.clone(),
            params: params.clone(),
            bits: opts.solver.bits,
            check_overflow: opts.check_overflow,
            verdict: report.verdict,
            exit_code: report.verdict.exit_code(),
            violation: report.violation.as_ref().map(|v| ViolationDoc {
                kind: v.kind,
                line: v.line,
                message: v.message.clone(),
                trace: v.trace.clone(),
                witness: v.witness.clone(),
                result: v.result,
            }),
            stats: report.stats,
            pruned: report.pruned.iter().map(|t| format_trace(t)).collect(),
            wall_time_ms: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// Human-readable summary.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}: {}", self.program, self.verdict);
        if let Some(v) = &self.violation {
            match v.line {
                Some(l) => {
                    let _ = writeln!(out, "  at line {l}: {}", v.message);
                }
                None => {
                    let _ = writeln!(out, "  {}", v.message);
                }
            }
            let _ = writeln!(out, "  trace: {}", format_trace(&v.trace));
            let _ = writeln!(out, "  witness:");
            for (n, x) in &v.witness.scalars {
                let _ = writeln!(out, "    {n} = {x}");
            }
            for (n, cells) in &v.witness.arrays {
                let _ = writeln!(out, "    {n} = {cells:?}");
            }
            if let Some(r) = v.result {
                let _ = writeln!(out, "    result = {r}");
            }
        }
        let s = &self.stats;
        let _ = writeln!(
            out,
            "  paths: {} complete ({} feasible), {} pruned",
            s.complete_paths, s.feasible_paths, s.pruned_paths
        );
        let _ = writeln!(
            out,
            "  solver: {} cheap checks, {} complete checks, {} search nodes",
            s.cheap_checks, s.complete_checks, s.solver_nodes
        );
        if let Some(ms) = self.wall_time_ms {
            let _ = writeln!(out, "  time: {ms:.1} ms");
        }
        out
    }
}
