use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::constraint_ir::{ConstraintStore, Model};
use crate::frontend::{Function, Param, SpecExpr, Stmt};
use crate::interp::Inputs;
use crate::renaming::{ConstEnv, RenameError, VersionMap};
use crate::solver::SolverConfig;

/// One nondeterministic choice: the outcome of the test on a line, counted
/// from the `fn` keyword.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Tag {
    pub taken: bool,
    pub line: u32,
}

impl Tag {
    pub fn t(line: u32) -> Tag {
        Tag { taken: true, line }
    }

    pub fn f(line: u32) -> Tag {
        Tag { taken: false, line }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.taken { 'T' } else { 'F' }, self.line)
    }
}

impl std::str::FromStr for Tag {
    type Err = String;

    fn from_str(s: &str) -> Result<Tag, String> {
        let taken = match s.chars().next() {
            Some('T') => true,
            Some('F') => false,
            _ => return Err(format!("bad tag `{s}`")),
        };
        let line = s[1..].parse().map_err(|_| format!("bad tag `{s}`"))?;
        Ok(Tag { taken, line })
    }
}

impl Serialize for Tag {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Tag {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Tag, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// `<T4,F6,T8>`
pub fn format_trace(trace: &[Tag]) -> String {
    let parts: Vec<String> = trace.iter().map(Tag::to_string).collect();
    format!("<{}>", parts.join(","))
}

/// Callee specification used in place of its body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contract {
    pub name: String,
    pub params: Vec<Param>,
    pub requires: SpecExpr,
    pub ensures: SpecExpr,
    /// Array parameters the callee may write.
    pub modifies: Vec<String>,
}

impl From<&Function> for Contract {
    fn from(f: &Function) -> Contract {
        Contract {
            name: f.name.clone(),
            params: f.params.clone(),
            requires: f.precondition(),
            ensures: f.postcondition(),
            modifies: f.modifies.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecOptions {
    pub solver: SolverConfig,
    pub check_overflow: bool,
    /// Decisions allowed on one path.
    pub max_depth: usize,
    /// Worker threads; reports do not depend on it.
    pub jobs: usize,
    /// Keep a witness for every feasible path.
    pub record_paths: bool,
}

impl Default for ExecOptions {
    fn default() -> Self {
        ExecOptions {
            solver: SolverConfig::default(),
            check_overflow: false,
            max_depth: 10_000,
            jobs: 1,
            record_paths: false,
        }
    }
}

impl ExecOptions {
    pub fn with_bits(bits: u32) -> Self {
        ExecOptions {
            solver: SolverConfig::with_bits(bits),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    PartiallyCorrect,
    PostconditionViolation,
    AssertionViolation,
    ContractViolation,
    OverflowViolation,
}

impl VerdictKind {
    pub fn is_violation(self) -> bool {
        self != VerdictKind::PartiallyCorrect
    }

    /// Process exit status of the command-line driver.
    pub fn exit_code(self) -> i32 {
        match self {
            VerdictKind::PartiallyCorrect => 0,
            VerdictKind::PostconditionViolation => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictKind::PartiallyCorrect => "partially correct",
            VerdictKind::PostconditionViolation => "postcondition violation",
            VerdictKind::AssertionViolation => "assertion violation",
            VerdictKind::ContractViolation => "contract violation",
            VerdictKind::OverflowViolation => "overflow violation",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: VerdictKind,
    pub trace: Vec<Tag>,
    /// Line of the failing statement; `None` for the postcondition.
    pub line: Option<u32>,
    /// Version-0 inputs.
    pub witness: Inputs,
    /// Returned value, when the path assigned one.
    pub result: Option<i64>,
    /// Full model of the violating store.
    pub model: Model,
    pub message: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecStats {
    /// Paths that reached the end of the body or a `return`.
    pub complete_paths: u64,
    pub feasible_paths: u64,
    pub infeasible_paths: u64,
    /// Branches cut because their store was refuted.
    pub pruned_paths: u64,
    pub branch_points: u64,
    /// Paths ending in a violation.
    pub violations: u64,
    pub cheap_checks: u64,
    pub complete_checks: u64,
    pub solver_nodes: u64,
}

impl ExecStats {
    pub fn add(&mut self, o: &ExecStats) {
        self.complete_paths += o.complete_paths;
        self.feasible_paths += o.feasible_paths;
        self.infeasible_paths += o.infeasible_paths;
        self.pruned_paths += o.pruned_paths;
        self.branch_points += o.branch_points;
        self.violations += o.violations;
        self.cheap_checks += o.cheap_checks;
        self.complete_checks += o.complete_checks;
        self.solver_nodes += o.solver_nodes;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathRecord {
    pub trace: Vec<Tag>,
    pub inputs: Inputs,
    pub result: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub program: String,
    pub verdict: VerdictKind,
    pub violation: Option<Violation>,
    /// Exploration stopped at a resource limit after the violation.
    pub truncated: bool,
    pub stats: ExecStats,
    /// Decision traces of refuted branches, in exploration order.
    pub pruned: Vec<Vec<Tag>>,
    /// Feasible paths, when requested.
    pub paths: Vec<PathRecord>,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ExecError {
    #[error("program has symbolic bounds; bind them with --param")]
    NotConcrete,
    #[error(transparent)]
    Rename(#[from] RenameError),
    #[error("no contract for callee `{0}`")]
    MissingContract(String),
    #[error("call to `{callee}`: {message}")]
    BadCall { callee: String, message: String },
    #[error("path {trace} exceeds the limit of {limit} decisions")]
    DepthLimit { trace: String, limit: usize },
    #[error("solver budget of {budget} nodes exhausted on path {trace}")]
    Budget { trace: String, budget: u64 },
}

impl ExecError {
    pub fn is_resource(&self) -> bool {
        matches!(self, ExecError::DepthLimit { .. } | ExecError::Budget { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Running(Vec<Stmt>),
    Top,
    Bottom,
}

/// `⟨l, σ, c⟩`, `⟨⊤, σ, c⟩` or `⟨⊥, σ, c⟩`, plus the decisions so far.
#[derive(Debug, Clone)]
pub struct Configuration {
    pub status: Status,
    pub sigma: VersionMap,
    pub consts: ConstEnv,
    pub store: ConstraintStore,
    pub trace: Vec<Tag>,
}
