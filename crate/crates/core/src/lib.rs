//! Constraint-based bounded verification of programs in a small contract
//! language.
//!
//! A program is parsed by [`frontend`], executed symbolically by
//! [`executor`] over constraint stores ([`constraint_ir`]) whose variables
//! are produced by [`renaming`], and every path condition is decided by the
//! [`solver`] stack. [`interp`] and [`brute`] are concrete oracles.

pub mod brute;
pub mod constraint_ir;
pub mod corpus;
pub mod executor;
pub mod frontend;
pub mod generate;
pub mod interp;
pub mod renaming;
pub mod report;
pub mod solver;

pub use constraint_ir::{negate, ConstraintStore, Model};
pub use executor::{explore, step, Configuration, Contract, ExecError, ExecOptions, Tag, VerdictKind, VerificationReport};
pub use interp::{concrete_interpret, Inputs};
pub use brute::brute_force_verify;
pub use frontend::{parse_program, substitute_params, FrontendError, ProgramAst};
pub use renaming::{ArrayRef, Constraint, SolverExpr, VarRef, VersionMap};
pub use solver::{check_cheap, check_complete, entails, SolverConfig, SolverError, Verdict};
