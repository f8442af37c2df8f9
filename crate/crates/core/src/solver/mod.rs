//! Layered satisfiability checking for constraint stores.
//!
//! Layers are tried cheapest first. [`check_cheap`] runs bounds
//! propagation over the conjunctive atoms plus the difference closure; it
//! can refute a store but never proves one satisfiable. [`check_complete`]
//! adds the disjunctions and searches depth-first, propagating at every
//! node.

mod compile;
mod difference;
pub mod domain;
pub mod propagators;
mod search;

use serde::Serialize;
use thiserror::Error;

use crate::constraint_ir::{negate, nnf, ConstraintStore, Model};
use crate::renaming::Constraint;
use compile::{post, Space, Table};
pub use domain::{Domain, Fail};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Sat(Model),
    Unsat,
    Unknown,
}

impl Verdict {
    pub fn is_unsat(&self) -> bool {
        matches!(self, Verdict::Unsat)
    }

    pub fn model(self) -> Option<Model> {
        match self {
            Verdict::Sat(m) => Some(m),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Layer {
    /// Bounds propagation without search or disjunctions.
    Bounds,
    /// Propagation plus depth-first labeling.
    FiniteDomain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Labeling {
    /// Smallest domain first, values in ascending order.
    SmallestDomainAscending,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolverConfig {
    pub layers: Vec<Layer>,
    /// Every variable ranges over signed `bits`-bit integers.
    pub bits: u32,
    pub labeling: Labeling,
    /// Search nodes allowed per satisfiability call.
    pub node_budget: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            layers: vec![Layer::Bounds, Layer::FiniteDomain],
            bits: 8,
            labeling: Labeling::SmallestDomainAscending,
            node_budget: 10_000_000,
        }
    }
}

impl SolverConfig {
    pub fn with_bits(bits: u32) -> Self {
        SolverConfig {
            bits,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("search budget of {budget} nodes exhausted")]
    Budget { budget: u64 },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    pub nodes: u64,
}

/// Incomplete layer: `Unsat` only if the store is unsatisfiable, otherwise
/// `Unknown`.
pub fn check_cheap(store: &ConstraintStore, cfg: &SolverConfig) -> Verdict {
    cheap(store.constraints(), cfg.bits)
}

fn cheap(cs: &[Constraint], bits: u32) -> Verdict {
    let table = Table::build(cs);
    let mut s = Space::new(&table, bits);
    for c in cs {
        if post(&mut s, &table, &nnf(c)).is_err() {
            return Verdict::Unsat;
        }
    }
    match search::propagate(&mut s, &table) {
        Err(Fail) => Verdict::Unsat,
        Ok(()) => Verdict::Unknown,
    }
}

/// Decide satisfiability of a list of constraints, with search statistics.
pub fn solve(cs: &[Constraint], cfg: &SolverConfig) -> Result<(Verdict, SolveStats), SolverError> {
    let mut stats = SolveStats::default();
    if cfg.layers.contains(&Layer::Bounds) && cheap(cs, cfg.bits).is_unsat() {
        return Ok((Verdict::Unsat, stats));
    }
    let originals: Vec<Constraint> = cs.iter().map(nnf).collect();
    let table = Table::build(&originals);
    let mut root = Space::new(&table, cfg.bits);
    for c in &originals {
        if post(&mut root, &table, c).is_err() {
            stats.nodes = 1;
            return Ok((Verdict::Unsat, stats));
        }
    }
    let mut search = search::Search {
        table: &table,
        originals: &originals,
        budget: cfg.node_budget,
        nodes: 0,
    };
    let found = search.run(root);
    stats.nodes = search.nodes;
    match found? {
        Some(m) => Ok((Verdict::Sat(m), stats)),
        None => Ok((Verdict::Unsat, stats)),
    }
}

/// Complete layer: `Sat` with a verified model, or `Unsat`.
pub fn check_complete(store: &ConstraintStore, cfg: &SolverConfig) -> Result<Verdict, SolverError> {
    solve(store.constraints(), cfg).map(|(v, _)| v)
}

/// `store ⊨ c`, i.e. `store ∧ ¬c` is unsatisfiable.
pub fn entails(store: &ConstraintStore, c: &Constraint, cfg: &SolverConfig) -> Result<bool, SolverError> {
    Ok(check_complete(&store.with(negate(c)), cfg)?.is_unsat())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::renaming::{ArithOp, ArrayRef, RelOp, SolverExpr, VarRef};

    fn v(name: &str, ver: u32) -> SolverExpr {
        SolverExpr::Var(VarRef::new(name, ver))
    }
    fn k(c: i64) -> SolverExpr {
        SolverExpr::Const(c)
    }
    fn cmp(op: RelOp, a: SolverExpr, b: SolverExpr) -> Constraint {
        Constraint::Cmp(op, a, b)
    }

    #[test]
    fn empty_interval_is_unsat_cheaply() {
        let s: ConstraintStore =
            [cmp(RelOp::Ge, v("x", 0), k(5)), cmp(RelOp::Le, v("x", 0), k(3))].into_iter().collect();
        assert_eq!(check_cheap(&s, &SolverConfig::default()), Verdict::Unsat);
    }

    #[test]
    fn pigeonhole_needs_the_complete_layer() {
        let mut s = ConstraintStore::new();
        for n in ["x", "y", "z"] {
            s.post(cmp(RelOp::Ge, v(n, 0), k(1)));
            s.post(cmp(RelOp::Le, v(n, 0), k(2)));
        }
        for (a, b) in [("x", "y"), ("y", "z"), ("x", "z")] {
            s.post(cmp(RelOp::Ne, v(a, 0), v(b, 0)));
        }
        let cfg = SolverConfig::default();
        assert_eq!(check_cheap(&s, &cfg), Verdict::Unknown);
        assert_eq!(check_complete(&s, &cfg).unwrap(), Verdict::Unsat);
    }

    #[test]
    fn cheap_layer_resolves_unit_disjunctions() {
        let either = Constraint::or(vec![cmp(RelOp::Eq, v("x", 0), k(1)), cmp(RelOp::Eq, v("x", 0), k(2))]);
        let s: ConstraintStore = [either, cmp(RelOp::Ge, v("x", 0), k(3))].into_iter().collect();
        assert!(check_cheap(&s, &SolverConfig::default()).is_unsat());
    }

    #[test]
    fn cheap_layer_bounds_products() {
        let sq = SolverExpr::bin(ArithOp::Mul, v("x", 0), v("x", 0));
        let s: ConstraintStore = [cmp(RelOp::Eq, sq, k(2))].into_iter().collect();
        assert!(check_cheap(&s, &SolverConfig::default()).is_unsat());
    }

    #[test]
    fn sat_with_model() {
        let s: ConstraintStore = [
            cmp(RelOp::Ge, v("x", 0), k(0)),
            cmp(RelOp::Le, v("x", 0), k(10)),
            cmp(RelOp::Eq, v("x", 0), k(3)),
        ]
        .into_iter()
        .collect();
        let Verdict::Sat(m) = check_complete(&s, &SolverConfig::default()).unwrap() else {
            panic!()
        };
        assert_eq!(m.scalar("x", 0), Some(3));
    }

    #[test]
    fn entailment_examples() {
        let cfg = SolverConfig::default();
        let fixed: ConstraintStore = [cmp(RelOp::Eq, v("x", 0), k(3))].into_iter().collect();
        let goal = cmp(RelOp::Ge, v("x", 0), k(0));
        assert!(entails(&fixed, &goal, &cfg).unwrap());
        assert!(!entails(&ConstraintStore::new(), &goal, &cfg).unwrap());
    }

    #[test]
    fn sorted_chain_refutes_cheaply() {
        let t = ArrayRef::new("t", 0, 8);
        let mut s: ConstraintStore = (0..7)
            .map(|i| cmp(RelOp::Le, t.cell(i), t.cell(i + 1)))
            .collect();
        s.post(cmp(RelOp::Ne, t.cell(3), v("v", 0)));
        s.post(cmp(RelOp::Le, t.cell(3), v("v", 0)));
        s.post(cmp(RelOp::Eq, t.cell(1), v("v", 0)));
        assert_eq!(check_cheap(&s, &SolverConfig::default()), Verdict::Unsat);
    }

    #[test]
    fn budget_is_a_hard_error() {
        let cfg = SolverConfig {
            node_budget: 3,
            ..SolverConfig::default()
        };
        // pigeonhole over pairwise disequalities needs labeling
        let names = ["a", "b", "c", "d"];
        let mut s = ConstraintStore::new();
        for (i, x) in names.iter().enumerate() {
            s.post(cmp(RelOp::Ge, v(x, 0), k(0)));
            s.post(cmp(RelOp::Le, v(x, 0), k(2)));
            for y in &names[i + 1..] {
                s.post(cmp(RelOp::Ne, v(x, 0), v(y, 0)));
            }
        }
        assert_eq!(check_complete(&s, &cfg), Err(SolverError::Budget { budget: 3 }));
    }
}
