//! Exhaustive verification by concrete execution of every input.

use std::collections::HashSet;

use thiserror::Error;

use crate::executor::{Tag, VerdictKind};
use crate::frontend::{Function, ProgramAst, Type};
use crate::interp::{concrete_interpret, postcondition_violated, precondition_holds, Inputs, InterpError, InterpOptions, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteOptions {
    pub bits: u32,
    pub check_overflow: bool,
    /// Inclusive range of every input; the full `bits`-bit range if `None`.
    pub range: Option<(i64, i64)>,
    pub max_space: u128,
    pub step_limit: u64,
}

impl Default for BruteOptions {
    fn default() -> Self {
        BruteOptions {
            bits: 4,
            check_overflow: false,
            range: None,
            max_space: 1_000_000,
            step_limit: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteVerdict {
    pub verdict: VerdictKind,
    /// The violating input met first in depth-first order.
    pub witness: Option<Inputs>,
    pub trace: Vec<Tag>,
    /// Inputs satisfying the precondition.
    pub inputs_checked: u64,
    /// Distinct decision traces of runs that reached the end.
    pub feasible_traces: usize,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum BruteError {
    #[error("input space of {size} assignments exceeds the limit of {limit}")]
    SpaceTooLarge { size: u128, limit: u128 },
    #[error(transparent)]
    Interp(#[from] InterpError),
}

/// Position of a run in depth-first exploration order: decisions compare
/// true-first and a prefix comes first, then the statement count.
fn order_key(trace: &[Tag], steps: u64) -> (Vec<bool>, u64) {
    (trace.iter().map(|t| !t.taken).collect(), steps)
}

/// Every input assignment as a flat list of slots: scalars, then cells.
fn slots(f: &Function) -> Vec<(String, Option<usize>)> {
    let mut out = Vec::new();
    for p in &f.params {
        match p.ty {
            Type::Int => out.push((p.name.clone(), None)),
            Type::IntArray(_) => {
                for i in 0..p.ty.len().unwrap_or(0) as usize {
                    out.push((p.name.clone(), Some(i)));
                }
            }
        }
    }
    out
}

/// Enumerate every input (within the range), keep those satisfying the
/// precondition, run each concretely and report the violation that
/// depth-first symbolic exploration would meet first.
pub fn brute_force_verify(ast: &ProgramAst, callees: &[Function], opts: &BruteOptions) -> Result<BruteVerdict, BruteError> {
    let f = &ast.function;
    let half = 1i64 << (opts.bits - 1);
    let (lo, hi) = opts.range.unwrap_or((-half, half - 1));
    let slots = slots(f);
    let width = (hi - lo + 1).max(0) as u128;
    let size = width.checked_pow(slots.len() as u32).unwrap_or(u128::MAX);
    if size > opts.max_space {
        return Err(BruteError::SpaceTooLarge {
            size,
            limit: opts.max_space,
        });
    }
    let iopts = InterpOptions {
        bits: opts.bits,
        check_overflow: opts.check_overflow,
        step_limit: opts.step_limit,
    };
    let mut inputs = Inputs::zeros(f);
    let mut values = vec![lo; slots.len()];
    let mut best: Option<((Vec<bool>, u64), VerdictKind, Inputs, Vec<Tag>)> = None;
    let mut checked = 0;
    let mut traces = HashSet::new();
    for _ in 0..size {
        for ((name, cell), v) in slots.iter().zip(&values) {
            match cell {
                None => {
                    inputs.scalars.insert(name.clone(), *v);
                }
                Some(i) => inputs.arrays.get_mut(name).expect("array input")[*i] = *v,
            }
        }
        if precondition_holds(ast, &inputs) {
            checked += 1;
            let run = concrete_interpret(ast, &inputs, callees, &iopts)?;
            let kind = match run.outcome {
                Outcome::Returned(_) => {
                    traces.insert(run.trace.clone());
                    postcondition_violated(ast, &run).then_some(VerdictKind::PostconditionViolation)
                }
                Outcome::AssertionFailed { .. } => Some(VerdictKind::AssertionViolation),
                Outcome::ContractViolation { .. } => Some(VerdictKind::ContractViolation),
                Outcome::Overflow { .. } => Some(VerdictKind::OverflowViolation),
                Outcome::Infeasible { .. } => None,
            };
            if let Some(kind) = kind {
                let key = order_key(&run.trace, run.steps);
                if best.as_ref().is_none_or(|b| key < b.0) {
                    best = Some((key, kind, inputs.clone(), run.trace));
                }
            }
        }
        // odometer
        for v in values.iter_mut() {
            if *v < hi {
                *v += 1;
                break;
            }
            *v = lo;
        }
    }
    Ok(match best {
        Some((_, kind, witness, trace)) => BruteVerdict {
            verdict: kind,
            witness: Some(witness),
            trace,
            inputs_checked: checked,
            feasible_traces: traces.len(),
        },
        None => BruteVerdict {
            verdict: VerdictKind::PartiallyCorrect,
            witness: None,
            trace: Vec::new(),
            inputs_checked: checked,
            feasible_traces: traces.len(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn tritype_opts() -> BruteOptions {
        BruteOptions {
            bits: 8,
            range: Some((0, 4)),
            ..BruteOptions::default()
        }
    }

    #[test]
    fn correct_tritype_on_small_sides() {
        let ast = corpus::instantiate(corpus::TRITYPE, &[]).unwrap();
        let v = brute_force_verify(&ast, &[], &tritype_opts()).unwrap();
        assert_eq!(v.verdict, VerdictKind::PartiallyCorrect);
        assert_eq!(v.inputs_checked, 125);
    }

    #[test]
    fn buggy_tritype_on_small_sides() {
        let ast = corpus::instantiate(corpus::TRITYPE_BUG, &[]).unwrap();
        let v = brute_force_verify(&ast, &[], &tritype_opts()).unwrap();
        assert_eq!(v.verdict, VerdictKind::PostconditionViolation);
        let bad: Vec<Inputs> = (0..5)
            .flat_map(|i| (0..5).flat_map(move |j| (0..5).map(move |k| (i, j, k))))
            .map(|(i, j, k)| Inputs {
                scalars: [("i", i), ("j", j), ("k", k)].iter().map(|(n, v)| (n.to_string(), *v)).collect(),
                arrays: Default::default(),
            })
            .filter(|inp| {
                let run = concrete_interpret(&ast, inp, &[], &InterpOptions::default()).unwrap();
                postcondition_violated(&ast, &run)
            })
            .collect();
        let triple = |i: &Inputs| (i.scalars["i"], i.scalars["j"], i.scalars["k"]);
        assert!(bad.iter().any(|b| triple(b) == (1, 1, 2)));
        assert!(bad.contains(v.witness.as_ref().unwrap()));
    }

    #[test]
    fn sum_of_squares_three() {
        let (ast, _) = corpus::find("sum_of_squares").unwrap().at(3).unwrap();
        let opts = BruteOptions {
            bits: 8,
            range: Some((0, 3)),
            ..BruteOptions::default()
        };
        let v = brute_force_verify(&ast, &[], &opts).unwrap();
        assert_eq!(v.verdict, VerdictKind::PartiallyCorrect);
        // the six permutations of 1, 2, 3, each summing to 14
        assert_eq!(v.feasible_traces, 1);
        assert_eq!(v.inputs_checked, 6);
    }

    #[test]
    fn refuses_huge_spaces() {
        let (ast, _) = corpus::find("binary_search").unwrap().at(8).unwrap();
        assert!(matches!(
            brute_force_verify(&ast, &[], &BruteOptions::default()),
            Err(BruteError::SpaceTooLarge { .. })
        ));
    }
}
