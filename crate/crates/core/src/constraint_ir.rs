//! Constraint stores, models and the constraint-level transformations used
//! by the executor: quantifier expansion and negation.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::frontend::SpecExpr;
use crate::renaming::{
    ArithOp, ArrayRef, Constraint, RelOp, RenameError, Renamer, SolverExpr, VarRef, VersionMap,
};

/// Append-only conjunction of constraints with a checkpoint stack.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstraintStore {
    items: Vec<Constraint>,
    checkpoints: Vec<usize>,
}

impl ConstraintStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn post(&mut self, c: Constraint) {
        self.items.push(c);
    }

    pub fn checkpoint(&mut self) {
        self.checkpoints.push(self.items.len());
    }

    /// Drop everything posted since the matching checkpoint. Rolling back
    /// without a checkpoint is a no-op.
    pub fn rollback(&mut self) {
        if let Some(len) = self.checkpoints.pop() {
            self.items.truncate(len);
        }
    }

    /// Truncate to a previously observed length.
    pub fn truncate(&mut self, len: usize) {
        self.items.truncate(len);
        self.checkpoints.retain(|&c| c <= len);
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.items
    }

    pub fn iter(&self) -> impl Iterator<Item = &Constraint> {
        self.items.iter()
    }

    /// A copy extended with one more constraint.
    pub fn with(&self, c: Constraint) -> ConstraintStore {
        let mut s = ConstraintStore {
            items: self.items.clone(),
            checkpoints: Vec::new(),
        };
        s.post(c);
        s
    }

    /// One constraint per line, in posting order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.items {
            let _ = writeln!(out, "{c}");
        }
        out
    }
}

impl FromIterator<Constraint> for ConstraintStore {
    fn from_iter<I: IntoIterator<Item = Constraint>>(iter: I) -> Self {
        ConstraintStore {
            items: iter.into_iter().collect(),
            checkpoints: Vec::new(),
        }
    }
}

/// Assignment of integers to versioned variables and arrays.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Model {
    pub scalars: BTreeMap<VarRef, i64>,
    pub arrays: BTreeMap<ArrayRef, Vec<i64>>,
}

impl Model {
    pub fn scalar(&self, name: &str, version: u32) -> Option<i64> {
        self.scalars.get(&VarRef::new(name, version)).copied()
    }

    pub fn array(&self, name: &str, version: u32) -> Option<&[i64]> {
        self.arrays
            .iter()
            .find(|(a, _)| &*a.name == name && a.version == version)
            .map(|(_, v)| v.as_slice())
    }

    /// Exact value of an expression; `None` if it reads an unassigned
    /// variable, indexes out of bounds, divides by zero or overflows.
    pub fn eval_expr(&self, e: &SolverExpr) -> Option<i64> {
        eval_expr_with(e, &mut |v| self.scalars.get(v).copied(), &mut |a, i| {
            self.arrays.get(a).and_then(|cells| cells.get(i).copied())
        })
    }

    /// Truth value of a constraint. An atom that mentions an undefined
    /// term is false under either polarity.
    pub fn eval(&self, c: &Constraint) -> bool {
        eval_pol(c, true, &|e| self.eval_expr(e))
    }

    pub fn satisfies_all<'a>(&self, cs: impl IntoIterator<Item = &'a Constraint>) -> bool {
        cs.into_iter().all(|c| self.eval(c))
    }

    /// `name^version = value` lines in deterministic order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (v, x) in &self.scalars {
            let _ = writeln!(out, "{v} = {x}");
        }
        for (a, cells) in &self.arrays {
            let cells: Vec<String> = cells.iter().map(i64::to_string).collect();
            let _ = writeln!(out, "{a} = [{}]", cells.join(", "));
        }
        out
    }
}

pub(crate) fn eval_expr_with(
    e: &SolverExpr,
    var: &mut impl FnMut(&VarRef) -> Option<i64>,
    cell: &mut impl FnMut(&ArrayRef, usize) -> Option<i64>,
) -> Option<i64> {
    match e {
        SolverExpr::Const(c) => Some(*c),
        SolverExpr::Var(v) => var(v),
        SolverExpr::Select(a, idx) => {
            let i = eval_expr_with(idx, var, cell)?;
            if i < 0 || i as usize >= a.len {
                return None;
            }
            cell(a, i as usize)
        }
        SolverExpr::Neg(a) => eval_expr_with(a, var, cell)?.checked_neg(),
        SolverExpr::Bin(op, a, b) => {
            let x = eval_expr_with(a, var, cell)?;
            let y = eval_expr_with(b, var, cell)?;
            op.apply(x, y)
        }
    }
}

pub(crate) fn eval_pol(c: &Constraint, pos: bool, ev: &impl Fn(&SolverExpr) -> Option<i64>) -> bool {
    match c {
        Constraint::True => pos,
        Constraint::False => !pos,
        Constraint::Cmp(op, a, b) => match (ev(a), ev(b)) {
            (Some(x), Some(y)) => {
                let op = if pos { *op } else { op.complement() };
                op.holds(x, y)
            }
            _ => false,
        },
        Constraint::Not(inner) => eval_pol(inner, !pos, ev),
        Constraint::And(cs) => {
            if pos {
                cs.iter().all(|c| eval_pol(c, true, ev))
            } else {
                cs.iter().any(|c| eval_pol(c, false, ev))
            }
        }
        Constraint::Or(cs) => {
            if pos {
                cs.iter().any(|c| eval_pol(c, true, ev))
            } else {
                cs.iter().all(|c| eval_pol(c, false, ev))
            }
        }
        Constraint::Implies(a, b) => {
            if pos {
                eval_pol(a, false, ev) || eval_pol(b, true, ev)
            } else {
                eval_pol(a, true, ev) && eval_pol(b, false, ev)
            }
        }
        Constraint::AllDifferent(es) => {
            let vals: Vec<Option<i64>> = es.iter().map(ev).collect();
            let mut distinct = true;
            let mut some_equal = false;
            for i in 0..vals.len() {
                for j in i + 1..vals.len() {
                    match (vals[i], vals[j]) {
                        (Some(x), Some(y)) if x == y => {
                            distinct = false;
                            some_equal = true;
                        }
                        (Some(_), Some(_)) => {}
                        _ => distinct = false,
                    }
                }
            }
            if pos {
                distinct
            } else {
                some_equal
            }
        }
    }
}

/// Negation pushed to negation-normal form.
pub fn negate(c: &Constraint) -> Constraint {
    nnf_pol(c, false)
}

/// Negation-normal form: no `Not`, no `Implies`.
pub fn nnf(c: &Constraint) -> Constraint {
    nnf_pol(c, true)
}

fn nnf_pol(c: &Constraint, pos: bool) -> Constraint {
    match c {
        Constraint::True => Constraint::from_bool(pos),
        Constraint::False => Constraint::from_bool(!pos),
        Constraint::Cmp(op, a, b) => {
            let op = if pos { *op } else { op.complement() };
            Constraint::Cmp(op, a.clone(), b.clone())
        }
        Constraint::Not(inner) => nnf_pol(inner, !pos),
        Constraint::And(cs) => {
            let parts = cs.iter().map(|c| nnf_pol(c, pos)).collect();
            if pos {
                Constraint::and(parts)
            } else {
                Constraint::or(parts)
            }
        }
        Constraint::Or(cs) => {
            let parts = cs.iter().map(|c| nnf_pol(c, pos)).collect();
            if pos {
                Constraint::or(parts)
            } else {
                Constraint::and(parts)
            }
        }
        Constraint::Implies(a, b) => {
            if pos {
                Constraint::or(vec![nnf_pol(a, false), nnf_pol(b, true)])
            } else {
                Constraint::and(vec![nnf_pol(a, true), nnf_pol(b, false)])
            }
        }
        Constraint::AllDifferent(es) => {
            if pos {
                Constraint::AllDifferent(es.clone())
            } else {
                let mut pairs = Vec::new();
                for i in 0..es.len() {
                    for j in i + 1..es.len() {
                        pairs.push(Constraint::Cmp(RelOp::Eq, es[i].clone(), es[j].clone()));
                    }
                }
                Constraint::or(pairs)
            }
        }
    }
}

/// Rename a contract expression under σ, unrolling bounded quantifiers
/// into finite conjunctions/disjunctions.
pub fn expand_quantifiers(s: &SpecExpr, versions: &VersionMap) -> Result<Constraint, RenameError> {
    Renamer::new(versions).expanding_quantifiers().constraint(s)
}

/// True if no quantifier survives (quantifiers never reach the IR, so this
/// only checks that expansion produced well-formed atoms).
pub fn is_quantifier_free(c: &Constraint) -> bool {
    match c {
        Constraint::Not(i) => is_quantifier_free(i),
        Constraint::And(cs) | Constraint::Or(cs) => cs.iter().all(is_quantifier_free),
        Constraint::Implies(a, b) => is_quantifier_free(a) && is_quantifier_free(b),
        _ => true,
    }
}

/// Side conditions under which every term of `e` is defined: indices in
/// bounds and divisors non-zero.
pub fn definedness(e: &SolverExpr) -> Vec<Constraint> {
    let mut out = Vec::new();
    e.visit(&mut |sub| match sub {
        SolverExpr::Select(a, idx) => match idx.as_const() {
            Some(i) if i >= 0 && (i as usize) < a.len => {}
            Some(_) => out.push(Constraint::False),
            None => {
                out.push(Constraint::cmp(RelOp::Ge, (**idx).clone(), SolverExpr::Const(0)));
                out.push(Constraint::cmp(
                    RelOp::Lt,
                    (**idx).clone(),
                    SolverExpr::Const(a.len as i64),
                ));
            }
        },
        SolverExpr::Bin(ArithOp::Div, _, d) => {
            out.push(Constraint::cmp(RelOp::Ne, (**d).clone(), SolverExpr::Const(0)));
        }
        _ => {}
    });
    out
}

/// Definedness of every term mentioned by a constraint.
pub fn constraint_definedness(c: &Constraint) -> Vec<Constraint> {
    let mut out = Vec::new();
    c.visit_exprs(&mut |e| out.extend(definedness(e)));
    out
}
