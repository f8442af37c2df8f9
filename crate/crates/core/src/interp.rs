//! Concrete big-step interpreter, used as an independent oracle.
//!
//! Expressions are evaluated strictly: every operand of `&&`, `||` and
//! `==>` is evaluated, and an out-of-bounds read or a division by zero
//! anywhere makes the run infeasible. Assignments of values outside the
//! `k`-bit range are infeasible too, matching the domain pruning of the
//! symbolic executor.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraint_ir::{negate, Model};
use crate::executor::Tag;
use crate::frontend::{BinOp, Expr, ExprKind, Function, ProgramAst, SpecExpr, Stmt, StmtKind, Type, UnOp};
use crate::renaming::{ArrayRef, Renamer, VarRef, VersionMap, RESULT};

/// Values of a function's parameters (and, for witnesses, its result).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inputs {
    pub scalars: BTreeMap<String, i64>,
    pub arrays: BTreeMap<String, Vec<i64>>,
}

impl Inputs {
    /// All-zero inputs for a concrete function.
    pub fn zeros(f: &Function) -> Inputs {
        let mut out = Inputs::default();
        for p in &f.params {
            match &p.ty {
                Type::Int => {
                    out.scalars.insert(p.name.clone(), 0);
                }
                Type::IntArray(_) => {
                    let len = p.ty.len().unwrap_or(0).max(0) as usize;
                    out.arrays.insert(p.name.clone(), vec![0; len]);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InterpOptions {
    pub bits: u32,
    pub check_overflow: bool,
    pub step_limit: u64,
}

impl Default for InterpOptions {
    fn default() -> Self {
        InterpOptions {
            bits: 8,
            check_overflow: false,
            step_limit: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    /// Normal termination; `None` when the body ends without `return`.
    Returned(Option<i64>),
    AssertionFailed { line: u32 },
    ContractViolation { callee: String, line: u32 },
    Overflow { line: u32 },
    /// No concrete run exists for these inputs (undefined operation or an
    /// unrepresentable value).
    Infeasible { line: u32 },
}

/// Program state.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Env {
    pub scalars: BTreeMap<String, i64>,
    pub arrays: BTreeMap<String, Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub outcome: Outcome,
    pub trace: Vec<Tag>,
    /// Statements executed.
    pub steps: u64,
    pub final_env: Env,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum InterpError {
    #[error("step limit of {0} exceeded")]
    StepLimit(u64),
    #[error("no value supplied for input `{0}`")]
    MissingInput(String),
    #[error("array input `{name}` has length {got}, expected {expected}")]
    BadLength {
        name: String,
        got: usize,
        expected: usize,
    },
    #[error("no implementation for callee `{0}`")]
    MissingCallee(String),
    #[error("program has symbolic bounds; substitute parameters first")]
    NotConcrete,
}

/// Internal control flow.
enum Flow {
    Next,
    Return(i64),
    Stop(Outcome),
}

struct Undefined;

struct Interp<'a> {
    f: &'a Function,
    callees: &'a [Function],
    opts: InterpOptions,
    trace: Vec<Tag>,
    steps: u64,
    env: Env,
}

fn in_range(v: i128, bits: u32) -> bool {
    let half = 1i128 << (bits - 1);
    -half <= v && v < half
}

impl Interp<'_> {
    fn eval(&self, e: &Expr) -> Result<i128, Undefined> {
        Ok(match &e.kind {
            ExprKind::Int(v) => *v as i128,
            ExprKind::Bool(b) => *b as i128,
            ExprKind::Var(n) => *self.env.scalars.get(n).ok_or(Undefined)? as i128,
            ExprKind::Index(a, idx) => {
                let i = self.eval(idx)?;
                let cells = self.env.arrays.get(a).ok_or(Undefined)?;
                if i < 0 || i >= cells.len() as i128 {
                    return Err(Undefined);
                }
                cells[i as usize] as i128
            }
            ExprKind::Length(a) => self.env.arrays.get(a).ok_or(Undefined)?.len() as i128,
            ExprKind::Unary(UnOp::Neg, x) => -self.eval(x)?,
            ExprKind::Unary(UnOp::Not, x) => (self.eval(x)? == 0) as i128,
            ExprKind::Binary(op, l, r) => {
                let a = self.eval(l)?;
                let b = self.eval(r)?;
                let v = match op {
                    BinOp::Add => a.checked_add(b),
                    BinOp::Sub => a.checked_sub(b),
                    BinOp::Mul => a.checked_mul(b),
                    BinOp::Div => {
                        if b == 0 {
                            None
                        } else {
                            a.checked_div(b)
                        }
                    }
                    BinOp::Eq => Some((a == b) as i128),
                    BinOp::Ne => Some((a != b) as i128),
                    BinOp::Lt => Some((a < b) as i128),
                    BinOp::Le => Some((a <= b) as i128),
                    BinOp::Gt => Some((a > b) as i128),
                    BinOp::Ge => Some((a >= b) as i128),
                    BinOp::And => Some((a != 0 && b != 0) as i128),
                    BinOp::Or => Some((a != 0 || b != 0) as i128),
                    BinOp::Implies => Some((a == 0 || b != 0) as i128),
                };
                v.filter(|v| v.unsigned_abs() < 1u128 << 100).ok_or(Undefined)?
            }
            ExprKind::Quant { .. } | ExprKind::AllDifferent(_) => return Err(Undefined),
        })
    }

    /// True if some arithmetic subterm, in evaluation order, leaves the
    /// `k`-bit range. Assumes `e` evaluates without error.
    fn overflows(&self, e: &Expr) -> bool {
        let mut found = false;
        self.post_order(e, &mut |sub| {
            let arith = match &sub.kind {
                ExprKind::Binary(op, ..) => op.is_arith(),
                ExprKind::Unary(UnOp::Neg, _) => true,
                _ => false,
            };
            if arith && !found {
                if let Ok(v) = self.eval(sub) {
                    found = !in_range(v, self.opts.bits);
                }
            }
        });
        found
    }

    fn post_order(&self, e: &Expr, f: &mut impl FnMut(&Expr)) {
        match &e.kind {
            ExprKind::Index(_, i) | ExprKind::Unary(_, i) => self.post_order(i, f),
            ExprKind::Binary(_, l, r) => {
                self.post_order(l, f);
                self.post_order(r, f);
            }
            _ => {}
        }
        f(e);
    }

    fn line(&self, s: &Stmt) -> u32 {
        self.f.relative_line(s.span)
    }

    /// Evaluate the right-hand side of an assignment: `Err` stops the run.
    fn rhs(&self, s: &Stmt, e: &Expr) -> Result<i64, Outcome> {
        let line = self.line(s);
        let v = self.eval(e).map_err(|_| Outcome::Infeasible { line })?;
        if self.opts.check_overflow && self.overflows(e) {
            return Err(Outcome::Overflow { line });
        }
        if !in_range(v, self.opts.bits) {
            return Err(Outcome::Infeasible { line });
        }
        Ok(v as i64)
    }

    fn exec_block(&mut self, stmts: &[Stmt]) -> Result<Flow, InterpError> {
        for s in stmts {
            match self.exec(s)? {
                Flow::Next => {}
                other => return Ok(other),
            }
        }
        Ok(Flow::Next)
    }

    fn exec(&mut self, s: &Stmt) -> Result<Flow, InterpError> {
        self.steps += 1;
        if self.steps > self.opts.step_limit {
            return Err(InterpError::StepLimit(self.opts.step_limit));
        }
        let line = self.line(s);
        Ok(match &s.kind {
            StmtKind::ArrayAssign { array, index, value } => {
                let i = match self.eval(index) {
                    Ok(i) => i,
                    Err(_) => return Ok(Flow::Stop(Outcome::Infeasible { line })),
                };
                if self.opts.check_overflow && self.overflows(index) {
                    return Ok(Flow::Stop(Outcome::Overflow { line }));
                }
                let v = match self.rhs(s, value) {
                    Ok(v) => v,
                    Err(o) => return Ok(Flow::Stop(o)),
                };
                let cells = self.env.arrays.get_mut(array).expect("checked program");
                if i < 0 || i >= cells.len() as i128 {
                    return Ok(Flow::Stop(Outcome::Infeasible { line }));
                }
                cells[i as usize] = v;
                Flow::Next
            }
            StmtKind::Assign { target, value, .. } => match self.rhs(s, value) {
                Ok(v) => {
                    self.env.scalars.insert(target.clone(), v);
                    Flow::Next
                }
                Err(o) => Flow::Stop(o),
            },
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                let Ok(c) = self.eval(cond) else {
                    return Ok(Flow::Stop(Outcome::Infeasible { line }));
                };
                self.trace.push(Tag { taken: c != 0, line });
                if c != 0 {
                    self.exec(then_branch)?
                } else if let Some(e) = else_branch {
                    self.exec(e)?
                } else {
                    Flow::Next
                }
            }
            StmtKind::While { cond, body } => loop {
                let Ok(c) = self.eval(cond) else {
                    return Ok(Flow::Stop(Outcome::Infeasible { line }));
                };
                self.trace.push(Tag { taken: c != 0, line });
                if c == 0 {
                    break Flow::Next;
                }
                match self.exec(body)? {
                    Flow::Next => {}
                    other => break other,
                }
                self.steps += 1;
                if self.steps > self.opts.step_limit {
                    return Err(InterpError::StepLimit(self.opts.step_limit));
                }
            },
            StmtKind::Assert(b) => match self.eval(b) {
                Err(_) => Flow::Stop(Outcome::Infeasible { line }),
                Ok(0) => Flow::Stop(Outcome::AssertionFailed { line }),
                Ok(_) => Flow::Next,
            },
            StmtKind::Enforce(b) => match self.eval(b) {
                Ok(v) if v != 0 => Flow::Next,
                _ => Flow::Stop(Outcome::Infeasible { line }),
            },
            StmtKind::Return(e) => match self.rhs(s, e) {
                Ok(v) => Flow::Return(v),
                Err(o) => Flow::Stop(o),
            },
            StmtKind::Block(items) => self.exec_block(items)?,
            StmtKind::Call {
                target,
                callee,
                args,
                ..
            } => self.call(line, target, callee, args)?,
        })
    }

    fn call(&mut self, line: u32, target: &str, callee: &str, args: &[Expr]) -> Result<Flow, InterpError> {
        let g = self
            .callees
            .iter()
            .find(|g| g.name == callee && g.body.is_some())
            .ok_or_else(|| InterpError::MissingCallee(callee.to_string()))?;
        let mut inputs = Inputs::default();
        let mut passed = Vec::new();
        for (p, a) in g.params.iter().zip(args) {
            match (&p.ty, &a.kind) {
                (Type::IntArray(_), ExprKind::Var(name)) => {
                    inputs
                        .arrays
                        .insert(p.name.clone(), self.env.arrays[name].clone());
                    passed.push((p.name.clone(), name.clone()));
                }
                _ => match self.eval(a) {
                    Ok(v) if in_range(v, self.opts.bits) => {
                        inputs.scalars.insert(p.name.clone(), v as i64);
                    }
                    _ => return Ok(Flow::Stop(Outcome::Infeasible { line })),
                },
            }
        }
        let env = env_of(&inputs);
        if !holds(g, &g.precondition(), &env, None) {
            return Ok(Flow::Stop(Outcome::ContractViolation {
                callee: callee.to_string(),
                line,
            }));
        }
        let mut inner = Interp {
            f: g,
            callees: self.callees,
            opts: InterpOptions {
                check_overflow: false,
                ..self.opts
            },
            trace: Vec::new(),
            steps: self.steps,
            env,
        };
        let flow = inner.exec_block(g.body.as_ref().expect("callee body"))?;
        self.steps = inner.steps;
        let result = match flow {
            Flow::Return(v) => v,
            _ => return Ok(Flow::Stop(Outcome::Infeasible { line })),
        };
        for (formal, actual) in passed {
            let cells = inner.env.arrays.remove(&formal).expect("formal array");
            self.env.arrays.insert(actual, cells);
        }
        self.env.scalars.insert(target.to_string(), result);
        Ok(Flow::Next)
    }
}

fn env_of(inputs: &Inputs) -> Env {
    Env {
        scalars: inputs.scalars.clone(),
        arrays: inputs.arrays.clone(),
    }
}

/// Model and version map that view a concrete state as version-0
/// variables, plus `result` when given.
fn state_model(env: &Env, result: Option<i64>) -> (Model, VersionMap) {
    let mut model = Model::default();
    for (n, v) in &env.scalars {
        model.scalars.insert(VarRef::new(n, 0), *v);
    }
    if let Some(r) = result {
        model.scalars.insert(VarRef::new(RESULT, 0), r);
    }
    for (n, cells) in &env.arrays {
        model.arrays.insert(ArrayRef::new(n, 0, cells.len()), cells.clone());
    }
    let mut scalars: Vec<&str> = env.scalars.keys().map(String::as_str).collect();
    scalars.push(RESULT);
    let sigma = VersionMap::initial(scalars, env.arrays.iter().map(|(n, c)| (n.as_str(), c.len())));
    (model, sigma)
}

/// Does a contract expression hold in a concrete state?
pub fn holds(f: &Function, e: &SpecExpr, env: &Env, result: Option<i64>) -> bool {
    let _ = f;
    let (model, sigma) = state_model(env, result);
    match Renamer::new(&sigma).expanding_quantifiers().constraint(e) {
        Ok(c) => model.eval(&c),
        Err(_) => false,
    }
}

/// Is a contract expression violated in a concrete state? Uses the same
/// negation as the symbolic executor, so the two agree on terms that are
/// undefined.
pub fn violates(e: &SpecExpr, env: &Env, result: Option<i64>) -> bool {
    let (model, sigma) = state_model(env, result);
    match Renamer::new(&sigma).expanding_quantifiers().constraint(e) {
        Ok(c) => model.eval(&negate(&c)),
        Err(_) => false,
    }
}

/// Precondition of `ast` holds on `inputs`.
pub fn precondition_holds(ast: &ProgramAst, inputs: &Inputs) -> bool {
    holds(&ast.function, &ast.function.precondition(), &env_of(inputs), None)
}

/// Run the verified function of `ast` on concrete inputs. Calls execute
/// the bodies found in `callees`.
pub fn concrete_interpret(
    ast: &ProgramAst,
    inputs: &Inputs,
    callees: &[Function],
    opts: &InterpOptions,
) -> Result<Execution, InterpError> {
    if !ast.is_concrete() {
        return Err(InterpError::NotConcrete);
    }
    let f = &ast.function;
    let mut env = Env::default();
    for p in &f.params {
        match &p.ty {
            Type::Int => {
                let v = *inputs
                    .scalars
                    .get(&p.name)
                    .ok_or_else(|| InterpError::MissingInput(p.name.clone()))?;
                env.scalars.insert(p.name.clone(), v);
            }
            Type::IntArray(_) => {
                let cells = inputs
                    .arrays
                    .get(&p.name)
                    .ok_or_else(|| InterpError::MissingInput(p.name.clone()))?;
                let expected = p.ty.len().unwrap_or(0) as usize;
                if cells.len() != expected {
                    return Err(InterpError::BadLength {
                        name: p.name.clone(),
                        got: cells.len(),
                        expected,
                    });
                }
                env.arrays.insert(p.name.clone(), cells.clone());
            }
        }
    }
    let mut it = Interp {
        f,
        callees,
        opts: *opts,
        trace: Vec::new(),
        steps: 0,
        env,
    };
    let flow = it.exec_block(f.body.as_deref().unwrap_or(&[]))?;
    let outcome = match flow {
        Flow::Next => Outcome::Returned(None),
        Flow::Return(v) => Outcome::Returned(Some(v)),
        Flow::Stop(o) => o,
    };
    Ok(Execution {
        outcome,
        trace: it.trace,
        steps: it.steps,
        final_env: it.env,
    })
}

/// Does a finished run violate the postcondition?
pub fn postcondition_violated(ast: &ProgramAst, exec: &Execution) -> bool {
    match exec.outcome {
        Outcome::Returned(r) => violates(&ast.function.postcondition(), &exec.final_env, r),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn inputs(scalars: &[(&str, i64)], arrays: &[(&str, Vec<i64>)]) -> Inputs {
        Inputs {
            scalars: scalars.iter().map(|(n, v)| (n.to_string(), *v)).collect(),
            arrays: arrays.iter().map(|(n, v)| (n.to_string(), v.clone())).collect(),
        }
    }

    #[test]
    fn buggy_tritype_on_112() {
        let ast = corpus::instantiate(corpus::TRITYPE_BUG, &[]).unwrap();
        let run = concrete_interpret(
            &ast,
            &inputs(&[("i", 1), ("j", 1), ("k", 2)], &[]),
            &[],
            &InterpOptions::default(),
        )
        .unwrap();
        assert_eq!(run.outcome, Outcome::Returned(Some(2)));
        assert!(postcondition_violated(&ast, &run));
    }

    #[test]
    fn buggy_binary_search_misses_value() {
        let ast = corpus::instantiate(corpus::BINARY_SEARCH_BUG, &[("N", 8)]).unwrap();
        let t = vec![-128, -127, -126, -125, -124, -123, -122, -121];
        let inp = inputs(&[("v", -126)], &[("t", t)]);
        assert!(precondition_holds(&ast, &inp));
        let run = concrete_interpret(&ast, &inp, &[], &InterpOptions::default()).unwrap();
        assert_eq!(run.outcome, Outcome::Returned(Some(-1)));
        assert!(postcondition_violated(&ast, &run));
        // first test of the loop, then t[3] != v and t[3] > v
        assert_eq!(run.trace[..3], [Tag::t(4), Tag::f(6), Tag::t(8)]);
    }

    #[test]
    fn correct_binary_search_finds_first_element() {
        let ast = corpus::instantiate(corpus::BINARY_SEARCH, &[("N", 8)]).unwrap();
        let t = vec![1, 2, 3, 5, 8, 13, 21, 34];
        let run = concrete_interpret(&ast, &inputs(&[("v", 1)], &[("t", t.clone())]), &[], &InterpOptions::default())
            .unwrap();
        let Outcome::Returned(Some(i)) = run.outcome else { panic!() };
        assert_eq!(t[i as usize], 1);
    }

    #[test]
    fn strict_evaluation_of_out_of_bounds_read() {
        let ast = crate::frontend::parse_program(
            "fn f(int[2] t, int x) { if (x < 0 || t[x] > 0) return 1; return 0; }",
        )
        .unwrap();
        let run =
            concrete_interpret(&ast, &inputs(&[("x", -1)], &[("t", vec![0, 0])]), &[], &InterpOptions::default())
                .unwrap();
        assert!(matches!(run.outcome, Outcome::Infeasible { .. }));
    }

    #[test]
    fn overflow_mode_reports_intermediate_overflow() {
        let ast = crate::frontend::parse_program("fn f(int x) { int y = x + x - x; }").unwrap();
        let opts = InterpOptions {
            check_overflow: true,
            ..InterpOptions::default()
        };
        let run = concrete_interpret(&ast, &inputs(&[("x", 100)], &[]), &[], &opts).unwrap();
        assert_eq!(run.outcome, Outcome::Overflow { line: 1 });
        let quiet = concrete_interpret(&ast, &inputs(&[("x", 100)], &[]), &[], &InterpOptions::default()).unwrap();
        assert_eq!(quiet.outcome, Outcome::Returned(None));
    }
}
