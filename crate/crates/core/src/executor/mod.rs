//! Symbolic execution of a function body as rewriting of configurations
//! `⟨instructions, σ, store⟩`.
//!
//! Exploration is depth-first with an explicit worklist. Branch successors
//! share one [`ConstraintStore`]; the store is truncated back to the
//! branch point before the next sibling runs.

mod types;

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::constraint_ir::{constraint_definedness, definedness, negate, ConstraintStore, Model};
use crate::frontend::{Expr, ExprKind, Function, ProgramAst, SpecExpr, Stmt, StmtKind, Type, UnOp};
use crate::interp::Inputs;
use crate::renaming::{ArrayRef, ConstEnv, Constraint, RelOp, Renamer, SolverExpr, VersionMap, RESULT};
use crate::solver::{check_cheap, solve, Verdict};

pub use types::*;

#[derive(Debug)]
struct Node<'s> {
    stmt: &'s Stmt,
    next: Cont<'s>,
}

/// Remaining instructions, as a persistent list.
type Cont<'s> = Option<Arc<Node<'s>>>;

fn push<'s>(stmt: &'s Stmt, next: Cont<'s>) -> Cont<'s> {
    Some(Arc::new(Node { stmt, next }))
}

fn push_all<'s>(stmts: &'s [Stmt], next: Cont<'s>) -> Cont<'s> {
    stmts.iter().rev().fold(next, |acc, s| push(s, acc))
}

fn cont_to_vec(mut c: &Cont<'_>) -> Vec<Stmt> {
    let mut out = Vec::new();
    while let Some(n) = c {
        out.push(n.stmt.clone());
        c = &n.next;
    }
    out
}

#[derive(Clone)]
struct Frame<'s> {
    cont: Cont<'s>,
    sigma: VersionMap,
    consts: ConstEnv,
    trace: Vec<Tag>,
    /// Constraints of the branch just taken, not yet posted.
    pending: Vec<Constraint>,
    /// Created by a branch (a candidate split point for parallel runs).
    fresh: bool,
}

struct Succ<'s> {
    tag: Tag,
    pending: Vec<Constraint>,
    cont: Cont<'s>,
}

enum Flow<'s> {
    Next,
    Branch(Vec<Succ<'s>>),
    Top,
    Bottom(Violation),
    Prune,
}

#[derive(Default)]
struct Acc {
    stats: ExecStats,
    pruned: Vec<Vec<Tag>>,
    paths: Vec<PathRecord>,
    violation: Option<Violation>,
}

impl Acc {
    fn absorb(&mut self, other: Acc) {
        self.stats.add(&other.stats);
        self.pruned.extend(other.pruned);
        self.paths.extend(other.paths);
        if self.violation.is_none() {
            self.violation = other.violation;
        }
    }

    fn record(&mut self, v: Violation) {
        self.stats.violations += 1;
        if self.violation.is_none() {
            self.violation = Some(v);
        }
    }

    fn prune(&mut self, trace: &[Tag]) {
        self.stats.pruned_paths += 1;
        self.pruned.push(trace.to_vec());
    }
}

enum Item<'s> {
    Run(Frame<'s>),
    Restore(usize),
}

enum Segment<'s> {
    Done(Acc),
    Failed(ExecError),
    Task(Frame<'s>, ConstraintStore),
}

struct Explorer<'a> {
    f: &'a Function,
    contracts: BTreeMap<String, Contract>,
    opts: &'a ExecOptions,
    post: SpecExpr,
    no_names: VersionMap,
}

fn in_range(v: i64, bits: u32) -> bool {
    let half = 1i64 << (bits - 1);
    -half <= v && v < half
}

fn eq(a: SolverExpr, b: SolverExpr) -> Constraint {
    Constraint::cmp(RelOp::Eq, a, b)
}

/// Arithmetic sub-expressions in evaluation order.
fn arith_post_order<'e>(e: &'e Expr, out: &mut Vec<&'e Expr>) {
    match &e.kind {
        ExprKind::Index(_, i) => arith_post_order(i, out),
        ExprKind::Unary(op, i) => {
            arith_post_order(i, out);
            if *op == UnOp::Neg {
                out.push(e);
            }
        }
        ExprKind::Binary(op, l, r) => {
            arith_post_order(l, out);
            arith_post_order(r, out);
            if op.is_arith() {
                out.push(e);
            }
        }
        _ => {}
    }
}

impl<'a> Explorer<'a> {
    fn new(ast: &'a ProgramAst, contracts: &[Contract], opts: &'a ExecOptions) -> Self {
        let mut map = BTreeMap::new();
        for g in &ast.externs {
            map.insert(g.name.clone(), Contract::from(g));
        }
        for c in contracts {
            map.insert(c.name.clone(), c.clone());
        }
        Explorer {
            f: &ast.function,
            contracts: map,
            opts,
            post: ast.function.postcondition(),
            no_names: VersionMap::initial([], []),
        }
    }

    fn bits(&self) -> u32 {
        self.opts.solver.bits
    }

    fn line(&self, s: &Stmt) -> u32 {
        self.f.relative_line(s.span)
    }

    fn renamer<'r>(frame: &'r Frame<'_>) -> Renamer<'r> {
        Renamer::new(&frame.sigma).with_consts(&frame.consts)
    }

    fn cheap_unsat(&self, store: &ConstraintStore, acc: &mut Acc) -> bool {
        acc.stats.cheap_checks += 1;
        check_cheap(store, &self.opts.solver).is_unsat()
    }

    fn complete(&self, store: &ConstraintStore, extra: Option<Constraint>, trace: &[Tag], acc: &mut Acc) -> Result<Verdict, ExecError> {
        acc.stats.complete_checks += 1;
        let mut cs = store.constraints().to_vec();
        cs.extend(extra);
        let (v, st) = solve(&cs, &self.opts.solver).map_err(|e| match e {
            crate::solver::SolverError::Budget { budget } => ExecError::Budget {
                trace: format_trace(trace),
                budget,
            },
        })?;
        acc.stats.solver_nodes += st.nodes;
        Ok(v)
    }

    fn witness(&self, m: &Model, sigma: &VersionMap) -> (Inputs, Option<i64>) {
        let mut inputs = Inputs::default();
        for p in &self.f.params {
            match &p.ty {
                Type::Int => {
                    inputs
                        .scalars
                        .insert(p.name.clone(), m.scalar(&p.name, 0).unwrap_or(0));
                }
                Type::IntArray(_) => {
                    let len = p.ty.len().unwrap_or(0) as usize;
                    let cells = m.array(&p.name, 0).map(<[i64]>::to_vec).unwrap_or_else(|| vec![0; len]);
                    inputs.arrays.insert(p.name.clone(), cells);
                }
            }
        }
        let result = sigma
            .var(RESULT)
            .ok()
            .and_then(|r| m.scalar(RESULT, r.version));
        (inputs, result)
    }

    fn violation(&self, kind: VerdictKind, m: Model, frame: &Frame<'_>, line: Option<u32>, message: String) -> Violation {
        let (inputs, result) = self.witness(&m, &frame.sigma);
        Violation {
            kind,
            trace: frame.trace.clone(),
            line,
            witness: inputs,
            result,
            model: m,
            message,
        }
    }

    /// Post side conditions; false if one is trivially violated.
    fn post_defs(store: &mut ConstraintStore, defs: Vec<Constraint>) -> bool {
        for d in defs {
            match d {
                Constraint::True => {}
                Constraint::False => return false,
                d => store.post(d),
            }
        }
        true
    }

    fn check_overflow(
        &self,
        frame: &Frame<'_>,
        store: &ConstraintStore,
        exprs: &[&Expr],
        line: u32,
        acc: &mut Acc,
    ) -> Result<Option<Violation>, ExecError> {
        if !self.opts.check_overflow {
            return Ok(None);
        }
        let half = 1i64 << (self.bits() - 1);
        let r = Self::renamer(frame);
        for e in exprs {
            let mut subs = Vec::new();
            arith_post_order(e, &mut subs);
            for sub in subs {
                let v = r.expr(sub)?;
                let fits = Constraint::and(vec![
                    Constraint::cmp(RelOp::Ge, v.clone(), SolverExpr::Const(-half)),
                    Constraint::cmp(RelOp::Lt, v.clone(), SolverExpr::Const(half)),
                ]);
                if fits.is_true() {
                    continue;
                }
                if let Verdict::Sat(m) = self.complete(store, Some(negate(&fits)), &frame.trace, acc)? {
                    let message = format!("`{}` may not fit in {} bits", crate::frontend::expr_to_string(sub), self.bits());
                    return Ok(Some(self.violation(VerdictKind::OverflowViolation, m, frame, Some(line), message)));
                }
            }
        }
        Ok(None)
    }

    fn exec<'s>(
        &self,
        stmt: &'s Stmt,
        frame: &mut Frame<'s>,
        store: &mut ConstraintStore,
        acc: &mut Acc,
    ) -> Result<Flow<'s>, ExecError> {
        let line = self.line(stmt);
        Ok(match &stmt.kind {
            StmtKind::Assign { target, value, .. } => {
                let v = Self::renamer(frame).expr(value)?;
                if !Self::post_defs(store, definedness(&v)) {
                    return Ok(Flow::Prune);
                }
                if let Some(bad) = self.check_overflow(frame, store, &[value], line, acc)? {
                    return Ok(Flow::Bottom(bad));
                }
                frame.sigma = frame.sigma.assign(target);
                let x = frame.sigma.var(target)?;
                if let Some(c) = v.as_const() {
                    if !in_range(c, self.bits()) {
                        return Ok(Flow::Prune);
                    }
                    frame.consts.insert(x.clone(), c);
                }
                store.post(eq(SolverExpr::Var(x), v));
                Flow::Next
            }
            StmtKind::ArrayAssign { array, index, value } => {
                let (i, v) = {
                    let r = Self::renamer(frame);
                    (r.expr(index)?, r.expr(value)?)
                };
                let len = frame.sigma.array(array)?.len as i64;
                let mut defs = definedness(&i);
                defs.extend(definedness(&v));
                defs.push(Constraint::cmp(RelOp::Ge, i.clone(), SolverExpr::Const(0)));
                defs.push(Constraint::cmp(RelOp::Lt, i.clone(), SolverExpr::Const(len)));
                if !Self::post_defs(store, defs) {
                    return Ok(Flow::Prune);
                }
                if let Some(bad) = self.check_overflow(frame, store, &[index, value], line, acc)? {
                    return Ok(Flow::Bottom(bad));
                }
                if v.as_const().is_some_and(|c| !in_range(c, self.bits())) {
                    return Ok(Flow::Prune);
                }
                let old = frame.sigma.array(array)?;
                frame.sigma = frame.sigma.bump(array)?;
                let new = frame.sigma.array(array)?;
                match i.as_const() {
                    Some(k) => {
                        if k < 0 || k as usize >= new.len {
                            return Ok(Flow::Prune);
                        }
                        for j in 0..new.len {
                            if j == k as usize {
                                store.post(eq(new.cell(j), v.clone()));
                            } else {
                                store.post(eq(new.cell(j), old.cell(j)));
                            }
                        }
                    }
                    None => {
                        store.post(eq(SolverExpr::Select(new.clone(), Box::new(i.clone())), v));
                        for j in 0..new.len {
                            store.post(Constraint::implies(
                                Constraint::cmp(RelOp::Ne, i.clone(), SolverExpr::Const(j as i64)),
                                eq(new.cell(j), old.cell(j)),
                            ));
                        }
                    }
                }
                Flow::Next
            }
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                let (tp, fp) = self.split(frame, cond)?;
                let rest = frame.cont.clone();
                let else_cont = match else_branch {
                    Some(e) => push(e, rest.clone()),
                    None => rest.clone(),
                };
                Flow::Branch(vec![
                    Succ {
                        tag: Tag::t(line),
                        pending: tp,
                        cont: push(then_branch, rest),
                    },
                    Succ {
                        tag: Tag::f(line),
                        pending: fp,
                        cont: else_cont,
                    },
                ])
            }
            StmtKind::While { cond, body } => {
                let (tp, fp) = self.split(frame, cond)?;
                let rest = frame.cont.clone();
                Flow::Branch(vec![
                    Succ {
                        tag: Tag::t(line),
                        pending: tp,
                        cont: push(body, push(stmt, rest.clone())),
                    },
                    Succ {
                        tag: Tag::f(line),
                        pending: fp,
                        cont: rest,
                    },
                ])
            }
            StmtKind::Assert(b) => {
                let c = Self::renamer(frame).constraint(b)?;
                if !Self::post_defs(store, constraint_definedness(&c)) {
                    return Ok(Flow::Prune);
                }
                if c.is_true() {
                    return Ok(Flow::Next);
                }
                match self.complete(store, Some(negate(&c)), &frame.trace, acc)? {
                    Verdict::Sat(m) => Flow::Bottom(self.violation(
                        VerdictKind::AssertionViolation,
                        m,
                        frame,
                        Some(line),
                        format!("assert({}) may fail", crate::frontend::expr_to_string(b)),
                    )),
                    _ => Flow::Next,
                }
            }
            StmtKind::Enforce(b) => {
                let c = Self::renamer(frame).constraint(b)?;
                let mut defs = constraint_definedness(&c);
                defs.push(c);
                if !Self::post_defs(store, defs) {
                    return Ok(Flow::Prune);
                }
                if self.complete(store, None, &frame.trace, acc)?.is_unsat() {
                    Flow::Prune
                } else {
                    Flow::Next
                }
            }
            StmtKind::Return(e) => {
                let v = Self::renamer(frame).expr(e)?;
                if !Self::post_defs(store, definedness(&v)) {
                    return Ok(Flow::Prune);
                }
                if let Some(bad) = self.check_overflow(frame, store, &[e], line, acc)? {
                    return Ok(Flow::Bottom(bad));
                }
                if v.as_const().is_some_and(|c| !in_range(c, self.bits())) {
                    return Ok(Flow::Prune);
                }
                let r = frame.sigma.var(RESULT)?;
                store.post(eq(SolverExpr::Var(r), v));
                Flow::Top
            }
            StmtKind::Block(items) => {
                frame.cont = push_all(items, frame.cont.take());
                Flow::Next
            }
            StmtKind::Call {
                target,
                callee,
                args,
                ..
            } => self.call(line, frame, store, acc, target, callee, args)?,
        })
    }

    /// Constraints for the true and false successors of a test.
    fn split(&self, frame: &Frame<'_>, cond: &Expr) -> Result<(Vec<Constraint>, Vec<Constraint>), ExecError> {
        let c = Self::renamer(frame).constraint(cond)?;
        let defs = constraint_definedness(&c);
        let mut tp = defs.clone();
        let mut fp = defs;
        fp.push(negate(&c));
        tp.push(c);
        Ok((tp, fp))
    }

    #[allow(clippy::too_many_arguments)]
    fn call<'s>(
        &self,
        line: u32,
        frame: &mut Frame<'s>,
        store: &mut ConstraintStore,
        acc: &mut Acc,
        target: &str,
        callee: &str,
        args: &[Expr],
    ) -> Result<Flow<'s>, ExecError> {
        let contract = self
            .contracts
            .get(callee)
            .ok_or_else(|| ExecError::MissingContract(callee.to_string()))?;
        let bad = |message: String| ExecError::BadCall {
            callee: callee.to_string(),
            message,
        };
        if contract.params.len() != args.len() {
            return Err(bad(format!(
                "expected {} arguments, got {}",
                contract.params.len(),
                args.len()
            )));
        }
        let mut scalars = Vec::new();
        let mut arrays = Vec::new();
        let mut defs = Vec::new();
        for (p, a) in contract.params.iter().zip(args) {
            match &p.ty {
                Type::Int => {
                    let e = Self::renamer(frame).expr(a)?;
                    defs.extend(definedness(&e));
                    scalars.push((p.name.clone(), e));
                }
                Type::IntArray(_) => {
                    let ExprKind::Var(actual) = &a.kind else {
                        return Err(bad(format!("argument for `{}` must be an array variable", p.name)));
                    };
                    let arr = frame.sigma.array(actual)?;
                    if p.ty.len() != Some(arr.len as i64) {
                        return Err(bad(format!(
                            "array `{actual}` has length {}, contract expects {:?}",
                            arr.len,
                            p.ty.len()
                        )));
                    }
                    arrays.push((p.name.clone(), actual.clone(), arr));
                }
            }
        }
        if !Self::post_defs(store, defs) {
            return Ok(Flow::Prune);
        }
        let pre = bind_formals(Renamer::new(&self.no_names).expanding_quantifiers(), &scalars, &arrays, &[], None)?.constraint(&contract.requires)?;
        if !pre.is_true() {
            if let Verdict::Sat(m) = self.complete(store, Some(negate(&pre)), &frame.trace, acc)? {
                return Ok(Flow::Bottom(self.violation(
                    VerdictKind::ContractViolation,
                    m,
                    frame,
                    Some(line),
                    format!("precondition of `{callee}` may not hold"),
                )));
            }
        }
        for m in &contract.modifies {
            let (_, actual, _) = arrays
                .iter()
                .find(|(formal, ..)| formal == m)
                .ok_or_else(|| bad(format!("`modifies {m}` does not name an array parameter")))?;
            frame.sigma = frame.sigma.bump(actual)?;
        }
        frame.sigma = frame.sigma.assign(target);
        let res = SolverExpr::Var(frame.sigma.var(target)?);
        let post = bind_formals(
            Renamer::new(&self.no_names).expanding_quantifiers(),
            &scalars,
            &arrays,
            &contract.modifies,
            Some(&frame.sigma),
        )?
            .bind_scalar(RESULT, res)
            .constraint(&contract.ensures)?;
        if post == Constraint::False {
            return Ok(Flow::Prune);
        }
        store.post(post);
        Ok(Flow::Next)
    }

    fn terminal(&self, frame: &Frame<'_>, store: &ConstraintStore, acc: &mut Acc) -> Result<(), ExecError> {
        acc.stats.complete_paths += 1;
        let post = Self::renamer(frame).expanding_quantifiers().constraint(&self.post)?;
        let violated = negate(&post);
        if violated != Constraint::False {
            if let Verdict::Sat(m) = self.complete(store, Some(violated), &frame.trace, acc)? {
                acc.record(self.violation(
                    VerdictKind::PostconditionViolation,
                    m,
                    frame,
                    None,
                    "postcondition may not hold".to_string(),
                ));
                return Ok(());
            }
        }
        match self.complete(store, None, &frame.trace, acc)? {
            Verdict::Sat(m) => {
                acc.stats.feasible_paths += 1;
                if self.opts.record_paths {
                    let (inputs, result) = self.witness(&m, &frame.sigma);
                    acc.paths.push(PathRecord {
                        trace: frame.trace.clone(),
                        inputs,
                        result,
                    });
                }
            }
            _ => acc.stats.infeasible_paths += 1,
        }
        Ok(())
    }

    fn run_frame<'s>(
        &self,
        mut frame: Frame<'s>,
        store: &mut ConstraintStore,
        stack: &mut Vec<Item<'s>>,
        acc: &mut Acc,
    ) -> Result<(), ExecError> {
        if frame.trace.len() > self.opts.max_depth {
            return Err(ExecError::DepthLimit {
                trace: format_trace(&frame.trace),
                limit: self.opts.max_depth,
            });
        }
        if !frame.pending.is_empty() {
            let before = store.len();
            let ok = Self::post_defs(store, std::mem::take(&mut frame.pending));
            if !ok || (store.len() > before && self.cheap_unsat(store, acc)) {
                acc.prune(&frame.trace);
                return Ok(());
            }
        }
        loop {
            let Some(node) = frame.cont.take() else {
                return self.terminal(&frame, store, acc);
            };
            frame.cont = node.next.clone();
            match self.exec(node.stmt, &mut frame, store, acc)? {
                Flow::Next => {}
                Flow::Top => return self.terminal(&frame, store, acc),
                Flow::Bottom(v) => {
                    acc.record(v);
                    return Ok(());
                }
                Flow::Prune => {
                    acc.prune(&frame.trace);
                    return Ok(());
                }
                Flow::Branch(succs) => {
                    acc.stats.branch_points += 1;
                    let len = store.len();
                    for s in succs.into_iter().rev() {
                        let mut trace = frame.trace.clone();
                        trace.push(s.tag);
                        stack.push(Item::Restore(len));
                        stack.push(Item::Run(Frame {
                            cont: s.cont,
                            sigma: frame.sigma.clone(),
                            consts: frame.consts.clone(),
                            trace,
                            pending: s.pending,
                            fresh: true,
                        }));
                    }
                    return Ok(());
                }
            }
        }
    }

    /// Depth-first run from `root`. With `split`, frames created by a
    /// branch at that depth are returned as tasks instead of explored.
    fn run<'s>(&self, root: Frame<'s>, mut store: ConstraintStore, split: Option<usize>) -> Vec<Segment<'s>> {
        let mut segs = Vec::new();
        let mut acc = Acc::default();
        let mut stack = vec![Item::Run(root)];
        while let Some(item) = stack.pop() {
            match item {
                Item::Restore(len) => store.truncate(len),
                Item::Run(frame) => {
                    if split.is_some_and(|d| frame.fresh && frame.trace.len() >= d) {
                        segs.push(Segment::Done(std::mem::take(&mut acc)));
                        segs.push(Segment::Task(frame, store.clone()));
                        continue;
                    }
                    if let Err(e) = self.run_frame(frame, &mut store, &mut stack, &mut acc) {
                        segs.push(Segment::Done(acc));
                        segs.push(Segment::Failed(e));
                        return segs;
                    }
                }
            }
        }
        segs.push(Segment::Done(acc));
        segs
    }
}

/// Bind contract formals to actuals. Modified arrays are read from
/// `after` when given.
fn bind_formals<'r>(
    mut r: Renamer<'r>,
    scalars: &[(String, SolverExpr)],
    arrays: &[(String, String, ArrayRef)],
    modifies: &[String],
    after: Option<&VersionMap>,
) -> Result<Renamer<'r>, ExecError> {
    for (formal, e) in scalars {
        r = r.bind_scalar(formal, e.clone());
    }
    for (formal, actual, arr) in arrays {
        let a = match after {
            Some(s) if modifies.contains(formal) => s.array(actual)?,
            _ => arr.clone(),
        };
        r = r.bind_array(formal, a);
    }
    Ok(r)
}

/// Depth at which a parallel run hands subtrees to workers.
fn split_depth(jobs: usize) -> usize {
    let target = (jobs * 4).max(2);
    (usize::BITS - (target - 1).leading_zeros()) as usize
}

fn initial_store(f: &Function, sigma: &VersionMap) -> Result<ConstraintStore, ExecError> {
    let pre = Renamer::new(sigma).expanding_quantifiers().constraint(&f.precondition())?;
    let mut store = ConstraintStore::new();
    if !pre.is_true() {
        store.post(pre);
    }
    Ok(store)
}

/// Explore every path of the function in `ast`. The reported violation is
/// the first one in depth-first (true before false) order; a resource
/// error met after it ends exploration early instead of failing.
///
/// Callees resolve against `contracts`, then against the `extern`
/// declarations of `ast`. Results do not depend on `opts.jobs`.
pub fn explore(ast: &ProgramAst, contracts: &[Contract], opts: &ExecOptions) -> Result<VerificationReport, ExecError> {
    if !ast.is_concrete() {
        return Err(ExecError::NotConcrete);
    }
    let ex = Explorer::new(ast, contracts, opts);
    let f = &ast.function;
    let sigma = VersionMap::for_function(f)?;
    let store = initial_store(f, &sigma)?;
    let root = Frame {
        cont: push_all(f.body.as_deref().unwrap_or(&[]), None),
        sigma,
        consts: ConstEnv::new(),
        trace: Vec::new(),
        pending: Vec::new(),
        fresh: false,
    };
    let segs = if opts.jobs > 1 {
        ex.run(root, store, Some(split_depth(opts.jobs)))
    } else {
        ex.run(root, store, None)
    };

    let mut tasks = Vec::new();
    let mut order = Vec::new();
    for seg in segs {
        match seg {
            Segment::Task(frame, store) => {
                order.push(None);
                tasks.push((frame, store));
            }
            other => order.push(Some(other)),
        }
    }
    let mut results: std::vec::IntoIter<Vec<Segment<'_>>> = tasks
        .into_par_iter()
        .map(|(frame, store)| ex.run(frame, store, None))
        .collect::<Vec<_>>()
        .into_iter();

    let mut total = Acc::default();
    let mut truncated = false;
    'fold: for slot in order {
        let segs = match slot {
            Some(seg) => vec![seg],
            None => results.next().expect("one result per task"),
        };
        for seg in segs {
            match seg {
                Segment::Done(acc) => total.absorb(acc),
                Segment::Failed(e) => {
                    if total.violation.is_none() {
                        return Err(e);
                    }
                    truncated = true;
                    break 'fold;
                }
                Segment::Task(..) => unreachable!("workers do not split"),
            }
        }
    }

    Ok(VerificationReport {
        program: f.name.clone(),
        verdict: total
            .violation
            .as_ref()
            .map_or(VerdictKind::PartiallyCorrect, |v| v.kind),
        violation: total.violation,
        truncated,
        stats: total.stats,
        pruned: total.pruned,
        paths: total.paths,
    })
}

impl Configuration {
    /// `⟨body, σ⊥, ρ σ⊥ b_pre⟩`
    pub fn initial(ast: &ProgramAst) -> Result<Configuration, ExecError> {
        if !ast.is_concrete() {
            return Err(ExecError::NotConcrete);
        }
        let f = &ast.function;
        let sigma = VersionMap::for_function(f)?;
        let store = initial_store(f, &sigma)?;
        Ok(Configuration {
            status: Status::Running(f.body.clone().unwrap_or_default()),
            sigma,
            consts: ConstEnv::new(),
            store,
            trace: Vec::new(),
        })
    }
}

/// Apply one rewriting rule to a running configuration.
///
/// Branch successors whose store the cheap layer refutes are dropped.
/// Terminal configurations are returned as is; checking the postcondition
/// is left to [`explore`].
pub fn step(
    ast: &ProgramAst,
    contracts: &[Contract],
    cfg: &Configuration,
    opts: &ExecOptions,
) -> Result<Vec<Configuration>, ExecError> {
    let Status::Running(list) = &cfg.status else {
        return Ok(Vec::new());
    };
    let done = |status, sigma: VersionMap, consts: ConstEnv, store, trace| Configuration {
        status,
        sigma,
        consts,
        store,
        trace,
    };
    let Some((first, rest)) = list.split_first() else {
        return Ok(vec![done(
            Status::Top,
            cfg.sigma.clone(),
            cfg.consts.clone(),
            cfg.store.clone(),
            cfg.trace.clone(),
        )]);
    };
    let ex = Explorer::new(ast, contracts, opts);
    let mut frame = Frame {
        cont: push_all(rest, None),
        sigma: cfg.sigma.clone(),
        consts: cfg.consts.clone(),
        trace: cfg.trace.clone(),
        pending: Vec::new(),
        fresh: false,
    };
    let mut store = cfg.store.clone();
    let mut acc = Acc::default();
    Ok(match ex.exec(first, &mut frame, &mut store, &mut acc)? {
        Flow::Next => vec![done(
            Status::Running(cont_to_vec(&frame.cont)),
            frame.sigma,
            frame.consts,
            store,
            frame.trace,
        )],
        Flow::Top => vec![done(Status::Top, frame.sigma, frame.consts, store, frame.trace)],
        Flow::Bottom(_) => vec![done(Status::Bottom, frame.sigma, frame.consts, store, frame.trace)],
        Flow::Prune => Vec::new(),
        Flow::Branch(succs) => {
            let mut out = Vec::new();
            for s in succs {
                let mut st = store.clone();
                if !Explorer::post_defs(&mut st, s.pending) || ex.cheap_unsat(&st, &mut acc) {
                    continue;
                }
                let mut trace = frame.trace.clone();
                trace.push(s.tag);
                out.push(done(
                    Status::Running(cont_to_vec(&s.cont)),
                    frame.sigma.clone(),
                    frame.consts.clone(),
                    st,
                    trace,
                ));
            }
            out
        }
    })
}

#[cfg(test)]
mod tests;
