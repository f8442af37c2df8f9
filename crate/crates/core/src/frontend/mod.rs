//! Parsing, checking and instantiation of `.cpv` programs.
//!
//! The grammar is documented in `docs/grammar.md`.

pub mod ast;
mod check;
mod lexer;
mod parser;
mod printer;

use std::collections::BTreeMap;

use thiserror::Error;

pub use ast::*;
pub use printer::{expr_to_string, pretty_print};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FrontendError {
    #[error("syntax error at {span}: {message}")]
    Syntax { span: Span, message: String },
    #[error("use of undeclared identifier `{name}` at {span}")]
    Undeclared { name: String, span: Span },
    #[error("`{name}` declared twice (at {span})")]
    Redeclared { name: String, span: Span },
    #[error("type mismatch at {span}: {message}")]
    TypeMismatch { span: Span, message: String },
    #[error("no binding supplied for symbolic bound `{name}`")]
    MissingBinding { name: String },
    #[error("array length for `{name}` must be positive, got {value}")]
    NonPositiveLength { name: String, value: i64 },
}

/// Parse and check a `.cpv` source file.
pub fn parse_program(source: &str) -> Result<ProgramAst, FrontendError> {
    let ast = parser::parse_unchecked(source)?;
    check::check_program(&ast)?;
    Ok(ast)
}

/// Replace every symbolic array bound with its binding.
///
/// Array types become concrete, occurrences of the bound name and of
/// `a.length` in expressions become literals. Extra bindings are ignored.
pub fn substitute_params(
    ast: &ProgramAst,
    bindings: &BTreeMap<String, i64>,
) -> Result<ProgramAst, FrontendError> {
    let mut values = BTreeMap::new();
    for name in ast.symbolic_bounds() {
        let v = *bindings
            .get(&name)
            .ok_or_else(|| FrontendError::MissingBinding { name: name.clone() })?;
        if v <= 0 {
            return Err(FrontendError::NonPositiveLength { name, value: v });
        }
        values.insert(name, v);
    }
    let mut out = ast.clone();
    substitute_function(&mut out.function, &values)?;
    for ext in &mut out.externs {
        substitute_function(ext, &values)?;
    }
    Ok(out)
}

fn substitute_function(f: &mut Function, bounds: &BTreeMap<String, i64>) -> Result<(), FrontendError> {
    let mut lengths = BTreeMap::new();
    for p in &mut f.params {
        if let Type::IntArray(len) = &mut p.ty {
            if let Length::Symbolic(name) = len {
                *len = Length::Const(bounds[name.as_str()]);
            }
            if let Length::Const(n) = len {
                if *n <= 0 {
                    return Err(FrontendError::NonPositiveLength {
                        name: p.name.clone(),
                        value: *n,
                    });
                }
                lengths.insert(p.name.clone(), *n);
            }
        }
    }
    let rewrite = |e: &mut Expr| rewrite_expr(e, bounds, &lengths);
    f.requires.iter_mut().for_each(rewrite);
    f.ensures.iter_mut().for_each(rewrite);
    if let Some(body) = &mut f.body {
        for s in body {
            rewrite_stmt(s, bounds, &lengths);
        }
    }
    Ok(())
}

fn rewrite_stmt(s: &mut Stmt, bounds: &BTreeMap<String, i64>, lengths: &BTreeMap<String, i64>) {
    let re = |e: &mut Expr| rewrite_expr(e, bounds, lengths);
    match &mut s.kind {
        StmtKind::ArrayAssign { index, value, .. } => {
            re(index);
            re(value);
        }
        StmtKind::Assign { value, .. } => re(value),
        StmtKind::If {
            cond,
            then_branch,
            else_branch,
        } => {
            re(cond);
            rewrite_stmt(then_branch, bounds, lengths);
            if let Some(e) = else_branch {
                rewrite_stmt(e, bounds, lengths);
            }
        }
        StmtKind::While { cond, body } => {
            re(cond);
            rewrite_stmt(body, bounds, lengths);
        }
        StmtKind::Assert(b) | StmtKind::Enforce(b) | StmtKind::Return(b) => re(b),
        StmtKind::Block(items) => {
            for item in items {
                rewrite_stmt(item, bounds, lengths);
            }
        }
        StmtKind::Call { args, .. } => args.iter_mut().for_each(re),
    }
}

fn rewrite_expr(e: &mut Expr, bounds: &BTreeMap<String, i64>, lengths: &BTreeMap<String, i64>) {
    match &mut e.kind {
        ExprKind::Var(name) => {
            if let Some(v) = bounds.get(name.as_str()) {
                e.kind = ExprKind::Int(*v);
            }
        }
        ExprKind::Length(name) => {
            if let Some(v) = lengths.get(name.as_str()) {
                e.kind = ExprKind::Int(*v);
            }
        }
        ExprKind::Int(_) | ExprKind::Bool(_) | ExprKind::AllDifferent(_) => {}
        ExprKind::Index(_, i) | ExprKind::Unary(_, i) => rewrite_expr(i, bounds, lengths),
        ExprKind::Binary(_, l, r) => {
            rewrite_expr(l, bounds, lengths);
            rewrite_expr(r, bounds, lengths);
        }
        ExprKind::Quant { lo, hi, body, .. } => {
            rewrite_expr(lo, bounds, lengths);
            rewrite_expr(hi, bounds, lengths);
            rewrite_expr(body, bounds, lengths);
        }
    }
}
