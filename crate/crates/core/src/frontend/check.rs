//! Name resolution and type checking.

use std::collections::BTreeMap;

use super::ast::*;
use super::FrontendError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ty {
    Int,
    Bool,
    Array,
}

impl Ty {
    fn name(self) -> &'static str {
        match self {
            Ty::Int => "int",
            Ty::Bool => "bool",
            Ty::Array => "int[]",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ctx {
    /// Program text: no quantifiers, no `alldifferent`, no `result`.
    Code,
    Pre,
    Post,
}

struct Scope<'a> {
    names: BTreeMap<String, Ty>,
    bounds: &'a [String],
    quantified: Vec<String>,
}

impl Scope<'_> {
    fn lookup(&self, name: &str) -> Option<Ty> {
        if self.quantified.iter().any(|q| q == name) || self.bounds.iter().any(|b| b == name) {
            return Some(Ty::Int);
        }
        self.names.get(name).copied()
    }
}

pub fn check_program(ast: &ProgramAst) -> Result<(), FrontendError> {
    let bounds = ast.symbolic_bounds();
    for ext in &ast.externs {
        check_function(ext, &bounds)?;
    }
    check_function(&ast.function, &bounds)
}

fn mismatch(span: Span, message: String) -> FrontendError {
    FrontendError::TypeMismatch { span, message }
}

pub(crate) fn check_function(f: &Function, bounds: &[String]) -> Result<(), FrontendError> {
    let mut scope = Scope {
        names: BTreeMap::new(),
        bounds,
        quantified: Vec::new(),
    };
    for p in &f.params {
        if p.name == "result" || scope.names.contains_key(&p.name) || bounds.contains(&p.name) {
            return Err(FrontendError::Redeclared {
                name: p.name.clone(),
                span: p.span,
            });
        }
        if let Type::IntArray(Length::Const(n)) = &p.ty {
            if *n <= 0 {
                return Err(FrontendError::NonPositiveLength {
                    name: p.name.clone(),
                    value: *n,
                });
            }
        }
        let ty = if p.ty.is_array() { Ty::Array } else { Ty::Int };
        scope.names.insert(p.name.clone(), ty);
    }
    for m in &f.modifies {
        if scope.names.get(m) != Some(&Ty::Array) {
            return Err(mismatch(
                f.span,
                format!("`modifies {m}` must name an array parameter"),
            ));
        }
    }
    for pre in &f.requires {
        expect(&mut scope, pre, Ty::Bool, Ctx::Pre)?;
    }
    let mut post_scope = Scope {
        names: scope.names.clone(),
        bounds,
        quantified: Vec::new(),
    };
    post_scope.names.insert("result".into(), Ty::Int);
    for post in &f.ensures {
        expect(&mut post_scope, post, Ty::Bool, Ctx::Post)?;
    }
    if let Some(body) = &f.body {
        for s in body {
            check_stmt(&mut scope, s)?;
        }
    }
    Ok(())
}

fn declare(scope: &mut Scope<'_>, name: &str, span: Span) -> Result<(), FrontendError> {
    if name == "result" || scope.lookup(name).is_some() {
        return Err(FrontendError::Redeclared {
            name: name.to_string(),
            span,
        });
    }
    scope.names.insert(name.to_string(), Ty::Int);
    Ok(())
}

fn assignable_scalar(scope: &Scope<'_>, name: &str, span: Span) -> Result<(), FrontendError> {
    if scope.bounds.iter().any(|b| b == name) {
        return Err(mismatch(span, format!("cannot assign to bound `{name}`")));
    }
    match scope.names.get(name) {
        Some(Ty::Int) => Ok(()),
        Some(_) => Err(mismatch(span, format!("`{name}` is an array, not a scalar"))),
        None => Err(FrontendError::Undeclared {
            name: name.to_string(),
            span,
        }),
    }
}

fn check_stmt(scope: &mut Scope<'_>, s: &Stmt) -> Result<(), FrontendError> {
    match &s.kind {
        StmtKind::ArrayAssign {
            array,
            index,
            value,
        } => {
            match scope.names.get(array) {
                Some(Ty::Array) => {}
                Some(_) => {
                    return Err(mismatch(s.span, format!("`{array}` is not an array")));
                }
                None => {
                    return Err(FrontendError::Undeclared {
                        name: array.clone(),
                        span: s.span,
                    })
                }
            }
            expect(scope, index, Ty::Int, Ctx::Code)?;
            expect(scope, value, Ty::Int, Ctx::Code)
        }
        StmtKind::Assign {
            target,
            value,
            declares,
        } => {
            expect(scope, value, Ty::Int, Ctx::Code)?;
            if *declares {
                declare(scope, target, s.span)
            } else {
                assignable_scalar(scope, target, s.span)
            }
        }
        StmtKind::If {
            cond,
            then_branch,
            else_branch,
        } => {
            expect(scope, cond, Ty::Bool, Ctx::Code)?;
            check_stmt(scope, then_branch)?;
            if let Some(e) = else_branch {
                check_stmt(scope, e)?;
            }
            Ok(())
        }
        StmtKind::While { cond, body } => {
            expect(scope, cond, Ty::Bool, Ctx::Code)?;
            check_stmt(scope, body)
        }
        StmtKind::Assert(b) | StmtKind::Enforce(b) => expect(scope, b, Ty::Bool, Ctx::Code),
        StmtKind::Return(e) => expect(scope, e, Ty::Int, Ctx::Code),
        StmtKind::Block(items) => {
            for item in items {
                check_stmt(scope, item)?;
            }
            Ok(())
        }
        StmtKind::Call {
            target,
            declares,
            args,
            ..
        } => {
            for a in args {
                match &a.kind {
                    ExprKind::Var(name) if scope.lookup(name) == Some(Ty::Array) => {}
                    _ => expect(scope, a, Ty::Int, Ctx::Code)?,
                }
            }
            if *declares {
                declare(scope, target, s.span)
            } else {
                assignable_scalar(scope, target, s.span)
            }
        }
    }
}

fn expect(scope: &mut Scope<'_>, e: &Expr, want: Ty, ctx: Ctx) -> Result<(), FrontendError> {
    let got = infer(scope, e, ctx)?;
    if got != want {
        return Err(mismatch(
            e.span,
            format!("expected {} expression, found {}", want.name(), got.name()),
        ));
    }
    Ok(())
}

fn infer(scope: &mut Scope<'_>, e: &Expr, ctx: Ctx) -> Result<Ty, FrontendError> {
    match &e.kind {
        ExprKind::Int(_) => Ok(Ty::Int),
        ExprKind::Bool(_) => Ok(Ty::Bool),
        ExprKind::Var(name) => match scope.lookup(name) {
            Some(Ty::Array) => Err(mismatch(
                e.span,
                format!("array `{name}` used as a scalar"),
            )),
            Some(t) => Ok(t),
            None => Err(FrontendError::Undeclared {
                name: name.clone(),
                span: e.span,
            }),
        },
        ExprKind::Index(name, idx) => {
            array_name(scope, name, e.span)?;
            expect(scope, idx, Ty::Int, ctx)?;
            Ok(Ty::Int)
        }
        ExprKind::Length(name) => {
            array_name(scope, name, e.span)?;
            Ok(Ty::Int)
        }
        ExprKind::Unary(UnOp::Neg, inner) => {
            expect(scope, inner, Ty::Int, ctx)?;
            Ok(Ty::Int)
        }
        ExprKind::Unary(UnOp::Not, inner) => {
            expect(scope, inner, Ty::Bool, ctx)?;
            Ok(Ty::Bool)
        }
        ExprKind::Binary(op, l, r) => {
            if op.is_arith() {
                expect(scope, l, Ty::Int, ctx)?;
                expect(scope, r, Ty::Int, ctx)?;
                Ok(Ty::Int)
            } else if op.is_relational() {
                expect(scope, l, Ty::Int, ctx)?;
                expect(scope, r, Ty::Int, ctx)?;
                Ok(Ty::Bool)
            } else {
                expect(scope, l, Ty::Bool, ctx)?;
                expect(scope, r, Ty::Bool, ctx)?;
                Ok(Ty::Bool)
            }
        }
        ExprKind::Quant {
            var, lo, hi, body, ..
        } => {
            if ctx == Ctx::Code {
                return Err(mismatch(
                    e.span,
                    "quantifiers are only allowed in contracts".into(),
                ));
            }
            if scope.lookup(var).is_some() {
                return Err(FrontendError::Redeclared {
                    name: var.clone(),
                    span: e.span,
                });
            }
            expect(scope, lo, Ty::Int, ctx)?;
            expect(scope, hi, Ty::Int, ctx)?;
            scope.quantified.push(var.clone());
            let r = expect(scope, body, Ty::Bool, ctx);
            scope.quantified.pop();
            r.map(|_| Ty::Bool)
        }
        ExprKind::AllDifferent(name) => {
            if ctx == Ctx::Code {
                return Err(mismatch(
                    e.span,
                    "`alldifferent` is only allowed in contracts".into(),
                ));
            }
            array_name(scope, name, e.span)?;
            Ok(Ty::Bool)
        }
    }
}

fn array_name(scope: &Scope<'_>, name: &str, span: Span) -> Result<(), FrontendError> {
    match scope.names.get(name) {
        Some(Ty::Array) => Ok(()),
        Some(_) => Err(mismatch(span, format!("scalar `{name}` used as an array"))),
        None => Err(FrontendError::Undeclared {
            name: name.to_string(),
            span,
        }),
    }
}

#[cfg(test)]
mod tests {
    use crate::frontend::{parse_program, FrontendError};

    #[test]
    fn undeclared_identifier() {
        let err = parse_program("fn f(int x) { y = x; }").unwrap_err();
        assert!(matches!(err, FrontendError::Undeclared { ref name, .. } if name == "y"));
    }

    #[test]
    fn array_used_as_scalar() {
        let err = parse_program("fn f(int[4] t) { int x = t + 1; }").unwrap_err();
        assert!(matches!(err, FrontendError::TypeMismatch { .. }));
    }

    #[test]
    fn scalar_used_as_array() {
        let err = parse_program("fn f(int x) { int y = x[0]; }").unwrap_err();
        assert!(matches!(err, FrontendError::TypeMismatch { .. }));
    }

    #[test]
    fn redeclaration_rejected() {
        let err = parse_program("fn f(int x) { int y = 1; if (x > 0) { int y = 2; } }").unwrap_err();
        assert!(matches!(err, FrontendError::Redeclared { ref name, .. } if name == "y"));
    }

    #[test]
    fn result_only_in_postcondition() {
        assert!(parse_program("fn f(int x) ensures result == x { return x; }").is_ok());
        assert!(parse_program("fn f(int x) requires result == x { return x; }").is_err());
        assert!(parse_program("fn f(int x) { return result; }").is_err());
    }

    #[test]
    fn quantifiers_not_in_code() {
        let err = parse_program("fn f(int[3] t) { assert(forall i in [0, 3): t[i] > 0); }");
        assert!(err.is_err());
    }

    #[test]
    fn quantifier_may_not_shadow() {
        let err = parse_program("fn f(int[3] t, int i) requires forall i in [0, 3): t[i] > 0 { }");
        assert!(matches!(err, Err(FrontendError::Redeclared { .. })));
    }

    #[test]
    fn locals_not_visible_in_contracts() {
        let err = parse_program("fn f(int x) ensures y == 1 { int y = 1; }");
        assert!(matches!(err, Err(FrontendError::Undeclared { .. })));
    }
}
