//! Pretty printer producing source that parses back to the same tree.

use std::fmt::Write;

use super::ast::*;

pub fn pretty_print(ast: &ProgramAst) -> String {
    let mut out = String::new();
    for ext in &ast.externs {
        print_function(&mut out, ext, true);
        out.push('\n');
    }
    print_function(&mut out, &ast.function, false);
    out
}

fn print_function(out: &mut String, f: &Function, is_extern: bool) {
    for r in &f.requires {
        let _ = writeln!(out, "requires {}", expr_to_string(r));
    }
    for e in &f.ensures {
        let _ = writeln!(out, "ensures {}", expr_to_string(e));
    }
    if !f.modifies.is_empty() {
        let _ = writeln!(out, "modifies {}", f.modifies.join(", "));
    }
    if is_extern {
        out.push_str("extern ");
    }
    let params: Vec<String> = f
        .params
        .iter()
        .map(|p| match &p.ty {
            Type::Int => format!("int {}", p.name),
            Type::IntArray(Length::Const(n)) => format!("int[{n}] {}", p.name),
            Type::IntArray(Length::Symbolic(s)) => format!("int[{s}] {}", p.name),
        })
        .collect();
    let _ = write!(out, "fn {}({})", f.name, params.join(", "));
    match &f.body {
        None => out.push_str(";\n"),
        Some(body) => {
            out.push_str(" {\n");
            for s in body {
                print_stmt(out, s, 1);
            }
            out.push_str("}\n");
        }
    }
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("    ");
    }
}

fn print_stmt(out: &mut String, s: &Stmt, depth: usize) {
    indent(out, depth);
    match &s.kind {
        StmtKind::ArrayAssign {
            array,
            index,
            value,
        } => {
            let _ = writeln!(
                out,
                "{array}[{}] = {};",
                expr_to_string(index),
                expr_to_string(value)
            );
        }
        StmtKind::Assign {
            target,
            value,
            declares,
        } => {
            let kw = if *declares { "int " } else { "" };
            let _ = writeln!(out, "{kw}{target} = {};", expr_to_string(value));
        }
        StmtKind::Call {
            target,
            declares,
            callee,
            args,
        } => {
            let kw = if *declares { "int " } else { "" };
            let args: Vec<String> = args.iter().map(expr_to_string).collect();
            let _ = writeln!(out, "{kw}{target} = {callee}({});", args.join(", "));
        }
        StmtKind::If {
            cond,
            then_branch,
            else_branch,
        } => {
            let _ = writeln!(out, "if ({})", expr_to_string(cond));
            print_stmt(out, then_branch, depth + 1);
            if let Some(e) = else_branch {
                indent(out, depth);
                out.push_str("else\n");
                print_stmt(out, e, depth + 1);
            }
        }
        StmtKind::While { cond, body } => {
            let _ = writeln!(out, "while ({})", expr_to_string(cond));
            print_stmt(out, body, depth + 1);
        }
        StmtKind::Assert(b) => {
            let _ = writeln!(out, "assert({});", expr_to_string(b));
        }
        StmtKind::Enforce(b) => {
            let _ = writeln!(out, "enforce({});", expr_to_string(b));
        }
        StmtKind::Return(e) => {
            let _ = writeln!(out, "return {};", expr_to_string(e));
        }
        StmtKind::Block(items) => {
            out.push_str("{\n");
            for item in items {
                print_stmt(out, item, depth + 1);
            }
            indent(out, depth);
            out.push_str("}\n");
        }
    }
}

/// Render an expression; every compound operand is parenthesized.
pub fn expr_to_string(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Int(v) => v.to_string(),
        ExprKind::Bool(b) => b.to_string(),
        ExprKind::Var(v) => v.clone(),
        ExprKind::Index(a, i) => format!("{a}[{}]", expr_to_string(i)),
        ExprKind::Length(a) => format!("{a}.length"),
        ExprKind::Unary(UnOp::Neg, inner) => format!("-{}", operand(inner)),
        ExprKind::Unary(UnOp::Not, inner) => format!("!{}", operand(inner)),
        ExprKind::Binary(op, l, r) => {
            format!("{} {} {}", operand(l), op.symbol(), operand(r))
        }
        ExprKind::Quant {
            q,
            var,
            lo,
            hi,
            body,
        } => {
            let kw = match q {
                Quantifier::Forall => "forall",
                Quantifier::Exists => "exists",
            };
            format!(
                "{kw} {var} in [{}, {}): {}",
                expr_to_string(lo),
                expr_to_string(hi),
                expr_to_string(body)
            )
        }
        ExprKind::AllDifferent(a) => format!("alldifferent({a})"),
    }
}

fn operand(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Binary(..) | ExprKind::Quant { .. } | ExprKind::Unary(..) => {
            format!("({})", expr_to_string(e))
        }
        ExprKind::Int(v) if *v < 0 => format!("({v})"),
        _ => expr_to_string(e),
    }
}
