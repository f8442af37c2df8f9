//! Syntax tree of the `.cpv` contract language.
//!
//! Integer and boolean expressions share one [`Expr`] type; the checker in
//! [`super::check`] enforces the split. Every node carries a [`Span`].

use std::fmt;

/// Source position (1-based line and column).
///
/// Spans never take part in equality, so two trees that differ only in
/// layout compare equal.
#[derive(Debug, Clone, Copy, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn new(line: u32, col: u32) -> Self {
        Span { line, col }
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Array length as written in a parameter type: either a literal or a
/// symbolic bound such as `N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Length {
    Const(i64),
    Symbolic(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Type {
    Int,
    IntArray(Length),
}

impl Type {
    pub fn is_array(&self) -> bool {
        matches!(self, Type::IntArray(_))
    }

    /// Concrete length of an array type, if known.
    pub fn len(&self) -> Option<i64> {
        match self {
            Type::IntArray(Length::Const(n)) => Some(*n),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub ty: Type,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Implies,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
            BinOp::Implies => "==>",
        }
    }

    pub fn is_arith(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div)
    }

    pub fn is_relational(self) -> bool {
        matches!(
            self,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge
        )
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or | BinOp::Implies)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantifier {
    Forall,
    Exists,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Int(i64),
    Bool(bool),
    Var(String),
    /// `a[e]`
    Index(String, Box<Expr>),
    /// `a.length`
    Length(String),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// `forall i in [lo, hi): body` (half-open range)
    Quant {
        q: Quantifier,
        var: String,
        lo: Box<Expr>,
        hi: Box<Expr>,
        body: Box<Expr>,
    },
    /// `alldifferent(a)`
    AllDifferent(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    pub fn int(v: i64) -> Self {
        Expr::new(ExprKind::Int(v), Span::default())
    }

    pub fn var(name: &str) -> Self {
        Expr::new(ExprKind::Var(name.to_string()), Span::default())
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Self {
        Expr::new(ExprKind::Binary(op, Box::new(l), Box::new(r)), Span::default())
    }

    pub fn not(e: Expr) -> Self {
        Expr::new(ExprKind::Unary(UnOp::Not, Box::new(e)), Span::default())
    }

    /// Pre-order visit of every sub-expression.
    pub fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match &self.kind {
            ExprKind::Int(_)
            | ExprKind::Bool(_)
            | ExprKind::Var(_)
            | ExprKind::Length(_)
            | ExprKind::AllDifferent(_) => {}
            ExprKind::Index(_, e) | ExprKind::Unary(_, e) => e.visit(f),
            ExprKind::Binary(_, l, r) => {
                l.visit(f);
                r.visit(f);
            }
            ExprKind::Quant { lo, hi, body, .. } => {
                lo.visit(f);
                hi.visit(f);
                body.visit(f);
            }
        }
    }
}

/// Boolean expressions of the program text (conditions, asserts).
pub type BoolExpr = Expr;
/// Contract expressions: boolean expressions plus bounded quantifiers and
/// `alldifferent`.
pub type SpecExpr = Expr;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    /// `a[index] = value;`
    ArrayAssign {
        array: String,
        index: Expr,
        value: Expr,
    },
    /// `x = e;` or, with `declares`, `int x = e;`
    Assign {
        target: String,
        value: Expr,
        declares: bool,
    },
    If {
        cond: Expr,
        then_branch: Box<Stmt>,
        else_branch: Option<Box<Stmt>>,
    },
    While {
        cond: Expr,
        body: Box<Stmt>,
    },
    Assert(Expr),
    Enforce(Expr),
    Return(Expr),
    Block(Vec<Stmt>),
    /// `x = f(args);` / `int x = f(args);` — resolved against a contract.
    Call {
        target: String,
        declares: bool,
        callee: String,
        args: Vec<Expr>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

impl Stmt {
    pub fn new(kind: StmtKind, span: Span) -> Self {
        Stmt { kind, span }
    }
}

/// A function with its contract. `body` is `None` for `extern` declarations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Function {
    pub name: String,
    pub params: Vec<Param>,
    pub requires: Vec<SpecExpr>,
    pub ensures: Vec<SpecExpr>,
    pub modifies: Vec<String>,
    pub body: Option<Vec<Stmt>>,
    /// Position of the `fn` keyword; decision tags count lines from here.
    pub span: Span,
}

impl Function {
    pub fn param(&self, name: &str) -> Option<&Param> {
        self.params.iter().find(|p| p.name == name)
    }

    pub fn precondition(&self) -> SpecExpr {
        conjoin(&self.requires)
    }

    pub fn postcondition(&self) -> SpecExpr {
        conjoin(&self.ensures)
    }

    /// Line number relative to the `fn` keyword (which is line 1).
    pub fn relative_line(&self, span: Span) -> u32 {
        span.line.saturating_sub(self.span.line) + 1
    }
}

fn conjoin(parts: &[SpecExpr]) -> SpecExpr {
    let mut iter = parts.iter().cloned();
    match iter.next() {
        None => Expr::new(ExprKind::Bool(true), Span::default()),
        Some(first) => iter.fold(first, |acc, e| Expr::binary(BinOp::And, acc, e)),
    }
}

/// One parsed `.cpv` file: the verified function plus contract-only callee
/// declarations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgramAst {
    pub function: Function,
    pub externs: Vec<Function>,
}

impl ProgramAst {
    pub fn name(&self) -> &str {
        &self.function.name
    }

    /// Every symbolic array bound mentioned in any parameter list.
    pub fn symbolic_bounds(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for f in std::iter::once(&self.function).chain(self.externs.iter()) {
            for p in &f.params {
                if let Type::IntArray(Length::Symbolic(n)) = &p.ty {
                    if !out.contains(n) {
                        out.push(n.clone());
                    }
                }
            }
        }
        out
    }

    pub fn is_concrete(&self) -> bool {
        self.symbolic_bounds().is_empty()
    }
}
