//! Version maps and the renaming of program expressions into constraints
//! over versioned solver variables.
//!
//! Every program variable `x` is mapped to its current version `i`; a read
//! of `x` becomes the solver variable `x^i`. Assignments bump the version
//! instead of mutating anything, so constraints can relate old and new
//! values.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::frontend::{BinOp, Expr, ExprKind, Function, Quantifier, Type, UnOp};

pub type Name = Arc<str>;

/// Reserved name of the return value.
pub const RESULT: &str = "result";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarRef {
    pub name: Name,
    pub version: u32,
}

impl VarRef {
    pub fn new(name: &str, version: u32) -> Self {
        VarRef {
            name: Arc::from(name),
            version,
        }
    }
}

impl fmt::Display for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.name, self.version)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArrayRef {
    pub name: Name,
    pub version: u32,
    pub len: usize,
}

impl ArrayRef {
    pub fn new(name: &str, version: u32, len: usize) -> Self {
        ArrayRef {
            name: Arc::from(name),
            version,
            len,
        }
    }

    pub fn cell(&self, i: usize) -> SolverExpr {
        SolverExpr::Select(self.clone(), Box::new(SolverExpr::Const(i as i64)))
    }
}

impl fmt::Display for ArrayRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.name, self.version)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }

    /// Exact integer semantics; `/` truncates toward zero. `None` on
    /// division by zero or i64 overflow.
    pub fn apply(self, a: i64, b: i64) -> Option<i64> {
        match self {
            ArithOp::Add => a.checked_add(b),
            ArithOp::Sub => a.checked_sub(b),
            ArithOp::Mul => a.checked_mul(b),
            ArithOp::Div => {
                if b == 0 {
                    None
                } else {
                    a.checked_div(b)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl RelOp {
    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Eq => "==",
            RelOp::Ne => "!=",
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Gt => ">",
            RelOp::Ge => ">=",
        }
    }

    pub fn complement(self) -> RelOp {
        match self {
            RelOp::Eq => RelOp::Ne,
            RelOp::Ne => RelOp::Eq,
            RelOp::Lt => RelOp::Ge,
            RelOp::Le => RelOp::Gt,
            RelOp::Gt => RelOp::Le,
            RelOp::Ge => RelOp::Lt,
        }
    }

    pub fn holds(self, a: i64, b: i64) -> bool {
        match self {
            RelOp::Eq => a == b,
            RelOp::Ne => a != b,
            RelOp::Lt => a < b,
            RelOp::Le => a <= b,
            RelOp::Gt => a > b,
            RelOp::Ge => a >= b,
        }
    }

    fn from_binop(op: BinOp) -> Option<RelOp> {
        Some(match op {
            BinOp::Eq => RelOp::Eq,
            BinOp::Ne => RelOp::Ne,
            BinOp::Lt => RelOp::Lt,
            BinOp::Le => RelOp::Le,
            BinOp::Gt => RelOp::Gt,
            BinOp::Ge => RelOp::Ge,
            _ => return None,
        })
    }
}

/// Solver expressions over versioned variables and arrays.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SolverExpr {
    Const(i64),
    Var(VarRef),
    Select(ArrayRef, Box<SolverExpr>),
    Neg(Box<SolverExpr>),
    Bin(ArithOp, Box<SolverExpr>, Box<SolverExpr>),
}

impl SolverExpr {
    pub fn var(v: VarRef) -> Self {
        SolverExpr::Var(v)
    }

    pub fn as_const(&self) -> Option<i64> {
        match self {
            SolverExpr::Const(c) => Some(*c),
            _ => None,
        }
    }

    /// Build `op(a, b)`, folding when both sides are literals.
    pub fn bin(op: ArithOp, a: SolverExpr, b: SolverExpr) -> SolverExpr {
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            if let Some(v) = op.apply(x, y) {
                return SolverExpr::Const(v);
            }
        }
        SolverExpr::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn neg(a: SolverExpr) -> SolverExpr {
        match a.as_const().and_then(i64::checked_neg) {
            Some(v) => SolverExpr::Const(v),
            None => SolverExpr::Neg(Box::new(a)),
        }
    }

    pub fn visit(&self, f: &mut impl FnMut(&SolverExpr)) {
        f(self);
        match self {
            SolverExpr::Const(_) | SolverExpr::Var(_) => {}
            SolverExpr::Select(_, i) | SolverExpr::Neg(i) => i.visit(f),
            SolverExpr::Bin(_, a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    /// Every (identifier, version) pair occurring in the expression.
    pub fn occurrences(&self) -> std::collections::BTreeSet<(String, u32)> {
        let mut out = std::collections::BTreeSet::new();
        self.visit(&mut |e| match e {
            SolverExpr::Var(v) => {
                out.insert((v.name.to_string(), v.version));
            }
            SolverExpr::Select(a, _) => {
                out.insert((a.name.to_string(), a.version));
            }
            _ => {}
        });
        out
    }
}

impl fmt::Display for SolverExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverExpr::Const(c) if *c < 0 => write!(f, "({c})"),
            SolverExpr::Const(c) => write!(f, "{c}"),
            SolverExpr::Var(v) => write!(f, "{v}"),
            SolverExpr::Select(a, i) => write!(f, "{a}[{i}]"),
            SolverExpr::Neg(a) => write!(f, "-({a})"),
            SolverExpr::Bin(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
        }
    }
}

/// Constraints over solver expressions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constraint {
    True,
    False,
    Cmp(RelOp, SolverExpr, SolverExpr),
    Not(Box<Constraint>),
    And(Vec<Constraint>),
    Or(Vec<Constraint>),
    Implies(Box<Constraint>, Box<Constraint>),
    /// Pairwise distinct values.
    AllDifferent(Vec<SolverExpr>),
}

impl Constraint {
    /// `a op b`, folded to `true`/`false` when both sides are literals.
    pub fn cmp(op: RelOp, a: SolverExpr, b: SolverExpr) -> Constraint {
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            return Constraint::from_bool(op.holds(x, y));
        }
        Constraint::Cmp(op, a, b)
    }

    pub fn eq(a: SolverExpr, b: SolverExpr) -> Constraint {
        Constraint::cmp(RelOp::Eq, a, b)
    }

    pub fn from_bool(b: bool) -> Constraint {
        if b {
            Constraint::True
        } else {
            Constraint::False
        }
    }

    pub fn and(parts: Vec<Constraint>) -> Constraint {
        let mut out = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                Constraint::True => {}
                Constraint::False => return Constraint::False,
                Constraint::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Constraint::True,
            1 => out.pop().unwrap(),
            _ => Constraint::And(out),
        }
    }

    pub fn or(parts: Vec<Constraint>) -> Constraint {
        let mut out = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                Constraint::False => {}
                Constraint::True => return Constraint::True,
                Constraint::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Constraint::False,
            1 => out.pop().unwrap(),
            _ => Constraint::Or(out),
        }
    }

    pub fn not(c: Constraint) -> Constraint {
        match c {
            Constraint::True => Constraint::False,
            Constraint::False => Constraint::True,
            other => Constraint::Not(Box::new(other)),
        }
    }

    pub fn implies(a: Constraint, b: Constraint) -> Constraint {
        match (&a, &b) {
            (Constraint::True, _) => b,
            (Constraint::False, _) | (_, Constraint::True) => Constraint::True,
            _ => Constraint::Implies(Box::new(a), Box::new(b)),
        }
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Constraint::True)
    }

    /// Visit every solver expression at the top of an atom.
    pub fn visit_exprs(&self, f: &mut impl FnMut(&SolverExpr)) {
        match self {
            Constraint::True | Constraint::False => {}
            Constraint::Cmp(_, a, b) => {
                f(a);
                f(b);
            }
            Constraint::Not(c) => c.visit_exprs(f),
            Constraint::And(cs) | Constraint::Or(cs) => cs.iter().for_each(|c| c.visit_exprs(f)),
            Constraint::Implies(a, b) => {
                a.visit_exprs(f);
                b.visit_exprs(f);
            }
            Constraint::AllDifferent(es) => es.iter().for_each(f),
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join(f: &mut fmt::Formatter<'_>, cs: &[Constraint], sep: &str) -> fmt::Result {
            write!(f, "(")?;
            for (i, c) in cs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {sep} ")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, ")")
        }
        match self {
            Constraint::True => write!(f, "true"),
            Constraint::False => write!(f, "false"),
            Constraint::Cmp(op, a, b) => write!(f, "{a} {} {b}", op.symbol()),
            Constraint::Not(c) => write!(f, "!({c})"),
            Constraint::And(cs) => join(f, cs, "&&"),
            Constraint::Or(cs) => join(f, cs, "||"),
            Constraint::Implies(a, b) => write!(f, "({a} ==> {b})"),
            Constraint::AllDifferent(es) => {
                write!(f, "alldifferent(")?;
                for (i, e) in es.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RenameError {
    #[error("unknown identifier `{0}`")]
    Unknown(String),
    #[error("`{0}` is not an array")]
    NotArray(String),
    #[error("quantifier over `{0}` must be expanded before renaming")]
    Quantifier(String),
    #[error("quantifier range for `{0}` is not concrete")]
    NonConcreteRange(String),
    #[error("array `{0}` has no concrete length")]
    SymbolicLength(String),
    #[error("integer expression used where a constraint is expected")]
    NotBoolean,
    #[error("boolean expression used where an integer is expected")]
    NotInteger,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Entry {
    version: u32,
    len: Option<usize>,
}

/// Total map from identifiers to version numbers. Cloning is cheap and
/// bumping never affects other clones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VersionMap {
    entries: Arc<BTreeMap<Name, Entry>>,
}

impl VersionMap {
    /// The all-zero map over the given scalars and arrays (with lengths).
    pub fn initial<'a>(
        scalars: impl IntoIterator<Item = &'a str>,
        arrays: impl IntoIterator<Item = (&'a str, usize)>,
    ) -> Self {
        let mut m = BTreeMap::new();
        for s in scalars {
            m.insert(Arc::from(s), Entry { version: 0, len: None });
        }
        for (a, len) in arrays {
            m.insert(
                Arc::from(a),
                Entry {
                    version: 0,
                    len: Some(len),
                },
            );
        }
        VersionMap {
            entries: Arc::new(m),
        }
    }

    /// Initial map for a concrete function: parameters and `result`.
    /// Locals enter the map at their first assignment.
    pub fn for_function(f: &Function) -> Result<Self, RenameError> {
        let mut scalars: Vec<String> = vec![RESULT.to_string()];
        let mut arrays = Vec::new();
        for p in &f.params {
            match &p.ty {
                Type::Int => scalars.push(p.name.clone()),
                Type::IntArray(_) => {
                    let len = p
                        .ty
                        .len()
                        .ok_or_else(|| RenameError::SymbolicLength(p.name.clone()))?;
                    arrays.push((p.name.clone(), len as usize));
                }
            }
        }
        Ok(VersionMap::initial(
            scalars.iter().map(String::as_str),
            arrays.iter().map(|(a, n)| (a.as_str(), *n)),
        ))
    }

    pub fn version(&self, name: &str) -> Option<u32> {
        self.entries.get(name).map(|e| e.version)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn array_len(&self, name: &str) -> Option<usize> {
        self.entries.get(name).and_then(|e| e.len)
    }

    /// `σ[x / σ(x) + 1]`
    pub fn bump(&self, name: &str) -> Result<VersionMap, RenameError> {
        let mut next = self.clone();
        let entries = Arc::make_mut(&mut next.entries);
        let entry = entries
            .get_mut(name)
            .ok_or_else(|| RenameError::Unknown(name.to_string()))?;
        entry.version += 1;
        Ok(next)
    }

    /// Version for the target of a scalar assignment: 0 the first time a
    /// local is written, `bump` afterwards.
    pub fn assign(&self, name: &str) -> VersionMap {
        let mut next = self.clone();
        let entries = Arc::make_mut(&mut next.entries);
        match entries.get_mut(name) {
            Some(e) => e.version += 1,
            None => {
                entries.insert(Arc::from(name), Entry { version: 0, len: None });
            }
        }
        next
    }

    pub fn var(&self, name: &str) -> Result<VarRef, RenameError> {
        let (key, e) = self
            .entries
            .get_key_value(name)
            .ok_or_else(|| RenameError::Unknown(name.to_string()))?;
        if e.len.is_some() {
            return Err(RenameError::Unknown(name.to_string()));
        }
        Ok(VarRef {
            name: key.clone(),
            version: e.version,
        })
    }

    pub fn array(&self, name: &str) -> Result<ArrayRef, RenameError> {
        let (key, e) = self
            .entries
            .get_key_value(name)
            .ok_or_else(|| RenameError::Unknown(name.to_string()))?;
        let len = e.len.ok_or_else(|| RenameError::NotArray(name.to_string()))?;
        Ok(ArrayRef {
            name: key.clone(),
            version: e.version,
            len,
        })
    }

    /// Identifiers in deterministic order.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(|k| &**k)
    }
}

/// Known constant values of versioned scalars, used to simplify on the fly.
pub type ConstEnv = BTreeMap<VarRef, i64>;

/// Configurable renaming function ρ.
///
/// Besides the version map it may carry a constant environment (versioned
/// variables with a known value are replaced by that value) and explicit
/// bindings that take precedence over σ: quantified variables, formal
/// parameters of a contract, the `result` of a call.
#[derive(Clone)]
pub struct Renamer<'a> {
    versions: &'a VersionMap,
    consts: Option<&'a ConstEnv>,
    scalars: BTreeMap<String, SolverExpr>,
    arrays: BTreeMap<String, ArrayRef>,
    expand_quantifiers: bool,
}

impl<'a> Renamer<'a> {
    pub fn new(versions: &'a VersionMap) -> Self {
        Renamer {
            versions,
            consts: None,
            scalars: BTreeMap::new(),
            arrays: BTreeMap::new(),
            expand_quantifiers: false,
        }
    }

    pub fn with_consts(mut self, consts: &'a ConstEnv) -> Self {
        self.consts = Some(consts);
        self
    }

    pub fn expanding_quantifiers(mut self) -> Self {
        self.expand_quantifiers = true;
        self
    }

    pub fn bind_scalar(mut self, name: &str, value: SolverExpr) -> Self {
        self.scalars.insert(name.to_string(), value);
        self
    }

    pub fn bind_array(mut self, name: &str, array: ArrayRef) -> Self {
        self.arrays.insert(name.to_string(), array);
        self
    }

    fn scalar(&self, name: &str) -> Result<SolverExpr, RenameError> {
        if let Some(e) = self.scalars.get(name) {
            return Ok(e.clone());
        }
        let v = self.versions.var(name)?;
        if let Some(c) = self.consts.and_then(|env| env.get(&v)) {
            return Ok(SolverExpr::Const(*c));
        }
        Ok(SolverExpr::Var(v))
    }

    fn array(&self, name: &str) -> Result<ArrayRef, RenameError> {
        if let Some(a) = self.arrays.get(name) {
            return Ok(a.clone());
        }
        self.versions.array(name)
    }

    /// ρ σ e for integer expressions.
    pub fn expr(&self, e: &Expr) -> Result<SolverExpr, RenameError> {
        Ok(match &e.kind {
            ExprKind::Int(v) => SolverExpr::Const(*v),
            ExprKind::Var(name) => self.scalar(name)?,
            ExprKind::Index(name, idx) => {
                SolverExpr::Select(self.array(name)?, Box::new(self.expr(idx)?))
            }
            ExprKind::Length(name) => SolverExpr::Const(self.array(name)?.len as i64),
            ExprKind::Unary(UnOp::Neg, inner) => SolverExpr::neg(self.expr(inner)?),
            ExprKind::Binary(op, l, r) if op.is_arith() => {
                let op = match op {
                    BinOp::Add => ArithOp::Add,
                    BinOp::Sub => ArithOp::Sub,
                    BinOp::Mul => ArithOp::Mul,
                    _ => ArithOp::Div,
                };
                SolverExpr::bin(op, self.expr(l)?, self.expr(r)?)
            }
            _ => return Err(RenameError::NotInteger),
        })
    }

    /// ρ σ b for boolean expressions (and contracts, when expanding).
    pub fn constraint(&self, e: &Expr) -> Result<Constraint, RenameError> {
        Ok(match &e.kind {
            ExprKind::Bool(b) => Constraint::from_bool(*b),
            ExprKind::Unary(UnOp::Not, inner) => Constraint::not(self.constraint(inner)?),
            ExprKind::Binary(op, l, r) => {
                if let Some(rel) = RelOp::from_binop(*op) {
                    Constraint::cmp(rel, self.expr(l)?, self.expr(r)?)
                } else {
                    let a = self.constraint(l)?;
                    let b = self.constraint(r)?;
                    match op {
                        BinOp::And => Constraint::and(vec![a, b]),
                        BinOp::Or => Constraint::or(vec![a, b]),
                        BinOp::Implies => Constraint::implies(a, b),
                        _ => return Err(RenameError::NotBoolean),
                    }
                }
            }
            ExprKind::Quant {
                q,
                var,
                lo,
                hi,
                body,
            } => {
                if !self.expand_quantifiers {
                    return Err(RenameError::Quantifier(var.clone()));
                }
                let range = |bound: &Expr| {
                    self.expr(bound)?
                        .as_const()
                        .ok_or_else(|| RenameError::NonConcreteRange(var.clone()))
                };
                let (lo, hi) = (range(lo)?, range(hi)?);
                let mut parts = Vec::new();
                for i in lo..hi.max(lo) {
                    let inner = self.clone().bind_scalar(var, SolverExpr::Const(i));
                    parts.push(inner.constraint(body)?);
                }
                match q {
                    Quantifier::Forall => Constraint::and(parts),
                    Quantifier::Exists => Constraint::or(parts),
                }
            }
            ExprKind::AllDifferent(name) => {
                if !self.expand_quantifiers {
                    return Err(RenameError::Quantifier(name.clone()));
                }
                let a = self.array(name)?;
                Constraint::AllDifferent((0..a.len).map(|i| a.cell(i)).collect())
            }
            _ => return Err(RenameError::NotBoolean),
        })
    }
}

/// `bump(σ, x)`
pub fn bump(versions: &VersionMap, name: &str) -> Result<VersionMap, RenameError> {
    versions.bump(name)
}

/// Plain ρ σ e: no constant environment, only literal folding.
pub fn rename_expr(versions: &VersionMap, e: &Expr) -> Result<SolverExpr, RenameError> {
    Renamer::new(versions).expr(e)
}

/// Plain ρ σ b. Quantifiers must already be expanded.
pub fn rename_bool(versions: &VersionMap, b: &Expr) -> Result<Constraint, RenameError> {
    Renamer::new(versions).constraint(b)
}
