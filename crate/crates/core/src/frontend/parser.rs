//! Recursive descent parser for `.cpv` sources.

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::FrontendError;

type PResult<T> = Result<T, FrontendError>;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

/// Parse a source file without checking names or types.
pub fn parse_unchecked(source: &str) -> PResult<ProgramAst> {
    let mut p = Parser {
        tokens: tokenize(source)?,
        pos: 0,
    };
    p.file()
}

#[derive(Default)]
struct Clauses {
    requires: Vec<SpecExpr>,
    ensures: Vec<SpecExpr>,
    modifies: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        Err(FrontendError::Syntax {
            span: self.span(),
            message: format!("expected {expected}, found {}", self.peek().describe()),
        })
    }

    fn expect(&mut self, tok: Tok) -> PResult<Span> {
        if *self.peek() == tok {
            Ok(self.bump().span)
        } else {
            let what = format!("`{}`", describe_plain(&tok));
            self.error(&what)
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let span = self.bump().span;
                Ok((name, span))
            }
            _ => self.error("identifier"),
        }
    }

    fn file(&mut self) -> PResult<ProgramAst> {
        let mut main: Option<Function> = None;
        let mut externs = Vec::new();
        while *self.peek() != Tok::Eof {
            let is_extern = self.eat(&Tok::Extern);
            let f = self.function(is_extern)?;
            if is_extern {
                externs.push(f);
            } else if main.is_some() {
                return Err(FrontendError::Syntax {
                    span: f.span,
                    message: "only one non-extern function is allowed per file".into(),
                });
            } else {
                main = Some(f);
            }
        }
        match main {
            Some(function) => Ok(ProgramAst { function, externs }),
            None => self.error("`fn` declaration"),
        }
    }

    fn clauses(&mut self, into: &mut Clauses) -> PResult<()> {
        loop {
            match self.peek() {
                Tok::Requires => {
                    self.bump();
                    into.requires.push(self.expr()?);
                }
                Tok::Ensures => {
                    self.bump();
                    into.ensures.push(self.expr()?);
                }
                Tok::Modifies => {
                    self.bump();
                    loop {
                        into.modifies.push(self.ident()?.0);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn function(&mut self, is_extern: bool) -> PResult<Function> {
        let mut clauses = Clauses::default();
        self.clauses(&mut clauses)?;
        let span = self.expect(Tok::Fn)?;
        let (name, _) = self.ident()?;
        self.expect(Tok::LParen)?;
        let mut params = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                params.push(self.param()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        self.clauses(&mut clauses)?;
        let body = if is_extern {
            self.expect(Tok::Semi)?;
            None
        } else {
            let body = self.block_items()?;
            self.clauses(&mut clauses)?;
            Some(body)
        };
        Ok(Function {
            name,
            params,
            requires: clauses.requires,
            ensures: clauses.ensures,
            modifies: clauses.modifies,
            body,
            span,
        })
    }

    fn param(&mut self) -> PResult<Param> {
        let span = self.expect(Tok::IntKw)?;
        let ty = if self.eat(&Tok::LBracket) {
            let len = match self.peek().clone() {
                Tok::Int(n) => {
                    self.bump();
                    Length::Const(n)
                }
                Tok::Ident(n) => {
                    self.bump();
                    Length::Symbolic(n)
                }
                _ => return self.error("array length"),
            };
            self.expect(Tok::RBracket)?;
            Type::IntArray(len)
        } else {
            Type::Int
        };
        let (name, _) = self.ident()?;
        Ok(Param { name, ty, span })
    }

    fn block_items(&mut self) -> PResult<Vec<Stmt>> {
        self.expect(Tok::LBrace)?;
        let mut items = Vec::new();
        while *self.peek() != Tok::RBrace {
            if *self.peek() == Tok::Eof {
                return self.error("`}`");
            }
            items.push(self.stmt()?);
        }
        self.bump();
        Ok(items)
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let span = self.span();
        let kind = match self.peek().clone() {
            Tok::LBrace => StmtKind::Block(self.block_items()?),
            Tok::If => {
                self.bump();
                let cond = self.paren_cond()?;
                let then_branch = Box::new(self.stmt()?);
                let else_branch = if self.eat(&Tok::Else) {
                    Some(Box::new(self.stmt()?))
                } else {
                    None
                };
                StmtKind::If {
                    cond,
                    then_branch,
                    else_branch,
                }
            }
            Tok::While => {
                self.bump();
                let cond = self.paren_cond()?;
                let body = Box::new(self.stmt()?);
                StmtKind::While { cond, body }
            }
            Tok::Assert | Tok::Enforce => {
                let is_assert = *self.peek() == Tok::Assert;
                self.bump();
                let cond = self.paren_cond()?;
                self.expect(Tok::Semi)?;
                if is_assert {
                    StmtKind::Assert(cond)
                } else {
                    StmtKind::Enforce(cond)
                }
            }
            Tok::Return => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::Semi)?;
                StmtKind::Return(e)
            }
            Tok::IntKw => {
                self.bump();
                let (target, _) = self.ident()?;
                self.expect(Tok::Assign)?;
                self.assignment_rhs(target, true)?
            }
            Tok::Ident(name) => {
                self.bump();
                if self.eat(&Tok::LBracket) {
                    let index = self.expr()?;
                    self.expect(Tok::RBracket)?;
                    self.expect(Tok::Assign)?;
                    let value = self.expr()?;
                    self.expect(Tok::Semi)?;
                    StmtKind::ArrayAssign {
                        array: name,
                        index,
                        value,
                    }
                } else {
                    self.expect(Tok::Assign)?;
                    self.assignment_rhs(name, false)?
                }
            }
            _ => return self.error("statement"),
        };
        Ok(Stmt::new(kind, span))
    }

    fn assignment_rhs(&mut self, target: String, declares: bool) -> PResult<StmtKind> {
        let is_call = matches!(self.peek(), Tok::Ident(_)) && *self.peek_at(1) == Tok::LParen;
        let kind = if is_call {
            let (callee, _) = self.ident()?;
            self.expect(Tok::LParen)?;
            let mut args = Vec::new();
            if *self.peek() != Tok::RParen {
                loop {
                    args.push(self.expr()?);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            self.expect(Tok::RParen)?;
            StmtKind::Call {
                target,
                declares,
                callee,
                args,
            }
        } else {
            StmtKind::Assign {
                target,
                value: self.expr()?,
                declares,
            }
        };
        self.expect(Tok::Semi)?;
        Ok(kind)
    }

    fn paren_cond(&mut self) -> PResult<Expr> {
        self.expect(Tok::LParen)?;
        let e = self.expr()?;
        self.expect(Tok::RParen)?;
        Ok(e)
    }

    pub fn expr(&mut self) -> PResult<Expr> {
        let lhs = self.or_expr()?;
        if *self.peek() == Tok::Implies {
            let span = self.bump().span;
            let rhs = self.expr()?;
            return Ok(Expr::new(
                ExprKind::Binary(BinOp::Implies, Box::new(lhs), Box::new(rhs)),
                span,
            ));
        }
        Ok(lhs)
    }

    fn or_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.and_expr()?;
        while *self.peek() == Tok::OrOr {
            let span = self.bump().span;
            let rhs = self.and_expr()?;
            lhs = Expr::new(ExprKind::Binary(BinOp::Or, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.cmp_expr()?;
        while *self.peek() == Tok::AndAnd {
            let span = self.bump().span;
            let rhs = self.cmp_expr()?;
            lhs = Expr::new(ExprKind::Binary(BinOp::And, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn cmp_expr(&mut self) -> PResult<Expr> {
        let lhs = self.add_expr()?;
        let op = match self.peek() {
            Tok::EqEq => BinOp::Eq,
            Tok::NotEq => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            _ => return Ok(lhs),
        };
        let span = self.bump().span;
        let rhs = self.add_expr()?;
        Ok(Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span))
    }

    fn add_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.mul_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let span = self.bump().span;
            let rhs = self.mul_expr()?;
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span);
        }
    }

    fn mul_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            let span = self.bump().span;
            let rhs = self.unary()?;
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span);
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        let span = self.span();
        match self.peek() {
            Tok::Minus => {
                self.bump();
                if let Tok::Int(v) = *self.peek() {
                    self.bump();
                    return Ok(Expr::new(ExprKind::Int(-v), span));
                }
                let e = self.unary()?;
                Ok(Expr::new(ExprKind::Unary(UnOp::Neg, Box::new(e)), span))
            }
            Tok::Bang => {
                self.bump();
                let e = self.unary()?;
                Ok(Expr::new(ExprKind::Unary(UnOp::Not, Box::new(e)), span))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::new(ExprKind::Int(v), span))
            }
            Tok::True | Tok::False => {
                let b = *self.peek() == Tok::True;
                self.bump();
                Ok(Expr::new(ExprKind::Bool(b), span))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::AllDifferent => {
                self.bump();
                self.expect(Tok::LParen)?;
                let (name, _) = self.ident()?;
                self.expect(Tok::RParen)?;
                Ok(Expr::new(ExprKind::AllDifferent(name), span))
            }
            Tok::Forall | Tok::Exists => {
                let q = if *self.peek() == Tok::Forall {
                    Quantifier::Forall
                } else {
                    Quantifier::Exists
                };
                self.bump();
                let (var, _) = self.ident()?;
                self.expect(Tok::In)?;
                self.expect(Tok::LBracket)?;
                let lo = self.expr()?;
                self.expect(Tok::Comma)?;
                let hi = self.expr()?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Colon)?;
                let body = self.expr()?;
                Ok(Expr::new(
                    ExprKind::Quant {
                        q,
                        var,
                        lo: Box::new(lo),
                        hi: Box::new(hi),
                        body: Box::new(body),
                    },
                    span,
                ))
            }
            Tok::Ident(name) => {
                self.bump();
                if self.eat(&Tok::LBracket) {
                    let idx = self.expr()?;
                    self.expect(Tok::RBracket)?;
                    Ok(Expr::new(ExprKind::Index(name, Box::new(idx)), span))
                } else if *self.peek() == Tok::Dot {
                    self.bump();
                    match self.peek().clone() {
                        Tok::Ident(field) if field == "length" => {
                            self.bump();
                            Ok(Expr::new(ExprKind::Length(name), span))
                        }
                        _ => self.error("`length`"),
                    }
                } else {
                    Ok(Expr::new(ExprKind::Var(name), span))
                }
            }
            _ => self.error("expression"),
        }
    }
}

fn describe_plain(tok: &Tok) -> String {
    let d = tok.describe();
    d.trim_matches('`').to_string()
}
