//! Recursive-descent parser for the M-subset.
//!
//! Grammar (newlines, `;` and `,` separate statements; `%` comments are
//! trivia):
//!
//! ```text
//! program   := function+
//! function  := "function" [outputs "="] IDENT ["(" params ")"] stmt* ["end"]
//! outputs   := IDENT | "[" IDENT ("," IDENT)* "]"
//! stmt      := if | for | while | "[" targets "]" "=" expr | IDENT "=" expr | expr
//! if        := "if" expr stmt* ("elseif" expr stmt*)* ["else" stmt*] "end"
//! for       := "for" IDENT "=" expr ":" expr stmt* "end"
//! while     := "while" expr stmt* "end"
//! expr      := additive (cmp additive)*
//! additive  := term (("+" | "-") term)*
//! term      := unary (("*" | "/" | "./" | ".*") unary)*
//! unary     := "-" unary | postfix
//! postfix   := NUMBER | IDENT ["(" subscript ("," subscript)* ")"] | "(" expr ")" | "end"
//! subscript := expr [":" expr]
//! ```
//!
//! A function body ends at a body-level `end`, the next `function`, or end
//! of input.

use super::ast::*;
use super::lexer::{Token, TokenKind};
use super::FrontendError;

pub fn parse(tokens: &[Token]) -> Result<Program, FrontendError> {
    let eof = eof_pos(tokens);
    let tokens: Vec<&Token> = tokens
        .iter()
        .filter(|t| t.kind != TokenKind::Comment)
        .collect();
    let mut p = Parser {
        toks: tokens,
        idx: 0,
        eof,
        subscript_depth: 0,
    };
    p.program()
}

fn eof_pos(tokens: &[Token]) -> Pos {
    match tokens.last() {
        None => Pos::new(1, 1),
        Some(t) if t.kind == TokenKind::Newline => Pos::new(t.line + 1, 1),
        Some(t) => Pos::new(t.line, t.col + t.lexeme.chars().count()),
    }
}

struct Parser<'t> {
    toks: Vec<&'t Token>,
    idx: usize,
    eof: Pos,
    subscript_depth: usize,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&'t Token> {
        self.toks.get(self.idx).copied()
    }

    fn peek_nth(&self, n: usize) -> Option<&'t Token> {
        self.toks.get(self.idx + n).copied()
    }

    fn pos(&self) -> Pos {
        self.peek()
            .map(|t| Pos::new(t.line, t.col))
            .unwrap_or(self.eof)
    }

    fn at(&self, kind: TokenKind, lexeme: &str) -> bool {
        self.peek().is_some_and(|t| t.is(kind, lexeme))
    }

    fn at_keyword(&self, kw: &str) -> bool {
        self.at(TokenKind::Keyword, kw)
    }

    fn eat(&mut self, kind: TokenKind, lexeme: &str) -> bool {
        if self.at(kind, lexeme) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, expected: impl Into<String>) -> FrontendError {
        let pos = self.pos();
        let found = match self.peek() {
            None => "end of input".to_string(),
            Some(t) if t.kind == TokenKind::Newline => "newline".to_string(),
            Some(t) => format!("`{}`", t.lexeme),
        };
        FrontendError::Parse {
            line: pos.line,
            col: pos.col,
            expected: expected.into(),
            found,
        }
    }

    fn expect(&mut self, kind: TokenKind, lexeme: &str) -> Result<(), FrontendError> {
        if self.eat(kind, lexeme) {
            Ok(())
        } else {
            Err(self.error(format!("`{lexeme}`")))
        }
    }

    fn ident(&mut self) -> Result<String, FrontendError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier => {
                self.idx += 1;
                Ok(t.lexeme.clone())
            }
            _ => Err(self.error("identifier")),
        }
    }

    fn skip_separators(&mut self) {
        while let Some(t) = self.peek() {
            let sep = t.kind == TokenKind::Newline
                || t.is(TokenKind::Punctuation, ";")
                || t.is(TokenKind::Punctuation, ",");
            if !sep {
                break;
            }
            self.idx += 1;
        }
    }

    fn skip_newlines(&mut self) {
        while self.peek().is_some_and(|t| t.kind == TokenKind::Newline) {
            self.idx += 1;
        }
    }

    /// A statement must be followed by a separator or end of input.
    fn end_statement(&mut self) -> Result<(), FrontendError> {
        match self.peek() {
            None => Ok(()),
            Some(t)
                if t.kind == TokenKind::Newline
                    || t.is(TokenKind::Punctuation, ";")
                    || t.is(TokenKind::Punctuation, ",") =>
            {
                self.skip_separators();
                Ok(())
            }
            Some(_) => Err(self.error("`;`, `,` or newline")),
        }
    }

    fn program(&mut self) -> Result<Program, FrontendError> {
        let mut functions: Vec<FunctionDef> = Vec::new();
        self.skip_separators();
        while self.peek().is_some() {
            let f = self.function()?;
            if functions.iter().any(|g| g.name == f.name) {
                return Err(FrontendError::Parse {
                    line: f.pos.line,
                    col: f.pos.col,
                    expected: "a unique function name".into(),
                    found: format!("duplicate `{}`", f.name),
                });
            }
            functions.push(f);
            self.skip_separators();
        }
        if functions.is_empty() {
            return Err(self.error("`function`"));
        }
        Ok(Program { functions })
    }

    fn function(&mut self) -> Result<FunctionDef, FrontendError> {
        let pos = self.pos();
        self.expect(TokenKind::Keyword, "function")?;
        let mut outputs = Vec::new();
        if self.eat(TokenKind::Punctuation, "[") {
            if !self.at(TokenKind::Punctuation, "]") {
                loop {
                    if self.at(TokenKind::Tilde, "~") {
                        return Err(self.error("output name (placeholders are not allowed here)"));
                    }
                    outputs.push(self.ident()?);
                    if !self.eat(TokenKind::Punctuation, ",") {
                        break;
                    }
                }
            }
            self.expect(TokenKind::Punctuation, "]")?;
            self.expect(TokenKind::Operator, "=")?;
        } else if self
            .peek_nth(1)
            .is_some_and(|t| t.is(TokenKind::Operator, "="))
        {
            outputs.push(self.ident()?);
            self.expect(TokenKind::Operator, "=")?;
        }
        let name = self.ident()?;
        let mut params = Vec::new();
        if self.eat(TokenKind::Punctuation, "(") {
            if !self.at(TokenKind::Punctuation, ")") {
                loop {
                    let ppos = self.pos();
                    let p = self.ident()?;
                    if params.contains(&p) {
                        return Err(FrontendError::Parse {
                            line: ppos.line,
                            col: ppos.col,
                            expected: "distinct parameter names".into(),
                            found: format!("duplicate `{p}`"),
                        });
                    }
                    params.push(p);
                    if !self.eat(TokenKind::Punctuation, ",") {
                        break;
                    }
                }
            }
            self.expect(TokenKind::Punctuation, ")")?;
        }
        for (i, o) in outputs.iter().enumerate() {
            if outputs[..i].contains(o) {
                return Err(FrontendError::Parse {
                    line: pos.line,
                    col: pos.col,
                    expected: "distinct output names".into(),
                    found: format!("duplicate `{o}`"),
                });
            }
        }
        self.end_statement()?;
        let body = self.block()?;
        // Optional terminator.
        if self.eat(TokenKind::Keyword, "end") {
            self.end_statement()?;
        }
        Ok(FunctionDef {
            name,
            outputs,
            params,
            body,
            pos,
        })
    }

    /// Statements up to (not including) `end`, `else`, `elseif`,
    /// `function`, or end of input.
    fn block(&mut self) -> Result<Vec<Stmt>, FrontendError> {
        let mut stmts = Vec::new();
        loop {
            self.skip_separators();
            match self.peek() {
                None => break,
                Some(t)
                    if t.kind == TokenKind::Keyword
                        && matches!(t.lexeme.as_str(), "end" | "else" | "elseif" | "function") =>
                {
                    break
                }
                Some(_) => stmts.push(self.statement()?),
            }
        }
        Ok(stmts)
    }

    fn close_block(&mut self, opener: &str, opened: Pos) -> Result<(), FrontendError> {
        if self.eat(TokenKind::Keyword, "end") {
            self.end_statement()
        } else {
            Err(self.error(format!(
                "`end` closing `{opener}` opened at line {}",
                opened.line
            )))
        }
    }

    fn statement(&mut self) -> Result<Stmt, FrontendError> {
        let pos = self.pos();
        if self.at_keyword("if") {
            return self.if_stmt();
        }
        if self.eat(TokenKind::Keyword, "for") {
            let var = self.ident()?;
            self.expect(TokenKind::Operator, "=")?;
            let start = self.expr()?;
            self.expect(TokenKind::Operator, ":")?;
            let stop = self.expr()?;
            self.end_statement()?;
            let body = self.block()?;
            self.close_block("for", pos)?;
            return Ok(Stmt {
                kind: StmtKind::For {
                    var,
                    start,
                    stop,
                    body,
                },
                pos,
            });
        }
        if self.eat(TokenKind::Keyword, "while") {
            let cond = self.expr()?;
            self.end_statement()?;
            let body = self.block()?;
            self.close_block("while", pos)?;
            return Ok(Stmt {
                kind: StmtKind::While { cond, body },
                pos,
            });
        }
        if self.at(TokenKind::Punctuation, "[") {
            self.idx += 1;
            let mut targets = Vec::new();
            loop {
                if self.eat(TokenKind::Tilde, "~") {
                    targets.push(Target::Placeholder);
                } else {
                    targets.push(Target::Name(self.ident()?));
                }
                if !self.eat(TokenKind::Punctuation, ",") {
                    break;
                }
            }
            self.expect(TokenKind::Punctuation, "]")?;
            self.expect(TokenKind::Operator, "=")?;
            let expr_pos = self.pos();
            let expr = self.expr()?;
            if targets.len() > 1 && !matches!(expr.kind, ExprKind::Apply { .. }) {
                return Err(FrontendError::Parse {
                    line: expr_pos.line,
                    col: expr_pos.col,
                    expected: "a function call on the right of a multi-target assignment".into(),
                    found: "expression".into(),
                });
            }
            self.end_statement()?;
            return Ok(Stmt {
                kind: StmtKind::Assign { targets, expr },
                pos,
            });
        }
        let is_assign = self.peek().is_some_and(|t| t.kind == TokenKind::Identifier)
            && self
                .peek_nth(1)
                .is_some_and(|t| t.is(TokenKind::Operator, "="));
        if is_assign {
            let name = self.ident()?;
            self.idx += 1;
            let expr = self.expr()?;
            self.end_statement()?;
            return Ok(Stmt {
                kind: StmtKind::Assign {
                    targets: vec![Target::Name(name)],
                    expr,
                },
                pos,
            });
        }
        let expr = self.expr()?;
        self.end_statement()?;
        Ok(Stmt {
            kind: StmtKind::Expr(expr),
            pos,
        })
    }

    // `if` and each `elseif` share the closing `end`; `elseif` chains become
    // nested ifs in the else branch.
    fn if_stmt(&mut self) -> Result<Stmt, FrontendError> {
        let pos = self.pos();
        self.idx += 1;
        let cond = self.expr()?;
        self.end_statement()?;
        let then_body = self.block()?;
        let else_body = if self.at_keyword("elseif") {
            let inner = self.if_stmt_tail()?;
            vec![inner]
        } else if self.eat(TokenKind::Keyword, "else") {
            self.skip_newlines();
            self.block()?
        } else {
            Vec::new()
        };
        self.close_block("if", pos)?;
        Ok(Stmt {
            kind: StmtKind::If {
                cond,
                then_body,
                else_body,
            },
            pos,
        })
    }

    fn if_stmt_tail(&mut self) -> Result<Stmt, FrontendError> {
        let pos = self.pos();
        self.expect(TokenKind::Keyword, "elseif")?;
        let cond = self.expr()?;
        self.end_statement()?;
        let then_body = self.block()?;
        let else_body = if self.at_keyword("elseif") {
            vec![self.if_stmt_tail()?]
        } else if self.eat(TokenKind::Keyword, "else") {
            self.skip_newlines();
            self.block()?
        } else {
            Vec::new()
        };
        Ok(Stmt {
            kind: StmtKind::If {
                cond,
                then_body,
                else_body,
            },
            pos,
        })
    }

    fn binop_here(&self, level: u8) -> Option<BinOp> {
        let t = self.peek()?;
        if t.kind != TokenKind::Operator {
            return None;
        }
        BinOp::from_lexeme(&t.lexeme).filter(|op| op.precedence() == level)
    }

    fn expr(&mut self) -> Result<Expr, FrontendError> {
        self.binary(1)
    }

    fn binary(&mut self, level: u8) -> Result<Expr, FrontendError> {
        if level > 3 {
            return self.unary();
        }
        let mut lhs = self.binary(level + 1)?;
        while let Some(op) = self.binop_here(level) {
            self.idx += 1;
            let rhs = self.binary(level + 1)?;
            let pos = lhs.pos;
            lhs = Expr::new(
                ExprKind::Binary {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                pos,
            );
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, FrontendError> {
        let pos = self.pos();
        if self.eat(TokenKind::Operator, "-") {
            let operand = self.unary()?;
            return Ok(Expr::new(ExprKind::Neg(Box::new(operand)), pos));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expr, FrontendError> {
        let pos = self.pos();
        let Some(tok) = self.peek() else {
            return Err(self.error("expression"));
        };
        match tok.kind {
            TokenKind::Number => {
                self.idx += 1;
                let text = &tok.lexeme;
                let value: f64 = if text.starts_with('.') {
                    format!("0{text}").parse()
                } else {
                    text.parse()
                }
                .map_err(|_| self.error("numeric literal"))?;
                Ok(Expr::new(
                    ExprKind::Num {
                        value,
                        lexeme: text.clone(),
                    },
                    pos,
                ))
            }
            TokenKind::Identifier => {
                self.idx += 1;
                let name = tok.lexeme.clone();
                if self.eat(TokenKind::Punctuation, "(") {
                    let args = self.subscripts()?;
                    Ok(Expr::new(ExprKind::Apply { name, args }, pos))
                } else {
                    Ok(Expr::new(ExprKind::Var(name), pos))
                }
            }
            TokenKind::Punctuation if tok.lexeme == "(" => {
                self.idx += 1;
                let inner = self.expr()?;
                self.expect(TokenKind::Punctuation, ")")?;
                Ok(inner)
            }
            TokenKind::Keyword if tok.lexeme == "end" && self.subscript_depth > 0 => {
                self.idx += 1;
                Ok(Expr::new(ExprKind::End, pos))
            }
            _ => Err(self.error("expression")),
        }
    }

    // Opening paren already consumed.
    fn subscripts(&mut self) -> Result<Vec<Expr>, FrontendError> {
        self.subscript_depth += 1;
        let mut args = Vec::new();
        if !self.at(TokenKind::Punctuation, ")") {
            loop {
                let pos = self.pos();
                let first = self.expr()?;
                let arg = if self.eat(TokenKind::Operator, ":") {
                    let stop = self.expr()?;
                    Expr::new(
                        ExprKind::Range {
                            start: Box::new(first),
                            stop: Box::new(stop),
                        },
                        pos,
                    )
                } else {
                    first
                };
                args.push(arg);
                if !self.eat(TokenKind::Punctuation, ",") {
                    break;
                }
            }
        }
        self.expect(TokenKind::Punctuation, ")")?;
        self.subscript_depth -= 1;
        Ok(args)
    }
}
