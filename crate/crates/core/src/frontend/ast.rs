use std::fmt;

/// 1-based source coordinate of a node's first token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl Pos {
    pub fn new(line: usize, col: usize) -> Self {
        Pos { line, col }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub functions: Vec<FunctionDef>,
}

impl Program {
    pub fn function(&self, name: &str) -> Option<&FunctionDef> {
        self.functions.iter().find(|f| f.name == name)
    }

    /// Concatenates single-function files into one program. Fails on the
    /// first duplicated function name.
    pub fn merge(programs: impl IntoIterator<Item = Program>) -> Result<Program, String> {
        let mut functions: Vec<FunctionDef> = Vec::new();
        for p in programs {
            for f in p.functions {
                if functions.iter().any(|g| g.name == f.name) {
                    return Err(f.name);
                }
                functions.push(f);
            }
        }
        Ok(Program { functions })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionDef {
    pub name: String,
    pub outputs: Vec<String>,
    pub params: Vec<String>,
    pub body: Vec<Stmt>,
    pub pos: Pos,
}

/// Destination of an assignment: a named variable or a `~` placeholder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    Name(String),
    Placeholder,
}

impl Target {
    pub fn name(&self) -> Option<&str> {
        match self {
            Target::Name(n) => Some(n),
            Target::Placeholder => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    Assign {
        targets: Vec<Target>,
        expr: Expr,
    },
    If {
        cond: Expr,
        then_body: Vec<Stmt>,
        else_body: Vec<Stmt>,
    },
    For {
        var: String,
        start: Expr,
        stop: Expr,
        body: Vec<Stmt>,
    },
    While {
        cond: Expr,
        body: Vec<Stmt>,
    },
    Expr(Expr),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    ElemDiv,
    ElemMul,
    Gt,
    Lt,
    Ge,
    Le,
    Eq,
}

impl BinOp {
    pub fn from_lexeme(s: &str) -> Option<BinOp> {
        Some(match s {
            "+" => BinOp::Add,
            "-" => BinOp::Sub,
            "*" => BinOp::Mul,
            "/" => BinOp::Div,
            "./" => BinOp::ElemDiv,
            ".*" => BinOp::ElemMul,
            ">" => BinOp::Gt,
            "<" => BinOp::Lt,
            ">=" => BinOp::Ge,
            "<=" => BinOp::Le,
            "==" => BinOp::Eq,
            _ => return None,
        })
    }

    pub fn lexeme(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::ElemDiv => "./",
            BinOp::ElemMul => ".*",
            BinOp::Gt => ">",
            BinOp::Lt => "<",
            BinOp::Ge => ">=",
            BinOp::Le => "<=",
            BinOp::Eq => "==",
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinOp::Gt | BinOp::Lt | BinOp::Ge | BinOp::Le | BinOp::Eq
        )
    }

    /// Binding strength: comparisons < additive < multiplicative.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Gt | BinOp::Lt | BinOp::Ge | BinOp::Le | BinOp::Eq => 1,
            BinOp::Add | BinOp::Sub => 2,
            BinOp::Mul | BinOp::Div | BinOp::ElemDiv | BinOp::ElemMul => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    /// Numeric literal; the lexeme is kept for faithful re-printing.
    Num {
        value: f64,
        lexeme: String,
    },
    Var(String),
    /// `name(args)`: a call or an index, decided during analysis.
    Apply {
        name: String,
        args: Vec<Expr>,
    },
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Neg(Box<Expr>),
    Range {
        start: Box<Expr>,
        stop: Box<Expr>,
    },
    /// `end` inside a subscript.
    End,
}

impl Expr {
    pub fn new(kind: ExprKind, pos: Pos) -> Self {
        Expr { kind, pos }
    }

    pub fn as_literal(&self) -> Option<f64> {
        match &self.kind {
            ExprKind::Num { value, .. } => Some(*value),
            _ => None,
        }
    }

    /// Visits this expression and every sub-expression, parents first.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        f(self);
        match &self.kind {
            ExprKind::Apply { args, .. } => args.iter().for_each(|a| a.walk(f)),
            ExprKind::Binary { lhs, rhs, .. } => {
                lhs.walk(f);
                rhs.walk(f);
            }
            ExprKind::Neg(e) => e.walk(f),
            ExprKind::Range { start, stop } => {
                start.walk(f);
                stop.walk(f);
            }
            ExprKind::Num { .. } | ExprKind::Var(_) | ExprKind::End => {}
        }
    }
}

/// Visits statements depth first in source order.
pub fn walk_stmts<'a>(stmts: &'a [Stmt], f: &mut dyn FnMut(&'a Stmt)) {
    for s in stmts {
        f(s);
        match &s.kind {
            StmtKind::If {
                then_body,
                else_body,
                ..
            } => {
                walk_stmts(then_body, f);
                walk_stmts(else_body, f);
            }
            StmtKind::For { body, .. } | StmtKind::While { body, .. } => walk_stmts(body, f),
            StmtKind::Assign { .. } | StmtKind::Expr(_) => {}
        }
    }
}

/// Every identifier spelled anywhere in the function, including its header.
pub fn identifiers(func: &FunctionDef) -> Vec<String> {
    let mut names: Vec<String> = func.params.iter().chain(&func.outputs).cloned().collect();
    let visit_expr = |e: &Expr, names: &mut Vec<String>| {
        e.walk(&mut |e| match &e.kind {
            ExprKind::Var(n) | ExprKind::Apply { name: n, .. } => names.push(n.clone()),
            _ => {}
        })
    };
    walk_stmts(&func.body, &mut |s| match &s.kind {
        StmtKind::Assign { targets, expr } => {
            names.extend(targets.iter().filter_map(|t| t.name().map(str::to_string)));
            visit_expr(expr, &mut names);
        }
        StmtKind::If { cond, .. } | StmtKind::While { cond, .. } => visit_expr(cond, &mut names),
        StmtKind::For {
            var, start, stop, ..
        } => {
            names.push(var.clone());
            visit_expr(start, &mut names);
            visit_expr(stop, &mut names);
        }
        StmtKind::Expr(e) => visit_expr(e, &mut names),
    });
    names.sort();
    names.dedup();
    names
}
