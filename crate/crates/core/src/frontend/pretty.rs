//! Renders an AST back to M-subset source.

use std::fmt::Write;

use super::ast::*;

pub fn pretty_print(program: &Program) -> String {
    let mut out = String::new();
    for (i, f) in program.functions.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        function(&mut out, f);
    }
    out
}

fn function(out: &mut String, f: &FunctionDef) {
    out.push_str("function ");
    match f.outputs.len() {
        0 => {}
        1 => write!(out, "{} = ", f.outputs[0]).unwrap(),
        _ => write!(out, "[{}] = ", f.outputs.join(",")).unwrap(),
    }
    writeln!(out, "{}({})", f.name, f.params.join(",")).unwrap();
    block(out, &f.body, 1);
    out.push_str("end\n");
}

fn block(out: &mut String, stmts: &[Stmt], depth: usize) {
    for s in stmts {
        statement(out, s, depth);
    }
}

fn statement(out: &mut String, s: &Stmt, depth: usize) {
    let pad = "    ".repeat(depth);
    match &s.kind {
        StmtKind::Assign { targets, expr } => {
            if targets.len() == 1 && targets[0] != Target::Placeholder {
                writeln!(
                    out,
                    "{pad}{} = {};",
                    targets[0].name().unwrap(),
                    render(expr)
                )
                .unwrap();
            } else {
                let ts: Vec<&str> = targets.iter().map(|t| t.name().unwrap_or("~")).collect();
                writeln!(out, "{pad}[{}] = {};", ts.join(","), render(expr)).unwrap();
            }
        }
        StmtKind::If {
            cond,
            then_body,
            else_body,
        } => {
            writeln!(out, "{pad}if {}", render(cond)).unwrap();
            block(out, then_body, depth + 1);
            if !else_body.is_empty() {
                writeln!(out, "{pad}else").unwrap();
                block(out, else_body, depth + 1);
            }
            writeln!(out, "{pad}end").unwrap();
        }
        StmtKind::For {
            var,
            start,
            stop,
            body,
        } => {
            writeln!(out, "{pad}for {var} = {}:{}", render(start), render(stop)).unwrap();
            block(out, body, depth + 1);
            writeln!(out, "{pad}end").unwrap();
        }
        StmtKind::While { cond, body } => {
            writeln!(out, "{pad}while {}", render(cond)).unwrap();
            block(out, body, depth + 1);
            writeln!(out, "{pad}end").unwrap();
        }
        StmtKind::Expr(e) => writeln!(out, "{pad}{};", render(e)).unwrap(),
    }
}

/// Minimal-parenthesis rendering of an expression.
pub fn render(e: &Expr) -> String {
    render_prec(e, 0)
}

fn render_prec(e: &Expr, ctx: u8) -> String {
    match &e.kind {
        ExprKind::Num { lexeme, .. } => lexeme.clone(),
        ExprKind::Var(n) => n.clone(),
        ExprKind::End => "end".into(),
        ExprKind::Apply { name, args } => {
            let args: Vec<String> = args.iter().map(render).collect();
            format!("{name}({})", args.join(","))
        }
        ExprKind::Range { start, stop } => format!("{}:{}", render(start), render(stop)),
        ExprKind::Neg(inner) => {
            let s = format!("-{}", render_prec(inner, 4));
            if ctx > 3 {
                format!("({s})")
            } else {
                s
            }
        }
        ExprKind::Binary { op, lhs, rhs } => {
            let p = op.precedence();
            // Left-associative: the right operand needs parens at equal precedence.
            let s = format!(
                "{}{}{}",
                render_prec(lhs, p),
                op.lexeme(),
                render_prec(rhs, p + 1)
            );
            if p < ctx {
                format!("({s})")
            } else {
                s
            }
        }
    }
}

/// Copy of the program with every position reset, for layout-insensitive
/// structural comparison.
pub fn strip_positions(program: &Program) -> Program {
    fn expr(e: &Expr) -> Expr {
        let kind = match &e.kind {
            ExprKind::Apply { name, args } => ExprKind::Apply {
                name: name.clone(),
                args: args.iter().map(expr).collect(),
            },
            ExprKind::Binary { op, lhs, rhs } => ExprKind::Binary {
                op: *op,
                lhs: Box::new(expr(lhs)),
                rhs: Box::new(expr(rhs)),
            },
            ExprKind::Neg(inner) => ExprKind::Neg(Box::new(expr(inner))),
            ExprKind::Range { start, stop } => ExprKind::Range {
                start: Box::new(expr(start)),
                stop: Box::new(expr(stop)),
            },
            // Literal spelling is layout, not structure.
            ExprKind::Num { value, .. } => ExprKind::Num {
                value: *value,
                lexeme: String::new(),
            },
            other => other.clone(),
        };
        Expr::new(kind, Pos::default())
    }
    fn stmts(ss: &[Stmt]) -> Vec<Stmt> {
        ss.iter()
            .map(|s| {
                let kind = match &s.kind {
                    StmtKind::Assign { targets, expr: e } => StmtKind::Assign {
                        targets: targets.clone(),
                        expr: expr(e),
                    },
                    StmtKind::If {
                        cond,
                        then_body,
                        else_body,
                    } => StmtKind::If {
                        cond: expr(cond),
                        then_body: stmts(then_body),
                        else_body: stmts(else_body),
                    },
                    StmtKind::For {
                        var,
                        start,
                        stop,
                        body,
                    } => StmtKind::For {
                        var: var.clone(),
                        start: expr(start),
                        stop: expr(stop),
                        body: stmts(body),
                    },
                    StmtKind::While { cond, body } => StmtKind::While {
                        cond: expr(cond),
                        body: stmts(body),
                    },
                    StmtKind::Expr(e) => StmtKind::Expr(expr(e)),
                };
                Stmt {
                    kind,
                    pos: Pos::default(),
                }
            })
            .collect()
    }
    Program {
        functions: program
            .functions
            .iter()
            .map(|f| FunctionDef {
                name: f.name.clone(),
                outputs: f.outputs.clone(),
                params: f.params.clone(),
                body: stmts(&f.body),
                pos: Pos::default(),
            })
            .collect(),
    }
}
