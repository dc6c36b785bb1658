//! Reference evaluator with MATLAB semantics: 1-based indexing, `end`,
//! truth of non-empty all-nonzero arrays, `~` discarding outputs.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::analysis::{Callee, FunctionInfo, Resolution, SemType, TypedProgram};
use crate::dsp::{DspError, EcgSignal, PeakSource};
use crate::frontend::{BinOp, Expr, ExprKind, Pos, Stmt, StmtKind, Target};
use crate::mathcore::{self as mc, ArithOp, CmpOp, MathError, NumValue, SpanSel};

pub const MAX_DEPTH: usize = 64;
pub const MAX_LOOP_ITERATIONS: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuntimeError {
    #[error("{site}: index {index} out of bounds for `{name}` of length {len}")]
    Index {
        name: String,
        index: f64,
        len: usize,
        site: Pos,
    },
    #[error("{site}: {source}")]
    Math { source: MathError, site: Pos },
    #[error("output `{0}` not assigned")]
    UnassignedOutput(String),
    #[error("call depth exceeds {MAX_DEPTH}")]
    DepthExceeded,
    #[error("{site}: `{name}` is not defined")]
    Undefined { name: String, site: Pos },
    #[error("`{name}` expects {expected} arguments, got {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("argument `{name}`: {message}")]
    BadArgument { name: String, message: String },
    #[error("{site}: {message}")]
    Unsupported { message: String, site: Pos },
    #[error("{site}: loop did not finish after {MAX_LOOP_ITERATIONS} iterations")]
    LoopLimit { site: Pos },
    #[error("{site}: detector failed: {source}")]
    Detector { source: DspError, site: Pos },
}

/// Result of calling a function: outputs in header order.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalOutcome {
    pub outputs: Vec<(String, NumValue)>,
    /// `line:col name = value` for every assignment, when tracing.
    pub trace: Vec<String>,
}

impl EvalOutcome {
    pub fn get(&self, name: &str) -> Option<&NumValue> {
        self.outputs.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

/// Variable bindings of one activation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Env {
    pub bindings: BTreeMap<String, NumValue>,
    pub depth: usize,
}

pub struct Interpreter<'a> {
    tp: &'a TypedProgram,
    peaks: &'a dyn PeakSource,
    tracing: bool,
}

impl<'a> Interpreter<'a> {
    /// `peaks` backs the `pan_tompkin` intrinsic.
    pub fn new(tp: &'a TypedProgram, peaks: &'a dyn PeakSource) -> Self {
        Interpreter {
            tp,
            peaks,
            tracing: false,
        }
    }

    pub fn with_trace(mut self, on: bool) -> Self {
        self.tracing = on;
        self
    }

    /// Calls `name` with positional `args`.
    pub fn call(&self, name: &str, args: Vec<NumValue>) -> Result<EvalOutcome, RuntimeError> {
        let mut trace = Vec::new();
        let outputs = self.invoke(name, args, 0, &mut trace)?;
        Ok(EvalOutcome { outputs, trace })
    }

    /// Evaluates a standalone expression in `env`.
    pub fn eval_expr(&self, e: &Expr, env: &Env) -> Result<NumValue, RuntimeError> {
        let (_, info) = self.tp.entry();
        let frame = Frame {
            interp: self,
            info,
            env: env.clone(),
            trace: Vec::new(),
        };
        frame.expr(e, None)
    }

    fn invoke(
        &self,
        name: &str,
        args: Vec<NumValue>,
        depth: usize,
        trace: &mut Vec<String>,
    ) -> Result<Vec<(String, NumValue)>, RuntimeError> {
        if depth >= MAX_DEPTH {
            return Err(RuntimeError::DepthExceeded);
        }
        let (func, info) = self
            .tp
            .function(name)
            .ok_or_else(|| RuntimeError::Undefined {
                name: name.to_string(),
                site: Pos::default(),
            })?;
        if args.len() != func.params.len() {
            return Err(RuntimeError::Arity {
                name: name.to_string(),
                expected: func.params.len(),
                found: args.len(),
            });
        }
        let mut env = Env {
            bindings: BTreeMap::new(),
            depth,
        };
        for (p, v) in func.params.iter().zip(args) {
            let v = coerce_arg(p, info.type_of(p), v)?;
            env.bindings.insert(p.clone(), v);
        }
        let mut frame = Frame {
            interp: self,
            info,
            env,
            trace: Vec::new(),
        };
        frame.block(&func.body)?;
        trace.append(&mut frame.trace);
        func.outputs
            .iter()
            .map(|o| {
                frame
                    .env
                    .bindings
                    .remove(o)
                    .map(|v| (o.clone(), v))
                    .ok_or_else(|| RuntimeError::UnassignedOutput(o.clone()))
            })
            .collect()
    }
}

fn coerce_arg(name: &str, ty: SemType, v: NumValue) -> Result<NumValue, RuntimeError> {
    let bad = |message: String| RuntimeError::BadArgument {
        name: name.to_string(),
        message,
    };
    match ty {
        SemType::IndexVector => {
            let mut out = Vec::with_capacity(v.numel());
            for x in v.to_reals() {
                if x < 0.0 || x.fract() != 0.0 || !x.is_finite() {
                    return Err(bad(format!("{x} is not a valid index")));
                }
                out.push(x as usize);
            }
            Ok(NumValue::IVec(out))
        }
        t if t.is_scalar() && !v.is_scalar() => match v.as_scalar() {
            Some(x) => Ok(NumValue::RScalar(x)),
            None => Err(bad(format!(
                "expected a scalar, got {} elements",
                v.numel()
            ))),
        },
        t if t.is_array() => Ok(v.into_vector()),
        _ => Ok(v),
    }
}

struct Frame<'i, 'a> {
    interp: &'i Interpreter<'a>,
    info: &'a FunctionInfo,
    env: Env,
    trace: Vec<String>,
}

impl Frame<'_, '_> {
    fn block(&mut self, stmts: &[Stmt]) -> Result<(), RuntimeError> {
        for s in stmts {
            self.statement(s)?;
        }
        Ok(())
    }

    fn bind(&mut self, name: &str, v: NumValue, site: Pos) {
        // Array-typed variables hold arrays even when a scalar is assigned.
        let v = if self.info.type_of(name).is_array() {
            v.into_vector()
        } else {
            v
        };
        if self.interp.tracing {
            self.trace.push(format!("{site} {name} = {v}"));
        }
        self.env.bindings.insert(name.to_string(), v);
    }

    fn statement(&mut self, s: &Stmt) -> Result<(), RuntimeError> {
        match &s.kind {
            StmtKind::Assign { targets, expr } => {
                if let Some(values) = self.slot_call(expr)? {
                    for (t, v) in targets.iter().zip(values) {
                        if let Target::Name(n) = t {
                            self.bind(n, v, s.pos);
                        }
                    }
                    return Ok(());
                }
                let v = self.expr(expr, None)?;
                if let Some(Target::Name(n)) = targets.first() {
                    self.bind(n, v, s.pos);
                }
            }
            StmtKind::Expr(expr) => {
                if self.slot_call(expr)?.is_none() {
                    self.expr(expr, None)?;
                }
            }
            StmtKind::If {
                cond,
                then_body,
                else_body,
            } => {
                if self.expr(cond, None)?.is_true() {
                    self.block(then_body)?;
                } else {
                    self.block(else_body)?;
                }
            }
            StmtKind::While { cond, body } => {
                let mut n = 0;
                while self.expr(cond, None)?.is_true() {
                    n += 1;
                    if n > MAX_LOOP_ITERATIONS {
                        return Err(RuntimeError::LoopLimit { site: s.pos });
                    }
                    self.block(body)?;
                }
            }
            StmtKind::For {
                var,
                start,
                stop,
                body,
            } => {
                let a = self.scalar(start)?;
                let b = self.scalar(stop)?;
                let mut k = a;
                let mut n = 0;
                while k <= b {
                    n += 1;
                    if n > MAX_LOOP_ITERATIONS {
                        return Err(RuntimeError::LoopLimit { site: s.pos });
                    }
                    self.bind(var, NumValue::RScalar(k), s.pos);
                    self.block(body)?;
                    k += 1.0;
                }
            }
        }
        Ok(())
    }

    fn scalar(&self, e: &Expr) -> Result<f64, RuntimeError> {
        let v = self.expr(e, None)?;
        v.as_scalar().ok_or_else(|| RuntimeError::Unsupported {
            message: format!("expected a scalar, got {} elements", v.numel()),
            site: e.pos,
        })
    }

    /// Statement-level calls that fill several output slots. Returns the
    /// slot values in destructuring order.
    fn slot_call(&mut self, expr: &Expr) -> Result<Option<Vec<NumValue>>, RuntimeError> {
        let ExprKind::Apply { name, args } = &expr.kind else {
            return Ok(None);
        };
        match self.info.resolution(expr.pos) {
            Some(Resolution::Call(Callee::Function)) => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.expr(a, None)?);
                }
                let outs = self
                    .interp
                    .invoke(name, vals, self.env.depth + 1, &mut self.trace)?;
                Ok(Some(outs.into_iter().map(|(_, v)| v).collect()))
            }
            Some(Resolution::Call(Callee::Builtin)) if name == "pan_tompkin" => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.expr(a, None)?);
                }
                Ok(Some(self.pan_tompkin(&vals, expr.pos)?))
            }
            _ => Ok(None),
        }
    }

    /// `[qrs_amp_raw, qrs_i_raw, delay] = pan_tompkin(sig, fs, plot)`, with
    /// peak indices made 1-based.
    fn pan_tompkin(&self, args: &[NumValue], site: Pos) -> Result<Vec<NumValue>, RuntimeError> {
        let [sig, fs, ..] = args else {
            return Err(RuntimeError::Arity {
                name: "pan_tompkin".into(),
                expected: 3,
                found: args.len(),
            });
        };
        let fs = fs.as_scalar().ok_or_else(|| RuntimeError::Unsupported {
            message: "sampling rate must be a scalar".into(),
            site,
        })?;
        if !(fs >= 1.0 && fs.fract() == 0.0 && fs <= u32::MAX as f64) {
            return Err(RuntimeError::Detector {
                source: DspError::InvalidFs(fs),
                site,
            });
        }
        let sig = EcgSignal::new(sig.to_reals(), fs as u32)
            .map_err(|source| RuntimeError::Detector { source, site })?;
        let det = self
            .interp
            .peaks
            .detect(&sig)
            .map_err(|source| RuntimeError::Detector { source, site })?;
        Ok(vec![
            NumValue::column(det.peak_amplitudes),
            NumValue::IVec(det.peak_indices.iter().map(|p| p + 1).collect()),
            NumValue::RScalar(det.delay as f64),
        ])
    }

    fn lookup(&self, name: &str, site: Pos) -> Result<&NumValue, RuntimeError> {
        self.env
            .bindings
            .get(name)
            .ok_or_else(|| RuntimeError::Undefined {
                name: name.to_string(),
                site,
            })
    }

    /// `end_len` is the length `end` stands for inside a subscript.
    fn expr(&self, e: &Expr, end_len: Option<usize>) -> Result<NumValue, RuntimeError> {
        let math = |source| RuntimeError::Math {
            source,
            site: e.pos,
        };
        Ok(match &e.kind {
            ExprKind::Num { value, .. } => NumValue::RScalar(*value),
            ExprKind::Var(n) => self.lookup(n, e.pos)?.clone(),
            ExprKind::End => match end_len {
                Some(n) => NumValue::RScalar(n as f64),
                None => {
                    return Err(RuntimeError::Unsupported {
                        message: "`end` outside a subscript".into(),
                        site: e.pos,
                    })
                }
            },
            ExprKind::Range { .. } => {
                return Err(RuntimeError::Unsupported {
                    message: "range outside a subscript".into(),
                    site: e.pos,
                })
            }
            ExprKind::Neg(inner) => mc::neg(&self.expr(inner, end_len)?),
            ExprKind::Binary { op, lhs, rhs } => {
                let a = self.expr(lhs, end_len)?;
                let b = self.expr(rhs, end_len)?;
                let arith = |op| mc::ew(op, &a, &b).map_err(math);
                let cmp = |op| mc::compare(op, &a, &b).map_err(math);
                let needs_scalar =
                    matches!(op, BinOp::Mul | BinOp::Div) && a.numel() != 1 && b.numel() != 1;
                if needs_scalar {
                    return Err(RuntimeError::Unsupported {
                        message: format!(
                            "matrix `{}` of two arrays; use the elementwise operator",
                            op.lexeme()
                        ),
                        site: e.pos,
                    });
                }
                match op {
                    BinOp::Add => arith(ArithOp::Add)?,
                    BinOp::Sub => arith(ArithOp::Sub)?,
                    BinOp::Mul | BinOp::ElemMul => arith(ArithOp::Mul)?,
                    BinOp::Div | BinOp::ElemDiv => arith(ArithOp::Div)?,
                    BinOp::Gt => cmp(CmpOp::Gt)?,
                    BinOp::Lt => cmp(CmpOp::Lt)?,
                    BinOp::Ge => cmp(CmpOp::Ge)?,
                    BinOp::Le => cmp(CmpOp::Le)?,
                    BinOp::Eq => cmp(CmpOp::Eq)?,
                }
            }
            ExprKind::Apply { name, args } => {
                if self.env.bindings.contains_key(name)
                    || self.info.resolution(e.pos) == Some(Resolution::Index)
                {
                    self.index(e, name, args)?
                } else {
                    let mut vals = Vec::with_capacity(args.len());
                    for a in args {
                        vals.push(self.expr(a, None)?);
                    }
                    self.builtin(name, &vals, e.pos)?
                }
            }
        })
    }

    fn index(&self, e: &Expr, name: &str, args: &[Expr]) -> Result<NumValue, RuntimeError> {
        let base = self.lookup(name, e.pos)?;
        let [sub] = args else {
            return Err(RuntimeError::Unsupported {
                message: format!("{} subscripts on `{name}`", args.len()),
                site: e.pos,
            });
        };
        let len = base.numel();
        let position = |v: f64| -> Result<usize, RuntimeError> {
            if v.fract() != 0.0 || v < 1.0 || v > len as f64 {
                return Err(RuntimeError::Index {
                    name: name.to_string(),
                    index: v,
                    len,
                    site: e.pos,
                });
            }
            Ok(v as usize - 1)
        };
        let scalar_of = |x: &Expr| -> Result<f64, RuntimeError> {
            let v = self.expr(x, Some(len))?;
            v.as_scalar().ok_or_else(|| RuntimeError::Unsupported {
                message: "subscript must be a scalar or a range".into(),
                site: x.pos,
            })
        };
        let math = |source| RuntimeError::Math {
            source,
            site: e.pos,
        };
        match &sub.kind {
            ExprKind::Range { start, stop } => {
                let a = scalar_of(start)?;
                let b = scalar_of(stop)?;
                if b < a {
                    return mc::slice(base, SpanSel::empty()).map_err(math);
                }
                let lo = position(a)?;
                let hi = position(b)?;
                mc::slice(base, SpanSel::new(lo, hi)).map_err(math)
            }
            _ => {
                let k = position(scalar_of(sub)?)?;
                mc::element(base, k).map_err(math)
            }
        }
    }

    fn builtin(&self, name: &str, args: &[NumValue], site: Pos) -> Result<NumValue, RuntimeError> {
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(RuntimeError::Arity {
                    name: name.to_string(),
                    expected: n,
                    found: args.len(),
                })
            }
        };
        let count = |v: &NumValue| -> Result<usize, RuntimeError> {
            match v.as_scalar() {
                Some(x) if x >= 0.0 && x.fract() == 0.0 => Ok(x as usize),
                _ => Err(RuntimeError::Unsupported {
                    message: format!("`{name}` needs non-negative integer sizes"),
                    site,
                }),
            }
        };
        Ok(match name {
            "length" => {
                arity(1)?;
                NumValue::IScalar(mc::length(&args[0]))
            }
            "diff" => {
                arity(1)?;
                mc::diff(&args[0])
            }
            "zeros" => {
                arity(2)?;
                mc::zeros(count(&args[0])?, count(&args[1])?)
            }
            "abs" => {
                arity(1)?;
                mc::map(&args[0], f64::abs)
            }
            "round" => {
                arity(1)?;
                mc::map(&args[0], f64::round)
            }
            "floor" => {
                arity(1)?;
                mc::map(&args[0], f64::floor)
            }
            "max" => {
                arity(1)?;
                match mc::max(&args[0]) {
                    Some(m) => NumValue::RScalar(m),
                    None => NumValue::RVec(Vec::new()),
                }
            }
            "mean" => {
                arity(1)?;
                NumValue::RScalar(mc::mean(&args[0]))
            }
            "sum" => {
                arity(1)?;
                NumValue::RScalar(mc::sum(&args[0]))
            }
            "pan_tompkin" => {
                return Err(RuntimeError::Unsupported {
                    message: "`pan_tompkin` must be called as a statement".into(),
                    site,
                })
            }
            _ => {
                return Err(RuntimeError::Unsupported {
                    message: format!("no evaluation rule for builtin `{name}`"),
                    site,
                })
            }
        })
    }
}

/// Names of builtins the interpreter can evaluate.
pub const INTRINSICS: [&str; 10] = [
    "length",
    "diff",
    "zeros",
    "abs",
    "round",
    "floor",
    "max",
    "mean",
    "sum",
    "pan_tompkin",
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::resolve;
    use crate::corpus;
    use crate::dsp::FixedPeaks;
    use crate::frontend::parse_source;
    use crate::mapping::Registry;

    fn typed(src: &str) -> TypedProgram {
        resolve(&parse_source(src).unwrap(), &Registry::builtin_defaults()).unwrap()
    }

    fn ekg_with(peaks0: Vec<usize>, fs: f64) -> EvalOutcome {
        let tp = typed(corpus::EKG_SOURCE);
        let stub = FixedPeaks(peaks0);
        Interpreter::new(&tp, &stub)
            .call(
                "EKGpeakDet",
                vec![NumValue::column(vec![0.0; 400]), NumValue::RScalar(fs)],
            )
            .unwrap()
    }

    #[test]
    fn three_forced_peaks() {
        // 0-based 99,199,299 are 1-based 100,200,300
        let out = ekg_with(vec![99, 199, 299], 100.0);
        assert_eq!(out.get("iHR").unwrap().to_reals(), [60.0, 60.0]);
        assert_eq!(out.get("tHR").unwrap().to_reals(), [1.5, 2.5]);
        assert_eq!(
            out.get("peak").unwrap(),
            &NumValue::IVec(vec![100, 200, 300])
        );
        let names: Vec<&str> = out.outputs.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, ["iHR", "tHR", "peak"]);
    }

    #[test]
    fn single_forced_peak_takes_else_branch() {
        let out = ekg_with(vec![149], 100.0);
        assert_eq!(out.get("iHR").unwrap().to_reals(), [30.0]);
        assert!(out.get("tHR").unwrap().to_reals().is_empty());
    }

    #[test]
    fn identity() {
        let tp = typed(corpus::IDENTITY_SOURCE);
        let out = Interpreter::new(&tp, &FixedPeaks(vec![]))
            .call("f", vec![NumValue::RScalar(3.5)])
            .unwrap();
        assert_eq!(out.outputs, [("y".to_string(), NumValue::RScalar(3.5))]);
    }

    fn env(pairs: &[(&str, NumValue)]) -> Env {
        Env {
            bindings: pairs
                .iter()
                .map(|(n, v)| (n.to_string(), v.clone()))
                .collect(),
            depth: 0,
        }
    }

    fn expr(text: &str) -> Expr {
        let prog = parse_source(&format!("function y = f()\ny = {text};")).unwrap();
        let StmtKind::Assign { expr, .. } = &prog.functions[0].body[0].kind else {
            panic!()
        };
        expr.clone()
    }

    #[test]
    fn expression_examples() {
        let tp = typed(corpus::EKG_SOURCE);
        let stub = FixedPeaks(vec![]);
        let it = Interpreter::new(&tp, &stub);
        let e = env(&[
            ("peak", NumValue::IVec(vec![100, 200, 300])),
            ("RR", NumValue::RVec(vec![100.0, 100.0])),
            ("fs", NumValue::RScalar(100.0)),
        ]);
        assert_eq!(
            it.eval_expr(&expr("peak(1:end-1)"), &e).unwrap(),
            NumValue::IVec(vec![100, 200])
        );
        assert_eq!(
            it.eval_expr(&expr("60./RR*fs"), &e).unwrap(),
            NumValue::RVec(vec![60.0, 60.0])
        );
        let single = env(&[("peak", NumValue::IVec(vec![150]))]);
        assert_eq!(
            it.eval_expr(&expr("length(peak)>1"), &single).unwrap(),
            NumValue::IScalar(0)
        );
    }

    #[test]
    fn index_errors_report_name_and_length() {
        let tp = typed(corpus::EKG_SOURCE);
        let stub = FixedPeaks(vec![]);
        let it = Interpreter::new(&tp, &stub);
        let e = env(&[("v", NumValue::RVec(vec![1.0, 2.0]))]);
        assert!(matches!(
            it.eval_expr(&expr("v(3)"), &e),
            Err(RuntimeError::Index { ref name, len: 2, .. }) if name == "v"
        ));
        assert!(it.eval_expr(&expr("v(1.5)"), &e).is_err());
        assert_eq!(
            it.eval_expr(&expr("v(2:1)"), &e).unwrap(),
            NumValue::RVec(vec![])
        );
    }

    #[test]
    fn loops_and_branches() {
        let tp = typed(corpus::MEAN_RR_SOURCE);
        let stub = FixedPeaks(vec![]);
        let out = Interpreter::new(&tp, &stub)
            .call(
                "mean_rr",
                vec![
                    NumValue::RVec(vec![10.0, 110.0, 230.0, 330.0]),
                    NumValue::RScalar(100.0),
                ],
            )
            .unwrap();
        let mrr = out.get("mrr").unwrap().as_scalar().unwrap();
        assert!((mrr - 320.0 / 3.0 / 100.0).abs() < 1e-12);
        assert_eq!(out.get("hr").unwrap().as_scalar().unwrap(), 60.0 / mrr);
    }

    #[test]
    fn rr_stats_branches() {
        let tp = typed(corpus::RR_STATS_SOURCE);
        let stub = FixedPeaks(vec![]);
        let it = Interpreter::new(&tp, &stub);
        let out = it
            .call(
                "rr_stats",
                vec![
                    NumValue::RVec(vec![100.0, 100.0, 100.0]),
                    NumValue::RScalar(100.0),
                ],
            )
            .unwrap();
        assert_eq!(out.get("beats").unwrap().as_scalar(), Some(4.0));
        assert_eq!(out.get("avg_bpm").unwrap().as_scalar(), Some(60.0));
        // k = 3 so the first branch is skipped; spread 0 is not above 50
        assert_eq!(out.get("spread").unwrap().as_scalar(), Some(0.0));
        let out = it
            .call(
                "rr_stats",
                vec![NumValue::RVec(vec![10.0, 200.0]), NumValue::RScalar(100.0)],
            )
            .unwrap();
        // spread 95 > 0.5 * 105
        assert_eq!(out.get("spread").unwrap().as_scalar(), Some(-1.0));
    }

    #[test]
    fn unassigned_output_is_an_error() {
        let src = "function [a,b] = g(x)\nif x > 0\n a = 1;\n b = 2;\nelse\n a = 3;\n b = 4;\nend";
        let tp = typed(src);
        let stub = FixedPeaks(vec![]);
        let it = Interpreter::new(&tp, &stub);
        assert!(it.call("g", vec![NumValue::RScalar(1.0)]).is_ok());
        let src = "function [a,b] = g(x)\na = 1;\nif x > 0\n b = 2;\nend";
        let tp = typed(src);
        let it = Interpreter::new(&tp, &stub);
        assert_eq!(
            it.call("g", vec![NumValue::RScalar(-1.0)]),
            Err(RuntimeError::UnassignedOutput("b".into()))
        );
    }

    #[test]
    fn calls_between_functions_and_trace() {
        let src = "function y = outer(x)\n[s, t] = inner(x);\ny = s + t;\nfunction [p, q] = inner(x)\np = x * 2;\nq = x + 1;";
        let tp = typed(src);
        let stub = FixedPeaks(vec![]);
        let out = Interpreter::new(&tp, &stub)
            .with_trace(true)
            .call("outer", vec![NumValue::RScalar(3.0)])
            .unwrap();
        assert_eq!(out.get("y"), Some(&NumValue::RScalar(10.0)));
        // p, q inside `inner`, then s, t, y
        assert_eq!(out.trace.len(), 5);
        assert!(out.trace[4].ends_with("y = 10"), "{:?}", out.trace);
    }

    #[test]
    fn arity_mismatch() {
        let tp = typed(corpus::IDENTITY_SOURCE);
        let stub = FixedPeaks(vec![]);
        assert!(matches!(
            Interpreter::new(&tp, &stub).call("f", vec![]),
            Err(RuntimeError::Arity {
                expected: 1,
                found: 0,
                ..
            })
        ));
    }

    #[test]
    fn evaluation_is_pure() {
        let tp = typed(corpus::EKG_SOURCE);
        let before = tp.clone();
        let args = vec![NumValue::column(vec![0.0; 400]), NumValue::RScalar(100.0)];
        let copy = args.clone();
        let stub = FixedPeaks(vec![10, 120, 250]);
        Interpreter::new(&tp, &stub)
            .call("EKGpeakDet", args.clone())
            .unwrap();
        assert_eq!(tp, before);
        assert_eq!(args, copy);
    }
}
