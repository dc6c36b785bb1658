//! Renders a typed program as re-targetable C++ (Armadillo-style `vec`,
//! `uvec`, `mat` plus the `m2cpp` helper namespace), and stages one
//! emitted unit into any number of per-target directories without
//! converting again.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::analysis::{
    binary_type, infer_expr, Callee, FunctionInfo, Resolution, SemType, TypedProgram,
};
use crate::frontend::{BinOp, Expr, ExprKind, FunctionDef, Pos, Stmt, StmtKind, Target};
use crate::mapping::{lower_index, Bound, IndexLowering, Registry};

/// Operating systems that can consume one emitted unit.
pub const KNOWN_TARGETS: [&str; 6] = ["Android", "iOS", "Windows", "RTOS", "Linux", "macOS"];

pub const MANIFEST_FILE: &str = "MANIFEST";

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("{site}: cannot emit {what}")]
    Unresolved { what: String, site: Pos },
    #[error("duplicate target `{0}`")]
    DuplicateTarget(String),
    #[error("invalid target name `{0}`")]
    InvalidTarget(String),
    #[error("no targets given")]
    NoTargets,
    #[error("bad manifest: {0}")]
    Manifest(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> EmitError + '_ {
    move |source| EmitError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmitConfig {
    pub class_name: String,
    pub indent: String,
}

impl Default for EmitConfig {
    fn default() -> Self {
        EmitConfig {
            class_name: "Algorithm".into(),
            indent: "    ".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmittedUnit {
    pub source_text: String,
    pub entry_symbol: String,
    /// Number of emitter invocations that produced this unit.
    pub conversion_count: usize,
}

impl EmittedUnit {
    pub fn file_name(&self) -> String {
        format!("{}.cpp", self.entry_symbol.to_lowercase())
    }

    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(self.source_text.as_bytes()))
    }

    pub fn manifest_line(&self) -> String {
        format!(
            "entry={} file={} sha256={} conversions={}\n",
            self.entry_symbol,
            self.file_name(),
            self.sha256(),
            self.conversion_count
        )
    }

    /// Writes the unit and its manifest into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<PathBuf, EmitError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let path = dir.join(self.file_name());
        fs::write(&path, &self.source_text).map_err(io_err(&path))?;
        let manifest = dir.join(MANIFEST_FILE);
        fs::write(&manifest, self.manifest_line()).map_err(io_err(&manifest))?;
        Ok(path)
    }

    /// Reads a unit written by [`EmittedUnit::write_to`], checking its hash.
    pub fn read_from(dir: &Path) -> Result<EmittedUnit, EmitError> {
        let manifest_path = dir.join(MANIFEST_FILE);
        let manifest = fs::read_to_string(&manifest_path).map_err(io_err(&manifest_path))?;
        let field = |key: &str| {
            manifest
                .split_whitespace()
                .find_map(|w| w.strip_prefix(&format!("{key}=")).map(str::to_string))
                .ok_or_else(|| EmitError::Manifest(format!("missing `{key}`")))
        };
        let entry_symbol = field("entry")?;
        let file = field("file")?;
        let sha = field("sha256")?;
        let conversion_count = field("conversions")?
            .parse()
            .map_err(|_| EmitError::Manifest("bad conversion count".into()))?;
        if file.contains('/') || file.contains('\\') {
            return Err(EmitError::Manifest(format!("bad file name `{file}`")));
        }
        let path = dir.join(&file);
        let source_text = fs::read_to_string(&path).map_err(io_err(&path))?;
        let unit = EmittedUnit {
            source_text,
            entry_symbol,
            conversion_count,
        };
        if unit.sha256() != sha {
            return Err(EmitError::Manifest(format!(
                "{file} does not match its hash"
            )));
        }
        Ok(unit)
    }
}

/// Converts typed programs and counts how many times it has done so.
#[derive(Debug)]
pub struct Emitter {
    cfg: EmitConfig,
    registry: Registry,
    invocations: AtomicUsize,
}

impl Emitter {
    pub fn new(cfg: EmitConfig, registry: Registry) -> Self {
        Emitter {
            cfg,
            registry,
            invocations: AtomicUsize::new(0),
        }
    }

    pub fn invocations(&self) -> usize {
        self.invocations.load(Ordering::SeqCst)
    }

    pub fn emit(&self, tp: &TypedProgram) -> Result<EmittedUnit, EmitError> {
        self.invocations.fetch_add(1, Ordering::SeqCst);
        let mut out = String::new();
        for (i, (f, info)) in tp.program.functions.iter().zip(&tp.functions).enumerate() {
            if i > 0 {
                out.push('\n');
            }
            FunctionEmitter {
                cfg: &self.cfg,
                registry: &self.registry,
                tp,
                func: f,
                info,
                out: &mut out,
            }
            .emit()?;
        }
        Ok(EmittedUnit {
            source_text: out,
            entry_symbol: tp.program.functions[0].name.clone(),
            conversion_count: 1,
        })
    }
}

/// Emits with a fresh [`Emitter`] and the default configuration.
pub fn emit(tp: &TypedProgram, registry: &Registry) -> Result<EmittedUnit, EmitError> {
    Emitter::new(EmitConfig::default(), registry.clone()).emit(tp)
}

/// Copies the unit's bytes into `<out_dir>/<target>/` for every target.
/// Nothing is re-emitted.
pub fn port(
    unit: &EmittedUnit,
    targets: &[String],
    out_dir: &Path,
) -> Result<Vec<(String, PathBuf)>, EmitError> {
    if targets.is_empty() {
        return Err(EmitError::NoTargets);
    }
    for (i, t) in targets.iter().enumerate() {
        let valid = !t.is_empty()
            && t.chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
        if !valid {
            return Err(EmitError::InvalidTarget(t.clone()));
        }
        if targets[..i].contains(t) {
            return Err(EmitError::DuplicateTarget(t.clone()));
        }
    }
    targets
        .iter()
        .map(|t| {
            let path = unit.write_to(&out_dir.join(t))?;
            Ok((t.clone(), path))
        })
        .collect()
}

/// Type name used in declarations. Index vectors are declared as `vec`;
/// `uvec` only appears as the element kind of span selectors.
pub fn decl_type(t: SemType) -> Option<&'static str> {
    Some(match t {
        SemType::IndexScalar => "uword",
        SemType::IntScalar => "int",
        SemType::RealScalar => "double",
        SemType::RealVector | SemType::IndexVector => "vec",
        SemType::RealMatrix => "mat",
        SemType::Unknown => return None,
    })
}

struct FunctionEmitter<'a> {
    cfg: &'a EmitConfig,
    registry: &'a Registry,
    tp: &'a TypedProgram,
    func: &'a FunctionDef,
    info: &'a FunctionInfo,
    out: &'a mut String,
}

impl FunctionEmitter<'_> {
    fn ty(&self, name: &str, site: Pos) -> Result<&'static str, EmitError> {
        decl_type(self.info.type_of(name)).ok_or_else(|| EmitError::Unresolved {
            what: format!("`{name}` of unknown type"),
            site,
        })
    }

    fn emit(mut self) -> Result<(), EmitError> {
        let site = self.func.pos;
        let mut params = Vec::new();
        for (name, t) in &self.info.params {
            let ty = self.ty(name, site)?;
            params.push(if t.is_scalar() {
                format!("{ty} {name}")
            } else {
                format!("{ty} &{name}")
            });
        }
        for (name, _) in &self.info.outputs {
            params.push(format!("{} &{name}", self.ty(name, site)?));
        }
        let head = if params.is_empty() {
            "( )".to_string()
        } else {
            format!("( {} )", params.join(", "))
        };
        writeln!(
            self.out,
            "void {}::{} {head}",
            self.cfg.class_name, self.func.name
        )
        .unwrap();
        self.out.push_str("{\n");

        // Declarations: user locals, latest first, then generated slots by name.
        let pad = self.cfg.indent.clone();
        let mut decls: Vec<(String, SemType)> = self
            .info
            .locals
            .iter()
            .rev()
            .map(|n| (n.clone(), self.info.type_of(n)))
            .collect();
        let mut temps: Vec<(String, SemType)> = self
            .info
            .temporaries
            .iter()
            .map(|t| (t.name.clone(), t.ty))
            .collect();
        temps.sort();
        decls.extend(temps);
        for (name, t) in decls {
            let ty = decl_type(t).ok_or_else(|| EmitError::Unresolved {
                what: format!("`{name}` of unknown type"),
                site,
            })?;
            if t == SemType::IntScalar {
                writeln!(self.out, "{pad}{ty} {name} = 0 ;").unwrap();
            } else {
                writeln!(self.out, "{pad}{ty} {name} ;").unwrap();
            }
        }
        self.block(&self.func.body, 1)?;
        self.out.push_str("}\n");
        Ok(())
    }

    fn block(&mut self, stmts: &[Stmt], depth: usize) -> Result<(), EmitError> {
        for s in stmts {
            self.statement(s, depth)?;
        }
        Ok(())
    }

    fn braced(&mut self, stmts: &[Stmt], depth: usize) -> Result<(), EmitError> {
        let pad = self.cfg.indent.repeat(depth);
        writeln!(self.out, "{pad}{{").unwrap();
        self.block(stmts, depth + 1)?;
        writeln!(self.out, "{pad}}}").unwrap();
        Ok(())
    }

    fn statement(&mut self, s: &Stmt, depth: usize) -> Result<(), EmitError> {
        let pad = self.cfg.indent.repeat(depth);
        match &s.kind {
            StmtKind::Assign { targets, expr } => {
                if let Some(line) = self.slot_call(s.pos, targets, expr)? {
                    writeln!(self.out, "{pad}{line}").unwrap();
                    return Ok(());
                }
                let Some(Target::Name(name)) = targets.first() else {
                    return Err(EmitError::Unresolved {
                        what: "placeholder assignment".into(),
                        site: s.pos,
                    });
                };
                let rhs = self.expr(expr, 0, false)?;
                writeln!(self.out, "{pad}{name} = {rhs} ;").unwrap();
            }
            StmtKind::Expr(expr) => {
                if let Some(line) = self.slot_call(s.pos, &[], expr)? {
                    writeln!(self.out, "{pad}{line}").unwrap();
                } else {
                    let e = self.expr(expr, 0, false)?;
                    writeln!(self.out, "{pad}{e} ;").unwrap();
                }
            }
            StmtKind::If {
                cond,
                then_body,
                else_body,
            } => {
                let c = self.expr(cond, 0, false)?;
                writeln!(self.out, "{pad}if ({c})").unwrap();
                self.braced(then_body, depth)?;
                if !else_body.is_empty() {
                    writeln!(self.out, "{pad}else").unwrap();
                    self.braced(else_body, depth)?;
                }
            }
            StmtKind::For {
                var,
                start,
                stop,
                body,
            } => {
                let a = self.expr(start, 0, false)?;
                let b = self.expr(stop, 0, false)?;
                writeln!(self.out, "{pad}for ({var} = {a}; {var} <= {b}; {var}++)").unwrap();
                self.braced(body, depth)?;
            }
            StmtKind::While { cond, body } => {
                let c = self.expr(cond, 0, false)?;
                writeln!(self.out, "{pad}while ({c})").unwrap();
                self.braced(body, depth)?;
            }
        }
        Ok(())
    }

    /// Calls that deliver results through trailing reference arguments.
    fn slot_call(
        &mut self,
        site: Pos,
        targets: &[Target],
        expr: &Expr,
    ) -> Result<Option<String>, EmitError> {
        let ExprKind::Apply { name, args } = &expr.kind else {
            return Ok(None);
        };
        let Some(Resolution::Call(callee)) = self.info.resolution(expr.pos) else {
            return Ok(None);
        };
        match callee {
            Callee::Builtin => {
                let arg_types = self.arg_types(args)?;
                let entry =
                    self.registry
                        .lookup(name, &arg_types)
                        .map_err(|e| EmitError::Unresolved {
                            what: e.to_string(),
                            site: expr.pos,
                        })?;
                let slots = entry.out_params().len();
                if slots == 0 {
                    return Ok(None);
                }
                let mut parts = Vec::new();
                for i in entry.kept_args() {
                    parts.push(self.expr(&args[i], 0, false)?);
                }
                parts.extend(self.info.slot_destinations(site, targets, slots));
                Ok(Some(format!(
                    "{}({});",
                    entry.target_name,
                    parts.join(", ")
                )))
            }
            Callee::Function => {
                let (callee_def, callee_info) =
                    self.tp
                        .function(name)
                        .ok_or_else(|| EmitError::Unresolved {
                            what: format!("call to missing function `{name}`"),
                            site: expr.pos,
                        })?;
                let dests = self
                    .info
                    .slot_destinations(site, targets, callee_def.outputs.len());
                let mut parts = Vec::new();
                for a in args {
                    parts.push(self.expr(a, 0, false)?);
                }
                // Reorder header-order slots into the callee's parameter order.
                for (out_name, _) in &callee_info.outputs {
                    let slot = callee_def
                        .outputs
                        .iter()
                        .position(|o| o == out_name)
                        .expect("outputs are a permutation");
                    parts.push(dests[slot].clone());
                }
                Ok(Some(format!("{name}({});", parts.join(", "))))
            }
        }
    }

    fn arg_types(&self, args: &[Expr]) -> Result<Vec<SemType>, EmitError> {
        args.iter().map(|a| self.type_of(a)).collect()
    }

    fn type_of(&self, e: &Expr) -> Result<SemType, EmitError> {
        infer_expr(e, &self.info.symbols, self.registry).map_err(|err| EmitError::Unresolved {
            what: err.to_string(),
            site: e.pos,
        })
    }

    /// `ctx` is the minimum precedence that may appear unparenthesized;
    /// `real_literal` renders integer-valued literals as `k.0`.
    fn expr(&self, e: &Expr, ctx: u8, real_literal: bool) -> Result<String, EmitError> {
        Ok(match &e.kind {
            ExprKind::Num { value, .. } => literal(*value, real_literal),
            ExprKind::Var(n) => n.clone(),
            ExprKind::Neg(inner) => {
                let s = format!("-{}", self.expr(inner, 4, real_literal)?);
                if ctx > 3 {
                    format!("({s})")
                } else {
                    s
                }
            }
            ExprKind::Apply { name, args } => self.apply(e, name, args)?,
            ExprKind::Binary { op, lhs, rhs } => {
                let (lt, rt) = (self.type_of(lhs)?, self.type_of(rhs)?);
                let p = op.precedence();
                let s = if *op == BinOp::ElemDiv && lt.is_scalar() && rt.is_array() {
                    // s ./ v  ->  s*1.0/v
                    format!(
                        "{}*1.0/{}",
                        self.expr(lhs, 3, literal_is_real(*op, rt))?,
                        self.expr(rhs, 4, literal_is_real(*op, lt))?
                    )
                } else {
                    format!(
                        "{}{}{}",
                        self.expr(lhs, p, literal_is_real(*op, rt))?,
                        target_op(*op),
                        self.expr(rhs, p + 1, literal_is_real(*op, lt))?
                    )
                };
                debug_assert!(binary_type(*op, lt, rt) != SemType::Unknown);
                if p < ctx {
                    format!("({s})")
                } else {
                    s
                }
            }
            ExprKind::Range { .. } | ExprKind::End => {
                return Err(EmitError::Unresolved {
                    what: "range or `end` outside a subscript".into(),
                    site: e.pos,
                })
            }
        })
    }

    fn apply(&self, e: &Expr, name: &str, args: &[Expr]) -> Result<String, EmitError> {
        match self.info.resolution(e.pos) {
            Some(Resolution::Index) => {
                let base_ty = self.info.type_of(name);
                let lowered =
                    lower_index(name, base_ty, &args[0]).map_err(|err| EmitError::Unresolved {
                        what: err.to_string(),
                        site: e.pos,
                    })?;
                let sub = match lowered {
                    IndexLowering::Scalar(b) => self.bound(name, &b)?,
                    IndexLowering::Span { lo, hi } => format!(
                        "m2cpp::span<uvec>({}, {})",
                        self.bound(name, &lo)?,
                        self.bound(name, &hi)?
                    ),
                    IndexLowering::EmptySpan => "m2cpp::empty_span<uvec>()".to_string(),
                };
                Ok(format!("{name}({sub})"))
            }
            Some(Resolution::Call(Callee::Builtin)) => {
                let arg_types = self.arg_types(args)?;
                let entry = self.registry.lookup(name, &arg_types).map_err(|err| {
                    EmitError::Unresolved {
                        what: err.to_string(),
                        site: e.pos,
                    }
                })?;
                let mut parts = Vec::new();
                for i in entry.kept_args() {
                    parts.push(self.expr(&args[i], 0, false)?);
                }
                Ok(format!("{}({})", entry.target_name, parts.join(", ")))
            }
            other => Err(EmitError::Unresolved {
                what: format!("`{name}(...)` resolved as {other:?}"),
                site: e.pos,
            }),
        }
    }

    fn bound(&self, base: &str, b: &Bound) -> Result<String, EmitError> {
        Ok(match b {
            Bound::Const(c) => c.to_string(),
            Bound::FromEnd(d) => format!("{base}.n_rows-{d}"),
            Bound::Shifted { expr, offset } => {
                let e = self.expr(expr, 2, false)?;
                match offset {
                    0 => e,
                    o if *o < 0 => format!("{e}-{}", -o),
                    o => format!("{e}+{o}"),
                }
            }
        })
    }
}

/// Whether a literal operand of `op` whose sibling has type `other` is
/// rendered as a real (`2.0`). Integer siblings keep bare literals for
/// `+ - *`, so index arithmetic stays integral.
fn literal_is_real(op: BinOp, other: SemType) -> bool {
    if op.is_comparison() {
        return false;
    }
    let integral_ok = matches!(op, BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::ElemMul);
    !(other.is_integral_scalar() && integral_ok)
}

fn literal(v: f64, real: bool) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        if real {
            format!("{v:.1}")
        } else {
            format!("{}", v as i64)
        }
    } else {
        format!("{v}")
    }
}

fn target_op(op: BinOp) -> &'static str {
    match op {
        BinOp::Add => "+",
        BinOp::Sub => "-",
        BinOp::Mul => "*",
        BinOp::Div | BinOp::ElemDiv => "/",
        BinOp::ElemMul => "%",
        BinOp::Gt => ">",
        BinOp::Lt => "<",
        BinOp::Ge => ">=",
        BinOp::Le => "<=",
        BinOp::Eq => "==",
    }
}

/// Splits target-dialect text into lexical tokens, ignoring whitespace.
/// Used to compare emitted code against a reference independent of layout.
pub fn target_tokens(text: &str) -> Vec<String> {
    const MULTI: [&str; 6] = ["::", "->", "++", "<=", ">=", "=="];
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(chars[start..i].iter().collect());
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            out.push(chars[start..i].iter().collect());
        } else {
            let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
            if MULTI.contains(&two.as_str()) {
                out.push(two);
                i += 2;
            } else {
                out.push(c.to_string());
                i += 1;
            }
        }
    }
    out
}

/// Collapses whitespace runs to one space and strips line ends.
pub fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::resolve;
    use crate::corpus;
    use crate::frontend::parse_source;

    fn emit_src(src: &str, reg: &Registry) -> String {
        let tp = resolve(&parse_source(src).unwrap(), reg).unwrap();
        emit(&tp, reg).unwrap().source_text
    }

    #[test]
    fn identity_function() {
        let text = emit_src("function y = f(x)\ny = x;", &Registry::builtin_defaults());
        assert_eq!(
            text,
            "void Algorithm::f ( double x, double &y )\n{\n    y = x ;\n}\n"
        );
    }

    #[test]
    fn ekg_matches_golden_tokens() {
        let reg = Registry::builtin_defaults();
        let text = emit_src(corpus::EKG_SOURCE, &reg);
        assert_eq!(
            target_tokens(&text),
            target_tokens(corpus::EKG_GOLDEN),
            "\n{text}"
        );
    }

    #[test]
    fn ekg_statement_renderings() {
        let text = emit_src(corpus::EKG_SOURCE, &Registry::builtin_defaults());
        let norm = normalize_whitespace(&text);
        for line in [
            "iHR = 60.0*1.0/RR*fs ;",
            "tHR = (peak(m2cpp::span<uvec>(0, peak.n_rows-2))+RR/2.0)/fs ;",
            "RR = 200 ;",
            "int delay = 0 ;",
            "pan_tompkin(sig, fs, qrs_amp_raw, peak, delay);",
            "if (m2cpp::length(peak)>1)",
        ] {
            assert!(norm.contains(line), "missing `{line}` in\n{text}");
        }
    }

    #[test]
    fn literal_rules() {
        assert_eq!(literal(60.0, true), "60.0");
        assert_eq!(literal(200.0, false), "200");
        assert_eq!(literal(0.15, true), "0.15");
        assert_eq!(literal(0.15, false), "0.15");
    }

    #[test]
    fn runtime_subscripts_and_loops() {
        let reg = Registry::builtin_defaults();
        let text = emit_src(corpus::MEAN_RR_SOURCE, &reg);
        let norm = normalize_whitespace(&text);
        assert!(norm.contains("for (k = 2; k <= n; k++)"), "{text}");
        assert!(norm.contains("acc = acc+(peak(k-1)-peak(k-2)) ;"), "{text}");
        assert!(norm.contains("mrr = acc/(n-1)/fs ;"), "{text}");
        assert!(norm.contains("hr = 60.0/mrr ;"), "{text}");
        assert!(
            norm.contains("void Algorithm::mean_rr ( vec &peak, int fs, double &mrr, double &hr )")
        );
    }

    #[test]
    fn elementwise_product_and_parenthesized_rewrite() {
        let reg = Registry::parse(&format!(
            "{}\nentry g params=v:RealVector,s:RealScalar outs=y:RealVector",
            crate::mapping::DEFAULT_SIGNATURES.replace("entry", "# entry")
        ))
        .unwrap();
        let text = emit_src(
            "function y = g(v,s)\ny = v.*(s./v) - v(end) + v(2:3);",
            &reg,
        );
        assert!(
            normalize_whitespace(&text)
                .contains("y = v%(s*1.0/v)-v(v.n_rows-1)+v(m2cpp::span<uvec>(1, 2)) ;"),
            "{text}"
        );
    }

    #[test]
    fn emit_is_deterministic_and_counted() {
        let reg = Registry::builtin_defaults();
        let tp = resolve(&parse_source(corpus::EKG_SOURCE).unwrap(), &reg).unwrap();
        let em = Emitter::new(EmitConfig::default(), reg);
        let a = em.emit(&tp).unwrap();
        let b = em.emit(&tp).unwrap();
        assert_eq!(a.source_text, b.source_text);
        assert_eq!(em.invocations(), 2);
        assert_eq!(a.conversion_count, 1);
    }

    #[test]
    fn token_splitter() {
        assert_eq!(
            target_tokens("a::b(0, x.n_rows-2)"),
            ["a", "::", "b", "(", "0", ",", "x", ".", "n_rows", "-", "2", ")"]
        );
    }

    #[test]
    fn port_rejects_duplicates_and_bad_names() {
        let unit = EmittedUnit {
            source_text: "x".into(),
            entry_symbol: "f".into(),
            conversion_count: 1,
        };
        let dir = tempfile::tempdir().unwrap();
        let dup = vec!["Android".to_string(), "Android".to_string()];
        assert!(matches!(
            port(&unit, &dup, dir.path()),
            Err(EmitError::DuplicateTarget(_))
        ));
        assert!(matches!(
            port(&unit, &["../x".to_string()], dir.path()),
            Err(EmitError::InvalidTarget(_))
        ));
        assert!(matches!(
            port(&unit, &[], dir.path()),
            Err(EmitError::NoTargets)
        ));
    }

    #[test]
    fn manifest_roundtrip_and_tamper_detection() {
        let unit = EmittedUnit {
            source_text: "void Algorithm::f ( )\n{\n}\n".into(),
            entry_symbol: "f".into(),
            conversion_count: 1,
        };
        let dir = tempfile::tempdir().unwrap();
        unit.write_to(dir.path()).unwrap();
        assert_eq!(EmittedUnit::read_from(dir.path()).unwrap(), unit);
        fs::write(dir.path().join("f.cpp"), "tampered").unwrap();
        assert!(matches!(
            EmittedUnit::read_from(dir.path()),
            Err(EmitError::Manifest(_))
        ));
    }
}
