//! Numeric values and MATLAB-compatible array primitives shared by the
//! interpreter and the native pipeline.
//!
//! Vectors are column vectors. A one-element vector broadcasts like a
//! scalar, and an empty operand combined with a scalar yields an empty
//! result.

use std::fmt;

use thiserror::Error;

/// Rows × columns. Scalars are 1×1, vectors n×1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    pub rows: usize,
    pub cols: usize,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MathError {
    #[error("shape mismatch: {0} vs {1}")]
    ShapeMismatch(Shape, Shape),
    #[error("index {index} out of bounds for length {len}")]
    IndexOutOfBounds { index: usize, len: usize },
    #[error("matrix storage length {len} does not match {rows}x{cols}")]
    BadMatrix {
        rows: usize,
        cols: usize,
        len: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum NumValue {
    RScalar(f64),
    IScalar(usize),
    RVec(Vec<f64>),
    IVec(Vec<usize>),
    /// Row-major storage.
    RMat {
        rows: usize,
        cols: usize,
        data: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            ArithOp::Add => a + b,
            ArithOp::Sub => a - b,
            ArithOp::Mul => a * b,
            ArithOp::Div => a / b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Gt,
    Lt,
    Ge,
    Le,
    Eq,
}

impl CmpOp {
    fn apply(self, a: f64, b: f64) -> bool {
        match self {
            CmpOp::Gt => a > b,
            CmpOp::Lt => a < b,
            CmpOp::Ge => a >= b,
            CmpOp::Le => a <= b,
            CmpOp::Eq => a == b,
        }
    }
}

/// Inclusive 0-based selection `lo..=hi`, or the empty selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpanSel {
    pub lo: usize,
    pub hi: usize,
    pub empty: bool,
}

impl SpanSel {
    pub fn new(lo: usize, hi: usize) -> Self {
        assert!(lo <= hi, "non-empty span requires lo <= hi");
        SpanSel {
            lo,
            hi,
            empty: false,
        }
    }

    pub fn empty() -> Self {
        SpanSel {
            lo: 0,
            hi: 0,
            empty: true,
        }
    }

    pub fn len(&self) -> usize {
        if self.empty {
            0
        } else {
            self.hi - self.lo + 1
        }
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    /// The selection equivalent to applying `self` and then `inner` to the
    /// result.
    pub fn compose(&self, inner: SpanSel) -> SpanSel {
        if self.empty || inner.empty {
            SpanSel::empty()
        } else {
            SpanSel::new(self.lo + inner.lo, self.lo + inner.hi)
        }
    }
}

impl NumValue {
    pub fn matrix(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, MathError> {
        if rows * cols != data.len() {
            return Err(MathError::BadMatrix {
                rows,
                cols,
                len: data.len(),
            });
        }
        Ok(NumValue::RMat { rows, cols, data })
    }

    /// n×1 matrix holding `data`.
    pub fn column(data: Vec<f64>) -> Self {
        NumValue::RMat {
            rows: data.len(),
            cols: 1,
            data,
        }
    }

    pub fn shape(&self) -> Shape {
        match self {
            NumValue::RScalar(_) | NumValue::IScalar(_) => Shape { rows: 1, cols: 1 },
            NumValue::RVec(v) => Shape {
                rows: v.len(),
                cols: 1,
            },
            NumValue::IVec(v) => Shape {
                rows: v.len(),
                cols: 1,
            },
            NumValue::RMat { rows, cols, .. } => Shape {
                rows: *rows,
                cols: *cols,
            },
        }
    }

    pub fn numel(&self) -> usize {
        let s = self.shape();
        s.rows * s.cols
    }

    pub fn is_scalar(&self) -> bool {
        matches!(self, NumValue::RScalar(_) | NumValue::IScalar(_))
    }

    pub fn is_matrix(&self) -> bool {
        matches!(self, NumValue::RMat { .. })
    }

    /// Element at 0-based linear (column-major) position, as a real.
    pub fn get_real(&self, k: usize) -> Result<f64, MathError> {
        let len = self.numel();
        if k >= len {
            return Err(MathError::IndexOutOfBounds { index: k, len });
        }
        Ok(match self {
            NumValue::RScalar(x) => *x,
            NumValue::IScalar(i) => *i as f64,
            NumValue::RVec(v) => v[k],
            NumValue::IVec(v) => v[k] as f64,
            NumValue::RMat { rows, cols, data } => data[(k % rows) * cols + k / rows],
        })
    }

    /// All elements in column-major order as reals.
    pub fn to_reals(&self) -> Vec<f64> {
        match self {
            NumValue::RScalar(x) => vec![*x],
            NumValue::IScalar(i) => vec![*i as f64],
            NumValue::RVec(v) => v.clone(),
            NumValue::IVec(v) => v.iter().map(|&i| i as f64).collect(),
            NumValue::RMat { rows, cols, data } => {
                let mut out = Vec::with_capacity(data.len());
                for c in 0..*cols {
                    for r in 0..*rows {
                        out.push(data[r * cols + c]);
                    }
                }
                out
            }
        }
    }

    /// Scalar value as a real, or the single element of a one-element array.
    pub fn as_scalar(&self) -> Option<f64> {
        (self.numel() == 1).then(|| self.get_real(0).unwrap())
    }

    /// Truth value of a condition: nonempty with every element nonzero.
    pub fn is_true(&self) -> bool {
        self.numel() > 0 && self.to_reals().iter().all(|&x| x != 0.0)
    }

    /// Promotes a scalar to a one-element vector of the same kind.
    pub fn into_vector(self) -> NumValue {
        match self {
            NumValue::RScalar(x) => NumValue::RVec(vec![x]),
            NumValue::IScalar(i) => NumValue::IVec(vec![i]),
            other => other,
        }
    }

    /// Promotes a scalar or vector to an n×1 matrix.
    pub fn into_matrix(self) -> NumValue {
        match self {
            m @ NumValue::RMat { .. } => m,
            other => NumValue::column(other.to_reals()),
        }
    }
}

impl fmt::Display for NumValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumValue::RScalar(x) => write!(f, "{x}"),
            NumValue::IScalar(i) => write!(f, "{i}"),
            NumValue::RMat { rows, cols, data } => {
                write!(f, "[")?;
                for r in 0..*rows {
                    if r > 0 {
                        write!(f, "; ")?;
                    }
                    for c in 0..*cols {
                        if c > 0 {
                            write!(f, " ")?;
                        }
                        write!(f, "{}", data[r * cols + c])?;
                    }
                }
                write!(f, "]")
            }
            v => {
                let items: Vec<String> = v.to_reals().iter().map(|x| x.to_string()).collect();
                write!(f, "[{}]", items.join(" "))
            }
        }
    }
}

/// Result kind for a broadcast or elementwise combination: a matrix if
/// either side is one, a vector if either side is an array, else a scalar.
fn rebuild(shape_src: &NumValue, other: &NumValue, data: Vec<f64>) -> NumValue {
    match (shape_src, other) {
        (NumValue::RMat { rows, cols, .. }, _) => {
            // data is column-major; convert back to row-major storage
            let mut rm = vec![0.0; data.len()];
            for (k, x) in data.into_iter().enumerate() {
                rm[(k % rows) * cols + k / rows] = x;
            }
            NumValue::RMat {
                rows: *rows,
                cols: *cols,
                data: rm,
            }
        }
        (_, NumValue::RMat { .. }) if data.len() == 1 => NumValue::column(data),
        (a, b) if a.is_scalar() && b.is_scalar() => NumValue::RScalar(data[0]),
        _ => NumValue::RVec(data),
    }
}

fn same_shape(a: &NumValue, b: &NumValue) -> bool {
    let (sa, sb) = (a.shape(), b.shape());
    sa == sb || (a.numel() == 0 && b.numel() == 0)
}

fn zip_with(
    a: &NumValue,
    b: &NumValue,
    f: impl Fn(f64, f64) -> f64,
) -> Result<NumValue, MathError> {
    let (na, nb) = (a.numel(), b.numel());
    if na == 1 && nb == 1 {
        let x = f(a.get_real(0)?, b.get_real(0)?);
        let src = if a.is_scalar() { b } else { a };
        let other = if a.is_scalar() { a } else { b };
        return Ok(rebuild(src, other, vec![x]));
    }
    if na == 1 {
        let s = a.get_real(0)?;
        let data = b.to_reals().into_iter().map(|y| f(s, y)).collect();
        return Ok(rebuild(b, a, data));
    }
    if nb == 1 {
        let s = b.get_real(0)?;
        let data = a.to_reals().into_iter().map(|x| f(x, s)).collect();
        return Ok(rebuild(a, b, data));
    }
    if !same_shape(a, b) {
        return Err(MathError::ShapeMismatch(a.shape(), b.shape()));
    }
    let data = a
        .to_reals()
        .into_iter()
        .zip(b.to_reals())
        .map(|(x, y)| f(x, y))
        .collect();
    let src = if b.is_matrix() && !a.is_matrix() {
        b
    } else {
        a
    };
    let other = if std::ptr::eq(src, a) { b } else { a };
    Ok(rebuild(src, other, data))
}

/// Elementwise arithmetic with scalar broadcast.
pub fn ew(op: ArithOp, a: &NumValue, b: &NumValue) -> Result<NumValue, MathError> {
    zip_with(a, b, |x, y| op.apply(x, y))
}

/// Elementwise comparison. Scalar results are `IScalar(0|1)`, array
/// results `IVec` of 0/1.
pub fn compare(op: CmpOp, a: &NumValue, b: &NumValue) -> Result<NumValue, MathError> {
    let r = zip_with(a, b, |x, y| if op.apply(x, y) { 1.0 } else { 0.0 })?;
    Ok(match r {
        NumValue::RScalar(x) => NumValue::IScalar(x as usize),
        other => NumValue::IVec(other.to_reals().into_iter().map(|x| x as usize).collect()),
    })
}

pub fn neg(a: &NumValue) -> NumValue {
    map(a, |x| -x)
}

/// Applies `f` to every element; the result is real with `a`'s shape.
pub fn map(a: &NumValue, f: impl Fn(f64) -> f64) -> NumValue {
    match a {
        NumValue::RScalar(x) => NumValue::RScalar(f(*x)),
        NumValue::IScalar(i) => NumValue::RScalar(f(*i as f64)),
        NumValue::RVec(v) => NumValue::RVec(v.iter().map(|&x| f(x)).collect()),
        NumValue::IVec(v) => NumValue::RVec(v.iter().map(|&x| f(x as f64)).collect()),
        NumValue::RMat { rows, cols, data } => NumValue::RMat {
            rows: *rows,
            cols: *cols,
            data: data.iter().map(|&x| f(x)).collect(),
        },
    }
}

/// First differences as reals; length `max(n - 1, 0)`.
pub fn diff(v: &NumValue) -> NumValue {
    let out = match v {
        NumValue::IVec(iv) => iv.windows(2).map(|w| w[1] as f64 - w[0] as f64).collect(),
        other => other.to_reals().windows(2).map(|w| w[1] - w[0]).collect(),
    };
    NumValue::RVec(out)
}

/// Inclusive selection over the linear element order. Vector kinds are
/// preserved; matrices and scalars yield real vectors.
pub fn slice(v: &NumValue, s: SpanSel) -> Result<NumValue, MathError> {
    let len = v.numel();
    if s.empty {
        return Ok(match v {
            NumValue::IVec(_) | NumValue::IScalar(_) => NumValue::IVec(Vec::new()),
            _ => NumValue::RVec(Vec::new()),
        });
    }
    if s.hi >= len {
        return Err(MathError::IndexOutOfBounds { index: s.hi, len });
    }
    Ok(match v {
        NumValue::IVec(iv) => NumValue::IVec(iv[s.lo..=s.hi].to_vec()),
        NumValue::IScalar(i) => NumValue::IVec(vec![*i]),
        NumValue::RVec(rv) => NumValue::RVec(rv[s.lo..=s.hi].to_vec()),
        other => NumValue::RVec(other.to_reals()[s.lo..=s.hi].to_vec()),
    })
}

/// Single element at a 0-based linear index, keeping index kinds.
pub fn element(v: &NumValue, k: usize) -> Result<NumValue, MathError> {
    let len = v.numel();
    if k >= len {
        return Err(MathError::IndexOutOfBounds { index: k, len });
    }
    Ok(match v {
        NumValue::IVec(iv) => NumValue::IScalar(iv[k]),
        NumValue::IScalar(i) => NumValue::IScalar(*i),
        other => NumValue::RScalar(other.get_real(k)?),
    })
}

/// MATLAB `length`: 1 for scalars, element count for vectors, the larger
/// dimension for matrices (0 if either is 0).
pub fn length(x: &NumValue) -> usize {
    match x {
        NumValue::RScalar(_) | NumValue::IScalar(_) => 1,
        NumValue::RVec(v) => v.len(),
        NumValue::IVec(v) => v.len(),
        NumValue::RMat { rows, cols, .. } => {
            if *rows == 0 || *cols == 0 {
                0
            } else {
                (*rows).max(*cols)
            }
        }
    }
}

/// `zeros(rows, cols)`: a column vector when `cols == 1`.
pub fn zeros(rows: usize, cols: usize) -> NumValue {
    if cols == 1 {
        NumValue::RVec(vec![0.0; rows])
    } else {
        NumValue::RMat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }
}

pub fn sum(x: &NumValue) -> f64 {
    x.to_reals().iter().sum()
}

/// Arithmetic mean; NaN for an empty input.
pub fn mean(x: &NumValue) -> f64 {
    let n = x.numel();
    sum(x) / n as f64
}

/// Largest element ignoring NaN; `None` for an empty input.
pub fn max(x: &NumValue) -> Option<f64> {
    let v = x.to_reals();
    if v.is_empty() {
        return None;
    }
    let finite: Vec<f64> = v.iter().copied().filter(|x| !x.is_nan()).collect();
    if finite.is_empty() {
        return Some(f64::NAN);
    }
    Some(finite.into_iter().fold(f64::NEG_INFINITY, f64::max))
}
