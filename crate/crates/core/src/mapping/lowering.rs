//! 1-based subscripts to 0-based target selections.

use crate::analysis::SemType;
use crate::frontend::{BinOp, Expr, ExprKind};
use crate::mathcore::{MathError, SpanSel};

use super::MappingError;

/// One end of a lowered subscript, already 0-based.
#[derive(Debug, Clone, PartialEq)]
pub enum Bound {
    /// Known index, possibly negative before emptiness is decided.
    Const(i64),
    /// `len - d` (so plain `end` is `FromEnd(1)`).
    FromEnd(i64),
    /// A runtime expression plus a constant offset (`k` lowers to `k` - 1).
    Shifted { expr: Expr, offset: i64 },
}

impl Bound {
    /// Concrete 0-based position for a container of length `len`; `None`
    /// for runtime-dependent bounds.
    pub fn resolve(&self, len: usize) -> Option<i64> {
        match self {
            Bound::Const(c) => Some(*c),
            Bound::FromEnd(d) => Some(len as i64 - d),
            Bound::Shifted { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum IndexLowering {
    Scalar(Bound),
    Span {
        lo: Bound,
        hi: Bound,
    },
    /// A range that is empty regardless of the container (`3:2`).
    EmptySpan,
}

/// A concrete selection over a container of known length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    Element(usize),
    Span(SpanSel),
}

impl IndexLowering {
    /// Evaluates the lowering against a container of length `len`. Returns
    /// `None` when a bound depends on runtime values.
    pub fn resolve(&self, len: usize) -> Option<Result<Selection, MathError>> {
        let oob = |i: i64| MathError::IndexOutOfBounds {
            index: i.max(0) as usize,
            len,
        };
        match self {
            IndexLowering::EmptySpan => Some(Ok(Selection::Span(SpanSel::empty()))),
            IndexLowering::Scalar(b) => {
                let i = b.resolve(len)?;
                Some(if i < 0 || i >= len as i64 {
                    Err(oob(i))
                } else {
                    Ok(Selection::Element(i as usize))
                })
            }
            IndexLowering::Span { lo, hi } => {
                let (lo, hi) = (lo.resolve(len)?, hi.resolve(len)?);
                Some(if hi < lo {
                    Ok(Selection::Span(SpanSel::empty()))
                } else if lo < 0 {
                    Err(oob(lo))
                } else if hi >= len as i64 {
                    Err(oob(hi))
                } else {
                    Ok(Selection::Span(SpanSel::new(lo as usize, hi as usize)))
                })
            }
        }
    }
}

/// 1-based position to 0-based.
pub fn lower_position(one_based: usize) -> Result<usize, MappingError> {
    one_based
        .checked_sub(1)
        .ok_or(MappingError::NonPositiveIndex(0))
}

/// 0-based position back to 1-based.
pub fn raise_position(zero_based: usize) -> usize {
    zero_based + 1
}

fn contains_end_or_range(e: &Expr) -> bool {
    let mut found = false;
    e.walk(&mut |n| {
        if matches!(n.kind, ExprKind::End | ExprKind::Range { .. }) {
            found = true;
        }
    });
    found
}

fn integer_literal(e: &Expr) -> Result<Option<i64>, MappingError> {
    match e.as_literal() {
        Some(v) if v.fract() != 0.0 || !v.is_finite() => Err(MappingError::UnsupportedSubscript(
            format!("non-integer subscript {v}"),
        )),
        Some(v) => Ok(Some(v as i64)),
        None => Ok(None),
    }
}

/// Lowers one bound. `allow_below_one` admits literals < 1 (a range stop
/// that makes the range empty).
fn lower_bound(e: &Expr, allow_below_one: bool) -> Result<Bound, MappingError> {
    if let Some(k) = integer_literal(e)? {
        if k < 1 && !allow_below_one {
            return Err(MappingError::NonPositiveIndex(k));
        }
        return Ok(Bound::Const(k - 1));
    }
    match &e.kind {
        ExprKind::End => Ok(Bound::FromEnd(1)),
        ExprKind::Binary { op, lhs, rhs } if matches!(lhs.kind, ExprKind::End) => {
            match (op, integer_literal(rhs)?) {
                (BinOp::Sub, Some(k)) if k >= 0 => Ok(Bound::FromEnd(k + 1)),
                _ => Err(MappingError::UnsupportedSubscript(
                    "only `end` and `end-k` are supported".into(),
                )),
            }
        }
        _ if contains_end_or_range(e) => Err(MappingError::UnsupportedSubscript(
            "`end` or a range nested inside a subscript expression".into(),
        )),
        // Fold a trailing literal into the shift: `k-1` lowers to `k-2`.
        ExprKind::Binary { op, lhs, rhs } if matches!(op, BinOp::Add | BinOp::Sub) => {
            match integer_literal(rhs)? {
                Some(k) => {
                    let k = if *op == BinOp::Sub { -k } else { k };
                    Ok(Bound::Shifted {
                        expr: (**lhs).clone(),
                        offset: k - 1,
                    })
                }
                None => Ok(Bound::Shifted {
                    expr: e.clone(),
                    offset: -1,
                }),
            }
        }
        _ => Ok(Bound::Shifted {
            expr: e.clone(),
            offset: -1,
        }),
    }
}

/// Lowers the subscript of `base(subscript)`.
pub fn lower_index(
    base: &str,
    base_type: SemType,
    subscript: &Expr,
) -> Result<IndexLowering, MappingError> {
    if !(base_type.is_array() || base_type.is_scalar()) {
        return Err(MappingError::NotIndexable {
            base: base.to_string(),
            ty: base_type,
        });
    }
    match &subscript.kind {
        ExprKind::Range { start, stop } => {
            if contains_end_or_range(start) && !is_end_form(start)
                || contains_end_or_range(stop) && !is_end_form(stop)
            {
                return Err(MappingError::UnsupportedSubscript("nested range".into()));
            }
            let lo = lower_bound(start, false)?;
            let hi = lower_bound(stop, true)?;
            if let (Bound::Const(a), Bound::Const(b)) = (&lo, &hi) {
                if b < a {
                    return Ok(IndexLowering::EmptySpan);
                }
            }
            Ok(IndexLowering::Span { lo, hi })
        }
        _ => Ok(IndexLowering::Scalar(lower_bound(subscript, false)?)),
    }
}

fn is_end_form(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::End => true,
        ExprKind::Binary { lhs, .. } => matches!(lhs.kind, ExprKind::End),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{parse_source, StmtKind};

    /// Subscript expression of `v(<sub>)`.
    fn sub(text: &str) -> Expr {
        let prog = parse_source(&format!("function y = f(v)\ny = v({text});")).unwrap();
        let StmtKind::Assign { expr, .. } = &prog.functions[0].body[0].kind else {
            panic!()
        };
        let ExprKind::Apply { args, .. } = &expr.kind else {
            panic!()
        };
        args[0].clone()
    }

    #[test]
    fn all_but_last() {
        let l = lower_index("peak", SemType::IndexVector, &sub("1:end-1")).unwrap();
        assert_eq!(
            l,
            IndexLowering::Span {
                lo: Bound::Const(0),
                hi: Bound::FromEnd(2)
            }
        );
        assert_eq!(l.resolve(3), Some(Ok(Selection::Span(SpanSel::new(0, 1)))));
        // single peak: 1:0 selects nothing
        assert_eq!(l.resolve(1), Some(Ok(Selection::Span(SpanSel::empty()))));
        assert_eq!(l.resolve(0), Some(Ok(Selection::Span(SpanSel::empty()))));
    }

    #[test]
    fn first_and_last() {
        assert_eq!(
            lower_index("v", SemType::RealVector, &sub("1")).unwrap(),
            IndexLowering::Scalar(Bound::Const(0))
        );
        let last = lower_index("v", SemType::RealVector, &sub("end")).unwrap();
        assert_eq!(last, IndexLowering::Scalar(Bound::FromEnd(1)));
        assert_eq!(last.resolve(5), Some(Ok(Selection::Element(4))));
    }

    #[test]
    fn literal_empty_range() {
        assert_eq!(
            lower_index("v", SemType::RealVector, &sub("3:2")).unwrap(),
            IndexLowering::EmptySpan
        );
        assert_eq!(
            lower_index("v", SemType::RealVector, &sub("1:0")).unwrap(),
            IndexLowering::EmptySpan
        );
    }

    #[test]
    fn runtime_subscripts_shift_by_one() {
        let l = lower_index("v", SemType::RealVector, &sub("k-1")).unwrap();
        let IndexLowering::Scalar(Bound::Shifted { expr, offset }) = l else {
            panic!()
        };
        assert_eq!(expr.kind, ExprKind::Var("k".into()));
        assert_eq!(offset, -2);
        let l = lower_index("v", SemType::RealVector, &sub("k+1")).unwrap();
        assert!(matches!(
            l,
            IndexLowering::Scalar(Bound::Shifted { offset: 0, .. })
        ));
    }

    #[test]
    fn errors() {
        assert_eq!(
            lower_index("v", SemType::RealVector, &sub("0")),
            Err(MappingError::NonPositiveIndex(0))
        );
        assert!(matches!(
            lower_index("v", SemType::RealVector, &sub("end+1")),
            Err(MappingError::UnsupportedSubscript(_))
        ));
        assert!(matches!(
            lower_index("v", SemType::RealVector, &sub("v(1:2)")),
            Err(MappingError::UnsupportedSubscript(_))
        ));
        assert!(matches!(
            lower_index("v", SemType::Unknown, &sub("1")),
            Err(MappingError::NotIndexable { .. })
        ));
    }

    #[test]
    fn position_roundtrip() {
        for i in 1..100 {
            assert_eq!(raise_position(lower_position(i).unwrap()), i);
        }
        assert!(lower_position(0).is_err());
    }
}
