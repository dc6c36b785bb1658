use std::fmt;
use std::str::FromStr;

/// Static type of an M-subset value as seen by the target dialect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SemType {
    Unknown,
    /// Unsigned machine-width index (`uword`).
    IndexScalar,
    /// Signed integer (`int`), also used for truth values.
    IntScalar,
    RealScalar,
    RealVector,
    IndexVector,
    RealMatrix,
}

impl SemType {
    pub const ALL: [SemType; 7] = [
        SemType::Unknown,
        SemType::IndexScalar,
        SemType::IntScalar,
        SemType::RealScalar,
        SemType::RealVector,
        SemType::IndexVector,
        SemType::RealMatrix,
    ];

    pub fn is_scalar(self) -> bool {
        matches!(
            self,
            SemType::IndexScalar | SemType::IntScalar | SemType::RealScalar
        )
    }

    pub fn is_integral_scalar(self) -> bool {
        matches!(self, SemType::IndexScalar | SemType::IntScalar)
    }

    pub fn is_array(self) -> bool {
        matches!(
            self,
            SemType::RealVector | SemType::IndexVector | SemType::RealMatrix
        )
    }

    /// Least upper bound, or `None` when the two cannot share a slot.
    ///
    /// Scalars widen `IndexScalar < IntScalar < RealScalar`; real scalars
    /// broadcast into `RealVector < RealMatrix`. Index vectors and index
    /// scalars never widen into arrays.
    pub fn join(self, other: SemType) -> Option<SemType> {
        use SemType::*;
        if self == other {
            return Some(self);
        }
        let (a, b) = if self <= other {
            (self, other)
        } else {
            (other, self)
        };
        match (a, b) {
            (Unknown, t) => Some(t),
            (IndexScalar, IntScalar) => Some(IntScalar),
            (IndexScalar | IntScalar, RealScalar) => Some(RealScalar),
            (IntScalar | RealScalar, RealVector) => Some(RealVector),
            (IntScalar | RealScalar | RealVector, RealMatrix) => Some(RealMatrix),
            _ => None,
        }
    }
}

impl fmt::Display for SemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for SemType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SemType::ALL
            .into_iter()
            .find(|t| t.to_string() == s)
            .ok_or_else(|| format!("unknown type `{s}`"))
    }
}
