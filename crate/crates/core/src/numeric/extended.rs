use serde::{Deserialize, Serialize};
use std::fmt;

/// A non-negative level that may be the `+∞` sentinel.
///
/// Used wherever a quantity is allowed to be infinite (divergent integrals,
/// the `μ₁ = ∞` barrier branch, unbounded inversions). The infinite case is
/// an explicit variant, so it can never leak into arithmetic as `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Extended {
    Finite(f64),
    Infinite,
}

impl Extended {
    pub fn finite(self) -> Option<f64> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Extended::Infinite)
    }

    /// Finite value, panicking on the sentinel. Only for call sites where
    /// finiteness was established beforehand.
    pub fn expect_finite(self, what: &str) -> f64 {
        self.finite()
            .unwrap_or_else(|| panic!("{what}: expected a finite value"))
    }

    /// `self <= x`, treating the sentinel as larger than every real.
    pub fn le(self, x: f64) -> bool {
        match self {
            Extended::Finite(v) => v <= x,
            Extended::Infinite => false,
        }
    }
}

impl From<f64> for Extended {
    fn from(v: f64) -> Self {
        Extended::Finite(v)
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::Infinite => f.write_str("+inf"),
        }
    }
}
