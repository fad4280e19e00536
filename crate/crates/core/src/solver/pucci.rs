use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Ellipticity bounds `0 < λ ≤ Λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticityPair {
    pub lambda: f64,
    #[serde(rename = "Lambda")]
    pub big_lambda: f64,
}

impl EllipticityPair {
    pub fn new(lambda: f64, big_lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && big_lambda >= lambda && big_lambda.is_finite()) {
            return Err(Error::Config(format!(
                "ellipticity pair needs 0 < lambda <= Lambda, got ({lambda}, {big_lambda})"
            )));
        }
        Ok(EllipticityPair { lambda, big_lambda })
    }

    pub fn laplacian() -> Self {
        EllipticityPair { lambda: 1.0, big_lambda: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PucciSign {
    Plus,
    Minus,
}

pub type Sym2 = [[f64; 2]; 2];

/// Eigenvalues of a symmetric 2×2 matrix, ascending.
pub fn sym_eigenvalues(x: &Sym2) -> [f64; 2] {
    let m = 0.5 * (x[0][0] + x[1][1]);
    let d = (0.5 * (x[0][0] - x[1][1])).hypot(x[0][1]);
    [m - d, m + d]
}

/// `P⁺(X) = −λΣ_{e≥0} e − ΛΣ_{e<0} e`, `P⁻(X) = −ΛΣ_{e≥0} e − λΣ_{e<0} e`.
///
/// Equivalently `P⁺ = max` and `P⁻ = min` of `−tr(AX)` over `λI ≤ A ≤ ΛI`,
/// so `P⁻ ≤ P⁺`.
pub fn pucci_apply(ell: &EllipticityPair, x: &Sym2, sign: PucciSign) -> f64 {
    let (pos, neg) = match sign {
        PucciSign::Plus => (ell.lambda, ell.big_lambda),
        PucciSign::Minus => (ell.big_lambda, ell.lambda),
    };
    sym_eigenvalues(x)
        .iter()
        .map(|&e| if e >= 0.0 { -pos * e } else { -neg * e })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_values() {
        let ell = EllipticityPair::new(1.0, 2.0).unwrap();
        assert_eq!(pucci_apply(&ell, &[[1.0, 0.0], [0.0, 1.0]], PucciSign::Plus), -2.0);
        assert_eq!(pucci_apply(&ell, &[[1.0, 0.0], [0.0, -1.0]], PucciSign::Plus), 1.0);
        assert_eq!(pucci_apply(&ell, &[[1.0, 0.0], [0.0, -1.0]], PucciSign::Minus), -1.0);
    }

    #[test]
    fn invalid_pair() {
        assert!(EllipticityPair::new(2.0, 1.0).is_err());
        assert!(EllipticityPair::new(0.0, 1.0).is_err());
    }
}
