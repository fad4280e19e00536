use super::{GraphTable, Point};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// The horizontal dilation `T(x₁, x₂) = (k x₁, x₂)` flattening an `l`-graph
/// to a `target`-graph (`k = l/target`), with its effect on the equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StretchMap {
    pub factor: f64,
    /// Multipliers `(min(k², 1), max(k², 1))` bounding the new ellipticity pair
    /// by `(λ·lower, Λ·upper)`.
    pub ellipticity_lower: f64,
    pub ellipticity_upper: f64,
    /// `|Du| ≤ max(k, 1)·|Dv|`: the factor applied to the drift argument.
    pub drift_argument: f64,
}

impl StretchMap {
    pub fn apply(&self, p: Point) -> Point {
        [self.factor * p[0], p[1]]
    }

    pub fn invert(&self, p: Point) -> Point {
        [p[0] / self.factor, p[1]]
    }

    /// Image of the graph `x₂ = g(x₁)` under the map.
    pub fn transform_graph(&self, g: &GraphTable) -> Result<GraphTable> {
        GraphTable::new(g.xs.iter().map(|x| x * self.factor).collect(), g.gs.clone())
    }
}

/// Dilation turning Lipschitz constant `l` into `target`; requires `l ≥ target > 0`.
pub fn stretch_map(l: f64, target: f64) -> Result<StretchMap> {
    if !(target > 0.0 && l >= target && l.is_finite()) {
        return Err(Error::Argument(format!(
            "stretching needs l >= target > 0, got l = {l}, target = {target}"
        )));
    }
    let k = l / target;
    let k2 = k * k;
    Ok(StretchMap {
        factor: k,
        ellipticity_lower: k2.min(1.0),
        ellipticity_upper: k2.max(1.0),
        drift_argument: k.max(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_when_already_flat() {
        let m = stretch_map(0.3, 0.3).unwrap();
        assert_eq!(m.factor, 1.0);
        assert_eq!((m.ellipticity_lower, m.ellipticity_upper), (1.0, 1.0));
    }

    #[test]
    fn steep_graph_is_flattened() {
        let m = stretch_map(1.0, 0.01).unwrap();
        assert!((m.factor - 100.0).abs() < 1e-12);
        let g = GraphTable::new(vec![-1.0, 0.0, 0.5, 1.0], vec![1.0, 0.0, 0.5, 0.0]).unwrap();
        assert!(g.lipschitz_constant() <= 1.0);
        let t = m.transform_graph(&g).unwrap();
        assert!(t.lipschitz_constant() <= 0.01 * (1.0 + 1e-12));
    }

    #[test]
    fn round_trip() {
        let m = stretch_map(2.0, 0.07).unwrap();
        for p in [[0.3, -1.2], [1e3, 4.0], [-7.5, 0.0]] {
            let q = m.invert(m.apply(p));
            assert!((q[0] - p[0]).abs() <= 1e-12 * p[0].abs().max(1.0));
            assert_eq!(q[1], p[1]);
        }
    }
}
