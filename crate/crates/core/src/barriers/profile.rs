//! Tabulated radial profiles and their certificates.

use crate::error::{Error, Result};
use crate::geometry::Point;
use serde::{Deserialize, Serialize};

/// Points of the profile mesh: `n` nodes on `[0, len]` whose spacing grows
/// geometrically (ratio `q`) away from 0.
pub fn graded_mesh(len: f64, n: usize, q: f64) -> Vec<f64> {
    let m = n - 1;
    let d0 = if q == 1.0 { len / m as f64 } else { len * (q - 1.0) / (q.powi(m as i32) - 1.0) };
    let mut t = Vec::with_capacity(n);
    let mut acc = 0.0;
    let mut d = d0;
    t.push(0.0);
    for i in 1..n {
        acc += d;
        d *= q;
        t.push(if i == m { len } else { acc });
    }
    t
}

/// Mesh size used by every barrier profile.
pub const PROFILE_POINTS: usize = 4096;
/// Growth ratio of consecutive mesh steps.
pub const PROFILE_GRADING: f64 = 1.001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    IncreasingOutward,
    IncreasingInward,
}

/// How the profile parameter `t` relates to the distance `ρ` from the centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialMap {
    /// `w(x) = top − W(ρ)`, `t = ρ ∈ [0, r]`.
    Cap { top: f64 },
    /// `w(x) = W(2 − ρ)` on `1 ≤ ρ ≤ 2`.
    InnerCollar,
    /// `w(x) = W(ρ − 1)` on `1 ≤ ρ ≤ 3`.
    OuterCollar,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub t: f64,
    /// `W(t)`.
    pub value: f64,
    /// `W'(t)`.
    pub slope: f64,
    /// `W''(t)`.
    pub curvature: f64,
}

/// Worst slack of the target differential inequality over the mesh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// Minimum over the mesh of the slack divided by `|Dw|`; non-negative means the inequality holds.
    pub min_slack: f64,
    pub worst_t: f64,
    /// Largest mismatch of the implicit defining relation, relative to the mesh length.
    pub relation_residual: f64,
    /// Second differences of `W` (equivalently, monotone slopes) have the asserted sign.
    pub shape_ok: bool,
    pub mesh_points: usize,
}

impl Certificate {
    pub fn holds(&self) -> bool {
        self.min_slack >= 0.0 && self.shape_ok
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialBarrier {
    pub center: Point,
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub orientation: Orientation,
    pub map: RadialMap,
    pub profile: Vec<ProfilePoint>,
    pub certificate: Certificate,
}

impl RadialBarrier {
    fn t_of(&self, rho: f64) -> f64 {
        match self.map {
            RadialMap::Cap { .. } => rho,
            RadialMap::InnerCollar => 2.0 - rho,
            RadialMap::OuterCollar => rho - 1.0,
        }
    }

    /// Cubic Hermite interpolation of `(W, W')` at parameter `t`.
    pub fn profile_at(&self, t: f64) -> Result<(f64, f64)> {
        let p = &self.profile;
        let (t0, t1) = (p[0].t, p[p.len() - 1].t);
        let tol = 1e-12 * (t1 - t0).abs().max(1.0);
        if !(t >= t0 - tol && t <= t1 + tol) {
            return Err(Error::Argument(format!("profile parameter {t} outside [{t0}, {t1}]")));
        }
        let t = t.clamp(t0, t1);
        let i = p.partition_point(|q| q.t <= t).saturating_sub(1).min(p.len() - 2);
        let (a, b) = (&p[i], &p[i + 1]);
        let h = b.t - a.t;
        let s = (t - a.t) / h;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s),
            s * (1.0 - s) * (1.0 - s),
            s * s * (3.0 - 2.0 * s),
            s * s * (s - 1.0),
        );
        let v = h00 * a.value + h10 * h * a.slope + h01 * b.value + h11 * h * b.slope;
        let d = (6.0 * s * s - 6.0 * s) / h * (a.value - b.value)
            + (3.0 * s * s - 4.0 * s + 1.0) * a.slope
            + (3.0 * s * s - 2.0 * s) * b.slope;
        Ok((v, d))
    }

    /// `w(x)`; points outside the annulus (or ball) are an error.
    pub fn eval(&self, x: Point) -> Result<f64> {
        let rho = (x[0] - self.center[0]).hypot(x[1] - self.center[1]);
        let (v, _) = self.profile_at(self.t_of(rho))?;
        Ok(match self.map {
            RadialMap::Cap { top } => top - v,
            _ => v,
        })
    }

    /// `|Dw(x)|`.
    pub fn gradient_norm(&self, x: Point) -> Result<f64> {
        let rho = (x[0] - self.center[0]).hypot(x[1] - self.center[1]);
        Ok(self.profile_at(self.t_of(rho))?.1.abs())
    }

    pub fn contains(&self, x: Point) -> bool {
        let rho = (x[0] - self.center[0]).hypot(x[1] - self.center[1]);
        rho >= self.inner_radius && rho <= self.outer_radius
    }
}

/// Cumulative Hermite quadrature `∫_0^{t_i} y` from values `y` and derivatives `dy`.
pub fn hermite_cumulative(t: &[f64], y: &[f64], dy: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; t.len()];
    for i in 1..t.len() {
        let h = t[i] - t[i - 1];
        out[i] = out[i - 1] + 0.5 * h * (y[i - 1] + y[i]) + h * h / 12.0 * (dy[i - 1] - dy[i]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_is_graded_and_spans() {
        let t = graded_mesh(2.0, 4096, 1.001);
        assert_eq!(t.len(), 4096);
        assert_eq!(t[4095], 2.0);
        assert!((t[2] - t[1]) / (t[1] - t[0]) > 1.0009);
    }

    #[test]
    fn hermite_rule_is_exact_for_cubics() {
        let t = graded_mesh(1.0, 50, 1.05);
        let y: Vec<f64> = t.iter().map(|x| x * x * x).collect();
        let dy: Vec<f64> = t.iter().map(|x| 3.0 * x * x).collect();
        let w = hermite_cumulative(&t, &y, &dy);
        assert!((w[49] - 0.25).abs() < 1e-14);
    }
}
