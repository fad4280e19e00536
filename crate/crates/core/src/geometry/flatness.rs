use super::{add, dist_to_polylines, dist_to_segment, dot, scale, sub, DomainSpec, Point};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Number of equally spaced line directions in the coarse flatness scan.
pub const FLATNESS_ANGLES: usize = 720;
const ANGLE_TOL: f64 = 1e-6;

/// Best-approximating line through a boundary point and the resulting flatness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatnessReport {
    /// `min_π h(∂Ω ∩ B(w,r), π ∩ B(w,r)) / r`.
    pub delta: f64,
    /// Direction of the optimal line, in `[0, π)`.
    pub angle: f64,
    /// Boundary sampling step relative to `r`.
    pub resolution: f64,
    /// Interior points at distance `≥ 2δr` from the boundary all lie on one side of the line.
    pub separated: bool,
    pub separation_samples: usize,
}

/// `δ = l/√(l² + 1)`, the flatness of an `l`-Lipschitz graph; requires `l < 1/8`.
pub fn lipschitz_to_delta(l: f64) -> Result<f64> {
    if !(l >= 0.0) {
        return Err(Error::Argument(format!("Lipschitz constant must be >= 0, got {l}")));
    }
    if l >= 0.125 {
        return Err(Error::Domain(format!(
            "the graph-to-flatness bound needs a Lipschitz constant below 1/8, got {l}"
        )));
    }
    Ok(l / (l * l + 1.0).sqrt())
}

struct Scan<'a> {
    w: Point,
    r: f64,
    lines: &'a [Vec<Point>],
    vertices: Vec<Point>,
}

impl Scan<'_> {
    /// Hausdorff distance between the boundary piece and the diameter at angle `theta`.
    fn h(&self, theta: f64, samples: usize) -> f64 {
        let u = [theta.cos(), theta.sin()];
        let a = add(self.w, scale(u, -self.r));
        let b = add(self.w, scale(u, self.r));
        // Distance to a segment is convex, so the sup over polylines sits at vertices.
        let e_to_f = self
            .vertices
            .iter()
            .map(|&p| dist_to_segment(p, a, b))
            .fold(0.0, f64::max);
        let f_to_e = (0..=samples)
            .map(|i| {
                let p = add(a, scale(sub(b, a), i as f64 / samples as f64));
                dist_to_polylines(p, self.lines)
            })
            .fold(0.0, f64::max);
        e_to_f.max(f_to_e)
    }
}

/// Measures the flatness of `∂Ω` at `w` on scale `r`.
///
/// Lines through `w` are scanned over [`FLATNESS_ANGLES`] directions, the
/// best is refined by golden-section search to `1e-6` rad, and the
/// separation condition is tested on a lattice of interior points.
pub fn reifenberg_delta(dom: &DomainSpec, w: Point, r: f64) -> Result<FlatnessReport> {
    if !(r > 0.0 && r < dom.r0) {
        return Err(Error::Argument(format!("radius must lie in (0, r0 = {}), got {r}", dom.r0)));
    }
    let bd = dom.boundary_distance(w);
    if bd > 1e-9 * r.max(1.0) {
        return Err(Error::Argument(format!("point {w:?} is {bd} away from the boundary")));
    }
    let spacing = r / 1024.0;
    let lines = dom.boundary_in_ball(w, r, spacing);
    if lines.is_empty() {
        return Err(Error::Numerical("empty boundary sample".into()));
    }
    let vertices: Vec<Point> = lines.iter().flatten().cloned().collect();
    let scan = Scan { w, r, lines: &lines, vertices };

    let coarse = 128;
    let mut best = (f64::INFINITY, 0.0);
    for k in 0..FLATNESS_ANGLES {
        let th = PI * k as f64 / FLATNESS_ANGLES as f64;
        let v = scan.h(th, coarse);
        if v < best.0 {
            best = (v, th);
        }
    }
    let fine = 2048;
    let step = PI / FLATNESS_ANGLES as f64;
    let (mut lo, mut hi) = (best.1 - step, best.1 + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = scan.h(x1, fine);
    let mut f2 = scan.h(x2, fine);
    while hi - lo > ANGLE_TOL {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = scan.h(x1, fine);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = scan.h(x2, fine);
        }
    }
    let mut angle = 0.5 * (lo + hi);
    let mut h = scan.h(angle, fine);
    let h_coarse_fine = scan.h(best.1, fine);
    if h_coarse_fine < h {
        h = h_coarse_fine;
        angle = best.1;
    }
    let delta = h / r;

    // Separation: deep interior points must sit on one side of the line.
    let normal = [-angle.sin(), angle.cos()];
    let n = 64;
    let mut side = 0.0f64;
    let mut separated = true;
    let mut count = 0;
    for i in 0..=2 * n {
        for j in 0..=2 * n {
            let p = [w[0] + r * (i as f64 / n as f64 - 1.0), w[1] + r * (j as f64 / n as f64 - 1.0)];
            if super::dist(p, w) >= r || !dom.contains(p) || dom.boundary_distance(p) < 2.0 * delta * r {
                continue;
            }
            count += 1;
            let s = dot(sub(p, w), normal);
            if s == 0.0 || (side != 0.0 && s.signum() != side) {
                separated = false;
            } else if side == 0.0 {
                side = s.signum();
            }
        }
    }

    Ok(FlatnessReport {
        delta,
        angle: angle.rem_euclid(PI),
        resolution: spacing / r,
        separated,
        separation_samples: count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_values() {
        assert_eq!(lipschitz_to_delta(0.0).unwrap(), 0.0);
        assert!((lipschitz_to_delta(0.1).unwrap() - 0.1 / 1.01f64.sqrt()).abs() < 1e-15);
        assert!(lipschitz_to_delta(0.125).is_err());
        let mut prev = -1.0;
        for i in 0..100 {
            let v = lipschitz_to_delta(i as f64 * 0.00124).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn half_space_is_flat() {
        let rep = reifenberg_delta(&DomainSpec::half_space(), [0.3, 0.0], 0.7).unwrap();
        assert!(rep.delta < 1e-12);
        assert!(rep.separated);
    }

    #[test]
    fn wedge_vertex_matches_formula() {
        let dom = DomainSpec::v_graph(0.1, 4.0).unwrap();
        let rep = reifenberg_delta(&dom, [0.0, 0.0], 1.0).unwrap();
        let bound = lipschitz_to_delta(0.1).unwrap();
        assert!(rep.delta <= bound + 2.0 * rep.resolution);
        assert!(rep.delta >= bound - 2.0 * rep.resolution);
        assert!(rep.separated);
    }

    #[test]
    fn cube_corner_is_half_diagonal() {
        let dom = DomainSpec::cube(1.0).unwrap();
        let rep = reifenberg_delta(&dom, [0.0, 0.0], 0.1).unwrap();
        assert!((rep.delta - 0.5f64.sqrt()).abs() < 1e-3, "{}", rep.delta);
    }

    #[test]
    fn off_boundary_point_is_rejected() {
        assert!(reifenberg_delta(&DomainSpec::half_space(), [0.0, 0.5], 1.0).is_err());
    }
}
