use super::{add, dist, scale, DomainSpec, Point};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

const SCAN_CANDIDATES: usize = 64;

/// An interior point at distance comparable to `r` from a boundary point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorkscrewPoint {
    pub point: Point,
    /// `|a − w|`.
    pub offset: f64,
    /// `d(a, ∂Ω)`.
    pub clearance: f64,
    /// The strict lower bound `r/L` shared by both inequalities.
    pub lower: f64,
    /// `"half_radius"` when the point `w + (r/2)n` is admissible, `"normal_scan"` otherwise.
    pub rule: String,
}

fn admissible(dom: &DomainSpec, w: Point, a: Point, r: f64, lower: f64, interior: bool) -> Option<f64> {
    let off = dist(a, w);
    let inside = dom.contains(a);
    if inside != interior {
        return None;
    }
    let clear = dom.boundary_distance(a);
    (off > lower && off < r && clear > lower).then(|| (off - lower).min(r - off).min(clear - lower))
}

fn march(dom: &DomainSpec, w: Point, r: f64, dir: Point, interior: bool) -> Option<(Point, &'static str)> {
    let l = dom.nta_constant();
    let lower = r / l;
    let half = add(w, scale(dir, 0.5 * r));
    if admissible(dom, w, half, r, lower, interior).is_some() {
        return Some((half, "half_radius"));
    }
    // Scan the open admissible range of offsets and keep the best-balanced candidate.
    let mut best: Option<(f64, Point)> = None;
    for k in 0..SCAN_CANDIDATES {
        let t = lower + (r - lower) * (k as f64 + 0.5) / SCAN_CANDIDATES as f64;
        let a = add(w, scale(dir, t));
        if let Some(m) = admissible(dom, w, a, r, lower, interior) {
            if best.is_none_or(|(bm, _)| m > bm) {
                best = Some((m, a));
            }
        }
    }
    best.map(|(_, a)| (a, "normal_scan"))
}

/// Corkscrew point `a_r(w)` with `r/L < |a − w| < r` and `d(a, ∂Ω) > r/L`.
///
/// Deterministic: the point `w + (r/2)n` on the inward direction `n` is used
/// when it satisfies both strict inequalities; otherwise 64 offsets in
/// `(r/L, r)` along `n` are scanned and the one with the largest common
/// slack in all three inequalities is returned.
pub fn corkscrew(dom: &DomainSpec, w: Point, r: f64) -> Result<CorkscrewPoint> {
    if !(r > 0.0 && r < dom.r0) {
        return Err(Error::Argument(format!("radius must lie in (0, r0 = {}), got {r}", dom.r0)));
    }
    if !dom.on_boundary(w, 1e-9 * r.max(1.0)) {
        return Err(Error::Argument(format!("point {w:?} is not on the boundary")));
    }
    let dir = dom.inward_direction(w);
    let (a, rule) = march(dom, w, r, dir, true).ok_or_else(|| {
        Error::Construction(format!(
            "no corkscrew point along the inward direction {dir:?} at w = {w:?}, r = {r}"
        ))
    })?;
    Ok(CorkscrewPoint {
        point: a,
        offset: dist(a, w),
        clearance: dom.boundary_distance(a),
        lower: r / dom.nta_constant(),
        rule: rule.into(),
    })
}

/// Checks the exterior corkscrew condition at `(w, r)` by marching outward.
pub fn exterior_corkscrew_check(dom: &DomainSpec, w: Point, r: f64) -> Option<Point> {
    let dir = scale(dom.inward_direction(w), -1.0);
    march(dom, w, r, dir, false).map(|(a, _)| a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_predicates(dom: &DomainSpec, w: Point, r: f64, c: &CorkscrewPoint) {
        let l = dom.nta_constant();
        let off = dist(c.point, w);
        assert!(r / l < off && off < r, "{c:?}");
        assert!(dom.boundary_distance(c.point) > r / l, "{c:?}");
        assert!(dom.contains(c.point));
    }

    #[test]
    fn half_space_strict_inequalities() {
        let dom = DomainSpec::half_space();
        let c = corkscrew(&dom, [0.0, 0.0], 1.0).unwrap();
        assert_predicates(&dom, [0.0, 0.0], 1.0, &c);
        assert_eq!(c.point[0], 0.0);
        assert!((c.point[1] - 0.75).abs() < 1e-2);
    }

    #[test]
    fn graph_and_cube() {
        let g = DomainSpec::v_graph(0.1, 4.0).unwrap();
        let c = corkscrew(&g, [0.0, 0.0], 1.0).unwrap();
        assert_predicates(&g, [0.0, 0.0], 1.0, &c);
        let cube = DomainSpec::cube(1.0).unwrap();
        let c = corkscrew(&cube, [0.5, 0.0], 0.4).unwrap();
        assert_predicates(&cube, [0.5, 0.0], 0.4, &c);
        assert_eq!(c.point[0], 0.5);
    }

    #[test]
    fn exterior_check_for_half_space() {
        let a = exterior_corkscrew_check(&DomainSpec::half_space(), [1.0, 0.0], 0.5).unwrap();
        assert!(a[1] < 0.0);
    }
}
