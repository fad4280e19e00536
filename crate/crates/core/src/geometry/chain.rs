use super::{add, dist, scale, sub, DomainSpec, Point};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    Single,
    Straight,
    /// Up from `x`, across at a safe height, down to `y` (graph domains).
    Lifted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainChecks {
    /// Every doubled ball lies inside the domain.
    pub containment: bool,
    /// Consecutive balls intersect.
    pub consecutive_intersect: bool,
    /// `x ∈ B¹` and `y ∈ Bⁿ`.
    pub endpoints: bool,
}

impl ChainChecks {
    pub fn all(&self) -> bool {
        self.containment && self.consecutive_intersect && self.endpoints
    }
}

/// Equal-radius balls joining two interior points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallChain {
    pub centers: Vec<Point>,
    pub radius: f64,
    pub path: PathKind,
    /// `|x − y| ≤ L·scale`.
    pub within_budget: bool,
    /// Length bound `2L + 1` on straight chains whose endpoints are within budget.
    pub length_bound: Option<usize>,
    pub checks: ChainChecks,
}

impl BallChain {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Re-evaluates the chain predicates against a domain.
    pub fn verify(&self, dom: &DomainSpec, x: Point, y: Point) -> ChainChecks {
        let rho = self.radius;
        let containment = self
            .centers
            .iter()
            .all(|&c| dom.contains(c) && dom.boundary_distance(c) >= 2.0 * rho * (1.0 - 1e-12));
        let consecutive_intersect = self.centers.windows(2).all(|w| dist(w[0], w[1]) < 2.0 * rho);
        let endpoints = !self.centers.is_empty()
            && dist(x, self.centers[0]) < rho
            && dist(y, *self.centers.last().unwrap()) < rho;
        ChainChecks { containment, consecutive_intersect, endpoints }
    }
}

fn path_clear(dom: &DomainSpec, path: &[Point], need: f64, step: f64) -> bool {
    for w in path.windows(2) {
        let n = ((dist(w[0], w[1]) / step).ceil() as usize).max(1);
        for i in 0..=n {
            let p = add(w[0], scale(sub(w[1], w[0]), i as f64 / n as f64));
            if !dom.contains(p) || dom.boundary_distance(p) < need {
                return false;
            }
        }
    }
    true
}

/// Centers at arc-length multiples of `step` along a polyline, ending at its last vertex.
fn place_centers(path: &[Point], step: f64) -> Vec<Point> {
    let mut out = vec![path[0]];
    let mut carry = 0.0;
    for w in path.windows(2) {
        let len = dist(w[0], w[1]);
        if len == 0.0 {
            continue;
        }
        let mut s = step - carry;
        while s < len - 1e-12 * step {
            out.push(add(w[0], scale(sub(w[1], w[0]), s / len)));
            s += step;
        }
        carry = len - (s - step);
    }
    let last = *path.last().unwrap();
    if dist(*out.last().unwrap(), last) > 1e-12 * step {
        out.push(last);
    }
    out
}

/// A chain of balls of radius `scale/2` from `x` to `y` whose doubles stay in the domain.
///
/// Both endpoints need clearance `d(·, ∂Ω) ≥ scale`. The straight segment is
/// used when it keeps that clearance; graph domains otherwise fall back to a
/// lifted path. Endpoints farther apart than `L·scale` are allowed but flagged.
pub fn harnack_chain(dom: &DomainSpec, x: Point, y: Point, scale_: f64) -> Result<BallChain> {
    if !(scale_ > 0.0) {
        return Err(Error::Argument(format!("chain scale must be positive, got {scale_}")));
    }
    let rho = scale_ / 2.0;
    for (name, p) in [("x", x), ("y", y)] {
        let d = if dom.contains(p) { dom.boundary_distance(p) } else { 0.0 };
        if d < scale_ {
            return Err(Error::Construction(format!(
                "{name} = {p:?} has clearance {d} below the required d(., boundary) >= scale = {scale_}"
            )));
        }
    }
    let l = dom.nta_constant();
    let within_budget = dist(x, y) <= l * scale_;
    let (path, kind) = if dist(x, y) == 0.0 {
        (vec![x], PathKind::Single)
    } else if path_clear(dom, &[x, y], scale_, rho / 4.0) {
        (vec![x, y], PathKind::Straight)
    } else if dom.is_graph_like() {
        let mut h = x[1].max(y[1]);
        let mut found = None;
        for _ in 0..400 {
            let p = vec![x, [x[0], h], [y[0], h], y];
            if path_clear(dom, &p, scale_, rho / 4.0) {
                found = Some(p);
                break;
            }
            h += rho;
        }
        (
            found.ok_or_else(|| Error::Construction("no lifted path with the required clearance".into()))?,
            PathKind::Lifted,
        )
    } else {
        return Err(Error::Construction(
            "straight path violates the clearance and no fallback path exists for this domain kind".into(),
        ));
    };
    let centers = if kind == PathKind::Single { vec![x] } else { place_centers(&path, rho) };
    let mut chain = BallChain {
        centers,
        radius: rho,
        path: kind,
        within_budget,
        length_bound: (within_budget && kind != PathKind::Lifted).then(|| (2.0 * l).ceil() as usize + 1),
        checks: ChainChecks { containment: false, consecutive_intersect: false, endpoints: false },
    };
    chain.checks = chain.verify(dom, x, y);
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_ball_for_equal_points() {
        let c = harnack_chain(&DomainSpec::half_space(), [0.0, 2.0], [0.0, 2.0], 1.0).unwrap();
        assert_eq!(c.len(), 1);
        assert!(c.checks.all());
    }

    #[test]
    fn horizontal_half_space_chain() {
        let c = harnack_chain(&DomainSpec::half_space(), [0.0, 1.0], [3.0, 1.0], 1.0).unwrap();
        assert!(c.len() <= 7, "{}", c.len());
        assert_eq!(c.radius, 0.5);
        assert!(c.checks.all());
        assert!(!c.within_budget);
    }

    #[test]
    fn graph_corkscrew_points_chain() {
        let dom = DomainSpec::v_graph(0.1, 4.0).unwrap();
        let c = harnack_chain(&dom, [-1.0, 1.2], [1.0, 1.2], 0.5).unwrap();
        assert!(c.checks.all());
    }

    #[test]
    fn clearance_violation_is_named() {
        let e = harnack_chain(&DomainSpec::half_space(), [0.0, 0.2], [1.0, 1.0], 1.0).unwrap_err();
        assert!(e.to_string().contains("clearance"));
    }

    #[test]
    fn lifted_path_in_cusp_free_graph() {
        // A bump between the points forces the lifted route.
        let g = super::super::GraphTable::new(vec![-1.0, 0.0, 1.0], vec![0.0, 0.9, 0.0]).unwrap();
        let dom = DomainSpec::lipschitz_graph(g, 0.9, 1.0).unwrap();
        let c = harnack_chain(&dom, [-2.0, 1.0], [2.0, 1.0], 0.8).unwrap();
        assert_eq!(c.path, PathKind::Lifted);
        assert!(c.checks.all());
    }
}
