use super::{dist, dist_to_polylines, norm, DomainSpec, Point};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Radius of the shared boundary piece `Γ = ∂Ω ∩ B(0, CAP_RADIUS)`.
pub const CAP_RADIUS: f64 = 2.0;
/// The cap is `Ω ∩ B(0, CAP_RADIUS + CAP_FATTENING)`.
pub const CAP_FATTENING: f64 = 0.25;

/// Membership predicate for the retracted cap `Ω′_s = Ω′ ∩ {d(x, Γ) ≥ s}`.
///
/// The cap is a concrete substitute realized for graph and half-space
/// domains through the origin; every consumer reports it as such.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RetractedCap {
    pub s: f64,
    pub outer_radius: f64,
    #[serde(skip)]
    dom: Option<DomainSpec>,
    #[serde(skip)]
    gamma: Vec<Vec<Point>>,
    pub substitute: bool,
}

impl RetractedCap {
    pub fn contains(&self, p: Point) -> bool {
        let dom = self.dom.as_ref().expect("cap built with a domain");
        norm(p) < self.outer_radius && dom.contains(p) && self.gamma_distance(p) >= self.s
    }

    /// `d(p, Γ)`.
    pub fn gamma_distance(&self, p: Point) -> f64 {
        dist_to_polylines(p, &self.gamma)
    }

    /// Same cap with a different offset.
    pub fn with_offset(&self, s: f64) -> Result<Self> {
        if !(s >= 0.0) {
            return Err(Error::Argument(format!("cap offset must be non-negative, got {s}")));
        }
        Ok(RetractedCap { s, ..self.clone() })
    }
}

/// Builds `Ω′_s` around the origin for a graph or half-space domain.
pub fn retracted_cap(dom: &DomainSpec, s: f64) -> Result<RetractedCap> {
    if !(s >= 0.0) {
        return Err(Error::Argument(format!("cap offset must be non-negative, got {s}")));
    }
    if !dom.is_graph_like() {
        return Err(Error::Precondition(format!(
            "retracted caps are realized for graph and half-space domains only, not {}",
            dom.kind_name()
        )));
    }
    if !dom.on_boundary([0.0, 0.0], 1e-12) {
        return Err(Error::Precondition("the origin must lie on the boundary".into()));
    }
    let gamma = dom.boundary_in_ball([0.0, 0.0], CAP_RADIUS, 1e-3);
    Ok(RetractedCap {
        s,
        outer_radius: CAP_RADIUS + CAP_FATTENING,
        dom: Some(dom.clone()),
        gamma,
        substitute: true,
    })
}

/// Largest `d(x, Ω′_{2s}) / s` over lattice points `x ∈ Ω′_s \ Ω′_{2s}`.
///
/// Points are taken on a lattice of spacing `h` covering the cap; distances
/// to `Ω′_{2s}` are measured to its lattice points, so the result carries an
/// error of order `h/s`.
pub fn collar_ratio(cap: &RetractedCap, s: f64, h: f64) -> Result<f64> {
    if !(s > 0.0 && h > 0.0) {
        return Err(Error::Argument("collar ratio needs s > 0 and h > 0".into()));
    }
    let inner = cap.with_offset(s)?;
    let deep = cap.with_offset(2.0 * s)?;
    let rr = cap.outer_radius;
    let n = (2.0 * rr / h).ceil() as usize + 1;
    let at = |i: usize, j: usize| [-rr + i as f64 * h, -rr + j as f64 * h];
    let mut deep_mask = vec![false; n * n];
    let mut any_deep = false;
    for j in 0..n {
        for i in 0..n {
            let v = deep.contains(at(i, j));
            deep_mask[j * n + i] = v;
            any_deep |= v;
        }
    }
    if !any_deep {
        return Err(Error::Argument(format!("retracted cap at offset {} is empty", 2.0 * s)));
    }
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            let p = at(i, j);
            if deep_mask[j * n + i] || !inner.contains(p) {
                continue;
            }
            // Expanding square rings until no closer lattice point can exist.
            let mut best = f64::INFINITY;
            let mut k = 1usize;
            loop {
                let (i0, i1) = (i.saturating_sub(k), (i + k).min(n - 1));
                let (j0, j1) = (j.saturating_sub(k), (j + k).min(n - 1));
                for jj in j0..=j1 {
                    for ii in i0..=i1 {
                        let on_ring = ii == i0 || ii == i1 || jj == j0 || jj == j1;
                        if on_ring && deep_mask[jj * n + ii] {
                            best = best.min(dist(p, at(ii, jj)));
                        }
                    }
                }
                if best <= k as f64 * h || k > n {
                    break;
                }
                k += 1;
            }
            worst = worst.max(best / s);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_offset_is_the_cap() {
        let cap = retracted_cap(&DomainSpec::half_space(), 0.0).unwrap();
        assert!(cap.contains([0.0, 1e-9]));
        assert!(!cap.contains([0.0, 2.3]));
        assert!(retracted_cap(&DomainSpec::half_space(), -0.1).is_err());
    }

    #[test]
    fn half_space_offset_is_height() {
        let cap = retracted_cap(&DomainSpec::half_space(), 0.5).unwrap();
        for i in 0..=40 {
            for j in 1..=40 {
                let p = [-2.0 + 0.1 * i as f64, 0.05 * j as f64];
                if norm(p) < cap.outer_radius {
                    assert_eq!(cap.contains(p), p[1] >= 0.5, "{p:?}");
                }
            }
        }
    }

    #[test]
    fn nesting_and_collar_constant() {
        let dom = DomainSpec::v_graph(0.1, 4.0).unwrap();
        let caps: Vec<_> = [0.1, 0.2, 0.4].iter().map(|&s| retracted_cap(&dom, s).unwrap()).collect();
        for i in 0..60 {
            for j in 0..60 {
                let p = [-2.3 + 4.6 * i as f64 / 59.0, -0.1 + 2.5 * j as f64 / 59.0];
                if caps[2].contains(p) {
                    assert!(caps[1].contains(p));
                }
                if caps[1].contains(p) {
                    assert!(caps[0].contains(p));
                }
            }
        }
        let base = retracted_cap(&dom, 0.0).unwrap();
        let c: Vec<f64> = [0.1, 0.2].iter().map(|&s| collar_ratio(&base, s, s / 8.0).unwrap()).collect();
        assert!(c.iter().all(|&v| v > 0.0 && v < 3.0), "{c:?}");
    }
}
