use crate::error::{Error, Result};
use crate::geometry::{reifenberg_delta, DomainSpec, Point};
use crate::nonlinearity::{Nonlinearity, RescaledNonlinearity};
use crate::solver::{GridField, NodeKind};
use serde::{Deserialize, Serialize};

/// Admissible exponents: the regression slope is clipped into this window.
pub const ALPHA_WINDOW: (f64, f64) = (1e-3, 0.125);

/// Largest flatness for which the boundary Hölder estimate is claimed.
pub const MAX_FLATNESS: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderRung {
    pub rho: f64,
    pub sup: f64,
    /// `M(ρ/r)^α + Φ_R(M)ρ^{2α}r^{2α}`, before the factor `C₁`.
    pub shape: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderFit {
    pub c1: f64,
    pub alpha: f64,
    /// Least-squares slope of `log sup` against `log(ρ/r)`.
    pub raw_slope: Option<f64>,
    pub at_window_edge: bool,
    pub delta: f64,
    pub sup: f64,
    pub rungs: Vec<HolderRung>,
    pub flags: Vec<String>,
}

/// Fits `sup_{B(x₀,ρ)∩Ω} u ≤ C₁M(ρ/r)^α + C₁Φ_R(M)ρ^{2α}r^{2α}` over `ρ_k = r·2^{−k} ≥ 2h`.
pub fn verify_boundary_holder(
    field: &GridField,
    dom: &DomainSpec,
    x0: Point,
    r: f64,
    scale: f64,
    nl: &Nonlinearity,
) -> Result<HolderFit> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::Argument(format!("radius must lie in (0, 1], got {r}")));
    }
    let flat_r = if dom.r0.is_finite() { r.min(0.5 * dom.r0) } else { r };
    let delta = reifenberg_delta(dom, x0, flat_r)?.delta;
    if delta > MAX_FLATNESS {
        return Err(Error::Precondition(format!(
            "boundary flatness delta = {delta:.4} at {x0:?} exceeds {MAX_FLATNESS}"
        )));
    }
    for k in 0..field.values.len() {
        let p = field.point(k);
        if field.mask[k] == NodeKind::Boundary && !dom.contains(p) && (p[0] - x0[0]).hypot(p[1] - x0[1]) <= r && field.values[k].abs() > 1e-12 {
            return Err(Error::Precondition(format!(
                "u must vanish on the boundary near {x0:?}; found {} at {p:?}",
                field.values[k]
            )));
        }
    }
    let rnl = RescaledNonlinearity::new(nl.clone(), scale)?;
    let floor = 2.0 * field.h;
    let mut rhos = Vec::new();
    let mut rho = r;
    while rho >= floor * (1.0 - 1e-12) {
        rhos.push(rho);
        rho /= 2.0;
    }
    if rhos.len() < 2 {
        return Err(Error::Argument(format!("radius {r} gives fewer than two rungs above 2h")));
    }
    let sups: Vec<f64> = rhos
        .iter()
        .map(|&rho| field.extrema_where(x0, rho, |p| dom.contains(p)).map_or(0.0, |(_, hi)| hi.max(0.0)))
        .collect();
    let m = sups[0];
    let mut flags = Vec::new();
    if m <= 0.0 {
        flags.push("u vanishes near the boundary point; every rung passes trivially".into());
        let rungs = rhos.iter().map(|&rho| HolderRung { rho, sup: 0.0, shape: 0.0, slack: 0.0 }).collect();
        return Ok(HolderFit { c1: 0.0, alpha: ALPHA_WINDOW.1, raw_slope: None, at_window_edge: true, delta, sup: 0.0, rungs, flags });
    }
    let pts: Vec<(f64, f64)> = rhos
        .iter()
        .zip(&sups)
        .filter(|(_, &s)| s > 0.0)
        .map(|(&rho, &s)| ((rho / r).ln(), s.ln()))
        .collect();
    let raw_slope = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(sxy / sxx)
    } else {
        None
    };
    let slope = raw_slope.unwrap_or(ALPHA_WINDOW.0);
    let alpha = slope.clamp(ALPHA_WINDOW.0, ALPHA_WINDOW.1);
    let at_window_edge = alpha != slope || alpha == ALPHA_WINDOW.1;
    if at_window_edge {
        flags.push(format!("fitted exponent {slope:.4} clipped to the window edge {alpha}"));
    }
    let phi = rnl.phi(m)?;
    let shapes: Vec<f64> = rhos
        .iter()
        .map(|&rho| m * (rho / r).powf(alpha) + phi * rho.powf(2.0 * alpha) * r.powf(2.0 * alpha))
        .collect();
    let c1 = sups.iter().zip(&shapes).map(|(s, sh)| s / sh).fold(0.0, f64::max);
    let rungs = rhos
        .iter()
        .zip(sups.iter().zip(&shapes))
        .map(|(&rho, (&sup, &shape))| HolderRung { rho, sup, shape, slack: c1 * shape - sup })
        .collect();
    Ok(HolderFit { c1, alpha, raw_slope, at_window_edge, delta, sup: m, rungs, flags })
}
