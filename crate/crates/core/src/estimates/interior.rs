use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::harnack::{rescaled_certificate, HarnackCertificate};
use crate::nonlinearity::{Nonlinearity, RescaledNonlinearity};
use crate::solver::{GridField, NodeKind};
use serde::{Deserialize, Serialize};

/// Rungs of the oscillation ladder stop once `ρ < OSC_RUNG_FLOOR·h`.
pub const OSC_RUNG_FLOOR: f64 = 8.0;

/// Every lattice node of the closed ball must be an interior node.
pub(crate) fn require_interior_ball(field: &GridField, c: Point, r: f64) -> Result<()> {
    let h = field.h;
    let i0 = ((c[0] - r - field.origin[0]) / h).floor();
    let i1 = ((c[0] + r - field.origin[0]) / h).ceil();
    let j0 = ((c[1] - r - field.origin[1]) / h).floor();
    let j1 = ((c[1] + r - field.origin[1]) / h).ceil();
    if i0 < 0.0 || j0 < 0.0 || i1 > (field.nx - 1) as f64 || j1 > (field.ny - 1) as f64 {
        return Err(Error::Argument(format!("ball B({c:?}, {r}) leaves the grid")));
    }
    for j in j0 as usize..=j1 as usize {
        for i in i0 as usize..=i1 as usize {
            let k = field.index(i, j);
            let p = field.point(k);
            if (p[0] - c[0]).hypot(p[1] - c[1]) <= r && field.mask[k] != NodeKind::Interior {
                return Err(Error::Argument(format!(
                    "ball B({c:?}, {r}) is not fully interior: node {p:?} is {:?}",
                    field.mask[k]
                )));
            }
        }
    }
    Ok(())
}

/// Certificate `∫_m^M dt/(r^α Φ_R(t) + t)` with `m, M` the extrema over the grid ball `B(center, r)`.
pub fn verify_interior_harnack(
    field: &GridField,
    center: Point,
    r: f64,
    scale: f64,
    nl: &Nonlinearity,
    alpha: f64,
) -> Result<HarnackCertificate> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::Argument(format!("radius must lie in (0, 1], got {r}")));
    }
    require_interior_ball(field, center, r)?;
    if let Some((lo, hi)) = field.ball_extrema(center, 2.0 * r) {
        if lo < -1e-10 * hi.abs().max(1.0) {
            return Err(Error::Precondition(format!(
                "field must be non-negative on B({center:?}, {}), found {lo}",
                2.0 * r
            )));
        }
    }
    let (m, big_m) = field.ball_extrema(center, r).expect("ball holds interior nodes");
    rescaled_certificate(m.max(0.0), big_m.max(0.0), r, scale, alpha, nl)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscRung {
    pub rho: f64,
    /// `osc` over `B(x₀, ρ/2)`.
    pub osc_half: f64,
    /// `osc` over `B(x₀, ρ)`.
    pub osc_full: f64,
    /// `τ·osc_full + C·Φ_R(M)√ρ − osc_half`.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscDecayFit {
    pub tau: f64,
    pub c: f64,
    /// `M = sup |u|` over `B(x₀, r)`.
    pub sup: f64,
    pub phi_r_sup: f64,
    /// `τ` could not be pushed below 1 with `C = 0`, so `τ = 1/2` was used with a fitted `C`.
    pub fallback: bool,
    pub rungs: Vec<OscRung>,
}

/// Fits `osc_{B(ρ/2)} u ≤ τ·osc_{B(ρ)} u + C·Φ_R(M)√ρ` over `ρ_k = r·2^{−k} ≥ 8h`.
///
/// The fit first tries `C = 0` with `τ` the largest observed ratio; if that
/// ratio is not below 1 it fixes `τ = 1/2` and takes the least `C`.
pub fn verify_osc_decay(field: &GridField, x0: Point, r: f64, scale: f64, nl: &Nonlinearity) -> Result<OscDecayFit> {
    if !(r > 0.0) {
        return Err(Error::Argument(format!("radius must be positive, got {r}")));
    }
    require_interior_ball(field, x0, r)?;
    let floor = OSC_RUNG_FLOOR * field.h;
    let mut rhos = Vec::new();
    let mut rho = r;
    while rho >= floor * (1.0 - 1e-12) {
        rhos.push(rho);
        rho /= 2.0;
    }
    if rhos.is_empty() {
        return Err(Error::Argument(format!("radius {r} is below the rung floor {floor}")));
    }
    let osc = |rho: f64| {
        let (a, b) = field.ball_extrema(x0, rho).expect("interior ball");
        b - a
    };
    let (lo, hi) = field.ball_extrema(x0, r).expect("interior ball");
    let sup = lo.abs().max(hi.abs());
    let phi = RescaledNonlinearity::new(nl.clone(), scale)?.phi(sup)?;
    let pairs: Vec<(f64, f64, f64)> = rhos.iter().map(|&rho| (rho, osc(rho / 2.0), osc(rho))).collect();

    let ratio_max = pairs
        .iter()
        .filter(|p| p.2 > 0.0)
        .map(|p| p.1 / p.2)
        .fold(0.0, f64::max);
    let (tau, c, fallback) = if ratio_max < 1.0 {
        (ratio_max, 0.0, false)
    } else {
        if !(phi > 0.0) {
            return Err(Error::Construction(format!(
                "no tau < 1 fits: oscillation ratio {ratio_max} with vanishing drift term"
            )));
        }
        let tau = 0.5;
        let c = pairs
            .iter()
            .map(|&(rho, half, full)| (half - tau * full) / (phi * rho.sqrt()))
            .fold(0.0, f64::max);
        (tau, c, true)
    };
    let rungs = pairs
        .iter()
        .map(|&(rho, half, full)| OscRung { rho, osc_half: half, osc_full: full, slack: tau * full + c * phi * rho.sqrt() - half })
        .collect();
    Ok(OscDecayFit { tau, c, sup, phi_r_sup: phi, fallback, rungs })
}
