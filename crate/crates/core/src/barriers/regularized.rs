//! The regularized drift `φ_ε` and the small-ball maximum-principle barrier.

use super::profile::*;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::nonlinearity::{osgood_classify, PhiKind};
use crate::numeric::quadrature::{integrate, integrate_log, Tolerance};
use crate::numeric::roots::{bisect, rtsafe};
use crate::solver::{pucci_apply, Drift, DriftFn, EllipticityPair, PucciSign};
use serde::{Deserialize, Serialize};

fn tight() -> Tolerance {
    Tolerance::new(1e-15, 1e-12)
}

/// `φ_ε(t) = (1+ε)·max{Φ(t), Φ(ε)}` for the given drift `Φ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiEps {
    pub drift: Drift,
    pub eps: f64,
    /// `(1+ε)Φ(ε)`, the constant value on `[0, ε]`.
    pub floor: f64,
}

impl PhiEps {
    pub fn value(&self, t: f64) -> Result<f64> {
        if t <= self.eps {
            Ok(self.floor)
        } else {
            Ok((1.0 + self.eps) * self.drift.value(t)?)
        }
    }
}

fn base_of(drift: &Drift) -> &crate::nonlinearity::Nonlinearity {
    match drift {
        Drift::Original(nl) => nl,
        Drift::Rescaled(r) => &r.base,
    }
}

/// Builds `φ_ε`; tabulated profiles with `φ(0) > 0` are rejected.
pub fn build_phi_eps(drift: &Drift, eps: f64) -> Result<PhiEps> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Precondition(format!("regularization needs eps > 0, got {eps}")));
    }
    if let PhiKind::Tabulated { table } = &base_of(drift).kind {
        if table.range().0 == 0.0 && table.eval(0.0)? > 0.0 {
            return Err(Error::Precondition(
                "barrier constructions need phi(0) = 0; the table starts at a positive value".into(),
            ));
        }
    }
    let floor = (1.0 + eps) * drift.value(eps)?;
    Ok(PhiEps { drift: drift.clone(), eps, floor })
}

/// Whether `∫_0 ds/Φ(s)` diverges (the exact maximum principle case).
pub fn osgood_at_zero(drift: &Drift) -> Result<bool> {
    let base = base_of(drift);
    if base.is_homogeneous() {
        // Φ ≡ 0, or Φ_R(t) = t: both have a divergent ∫ ds/Φ at 0.
        return Ok(true);
    }
    Ok(osgood_classify(base)?.at_zero.verdict.diverges())
}

/// Radius bound `r₀ = (λ/2)∫_0^1 ds/φ_{1/2}(s)`; admissible radii satisfy `r < r₀`.
pub fn max_barrier_radius_bound(drift: &Drift, ell: &EllipticityPair) -> Result<f64> {
    let pe = build_phi_eps(drift, 0.5)?;
    let head = 0.5 / pe.floor;
    let tail = integrate(|s| Ok(1.0 / pe.value(s)?), 0.5, 1.0, &tight())?.value;
    Ok(0.5 * ell.lambda * (head + tail))
}

/// `w_ε(x) = g_ε(r) + M − g_ε(|x − c|)` on `B_r(c)` where
/// `t = λ∫_0^{f_ε(t)} ds/φ_ε(s)` and `g_ε = ∫ f_ε`.
///
/// The certificate evaluates `P⁻(D²w_ε) − φ_ε(|Dw_ε|)` with the extremal
/// operator itself at each mesh radius (slack divided by `|Dw_ε|`), checks
/// the implicit relation by an independent quadrature and asserts `f_ε < 1`.
pub fn radial_max_barrier(
    m: f64,
    r: f64,
    drift: &Drift,
    ell: &EllipticityPair,
    eps: f64,
    center: Point,
) -> Result<RadialBarrier> {
    let r0 = max_barrier_radius_bound(drift, ell)?;
    if !(r > 0.0 && r < r0 && r <= 1.0) {
        return Err(Error::Precondition(format!(
            "radius {r} violates r < r0 = {r0} (from lambda·∫_0^1 ds/phi_1/2 > 2 r0) or r <= 1"
        )));
    }
    let pe = build_phi_eps(drift, eps)?;
    let lam = ell.lambda;
    let t = graded_mesh(r, PROFILE_POINTS, PROFILE_GRADING);
    let t_eps = lam * eps / pe.floor;
    let mut f = vec![0.0; t.len()];
    for i in 1..t.len() {
        if t[i] <= t_eps {
            f[i] = pe.floor * t[i] / lam;
            continue;
        }
        // Continue from the previous node (or from the end of the linear piece).
        let (ta, fa) = if t[i - 1] >= t_eps { (t[i - 1], f[i - 1]) } else { (t_eps, eps) };
        let need = (t[i] - ta) / lam;
        let fdf = |y: f64| -> Result<(f64, f64)> {
            let v = integrate(|s| Ok(1.0 / pe.value(s)?), fa, y, &tight())?.value;
            Ok((v - need, 1.0 / pe.value(y)?))
        };
        let mut hi = fa + need * pe.value(fa)? * 2.0 + 1e-300;
        while fdf(hi)?.0 < 0.0 {
            hi = fa + 2.0 * (hi - fa);
            if !hi.is_finite() {
                return Err(Error::Construction("profile blew up before the radius".into()));
            }
        }
        f[i] = rtsafe(fdf, fa, hi, 1e-15)?;
    }
    let curv: Vec<f64> = f.iter().map(|&y| pe.value(y).map(|v| v / lam)).collect::<Result<_>>()?;
    let g = hermite_cumulative(&t, &f, &curv);
    if f.iter().any(|&y| y >= 1.0) {
        return Err(Error::Construction("f_eps reached 1 inside the ball".into()));
    }
    // Independent check of t = λ∫_0^{f(t)} ds/φ_ε on a subsample.
    let mut relation_residual = 0.0f64;
    for i in (1..t.len()).step_by(64).chain([t.len() - 1]) {
        let y = f[i];
        let head = eps.min(y) / pe.floor;
        let tail = if y > eps { integrate(|s| Ok(1.0 / pe.value(s)?), eps, y, &tight())?.value } else { 0.0 };
        relation_residual = relation_residual.max((lam * (head + tail) - t[i]).abs() / r);
    }
    let mut min_slack = f64::INFINITY;
    let mut worst_t = 0.0;
    for i in 0..t.len() {
        // Hessian of w = const − g(ρ): radial −f', tangential −f/ρ (→ −f'(0) at the centre).
        let tang = if t[i] > 0.0 { -f[i] / t[i] } else { -curv[0] };
        let x = [[-curv[i], 0.0], [0.0, tang]];
        let s = pucci_apply(ell, &x, PucciSign::Minus) - pe.value(f[i])?;
        let norm = if f[i] > 0.0 { s / f[i] } else { s };
        if norm < min_slack {
            min_slack = norm;
            worst_t = t[i];
        }
    }
    let shape_ok = f.windows(2).all(|w| w[1] >= w[0]);
    let top = g[g.len() - 1] + m;
    let profile = (0..t.len())
        .map(|i| ProfilePoint { t: t[i], value: g[i], slope: f[i], curvature: curv[i] })
        .collect();
    Ok(RadialBarrier {
        center,
        inner_radius: 0.0,
        outer_radius: r,
        orientation: Orientation::IncreasingInward,
        map: RadialMap::Cap { top },
        profile,
        certificate: Certificate { min_slack, worst_t, relation_residual, shape_ok, mesh_points: t.len() },
    })
}

/// Levels on which `c₀` is calibrated.
pub const CALIBRATION_LEVELS: [f64; 7] = [1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1e3];
/// Safety factor applied to the calibrated `c₀`.
pub const CALIBRATION_FACTOR: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlmostMaxReport {
    pub m: f64,
    pub sigma: f64,
    pub c0: f64,
    /// `c₀/η_R(M)²`.
    pub threshold: f64,
    pub eta_m: f64,
    pub r0: f64,
    /// `∫_0 ds/Φ = ∞`: the barriers collapse to `M` and the maximum principle is exact.
    pub maximum_principle_exact: bool,
    /// `g(threshold) ≤ (σ − 1)M` for the limiting profile.
    pub verified: bool,
    /// `g` at the threshold radius (zero in the exact case).
    pub excess_at_threshold: f64,
    /// `(M, r*)` pairs used for the calibration.
    pub calibration: Vec<(f64, f64)>,
}

/// `g(r) = λ∫_0^{f(r)} s/Φ(s) ds` with `r = λ∫_0^{f(r)} ds/Φ(s)` (non-Osgood case).
fn limiting_excess(drift: &Drift, lam: f64, r: f64) -> Result<f64> {
    let tol = tight();
    // Tables are not extrapolated below their first abscissa.
    let lower = base_of(drift).support().0.max(1e-300);
    let travel = |y: f64| -> Result<f64> { Ok(lam * integrate_log(|s| Ok(1.0 / drift.value(s)?), lower, y, &tol)?.value) };
    let mut hi = 1.0;
    while travel(hi)? < r {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::Construction("limiting profile does not reach the radius".into()));
        }
    }
    let y = bisect(|y: f64| Ok(travel(y.exp())? - r), lower.ln(), hi.ln(), 1e-14)?.exp();
    Ok(lam * integrate_log(|s| Ok(s / drift.value(s)?), lower, y, &tol)?.value)
}

/// Radius `c₀/η_R(M)²` below which subsolutions of the minus equation with
/// boundary values `≤ M` stay below `σM`.
pub fn almost_max_threshold(m: f64, drift: &Drift, ell: &EllipticityPair, sigma: f64) -> Result<AlmostMaxReport> {
    if !(sigma > 1.0) || !(m > 0.0) {
        return Err(Error::Precondition(format!("almost-maximum threshold needs sigma > 1 and M > 0, got sigma = {sigma}, M = {m}")));
    }
    let eta = |t: f64| -> Result<f64> {
        match drift {
            Drift::Rescaled(r) => r.eta(t),
            Drift::Original(nl) => Ok(nl.eta(t)?.max(1e-300)),
        }
    };
    let r0 = max_barrier_radius_bound(drift, ell)?.min(1.0);
    let exact = osgood_at_zero(drift)?;
    let mu = sigma - 1.0;
    let mut calibration = Vec::new();
    for &lvl in &CALIBRATION_LEVELS {
        let rstar = if exact || limiting_excess(drift, ell.lambda, r0)? <= mu * lvl {
            r0
        } else {
            bisect(|lr: f64| Ok(limiting_excess(drift, ell.lambda, lr.exp())? - mu * lvl), (r0 * 1e-12).ln(), r0.ln(), 1e-10)?.exp()
        };
        calibration.push((lvl, rstar));
    }
    let c0 = CALIBRATION_FACTOR
        * calibration
            .iter()
            .map(|&(lvl, rs)| eta(lvl).map(|e| rs * e * e))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
    if !(c0 > 0.0 && c0.is_finite()) {
        return Err(Error::Construction(format!("no positive c0 found in the calibration range (got {c0})")));
    }
    let eta_m = eta(m)?;
    let threshold = c0 / (eta_m * eta_m);
    let excess = if exact { 0.0 } else { limiting_excess(drift, ell.lambda, threshold.min(r0))? };
    Ok(AlmostMaxReport {
        m,
        sigma,
        c0,
        threshold,
        eta_m,
        r0,
        maximum_principle_exact: exact,
        verified: threshold <= r0 && excess <= mu * m,
        excess_at_threshold: excess,
        calibration,
    })
}
