use super::{EstimateReport, InstanceDescriptor, Theorem};
use crate::barriers::osgood_at_zero;
use crate::error::{Error, Result};
use crate::geometry::{corkscrew, DomainSpec, Point};
use crate::harnack::{px_bharnack_bound, px_carleson_bound};
use crate::nonlinearity::{Nonlinearity, RescaledNonlinearity};
use crate::numeric::quadrature::{integrate_log, Tolerance};
use crate::numeric::roots::bisect;
use crate::numeric::Extended;
use crate::solver::{Drift, GridField, NodeKind, PField};
use serde::{Deserialize, Serialize};

/// Trial constants for the radius `1/C` of the supremum ball.
pub const C_TRIALS: [f64; 8] = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0];

/// Radius passed to the corkscrew construction for `A_R` (unit scale).
const CORKSCREW_RADIUS: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarlesonTrial {
    pub c_trial: f64,
    /// `sup` of `u` over lattice nodes of `B(w, 1/C) ∩ Ω`; 0 if there are none.
    pub sup: f64,
    pub integral: Extended,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarlesonInstance {
    pub w: Point,
    pub corkscrew: Point,
    pub u_a: f64,
    pub trials: Vec<CarlesonTrial>,
    pub smallest_trial: Option<f64>,
    /// Least `C ≥ 2` with `∫_{u(A)}^{M(C)} dt/Φ_R ≤ C`, refined by bisection below the smallest passing trial.
    pub constant: Option<f64>,
    pub flags: Vec<String>,
}

fn sup_near(u: &GridField, dom: &DomainSpec, w: Point, rad: f64) -> f64 {
    u.extrema_where(w, rad, |p| dom.contains(p)).map_or(0.0, |(_, hi)| hi)
}

/// `∫_a^b dt/Φ_R(t)`, zero when `b ≤ a`; `a = 0` diverges in the Osgood case.
fn inverse_drift_integral(rnl: &RescaledNonlinearity, osgood: bool, a: f64, b: f64) -> Result<Extended> {
    if b <= a {
        return Ok(Extended::Finite(0.0));
    }
    let tol = Tolerance::new(1e-12, 1e-10);
    let f = |t: f64| Ok(1.0 / rnl.phi(t)?);
    if a > 0.0 {
        return Ok(Extended::Finite(integrate_log(f, a, b, &tol)?.value));
    }
    if osgood {
        return Ok(Extended::Infinite);
    }
    let lower = rnl.base.support().0.max(1e-300);
    Ok(Extended::Finite(integrate_log(f, lower.min(b), b, &tol)?.value))
}

/// Runs the constant sweep for one solved field.
pub fn carleson_instance(u: &GridField, dom: &DomainSpec, w: Point, scale: f64, nl: &Nonlinearity) -> Result<CarlesonInstance> {
    let rnl = RescaledNonlinearity::new(nl.clone(), scale)?;
    let mut flags = Vec::new();
    for k in 0..u.values.len() {
        let p = u.point(k);
        if u.mask[k] == NodeKind::Boundary && !dom.contains(p) && (p[0] - w[0]).hypot(p[1] - w[1]) <= 1.0 && u.values[k].abs() > 1e-12 {
            return Err(Error::Precondition(format!(
                "u must vanish on the boundary patch near {w:?}; found {} at {p:?}",
                u.values[k]
            )));
        }
        if u.is_active(k) && u.values[k] < -1e-8 {
            return Err(Error::Precondition(format!("u must be non-negative, found {} at {p:?}", u.values[k])));
        }
    }
    let a = corkscrew(dom, w, CORKSCREW_RADIUS)?;
    let u_a = u.interpolate(a.point)?;
    let osgood = osgood_at_zero(&Drift::Rescaled(rnl.clone()))?;
    if u_a <= 0.0 {
        flags.push(if osgood {
            "u(A) = 0 with an Osgood drift: the estimate forces u ≡ 0 (strong minimum principle)".into()
        } else {
            "u(A) = 0 with a non-Osgood drift: the strong minimum principle is not available".into()
        });
    }
    let integral_at = |c: f64| -> Result<(f64, Extended)> {
        let sup = sup_near(u, dom, w, 1.0 / c);
        Ok((sup, inverse_drift_integral(&rnl, osgood, u_a.max(0.0), sup)?))
    };
    let mut trials = Vec::new();
    for &c in &C_TRIALS {
        let (sup, integral) = integral_at(c)?;
        trials.push(CarlesonTrial { c_trial: c, sup, integral, passed: integral.le(c) });
    }
    let first = trials.iter().position(|t| t.passed);
    let smallest_trial = first.map(|i| trials[i].c_trial);
    let constant = match first {
        None => None,
        Some(0) => Some(C_TRIALS[0]),
        Some(i) => {
            let (lo, hi) = (C_TRIALS[i - 1], C_TRIALS[i]);
            // I(C) is non-increasing, so C − I(C) changes sign once.
            let g = |c: f64| -> Result<f64> {
                Ok(match integral_at(c)?.1 {
                    Extended::Finite(v) => if v <= c { 1.0 } else { -1.0 },
                    Extended::Infinite => -1.0,
                })
            };
            Some(bisect(g, lo, hi, 1e-9)?)
        }
    };
    if constant.is_none() {
        flags.push(format!("no trial constant up to {} passed", C_TRIALS[C_TRIALS.len() - 1]));
    }
    Ok(CarlesonInstance { w, corkscrew: a.point, u_a, trials, smallest_trial, constant, flags })
}

/// Single-instance Carleson report; the per-instance value is the refined constant.
pub fn verify_carleson(u: &GridField, dom: &DomainSpec, w: Point, scale: f64, nl: &Nonlinearity) -> Result<EstimateReport> {
    let inst = carleson_instance(u, dom, w, scale, nl)?;
    let desc = InstanceDescriptor { domain: dom.kind_name().into(), nl: nl.kind_name().into(), scale, seed: None };
    Ok(EstimateReport::from_values(
        Theorem::Carleson,
        vec![desc],
        vec![inst.constant.unwrap_or(f64::INFINITY)],
        inst.flags,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PxTrial {
    pub c_trial: f64,
    pub sup: f64,
    pub bound: f64,
    pub passed: bool,
    /// `sup v/u` against the boundary Harnack bound, when a second field is given.
    pub ratio: Option<f64>,
    pub ratio_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PxReport {
    pub p_range: (f64, f64),
    pub corkscrew: Point,
    pub u_a: f64,
    #[serde(rename = "R")]
    pub scale: f64,
    pub trials: Vec<PxTrial>,
    pub fitted_c: Option<f64>,
    pub passed: bool,
    /// `bound − sup` at the fitted constant.
    pub margin: Option<f64>,
}

/// Checks `sup_{B(w, R/C)∩Ω} u ≤ C·max{u(A_R)^{1+CR}, u(A_R)^{1/(1+CR)}}` over the trial constants,
/// and `sup v/u ≤ C·max{u(A_R)^{CR}, u(A_R)^{−CR}}` when `v` is given.
pub fn px_corollary_check(
    u: &GridField,
    v: Option<&GridField>,
    p_field: &PField,
    dom: &DomainSpec,
    w: Point,
    scale: f64,
) -> Result<PxReport> {
    let p_range = p_field.range_on(u)?;
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(Error::Argument(format!("R must lie in (0, 1], got {scale}")));
    }
    let a = corkscrew(dom, w, scale)?;
    let u_a = u.interpolate(a.point)?;
    let mut trials = Vec::new();
    for &c in &C_TRIALS {
        let rad = scale / c;
        let sup = sup_near(u, dom, w, rad);
        let bound = px_carleson_bound(u_a, scale, c)?;
        let (ratio, ratio_bound) = match v {
            Some(v) => {
                let mut best: f64 = 0.0;
                for k in 0..u.values.len() {
                    let p = u.point(k);
                    if u.is_active(k) && dom.contains(p) && (p[0] - w[0]).hypot(p[1] - w[1]) <= rad && u.values[k] > 1e-7 {
                        best = best.max(v.values[k] / u.values[k]);
                    }
                }
                (Some(best), Some(px_bharnack_bound(u_a, scale, c)?))
            }
            None => (None, None),
        };
        let passed = sup <= bound && match (ratio, ratio_bound) {
            (Some(r), Some(b)) => r <= b,
            _ => true,
        };
        trials.push(PxTrial { c_trial: c, sup, bound, passed, ratio, ratio_bound });
    }
    let hit = trials.iter().find(|t| t.passed);
    Ok(PxReport {
        p_range,
        corkscrew: a.point,
        u_a,
        scale,
        fitted_c: hit.map(|t| t.c_trial),
        passed: hit.is_some(),
        margin: hit.map(|t| t.bound - t.sup),
        trials,
    })
}
