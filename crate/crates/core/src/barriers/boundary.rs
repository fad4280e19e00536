//! Radial barriers for the boundary Harnack comparison: a convex lower
//! barrier `w₁` on `B(x₁,2) \ B̄(x₁,1)` and a concave upper barrier `w₂` on
//! `B(x₀,3) \ B̄(x₀,1)`, both defined through `g' = ±C̃Φ_R(g)`.
//!
//! Everything runs in the logarithm `y = log g`, where the flow reads
//! `y' = ±C̃η_R(e^y)`; this keeps profiles that dive far below the smallest
//! double representable. Slacks are reported divided by `|Dw|`, which leaves
//! their sign unchanged.

use super::profile::*;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::nonlinearity::RescaledNonlinearity;
use crate::numeric::quadrature::{integrate, Tolerance};
use crate::numeric::roots::{bisect, rtsafe};
use crate::numeric::Extended;
use crate::solver::{pucci_apply, EllipticityPair, PucciSign};
use serde::{Deserialize, Serialize};

fn tight() -> Tolerance {
    Tolerance::new(1e-15, 1e-13)
}

/// The flow `dy/dτ = η_R(e^y)` and its integrals.
struct LogFlow<'a> {
    rnl: &'a RescaledNonlinearity,
}

impl LogFlow<'_> {
    fn eta(&self, y: f64) -> Result<f64> {
        self.rnl.eta_log(y)
    }

    fn split_integral<F: Fn(f64) -> Result<f64>>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        let tol = tight();
        // Split at the kink of the log-coordinate integrand.
        if a * b < 0.0 {
            Ok(integrate(&f, a, 0.0, &tol)?.value + integrate(&f, 0.0, b, &tol)?.value)
        } else {
            Ok(integrate(&f, a, b, &tol)?.value)
        }
    }

    /// `∫_a^b dy/η_R(e^y) = ∫_{e^a}^{e^b} ds/Φ_R(s)`.
    fn travel(&self, a: f64, b: f64) -> Result<f64> {
        self.split_integral(|y| Ok(1.0 / self.eta(y)?), a, b)
    }

    /// `∫_a^b e^y/η_R(e^y) dy = ∫_{e^a}^{e^b} s ds/Φ_R(s)`.
    fn mass(&self, a: f64, b: f64) -> Result<f64> {
        self.split_integral(|y| Ok(y.exp() / self.eta(y)?), a, b)
    }

    /// `y₁` with `travel(y₀, y₁) = τ` (τ of either sign).
    fn advance(&self, y0: f64, tau: f64) -> Result<f64> {
        if tau == 0.0 {
            return Ok(y0);
        }
        let dir = tau.signum();
        // η_R ≥ 1, so the travel over a y-interval never exceeds its length.
        let near = y0 + tau;
        let at_near = self.travel(y0, near)? - tau;
        if at_near.abs() <= 1e-14 * tau.abs().max(1.0) {
            // η_R ≡ 1 on the segment: the flow is a pure translation.
            return Ok(near);
        }
        let mut span = tau.abs().max(1e-3);
        let mut far = y0 + dir * 2.0 * span;
        while (self.travel(y0, far)? - tau) * dir < 0.0 {
            span *= 2.0;
            far = y0 + dir * 2.0 * span;
            if !far.is_finite() || far.abs() > 1e300 {
                return Err(Error::Construction(format!("flow cannot travel {tau} from log level {y0}")));
            }
        }
        rtsafe(|y| Ok((self.travel(y0, y)? - tau, 1.0 / self.eta(y)?)), near, far, 1e-15)
    }

    /// `∫_{−∞}^{b}` (`toward_zero`) or `∫_b^{∞}` of `ds/Φ_R`, stopping once `cap` is exceeded.
    fn tail_reaches(&self, b: f64, cap: f64, toward_zero: bool) -> Result<Extended> {
        let mut acc = 0.0;
        let mut len = 1.0;
        let mut edge = b;
        loop {
            let next = if toward_zero { edge - len } else { edge + len };
            let piece = if toward_zero { self.travel(next, edge)? } else { self.travel(edge, next)? };
            acc += piece;
            if acc >= cap {
                return Ok(Extended::Finite(acc));
            }
            if piece < 1e-13 * acc.max(1.0) {
                return Ok(Extended::Finite(acc));
            }
            edge = next;
            len *= 2.0;
            if len > 1e300 {
                return Ok(Extended::Infinite);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryBarrier {
    /// `None` on the degenerate branch.
    pub barrier: Option<RadialBarrier>,
    /// `μ₀` (lower) or `μ₁` (upper); `Infinite` for the degenerate `μ₁ = ∞`.
    pub mu: Extended,
    /// `log μ`, meaningful even when `μ` underflows.
    pub log_mu: f64,
    pub degenerate: bool,
    /// `∫_0^{m_u/3} ds/Φ_R` (lower) or `∫_{M_v}^∞ ds/Φ_R` (upper), possibly truncated once above its threshold.
    pub assumption_integral: Extended,
    pub assumption_threshold: f64,
    /// Relative error of the sphere value against its target.
    pub shooting_residual: f64,
    /// Same error computed from the tabulated profile.
    pub mesh_residual: f64,
    /// Values of the sphere level at the two ends of the shooting interval.
    pub endpoint_values: (f64, f64),
    /// `w̃₁(t) ≥ μ₀t` (lower) or `w̃₂(t) ≤ μ₁t` (upper) at every mesh point.
    pub linear_bound_ok: bool,
    /// `inf |Dw|` over the annulus (the profile's smallest slope), as a logarithm.
    pub log_min_gradient: f64,
    pub ctilde: f64,
}

fn check_inputs(level: f64, ctilde: f64) -> Result<()> {
    if !(level > 0.0 && level.is_finite()) {
        return Err(Error::Precondition(format!("barrier level must be positive, got {level}")));
    }
    if !(ctilde > 1.0) {
        return Err(Error::Precondition(format!("C~ must exceed 1, got {ctilde}")));
    }
    Ok(())
}

/// Lower barrier `w₁(x) = ∫_0^{2−|x−x₁|} g`, `t = ∫_{μ₀}^{g(t)} ds/(C̃Φ_R(s))`,
/// shot so that `w₁ = m_u` on `∂B(x₁,1)`.
pub fn lower_barrier_w1(
    m_u: f64,
    rnl: &RescaledNonlinearity,
    ell: &EllipticityPair,
    ctilde: f64,
    center: Point,
) -> Result<BoundaryBarrier> {
    check_inputs(m_u, ctilde)?;
    let flow = LogFlow { rnl };
    let ym = m_u.ln();
    let threshold = 4.0 * ctilde;
    let assumption = flow.tail_reaches(ym - 3f64.ln(), threshold, true)?;
    let holds = match assumption {
        Extended::Infinite => true,
        Extended::Finite(v) => v >= threshold,
    };
    if !holds {
        return Ok(BoundaryBarrier {
            barrier: None,
            mu: Extended::Finite(0.0),
            log_mu: f64::NEG_INFINITY,
            degenerate: true,
            assumption_integral: assumption,
            assumption_threshold: threshold,
            shooting_residual: f64::NAN,
            mesh_residual: f64::NAN,
            endpoint_values: (f64::NAN, f64::NAN),
            linear_bound_ok: true,
            log_min_gradient: f64::NEG_INFINITY,
            ctilde,
        });
    }
    // Sphere value as a function of y₀ = log μ₀.
    let sphere = |y0: f64| -> Result<f64> {
        let y1 = flow.advance(y0, ctilde)?;
        Ok(flow.mass(y0, y1)? / ctilde)
    };
    let hi = ym;
    let at_hi = sphere(hi)?;
    let mut lo = ym - 1.0;
    let mut step = 1.0;
    let mut at_lo = sphere(lo)?;
    while at_lo >= m_u {
        step *= 2.0;
        lo = ym - step;
        if step > 1e6 {
            return Err(Error::Bracket(format!("lower shooting bracket not found: values {at_lo} at log mu0 = {lo}, {at_hi} at {hi}")));
        }
        at_lo = sphere(lo)?;
    }
    if !(at_hi > m_u) {
        return Err(Error::Bracket(format!("shooting bracket [{lo}, {hi}] gives values {at_lo}, {at_hi} around {m_u}")));
    }
    let y0 = bisect(|y| Ok(sphere(y)?.ln() - ym), lo, hi, 1e-15)?;
    let shooting_residual = (sphere(y0)? - m_u).abs() / m_u;
    let mu0 = y0.exp();

    let t = graded_mesh(1.0, PROFILE_POINTS, PROFILE_GRADING);
    let mut y = vec![y0; t.len()];
    for i in 1..t.len() {
        y[i] = flow.advance(y[i - 1], ctilde * (t[i] - t[i - 1]))?;
    }
    let eta: Vec<f64> = y.iter().map(|&v| flow.eta(v)).collect::<Result<_>>()?;
    let g: Vec<f64> = y.iter().map(|v| v.exp()).collect();
    let dg: Vec<f64> = g.iter().zip(&eta).map(|(g, e)| ctilde * e * g).collect();
    let w = hermite_cumulative(&t, &g, &dg);
    let excess: Vec<f64> = g.iter().map(|v| v - mu0).collect();
    let gap = hermite_cumulative(&t, &excess, &dg);
    let mesh_residual = (w[w.len() - 1] - m_u).abs() / m_u;

    let mut min_slack = f64::INFINITY;
    let mut worst_t = 0.0;
    for i in 0..t.len() {
        // D²w₁/g has eigenvalues C̃η_R(g) (radial) and −1/ρ (tangential), ρ = 2 − t.
        let x = [[ctilde * eta[i], 0.0], [0.0, -1.0 / (2.0 - t[i])]];
        let s = -(pucci_apply(ell, &x, PucciSign::Plus) + 2.0 * eta[i]);
        if s < min_slack {
            min_slack = s;
            worst_t = t[i];
        }
    }
    let slopes_ok = y.windows(2).all(|p| p[1] >= p[0]);
    let second_ok = second_differences_sign(&t, &w, 1.0);
    let profile = (0..t.len())
        .map(|i| ProfilePoint { t: t[i], value: w[i], slope: g[i], curvature: dg[i] })
        .collect();
    Ok(BoundaryBarrier {
        barrier: Some(RadialBarrier {
            center,
            inner_radius: 1.0,
            outer_radius: 2.0,
            orientation: Orientation::IncreasingInward,
            map: RadialMap::InnerCollar,
            profile,
            certificate: Certificate {
                min_slack,
                worst_t,
                relation_residual: shooting_residual,
                shape_ok: slopes_ok && second_ok,
                mesh_points: t.len(),
            },
        }),
        mu: Extended::Finite(mu0),
        log_mu: y0,
        degenerate: false,
        assumption_integral: assumption,
        assumption_threshold: threshold,
        shooting_residual,
        mesh_residual,
        endpoint_values: (at_lo, at_hi),
        linear_bound_ok: gap.iter().all(|&v| v >= 0.0),
        log_min_gradient: y[0],
        ctilde,
    })
}

/// `sign·(second difference)` is non-negative everywhere, up to round-off in `w`.
fn second_differences_sign(t: &[f64], w: &[f64], sign: f64) -> bool {
    t.windows(3).zip(w.windows(3)).all(|(t, w)| {
        let d1 = (w[1] - w[0]) / (t[1] - t[0]);
        let d2 = (w[2] - w[1]) / (t[2] - t[1]);
        let noise = 8.0 * f64::EPSILON * (w[0].abs() + w[1].abs() + w[2].abs()) / (t[2] - t[0]);
        sign * (d2 - d1) >= -noise
    })
}

/// Upper barrier `w₂(x) = ∫_0^{|x−x₀|−1} f`, `t = ∫_{f(t)}^{μ₁} ds/(C̃Φ_R(s))`,
/// shot so that `w₂ = M_v` on `∂B(x₀,3)`.
pub fn upper_barrier_w2(
    m_v: f64,
    rnl: &RescaledNonlinearity,
    ell: &EllipticityPair,
    ctilde: f64,
    center: Point,
) -> Result<BoundaryBarrier> {
    check_inputs(m_v, ctilde)?;
    let flow = LogFlow { rnl };
    let ym = m_v.ln();
    let threshold = 2.0 * ctilde;
    let assumption = flow.tail_reaches(ym, threshold, false)?;
    let holds = match assumption {
        Extended::Infinite => true,
        Extended::Finite(v) => v >= threshold,
    };
    if !holds {
        return Ok(BoundaryBarrier {
            barrier: None,
            mu: Extended::Infinite,
            log_mu: f64::INFINITY,
            degenerate: true,
            assumption_integral: assumption,
            assumption_threshold: threshold,
            shooting_residual: f64::NAN,
            mesh_residual: f64::NAN,
            endpoint_values: (f64::NAN, f64::NAN),
            linear_bound_ok: true,
            log_min_gradient: f64::NAN,
            ctilde,
        });
    }
    let sphere = |y1: f64| -> Result<f64> {
        let y2 = flow.advance(y1, -2.0 * ctilde)?;
        Ok(flow.mass(y2, y1)? / ctilde)
    };
    let lo = ym - 3f64.ln();
    let at_lo = sphere(lo)?;
    let mut hi = ym;
    let mut step = 1.0;
    let mut at_hi = sphere(hi)?;
    while at_hi <= m_v {
        hi = ym + step;
        step *= 2.0;
        if step > 1e6 {
            return Err(Error::Bracket(format!("upper shooting bracket not found: values {at_lo} at log mu1 = {lo}, {at_hi} at {hi}")));
        }
        at_hi = sphere(hi)?;
    }
    if !(at_lo < m_v) {
        return Err(Error::Bracket(format!("shooting bracket [{lo}, {hi}] gives values {at_lo}, {at_hi} around {m_v}")));
    }
    let y1 = bisect(|y| Ok(sphere(y)?.ln() - ym), lo, hi, 1e-15)?;
    let shooting_residual = (sphere(y1)? - m_v).abs() / m_v;
    let mu1 = y1.exp();

    let t = graded_mesh(2.0, PROFILE_POINTS, PROFILE_GRADING);
    let mut y = vec![y1; t.len()];
    for i in 1..t.len() {
        y[i] = flow.advance(y[i - 1], -ctilde * (t[i] - t[i - 1]))?;
    }
    let eta: Vec<f64> = y.iter().map(|&v| flow.eta(v)).collect::<Result<_>>()?;
    let f: Vec<f64> = y.iter().map(|v| v.exp()).collect();
    let df: Vec<f64> = f.iter().zip(&eta).map(|(f, e)| -ctilde * e * f).collect();
    let w = hermite_cumulative(&t, &f, &df);
    let deficit: Vec<f64> = f.iter().map(|v| mu1 - v).collect();
    let neg_df: Vec<f64> = df.iter().map(|d| -d).collect();
    let gap = hermite_cumulative(&t, &deficit, &neg_df);
    let mesh_residual = (w[w.len() - 1] - m_v).abs() / m_v;

    let mut min_slack = f64::INFINITY;
    let mut worst_t = 0.0;
    for i in 0..t.len() {
        // D²w₂/f has eigenvalues −C̃η_R(f) (radial) and 1/ρ (tangential), ρ = 1 + t.
        let x = [[-ctilde * eta[i], 0.0], [0.0, 1.0 / (1.0 + t[i])]];
        let s = pucci_apply(ell, &x, PucciSign::Minus) - 2.0 * eta[i];
        if s < min_slack {
            min_slack = s;
            worst_t = t[i];
        }
    }
    let slopes_ok = y.windows(2).all(|p| p[1] <= p[0]);
    let second_ok = second_differences_sign(&t, &w, -1.0);
    let profile = (0..t.len())
        .map(|i| ProfilePoint { t: t[i], value: w[i], slope: f[i], curvature: df[i] })
        .collect();
    Ok(BoundaryBarrier {
        barrier: Some(RadialBarrier {
            center,
            inner_radius: 1.0,
            outer_radius: 3.0,
            orientation: Orientation::IncreasingOutward,
            map: RadialMap::OuterCollar,
            profile,
            certificate: Certificate {
                min_slack,
                worst_t,
                relation_residual: shooting_residual,
                shape_ok: slopes_ok && second_ok,
                mesh_points: t.len(),
            },
        }),
        mu: Extended::Finite(mu1),
        log_mu: y1,
        degenerate: false,
        assumption_integral: assumption,
        assumption_threshold: threshold,
        shooting_residual,
        mesh_residual,
        endpoint_values: (at_lo, at_hi),
        linear_bound_ok: gap.iter().all(|&v| v >= 0.0),
        log_min_gradient: y[y.len() - 1],
        ctilde,
    })
}

/// Sphere values of `w₁` with `μ₀ = 0` and `μ₀ = m_u`, and of `w₂` with `μ₁ = M_v/3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingEndpoints {
    /// `w₁` on the inner sphere with `μ₀ = 0`: bounded by `g(1) ≤ m_u/3`.
    pub lower_at_zero_bound: f64,
    pub lower_at_zero_ok: bool,
    pub lower_at_level: f64,
    pub upper_at_third: f64,
}

pub fn shooting_endpoints(m_u: f64, m_v: f64, rnl: &RescaledNonlinearity, ctilde: f64) -> Result<ShootingEndpoints> {
    let flow = LogFlow { rnl };
    // μ₀ = 0: g(1) satisfies ∫_0^{g(1)} ds/(C̃Φ_R) = 1, so g(1) ≤ m_u/3 iff the
    // integral up to m_u/3 already reaches C̃; then w₁ ≤ g(1) ≤ m_u/3.
    let reach = flow.tail_reaches((m_u / 3.0).ln(), ctilde, true)?;
    let ok = match reach {
        Extended::Infinite => true,
        Extended::Finite(v) => v >= ctilde,
    };
    let ym = m_u.ln();
    let y1 = flow.advance(ym, ctilde)?;
    let at_level = flow.mass(ym, y1)? / ctilde;
    let yv = (m_v / 3.0).ln();
    let y2 = flow.advance(yv, -2.0 * ctilde)?;
    let at_third = flow.mass(y2, yv)? / ctilde;
    Ok(ShootingEndpoints { lower_at_zero_bound: m_u / 3.0, lower_at_zero_ok: ok, lower_at_level: at_level, upper_at_third: at_third })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierPair {
    pub ctilde: f64,
    pub lower: BoundaryBarrier,
    pub upper: BoundaryBarrier,
    /// C̃ values tried before the accepted one.
    pub rejected: Vec<f64>,
}

impl BarrierPair {
    /// `μ₁/μ₀`, the bound on `w₂/w₁` along the axis, as a logarithm.
    pub fn log_ratio_bound(&self) -> f64 {
        self.upper.log_mu - self.lower.log_mu
    }
}

/// Largest C̃ tried before giving up.
pub const CTILDE_MAX: f64 = 1048576.0;

/// Starts at `C̃ = 2` and doubles until both barriers certify their inequalities.
pub fn select_ctilde(
    m_u: f64,
    m_v: f64,
    rnl: &RescaledNonlinearity,
    ell: &EllipticityPair,
    x1: Point,
    x0: Point,
) -> Result<BarrierPair> {
    let mut c = 2.0;
    let mut rejected = Vec::new();
    while c <= CTILDE_MAX {
        let lower = lower_barrier_w1(m_u, rnl, ell, c, x1)?;
        let upper = upper_barrier_w2(m_v, rnl, ell, c, x0)?;
        let ok = |b: &BoundaryBarrier| b.barrier.as_ref().is_none_or(|r| r.certificate.holds());
        if ok(&lower) && ok(&upper) {
            return Ok(BarrierPair { ctilde: c, lower, upper, rejected });
        }
        rejected.push(c);
        c *= 2.0;
    }
    Err(Error::Construction(format!("no C~ up to {CTILDE_MAX} certifies both barriers")))
}
