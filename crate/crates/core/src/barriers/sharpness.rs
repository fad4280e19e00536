//! The variable-exponent example showing that the power-type boundary
//! Harnack bound cannot be improved, carried out in log-log arithmetic.
//!
//! With `p(x) = 3 − x₁` on the unit square, `u = 2Hx₂` is a solution with
//! `u(x̂) = H` at `x̂ = (7/8, 1/2)`. The comparison solution `v` takes the
//! value `M = ∫_0^1 e^{e^{K+s/2}} ds` on the right side, where
//! `H = ∫_0^{1/2} e^{e^{K+s/2}} ds`; the lower barrier
//! `ψ = G(|x − (5/4, 1/2)|)` with `G' = −e^{e^{R−(1+ε)t}}` forces
//! `v(x̂) ≥ ψ(x̂) ≳ H^γ`, `γ = e^{1/16−2ε}`.

use super::loglog::{double_exp_integral, DoubleExpIntegral, LogLogValue};
use crate::error::{Error, Result};
use crate::numeric::roots::bisect;
use serde::{Deserialize, Serialize};

/// Search grid for `K̂(ε)`.
pub const K_STEP: f64 = 0.01;
pub const K_MAX: f64 = 200.0;
/// Smallest level accepted by the construction.
pub const H_FLOOR: f64 = 1e4;

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 0.25) {
        return Err(Error::Precondition(format!("eps must lie in (0, 1/4), got {eps}")));
    }
    Ok(())
}

/// `∫_{s0}^{s1} e^{e^{K+s/2}} ds`.
fn upper_integral(k: f64, s0: f64, s1: f64) -> Result<DoubleExpIntegral> {
    double_exp_integral(k, 0.5, s0, s1)
}

/// `∫_{s0}^{s1} e^{e^{R−(1+ε)s}} ds`.
fn lower_integral(r: f64, eps: f64, s0: f64, s1: f64) -> Result<DoubleExpIntegral> {
    double_exp_integral(r, -(1.0 + eps), s0, s1)
}

/// Log-log slack of `∫_0^1 e^{e^{K+s/2}} ds ≥ e^{e^{K+1/2−ε}}`, using the lower bracket.
pub fn double_exp_slack(k: f64, eps: f64) -> Result<f64> {
    let m = upper_integral(k, 0.0, 1.0)?;
    Ok(m.lnln_bracket().0 - (k + 0.5 - eps))
}

/// `K + log(e^{ε/2} − 1) − log log(1/ε)`: non-negative iff `ε⁻¹ ≤ (e^{e^K})^{e^{ε/2}−1}`.
pub fn sufficient_slack(k: f64, eps: f64) -> f64 {
    k + (eps / 2.0).exp_m1().ln() - (1.0 / eps).ln().ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleExpSample {
    pub k: f64,
    pub slack: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoubleExpReport {
    pub eps: f64,
    /// Least grid `K > 1` at which the proof's sufficient condition holds.
    pub k_hat: f64,
    pub sufficient_slack_at_k_hat: f64,
    /// Least grid `K > 1` at which the inequality itself holds (lower bracket).
    pub k_direct: f64,
    /// The inequality at `K̂` and `K̂ + {1, 5, 10}`.
    pub samples: Vec<DoubleExpSample>,
}

impl DoubleExpReport {
    pub fn all_hold(&self) -> bool {
        self.sufficient_slack_at_k_hat >= 0.0 && self.samples.iter().all(|s| s.holds)
    }
}

fn grid_point(j: usize) -> f64 {
    1.0 + j as f64 * K_STEP
}

/// Least grid index `j ≥ 1` with `pred(K_j)`, assuming `pred` is monotone in `K`.
fn least_grid<F: FnMut(f64) -> Result<bool>>(mut pred: F) -> Result<Option<usize>> {
    let jmax = ((K_MAX - 1.0) / K_STEP).round() as usize;
    if !pred(grid_point(jmax))? {
        return Ok(None);
    }
    if pred(grid_point(1))? {
        return Ok(Some(1));
    }
    let (mut lo, mut hi) = (1usize, jmax);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if pred(grid_point(mid))? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Finds `K̂(ε)` on the grid `1 + 0.01·j`, `K ≤ 200`.
pub fn lemma61_check(eps: f64) -> Result<DoubleExpReport> {
    check_eps(eps)?;
    let j_hat = least_grid(|k| Ok(sufficient_slack(k, eps) >= 0.0))?
        .ok_or_else(|| Error::Construction(format!("no K below {K_MAX} satisfies the sufficient condition for eps = {eps}")))?;
    let k_hat = grid_point(j_hat);
    let j_direct = least_grid(|k| Ok(double_exp_slack(k, eps)? > 0.0))?
        .ok_or_else(|| Error::Construction(format!("the inequality fails up to K = {K_MAX} for eps = {eps}")))?;
    let samples = [0.0, 1.0, 5.0, 10.0]
        .iter()
        .map(|&d| {
            let k = k_hat + d;
            let slack = double_exp_slack(k, eps)?;
            Ok(DoubleExpSample { k, slack, holds: slack > 0.0 })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DoubleExpReport {
        eps,
        k_hat,
        sufficient_slack_at_k_hat: sufficient_slack(k_hat, eps),
        k_direct: grid_point(j_direct),
        samples,
    })
}

/// One inequality of the chain bounding `ψ(x̂)` from below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainLink {
    pub label: String,
    pub value: LogLogValue,
    pub rendered: String,
    /// The previous link is at least this one.
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessReport {
    pub h: LogLogValue,
    pub eps: f64,
    pub gamma: f64,
    pub gamma_exceeds_one: bool,
    pub k: f64,
    pub k_exceeds_one: bool,
    /// `log H` residual of `∫_0^{1/2} e^{e^{K+s/2}} ds = H`.
    pub k_equation_residual: f64,
    /// `½e^{e^K} ≤ H ≤ e^{e^{K+1/4}}` checked at log-log level.
    pub k_bracket_ok: bool,
    pub m: LogLogValue,
    pub double_exp_slack_at_k: f64,
    pub k_hat: f64,
    pub r_hat: f64,
    pub r: f64,
    /// `R ≥ R̂(ε)`: the reduced inequality `ε e^{R−(1+ε)t} ≥ 4` holds on `[1/4, 1/2]`.
    pub barrier_admissible: bool,
    /// Minimum over `[1/4, 1/2]` of `G''/|G'| − log|G'| − 4`.
    pub g_inequality_min_slack: f64,
    /// Largest relative mismatch of `F'' = ½ log(F')F'` on a mesh, by finite differences.
    pub f_equation_residual: f64,
    /// `M ≤ e^{e^{R−(1+ε)/4}}`.
    pub m_below_barrier_peak: bool,
    pub u_at_xhat: LogLogValue,
    pub psi_at_xhat: LogLogValue,
    pub chain: Vec<ChainLink>,
    /// `ψ(x̂) ≥ H^γ/16`.
    pub psi_lower_bound_holds: bool,
    /// `H^{γ−1}`.
    pub ratio_lower_bound: LogLogValue,
    /// `ψ(x̂)/u(x̂)`.
    pub measured_ratio: LogLogValue,
    /// Smallest `H` at which the construction's hypotheses all hold.
    pub h_min_estimate: Option<LogLogValue>,
    pub k_min_estimate: Option<f64>,
}

impl SharpnessReport {
    /// All hypotheses of the construction hold at this `H`.
    pub fn construction_valid(&self) -> bool {
        self.gamma_exceeds_one
            && self.k_exceeds_one
            && self.barrier_admissible
            && self.double_exp_slack_at_k > 0.0
            && self.m_below_barrier_peak
            && self.chain.iter().all(|c| c.holds)
    }
}

/// `K` with `∫_0^{1/2} e^{e^{K+s/2}} ds = H` (given as `log H`).
fn solve_k(ln_h: f64) -> Result<f64> {
    let f = |k: f64| Ok(upper_integral(k, 0.0, 0.5)?.ln() - ln_h);
    let hi = (ln_h.max(1.0) + 10.0).ln() + 1.0;
    bisect(f, -10.0, hi, 1e-14)
}

/// `R` with `∫_{1/4}^{1/2} e^{e^{R−(1+ε)s}} ds = M` (given as `log M`).
fn solve_r(ln_m: f64, eps: f64) -> Result<f64> {
    let f = |r: f64| Ok(lower_integral(r, eps, 0.25, 0.5)?.ln() - ln_m);
    let centre = ln_m.max(1.0).ln() + (1.0 + eps) / 4.0;
    let (mut lo, mut hi) = (centre - 2.0, centre + 3.0);
    while f(lo)? > 0.0 {
        lo -= 2.0;
    }
    while f(hi)? < 0.0 {
        hi += 2.0;
    }
    bisect(f, lo, hi, 1e-14)
}

/// `R̂(ε)`: least `R` on a `10⁻⁶` grid with `ε e^{R−(1+ε)/2} ≥ 4`.
pub fn r_hat(eps: f64) -> f64 {
    let exact = (4.0 / eps).ln() + (1.0 + eps) / 2.0;
    let mut r = (exact * 1e6).ceil() / 1e6;
    while eps * (r - (1.0 + eps) / 2.0).exp() < 4.0 {
        r += 1e-6;
    }
    r
}

/// Hypotheses at a given `K`: the double-exponential inequality, `R ≥ R̂` and `M ≤ e^{e^{R−(1+ε)/4}}`.
/// `M ≤ e^{e^{R−(1+ε)/4}}`, compared at log-log level. The margin is about
/// `R e^{−R}` relative, so a few ulps of slack absorb round-off for large `K`.
fn below_peak(m: &DoubleExpIntegral, r: f64, eps: f64) -> bool {
    let lhs = m.lnln_bracket().1;
    let rhs = r - (1.0 + eps) / 4.0;
    lhs <= rhs + 1e-13 * rhs.abs().max(1.0)
}

fn hypotheses_at(k: f64, eps: f64) -> Result<bool> {
    let m = upper_integral(k, 0.0, 1.0)?;
    let r = solve_r(m.ln(), eps)?;
    let peak_ok = below_peak(&m, r, eps);
    Ok(double_exp_slack(k, eps)? > 0.0 && r >= r_hat(eps) && peak_ok)
}

pub fn sharpness_example(h: f64, eps: f64) -> Result<SharpnessReport> {
    check_eps(eps)?;
    if !(h >= H_FLOOR && h.is_finite()) {
        return Err(Error::Precondition(format!("H must be at least {H_FLOOR:e}, got {h}")));
    }
    let ln_h = h.ln();
    let gamma = (1.0 / 16.0 - 2.0 * eps).exp();
    let k = solve_k(ln_h)?;
    let hk = upper_integral(k, 0.0, 0.5)?;
    let k_equation_residual = (hk.ln() - ln_h).abs();
    let lnln_h = ln_h.ln();
    let k_bracket_ok = lnln_h <= k + 0.25 && (0.5f64.ln() + k.exp()) <= ln_h;
    let m_int = upper_integral(k, 0.0, 1.0)?;
    let ln_m = m_int.ln();
    let lemma_slack = double_exp_slack(k, eps)?;
    let k_hat = lemma61_check(eps)?.k_hat;
    let rh = r_hat(eps);
    let r = solve_r(ln_m, eps)?;
    let barrier_admissible = r >= rh;
    let m_below_barrier_peak = below_peak(&m_int, r, eps);

    // G'' ≥ log|G'|·|G'| + 4|G'| divided by |G'|, on a mesh of [1/4, 1/2].
    let n = 1025;
    let g_inequality_min_slack = (0..n)
        .map(|i| {
            let t = 0.25 + 0.25 * i as f64 / (n - 1) as f64;
            let e = (r - (1.0 + eps) * t).exp();
            (1.0 + eps) * e - e - 4.0
        })
        .fold(f64::INFINITY, f64::min);
    // F' = e^{e^{K+t/2}}: compare d/dt log F' (finite differences) with ½ log F'.
    let d = 1e-4;
    let f_equation_residual = (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            let log_fp = |s: f64| (k + s / 2.0).exp();
            let fd = (log_fp(t + d) - log_fp(t - d)) / (2.0 * d);
            (fd - 0.5 * log_fp(t)).abs() / (0.5 * log_fp(t))
        })
        .fold(0.0, f64::max);

    let psi = lower_integral(r, eps, 0.375, 0.5)?;
    let part = lower_integral(r, eps, 0.375, 0.4375)?;
    let ln16 = 16f64.ln();
    let shrink = -3.0 / 16.0 - eps;
    let links: Vec<(String, f64, f64)> = vec![
        ("psi(x_hat) = int_{3/8}^{1/2} e^{e^{R-(1+eps)s}} ds".into(), psi.ln_bracket().0, psi.ln_bracket().1),
        ("int_{3/8}^{7/16} e^{e^{R-(1+eps)s}} ds".into(), part.ln_bracket().0, part.ln_bracket().1),
        ("(1/16) e^{e^{R-7(1+eps)/16}}".into(), (r - 7.0 * (1.0 + eps) / 16.0).exp() - ln16, f64::NAN),
        ("(1/16) (e^{e^{R-(1+eps)/4}})^{e^{-3/16-eps}}".into(), (r - (1.0 + eps) / 4.0 + shrink).exp() - ln16, f64::NAN),
        ("(1/16) (e^{e^{K+1/2-eps}})^{e^{-3/16-eps}}".into(), (k + 0.5 - eps + shrink).exp() - ln16, f64::NAN),
        ("(1/16) H^gamma".into(), gamma * ln_h - ln16, f64::NAN),
    ];
    let mut chain = Vec::new();
    for (i, (label, lo, hi)) in links.iter().enumerate() {
        let holds = if i == 0 {
            true
        } else {
            let prev_lo = links[i - 1].1;
            let cur_hi = if hi.is_nan() { *lo } else { *hi };
            prev_lo >= cur_hi
        };
        let value = LogLogValue::from_ln(*lo);
        chain.push(ChainLink { label: label.clone(), value, rendered: value.render(), holds });
    }
    let psi_lower_bound_holds = psi.ln_bracket().0 >= gamma * ln_h - ln16;

    let k_min = least_grid(|kk| hypotheses_at(kk, eps))?.map(grid_point);
    let h_min_estimate = match k_min {
        Some(km) => Some(upper_integral(km, 0.0, 0.5)?.value()),
        None => None,
    };

    Ok(SharpnessReport {
        h: LogLogValue::from_ln(ln_h),
        eps,
        gamma,
        gamma_exceeds_one: gamma > 1.0,
        k,
        k_exceeds_one: k > 1.0,
        k_equation_residual,
        k_bracket_ok,
        m: m_int.value(),
        double_exp_slack_at_k: lemma_slack,
        k_hat,
        r_hat: rh,
        r,
        barrier_admissible,
        g_inequality_min_slack,
        f_equation_residual,
        m_below_barrier_peak,
        u_at_xhat: LogLogValue::from_ln((2.0 * h * 0.5).ln()),
        psi_at_xhat: psi.value(),
        chain,
        psi_lower_bound_holds,
        ratio_lower_bound: LogLogValue::from_ln((gamma - 1.0) * ln_h),
        measured_ratio: LogLogValue::from_ln(psi.ln() - ln_h),
        h_min_estimate,
        k_min_estimate: k_min,
    })
}
