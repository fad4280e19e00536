//! Generalized Harnack/Carleson integral functionals, their inversion and
//! the closed-form bounds for the variable-exponent Laplacian.

use crate::error::{Error, Result};
use crate::nonlinearity::{verdict_from_increments, Nonlinearity, OsgoodVerdict, RescaledNonlinearity};
use crate::numeric::quadrature::{integrate_log, Tolerance};
use crate::numeric::roots::rtsafe;
use crate::numeric::Extended;
use serde::{Deserialize, Serialize};

/// Outcome of a Harnack-type verification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnackCertificate {
    pub m: f64,
    #[serde(rename = "M")]
    pub big_m: Extended,
    pub r: f64,
    #[serde(rename = "R")]
    pub scale: f64,
    pub alpha: f64,
    pub value: Extended,
    pub budget: Option<f64>,
    pub passed: Option<bool>,
}

impl HarnackCertificate {
    /// Attaches a budget `C` and records whether `value ≤ C`.
    pub fn with_budget(mut self, c: f64) -> Self {
        self.budget = Some(c);
        self.passed = Some(self.value.le(c));
        self
    }
}

fn tolerance() -> Tolerance {
    Tolerance::new(1e-12, 1e-12)
}

fn check_interval(m: f64, big_m: f64) -> Result<()> {
    if !(m >= 0.0) || !big_m.is_finite() {
        return Err(Error::Argument(format!(
            "need 0 <= m <= M < inf, got m = {m}, M = {big_m}"
        )));
    }
    if m > big_m {
        return Err(Error::Argument(format!("m = {m} exceeds M = {big_m}")));
    }
    Ok(())
}

/// `∫_m^M w(t) dt` for a positive weight that may be singular at 0.
///
/// With `m = 0` the integral over `(0, M]` is accumulated over decades
/// `M·10^{-2k}`; a divergent tail yields the `+∞` sentinel.
fn integrate_weight<F>(w: F, m: f64, big_m: f64) -> Result<Extended>
where
    F: Fn(f64) -> Result<f64>,
{
    if m == big_m {
        return Ok(Extended::Finite(0.0));
    }
    if m > 0.0 {
        return Ok(Extended::Finite(integrate_log(&w, m, big_m, &tolerance())?.value));
    }
    let mut increments = Vec::new();
    let mut upper = big_m;
    for k in 1..=8 {
        let lower = big_m * 10f64.powi(-2 * k);
        increments.push(integrate_log(&w, lower, upper, &tolerance())?.value);
        upper = lower;
    }
    let total: f64 = increments.iter().sum();
    match verdict_from_increments(&increments, total) {
        OsgoodVerdict::Converges { limit_estimate } => Ok(Extended::Finite(limit_estimate)),
        OsgoodVerdict::Diverges => {
            log::warn!("integral from 0 diverges (integrand not integrable at 0)");
            Ok(Extended::Infinite)
        }
        OsgoodVerdict::Indeterminate { reason } => Err(Error::Numerical(format!(
            "cannot decide integrability at 0: {reason}"
        ))),
    }
}

/// `∫_m^M dt/(ρ²φ(t/ρ) + t)`.
pub fn harnack_integral_original(m: f64, big_m: f64, rho: f64, nl: &Nonlinearity) -> Result<Extended> {
    check_interval(m, big_m)?;
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::Argument(format!("radius must lie in (0, 1], got {rho}")));
    }
    integrate_weight(
        |t| Ok(1.0 / (rho * rho * nl.phi(t / rho)? + t)),
        m,
        big_m,
    )
}

/// `∫_m^M dt/(r^α Φ_R(t) + t)`.
pub fn harnack_integral_rescaled(
    m: f64,
    big_m: f64,
    r: f64,
    scale: f64,
    alpha: f64,
    nl: &Nonlinearity,
) -> Result<Extended> {
    check_interval(m, big_m)?;
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::Argument(format!("radius must lie in (0, 1], got {r}")));
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::Argument(format!("alpha must lie in [0, 1), got {alpha}")));
    }
    let rnl = RescaledNonlinearity::new(nl.clone(), scale)?;
    let ra = r.powf(alpha);
    integrate_weight(|t| Ok(1.0 / (ra * rnl.phi(t)? + t)), m, big_m)
}

/// Builds a certificate for the rescaled functional.
pub fn rescaled_certificate(
    m: f64,
    big_m: f64,
    r: f64,
    scale: f64,
    alpha: f64,
    nl: &Nonlinearity,
) -> Result<HarnackCertificate> {
    let value = harnack_integral_rescaled(m, big_m, r, scale, alpha, nl)?;
    Ok(HarnackCertificate {
        m,
        big_m: Extended::Finite(big_m),
        r,
        scale,
        alpha,
        value,
        budget: None,
        passed: None,
    })
}

/// Discrepancy between the two sides of the rescaling identity
/// `∫_{Rm}^{RM} ds/(ρ²φ(s/ρ)+s) = ∫_m^M dt/(Rr²φ(t/r)+t)`, `ρ = rR`.
pub fn scaling_identity_residual(m: f64, big_m: f64, r: f64, scale: f64, nl: &Nonlinearity) -> Result<f64> {
    check_interval(m, big_m)?;
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(Error::Argument(format!("scale R must lie in (0, 1], got {scale}")));
    }
    let rho = r * scale;
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::Argument(format!("rho = rR must lie in (0, 1], got {rho}")));
    }
    if m == 0.0 {
        return Err(Error::Argument("scaling identity is evaluated for m > 0".into()));
    }
    let lhs = harnack_integral_original(scale * m, scale * big_m, rho, nl)?;
    let rhs = integrate_weight(
        |t| Ok(1.0 / (scale * r * r * nl.phi(t / r)? + t)),
        m,
        big_m,
    )?;
    match (lhs, rhs) {
        (Extended::Finite(a), Extended::Finite(b)) => Ok((a - b).abs()),
        _ => Err(Error::Numerical("scaling identity sides are not finite".into())),
    }
}

/// Solves `∫_a^M dt/(R²φ(t/R) + t) = budget` for `M ≥ a`.
///
/// Returns the `+∞` sentinel when the integral to infinity converges to a
/// value below the budget.
pub fn invert_upper(a: f64, budget: f64, scale: f64, nl: &Nonlinearity) -> Result<Extended> {
    if !(budget >= 0.0) || !budget.is_finite() {
        return Err(Error::Argument(format!("budget must be a finite non-negative number, got {budget}")));
    }
    if !(a >= 0.0 && a.is_finite()) {
        return Err(Error::Argument(format!("lower limit must be non-negative, got {a}")));
    }
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(Error::Argument(format!("scale R must lie in (0, 1], got {scale}")));
    }
    if budget == 0.0 {
        return Ok(Extended::Finite(a));
    }
    let w = |t: f64| -> Result<f64> { Ok(1.0 / (scale * scale * nl.phi(t / scale)? + t)) };

    // Start of the log-doubling search.
    let (base, mut acc) = if a > 0.0 {
        (a, 0.0)
    } else {
        match integrate_weight(w, 0.0, 1.0)? {
            Extended::Finite(v) if v >= budget => {
                // Root inside (0, 1]: search in log(M) below 1.
                return invert_in_log(&w, 0.0, 1e-300, 1.0, budget, true);
            }
            Extended::Finite(v) => (1.0, v),
            Extended::Infinite => {
                return Err(Error::Precondition(
                    "the integral from 0 diverges, so no finite upper limit matches a positive budget".into(),
                ))
            }
        }
    };
    let mut lo = base;
    let mut width = std::f64::consts::LN_2;
    loop {
        let hi_log = base.ln() + width;
        if hi_log > 700.0 {
            return Err(Error::Numerical(format!(
                "upper limit exceeds double range before the integral reached {budget} (value {acc})"
            )));
        }
        let hi = hi_log.exp();
        let inc = integrate_log(w, lo, hi, &tolerance())?.value;
        if acc + inc >= budget {
            return invert_in_log(&w, acc, lo, hi, budget, false);
        }
        acc += inc;
        if inc < 1e-12 {
            return Ok(Extended::Infinite);
        }
        lo = hi;
        width *= 2.0;
    }
}

/// Root of `acc + ∫_lo^M w = budget` in `s = log M` on `[lo, hi]`.
fn invert_in_log<F>(w: &F, acc: f64, lo: f64, hi: f64, budget: f64, from_zero: bool) -> Result<Extended>
where
    F: Fn(f64) -> Result<f64>,
{
    let target = budget - acc;
    let (slo, shi) = (lo.ln(), hi.ln());
    let s = rtsafe(
        |s| {
            let m = s.exp();
            let v = if from_zero {
                integrate_weight(w, 0.0, m)?.expect_finite("bounded integral")
            } else {
                integrate_log(w, lo, m, &tolerance())?.value
            };
            Ok((v - target, w(m)? * m))
        },
        slo,
        shi,
        1e-15,
    )?;
    Ok(Extended::Finite(s.exp()))
}

fn check_constant(u_a: f64, c: f64) -> Result<()> {
    if !(u_a >= 0.0 && u_a.is_finite()) {
        return Err(Error::Argument(format!("u(A) must be finite and non-negative, got {u_a}")));
    }
    if !(c >= 1.0) {
        return Err(Error::Argument(format!("constant C must be at least 1, got {c}")));
    }
    Ok(())
}

/// `C·max{u(A)^{1+CR}, u(A)^{1/(1+CR)}}`.
pub fn px_carleson_bound(u_a: f64, scale: f64, c: f64) -> Result<f64> {
    check_constant(u_a, c)?;
    if !(scale >= 0.0) {
        return Err(Error::Argument(format!("scale must be non-negative, got {scale}")));
    }
    let e = 1.0 + c * scale;
    Ok(c * u_a.powf(e).max(u_a.powf(1.0 / e)))
}

/// `C·max{u(A)^{CR}, u(A)^{-CR}}`.
pub fn px_bharnack_bound(u_a: f64, scale: f64, c: f64) -> Result<f64> {
    check_constant(u_a, c)?;
    if !(scale >= 0.0) {
        return Err(Error::Argument(format!("scale must be non-negative, got {scale}")));
    }
    let e = c * scale;
    if u_a == 0.0 && e > 0.0 {
        return Err(Error::Argument("u(A) = 0 makes the negative-power branch infinite".into()));
    }
    Ok(c * u_a.powf(e).max(u_a.powf(-e)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn fin(x: Extended) -> f64 {
        x.expect_finite("test")
    }

    #[test]
    fn homogeneous_reduces_to_log() {
        let h = Nonlinearity::homogeneous();
        for rho in [1.0, 0.5, 0.01] {
            let v = fin(harnack_integral_original(1.0, E, rho, &h).unwrap());
            assert!((v - 1.0).abs() < 1e-12);
        }
        assert_eq!(fin(harnack_integral_original(2.0, 2.0, 0.3, &h).unwrap()), 0.0);
    }

    #[test]
    fn inverted_interval_is_rejected() {
        assert!(matches!(
            harnack_integral_original(2.0, 1.0, 1.0, &Nonlinearity::homogeneous()),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn linear_rescaled_closed_form() {
        let lin = Nonlinearity::linear(1.0).unwrap();
        for r_scale in [1.0, 0.5, 0.1] {
            let v = fin(harnack_integral_rescaled(1.0, E * E, 1.0, r_scale, 0.0, &lin).unwrap());
            assert!((v - 2.0 / (r_scale + 2.0)).abs() < 1e-12);
        }
        let h = Nonlinearity::homogeneous();
        let v = fin(harnack_integral_rescaled(1.0, E, 1.0, 0.7, 0.3, &h).unwrap());
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn divergence_at_zero_gives_sentinel() {
        let h = Nonlinearity::homogeneous();
        assert!(harnack_integral_original(0.0, 1.0, 1.0, &h).unwrap().is_infinite());
    }

    #[test]
    fn integrable_singularity_at_zero() {
        let ts = crate::numeric::log_grid(1e-20, 1e4, 481);
        let nl = Nonlinearity::tabulated(
            crate::nonlinearity::PhiTable::sample(&ts, |t| t.sqrt().max(t)).unwrap(),
            1.0,
        )
        .unwrap();
        // ∫_0^1 dt/(√t + t) = 2 log 2.
        let v = fin(harnack_integral_original(0.0, 1.0, 1.0, &nl).unwrap());
        assert!((v - 2.0 * 2f64.ln()).abs() < 1e-6, "{v}");
    }

    #[test]
    fn invert_homogeneous_and_log_model() {
        let h = Nonlinearity::homogeneous();
        assert!((fin(invert_upper(1.0, 1.0, 0.4, &h).unwrap()) - E).abs() < 1e-12);
        assert_eq!(fin(invert_upper(1.0, 0.0, 1.0, &h).unwrap()), 1.0);
        let lm = Nonlinearity::log_model(1.0).unwrap();
        let m = fin(invert_upper(1.0, 5.0, 1.0, &lm).unwrap());
        let expect_log = 2.0 * 5f64.exp() - 2.0;
        assert!((m.ln() - expect_log).abs() < 1e-9 * expect_log, "{}", m.ln());
    }

    #[test]
    fn invert_returns_sentinel_for_non_osgood_infinity() {
        let ts = crate::numeric::log_grid(1e-3, 1e150, 1531);
        let nl = Nonlinearity::tabulated(
            crate::nonlinearity::PhiTable::sample(&ts, |t| t * t.max(1.0)).unwrap(),
            1.0,
        )
        .unwrap();
        // ∫_1^∞ dt/(t² + t) = log 2 < 1.
        assert!(invert_upper(1.0, 1.0, 1.0, &nl).unwrap().is_infinite());
        assert!(invert_upper(1.0, -1.0, 1.0, &nl).is_err());
    }

    #[test]
    fn px_bounds() {
        assert_eq!(px_carleson_bound(1.0, 0.3, 2.0).unwrap(), 2.0);
        assert_eq!(px_carleson_bound(4.0, 0.0, 3.0).unwrap(), 12.0);
        assert!((px_carleson_bound(0.25, 0.5, 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(px_bharnack_bound(1.0, 0.2, 3.0).unwrap(), 3.0);
        assert!((px_bharnack_bound(10.0, 0.1, 1.0).unwrap() - 10f64.powf(0.1)).abs() < 1e-14);
        assert!((px_bharnack_bound(0.1, 0.1, 1.0).unwrap() - 10f64.powf(0.1)).abs() < 1e-14);
    }
}
