//! Overflow-safe representation of double-exponential magnitudes.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogLevel {
    /// The payload is `x`.
    Plain,
    /// The payload is `log x`.
    SingleLog,
    /// The payload is `log log x`.
    DoubleLog,
}

/// A positive magnitude `x` stored as `x`, `log x` or `log log x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogValue {
    pub level: LogLevel,
    pub payload: f64,
}

impl LogLogValue {
    pub fn plain(x: f64) -> Self {
        LogLogValue { level: LogLevel::Plain, payload: x }
    }

    pub fn from_ln(l: f64) -> Self {
        LogLogValue { level: LogLevel::SingleLog, payload: l }
    }

    pub fn from_lnln(ll: f64) -> Self {
        LogLogValue { level: LogLevel::DoubleLog, payload: ll }
    }

    /// `e^{e^a}`.
    pub fn double_exp(a: f64) -> Self {
        Self::from_lnln(a)
    }

    /// `log x`, `None` when `x ≤ 0` or the logarithm overflows.
    pub fn ln(&self) -> Option<f64> {
        let v = match self.level {
            LogLevel::Plain => {
                if self.payload > 0.0 {
                    self.payload.ln()
                } else {
                    return None;
                }
            }
            LogLevel::SingleLog => self.payload,
            LogLevel::DoubleLog => self.payload.exp(),
        };
        v.is_finite().then_some(v)
    }

    /// `log log x`, `None` unless `x > 1`.
    pub fn lnln(&self) -> Option<f64> {
        match self.level {
            LogLevel::DoubleLog => Some(self.payload),
            LogLevel::SingleLog => (self.payload > 0.0).then(|| self.payload.ln()),
            LogLevel::Plain => (self.payload > 1.0).then(|| self.payload.ln().ln()),
        }
    }

    /// Decimal value when it fits in a double.
    pub fn to_f64(&self) -> Option<f64> {
        let v = match self.level {
            LogLevel::Plain => self.payload,
            LogLevel::SingleLog => self.payload.exp(),
            LogLevel::DoubleLog => self.payload.exp().exp(),
        };
        (v.is_finite() && v > 0.0).then_some(v)
    }

    /// Moves one level down if this loses nothing to overflow.
    pub fn lower(&self) -> Result<Self> {
        let v = match self.level {
            LogLevel::Plain => return Err(Error::Numerical("plain values cannot be lowered".into())),
            LogLevel::SingleLog => LogLogValue::plain(self.payload.exp()),
            LogLevel::DoubleLog => LogLogValue::from_ln(self.payload.exp()),
        };
        if v.payload.is_finite() {
            Ok(v)
        } else {
            Err(Error::Numerical(format!("{self:?} overflows one level down")))
        }
    }

    /// `x^p` for `p > 0`.
    pub fn powf(&self, p: f64) -> Self {
        match self.level {
            LogLevel::DoubleLog => LogLogValue::from_lnln(self.payload + p.ln()),
            _ => LogLogValue::from_ln(self.ln().unwrap_or(f64::NEG_INFINITY) * p),
        }
    }

    /// `x·y`, carried at single-log level (or double-log if that overflows).
    pub fn mul(&self, other: &Self) -> Self {
        match (self.ln(), other.ln()) {
            (Some(a), Some(b)) => LogLogValue::from_ln(a + b),
            _ => {
                // One factor is beyond e^{f64::MAX}: the smaller one is negligible
                // at double-log resolution unless it is tiny.
                let (a, b) = (self.lnln().unwrap_or(f64::NEG_INFINITY), other.lnln().unwrap_or(f64::NEG_INFINITY));
                LogLogValue::from_lnln(a.max(b))
            }
        }
    }

    /// Compares the represented magnitudes.
    pub fn compare(&self, other: &Self) -> Ordering {
        if let (Some(a), Some(b)) = (self.lnln(), other.lnln()) {
            if self.level == LogLevel::DoubleLog || other.level == LogLevel::DoubleLog {
                return a.total_cmp(&b);
            }
        }
        match (self.ln(), other.ln()) {
            (Some(a), Some(b)) => a.total_cmp(&b),
            (None, Some(_)) => {
                if self.level == LogLevel::DoubleLog {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
            (Some(_), None) => other.compare(self).reverse(),
            (None, None) => self.payload.total_cmp(&other.payload),
        }
    }

    /// Human-readable rendering: the decimal when representable, else `exp(exp(·))`.
    pub fn render(&self) -> String {
        if let Some(v) = self.to_f64() {
            format!("{v:.6e}")
        } else if let Some(l) = self.ln().filter(|l| *l > 0.0) {
            format!("exp({l:.6e})")
        } else {
            match self.level {
                LogLevel::DoubleLog => format!("exp(exp({:.6e}))", self.payload),
                _ => format!("{:.6e}", self.payload),
            }
        }
    }
}

/// `∫_{s0}^{s1} e^{e^{a+βs}} ds` as `log I = e^{top} + corr`, where `top` is
/// the largest exponent `a + βs` on the interval.
///
/// With `E(s) = e^{a+βs}` and `w = E_max − E`, the integral equals
/// `e^{E_max}/|β| · ∫_0^{W} e^{−w}/(E_max − w) dw`. On each of the pieces
/// covering `w ∈ [0, min(W, T)]` the factor `e^{−w}` is integrated exactly
/// and `1/(E_max − w)` is bounded by its endpoint values, which gives a
/// rigorous two-sided bracket; the rest (`w > T`) is bounded by
/// `e^{−T}/E_min`. A 3-point Gauss rule on the same pieces gives the estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleExpIntegral {
    pub top: f64,
    pub corr: f64,
    pub corr_lo: f64,
    pub corr_hi: f64,
}

/// Window beyond which the integrand is below `e^{−T}` of its peak.
const WINDOW: f64 = 60.0;
const PIECES: usize = 20_000;

impl DoubleExpIntegral {
    fn ln_from(&self, c: f64) -> f64 {
        self.top.exp() + c
    }

    /// `log I` (may overflow to `inf` for enormous `top`).
    pub fn ln(&self) -> f64 {
        self.ln_from(self.corr)
    }

    pub fn ln_bracket(&self) -> (f64, f64) {
        (self.ln_from(self.corr_lo), self.ln_from(self.corr_hi))
    }

    fn lnln_from(&self, c: f64) -> f64 {
        // log(e^{top} + c) = top + log1p(c·e^{−top}); requires I > e.
        self.top + (c * (-self.top).exp()).ln_1p()
    }

    /// `log log I`, accurate even when `log I` overflows.
    pub fn lnln(&self) -> f64 {
        self.lnln_from(self.corr)
    }

    pub fn lnln_bracket(&self) -> (f64, f64) {
        (self.lnln_from(self.corr_lo), self.lnln_from(self.corr_hi))
    }

    pub fn value(&self) -> LogLogValue {
        let l = self.ln();
        if l.is_finite() {
            LogLogValue::from_ln(l)
        } else {
            LogLogValue::from_lnln(self.lnln())
        }
    }

    pub fn lower_value(&self) -> LogLogValue {
        let l = self.ln_bracket().0;
        if l.is_finite() {
            LogLogValue::from_ln(l)
        } else {
            LogLogValue::from_lnln(self.lnln_bracket().0)
        }
    }

    pub fn upper_value(&self) -> LogLogValue {
        let l = self.ln_bracket().1;
        if l.is_finite() {
            LogLogValue::from_ln(l)
        } else {
            LogLogValue::from_lnln(self.lnln_bracket().1)
        }
    }
}

/// See [`DoubleExpIntegral`]. Requires `s0 < s1`, `β ≠ 0` and `a + βs` below ~709.
pub fn double_exp_integral(a: f64, beta: f64, s0: f64, s1: f64) -> Result<DoubleExpIntegral> {
    if !(s1 > s0) || beta == 0.0 || !a.is_finite() || !beta.is_finite() {
        return Err(Error::Argument(format!("double-exponential integral needs s0 < s1 and β ≠ 0, got [{s0}, {s1}], β = {beta}")));
    }
    let (top, bottom) = if beta > 0.0 { (a + beta * s1, a + beta * s0) } else { (a + beta * s0, a + beta * s1) };
    let e_max = top.exp();
    let e_min = bottom.exp();
    if !e_max.is_finite() {
        return Err(Error::Numerical(format!("exponent e^{top} overflows")));
    }
    let w_total = e_max - e_min;
    let span = w_total.min(WINDOW);
    let d = span / PIECES as f64;
    let (mut est, mut lo, mut hi) = (0.0f64, 0.0f64, 0.0f64);
    // Gauss–Legendre 3-point nodes on [0, 1].
    let gx = [0.5 - 0.5 * (0.6f64).sqrt(), 0.5, 0.5 + 0.5 * (0.6f64).sqrt()];
    let gw = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];
    for i in 0..PIECES {
        let w0 = i as f64 * d;
        let w1 = if i + 1 == PIECES { span } else { (i + 1) as f64 * d };
        let mass = (-w0).exp() * (-(w1 - w0)).exp_m1().abs();
        let (b0, b1) = ((e_max - w0).max(e_min), (e_max - w1).max(e_min));
        lo += mass / b0;
        hi += mass / b1;
        for k in 0..3 {
            let w = w0 + gx[k] * (w1 - w0);
            est += gw[k] * (w1 - w0) * (-w).exp() / (e_max - w).max(e_min);
        }
    }
    if w_total > WINDOW {
        let tail = ((-WINDOW).exp() - (-w_total).exp()) / e_min;
        hi += tail;
        // Gauss estimate of the tail is dominated by its bound; add its midpoint.
        est += 0.5 * tail;
    }
    let lb = beta.abs().ln();
    Ok(DoubleExpIntegral { top, corr: est.ln() - lb, corr_lo: lo.ln() - lb, corr_hi: hi.ln() - lb })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::quadrature::{integrate, Tolerance};

    #[test]
    fn matches_direct_quadrature_for_moderate_exponents() {
        for &(a, beta, s0, s1) in &[(1.0, 0.5, 0.0, 1.0), (2.0, -1.03, 0.25, 0.5), (0.3, 2.0, -1.0, 0.7)] {
            let direct = integrate(|s: f64| Ok((a + beta * s).exp().exp()), s0, s1, &Tolerance::new(0.0, 1e-13)).unwrap().value;
            let r = double_exp_integral(a, beta, s0, s1).unwrap();
            assert!((r.ln() - direct.ln()).abs() < 1e-11, "{a} {beta}: {} vs {}", r.ln(), direct.ln());
            let (l, h) = r.ln_bracket();
            assert!(l <= direct.ln() + 1e-13 && direct.ln() <= h + 1e-13);
        }
    }

    #[test]
    fn huge_exponents_stay_finite_at_double_log_level() {
        let r = double_exp_integral(800.0, 0.5, 0.0, 1.0).unwrap_err();
        assert!(matches!(r, Error::Numerical(_)));
        let r = double_exp_integral(200.0, 0.5, 0.0, 1.0).unwrap();
        // log I ≈ e^{200.5} − log(e^{200.5}/2): the correction is invisible at double-log level.
        assert!((r.lnln() - 200.5).abs() < 1e-12);
        assert!(r.corr < 0.0);
    }

    #[test]
    fn ordering_of_double_log_payloads() {
        let a = LogLogValue::from_lnln(800.0);
        let b = LogLogValue::from_lnln(799.0);
        assert_eq!(a.compare(&b), Ordering::Greater);
        assert_eq!(LogLogValue::plain(10.0).compare(&LogLogValue::from_ln(2.0)), Ordering::Greater);
        assert_eq!(LogLogValue::from_ln(2000.0).compare(&LogLogValue::plain(1e300)), Ordering::Greater);
        assert_eq!(LogLogValue::from_lnln(3.0).powf(2.0).lnln().unwrap(), 3.0 + 2f64.ln());
    }
}
