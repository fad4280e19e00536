//! Bracketing root finders for monotone scalar maps.

use crate::error::{Error, Result};

/// Bisection on `[lo, hi]` for a sign change of `f`.
///
/// Terminates when the bracket is narrower than `xtol·max(1, |x|)` or after
/// 400 halvings (enough to exhaust double precision).
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Bracket(format!(
            "no sign change on [{lo}, {hi}]: f(lo) = {flo}, f(hi) = {fhi}"
        )));
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) <= xtol * mid.abs().max(1.0) || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Newton's method safeguarded by a bisection bracket.
///
/// `fdf` returns `(f(x), f'(x))`. A Newton step that leaves the bracket or
/// fails to halve the previous step is replaced by a bisection step.
pub fn rtsafe<F>(mut fdf: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let (flo, _) = fdf(lo)?;
    let (fhi, _) = fdf(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Bracket(format!(
            "no sign change on [{lo}, {hi}]: f(lo) = {flo}, f(hi) = {fhi}"
        )));
    }
    // Orient so that f(lo) < 0.
    if flo > 0.0 {
        std::mem::swap(&mut lo, &mut hi);
    }
    let mut x = 0.5 * (lo + hi);
    let mut dx_old = (hi - lo).abs();
    let mut dx = dx_old;
    let (mut fx, mut dfx) = fdf(x)?;
    for _ in 0..200 {
        let newton_leaves = ((x - hi) * dfx - fx) * ((x - lo) * dfx - fx) > 0.0;
        let slow = (2.0 * fx).abs() > (dx_old * dfx).abs();
        dx_old = dx;
        if newton_leaves || slow || dfx == 0.0 {
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        } else {
            dx = fx / dfx;
            x -= dx;
        }
        if dx.abs() <= xtol * x.abs().max(1.0) {
            return Ok(x);
        }
        let r = fdf(x)?;
        fx = r.0;
        dfx = r.1;
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| Ok(x * x - 2.0), 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn rtsafe_matches_bisect() {
        let r = rtsafe(|x| Ok((x.exp() - 3.0, x.exp())), -5.0, 5.0, 1e-15).unwrap();
        assert!((r - 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn missing_sign_change_is_reported() {
        assert!(matches!(
            bisect(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-12),
            Err(Error::Bracket(_))
        ));
    }
}
