//! Local monotone discretization of the extremal operators with drift.

use super::grid::{GridField, NEIGHBOURS};
use super::pucci::{EllipticityPair, PucciSign};
use crate::error::Result;

/// Weights of `tr(A·D²u)` on the 9-point stencil for one admissible `A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilWeights {
    pub wx: f64,
    pub wy: f64,
    pub wd: f64,
    /// `+1`: the mixed term uses the NE–SW diagonal, `−1`: NW–SE.
    pub diag: i8,
}

/// Number of stencil orientations swept.
pub const ORIENTATIONS: usize = 16;

/// Weights of the 2×2 symmetric `A`; negative axis weights are clipped to zero.
pub fn weights_of(a11: f64, a22: f64, a12: f64) -> (StencilWeights, bool) {
    let wx = a11 - a12.abs();
    let wy = a22 - a12.abs();
    let ok = wx >= -1e-14 && wy >= -1e-14;
    (
        StencilWeights { wx: wx.max(0.0), wy: wy.max(0.0), wd: a12.abs(), diag: if a12 >= 0.0 { 1 } else { -1 } },
        ok,
    )
}

/// Monotone matrices `R_θ diag(a₁, a₂) R_θᵀ`, `θ = kπ/16`, `a_i ∈ {λ, Λ}`,
/// keeping those whose 9-point stencil is non-negative; duplicates removed.
pub fn admissible_weights(ell: &EllipticityPair) -> Vec<StencilWeights> {
    let mut out: Vec<StencilWeights> = Vec::new();
    let vals = [ell.lambda, ell.big_lambda];
    for k in 0..ORIENTATIONS {
        let th = k as f64 * std::f64::consts::PI / ORIENTATIONS as f64;
        let (s, c) = th.sin_cos();
        for &a1 in &vals {
            for &a2 in &vals {
                let a11 = a1 * c * c + a2 * s * s;
                let a22 = a1 * s * s + a2 * c * c;
                let a12 = (a1 - a2) * c * s;
                let (w, ok) = weights_of(a11, a22, a12);
                let dup = out.iter().any(|o| {
                    (o.wx - w.wx).abs() < 1e-13
                        && (o.wy - w.wy).abs() < 1e-13
                        && (o.wd - w.wd).abs() < 1e-13
                        && (o.diag == w.diag || w.wd < 1e-13)
                });
                if ok && !dup {
                    out.push(w);
                }
            }
        }
    }
    out
}

/// Values at a node and its eight neighbours, ordered C, E, W, N, S, NE, SW, NW, SE.
pub type Patch = [f64; 9];

/// Reads the patch around interior node `k`.
pub fn patch(g: &GridField, u: &[f64], k: usize) -> Patch {
    let mut p = [u[k]; 9];
    for (slot, &(di, dj)) in NEIGHBOURS.iter().enumerate() {
        let n = g.neighbour(k, di, dj).expect("interior node has all neighbours");
        p[slot + 1] = u[n];
    }
    p
}

/// Lattice indices of the patch around `k`.
pub fn patch_indices(g: &GridField, k: usize) -> [usize; 9] {
    let mut p = [k; 9];
    for (slot, &(di, dj)) in NEIGHBOURS.iter().enumerate() {
        p[slot + 1] = g.neighbour(k, di, dj).expect("interior node has all neighbours");
    }
    p
}

/// `tr(A·D²u)` and its coefficients.
pub fn linear_part(w: &StencilWeights, p: &Patch, h: f64) -> (f64, Patch) {
    let h2 = h * h;
    let mut c = [0.0; 9];
    c[0] = -2.0 * (w.wx + w.wy + w.wd) / h2;
    c[1] = w.wx / h2;
    c[2] = w.wx / h2;
    c[3] = w.wy / h2;
    c[4] = w.wy / h2;
    if w.diag > 0 {
        c[5] = w.wd / h2;
        c[6] = w.wd / h2;
    } else {
        c[7] = w.wd / h2;
        c[8] = w.wd / h2;
    }
    let v = c.iter().zip(p).map(|(a, b)| a * b).sum();
    (v, c)
}

/// The drift function seen by the scheme: `t ↦ Φ(t)` and `Φ'(t)`.
pub trait DriftFn: Sync {
    fn value(&self, t: f64) -> Result<f64>;
    fn slope(&self, t: f64) -> Result<f64>;
    fn is_zero(&self) -> bool;
}

/// Gradient approximation chosen at a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientRule {
    Centered,
    Upwind,
}

/// `(|g|, ∂|g|/∂patch)` with the gradient floored at `eps`.
fn gradient(p: &Patch, h: f64, rule: GradientRule, sign: PucciSign, eps: f64) -> (f64, Patch) {
    let mut dgx = [0.0; 9];
    let mut dgy = [0.0; 9];
    let (gx, gy) = match rule {
        GradientRule::Centered => {
            dgx[1] = 0.5 / h;
            dgx[2] = -0.5 / h;
            dgy[3] = 0.5 / h;
            dgy[4] = -0.5 / h;
            ((p[1] - p[2]) * 0.5 / h, (p[3] - p[4]) * 0.5 / h)
        }
        GradientRule::Upwind => {
            // One-sided magnitudes that keep the drift monotone: increasing in
            // the centre value for the plus operator, decreasing for the minus one.
            let s = match sign {
                PucciSign::Plus => 1.0,
                PucciSign::Minus => -1.0,
            };
            let comp = |a: usize, b: usize, d: &mut Patch| -> f64 {
                let da = s * (p[0] - p[a]);
                let db = s * (p[0] - p[b]);
                let (m, idx) = if da >= db { (da, a) } else { (db, b) };
                if m > 0.0 {
                    d[0] = s / h;
                    d[idx] = -s / h;
                    m / h
                } else {
                    0.0
                }
            };
            (comp(1, 2, &mut dgx), comp(3, 4, &mut dgy))
        }
    };
    let n = gx.hypot(gy);
    if n <= eps {
        return (eps, [0.0; 9]);
    }
    let mut d = [0.0; 9];
    for i in 0..9 {
        d[i] = (gx * dgx[i] + gy * dgy[i]) / n;
    }
    (n, d)
}

/// Result of evaluating the scheme at one node.
#[derive(Debug, Clone, Copy)]
pub struct LocalEval {
    pub value: f64,
    pub coeffs: Patch,
    pub rule: GradientRule,
}

/// Discrete `P^±(D²u) ± Φ(|Du|)` (plus: `P⁺ + Φ`, minus: `P⁻ − Φ`) at one node,
/// with the derivative row for Newton's method.
pub fn evaluate(
    set: &[StencilWeights],
    p: &Patch,
    h: f64,
    sign: PucciSign,
    drift: &dyn DriftFn,
    eps: f64,
) -> Result<LocalEval> {
    // Extremal operator: P⁺ = max over A of −tr(A D²u), P⁻ = min.
    let mut best: Option<(f64, Patch, &StencilWeights)> = None;
    for w in set {
        let (v, c) = linear_part(w, p, h);
        let val = -v;
        let better = match (&best, sign) {
            (None, _) => true,
            (Some((b, _, _)), PucciSign::Plus) => val > *b,
            (Some((b, _, _)), PucciSign::Minus) => val < *b,
        };
        if better {
            best = Some((val, c, w));
        }
    }
    let (mut value, c, w) = best.expect("non-empty matrix set");
    let mut coeffs = [0.0; 9];
    for i in 0..9 {
        coeffs[i] = -c[i];
    }
    if drift.is_zero() {
        return Ok(LocalEval { value, coeffs, rule: GradientRule::Centered });
    }
    let ds = match sign {
        PucciSign::Plus => 1.0,
        PucciSign::Minus => -1.0,
    };
    let (gn, _) = gradient(p, h, GradientRule::Centered, sign, eps);
    let rule = if gn <= eps {
        GradientRule::Centered
    } else {
        let gx = (p[1] - p[2]) * 0.5 / h;
        let gy = (p[3] - p[4]) * 0.5 / h;
        let slope = drift.slope(gn)?;
        if slope.is_finite() && h * slope * gx.abs() / gn <= 2.0 * w.wx && h * slope * gy.abs() / gn <= 2.0 * w.wy {
            GradientRule::Centered
        } else {
            GradientRule::Upwind
        }
    };
    let (g, dg) = gradient(p, h, rule, sign, eps);
    let phi = drift.value(g)?;
    value += ds * phi;
    if g > eps {
        let sl = drift.slope(g)?;
        if sl.is_finite() {
            for i in 0..9 {
                coeffs[i] += ds * sl * dg[i];
            }
        }
    }
    Ok(LocalEval { value, coeffs, rule })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct NoDrift;
    impl DriftFn for NoDrift {
        fn value(&self, _: f64) -> Result<f64> {
            Ok(0.0)
        }
        fn slope(&self, _: f64) -> Result<f64> {
            Ok(0.0)
        }
        fn is_zero(&self) -> bool {
            true
        }
    }

    fn quad_patch(f: impl Fn(f64, f64) -> f64, h: f64) -> Patch {
        let mut p = [f(0.0, 0.0); 9];
        for (s, &(i, j)) in NEIGHBOURS.iter().enumerate() {
            p[s + 1] = f(i as f64 * h, j as f64 * h);
        }
        p
    }

    #[test]
    fn laplacian_set_is_single_matrix() {
        let set = admissible_weights(&EllipticityPair::laplacian());
        assert_eq!(set.len(), 1);
        assert_eq!(set[0].wx, 1.0);
        assert_eq!(set[0].wd, 0.0);
    }

    #[test]
    fn quadratics_exact_on_grid_aligned_hessians() {
        let ell = EllipticityPair::new(1.0, 2.0).unwrap();
        let set = admissible_weights(&ell);
        let h = 0.1;
        // D²u = diag(2, −2): P⁺ = −λ·2 − Λ·(−2) = 2, P⁻ = −Λ·2 − λ·(−2) = −2.
        let p = quad_patch(|x, y| x * x - y * y, h);
        let plus = evaluate(&set, &p, h, PucciSign::Plus, &NoDrift, 0.0).unwrap().value;
        let minus = evaluate(&set, &p, h, PucciSign::Minus, &NoDrift, 0.0).unwrap().value;
        assert!((plus - 2.0).abs() < 1e-9, "{plus}");
        assert!((minus + 2.0).abs() < 1e-9, "{minus}");
        // Mixed Hessian u = xy: eigenvalues ±1 along the diagonals.
        let p = quad_patch(|x, y| x * y, h);
        let plus = evaluate(&set, &p, h, PucciSign::Plus, &NoDrift, 0.0).unwrap().value;
        assert!((plus - 1.0).abs() < 1e-9, "{plus}");
    }

    #[test]
    fn coefficients_are_monotone() {
        let ell = EllipticityPair::new(0.5, 3.0).unwrap();
        for w in admissible_weights(&ell) {
            let (_, c) = linear_part(&w, &[0.0; 9], 0.1);
            assert!(c[1..].iter().all(|&x| x >= 0.0));
            assert!((c.iter().sum::<f64>()).abs() < 1e-9);
        }
    }
}
