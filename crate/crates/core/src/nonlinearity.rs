//! The drift profile `φ(t) = η(t)·t`, its rescaled form `Φ_R(t) = Rφ(t) + t`,
//! numerical checks of the structural conditions and Osgood classification.

use crate::error::{Error, Result};
use crate::numeric::quadrature::{integrate_log, Tolerance};
use crate::numeric::log_grid;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Multiplier applied to the tightest sampled submultiplicativity constant.
pub const LAMBDA0_SAFETY: f64 = 1.01;

/// A piecewise power-law interpolant through `(t, φ(t))` samples.
///
/// Between two positive abscissae the interpolant is linear in
/// `(log t, log φ)`; a leading `t = 0` row is joined linearly. Evaluation
/// outside the table is an error, never an extrapolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiTable {
    t: Vec<f64>,
    phi: Vec<f64>,
}

impl PhiTable {
    pub fn new(t: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        if t.len() != phi.len() || t.len() < 2 {
            return Err(Error::Config(
                "phi table needs at least two rows of equal-length columns".into(),
            ));
        }
        for w in t.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Config(format!(
                    "phi table abscissae must be strictly increasing (found {} then {})",
                    w[0], w[1]
                )));
            }
        }
        if t[0] < 0.0 {
            return Err(Error::Config("phi table abscissae must be non-negative".into()));
        }
        for (i, &p) in phi.iter().enumerate() {
            let positive_required = t[i] > 0.0;
            if !p.is_finite() || p < 0.0 || (positive_required && p <= 0.0) {
                return Err(Error::Config(format!(
                    "phi table value {p} at t = {} must be positive and finite",
                    t[i]
                )));
            }
        }
        Ok(PhiTable { t, phi })
    }

    /// Reads a two-column `t,phi` CSV; a non-numeric first row is a header.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let (mut t, mut phi) = (Vec::new(), Vec::new());
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            let parse = |j: usize| rec.get(j).and_then(|s| s.parse::<f64>().ok());
            match (parse(0), parse(1)) {
                (Some(a), Some(b)) => {
                    t.push(a);
                    phi.push(b);
                }
                _ if i == 0 => continue,
                _ => {
                    return Err(Error::Parse(format!(
                        "{}: row {} is not two numbers",
                        path.display(),
                        i + 1
                    )))
                }
            }
        }
        PhiTable::new(t, phi)
    }

    /// Tabulates `f` on the given abscissae.
    pub fn sample<F: Fn(f64) -> f64>(ts: &[f64], f: F) -> Result<Self> {
        PhiTable::new(ts.to_vec(), ts.iter().map(|&t| f(t)).collect())
    }

    pub fn range(&self) -> (f64, f64) {
        (self.t[0], *self.t.last().unwrap())
    }

    fn locate(&self, t: f64) -> Result<usize> {
        let (lo, hi) = self.range();
        if !(t >= lo && t <= hi) {
            return Err(Error::Extrapolation { t, lo, hi });
        }
        let i = self.t.partition_point(|&x| x <= t);
        Ok(i.saturating_sub(1).min(self.t.len() - 2))
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let i = self.locate(t)?;
        let (t0, t1, p0, p1) = (self.t[i], self.t[i + 1], self.phi[i], self.phi[i + 1]);
        if t == t0 {
            return Ok(p0);
        }
        if t0 == 0.0 {
            return Ok(p0 + (p1 - p0) * t / t1);
        }
        let s = (p1 / p0).ln() / (t1 / t0).ln();
        Ok(p0 * (t / t0).powf(s))
    }

    pub fn derivative(&self, t: f64) -> Result<f64> {
        let i = self.locate(t)?;
        let (t0, t1, p0, p1) = (self.t[i], self.t[i + 1], self.phi[i], self.phi[i + 1]);
        if t0 == 0.0 {
            return Ok((p1 - p0) / t1);
        }
        let s = (p1 / p0).ln() / (t1 / t0).ln();
        Ok(self.eval(t)? * s / t)
    }
}

/// Which drift profile is in use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhiKind {
    /// `φ ≡ 0`: the drift-free equation.
    Homogeneous,
    /// `φ(t) = c·t`.
    Linear,
    /// `φ(t) = c·(|log t| + 1)·t`.
    LogModel,
    /// `φ(t) = c·table(t)`.
    Tabulated { table: PhiTable },
}

/// The drift nonlinearity `φ` with its structural metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Nonlinearity {
    pub kind: PhiKind,
    pub c: f64,
    /// Submultiplicativity constant: tightest sampled value times [`LAMBDA0_SAFETY`].
    pub lambda0: f64,
    pub eps_floor: f64,
}

impl Nonlinearity {
    fn build(kind: PhiKind, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Config(format!("phi scale c must be positive, got {c}")));
        }
        let mut nl = Nonlinearity {
            kind,
            c,
            lambda0: 1.0,
            eps_floor: 1e-6,
        };
        if !nl.is_homogeneous() {
            nl.lambda0 = nl.sampled_lambda0(&default_pair_grid(&nl))? * LAMBDA0_SAFETY;
        }
        Ok(nl)
    }

    pub fn homogeneous() -> Self {
        Nonlinearity {
            kind: PhiKind::Homogeneous,
            c: 1.0,
            lambda0: 1.0,
            eps_floor: 1e-6,
        }
    }

    pub fn linear(c: f64) -> Result<Self> {
        Self::build(PhiKind::Linear, c)
    }

    pub fn log_model(c: f64) -> Result<Self> {
        Self::build(PhiKind::LogModel, c)
    }

    pub fn tabulated(table: PhiTable, c: f64) -> Result<Self> {
        Self::build(PhiKind::Tabulated { table }, c)
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(self.kind, PhiKind::Homogeneous)
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            PhiKind::Homogeneous => "homogeneous",
            PhiKind::Linear => "linear",
            PhiKind::LogModel => "log_model",
            PhiKind::Tabulated { .. } => "tabulated",
        }
    }

    /// Range on which `φ` may be evaluated.
    pub fn support(&self) -> (f64, f64) {
        match &self.kind {
            PhiKind::Tabulated { table } => table.range(),
            _ => (0.0, f64::INFINITY),
        }
    }

    /// `φ(t)`.
    pub fn phi(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("phi evaluated at negative t = {t}")));
        }
        Ok(match &self.kind {
            PhiKind::Homogeneous => 0.0,
            PhiKind::Linear => self.c * t,
            PhiKind::LogModel => {
                if t == 0.0 {
                    0.0
                } else {
                    self.c * (t.ln().abs() + 1.0) * t
                }
            }
            PhiKind::Tabulated { table } => self.c * table.eval(t)?,
        })
    }

    /// `η(t) = φ(t)/t` for `t > 0`.
    pub fn eta(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("eta needs t > 0, got {t}")));
        }
        Ok(match &self.kind {
            PhiKind::Homogeneous => 0.0,
            PhiKind::Linear => self.c,
            PhiKind::LogModel => self.c * (t.ln().abs() + 1.0),
            PhiKind::Tabulated { .. } => self.phi(t)? / t,
        })
    }

    /// `η(e^y)`, usable far below the smallest positive double.
    pub fn eta_log(&self, y: f64) -> Result<f64> {
        match &self.kind {
            PhiKind::Homogeneous => Ok(0.0),
            PhiKind::Linear => Ok(self.c),
            PhiKind::LogModel => Ok(self.c * (y.abs() + 1.0)),
            PhiKind::Tabulated { .. } => self.eta(y.exp()),
        }
    }

    /// `φ'(t)`; one-sided (right) derivative at the kink `t = 1` of the log model.
    pub fn dphi(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("phi' evaluated at negative t = {t}")));
        }
        Ok(match &self.kind {
            PhiKind::Homogeneous => 0.0,
            PhiKind::Linear => self.c,
            PhiKind::LogModel => {
                if t == 0.0 {
                    f64::INFINITY
                } else if t < 1.0 {
                    -self.c * t.ln()
                } else {
                    self.c * (t.ln() + 2.0)
                }
            }
            PhiKind::Tabulated { table } => self.c * table.derivative(t)?,
        })
    }

    /// `max η(st)/(η(s)η(t))` over all pairs of `grid` whose product stays in range.
    pub fn sampled_lambda0(&self, grid: &[f64]) -> Result<f64> {
        if self.is_homogeneous() {
            return Ok(1.0);
        }
        let (lo, hi) = self.support();
        let mut best = 0.0f64;
        for &s in grid {
            for &t in grid {
                let st = s * t;
                if !(st >= lo && st <= hi && st > 0.0) {
                    continue;
                }
                let r = self.eta(st)? / (self.eta(s)? * self.eta(t)?);
                best = best.max(r);
            }
        }
        Ok(best)
    }
}

fn default_pair_grid(nl: &Nonlinearity) -> Vec<f64> {
    let (lo, hi) = nl.support();
    let lo = lo.max(1e-6);
    let hi = hi.min(1e6);
    if hi <= lo {
        return vec![lo];
    }
    log_grid(lo, hi, 50)
}

/// `Φ_R(t) = Rφ(t) + t` with `η_R = Rη + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaledNonlinearity {
    pub base: Nonlinearity,
    pub r: f64,
}

impl RescaledNonlinearity {
    pub fn new(base: Nonlinearity, r: f64) -> Result<Self> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::Config(format!("scale R must lie in (0, 1], got {r}")));
        }
        Ok(RescaledNonlinearity { base, r })
    }

    /// `Φ_R(t)`.
    pub fn phi(&self, t: f64) -> Result<f64> {
        Ok(self.r * self.base.phi(t)? + t)
    }

    /// `Φ_R'(t)`.
    pub fn dphi(&self, t: f64) -> Result<f64> {
        Ok(self.r * self.base.dphi(t)? + 1.0)
    }

    /// `η_R(t) = Rη(t) + 1`.
    pub fn eta(&self, t: f64) -> Result<f64> {
        Ok(self.r * self.base.eta(t)? + 1.0)
    }

    /// `η_R(e^y)`.
    pub fn eta_log(&self, y: f64) -> Result<f64> {
        Ok(self.r * self.base.eta_log(y)? + 1.0)
    }
}

/// `φ(t)`; negative `t` is a domain error.
pub fn eval_phi(nl: &Nonlinearity, t: f64) -> Result<f64> {
    nl.phi(t)
}

/// `Φ_R(t) = Rφ(t) + t`; validates `R ∈ (0, 1]`.
pub fn eval_phi_r(rnl: &RescaledNonlinearity, t: f64) -> Result<f64> {
    if !(rnl.r > 0.0 && rnl.r <= 1.0) {
        return Err(Error::Config(format!("scale R must lie in (0, 1], got {}", rnl.r)));
    }
    rnl.phi(t)
}

/// A pair of sample points at which a structural condition fails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub s: f64,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
}

/// Outcome of the slow-growth proxy on the tail of the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TailProxy {
    /// `tη'(t)/η(t)·log η(t)` is non-increasing along the tail.
    Decreasing { tail_value: f64 },
    /// The proxy is not monotone on the tail; only the last value is reported.
    NonMonotone { tail_value: f64 },
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub kind: String,
    pub grid_points: usize,
    pub points_in_range: usize,
    /// `φ(t) ≥ t` on the grid; `None` for the homogeneous kind.
    pub phi_dominates_identity: Option<bool>,
    pub first_domination_violation: Option<Violation>,
    /// `η` non-increasing on `(0,1)` and non-decreasing on `[1,∞)`.
    pub eta_monotone: Option<bool>,
    pub first_monotonicity_violation: Option<Violation>,
    pub slow_growth: TailProxy,
    pub sampled_lambda0: f64,
    pub reported_lambda0: f64,
    pub lambda0_holds: bool,
    pub note: Option<String>,
}

impl StructureReport {
    pub fn all_pass(&self) -> bool {
        self.phi_dominates_identity.unwrap_or(true)
            && self.eta_monotone.unwrap_or(true)
            && !matches!(self.slow_growth, TailProxy::NonMonotone { .. })
            && self.lambda0_holds
    }
}

/// Numerical check of the structural conditions on a log-spaced grid.
pub fn check_structure(nl: &Nonlinearity, grid: &[f64]) -> Result<StructureReport> {
    let glo = grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let ghi = grid.iter().cloned().fold(0.0, f64::max);
    if !(glo <= 1e-8 * (1.0 + 1e-12) && ghi >= 1e8 * (1.0 - 1e-12)) {
        return Err(Error::Argument(format!(
            "structure grid must span [1e-8, 1e8], got [{glo}, {ghi}]"
        )));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) || glo <= 0.0 {
        return Err(Error::Argument("structure grid must be positive and increasing".into()));
    }
    if nl.is_homogeneous() {
        return Ok(StructureReport {
            kind: nl.kind_name().into(),
            grid_points: grid.len(),
            points_in_range: grid.len(),
            phi_dominates_identity: None,
            first_domination_violation: None,
            eta_monotone: None,
            first_monotonicity_violation: None,
            slow_growth: TailProxy::NotApplicable,
            sampled_lambda0: 1.0,
            reported_lambda0: nl.lambda0,
            lambda0_holds: true,
            note: Some("phi is identically zero (eta = 0): structural conditions bypassed".into()),
        });
    }
    let (lo, hi) = nl.support();
    let pts: Vec<f64> = grid.iter().cloned().filter(|&t| t >= lo && t <= hi).collect();
    let note = (pts.len() < grid.len()).then(|| {
        format!(
            "{} grid points outside the table range [{lo}, {hi}] were skipped",
            grid.len() - pts.len()
        )
    });

    let mut dom_violation = None;
    for &t in &pts {
        let p = nl.phi(t)?;
        if p < t * (1.0 - 1e-12) {
            dom_violation = Some(Violation { s: t, t, lhs: p, rhs: t });
            break;
        }
    }

    let etas: Vec<f64> = pts.iter().map(|&t| nl.eta(t)).collect::<Result<_>>()?;
    let mut mono_violation = None;
    for i in 0..pts.len().saturating_sub(1) {
        let (s, t) = (pts[i], pts[i + 1]);
        let (es, et) = (etas[i], etas[i + 1]);
        let tol = 1e-12 * es.abs().max(et.abs());
        let bad = if t <= 1.0 {
            et > es + tol
        } else if s >= 1.0 {
            et < es - tol
        } else {
            false
        };
        if bad {
            mono_violation = Some(Violation { s, t, lhs: es, rhs: et });
            break;
        }
    }

    let slow_growth = slow_growth_proxy(&pts, &etas);

    let sub: Vec<f64> = if pts.len() > 50 {
        (0..50).map(|i| pts[i * (pts.len() - 1) / 49]).collect()
    } else {
        pts.clone()
    };
    let sampled = nl.sampled_lambda0(&sub)?;

    Ok(StructureReport {
        kind: nl.kind_name().into(),
        grid_points: grid.len(),
        points_in_range: pts.len(),
        phi_dominates_identity: Some(dom_violation.is_none()),
        first_domination_violation: dom_violation,
        eta_monotone: Some(mono_violation.is_none()),
        first_monotonicity_violation: mono_violation,
        slow_growth,
        sampled_lambda0: sampled,
        reported_lambda0: nl.lambda0,
        lambda0_holds: sampled <= nl.lambda0 * (1.0 + 1e-12),
        note,
    })
}

/// Finite-difference `tη'/η·log η` on the last quarter of the `t ≥ 1` samples.
fn slow_growth_proxy(pts: &[f64], etas: &[f64]) -> TailProxy {
    let start = pts.partition_point(|&t| t < 1.0);
    let n = pts.len() - start;
    if n < 8 {
        return TailProxy::NotApplicable;
    }
    let mut q = Vec::new();
    for i in start..pts.len() - 1 {
        let dlog_eta = (etas[i + 1] / etas[i]).ln();
        let dlog_t = (pts[i + 1] / pts[i]).ln();
        let em = (etas[i] * etas[i + 1]).sqrt();
        q.push(dlog_eta / dlog_t * em.ln());
    }
    let tail = &q[q.len() - q.len() / 4 - 1..];
    let tail_value = *tail.last().unwrap();
    let decreasing = tail
        .windows(2)
        .all(|w| w[1] <= w[0] + 1e-9 * w[0].abs().max(1e-300));
    if decreasing {
        TailProxy::Decreasing { tail_value }
    } else {
        TailProxy::NonMonotone { tail_value }
    }
}

/// Verdict for one end of the Osgood integral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum OsgoodVerdict {
    Diverges,
    Converges { limit_estimate: f64 },
    Indeterminate { reason: String },
}

impl OsgoodVerdict {
    pub fn diverges(&self) -> bool {
        matches!(self, OsgoodVerdict::Diverges)
    }
    pub fn converges(&self) -> bool {
        matches!(self, OsgoodVerdict::Converges { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OsgoodEnd {
    pub verdict: OsgoodVerdict,
    /// Truncation points used, in order of progression.
    pub truncations: Vec<f64>,
    /// Cumulative truncated integrals at each truncation.
    pub partial_integrals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OsgoodReport {
    pub at_zero: OsgoodEnd,
    pub at_infinity: OsgoodEnd,
}

/// Classifies `∫₀¹ dt/φ` and `∫₁^∞ dt/φ` from truncated integrals.
///
/// Truncations are `10^{-2k}` (resp. `10^{2k}`), `k = 1..6`. Writing `d_k` for
/// the integral over the k-th decade pair, the ratios `r_k = d_{k+1}/d_k`
/// decide: ratios pinned near one, or creeping up past 3/4, mean the partial
/// integrals grow without bound; ratios settling at or below 0.9 mean a
/// geometric tail and a finite limit. Anything else is indeterminate.
pub fn osgood_classify(nl: &Nonlinearity) -> Result<OsgoodReport> {
    let zeros: Vec<f64> = (1..=6).map(|k| 10f64.powi(-2 * k)).collect();
    let infs: Vec<f64> = (1..=6).map(|k| 10f64.powi(2 * k)).collect();
    if nl.is_homogeneous() {
        let end = |tr: Vec<f64>| OsgoodEnd {
            verdict: OsgoodVerdict::Diverges,
            partial_integrals: vec![f64::INFINITY; tr.len()],
            truncations: tr,
        };
        return Ok(OsgoodReport {
            at_zero: end(zeros),
            at_infinity: end(infs),
        });
    }
    Ok(OsgoodReport {
        at_zero: classify_end(nl, &zeros)?,
        at_infinity: classify_end(nl, &infs)?,
    })
}

fn classify_end(nl: &Nonlinearity, truncations: &[f64]) -> Result<OsgoodEnd> {
    let (lo, hi) = nl.support();
    let tol = Tolerance::new(1e-13, 1e-11);
    let mut used = Vec::new();
    let mut increments = Vec::new();
    let mut prev = 1.0;
    for &tr in truncations {
        if !(tr >= lo && tr <= hi) || tr == 0.0 {
            break;
        }
        let (a, b) = if tr < 1.0 { (tr, prev) } else { (prev, tr) };
        let d = integrate_log(|t| Ok(1.0 / nl.phi(t)?), a, b, &tol)?.value;
        increments.push(d);
        used.push(tr);
        prev = tr;
    }
    let mut partial = Vec::with_capacity(increments.len());
    let mut acc = 0.0;
    for d in &increments {
        acc += d;
        partial.push(acc);
    }
    let verdict = verdict_from_increments(&increments, acc);
    Ok(OsgoodEnd {
        verdict,
        truncations: used,
        partial_integrals: partial,
    })
}

pub(crate) fn verdict_from_increments(d: &[f64], total: f64) -> OsgoodVerdict {
    if d.len() < 4 {
        return OsgoodVerdict::Indeterminate {
            reason: format!("only {} truncation steps inside the table range", d.len()),
        };
    }
    // The first decade is transient; judge the ratios of the remaining ones.
    let ratios: Vec<f64> = d[1..].windows(2).map(|w| w[1] / w[0]).collect();
    let last = *ratios.last().unwrap();
    let nondecreasing = ratios.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    let nonincreasing = ratios.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let constant = nondecreasing && nonincreasing;
    if last >= 0.99 || (nondecreasing && !constant && last >= 0.75) {
        OsgoodVerdict::Diverges
    } else if nonincreasing && last <= 0.9 {
        let tail = d.last().unwrap() * last / (1.0 - last);
        OsgoodVerdict::Converges {
            limit_estimate: total + tail,
        }
    } else {
        OsgoodVerdict::Indeterminate {
            reason: format!("increment ratios {ratios:?} are neither geometric nor growing"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full_grid() -> Vec<f64> {
        log_grid(1e-8, 1e8, 321)
    }

    #[test]
    fn phi_values() {
        let lm = Nonlinearity::log_model(1.0).unwrap();
        assert_eq!(eval_phi(&Nonlinearity::homogeneous(), 5.0).unwrap(), 0.0);
        assert_eq!(lm.phi(1.0).unwrap(), 1.0);
        let e = std::f64::consts::E;
        assert!((lm.phi(e).unwrap() - 2.0 * e).abs() < 1e-15);
        assert_eq!(lm.phi(0.0).unwrap(), 0.0);
        assert!(matches!(lm.phi(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn rescaled_values() {
        let lin = RescaledNonlinearity::new(Nonlinearity::linear(1.0).unwrap(), 0.5).unwrap();
        assert_eq!(eval_phi_r(&lin, 2.0).unwrap(), 3.0);
        let lm = RescaledNonlinearity::new(Nonlinearity::log_model(1.0).unwrap(), 1.0).unwrap();
        let e = std::f64::consts::E;
        assert!((lm.phi(e).unwrap() - 3.0 * e).abs() < 1e-14);
        assert!(matches!(
            RescaledNonlinearity::new(Nonlinearity::homogeneous(), 1.5),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let lm = Nonlinearity::log_model(1.3).unwrap();
        for &t in &[0.01, 0.3, 2.0, 50.0] {
            let h = 1e-6 * t;
            let fd = (lm.phi(t + h).unwrap() - lm.phi(t - h).unwrap()) / (2.0 * h);
            assert!((fd - lm.dphi(t).unwrap()).abs() < 1e-6 * fd.abs().max(1.0));
        }
    }

    #[test]
    fn structure_of_builtin_kinds() {
        let r = check_structure(&Nonlinearity::log_model(1.0).unwrap(), &full_grid()).unwrap();
        assert!(r.all_pass(), "{r:?}");
        assert!(r.sampled_lambda0 <= 2.0);
        let r = check_structure(&Nonlinearity::linear(1.0).unwrap(), &full_grid()).unwrap();
        assert!(r.all_pass());
        assert!((r.sampled_lambda0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn structure_flags_decreasing_eta() {
        let ts = log_grid(1e-9, 1e9, 200);
        // η = 2 on (0,1], then decreasing toward 1.
        let table = PhiTable::sample(&ts, |t| if t <= 1.0 { 2.0 * t } else { (1.0 + 1.0 / t) * t })
            .unwrap();
        let nl = Nonlinearity::tabulated(table, 1.0).unwrap();
        let r = check_structure(&nl, &full_grid()).unwrap();
        assert_eq!(r.eta_monotone, Some(false));
        let v = r.first_monotonicity_violation.unwrap();
        assert!(v.s >= 1.0 && v.rhs < v.lhs);
    }

    #[test]
    fn structure_grid_must_be_wide() {
        let nl = Nonlinearity::linear(1.0).unwrap();
        assert!(check_structure(&nl, &log_grid(1e-3, 1e3, 10)).is_err());
    }

    #[test]
    fn osgood_builtin_kinds_diverge() {
        for nl in [
            Nonlinearity::linear(1.0).unwrap(),
            Nonlinearity::log_model(1.0).unwrap(),
            Nonlinearity::homogeneous(),
        ] {
            let r = osgood_classify(&nl).unwrap();
            assert!(r.at_zero.verdict.diverges(), "{nl:?} {r:?}");
            assert!(r.at_infinity.verdict.diverges(), "{nl:?} {r:?}");
        }
    }

    #[test]
    fn osgood_square_converges_at_infinity() {
        let ts = log_grid(1e-14, 1e14, 400);
        let nl = Nonlinearity::tabulated(PhiTable::sample(&ts, |t| t * t).unwrap(), 1.0).unwrap();
        let r = osgood_classify(&nl).unwrap();
        match r.at_infinity.verdict {
            OsgoodVerdict::Converges { limit_estimate } => {
                assert!((limit_estimate - 1.0).abs() < 1e-6)
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn short_table_is_indeterminate() {
        let ts = log_grid(1e-3, 1e3, 50);
        let nl = Nonlinearity::tabulated(PhiTable::sample(&ts, |t| t).unwrap(), 1.0).unwrap();
        let r = osgood_classify(&nl).unwrap();
        assert!(matches!(r.at_zero.verdict, OsgoodVerdict::Indeterminate { .. }));
    }

    #[test]
    fn table_refuses_extrapolation() {
        let t = PhiTable::new(vec![1.0, 2.0], vec![1.0, 4.0]).unwrap();
        assert!(matches!(t.eval(3.0), Err(Error::Extrapolation { .. })));
        assert!((t.eval(1.5).unwrap() - 2.25).abs() < 1e-14);
    }

    #[test]
    fn table_rejects_unsorted_abscissae() {
        assert!(PhiTable::new(vec![1.0, 1.0], vec![1.0, 2.0]).is_err());
    }
}
