use crate::barriers::{select_ctilde, BarrierPair};
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Point};
use crate::harnack::harnack_integral_original;
use crate::nonlinearity::{Nonlinearity, RescaledNonlinearity};
use crate::numeric::Extended;
use crate::solver::{solve_dirichlet, Drift, EllipticityPair, GridField, Problem, SolveReport, SolverOptions};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MuBranch {
    Regular,
    /// The lower barrier's assumption failed: `μ₀ = 0`.
    LowerDegenerate,
    /// The upper barrier's assumption failed: `μ₁ = ∞`.
    UpperDegenerate,
    BothDegenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BharnackReport {
    pub mu0: Extended,
    pub mu1: Extended,
    pub log_mu0: f64,
    pub log_mu1: f64,
    pub branch: MuBranch,
    pub ctilde: f64,
    /// `inf u` over `B(x₁, 1)`, the lower barrier's level.
    pub m_u: f64,
    /// `sup v` over `Ω ∩ B(x₀, 3)`, the upper barrier's level.
    pub m_v: f64,
    /// `sup v/u` over nodes of `B(w, 1/C) ∩ Ω` with `u ≥ exclusion`.
    pub sup_ratio: f64,
    pub ratio_within_barrier_bound: bool,
    pub excluded_nodes: usize,
    pub exclusion: f64,
    /// `∫_{μ₀}^{μ₁} dt/(R²φ(t/R) + t)`, negated if `μ₁ < μ₀`.
    pub integral: Extended,
    pub notes: Vec<String>,
}

/// Geometry of the barrier comparison: `w` on the boundary, `x₁` the centre of
/// the lower barrier's annulus (inside), `x₀` that of the upper one (outside).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BharnackGeometry {
    pub w: Point,
    pub x1: Point,
    pub x0: Point,
    /// The ratio is taken over `B(w, 1/c_ball)`.
    pub c_ball: f64,
}

impl Default for BharnackGeometry {
    fn default() -> Self {
        BharnackGeometry { w: [0.0, 0.0], x1: [0.0, 2.0], x0: [0.0, -1.0], c_ball: 2.0 }
    }
}

/// Boundary Harnack comparison of two non-negative solutions vanishing near `w`.
#[allow(clippy::too_many_arguments)]
pub fn verify_boundary_harnack(
    u: &GridField,
    v: &GridField,
    dom: &DomainSpec,
    ell: &EllipticityPair,
    scale: f64,
    nl: &Nonlinearity,
    geo: &BharnackGeometry,
    tol_solve: f64,
) -> Result<BharnackReport> {
    if u.nx != v.nx || u.ny != v.ny || u.h != v.h || u.origin != v.origin {
        return Err(Error::Argument("u and v must live on the same grid".into()));
    }
    let rnl = RescaledNonlinearity::new(nl.clone(), scale)?;
    let m_u = u
        .extrema_where(geo.x1, 1.0, |p| dom.contains(p))
        .ok_or_else(|| Error::Argument(format!("no grid nodes in B({:?}, 1)", geo.x1)))?
        .0;
    let m_v = v.extrema_where(geo.x0, 3.0, |p| dom.contains(p)).map_or(0.0, |e| e.1);
    if !(m_u > 0.0 && m_v > 0.0) {
        return Err(Error::Precondition(format!("u and v must be positive inside, got inf u = {m_u}, sup v = {m_v}")));
    }
    let pair: BarrierPair = select_ctilde(m_u, m_v, &rnl, ell, geo.x1, geo.x0)?;
    let mut notes = Vec::new();
    let branch = match (pair.lower.degenerate, pair.upper.degenerate) {
        (false, false) => MuBranch::Regular,
        (true, false) => MuBranch::LowerDegenerate,
        (false, true) => MuBranch::UpperDegenerate,
        (true, true) => MuBranch::BothDegenerate,
    };
    if branch != MuBranch::Regular {
        notes.push(format!("barrier assumption failed, degenerate branch {branch:?} taken"));
    }
    let exclusion = 10.0 * tol_solve;
    let mut sup_ratio: f64 = 0.0;
    let mut excluded_nodes = 0;
    let rad = 1.0 / geo.c_ball;
    for k in 0..u.values.len() {
        let p = u.point(k);
        if !u.is_active(k) || !dom.contains(p) || (p[0] - geo.w[0]).hypot(p[1] - geo.w[1]) > rad {
            continue;
        }
        if u.values[k] < exclusion {
            excluded_nodes += 1;
            continue;
        }
        sup_ratio = sup_ratio.max(v.values[k] / u.values[k]);
    }
    let log_bound = pair.log_ratio_bound();
    let ratio_within_barrier_bound = sup_ratio.ln() <= log_bound + 1e-12;
    let (mu0, mu1) = (pair.lower.mu, pair.upper.mu);
    let integral = match (mu0, mu1) {
        (_, Extended::Infinite) => Extended::Infinite,
        (Extended::Finite(a), Extended::Finite(b)) => {
            let rho = scale.min(1.0);
            if a <= b {
                harnack_integral_original(a, b, rho, nl)?
            } else {
                match harnack_integral_original(b, a, rho, nl)? {
                    Extended::Finite(x) => Extended::Finite(-x),
                    Extended::Infinite => Extended::Infinite,
                }
            }
        }
        (Extended::Infinite, _) => return Err(Error::Numerical("lower barrier slope is infinite".into())),
    };
    Ok(BharnackReport {
        mu0,
        mu1,
        log_mu0: pair.lower.log_mu,
        log_mu1: pair.upper.log_mu,
        branch,
        ctilde: pair.ctilde,
        m_u,
        m_v,
        sup_ratio,
        ratio_within_barrier_bound,
        excluded_nodes,
        exclusion,
        integral,
        notes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub field: GridField,
    pub report: SolveReport,
    /// Multiplier applied to the boundary data (or to the solution, when rescaled).
    pub amplitude: f64,
    /// `"rescale"` for 1-homogeneous operators, `"amplitude_shooting"` otherwise.
    pub method: String,
    pub solves: usize,
    /// `|v(A) − u(A)|/u(A)`.
    pub mismatch: f64,
}

fn one_homogeneous(d: &Drift) -> bool {
    let base = match d {
        Drift::Original(nl) => nl,
        Drift::Rescaled(r) => &r.base,
    };
    matches!(base.kind_name(), "homogeneous" | "linear")
}

/// Solves for `v` with boundary data `a·g` so that `v(A) = u_a`.
///
/// For operators that commute with scaling the solution is rescaled once;
/// otherwise a secant iteration on `log a` is run until the mismatch is below `1e-8`.
pub fn match_at_corkscrew(
    prob: &Problem,
    data: &GridField,
    a: Point,
    u_a: f64,
    opts: &SolverOptions,
) -> Result<MatchedPair> {
    if !(u_a > 0.0) {
        return Err(Error::Precondition(format!("u(A) must be positive, got {u_a}")));
    }
    let solve_with = |amp: f64| -> Result<(GridField, SolveReport, f64)> {
        let mut g = data.clone();
        for x in g.values.iter_mut() {
            *x *= amp;
        }
        let s = solve_dirichlet(prob, &g, opts)?;
        let va = s.field.interpolate(a)?;
        Ok((s.field, s.report, va))
    };
    let (field, report, va) = solve_with(1.0)?;
    if !(va > 0.0) {
        return Err(Error::Precondition(format!("v(A) must be positive, got {va}")));
    }
    let homogeneous = prob.nl.as_ref().is_some_and(one_homogeneous);
    if homogeneous {
        let k = u_a / va;
        let mut f = field;
        for x in f.values.iter_mut() {
            *x *= k;
        }
        let mismatch = (f.interpolate(a)? - u_a).abs() / u_a;
        return Ok(MatchedPair { field: f, report, amplitude: k, method: "rescale".into(), solves: 1, mismatch });
    }
    let target = u_a.ln();
    let (mut x0, mut f0) = (0.0, va.ln() - target);
    let mut x1 = -f0;
    let (mut field1, mut report1, va1) = solve_with(x1.exp())?;
    let mut f1 = va1.ln() - target;
    let mut solves = 2;
    while f1.abs() > 1e-8 {
        if solves >= 30 {
            return Err(Error::NonConvergence { iterations: solves, last: f1.abs(), history: vec![] });
        }
        let x2 = if f1 != f0 { x1 - f1 * (x1 - x0) / (f1 - f0) } else { x1 - f1 };
        x0 = x1;
        f0 = f1;
        x1 = x2;
        let (fd, rp, v) = solve_with(x1.exp())?;
        solves += 1;
        field1 = fd;
        report1 = rp;
        f1 = v.ln() - target;
    }
    Ok(MatchedPair {
        field: field1,
        report: report1,
        amplitude: x1.exp(),
        method: "amplitude_shooting".into(),
        solves,
        mismatch: f1.exp_m1().abs(),
    })
}
