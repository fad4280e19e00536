//! Monotone finite-difference Dirichlet solver for the extremal equations
//! with drift and for the non-divergence p(x)-Laplacian.
//!
//! The extremal operators are discretized by a 9-point stencil swept over
//! sixteen orientations; each admissible matrix contributes a linear
//! monotone operator and `P^±` is the max/min over them. The drift uses the
//! centred gradient where this keeps the scheme monotone and an upwind
//! magnitude elsewhere. The discrete system is solved by semismooth Newton
//! (policy iteration) with a backtracking line search on the max residual;
//! the p(x)-Laplacian is solved by Picard iteration on frozen coefficients.

mod banded;
mod grid;
mod pucci;
mod stencil;

pub use banded::{BandLu, BandMatrix};
pub use grid::{GridField, NodeKind, NEIGHBOURS};
pub use pucci::{pucci_apply, sym_eigenvalues, EllipticityPair, PucciSign, Sym2};
pub use stencil::{admissible_weights, DriftFn, GradientRule, StencilWeights};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::nonlinearity::{Nonlinearity, RescaledNonlinearity};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use stencil::{evaluate, patch, patch_indices, weights_of, Patch};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operator {
    /// `P⁻(D²u) = Φ(|Du|)`.
    PucciMinusDrift,
    /// `P⁺(D²u) = −Φ(|Du|)`.
    PucciPlusDrift,
    /// `−Δu − (p−2)Δ∞u − log|Du|·⟨∇p, ∇u⟩ = 0`.
    PxLaplace,
}

/// Drift seen by the extremal equations: either `φ` itself or the rescaled `Φ_R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scale", rename_all = "snake_case")]
pub enum Drift {
    Original(Nonlinearity),
    Rescaled(RescaledNonlinearity),
}

impl DriftFn for Drift {
    fn value(&self, t: f64) -> Result<f64> {
        match self {
            Drift::Original(nl) => nl.phi(t),
            Drift::Rescaled(r) => r.phi(t),
        }
    }

    fn slope(&self, t: f64) -> Result<f64> {
        match self {
            Drift::Original(nl) => nl.dphi(t),
            Drift::Rescaled(r) => r.dphi(t),
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, Drift::Original(nl) if nl.is_homogeneous())
    }
}

/// Affine exponent field `p(x) = base + ⟨gradient, x⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PField {
    pub base: f64,
    pub gradient: Point,
}

impl PField {
    pub fn constant(p: f64) -> Self {
        PField { base: p, gradient: [0.0, 0.0] }
    }

    pub fn affine(base: f64, gradient: Point) -> Self {
        PField { base, gradient }
    }

    pub fn value(&self, x: Point) -> f64 {
        self.base + self.gradient[0] * x[0] + self.gradient[1] * x[1]
    }

    /// `(p⁻, p⁺)` over the non-exterior nodes; both must lie in `(1, ∞)`.
    pub fn range_on(&self, g: &GridField) -> Result<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..g.values.len() {
            if g.is_active(k) {
                let p = self.value(g.point(k));
                lo = lo.min(p);
                hi = hi.max(p);
            }
        }
        if !(lo > 1.0 && hi.is_finite()) {
            return Err(Error::Precondition(format!("exponent field must satisfy 1 < p(x) < ∞ on the grid, got range [{lo}, {hi}]")));
        }
        Ok((lo, hi))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub operator: Operator,
    pub ell: EllipticityPair,
    pub nl: Option<Drift>,
    pub p_field: Option<PField>,
}

impl Problem {
    pub fn pucci_plus(ell: EllipticityPair, drift: Drift) -> Self {
        Problem { operator: Operator::PucciPlusDrift, ell, nl: Some(drift), p_field: None }
    }

    pub fn pucci_minus(ell: EllipticityPair, drift: Drift) -> Self {
        Problem { operator: Operator::PucciMinusDrift, ell, nl: Some(drift), p_field: None }
    }

    pub fn px_laplace(p: PField) -> Self {
        Problem { operator: Operator::PxLaplace, ell: EllipticityPair::laplacian(), nl: None, p_field: Some(p) }
    }

    /// Laplace equation: either extremal operator with `λ = Λ = 1` and no drift.
    pub fn laplace() -> Self {
        Problem::pucci_plus(EllipticityPair::laplacian(), Drift::Original(Nonlinearity::homogeneous()))
    }

    pub fn validate(&self) -> Result<()> {
        match self.operator {
            Operator::PxLaplace if self.p_field.is_none() => {
                Err(Error::Config("px_laplace needs an exponent field".into()))
            }
            Operator::PucciMinusDrift | Operator::PucciPlusDrift if self.nl.is_none() => {
                Err(Error::Config("extremal operators need a drift nonlinearity".into()))
            }
            _ => Ok(()),
        }
    }

    fn sign(&self) -> PucciSign {
        match self.operator {
            Operator::PucciMinusDrift => PucciSign::Minus,
            _ => PucciSign::Plus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Residual target, multiplied by `max(1, boundary data range)`.
    pub tol_solve: f64,
    pub max_iters: usize,
    /// Gradient floor; `None` means `h²`.
    pub eps_grad: Option<f64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol_solve: 1e-8, max_iters: 200, eps_grad: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub residual: f64,
    pub tolerance: f64,
    pub history: Vec<f64>,
    /// Boundary data dips below zero although the estimates assume `u ≥ 0`.
    pub negative_data_warning: bool,
    /// Nodes where the drift fell back to the upwind gradient at the last iterate.
    pub upwind_nodes: usize,
    /// Nodes whose frozen p(x) stencil needed clipping to stay monotone.
    pub clipped_nodes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub field: GridField,
    pub report: SolveReport,
}

/// Band ordering of the lattice: the shorter axis runs fastest.
struct BandOrder {
    perm: Vec<usize>,
    bw: usize,
}

impl BandOrder {
    fn new(g: &GridField) -> Self {
        let perm = if g.nx <= g.ny {
            (0..g.nx * g.ny).collect()
        } else {
            (0..g.nx * g.ny)
                .map(|k| {
                    let (i, j) = g.coords(k);
                    i * g.ny + j
                })
                .collect()
        };
        BandOrder { perm, bw: g.nx.min(g.ny) + 1 }
    }
}

fn interior_nodes(g: &GridField) -> Vec<usize> {
    (0..g.values.len()).filter(|&k| g.mask[k] == NodeKind::Interior).collect()
}

/// Solves the lattice system whose interior rows are `coeffs·u[patch] = rhs`
/// and whose other rows fix `u = fixed(k)`.
fn solve_linear(
    g: &GridField,
    order: &BandOrder,
    interior: &[usize],
    rows: &[(Patch, f64)],
    fixed: impl Fn(usize) -> f64,
) -> Result<Vec<f64>> {
    let n = g.values.len();
    let mut a = BandMatrix::zeros(n, order.bw, order.bw);
    let mut b = vec![0.0; n];
    let mut is_row = vec![false; n];
    for (&k, (c, r)) in interior.iter().zip(rows) {
        let pk = order.perm[k];
        for (slot, &m) in patch_indices(g, k).iter().enumerate() {
            if c[slot] != 0.0 || slot == 0 {
                a.add(pk, order.perm[m], c[slot]);
            }
        }
        b[pk] = *r;
        is_row[k] = true;
    }
    for (k, &row) in is_row.iter().enumerate() {
        if !row {
            let pk = order.perm[k];
            a.add(pk, pk, 1.0);
            b[pk] = fixed(k);
        }
    }
    a.factor()?.solve(&mut b);
    Ok((0..n).map(|k| b[order.perm[k]]).collect())
}

/// Harmonic extension of the boundary data; the initial iterate of every solve.
fn harmonic_extension(g: &GridField, order: &BandOrder, interior: &[usize]) -> Result<Vec<f64>> {
    let set = admissible_weights(&EllipticityPair::laplacian());
    let (_, c) = stencil::linear_part(&set[0], &[0.0; 9], g.h);
    let rows: Vec<(Patch, f64)> = interior.iter().map(|_| (c, 0.0)).collect();
    solve_linear(g, order, interior, &rows, |k| g.values[k])
}

fn default_eps(g: &GridField, opts: &SolverOptions) -> f64 {
    opts.eps_grad.unwrap_or(g.h * g.h)
}

fn tolerance(g: &GridField, opts: &SolverOptions) -> f64 {
    let (lo, hi) = g.boundary_range();
    let range = if hi >= lo { hi - lo } else { 0.0 };
    opts.tol_solve * range.max(1.0)
}

/// Local p(x)-Laplacian: the frozen-coefficient row at node `k` and whether it was clipped.
fn px_row(g: &GridField, pf: &PField, p: &Patch, x: Point, eps: f64) -> (Patch, bool) {
    let h = g.h;
    let pv = pf.value(x);
    let gx = (p[1] - p[2]) * 0.5 / h;
    let gy = (p[3] - p[4]) * 0.5 / h;
    let gn = gx.hypot(gy);
    let (a11, a22, a12) = if gn > eps {
        let (nx, ny) = (gx / gn, gy / gn);
        (1.0 + (pv - 2.0) * nx * nx, 1.0 + (pv - 2.0) * ny * ny, (pv - 2.0) * nx * ny)
    } else {
        let d = 1.0 + 0.5 * (pv - 2.0);
        (d, d, 0.0)
    };
    let (w, ok) = weights_of(a11, a22, a12);
    let (_, lin) = stencil::linear_part(&w, &[0.0; 9], h);
    let mut c = [0.0; 9];
    for i in 0..9 {
        c[i] = -lin[i];
    }
    // −⟨β, ∇u⟩ with β = log|Du|·∇p, centred while the cell Péclet number allows.
    let lg = gn.max(eps).ln();
    let beta = [lg * pf.gradient[0], lg * pf.gradient[1]];
    for (axis, (fwd, bwd, wgt)) in [(1usize, 2usize, w.wx), (3, 4, w.wy)].into_iter().enumerate() {
        let b = beta[axis];
        if b == 0.0 {
            continue;
        }
        if h * b.abs() <= 2.0 * wgt {
            c[fwd] -= b * 0.5 / h;
            c[bwd] += b * 0.5 / h;
        } else if b > 0.0 {
            c[fwd] -= b / h;
            c[0] += b / h;
        } else {
            c[0] -= b / h;
            c[bwd] += b / h;
        }
    }
    (c, !ok)
}

fn dot9(c: &Patch, p: &Patch) -> f64 {
    c.iter().zip(p).map(|(a, b)| a * b).sum()
}

/// Residuals at the interior nodes, in `interior` order.
fn local_residuals(prob: &Problem, g: &GridField, u: &[f64], interior: &[usize], eps: f64) -> Result<Vec<f64>> {
    match prob.operator {
        Operator::PxLaplace => {
            let pf = prob.p_field.as_ref().expect("validated");
            Ok(interior
                .par_iter()
                .map(|&k| {
                    let p = patch(g, u, k);
                    let (c, _) = px_row(g, pf, &p, g.point(k), eps);
                    dot9(&c, &p)
                })
                .collect())
        }
        _ => {
            let set = admissible_weights(&prob.ell);
            let drift = prob.nl.as_ref().expect("validated");
            let sign = prob.sign();
            interior
                .par_iter()
                .map(|&k| evaluate(&set, &patch(g, u, k), g.h, sign, drift, eps).map(|e| e.value))
                .collect()
        }
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) })
}

/// Max over interior nodes of the absolute discrete residual (gradient floor `h²`).
pub fn residual(prob: &Problem, field: &GridField) -> Result<f64> {
    prob.validate()?;
    let interior = interior_nodes(field);
    let eps = field.h * field.h;
    Ok(max_abs(&local_residuals(prob, field, &field.values, &interior, eps)?))
}

/// Solves the Dirichlet problem with data taken from the boundary nodes of `grid`.
pub fn solve_dirichlet(prob: &Problem, grid: &GridField, opts: &SolverOptions) -> Result<Solution> {
    prob.validate()?;
    if !(opts.tol_solve > 0.0) || opts.max_iters == 0 {
        return Err(Error::Config("solver needs tol_solve > 0 and max_iters ≥ 1".into()));
    }
    for k in 0..grid.values.len() {
        if grid.mask[k] == NodeKind::Boundary && !grid.values[k].is_finite() {
            return Err(Error::Precondition(format!("boundary datum at node {k} is not finite")));
        }
    }
    if let Some(pf) = &prob.p_field {
        if prob.operator == Operator::PxLaplace {
            pf.range_on(grid)?;
        }
    }
    let interior = interior_nodes(grid);
    let order = BandOrder::new(grid);
    let eps = default_eps(grid, opts);
    let tol = tolerance(grid, opts);
    let mut field = grid.clone();
    field.values = harmonic_extension(grid, &order, &interior)?;
    let negative_data_warning = prob.operator != Operator::PxLaplace && grid.boundary_range().0 < 0.0;
    if negative_data_warning {
        log::warn!("boundary data takes negative values; the estimates assume u ≥ 0");
    }
    let mut history = Vec::new();
    let mut clipped_nodes = 0;
    let mut upwind_nodes = 0;

    let converged = match prob.operator {
        Operator::PxLaplace => {
            let pf = prob.p_field.as_ref().expect("validated");
            let mut done = false;
            for _ in 0..opts.max_iters {
                let rows: Vec<(Patch, f64, bool)> = interior
                    .par_iter()
                    .map(|&k| {
                        let p = patch(&field, &field.values, k);
                        let (c, clip) = px_row(&field, pf, &p, field.point(k), eps);
                        (c, dot9(&c, &p), clip)
                    })
                    .collect();
                let r = max_abs(&rows.iter().map(|x| x.1).collect::<Vec<_>>());
                history.push(r);
                clipped_nodes = rows.iter().filter(|x| x.2).count();
                if r <= tol {
                    done = true;
                    break;
                }
                if !r.is_finite() {
                    break;
                }
                let lin: Vec<(Patch, f64)> = rows.iter().map(|x| (x.0, 0.0)).collect();
                field.values = solve_linear(&field, &order, &interior, &lin, |k| grid.values[k])?;
            }
            done
        }
        _ => {
            let set = admissible_weights(&prob.ell);
            let drift = prob.nl.as_ref().expect("validated");
            let sign = prob.sign();
            let eval_all = |u: &[f64]| -> Result<Vec<stencil::LocalEval>> {
                interior
                    .par_iter()
                    .map(|&k| evaluate(&set, &patch(grid, u, k), grid.h, sign, drift, eps))
                    .collect()
            };
            let mut evals = eval_all(&field.values)?;
            let mut r = max_abs(&evals.iter().map(|e| e.value).collect::<Vec<_>>());
            let mut done = false;
            for _ in 0..opts.max_iters {
                history.push(r);
                if r <= tol {
                    done = true;
                    break;
                }
                let rows: Vec<(Patch, f64)> = evals.iter().map(|e| (e.coeffs, -e.value)).collect();
                let delta = solve_linear(&field, &order, &interior, &rows, |_| 0.0)?;
                let mut step = 1.0;
                let mut accepted = None;
                for _ in 0..30 {
                    let trial: Vec<f64> = field.values.iter().zip(&delta).map(|(u, d)| u + step * d).collect();
                    let ev = eval_all(&trial)?;
                    let rt = max_abs(&ev.iter().map(|e| e.value).collect::<Vec<_>>());
                    if rt < (1.0 - 1e-4 * step) * r {
                        accepted = Some((trial, ev, rt));
                        break;
                    }
                    step *= 0.5;
                }
                match accepted {
                    Some((u, ev, rt)) => {
                        field.values = u;
                        evals = ev;
                        r = rt;
                    }
                    None => break,
                }
            }
            upwind_nodes = evals.iter().filter(|e| e.rule == GradientRule::Upwind).count();
            if !done && history.last() != Some(&r) {
                history.push(r);
            }
            done
        }
    };
    let residual = *history.last().unwrap_or(&f64::NAN);
    if !converged {
        return Err(Error::NonConvergence { iterations: history.len(), last: residual, history });
    }
    Ok(Solution {
        report: SolveReport {
            iterations: history.len() - 1,
            residual,
            tolerance: tol,
            history,
            negative_data_warning,
            upwind_nodes,
            clipped_nodes,
        },
        field,
    })
}

/// Offending node of an inequality check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorstNode {
    pub point: Point,
    /// Signed amount by which the inequality fails.
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub violations: usize,
    pub worst: Option<WorstNode>,
}

impl InequalityCheck {
    fn from_excess(points: &[Point], excess: &[f64]) -> Self {
        let mut violations = 0;
        let mut worst: Option<WorstNode> = None;
        for (p, &e) in points.iter().zip(excess) {
            if e > 0.0 || e.is_nan() {
                violations += 1;
                if worst.is_none_or(|w| e > w.excess || e.is_nan()) {
                    worst = Some(WorstNode { point: *p, excess: e });
                }
            }
        }
        InequalityCheck { violations, worst }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Discrete viscosity inequalities at every checked interior node.
///
/// `supersolution_plus`: `P⁺(D²u) + Φ(|Du|) ≥ −tol`;
/// `subsolution_plus`: `P⁺(D²u) + Φ(|Du|) ≤ tol`;
/// `supersolution_minus`: `P⁻(D²u) − Φ(|Du|) ≥ −tol`;
/// `subsolution_minus`: `P⁻(D²u) − Φ(|Du|) ≤ tol`.
/// A solution of the general equation satisfies `supersolution_plus` and `subsolution_minus`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViscosityReport {
    pub tol: f64,
    pub nodes_checked: usize,
    pub supersolution_plus: InequalityCheck,
    pub subsolution_plus: InequalityCheck,
    pub supersolution_minus: InequalityCheck,
    pub subsolution_minus: InequalityCheck,
}

impl ViscosityReport {
    /// Both inequalities a solution of the general equation must satisfy.
    pub fn solution_inequalities_hold(&self) -> bool {
        self.supersolution_plus.passed() && self.subsolution_minus.passed()
    }
}

/// [`check_viscosity_inequalities_in`] over the whole interior.
pub fn check_viscosity_inequalities(prob: &Problem, field: &GridField, tol: f64) -> Result<ViscosityReport> {
    check_viscosity_inequalities_in(prob, field, tol, |_| true)
}

/// Evaluates the four one-sided inequalities at interior nodes with `region(x)`.
pub fn check_viscosity_inequalities_in<F>(prob: &Problem, field: &GridField, tol: f64, region: F) -> Result<ViscosityReport>
where
    F: Fn(Point) -> bool + Sync,
{
    let drift = prob
        .nl
        .as_ref()
        .ok_or_else(|| Error::Precondition("viscosity check needs the drift nonlinearity".into()))?;
    let set = admissible_weights(&prob.ell);
    let eps = field.h * field.h;
    let nodes: Vec<usize> = interior_nodes(field).into_iter().filter(|&k| region(field.point(k))).collect();
    let vals: Vec<(f64, f64)> = nodes
        .par_iter()
        .map(|&k| {
            let p = patch(field, &field.values, k);
            let plus = evaluate(&set, &p, field.h, PucciSign::Plus, drift, eps)?.value;
            let minus = evaluate(&set, &p, field.h, PucciSign::Minus, drift, eps)?.value;
            Ok((plus, minus))
        })
        .collect::<Result<_>>()?;
    let pts: Vec<Point> = nodes.iter().map(|&k| field.point(k)).collect();
    let ex = |f: &dyn Fn(&(f64, f64)) -> f64| vals.iter().map(f).collect::<Vec<f64>>();
    Ok(ViscosityReport {
        tol,
        nodes_checked: nodes.len(),
        supersolution_plus: InequalityCheck::from_excess(&pts, &ex(&|v| -v.0 - tol)),
        subsolution_plus: InequalityCheck::from_excess(&pts, &ex(&|v| v.0 - tol)),
        supersolution_minus: InequalityCheck::from_excess(&pts, &ex(&|v| -v.1 - tol)),
        subsolution_minus: InequalityCheck::from_excess(&pts, &ex(&|v| v.1 - tol)),
    })
}
