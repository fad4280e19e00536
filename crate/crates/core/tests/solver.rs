use carleson_core::geometry::DomainSpec;
use carleson_core::nonlinearity::{Nonlinearity, RescaledNonlinearity};
use carleson_core::solver::*;
use proptest::prelude::*;

fn slab(h: f64, f: impl Fn([f64; 2]) -> f64) -> GridField {
    GridField::over_box(&DomainSpec::half_space(), [-1.0, 0.0], [1.0, 1.0], h, f).unwrap()
}

fn square(h: f64, f: impl Fn([f64; 2]) -> f64) -> GridField {
    let dom = DomainSpec::cube(1.0).unwrap();
    GridField::over_box(&dom, [0.0, 0.0], [1.0, 1.0], h, f).unwrap()
}

#[test]
fn linear_data_is_reproduced_on_the_slab() {
    let g = slab(1.0 / 64.0, |p| p[1]);
    let sol = solve_dirichlet(&Problem::laplace(), &g, &SolverOptions::default()).unwrap();
    let err = sol.field.max_error(|p| p[1]);
    assert!(err <= 1e-10, "max error {err}");
    assert!(residual(&Problem::laplace(), &sol.field).unwrap() <= 1e-8);
}

#[test]
fn constants_solve_the_disc_problem() {
    let dom = DomainSpec::disc([0.0, 0.0], 1.0).unwrap();
    let g = GridField::over_box(&dom, [-1.1, -1.1], [1.1, 1.1], 0.05, |_| 1.0).unwrap();
    let sol = solve_dirichlet(&Problem::laplace(), &g, &SolverOptions::default()).unwrap();
    assert!(sol.field.max_error(|_| 1.0) < 1e-12);
}

#[test]
fn harmonic_quadratic_for_constant_exponent_two() {
    let exact = |p: [f64; 2]| p[0] * p[0] - p[1] * p[1];
    let prob = Problem::px_laplace(PField::constant(2.0));
    let mut errs = Vec::new();
    for h in [1.0 / 32.0, 1.0 / 64.0] {
        let g = square(h, exact);
        let sol = solve_dirichlet(&prob, &g, &SolverOptions::default()).unwrap();
        let e = sol.field.max_error(exact);
        assert!(e <= 5.0 * h * h, "h = {h}: {e}");
        errs.push(e);
    }
    // Quadratics are exact for the 5-point Laplacian; only round-off remains.
    assert!(errs[1] < 1e-10);
}

#[test]
fn perturbed_node_raises_residual_by_inverse_h_squared() {
    let h = 1.0 / 32.0;
    let g = slab(h, |p| p[1]);
    let mut f = solve_dirichlet(&Problem::laplace(), &g, &SolverOptions::default()).unwrap().field;
    let k = f.index(f.nx / 2, f.ny / 2);
    f.values[k] += 1.0;
    let r = residual(&Problem::laplace(), &f).unwrap();
    assert!(r >= 4.0 / (h * h) - 1e-6, "{r}");
}

#[test]
fn convex_paraboloid_fails_the_supersolution_test() {
    let g = slab(1.0 / 32.0, |p| p[0] * p[0] + p[1] * p[1]);
    let rep = check_viscosity_inequalities(&Problem::laplace(), &g, 1e-8).unwrap();
    assert_eq!(rep.supersolution_plus.violations, g.interior_count());
    assert!((rep.supersolution_plus.worst.unwrap().excess - 4.0).abs() < 1e-6);
    assert!(rep.subsolution_plus.passed());
}

fn log_problem(op: Operator, r: f64) -> Problem {
    let ell = EllipticityPair::new(1.0, 2.0).unwrap();
    let drift = Drift::Rescaled(RescaledNonlinearity::new(Nonlinearity::log_model(1.0).unwrap(), r).unwrap());
    match op {
        Operator::PucciPlusDrift => Problem::pucci_plus(ell, drift),
        _ => Problem::pucci_minus(ell, drift),
    }
}

#[test]
fn converged_solves_pass_their_own_viscosity_check() {
    let h = 1.0 / 32.0;
    let g = slab(h, |p| (1.0 + p[0]) * p[1] + 0.5 * p[1] * p[1]);
    for op in [Operator::PucciPlusDrift, Operator::PucciMinusDrift] {
        let prob = log_problem(op, 0.5);
        let sol = solve_dirichlet(&prob, &g, &SolverOptions::default()).unwrap();
        assert!(sol.report.residual <= sol.report.tolerance);
        let rep = check_viscosity_inequalities(&prob, &sol.field, 10.0 * sol.report.tolerance).unwrap();
        match op {
            Operator::PucciPlusDrift => {
                assert!(rep.supersolution_plus.passed() && rep.subsolution_plus.passed());
            }
            _ => assert!(rep.supersolution_minus.passed() && rep.subsolution_minus.passed()),
        }
    }
}

#[test]
fn comparison_and_nonnegativity() {
    let h = 1.0 / 32.0;
    let prob = log_problem(Operator::PucciMinusDrift, 1.0);
    let opts = SolverOptions::default();
    let lo = solve_dirichlet(&prob, &slab(h, |p| p[1] * (1.0 + p[0].sin())), &opts).unwrap();
    let hi = solve_dirichlet(&prob, &slab(h, |p| p[1] * (1.5 + p[0].sin())), &opts).unwrap();
    let tol = 10.0 * opts.tol_solve;
    for k in 0..lo.field.values.len() {
        if lo.field.is_active(k) {
            assert!(hi.field.values[k] >= lo.field.values[k] - tol);
            assert!(lo.field.values[k] >= -tol);
        }
    }
    assert!(!lo.report.negative_data_warning);
}

#[test]
fn negative_data_is_flagged() {
    let g = slab(1.0 / 16.0, |p| p[1] - 0.5);
    let sol = solve_dirichlet(&Problem::laplace(), &g, &SolverOptions::default()).unwrap();
    assert!(sol.report.negative_data_warning);
}

#[test]
fn refinement_reduces_error_for_smooth_harmonic_data() {
    // e^x cos y is harmonic but not reproduced exactly by the stencil.
    let exact = |p: [f64; 2]| p[0].exp() * p[1].cos();
    let mut errs = Vec::new();
    for h in [1.0 / 16.0, 1.0 / 32.0] {
        let sol = solve_dirichlet(&Problem::px_laplace(PField::constant(2.0)), &square(h, exact), &SolverOptions::default()).unwrap();
        errs.push(sol.field.max_error(exact));
    }
    assert!(errs[0] / errs[1] >= 3.0, "{errs:?}");
}

#[test]
fn variable_exponent_problem_converges() {
    let g = square(1.0 / 32.0, |p| p[1] + 0.1 * p[0]);
    let prob = Problem::px_laplace(PField::affine(3.0, [-1.0, 0.0]));
    let sol = solve_dirichlet(&prob, &g, &SolverOptions::default()).unwrap();
    assert!(sol.report.residual <= sol.report.tolerance);
    assert_eq!(sol.report.clipped_nodes, 0);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let g = slab(1.0 / 32.0, |p| p[1] * (1.0 + p[0] * p[0]));
    let prob = log_problem(Operator::PucciPlusDrift, 1.0);
    let run = |n| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .unwrap()
            .install(|| solve_dirichlet(&prob, &g, &SolverOptions::default()).unwrap().field.values)
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn missing_exponent_field_is_a_config_error() {
    let mut prob = Problem::px_laplace(PField::constant(2.0));
    prob.p_field = None;
    assert!(solve_dirichlet(&prob, &slab(0.25, |_| 0.0), &SolverOptions::default()).is_err());
    assert!(solve_dirichlet(&Problem::px_laplace(PField::constant(0.5)), &slab(0.25, |_| 0.0), &SolverOptions::default()).is_err());
}

fn rot(t: f64) -> Sym2 {
    [[t.cos(), -t.sin()], [t.sin(), t.cos()]]
}

fn conj(q: &Sym2, x: &Sym2) -> Sym2 {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[i][j] += q[k][i] * x[k][l] * q[l][j];
                }
            }
        }
    }
    out
}

proptest! {
    #[test]
    fn extremal_operators_are_ordered(a in -10.0..10.0f64, b in -10.0..10.0f64, c in -10.0..10.0f64, lam in 0.1..1.0f64, span in 1.0..5.0f64) {
        let ell = EllipticityPair::new(lam, lam * span).unwrap();
        let x = [[a, c], [c, b]];
        prop_assert!(pucci_apply(&ell, &x, PucciSign::Minus) <= pucci_apply(&ell, &x, PucciSign::Plus) + 1e-12);
    }

    #[test]
    fn extremal_operators_are_rotation_invariant(a in -10.0..10.0f64, b in -10.0..10.0f64, c in -10.0..10.0f64, t in 0.0..6.3f64) {
        let ell = EllipticityPair::new(0.7, 2.5).unwrap();
        let x = [[a, c], [c, b]];
        let y = conj(&rot(t), &x);
        for s in [PucciSign::Plus, PucciSign::Minus] {
            prop_assert!((pucci_apply(&ell, &x, s) - pucci_apply(&ell, &y, s)).abs() <= 1e-12 * (1.0 + a.abs() + b.abs() + c.abs()) * 10.0);
        }
    }
}
