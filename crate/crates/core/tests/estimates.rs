use carleson_core::estimates::*;
use carleson_core::geometry::{corkscrew, DomainSpec};
use carleson_core::nonlinearity::{Nonlinearity, RescaledNonlinearity};
use carleson_core::solver::{Drift, EllipticityPair, GridField, PField, Problem, SolverOptions};
use carleson_core::Extended;
use proptest::prelude::*;

fn half_box(lo: [f64; 2], hi: [f64; 2], h: f64, f: impl Fn([f64; 2]) -> f64) -> GridField {
    GridField::over_box(&DomainSpec::half_space(), lo, hi, h, f).unwrap()
}

fn disc_field(h: f64, f: impl Fn([f64; 2]) -> f64) -> GridField {
    let dom = DomainSpec::disc([0.0, 0.0], 1.0).unwrap();
    GridField::over_box(&dom, [-1.1, -1.1], [1.1, 1.1], h, f).unwrap()
}

#[test]
fn constant_field_has_zero_harnack_integral() {
    let f = disc_field(1.0 / 16.0, |_| 3.0);
    let nl = Nonlinearity::log_model(1.0).unwrap();
    let cert = verify_interior_harnack(&f, [0.0, 0.0], 0.25, 0.5, &nl, 0.0).unwrap();
    assert_eq!(cert.value, Extended::Finite(0.0));
}

#[test]
fn linear_field_on_half_space_ball() {
    // m = 1/2, M = 3/2 and Φ_R(t) = t: ∫ dt/(2t) = log(3)/2.
    let f = half_box([-1.0, 0.0], [1.0, 2.0], 1.0 / 32.0, |p| p[1]);
    let cert = verify_interior_harnack(&f, [0.0, 1.0], 0.5, 1.0, &Nonlinearity::homogeneous(), 0.0).unwrap();
    let v = cert.value.finite().unwrap();
    assert!((v - 3f64.ln() / 2.0).abs() < 1e-10, "{v}");
}

#[test]
fn negative_values_are_rejected() {
    let f = half_box([-1.0, 0.0], [1.0, 2.0], 1.0 / 16.0, |p| p[1] - 0.6);
    assert!(verify_interior_harnack(&f, [0.0, 1.0], 0.25, 1.0, &Nonlinearity::homogeneous(), 0.0).is_err());
}

#[test]
fn oscillation_decay_of_linear_and_constant_fields() {
    let nl = Nonlinearity::homogeneous();
    let lin = disc_field(1.0 / 64.0, |p| p[0]);
    let fit = verify_osc_decay(&lin, [0.0, 0.0], 0.5, 1.0, &nl).unwrap();
    assert!(!fit.fallback && fit.c == 0.0);
    // Lattice balls are not exact discs: the ratio is 1/2 up to about h/ρ.
    assert!((fit.tau - 0.5).abs() < 0.02, "{}", fit.tau);
    assert!(fit.rungs.iter().all(|r| r.rho >= OSC_RUNG_FLOOR / 64.0));
    let flat = disc_field(1.0 / 32.0, |_| 2.0);
    assert_eq!(verify_osc_decay(&flat, [0.0, 0.0], 0.5, 1.0, &nl).unwrap().tau, 0.0);
}

#[test]
fn boundary_holder_fits() {
    let dom = DomainSpec::half_space();
    let nl = Nonlinearity::log_model(1.0).unwrap();
    let lin = half_box([-1.5, 0.0], [1.5, 1.5], 1.0 / 32.0, |p| p[1].max(0.0));
    let fit = verify_boundary_holder(&lin, &dom, [0.0, 0.0], 1.0, 1.0, &nl).unwrap();
    assert!(fit.at_window_edge && fit.alpha == ALPHA_WINDOW.1);
    assert!(fit.raw_slope.unwrap() > 0.9);
    assert!(fit.rungs.iter().all(|r| r.slack >= -1e-12));
    let zero = half_box([-1.5, 0.0], [1.5, 1.5], 1.0 / 32.0, |_| 0.0);
    let fit = verify_boundary_holder(&zero, &dom, [0.0, 0.0], 1.0, 1.0, &nl).unwrap();
    assert!(fit.rungs.iter().all(|r| r.slack >= 0.0));
    // Boundary data that does not vanish is refused.
    let lifted = half_box([-1.5, 0.0], [1.5, 1.5], 1.0 / 32.0, |p| p[1] + 1.0);
    assert!(verify_boundary_holder(&lifted, &dom, [0.0, 0.0], 1.0, 1.0, &nl).is_err());
}

#[test]
fn blowup_of_bounded_and_singular_fields() {
    let dom = DomainSpec::half_space();
    let ell = EllipticityPair::laplacian();
    let nl = Nonlinearity::log_model(1.0).unwrap();
    let h = 1.0 / 32.0;
    let bounded = half_box([-2.5, 0.0], [2.5, 2.5], h, |p| p[1].max(0.0));
    let rep = blowup_profile(&bounded, &dom, &ell, 1.0, &nl, 0.5).unwrap();
    assert!(rep.monotone && rep.alternative == Alternative::S0);
    // Poisson kernel with its pole on Γ: M_s ~ 1/s.
    let pole = [2.0, 0.0];
    let spike = half_box([-2.5, 0.0], [2.5, 2.5], h, |p| {
        let d2 = (p[0] - pole[0]).powi(2) + p[1] * p[1];
        if p[1] <= 0.0 { 0.0 } else { p[1] / d2 }
    });
    let rep = blowup_profile(&spike, &dom, &ell, 1.0, &nl, 0.5).unwrap();
    assert!(rep.monotone && rep.alternative == Alternative::S1ToS3);
    let g = rep.gamma.unwrap();
    assert!((g - 1.0).abs() < 0.15, "gamma = {g}");
    assert!(rep.ladder.windows(2).all(|w| w[0].s < w[1].s));
}

#[test]
fn carleson_on_linear_field() {
    let dom = DomainSpec::half_space();
    let nl = Nonlinearity::linear(1.0).unwrap();
    let u = half_box([-1.5, 0.0], [1.5, 1.5], 1.0 / 32.0, |p| p[1].max(0.0));
    let inst = carleson_instance(&u, &dom, [0.0, 0.0], 1.0, &nl).unwrap();
    assert_eq!(inst.smallest_trial, Some(C_TRIALS[0]));
    let c = inst.constant.unwrap();
    assert!(c > 0.0 && c <= C_TRIALS[0]);
    assert!(inst.trials.iter().all(|t| t.passed));
    let rep = verify_carleson(&u, &dom, [0.0, 0.0], 1.0, &nl).unwrap();
    assert_eq!(rep.per_instance_values, vec![c]);
    assert_eq!(rep.independence_spread, 0.0);
}

#[test]
fn boundary_harnack_of_identical_fields() {
    let dom = DomainSpec::half_space();
    let ell = EllipticityPair::new(1.0, 2.0).unwrap();
    let nl = Nonlinearity::log_model(1.0).unwrap();
    let u = half_box([-3.5, 0.0], [3.5, 3.5], 1.0 / 16.0, |p| p[1].max(0.0) * (1.0 + 0.1 * p[0].sin()));
    let rep = verify_boundary_harnack(&u, &u, &dom, &ell, 0.5, &nl, &BharnackGeometry::default(), 1e-8).unwrap();
    assert_eq!(rep.sup_ratio, 1.0);
    assert!(rep.ratio_within_barrier_bound);
}

#[test]
fn px_check_with_explicit_linear_solution() {
    let dom = DomainSpec::cube(1.0).unwrap();
    let big_h = 1.0;
    let u = GridField::over_box(&dom, [0.0, 0.0], [1.0, 1.0], 1.0 / 64.0, |p| 2.0 * big_h * p[1]).unwrap();
    let p = PField::affine(3.0, [-1.0, 0.0]);
    let rep = px_corollary_check(&u, None, &p, &dom, [0.5, 0.0], 0.25).unwrap();
    assert!((rep.p_range.0 - 2.0).abs() < 1e-12 && (rep.p_range.1 - 3.0).abs() < 1e-12);
    assert!(rep.passed && rep.margin.unwrap() > 0.0);
    // The supremum over B(w, R/C) of 2Hx₂ is 2HR/C, up to the grid.
    for t in &rep.trials {
        assert!(t.sup <= 2.0 * big_h * 0.25 / t.c_trial + 1e-12);
    }
}

#[test]
fn amplitude_matching_for_drift_operators() {
    let dom = DomainSpec::half_space();
    let ell = EllipticityPair::new(1.0, 2.0).unwrap();
    let h = 1.0 / 16.0;
    let a = corkscrew(&dom, [0.0, 0.0], 1.0).unwrap().point;
    let data = half_box([-2.0, 0.0], [2.0, 2.0], h, |p| if p[1] <= 0.0 { 0.0 } else { 1.0 + 0.2 * p[0] });
    let opts = SolverOptions::default();
    let rnl = |nl| RescaledNonlinearity::new(nl, 1.0).unwrap();
    let log = Problem::pucci_minus(ell, Drift::Rescaled(rnl(Nonlinearity::log_model(1.0).unwrap())));
    let m = match_at_corkscrew(&log, &data, a, 0.3, &opts).unwrap();
    assert_eq!(m.method, "amplitude_shooting");
    assert!(m.mismatch <= 1e-8 && m.solves <= 30);
    assert!((m.field.interpolate(a).unwrap() - 0.3).abs() <= 1e-8 * 0.3 * 1.01);
    let hom = Problem::pucci_minus(ell, Drift::Rescaled(rnl(Nonlinearity::homogeneous())));
    let m = match_at_corkscrew(&hom, &data, a, 0.3, &opts).unwrap();
    assert_eq!((m.method.as_str(), m.solves), ("rescale", 1));
    assert!(m.mismatch <= 1e-12);
}

#[test]
fn family_instances_are_sorted_and_complete() {
    let cfg = FamilyConfig::default();
    let inst = cfg.instances();
    assert_eq!(inst.len(), 81);
    assert!(inst.chunks(3).all(|c| c[0].scale > c[1].scale && c[1].scale > c[2].scale));
    let mut bad = cfg.clone();
    bad.h = 0.5;
    assert!(bad.validate().unwrap_err().is_input_error());
}

#[test]
fn solved_family_member_is_nonnegative() {
    let cfg = FamilyConfig { h: 1.0 / 16.0, ..Default::default() };
    let inst = FamilyInstance { domain: FamilyDomain::Graph, nl: FamilyNonlinearity::LogModel, scale: 0.5, seed: 11 };
    let s = family::solve_instance(&inst, &cfg).unwrap();
    assert!(s.report.residual <= s.report.tolerance);
    assert!(s.field.values.iter().all(|&v| v >= -1e-8));
}

#[test]
fn reports_round_trip_through_json() {
    let d = InstanceDescriptor { domain: "half_space".into(), nl: "log_model".into(), scale: 0.5, seed: Some(11) };
    let rep = EstimateReport::from_values(Theorem::InteriorHarnack, vec![d], vec![2.0], vec![]).with_raw(vec![0.3]);
    let text = serde_json::to_string(&rep).unwrap();
    assert!(text.contains("\"R\":0.5") && text.contains("\"theorem\":\"interior_harnack\""));
    let back: EstimateReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, rep);
    assert_eq!(rep.schema, REPORT_SCHEMA);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn homogeneous_certificate_is_scale_invariant(k in 0.01f64..100.0, seed in 0u64..1000) {
        let data = SeededData::new(seed);
        let u = disc_field(1.0 / 16.0, |p| data.eval(p));
        let ku = disc_field(1.0 / 16.0, |p| k * data.eval(p));
        let nl = Nonlinearity::homogeneous();
        let a = verify_interior_harnack(&u, [0.1, 0.0], 0.3, 0.5, &nl, 0.0).unwrap().value.finite().unwrap();
        let b = verify_interior_harnack(&ku, [0.1, 0.0], 0.3, 0.5, &nl, 0.0).unwrap().value.finite().unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
    }

    #[test]
    fn blowup_curves_are_non_increasing(seed in 0u64..1000, amp in 0.1f64..10.0) {
        let data = SeededData::new(seed);
        let f = half_box([-2.5, 0.0], [2.5, 2.5], 1.0 / 16.0, |p| amp * p[1].max(0.0) * data.eval(p));
        let rep = blowup_profile(&f, &DomainSpec::half_space(), &EllipticityPair::laplacian(), 1.0, &Nonlinearity::log_model(1.0).unwrap(), 0.5).unwrap();
        prop_assert!(rep.monotone);
    }
}
