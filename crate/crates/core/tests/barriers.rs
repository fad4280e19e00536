use carleson_core::barriers::*;
use carleson_core::nonlinearity::{Nonlinearity, PhiTable, RescaledNonlinearity};
use carleson_core::solver::{Drift, EllipticityPair};
use std::time::Instant;

fn log_rnl(r: f64) -> RescaledNonlinearity {
    RescaledNonlinearity::new(Nonlinearity::log_model(1.0).unwrap(), r).unwrap()
}

#[test]
fn regularized_drift_values() {
    let d = Drift::Original(Nonlinearity::linear(1.0).unwrap());
    let pe = build_phi_eps(&d, 0.1).unwrap();
    assert!((pe.value(0.05).unwrap() - 0.11).abs() < 1e-15);
    assert!((pe.value(0.3).unwrap() - 1.1 * 0.3).abs() < 1e-15);
    let tab = PhiTable::new(vec![0.0, 1.0, 2.0], vec![0.5, 1.0, 2.0]).unwrap();
    let bad = Drift::Original(Nonlinearity::tabulated(tab, 1.0).unwrap());
    assert!(build_phi_eps(&bad, 0.1).is_err());
}

#[test]
fn boundary_pair_for_log_model() {
    let ell = EllipticityPair::new(1.0, 2.0).unwrap();
    for r in [1.0, 0.1] {
        let pair = select_ctilde(1.0, 10.0, &log_rnl(r), &ell, [0.0, 2.0], [0.0, -1.0]).unwrap();
        for b in [&pair.lower, &pair.upper] {
            let bar = b.barrier.as_ref().unwrap();
            assert!(bar.certificate.holds());
            assert!(b.shooting_residual <= 1e-8);
            assert!(b.mesh_residual <= 1e-8);
            assert!(b.linear_bound_ok);
            assert_eq!(bar.profile.len(), 4096);
        }
        let ends = shooting_endpoints(1.0, 10.0, &log_rnl(r), pair.ctilde).unwrap();
        assert!(ends.lower_at_zero_ok && ends.lower_at_level > 1.0 && ends.upper_at_third < 10.0);
    }
}

#[test]
fn homogeneous_upper_barrier_matches_exponential_profile() {
    let rnl = RescaledNonlinearity::new(Nonlinearity::homogeneous(), 1.0).unwrap();
    let ell = EllipticityPair::laplacian();
    let c = 4.0;
    let b = upper_barrier_w2(5.0, &rnl, &ell, c, [0.0, 0.0]).unwrap();
    let bar = b.barrier.unwrap();
    let mu1 = b.mu.expect_finite("mu1");
    // Φ_R(s) = s: f(t) = μ₁e^{−C̃t}, w̃₂(t) = μ₁(1 − e^{−C̃t})/C̃.
    for p in bar.profile.iter().step_by(97) {
        assert!((p.slope - mu1 * (-c * p.t).exp()).abs() <= 1e-10 * mu1);
        assert!((p.value - mu1 * (1.0 - (-c * p.t).exp()) / c).abs() <= 1e-10 * mu1);
    }
    assert!((mu1 * (1.0 - (-2.0 * c).exp()) / c - 5.0).abs() < 1e-9);
}

#[test]
fn linear_max_barrier_matches_closed_form() {
    let d = Drift::Original(Nonlinearity::linear(1.0).unwrap());
    let ell = EllipticityPair::laplacian();
    let eps = 0.1;
    let r0 = max_barrier_radius_bound(&d, &ell).unwrap();
    let r = 0.9 * r0.min(1.0);
    let b = radial_max_barrier(3.0, r, &d, &ell, eps, [0.0, 0.0]).unwrap();
    // φ_ε(s) = (1+ε)max{s, ε}: f linear up to τ = λ/(1+ε), then ε·exp((1+ε)t/λ − 1).
    let tau = 1.0 / (1.0 + eps);
    for p in &b.profile {
        let exact = if p.t <= tau { (1.0 + eps) * eps * p.t } else { eps * ((1.0 + eps) * p.t - 1.0).exp() };
        assert!((p.slope - exact).abs() <= 1e-10, "t = {}: {} vs {}", p.t, p.slope, exact);
    }
    assert!(b.certificate.holds());
    assert!(b.certificate.relation_residual < 1e-10);
    // Near 0 the profile is quadratic.
    let pts: Vec<_> = b.profile.iter().skip(1).take(50).collect();
    let slope = ((pts[49].value).ln() - (pts[0].value).ln()) / (pts[49].t.ln() - pts[0].t.ln());
    assert!((slope - 2.0).abs() < 0.05);
    assert!((b.eval([0.0, 0.0]).unwrap() - (3.0 + b.profile.last().unwrap().value)).abs() < 1e-12);
    assert!((b.eval([r, 0.0]).unwrap() - 3.0).abs() < 1e-12);
}

#[test]
fn almost_max_threshold_cases() {
    let ell = EllipticityPair::laplacian();
    let hom = Drift::Rescaled(RescaledNonlinearity::new(Nonlinearity::homogeneous(), 1.0).unwrap());
    let a = almost_max_threshold(1.0, &hom, &ell, 1.5).unwrap();
    let b = almost_max_threshold(100.0, &hom, &ell, 1.5).unwrap();
    assert!(a.maximum_principle_exact);
    assert_eq!(a.threshold, b.threshold);
    let log = Drift::Rescaled(log_rnl(1.0));
    let l = almost_max_threshold(10.0, &log, &ell, 1.5).unwrap();
    assert!(l.maximum_principle_exact && l.verified);
    let ts: Vec<f64> = carleson_core::numeric::log_grid(1e-6, 1e4, 300);
    let sq = PhiTable::sample(&ts, |t| if t < 1.0 { t.sqrt() } else { t }).unwrap();
    let d = Drift::Rescaled(RescaledNonlinearity::new(Nonlinearity::tabulated(sq, 1.0).unwrap(), 1.0).unwrap());
    let n = almost_max_threshold(10.0, &d, &ell, 1.5).unwrap();
    assert!(!n.maximum_principle_exact && n.verified);
    assert!(n.excess_at_threshold > 0.0 && n.excess_at_threshold <= 0.5 * 10.0);
    assert!(n.threshold <= n.r0);
}

#[test]
fn lemma_and_sharpness() {
    let start = Instant::now();
    let mut prev = f64::INFINITY;
    for eps in [0.05, 0.1, 0.2] {
        let rep = lemma61_check(eps).unwrap();
            assert!(rep.all_hold() && rep.k_hat <= 200.0);
        assert!(rep.k_hat <= prev);
        prev = rep.k_hat;
    }
    let a = sharpness_example(1e4, 0.03).unwrap();
    let b = sharpness_example(1e6, 0.03).unwrap();
    // At these H the rescaled level R stays below R̂, so the barrier is not admissible.
    assert!(!a.barrier_admissible && a.r < a.r_hat);
    assert!(a.chain.iter().all(|l| l.holds) && a.psi_lower_bound_holds);
    let ln_hmin = a.h_min_estimate.unwrap().ln().unwrap();
    assert!(ln_hmin > 100.0 && ln_hmin < 200.0, "{ln_hmin}");
    let c = sharpness_example(1e8, 0.03).unwrap();
    assert!(c.ratio_lower_bound.ln().unwrap() > b.ratio_lower_bound.ln().unwrap());
    assert!(a.gamma_exceeds_one && a.k_bracket_ok && b.k_bracket_ok);
    assert!(a.ratio_lower_bound.ln().unwrap() > 0.0);
    assert!(b.ratio_lower_bound.ln().unwrap() > a.ratio_lower_bound.ln().unwrap());
    assert!(start.elapsed().as_secs() < 30);
}

#[test]
fn rasterized_lower_barrier_is_a_discrete_subsolution() {
    use carleson_core::geometry::DomainSpec;
    use carleson_core::solver::{check_viscosity_inequalities_in, GridField, Problem};
    let ell = EllipticityPair::new(1.0, 2.0).unwrap();
    let rnl = log_rnl(0.1);
    let b = lower_barrier_w1(1.0, &rnl, &ell, 4.0, [0.0, 0.0]).unwrap();
    let bar = b.barrier.unwrap();
    let dom = DomainSpec::disc([0.0, 0.0], 2.0).unwrap();
    let h = 1.0 / 128.0;
    let field = GridField::over_box(&dom, [-2.0, -2.0], [2.0, 2.0], h, |x| {
        if bar.contains(x) { bar.eval(x).unwrap() } else { 0.0 }
    })
    .unwrap();
    let prob = Problem::pucci_plus(ell, Drift::Rescaled(rnl));
    let rep = check_viscosity_inequalities_in(&prob, &field, 1e-6, |x| {
        let r = x[0].hypot(x[1]);
        r > 1.0 + 2.0 * h && r < 2.0 - 2.0 * h
    })
    .unwrap();
    assert!(rep.nodes_checked > 1000);
    assert!(rep.subsolution_plus.passed());
}
