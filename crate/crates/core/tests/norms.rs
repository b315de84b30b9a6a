use std::f64::consts::PI;

use ricci_lab::flow::{dumbbell_profile, run_flow, FlowConfig, FlowTrajectory};
use ricci_lab::geometry::{make_round_sphere, Pole, Region};
use ricci_lab::norms::{
    alpha_threshold_scan, closed_form_sphere_norm, default_eps_sequence, extension_verdict, slice_norm,
    spacetime_norm, Classification, Conclusion, Hypothesis, NormQuery, Quantity,
};

fn sphere() -> FlowTrajectory {
    run_flow(&make_round_sphere(3, 1.0, 0.0).unwrap(), &FlowConfig::default()).unwrap()
}

/// `∫_0^b (6/c)^α · 2π² c^{3/2} dt` with `c = 1 − 4t`, by substitution
/// `u = c`: `(6^α 2π²/4) ∫_{1−4b}^1 u^{3/2−α} du`.
fn sphere_integral(alpha: f64, b: f64) -> f64 {
    let lo: f64 = 1.0 - 4.0 * b;
    let e = 2.5 - alpha;
    let inner = if e.abs() < 1e-14 { -lo.ln() } else { (1.0 - lo.powf(e)) / e };
    6f64.powf(alpha) * 2.0 * PI * PI / 4.0 * inner
}

#[test]
fn sphere_norm_matches_closed_form() {
    let traj = sphere();
    let q = NormQuery::new(Quantity::R, 2.0, Region::Whole, (0.0, 0.25 - 1e-6));
    let v = spacetime_norm(&traj, &q).unwrap();
    assert!((v / (6.0 * PI) - 1.0).abs() <= 5e-3, "{v}");
    for alpha in [1.0, 1.5, 2.0, 3.0] {
        let b = 0.2;
        let q = NormQuery::new(Quantity::R, alpha, Region::Whole, (0.0, b));
        let got = spacetime_norm(&traj, &q).unwrap();
        let want = sphere_integral(alpha, b).powf(1.0 / alpha);
        assert!((got / want - 1.0).abs() < 1e-9, "α = {alpha}: {got} vs {want}");
    }
    let cf = closed_form_sphere_norm(3, 2.0 * PI * PI, 0.25, 1.5).unwrap();
    assert!((cf - sphere_integral(1.5, 0.25).powf(1.0 / 1.5)).abs() < 1e-9 * cf);
}

#[test]
fn sphere_scan_separates_the_three_regimes() {
    let traj = sphere();
    let rows = alpha_threshold_scan(&traj, Quantity::R, &[2.0, 2.5, 3.0, f64::INFINITY], &default_eps_sequence()).unwrap();
    assert_eq!(rows[0].classification, Classification::Finite);
    assert!((rows[0].limit.unwrap() / (6.0 * PI) - 1.0).abs() < 1e-3);
    assert_eq!(rows[1].classification, Classification::LogDivergent);
    assert_eq!(rows[2].classification, Classification::PowerDivergent);
    assert!((rows[2].exponent - 0.5).abs() < 0.02, "{}", rows[2].exponent);
    assert_eq!(rows[3].classification, Classification::PowerDivergent);
    assert!((rows[3].exponent - 1.0).abs() < 0.02);
}

#[test]
fn norms_grow_with_region_and_interval() {
    let s = dumbbell_profile(3, 64, 0.3, 4).unwrap();
    let traj = run_flow(&s, &FlowConfig { t_max: 0.02, output_stride: 20, ..Default::default() }).unwrap();
    let end = traj.t_end();
    let mut prev = 0.0;
    for x in [0.3, 0.8, 1.6, 2.5, PI] {
        let region = Region::Cap { pole: Pole::North, x_extent: x };
        let v = spacetime_norm(&traj, &NormQuery::new(Quantity::Rm, 2.0, region, (0.0, end))).unwrap();
        assert!(v >= prev);
        prev = v;
    }
    let mut prev = 0.0;
    for b in [0.2, 0.5, 0.9, 1.0] {
        let v = spacetime_norm(&traj, &NormQuery::new(Quantity::AbsR, 2.0, Region::Whole, (0.0, b * end))).unwrap();
        assert!(v >= prev);
        prev = v;
    }
}

#[test]
fn holder_bound_against_sup_norm() {
    let traj = sphere();
    let iv = (0.0, 0.2);
    let sup = spacetime_norm(&traj, &NormQuery::new(Quantity::R, f64::INFINITY, Region::Whole, iv)).unwrap();
    assert!((sup - 6.0 / (1.0 - 0.8)).abs() < 1e-9);
    for alpha in [1.0, 2.0, 4.0] {
        let v = spacetime_norm(&traj, &NormQuery::new(Quantity::R, alpha, Region::Whole, iv)).unwrap();
        let vol: f64 = (0.25f64.powf(2.5) - 0.05f64.powf(2.5)) / 2.5 * 2.0 * PI * PI * 4f64.powf(1.5);
        assert!(v <= sup * vol.powf(1.0 / alpha) * (1.0 + 1e-9));
    }
}

#[test]
fn slice_norm_of_unit_sphere() {
    let s = make_round_sphere(3, 1.0, 0.0).unwrap();
    let v = slice_norm(&s, Quantity::R, 2.0).unwrap();
    assert!((v - 6.0 * (2.0 * PI * PI).sqrt()).abs() < 1e-10);
    assert_eq!(slice_norm(&s, Quantity::RMinus, 3.0).unwrap(), 0.0);
    assert!(slice_norm(&s, Quantity::R, 0.5).is_err());
}

#[test]
fn sphere_verdicts() {
    let traj = sphere();
    let v = extension_verdict(&traj, 2.0).unwrap();
    assert_eq!(v.conclusion, Conclusion::HypothesesFail(vec![Hypothesis::Alpha]));
    assert!(v.scalar_norm.is_finite() && v.consistent);
    let v = extension_verdict(&traj, 2.5).unwrap();
    assert_eq!(v.a, 0.0);
    assert_eq!(
        v.conclusion,
        Conclusion::HypothesesFail(vec![Hypothesis::ScalarNorm, Hypothesis::RiemannNorm])
    );
    assert_eq!(v.conclusion.to_string(), "hypotheses-fail(scalar-norm,riemann-norm)");
    assert!(v.consistent);
}

#[test]
fn out_of_range_intervals_are_rejected() {
    let traj = sphere();
    let q = NormQuery::new(Quantity::R, 2.0, Region::Whole, (0.0, 0.3));
    assert!(spacetime_norm(&traj, &q).is_err());
}
