use ricci_lab::flow::{
    dumbbell_profile, run_flow, scale_free_curvature, CurvaturePoint, FlowConfig, FlowTrajectory, MaxQuantity,
};
use ricci_lab::geometry::{curvature, diameter, make_round_sphere, Center, Form, Pole};
use ricci_lab::rescaling::{
    blowup_sequence, critical_integral_invariance, normalized_window, parabolic_rescale, RescaleSpec,
};

fn sphere() -> FlowTrajectory {
    run_flow(&make_round_sphere(3, 1.0, 0.0).unwrap(), &FlowConfig::default()).unwrap()
}

fn dumbbell() -> FlowTrajectory {
    let s = dumbbell_profile(3, 64, 0.3, 4).unwrap();
    run_flow(&s, &FlowConfig { t_max: 0.02, output_stride: 10, ..Default::default() }).unwrap()
}

fn profile_gap(a: &FlowTrajectory, b: &FlowTrajectory) -> f64 {
    let mut worst: f64 = 0.0;
    for t in a.times() {
        let (x, y) = (a.state_at(t).unwrap(), b.state_at(t).unwrap());
        match (x.form(), y.form()) {
            (Form::RoundSphere { c: c0 }, Form::RoundSphere { c: c1 }) => worst = worst.max((c0 - c1).abs() / c0),
            (Form::Warped(p), Form::Warped(q)) => {
                for (u, v) in p.phi().iter().chain(p.psi()).zip(q.phi().iter().chain(q.psi())) {
                    worst = worst.max((u - v).abs());
                }
            }
            _ => unreachable!(),
        }
    }
    worst
}

#[test]
fn identity_spec_reproduces_the_run() {
    let traj = dumbbell();
    let r = parabolic_rescale(&traj, &RescaleSpec::identity(), (0.0, traj.t_end())).unwrap();
    assert_eq!(r.times(), traj.times());
    assert_eq!(profile_gap(&traj, &r), 0.0);
}

#[test]
fn sphere_anchor_is_normalized_and_lengths_scale() {
    let traj = sphere();
    let ti = 0.2;
    let q = 6.0 / (1.0 - 4.0 * ti);
    let spec = RescaleSpec::new(q, ti, Center::Pole(Pole::North)).unwrap();
    let r = parabolic_rescale(&traj, &spec, (-0.5, 0.0)).unwrap();
    assert!((curvature(r.states().last().unwrap()).unwrap().r[0] - 1.0).abs() < 1e-12);
    for s in r.states() {
        let src = traj.state_at(spec.source_time(s.t())).unwrap();
        let ratio = diameter(s).value / diameter(&src).value;
        assert!((ratio / q.sqrt() - 1.0).abs() < 1e-12);
        let a = scale_free_curvature(s).unwrap();
        let b = scale_free_curvature(&src).unwrap();
        assert!((a / b - 1.0).abs() < 1e-12);
    }
}

#[test]
fn rescale_then_inverse_is_identity() {
    let traj = sphere();
    let spec = RescaleSpec::new(40.0, 0.1, Center::Node(0)).unwrap();
    let span = (spec.target_time(0.0), spec.target_time(0.24));
    let r = parabolic_rescale(&traj, &spec, span).unwrap();
    let back = parabolic_rescale(&r, &spec.inverse(), (0.0, 0.24)).unwrap();
    let sub = parabolic_rescale(&traj, &RescaleSpec::identity(), (0.0, 0.24)).unwrap();
    assert!(profile_gap(&sub, &back) <= 1e-10);

    let traj = dumbbell();
    let spec = RescaleSpec::new(10.0, 0.005, Center::Node(32)).unwrap();
    let end = traj.t_end();
    let r = parabolic_rescale(&traj, &spec, (spec.target_time(0.0), spec.target_time(end))).unwrap();
    let back = parabolic_rescale(&r, &spec.inverse(), (0.0, end)).unwrap();
    assert!(profile_gap(&traj, &back) <= 1e-6);
}

#[test]
fn critical_integral_is_scale_invariant_on_the_sphere() {
    let traj = sphere();
    for q in [1e-3, 1.0, 1e3] {
        let spec = RescaleSpec::new(q, 0.05, Center::Node(0)).unwrap();
        let rep = critical_integral_invariance(&traj, &spec, (0.05, 0.24), 2.5).unwrap();
        assert!(rep.relative_diff <= 1e-10, "Q = {q}: {}", rep.relative_diff);
        let rep = critical_integral_invariance(&traj, &spec, (0.05, 0.24), 2.0).unwrap();
        assert!((rep.ratio / q.sqrt() - 1.0).abs() <= 1e-8, "Q = {q}: {}", rep.ratio);
    }
    let spec = RescaleSpec::new(1.0, 0.0, Center::Node(0)).unwrap();
    assert_eq!(critical_integral_invariance(&traj, &spec, (0.0, 0.2), 2.5).unwrap().relative_diff, 0.0);
}

#[test]
fn critical_integral_is_scale_invariant_on_a_warped_flow() {
    let traj = dumbbell();
    let spec = RescaleSpec::new(10.0, 0.0, Center::Node(32)).unwrap();
    let rep = critical_integral_invariance(&traj, &spec, (0.002, 0.015), 2.5).unwrap();
    assert!(rep.relative_diff <= 1e-6, "{}", rep.relative_diff);
}

#[test]
fn sphere_blowup_sequence_is_self_similar() {
    let traj = sphere();
    let seq = blowup_sequence(&traj, 5, MaxQuantity::Scalar).unwrap();
    assert!(!seq.elements.is_empty());
    let first = &seq.elements[0];
    for e in &seq.elements {
        assert!((e.anchor_r - 1.0).abs() < 1e-12);
        assert!(e.normalized);
        assert_eq!(e.ric_lower_bound, 0.0);
        assert!((e.critical_integral / first.critical_integral - 1.0).abs() < 1e-6);
        assert!((e.kappa / first.kappa - 1.0).abs() < 1e-9 && e.kappa > 0.0);
    }
    let one = blowup_sequence(&traj, 1, MaxQuantity::Scalar).unwrap();
    assert_eq!(one.elements.len(), 1);
}

#[test]
fn critical_integrals_vanish_when_the_global_integral_is_finite() {
    let traj = dumbbell();
    let t = traj.t_end();
    let mut prev = f64::INFINITY;
    for q in [1e2, 1e3, 1e4] {
        let k = curvature(&traj.state_at(t).unwrap()).unwrap();
        let anchor = CurvaturePoint { index: traj.len() - 1, node: 32, x: std::f64::consts::FRAC_PI_2, t, q: q * k.max_rm() };
        let e = normalized_window(&traj, anchor).unwrap();
        assert!(e.critical_integral < prev);
        prev = e.critical_integral;
    }
    assert!(prev < 1e-3, "{prev}");
}
