use ricci_lab::constants::checks::{
    bump, epsilon_regularity_check, hamilton_ivey_check, moser_iteration_trace, parabolic_sobolev_check, unit_window,
    EpsilonFailure, MoserProblem, TestField,
};
use ricci_lab::rescaling::blowup_sequence;
use ricci_lab::flow::{dumbbell_profile, run_flow, FlowConfig, FlowTrajectory, MaxQuantity};
use ricci_lab::geometry::{make_round_sphere, make_warped, sampled_round_sphere, Center, Pole, Region};
use ricci_lab::rescaling::{parabolic_rescale, RescaleSpec};
use ricci_lab::Error;

fn sphere() -> FlowTrajectory {
    run_flow(&make_round_sphere(3, 1.0, 0.0).unwrap(), &FlowConfig::default()).unwrap()
}

/// Unit S³ on `[0, 0.1]`, stretched to unit time: `R` runs from 0.6 to 1.
fn sphere_window() -> FlowTrajectory {
    unit_window(&sphere(), 0.0, 0.1, Center::Pole(Pole::North)).unwrap()
}

#[test]
fn moser_ladder_on_a_sphere_window() {
    let w = sphere_window();
    let trace = moser_iteration_trace(&w, Center::Pole(Pole::North), 1.0, 12, &MoserProblem::scalar_curvature(3, 0.0)).unwrap();
    assert!(trace.all_hold());
    assert!(trace.c0_hypothesis_met);
    assert!((trace.sup_inner - 1.0).abs() < 1e-12);
    assert!(trace.sup_gap <= 0.02, "{}", trace.sup_gap);
}

#[test]
fn moser_ladder_of_zero_is_zero() {
    let w = sphere_window();
    let zero = MoserProblem {
        q: 25.0 / 6.0,
        b: 0.0,
        u: Box::new(|_, k| vec![0.0; k.len()]),
        f: Box::new(|_, k| vec![0.0; k.len()]),
        h: Box::new(|_, k| vec![0.0; k.len()]),
        c0: Some(1.0),
    };
    let trace = moser_iteration_trace(&w, Center::Pole(Pole::North), 1.0, 6, &zero).unwrap();
    assert!(trace.rungs.iter().all(|r| r.measured == 0.0 && r.holds));
}

#[test]
fn epsilon_regularity_holds_on_a_near_flat_window() {
    let s = dumbbell_profile(3, 64, 0.3, 4).unwrap();
    let traj = run_flow(&s, &FlowConfig { t_max: 0.005, ..Default::default() }).unwrap();
    let q = 1e90;
    let spec = RescaleSpec::new(q, 0.002, Center::Pole(Pole::North)).unwrap();
    let window = parabolic_rescale(&traj, &spec, (0.0, 1.0)).unwrap();
    let a = traj.curvatures().iter().map(|k| (-k.ric_inf).max(0.0)).fold(0.0, f64::max);
    let rep = epsilon_regularity_check(&window, Center::Pole(Pole::North), 1.0, a / q).unwrap();
    assert!(rep.applicable, "{:?}", rep.failures);
    assert_eq!(rep.holds, Some(true));
    assert!((rep.bound / ricci_lab::Magnitude::from_f64(rep.sup_out)).log10() >= 3.0);
}

#[test]
fn epsilon_regularity_gate_fails_on_sphere_blowups() {
    let seq = blowup_sequence(&sphere(), 4, MaxQuantity::Scalar).unwrap();
    for e in &seq.elements {
        let rep = epsilon_regularity_check(&e.trajectory, Center::Pole(Pole::North), 1.0, 0.0).unwrap();
        assert!(!rep.applicable);
        assert_eq!(rep.failures, vec![EpsilonFailure::Gate]);
        assert!(rep.holds.is_none());
    }
}

#[test]
fn epsilon_regularity_of_flat_data_is_trivial() {
    // a static window of a huge sphere has R ≈ 0
    let s = make_round_sphere(3, 1e200, 0.0).unwrap();
    let traj = FlowTrajectory::from_states(
        vec![s.clone(), s.with_time(1.0)],
        ricci_lab::flow::StopReason::TimeLimit,
        None,
        FlowConfig::default(),
        1,
    )
    .unwrap();
    let rep = epsilon_regularity_check(&traj, Center::Pole(Pole::North), 1.0, 0.0).unwrap();
    assert!(rep.applicable);
    assert_eq!(rep.holds, Some(true));
}

#[test]
fn sobolev_inequality_on_a_sphere_window() {
    let w = sphere_window();
    let ball = Region::ball(&sampled_round_sphere(3, 6.0, 256, 1.0).unwrap(), Center::Pole(Pole::North), 1.0);
    let v = bump(ball);
    let zero = |_: f64, _: f64| 0.0;
    let fields: Vec<TestField> = vec![&*v, &zero];
    let rep = parabolic_sobolev_check(&w, Center::Pole(Pole::North), 1.0, &fields).unwrap();
    let s = rep.samples[0];
    assert!(s.holds && (s.rhs / ricci_lab::Magnitude::from_f64(s.lhs)).log10() >= 1.0);
    assert!(rep.samples[1].holds && rep.samples[1].lhs == 0.0);

    let mut ratios = Vec::new();
    for x in [0.3, 0.15, 0.075] {
        let b = bump(Region::Cap { pole: Pole::North, x_extent: x });
        let rep = parabolic_sobolev_check(&w, Center::Pole(Pole::North), 1.0, &[&*b]).unwrap();
        let s = rep.samples[0];
        assert!(s.holds);
        ratios.push(s.lhs / s.rhs.to_f64());
    }
    assert!(ratios.iter().all(|r| r.is_finite() && *r < 1.0));

    let bad = |_: f64, _: f64| 1.0;
    assert!(matches!(
        parabolic_sobolev_check(&w, Center::Pole(Pole::North), 1.0, &[&bad]),
        Err(Error::InvalidTestField(_))
    ));
}

#[test]
fn pinching_on_the_unit_sphere() {
    let rep = hamilton_ivey_check(&sphere()).unwrap();
    assert!(rep.normalized && rep.all_hold());
    assert!(rep.samples.iter().all(|s| s.nu > 0.0 && s.rhs == 0.0));
    // read literally the estimate fails once c(t) < e^{-9}(1+t)
    assert!(!rep.literal_all_hold());
}

#[test]
fn pinching_needs_dimension_three() {
    let traj = run_flow(&make_round_sphere(4, 1.0, 0.0).unwrap(), &FlowConfig::default()).unwrap();
    assert!(matches!(hamilton_ivey_check(&traj), Err(Error::NotApplicable(_))));
}

#[test]
fn pinching_with_negative_curvature() {
    // ψ bulging at the equator gives negative radial sectional curvature there
    let m = 64;
    let psi: Vec<f64> = (0..=m)
        .map(|j| {
            let x = std::f64::consts::PI * j as f64 / m as f64;
            x.sin() * (1.0 + 0.5 * x.sin().powi(4))
        })
        .collect();
    let s = make_warped(3, psi, vec![1.0; m + 1], 0.0).unwrap();
    let traj = FlowTrajectory::from_states(vec![s], ricci_lab::flow::StopReason::TimeLimit, None, FlowConfig::default(), 0)
        .unwrap();
    let rep = hamilton_ivey_check(&traj).unwrap();
    let neg: Vec<_> = rep.samples.iter().filter(|s| s.nu < 0.0).collect();
    assert!(!neg.is_empty());
    for s in neg {
        let a = s.nu.abs();
        assert!((s.rhs - a * (a.ln() - 3.0)).abs() < 1e-12);
    }
}
