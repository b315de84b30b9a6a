use std::f64::consts::PI;

use ricci_lab::flow::{
    curvature_maximizing_sequence, dumbbell_profile, run_flow, scalar_evolution_residual, step_warped,
    total_scalar_curvature, volume_diameter_bound_check, volume_evolution_residual, FlowConfig, FlowTrajectory,
    MaxQuantity, RicciBounds, StopReason,
};
use ricci_lab::geometry::{make_round_sphere, sampled_round_sphere, Form, MetricState, Region};

fn run_to(state: &MetricState, t_max: f64, stride: usize) -> FlowTrajectory {
    let cfg = FlowConfig {
        t_max,
        output_stride: stride,
        curvature_ceiling: 1e9,
        ..FlowConfig::default()
    };
    run_flow(state, &cfg).unwrap()
}

/// Five snapshots about `Δt = 1e-4` apart, starting at time `t` of the
/// flow from the round profile on `m` cells.
fn tail(m: usize, t: f64) -> FlowTrajectory {
    let s = sampled_round_sphere(3, 1.0, m, 0.0).unwrap();
    let head = run_to(&s, t, 1_000_000);
    let last = head.states().last().unwrap().clone();
    let dt = ricci_lab::flow::stable_dt(&last, &FlowConfig::default());
    let k = (1e-4 / dt).round().max(1.0) as usize;
    run_to(&last, 4.01 * (k as f64) * dt, k)
}

#[test]
fn warped_round_profile_tracks_exact_solution() {
    let s = sampled_round_sphere(3, 1.0, 256, 0.0).unwrap();
    let traj = run_to(&s, 0.125, 500);
    let mut worst: f64 = 0.0;
    for st in traj.states() {
        let c: f64 = 1.0 - 4.0 * st.t();
        let Form::Warped(p) = st.form() else { unreachable!() };
        for j in 0..=p.cells() {
            worst = worst.max((p.phi()[j] / c.sqrt() - 1.0).abs());
            if j > 0 && j < p.cells() {
                worst = worst.max((p.psi()[j] / (c.sqrt() * p.x(j).sin()) - 1.0).abs());
            }
        }
    }
    assert!(worst <= 1e-4, "relative error {worst:e}");
}

#[test]
fn warped_round_profile_t_hat_within_one_percent() {
    let s = sampled_round_sphere(3, 1.0, 256, 0.0).unwrap();
    let cfg = FlowConfig {
        curvature_ceiling: 300.0,
        output_stride: 1000,
        ..FlowConfig::default()
    };
    let traj = run_flow(&s, &cfg).unwrap();
    assert_eq!(traj.stop_reason(), StopReason::CurvatureCeiling);
    let t_hat = traj.t_hat().unwrap();
    assert!((t_hat - 0.25).abs() <= 0.0025, "T_hat {t_hat}");
}

#[test]
fn exact_sphere_residuals_are_tiny() {
    let traj = run_flow(&make_round_sphere(3, 1.0, 0.0).unwrap(), &FlowConfig::default()).unwrap();
    let mut worst: f64 = 0.0;
    for i in 2..traj.len() - 2 {
        let r = scalar_evolution_residual(&traj, i).unwrap();
        let scale = traj.curvatures()[i].r[0].powi(2);
        worst = worst.max(r[0].abs() / scale);
        let v = volume_evolution_residual(&traj, i).unwrap();
        worst = worst.max(v / total_scalar_curvature(&traj, i).abs());
    }
    assert!(worst <= 1e-6, "{worst:e}");
}

#[test]
fn static_comparison_residual_is_minus_twice_ricci_square() {
    let s = make_round_sphere(3, 1.0, 0.0).unwrap();
    let traj = FlowTrajectory::from_states(
        vec![s.clone(), s.clone().with_time(0.1), s.with_time(0.2)],
        StopReason::TimeLimit,
        None,
        FlowConfig::default(),
        2,
    )
    .unwrap();
    let r = scalar_evolution_residual(&traj, 1).unwrap();
    assert_eq!(r[0], -2.0 * 12.0);
    let v = volume_evolution_residual(&traj, 1).unwrap();
    assert!((v - total_scalar_curvature(&traj, 1)).abs() < 1e-9);
}

#[test]
fn warped_residuals_converge_at_second_order() {
    let mut max_res = Vec::new();
    let mut vol_res = Vec::new();
    for m in [64, 128, 256] {
        let traj = tail(m, 0.12);
        let r = scalar_evolution_residual(&traj, 2).unwrap();
        max_res.push(r.iter().fold(0.0f64, |a, v| a.max(v.abs())));
        vol_res.push(volume_evolution_residual(&traj, 2).unwrap() / total_scalar_curvature(&traj, 2).abs());
    }
    for w in max_res.windows(2).chain(vol_res.windows(2)) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 1.8, "{max_res:?} {vol_res:?}");
    }
}

#[test]
fn dumbbell_neck_pinches_and_attracts_the_maximum() {
    let s = dumbbell_profile(3, 128, 0.15, 4).unwrap();
    let m = 128;
    let mut cur = s.clone();
    let mut prev = cur_neck(&cur);
    for _ in 0..50 {
        let dt = ricci_lab::flow::stable_dt(&cur, &FlowConfig::default());
        cur = step_warped(&cur, dt).unwrap();
        let now = cur_neck(&cur);
        assert!(now < prev);
        prev = now;
    }
    let cfg = FlowConfig {
        curvature_ceiling: 300.0,
        output_stride: 200,
        ..FlowConfig::default()
    };
    let traj = run_flow(&s, &cfg).unwrap();
    assert!(traj.singular());
    let seq = curvature_maximizing_sequence(&traj, 3, MaxQuantity::Scalar).unwrap();
    let last = seq.last().unwrap();
    assert!((last.node as i64 - m as i64 / 2).abs() <= 2, "max at node {}", last.node);
    let track = traj.max_curvature_track();
    assert!(track.windows(2).all(|w| w[1].value >= w[0].value));
}

fn cur_neck(s: &MetricState) -> f64 {
    let Form::Warped(p) = s.form() else { unreachable!() };
    p.psi()[p.cells() / 2]
}

#[test]
fn volume_diameter_bounds_on_sphere_window() {
    // c(t) = 10 − 4t stays within |Ric| ≤ 2 on [0, 1]
    let traj = run_to(&make_round_sphere(3, 10.0, 0.0).unwrap(), 1.0, 1);
    let rep = volume_diameter_bound_check(&traj, 0.0, Region::Whole, RicciBounds::unit(3)).unwrap();
    assert!(rep.hypothesis_met && rep.holds);
    let end = rep.samples.last().unwrap();
    assert!((end.volume - end.volume_lower).abs() < 1e-12 && (end.diameter - end.diameter_upper).abs() < 1e-12);

    let shrinking = run_flow(&make_round_sphere(3, 4.2, 0.0).unwrap(), &FlowConfig { t_max: 1.0, ..Default::default() }).unwrap();
    let rep = volume_diameter_bound_check(&shrinking, 0.0, Region::Whole, RicciBounds::unit(3)).unwrap();
    assert!(!rep.hypothesis_met);
    assert!(rep.ric_max > 2.0);
    let _ = PI;
}
