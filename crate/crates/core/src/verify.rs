//! Named verification suites: each runs a group of end-to-end checks and
//! reports one pass/fail line per check.
//!
//! ```
//! let report = ricci_lab::verify::run_suite("constants", 1).unwrap();
//! assert!(report.iter().all(|o| o.passed));
//! ```

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constants::checks::{epsilon_regularity_check, hamilton_ivey_check, moser_iteration_trace, unit_window, MoserProblem};
use crate::constants::{croke_constants, lambda, moser_constants, r_kappa, sobolev_sigma};
use crate::error::{Error, Result};
use crate::flow::{
    run_flow, scalar_evolution_residual, stable_dt, total_scalar_curvature, volume_evolution_residual, FlowConfig,
    FlowTrajectory, MaxQuantity,
};
use crate::geometry::{
    ball_volume_ratio, make_round_sphere, rhat_inequality_check, sampled_round_sphere, Center, Form, Pole, Region,
};
use crate::norms::{
    alpha_threshold_scan, default_eps_sequence, extension_verdict, spacetime_norm, Classification, NormQuery, Quantity,
};
use crate::rescaling::{blowup_sequence, critical_integral_invariance, parabolic_rescale, RescaleSpec};

/// Result of one check.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    fn new(name: &str, passed: bool, detail: String) -> Outcome {
        Outcome {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag}  {:<28} {}", self.name, self.detail)
    }
}

pub const SUITES: [&str; 12] = [
    "sphere-closed-form",
    "threshold",
    "scale-invariance",
    "evolution",
    "space-form",
    "constants",
    "pointwise",
    "moser",
    "epsilon-regularity",
    "pinching",
    "non-collapsing",
    "extension",
];

/// Runs the named suite, or every suite for `"all"`. `seed` drives the
/// randomized checks.
pub fn run_suite(name: &str, seed: u64) -> Result<Vec<Outcome>> {
    if name == "all" {
        let mut out = Vec::new();
        for s in SUITES {
            out.extend(run_suite(s, seed)?);
        }
        return Ok(out);
    }
    match name {
        "sphere-closed-form" => sphere_closed_form(),
        "threshold" => threshold(),
        "scale-invariance" => scale_invariance(),
        "evolution" => evolution(),
        "space-form" => space_form(),
        "constants" => constants(),
        "pointwise" => Ok(vec![pointwise(seed, 10_000)]),
        "moser" => moser(),
        "epsilon-regularity" => epsilon_regularity(),
        "pinching" => pinching(),
        "non-collapsing" => non_collapsing(),
        "extension" => extension(),
        other => Err(Error::InvalidParameter(format!(
            "unknown suite {other:?} (expected one of {} or all)",
            SUITES.join(", ")
        ))),
    }
}

fn unit_sphere() -> Result<FlowTrajectory> {
    run_flow(&make_round_sphere(3, 1.0, 0.0)?, &FlowConfig::default())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn sphere_closed_form() -> Result<Vec<Outcome>> {
    let traj = unit_sphere()?;
    let mut worst: f64 = 0.0;
    for s in traj.states() {
        if let Form::RoundSphere { c } = s.form() {
            worst = worst.max((c - (1.0 - 4.0 * s.t())).abs());
        }
    }
    let t_hat = traj.t_hat().unwrap_or(f64::NAN);
    let q = NormQuery::new(Quantity::R, 2.0, Region::Whole, (0.0, 0.25 - 1e-6));
    let norm = spacetime_norm(&traj, &q)?;
    Ok(vec![
        Outcome::new(
            "sphere exact path",
            worst <= 1e-12 && (t_hat - 0.25).abs() <= 1e-6,
            format!("max |c − (1 − 4t)| = {worst:.2e}, T̂ = {t_hat:.9}"),
        ),
        Outcome::new(
            "sphere critical norm",
            rel(norm, 6.0 * PI) <= 5e-3,
            format!("‖R‖₂ = {norm:.6} vs 6π = {:.6}", 6.0 * PI),
        ),
    ])
}

fn threshold() -> Result<Vec<Outcome>> {
    let traj = unit_sphere()?;
    let rows = alpha_threshold_scan(&traj, Quantity::R, &[2.0, 2.5, 3.0], &default_eps_sequence())?;
    let ok = rows[0].classification == Classification::Finite
        && rows[1].classification == Classification::LogDivergent
        && rows[2].classification == Classification::PowerDivergent
        && rel(rows[2].exponent, 0.5) <= 0.05;
    Ok(vec![Outcome::new(
        "threshold reproduction",
        ok,
        format!(
            "α=2 {}, α=5/2 {}, α=3 {} (p = {:.4})",
            rows[0].classification, rows[1].classification, rows[2].classification, rows[2].exponent
        ),
    )])
}

fn scale_invariance() -> Result<Vec<Outcome>> {
    let traj = unit_sphere()?;
    let mut worst_inv: f64 = 0.0;
    let mut worst_pow: f64 = 0.0;
    for q in [1e-3, 1e3] {
        let spec = RescaleSpec::new(q, 0.05, Center::Pole(Pole::North))?;
        worst_inv = worst_inv.max(critical_integral_invariance(&traj, &spec, (0.05, 0.24), 2.5)?.relative_diff);
        let r = critical_integral_invariance(&traj, &spec, (0.05, 0.24), 2.0)?;
        worst_pow = worst_pow.max(rel(r.ratio, q.sqrt()));
    }
    Ok(vec![Outcome::new(
        "critical integral scaling",
        worst_inv <= 1e-10 && worst_pow <= 1e-8,
        format!("α=5/2 rel diff {worst_inv:.2e}, α=2 ratio vs Q^(1/2) {worst_pow:.2e}"),
    )])
}

/// Five snapshots about `1e-4` apart starting near `t`, from the round
/// profile sampled on `m` cells.
fn residual_tail(m: usize, t: f64) -> Result<FlowTrajectory> {
    let long = FlowConfig {
        t_max: t,
        output_stride: 1_000_000,
        curvature_ceiling: 1e9,
        ..FlowConfig::default()
    };
    let head = run_flow(&sampled_round_sphere(3, 1.0, m, 0.0)?, &long)?;
    let last = head.states().last().expect("runs keep their final state").clone();
    let dt = stable_dt(&last, &FlowConfig::default());
    let k = (1e-4 / dt).round().max(1.0) as usize;
    let cfg = FlowConfig {
        t_max: 4.01 * k as f64 * dt,
        output_stride: k,
        curvature_ceiling: 1e9,
        ..FlowConfig::default()
    };
    run_flow(&last, &cfg)
}

fn evolution() -> Result<Vec<Outcome>> {
    let mut scalar = Vec::new();
    let mut volume = Vec::new();
    for m in [64, 128, 256] {
        let traj = residual_tail(m, 0.12)?;
        let r = scalar_evolution_residual(&traj, 2)?;
        scalar.push(r.iter().fold(0.0f64, |a, v| a.max(v.abs())));
        volume.push(volume_evolution_residual(&traj, 2)? / total_scalar_curvature(&traj, 2).abs());
    }
    let order = |v: &[f64]| v.windows(2).map(|w| (w[0] / w[1]).log2()).fold(f64::INFINITY, f64::min);
    let (os, ov) = (order(&scalar), order(&volume));

    let traj = unit_sphere()?;
    let mut exact: f64 = 0.0;
    for i in 2..traj.len() - 2 {
        let r = scalar_evolution_residual(&traj, i)?;
        exact = exact.max(r[0].abs() / traj.curvatures()[i].r[0].powi(2));
        exact = exact.max(volume_evolution_residual(&traj, i)? / total_scalar_curvature(&traj, i).abs());
    }
    Ok(vec![
        Outcome::new(
            "residual refinement order",
            os >= 1.8 && ov >= 1.8,
            format!("scalar order {os:.2}, volume order {ov:.2}"),
        ),
        Outcome::new("exact sphere residuals", exact <= 1e-6, format!("max relative residual {exact:.2e}")),
    ])
}

fn space_form() -> Result<Vec<Outcome>> {
    let traj = unit_sphere()?;
    let mut worst: f64 = 0.0;
    for alpha in [1.0, 2.0, 2.5] {
        let q = |quantity| NormQuery::new(quantity, alpha, Region::Whole, (0.0, 0.24));
        let ratio = spacetime_norm(&traj, &q(Quantity::Rm))? / spacetime_norm(&traj, &q(Quantity::R))?;
        worst = worst.max(rel(ratio, 1.0 / 3f64.sqrt()));
    }
    Ok(vec![Outcome::new(
        "space-form norm relation",
        worst <= 1e-8,
        format!("max |‖Rm‖/‖R‖ − 1/√3| relative {worst:.2e}"),
    )])
}

fn constants() -> Result<Vec<Outcome>> {
    let c = croke_constants(2)?;
    let croke = rel(c.c1, PI).max(rel(c.c2, 2.0 * PI));
    let mut root: f64 = 0.0;
    for kappa in [1e-6, 1e-3, 0.1, 1.0] {
        root = root.max(r_kappa(3, kappa)?.residual);
    }
    let s1 = sobolev_sigma(3, 1e-3)?.sigma;
    let s2 = sobolev_sigma(3, 1e-2)?.sigma;
    let ratio = ((s1 / s2).log10() - 8.0).abs() / 8.0;
    let sigma = sobolev_sigma(3, 0.01)?.sigma;
    let mc = moser_constants(3, 25.0 / 6.0, sigma, 1.0, 0.0, 2.0)?;
    let ln_delta = -(4.0f64.ln() + 0.6 * sigma.ln() + 12f64.ln());
    let delta = ((mc.delta_b.ln() - ln_delta) / ln_delta).abs();
    let ok = croke <= 1e-12 && root <= 1e-12 && ratio <= 1e-10 && lambda(2.0) == 12.0 && delta <= 1e-12;
    Ok(vec![Outcome::new(
        "constant chain",
        ok,
        format!(
            "C₁,C₂ rel {croke:.1e}; r(κ) residual {root:.1e}; σ ratio rel {ratio:.1e}; Λ(2) = {}; δ_b rel {delta:.1e}",
            lambda(2.0)
        ),
    )])
}

/// `count` random tuples of Ricci eigenvalues with `min λ ≥ −B`.
pub fn pointwise(seed: u64, count: usize) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for _ in 0..count {
        let n = rng.gen_range(2..=8);
        let b: f64 = rng.gen_range(0.0..2.0);
        let eig: Vec<f64> = (0..n).map(|_| rng.gen_range(-b..(-b + 10.0))).collect();
        let rep = rhat_inequality_check(&eig, b);
        if !(rep.hypothesis_met && rep.holds) {
            failures += 1;
        }
    }
    Outcome::new(
        "pointwise R̂ inequality",
        failures == 0,
        format!("{count} tuples, {failures} failures (seed {seed})"),
    )
}

fn moser() -> Result<Vec<Outcome>> {
    let window = unit_window(&unit_sphere()?, 0.0, 0.1, Center::Pole(Pole::North))?;
    let trace = moser_iteration_trace(&window, Center::Pole(Pole::North), 1.0, 12, &MoserProblem::scalar_curvature(3, 0.0))?;
    Ok(vec![Outcome::new(
        "Moser ladder",
        trace.all_hold() && trace.sup_gap <= 0.02,
        format!(
            "12 rungs hold: {}; ‖v‖_(λ^12) = {:.5} vs sup {:.5} (gap {:.2}%)",
            trace.all_hold(),
            trace.rungs[11].measured,
            trace.sup_inner,
            100.0 * trace.sup_gap
        ),
    )])
}

fn epsilon_regularity() -> Result<Vec<Outcome>> {
    let s = crate::flow::dumbbell_profile(3, 64, 0.3, 4)?;
    let traj = run_flow(&s, &FlowConfig { t_max: 0.005, ..FlowConfig::default() })?;
    let q = 1e90;
    let window = parabolic_rescale(&traj, &RescaleSpec::new(q, 0.002, Center::Pole(Pole::North))?, (0.0, 1.0))?;
    let a = traj.curvatures().iter().map(|k| (-k.ric_inf).max(0.0)).fold(0.0, f64::max);
    let flat = epsilon_regularity_check(&window, Center::Pole(Pole::North), 1.0, a / q)?;
    let seq = blowup_sequence(&unit_sphere()?, 4, MaxQuantity::Scalar)?;
    let mut gated = !seq.elements.is_empty();
    for e in &seq.elements {
        let rep = epsilon_regularity_check(&e.trajectory, Center::Pole(Pole::North), 1.0, 0.0)?;
        gated &= !rep.applicable;
    }
    Ok(vec![Outcome::new(
        "ε-regularity",
        flat.applicable && flat.holds == Some(true) && gated,
        format!(
            "near-flat: sup R₊ = {:.3e} ≤ {} (gate {:.2e} ≤ δ = {}); sphere blow-ups gated out: {gated}",
            flat.sup_out,
            flat.bound,
            flat.norm_in + flat.b,
            flat.constants.delta
        ),
    )])
}

fn pinching() -> Result<Vec<Outcome>> {
    let rep = hamilton_ivey_check(&unit_sphere()?)?;
    Ok(vec![Outcome::new(
        "Hamilton–Ivey pinching",
        rep.normalized && rep.all_hold(),
        format!("{} samples, inf ν(·,0) = {}", rep.samples.len(), rep.initial_nu_min),
    )])
}

fn non_collapsing() -> Result<Vec<Outcome>> {
    let r = ball_volume_ratio(&make_round_sphere(3, 1.0, 0.0)?, Center::Pole(Pole::North), 0.05)?.ratio;
    let seq = blowup_sequence(&unit_sphere()?, 6, MaxQuantity::Scalar)?;
    let kappa = seq.elements.iter().map(|e| e.kappa).fold(f64::INFINITY, f64::min);
    Ok(vec![Outcome::new(
        "non-collapsing",
        rel(r, 4.0 * PI / 3.0) <= 0.02 && kappa > 0.0 && !seq.elements.is_empty(),
        format!(
            "Vol B(p,0.05)/0.05³ = {r:.5} vs 4π/3 = {:.5}; min κ over {} blow-ups = {kappa:.5}",
            4.0 * PI / 3.0,
            seq.elements.len()
        ),
    )])
}

fn extension() -> Result<Vec<Outcome>> {
    let mut out = Vec::new();
    for (n, alphas) in [(3usize, vec![2.0, 2.5, 3.0]), (4, vec![2.0, 3.0, 4.0])] {
        let traj = run_flow(&make_round_sphere(n, 1.0, 0.0)?, &FlowConfig::default())?;
        for alpha in alphas {
            let v = extension_verdict(&traj, alpha)?;
            out.push(Outcome::new(
                &format!("extension S{n} α={alpha}"),
                v.consistent,
                v.conclusion.to_string(),
            ));
        }
    }
    Ok(out)
}
