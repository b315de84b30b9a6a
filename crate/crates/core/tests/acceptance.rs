//! End-to-end acceptance run: every criterion at its stated tolerance, one
//! line each. Oracles are computed here from closed forms, independently of
//! the library routines under test.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ricci_lab::constants::checks::{
    epsilon_regularity_check, hamilton_ivey_check, moser_iteration_trace, unit_window, MoserProblem,
};
use ricci_lab::constants::{croke_constants, lambda, moser_constants, r_kappa, sobolev_sigma};
use ricci_lab::flow::{
    dumbbell_profile, run_flow, scalar_evolution_residual, stable_dt, total_scalar_curvature,
    volume_evolution_residual, FlowConfig, FlowTrajectory, MaxQuantity,
};
use ricci_lab::geometry::{
    ball_volume_ratio, make_round_sphere, rhat_inequality_check, sampled_round_sphere, Center, Form, Pole, Region,
};
use ricci_lab::norms::{
    alpha_threshold_scan, default_eps_sequence, extension_verdict, spacetime_norm, Classification, NormQuery,
    Quantity,
};
use ricci_lab::rescaling::{blowup_sequence, critical_integral_invariance, parabolic_rescale, RescaleSpec};

type Check = Result<(bool, String), String>;
type Criterion = (&'static str, fn() -> Check);

fn sphere(n: usize) -> FlowTrajectory {
    run_flow(&make_round_sphere(n, 1.0, 0.0).unwrap(), &FlowConfig::default()).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn shrinking_sphere() -> Check {
    let traj = sphere(3);
    let mut worst: f64 = 0.0;
    for s in traj.states() {
        let Form::RoundSphere { c } = s.form() else {
            return Err("round run produced a warped state".into());
        };
        worst = worst.max((c - (1.0 - 4.0 * s.t())).abs());
    }
    let t_hat = traj.t_hat().ok_or("no T_hat")?;
    // T = 1/(2(n−1)) for the unit n-sphere
    let t_exact = 1.0 / (2.0 * 2.0);
    Ok((
        worst <= 1e-12 && (t_hat - t_exact).abs() <= 1e-6,
        format!("max |c − (1−4t)| = {worst:.2e}, |T_hat − 1/4| = {:.2e}", (t_hat - t_exact).abs()),
    ))
}

fn closed_form_norm() -> Check {
    let traj = sphere(3);
    let t1 = 0.25 - 1e-6;
    let q = NormQuery::new(Quantity::R, 2.0, Region::Whole, (0.0, t1));
    let norm = spacetime_norm(&traj, &q).map_err(e)?;
    // R = 6/(1−4t), Vol = 2π²(1−4t)^{3/2}: ∫R² dμ = 72π²(1−4t)^{−1/2}
    let truncated = (36.0 * PI * PI * (1.0 - (1.0 - 4.0 * t1).sqrt())).sqrt();
    Ok((
        rel(norm, 6.0 * PI) <= 5e-3,
        format!(
            "‖R‖₂ = {norm:.6}, 6π = {:.6} (rel {:.2e}); truncated closed form {truncated:.6}",
            6.0 * PI,
            rel(norm, 6.0 * PI)
        ),
    ))
}

fn threshold() -> Check {
    let traj = sphere(3);
    let rows = alpha_threshold_scan(&traj, Quantity::R, &[2.0, 2.5, 3.0], &default_eps_sequence()).map_err(e)?;
    // ∫∫ R^α ≈ ∫ (1−4t)^{3/2−α} dt diverges like ε^{5/2−α}
    let expected = 3.0 - 2.5;
    let ok = rows[0].classification == Classification::Finite
        && rows[1].classification == Classification::LogDivergent
        && rows[2].classification == Classification::PowerDivergent
        && rel(rows[2].exponent, expected) <= 0.05;
    Ok((
        ok,
        format!(
            "α=2 {}, α=5/2 {}, α=3 {} with p = {:.5} (expected {expected})",
            rows[0].classification, rows[1].classification, rows[2].classification, rows[2].exponent
        ),
    ))
}

fn scale_invariance() -> Check {
    let traj = sphere(3);
    let (mut inv, mut pow): (f64, f64) = (0.0, 0.0);
    for q in [1e-3, 1e3] {
        let spec = RescaleSpec::new(q, 0.05, Center::Pole(Pole::North)).map_err(e)?;
        let r = critical_integral_invariance(&traj, &spec, (0.05, 0.24), 2.5).map_err(e)?;
        inv = inv.max(rel(r.after, r.before));
        // |Rm|^α scales as Q^{−α}, dμ as Q^{3/2}, dt as Q
        let r = critical_integral_invariance(&traj, &spec, (0.05, 0.24), 2.0).map_err(e)?;
        pow = pow.max(rel(r.after / r.before, q.powf(2.5 - 2.0)));
    }
    Ok((
        inv <= 1e-10 && pow <= 1e-8,
        format!("α=5/2 rel diff {inv:.2e}; α=2 ratio vs Q^(1/2) rel {pow:.2e}"),
    ))
}

/// Five snapshots about `1e-4` apart from time `t` of the round-profile flow
/// on `m` cells.
fn residual_tail(m: usize, t: f64) -> Result<FlowTrajectory, String> {
    let cfg = |t_max, stride| FlowConfig {
        t_max,
        output_stride: stride,
        curvature_ceiling: 1e9,
        ..FlowConfig::default()
    };
    let head = run_flow(&sampled_round_sphere(3, 1.0, m, 0.0).map_err(e)?, &cfg(t, 1_000_000)).map_err(e)?;
    let last = head.states().last().ok_or("empty run")?.clone();
    let dt = stable_dt(&last, &FlowConfig::default());
    let k = (1e-4 / dt).round().max(1.0) as usize;
    run_flow(&last, &cfg(4.01 * k as f64 * dt, k)).map_err(e)
}

fn evolution_identities() -> Check {
    let (mut scalar, mut volume) = (Vec::new(), Vec::new());
    for m in [64, 128, 256] {
        let traj = residual_tail(m, 0.12)?;
        let r = scalar_evolution_residual(&traj, 2).map_err(e)?;
        scalar.push(r.iter().fold(0.0f64, |a, v| a.max(v.abs())));
        volume.push(volume_evolution_residual(&traj, 2).map_err(e)? / total_scalar_curvature(&traj, 2).abs());
    }
    let order = |v: &[f64]| v.windows(2).map(|w| (w[0] / w[1]).log2()).fold(f64::INFINITY, f64::min);
    let traj = sphere(3);
    let mut exact: f64 = 0.0;
    for i in 2..traj.len() - 2 {
        let r = scalar_evolution_residual(&traj, i).map_err(e)?[0];
        let c = 1.0 - 4.0 * traj.states()[i].t();
        exact = exact.max(r.abs() * (c * c) / 36.0);
        exact = exact.max(volume_evolution_residual(&traj, i).map_err(e)? / (12.0 * PI * PI * c.sqrt()));
    }
    let (os, ov) = (order(&scalar), order(&volume));
    Ok((
        os >= 1.8 && ov >= 1.8 && exact <= 1e-6,
        format!("orders scalar {os:.2}, volume {ov:.2}; exact-sphere relative residual {exact:.2e}"),
    ))
}

fn space_form() -> Check {
    let traj = sphere(3);
    let n: f64 = 3.0;
    // constant sectional curvature K: |Rm|² = 2n(n−1)K², R = n(n−1)K
    let c = (2.0 * n * (n - 1.0)).sqrt() / (n * (n - 1.0));
    let mut worst: f64 = 0.0;
    for alpha in [1.0, 2.0, 2.5] {
        let q = |quantity| NormQuery::new(quantity, alpha, Region::Whole, (0.0, 0.24));
        let ratio = spacetime_norm(&traj, &q(Quantity::Rm)).map_err(e)? / spacetime_norm(&traj, &q(Quantity::R)).map_err(e)?;
        worst = worst.max(rel(ratio, c));
    }
    Ok((worst <= 1e-8, format!("C(3) = {c:.12}, max rel deviation {worst:.2e}")))
}

fn constant_chain() -> Check {
    let cc = croke_constants(2).map_err(e)?;
    let croke = rel(cc.c1, PI).max(rel(cc.c2, 2.0 * PI));
    // n = 3: ∫_0^r sinh² = (sinh 2r − 2r)/4 and α(2) = 4π; the series
    // Σ_{k≥1} (2r)^{2k+1}/(2k+1)! avoids the cancellation for small r
    let sinh_sq_integral = |r: f64| {
        if r >= 1.0 {
            return ((2.0 * r).sinh() - 2.0 * r) / 4.0;
        }
        let (x, mut term, mut sum) = (2.0 * r, 2.0 * r, 0.0);
        for k in 1..30 {
            term *= x * x / ((2 * k) * (2 * k + 1)) as f64;
            sum += term;
        }
        sum / 4.0
    };
    let mut residual: f64 = 0.0;
    for kappa in [1e-6, 1e-3, 0.1, 1.0] {
        let r = r_kappa(3, kappa).map_err(e)?.r;
        let target = kappa / (2.0 * 4.0 * PI * 12f64.exp());
        residual = residual.max((sinh_sq_integral(r) - target).abs() / target);
    }
    let s1 = sobolev_sigma(3, 1e-3).map_err(e)?.sigma;
    let s2 = sobolev_sigma(3, 1e-2).map_err(e)?.sigma;
    // σ ∝ κ^{−2(n+1)}: a factor 10 in κ is 10⁸ in σ
    let ratio = ((s1 / s2).ln() - 8.0 * 10f64.ln()).abs() / (8.0 * 10f64.ln());
    let sigma = sobolev_sigma(3, 0.01).map_err(e)?.sigma;
    let delta_b = moser_constants(3, 25.0 / 6.0, sigma, 1.0, 0.0, 2.0).map_err(e)?.delta_b;
    let ln_expected = -(4f64.ln() + 0.6 * sigma.ln() + 12f64.ln());
    let delta = ((delta_b.ln() - ln_expected) / ln_expected).abs();
    let ok = croke <= 1e-12 && residual <= 1e-12 && ratio <= 1e-10 && lambda(2.0) == 12.0 && delta <= 1e-12;
    Ok((
        ok,
        format!(
            "C₁,C₂ rel {croke:.1e}; r(κ) residual {residual:.1e}; σ ratio rel {ratio:.1e}; Λ(2) = {}; δ_b rel {delta:.1e}",
            lambda(2.0)
        ),
    ))
}

fn pointwise() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(20_261_015);
    let (mut failures, mut disagreements) = (0, 0);
    for _ in 0..10_000 {
        let n = rng.gen_range(2..=8);
        let b: f64 = rng.gen_range(0.0..2.0);
        let eig: Vec<f64> = (0..n).map(|_| rng.gen_range(-b..(-b + 10.0))).collect();
        let rep = rhat_inequality_check(&eig, b);
        if !(rep.hypothesis_met && rep.holds) {
            failures += 1;
        }
        // with μ = λ + B ≥ 0 the gap is (Σμ)² − Σμ² = 2Σ_{i<j} μ_i μ_j
        let mu: Vec<f64> = eig.iter().map(|l| l + b).collect();
        let mut gap = 0.0;
        for i in 0..mu.len() {
            for j in i + 1..mu.len() {
                gap += 2.0 * mu[i] * mu[j];
            }
        }
        if ((rep.rhs - rep.lhs) - gap).abs() > 1e-9 * (1.0 + rep.rhs.abs()) {
            disagreements += 1;
        }
    }
    Ok((
        failures == 0 && disagreements == 0,
        format!("10000 tuples: {failures} failures, {disagreements} disagreements with the pairwise-product gap"),
    ))
}

fn moser_ladder() -> Check {
    let window = unit_window(&sphere(3), 0.0, 0.1, Center::Pole(Pole::North)).map_err(e)?;
    let trace = moser_iteration_trace(&window, Center::Pole(Pole::North), 1.0, 12, &MoserProblem::scalar_curvature(3, 0.0))
        .map_err(e)?;
    // stretching [0, 0.1] to unit time divides R = 6/(1−4t) by Q = 10
    let (t_end, q) = (0.1, 10.0);
    let sup = 6.0 / (1.0 - 4.0 * t_end) / q;
    let last = trace.rungs.last().ok_or("no rungs")?.measured;
    let gap = rel(last, sup);
    Ok((
        trace.all_hold() && trace.rungs.len() == 12 && gap <= 0.02,
        format!("12 rungs within bounds: {}; ‖v‖_(λ^12) = {last:.5}, sup {sup} (gap {:.2}%)", trace.all_hold(), 100.0 * gap),
    ))
}

fn epsilon_regularity() -> Check {
    let s = dumbbell_profile(3, 64, 0.3, 4).map_err(e)?;
    let traj = run_flow(&s, &FlowConfig { t_max: 0.005, ..FlowConfig::default() }).map_err(e)?;
    let q = 1e90;
    let spec = RescaleSpec::new(q, 0.002, Center::Pole(Pole::North)).map_err(e)?;
    let window = parabolic_rescale(&traj, &spec, (0.0, 1.0)).map_err(e)?;
    let a = traj.curvatures().iter().map(|k| (-k.ric_inf).max(0.0)).fold(0.0, f64::max);
    let flat = epsilon_regularity_check(&window, Center::Pole(Pole::North), 1.0, a / q).map_err(e)?;
    let seq = blowup_sequence(&sphere(3), 4, MaxQuantity::Scalar).map_err(e)?;
    let mut gated = 0;
    let mut critical: f64 = f64::INFINITY;
    for el in &seq.elements {
        let rep = epsilon_regularity_check(&el.trajectory, Center::Pole(Pole::North), 1.0, 0.0).map_err(e)?;
        gated += usize::from(!rep.applicable);
        critical = critical.min(rep.norm_in);
    }
    Ok((
        flat.applicable && flat.holds == Some(true) && !seq.elements.is_empty() && gated == seq.elements.len(),
        format!(
            "near-flat window: sup R₊ = {:.3e} ≤ {}; sphere blow-ups gated {gated}/{} (critical norm ≥ {critical:.3})",
            flat.sup_out,
            flat.bound,
            seq.elements.len()
        ),
    ))
}

fn pinching() -> Check {
    let rep = hamilton_ivey_check(&sphere(3)).map_err(e)?;
    // on the unit S³ the curvature operator is 1/(1−4t) times the identity
    let drift = rep
        .samples
        .iter()
        .map(|s| rel(s.nu, 1.0 / (1.0 - 4.0 * s.t)))
        .fold(0.0, f64::max);
    Ok((
        rep.normalized && rep.all_hold() && drift <= 1e-9,
        format!("{} samples hold; ν matches 1/(1−4t) to {drift:.1e}", rep.samples.len()),
    ))
}

fn non_collapsing() -> Check {
    let r = 0.05;
    let ratio = ball_volume_ratio(&make_round_sphere(3, 1.0, 0.0).map_err(e)?, Center::Pole(Pole::North), r)
        .map_err(e)?
        .ratio;
    // geodesic ball of S³: 2π(r − sin r cos r)
    let exact = 2.0 * PI * (r - r.sin() * r.cos()) / r.powi(3);
    let seq = blowup_sequence(&sphere(3), 6, MaxQuantity::Scalar).map_err(e)?;
    let kappas: Vec<f64> = seq.elements.iter().map(|el| el.kappa).collect();
    let kappa = kappas.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((
        rel(ratio, 4.0 * PI / 3.0) <= 0.02 && rel(ratio, exact) <= 1e-6 && !kappas.is_empty() && kappa > 0.0,
        format!(
            "Vol B/r³ = {ratio:.6} (4π/3 = {:.6}, exact {exact:.6}); κ ≥ {kappa:.5} over {} blow-ups",
            4.0 * PI / 3.0,
            kappas.len()
        ),
    ))
}

fn extension_consistency() -> Check {
    let mut lines = Vec::new();
    let mut ok = true;
    for (n, alphas) in [(3usize, [2.5, 3.0, 4.0]), (4, [3.0, 3.5, 5.0])] {
        let traj = sphere(n);
        for alpha in alphas {
            let v = extension_verdict(&traj, alpha).map_err(e)?;
            ok &= traj.singular() && v.consistent && !v.scalar_hypotheses_met && !v.riemann_hypotheses_met;
            lines.push(format!("S{n} α={alpha}: {}", v.conclusion));
        }
    }
    Ok((ok, lines.join("; ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 13] = [
        ("1 shrinking-sphere exactness", shrinking_sphere),
        ("2 closed-form critical norm", closed_form_norm),
        ("3 threshold reproduction", threshold),
        ("4 scale invariance", scale_invariance),
        ("5 evolution identities", evolution_identities),
        ("6 space-form norm relation", space_form),
        ("7 constant chain", constant_chain),
        ("8 pointwise inequality", pointwise),
        ("9 Moser ladder", moser_ladder),
        ("10 ε-regularity", epsilon_regularity),
        ("11 Hamilton–Ivey monitor", pinching),
        ("12 non-collapsing", non_collapsing),
        ("extension consistency", extension_consistency),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (name, check) in criteria {
        let t = Instant::now();
        let (passed, detail) = check().unwrap_or_else(|err| (false, format!("error: {err}")));
        failed += usize::from(!passed);
        println!(
            "{} {name}: {detail} [{:.2}s]",
            if passed { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed in {:.1}s", criteria.len() - failed, criteria.len(), start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
