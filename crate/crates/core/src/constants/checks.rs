//! Numerical instances of the inequalities the constant chain feeds: the
//! parabolic Sobolev inequality, the Moser iteration ladder, the
//! ε-regularity sup bound and the Hamilton–Ivey pinching estimate.
//!
//! The Sobolev, Moser and ε-regularity checks take a window that has already
//! been rescaled to unit time, e.g. with [`unit_window`]. Balls are measured
//! in `g(1)` and then held fixed in the grid coordinate over the window.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::flow::FlowTrajectory;
use crate::geometry::{
    ball_volume_ratio, sampled_round_sphere, Center, CurvatureField, Form, MetricState, Pole, Region,
};
use crate::magnitude::Magnitude;
use crate::rescaling::{parabolic_rescale, RescaleSpec};

use super::{default_beta, default_q, epsilon_constants, iteration_ladder, moser_domains, sobolev_sigma};
use super::{EpsilonConstants, MoserDomains};

/// Cells used when a round state has to carry spatially varying fields.
pub const ROUND_SAMPLES: usize = 256;

/// `traj` on `[t0, t1]`, rescaled to `[0, 1]` with `Q = 1/(t1 − t0)`.
pub fn unit_window(traj: &FlowTrajectory, t0: f64, t1: f64, base_point: Center) -> Result<FlowTrajectory> {
    let spec = RescaleSpec::unit_window(t0, t1, base_point)?;
    parabolic_rescale(traj, &spec, (0.0, 1.0))
}

fn check_unit(window: &FlowTrajectory) -> Result<()> {
    if (window.t_start()).abs() > 1e-9 || (window.t_end() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "the window spans [{}, {}]; rescale it to [0, 1] first",
            window.t_start(),
            window.t_end()
        )));
    }
    Ok(())
}

fn node_x(state: &MetricState) -> Vec<f64> {
    match state.form() {
        Form::RoundSphere { .. } => vec![0.0],
        Form::Warped(p) => (0..=p.cells()).map(|j| p.x(j)).collect(),
    }
}

/// `∫_a^{t_last}` of per-snapshot values, interpolated geometrically between
/// positive neighbours (exact for exponential growth, which is what large
/// powers of a smooth field look like) and linearly otherwise.
fn time_integral(times: &[f64], values: &[f64], a: f64) -> f64 {
    let mut total = 0.0;
    for i in 0..times.len() - 1 {
        let (t0, t1) = (times[i], times[i + 1]);
        if t1 <= a {
            continue;
        }
        let h = t1 - t0;
        let ws = ((a - t0) / h).max(0.0);
        let (v0, v1) = (values[i], values[i + 1]);
        total += if v0 > 0.0 && v1 > 0.0 && v0 != v1 {
            let l = (v1 / v0).ln();
            h * v0 * ((l).exp() - (ws * l).exp()) / l
        } else {
            h * (1.0 - ws) * (v0 + 0.5 * (1.0 + ws) * (v1 - v0))
        };
    }
    total
}

/// `‖f‖_{p, region × [a, 1]}` for nodal samples `fields[i]` on snapshot `i`,
/// scaled by the sup so that large `p` stay in range. `p = ∞` gives the sup
/// over the snapshots in `[a, 1]`.
fn lp_norm(window: &FlowTrajectory, fields: &[Vec<f64>], region: Region, a: f64, p: f64) -> f64 {
    let states = window.states();
    let sup_over = |keep: &dyn Fn(f64) -> bool| {
        states
            .iter()
            .zip(fields)
            .filter(|(s, _)| keep(s.t()))
            .flat_map(|(s, f)| region.sample_indices(s).into_iter().map(move |j| f[j].abs()))
            .fold(0.0, f64::max)
    };
    if p.is_infinite() {
        return sup_over(&|t| t >= a - 1e-12);
    }
    let m = sup_over(&|_| true);
    if m == 0.0 {
        return 0.0;
    }
    let slices: Vec<f64> = states
        .iter()
        .zip(fields)
        .map(|(s, f)| region.integrate(s, Some(f), &|v| (v.abs() / m).powf(p)))
        .collect();
    m * time_integral(&window.times(), &slices, a).powf(1.0 / p)
}

/// Smallest `Vol B(center, r)/rⁿ` over the window.
fn measured_kappa(window: &FlowTrajectory, center: Center, r: f64) -> Result<f64> {
    let mut k = f64::INFINITY;
    for s in window.states() {
        k = k.min(ball_volume_ratio(s, center, r)?.ratio);
    }
    Ok(k)
}

fn final_state(window: &FlowTrajectory) -> &MetricState {
    window.states().last().expect("trajectories are never empty")
}

/// A test function `v(x, t)` of the grid coordinate and time.
pub type TestField<'a> = &'a (dyn Fn(f64, f64) -> f64 + Sync);

/// The bump `(1 − s²)²` supported on `region`, with `s` the normalized
/// distance to its centre; constant `1` on the whole manifold.
pub fn bump(region: Region) -> Box<dyn Fn(f64, f64) -> f64 + Send + Sync> {
    match region {
        Region::Whole => Box::new(|_, _| 1.0),
        Region::Cap { pole, x_extent } => Box::new(move |x, _| {
            let d = match pole {
                Pole::North => x,
                Pole::South => PI - x,
            };
            let s = d / x_extent;
            if s.abs() < 1.0 {
                (1.0 - s * s).powi(2)
            } else {
                0.0
            }
        }),
        Region::Band { x_min, x_max } => Box::new(move |x, _| {
            let s = (2.0 * x - x_min - x_max) / (x_max - x_min);
            if s.abs() < 1.0 {
                (1.0 - s * s).powi(2)
            } else {
                0.0
            }
        }),
    }
}

fn boundary_points(region: Region) -> Vec<f64> {
    match region {
        Region::Whole => Vec::new(),
        Region::Cap { pole: Pole::North, x_extent } => vec![x_extent],
        Region::Cap { pole: Pole::South, x_extent } => vec![PI - x_extent],
        Region::Band { x_min, x_max } => vec![x_min, x_max],
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SobolevSample {
    /// `∫_D v^{2(n+2)/n}`.
    pub lhs: f64,
    /// `σ max_t ‖v‖_{2,Ω}^{4/n} ∫_D |∇v|²`.
    pub rhs: Magnitude,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SobolevReport {
    pub region: Region,
    /// Smallest ball volume ratio at radius `r` over the window.
    pub kappa: f64,
    pub sigma: Magnitude,
    pub samples: Vec<SobolevSample>,
}

fn expand_round(state: &MetricState) -> Result<MetricState> {
    match state.form() {
        Form::RoundSphere { c } => sampled_round_sphere(state.n(), *c, ROUND_SAMPLES, state.t()),
        Form::Warped(_) => Ok(state.clone()),
    }
}

/// Evaluates both sides of
/// `∫_D v^{2(n+2)/n} ≤ σ max_t ‖v(·,t)‖_{2,Ω}^{4/n} ∫_D |∇v|²` on
/// `D = Ω × [0, 1]`, `Ω = B_{g(1)}(center, r)`, with `σ = σ(n, κ)` for the
/// measured `κ`. Each field must vanish on `∂Ω`.
pub fn parabolic_sobolev_check(
    window: &FlowTrajectory,
    center: Center,
    r: f64,
    fields: &[TestField<'_>],
) -> Result<SobolevReport> {
    check_unit(window)?;
    let n = window.n();
    let nf = n as f64;
    let kappa = measured_kappa(window, center, r)?;
    let sigma = sobolev_sigma(n, kappa)?.sigma;
    let states = window.states().iter().map(expand_round).collect::<Result<Vec<_>>>()?;
    let region = Region::ball(&states[states.len() - 1], center, r);
    let times = window.times();
    let p = 2.0 * (nf + 2.0) / nf;
    let mut samples = Vec::with_capacity(fields.len());
    for v in fields {
        let mut power = Vec::with_capacity(states.len());
        let mut grad = Vec::with_capacity(states.len());
        let mut l2_max: f64 = 0.0;
        for s in &states {
            let t = s.t();
            let xs = node_x(s);
            let vals: Vec<f64> = xs.iter().map(|&x| v(x, t)).collect();
            let scale = vals.iter().fold(1.0f64, |a, b| a.max(b.abs()));
            for xb in boundary_points(region) {
                if v(xb, t).abs() > 1e-10 * scale {
                    return Err(Error::InvalidTestField(format!(
                        "v = {} on the boundary x = {xb} at t = {t}",
                        v(xb, t)
                    )));
                }
            }
            let Form::Warped(prof) = s.form() else { unreachable!("round states were expanded") };
            let h = 1e-6;
            let g2: Vec<f64> = xs
                .iter()
                .zip(prof.phi())
                .map(|(&x, phi)| ((v(x + h, t) - v(x - h, t)) / (2.0 * h) / phi).powi(2))
                .collect();
            power.push(region.integrate(s, Some(&vals), &|u| u.abs().powf(p)));
            grad.push(region.integrate(s, Some(&g2), &|u| u));
            l2_max = l2_max.max(region.integrate(s, Some(&vals), &|u| u * u).sqrt());
        }
        let lhs = time_integral(&times, &power, 0.0);
        let rhs = sigma * Magnitude::from_f64(l2_max.powf(4.0 / nf) * time_integral(&times, &grad, 0.0));
        samples.push(SobolevSample {
            lhs,
            rhs,
            holds: Magnitude::from_f64(lhs) <= rhs,
        });
    }
    Ok(SobolevReport {
        region,
        kappa,
        sigma,
        samples,
    })
}

/// A nodal field computed from a slice and its curvature.
pub type SliceField = Box<dyn Fn(&MetricState, &CurvatureField) -> Vec<f64> + Send + Sync>;

/// `∂_t u ≤ Δu + f u + h` with `u ≥ 0`, integrability exponent `q` and
/// Ricci lower bound `−B`. The iterated function is `v = u + ‖h‖_q`.
pub struct MoserProblem {
    pub q: f64,
    pub b: f64,
    pub u: SliceField,
    pub f: SliceField,
    pub h: SliceField,
    /// An upper bound `C₀` to test, or `None` to use the measured
    /// `‖f‖_q + ‖R₋‖_q + 1`.
    pub c0: Option<f64>,
}

impl MoserProblem {
    /// `u = R̂ = R + nB`, `f = 2(R̂ − 2B)`, `h = 2nB²`, as in the
    /// ε-regularity argument, with `q = (n+2)²/(2n)`.
    pub fn scalar_curvature(n: usize, b: f64) -> MoserProblem {
        let nf = n as f64;
        MoserProblem {
            q: default_q(n),
            b,
            u: Box::new(move |_, k| k.r.iter().map(|r| r + nf * b).collect()),
            f: Box::new(move |_, k| k.r.iter().map(|r| 2.0 * (r + nf * b - 2.0 * b)).collect()),
            h: Box::new(move |_, k| vec![2.0 * nf * b * b; k.len()]),
            c0: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoserRung {
    pub k: usize,
    /// `λ^k`.
    pub exponent: f64,
    /// `‖v‖_{λ^k, D_k}`.
    pub measured: f64,
    /// `(Π_{j=2}^k F_j) ‖v‖_{λ, D_1}`.
    pub predicted: Magnitude,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MoserTrace {
    pub q: f64,
    pub b: f64,
    pub kappa: f64,
    pub sigma: Magnitude,
    /// `‖h‖_{q, D}`, added to `u`.
    pub shift: f64,
    /// `‖f‖_{q,D} + ‖R₋‖_{q,D} + 1`.
    pub c0_measured: f64,
    /// The `C₀` used for the ladder.
    pub c0: f64,
    pub c0_hypothesis_met: bool,
    pub domains: MoserDomains,
    pub rungs: Vec<MoserRung>,
    /// `‖v‖_{∞, D'}`.
    pub sup_inner: f64,
    /// `|‖v‖_{λ^{k_max}, D_{k_max}} / ‖v‖_{∞,D'} − 1|`.
    pub sup_gap: f64,
}

impl MoserTrace {
    pub fn all_hold(&self) -> bool {
        self.rungs.iter().all(|r| r.holds)
    }
}

/// Measures `‖v‖_{λ^k, D_k}` for `k = 1..=k_max` on the nested domains
/// about `center` with base radius `r`, next to the bound the iteration
/// predicts from `‖v‖_{λ, D_1}`.
pub fn moser_iteration_trace(
    window: &FlowTrajectory,
    center: Center,
    r: f64,
    k_max: usize,
    problem: &MoserProblem,
) -> Result<MoserTrace> {
    check_unit(window)?;
    let n = window.n();
    let nf = n as f64;
    let domains = moser_domains(r, k_max, problem.b)?;
    let last = final_state(window);
    let ball = |radius: f64| Region::ball(last, center, radius);
    let outer = ball(r);
    let (mut u, mut f, mut h, mut r_minus) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (s, k) in window.states().iter().zip(window.curvatures()) {
        let us = (problem.u)(s, k);
        if let Some(bad) = us.iter().find(|v| **v < 0.0) {
            return Err(Error::InvalidParameter(format!("u must be nonnegative, found {bad} at t = {}", s.t())));
        }
        u.push(us);
        f.push((problem.f)(s, k));
        h.push((problem.h)(s, k));
        r_minus.push(k.r.iter().map(|v| (-v).max(0.0)).collect::<Vec<_>>());
    }
    let q = problem.q;
    let shift = lp_norm(window, &h, outer, 0.0, q);
    let c0_measured = lp_norm(window, &f, outer, 0.0, q) + lp_norm(window, &r_minus, outer, 0.0, q) + 1.0;
    let c0 = problem.c0.unwrap_or(c0_measured);
    let kappa = measured_kappa(window, center, r)?;
    let sigma = sobolev_sigma(n, kappa)?.sigma;
    let ladder = iteration_ladder(n, q, sigma, c0, r, problem.b)?;
    let v: Vec<Vec<f64>> = u.iter().map(|s| s.iter().map(|x| x + shift).collect()).collect();
    let lam = (nf + 2.0) / nf;
    let base = lp_norm(window, &v, ball(domains.radii[1]), domains.times[1], lam);
    let rungs = (1..=k_max)
        .map(|k| {
            let exponent = lam.powi(k as i32);
            let measured = lp_norm(window, &v, ball(domains.radii[k]), domains.times[k], exponent);
            let predicted = ladder.bound_factor(k) * Magnitude::from_f64(base);
            MoserRung {
                k,
                exponent,
                measured,
                predicted,
                holds: Magnitude::from_f64(measured) <= predicted,
            }
        })
        .collect::<Vec<_>>();
    let sup_inner = lp_norm(window, &v, ball(domains.inner_radius()), domains.inner_time(), f64::INFINITY);
    let top = rungs.last().map_or(0.0, |r| r.measured);
    let sup_gap = if sup_inner == 0.0 { top } else { (top / sup_inner - 1.0).abs() };
    Ok(MoserTrace {
        q,
        b: problem.b,
        kappa,
        sigma,
        shift,
        c0_measured,
        c0,
        c0_hypothesis_met: c0_measured <= c0,
        domains,
        rungs,
        sup_inner,
        sup_gap,
    })
}

/// Why the ε-regularity estimate does not apply to a window.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EpsilonFailure {
    /// `B > 1` (or negative).
    BoundOutOfRange,
    /// `Ric < −B` somewhere on the ball.
    RicciBelow,
    /// `Ric > n − 1` somewhere on the ball.
    RicciAbove,
    /// `‖R‖_{(n+2)/2, D} + B > δ`.
    Gate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonReport {
    pub b: f64,
    pub kappa: f64,
    pub sigma: Magnitude,
    pub constants: EpsilonConstants,
    pub ric_min: f64,
    pub ric_max: f64,
    /// `‖R‖_{(n+2)/2, D}`.
    pub norm_in: f64,
    /// `‖R₊‖_{∞, D'}`.
    pub sup_out: f64,
    /// `C (‖R‖_{(n+2)/2, D} + B)`.
    pub bound: Magnitude,
    pub failures: Vec<EpsilonFailure>,
    pub applicable: bool,
    /// Whether `sup_out ≤ bound`, when the estimate applies.
    pub holds: Option<bool>,
}

/// Checks `‖R₊‖_{∞,D'} ≤ C (‖R‖_{(n+2)/2,D} + B)` on `D = B_{g(1)}(center, r) × [0, 1]`,
/// `D' = B_{g(1)}(center, r/2) × [½, 1]`, provided `Ric ≥ −B` with `B ≤ 1`,
/// `Ric ≤ n − 1` on the ball and `‖R‖_{(n+2)/2,D} + B ≤ δ`.
pub fn epsilon_regularity_check(window: &FlowTrajectory, center: Center, r: f64, b: f64) -> Result<EpsilonReport> {
    check_unit(window)?;
    let n = window.n();
    let nf = n as f64;
    let kappa = measured_kappa(window, center, r)?;
    let sigma = sobolev_sigma(n, kappa)?.sigma;
    let constants = epsilon_constants(n, sigma, r, default_q(n), default_beta(n), 1.0)?;
    let last = final_state(window);
    let outer = Region::ball(last, center, r);
    let inner = Region::ball(last, center, 0.5 * r);
    let mut failures = Vec::new();
    if !(0.0..=1.0).contains(&b) {
        failures.push(EpsilonFailure::BoundOutOfRange);
    }
    let (mut ric_min, mut ric_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut r_vals = Vec::new();
    let mut r_plus = Vec::new();
    for (s, k) in window.states().iter().zip(window.curvatures()) {
        for j in outer.sample_indices(s) {
            ric_min = ric_min.min(k.ric_radial[j].min(k.ric_sphere[j]));
            ric_max = ric_max.max(k.ric_radial[j].max(k.ric_sphere[j]));
        }
        r_vals.push(k.r.clone());
        r_plus.push(k.r.iter().map(|v| v.max(0.0)).collect::<Vec<_>>());
    }
    let tol = 1e-12 * ric_min.abs().max(ric_max.abs()).max(f64::MIN_POSITIVE);
    if ric_min < -b - tol {
        failures.push(EpsilonFailure::RicciBelow);
    }
    if ric_max > nf - 1.0 + tol {
        failures.push(EpsilonFailure::RicciAbove);
    }
    let norm_in = lp_norm(window, &r_vals, outer, 0.0, (nf + 2.0) / 2.0);
    let sup_out = lp_norm(window, &r_plus, inner, 0.5, f64::INFINITY);
    let gate = Magnitude::from_f64(norm_in + b);
    if gate > constants.delta {
        failures.push(EpsilonFailure::Gate);
    }
    let bound = constants.c_eps * gate;
    let applicable = failures.is_empty();
    Ok(EpsilonReport {
        b,
        kappa,
        sigma,
        constants,
        ric_min,
        ric_max,
        norm_in,
        sup_out,
        bound,
        failures,
        applicable,
        holds: applicable.then(|| Magnitude::from_f64(sup_out) <= bound),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct PinchingSample {
    pub x: f64,
    pub t: f64,
    pub r: f64,
    /// Smallest eigenvalue of the curvature operator.
    pub nu: f64,
    /// `|ν|(ln|ν| + ln(1+t) − 3)` for `ν < 0`, zero otherwise.
    pub rhs: f64,
    /// The same expression evaluated for every `ν ≠ 0`.
    pub literal_rhs: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PinchingReport {
    /// `inf ν(·, t_start)`.
    pub initial_nu_min: f64,
    /// `inf ν(·, t_start) ≥ −1`, the normalization the estimate assumes.
    pub normalized: bool,
    pub samples: Vec<PinchingSample>,
}

impl PinchingReport {
    pub fn all_hold(&self) -> bool {
        self.samples.iter().all(|s| s.holds)
    }

    /// Whether `R ≥ literal_rhs` everywhere.
    pub fn literal_all_hold(&self) -> bool {
        self.samples.iter().all(|s| s.r >= s.literal_rhs)
    }
}

fn pinching_rhs(nu: f64, t: f64) -> f64 {
    if nu == 0.0 {
        return 0.0;
    }
    let a = nu.abs();
    a * (a.ln() + (1.0 + t).ln() - 3.0)
}

/// `R ≥ |ν|(ln|ν| + ln(1+t) − 3)` at every sample of a three-dimensional
/// flow whose initial metric has `ν ≥ −1`.
pub fn hamilton_ivey_check(traj: &FlowTrajectory) -> Result<PinchingReport> {
    if traj.n() != 3 {
        return Err(Error::NotApplicable(format!(
            "the pinching estimate is three-dimensional, got n = {}",
            traj.n()
        )));
    }
    let initial_nu_min = traj.curvatures()[0].nu_min.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut samples = Vec::new();
    for (s, k) in traj.states().iter().zip(traj.curvatures()) {
        let t = s.t();
        for (j, x) in node_x(s).into_iter().enumerate() {
            let (r, nu) = (k.r[j], k.nu_min[j]);
            let rhs = if nu < 0.0 { pinching_rhs(nu, t) } else { 0.0 };
            samples.push(PinchingSample {
                x,
                t,
                r,
                nu,
                rhs,
                literal_rhs: pinching_rhs(nu, t),
                holds: r >= rhs - 1e-12 * r.abs().max(rhs.abs()).max(1.0),
            });
        }
    }
    Ok(PinchingReport {
        initial_nu_min,
        normalized: initial_nu_min >= -1.0,
        samples,
    })
}
