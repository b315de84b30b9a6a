//! Time integration of `∂g/∂t = −2 Ric`.
//!
//! Round spheres shrink along the exact solution `c(t) = c₀ − 2(n−1)t`.
//! Warped products are integrated by the method of lines: sixth-order
//! differences in space and the explicit midpoint rule in time. The warped
//! system is written in DeTurck form against the round background metric,
//! which makes it strictly parabolic in both `φ` and `ψ`; without that
//! extra diffeomorphism term the `φ` equation has no diffusion and the
//! scheme is unstable at the poles.
//!
//! ```
//! use ricci_lab::flow::{run_flow, FlowConfig};
//! use ricci_lab::geometry::make_round_sphere;
//!
//! let s3 = make_round_sphere(3, 1.0, 0.0).unwrap();
//! let traj = run_flow(&s3, &FlowConfig::default()).unwrap();
//! assert!(traj.singular());
//! assert!((traj.t_hat().unwrap() - 0.25).abs() < 1e-6);
//! ```

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::geometry::{
    self, curvature, derivatives, diameter, make_round_sphere, make_warped, CurvatureField, Form, MetricState, Profile,
    Region,
};
use crate::stencil::{self, Parity};

/// Step-size control and stopping rules of a run.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowConfig {
    /// Upper bound on every time step.
    pub dt_initial: f64,
    /// Fraction of the stability limit used, in `(0, 1]`.
    pub safety: f64,
    /// The run stops as singular once `max |Rm|` reaches this value.
    pub curvature_ceiling: f64,
    pub t_max: f64,
    /// A snapshot is stored every `output_stride` accepted steps.
    pub output_stride: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            dt_initial: 1e-3,
            safety: 0.8,
            curvature_ceiling: 1e6,
            t_max: 10.0,
            output_stride: 1,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.dt_initial > 0.0
            && self.safety > 0.0
            && self.safety <= 1.0
            && self.curvature_ceiling > 0.0
            && self.t_max > 0.0
            && self.output_stride > 0;
        if !ok {
            return Err(Error::InvalidParameter(format!("invalid flow config {self:?}")));
        }
        Ok(())
    }
}

/// Why a run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    TimeLimit,
    CurvatureCeiling,
    StepCollapse,
    NumericalBlowup,
    NeckCollapse,
}

impl StopReason {
    pub fn is_singular(self) -> bool {
        self != StopReason::TimeLimit
    }

    pub fn name(self) -> &'static str {
        match self {
            StopReason::TimeLimit => "time-limit",
            StopReason::CurvatureCeiling => "curvature-ceiling",
            StopReason::StepCollapse => "step-collapse",
            StopReason::NumericalBlowup => "numerical-blowup",
            StopReason::NeckCollapse => "neck-collapse",
        }
    }
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Running maximum of `R` over `M × [t_start, t]` at snapshot time `t`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CurvatureMax {
    pub t: f64,
    /// Time at which the maximum is attained.
    pub t_at: f64,
    /// Sample index at which it is attained.
    pub location: usize,
    pub value: f64,
}

/// Time-ordered snapshots of a run with their curvature.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowTrajectory {
    states: Vec<MetricState>,
    curvatures: Vec<CurvatureField>,
    stop: StopReason,
    t_hat: Option<f64>,
    track: Vec<CurvatureMax>,
    config: FlowConfig,
    steps: usize,
}

impl FlowTrajectory {
    pub fn states(&self) -> &[MetricState] {
        &self.states
    }

    pub fn curvatures(&self) -> &[CurvatureField] {
        &self.curvatures
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn n(&self) -> usize {
        self.states[0].n()
    }

    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t()).collect()
    }

    pub fn t_start(&self) -> f64 {
        self.states[0].t()
    }

    pub fn t_end(&self) -> f64 {
        self.states[self.states.len() - 1].t()
    }

    pub fn singular(&self) -> bool {
        self.stop.is_singular()
    }

    pub fn stop_reason(&self) -> StopReason {
        self.stop
    }

    /// Estimated maximal existence time; set exactly when the run is singular.
    pub fn t_hat(&self) -> Option<f64> {
        self.t_hat
    }

    pub fn max_curvature_track(&self) -> &[CurvatureMax] {
        &self.track
    }

    pub fn config(&self) -> &FlowConfig {
        &self.config
    }

    /// Accepted time steps taken by the run.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Assembles a trajectory from stored parts, recomputing curvature and
    /// the running maximum.
    pub fn from_states(
        states: Vec<MetricState>,
        stop: StopReason,
        t_hat: Option<f64>,
        config: FlowConfig,
        steps: usize,
    ) -> Result<FlowTrajectory> {
        if states.is_empty() {
            return Err(Error::InvalidParameter("a trajectory needs at least one state".into()));
        }
        let n = states[0].n();
        let round = states[0].is_round();
        for w in states.windows(2) {
            if !(w[1].t() > w[0].t()) {
                return Err(Error::InvalidParameter(format!(
                    "snapshot times must increase: {} then {}",
                    w[0].t(),
                    w[1].t()
                )));
            }
        }
        if states.iter().any(|s| s.n() != n || s.is_round() != round) {
            return Err(Error::InvalidParameter("snapshots must share dimension and form".into()));
        }
        if stop.is_singular() != t_hat.is_some() {
            return Err(Error::InvalidParameter("T_hat must be set exactly for singular runs".into()));
        }
        let curvatures = states.iter().map(curvature).collect::<Result<Vec<_>>>()?;
        let mut traj = FlowTrajectory {
            states,
            curvatures,
            stop,
            t_hat,
            track: Vec::new(),
            config,
            steps,
        };
        traj.track = running_max(&traj.states, &traj.curvatures);
        Ok(traj)
    }

    /// The state at time `t`, interpolated linearly between snapshots
    /// (in `c` for round spheres, nodewise in `φ` and `ψ` otherwise).
    pub fn state_at(&self, t: f64) -> Result<MetricState> {
        let (a, b) = (self.t_start(), self.t_end());
        let tol = 1e-12 * a.abs().max(b.abs()).max(1.0);
        if t < a - tol || t > b + tol {
            return Err(Error::OutOfRange(format!("time {t} outside the stored span [{a}, {b}]")));
        }
        let t = t.clamp(a, b);
        let i = self.states.partition_point(|s| s.t() <= t);
        if i == 0 {
            return Ok(self.states[0].clone());
        }
        if i == self.states.len() {
            return Ok(self.states[i - 1].clone());
        }
        let (s0, s1) = (&self.states[i - 1], &self.states[i]);
        if t == s0.t() {
            return Ok(s0.clone());
        }
        let w = (t - s0.t()) / (s1.t() - s0.t());
        let form = match (s0.form(), s1.form()) {
            (Form::RoundSphere { c: c0 }, Form::RoundSphere { c: c1 }) => Form::RoundSphere {
                c: (1.0 - w) * c0 + w * c1,
            },
            (Form::Warped(p0), Form::Warped(p1)) => {
                let lerp = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (1.0 - w) * x + w * y).collect();
                Form::Warped(Profile::from_parts(lerp(p0.phi(), p1.phi()), lerp(p0.psi(), p1.psi())))
            }
            _ => unreachable!("trajectory snapshots share their form"),
        };
        Ok(MetricState::from_parts(s0.n(), t, form))
    }
}

fn running_max(states: &[MetricState], curvatures: &[CurvatureField]) -> Vec<CurvatureMax> {
    let mut best: Option<CurvatureMax> = None;
    let mut out = Vec::with_capacity(states.len());
    for (s, k) in states.iter().zip(curvatures) {
        let (j, v) = k.argmax_r();
        let cur = match best {
            Some(b) if b.value >= v => CurvatureMax { t: s.t(), ..b },
            _ => CurvatureMax {
                t: s.t(),
                t_at: s.t(),
                location: j,
                value: v,
            },
        };
        best = Some(cur);
        out.push(cur);
    }
    out
}

/// Exact round-sphere solution `c(t) = c₀ − 2(n−1)t`.
pub fn evolve_round_sphere(n: usize, c0: f64, t: f64) -> Result<MetricState> {
    let t_sing = c0 / (2.0 * (n as f64 - 1.0));
    if t >= t_sing {
        return Err(Error::PastSingularity { t, t_sing });
    }
    make_round_sphere(n, c0 - 2.0 * (n as f64 - 1.0) * t, t)
}

/// The DeTurck vector field `W = φ_x/φ³ + U`, in the grid coordinate.
///
/// `U = −(n−1)/ψ·(ψ_x/φ² − sin x cos x/ψ)` is the part coming from the
/// spheres; both parts vanish at the poles and for the round metric.
pub fn deturck_field(n: usize, p: &Profile) -> Vec<f64> {
    let d = derivatives(p);
    let u = sphere_gauge_term(n, p, &d.psi_x);
    (0..=p.cells())
        .map(|j| d.phi_x[j] / p.phi()[j].powi(3) + u[j])
        .collect()
}

fn sphere_gauge_term(n: usize, p: &Profile, psi_x: &[f64]) -> Vec<f64> {
    let m = p.cells();
    let (phi, psi) = (p.phi(), p.psi());
    let mut u = vec![0.0; m + 1];
    for j in 1..m {
        let (sx, cx) = p.sin_cos(j);
        u[j] = -(n as f64 - 1.0) / psi[j] * (psi_x[j] / (phi[j] * phi[j]) - sx * cx / psi[j]);
    }
    u
}

/// Time derivatives `(∂φ/∂t, ∂ψ/∂t)` of the DeTurck-modified flow.
///
/// The principal part of the `φ` equation, `(φ_x/φ²)_x`, is expanded as
/// `φ_xx/φ² − 2φ_x²/φ³` so that it uses the compact second-difference
/// stencil; taking `d1` of `φ_x/φ²` instead leaves the grid-scale mode
/// undamped.
fn warped_rhs(n: usize, p: &Profile) -> (Vec<f64>, Vec<f64>) {
    let h = p.spacing();
    let m = p.cells();
    let nf = n as f64;
    let (phi, psi) = (p.phi(), p.psi());
    let d = derivatives(p);
    let phi_xx = stencil::d2(phi, Parity::Even, h);
    let u = sphere_gauge_term(n, p, &d.psi_x);
    let u_phi: Vec<f64> = u.iter().zip(phi).map(|(a, b)| a * b).collect();
    let u_phi_x = stencil::d1(&u_phi, Parity::Odd, h);
    let mut dphi: Vec<f64> = (0..=m)
        .map(|j| {
            let f = phi[j];
            -(nf - 1.0) * d.k_radial[j] * f + phi_xx[j] / (f * f) - 2.0 * d.phi_x[j] * d.phi_x[j] / (f * f * f)
                + u_phi_x[j]
        })
        .collect();
    stencil::pole_fill(&mut dphi);
    let mut dpsi = vec![0.0; m + 1];
    for j in 1..m {
        let w = d.phi_x[j] / phi[j].powi(3) + u[j];
        dpsi[j] = d.psi_ss[j] - (nf - 2.0) * (1.0 - d.psi_s[j] * d.psi_s[j]) / psi[j] + w * d.psi_x[j];
    }
    (dphi, dpsi)
}

/// Why a warped step was not accepted.
#[derive(Clone, Debug, PartialEq)]
pub enum StepRejected {
    /// The result violates the metric invariants; retry with a smaller step.
    Invalid(String),
    /// The interior minimum of `ψ` fell below `10·ε`: the neck has pinched.
    NeckCollapse,
    NonFinite,
}

fn neck_min(psi: &[f64]) -> f64 {
    psi[1..psi.len() - 1].iter().cloned().fold(f64::INFINITY, f64::min)
}

/// One explicit midpoint step of length `dt`.
///
/// Round spheres are advanced along the exact solution.
pub fn step_warped(state: &MetricState, dt: f64) -> std::result::Result<MetricState, StepRejected> {
    advance(state, dt, None).map(|(s, _)| s)
}

/// Rounding carried between steps by compensated summation.
type Carry = (Vec<f64>, Vec<f64>);

/// Midpoint step; with `carry`, the update `y + dt·k` is summed with Kahan
/// compensation and the new carry is returned.
///
/// Plain summation loses half an ulp of `φ` and `ψ` per step. Over the
/// 10⁴–10⁵ steps of a fine-grid run that random walk is large enough for
/// the fourth derivatives in `ΔR` at the poles to pick it up.
fn advance(
    state: &MetricState,
    dt: f64,
    carry: Option<&Carry>,
) -> std::result::Result<(MetricState, Option<Carry>), StepRejected> {
    let n = state.n();
    let t = state.t() + dt;
    let p = match state.form() {
        Form::RoundSphere { c } => {
            return evolve_round_sphere(n, *c, dt)
                .map(|s| (s.with_time(t), None))
                .map_err(|e| StepRejected::Invalid(e.to_string()));
        }
        Form::Warped(p) => p,
    };
    if dt == 0.0 {
        return Ok((state.clone(), carry.cloned()));
    }
    let axpy = |a: &[f64], b: &[f64], s: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + s * y).collect() };
    let (k1_phi, k1_psi) = warped_rhs(n, p);
    let mid = Profile::from_parts(axpy(p.phi(), &k1_phi, 0.5 * dt), axpy(p.psi(), &k1_psi, 0.5 * dt));
    if mid.phi().iter().any(|v| !(*v > 0.0)) || neck_min(mid.psi()) <= 0.0 {
        return Err(StepRejected::Invalid("midpoint stage left the admissible set".into()));
    }
    let (k2_phi, k2_psi) = warped_rhs(n, &mid);
    let (phi, psi, carry) = match carry {
        None => (axpy(p.phi(), &k2_phi, dt), axpy(p.psi(), &k2_psi, dt), None),
        Some((c_phi, c_psi)) => {
            let (phi, c_phi) = kahan(p.phi(), &k2_phi, dt, c_phi);
            let (psi, c_psi) = kahan(p.psi(), &k2_psi, dt, c_psi);
            (phi, psi, Some((c_phi, c_psi)))
        }
    };
    if phi.iter().chain(&psi).any(|v| !v.is_finite()) {
        return Err(StepRejected::NonFinite);
    }
    let nm = neck_min(&psi);
    if nm > 0.0 && nm < 10.0 * f64::EPSILON {
        return Err(StepRejected::NeckCollapse);
    }
    make_warped(n, psi, phi, t)
        .map(|s| (s, carry))
        .map_err(|e| StepRejected::Invalid(e.to_string()))
}

fn kahan(y: &[f64], k: &[f64], dt: f64, carry: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut out = Vec::with_capacity(y.len());
    let mut c = Vec::with_capacity(y.len());
    for j in 0..y.len() {
        let inc = dt * k[j] - carry[j];
        let next = y[j] + inc;
        c.push((next - y[j]) - inc);
        out.push(next);
    }
    (out, c)
}

/// Stable step for the current state: `safety · n/(100 R)` on round spheres
/// (one fiftieth of the remaining lifespan), and
/// `safety · min(h·min φ, min ψ)² / (4(n−1))` on warped states.
pub fn stable_dt(state: &MetricState, config: &FlowConfig) -> f64 {
    let n = state.n() as f64;
    let limit = match state.form() {
        Form::RoundSphere { c } => 0.02 * c / (2.0 * (n - 1.0)),
        Form::Warped(p) => {
            let hs = p.spacing() * p.phi().iter().cloned().fold(f64::INFINITY, f64::min);
            let l = hs.min(neck_min(p.psi()));
            l * l / (4.0 * (n - 1.0))
        }
    };
    (config.safety * limit).min(config.dt_initial)
}

const MIN_DT: f64 = 1e-14;

/// Integrates from `initial` until `t_max`, the curvature ceiling, or a
/// collapse of the step size.
///
/// `T̂` is the zero of the line through the last two values of
/// `1/max|Rm|` when the last three accepted steps show a consistent slope
/// (to 10%), and the last time reached otherwise.
pub fn run_flow(initial: &MetricState, config: &FlowConfig) -> Result<FlowTrajectory> {
    config.validate()?;
    let mut state = initial.clone();
    let mut k = curvature(&state)?;
    let t_limit = initial.t() + config.t_max;
    let mut states = Vec::new();
    let mut curvatures = Vec::new();
    let mut history: VecDeque<(f64, f64)> = VecDeque::with_capacity(3);
    let mut steps = 0usize;
    let mut since_snapshot = 0usize;
    let mut dt_cap = f64::INFINITY;
    let mut carry: Option<Carry> = match initial.form() {
        Form::RoundSphere { .. } => None,
        Form::Warped(p) => Some((vec![0.0; p.cells() + 1], vec![0.0; p.cells() + 1])),
    };
    let stop = loop {
        let rm = k.max_rm();
        if !rm.is_finite() {
            break StopReason::NumericalBlowup;
        }
        if history.len() == 3 {
            history.pop_front();
        }
        history.push_back((state.t(), 1.0 / rm));
        if since_snapshot == 0 {
            states.push(state.clone());
            curvatures.push(k.clone());
        }
        if rm >= config.curvature_ceiling {
            break StopReason::CurvatureCeiling;
        }
        let remaining = t_limit - state.t();
        if remaining <= 1e-15 * t_limit.abs().max(1.0) {
            break StopReason::TimeLimit;
        }
        let mut dt = stable_dt(&state, config).min(dt_cap);
        let last = dt >= remaining;
        if last {
            dt = remaining;
        }
        let next = loop {
            match advance(&state, dt, carry.as_ref()) {
                Ok((s, c)) => {
                    carry = c;
                    break Ok(s);
                }
                Err(StepRejected::Invalid(_)) if dt / 2.0 >= MIN_DT => {
                    dt /= 2.0;
                    dt_cap = dt;
                }
                Err(StepRejected::Invalid(_)) => break Err(StopReason::StepCollapse),
                Err(StepRejected::NeckCollapse) => break Err(StopReason::NeckCollapse),
                Err(StepRejected::NonFinite) => break Err(StopReason::NumericalBlowup),
            }
        };
        let next = match next {
            Ok(s) => s,
            Err(reason) => break reason,
        };
        let next = if last && dt == remaining { next.with_time(t_limit) } else { next };
        let nk = match curvature(&next) {
            Ok(k) => k,
            Err(_) => break StopReason::NumericalBlowup,
        };
        state = next;
        k = nk;
        steps += 1;
        since_snapshot = (since_snapshot + 1) % config.output_stride;
        // relax a rejection-imposed cap slowly
        dt_cap *= 1.25;
    };
    if states.last().map(|s| s.t()) != Some(state.t()) && stop != StopReason::NumericalBlowup {
        states.push(state.clone());
        curvatures.push(k);
    }
    let t_hat = stop.is_singular().then(|| estimate_t_hat(&history, states[states.len() - 1].t()));
    let track = running_max(&states, &curvatures);
    Ok(FlowTrajectory {
        states,
        curvatures,
        stop,
        t_hat,
        track,
        config: *config,
        steps,
    })
}

fn estimate_t_hat(history: &VecDeque<(f64, f64)>, t_last: f64) -> f64 {
    if history.len() < 3 {
        return t_last;
    }
    let (t0, y0) = history[0];
    let (t1, y1) = history[1];
    let (t2, y2) = history[2];
    let s0 = (y1 - y0) / (t1 - t0);
    let s1 = (y2 - y1) / (t2 - t1);
    if s0 < 0.0 && s1 < 0.0 && (s1 / s0 - 1.0).abs() <= 0.1 {
        (t2 - y2 / s1).max(t_last)
    } else {
        t_last
    }
}

/// `∂R/∂t − ΔR − 2|Ric|²` at snapshot `i`.
///
/// `∂R/∂t` is the central difference over the neighbouring snapshots: five
/// of them (fourth order) when available, three otherwise. The wider
/// stencil lets snapshots sit far enough apart that rounding in `R` does
/// not dominate the difference quotient.
///
/// Warped trajectories are solutions of the DeTurck-modified flow, which
/// differs from the Ricci flow by the diffeomorphisms generated by `W`; the
/// Lie derivative `W·R_x` is subtracted as well so the residual measures
/// only discretization error.
pub fn scalar_evolution_residual(traj: &FlowTrajectory, i: usize) -> Result<Vec<f64>> {
    interior(traj, i)?;
    let s1 = &traj.states[i];
    let k1 = &traj.curvatures[i];
    let mut out: Vec<f64> = vec![0.0; k1.len()];
    for (k, w) in time_derivative_weights(traj, i) {
        for (o, r) in out.iter_mut().zip(&traj.curvatures[k].r) {
            *o += w * r;
        }
    }
    let lap = geometry::laplacian(s1, &k1.r);
    let ric2 = k1.ric_norm_sq(s1.n());
    let lie = match s1.form() {
        Form::RoundSphere { .. } => vec![0.0],
        Form::Warped(p) => {
            let w = deturck_field(s1.n(), p);
            let rx = stencil::d1(&k1.r, Parity::Even, p.spacing());
            w.iter().zip(&rx).map(|(a, b)| a * b).collect()
        }
    };
    for j in 0..out.len() {
        out[j] -= lie[j] + lap[j] + 2.0 * ric2[j];
    }
    Ok(out)
}

/// `|dV/dt + ∫R dμ|` at snapshot `i`, with `dV/dt` as in
/// [`scalar_evolution_residual`]. The volume does not depend on the gauge.
pub fn volume_evolution_residual(traj: &FlowTrajectory, i: usize) -> Result<f64> {
    interior(traj, i)?;
    let dv: f64 = time_derivative_weights(traj, i)
        .into_iter()
        .map(|(k, w)| w * geometry::total_volume(&traj.states[k]))
        .sum();
    Ok((dv + total_scalar_curvature(traj, i)).abs())
}

/// `∫ R dμ` at snapshot `i`, the scale of [`volume_evolution_residual`].
pub fn total_scalar_curvature(traj: &FlowTrajectory, i: usize) -> f64 {
    Region::Whole.integrate(&traj.states[i], Some(&traj.curvatures[i].r), &|v| v)
}

/// Snapshot indices and weights of `d/dt` at snapshot `i`: the derivative
/// of the Lagrange interpolant through `i − 2 ..= i + 2` when those exist,
/// else through `i − 1 ..= i + 1`.
fn time_derivative_weights(traj: &FlowTrajectory, i: usize) -> Vec<(usize, f64)> {
    let half = if i >= 2 && i + 2 < traj.len() { 2 } else { 1 };
    let idx: Vec<usize> = (i - half..=i + half).collect();
    let ts: Vec<f64> = idx.iter().map(|&k| traj.states[k].t() - traj.states[i].t()).collect();
    idx.iter()
        .enumerate()
        .map(|(a, &k)| {
            // l_a'(0) for the Lagrange basis polynomial l_a
            let w = if k == i {
                ts.iter().enumerate().filter(|&(b, _)| b != a).map(|(_, tb)| -1.0 / tb).sum()
            } else {
                let mut w = 1.0 / (ts[a] - ts[half]);
                for (b, tb) in ts.iter().enumerate() {
                    if b != a && b != half {
                        w *= -tb / (ts[a] - tb);
                    }
                }
                w
            };
            (k, w)
        })
        .collect()
}

fn interior(traj: &FlowTrajectory, i: usize) -> Result<()> {
    if i == 0 || i + 1 >= traj.len() {
        return Err(Error::OutOfRange(format!(
            "snapshot {i} is not interior to a trajectory of {} snapshots",
            traj.len()
        )));
    }
    Ok(())
}

/// Ricci bounds assumed on the region over the window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RicciBounds {
    pub ric_low: f64,
    pub ric_high: f64,
}

impl RicciBounds {
    /// `|Ric| ≤ n − 1`.
    pub fn unit(n: usize) -> Self {
        let b = n as f64 - 1.0;
        RicciBounds {
            ric_low: -b,
            ric_high: b,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VolumeDiameterSample {
    /// Window time `τ = t − t₀ ∈ [0, 1]`.
    pub tau: f64,
    pub volume: f64,
    pub volume_lower: f64,
    pub volume_upper: f64,
    pub diameter: f64,
    pub diameter_upper: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VolumeDiameterReport {
    pub t0: f64,
    pub samples: Vec<VolumeDiameterSample>,
    /// Observed extremes of the Ricci eigenvalues on the region.
    pub ric_min: f64,
    pub ric_max: f64,
    pub hypothesis_met: bool,
    /// Every sample satisfies all three bounds.
    pub holds: bool,
    /// The region diameters are estimates rather than exact values.
    pub diameter_approximate: bool,
}

/// Checks the volume and diameter comparison bounds on `[t₀, t₀+1]`.
///
/// With `−a ≤ Ric ≤ b` on the region the volume obeys
/// `e^{−na(1−τ)} V(1) ≤ V(τ) ≤ e^{nb(1−τ)} V(1)` and the diameter
/// `D(τ) ≤ e^{b(1−τ)} D(1)`; `a = b = n − 1` gives the unit-curvature form.
pub fn volume_diameter_bound_check(
    traj: &FlowTrajectory,
    t0: f64,
    region: Region,
    bounds: RicciBounds,
) -> Result<VolumeDiameterReport> {
    let t1 = t0 + 1.0;
    let end = traj.state_at(t1)?;
    traj.state_at(t0)?;
    let n = traj.n() as f64;
    let a = (-bounds.ric_low).max(0.0);
    let b = bounds.ric_high.max(0.0);
    let v1 = region.volume(&end);
    let (d1, exact) = region.diameter(&end);
    let mut times = vec![t0];
    times.extend(traj.times().into_iter().filter(|&t| t > t0 && t < t1));
    times.push(t1);
    let (mut ric_min, mut ric_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut samples = Vec::with_capacity(times.len());
    let mut approximate = !exact;
    for &t in &times {
        let s = traj.state_at(t)?;
        let k = curvature(&s)?;
        for j in region.sample_indices(&s) {
            for v in [k.ric_radial[j], k.ric_sphere[j]] {
                ric_min = ric_min.min(v);
                ric_max = ric_max.max(v);
            }
        }
        let tau = t - t0;
        let volume = region.volume(&s);
        let (diam, exact) = region.diameter(&s);
        approximate |= !exact;
        let slack = |x: f64| 1e-12 + 1e-9 * x.abs();
        let volume_lower = (-n * a * (1.0 - tau)).exp() * v1;
        let volume_upper = (n * b * (1.0 - tau)).exp() * v1;
        let diameter_upper = (b * (1.0 - tau)).exp() * d1;
        samples.push(VolumeDiameterSample {
            tau,
            volume,
            volume_lower,
            volume_upper,
            diameter: diam,
            diameter_upper,
            holds: volume + slack(volume_lower) >= volume_lower
                && volume <= volume_upper + slack(volume_upper)
                && diam <= diameter_upper + slack(diameter_upper),
        });
    }
    let hypothesis_met = ric_min >= bounds.ric_low - 1e-9 && ric_max <= bounds.ric_high + 1e-9;
    Ok(VolumeDiameterReport {
        t0,
        holds: samples.iter().all(|s| s.holds),
        samples,
        ric_min,
        ric_max,
        hypothesis_met,
        diameter_approximate: approximate,
    })
}

/// The curvature scale used to pick blow-up points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaxQuantity {
    /// Scalar curvature `R`.
    Scalar,
    /// `|Rm|`.
    Riemann,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvaturePoint {
    /// Snapshot index.
    pub index: usize,
    /// Sample index within the snapshot.
    pub node: usize,
    /// Grid coordinate of the sample (`0` on round spheres).
    pub x: f64,
    pub t: f64,
    pub q: f64,
}

/// `k` space-time points, each attaining the running maximum of the chosen
/// quantity, with increasing `t`, nondecreasing `Q`, and `Q` spread
/// log-uniformly from the first record to the final one.
pub fn curvature_maximizing_sequence(traj: &FlowTrajectory, k: usize, quantity: MaxQuantity) -> Result<Vec<CurvaturePoint>> {
    if !traj.singular() {
        return Err(Error::NotApplicable("the trajectory is not singular".into()));
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    let mut records: Vec<CurvaturePoint> = Vec::new();
    for (i, (s, c)) in traj.states.iter().zip(&traj.curvatures).enumerate() {
        let field = match quantity {
            MaxQuantity::Scalar => &c.r,
            MaxQuantity::Riemann => &c.rm_norm,
        };
        let (node, q) = geometry::argmax(field);
        if records.last().map_or(true, |r| q > r.q) {
            let x = match s.form() {
                Form::RoundSphere { .. } => 0.0,
                Form::Warped(p) => p.x(node),
            };
            records.push(CurvaturePoint {
                index: i,
                node,
                x,
                t: s.t(),
                q,
            });
        }
    }
    let last = records.len() - 1;
    if k == 1 || last == 0 {
        return Ok(vec![records[last]]);
    }
    let (lo, hi) = (records[0].q.ln(), records[last].q.ln());
    let mut out: Vec<CurvaturePoint> = Vec::with_capacity(k);
    for i in 0..k {
        let target = lo + (hi - lo) * (i + 1) as f64 / k as f64;
        let j = records.partition_point(|r| r.q.ln() < target - 1e-12).min(last);
        if out.last().map_or(true, |p| p.index < records[j].index) {
            out.push(records[j]);
        }
    }
    Ok(out)
}

/// Diameter of a slice times its maximal scalar curvature, a dimensionless
/// quantity that parabolic rescaling preserves.
pub fn scale_free_curvature(state: &MetricState) -> Result<f64> {
    let k = curvature(state)?;
    let d = diameter(state).value;
    Ok(k.argmax_r().1 * d * d)
}

/// Sampling of `sin x·(1 − (1 − a)·sinᵏ x)` with `φ = 1`: a dumbbell whose
/// neck radius at `x = π/2` is `a`.
pub fn dumbbell_profile(n: usize, m: usize, a: f64, k: i32) -> Result<MetricState> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::InvalidParameter(format!("neck radius must lie in (0, 1], got {a}")));
    }
    let mut psi: Vec<f64> = (0..=m)
        .map(|j| {
            let s = geometry::grid_sin_cos(j, m).0;
            s * (1.0 - (1.0 - a) * s.powi(k))
        })
        .collect();
    psi[0] = 0.0;
    psi[m] = 0.0;
    make_warped(n, psi, vec![1.0; m + 1], 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::sampled_round_sphere;

    #[test]
    fn exact_sphere_examples() {
        let s = evolve_round_sphere(3, 1.0, 0.2).unwrap();
        assert!(matches!(s.form(), Form::RoundSphere { c } if (c - 0.2).abs() < 1e-15));
        assert!((curvature(&s).unwrap().r[0] - 30.0).abs() < 1e-12);
        let s = evolve_round_sphere(2, 1.0, 0.25).unwrap();
        assert!(matches!(s.form(), Form::RoundSphere { c } if *c == 0.5));
        assert!(matches!(evolve_round_sphere(3, 1.0, 0.25), Err(Error::PastSingularity { .. })));
    }

    #[test]
    fn zero_step_is_identity() {
        let s = sampled_round_sphere(3, 1.0, 32, 0.0).unwrap();
        assert_eq!(step_warped(&s, 0.0).unwrap(), s);
    }

    #[test]
    fn round_profile_stays_round() {
        let s = sampled_round_sphere(3, 1.0, 64, 0.0).unwrap();
        let dt = 1e-4;
        let mut cur = s;
        for _ in 0..10 {
            cur = step_warped(&cur, dt).unwrap();
        }
        let Form::Warped(p) = cur.form() else { unreachable!() };
        let c = 1.0 - 4.0 * 10.0 * dt;
        for j in 0..=64 {
            assert!((p.phi()[j] - c.sqrt()).abs() < 1e-8);
            assert!((p.psi()[j] - c.sqrt() * p.x(j).sin()).abs() < 1e-8);
        }
    }

    #[test]
    fn deturck_field_vanishes_on_round_profile() {
        let s = sampled_round_sphere(4, 2.0, 64, 0.0).unwrap();
        let Form::Warped(p) = s.form() else { unreachable!() };
        let w = deturck_field(4, p);
        assert!(w.iter().all(|v| v.abs() < 1e-6));
    }

    #[test]
    fn ceiling_below_initial_curvature_stops_immediately() {
        let s = make_round_sphere(3, 1.0, 0.0).unwrap();
        let cfg = FlowConfig {
            curvature_ceiling: 1.0,
            ..FlowConfig::default()
        };
        let t = run_flow(&s, &cfg).unwrap();
        assert_eq!(t.len(), 1);
        assert!(t.singular());
        assert_eq!(t.t_hat(), Some(0.0));
    }

    #[test]
    fn two_sphere_prefix_is_exact() {
        let s = make_round_sphere(2, 1.0, 0.0).unwrap();
        let t = run_flow(
            &s,
            &FlowConfig {
                t_max: 0.1,
                ..FlowConfig::default()
            },
        )
        .unwrap();
        assert!(!t.singular() && t.t_hat().is_none());
        assert!((t.t_end() - 0.1).abs() < 1e-15);
        for (s, k) in t.states().iter().zip(t.curvatures()) {
            assert!((k.r[0] - 2.0 / (1.0 - 2.0 * s.t())).abs() < 1e-12);
        }
    }

    #[test]
    fn state_at_interpolates_linearly_in_c() {
        let s = make_round_sphere(3, 1.0, 0.0).unwrap();
        let t = run_flow(&s, &FlowConfig::default()).unwrap();
        let mid = t.state_at(0.123).unwrap();
        assert!(matches!(mid.form(), Form::RoundSphere { c } if (c - (1.0 - 4.0 * 0.123)).abs() < 1e-13));
        assert!(t.state_at(0.3).is_err());
    }

    #[test]
    fn maximizing_sequence_on_sphere() {
        let s = make_round_sphere(3, 1.0, 0.0).unwrap();
        let t = run_flow(&s, &FlowConfig::default()).unwrap();
        let seq = curvature_maximizing_sequence(&t, 5, MaxQuantity::Scalar).unwrap();
        assert_eq!(seq.len(), 5);
        for w in seq.windows(2) {
            assert!(w[1].t > w[0].t && w[1].q >= w[0].q);
        }
        for p in &seq {
            assert!((p.q - 6.0 / (1.0 - 4.0 * p.t)).abs() < 1e-9 * p.q);
        }
        assert!(seq[4].q >= t.config().curvature_ceiling / 2.0);
        let one = curvature_maximizing_sequence(&t, 1, MaxQuantity::Scalar).unwrap();
        assert_eq!(one[0].index, t.len() - 1);
    }
}
