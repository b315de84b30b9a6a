//! Slice and space-time `L^α` norms of curvature quantities, the divergence
//! scan as the end time approaches the singular time, and extension
//! verdicts.
//!
//! ```
//! use ricci_lab::flow::{run_flow, FlowConfig};
//! use ricci_lab::geometry::{make_round_sphere, Region};
//! use ricci_lab::norms::{spacetime_norm, NormQuery, Quantity};
//! use std::f64::consts::PI;
//!
//! let traj = run_flow(&make_round_sphere(3, 1.0, 0.0).unwrap(), &FlowConfig::default()).unwrap();
//! let q = NormQuery::new(Quantity::R, 2.0, Region::Whole, (0.0, 0.25 - 1e-6));
//! let norm = spacetime_norm(&traj, &q).unwrap();
//! assert!((norm / (6.0 * PI) - 1.0).abs() < 5e-3);
//! ```

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flow::FlowTrajectory;
use crate::geometry::{CurvatureField, MetricState, Region};

/// A scalar curvature quantity `F` whose norm can be taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Quantity {
    #[serde(rename = "R")]
    R,
    #[serde(rename = "abs-R")]
    AbsR,
    #[serde(rename = "R+")]
    RPlus,
    #[serde(rename = "R-")]
    RMinus,
    #[serde(rename = "Rm")]
    Rm,
    #[serde(rename = "Ric")]
    Ric,
}

impl Quantity {
    pub const ALL: [Quantity; 6] = [
        Quantity::R,
        Quantity::AbsR,
        Quantity::RPlus,
        Quantity::RMinus,
        Quantity::Rm,
        Quantity::Ric,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::R => "R",
            Quantity::AbsR => "abs-R",
            Quantity::RPlus => "R+",
            Quantity::RMinus => "R-",
            Quantity::Rm => "Rm",
            Quantity::Ric => "Ric",
        }
    }

    /// The smooth field that is interpolated in space before the pointwise
    /// map of [`Quantity::apply`].
    fn base(self, k: &CurvatureField, n: usize) -> Vec<f64> {
        match self {
            Quantity::R | Quantity::AbsR | Quantity::RPlus | Quantity::RMinus => k.r.clone(),
            Quantity::Rm => k.rm_norm.clone(),
            Quantity::Ric => k.ric_norm_sq(n).into_iter().map(f64::sqrt).collect(),
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Quantity::R => v,
            Quantity::AbsR | Quantity::Rm | Quantity::Ric => v.abs(),
            Quantity::RPlus => v.max(0.0),
            Quantity::RMinus => (-v).max(0.0),
        }
    }

    /// The sampled field `F`; signed for `R`, nonnegative otherwise.
    pub fn samples(self, k: &CurvatureField, n: usize) -> Vec<f64> {
        self.base(k, n).into_iter().map(|v| self.apply(v)).collect()
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown quantity {s:?} (expected R, abs-R, R+, R-, Rm or Ric)")))
    }
}

/// `‖F‖_{α, region × [a, b]}`. `alpha = ∞` selects the sup norm.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NormQuery {
    pub quantity: Quantity,
    pub alpha: f64,
    pub region: Region,
    pub interval: (f64, f64),
}

impl NormQuery {
    pub fn new(quantity: Quantity, alpha: f64, region: Region, interval: (f64, f64)) -> Self {
        NormQuery {
            quantity,
            alpha,
            region,
            interval,
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha >= 1.0) {
        return Err(Error::InvalidParameter(format!("α must be at least 1, got {alpha}")));
    }
    Ok(())
}

/// `∫_region |F|^α dμ` on one slice.
pub fn slice_integral(state: &MetricState, k: &CurvatureField, quantity: Quantity, alpha: f64, region: Region) -> f64 {
    let base = quantity.base(k, state.n());
    region.integrate(state, Some(&base), &|v| quantity.apply(v).abs().powf(alpha))
}

/// Largest `|F|` over the samples inside `region`.
pub fn slice_sup(state: &MetricState, k: &CurvatureField, quantity: Quantity, region: Region) -> f64 {
    let f = quantity.samples(k, state.n());
    region
        .sample_indices(state)
        .into_iter()
        .map(|j| f[j].abs())
        .fold(0.0, f64::max)
}

/// `‖F(·, t)‖_{α, M}` for the slice `state`.
pub fn slice_norm(state: &MetricState, quantity: Quantity, alpha: f64) -> Result<f64> {
    slice_norm_in(state, quantity, alpha, Region::Whole)
}

/// `‖F(·, t)‖_{α, region}`.
pub fn slice_norm_in(state: &MetricState, quantity: Quantity, alpha: f64, region: Region) -> Result<f64> {
    check_alpha(alpha)?;
    let k = crate::geometry::curvature(state)?;
    if alpha.is_infinite() {
        return Ok(slice_sup(state, &k, quantity, region));
    }
    Ok(slice_integral(state, &k, quantity, alpha, region).powf(1.0 / alpha))
}

/// Per-snapshot values of a slice functional, integrated in time.
///
/// Between two snapshots the functional is interpolated linearly, except on
/// singular runs where both ends are positive: there it is taken to be
/// `A (T̂ − t)^p`, which is exact for shrinking spheres and does not
/// underestimate divergent tails the way the trapezoid rule does.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub t_hat: Option<f64>,
}

impl TimeSeries {
    pub fn slice_integrals(traj: &FlowTrajectory, quantity: Quantity, alpha: f64, region: Region) -> TimeSeries {
        let values = traj
            .states()
            .iter()
            .zip(traj.curvatures())
            .map(|(s, k)| slice_integral(s, k, quantity, alpha, region))
            .collect();
        TimeSeries {
            times: traj.times(),
            values,
            t_hat: traj.t_hat(),
        }
    }

    fn check_interval(&self, a: f64, b: f64) -> Result<(f64, f64)> {
        let (lo, hi) = (self.times[0], self.times[self.times.len() - 1]);
        let tol = 1e-12 * lo.abs().max(hi.abs()).max(1.0);
        if !(a <= b) || a < lo - tol || b > hi + tol {
            return Err(Error::OutOfRange(format!(
                "interval [{a}, {b}] is not inside the stored span [{lo}, {hi}]"
            )));
        }
        Ok((a.clamp(lo, hi), b.clamp(lo, hi)))
    }

    /// `∫_{t_i}^{t_i + s}` of the interpolant on cell `i`, for `0 ≤ s ≤ t_{i+1} − t_i`.
    fn cell_partial(&self, i: usize, s: f64) -> f64 {
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let (v0, v1) = (self.values[i], self.values[i + 1]);
        if let Some(th) = self.t_hat {
            let (u0, u1) = (th - t0, th - t1);
            if v0 > 0.0 && v1 > 0.0 && u1 > 0.0 && v0 != v1 {
                let p = (v1 / v0).ln() / (u1 / u0).ln();
                let ln_r = ((th - t0 - s) / u0).ln();
                let q = p + 1.0;
                let frac = if (q * ln_r).abs() < 1e-12 {
                    -ln_r
                } else {
                    -(q * ln_r).exp_m1() / q
                };
                return v0 * u0 * frac;
            }
        }
        let w = s / (t1 - t0);
        s * (v0 + 0.5 * w * (v1 - v0))
    }

    /// `∫_a^b` of the interpolated functional.
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        let (a, b) = self.check_interval(a, b)?;
        Ok(self.cumulative(b) - self.cumulative(a))
    }

    fn cumulative(&self, t: f64) -> f64 {
        let mut total = 0.0;
        for i in 0..self.times.len() - 1 {
            let (t0, t1) = (self.times[i], self.times[i + 1]);
            if t >= t1 {
                total += self.cell_partial(i, t1 - t0);
            } else {
                if t > t0 {
                    total += self.cell_partial(i, t - t0);
                }
                break;
            }
        }
        total
    }
}

/// `∫_a^b ∫_region |F|^α dμ dt` (no root taken).
pub fn spacetime_integral(traj: &FlowTrajectory, q: &NormQuery) -> Result<f64> {
    check_alpha(q.alpha)?;
    if q.alpha.is_infinite() {
        return Err(Error::InvalidParameter("the space-time integral needs a finite α".into()));
    }
    TimeSeries::slice_integrals(traj, q.quantity, q.alpha, q.region).integral(q.interval.0, q.interval.1)
}

/// `‖F‖_{α, region × [a, b]}`.
pub fn spacetime_norm(traj: &FlowTrajectory, q: &NormQuery) -> Result<f64> {
    check_alpha(q.alpha)?;
    if q.alpha.is_infinite() {
        return sup_norm(traj, q.quantity, q.region, q.interval.0, q.interval.1);
    }
    Ok(spacetime_integral(traj, q)?.powf(1.0 / q.alpha))
}

/// `sup |F|` over `region × [a, b]`: the snapshots inside the interval plus
/// the interpolated states at both ends.
pub fn sup_norm(traj: &FlowTrajectory, quantity: Quantity, region: Region, a: f64, b: f64) -> Result<f64> {
    if !(a <= b) {
        return Err(Error::OutOfRange(format!("empty interval [{a}, {b}]")));
    }
    let mut best: f64 = 0.0;
    for t in [a, b] {
        let s = traj.state_at(t)?;
        best = best.max(slice_sup(&s, &crate::geometry::curvature(&s)?, quantity, region));
    }
    for (s, k) in traj.states().iter().zip(traj.curvatures()) {
        if s.t() >= a && s.t() <= b {
            best = best.max(slice_sup(s, k, quantity, region));
        }
    }
    Ok(best)
}

/// `‖R‖_{α, Sⁿ × [0, T)}` for the round sphere shrinking from volume `V₀`
/// to a point at `T`:
/// `(n/2) V₀^{1/α} T^{−n/(2α)} (∫_0^T (T−t)^{n/2−α} dt)^{1/α}`,
/// infinite exactly when `α ≥ n/2 + 1`.
pub fn closed_form_sphere_norm(n: usize, v0: f64, t: f64, alpha: f64) -> Result<f64> {
    closed_form_sphere_partial(n, v0, t, alpha, 0.0)
}

/// The same norm over `[0, T − ε]`.
pub fn closed_form_sphere_partial(n: usize, v0: f64, t: f64, alpha: f64, eps: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(v0 > 0.0 && t > 0.0) || !(0.0..t).contains(&eps) {
        return Err(Error::InvalidParameter(format!(
            "need V₀ > 0, T > 0 and 0 ≤ ε < T, got V₀ = {v0}, T = {t}, ε = {eps}"
        )));
    }
    let nf = n as f64;
    if alpha.is_infinite() {
        return Ok(if eps == 0.0 { f64::INFINITY } else { nf / (2.0 * eps) });
    }
    let p = nf / 2.0 - alpha;
    let inner = if (p + 1.0).abs() < 1e-15 {
        (t / eps).ln()
    } else {
        (t.powf(p + 1.0) - eps.powf(p + 1.0)) / (p + 1.0)
    };
    if !inner.is_finite() || inner < 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(nf / 2.0 * v0.powf(1.0 / alpha) * t.powf(-nf / (2.0 * alpha)) * inner.powf(1.0 / alpha))
}

/// How the partial norms over `[0, T̂ − ε]` behave as `ε → 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Finite,
    LogDivergent,
    PowerDivergent,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::Finite => "finite",
            Classification::LogDivergent => "log-divergent",
            Classification::PowerDivergent => "power-divergent",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Exponent above which a divergence counts as a power law.
pub const POWER_THRESHOLD: f64 = 0.05;
/// Relative change of the last two partial norms below which they count as
/// converged.
pub const CAUCHY_TOLERANCE: f64 = 1e-3;

/// The default `ε_k = 4^{−k}`, `k = 2, …, 9`.
pub fn default_eps_sequence() -> Vec<f64> {
    (2..=9).map(|k| 4f64.powi(-k)).collect()
}

/// The default `ε_k` that fit inside `[T̂ − t_end, T̂ − t_start]`, or, when
/// fewer than three do, six geometric steps from a quarter of the run down
/// to `T̂ − t_end`.
pub fn fitted_eps_sequence(traj: &FlowTrajectory) -> Result<Vec<f64>> {
    let t_hat = traj
        .t_hat()
        .ok_or_else(|| Error::NotApplicable("ε sequences need a singular trajectory".into()))?;
    let (lo, hi) = (t_hat - traj.t_end(), t_hat - traj.t_start());
    let fits: Vec<f64> = default_eps_sequence()
        .into_iter()
        .filter(|e| *e >= lo && *e <= hi)
        .collect();
    if fits.len() >= 3 {
        return Ok(fits);
    }
    let (a, b) = (0.25 * hi, lo.max(1e-300));
    if !(a > b) {
        return Err(Error::OutOfRange(format!(
            "the run stops {lo} before T̂, too far to resolve the approach"
        )));
    }
    Ok((0..6).map(|k| a * (b / a).powf(k as f64 / 5.0)).collect())
}

/// One row of an α-scan.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ScanRow {
    pub alpha: f64,
    pub eps: Vec<f64>,
    pub partial_norms: Vec<f64>,
    /// Fitted `p` in `‖F‖^α_{[0, T̂−ε]} ≈ C + A ε^{−p}`; negative for
    /// convergent norms. For `α = ∞` the fit is on the sup itself.
    pub exponent: f64,
    pub classification: Classification,
    /// Extrapolated `ε → 0` value, for finite rows.
    pub limit: Option<f64>,
}

/// Solves `(ε₂^{−p} − ε₁^{−p}) / (ε₁^{−p} − ε₀^{−p}) = ratio` for `p`.
fn increment_exponent(eps: [f64; 3], ratio: f64) -> f64 {
    let l0 = (eps[0] / eps[1]).ln();
    let l1 = (eps[1] / eps[2]).ln();
    let model = |p: f64| {
        if p.abs() < 1e-12 {
            l1 / l0
        } else {
            (p * l0).exp() * (p * l1).exp_m1() / (p * l0).exp_m1()
        }
    };
    let (mut lo, mut hi) = (-50.0f64, 50.0f64);
    if ratio <= model(lo) {
        return lo;
    }
    if ratio >= model(hi) {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if model(mid) < ratio {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn classify(alpha: f64, eps: &[f64], partial: &[f64]) -> (f64, Classification, Option<f64>) {
    let k = partial.len();
    let pow = if alpha.is_infinite() { 1.0 } else { alpha };
    let j: Vec<f64> = partial.iter().map(|v| v.powf(pow)).collect();
    let (d1, d2) = (j[k - 2] - j[k - 3], j[k - 1] - j[k - 2]);
    let cauchy = (partial[k - 1] - partial[k - 2]).abs() <= CAUCHY_TOLERANCE * partial[k - 1].abs();
    if !(d1 > 0.0 && d2 > 0.0) {
        // no growth at the fine end: the partial norms have saturated
        return (f64::NEG_INFINITY, Classification::Finite, Some(partial[k - 1]));
    }
    let p = increment_exponent([eps[k - 3], eps[k - 2], eps[k - 1]], d2 / d1);
    let class = if p > POWER_THRESHOLD {
        Classification::PowerDivergent
    } else if p >= -POWER_THRESHOLD && !cauchy {
        Classification::LogDivergent
    } else {
        Classification::Finite
    };
    let limit = (class == Classification::Finite).then(|| {
        let r = d2 / d1;
        let tail = if r < 1.0 { d2 * r / (1.0 - r) } else { 0.0 };
        (j[k - 1] + tail).powf(1.0 / pow)
    });
    (p, class, limit)
}

/// Partial norms `‖F‖_{α, M × [t_start, T̂ − ε_k]}` for every `α` and `ε_k`,
/// with the divergence exponent fitted from successive increments and a
/// classification of each row.
pub fn alpha_threshold_scan(
    traj: &FlowTrajectory,
    quantity: Quantity,
    alphas: &[f64],
    eps: &[f64],
) -> Result<Vec<ScanRow>> {
    alpha_threshold_scan_in(traj, quantity, Region::Whole, alphas, eps)
}

pub fn alpha_threshold_scan_in(
    traj: &FlowTrajectory,
    quantity: Quantity,
    region: Region,
    alphas: &[f64],
    eps: &[f64],
) -> Result<Vec<ScanRow>> {
    let t_hat = traj
        .t_hat()
        .ok_or_else(|| Error::NotApplicable("the α-scan needs a singular trajectory".into()))?;
    if eps.len() < 3 {
        return Err(Error::InvalidParameter("the α-scan needs at least three ε values".into()));
    }
    if eps.iter().any(|e| !(*e > 0.0)) || eps.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParameter("ε values must be positive and strictly decreasing".into()));
    }
    for a in alphas {
        check_alpha(*a)?;
    }
    let start = traj.t_start();
    alphas
        .par_iter()
        .map(|&alpha| {
            let series = (!alpha.is_infinite()).then(|| TimeSeries::slice_integrals(traj, quantity, alpha, region));
            let partial_norms = eps
                .iter()
                .map(|e| match &series {
                    Some(s) => s.integral(start, t_hat - e).map(|v| v.powf(1.0 / alpha)),
                    None => sup_norm(traj, quantity, region, start, t_hat - e),
                })
                .collect::<Result<Vec<_>>>()?;
            let (exponent, classification, limit) = classify(alpha, eps, &partial_norms);
            Ok(ScanRow {
                alpha,
                eps: eps.to_vec(),
                partial_norms,
                exponent,
                classification,
                limit,
            })
        })
        .collect()
}

/// Finiteness of a space-time norm over the whole run.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub enum NormStatus {
    Finite(f64),
    /// Divergent, with the fitted exponent (zero for logarithmic growth).
    Diverging(f64),
}

impl NormStatus {
    pub fn is_finite(self) -> bool {
        matches!(self, NormStatus::Finite(_))
    }
}

/// A hypothesis of the extension criteria that a trajectory fails.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Hypothesis {
    /// `α < (n+2)/2`.
    Alpha,
    /// The Ricci lower bound `−A` degenerates toward the end.
    RicciLowerBound,
    /// `‖R‖_α` diverges.
    ScalarNorm,
    /// `‖Rm‖_α` diverges.
    RiemannNorm,
}

impl Hypothesis {
    pub fn name(self) -> &'static str {
        match self {
            Hypothesis::Alpha => "alpha",
            Hypothesis::RicciLowerBound => "ricci-lower-bound",
            Hypothesis::ScalarNorm => "scalar-norm",
            Hypothesis::RiemannNorm => "riemann-norm",
        }
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub enum Conclusion {
    /// `Ric ≥ −A` and `‖R‖_α < ∞` with `α ≥ (n+2)/2`.
    ExtendableScalar,
    /// `‖Rm‖_α < ∞` with `α ≥ (n+2)/2`.
    ExtendableRiemann,
    HypothesesFail(Vec<Hypothesis>),
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Conclusion::ExtendableScalar => f.write_str("extendable-scalar"),
            Conclusion::ExtendableRiemann => f.write_str("extendable-riemann"),
            Conclusion::HypothesesFail(h) => {
                let names: Vec<&str> = h.iter().map(|h| h.name()).collect();
                write!(f, "hypotheses-fail({})", names.join(","))
            }
        }
    }
}

/// Checks a trajectory against the two extension criteria: the scalar one
/// (`Ric ≥ −A` and `‖R‖_α < ∞`) and the Riemann one (`‖Rm‖_α < ∞`), both
/// for `α ≥ (n+2)/2`.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ExtensionVerdict {
    /// `sup max(−Ric, 0)` over the run.
    pub a: f64,
    pub alpha: f64,
    /// `(n+2)/2`.
    pub threshold: f64,
    pub ricci_bounded: bool,
    pub scalar_norm: NormStatus,
    pub riemann_norm: NormStatus,
    pub scalar_hypotheses_met: bool,
    pub riemann_hypotheses_met: bool,
    pub conclusion: Conclusion,
    /// A singular run must fail both criteria; a run that satisfies one and
    /// still stopped singular would contradict it.
    pub consistent: bool,
}

fn norm_status(traj: &FlowTrajectory, quantity: Quantity, alpha: f64, eps: &[f64]) -> Result<NormStatus> {
    if traj.singular() {
        let row = alpha_threshold_scan(traj, quantity, &[alpha], eps)?.remove(0);
        Ok(match row.classification {
            Classification::Finite => NormStatus::Finite(row.limit.unwrap_or(row.partial_norms[row.partial_norms.len() - 1])),
            _ => NormStatus::Diverging(row.exponent.max(0.0)),
        })
    } else {
        let q = NormQuery::new(quantity, alpha, Region::Whole, (traj.t_start(), traj.t_end()));
        Ok(NormStatus::Finite(spacetime_norm(traj, &q)?))
    }
}

/// Ricci lower bound `A = sup max(−Ric, 0)` over snapshots up to time `b`.
fn ricci_deficit(traj: &FlowTrajectory, b: f64) -> f64 {
    traj.states()
        .iter()
        .zip(traj.curvatures())
        .filter(|(s, _)| s.t() <= b)
        .map(|(_, k)| (-k.ric_inf).max(0.0))
        .fold(0.0, f64::max)
}

/// [`extension_verdict_with`] on the [`fitted_eps_sequence`] of singular runs.
pub fn extension_verdict(traj: &FlowTrajectory, alpha: f64) -> Result<ExtensionVerdict> {
    let eps = if traj.singular() {
        fitted_eps_sequence(traj)?
    } else {
        Vec::new()
    };
    extension_verdict_with(traj, alpha, &eps)
}

pub fn extension_verdict_with(traj: &FlowTrajectory, alpha: f64, eps: &[f64]) -> Result<ExtensionVerdict> {
    check_alpha(alpha)?;
    let n = traj.n() as f64;
    let threshold = (n + 2.0) / 2.0;
    let a = ricci_deficit(traj, traj.t_end());
    let ricci_bounded = match traj.t_hat() {
        Some(th) if eps.len() >= 2 => {
            let k = eps.len();
            let (a0, a1) = (ricci_deficit(traj, th - eps[k - 2]), ricci_deficit(traj, th - eps[k - 1]));
            // growth like ε^{−p} with p above the power threshold means no uniform bound
            !(a0 > 0.0 && (a1 / a0).ln() / (eps[k - 2] / eps[k - 1]).ln() > POWER_THRESHOLD)
        }
        _ => a.is_finite(),
    };
    let scalar_norm = norm_status(traj, Quantity::R, alpha, eps)?;
    let riemann_norm = norm_status(traj, Quantity::Rm, alpha, eps)?;
    let alpha_ok = alpha >= threshold;
    let mut fails = Vec::new();
    if !alpha_ok {
        fails.push(Hypothesis::Alpha);
    }
    if !ricci_bounded {
        fails.push(Hypothesis::RicciLowerBound);
    }
    if !scalar_norm.is_finite() {
        fails.push(Hypothesis::ScalarNorm);
    }
    if !riemann_norm.is_finite() {
        fails.push(Hypothesis::RiemannNorm);
    }
    let scalar_hypotheses_met = alpha_ok && ricci_bounded && scalar_norm.is_finite();
    let riemann_hypotheses_met = alpha_ok && riemann_norm.is_finite();
    let conclusion = if scalar_hypotheses_met {
        Conclusion::ExtendableScalar
    } else if riemann_hypotheses_met {
        Conclusion::ExtendableRiemann
    } else {
        Conclusion::HypothesesFail(fails)
    };
    Ok(ExtensionVerdict {
        a,
        alpha,
        threshold,
        ricci_bounded,
        scalar_norm,
        riemann_norm,
        scalar_hypotheses_met,
        riemann_hypotheses_met,
        conclusion,
        consistent: !traj.singular() || (!scalar_hypotheses_met && !riemann_hypotheses_met),
    })
}
