//! Parabolic rescaling `g ↦ Q·g(t/Q + t_c)`, the scale invariance of the
//! critical integral `∫∫|Rm|^{(n+2)/2}`, and normalized blow-up sequences.
//!
//! ```
//! use ricci_lab::flow::{run_flow, FlowConfig};
//! use ricci_lab::geometry::{make_round_sphere, Center, Pole};
//! use ricci_lab::rescaling::{parabolic_rescale, RescaleSpec};
//!
//! let traj = run_flow(&make_round_sphere(3, 1.0, 0.0).unwrap(), &FlowConfig::default()).unwrap();
//! // anchor at t = 0.2, where R = 6 / 0.2 = 30
//! let spec = RescaleSpec::new(30.0, 0.2, Center::Pole(Pole::North)).unwrap();
//! let r = parabolic_rescale(&traj, &spec, (-1.0, 0.0)).unwrap();
//! let last = r.curvatures().last().unwrap();
//! assert!((last.r[0] - 1.0).abs() < 1e-12);
//! ```

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flow::{curvature_maximizing_sequence, CurvaturePoint, FlowTrajectory, MaxQuantity};
use crate::geometry::{ball_volume_ratio, curvature, Center, Region};
use crate::norms::{spacetime_integral, NormQuery, Quantity};

/// The rescaling `g'(t') = Q·g(t'/Q + t_c)` pointed at `base_point`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RescaleSpec {
    pub q: f64,
    pub t_center: f64,
    pub base_point: Center,
}

impl RescaleSpec {
    pub fn new(q: f64, t_center: f64, base_point: Center) -> Result<Self> {
        if !(q > 0.0 && q.is_finite()) || !t_center.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "rescaling needs Q > 0 and a finite centre, got Q = {q}, t_c = {t_center}"
            )));
        }
        Ok(RescaleSpec {
            q,
            t_center,
            base_point,
        })
    }

    pub fn identity() -> Self {
        RescaleSpec {
            q: 1.0,
            t_center: 0.0,
            base_point: Center::Node(0),
        }
    }

    /// Source time of rescaled time `t'`.
    pub fn source_time(&self, t_new: f64) -> f64 {
        t_new / self.q + self.t_center
    }

    /// Rescaled time of source time `t`.
    pub fn target_time(&self, t: f64) -> f64 {
        self.q * (t - self.t_center)
    }

    /// The rescaling undoing this one: `Q' = 1/Q`, `t_c' = −Q·t_c`.
    pub fn inverse(&self) -> RescaleSpec {
        RescaleSpec {
            q: 1.0 / self.q,
            t_center: -self.q * self.t_center,
            base_point: self.base_point,
        }
    }

    /// The rescaling mapping `[t0, t1]` onto the unit interval `[0, 1]`.
    pub fn unit_window(t0: f64, t1: f64, base_point: Center) -> Result<Self> {
        if !(t1 > t0) {
            return Err(Error::InvalidParameter(format!("empty window [{t0}, {t1}]")));
        }
        RescaleSpec::new(1.0 / (t1 - t0), t0, base_point)
    }
}

/// The rescaled flow on `[a, b]` (new time).
///
/// Its snapshots are the source snapshots that land inside `[a, b]` plus the
/// time-interpolated states at both ends. The stop reason and singular time
/// of the source carry over, the latter mapped to `Q(T̂ − t_c)`, since the
/// rescaled flow is a piece of the same maximal solution.
pub fn parabolic_rescale(traj: &FlowTrajectory, spec: &RescaleSpec, interval: (f64, f64)) -> Result<FlowTrajectory> {
    let (a, b) = interval;
    if !(a < b) {
        return Err(Error::InvalidParameter(format!("empty interval [{a}, {b}]")));
    }
    let (sa, sb) = (spec.source_time(a), spec.source_time(b));
    let mut states = vec![traj.state_at(sa)?.scaled(spec.q).with_time(a)];
    for s in traj.states() {
        let t = spec.target_time(s.t());
        if t > a && t < b && s.t() > sa && s.t() < sb {
            states.push(s.scaled(spec.q).with_time(t));
        }
    }
    states.push(traj.state_at(sb)?.scaled(spec.q).with_time(b));
    let t_hat = traj.t_hat().map(|th| spec.target_time(th));
    FlowTrajectory::from_states(states, traj.stop_reason(), t_hat, *traj.config(), traj.steps())
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct InvarianceReport {
    pub alpha: f64,
    /// `∫∫|Rm|^α` over the source window.
    pub before: f64,
    /// The same integral over the rescaled image of the window.
    pub after: f64,
    /// `|after − before| / before`.
    pub relative_diff: f64,
    /// `after / before`.
    pub ratio: f64,
    /// `Q^{(n+2)/2 − α}` from the weights of `|Rm|`, `dμ` and `dt`.
    pub predicted_ratio: f64,
}

/// Compares `∫_{t0}^{t1} ∫_M |Rm|^α dμ dt` with its image under `spec`.
/// At `α = (n+2)/2` the two agree.
pub fn critical_integral_invariance(
    traj: &FlowTrajectory,
    spec: &RescaleSpec,
    window: (f64, f64),
    alpha: f64,
) -> Result<InvarianceReport> {
    // both sides on the same snapshots: the window's ends enter as interpolated states
    let source = parabolic_rescale(traj, &RescaleSpec::identity(), window)?;
    let before = spacetime_integral(&source, &NormQuery::new(Quantity::Rm, alpha, Region::Whole, window))?;
    let image = (spec.target_time(window.0), spec.target_time(window.1));
    let rescaled = parabolic_rescale(traj, spec, image)?;
    let after = spacetime_integral(&rescaled, &NormQuery::new(Quantity::Rm, alpha, Region::Whole, image))?;
    let n = traj.n() as f64;
    Ok(InvarianceReport {
        alpha,
        before,
        after,
        relative_diff: (after - before).abs() / before.abs(),
        ratio: after / before,
        predicted_ratio: spec.q.powf((n + 2.0) / 2.0 - alpha),
    })
}

/// One normalized window `g'(t) = Q·g((t − 1)/Q + t_i)`, `t ∈ [0, 1]`.
#[derive(Clone, Debug)]
pub struct BlowupElement {
    pub anchor: CurvaturePoint,
    pub spec: RescaleSpec,
    pub trajectory: FlowTrajectory,
    /// Largest rescaled `R` over the window.
    pub max_r: f64,
    /// `max_r ≤ 1` up to rounding.
    pub normalized: bool,
    /// `−A/Q`, with `A = sup max(−Ric, 0)` of the source up to `t_i`.
    pub ric_lower_bound: f64,
    /// Smallest rescaled Ricci eigenvalue over the window.
    pub ric_min: f64,
    /// Rescaled `R` at the anchor at `t = 1`.
    pub anchor_r: f64,
    /// `∫_0^1 ∫_{B_{g'(1)}(x_i, 1)} |Rm|^{(n+2)/2}`.
    pub critical_integral: f64,
    /// `Vol B_{g'(1)}(x_i, 1)`, i.e. the volume ratio at scale 1.
    pub kappa: f64,
}

#[derive(Clone, Debug)]
pub struct BlowupSequence {
    pub elements: Vec<BlowupElement>,
    pub warnings: Vec<String>,
}

const NORMALIZATION_TOL: f64 = 1e-9;

/// Normalizes the window ending at the space-time point `anchor` with scale
/// `anchor.q`.
pub fn normalized_window(traj: &FlowTrajectory, anchor: CurvaturePoint) -> Result<BlowupElement> {
    let q = anchor.q;
    let spec = RescaleSpec::new(q, anchor.t - 1.0 / q, Center::Node(anchor.node))?;
    let rescaled = parabolic_rescale(traj, &spec, (0.0, 1.0))?;
    let mut max_r = f64::NEG_INFINITY;
    let mut ric_min = f64::INFINITY;
    for k in rescaled.curvatures() {
        max_r = max_r.max(k.argmax_r().1);
        ric_min = ric_min.min(k.ric_inf);
    }
    let a = traj
        .states()
        .iter()
        .zip(traj.curvatures())
        .filter(|(s, _)| s.t() <= anchor.t)
        .map(|(_, k)| (-k.ric_inf).max(0.0))
        .fold(0.0, f64::max);
    let end = rescaled.states().last().expect("rescaled windows keep both ends");
    let end_k = curvature(end)?;
    let anchor_r = end_k.r[anchor.node.min(end_k.len() - 1)];
    let ball = Region::ball(end, spec.base_point, 1.0);
    let n = traj.n() as f64;
    let critical_integral =
        spacetime_integral(&rescaled, &NormQuery::new(Quantity::Rm, (n + 2.0) / 2.0, ball, (0.0, 1.0)))?;
    let kappa = ball_volume_ratio(end, spec.base_point, 1.0)?.ratio;
    Ok(BlowupElement {
        anchor,
        spec,
        trajectory: rescaled,
        max_r,
        normalized: max_r <= 1.0 + NORMALIZATION_TOL,
        ric_lower_bound: -a / q,
        ric_min,
        anchor_r,
        critical_integral,
        kappa,
    })
}

/// Up to `count` normalized windows anchored along a curvature-maximizing
/// sequence. Anchors whose window would start before the run are skipped
/// with a warning.
pub fn blowup_sequence(traj: &FlowTrajectory, count: usize, quantity: MaxQuantity) -> Result<BlowupSequence> {
    let anchors = curvature_maximizing_sequence(traj, count, quantity)?;
    let mut warnings = Vec::new();
    let usable: Vec<CurvaturePoint> = anchors
        .into_iter()
        .filter(|a| {
            let ok = a.t - 1.0 / a.q >= traj.t_start();
            if !ok {
                warnings.push(format!(
                    "anchor at t = {} with Q = {} needs history from t = {}, before the run starts",
                    a.t,
                    a.q,
                    a.t - 1.0 / a.q
                ));
            }
            ok
        })
        .collect();
    if usable.len() < count {
        warnings.push(format!("only {} of {count} requested anchors are usable", usable.len()));
    }
    let elements = usable
        .into_par_iter()
        .map(|a| normalized_window(traj, a))
        .collect::<Result<Vec<_>>>()?;
    Ok(BlowupSequence { elements, warnings })
}
