//! Metrics on `Sⁿ` in two symmetry classes and their curvature.
//!
//! A [`MetricState`] is either a round sphere `g = c·g_S` or a warped
//! product `g = φ(x)² dx² + ψ(x)² g_{S^{n-1}}` sampled on the uniform grid
//! `x_j = jπ/m`. The warped class is what makes nontrivial flows possible
//! (necks, dumbbells) while keeping every curvature quantity a function of
//! one variable.
//!
//! ```
//! use ricci_lab::geometry::{curvature, make_round_sphere, total_volume};
//!
//! let s3 = make_round_sphere(3, 1.0, 0.0).unwrap();
//! let k = curvature(&s3).unwrap();
//! assert!((k.r[0] - 6.0).abs() < 1e-14);
//! assert!((total_volume(&s3) - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-12);
//! ```

use std::f64::consts::PI;

use crate::constants::sphere_measure;
use crate::error::{Error, Result};
use crate::quad;
use crate::stencil::{self, Parity};

/// Fewest grid cells for which pole limits are trusted.
pub const MIN_CELLS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pole {
    North,
    South,
}

/// Samples of `φ` and `ψ` on `x_j = jπ/m`, `j = 0..=m`.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    phi: Vec<f64>,
    psi: Vec<f64>,
}

impl Profile {
    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    /// Number of grid cells `m`.
    pub fn cells(&self) -> usize {
        self.phi.len() - 1
    }

    pub fn spacing(&self) -> f64 {
        PI / self.cells() as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.spacing()
    }

    /// `(sin x_j, cos x_j)`, evaluated from the nearer pole so that the two
    /// halves of the grid see mirror-identical values.
    pub fn sin_cos(&self, j: usize) -> (f64, f64) {
        grid_sin_cos(j, self.cells())
    }

    pub(crate) fn from_parts(phi: Vec<f64>, psi: Vec<f64>) -> Self {
        Profile { phi, psi }
    }

    /// The profile seen from the other pole: `x ↦ π − x`.
    pub(crate) fn mirrored(&self) -> Profile {
        let mut phi = self.phi.clone();
        let mut psi = self.psi.clone();
        phi.reverse();
        psi.reverse();
        Profile { phi, psi }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Form {
    RoundSphere { c: f64 },
    Warped(Profile),
}

/// One time slice of a metric on `Sⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricState {
    n: usize,
    t: f64,
    form: Form,
}

impl MetricState {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn form(&self) -> &Form {
        &self.form
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    pub fn is_round(&self) -> bool {
        matches!(self.form, Form::RoundSphere { .. })
    }

    /// Multiplies the metric by `q > 0` (lengths scale by `√q`).
    pub fn scaled(&self, q: f64) -> MetricState {
        let form = match &self.form {
            Form::RoundSphere { c } => Form::RoundSphere { c: c * q },
            Form::Warped(p) => {
                let s = q.sqrt();
                Form::Warped(Profile {
                    phi: p.phi.iter().map(|v| v * s).collect(),
                    psi: p.psi.iter().map(|v| v * s).collect(),
                })
            }
        };
        MetricState {
            n: self.n,
            t: self.t,
            form,
        }
    }

    pub(crate) fn from_parts(n: usize, t: f64, form: Form) -> Self {
        MetricState { n, t, form }
    }
}

/// Round sphere `g = c·g_S` of dimension `n`.
pub fn make_round_sphere(n: usize, c: f64, t: f64) -> Result<MetricState> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("dimension must be at least 2, got {n}")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("scale factor must be positive, got {c}")));
    }
    Ok(MetricState {
        n,
        t,
        form: Form::RoundSphere { c },
    })
}

/// `(sin, cos)` of `jπ/m`, reflected about `π/2` for `j > m/2`.
pub fn grid_sin_cos(j: usize, m: usize) -> (f64, f64) {
    if 2 * j <= m {
        let x = PI * j as f64 / m as f64;
        (x.sin(), x.cos())
    } else {
        let x = PI * (m - j) as f64 / m as f64;
        (x.sin(), -x.cos())
    }
}

/// Pole regularity tolerance on `|ψ_s| − 1` for grid spacing `h`.
pub fn pole_tolerance(h: f64) -> f64 {
    f64::max(1e-6, 10.0 * h * h)
}

/// Validated warped product from samples of `ψ` and `φ` on `x_j = jπ/m`.
///
/// Pole values of `ψ` within `1e-12·max ψ` of zero are snapped to zero.
pub fn make_warped(n: usize, psi: Vec<f64>, phi: Vec<f64>, t: f64) -> Result<MetricState> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("dimension must be at least 2, got {n}")));
    }
    if psi.len() != phi.len() {
        return Err(Error::InvalidProfile(format!(
            "ψ has {} samples but φ has {}",
            psi.len(),
            phi.len()
        )));
    }
    if psi.len() < 5 {
        return Err(Error::InvalidProfile(format!("need at least 5 nodes, got {}", psi.len())));
    }
    let mut psi = psi;
    let m = psi.len() - 1;
    if let Some(j) = phi.iter().position(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidProfile(format!("φ must be positive, φ[{j}] = {}", phi[j])));
    }
    let scale = psi.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    for j in [0, m] {
        if psi[j].abs() > 1e-12 * scale {
            return Err(Error::InvalidProfile(format!("ψ must vanish at the poles, ψ[{j}] = {}", psi[j])));
        }
        psi[j] = 0.0;
    }
    if let Some(j) = (1..m).find(|&j| !(psi[j] > 0.0 && psi[j].is_finite())) {
        return Err(Error::InvalidProfile(format!("ψ must be positive inside, ψ[{j}] = {}", psi[j])));
    }
    let p = Profile { phi, psi };
    let tol = pole_tolerance(p.spacing());
    let (north, south) = pole_slopes(&p);
    if (north.abs() - 1.0).abs() > tol || (south.abs() - 1.0).abs() > tol {
        return Err(Error::InvalidProfile(format!(
            "pole regularity |ψ_s| = 1 violated: {north:.3e} at x = 0, {south:.3e} at x = π (tolerance {tol:.1e})"
        )));
    }
    Ok(MetricState {
        n,
        t,
        form: Form::Warped(p),
    })
}

/// `ψ_s` at the north and south poles.
pub(crate) fn pole_slopes(p: &Profile) -> (f64, f64) {
    let m = p.cells();
    let px = stencil::d1(&p.psi, Parity::Odd, p.spacing());
    (px[0] / p.phi[0], px[m] / p.phi[m])
}

/// Warped sampling of the round sphere `c·g_S` on `m` cells.
pub fn sampled_round_sphere(n: usize, c: f64, m: usize, t: f64) -> Result<MetricState> {
    let s = c.sqrt();
    let mut psi: Vec<f64> = (0..=m).map(|j| s * grid_sin_cos(j, m).0).collect();
    psi[0] = 0.0;
    psi[m] = 0.0;
    make_warped(n, psi, vec![s; m + 1], t)
}

/// Pointwise curvature of a slice.
///
/// Round spheres carry a single sample per field; warped states carry one
/// sample per grid node.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureField {
    pub r: Vec<f64>,
    pub ric_radial: Vec<f64>,
    /// Ricci eigenvalue tangent to the orbit spheres, multiplicity `n − 1`.
    pub ric_sphere: Vec<f64>,
    pub rm_norm: Vec<f64>,
    /// Smallest eigenvalue of the curvature operator.
    pub nu_min: Vec<f64>,
    /// Infimum over the slice of all Ricci eigenvalues.
    pub ric_inf: f64,
    /// Sectional curvature of planes containing the radial direction.
    pub k_radial: Vec<f64>,
    /// Sectional curvature of planes tangent to the orbit spheres.
    pub k_sphere: Vec<f64>,
}

impl CurvatureField {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// `|Ric|² = λ_rad² + (n−1)·λ_sph²` at every sample.
    pub fn ric_norm_sq(&self, n: usize) -> Vec<f64> {
        self.ric_radial
            .iter()
            .zip(&self.ric_sphere)
            .map(|(a, b)| a * a + (n - 1) as f64 * b * b)
            .collect()
    }

    pub fn max_rm(&self) -> f64 {
        self.rm_norm.iter().cloned().fold(0.0, f64::max)
    }

    /// Index and value of the largest scalar curvature sample.
    pub fn argmax_r(&self) -> (usize, f64) {
        argmax(&self.r)
    }
}

pub(crate) fn argmax(v: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (j, &x) in v.iter().enumerate() {
        if x > best.1 {
            best = (j, x);
        }
    }
    best
}

fn from_sectional(n: usize, kr: Vec<f64>, ks: Vec<f64>) -> CurvatureField {
    let nf = n as f64;
    let rr: Vec<f64> = kr.iter().map(|k| (nf - 1.0) * k).collect();
    let rs: Vec<f64> = kr.iter().zip(&ks).map(|(a, b)| a + (nf - 2.0) * b).collect();
    let r = rr.iter().zip(&rs).map(|(a, b)| a + (nf - 1.0) * b).collect();
    let rm = kr
        .iter()
        .zip(&ks)
        .map(|(a, b)| (4.0 * (nf - 1.0) * a * a + 2.0 * (nf - 1.0) * (nf - 2.0) * b * b).sqrt())
        .collect();
    // for n = 2 only the radial planes exist
    let nu = if n == 2 {
        kr.clone()
    } else {
        kr.iter().zip(&ks).map(|(a, b)| a.min(*b)).collect()
    };
    let ric_inf = rr.iter().chain(&rs).cloned().fold(f64::INFINITY, f64::min);
    CurvatureField {
        r,
        ric_radial: rr,
        ric_sphere: rs,
        rm_norm: rm,
        nu_min: nu,
        ric_inf,
        k_radial: kr,
        k_sphere: ks,
    }
}

/// Arclength derivatives of a warped profile.
pub(crate) struct Derivatives {
    pub psi_x: Vec<f64>,
    pub phi_x: Vec<f64>,
    pub psi_s: Vec<f64>,
    pub psi_ss: Vec<f64>,
    pub k_radial: Vec<f64>,
    pub k_sphere: Vec<f64>,
}

pub(crate) fn derivatives(p: &Profile) -> Derivatives {
    let h = p.spacing();
    let m = p.cells();
    let psi_x = stencil::d1(&p.psi, Parity::Odd, h);
    let psi_xx = stencil::d2(&p.psi, Parity::Odd, h);
    let phi_x = stencil::d1(&p.phi, Parity::Even, h);
    let psi_s: Vec<f64> = psi_x.iter().zip(&p.phi).map(|(a, f)| a / f).collect();
    let psi_ss: Vec<f64> = (0..=m)
        .map(|j| (psi_xx[j] * p.phi[j] - psi_x[j] * phi_x[j]) / p.phi[j].powi(3))
        .collect();
    let mut kr = vec![0.0; m + 1];
    let mut ks = vec![0.0; m + 1];
    for j in 1..m {
        kr[j] = -psi_ss[j] / p.psi[j];
        ks[j] = (1.0 - psi_s[j] * psi_s[j]) / (p.psi[j] * p.psi[j]);
    }
    // both sectional curvatures share the pole limit
    stencil::pole_fill(&mut kr);
    ks[0] = kr[0];
    ks[m] = kr[m];
    Derivatives {
        psi_x,
        phi_x,
        psi_s,
        psi_ss,
        k_radial: kr,
        k_sphere: ks,
    }
}

/// Curvature of a slice.
///
/// Warped states use sectional curvatures `K_rad = −ψ_ss/ψ` and
/// `K_sph = (1 − ψ_s²)/ψ²` in arclength; pole values are the common limit
/// of both, extrapolated from the interior.
pub fn curvature(state: &MetricState) -> Result<CurvatureField> {
    match &state.form {
        Form::RoundSphere { c } => Ok(from_sectional(state.n, vec![1.0 / c], vec![1.0 / c])),
        Form::Warped(p) => {
            if p.cells() < MIN_CELLS {
                return Err(Error::Resolution {
                    m: p.cells(),
                    min: MIN_CELLS,
                });
            }
            let d = derivatives(p);
            Ok(from_sectional(state.n, d.k_radial, d.k_sphere))
        }
    }
}

/// `C(n) = sqrt(2/(n(n−1)))`, so that `|Rm| = C(n)·|R|` on space forms.
pub fn riemann_scalar_factor(n: usize) -> f64 {
    let n = n as f64;
    (2.0 / (n * (n - 1.0))).sqrt()
}

/// Laplacian of a radial function sampled on the grid of `state`.
///
/// `Δf = f_ss + (n−1)(ψ_s/ψ) f_s`, with the pole limit `n·f_ss`. On a round
/// sphere fields are constant and the result is zero.
pub fn laplacian(state: &MetricState, f: &[f64]) -> Vec<f64> {
    let p = match &state.form {
        Form::RoundSphere { .. } => return vec![0.0; f.len()],
        Form::Warped(p) => p,
    };
    let h = p.spacing();
    let m = p.cells();
    let fx = stencil::d1(f, Parity::Even, h);
    let fxx = stencil::d2(f, Parity::Even, h);
    let phx = stencil::d1(&p.phi, Parity::Even, h);
    let psx = stencil::d1(&p.psi, Parity::Odd, h);
    let nf = state.n as f64;
    (0..=m)
        .map(|j| {
            let fs = fx[j] / p.phi[j];
            let fss = (fxx[j] * p.phi[j] - fx[j] * phx[j]) / p.phi[j].powi(3);
            if j == 0 || j == m {
                nf * fss
            } else {
                fss + (nf - 1.0) * psx[j] / (p.phi[j] * p.psi[j]) * fs
            }
        })
        .collect()
}

/// Integral over the cap `{x ≤ x_ext}` around `pole` of `g(f(x))·dμ`.
///
/// `field` holds nodal samples of an even function (one sample for round
/// spheres); `None` integrates `g(1)`. Warped integrands are evaluated from
/// six-point interpolants of `f`, `φ` and `ψ` with Gauss–Legendre points in
/// each cell, so caps ending inside a cell are handled exactly as whole
/// cells are.
pub(crate) fn cap_integral(
    state: &MetricState,
    pole: Pole,
    x_ext: f64,
    field: Option<&[f64]>,
    g: &dyn Fn(f64) -> f64,
) -> f64 {
    let n = state.n;
    let an1 = sphere_measure(n - 1);
    let x_ext = x_ext.clamp(0.0, PI);
    match &state.form {
        Form::RoundSphere { c } => {
            let v = field.map(|f| f[0]).unwrap_or(1.0);
            let vol = if x_ext >= PI {
                sphere_measure(n) * c.powf(n as f64 / 2.0)
            } else {
                an1 * c.powf(n as f64 / 2.0) * quad::sin_power_integral((n - 1) as u32, x_ext)
            };
            g(v) * vol
        }
        Form::Warped(p) => {
            let (p, f): (std::borrow::Cow<Profile>, Option<Vec<f64>>) = match pole {
                Pole::North => (std::borrow::Cow::Borrowed(p), field.map(|f| f.to_vec())),
                Pole::South => (
                    std::borrow::Cow::Owned(p.mirrored()),
                    field.map(|f| f.iter().rev().cloned().collect()),
                ),
            };
            let h = p.spacing();
            let ephi = stencil::extend(&p.phi, Parity::Even);
            let epsi = stencil::extend(&p.psi, Parity::Odd);
            let ef = f.as_ref().map(|f| stencil::extend(f, Parity::Even));
            let (gx, gw) = quad::gauss_legendre();
            let mut total = 0.0;
            for j in 0..p.cells() {
                let a = j as f64 * h;
                if a >= x_ext {
                    break;
                }
                let b = ((j + 1) as f64 * h).min(x_ext);
                let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
                let mut s = 0.0;
                for (xi, wi) in gx.iter().zip(gw.iter()) {
                    let x = mid + half * xi;
                    let phi = stencil::interpolate(&ephi, h, x);
                    let psi = stencil::interpolate(&epsi, h, x);
                    let v = ef.as_ref().map(|e| stencil::interpolate(e, h, x)).unwrap_or(1.0);
                    s += wi * g(v) * phi * psi.abs().powi(n as i32 - 1);
                }
                total += half * s;
            }
            an1 * total
        }
    }
}

/// Total volume `∫ dμ`.
pub fn total_volume(state: &MetricState) -> f64 {
    cap_integral(state, Pole::North, PI, None, &|_| 1.0)
}

/// Arclength from `pole` to the coordinate `x_ext`.
pub(crate) fn arclength(state: &MetricState, pole: Pole, x_ext: f64) -> f64 {
    match &state.form {
        Form::RoundSphere { c } => c.sqrt() * x_ext,
        Form::Warped(p) => {
            let p = match pole {
                Pole::North => std::borrow::Cow::Borrowed(p),
                Pole::South => std::borrow::Cow::Owned(p.mirrored()),
            };
            let h = p.spacing();
            let e = stencil::extend(&p.phi, Parity::Even);
            let x_ext = x_ext.clamp(0.0, PI);
            let mut s = 0.0;
            for j in 0..p.cells() {
                let a = j as f64 * h;
                if a >= x_ext {
                    break;
                }
                let b = ((j + 1) as f64 * h).min(x_ext);
                s += quad::integrate(|x| stencil::interpolate(&e, h, x), a, b, 1);
            }
            s
        }
    }
}

/// Coordinate extent of the geodesic ball of radius `r` about `pole`, and
/// whether it had to be clamped to the whole manifold.
pub fn cap_extent(state: &MetricState, pole: Pole, r: f64) -> (f64, bool) {
    match &state.form {
        Form::RoundSphere { c } => {
            let x = r / c.sqrt();
            if x >= PI {
                (PI, true)
            } else {
                (x, false)
            }
        }
        Form::Warped(p) => {
            let total = arclength(state, pole, PI);
            if r >= total {
                return (PI, true);
            }
            let p = match pole {
                Pole::North => std::borrow::Cow::Borrowed(p),
                Pole::South => std::borrow::Cow::Owned(p.mirrored()),
            };
            let h = p.spacing();
            let e = stencil::extend(&p.phi, Parity::Even);
            let mut s = 0.0;
            for j in 0..p.cells() {
                let a = j as f64 * h;
                let cell = quad::integrate(|x| stencil::interpolate(&e, h, x), a, a + h, 1);
                if s + cell >= r {
                    let target = r - s;
                    let x = quad::increasing_root(
                        |x| {
                            let v = quad::integrate(|y| stencil::interpolate(&e, h, y), a, a + x, 1) - target;
                            (v, stencil::interpolate(&e, h, a + x))
                        },
                        0.0,
                        h,
                        1e-15 * r.max(f64::MIN_POSITIVE),
                    );
                    return (a + x.min(h), false);
                }
                s += cell;
            }
            (PI, true)
        }
    }
}

/// A spatial integration domain: the whole manifold, a polar cap
/// `{x ≤ x_extent}` measured from `pole`, or a band `x_min ≤ x ≤ x_max`,
/// all in the grid coordinate.
///
/// Regions are fixed in the coordinate, so under the flow they are material
/// sets only as far as the gauge leaves the grid in place.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Region {
    Whole,
    Cap { pole: Pole, x_extent: f64 },
    Band { x_min: f64, x_max: f64 },
}

impl Region {
    /// The cap equal to the geodesic ball `B(pole, r)` in `state`.
    pub fn geodesic_ball(state: &MetricState, pole: Pole, r: f64) -> Region {
        let (x, clamped) = cap_extent(state, pole, r);
        if clamped {
            Region::Whole
        } else {
            Region::Cap { pole, x_extent: x }
        }
    }

    /// The ball of radius `r` about a grid node: a cap when the node is a
    /// pole, otherwise the band `|s − s_j| ≤ r` around it (which contains the
    /// geodesic ball).
    pub fn ball(state: &MetricState, center: Center, r: f64) -> Region {
        let node = match (center, &state.form) {
            (Center::Pole(p), _) => return Region::geodesic_ball(state, p, r),
            (Center::Node(_), Form::RoundSphere { .. }) => return Region::geodesic_ball(state, Pole::North, r),
            (Center::Node(j), Form::Warped(p)) => {
                if j == 0 {
                    return Region::geodesic_ball(state, Pole::North, r);
                }
                if j >= p.cells() {
                    return Region::geodesic_ball(state, Pole::South, r);
                }
                j
            }
        };
        let Form::Warped(p) = &state.form else { unreachable!() };
        let s0 = arclength(state, Pole::North, p.x(node));
        let (lo, _) = cap_extent(state, Pole::North, (s0 - r).max(0.0));
        let (hi, clamped) = cap_extent(state, Pole::North, s0 + r);
        if s0 - r <= 0.0 && clamped {
            return Region::Whole;
        }
        if s0 - r <= 0.0 {
            return Region::Cap {
                pole: Pole::North,
                x_extent: hi,
            };
        }
        if clamped {
            let total = arclength(state, Pole::North, PI);
            let (x, _) = cap_extent(state, Pole::South, total - (s0 - r));
            return Region::Cap {
                pole: Pole::South,
                x_extent: x,
            };
        }
        Region::Band { x_min: lo, x_max: hi }
    }

    /// Whether node `j` of an `m`-cell grid lies in the region.
    pub fn contains_node(&self, m: usize, j: usize) -> bool {
        match *self {
            Region::Whole => true,
            Region::Band { x_min, x_max } => {
                let x = PI * j as f64 / m as f64;
                x >= x_min - 1e-12 && x <= x_max + 1e-12
            }
            Region::Cap { pole, x_extent } => {
                let x = PI * j as f64 / m as f64;
                let d = match pole {
                    Pole::North => x,
                    Pole::South => PI - x,
                };
                d <= x_extent + 1e-12
            }
        }
    }

    /// Indices of the samples of `state` inside the region.
    pub fn sample_indices(&self, state: &MetricState) -> Vec<usize> {
        match &state.form {
            Form::RoundSphere { .. } => vec![0],
            Form::Warped(p) => (0..=p.cells()).filter(|&j| self.contains_node(p.cells(), j)).collect(),
        }
    }

    /// `∫_region g(f) dμ` for nodal samples `f` (`None` integrates `g(1)`).
    pub fn integrate(&self, state: &MetricState, field: Option<&[f64]>, g: &dyn Fn(f64) -> f64) -> f64 {
        match *self {
            Region::Whole => cap_integral(state, Pole::North, PI, field, g),
            Region::Cap { pole, x_extent } => cap_integral(state, pole, x_extent, field, g),
            Region::Band { x_min, x_max } => {
                cap_integral(state, Pole::North, x_max, field, g) - cap_integral(state, Pole::North, x_min, field, g)
            }
        }
    }

    pub fn volume(&self, state: &MetricState) -> f64 {
        self.integrate(state, None, &|_| 1.0)
    }

    /// Intrinsic diameter: the axis length for the whole manifold, twice the
    /// polar radius for a cap. The second flag is false when the value is
    /// only an estimate.
    pub fn diameter(&self, state: &MetricState) -> (f64, bool) {
        match *self {
            Region::Whole => {
                let d = diameter(state);
                (d.value, d.exact)
            }
            Region::Cap { pole, x_extent } => (2.0 * arclength(state, pole, x_extent), state.is_round() && x_extent <= PI / 2.0),
            Region::Band { x_min, x_max } => (
                arclength(state, Pole::North, x_max) - arclength(state, Pole::North, x_min),
                false,
            ),
        }
    }
}

/// Where a geodesic ball is centred.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Center {
    Pole(Pole),
    /// An interior grid node. Balls about it are approximated by the band
    /// `|s − s_j| ≤ r` and flagged.
    Node(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BallVolumeReport {
    pub center: Center,
    pub radius: f64,
    pub volume: f64,
    /// `volume / radiusⁿ`.
    pub ratio: f64,
    pub kappa_threshold: Option<f64>,
    /// The radius reached the diameter and the whole manifold was used.
    pub clamped: bool,
    /// The volume comes from the band approximation.
    pub approximate: bool,
}

impl BallVolumeReport {
    /// Whether the ratio clears the threshold, if one was set.
    pub fn meets_threshold(&self) -> Option<bool> {
        self.kappa_threshold.map(|k| self.ratio >= k)
    }
}

/// `Vol(B(center, r)) / rⁿ`.
pub fn ball_volume_ratio(state: &MetricState, center: Center, r: f64) -> Result<BallVolumeReport> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("ball radius must be positive, got {r}")));
    }
    let n = state.n as i32;
    let total_len = diameter(state).value;
    let mut approximate = false;
    let (volume, clamped) = if r >= total_len {
        (total_volume(state), true)
    } else {
        match (center, &state.form) {
            (Center::Pole(_), _) | (Center::Node(_), Form::RoundSphere { .. }) => {
                let pole = match center {
                    Center::Pole(p) => p,
                    Center::Node(_) => Pole::North,
                };
                let (x, clamped) = cap_extent(state, pole, r);
                (cap_integral(state, pole, x, None, &|_| 1.0), clamped)
            }
            (Center::Node(j), Form::Warped(p)) => {
                let m = p.cells();
                if j == 0 || j == m {
                    let pole = if j == 0 { Pole::North } else { Pole::South };
                    let (x, clamped) = cap_extent(state, pole, r);
                    (cap_integral(state, pole, x, None, &|_| 1.0), clamped)
                } else {
                    approximate = true;
                    let s0 = arclength(state, Pole::North, p.x(j));
                    let (lo, _) = cap_extent(state, Pole::North, (s0 - r).max(0.0));
                    let (hi, _) = cap_extent(state, Pole::North, s0 + r);
                    let v = cap_integral(state, Pole::North, hi, None, &|_| 1.0)
                        - cap_integral(state, Pole::North, lo, None, &|_| 1.0);
                    (v, false)
                }
            }
        }
    };
    Ok(BallVolumeReport {
        center,
        radius: r,
        volume,
        ratio: volume / r.powi(n),
        kappa_threshold: None,
        clamped,
        approximate,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diameter {
    pub value: f64,
    /// False when `ψ_s` leaves `[−1, 1]`; the axis length is then only a
    /// lower bound for the diameter.
    pub exact: bool,
}

/// Diameter, measured as the pole-to-pole axis length `∫ φ dx`.
pub fn diameter(state: &MetricState) -> Diameter {
    match &state.form {
        Form::RoundSphere { c } => Diameter {
            value: PI * c.sqrt(),
            exact: true,
        },
        Form::Warped(p) => {
            let d = derivatives(p);
            let tol = pole_tolerance(p.spacing());
            Diameter {
                value: arclength(state, Pole::North, PI),
                exact: d.psi_s.iter().all(|v| v.abs() <= 1.0 + tol),
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RhatReport {
    /// `Σ λᵢ²`.
    pub lhs: f64,
    /// `R̂² − 2B·R̂ + n·B²` with `R̂ = Σ λᵢ + n·B`.
    pub rhs: f64,
    pub holds: bool,
    /// Every eigenvalue is at least `−B`.
    pub hypothesis_met: bool,
}

/// Checks `|Ric|² ≤ R̂² − 2B·R̂ + n·B²` for Ricci eigenvalues bounded below
/// by `−B`.
pub fn rhat_inequality_check(eigenvalues: &[f64], b: f64) -> RhatReport {
    let n = eigenvalues.len() as f64;
    let lhs: f64 = eigenvalues.iter().map(|l| l * l).sum();
    let rhat = eigenvalues.iter().sum::<f64>() + n * b;
    let rhs = rhat * rhat - 2.0 * b * rhat + n * b * b;
    let slack = 1e-12 + 1e-9 * rhs.abs();
    RhatReport {
        lhs,
        rhs,
        holds: lhs <= rhs + slack,
        hypothesis_met: eigenvalues.iter().all(|&l| l >= -b),
    }
}
