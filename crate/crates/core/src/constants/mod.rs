//! The analytic constant chain behind the regularity estimates.
//!
//! Volume comparison gives a lower bound on the isoperimetric ratio, which
//! gives a uniform Sobolev constant `σ(n, κ)`. That feeds Moser iteration
//! (`Λ(β)`, `ν`, `δ_b`, `C_b`, `C_a`) and finally the ε-regularity pair
//! `δ(n, σ, r)`, `C(n, σ, r)`. Every constant that can leave the `f64`
//! range is a [`Magnitude`].
//!
//! ```
//! use ricci_lab::constants::{croke_constants, sobolev_sigma};
//! use std::f64::consts::PI;
//!
//! let c = croke_constants(2).unwrap();
//! assert!((c.c1 - PI).abs() < 1e-14 && (c.c2 - 2.0 * PI).abs() < 1e-13);
//!
//! // σ scales like κ^(-2(n+1))
//! let a = sobolev_sigma(3, 1e-3).unwrap().sigma;
//! let b = sobolev_sigma(3, 1e-2).unwrap().sigma;
//! assert!(((a / b).log10() - 8.0).abs() < 1e-10);
//! ```

pub mod checks;

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::magnitude::Magnitude;
use crate::quad;

/// `α(k)`, the `k`-dimensional measure of the unit sphere `Sᵏ`:
/// `2π^{(k+1)/2} / Γ((k+1)/2)`, via `α(k) = 2π α(k−2)/(k−1)`.
pub fn sphere_measure(k: usize) -> f64 {
    let mut a = if k % 2 == 0 { 2.0 } else { 2.0 * PI };
    let mut j = if k % 2 == 0 { 0 } else { 1 };
    while j < k {
        j += 2;
        a *= 2.0 * PI / (j - 1) as f64;
    }
    a
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrokeConstants {
    /// `π α(n) / (2 α(n−1))`.
    pub c1: f64,
    /// `2^{n−1} α(n−1)ⁿ / α(n)^{n−1}`.
    pub c2: f64,
}

pub fn croke_constants(n: usize) -> Result<CrokeConstants> {
    check_dim(n, 2)?;
    let an = sphere_measure(n);
    let an1 = sphere_measure(n - 1);
    let nf = n as f64;
    Ok(CrokeConstants {
        c1: PI * an / (2.0 * an1),
        c2: 2f64.powf(nf - 1.0) * an1.powf(nf) / an.powf(nf - 1.0),
    })
}

fn check_dim(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::InvalidParameter(format!("dimension must be at least {min}, got {n}")));
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

/// `ln ∫_0^D (sinh(K r)/K)^{n−1} dr`, with the `K → 0` limit `Dⁿ/n`.
fn ln_comparison_integral(n: usize, d: f64, k: f64) -> f64 {
    let nf = n as f64;
    if k == 0.0 {
        return nf * d.ln() - nf.ln();
    }
    quad::ln_sinh_power_integral((n - 1) as u32, k * d) - nf * k.ln()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OmegaBound {
    pub value: f64,
    /// `Vol(N₂) < Vol(N₁)`: the bound says nothing and `value` is zero.
    pub vacuous: bool,
}

/// Lower bound for the visibility fraction `ω̃` of a domain inside `N₁`:
/// `(Vol N₂ − Vol N₁) / (α(n−1) ∫_0^D (sinh Kr / K)^{n−1} dr)`.
pub fn omega_tilde_lower_bound(vol_n2: f64, vol_n1: f64, d: f64, k: f64, n: usize) -> Result<OmegaBound> {
    check_dim(n, 2)?;
    check_positive("diameter bound D", d)?;
    if !(k >= 0.0) || !(vol_n1 >= 0.0) {
        return Err(Error::InvalidParameter("K and Vol(N₁) must be nonnegative".into()));
    }
    if vol_n2 < vol_n1 {
        return Ok(OmegaBound { value: 0.0, vacuous: true });
    }
    let ln_den = sphere_measure(n - 1).ln() + ln_comparison_integral(n, d, k);
    Ok(OmegaBound {
        value: (vol_n2 - vol_n1) * (-ln_den).exp(),
        vacuous: false,
    })
}

/// `C₂(n)·ω̃^{n+1}`, the lower bound on `Area(∂N)ⁿ / Vol(N)^{n−1}`.
pub fn isoperimetric_lower_bound(omega_tilde: f64, n: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&omega_tilde) {
        return Err(Error::InvalidParameter(format!("ω̃ must lie in [0, 1], got {omega_tilde}")));
    }
    Ok(croke_constants(n)?.c2 * omega_tilde.powi(n as i32 + 1))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RKappa {
    pub r: f64,
    /// `|∫_0^r sinh^{n−1} / target − 1|`.
    pub residual: f64,
}

/// Radius `r(κ)` solving `∫_0^r sinh(s)^{n−1} ds = κ / (2 α(n−1) e^{2n(n−1)})`.
pub fn r_kappa(n: usize, kappa: f64) -> Result<RKappa> {
    check_dim(n, 2)?;
    check_positive("κ", kappa)?;
    let k = (n - 1) as u32;
    let nf = n as f64;
    let ln_target = kappa.ln() - (2.0 * sphere_measure(n - 1)).ln() - 2.0 * nf * (nf - 1.0);
    // Newton on the log of the integral: d/dr ln I = sinh^k(r) / I(r)
    let g = |r: f64| {
        let li = quad::ln_sinh_power_integral(k, r);
        (li - ln_target, (k as f64 * quad::ln_sinh(r) - li).exp())
    };
    let r = quad::increasing_root(g, 0.0, 1.0, 1e-15);
    let residual = (quad::ln_sinh_power_integral(k, r) - ln_target).exp_m1().abs();
    Ok(RKappa { r, residual })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sobolev {
    pub c3: Magnitude,
    pub c4: Magnitude,
    pub sigma: Magnitude,
}

/// `C₃(n,κ)`, `C₄ = C₂ C₃^{n+1}` and `σ(n,κ) = (2(n−1)/(C₄ (n−2)))²`.
pub fn sobolev_sigma(n: usize, kappa: f64) -> Result<Sobolev> {
    check_positive("κ", kappa)?;
    if n < 3 {
        return Err(Error::NotApplicable(format!(
            "σ(n, κ) divides by n − 2 and needs n ≥ 3, got n = {n}"
        )));
    }
    let nf = n as f64;
    let ln_int = quad::ln_sinh_power_integral((n - 1) as u32, 2.0 * (nf - 1.0).exp());
    let c3 = Magnitude::from_ln(kappa.ln() - nf * (nf - 1.0) - (2.0 * sphere_measure(n - 1)).ln() - ln_int);
    let c4 = Magnitude::from_f64(croke_constants(n)?.c2) * c3.powf(nf + 1.0);
    let sigma = (Magnitude::from_f64(2.0 * (nf - 1.0) / (nf - 2.0)) / c4).powf(2.0);
    Ok(Sobolev { c3, c4, sigma })
}

/// `Λ(β) = 6·max(β, 2)`.
pub fn lambda(beta: f64) -> f64 {
    6.0 * beta.max(2.0)
}

/// `ν = (n+2)/(2q − n − 2)`, defined for `q > (n+2)/2`.
pub fn nu_exponent(n: usize, q: f64) -> Result<f64> {
    let nf = n as f64;
    if !(q > (nf + 2.0) / 2.0) {
        return Err(Error::NotApplicable(format!(
            "ν needs q > (n+2)/2 = {}, got q = {q}",
            (nf + 2.0) / 2.0
        )));
    }
    Ok((nf + 2.0) / (2.0 * q - nf - 2.0))
}

/// The default integrability exponent `(n+2)²/(2n)`.
pub fn default_q(n: usize) -> f64 {
    let nf = n as f64;
    (nf + 2.0) * (nf + 2.0) / (2.0 * nf)
}

/// The default starting exponent `(n+2)/2`.
pub fn default_beta(n: usize) -> f64 {
    (n as f64 + 2.0) / 2.0
}

/// `σ^{n/(n+2)}`, the power of σ that appears in every iteration bound.
pub fn sigma_power(n: usize, sigma: Magnitude) -> Magnitude {
    let nf = n as f64;
    sigma.powf(nf / (nf + 2.0))
}

/// `C₈(r, B) = 64 e^{2B}/r² + 16`, bounding `|∇η₁|² + 2η₁|∂η₁/∂t|`.
pub fn c8(r: f64, b: f64) -> f64 {
    64.0 * (2.0 * b).exp() / (r * r) + 16.0
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoserConstants {
    pub lambda: f64,
    /// `None` when `q = (n+2)/2`, where only the critical-exponent estimate applies.
    pub nu: Option<f64>,
    pub delta_b: Magnitude,
    pub c8: f64,
    pub c9: Magnitude,
    pub c_b: Magnitude,
}

/// `Λ(β)`, `ν`, `δ_b = 1/(4σ^{n/(n+2)}Λ)` and
/// `C_b = C₉(4σ^{n/(n+2)}Λ + 1)` with `C₉ = (2σ^{n/(n+2)} Λ C₈)^{1/β}`.
pub fn moser_constants(n: usize, q: f64, sigma: Magnitude, r: f64, b: f64, beta: f64) -> Result<MoserConstants> {
    check_dim(n, 3)?;
    check_positive("r", r)?;
    if !(beta > 1.0) {
        return Err(Error::InvalidParameter(format!("β must exceed 1, got {beta}")));
    }
    if !(b >= 0.0) {
        return Err(Error::InvalidParameter(format!("B must be nonnegative, got {b}")));
    }
    let nf = n as f64;
    let nu = if (q - (nf + 2.0) / 2.0).abs() <= 1e-12 {
        None
    } else {
        Some(nu_exponent(n, q)?)
    };
    let lam = lambda(beta);
    let sp = sigma_power(n, sigma);
    let delta_b = (sp * (4.0 * lam)).recip();
    let c8 = c8(r, b);
    let c9 = (sp * (2.0 * lam * c8)).powf(1.0 / beta);
    let c_b = c9 * (sp * (4.0 * lam)).add(Magnitude::ONE);
    Ok(MoserConstants {
        lambda: lam,
        nu,
        delta_b,
        c8,
        c9,
        c_b,
    })
}

/// `C₁₀(n, r) = α(n−1) ∫_0^{e^{n−1} r} sinh(s)^{n−1} ds`.
pub fn c10(n: usize, r: f64) -> Magnitude {
    let x = (n as f64 - 1.0).exp() * r;
    Magnitude::from_ln(sphere_measure(n - 1).ln() + quad::ln_sinh_power_integral((n - 1) as u32, x))
}

/// `Ṽ(n, r) = max(C₁₀, 1)`.
pub fn tilde_volume(n: usize, r: f64) -> Magnitude {
    c10(n, r).max(Magnitude::ONE)
}

/// Nested parabolic domains `D_k = B(p, r_k) × [t_k, 1]` with
/// `t_k = ½ − 2^{−(k+1)}`, `r_k = (½ + 2^{−(k+1)}) r`, and the bounds on the
/// cutoffs `η_k` that separate `D_k` from the complement of `D_{k−1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MoserDomains {
    pub r: f64,
    pub b: f64,
    pub k_max: usize,
    pub times: Vec<f64>,
    pub radii: Vec<f64>,
    /// Bound on `|∂η_k/∂t|`, `2^{k+2}`, for `k ≥ 1` (index 0 unused).
    pub dt_bounds: Vec<f64>,
    /// Bound on `|∇η_k|`, `e^B 2^{k+2}/r`, for `k ≥ 1` (index 0 unused).
    pub grad_bounds: Vec<f64>,
}

impl MoserDomains {
    /// Radius of the innermost ball `Ω' = B(p, r/2)`.
    pub fn inner_radius(&self) -> f64 {
        0.5 * self.r
    }

    /// Start time of the innermost domain `D' = Ω' × [½, 1]`.
    pub fn inner_time(&self) -> f64 {
        0.5
    }
}

pub fn moser_domains(r: f64, k_max: usize, b: f64) -> Result<MoserDomains> {
    check_positive("r", r)?;
    if k_max < 1 {
        return Err(Error::InvalidParameter("k_max must be at least 1".into()));
    }
    let times = (0..=k_max).map(|k| 0.5 - 0.5f64.powi(k as i32 + 1)).collect();
    let radii = (0..=k_max).map(|k| (0.5 + 0.5f64.powi(k as i32 + 1)) * r).collect();
    let mut dt_bounds = vec![0.0];
    let mut grad_bounds = vec![0.0];
    for k in 1..=k_max {
        let p = 2f64.powi(k as i32 + 2);
        dt_bounds.push(p);
        grad_bounds.push(b.exp() * p / r);
    }
    Ok(MoserDomains {
        r,
        b,
        k_max,
        times,
        radii,
        dt_bounds,
        grad_bounds,
    })
}

/// The iteration ladder `‖v‖_{λ^k, D_k} ≤ (Π_{j=2}^k F_j) ‖v‖_{λ, D_1}`.
///
/// Each rung factor is `F_j = (C₄·4^{j−1}·Λ(λ^{j−1})^{1+ν})^{1/λ^{j−1}}` with
/// `C₄ = 64·(e^{2B}/r² + 2)·max(2σ', (2σ'C₀)^{1+ν})` and `σ' = σ^{n/(n+2)}`.
/// The infinite product is `C_a`.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationLadder {
    pub lambda: f64,
    pub nu: f64,
    pub c_pre: Magnitude,
    pub c4: Magnitude,
    /// `ln F_j` for `j = 2, 3, …` until the tail is negligible.
    pub ln_rungs: Vec<f64>,
    pub c_a: Magnitude,
}

impl IterationLadder {
    /// `Π_{j=2}^k F_j` (the empty product for `k ≤ 1`).
    pub fn bound_factor(&self, k: usize) -> Magnitude {
        let take = k.saturating_sub(1).min(self.ln_rungs.len());
        Magnitude::from_ln(self.ln_rungs[..take].iter().sum())
    }
}

pub fn iteration_ladder(n: usize, q: f64, sigma: Magnitude, c0: f64, r: f64, b: f64) -> Result<IterationLadder> {
    check_dim(n, 3)?;
    check_positive("r", r)?;
    if !(c0 >= 1.0) {
        return Err(Error::InvalidParameter(format!("C₀ must be at least 1, got {c0}")));
    }
    let nf = n as f64;
    let nu = nu_exponent(n, q)?;
    let lam = (nf + 2.0) / nf;
    let sp = sigma_power(n, sigma);
    let c_pre = (sp * 2.0).max((sp * (2.0 * c0)).powf(1.0 + nu));
    let c4 = c_pre * (64.0 * ((2.0 * b).exp() / (r * r) + 2.0));
    let mut ln_rungs = Vec::new();
    let mut total = 0.0;
    for j in 2..200_000usize {
        let beta = lam.powi(j as i32 - 1);
        let term = (c4.ln() + (j - 1) as f64 * 4f64.ln() + (1.0 + nu) * lambda(beta).ln()) / beta;
        ln_rungs.push(term);
        total += term;
        if j > 8 && term.abs() <= 1e-17 * total.abs() {
            break;
        }
    }
    Ok(IterationLadder {
        lambda: lam,
        nu,
        c_pre,
        c4,
        ln_rungs,
        c_a: Magnitude::from_ln(total),
    })
}

/// The constants of the ε-regularity estimate
/// `‖R₊‖_{∞,D'} ≤ C (‖R‖_{(n+2)/2, D} + B)` when the left factor is at most `δ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsilonConstants {
    pub beta: f64,
    pub q: f64,
    pub b: f64,
    pub delta_b: Magnitude,
    pub c_b: Magnitude,
    /// `(3C_b + 1)δ_b + 1`.
    pub c0: Magnitude,
    pub c_a: Magnitude,
    pub v_tilde: Magnitude,
    /// `δ_b / (3nṼ)`.
    pub delta: Magnitude,
    /// `3n(C_b + 1) C_a Ṽ^{(n+4)/(n+2)}`.
    pub c_eps: Magnitude,
}

/// Evaluates the chain at exponent `β`, integrability `q` and Ricci bound `B`.
///
/// `β = (n+2)/2`, `q = (n+2)²/(2n)`, `B = 1` give the constants for every
/// admissible `B ≤ 1`.
pub fn epsilon_constants(n: usize, sigma: Magnitude, r: f64, q: f64, beta: f64, b: f64) -> Result<EpsilonConstants> {
    let nf = n as f64;
    let mc = moser_constants(n, q, sigma, r, b, beta)?;
    let c0 = (mc.c_b * 3.0).add(Magnitude::ONE) * mc.delta_b;
    let c0 = c0.add(Magnitude::ONE);
    let c0f = c0.to_f64();
    if !c0f.is_finite() {
        return Err(Error::OutOfRange(format!("C₀ = {c0} exceeds the f64 range")));
    }
    let ladder = iteration_ladder(n, q, sigma, c0f, r, b)?;
    let v_tilde = tilde_volume(n, r);
    let delta = mc.delta_b / (v_tilde * (3.0 * nf));
    let c_eps = mc.c_b.add(Magnitude::ONE) * ladder.c_a * v_tilde.powf((nf + 4.0) / (nf + 2.0)) * (3.0 * nf);
    Ok(EpsilonConstants {
        beta,
        q,
        b,
        delta_b: mc.delta_b,
        c_b: mc.c_b,
        c0,
        c_a: ladder.c_a,
        v_tilde,
        delta,
        c_eps,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum LedgerValue {
    Value(Magnitude),
    NotApplicable(String),
}

impl fmt::Display for LedgerValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LedgerValue::Value(m) => write!(f, "{m:.12}"),
            LedgerValue::NotApplicable(why) => write!(f, "n/a ({why})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LedgerEntry {
    pub name: &'static str,
    pub formula: &'static str,
    pub inputs: &'static str,
    pub value: LedgerValue,
}

/// Inputs of a ledger evaluation.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LedgerInputs {
    pub n: usize,
    pub kappa: f64,
    pub r: f64,
    pub q: f64,
    pub beta: f64,
    pub b: f64,
}

impl LedgerInputs {
    /// Inputs with `q`, `β` and `B` at their defaults `(n+2)²/(2n)`, `(n+2)/2`, `1`.
    pub fn new(n: usize, kappa: f64, r: f64) -> Self {
        LedgerInputs {
            n,
            kappa,
            r,
            q: default_q(n),
            beta: default_beta(n),
            b: 1.0,
        }
    }
}

/// Every named constant for one set of inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantLedger {
    pub inputs: LedgerInputs,
    pub entries: Vec<LedgerEntry>,
}

impl ConstantLedger {
    pub fn build(inputs: LedgerInputs) -> Result<ConstantLedger> {
        let LedgerInputs { n, kappa, r, q, beta, b } = inputs;
        check_dim(n, 2)?;
        check_positive("κ", kappa)?;
        check_positive("r", r)?;
        check_positive("q", q)?;
        if !(beta > 1.0) {
            return Err(Error::InvalidParameter(format!("β must exceed 1, got {beta}")));
        }
        if !(b >= 0.0) {
            return Err(Error::InvalidParameter(format!("B must be nonnegative, got {b}")));
        }
        let mut entries = Vec::new();
        let mut push = |name, formula, inputs, value| {
            entries.push(LedgerEntry {
                name,
                formula,
                inputs,
                value,
            })
        };
        let val = |x: f64| LedgerValue::Value(Magnitude::from_f64(x));
        let na = |e: &Error| LedgerValue::NotApplicable(e.to_string());
        let cc = croke_constants(n)?;
        push("alpha_n", "2π^{(n+1)/2} / Γ((n+1)/2)", "n", val(sphere_measure(n)));
        push("alpha_n_minus_1", "2π^{n/2} / Γ(n/2)", "n", val(sphere_measure(n - 1)));
        push("C1", "π α(n) / (2 α(n−1))", "n", val(cc.c1));
        push("C2", "2^{n−1} α(n−1)^n / α(n)^{n−1}", "n", val(cc.c2));
        push("r_kappa", "∫_0^r sinh^{n−1} = κ / (2 α(n−1) e^{2n(n−1)})", "n, κ", val(r_kappa(n, kappa)?.r));
        let sob = sobolev_sigma(n, kappa);
        let (c3, c4, sigma) = match &sob {
            Ok(s) => (
                LedgerValue::Value(s.c3),
                LedgerValue::Value(s.c4),
                LedgerValue::Value(s.sigma),
            ),
            Err(e) => (na(e), na(e), na(e)),
        };
        push(
            "C3",
            "κ e^{−n(n−1)} / (2 α(n−1) ∫_0^{2e^{n−1}} sinh^{n−1})",
            "n, κ",
            c3,
        );
        push("C4", "C2 · C3^{n+1}", "n, κ", c4);
        push("sigma", "(2(n−1) / (C4 (n−2)))²", "n, κ", sigma);
        push("Lambda_beta", "6 · max(β, 2)", "β", val(lambda(beta)));
        push(
            "nu_exponent",
            "(n+2) / (2q − n − 2)",
            "n, q",
            match nu_exponent(n, q) {
                Ok(v) => val(v),
                Err(e) => na(&e),
            },
        );
        push("C8", "64 e^{2B} / r² + 16", "r, B", val(c8(r, b)));
        push("C10", "α(n−1) ∫_0^{e^{n−1} r} sinh^{n−1}", "n, r", LedgerValue::Value(c10(n, r)));
        push("V_tilde", "max(C10, 1)", "n, r", LedgerValue::Value(tilde_volume(n, r)));
        let mc = sob
            .as_ref()
            .map_err(|e| Error::NotApplicable(e.to_string()))
            .and_then(|s| moser_constants(n, q, s.sigma, r, b, beta));
        let (delta_b, c9, c_b) = match &mc {
            Ok(m) => (
                LedgerValue::Value(m.delta_b),
                LedgerValue::Value(m.c9),
                LedgerValue::Value(m.c_b),
            ),
            Err(e) => (na(e), na(e), na(e)),
        };
        push("delta_b", "1 / (4 σ^{n/(n+2)} Λ(β))", "n, σ, β", delta_b);
        push("C9", "(2 σ^{n/(n+2)} Λ(β) C8)^{1/β}", "n, σ, r, B, β", c9);
        push("C_b", "C9 · (4 σ^{n/(n+2)} Λ(β) + 1)", "n, σ, r, B, β", c_b);
        let eps = sob
            .as_ref()
            .map_err(|e| Error::NotApplicable(e.to_string()))
            .and_then(|s| epsilon_constants(n, s.sigma, r, q, beta, b));
        let pick = |f: fn(&EpsilonConstants) -> Magnitude| match &eps {
            Ok(c) => LedgerValue::Value(f(c)),
            Err(e) => na(e),
        };
        push("C0", "(3 C_b + 1) δ_b + 1", "n, σ, r, B, β", pick(|c| c.c0));
        push("C_a", "Π_{j≥2} (C4'·4^{j−1}·Λ(λ^{j−1})^{1+ν})^{1/λ^{j−1}}", "n, q, σ, C0, r, B", pick(|c| c.c_a));
        push("delta", "δ_b / (3 n Ṽ)", "n, σ, r", pick(|c| c.delta));
        push("C_eps", "3n (C_b + 1) C_a Ṽ^{(n+4)/(n+2)}", "n, σ, r", pick(|c| c.c_eps));
        Ok(ConstantLedger { inputs, entries })
    }

    pub fn get(&self, name: &str) -> Option<&LedgerValue> {
        self.entries.iter().find(|e| e.name == name).map(|e| &e.value)
    }

    /// The value of an entry, if it exists and applies.
    pub fn value(&self, name: &str) -> Option<Magnitude> {
        match self.get(name)? {
            LedgerValue::Value(m) => Some(*m),
            LedgerValue::NotApplicable(_) => None,
        }
    }

    /// Plain-text listing of every entry: name, formula, inputs and value.
    pub fn report(&self) -> String {
        let LedgerInputs { n, kappa, r, q, beta, b } = self.inputs;
        let mut out = format!("# constant ledger\n# n = {n}, κ = {kappa}, r = {r}, q = {q}, β = {beta}, B = {b}\n");
        for e in &self.entries {
            out.push_str(&format!(
                "\n{}\n  formula: {}\n  inputs:  {}\n  value:   {}\n",
                e.name, e.formula, e.inputs, e.value
            ));
        }
        out
    }
}
