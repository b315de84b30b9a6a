//! Quadrature and scalar root finding.

use std::sync::OnceLock;

const GL_ORDER: usize = 16;

/// Nodes and weights of the Gauss–Legendre rule on `[-1, 1]`.
pub(crate) fn gauss_legendre() -> &'static ([f64; GL_ORDER], [f64; GL_ORDER]) {
    static RULE: OnceLock<([f64; GL_ORDER], [f64; GL_ORDER])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_ORDER;
        let mut x = [0.0; GL_ORDER];
        let mut w = [0.0; GL_ORDER];
        for i in 0..n {
            // Newton on P_n from the Chebyshev-like initial guess
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, z);
                let dz = p / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(n, z);
            x[i] = -z;
            w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
        (x, w)
    })
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, dp)
}

/// Composite Gauss–Legendre quadrature of `f` over `[a, b]` with `panels`
/// equal panels.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize) -> f64 {
    let (x, w) = gauss_legendre();
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let mut s = 0.0;
        for i in 0..GL_ORDER {
            s += w[i] * f(mid + 0.5 * h * x[i]);
        }
        sum += 0.5 * h * s;
    }
    sum
}

/// `ln sinh(s)` without overflow for large `s`.
pub fn ln_sinh(s: f64) -> f64 {
    if s > 20.0 {
        s - std::f64::consts::LN_2 + (-(-2.0 * s).exp()).ln_1p()
    } else {
        s.sinh().ln()
    }
}

/// `ln ∫_0^x sinh(s)^k ds`, accurate in relative terms for every `x > 0`.
///
/// The integrand is scaled by its maximum `sinh(x)^k` before summation so
/// the result stays finite long after `sinh(x)^k` itself overflows.
pub fn ln_sinh_power_integral(k: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if k == 0 {
        return x.ln();
    }
    let kf = k as f64;
    let top = kf * ln_sinh(x);
    // below x - 60/k the integrand is under e^-60 of its peak
    let a = if kf * x > 60.0 { x - 60.0 / kf } else { 0.0 };
    let panels = (((x - a) * kf / 2.0).ceil() as usize).clamp(2, 4000);
    let s = integrate(|s| (kf * ln_sinh(s) - top).exp(), a, x, panels);
    top + s.ln()
}

/// `∫_0^x sinh(s)^k ds`.
pub fn sinh_power_integral(k: u32, x: f64) -> f64 {
    ln_sinh_power_integral(k, x).exp()
}

/// `∫_0^θ sin(s)^k ds` for `0 ≤ θ ≤ π`.
pub fn sin_power_integral(k: u32, theta: f64) -> f64 {
    if theta <= 0.0 {
        return 0.0;
    }
    let panels = ((theta * 4.0).ceil() as usize).max(1);
    integrate(|s| s.sin().powi(k as i32), 0.0, theta, panels)
}

/// Root of an increasing function by bracket expansion, then safeguarded
/// Newton steps.
///
/// `f` returns `(value, derivative)`. The bracket starts at `[lo, hi]` and
/// `hi` doubles until `f(hi) > 0`.
pub fn increasing_root<F: FnMut(f64) -> (f64, f64)>(mut f: F, lo: f64, hi: f64, tol: f64) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..2000 {
        if f(hi).0 > 0.0 {
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..400 {
        let (v, dv) = f(x);
        if v.abs() <= tol {
            return x;
        }
        if v > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let newton = x - v / dv;
        x = if dv > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * hi {
            return x;
        }
    }
    x
}
