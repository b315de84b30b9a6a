//! Positive reals stored by their natural logarithm.
//!
//! The Sobolev and iteration constants span hundreds of decades (σ for
//! `n = 5` is far below `f64::MIN_POSITIVE`), so every constant in the
//! ledger is carried as a [`Magnitude`] and only converted to `f64` at the
//! point of use.
//!
//! ```
//! use ricci_lab::Magnitude;
//!
//! let a = Magnitude::from_f64(1e200);
//! let b = a * a; // 1e400 overflows f64 but not a Magnitude
//! assert!((b.log10() - 400.0).abs() < 1e-12);
//! assert_eq!(b.to_f64(), f64::INFINITY);
//! assert!(((b / a).to_f64() / 1e200 - 1.0).abs() < 1e-12);
//! ```

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Magnitude {
    ln: f64,
}

impl Magnitude {
    pub const ONE: Magnitude = Magnitude { ln: 0.0 };

    /// Wraps a positive finite value. Zero maps to `ln = -inf`.
    pub fn from_f64(x: f64) -> Self {
        assert!(x >= 0.0, "Magnitude requires a nonnegative value, got {x}");
        Magnitude { ln: x.ln() }
    }

    pub fn from_ln(ln: f64) -> Self {
        Magnitude { ln }
    }

    pub fn ln(self) -> f64 {
        self.ln
    }

    pub fn log10(self) -> f64 {
        self.ln / std::f64::consts::LN_10
    }

    /// The value as `f64`; saturates to `inf` or `0`.
    pub fn to_f64(self) -> f64 {
        self.ln.exp()
    }

    pub fn powf(self, p: f64) -> Self {
        Magnitude { ln: self.ln * p }
    }

    pub fn recip(self) -> Self {
        Magnitude { ln: -self.ln }
    }

    /// Sum of two magnitudes, evaluated without leaving the log domain.
    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: Magnitude) -> Self {
        let (hi, lo) = if self.ln >= other.ln {
            (self.ln, other.ln)
        } else {
            (other.ln, self.ln)
        };
        if lo == f64::NEG_INFINITY {
            return Magnitude { ln: hi };
        }
        Magnitude {
            ln: hi + (lo - hi).exp().ln_1p(),
        }
    }

    /// Difference `self - other`, or `None` when it is not positive.
    pub fn checked_sub(self, other: Magnitude) -> Option<Self> {
        if other.ln >= self.ln {
            return None;
        }
        let d = (other.ln - self.ln).exp();
        Some(Magnitude {
            ln: self.ln + (-d).ln_1p(),
        })
    }

    pub fn max(self, other: Magnitude) -> Self {
        if self.ln >= other.ln {
            self
        } else {
            other
        }
    }

    /// Relative difference `|a/b - 1|` computed from the logarithms.
    pub fn rel_diff(self, other: Magnitude) -> f64 {
        (self.ln - other.ln).exp_m1().abs()
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Mul for Magnitude {
    type Output = Magnitude;
    fn mul(self, rhs: Magnitude) -> Magnitude {
        Magnitude {
            ln: self.ln + rhs.ln,
        }
    }
}

impl Mul<f64> for Magnitude {
    type Output = Magnitude;
    fn mul(self, rhs: f64) -> Magnitude {
        self * Magnitude::from_f64(rhs)
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Div for Magnitude {
    type Output = Magnitude;
    fn div(self, rhs: Magnitude) -> Magnitude {
        Magnitude {
            ln: self.ln - rhs.ln,
        }
    }
}

impl Div<f64> for Magnitude {
    type Output = Magnitude;
    fn div(self, rhs: f64) -> Magnitude {
        self / Magnitude::from_f64(rhs)
    }
}

impl PartialOrd for Magnitude {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.ln.partial_cmp(&other.ln)
    }
}

impl From<f64> for Magnitude {
    fn from(x: f64) -> Self {
        Magnitude::from_f64(x)
    }
}

/// Scientific notation with an unbounded exponent, e.g. `3.141593e-1204`.
impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ln == f64::NEG_INFINITY {
            return write!(f, "0");
        }
        if !self.ln.is_finite() {
            return write!(f, "inf");
        }
        let l10 = self.log10();
        let mut e = l10.floor();
        let mut mant = 10f64.powf(l10 - e);
        let prec = f.precision().unwrap_or(6);
        // rounding can push the mantissa to 10.0
        if format!("{mant:.prec$}").starts_with("10") {
            mant /= 10.0;
            e += 1.0;
        }
        write!(f, "{mant:.prec$}e{}", e as i64)
    }
}
