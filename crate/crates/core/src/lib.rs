//! Ricci flow on round spheres and rotationally symmetric warped products.
//!
//! - [`geometry`]: metric states, curvature, regions, balls and volumes.
//! - [`flow`]: the flow itself, singular-time estimates and evolution residuals.
//! - [`norms`]: space-time curvature norms, α-scans and extension verdicts.
//! - [`rescaling`]: parabolic rescaling and blow-up sequences.
//! - [`constants`]: the explicit constant chain and the inequality checks built on it.
//! - [`io`]: profile files, trajectory directories and CSV tables.
//! - [`verify`]: named end-to-end verification suites.
//!
//! ```
//! use ricci_lab::flow::{run_flow, FlowConfig};
//! use ricci_lab::geometry::make_round_sphere;
//!
//! let traj = run_flow(&make_round_sphere(3, 1.0, 0.0)?, &FlowConfig::default())?;
//! assert!((traj.t_hat().unwrap() - 0.25).abs() < 1e-6);
//! # Ok::<(), ricci_lab::Error>(())
//! ```

// `!(x > 0.0)` rejects NaN along with the out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod io;
pub mod magnitude;
pub mod norms;
pub mod quad;
pub mod rescaling;
mod stencil;
pub mod verify;

pub use error::{Error, Result};
pub use magnitude::Magnitude;

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/flow.md")]
    mod flow {}
    #[doc = include_str!("../../../book/src/norms.md")]
    mod norms {}
    #[doc = include_str!("../../../book/src/rescaling.md")]
    mod rescaling {}
    #[doc = include_str!("../../../book/src/constants.md")]
    mod constants {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
