//! Numerical laboratory for convex ancient solutions of curve shortening flow
//! and convex translators of mean curvature flow.
//!
//! The crate is organised around the support-function representation of
//! compact convex curves:
//!
//! * [`geometry`]: support functions, sampled curves and convex measurements.
//! * [`catalog`]: explicit solutions (shrinking circles, Angenent ovals,
//!   Grim Reapers, bowl solitons).
//! * [`engine`]: the curve shortening flow engine and the limiting procedures
//!   (blow-down, asymptotic translators, arrival time).
//! * [`translator`]: translator residuals, slab classification and bowl
//!   blow-downs.
//! * [`diagnostics`]: Gaussian density, monotonicity, Harnack and rigidity
//!   functionals.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod catalog;
mod ode;
pub mod diagnostics;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod translator;

pub use error::{Error, Result};
pub use geometry::{Measurements, SupportFunction, Timeslice};
pub use engine::{AncientSolution, StepPolicy, SupportFlow};
