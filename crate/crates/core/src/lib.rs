//! Ground states of the degenerate elliptic equation
//!
//! ```text
//! -div(|x|^{2a} grad u) + omega u = u^{p-1}   in R^d,  0 < a < 1
//! ```
//!
//! computed by radial shooting, together with the identities and spectral
//! checks that characterize them.

// NaN-rejecting checks are written as `!(x > 0.0)` and index loops walk
// several parallel arrays at once.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod integrator;
pub mod lstsq;
pub mod params;
pub mod pohozaev;
pub mod quadrature;
pub mod radial_ode;
pub mod report;
pub mod shooting;
pub mod spectrum;
pub mod symmetrize;
pub mod variational;

pub use params::{ParamError, ProblemParams, ScalingMap};
pub use radial_ode::{RadialGrid, RadialProfile};
