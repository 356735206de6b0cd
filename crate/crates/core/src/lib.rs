//! Alpha-perimeters, volumes, symmetrizations and isoperimetric profiles for
//! symmetric sets in Grushin spaces `R^h x R^k` and in H-type groups.
//!
//! The crate works with three reduced representations of a set that is
//! spherically symmetric in both `x` and `y`:
//!
//! * a [`Profile`]: `E = {|y| < f(|x|)}` for a decreasing `f` on `[0, r0]`;
//! * a [`GeneratingCurve`]: a polygon in the `(r, s) = (|x|, |y|)` quadrant;
//! * a [`QuadrantGrid`]: a union of rectangular cells in that quadrant.
//!
//! On top of those sit the symmetrization pipeline ([`rearrange`]), the
//! H-type structures ([`htype`]) and the profile ODE with its shooting solver
//! ([`profileode`]).

pub mod error;
pub mod htype;
pub mod interp;
pub mod measures;
pub mod ode;
pub mod profile;
pub mod profileode;
pub mod quad;
pub mod rearrange;
pub mod spaces;
pub mod verify;

pub use error::{Error, Result};
pub use measures::{GeneratingCurve, QuadrantGrid};
pub use profile::Profile;
pub use spaces::Params;

/// Version string embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
