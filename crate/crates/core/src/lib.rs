//! Spectral geometry of `*d` on the round 3-sphere and the closed self-dual
//! 2-forms it generates on flat ℝ⁴ and on a two-ended ALE model.
//!
//! Layers, bottom up:
//!
//! * [`frame`]: quaternionic frames of S³, structure constants, Hodge star;
//! * [`poly`]: exact polynomial calculus (div, curl, `*d`) on S³;
//! * [`spectral`]: eigen-decomposition of `*d` on divergence-free 1-forms;
//! * [`maxwell`]: the Euclidean–Maxwell flow, spectral and time-stepped;
//! * [`selfdual`]: self-dual 2-forms on ℝ⁴ and their pointwise checks;
//! * [`ale`]: the ALE model `g_ε`, curvature, energy and decay;
//! * [`regularity`]: the Moser product and the elliptic inequality.

pub mod ale;
pub mod error;
pub mod fd;
pub mod frame;
pub mod linalg;
pub mod maxwell;
pub mod poly;
pub mod quadrature;
pub mod regularity;
pub mod sampling;
pub mod scalar;
pub mod selfdual;
pub mod spectral;

pub use error::{Error, Result};
