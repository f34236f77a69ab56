//! Sharp Hardy-inequality constants for homogeneous weights
//! `Φ(x/|x|)/|x|^{2κ}` on R^d, together with numerical checks of every
//! ingredient: the lowest eigenvalue of `-Δ_ϑ - Φ` on the sphere, the
//! α(μ) curve bounding it, the decreasing rearrangement of the weight and
//! the Hardy functionals on explicit trial functions.

pub mod alpha_mu;
pub mod cli;
pub mod constants;
pub mod error;
pub mod gn;
pub mod quadrature;
pub mod rearrangement;
pub mod special;
pub mod sphere;
pub mod spectral;
pub mod verifier;
pub mod weights;

pub use error::{Error, Result};
