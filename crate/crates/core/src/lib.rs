//! Pseudospectral laboratory for the KP-I equation
//!
//! ```text
//! u_t + u_xxx + u_x + u u_x - ∂x⁻¹ u_yy = 0
//! ```
//!
//! on a periodic box standing in for the plane. The crate provides the
//! spectral operator calculus ([`spectral`]), weight functions with
//! polynomial/exponential asymptotics ([`weights`]), an integrating-factor
//! RK4 integrator and the linearized Picard iteration ([`dynamics`]), the
//! norm families used in the energy method ([`norms`]), the weighted energy
//! identity and its integration-by-parts ingredients ([`identities`]), and
//! reproducible experiment drivers ([`experiments`]) whose outputs are
//! persisted through [`io`].
//!
//! Data parallelism is provided by rayon behind the `parallel` feature
//! (enabled by default). Every reduction runs in a fixed order, so results
//! are bit-identical for any thread count.

pub mod dynamics;
mod error;
pub mod experiments;
pub mod identities;
pub mod initial;
pub mod io;
pub mod jet;
pub mod norms;
pub mod par;
pub mod spectral;
pub mod weights;

pub use error::{Error, Result};
pub use spectral::{Field, Grid};

/// Version string recorded in run provenance.
pub const CODE_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), "-", env!("CARGO_PKG_VERSION"));
