//! Periodic grid, transforms, spectral derivatives and quadrature.
//!
//! Spectral coefficients are stored in FFT order, row-major with `x` fastest
//! (`index = iy * nx + ix`). The forward transform carries the `1/(nx ny)`
//! factor, so for real fields
//!
//! ```text
//! ∫ u v dx dy = 4 Lx Ly Σ Re(û conj(v̂))
//! ```

mod fft;
mod field;
mod grid;
mod ops;

pub use field::Field;
pub use grid::Grid;
pub use ops::{
    axis_factor, dealias, dealias_coeffs, deriv, inv_dx, multiplier, spectral_inner, weighted_integral,
    Order, DEALIAS_FRAC, ZERO_MODE_TOL,
};

pub(crate) use fft::{forward as forward_in_place, inverse as inverse_in_place};

