//! Fourier toolkit on the torus `[0, 2π)^N`.
//!
//! Fields carry both a physical sampling and a complex coefficient cube, each
//! computed on first use from the other. Coefficients follow the convention
//!
//! ```text
//! f(x) = Σ_k c_k e^{i k·x},    c_k = n^{-N} Σ_j f(x_j) e^{-i k·x_j}
//! ```
//!
//! so `∫ f = (2π)^N c_0`. Differential and Riesz multipliers annihilate the
//! Nyquist slot `k_a = −n/2`, and products are formed on a grid padded to
//! `2n` points per axis and truncated back, which keeps every product of two
//! fields exact on the retained modes.

mod fft;
mod field;
mod grid;
mod ops;

pub use field::{ScalarField, VectorField};
pub use grid::TorusGrid;
pub use ops::{
    dealias, derivative, divergence, gradient, inner, integrate, laplacian, norm_l2,
    product, project_modes, riesz_double, riesz_grad, smoothing, to_physical, to_spectral,
    vector_inner,
};

pub(crate) use grid::norm_sq;

#[derive(Debug, thiserror::Error)]
pub enum SpectralError {
    #[error("dimension must be 1, 2 or 3, got {0}")]
    Dimension(usize),
    #[error("invalid grid: {0}")]
    Grid(String),
}
