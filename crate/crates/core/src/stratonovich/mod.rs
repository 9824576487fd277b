//! Discrete Itô and Stratonovich integrals, the Itô–Stratonovich correction
//! operator, and Monte Carlo checks of the conversion identities.

mod correction;
mod integrals;
mod stats;

pub use correction::{
    correction_identity_check, correction_operator, correction_terms, noise_energy_contribution, CorrectionTerms,
    NoiseEnergy,
};
pub use integrals::{ito_integral, sde_defect, stratonovich_integral, IntegralResult, Quadrature};
pub use stats::{ensemble_stats, CompensatedSum, EnsembleStats, Verdict};

#[derive(Debug, thiserror::Error)]
pub enum StratError {
    #[error("integrand has {found} samples but the path has {expected} nodes")]
    Misaligned { expected: usize, found: usize },
    #[error("component {k} out of range for a driver with {len} components")]
    Component { k: usize, len: usize },
    #[error("ensemble needs at least 2 paths, got {0}")]
    EnsembleSize(usize),
    #[error("the correction operator needs constant noise coefficients")]
    NonConstantQ,
    #[error("trajectory must store every step")]
    Stride,
}
