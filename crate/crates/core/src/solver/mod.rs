//! Time integration of the Galerkin momentum equation coupled to the
//! ε-parabolic continuity equation with artificial pressure `δϱ^β`.
//!
//! The scheme advances the projected momentum `P_m(ϱu)` with Heun's method
//! and the density with an IMEX Crank–Nicolson step that treats `εΔϱ`
//! implicitly. Drivers are piecewise linear, so each step sees a constant
//! slope.

mod checkpoint;
mod params;
mod renorm;
mod rhs;
mod run;
mod state;
mod step;

pub use checkpoint::{read_checkpoint, write_checkpoint, Checkpoint};
pub use params::{pressure, pressure_potential, truncation, truncation_derivative, SchemeParams};
pub use renorm::{renorm_residual, Identity, RenormResidual, Renormalization, Truncation};
pub use rhs::{
    momentum_density, rhs_continuity, rhs_momentum, stage_terms, stress_divergence,
    transport_divergence, StageTerms,
};
pub use run::{
    cfl_number, initial_state, run, run_from, DensityMode, InitialData, RunFailure, RunSetup,
    Trajectory, VelocityMode, CFL_LIMIT, TEST_CUTOFF,
};
pub use state::{recover_velocity, GalerkinState, Scheme};
pub use step::{step, step_increment, StepNoise};

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("blow-up at t = {t}: {reason} (min rho = {min_rho:e})")]
    BlowUp { t: f64, min_rho: f64, reason: String },
    #[error("mass solve did not converge in {iterations} iterations")]
    MassSolve { iterations: usize },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Spectral(#[from] crate::spectral::SpectralError),
}
