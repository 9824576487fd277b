//! Executable audits of the analytic identities: energy ledger, mass and
//! momentum, higher pressure integrability, effective viscous flux, the
//! `ϱ ln ϱ` balance and the noise commutator.
//!
//! Audits never mutate a trajectory.

mod audits;
mod energy;

pub use audits::{
    commutator_j5, flux_pair, mass_momentum, pressure_div_q, pressure_weight, rho_log_rho, FluxPairSeries,
    PressureWeight, RhoLogRho,
};
pub use energy::{
    energy, energy_audit, powers, read_ledger, write_ledger, LedgerAccumulator, LedgerRow, Powers,
    LEDGER_COLUMNS,
};

#[derive(Debug, thiserror::Error)]
pub enum DiagnosticsError {
    #[error("density {min:e} at t = {t} is not positive")]
    Density { t: f64, min: f64 },
    #[error("the audit needs at least two stored samples")]
    TooShort,
    #[error(transparent)]
    Solver(#[from] crate::solver::SolverError),
    #[error(transparent)]
    Table(#[from] crate::io::TableError),
}
