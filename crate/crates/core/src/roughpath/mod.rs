//! p-variation, controls, driver norms and the rough remainder `V♮`.

mod pvar;
mod remainder;

pub use pvar::{chen_defect, control_from_path, driver_norms, p_variation, Control, RoughDriverNorms};
pub use remainder::{
    fit_scaling_exponent, remainder_table, test_weight, RemainderEntry, RemainderTable, ScalingFit,
    TestedSeries,
};

#[derive(Debug, thiserror::Error)]
pub enum RoughError {
    #[error("p must be at least 1, got {0}")]
    Exponent(f64),
    #[error("driver norms need constant Q")]
    NonConstantQ,
    #[error("time grids do not match: {0}")]
    Grid(String),
    #[error("need at least {needed} dyadic levels, table has {found}")]
    Levels { needed: usize, found: usize },
    #[error(transparent)]
    Table(#[from] crate::io::TableError),
}
