//! Strict JSON run configuration.

use cnstn::noise::{
    make_constant_q, make_streamfunction_q, sample_brownian_realization, smooth_driver, DriverComponent,
    DriverPath, QField, StreamMode,
};
use cnstn::solver::{DensityMode, InitialData, RunSetup, SchemeParams, VelocityMode};
use cnstn::spectral::{ScalarField, TorusGrid, VectorField};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Divergence above which a noise family counts as non-solenoidal.
const DIV_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    #[serde(default)]
    pub params: SchemeParams,
    #[serde(default)]
    pub initial: InitialData,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default)]
    pub experiment: ExperimentConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub test_hooks: TestHooks,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dim: usize,
    pub m: usize,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    #[default]
    Smooth,
    Brownian,
}

/// Noise coefficients `Q_1, …, Q_K`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum QSpec {
    /// No noise.
    #[default]
    None,
    Constant { vectors: Vec<Vec<f64>> },
    /// Divergence-free fields from 2D stream functions.
    Stream { modes: Vec<Vec<StreamMode>> },
    /// Arbitrary trigonometric fields; may be non-solenoidal.
    Modes { fields: Vec<Vec<VelocityMode>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub kind: NoiseKind,
    pub q: QSpec,
    /// Smooth drivers, one per `Q_k`.
    pub drivers: Vec<DriverComponent>,
    /// Multiplier applied to every driver.
    pub amplitude: f64,
    pub seed: u64,
    /// Distances `d_lo ..= d_hi`; solving needs levels `lo ..= hi + 1`.
    pub wong_zakai_levels: [u32; 2],
    /// Rough-path exponent.
    pub p: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            kind: NoiseKind::Smooth,
            q: QSpec::None,
            drivers: Vec::new(),
            amplitude: 1.0,
            seed: 0,
            wong_zakai_levels: [4, 8],
            p: 2.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Largest `|residual| / E(0)` of the energy ledger.
    pub ledger_residual: f64,
    /// Largest relative mass drift.
    pub mass: f64,
    /// Largest Chen defect of the lift.
    pub chen: f64,
    /// Largest `|J5|` relative to `‖ϱ‖_∞`, constant `Q` only.
    pub commutator: f64,
    /// Largest replay mismatch relative to `E(0)`.
    pub replay: f64,
    /// Largest `|noise_cum(T)| / E(0)` for solenoidal noise.
    pub noise_energy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { ledger_residual: 1e-3, mass: 1e-11, chen: 1e-12, commutator: 1e-11, replay: 1e-10, noise_energy: 1e-2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Stored-state decimation; `None` means `max(1, steps/256)`.
    pub stride: Option<usize>,
    pub ensemble: usize,
    /// Every ensemble member uses the first realization.
    pub same_path: bool,
    /// Test function of the correction check.
    pub psi: Vec<DensityMode>,
    /// Fail with exit 3 when an audit tolerance is exceeded.
    pub audit: bool,
    pub tolerances: Tolerances,
    /// Dyadic window levels of the remainder table.
    pub rough_levels: u32,
    /// Exponent `Θ` of the pressure weight.
    pub theta: f64,
    /// Truncation level of the renormalization audit.
    pub truncation_k: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            stride: None,
            ensemble: 100,
            same_path: false,
            psi: vec![DensityMode { k: vec![1], cos: 1.0, sin: 0.0 }],
            audit: true,
            tolerances: Tolerances::default(),
            rough_levels: 5,
            theta: 0.9,
            truncation_k: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TestHooks {
    /// Perturb one second-level entry of the lift in `roughcheck`.
    pub corrupt_lift: bool,
}

/// Parses and validates a configuration. `informative` admits
/// out-of-scope noise (x-dependent or non-solenoidal `Q` with Brownian
/// drivers, non-solenoidal `Q` in general).
pub fn parse_config(text: &str, informative: bool) -> Result<RunConfig, CliError> {
    let config: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(format!("parse error: {e}")))?;
    config.validate(informative)?;
    Ok(config)
}

fn field_err(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

impl RunConfig {
    pub fn grid(&self) -> Result<TorusGrid, CliError> {
        TorusGrid::new(self.grid.dim, self.grid.m, self.grid.n).map_err(|e| field_err("grid", e))
    }

    pub fn validate(&self, informative: bool) -> Result<(), CliError> {
        let grid = self.grid()?;
        self.params.validate(grid.dim()).map_err(|e| field_err("params", e))?;
        let q = self.q_field(grid)?;
        let noise = &self.noise;
        if !(noise.amplitude.is_finite()) {
            return Err(field_err("noise.amplitude", "must be finite"));
        }
        if !(noise.p >= 2.0 && noise.p < 3.0) {
            return Err(field_err("noise.p", "must lie in [2, 3)"));
        }
        if noise.wong_zakai_levels[0] > noise.wong_zakai_levels[1] {
            return Err(field_err("noise.wong_zakai_levels", "need lo <= hi"));
        }
        if noise.q == QSpec::None && !noise.drivers.is_empty() {
            return Err(field_err("noise.drivers", "drivers given without Q"));
        }
        match noise.kind {
            NoiseKind::Smooth => {
                if noise.q != QSpec::None && noise.drivers.len() != q.len() {
                    return Err(field_err(
                        "noise.drivers",
                        format!("need {} smooth drivers, got {}", q.len(), noise.drivers.len()),
                    ));
                }
            }
            NoiseKind::Brownian => {
                if !noise.drivers.is_empty() {
                    return Err(field_err("noise.drivers", "brownian noise takes no smooth drivers"));
                }
                if !q.is_constant() && !informative {
                    return Err(field_err("noise.q", "brownian noise requires constant Q"));
                }
            }
        }
        if !self.solenoidal(grid, &q) && !informative {
            return Err(field_err("noise.q", "Q is not divergence free (rerun with --informative)"));
        }
        let e = &self.experiment;
        if e.stride == Some(0) {
            return Err(field_err("experiment.stride", "must be at least 1"));
        }
        if !(e.truncation_k > 0.0) {
            return Err(field_err("experiment.truncation_k", "must be positive"));
        }
        if !(e.theta > 0.0) {
            return Err(field_err("experiment.theta", "must be positive"));
        }
        if e.rough_levels < 3 {
            return Err(field_err("experiment.rough_levels", "need at least 3 levels for a fit"));
        }
        self.psi(grid)?;
        Ok(())
    }

    /// Whether every `Q_k` is divergence free.
    pub fn solenoidal(&self, grid: TorusGrid, q: &QField) -> bool {
        (0..q.len()).all(|k| q.divergence_max(grid, k) <= DIV_TOL)
    }

    /// Noise coefficients; `QSpec::None` becomes one zero vector.
    pub fn q_field(&self, grid: TorusGrid) -> Result<QField, CliError> {
        let dim = grid.dim();
        let q = match &self.noise.q {
            QSpec::None => make_constant_q(dim, &[vec![0.0; dim]]),
            QSpec::Constant { vectors } => make_constant_q(dim, vectors),
            QSpec::Stream { modes } => make_streamfunction_q(grid, modes),
            QSpec::Modes { fields } => {
                if fields.is_empty() {
                    return Err(field_err("noise.q", "no fields"));
                }
                let mut out = Vec::with_capacity(fields.len());
                for modes in fields {
                    let mut comps = vec![ScalarField::zeros(grid); dim];
                    for m in modes {
                        if m.component >= dim {
                            return Err(field_err("noise.q", format!("component {} out of range", m.component)));
                        }
                        comps[m.component].add_mode(wavevector(&m.k, dim)?, m.cos, m.sin);
                    }
                    out.push(VectorField::new(comps));
                }
                QField::from_fields_unchecked(out)
            }
        };
        q.map_err(|e| field_err("noise.q", e))
    }

    pub fn psi(&self, grid: TorusGrid) -> Result<ScalarField, CliError> {
        let mut psi = ScalarField::zeros(grid);
        for m in &self.experiment.psi {
            psi.add_mode(wavevector(&m.k, grid.dim()).map_err(|_| field_err("experiment.psi", "bad wavevector"))?, m.cos, m.sin);
        }
        Ok(psi)
    }

    pub fn stride(&self) -> usize {
        self.experiment.stride.unwrap_or_else(|| (self.params.steps() / 256).max(1))
    }

    /// Driver of realization `index` on the step grid.
    pub fn driver(&self, k: usize, index: u64) -> DriverPath {
        let steps = self.params.steps();
        let t_end = self.params.t_end;
        let path = match (&self.noise.q, self.noise.kind) {
            (QSpec::None, _) => DriverPath::zero(k, t_end, steps),
            (_, NoiseKind::Smooth) => smooth_driver(&self.noise.drivers, t_end, steps),
            (_, NoiseKind::Brownian) => sample_brownian_realization(k, t_end, steps, self.noise.seed, index),
        };
        path.scaled(self.noise.amplitude)
    }

    pub fn setup(&self, stride: usize, driver: DriverPath) -> Result<RunSetup, CliError> {
        let grid = self.grid()?;
        Ok(RunSetup {
            grid,
            params: self.params,
            q: self.q_field(grid)?,
            driver,
            initial: self.initial.clone(),
            stride,
        })
    }
}

fn wavevector(k: &[i64], dim: usize) -> Result<[i64; 3], CliError> {
    if k.is_empty() || k.len() > dim {
        return Err(field_err("wavevector", format!("need 1..={dim} components")));
    }
    let mut out = [0; 3];
    out[..k.len()].copy_from_slice(k);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"grid": {"dim": 2, "m": 4, "n": 18}}"#;

    #[test]
    fn minimal_config_fills_defaults() {
        let c = parse_config(MINIMAL, false).unwrap();
        assert_eq!(c.params.dt, 1e-3);
        assert_eq!(c.noise.p, 2.5);
        assert_eq!(c.params.density_floor, None);
        assert_eq!(c.stride(), 1);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_config(r#"{"grid": {"dim": 2, "m": 4, "n": 18}, "colour": 1}"#, false).unwrap_err();
        assert!(err.to_string().contains("unknown field"));
    }

    #[test]
    fn brownian_needs_constant_q() {
        let text = r#"{"grid": {"dim": 2, "m": 4, "n": 18},
            "noise": {"kind": "brownian", "q": {"type": "stream", "modes": [[{"k": [1, 0], "cos": 0.1}]]}}}"#;
        assert!(parse_config(text, false).unwrap_err().to_string().contains("constant Q"));
        assert!(parse_config(text, true).is_ok());
    }

    #[test]
    fn non_solenoidal_q_needs_informative() {
        let text = r#"{"grid": {"dim": 2, "m": 4, "n": 18},
            "noise": {"q": {"type": "modes", "fields": [[{"component": 0, "k": [1, 0], "cos": 0.1}]]},
                      "drivers": [{"linear": 1.0}]}}"#;
        assert!(parse_config(text, false).is_err());
        assert!(parse_config(text, true).is_ok());
    }
}
