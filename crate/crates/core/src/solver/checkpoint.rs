use std::fs;
use std::path::{Path, PathBuf};

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{GalerkinState, SchemeParams, SolverError};
use crate::spectral::{ScalarField, TorusGrid, VectorField};

const FORMAT: &str = "cnstn-checkpoint";
const MAJOR: u32 = 1;

/// JSON header of a checkpoint.
///
/// The sidecar holds, for `rho, u_0, u_1, …` in that order, the full complex
/// coefficient cube in row-major flat order as little-endian `f64` pairs
/// `(re, im)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub format: String,
    pub version: String,
    pub dim: usize,
    pub modes: usize,
    pub n: usize,
    pub t: f64,
    pub params: SchemeParams,
    pub floor: f64,
    pub seed: Option<u64>,
    pub fields: Vec<String>,
    pub sidecar: String,
}

fn sidecar_path(header: &Path, name: &str) -> PathBuf {
    header.parent().map(|p| p.join(name)).unwrap_or_else(|| PathBuf::from(name))
}

/// Writes `<path>` (JSON) and `<path>.bin` next to it.
pub fn write_checkpoint(
    path: &Path,
    state: &GalerkinState,
    params: &SchemeParams,
    floor: f64,
    seed: Option<u64>,
) -> Result<Checkpoint, SolverError> {
    let grid = state.grid();
    let name = format!(
        "{}.bin",
        path.file_name().and_then(|s| s.to_str()).ok_or_else(|| SolverError::Checkpoint("bad path".into()))?
    );
    let mut fields = vec!["rho".to_string()];
    fields.extend((0..grid.dim()).map(|i| format!("u_{i}")));
    let header = Checkpoint {
        format: FORMAT.into(),
        version: format!("{MAJOR}.0"),
        dim: grid.dim(),
        modes: grid.modes(),
        n: grid.points_per_axis(),
        t: state.t,
        params: *params,
        floor,
        seed,
        fields,
        sidecar: name.clone(),
    };
    let mut bytes = Vec::with_capacity(16 * grid.len() * (1 + grid.dim()));
    for f in std::iter::once(&state.rho).chain(state.u.iter()) {
        for c in f.coeffs() {
            bytes.extend_from_slice(&c.re.to_le_bytes());
            bytes.extend_from_slice(&c.im.to_le_bytes());
        }
    }
    fs::write(sidecar_path(path, &name), bytes)?;
    let json = serde_json::to_string_pretty(&header).map_err(|e| SolverError::Checkpoint(e.to_string()))?;
    fs::write(path, json)?;
    Ok(header)
}

/// Reads a checkpoint; momentum is recomputed from `ϱ` and `u`.
pub fn read_checkpoint(path: &Path) -> Result<(Checkpoint, GalerkinState), SolverError> {
    let text = fs::read_to_string(path)?;
    let header: Checkpoint = serde_json::from_str(&text).map_err(|e| SolverError::Checkpoint(e.to_string()))?;
    if header.format != FORMAT {
        return Err(SolverError::Checkpoint(format!("unknown format {:?}", header.format)));
    }
    let major = header.version.split('.').next().and_then(|s| s.parse::<u32>().ok());
    if major != Some(MAJOR) {
        return Err(SolverError::Checkpoint(format!("unsupported version {}", header.version)));
    }
    let grid = TorusGrid::new(header.dim, header.modes, header.n)?;
    if header.fields.len() != 1 + grid.dim() {
        return Err(SolverError::Checkpoint("field list does not match the dimension".into()));
    }
    let bytes = fs::read(sidecar_path(path, &header.sidecar))?;
    let len = grid.len();
    if bytes.len() != 16 * len * header.fields.len() {
        return Err(SolverError::Checkpoint(format!("sidecar has {} bytes", bytes.len())));
    }
    let word = |i: usize| f64::from_le_bytes(bytes[8 * i..8 * i + 8].try_into().expect("8 bytes"));
    let mut fields = (0..header.fields.len()).map(|f| {
        let coeffs: Vec<Complex64> =
            (0..len).map(|j| Complex64::new(word(2 * (f * len + j)), word(2 * (f * len + j) + 1))).collect();
        ScalarField::from_coeffs(grid, coeffs)
    });
    let rho = fields.next().expect("rho");
    let u = VectorField::new(fields.collect());
    let state = GalerkinState::new(header.t, rho, &u);
    Ok((header, state))
}
