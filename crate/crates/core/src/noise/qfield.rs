use serde::{Deserialize, Serialize};

use super::NoiseError;
use crate::spectral::{derivative, divergence, ScalarField, TorusGrid, VectorField};

/// Divergence tolerance for fields built from stream functions.
const DIV_TOL: f64 = 1e-12;

/// The family `Q_1, …, Q_K`.
#[derive(Debug, Clone)]
pub enum QField {
    /// Constant vectors, the rough and Brownian setting.
    Constant { dim: usize, vectors: Vec<[f64; 3]> },
    /// Smooth fields on a fixed grid, solenoidal unless built unchecked.
    Smooth { fields: Vec<VectorField> },
}

/// One trigonometric term `cos·cos(k·x) + sin·sin(k·x)` of a stream function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StreamMode {
    pub k: [i64; 2],
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

pub fn make_constant_q(dim: usize, vectors: &[Vec<f64>]) -> Result<QField, NoiseError> {
    if vectors.is_empty() {
        return Err(NoiseError::Empty);
    }
    let mut out = Vec::with_capacity(vectors.len());
    for v in vectors {
        if v.len() != dim {
            return Err(NoiseError::VectorLength { expected: dim, found: v.len() });
        }
        let mut q = [0.0; 3];
        q[..dim].copy_from_slice(v);
        out.push(q);
    }
    Ok(QField::Constant { dim, vectors: out })
}

/// `Q_k = (∂₂ψ_k, −∂₁ψ_k)` for trigonometric stream functions `ψ_k`.
pub fn make_streamfunction_q(grid: TorusGrid, table: &[Vec<StreamMode>]) -> Result<QField, NoiseError> {
    if grid.dim() != 2 {
        return Err(NoiseError::StreamDimension(grid.dim()));
    }
    if table.is_empty() {
        return Err(NoiseError::Empty);
    }
    let fields = table
        .iter()
        .map(|modes| {
            let mut psi = ScalarField::zeros(grid);
            for m in modes {
                psi.add_mode([m.k[0], m.k[1], 0], m.cos, m.sin);
            }
            VectorField::new(vec![derivative(&psi, 1), derivative(&psi, 0).scale(-1.0)])
        })
        .collect();
    let q = QField::Smooth { fields };
    for k in 0..q.len() {
        let div = q.divergence_max(grid, k);
        if div > DIV_TOL {
            return Err(NoiseError::NotSolenoidal { k, div });
        }
    }
    Ok(q)
}

impl QField {
    /// Smooth coefficients taken as given, without the solenoidal check.
    pub fn from_fields_unchecked(fields: Vec<VectorField>) -> Result<Self, NoiseError> {
        if fields.is_empty() {
            return Err(NoiseError::Empty);
        }
        Ok(QField::Smooth { fields })
    }

    pub fn len(&self) -> usize {
        match self {
            QField::Constant { vectors, .. } => vectors.len(),
            QField::Smooth { fields } => fields.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, QField::Constant { .. })
    }

    /// The constant vector `Q_k`, if this family is constant.
    pub fn vector(&self, k: usize) -> Option<[f64; 3]> {
        match self {
            QField::Constant { vectors, .. } => Some(vectors[k]),
            QField::Smooth { .. } => None,
        }
    }

    /// `Q_k` sampled on `grid`.
    pub fn field(&self, grid: TorusGrid, k: usize) -> VectorField {
        match self {
            QField::Constant { vectors, .. } => VectorField::new(
                (0..grid.dim())
                    .map(|axis| ScalarField::constant(grid, vectors[k][axis]))
                    .collect(),
            ),
            QField::Smooth { fields } => {
                assert_eq!(fields[k].grid(), grid, "noise field lives on another grid");
                fields[k].clone()
            }
        }
    }

    /// `max_k sup_x |Q_k(x)|`.
    pub fn sup_norm(&self) -> f64 {
        match self {
            QField::Constant { vectors, .. } => vectors
                .iter()
                .map(|v| v.iter().map(|c| c * c).sum::<f64>().sqrt())
                .fold(0.0, f64::max),
            QField::Smooth { fields } => fields.iter().map(VectorField::max_abs).fold(0.0, f64::max),
        }
    }

    /// `max_k ‖Q_k‖_{W^{1,∞}}` as `sup|Q_k| + sup|∇Q_k|` (Frobenius).
    pub fn w1_inf_norm(&self) -> f64 {
        match self {
            QField::Constant { .. } => self.sup_norm(),
            QField::Smooth { fields } => fields
                .iter()
                .map(|f| {
                    let grid = f.grid();
                    let grads: Vec<Vec<ScalarField>> = f
                        .iter()
                        .map(|c| (0..grid.dim()).map(|a| derivative(c, a)).collect())
                        .collect();
                    let sup_grad = (0..grid.len())
                        .map(|j| {
                            grads
                                .iter()
                                .flat_map(|row| row.iter().map(move |g| g.values()[j].powi(2)))
                                .sum::<f64>()
                                .sqrt()
                        })
                        .fold(0.0, f64::max);
                    f.max_abs() + sup_grad
                })
                .fold(0.0, f64::max),
        }
    }

    /// `sup_x |div Q_k|` on `grid`.
    pub fn divergence_max(&self, grid: TorusGrid, k: usize) -> f64 {
        match self {
            QField::Constant { .. } => 0.0,
            QField::Smooth { .. } => divergence(&self.field(grid, k)).max_abs(),
        }
    }

    /// Same family with every coefficient multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        match self {
            QField::Constant { dim, vectors } => QField::Constant {
                dim: *dim,
                vectors: vectors.iter().map(|v| v.map(|c| c * s)).collect(),
            },
            QField::Smooth { fields } => QField::Smooth {
                fields: fields.iter().map(|f| f.scale(s)).collect(),
            },
        }
    }
}
