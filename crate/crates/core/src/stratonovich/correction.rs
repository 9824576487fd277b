use serde::Serialize;

use super::{ensemble_stats, ito_integral, stratonovich_integral, EnsembleStats, StratError};
use crate::noise::{DriverPath, QField};
use crate::solver::{transport_divergence, Trajectory};
use crate::spectral::{derivative, inner, norm_sq, product, ScalarField};

/// `½ Σ_k div(Q_k ⊗ Q_k ∇ϱ) = ½ Σ_k (Q_k·∇)²ϱ` for constant `Q`, applied
/// through the multiplier `−½ Σ_k (Q_k·k)²`.
pub fn correction_operator(rho: &ScalarField, q: &QField) -> Result<ScalarField, StratError> {
    if !q.is_constant() {
        return Err(StratError::NonConstantQ);
    }
    let grid = rho.grid();
    let vectors: Vec<[f64; 3]> = (0..q.len()).map(|k| q.vector(k).expect("constant")).collect();
    Ok(rho.map_coeffs(|k, c| {
        if grid.is_nyquist(k) || norm_sq(k) == 0.0 {
            return c * 0.0;
        }
        let s: f64 = vectors
            .iter()
            .map(|v| {
                let d: f64 = (0..grid.dim()).map(|a| v[a] * k[a] as f64).sum();
                d * d
            })
            .sum();
        c * (-0.5 * s)
    }))
}

/// Per-path terms of the conversion identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrectionTerms {
    /// `Σ_k ∫ f_k ∘ dW_k` with `f_k = ∫ϱ Q_k·∇ψ`.
    pub stratonovich: f64,
    /// `Σ_k ∫ f_k dW_k`.
    pub ito: f64,
    /// `½ Σ_k Σ_i ⟨Σ_ℓ div(ϱ_i Q_ℓ)ΔW_ℓ, Q_k·∇ψ⟩ ΔW_k`.
    pub cross: f64,
    /// `½ Σ_k ∫⟨div(ϱQ_k), Q_k·∇ψ⟩ dt`, the expected cross-variation.
    pub cross_analytic: f64,
    /// `stratonovich − ito − cross`.
    pub defect: f64,
}

fn q_dot_grad(psi: &ScalarField, q: &QField, k: usize) -> ScalarField {
    let grid = psi.grid();
    let mut acc = ScalarField::zeros(grid);
    match q.vector(k) {
        Some(v) => {
            for a in 0..grid.dim() {
                acc = acc.axpy(v[a], &derivative(psi, a));
            }
        }
        None => {
            let field = q.field(grid, k);
            for a in 0..grid.dim() {
                acc = acc.axpy(1.0, &product(field.component(a), &derivative(psi, a)));
            }
        }
    }
    acc
}

/// Conversion-identity terms of one stored-every-step trajectory.
pub fn correction_terms(traj: &Trajectory, psi: &ScalarField) -> Result<CorrectionTerms, StratError> {
    if traj.stride != 1 {
        return Err(StratError::Stride);
    }
    let q = traj.q();
    let kk = q.len();
    let times = traj.times();
    let g: Vec<ScalarField> = (0..kk).map(|k| q_dot_grad(psi, q, k)).collect();
    let values: Vec<Vec<f64>> = times.iter().map(|t| traj.driver.eval(*t)).collect();
    let path = DriverPath::new(times.clone(), values).map_err(|_| StratError::Stride)?;

    let mut s = 0.0;
    let mut i_sum = 0.0;
    for k in 0..kk {
        let f: Vec<f64> = traj.states.iter().map(|st| inner(&st.rho, &g[k])).collect();
        s += stratonovich_integral(&f, &path, k)?.value;
        i_sum += ito_integral(&f, &path, k)?.value;
    }

    let mut cross = 0.0;
    let mut analytic = Vec::with_capacity(traj.states.len());
    for (n, st) in traj.states.iter().enumerate() {
        let divs: Vec<ScalarField> = (0..kk).map(|l| transport_divergence(&st.rho, q, l)).collect();
        let pair: Vec<Vec<f64>> = divs.iter().map(|d| g.iter().map(|gk| inner(d, gk)).collect()).collect();
        analytic.push(0.5 * (0..kk).map(|k| pair[k][k]).sum::<f64>());
        if n + 1 < traj.states.len() {
            let dw = path.increment(n, n + 1);
            for k in 0..kk {
                let update: f64 = (0..kk).map(|l| pair[l][k] * dw[l]).sum();
                cross += 0.5 * update * dw[k];
            }
        }
    }
    let cross_analytic = times
        .windows(2)
        .zip(analytic.windows(2))
        .map(|(t, a)| 0.5 * (t[1] - t[0]) * (a[0] + a[1]))
        .sum();
    Ok(CorrectionTerms { stratonovich: s, ito: i_sum, cross, cross_analytic, defect: s - i_sum - cross })
}

/// Ensemble statistics of `S − I − C` over trajectories sharing `ψ`.
pub fn correction_identity_check(
    ensemble: &[Trajectory],
    psi: &ScalarField,
) -> Result<(EnsembleStats, Vec<CorrectionTerms>), StratError> {
    if ensemble.len() < 2 {
        return Err(StratError::EnsembleSize(ensemble.len()));
    }
    let terms = ensemble.iter().map(|t| correction_terms(t, psi)).collect::<Result<Vec<_>, _>>()?;
    let defects: Vec<f64> = terms.iter().map(|t| t.defect).collect();
    Ok((ensemble_stats(&defects, ensemble[0].dt), terms))
}

/// Energy supplied by the noise terms, sampled like the trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseEnergy {
    pub times: Vec<f64>,
    pub cumulative: Vec<f64>,
    /// Increments between consecutive samples.
    pub increments: Vec<f64>,
    /// Every `Q_k` is divergence free to `1e-12`.
    pub solenoidal: bool,
}

pub fn noise_energy_contribution(traj: &Trajectory) -> NoiseEnergy {
    let cumulative: Vec<f64> = traj.ledger.iter().map(|r| r.noise_cum).collect();
    let increments = cumulative.windows(2).map(|w| w[1] - w[0]).collect();
    let grid = traj.grid();
    let solenoidal = (0..traj.q().len()).all(|k| traj.q().divergence_max(grid, k) <= 1e-12);
    NoiseEnergy { times: traj.times(), cumulative, increments, solenoidal }
}
