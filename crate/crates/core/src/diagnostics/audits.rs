use super::DiagnosticsError;
use crate::noise::QField;
use crate::solver::{truncation, GalerkinState, SchemeParams, Trajectory};
use crate::spectral::{divergence, product, riesz_double};

/// `(∫ϱ, ∫P_m(ϱu))` from spectral means.
pub fn mass_momentum(state: &GalerkinState) -> (f64, Vec<f64>) {
    let vol = state.grid().volume();
    (vol * state.rho.mean(), state.momentum.iter().map(|c| vol * c.mean()).collect())
}

/// Trapezoidal weights of the stored sample times.
fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    times.windows(2).zip(values.windows(2)).map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1])).sum()
}

/// `∫∫ p_δ(ϱ)ϱ^Θ` with the admissibility flag `0 < Θ < 2γ/N − 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureWeight {
    pub value: f64,
    /// Set when `Θ` lies outside the admissible range.
    pub warning: bool,
}

pub fn pressure_weight(traj: &Trajectory, theta_exp: f64) -> PressureWeight {
    let params = traj.params();
    let dim = traj.grid().dim() as f64;
    let warning = !(theta_exp > 0.0 && theta_exp < 2.0 * params.gamma / dim - 1.0);
    let samples: Vec<f64> = traj
        .states
        .iter()
        .map(|s| s.rho.integrate_padded(|z| params.p(z) * z.max(0.0).powf(theta_exp)))
        .collect();
    PressureWeight { value: trapezoid(&traj.times(), &samples), warning }
}

/// Samples of `∫(p_δ(ϱ) − (η + 2μ_s)div u)T_k(ϱ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxPairSeries {
    pub k: f64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

fn flux_pair_state(state: &GalerkinState, params: &SchemeParams, k: f64) -> f64 {
    let rho = state.rho.padded_values();
    let div = divergence(&state.u).padded_values();
    let c = params.flux_coefficient();
    let w = state.grid().volume() / rho.len() as f64;
    rho.iter()
        .zip(&div)
        .map(|(&z, &d)| (params.p(z) - c * d) * truncation(z.max(0.0), k).expect("k > 0"))
        .sum::<f64>()
        * w
}

pub fn flux_pair(traj: &Trajectory, k: f64) -> Result<FluxPairSeries, DiagnosticsError> {
    if !(k > 0.0) {
        return Err(crate::solver::SolverError::Params("k must be positive".into()).into());
    }
    let params = traj.params();
    Ok(FluxPairSeries {
        k,
        times: traj.times(),
        values: traj.states.iter().map(|s| flux_pair_state(s, params, k)).collect(),
    })
}

/// `Σ_k Σ_{i,j} ∫ u_i (ϱ R_ij[ϱQ_{j,k}] − ϱQ_{j,k} R_ij[ϱ])` with
/// `R_ij = ∂_i∂_jΔ⁻¹`.
pub fn commutator_j5(state: &GalerkinState, q: &QField) -> f64 {
    let grid = state.grid();
    let dim = grid.dim();
    let rho = &state.rho;
    let mut total = 0.0;
    for k in 0..q.len() {
        let field = q.field(grid, k);
        for j in 0..dim {
            let rq = product(rho, field.component(j));
            for i in 0..dim {
                let (a, _) = riesz_double(&rq, i, j);
                let (b, _) = riesz_double(rho, i, j);
                let integrand = &product(rho, &a) - &product(&rq, &b);
                total += crate::spectral::inner(state.u.component(i), &integrand);
            }
        }
    }
    total
}

/// `∫p_δ(ϱ)div Q_k` for each noise component.
pub fn pressure_div_q(state: &GalerkinState, params: &SchemeParams, q: &QField) -> Vec<f64> {
    let grid = state.grid();
    let p: Vec<f64> = state.rho.padded_values().into_iter().map(|z| params.p(z)).collect();
    let w = grid.volume() / p.len() as f64;
    (0..q.len())
        .map(|k| {
            let div = divergence(&q.field(grid, k)).padded_values();
            p.iter().zip(&div).map(|(a, b)| a * b).sum::<f64>() * w
        })
        .collect()
}

/// `∫ϱ ln ϱ` series with the balance residual
/// `∫_0^t∫ϱ div u + ∫ϱ ln ϱ(t) − ∫ϱ₀ ln ϱ₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoLogRho {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub residual: Vec<f64>,
    /// `∫ϱ ln ϱ ≥ M ln(M/|𝕋^N|)` at every sample.
    pub jensen: bool,
}

pub fn rho_log_rho(traj: &Trajectory) -> Result<RhoLogRho, DiagnosticsError> {
    let mut values = Vec::with_capacity(traj.states.len());
    let mut sources = Vec::with_capacity(traj.states.len());
    let mut jensen = true;
    for s in &traj.states {
        let min = s.rho.padded_values().into_iter().fold(f64::INFINITY, f64::min);
        if !(min > 0.0) {
            return Err(DiagnosticsError::Density { t: s.t, min });
        }
        let v = s.rho.integrate_padded(|z| z * z.ln());
        let (mass, _) = mass_momentum(s);
        let vol = s.grid().volume();
        jensen &= v >= mass * (mass / vol).ln() - 1e-12 * mass.abs().max(1.0);
        values.push(v);
        sources.push(crate::spectral::inner(&s.rho, &divergence(&s.u)));
    }
    let times = traj.times();
    let mut residual = Vec::with_capacity(values.len());
    let mut cum = 0.0;
    for i in 0..values.len() {
        if i > 0 {
            cum += 0.5 * (times[i] - times[i - 1]) * (sources[i] + sources[i - 1]);
        }
        residual.push(cum + values[i] - values[0]);
    }
    Ok(RhoLogRho { times, values, residual, jensen })
}

