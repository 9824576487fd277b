use rustfft::num_complex::Complex64;

use super::rhs::{stage_terms, StageTerms};
use super::{recover_velocity, GalerkinState, Scheme, SolverError};
use crate::noise::DriverPath;
use crate::spectral::{norm_sq, ScalarField, VectorField};

/// Noise increments of one step, `½ Σ_k ΔZ_k (N_k(X^n) + N_k(X^*))`, before
/// the implicit diffusion factor.
#[derive(Debug, Clone)]
pub struct StepNoise {
    pub rho: ScalarField,
    pub momentum: VectorField,
}

/// `(1 + c|k|²)^{-1} f` with the Nyquist slot left untouched, matching the
/// Laplacian's convention.
fn implicit_diffusion(f: &ScalarField, c: f64) -> ScalarField {
    if c == 0.0 {
        return f.clone();
    }
    let grid = f.grid();
    f.map_coeffs(|k, z| if grid.is_nyquist(k) { z } else { z / (1.0 + c * norm_sq(k)) })
}

fn combine(terms: &StageTerms, slope: &[f64]) -> (ScalarField, VectorField) {
    let mut rho = terms.drift_rho.clone();
    let mut mom = terms.drift_momentum.clone();
    for (k, s) in slope.iter().enumerate() {
        if *s != 0.0 {
            rho = rho.axpy(*s, &terms.noise_rho[k]);
            mom = mom.axpy(*s, &terms.noise_momentum[k]);
        }
    }
    (rho, mom)
}

fn check(scheme: &Scheme, t: f64, rho: &ScalarField, momentum: &VectorField) -> Result<(), SolverError> {
    if !rho.is_finite() || !momentum.is_finite() {
        return Err(SolverError::BlowUp { t, min_rho: f64::NAN, reason: "non-finite values".into() });
    }
    let min = rho.min();
    if min < scheme.floor {
        return Err(SolverError::BlowUp { t, min_rho: min, reason: "density below floor".into() });
    }
    Ok(())
}

fn blow_up_on_solve(t: f64, rho: &ScalarField, err: SolverError) -> SolverError {
    match err {
        SolverError::MassSolve { iterations } => SolverError::BlowUp {
            t,
            min_rho: rho.min(),
            reason: format!("mass solve failed after {iterations} iterations"),
        },
        other => other,
    }
}

/// One step of size `dt` with driver increment `dz = Z(t+dt) − Z(t)`.
///
/// Momentum: Heun. Density: Crank–Nicolson on `εΔϱ` with the explicit part
/// averaged over the Heun stages; the predictor treats `εΔϱ` backward-Euler.
/// The driver enters through its constant slope `dz/dt` on the step.
pub fn step_increment(
    scheme: &Scheme,
    state: &GalerkinState,
    dt: f64,
    dz: &[f64],
) -> Result<(GalerkinState, StepNoise), SolverError> {
    let eps = scheme.params.epsilon;
    let slope: Vec<f64> = dz.iter().map(|d| d / dt).collect();
    let t_next = state.t + dt;

    let s0 = stage_terms(scheme, &state.rho, &state.u)?;
    let (e0, f0) = combine(&s0, &slope);
    let rho_star = implicit_diffusion(&state.rho.axpy(dt, &e0), eps * dt);
    let mom_star = state.momentum.axpy(dt, &f0);
    check(scheme, t_next, &rho_star, &mom_star)?;
    let u_star = recover_velocity(&rho_star, &mom_star, Some(&state.u))
        .map_err(|e| blow_up_on_solve(t_next, &rho_star, e))?;

    let s1 = stage_terms(scheme, &rho_star, &u_star)?;
    let (e1, f1) = combine(&s1, &slope);
    let half = 0.5 * dt * eps;
    let grid = scheme.grid;
    let rho_n = state.rho.coeffs();
    let (c0, c1) = (e0.coeffs(), e1.coeffs());
    let tables = grid.tables();
    let rho_coeffs: Vec<Complex64> = (0..grid.len())
        .map(|flat| {
            let k = tables.wavevectors[flat];
            let a = if tables.padded[flat].is_none() { 0.0 } else { half * norm_sq(k) };
            ((1.0 - a) * rho_n[flat] + 0.5 * dt * (c0[flat] + c1[flat])) / (1.0 + a)
        })
        .collect();
    let rho_next = ScalarField::from_coeffs(grid, rho_coeffs);
    let mom_next = state.momentum.axpy(0.5 * dt, &f0).axpy(0.5 * dt, &f1);
    check(scheme, t_next, &rho_next, &mom_next)?;
    let u_next = recover_velocity(&rho_next, &mom_next, Some(&u_star))
        .map_err(|e| blow_up_on_solve(t_next, &rho_next, e))?;

    let mut noise_rho = ScalarField::zeros(grid);
    let mut noise_mom = VectorField::zeros(grid);
    for (k, d) in dz.iter().enumerate() {
        if *d != 0.0 {
            noise_rho = noise_rho.axpy(0.5 * d, &s0.noise_rho[k]).axpy(0.5 * d, &s1.noise_rho[k]);
            noise_mom = noise_mom
                .axpy(0.5 * d, &s0.noise_momentum[k])
                .axpy(0.5 * d, &s1.noise_momentum[k]);
        }
    }
    let next = GalerkinState { t: t_next, rho: rho_next, u: u_next, momentum: mom_next };
    Ok((next, StepNoise { rho: noise_rho, momentum: noise_mom }))
}

/// One step from `state.t` to `state.t + dt` driven by `driver`.
pub fn step(scheme: &Scheme, state: &GalerkinState, driver: &DriverPath) -> Result<GalerkinState, SolverError> {
    let dt = scheme.params.dt;
    if state.t + dt > driver.t_end() * (1.0 + 1e-12) + 1e-15 {
        return Err(SolverError::Params("step would leave the driver's time interval".into()));
    }
    let z0 = driver.eval(state.t);
    let z1 = driver.eval(state.t + dt);
    let dz: Vec<f64> = z1.iter().zip(&z0).map(|(b, a)| b - a).collect();
    step_increment(scheme, state, dt, &dz).map(|(s, _)| s)
}
