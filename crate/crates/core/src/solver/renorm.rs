use super::{truncation, truncation_derivative, GalerkinState, Trajectory};
use crate::noise::QField;
use crate::spectral::{derivative, divergence, ScalarField};

/// Renormalizing function `θ` with derivative `θ′`.
pub trait Renormalization {
    fn theta(&self, z: f64) -> f64;
    fn theta_prime(&self, z: f64) -> f64;
    /// Whether `θ′` has compact support.
    fn compact_derivative(&self) -> bool;
}

/// `θ(z) = z`.
#[derive(Debug, Clone, Copy)]
pub struct Identity;

impl Renormalization for Identity {
    fn theta(&self, z: f64) -> f64 {
        z
    }

    fn theta_prime(&self, _: f64) -> f64 {
        1.0
    }

    fn compact_derivative(&self) -> bool {
        false
    }
}

/// `θ = T_k`.
#[derive(Debug, Clone, Copy)]
pub struct Truncation {
    pub k: f64,
}

impl Renormalization for Truncation {
    fn theta(&self, z: f64) -> f64 {
        truncation(z, self.k).expect("k > 0")
    }

    fn theta_prime(&self, z: f64) -> f64 {
        truncation_derivative(z, self.k).expect("k > 0")
    }

    fn compact_derivative(&self) -> bool {
        true
    }
}

/// Residual series on the intervals between stored samples.
#[derive(Debug, Clone)]
pub struct RenormResidual {
    /// Interval midpoints.
    pub times: Vec<f64>,
    pub residual: Vec<f64>,
    /// Set when `θ′` is not compactly supported.
    pub warning: bool,
}

impl RenormResidual {
    pub fn max_abs(&self) -> f64 {
        self.residual.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

/// `(∫θ(ϱ)ψ, [B_k])` where the drift part is
/// `∫θu·∇ψ + ∫(θ − θ′ϱ)div u ψ` and the noise part per `Q_k` is
/// `∫θQ_k·∇ψ − ∫(θ′ϱ − θ)div Q_k ψ`.
fn pairings(state: &GalerkinState, q: &QField, theta: &dyn Renormalization, psi: &ScalarField) -> (f64, f64, Vec<f64>) {
    let grid = state.grid();
    let dim = grid.dim();
    let w = grid.padded().cell_volume();
    let rho = state.rho.padded_values();
    let th: Vec<f64> = rho.iter().map(|&z| theta.theta(z)).collect();
    let defect: Vec<f64> = rho.iter().map(|&z| theta.theta(z) - theta.theta_prime(z) * z).collect();
    let psi_v = psi.padded_values();
    let grad_psi: Vec<Vec<f64>> = (0..dim).map(|i| derivative(psi, i).padded_values()).collect();
    let u: Vec<Vec<f64>> = state.u.iter().map(|c| c.padded_values()).collect();
    let div_u = divergence(&state.u).padded_values();

    let mut a = 0.0;
    let mut drift = 0.0;
    for j in 0..rho.len() {
        a += th[j] * psi_v[j];
        let adv: f64 = (0..dim).map(|i| u[i][j] * grad_psi[i][j]).sum();
        drift += th[j] * adv + defect[j] * div_u[j] * psi_v[j];
    }
    let noise = (0..q.len())
        .map(|k| {
            let field = q.field(grid, k);
            let qv: Vec<Vec<f64>> = field.iter().map(|c| c.padded_values()).collect();
            let div_q = divergence(&field).padded_values();
            (0..rho.len())
                .map(|j| {
                    let adv: f64 = (0..dim).map(|i| qv[i][j] * grad_psi[i][j]).sum();
                    th[j] * adv + defect[j] * div_q[j] * psi_v[j]
                })
                .sum::<f64>()
                * w
        })
        .collect();
    (a * w, drift * w, noise)
}

/// Discrete residual of the renormalized continuity equation tested with
/// `ψ`, without the `ε` terms:
/// `(A_{i+1} − A_i)/Δt − ½(B_i + B_{i+1})` with `A = ∫θ(ϱ)ψ` and `B` the
/// drift plus the driver-slope-weighted noise pairing.
pub fn renorm_residual(traj: &Trajectory, theta: &dyn Renormalization, psi: &ScalarField) -> RenormResidual {
    let q = traj.q();
    let pairs: Vec<(f64, f64, Vec<f64>)> = traj.states.iter().map(|s| pairings(s, q, theta, psi)).collect();
    let mut times = Vec::new();
    let mut residual = Vec::new();
    for i in 0..pairs.len().saturating_sub(1) {
        let (t0, t1) = (traj.states[i].t, traj.states[i + 1].t);
        let dt = t1 - t0;
        let dz = traj.driver_increment(i, i + 1);
        let b = |p: &(f64, f64, Vec<f64>)| -> f64 {
            p.1 - p.2.iter().zip(&dz).map(|(n, d)| n * d / dt).sum::<f64>()
        };
        let r = (pairs[i + 1].0 - pairs[i].0) / dt - 0.5 * (b(&pairs[i]) + b(&pairs[i + 1]));
        times.push(0.5 * (t0 + t1));
        residual.push(r);
    }
    RenormResidual { times, residual, warning: !theta.compact_derivative() }
}
