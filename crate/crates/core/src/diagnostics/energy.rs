use std::path::Path;

use rustfft::num_complex::Complex64;

use super::DiagnosticsError;
use crate::io::{check_columns, read_table, write_table};
use crate::solver::{step_increment, GalerkinState, Scheme, SchemeParams, StepNoise, Trajectory};
use crate::spectral::{derivative, divergence, norm_sq, vector_inner, ScalarField, VectorField};

pub const LEDGER_COLUMNS: [&str; 8] =
    ["t", "kinetic", "potential", "dissipation_cum", "eps_term_cum", "eps_cross_cum", "noise_cum", "residual"];

/// `(½∫ϱ|u|², ∫P_δ(ϱ))` by quadrature on the padded grid.
pub fn energy(state: &GalerkinState, params: &SchemeParams) -> (f64, f64) {
    let grid = state.grid();
    let rho = state.rho.padded_values();
    let u: Vec<Vec<f64>> = state.u.iter().map(|c| c.padded_values()).collect();
    let w = grid.volume() / rho.len() as f64;
    let kinetic: f64 = (0..rho.len())
        .map(|j| 0.5 * rho[j] * u.iter().map(|c| c[j] * c[j]).sum::<f64>())
        .sum::<f64>()
        * w;
    let potential: f64 = rho.iter().map(|&z| params.potential(z)).sum::<f64>() * w;
    (kinetic, potential)
}

/// Instantaneous dissipation rates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Powers {
    /// `∫S(∇u):∇u = 2μ_s∫|D(u)|² + η∫(div u)²`.
    pub dissipation: f64,
    /// `ε∫P″_δ(ϱ)|∇ϱ|²`.
    pub eps_term: f64,
    /// `ε∫ϱ|∇u|²`.
    pub eps_cross: f64,
}

pub fn powers(state: &GalerkinState, params: &SchemeParams) -> Powers {
    let u = &state.u;
    let dim = u.dim();
    let grads: Vec<Vec<ScalarField>> =
        (0..dim).map(|i| (0..dim).map(|j| derivative(u.component(i), j)).collect()).collect();
    let mut sym = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let d = (&grads[i][j] + &grads[j][i]).scale(0.5);
            sym += crate::spectral::inner(&d, &d);
        }
    }
    let div = divergence(u);
    let dissipation = 2.0 * params.mu_s() * sym + params.eta * crate::spectral::inner(&div, &div);
    if params.epsilon == 0.0 {
        return Powers { dissipation, ..Powers::default() };
    }
    let rho = state.rho.padded_values();
    let w = state.grid().volume() / rho.len() as f64;
    let grad_rho: Vec<Vec<f64>> = (0..dim).map(|i| derivative(&state.rho, i).padded_values()).collect();
    let grad_u: Vec<Vec<f64>> = grads.iter().flatten().map(|g| g.padded_values()).collect();
    let mut eps_term = 0.0;
    let mut eps_cross = 0.0;
    for j in 0..rho.len() {
        let g2: f64 = grad_rho.iter().map(|g| g[j] * g[j]).sum();
        eps_term += params.potential_second(rho[j]) * g2;
        eps_cross += rho[j] * grad_u.iter().map(|g| g[j] * g[j]).sum::<f64>();
    }
    Powers {
        dissipation,
        eps_term: params.epsilon * eps_term * w,
        eps_cross: params.epsilon * eps_cross * w,
    }
}

/// One ledger line.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LedgerRow {
    pub t: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub dissipation_cum: f64,
    pub eps_term_cum: f64,
    pub eps_cross_cum: f64,
    /// Energy supplied by the noise parts of the updates.
    pub noise_cum: f64,
    /// `E(t) − E(0) + dissipation_cum + eps_term_cum + eps_cross_cum − noise_cum`.
    pub residual: f64,
}

impl LedgerRow {
    pub fn energy(&self) -> f64 {
        self.kinetic + self.potential
    }

    fn values(&self) -> [f64; 8] {
        [
            self.t,
            self.kinetic,
            self.potential,
            self.dissipation_cum,
            self.eps_term_cum,
            self.eps_cross_cum,
            self.noise_cum,
            self.residual,
        ]
    }
}

/// Step-by-step energy bookkeeping.
///
/// A step changes the energy by exactly `⟨ū, Δq⟩ + ∫w Δϱ` with
/// `ū = ½(uⁿ + uⁿ⁺¹)`, `w = g − ½uⁿ·uⁿ⁺¹` and `g` the divided difference of
/// `P_δ` between `ϱⁿ` and `ϱⁿ⁺¹`. The noise share of `Δq` and `Δϱ` is
/// charged to `noise_cum`; rates are integrated by the trapezoidal rule.
#[derive(Debug, Clone)]
pub struct LedgerAccumulator {
    params: SchemeParams,
    e0: f64,
    prev: GalerkinState,
    prev_powers: Powers,
    row: LedgerRow,
}

fn divided_difference(params: &SchemeParams, a: f64, b: f64) -> f64 {
    let d = b - a;
    if d.abs() > 1e-9 * a.abs().max(b.abs()).max(1e-300) {
        (params.potential(b) - params.potential(a)) / d
    } else {
        params.potential_prime(0.5 * (a + b))
    }
}

impl LedgerAccumulator {
    pub fn new(scheme: &Scheme, initial: &GalerkinState) -> Self {
        let params = scheme.params;
        let (kinetic, potential) = energy(initial, &params);
        let row = LedgerRow { t: initial.t, kinetic, potential, ..LedgerRow::default() };
        Self {
            params,
            e0: kinetic + potential,
            prev: initial.compact(),
            prev_powers: powers(initial, &params),
            row,
        }
    }

    pub fn row(&self) -> LedgerRow {
        self.row
    }

    /// Records the step `prev → next` whose noise increments are `noise`.
    pub fn push(&mut self, next: &GalerkinState, noise: &StepNoise) -> LedgerRow {
        let params = self.params;
        let dt = next.t - self.prev.t;
        let p1 = powers(next, &params);
        let p0 = self.prev_powers;
        let row = &mut self.row;
        row.t = next.t;
        row.dissipation_cum += 0.5 * dt * (p0.dissipation + p1.dissipation);
        row.eps_term_cum += 0.5 * dt * (p0.eps_term + p1.eps_term);
        row.eps_cross_cum += 0.5 * dt * (p0.eps_cross + p1.eps_cross);
        row.noise_cum += noise_energy(&params, &self.prev, next, noise, dt);
        let (kinetic, potential) = energy(next, &params);
        row.kinetic = kinetic;
        row.potential = potential;
        row.residual = kinetic + potential - self.e0 + row.dissipation_cum + row.eps_term_cum + row.eps_cross_cum
            - row.noise_cum;
        self.prev = next.compact();
        self.prev_powers = p1;
        *row
    }
}

fn noise_energy(params: &SchemeParams, prev: &GalerkinState, next: &GalerkinState, noise: &StepNoise, dt: f64) -> f64 {
    let grid = prev.grid();
    let u_bar = VectorField::new(
        prev.u.iter().zip(next.u.iter()).map(|(a, b)| (a + b).scale(0.5)).collect(),
    );
    let momentum_part = vector_inner(&u_bar, &noise.momentum);

    let half = 0.5 * dt * params.epsilon;
    let noise_rho = if half == 0.0 {
        noise.rho.clone()
    } else {
        noise.rho.map_coeffs(|k, c: Complex64| {
            if grid.is_nyquist(k) {
                c
            } else {
                c / (1.0 + half * norm_sq(k))
            }
        })
    };
    let a = prev.rho.padded_values();
    let b = next.rho.padded_values();
    let ua: Vec<Vec<f64>> = prev.u.iter().map(|c| c.padded_values()).collect();
    let ub: Vec<Vec<f64>> = next.u.iter().map(|c| c.padded_values()).collect();
    let nr = noise_rho.padded_values();
    let w = grid.volume() / a.len() as f64;
    let density_part: f64 = (0..a.len())
        .map(|j| {
            let dot: f64 = ua.iter().zip(&ub).map(|(x, y)| x[j] * y[j]).sum();
            (divided_difference(params, a[j], b[j]) - 0.5 * dot) * nr[j]
        })
        .sum::<f64>()
        * w;
    momentum_part + density_part
}

/// Rebuilds the ledger from the stored samples by replaying every stored
/// interval with the trajectory's own scheme and driver.
pub fn energy_audit(traj: &Trajectory) -> Result<Vec<LedgerRow>, DiagnosticsError> {
    let Some(first) = traj.states.first() else {
        return Ok(Vec::new());
    };
    let scheme = &traj.scheme;
    let steps = scheme.params.steps();
    let t_end = scheme.params.t_end;
    let index = |t: f64| (t / t_end * steps as f64).round() as usize;
    let mut acc = LedgerAccumulator::new(scheme, first);
    let mut rows = vec![acc.row()];
    for pair in traj.states.windows(2) {
        let (i0, i1) = (index(pair[0].t), index(pair[1].t));
        let mut state = pair[0].clone();
        for i in i0..i1 {
            let t_next = crate::noise::uniform_time(t_end, i + 1, steps);
            let z0 = traj.driver.eval(state.t);
            let z1 = traj.driver.eval(t_next);
            let dz: Vec<f64> = z1.iter().zip(&z0).map(|(b, a)| b - a).collect();
            let (mut next, noise) = step_increment(scheme, &state, t_next - state.t, &dz)?;
            next.t = t_next;
            acc.push(&next, &noise);
            state = next;
        }
        rows.push(acc.row());
    }
    Ok(rows)
}

fn ledger_columns() -> Vec<String> {
    LEDGER_COLUMNS.iter().map(|s| s.to_string()).collect()
}

pub fn write_ledger(path: &Path, rows: &[LedgerRow]) -> Result<(), DiagnosticsError> {
    write_table(path, "ledger", &ledger_columns(), rows.iter().map(|r| r.values().to_vec()))?;
    Ok(())
}

pub fn read_ledger(path: &Path) -> Result<Vec<LedgerRow>, DiagnosticsError> {
    let (columns, rows) = read_table(path, "ledger")?;
    check_columns(&columns, &ledger_columns())?;
    Ok(rows
        .into_iter()
        .map(|r| LedgerRow {
            t: r[0],
            kinetic: r[1],
            potential: r[2],
            dissipation_cum: r[3],
            eps_term_cum: r[4],
            eps_cross_cum: r[5],
            noise_cum: r[6],
            residual: r[7],
        })
        .collect())
}
