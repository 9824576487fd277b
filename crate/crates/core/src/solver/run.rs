use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::step::step_increment;
use super::{GalerkinState, Scheme, SchemeParams, SolverError};
use crate::diagnostics::{LedgerAccumulator, LedgerRow};
use crate::noise::{DriverPath, QField};
use crate::roughpath::TestedSeries;
use crate::spectral::{project_modes, ScalarField, TorusGrid, VectorField};

/// Test modes `|k|_∞ ≤ 3` used for drift accounting.
pub const TEST_CUTOFF: i64 = 3;

/// `a cos(k·x) + b sin(k·x)` term of the initial density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityMode {
    pub k: Vec<i64>,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

/// `a cos(k·x) + b sin(k·x)` term of one velocity component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VelocityMode {
    pub component: usize,
    pub k: Vec<i64>,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

/// Trigonometric initial data before regularization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialData {
    pub rho_mean: f64,
    #[serde(default)]
    pub rho_modes: Vec<DensityMode>,
    #[serde(default)]
    pub u_modes: Vec<VelocityMode>,
}

impl Default for InitialData {
    fn default() -> Self {
        Self { rho_mean: 1.0, rho_modes: Vec::new(), u_modes: Vec::new() }
    }
}

fn wavevector(k: &[i64], dim: usize) -> Result<[i64; 3], SolverError> {
    if k.len() != dim {
        return Err(SolverError::Params(format!("wavevector {k:?} must have {dim} entries")));
    }
    let mut out = [0i64; 3];
    out[..dim].copy_from_slice(k);
    Ok(out)
}

/// Regularized initial state and the resolved density floor.
///
/// Data are projected onto `|k|_∞ ≤ m`; if the projected density dips below
/// 1% of its mean a constant is added, and the result is rescaled so the
/// total mass equals that of the raw data.
pub fn initial_state(
    grid: TorusGrid,
    params: &SchemeParams,
    init: &InitialData,
) -> Result<(GalerkinState, f64), SolverError> {
    let dim = grid.dim();
    let m = grid.modes();
    if !(init.rho_mean > 0.0) {
        return Err(SolverError::Params("rho_mean must be positive".into()));
    }
    let mut rho = ScalarField::constant(grid, init.rho_mean);
    for mode in &init.rho_modes {
        let k = wavevector(&mode.k, dim)?;
        if grid.flat_of(k).is_none() || grid.is_nyquist(k) {
            return Err(SolverError::Params(format!("density mode {:?} is not resolved", mode.k)));
        }
        rho.add_mode(k, mode.cos, mode.sin);
    }
    let mut u = VectorField::zeros(grid);
    for mode in &init.u_modes {
        let k = wavevector(&mode.k, dim)?;
        if mode.component >= dim {
            return Err(SolverError::Params(format!("velocity component {} out of range", mode.component)));
        }
        if grid.flat_of(k).is_none() || grid.is_nyquist(k) {
            return Err(SolverError::Params(format!("velocity mode {:?} is not resolved", mode.k)));
        }
        u.component_mut(mode.component).add_mode(k, mode.cos, mode.sin);
    }
    let mass = init.rho_mean;
    let mut rho = project_modes(&rho, m);
    let target_min = 0.01 * mass;
    let min = rho.min();
    if min < target_min {
        rho = rho.axpy(target_min - min, &ScalarField::constant(grid, 1.0));
    }
    rho = rho.scale(mass / rho.mean());
    let floor = params.density_floor.unwrap_or(1e-8 * mass);
    let state = GalerkinState::new(0.0, rho, &u);
    if state.rho.min() < floor {
        return Err(SolverError::Params("regularized initial density is below the floor".into()));
    }
    Ok((state, floor))
}

/// Everything a run needs.
#[derive(Debug, Clone)]
pub struct RunSetup {
    pub grid: TorusGrid,
    pub params: SchemeParams,
    pub q: QField,
    pub driver: DriverPath,
    pub initial: InitialData,
    /// Store every `stride`-th state.
    pub stride: usize,
}

/// Decimated states with the aligned ledger and drift records.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub scheme: Scheme,
    pub driver: DriverPath,
    pub dt: f64,
    pub steps_done: usize,
    pub stride: usize,
    pub states: Vec<GalerkinState>,
    pub ledger: Vec<LedgerRow>,
    pub tested: TestedSeries,
    /// Largest CFL number seen and the number of steps above the limit.
    pub max_cfl: f64,
    pub cfl_warnings: usize,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }

    pub fn params(&self) -> &SchemeParams {
        &self.scheme.params
    }

    pub fn grid(&self) -> TorusGrid {
        self.scheme.grid
    }

    pub fn q(&self) -> &QField {
        &self.scheme.q
    }

    /// Driver increment between two stored samples.
    pub fn driver_increment(&self, i: usize, j: usize) -> Vec<f64> {
        let a = self.driver.eval(self.states[i].t);
        let b = self.driver.eval(self.states[j].t);
        b.iter().zip(&a).map(|(x, y)| x - y).collect()
    }
}

/// Failed run: the error plus everything computed up to the failure.
#[derive(Debug)]
pub struct RunFailure {
    pub error: SolverError,
    pub partial: Box<Trajectory>,
}

/// Heun's stability limit on the negative real axis.
pub const CFL_LIMIT: f64 = 2.0;

/// `dt` times the largest explicit rate: viscous `(2μ_s+η)|k|²/ϱ_min` and
/// acoustic–advective `(|u|_∞ + c_max)|k|` at the Galerkin cutoff.
pub fn cfl_number(scheme: &Scheme, state: &GalerkinState) -> f64 {
    let p = &scheme.params;
    let dim = scheme.grid.dim() as f64;
    let kmax = scheme.grid.modes() as f64 * dim.sqrt();
    let rho_min = state.rho.min().max(scheme.floor);
    let rho_max = state.rho.max();
    let viscous = p.flux_coefficient() * kmax * kmax / rho_min;
    let wave = (state.u.max_abs() + p.sound_speed_sq(rho_max).sqrt()) * kmax;
    p.dt * viscous.max(wave)
}

fn test_modes(grid: TorusGrid) -> Vec<[i64; 3]> {
    let c = TEST_CUTOFF.min(grid.modes() as i64);
    let dim = grid.dim();
    let mut modes = Vec::new();
    let range = |d: usize| if d < dim { -c..=c } else { 0..=0 };
    for k0 in range(0) {
        for k1 in range(1) {
            for k2 in range(2) {
                modes.push([k0, k1, k2]);
            }
        }
    }
    modes
}

/// `⟨f, e_k⟩ = (2π)^N f̂(k)` for every test mode.
fn tested(f: &ScalarField, modes: &[[i64; 3]]) -> Vec<Complex64> {
    let vol = f.grid().volume();
    modes.iter().map(|&k| f.coeff(k) * vol).collect()
}

fn tested_state(state: &GalerkinState, modes: &[[i64; 3]]) -> Vec<Vec<Complex64>> {
    std::iter::once(tested(&state.rho, modes))
        .chain(state.momentum.iter().map(|c| tested(c, modes)))
        .collect()
}

/// Runs the scheme over `[0, t_end]`.
pub fn run(setup: &RunSetup) -> Result<Trajectory, RunFailure> {
    let (scheme, initial) = match prepare(setup) {
        Ok(v) => v,
        Err(error) => {
            let scheme = Scheme {
                grid: setup.grid,
                params: setup.params,
                floor: setup.params.density_floor.unwrap_or(0.0),
                q: setup.q.clone(),
            };
            return Err(RunFailure { error, partial: Box::new(empty(setup, scheme)) });
        }
    };
    run_from(setup, scheme, initial)
}

fn prepare(setup: &RunSetup) -> Result<(Scheme, GalerkinState), SolverError> {
    setup.params.validate(setup.grid.dim())?;
    if setup.driver.k() != setup.q.len() {
        return Err(SolverError::Params(format!(
            "driver has {} components but Q has {}",
            setup.driver.k(),
            setup.q.len()
        )));
    }
    if (setup.driver.t_end() - setup.params.t_end).abs() > 1e-12 * setup.params.t_end {
        return Err(SolverError::Params("driver must span [0, t_end]".into()));
    }
    if setup.stride == 0 {
        return Err(SolverError::Params("stride must be at least 1".into()));
    }
    let (initial, floor) = initial_state(setup.grid, &setup.params, &setup.initial)?;
    let scheme = Scheme::new(setup.grid, setup.params, floor, setup.q.clone())?;
    Ok((scheme, initial))
}

fn empty(setup: &RunSetup, scheme: Scheme) -> Trajectory {
    Trajectory {
        scheme,
        driver: setup.driver.clone(),
        dt: setup.params.dt,
        steps_done: 0,
        stride: setup.stride.max(1),
        states: Vec::new(),
        ledger: Vec::new(),
        tested: TestedSeries { dim: setup.grid.dim(), ..TestedSeries::default() },
        max_cfl: 0.0,
        cfl_warnings: 0,
    }
}

/// Runs from an explicit initial state (for example a checkpoint).
pub fn run_from(setup: &RunSetup, scheme: Scheme, initial: GalerkinState) -> Result<Trajectory, RunFailure> {
    let steps = setup.params.steps();
    let t_end = setup.params.t_end;
    let modes = test_modes(scheme.grid);
    let mut traj = empty(setup, scheme.clone());
    traj.tested.modes = modes.clone();
    let t0 = initial.t;
    let first = ((t0 / t_end) * steps as f64).round() as usize;
    let dt = t_end / steps as f64;
    traj.dt = dt;

    let mut ledger = LedgerAccumulator::new(&scheme, &initial);
    let mut drift = vec![vec![Complex64::default(); modes.len()]; 1 + scheme.grid.dim()];
    let mut current = initial;
    let push = |traj: &mut Trajectory, state: &GalerkinState, row: LedgerRow, drift: &Vec<Vec<Complex64>>| {
        traj.tested.times.push(state.t);
        traj.tested.state.push(tested_state(state, &modes));
        traj.tested.drift.push(drift.clone());
        traj.ledger.push(row);
        traj.states.push(state.compact());
    };
    push(&mut traj, &current, ledger.row(), &drift);

    let mut z_prev = setup.driver.eval(current.t);
    for i in first..steps {
        let t_next = crate::noise::uniform_time(t_end, i + 1, steps);
        let z_next = setup.driver.eval(t_next);
        let dz: Vec<f64> = z_next.iter().zip(&z_prev).map(|(b, a)| b - a).collect();
        let cfl = cfl_number(&scheme, &current);
        traj.max_cfl = traj.max_cfl.max(cfl);
        if cfl > CFL_LIMIT {
            traj.cfl_warnings += 1;
        }
        let (mut next, noise) = match step_increment(&scheme, &current, t_next - current.t, &dz) {
            Ok(v) => v,
            Err(error) => return Err(RunFailure { error, partial: Box::new(traj) }),
        };
        next.t = t_next;

        let before = tested_state(&current, &modes);
        let after = tested_state(&next, &modes);
        let noise_tested: Vec<Vec<Complex64>> = std::iter::once(tested(&noise.rho, &modes))
            .chain(noise.momentum.iter().map(|c| tested(c, &modes)))
            .collect();
        for c in 0..drift.len() {
            for mi in 0..modes.len() {
                drift[c][mi] += after[c][mi] - before[c][mi] - noise_tested[c][mi];
            }
        }
        let row = ledger.push(&next, &noise);
        traj.steps_done += 1;
        if (i + 1) % traj.stride == 0 || i + 1 == steps {
            push(&mut traj, &next, row, &drift);
        }
        current = next;
        z_prev = z_next;
    }
    Ok(traj)
}
