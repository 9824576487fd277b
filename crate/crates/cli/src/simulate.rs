//! `simulate` and `audit`.

use cnstn::diagnostics::{
    commutator_j5, energy_audit, flux_pair, mass_momentum, pressure_div_q, pressure_weight, rho_log_rho, write_ledger,
    LedgerRow,
};
use cnstn::io::write_table;
use cnstn::solver::{
    renorm_residual, run, write_checkpoint, RunFailure, SolverError, Trajectory, Truncation,
};
use serde_json::{json, Value};

use crate::{CliError, Context, Outcome, Status};

/// Result of one solver run: the trajectory or a blow-up outcome.
pub(crate) enum Solved {
    Done(Trajectory),
    BlownUp(Outcome),
}

/// Maps a failed run to a blow-up outcome, or to a config error.
pub(crate) fn failure(fail: RunFailure) -> Result<(Value, Trajectory), CliError> {
    let partial = *fail.partial;
    let report = match fail.error {
        SolverError::BlowUp { t, min_rho, reason } => {
            json!({ "blow_up": { "t": t, "min_rho": min_rho, "reason": reason } })
        }
        SolverError::MassSolve { iterations } => {
            let t = partial.states.last().map_or(0.0, |s| s.t);
            json!({ "blow_up": { "t": t, "min_rho": null, "reason": format!("mass solve failed after {iterations} iterations") } })
        }
        other => return Err(CliError::Config(other.to_string())),
    };
    Ok((report, partial))
}

pub(crate) fn solve(ctx: &Context) -> Result<Solved, CliError> {
    let config = &ctx.config;
    let grid = config.grid()?;
    let k = config.q_field(grid)?.len();
    let setup = config.setup(config.stride(), config.driver(k, 0))?;
    match run(&setup) {
        Ok(traj) => Ok(Solved::Done(traj)),
        Err(fail) => {
            let (mut report, partial) = failure(fail)?;
            write_trajectory(ctx, &partial)?;
            report["steps_done"] = json!(partial.steps_done);
            Ok(Solved::BlownUp(Outcome { status: Status::BlowUp, report }))
        }
    }
}

const TRAJECTORY_KIND: &str = "trajectory";

fn write_trajectory(ctx: &Context, traj: &Trajectory) -> Result<(), CliError> {
    let dim = traj.grid().dim();
    let mut columns: Vec<String> = vec!["t".into(), "mass".into()];
    columns.extend((0..dim).map(|d| format!("momentum_{d}")));
    columns.extend(["rho_min", "rho_max", "u_max"].map(String::from));
    let rows = traj.states.iter().map(|s| {
        let (mass, momentum) = mass_momentum(s);
        let mut row = vec![s.t, mass];
        row.extend(momentum);
        row.extend([s.rho.min(), s.rho.max(), s.u.max_abs()]);
        row
    });
    write_table(&ctx.path("trajectory.csv"), TRAJECTORY_KIND, &columns, rows).map_err(io_err)?;
    write_ledger(&ctx.path("ledger.csv"), &traj.ledger).map_err(io_err)?;
    Ok(())
}

fn io_err(e: impl std::fmt::Display) -> CliError {
    CliError::Io(std::io::Error::other(e.to_string()))
}

/// Ledger, mass and signed-term checks shared by both commands.
fn basic_checks(ctx: &Context, traj: &Trajectory, failures: &mut Vec<String>) -> Value {
    let tol = &ctx.config.experiment.tolerances;
    let e0 = traj.ledger[0].energy();
    let scale = e0.abs().max(f64::MIN_POSITIVE);
    let max_residual = traj.ledger.iter().map(|r| r.residual.abs()).fold(0.0, f64::max) / scale;
    if !(max_residual <= tol.ledger_residual) {
        failures.push(format!("ledger residual {max_residual:e} exceeds {:e}", tol.ledger_residual));
    }
    let m0 = mass_momentum(&traj.states[0]).0;
    let mass_drift = traj
        .states
        .iter()
        .map(|s| ((mass_momentum(s).0 - m0) / m0).abs())
        .fold(0.0, f64::max);
    if !(mass_drift <= tol.mass) {
        failures.push(format!("mass drift {mass_drift:e} exceeds {:e}", tol.mass));
    }
    let signed_ok = signed_terms_nondecreasing(&traj.ledger);
    if !signed_ok {
        failures.push("a signed-definite ledger term decreased".into());
    }
    let last = traj.ledger.last().expect("ledger has the initial row");
    json!({
        "steps": traj.steps_done,
        "stored_states": traj.states.len(),
        "energy_initial": e0,
        "energy_final": last.energy(),
        "noise_cum": last.noise_cum,
        "max_relative_residual": max_residual,
        "mass_drift": mass_drift,
        "signed_terms_nonnegative": signed_ok,
        "max_cfl": traj.max_cfl,
        "cfl_warnings": traj.cfl_warnings,
    })
}

/// Cumulative dissipation and ε terms integrate nonnegative powers.
pub fn signed_terms_nondecreasing(rows: &[LedgerRow]) -> bool {
    rows.windows(2).all(|w| {
        let slack = 1e-14 * (1.0 + w[1].energy().abs());
        w[1].dissipation_cum - w[0].dissipation_cum >= -slack
            && w[1].eps_term_cum - w[0].eps_term_cum >= -slack
            && w[1].eps_cross_cum - w[0].eps_cross_cum >= -slack
    })
}

pub(crate) fn simulate(ctx: &Context) -> Result<Outcome, CliError> {
    let traj = match solve(ctx)? {
        Solved::Done(traj) => traj,
        Solved::BlownUp(outcome) => return Ok(outcome),
    };
    write_trajectory(ctx, &traj)?;
    let last = traj.states.last().expect("trajectory has a final state");
    write_checkpoint(&ctx.path("final.json"), last, traj.params(), traj.scheme.floor, Some(ctx.config.noise.seed))
        .map_err(io_err)?;
    let mut failures = Vec::new();
    let mut report = basic_checks(ctx, &traj, &mut failures);
    report["audit_failures"] = json!(failures);
    Ok(Outcome::audited(report, &failures, ctx.config.experiment.audit))
}

pub(crate) fn audit(ctx: &Context) -> Result<Outcome, CliError> {
    let traj = match solve(ctx)? {
        Solved::Done(traj) => traj,
        Solved::BlownUp(outcome) => return Ok(outcome),
    };
    write_trajectory(ctx, &traj)?;
    let config = &ctx.config;
    let tol = &config.experiment.tolerances;
    let mut failures = Vec::new();
    let mut report = basic_checks(ctx, &traj, &mut failures);

    let e0 = traj.ledger[0].energy().abs().max(f64::MIN_POSITIVE);
    let replay = energy_audit(&traj).map_err(|e| CliError::Config(e.to_string()))?;
    let replay_diff = replay
        .iter()
        .zip(&traj.ledger)
        .map(|(a, b)| (a.residual - b.residual).abs().max((a.energy() - b.energy()).abs()))
        .fold(0.0, f64::max)
        / e0;
    if !(replay_diff <= tol.replay) {
        failures.push(format!("ledger replay differs by {replay_diff:e}"));
    }

    let grid = traj.grid();
    let m = grid.modes() as i64;
    let support_ok = traj.states.iter().all(|s| {
        s.u.iter().all(|c| {
            c.coeffs().iter().enumerate().all(|(flat, z)| {
                let k = grid.wavevector(flat);
                k.iter().all(|x| x.abs() <= m) || *z == Default::default()
            })
        })
    });
    if !support_ok {
        failures.push("velocity left the Galerkin space".into());
    }

    let commutator = if traj.q().is_constant() {
        let worst = traj
            .states
            .iter()
            .map(|s| commutator_j5(s, traj.q()) / s.rho.max_abs().max(1.0))
            .fold(0.0, f64::max);
        if !(worst <= tol.commutator) {
            failures.push(format!("commutator J5 {worst:e} exceeds {:e}", tol.commutator));
        }
        json!(worst)
    } else {
        Value::Null
    };

    let psi = config.psi(grid)?;
    let renorm = renorm_residual(&traj, &Truncation { k: config.experiment.truncation_k }, &psi);
    let entropy = rho_log_rho(&traj).map_err(|e| CliError::Config(e.to_string()))?;
    if !entropy.jensen {
        failures.push("rho ln rho fell below its Jensen bound".into());
    }
    let weight = pressure_weight(&traj, config.experiment.theta);
    let flux = flux_pair(&traj, config.experiment.truncation_k).map_err(|e| CliError::Config(e.to_string()))?;
    let last = traj.states.last().expect("trajectory has a final state");

    report["replay_max_difference"] = json!(replay_diff);
    report["galerkin_support"] = json!(support_ok);
    report["commutator_j5"] = commutator;
    report["renorm_residual_max"] = json!(renorm.max_abs());
    report["renorm_warning"] = json!(renorm.warning);
    report["rho_log_rho_residual_max"] = json!(entropy.residual.iter().fold(0.0f64, |a, r| a.max(r.abs())));
    report["rho_log_rho_jensen"] = json!(entropy.jensen);
    report["pressure_weight"] = json!({ "theta": config.experiment.theta, "value": weight.value, "warning": weight.warning });
    report["flux_pair_final"] = json!(flux.values.last());
    report["pressure_div_q_final"] = json!(pressure_div_q(last, traj.params(), traj.q()));
    report["audit_failures"] = json!(failures);
    Ok(Outcome::audited(report, &failures, config.experiment.audit))
}
