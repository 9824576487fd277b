//! `roughcheck`: lift, driver norms and remainder scaling of one run.

use cnstn::noise::lift_geometric;
use cnstn::roughpath::{chen_defect, driver_norms, fit_scaling_exponent, remainder_table, ScalingFit};
use cnstn::solver::run;
use serde_json::{json, Value};

use crate::simulate::failure;
use crate::{CliError, Context, Outcome, Status};

/// Size of the injected second-level fault.
const FAULT: f64 = 1e-3;

/// Required exponent `3/p − 0.15`.
pub fn exponent_threshold(p: f64) -> f64 {
    3.0 / p - 0.15
}

pub(crate) fn roughcheck(ctx: &Context) -> Result<Outcome, CliError> {
    let config = &ctx.config;
    let grid = config.grid()?;
    let q = config.q_field(grid)?;
    if !q.is_constant() {
        return Err(CliError::Config("noise.q: roughcheck needs constant Q".into()));
    }
    let levels = config.experiment.rough_levels;
    let steps = config.params.steps();
    if steps % (1usize << levels) != 0 {
        return Err(CliError::Config(format!(
            "experiment.rough_levels: {steps} steps cannot host {levels} dyadic levels"
        )));
    }
    let setup = config.setup(1, config.driver(q.len(), 0))?;
    let traj = match run(&setup) {
        Ok(traj) => traj,
        Err(fail) => {
            let (report, _) = failure(fail)?;
            return Ok(Outcome { status: Status::BlowUp, report });
        }
    };

    let mut lift = lift_geometric(&traj.driver);
    if config.test_hooks.corrupt_lift {
        let last = traj.driver.len() - 1;
        lift = lift.with_fault(0, last / 2, 0, FAULT);
    }
    let chen = chen_defect(&lift);
    let p = config.noise.p;
    let norms = driver_norms(&q, &lift, p).map_err(|e| CliError::Config(e.to_string()))?;
    let table = remainder_table(&traj.tested, &q, &lift, levels).map_err(|e| CliError::Config(e.to_string()))?;
    table.write_csv(&ctx.path("remainder.csv")).map_err(|e| CliError::Config(e.to_string()))?;
    let fit = fit_scaling_exponent(&table).map_err(|e| CliError::Config(e.to_string()))?;
    let threshold = exponent_threshold(p);
    let exponent: Value = match fit {
        ScalingFit::Exact { .. } => json!("exact"),
        ScalingFit::Slope { exponent, .. } => json!(exponent),
    };
    let chen_ok = chen <= config.experiment.tolerances.chen;
    let pass = chen_ok && fit.meets(threshold);
    let report = json!({
        "chen_defect": chen,
        "chen_flagged": !chen_ok,
        "C_A1": norms.c_a1,
        "C_A2": norms.c_a2,
        "alpha": norms.alpha,
        "p": p,
        "exponent": exponent,
        "threshold": threshold,
        "fit": fit,
        "flagged_windows": table.entries.iter().filter(|e| e.flagged).count(),
        "pass": pass,
    });
    let failures: Vec<String> = if pass { Vec::new() } else { vec!["rough check failed".into()] };
    std::fs::write(ctx.path("roughcheck.json"), serde_json::to_string_pretty(&report).expect("report serializes"))?;
    Ok(Outcome::audited(report, &failures, true))
}
