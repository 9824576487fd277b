//! `strat`: Brownian ensemble with the Itô–Stratonovich checks.

use cnstn::solver::run;
use cnstn::stratonovich::{correction_terms, ensemble_stats, noise_energy_contribution, sde_defect, CorrectionTerms};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::simulate::failure;
use crate::{CliError, Context, NoiseKind, Outcome, Status};

/// Per-realization results, merged by index.
struct Member {
    sde: f64,
    terms: Option<CorrectionTerms>,
    noise_energy: f64,
    energy: f64,
}

pub(crate) fn strat(ctx: &Context) -> Result<Outcome, CliError> {
    let config = &ctx.config;
    if config.noise.kind != NoiseKind::Brownian {
        return Err(CliError::Config("noise.kind: strat needs brownian noise".into()));
    }
    let size = config.experiment.ensemble;
    if size < 2 {
        return Err(CliError::Config(format!("experiment.ensemble: need at least 2 paths, got {size}")));
    }
    let grid = config.grid()?;
    let q = config.q_field(grid)?;
    let solenoidal = config.solenoidal(grid, &q);
    let psi = config.psi(grid)?;
    let steps = config.params.steps();
    let t_end = config.params.t_end;
    let seed = config.noise.seed;
    let index = |i: usize| if config.experiment.same_path { 0 } else { i as u64 };

    let members: Vec<Result<Member, Value>> = ctx.pool.install(|| {
        (0..size)
            .into_par_iter()
            .map(|i| -> Result<Result<Member, Value>, CliError> {
                let setup = config.setup(1, config.driver(q.len(), index(i)))?;
                let traj = match run(&setup) {
                    Ok(traj) => traj,
                    Err(fail) => {
                        let (report, _) = failure(fail)?;
                        return Ok(Err(json!({ "path": i, "failure": report })));
                    }
                };
                let terms = if q.is_constant() {
                    Some(correction_terms(&traj, &psi).map_err(|e| CliError::Config(e.to_string()))?)
                } else {
                    None
                };
                let noise = noise_energy_contribution(&traj);
                Ok(Ok(Member {
                    sde: sde_defect(seed, index(i), steps, t_end),
                    terms,
                    noise_energy: *noise.cumulative.last().expect("ledger has the initial row"),
                    energy: traj.ledger[0].energy(),
                }))
            })
            .collect::<Result<Vec<_>, CliError>>()
    })?;

    let failed: Vec<&Value> = members.iter().filter_map(|m| m.as_ref().err()).collect();
    if !failed.is_empty() {
        let report = json!({ "failed_paths": failed });
        return Ok(Outcome { status: Status::BlowUp, report });
    }
    let members: Vec<Member> = members.into_iter().map(|m| m.expect("failures handled")).collect();
    let dt = config.params.dt;

    let sde: Vec<f64> = members.iter().map(|m| m.sde).collect();
    let sde_stats = ensemble_stats(&sde, dt);

    let correction = if q.is_constant() {
        let terms: Vec<&CorrectionTerms> = members.iter().map(|m| m.terms.as_ref().expect("constant Q")).collect();
        let defects: Vec<f64> = terms.iter().map(|t| t.defect).collect();
        let mean = |f: fn(&CorrectionTerms) -> f64| terms.iter().map(|t| f(t)).sum::<f64>() / terms.len() as f64;
        json!({
            "stats": ensemble_stats(&defects, dt),
            "mean_stratonovich": mean(|t| t.stratonovich),
            "mean_ito": mean(|t| t.ito),
            "mean_cross": mean(|t| t.cross),
            "mean_cross_analytic": mean(|t| t.cross_analytic),
        })
    } else {
        json!({ "skipped": "x-dependent Q" })
    };

    let scale = members.iter().map(|m| m.energy.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let noise: Vec<f64> = members.iter().map(|m| m.noise_energy / scale).collect();
    let worst = noise.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let neutral = worst <= config.experiment.tolerances.noise_energy;
    let stats = ensemble_stats(&noise, dt);
    let energy = json!({
        "mean_relative": stats.mean,
        "stderr_relative": stats.stderr,
        "max_relative": worst,
        "solenoidal": solenoidal,
        "expected_fail": !solenoidal,
        "pass": neutral,
    });

    let mut failures = Vec::new();
    if !sde_stats.pass {
        failures.push("scalar Ito-Stratonovich defect".to_string());
    }
    if let Some(stats) = correction.get("stats") {
        if stats["pass"] == json!(false) {
            failures.push("correction identity".into());
        }
    }
    if solenoidal && !neutral {
        failures.push("noise energy neutrality".into());
    }
    let report = json!({
        "paths": size,
        "seed": seed,
        "same_path": config.experiment.same_path,
        "sde_defect": sde_stats,
        "correction_identity": correction,
        "noise_energy": energy,
        "audit_failures": failures,
    });
    std::fs::write(ctx.path("strat.json"), serde_json::to_string_pretty(&report).expect("report serializes"))?;
    Ok(Outcome::audited(report, &failures, config.experiment.audit))
}
