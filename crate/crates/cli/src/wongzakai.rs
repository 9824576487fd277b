//! `wongzakai`: one Brownian sample solved at successive dyadic
//! interpolation levels.

use cnstn::noise::{mollify, DriverPath};
use cnstn::solver::{run, GalerkinState, Trajectory};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::simulate::failure;
use crate::{CliError, Context, NoiseKind, Outcome};

#[derive(Debug, Clone, Serialize)]
pub struct LevelDistance {
    /// `d_n` compares level `n` with level `n + 1`.
    pub level: u32,
    pub rho_l1: Option<f64>,
    pub u_l1: Option<f64>,
}

/// `∫|f − g|` by the rectangle rule on the sampling grid.
fn l1_distance(a: &[f64], b: &[f64], cell: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() * cell
}

/// `max_t ‖ϱ_a − ϱ_b‖_{L¹}` and the velocity analogue over shared samples.
pub fn trajectory_distance(a: &[GalerkinState], b: &[GalerkinState]) -> (f64, f64) {
    let mut d = (0.0f64, 0.0f64);
    for (x, y) in a.iter().zip(b) {
        let cell = x.grid().cell_volume();
        d.0 = d.0.max(l1_distance(x.rho.values(), y.rho.values(), cell));
        let du = x.u.iter().zip(y.u.iter()).map(|(p, q)| l1_distance(p.values(), q.values(), cell)).sum();
        d.1 = d.1.max(du);
    }
    d
}

/// Number of consecutive ratios `d_{n+1}/d_n` below one.
pub fn decreasing_ratios(d: &[Option<f64>]) -> usize {
    d.windows(2).filter(|w| matches!((w[0], w[1]), (Some(a), Some(b)) if b < a)).count()
}

pub(crate) fn wongzakai(ctx: &Context) -> Result<Outcome, CliError> {
    let config = &ctx.config;
    if config.noise.kind != NoiseKind::Brownian {
        return Err(CliError::Config("noise.kind: wongzakai needs brownian noise".into()));
    }
    let grid = config.grid()?;
    let k = config.q_field(grid)?.len();
    let [lo, hi] = config.noise.wong_zakai_levels;
    let top = hi + 1;
    let steps = config.params.steps();
    if steps % (1usize << top) != 0 {
        return Err(CliError::Config(format!(
            "params: {steps} steps cannot resolve Wong-Zakai level {top}; need a multiple of {}",
            1usize << top
        )));
    }
    let base = config.driver(k, 0);
    let levels: Vec<u32> = (lo..=top).collect();
    let stride = config.stride();
    let runs: Vec<(u32, Result<Trajectory, serde_json::Value>)> = ctx.pool.install(|| {
        levels
            .par_iter()
            .map(|&level| {
                let driver: DriverPath = mollify(&base, level);
                let result = config.setup(stride, driver).and_then(|setup| match run(&setup) {
                    Ok(traj) => Ok(Ok(traj)),
                    Err(fail) => failure(fail).map(|(report, _)| Err(report)),
                });
                (level, result)
            })
            .collect::<Vec<_>>()
            .into_iter()
            .map(|(level, r)| r.map(|v| (level, v)))
            .collect::<Result<Vec<_>, CliError>>()
    })?;

    let failed: Vec<serde_json::Value> = runs
        .iter()
        .filter_map(|(level, r)| r.as_ref().err().map(|e| json!({ "level": level, "failure": e })))
        .collect();
    let distances: Vec<LevelDistance> = runs
        .windows(2)
        .map(|w| match (&w[0].1, &w[1].1) {
            (Ok(a), Ok(b)) => {
                let (r, u) = trajectory_distance(&a.states, &b.states);
                LevelDistance { level: w[0].0, rho_l1: Some(r), u_l1: Some(u) }
            }
            _ => LevelDistance { level: w[0].0, rho_l1: None, u_l1: None },
        })
        .collect();
    let rho: Vec<Option<f64>> = distances.iter().map(|d| d.rho_l1).collect();
    let decreasing = decreasing_ratios(&rho);
    let ratios = rho.len().saturating_sub(1);
    let report = json!({
        "levels": levels,
        "seed": config.noise.seed,
        "distances": distances,
        "decreasing_ratios": decreasing,
        "ratios": ratios,
        "cauchy_trend": ratios > 0 && decreasing >= ratios.saturating_sub(1).max(1),
        "failed_levels": failed,
    });
    let mut outcome = Outcome::ok(report);
    if !failed.is_empty() {
        outcome.status = crate::Status::BlowUp;
    }
    std::fs::write(ctx.path("wongzakai.json"), serde_json::to_string_pretty(&outcome.report).expect("report serializes"))?;
    Ok(outcome)
}
