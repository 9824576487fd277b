use std::path::Path;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::RoughError;
use crate::io::{check_columns, read_table, write_table};
use crate::noise::{GeometricLift, QField};

/// Tested trajectory `⟨V(t), e_k⟩` and cumulative drift `⟨∫_0^t drift, e_k⟩`
/// on a finite set of test modes `e_k = e^{ik·x}`.
///
/// Index order is `[sample][component][mode]`; the pairing is
/// `⟨f, e_k⟩ = ∫ f·conj(e_k)`.
#[derive(Debug, Clone, Default)]
pub struct TestedSeries {
    pub dim: usize,
    pub times: Vec<f64>,
    pub modes: Vec<[i64; 3]>,
    pub state: Vec<Vec<Vec<Complex64>>>,
    pub drift: Vec<Vec<Vec<Complex64>>>,
}

/// `‖e^{ik·x}‖_{W^{3,∞}} = Σ_{|α| ≤ 3} |k^α|`.
pub fn test_weight(k: [i64; 3], dim: usize) -> f64 {
    fn walk(k: &[i64], budget: u32) -> f64 {
        match k.split_first() {
            None => 1.0,
            Some((&first, rest)) => (0..=budget)
                .map(|a| (first.unsigned_abs() as f64).powi(a as i32) * walk(rest, budget - a))
                .sum(),
        }
    }
    walk(&k[..dim], 3)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemainderEntry {
    pub level: u32,
    pub s: f64,
    pub t: f64,
    pub norm: f64,
    /// Window where `|Z_{st}|·max|Q| > 1`, outside the small-driver regime.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemainderTable {
    pub entries: Vec<RemainderEntry>,
    /// Largest weighted tested state magnitude; sets the roundoff floor.
    pub scale: f64,
}

impl RemainderTable {
    pub fn levels(&self) -> Vec<u32> {
        let mut levels: Vec<u32> = self.entries.iter().map(|e| e.level).collect();
        levels.dedup();
        levels
    }

    fn columns() -> Vec<String> {
        ["level", "s", "t", "norm"].iter().map(|s| s.to_string()).collect()
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), RoughError> {
        let rows = self.entries.iter().map(|e| vec![e.level as f64, e.s, e.t, e.norm]);
        write_table(path, "remainder", &Self::columns(), rows)?;
        Ok(())
    }

    /// Reads the table back; flags and scale are not stored in the CSV.
    pub fn read_csv(path: &Path) -> Result<Self, RoughError> {
        let (columns, rows) = read_table(path, "remainder")?;
        check_columns(&columns, &Self::columns())?;
        let entries: Vec<RemainderEntry> = rows
            .iter()
            .map(|r| RemainderEntry { level: r[0] as u32, s: r[1], t: r[2], norm: r[3], flagged: false })
            .collect();
        let scale = entries.iter().map(|e| e.norm).fold(0.0, f64::max);
        Ok(Self { entries, scale })
    }
}

fn node_index(times: &[f64], t: f64) -> Option<usize> {
    let i = times.partition_point(|&s| s < t - 1e-12 * (1.0 + t.abs()));
    (i < times.len() && (times[i] - t).abs() <= 1e-12 * (1.0 + t.abs())).then_some(i)
}

/// Remainder `V♮_{st}` on the dyadic windows of levels `1..=levels`.
///
/// For constant `Q` and test mode `e_k`,
///
/// ```text
/// V♮_{st}(e_k) = δ⟨V, e_k⟩_{st} − δD_{st}(e_k)
///               − i Σ_a (Q_a·k) Z^a_{st} ⟨V_s, e_k⟩
///               + Σ_{a,b} (Q_b·k)(Q_a·k) 𝕑^{ba}_{st} ⟨V_s, e_k⟩
/// ```
///
/// and the window norm is `max_{component, k} |V♮_{st}(e_k)| / ‖e_k‖_{W^{3,∞}}`.
pub fn remainder_table(
    series: &TestedSeries,
    q: &QField,
    lift: &GeometricLift,
    levels: u32,
) -> Result<RemainderTable, RoughError> {
    if !q.is_constant() {
        return Err(RoughError::NonConstantQ);
    }
    let samples = series.times.len();
    if samples < 2 || series.state.len() != samples || series.drift.len() != samples {
        return Err(RoughError::Grid("series lengths disagree".into()));
    }
    let intervals = samples - 1;
    if intervals % (1usize << levels) != 0 {
        return Err(RoughError::Grid(format!(
            "{intervals} sample intervals cannot host {levels} dyadic levels"
        )));
    }
    if q.len() != lift.k() {
        return Err(RoughError::Grid("lift and Q have different K".into()));
    }
    let lift_times = lift.base().times();
    let nodes = series
        .times
        .iter()
        .map(|&t| node_index(lift_times, t))
        .collect::<Option<Vec<usize>>>()
        .ok_or_else(|| RoughError::Grid("series time missing from the lift grid".into()))?;

    let kq = q.len();
    let qdotk: Vec<Vec<f64>> = series
        .modes
        .iter()
        .map(|m| {
            (0..kq)
                .map(|a| {
                    let v = q.vector(a).expect("constant Q");
                    (0..series.dim).map(|d| v[d] * m[d] as f64).sum()
                })
                .collect()
        })
        .collect();
    let weights: Vec<f64> = series.modes.iter().map(|&m| test_weight(m, series.dim)).collect();
    let qmax = q.sup_norm();

    let mut scale: f64 = 0.0;
    for sample in &series.state {
        for comp in sample {
            for (c, w) in comp.iter().zip(&weights) {
                scale = scale.max(c.norm() / w);
            }
        }
    }

    let mut entries = Vec::new();
    for level in 1..=levels {
        let windows = 1usize << level;
        let width = intervals / windows;
        for w in 0..windows {
            let (i, j) = (w * width, (w + 1) * width);
            let (ni, nj) = (nodes[i], nodes[j]);
            let z = lift.base().increment(ni, nj);
            let zz = lift.second_level(ni, nj);
            let mut norm: f64 = 0.0;
            for comp in 0..series.state[i].len() {
                for (mi, qk) in qdotk.iter().enumerate() {
                    let vs = series.state[i][comp][mi];
                    let dv = series.state[j][comp][mi] - vs;
                    let dd = series.drift[j][comp][mi] - series.drift[i][comp][mi];
                    let first: f64 = (0..kq).map(|a| qk[a] * z[a]).sum();
                    let mut second = 0.0;
                    for b in 0..kq {
                        for a in 0..kq {
                            second += qk[b] * qk[a] * zz[b * kq + a];
                        }
                    }
                    let rem = dv - dd - Complex64::new(0.0, first) * vs + vs * second;
                    norm = norm.max(rem.norm() / weights[mi]);
                }
            }
            let zabs = z.iter().map(|x| x * x).sum::<f64>().sqrt();
            entries.push(RemainderEntry {
                level,
                s: series.times[i],
                t: series.times[j],
                norm,
                flagged: zabs * qmax > 1.0,
            });
        }
    }
    Ok(RemainderTable { entries, scale })
}

/// Result of the log–log regression of remainder norms against window length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalingFit {
    /// Every remainder sits at the roundoff floor; no slope is defined.
    Exact { max_norm: f64 },
    Slope { exponent: f64, intercept: f64, residual: f64 },
}

impl ScalingFit {
    /// Whether the fit meets `exponent ≥ threshold`; an exact table always does.
    pub fn meets(&self, threshold: f64) -> bool {
        match *self {
            ScalingFit::Exact { .. } => true,
            ScalingFit::Slope { exponent, .. } => exponent >= threshold,
        }
    }
}

/// Relative roundoff floor below which a table counts as exact.
const EXACT_FLOOR: f64 = 1e-12;

/// Least-squares slope of the per-level mean of `log‖V♮‖` against
/// `log(t − s)`; the residual is the root-mean-square misfit.
pub fn fit_scaling_exponent(table: &RemainderTable) -> Result<ScalingFit, RoughError> {
    let levels = table.levels();
    if levels.len() < 3 {
        return Err(RoughError::Levels { needed: 3, found: levels.len() });
    }
    let max_norm = table.entries.iter().map(|e| e.norm).fold(0.0, f64::max);
    if max_norm <= EXACT_FLOOR * table.scale || max_norm == 0.0 {
        return Ok(ScalingFit::Exact { max_norm });
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for level in levels {
        let logs: Vec<(f64, f64)> = table
            .entries
            .iter()
            .filter(|e| e.level == level && e.norm > 0.0)
            .map(|e| ((e.t - e.s).ln(), e.norm.ln()))
            .collect();
        if logs.is_empty() {
            continue;
        }
        let n = logs.len() as f64;
        xs.push(logs.iter().map(|l| l.0).sum::<f64>() / n);
        ys.push(logs.iter().map(|l| l.1).sum::<f64>() / n);
    }
    if xs.len() < 3 {
        return Err(RoughError::Levels { needed: 3, found: xs.len() });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - exponent * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(ScalingFit::Slope { exponent, intercept, residual })
}
