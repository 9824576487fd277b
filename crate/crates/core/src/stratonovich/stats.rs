use serde::Serialize;

/// Neumaier-compensated running sum; order of `add` calls fixes the result.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Statistical verdict with the 3σ warning and 5σ failure bands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Warn,
    Fail,
}

/// Ensemble summary of per-path values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleStats {
    pub n_paths: usize,
    pub dt: f64,
    pub mean: f64,
    pub stderr: f64,
    /// Sample variance of the per-path values.
    pub variance: f64,
    /// All paths returned the same value.
    pub degenerate: bool,
    pub verdict: Verdict,
    pub pass: bool,
}

/// Mean and standard error of `values`, summed in index order.
///
/// A degenerate ensemble passes only if its mean is zero to rounding.
pub fn ensemble_stats(values: &[f64], dt: f64) -> EnsembleStats {
    let n = values.len();
    let mut s = CompensatedSum::default();
    values.iter().for_each(|v| s.add(*v));
    let mean = if n == 0 { f64::NAN } else { s.value() / n as f64 };
    let mut sq = CompensatedSum::default();
    values.iter().for_each(|v| sq.add((v - mean) * (v - mean)));
    let variance = if n > 1 { sq.value() / (n - 1) as f64 } else { f64::NAN };
    let stderr = (variance / n as f64).sqrt();
    let degenerate = n > 0 && values.iter().all(|v| *v == values[0]);
    let verdict = if degenerate || !(stderr > 0.0) {
        let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        if mean.abs() <= 1e-12 * scale.max(1.0) {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    } else {
        let z = mean.abs() / stderr;
        if z <= 3.0 {
            Verdict::Pass
        } else if z <= 5.0 {
            Verdict::Warn
        } else {
            Verdict::Fail
        }
    };
    EnsembleStats { n_paths: n, dt, mean, stderr, variance, degenerate, verdict, pass: verdict != Verdict::Fail }
}
