use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::NoiseError;
use crate::io::{check_columns, read_table, write_table};

/// Piecewise-linear path `Z : [0, T] → ℝ^K` given by its nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct DriverPath {
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
}

/// `t_i = T·i/steps`, the one formula used for every uniform grid so that
/// dyadic and step grids hit bitwise-identical node times.
pub fn uniform_time(t_end: f64, i: usize, steps: usize) -> f64 {
    t_end * i as f64 / steps as f64
}

impl DriverPath {
    pub fn new(times: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self, NoiseError> {
        if times.len() < 2
            || times.len() != values.len()
            || times.iter().any(|t| !t.is_finite())
            || times.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(NoiseError::Times);
        }
        let k = values[0].len();
        if values.iter().any(|v| v.len() != k || v.iter().any(|x| !x.is_finite())) {
            return Err(NoiseError::Values(k));
        }
        Ok(Self { times, values })
    }

    /// Nodes on the uniform grid of `steps` intervals over `[0, t_end]`.
    pub fn uniform(t_end: f64, values: Vec<Vec<f64>>) -> Result<Self, NoiseError> {
        let steps = values.len().saturating_sub(1);
        let times = (0..values.len()).map(|i| uniform_time(t_end, i, steps)).collect();
        Self::new(times, values)
    }

    pub fn zero(k: usize, t_end: f64, steps: usize) -> Self {
        Self::uniform(t_end, vec![vec![0.0; k]; steps + 1]).expect("zero path is valid")
    }

    /// Number of components `K`.
    pub fn k(&self) -> usize {
        self.values[0].len()
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn value(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().expect("at least two nodes")
    }

    /// `Z_{t_j} − Z_{t_i}` between nodes.
    pub fn increment(&self, i: usize, j: usize) -> Vec<f64> {
        self.values[j].iter().zip(&self.values[i]).map(|(b, a)| b - a).collect()
    }

    /// Linear interpolation; clamps outside `[0, T]`. Node times return node
    /// values exactly.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.values[0].clone();
        }
        if t >= self.times[n - 1] {
            return self.values[n - 1].clone();
        }
        let i = self.times.partition_point(|&s| s <= t) - 1;
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        if t == t0 {
            return self.values[i].clone();
        }
        let w = (t - t0) / (t1 - t0);
        self.values[i]
            .iter()
            .zip(&self.values[i + 1])
            .map(|(a, b)| a + w * (b - a))
            .collect()
    }

    /// Path through `eval` at the given times.
    pub fn resample(&self, times: &[f64]) -> Result<Self, NoiseError> {
        Self::new(times.to_vec(), times.iter().map(|&t| self.eval(t)).collect())
    }

    /// Same path with every value multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            times: self.times.clone(),
            values: self.values.iter().map(|v| v.iter().map(|x| x * s).collect()).collect(),
        }
    }

    fn columns(k: usize) -> Vec<String> {
        std::iter::once("t".to_string())
            .chain((1..=k).map(|i| format!("Z_{i}")))
            .collect()
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), NoiseError> {
        let rows = self.times.iter().zip(&self.values).map(|(t, v)| {
            std::iter::once(*t).chain(v.iter().copied()).collect::<Vec<f64>>()
        });
        write_table(path, "path", &Self::columns(self.k()), rows)?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self, NoiseError> {
        let (columns, rows) = read_table(path, "path")?;
        check_columns(&columns, &Self::columns(columns.len().saturating_sub(1)))?;
        let times = rows.iter().map(|r| r[0]).collect();
        let values = rows.iter().map(|r| r[1..].to_vec()).collect();
        Self::new(times, values)
    }
}

/// Piecewise-constant slopes `∂_t Z` of a piecewise-linear path.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    times: Vec<f64>,
    slopes: Vec<Vec<f64>>,
}

impl StepFunction {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Slope on segment `i`, that is on `[t_i, t_{i+1})`.
    pub fn slope(&self, i: usize) -> &[f64] {
        &self.slopes[i]
    }

    pub fn segments(&self) -> usize {
        self.slopes.len()
    }

    /// Right-continuous evaluation; the last segment is closed.
    pub fn eval(&self, t: f64) -> &[f64] {
        let i = self.times.partition_point(|&s| s <= t).clamp(1, self.slopes.len()) - 1;
        &self.slopes[i]
    }

    /// `∫_0^T ∂_t Z`, segment by segment.
    pub fn integral(&self) -> Vec<f64> {
        let k = self.slopes[0].len();
        let mut acc = vec![0.0; k];
        for (i, s) in self.slopes.iter().enumerate() {
            let dt = self.times[i + 1] - self.times[i];
            for (a, v) in acc.iter_mut().zip(s) {
                *a += v * dt;
            }
        }
        acc
    }
}

pub fn derivative_steps(path: &DriverPath) -> Result<StepFunction, NoiseError> {
    let mut slopes = Vec::with_capacity(path.len() - 1);
    for i in 0..path.len() - 1 {
        let dt = path.times[i + 1] - path.times[i];
        if dt <= 0.0 {
            return Err(NoiseError::DegenerateSegment(i));
        }
        slopes.push(path.increment(i, i + 1).into_iter().map(|d| d / dt).collect());
    }
    Ok(StepFunction { times: path.times.clone(), slopes })
}

/// Brownian path with `K` independent components on `steps` uniform intervals.
pub fn sample_brownian(k: usize, t_end: f64, steps: usize, seed: u64) -> DriverPath {
    sample_brownian_realization(k, t_end, steps, seed, 0)
}

/// Realization `index` of the Brownian family seeded by `seed`.
///
/// Component `c` draws from the ChaCha stream `(index << 16) | c`, so any
/// realization can be regenerated independently of the others.
pub fn sample_brownian_realization(k: usize, t_end: f64, steps: usize, seed: u64, index: u64) -> DriverPath {
    assert!(steps >= 1, "need at least one step");
    assert!(k < 1 << 16, "too many components");
    let sd = (t_end / steps as f64).sqrt();
    let mut values = vec![vec![0.0; k]; steps + 1];
    for c in 0..k {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream((index << 16) | c as u64);
        let mut w = 0.0;
        for row in values.iter_mut().skip(1) {
            let xi: f64 = StandardNormal.sample(&mut rng);
            w += sd * xi;
            row[c] = w;
        }
    }
    DriverPath::uniform(t_end, values).expect("brownian path is valid")
}

/// Piecewise-linear interpolation of `path` on the dyadic grid of `2^level`
/// intervals over `[0, T]`.
pub fn mollify(path: &DriverPath, level: u32) -> DriverPath {
    let intervals = 1usize << level;
    let t_end = path.t_end();
    let times: Vec<f64> = (0..=intervals).map(|j| uniform_time(t_end, j, intervals)).collect();
    path.resample(&times).expect("dyadic grid is increasing")
}

/// One trigonometric term `amp·(sin(freq·t + phase) − sin(phase))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriverTerm {
    pub amp: f64,
    pub freq: f64,
    #[serde(default)]
    pub phase: f64,
}

/// Smooth scalar driver `W(t) = linear·t + Σ terms`, with `W(0) = 0`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriverComponent {
    #[serde(default)]
    pub linear: f64,
    #[serde(default)]
    pub terms: Vec<DriverTerm>,
}

impl DriverComponent {
    pub fn value(&self, t: f64) -> f64 {
        self.linear * t
            + self
                .terms
                .iter()
                .map(|m| m.amp * ((m.freq * t + m.phase).sin() - m.phase.sin()))
                .sum::<f64>()
    }

    pub fn slope(&self, t: f64) -> f64 {
        self.linear
            + self
                .terms
                .iter()
                .map(|m| m.amp * m.freq * (m.freq * t + m.phase).cos())
                .sum::<f64>()
    }
}

/// Samples the smooth drivers on `steps` uniform intervals of `[0, t_end]`.
pub fn smooth_driver(components: &[DriverComponent], t_end: f64, steps: usize) -> DriverPath {
    let values = (0..=steps)
        .map(|i| {
            let t = uniform_time(t_end, i, steps);
            components.iter().map(|c| c.value(t)).collect()
        })
        .collect();
    DriverPath::uniform(t_end, values).expect("smooth driver is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brownian_is_deterministic_and_starts_at_zero() {
        let a = sample_brownian(2, 1.0, 64, 7);
        let b = sample_brownian(2, 1.0, 64, 7);
        assert_eq!(a, b);
        assert_eq!(a.value(0), &[0.0, 0.0]);
        let c = sample_brownian_realization(2, 1.0, 64, 7, 1);
        assert_ne!(a, c);
    }

    #[test]
    fn brownian_increment_statistics() {
        let steps = 100_000;
        let t_end = 1.0;
        let dt = t_end / steps as f64;
        let p = sample_brownian(1, t_end, steps, 2024);
        let inc: Vec<f64> = (0..steps).map(|i| p.increment(i, i + 1)[0]).collect();
        let n = steps as f64;
        let mean = inc.iter().sum::<f64>() / n;
        let var = inc.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() <= 4.0 * (dt / n).sqrt());
        // Variance of the sample variance of a Gaussian is 2σ⁴/(n−1).
        assert!((var - dt).abs() <= 3.0 * dt * (2.0 / (n - 1.0)).sqrt());
    }

    #[test]
    fn mollify_examples() {
        let p = sample_brownian(1, 1.0, 16, 3);
        assert_eq!(mollify(&p, 4), p);
        let coarse = mollify(&p, 0);
        assert_eq!(coarse.len(), 2);
        assert_eq!(coarse.value(1), p.value(16));
        let mid = mollify(&p, 2);
        for j in 0..=4 {
            assert_eq!(mid.value(j), p.value(4 * j));
        }
    }

    #[test]
    fn slopes_examples() {
        let linear = DriverPath::uniform(2.0, vec![vec![0.0], vec![1.5], vec![3.0]]).unwrap();
        let s = derivative_steps(&linear).unwrap();
        assert_eq!(s.slope(0), &[1.5]);
        assert_eq!(s.slope(1), &[1.5]);
        let tent = DriverPath::uniform(2.0, vec![vec![0.0], vec![1.0], vec![0.0]]).unwrap();
        let s = derivative_steps(&tent).unwrap();
        assert_eq!(s.eval(0.5), &[1.0]);
        assert_eq!(s.eval(1.5), &[-1.0]);
        assert_eq!(s.eval(2.0), &[-1.0]);
    }

    #[test]
    fn slope_integral_telescopes() {
        let p = sample_brownian(3, 0.7, 200, 11);
        let s = derivative_steps(&p).unwrap();
        let total = s.integral();
        for c in 0..3 {
            assert!((total[c] - (p.value(200)[c] - p.value(0)[c])).abs() < 1e-14);
        }
    }

    #[test]
    fn smooth_sine_interpolates_to_second_order() {
        let comp = DriverComponent { linear: 0.0, terms: vec![DriverTerm { amp: 1.0, freq: 1.0, phase: 0.0 }] };
        let t_end = 2.0 * std::f64::consts::PI;
        let steps = 127;
        let p = smooth_driver(std::slice::from_ref(&comp), t_end, steps);
        let dt = t_end / steps as f64;
        let mut err: f64 = 0.0;
        for j in 0..5000 {
            let t = t_end * j as f64 / 4999.0;
            err = err.max((p.eval(t)[0] - t.sin()).abs());
        }
        assert!(err <= dt * dt);
    }

    #[test]
    fn smooth_driver_examples() {
        let zero = smooth_driver(&[DriverComponent::default()], 1.0, 10);
        assert!(zero.values().iter().all(|v| v[0] == 0.0));
        let ramp = DriverComponent { linear: 1.0, terms: vec![] };
        let s = derivative_steps(&smooth_driver(&[ramp], 1.0, 10)).unwrap();
        for i in 0..10 {
            assert!((s.slope(i)[0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("path.csv");
        let p = sample_brownian(2, 1.0, 8, 5);
        p.write_csv(&file).unwrap();
        assert_eq!(DriverPath::read_csv(&file).unwrap(), p);
    }
}
