use serde::Serialize;

use super::StratError;
use crate::noise::{sample_brownian_realization, DriverPath};

/// Evaluation point of the Riemann–Stieltjes sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quadrature {
    LeftPoint,
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralResult {
    pub value: f64,
    pub scheme: Quadrature,
    pub path_id: Option<u64>,
    pub steps: usize,
}

fn sum(integrand: &[f64], path: &DriverPath, k: usize, scheme: Quadrature) -> Result<IntegralResult, StratError> {
    if integrand.len() != path.len() {
        return Err(StratError::Misaligned { expected: path.len(), found: integrand.len() });
    }
    if k >= path.k() {
        return Err(StratError::Component { k, len: path.k() });
    }
    let mut acc = 0.0;
    for i in 0..integrand.len() - 1 {
        let dw = path.value(i + 1)[k] - path.value(i)[k];
        let f = match scheme {
            Quadrature::LeftPoint => integrand[i],
            Quadrature::Midpoint => 0.5 * (integrand[i] + integrand[i + 1]),
        };
        acc += f * dw;
    }
    Ok(IntegralResult { value: acc, scheme, path_id: None, steps: integrand.len() - 1 })
}

/// `Σ f(t_i)(W_k(t_{i+1}) − W_k(t_i))`.
pub fn ito_integral(integrand: &[f64], path: &DriverPath, k: usize) -> Result<IntegralResult, StratError> {
    sum(integrand, path, k, Quadrature::LeftPoint)
}

/// `Σ ½(f(t_i) + f(t_{i+1}))(W_k(t_{i+1}) − W_k(t_i))`.
pub fn stratonovich_integral(integrand: &[f64], path: &DriverPath, k: usize) -> Result<IntegralResult, StratError> {
    sum(integrand, path, k, Quadrature::Midpoint)
}

/// `∫W∘dW − ∫W dW − ½T` on Brownian realization `index` of `seed`.
pub fn sde_defect(seed: u64, index: u64, steps: usize, t_end: f64) -> f64 {
    let path = sample_brownian_realization(1, t_end, steps, seed, index);
    let w: Vec<f64> = (0..path.len()).map(|i| path.value(i)[0]).collect();
    let s = stratonovich_integral(&w, &path, 0).expect("aligned");
    let i = ito_integral(&w, &path, 0).expect("aligned");
    s.value - i.value - 0.5 * t_end
}
