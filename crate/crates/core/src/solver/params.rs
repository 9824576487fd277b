use serde::{Deserialize, Serialize};

use super::SolverError;
use crate::spectral::ScalarField;

/// Physical and regularization parameters of the layered scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemeParams {
    /// Adiabatic exponent `γ > N/2`.
    pub gamma: f64,
    /// Pressure constant `a > 0`.
    pub a: f64,
    /// Shear viscosity `μ > 0`.
    pub mu: f64,
    /// Bulk viscosity `η > 0`.
    pub eta: f64,
    /// Artificial viscosity `ε ≥ 0` of the continuity equation.
    pub epsilon: f64,
    /// Artificial pressure weight `δ ≥ 0`.
    pub delta: f64,
    /// Artificial pressure exponent `β > max{4, γ}`.
    pub beta: f64,
    pub dt: f64,
    pub t_end: f64,
    /// Hard lower bound for the density; `None` means `1e-8` times the
    /// initial mean density.
    pub density_floor: Option<f64>,
    /// Multiplier of `μ` in `S = 2μ·shear_factor·D(u) + η div u I`.
    pub shear_factor: f64,
}

impl Default for SchemeParams {
    fn default() -> Self {
        Self {
            gamma: 2.0,
            a: 1.0,
            mu: 0.1,
            eta: 0.1,
            epsilon: 0.0,
            delta: 0.0,
            beta: 5.0,
            dt: 1e-3,
            t_end: 0.5,
            density_floor: None,
            shear_factor: 1.0,
        }
    }
}

fn bad(msg: impl Into<String>) -> SolverError {
    SolverError::Params(msg.into())
}

impl SchemeParams {
    pub fn validate(&self, dim: usize) -> Result<(), SolverError> {
        let finite = [
            self.gamma, self.a, self.mu, self.eta, self.epsilon, self.delta, self.beta, self.dt,
            self.t_end, self.shear_factor,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(bad("parameters must be finite"));
        }
        if self.gamma <= dim as f64 / 2.0 {
            return Err(bad("gamma must exceed N/2"));
        }
        if self.beta <= self.gamma.max(4.0) {
            return Err(bad("beta must exceed max{4, gamma}"));
        }
        if self.a <= 0.0 {
            return Err(bad("a must be positive"));
        }
        if self.mu <= 0.0 {
            return Err(bad("mu must be positive"));
        }
        if self.eta <= 0.0 {
            return Err(bad("eta must be positive"));
        }
        if self.epsilon < 0.0 {
            return Err(bad("epsilon must be nonnegative"));
        }
        if self.delta < 0.0 {
            return Err(bad("delta must be nonnegative"));
        }
        if self.shear_factor <= 0.0 {
            return Err(bad("shear_factor must be positive"));
        }
        if self.dt <= 0.0 || self.t_end <= 0.0 || self.dt > self.t_end {
            return Err(bad("need 0 < dt <= t_end"));
        }
        let steps = (self.t_end / self.dt).round();
        if ((steps * self.dt - self.t_end) / self.t_end).abs() > 1e-9 {
            return Err(bad("t_end must be an integer multiple of dt"));
        }
        if let Some(floor) = self.density_floor {
            if !(floor > 0.0) {
                return Err(bad("density_floor must be positive"));
            }
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    /// Effective shear viscosity `μ·shear_factor`.
    pub fn mu_s(&self) -> f64 {
        self.mu * self.shear_factor
    }

    /// Coefficient `η + 2μ_s` of `div u` in the effective viscous flux.
    pub fn flux_coefficient(&self) -> f64 {
        self.eta + 2.0 * self.mu_s()
    }

    /// `p_δ(z) = a z^γ + δ z^β`; negative arguments count as 0.
    pub fn p(&self, z: f64) -> f64 {
        let z = z.max(0.0);
        self.a * pow(z, self.gamma) + self.delta * pow(z, self.beta)
    }

    /// Pressure potential `P_δ(z) = a z^γ/(γ−1) + δ z^β/(β−1)`.
    pub fn potential(&self, z: f64) -> f64 {
        let z = z.max(0.0);
        self.a * pow(z, self.gamma) / (self.gamma - 1.0) + self.delta * pow(z, self.beta) / (self.beta - 1.0)
    }

    /// `P_δ'(z)`.
    pub fn potential_prime(&self, z: f64) -> f64 {
        let z = z.max(0.0);
        self.a * self.gamma / (self.gamma - 1.0) * pow(z, self.gamma - 1.0)
            + self.delta * self.beta / (self.beta - 1.0) * pow(z, self.beta - 1.0)
    }

    /// `P_δ''(z) = p_δ'(z)/z`.
    pub fn potential_second(&self, z: f64) -> f64 {
        let z = z.max(0.0);
        self.a * self.gamma * pow(z, self.gamma - 2.0) + self.delta * self.beta * pow(z, self.beta - 2.0)
    }

    /// Sound speed squared `p_δ'(z)`.
    pub fn sound_speed_sq(&self, z: f64) -> f64 {
        z.max(0.0) * self.potential_second(z)
    }
}

/// `z^e`, with `powi` for integral exponents.
fn pow(z: f64, e: f64) -> f64 {
    if e.fract() == 0.0 && e.abs() <= 64.0 {
        z.powi(e as i32)
    } else {
        z.powf(e)
    }
}

fn check_density(rho: &ScalarField) -> Result<(), SolverError> {
    let min = rho.min();
    if !(min >= 0.0) {
        return Err(SolverError::BlowUp { t: f64::NAN, min_rho: min, reason: "negative density".into() });
    }
    Ok(())
}

/// `p_δ(ϱ)` evaluated on the padded grid and truncated.
pub fn pressure(rho: &ScalarField, params: &SchemeParams) -> Result<ScalarField, SolverError> {
    check_density(rho)?;
    Ok(rho.map_padded(|z| params.p(z)))
}

/// `P_δ(ϱ)` evaluated on the padded grid and truncated.
pub fn pressure_potential(rho: &ScalarField, params: &SchemeParams) -> Result<ScalarField, SolverError> {
    check_density(rho)?;
    Ok(rho.map_padded(|z| params.potential(z)))
}

/// Concave `L^∞` truncation `T_k(z) = k·T(z/k)` with
/// `T(s) = s` on `s ≤ 1`, `1 + (s−1) − (s−1)²/4` on `[1, 3]` and `2` beyond.
pub fn truncation(z: f64, k: f64) -> Result<f64, SolverError> {
    if !(k > 0.0) {
        return Err(bad("truncation level must be positive"));
    }
    let s = z / k;
    let t = if s <= 1.0 {
        s
    } else if s <= 3.0 {
        1.0 + (s - 1.0) - 0.25 * (s - 1.0) * (s - 1.0)
    } else {
        2.0
    };
    Ok(k * t)
}

/// `T_k'(z) = T'(z/k)`.
pub fn truncation_derivative(z: f64, k: f64) -> Result<f64, SolverError> {
    if !(k > 0.0) {
        return Err(bad("truncation level must be positive"));
    }
    let s = z / k;
    Ok(if s <= 1.0 {
        1.0
    } else if s <= 3.0 {
        1.0 - 0.5 * (s - 1.0)
    } else {
        0.0
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::TorusGrid;

    fn params(delta: f64, beta: f64) -> SchemeParams {
        SchemeParams { gamma: 2.0, a: 1.0, delta, beta, ..SchemeParams::default() }
    }

    #[test]
    fn validation_messages() {
        let p = SchemeParams { gamma: 0.5, ..SchemeParams::default() };
        assert_eq!(p.validate(2).unwrap_err().to_string(), "invalid parameters: gamma must exceed N/2");
        let p = SchemeParams { beta: 3.0, ..SchemeParams::default() };
        assert_eq!(
            p.validate(2).unwrap_err().to_string(),
            "invalid parameters: beta must exceed max{4, gamma}"
        );
        assert!(SchemeParams::default().validate(2).is_ok());
        let p = SchemeParams { dt: 0.3, t_end: 0.5, ..SchemeParams::default() };
        assert!(p.validate(2).is_err());
    }

    #[test]
    fn pressure_examples() {
        let grid = TorusGrid::new(2, 2, 8).unwrap();
        let p = params(0.0, 5.0);
        let one = pressure(&ScalarField::constant(grid, 1.0), &p).unwrap();
        assert!((one.mean() - 1.0).abs() < 1e-14);
        assert_eq!(pressure(&ScalarField::zeros(grid), &p).unwrap().max_abs(), 0.0);
        let q = params(0.1, 4.0);
        assert!((q.p(2.0) - 5.6).abs() < 1e-12);
        assert!(pressure(&ScalarField::constant(grid, -1.0), &p).is_err());
    }

    #[test]
    fn potential_examples() {
        let p = params(0.0, 5.0);
        assert_eq!(p.potential(0.0), 0.0);
        assert!((p.potential(2.0) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn truncation_examples() {
        assert_eq!(truncation(0.5, 1.0).unwrap(), 0.5);
        assert_eq!(truncation(5.0, 1.0).unwrap(), 2.0);
        assert_eq!(truncation(2.0, 1.0).unwrap(), 1.75);
        assert!(truncation(1.0, 0.0).is_err());
    }
}
