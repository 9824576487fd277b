use super::{pressure, GalerkinState, Scheme, SchemeParams, SolverError};
use crate::noise::QField;
use crate::spectral::{
    derivative, divergence, gradient, laplacian, product, project_modes, ScalarField, VectorField,
};

/// `div S(∇u) = μ_s Δu + (μ_s + η) ∇div u` for
/// `S = 2μ_s D(u) + η div u I`, `D(u) = ½(∇u + ∇uᵀ)`.
pub fn stress_divergence(u: &VectorField, params: &SchemeParams) -> VectorField {
    let mu = params.mu_s();
    let grad_div = gradient(&divergence(u));
    VectorField::new(
        u.iter()
            .zip(grad_div.iter())
            .map(|(c, g)| laplacian(c).scale(mu).axpy(mu + params.eta, g))
            .collect(),
    )
}

/// Momentum density `ϱu` with every retained mode exact.
pub fn momentum_density(rho: &ScalarField, u: &VectorField) -> VectorField {
    u.map(|c| product(rho, c))
}

/// `div(f Q_k)` for a scalar `f`.
pub fn transport_divergence(f: &ScalarField, q: &QField, k: usize) -> ScalarField {
    let grid = f.grid();
    match q.vector(k) {
        Some(v) => {
            let mut acc = ScalarField::zeros(grid);
            for axis in 0..grid.dim() {
                if v[axis] != 0.0 {
                    acc = acc.axpy(v[axis], &derivative(f, axis));
                }
            }
            acc
        }
        None => {
            let field = q.field(grid, k);
            let flux = VectorField::new(field.iter().map(|c| product(f, c)).collect());
            divergence(&flux)
        }
    }
}

/// Every right-hand-side ingredient of one stage, evaluated once.
#[derive(Debug, Clone)]
pub struct StageTerms {
    /// `−div(ϱu)`.
    pub drift_rho: ScalarField,
    /// `div(ϱQ_k)` per noise component.
    pub noise_rho: Vec<ScalarField>,
    /// `P_m[−div(ϱu⊗u) − ∇p_δ(ϱ) + div S + εΔ(ϱu)]`.
    pub drift_momentum: VectorField,
    /// `P_m div(ϱu⊗Q_k)` per noise component.
    pub noise_momentum: Vec<VectorField>,
}

pub fn stage_terms(scheme: &Scheme, rho: &ScalarField, u: &VectorField) -> Result<StageTerms, SolverError> {
    let grid = scheme.grid;
    let m = grid.modes();
    let dim = grid.dim();
    let params = &scheme.params;
    let mom = momentum_density(rho, u);

    let drift_rho = divergence(&mom).scale(-1.0);
    let noise_rho = (0..scheme.q.len())
        .map(|k| transport_divergence(rho, &scheme.q, k))
        .collect();

    let p = pressure(rho, params)?;
    let stress = stress_divergence(u, params);
    let mut drift = Vec::with_capacity(dim);
    for i in 0..dim {
        let mut conv = ScalarField::zeros(grid);
        for j in 0..dim {
            conv = conv.axpy(1.0, &derivative(&product(mom.component(i), u.component(j)), j));
        }
        let mut total = conv.scale(-1.0);
        total = total.axpy(-1.0, &derivative(&p, i));
        total = total.axpy(1.0, stress.component(i));
        if params.epsilon != 0.0 {
            total = total.axpy(params.epsilon, &laplacian(mom.component(i)));
        }
        drift.push(project_modes(&total, m));
    }
    let noise_momentum = (0..scheme.q.len())
        .map(|k| mom.map(|c| project_modes(&transport_divergence(c, &scheme.q, k), m)))
        .collect();
    Ok(StageTerms {
        drift_rho,
        noise_rho,
        drift_momentum: VectorField::new(drift),
        noise_momentum,
    })
}

/// `−div(ϱu) + εΔϱ + Σ_k div(ϱQ_k)·slope_k`.
pub fn rhs_continuity(scheme: &Scheme, state: &GalerkinState, slope: &[f64]) -> Result<ScalarField, SolverError> {
    let terms = stage_terms(scheme, &state.rho, &state.u)?;
    let mut out = terms.drift_rho.axpy(scheme.params.epsilon, &laplacian(&state.rho));
    for (n, s) in terms.noise_rho.iter().zip(slope) {
        out = out.axpy(*s, n);
    }
    Ok(out)
}

/// `P_m[−div(ϱu⊗u) − ∇p_δ(ϱ) + div S + εΔ(ϱu) + Σ_k div(ϱu⊗Q_k)·slope_k]`.
pub fn rhs_momentum(scheme: &Scheme, state: &GalerkinState, slope: &[f64]) -> Result<VectorField, SolverError> {
    let terms = stage_terms(scheme, &state.rho, &state.u)?;
    let mut out = terms.drift_momentum;
    for (n, s) in terms.noise_momentum.iter().zip(slope) {
        out = out.axpy(*s, n);
    }
    Ok(out)
}
