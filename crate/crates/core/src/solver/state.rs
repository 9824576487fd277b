use super::{SchemeParams, SolverError};
use crate::noise::QField;
use crate::spectral::{inner, product, project_modes, ScalarField, TorusGrid, VectorField};

/// Static context of a run: grid, parameters with the resolved density
/// floor, and the noise coefficients.
#[derive(Debug, Clone)]
pub struct Scheme {
    pub grid: TorusGrid,
    pub params: SchemeParams,
    pub floor: f64,
    pub q: QField,
}

impl Scheme {
    pub fn new(grid: TorusGrid, params: SchemeParams, floor: f64, q: QField) -> Result<Self, SolverError> {
        params.validate(grid.dim())?;
        if let QField::Smooth { fields } = &q {
            if fields.iter().any(|f| f.grid() != grid) {
                return Err(SolverError::Params("noise fields live on a different grid".into()));
            }
        }
        if let QField::Constant { dim, .. } = &q {
            if *dim != grid.dim() {
                return Err(SolverError::Params("noise vectors have the wrong dimension".into()));
            }
        }
        Ok(Self { grid, params, floor, q })
    }
}

/// Discrete unknowns at time `t`.
///
/// `momentum` holds the Galerkin momentum `P_m(ϱu)`, the quantity the scheme
/// advances; `u ∈ X_m` is recovered from it by solving `P_m(ϱu) = momentum`.
#[derive(Debug, Clone)]
pub struct GalerkinState {
    pub t: f64,
    pub rho: ScalarField,
    pub u: VectorField,
    pub momentum: VectorField,
}

impl GalerkinState {
    /// State from density and velocity; `u` is projected onto `X_m`.
    pub fn new(t: f64, rho: ScalarField, u: &VectorField) -> Self {
        let m = rho.grid().modes();
        let u = u.map(|c| project_modes(c, m));
        let momentum = VectorField::new(u.iter().map(|c| project_modes(&product(&rho, c), m)).collect());
        Self { t, rho, u, momentum }
    }

    pub fn grid(&self) -> TorusGrid {
        self.rho.grid()
    }

    /// Copy holding only spectral data, for compact storage.
    pub fn compact(&self) -> Self {
        let keep = |f: &ScalarField| ScalarField::from_coeffs(f.grid(), f.coeffs().to_vec());
        Self {
            t: self.t,
            rho: keep(&self.rho),
            u: self.u.map(keep),
            momentum: self.momentum.map(keep),
        }
    }
}

/// The operator `v ↦ P_m(ϱ v)` on `X_m` and its diagonal preconditioner
/// `r ↦ P_m(r/ϱ)`.
///
/// When `n ≥ 4m − 1` products of a Nyquist-free `ϱ` with `v ∈ X_m` are
/// alias-free on the base grid for every retained mode, so the padded grid
/// is only used on coarser grids. The scheme never creates Nyquist content in
/// `ϱ`.
struct MassOperator {
    grid: TorusGrid,
    direct: bool,
    rho: Vec<f64>,
    inv_rho: Vec<f64>,
}

impl MassOperator {
    fn new(rho: &ScalarField) -> Self {
        let grid = rho.grid();
        let direct = grid.points_per_axis() + 1 >= 4 * grid.modes();
        let rho_vals = if direct { rho.values().to_vec() } else { rho.padded_values() };
        let inv_rho = rho_vals.iter().map(|r| 1.0 / r).collect();
        Self { grid, direct, rho: rho_vals, inv_rho }
    }

    fn weighted(&self, v: &ScalarField, w: &[f64]) -> ScalarField {
        let m = self.grid.modes();
        if self.direct {
            let vals = v.values().iter().zip(w).map(|(a, b)| a * b).collect();
            project_modes(&ScalarField::from_values(self.grid, vals), m)
        } else {
            let vals: Vec<f64> = v.padded_slice().iter().zip(w).map(|(a, b)| a * b).collect();
            project_modes(&ScalarField::from_padded(self.grid, &vals), m)
        }
    }

    fn apply(&self, v: &ScalarField) -> ScalarField {
        self.weighted(v, &self.rho)
    }

    fn precondition(&self, r: &ScalarField) -> ScalarField {
        self.weighted(r, &self.inv_rho)
    }
}

const CG_TOL: f64 = 1e-14;
const CG_MAX_ITER: usize = 400;

/// Solves `P_m(ϱu) = momentum` for `u ∈ X_m` by preconditioned conjugate
/// gradients, starting from `guess` when given.
pub fn recover_velocity(
    rho: &ScalarField,
    momentum: &VectorField,
    guess: Option<&VectorField>,
) -> Result<VectorField, SolverError> {
    let op = MassOperator::new(rho);
    let mut comps = Vec::with_capacity(momentum.dim());
    for (axis, b) in momentum.iter().enumerate() {
        let b = &project_modes(&b.real_part(), rho.grid().modes());
        let bnorm = inner(b, b).sqrt();
        if bnorm == 0.0 {
            comps.push(ScalarField::zeros(rho.grid()));
            continue;
        }
        let mut x = match guess {
            Some(g) => g.component(axis).clone(),
            None => op.precondition(b),
        };
        let mut r = b - &op.apply(&x);
        let mut z = op.precondition(&r);
        let mut p = z.clone();
        let mut rz = inner(&r, &z);
        let mut converged = inner(&r, &r).sqrt() <= CG_TOL * bnorm;
        let mut iter = 0;
        while !converged {
            if iter == CG_MAX_ITER || !rz.is_finite() {
                return Err(SolverError::MassSolve { iterations: iter });
            }
            let ap = op.apply(&p);
            let alpha = rz / inner(&p, &ap);
            x = x.axpy(alpha, &p);
            r = r.axpy(-alpha, &ap);
            converged = inner(&r, &r).sqrt() <= CG_TOL * bnorm;
            if !converged {
                z = op.precondition(&r);
                let rz_next = inner(&r, &z);
                p = z.axpy(rz_next / rz, &p);
                rz = rz_next;
            }
            iter += 1;
        }
        comps.push(x);
    }
    Ok(VectorField::new(comps))
}
