use rustfft::num_complex::Complex64;

use super::field::{ScalarField, VectorField};
use super::grid::{norm_sq, sup_norm};

/// Copy of `f` with coefficients populated.
pub fn to_spectral(f: &ScalarField) -> ScalarField {
    f.coeffs();
    f.clone()
}

/// Copy of `f` with physical samples populated.
pub fn to_physical(f: &ScalarField) -> ScalarField {
    f.values();
    f.clone()
}

/// `∂f/∂x_axis` of the trigonometric interpolant.
///
/// # Panics
/// If `axis ≥ dim`.
pub fn derivative(f: &ScalarField, axis: usize) -> ScalarField {
    let grid = f.grid();
    assert!(axis < grid.dim(), "axis {axis} out of range");
    f.map_coeffs(|k, c| {
        if grid.is_nyquist(k) {
            Complex64::default()
        } else {
            c * Complex64::new(0.0, k[axis] as f64)
        }
    })
}

pub fn gradient(f: &ScalarField) -> VectorField {
    VectorField::new((0..f.grid().dim()).map(|axis| derivative(f, axis)).collect())
}

/// `Σ_i ∂_i v_i`, assembled in one pass over the coefficients.
pub fn divergence(v: &VectorField) -> ScalarField {
    let grid = v.grid();
    let tables = grid.tables();
    let mut out = vec![Complex64::default(); grid.len()];
    for (axis, comp) in v.iter().enumerate() {
        for ((acc, &c), (&k, pad)) in out.iter_mut().zip(comp.coeffs()).zip(tables.wavevectors.iter().zip(&tables.padded)) {
            if pad.is_some() {
                *acc += c * Complex64::new(0.0, k[axis] as f64);
            }
        }
    }
    ScalarField::from_coeffs(grid, out)
}

pub fn laplacian(f: &ScalarField) -> ScalarField {
    let grid = f.grid();
    f.map_coeffs(|k, c| {
        if grid.is_nyquist(k) {
            Complex64::default()
        } else {
            c * -norm_sq(k)
        }
    })
}

/// Galerkin projection: zero every coefficient with `|k|_∞ > cutoff`.
pub fn project_modes(f: &ScalarField, cutoff: usize) -> ScalarField {
    f.map_coeffs(|k, c| {
        if sup_norm(k) > cutoff as u64 {
            Complex64::default()
        } else {
            c
        }
    })
}

/// Smoothing operator `J^η`, the projection onto `|k|_∞ ≤ ⌊1/η⌋`.
///
/// # Panics
/// If `eta` is not positive.
pub fn smoothing(f: &ScalarField, eta: f64) -> ScalarField {
    assert!(eta > 0.0, "smoothing radius must be positive");
    project_modes(f, (1.0 / eta).floor() as usize)
}

/// `∇Δ⁻¹ f` together with the mean of `f` that was projected out.
pub fn riesz_grad(f: &ScalarField) -> (VectorField, f64) {
    let grid = f.grid();
    let comps = (0..grid.dim())
        .map(|axis| {
            f.map_coeffs(|k, c| {
                let k2 = norm_sq(k);
                if k2 == 0.0 || grid.is_nyquist(k) {
                    Complex64::default()
                } else {
                    c * Complex64::new(0.0, -(k[axis] as f64) / k2)
                }
            })
        })
        .collect();
    (VectorField::new(comps), f.mean())
}

/// `∂_i ∂_j Δ⁻¹ f` together with the projected-out mean.
pub fn riesz_double(f: &ScalarField, i: usize, j: usize) -> (ScalarField, f64) {
    let grid = f.grid();
    assert!(i < grid.dim() && j < grid.dim(), "axis out of range");
    let out = f.map_coeffs(|k, c| {
        let k2 = norm_sq(k);
        if k2 == 0.0 || grid.is_nyquist(k) {
            Complex64::default()
        } else {
            c * ((k[i] * k[j]) as f64 / k2)
        }
    });
    (out, f.mean())
}

/// `∫_{𝕋^N} f`, exact for trigonometric polynomials on the grid.
pub fn integrate(f: &ScalarField) -> f64 {
    f.grid().volume() * f.mean()
}

/// Discrete `L²` inner product via Parseval.
pub fn inner(a: &ScalarField, b: &ScalarField) -> f64 {
    assert_eq!(a.grid(), b.grid(), "grid mismatch");
    let sum: f64 = a
        .coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| (x * y.conj()).re)
        .sum();
    a.grid().volume() * sum
}

pub fn vector_inner(a: &VectorField, b: &VectorField) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| inner(x, y)).sum()
}

pub fn norm_l2(f: &ScalarField) -> f64 {
    inner(f, f).sqrt()
}

/// Zero every mode with `|k|_∞ > n/(order+1)`; `order = 2` is the 2/3 rule.
pub fn dealias(f: &ScalarField, order: usize) -> ScalarField {
    let cutoff = f.grid().points_per_axis() / (order + 1);
    project_modes(f, cutoff)
}

/// Alias-free product on the padded grid, truncated back to `n` points.
pub fn product(a: &ScalarField, b: &ScalarField) -> ScalarField {
    assert_eq!(a.grid(), b.grid(), "grid mismatch");
    let pa = a.padded_slice();
    let pb = b.padded_slice();
    let padded: Vec<f64> = pa.iter().zip(pb).map(|(x, y)| x * y).collect();
    ScalarField::from_padded(a.grid(), &padded)
}

#[cfg(test)]
mod tests {
    use super::super::TorusGrid;
    use super::*;

    fn grid() -> TorusGrid {
        TorusGrid::new(2, 4, 16).unwrap()
    }

    fn close(a: &ScalarField, b: &ScalarField, tol: f64) {
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() < tol, "{x} vs {y}");
        }
    }

    #[test]
    fn derivative_examples() {
        let g = grid();
        let cos1 = ScalarField::from_fn(g, |x| x[0].cos());
        close(&derivative(&cos1, 0), &ScalarField::from_fn(g, |x| -x[0].sin()), 1e-13);
        let s = ScalarField::from_fn(g, |x| (2.0 * x[1]).sin());
        close(&derivative(&s, 1), &ScalarField::from_fn(g, |x| 2.0 * (2.0 * x[1]).cos()), 1e-13);
        let c = ScalarField::constant(g, 3.0);
        assert!(derivative(&c, 0).max_abs() < 1e-15);
    }

    #[test]
    fn projection_examples() {
        let g = grid();
        let cos1 = ScalarField::from_fn(g, |x| x[0].cos());
        assert!(project_modes(&cos1, 0).max_abs() < 1e-15);
        let two = ScalarField::from_fn(g, |x| x[0].cos() + (5.0 * x[0]).cos());
        close(&project_modes(&two, 2), &cos1, 1e-13);
    }

    #[test]
    fn smoothing_removes_all_modes_above_cutoff() {
        let g = grid();
        let f = ScalarField::mode(g, [4, 0, 0], 1.0, 0.5).axpy(1.0, &ScalarField::mode(g, [0, 4, 0], -0.2, 0.0));
        let rest = &f - &smoothing(&f, 0.5);
        assert!((norm_l2(&rest) - norm_l2(&f)).abs() < 1e-13);
    }

    #[test]
    fn riesz_examples() {
        let g = grid();
        let cos1 = ScalarField::from_fn(g, |x| x[0].cos());
        let (v, mean) = riesz_grad(&cos1);
        assert!(mean.abs() < 1e-15);
        close(v.component(0), &ScalarField::from_fn(g, |x| x[0].sin()), 1e-13);
        assert!(v.component(1).max_abs() < 1e-14);
        let (r11, _) = riesz_double(&cos1, 0, 0);
        close(&r11, &cos1, 1e-13);
        let (r22, _) = riesz_double(&cos1, 1, 1);
        assert!(r22.max_abs() < 1e-14);
        let (zero, mean) = riesz_grad(&ScalarField::constant(g, 2.0));
        assert!(zero.max_abs() < 1e-15);
        assert_eq!(mean, 2.0);
    }

    #[test]
    fn integrate_examples() {
        let g = grid();
        let one = ScalarField::constant(g, 1.0);
        assert!((integrate(&one) - g.volume()).abs() < 1e-12);
        assert!(integrate(&ScalarField::from_fn(g, |x| x[0].cos())).abs() < 1e-14);
    }

    #[test]
    fn dealias_keeps_band_limited_field() {
        let g = grid();
        let f = ScalarField::from_fn(g, |x| x[0].cos() + (2.0 * x[1]).sin());
        close(&dealias(&f, 2), &f, 1e-14);
        let high = ScalarField::mode(g, [7, 0, 0], 1.0, 0.0);
        assert!(dealias(&high, 2).max_abs() < 1e-15);
    }

    #[test]
    fn product_of_cosines() {
        let g = grid();
        let c = ScalarField::from_fn(g, |x| x[0].cos());
        close(&product(&c, &c), &ScalarField::from_fn(g, |x| 0.5 + 0.5 * (2.0 * x[0]).cos()), 1e-14);
    }
}
