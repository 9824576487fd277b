use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use rustfft::num_complex::Complex64;

use super::fft;
use super::grid::TorusGrid;

/// Real periodic field with lazily synchronized samples and coefficients.
///
/// At least one representation is always populated; the other is computed
/// on first access and cached. Cloning is cheap relative to a transform.
#[derive(Clone)]
pub struct ScalarField {
    grid: TorusGrid,
    values: OnceLock<Vec<f64>>,
    coeffs: OnceLock<Vec<Complex64>>,
    padded: OnceLock<Vec<f64>>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("grid", &self.grid)
            .field("has_values", &self.values.get().is_some())
            .field("has_coeffs", &self.coeffs.get().is_some())
            .finish()
    }
}

impl ScalarField {
    /// Field from samples at the grid points.
    ///
    /// # Panics
    /// If `values.len()` differs from `grid.len()`.
    pub fn from_values(grid: TorusGrid, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.len(), "sample count does not match grid");
        Self {
            grid,
            values: OnceLock::from(values),
            coeffs: OnceLock::new(),
            padded: OnceLock::new(),
        }
    }

    /// Field from a full coefficient cube in FFT order.
    ///
    /// The cube should be conjugate symmetric; samples keep only the real part.
    ///
    /// # Panics
    /// If `coeffs.len()` differs from `grid.len()`.
    pub fn from_coeffs(grid: TorusGrid, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), grid.len(), "coefficient count does not match grid");
        Self {
            grid,
            values: OnceLock::new(),
            coeffs: OnceLock::from(coeffs),
            padded: OnceLock::new(),
        }
    }

    pub fn from_fn(grid: TorusGrid, f: impl Fn([f64; 3]) -> f64) -> Self {
        let values = (0..grid.len()).map(|j| f(grid.point(j))).collect();
        Self::from_values(grid, values)
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        Self::from_coeffs(grid, vec![Complex64::default(); grid.len()])
    }

    pub fn constant(grid: TorusGrid, c: f64) -> Self {
        let mut coeffs = vec![Complex64::default(); grid.len()];
        coeffs[0] = Complex64::new(c, 0.0);
        Self::from_coeffs(grid, coeffs)
    }

    /// Real trigonometric mode `a cos(k·x) + b sin(k·x)`.
    pub fn mode(grid: TorusGrid, k: [i64; 3], a: f64, b: f64) -> Self {
        let mut f = Self::zeros(grid);
        f.add_mode(k, a, b);
        f
    }

    /// Adds `a cos(k·x) + b sin(k·x)` to the coefficients.
    ///
    /// # Panics
    /// If `k` or `−k` is not representable on the grid.
    pub fn add_mode(&mut self, k: [i64; 3], a: f64, b: f64) {
        let grid = self.grid;
        let plus = grid.flat_of(k).expect("mode outside the grid");
        let neg = [-k[0], -k[1], -k[2]];
        let minus = grid.flat_of(neg).expect("mode outside the grid");
        let coeffs = self.coeffs_mut();
        if plus == minus {
            coeffs[plus] += Complex64::new(a, 0.0);
        } else {
            coeffs[plus] += Complex64::new(0.5 * a, -0.5 * b);
            coeffs[minus] += Complex64::new(0.5 * a, 0.5 * b);
        }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        self.values.get_or_init(|| {
            let mut data = self.coeffs.get().expect("field has no representation").clone();
            fft::inverse(self.grid.points_per_axis(), self.grid.dim(), &mut data);
            data.into_iter().map(|c| c.re).collect()
        })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        self.coeffs.get_or_init(|| {
            let values = self.values.get().expect("field has no representation");
            let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            fft::forward(self.grid.points_per_axis(), self.grid.dim(), &mut data);
            data
        })
    }

    /// Coefficient of wavevector `k`, zero if not on the grid.
    pub fn coeff(&self, k: [i64; 3]) -> Complex64 {
        match self.grid.flat_of(k) {
            Some(flat) => self.coeffs()[flat],
            None => Complex64::default(),
        }
    }

    /// Spatial mean, the `k = 0` coefficient.
    pub fn mean(&self) -> f64 {
        self.coeffs()[0].re
    }

    pub fn min(&self) -> f64 {
        self.values().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values().iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        match self.coeffs.get() {
            Some(c) => c.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
            None => self.values().iter().all(|v| v.is_finite()),
        }
    }

    /// Mutable coefficient access; invalidates cached samples.
    pub fn coeffs_mut(&mut self) -> &mut Vec<Complex64> {
        self.coeffs();
        self.values = OnceLock::new();
        self.padded = OnceLock::new();
        self.coeffs.get_mut().expect("coefficients populated above")
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs();
        self.coeffs.into_inner().expect("coefficients populated above")
    }

    /// New field with each coefficient multiplied by `m(k)`.
    pub fn map_coeffs(&self, m: impl Fn([i64; 3], Complex64) -> Complex64) -> Self {
        let tables = self.grid.tables();
        let coeffs = self.coeffs().iter().zip(&tables.wavevectors).map(|(&c, &k)| m(k, c)).collect();
        Self::from_coeffs(self.grid, coeffs)
    }

    /// Coefficients made exactly Hermitian, `c_k ← ½(c_k + conj(c_{−k}))`,
    /// discarding the rounding-level imaginary part of the samples.
    pub fn real_part(&self) -> Self {
        let grid = self.grid;
        let n = grid.points_per_axis();
        let coeffs = self.coeffs();
        let out = (0..grid.len())
            .map(|flat| {
                let mut idx = grid.unflatten(flat);
                for a in idx.iter_mut().take(grid.dim()) {
                    *a = (n - *a) % n;
                }
                0.5 * (coeffs[flat] + coeffs[grid.flatten(idx)].conj())
            })
            .collect();
        Self::from_coeffs(grid, out)
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: f64, other: &ScalarField) -> Self {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        let coeffs = self
            .coeffs()
            .iter()
            .zip(other.coeffs())
            .map(|(a, b)| a + b * s)
            .collect();
        Self::from_coeffs(self.grid, coeffs)
    }

    pub fn scale(&self, s: f64) -> Self {
        let coeffs = self.coeffs().iter().map(|c| c * s).collect();
        Self::from_coeffs(self.grid, coeffs)
    }

    /// Samples of the band-limited interpolant on the grid padded to `2n`.
    ///
    /// Nyquist coefficients are dropped since they have no real-valued
    /// extension to the finer grid.
    pub fn padded_values(&self) -> Vec<f64> {
        self.padded_slice().to_vec()
    }

    /// Cached samples on the padded grid.
    pub fn padded_slice(&self) -> &[f64] {
        self.padded.get_or_init(|| {
            let grid = self.grid;
            let fine = grid.padded();
            let mut data = vec![Complex64::default(); fine.len()];
            for (&c, target) in self.coeffs().iter().zip(&grid.tables().padded) {
                if let Some(target) = *target {
                    data[target] = c;
                }
            }
            fft::inverse(fine.points_per_axis(), fine.dim(), &mut data);
            data.into_iter().map(|c| c.re).collect()
        })
    }

    /// Field from samples on the padded grid, truncated to the non-Nyquist
    /// modes of `grid`.
    pub fn from_padded(grid: TorusGrid, padded: &[f64]) -> Self {
        let fine = grid.padded();
        assert_eq!(padded.len(), fine.len(), "padded sample count does not match grid");
        let mut data: Vec<Complex64> = padded.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft::forward(fine.points_per_axis(), fine.dim(), &mut data);
        let coeffs = grid.tables().padded.iter().map(|t| t.map_or(Complex64::default(), |t| data[t])).collect();
        Self::from_coeffs(grid, coeffs)
    }

    /// Pointwise image `f(self)` evaluated on the padded grid and truncated.
    pub fn map_padded(&self, f: impl Fn(f64) -> f64) -> Self {
        let padded: Vec<f64> = self.padded_slice().iter().map(|&v| f(v)).collect();
        Self::from_padded(self.grid, &padded)
    }

    /// `∫ f(self)` by quadrature on the padded grid.
    pub fn integrate_padded(&self, f: impl Fn(f64) -> f64) -> f64 {
        let padded = self.padded_values();
        let sum: f64 = padded.iter().map(|&v| f(v)).sum();
        sum * self.grid.volume() / padded.len() as f64
    }
}

impl Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: &ScalarField) -> ScalarField {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: &ScalarField) -> ScalarField {
        self.axpy(-1.0, rhs)
    }
}

impl Mul<f64> for &ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: f64) -> ScalarField {
        self.scale(rhs)
    }
}

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.scale(-1.0)
    }
}

/// Vector field with one [`ScalarField`] per axis.
#[derive(Debug, Clone)]
pub struct VectorField {
    components: Vec<ScalarField>,
}

impl VectorField {
    /// # Panics
    /// If the component count differs from the grid dimension or grids differ.
    pub fn new(components: Vec<ScalarField>) -> Self {
        let grid = components.first().expect("vector field needs components").grid();
        assert_eq!(components.len(), grid.dim(), "component count must equal dimension");
        assert!(components.iter().all(|c| c.grid() == grid), "grid mismatch");
        Self { components }
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        Self::new((0..grid.dim()).map(|_| ScalarField::zeros(grid)).collect())
    }

    pub fn from_fn(grid: TorusGrid, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        Self::new(
            (0..grid.dim())
                .map(|axis| ScalarField::from_fn(grid, |x| f(x)[axis]))
                .collect(),
        )
    }

    pub fn grid(&self) -> TorusGrid {
        self.components[0].grid()
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, axis: usize) -> &ScalarField {
        &self.components[axis]
    }

    pub fn component_mut(&mut self, axis: usize) -> &mut ScalarField {
        &mut self.components[axis]
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ScalarField> {
        self.components.iter()
    }

    pub fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self::new(self.components.iter().map(f).collect())
    }

    pub fn axpy(&self, s: f64, other: &VectorField) -> Self {
        Self::new(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.axpy(s, b))
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|c| c.scale(s))
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(ScalarField::is_finite)
    }

    pub fn max_abs(&self) -> f64 {
        let grid = self.grid();
        (0..grid.len())
            .map(|j| {
                self.components
                    .iter()
                    .map(|c| c.values()[j].powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }
}

impl From<Vec<ScalarField>> for VectorField {
    fn from(components: Vec<ScalarField>) -> Self {
        Self::new(components)
    }
}
