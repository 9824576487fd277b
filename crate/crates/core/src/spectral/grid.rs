use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::SpectralError;

/// Uniform grid on the torus `[0, 2π)^dim` together with the Galerkin cutoff.
///
/// Points are stored row-major with axis 0 varying slowest. Wavenumbers along
/// an axis follow the usual FFT ordering `0, 1, …, n/2 − 1, −n/2, …, −1`; the
/// entry `−n/2` is the Nyquist mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusGrid {
    dim: usize,
    modes: usize,
    n: usize,
}

impl TorusGrid {
    pub fn new(dim: usize, modes: usize, n: usize) -> Result<Self, SpectralError> {
        if !(1..=3).contains(&dim) {
            return Err(SpectralError::Dimension(dim));
        }
        if modes == 0 {
            return Err(SpectralError::Grid("modes must be at least 1".into()));
        }
        if n % 2 != 0 {
            return Err(SpectralError::Grid(format!("points per axis must be even, got {n}")));
        }
        if n < 2 * modes + 2 {
            return Err(SpectralError::Grid(format!(
                "points per axis {n} too small for cutoff {modes} (need at least {})",
                2 * modes + 2
            )));
        }
        Ok(Self { dim, modes, n })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Galerkin cutoff `m`: velocity modes satisfy `|k|_∞ ≤ m`.
    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    /// Total number of grid points, `n^dim`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Lebesgue measure of the torus, `(2π)^dim`.
    pub fn volume(&self) -> f64 {
        (2.0 * PI).powi(self.dim as i32)
    }

    /// Volume element of one grid cell.
    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.len() as f64
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    /// Twice as many points per axis, used for alias-free products.
    pub fn padded(&self) -> TorusGrid {
        TorusGrid {
            dim: self.dim,
            modes: self.modes,
            n: 2 * self.n,
        }
    }

    /// Signed wavenumber of FFT slot `j` along one axis.
    pub fn wavenumber(&self, j: usize) -> i64 {
        let n = self.n as i64;
        let j = j as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    /// FFT slot of the signed wavenumber `k`, if it lies on this grid.
    pub fn slot(&self, k: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if k < -half || k >= half {
            return None;
        }
        Some(k.rem_euclid(self.n as i64) as usize)
    }

    /// Multi-index of a flat position.
    pub fn unflatten(&self, mut flat: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        for axis in (0..self.dim).rev() {
            idx[axis] = flat % self.n;
            flat /= self.n;
        }
        idx
    }

    pub fn flatten(&self, idx: [usize; 3]) -> usize {
        (0..self.dim).fold(0, |acc, axis| acc * self.n + idx[axis])
    }

    /// Wavevector stored at a flat spectral position (unused axes are 0).
    pub fn wavevector(&self, flat: usize) -> [i64; 3] {
        let idx = self.unflatten(flat);
        let mut k = [0i64; 3];
        for axis in 0..self.dim {
            k[axis] = self.wavenumber(idx[axis]);
        }
        k
    }

    /// Cached per-shape lookup tables.
    pub(crate) fn tables(&self) -> Arc<GridTables> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<GridTables>>>> = OnceLock::new();
        let mut cache = CACHE.get_or_init(Default::default).lock().expect("grid table cache poisoned");
        cache
            .entry((self.dim, self.n))
            .or_insert_with(|| {
                let fine = self.padded();
                let wavevectors: Vec<[i64; 3]> = (0..self.len()).map(|f| self.wavevector(f)).collect();
                let padded = wavevectors
                    .iter()
                    .map(|&k| if self.is_nyquist(k) { None } else { fine.flat_of(k) })
                    .collect();
                Arc::new(GridTables { wavevectors, padded })
            })
            .clone()
    }

    /// Flat spectral position of a wavevector, if representable.
    pub fn flat_of(&self, k: [i64; 3]) -> Option<usize> {
        let mut idx = [0usize; 3];
        for axis in 0..self.dim {
            idx[axis] = self.slot(k[axis])?;
        }
        for &extra in &k[self.dim..] {
            if extra != 0 {
                return None;
            }
        }
        Some(self.flatten(idx))
    }

    /// Physical coordinates of a flat grid position.
    pub fn point(&self, flat: usize) -> [f64; 3] {
        let idx = self.unflatten(flat);
        let h = self.spacing();
        let mut x = [0.0; 3];
        for axis in 0..self.dim {
            x[axis] = idx[axis] as f64 * h;
        }
        x
    }

    /// True if any component of `k` sits on the Nyquist slot `−n/2`.
    pub fn is_nyquist(&self, k: [i64; 3]) -> bool {
        let nyq = -((self.n / 2) as i64);
        k[..self.dim].iter().any(|&c| c == nyq)
    }
}

/// Wavevector of each flat slot and its position on the padded grid
/// (`None` on Nyquist slots).
pub(crate) struct GridTables {
    pub wavevectors: Vec<[i64; 3]>,
    pub padded: Vec<Option<usize>>,
}

pub(crate) fn sup_norm(k: [i64; 3]) -> u64 {
    k.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
}

pub(crate) fn norm_sq(k: [i64; 3]) -> f64 {
    k.iter().map(|&c| (c * c) as f64).sum()
}
