use super::path::DriverPath;

/// Second-level lift `𝕑_{st} = ∫_s^t Z_{sθ} ⊗ dZ_θ` of a piecewise-linear path.
///
/// The lift stores the running integral `I_t = ∫_0^t Z_θ ⊗ dZ_θ` at every
/// node and evaluates `𝕑_{st} = I_t − I_s − Z_s ⊗ Z_{st}`, so Chen's relation
/// holds up to rounding. Entry `[l][k]` of the returned row-major `K×K`
/// matrix integrates `dZ^l` before `dZ^k`.
#[derive(Debug, Clone)]
pub struct GeometricLift {
    base: DriverPath,
    running: Vec<Vec<f64>>,
    ito_shift: f64,
    faults: Vec<(usize, usize, usize, f64)>,
}

pub fn lift_geometric(path: &DriverPath) -> GeometricLift {
    let k = path.k();
    let mut running = Vec::with_capacity(path.len());
    let mut acc = vec![0.0; k * k];
    running.push(acc.clone());
    for i in 0..path.len() - 1 {
        let z = path.value(i);
        let dz = path.increment(i, i + 1);
        for l in 0..k {
            for m in 0..k {
                acc[l * k + m] += z[l] * dz[m] + 0.5 * dz[l] * dz[m];
            }
        }
        running.push(acc.clone());
    }
    GeometricLift { base: path.clone(), running, ito_shift: 0.0, faults: Vec::new() }
}

impl GeometricLift {
    pub fn base(&self) -> &DriverPath {
        &self.base
    }

    pub fn k(&self) -> usize {
        self.base.k()
    }

    /// `𝕑` between nodes `i ≤ j`.
    pub fn second_level(&self, i: usize, j: usize) -> Vec<f64> {
        let k = self.k();
        let zs = self.base.value(i);
        let zst = self.base.increment(i, j);
        let mut out: Vec<f64> = (0..k * k)
            .map(|e| self.running[j][e] - self.running[i][e] - zs[e / k] * zst[e % k])
            .collect();
        if self.ito_shift != 0.0 {
            let dt = self.base.times()[j] - self.base.times()[i];
            for d in 0..k {
                out[d * k + d] -= self.ito_shift * dt;
            }
        }
        for &(fi, fj, entry, amount) in &self.faults {
            if fi == i && fj == j {
                out[entry] += amount;
            }
        }
        out
    }

    /// Itô-type variant `𝕑_{st} − c·(t−s)·Id`; `c = ½` converts a Brownian
    /// Stratonovich lift to the Itô one. Chen's relation is preserved.
    pub fn with_ito_shift(mut self, c: f64) -> Self {
        self.ito_shift = c;
        self
    }

    /// Adds `amount` to entry `entry` of `𝕑` on the node pair `(i, j)` only.
    /// Used to check that defect detectors fire.
    pub fn with_fault(mut self, i: usize, j: usize, entry: usize, amount: f64) -> Self {
        self.faults.push((i, j, entry, amount));
        self
    }
}

/// `max_{s<t} ‖Sym(𝕑_{st}) − ½ Z_{st} ⊗ Z_{st}‖_max` over node pairs.
pub fn geometric_defect(lift: &GeometricLift) -> f64 {
    let k = lift.k();
    let n = lift.base().len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let z = lift.base().increment(i, j);
            let zz = lift.second_level(i, j);
            for l in 0..k {
                for m in 0..k {
                    let sym = 0.5 * (zz[l * k + m] + zz[m * k + l]);
                    worst = worst.max((sym - 0.5 * z[l] * z[m]).abs());
                }
            }
        }
    }
    worst
}
