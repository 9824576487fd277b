use super::RoughError;
use crate::noise::{DriverPath, GeometricLift, QField};

fn distance(path: &DriverPath, i: usize, j: usize) -> f64 {
    path.increment(i, j).iter().map(|d| d * d).sum::<f64>().sqrt()
}

/// Best `Σ|Z_{t_{r+1}} − Z_{t_r}|^p` over partitions of `[t_start, t_j]`
/// through nodes, for every `j ≥ start`.
fn best_sums(path: &DriverPath, p: f64, start: usize) -> Vec<f64> {
    let n = path.len();
    let mut best = vec![0.0; n];
    for j in start + 1..n {
        let mut b: f64 = 0.0;
        for i in start..j {
            b = b.max(best[i] + distance(path, i, j).powf(p));
        }
        best[j] = b;
    }
    best
}

/// `‖Z‖_{p-var;[0,T]}`, exact over partitions through the nodes.
///
/// For a piecewise-linear path refining a partition inside a segment never
/// increases the sum when `p ≥ 1`, so the node supremum is the supremum.
pub fn p_variation(path: &DriverPath, p: f64) -> Result<f64, RoughError> {
    if !(p >= 1.0) {
        return Err(RoughError::Exponent(p));
    }
    let best = best_sums(path, p, 0);
    Ok(best[path.len() - 1].powf(1.0 / p))
}

/// Control `ω(s, t) = ‖Z‖^p_{p-var;[s,t]}` tabulated on node pairs.
#[derive(Debug, Clone)]
pub struct Control {
    times: Vec<f64>,
    table: Vec<f64>,
}

impl Control {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// `ω(t_i, t_j)` for node indices `i ≤ j`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.table[i * self.times.len() + j]
    }

    /// `max (ω(s,θ) + ω(θ,t) − ω(s,t))⁺` over node triples.
    pub fn superadditivity_defect(&self) -> f64 {
        let n = self.times.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for m in i..n {
                for j in m..n {
                    worst = worst.max(self.get(i, m) + self.get(m, j) - self.get(i, j));
                }
            }
        }
        worst
    }
}

pub fn control_from_path(path: &DriverPath, p: f64) -> Result<Control, RoughError> {
    if !(p >= 1.0) {
        return Err(RoughError::Exponent(p));
    }
    let n = path.len();
    let mut table = vec![0.0; n * n];
    for i in 0..n {
        let best = best_sums(path, p, i);
        table[i * n + i..(i + 1) * n].copy_from_slice(&best[i..]);
    }
    Ok(Control { times: path.times().to_vec(), table })
}

/// `max ‖δ𝕑_{sθt} − Z_{sθ} ⊗ Z_{θt}‖_max` over node triples, where
/// `δ𝕑_{sθt} = 𝕑_{st} − 𝕑_{sθ} − 𝕑_{θt}`.
pub fn chen_defect(lift: &GeometricLift) -> f64 {
    let n = lift.base().len();
    let k = lift.k();
    let kk = k * k;
    let mut second = vec![0.0; n * n * kk];
    for i in 0..n {
        for j in i..n {
            second[(i * n + j) * kk..(i * n + j + 1) * kk].copy_from_slice(&lift.second_level(i, j));
        }
    }
    let values = lift.base().values();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for m in i..n {
            let zsm: Vec<f64> = (0..k).map(|c| values[m][c] - values[i][c]).collect();
            for j in m..n {
                let st = &second[(i * n + j) * kk..][..kk];
                let sm = &second[(i * n + m) * kk..][..kk];
                let mt = &second[(m * n + j) * kk..][..kk];
                for l in 0..k {
                    for c in 0..k {
                        let e = l * k + c;
                        let zmt = values[j][c] - values[m][c];
                        worst = worst.max((st[e] - sm[e] - mt[e] - zsm[l] * zmt).abs());
                    }
                }
            }
        }
    }
    worst
}

/// Hölder-type operator constants of the unbounded rough driver built from
/// constant `Q`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RoughDriverNorms {
    pub alpha: f64,
    pub c_a1: f64,
    pub c_a2: f64,
}

/// `C_A1 = max |Z_{st}|·max_k|Q_k|/(t−s)^α` and
/// `C_A2 = max |𝕑_{st}|·(max_k|Q_k|)²/(t−s)^{2α}` over node pairs, `α = 1/p`.
pub fn driver_norms(q: &QField, lift: &GeometricLift, p: f64) -> Result<RoughDriverNorms, RoughError> {
    if !(p >= 1.0) {
        return Err(RoughError::Exponent(p));
    }
    if !q.is_constant() {
        return Err(RoughError::NonConstantQ);
    }
    let alpha = 1.0 / p;
    let qmax = q.sup_norm();
    let path = lift.base();
    let times = path.times();
    let n = path.len();
    let (mut a1, mut a2): (f64, f64) = (0.0, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            let h = times[j] - times[i];
            let z = distance(path, i, j);
            let zz = lift.second_level(i, j).iter().map(|x| x * x).sum::<f64>().sqrt();
            a1 = a1.max(z / h.powf(alpha));
            a2 = a2.max(zz / h.powf(2.0 * alpha));
        }
    }
    Ok(RoughDriverNorms { alpha, c_a1: a1 * qmax, c_a2: a2 * qmax * qmax })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{lift_geometric, make_constant_q, sample_brownian};

    fn path1(values: &[f64]) -> DriverPath {
        DriverPath::uniform(1.0, values.iter().map(|&v| vec![v]).collect()).unwrap()
    }

    #[test]
    fn tent_two_variation() {
        let p = path1(&[0.0, 1.0, 0.0]);
        assert!((p_variation(&p, 2.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn monotone_path_single_increment() {
        let p = DriverPath::uniform(1.0, (0..=5).map(|i| vec![0.6 * i as f64, 0.8 * i as f64]).collect()).unwrap();
        for exp in [1.0, 1.5, 2.5, 4.0] {
            assert!((p_variation(&p, exp).unwrap() - 5.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_small_exponent() {
        assert!(p_variation(&path1(&[0.0, 1.0]), 0.5).is_err());
    }

    #[test]
    fn linear_control_is_additive() {
        let p = DriverPath::uniform(1.0, (0..=8).map(|i| vec![2.0 * i as f64 / 8.0]).collect()).unwrap();
        let c = control_from_path(&p, 1.0).unwrap();
        for i in 0..9 {
            assert_eq!(c.get(i, i), 0.0);
            for j in i..9 {
                assert!((c.get(i, j) - 2.0 * (j - i) as f64 / 8.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn driver_norm_examples() {
        let q = make_constant_q(2, &[vec![0.0, 2.0]]).unwrap();
        let zero = lift_geometric(&DriverPath::zero(1, 1.0, 8));
        let n = driver_norms(&q, &zero, 2.5).unwrap();
        assert_eq!((n.c_a1, n.c_a2), (0.0, 0.0));
        let lin = path1(&(0..=8).map(|i| 3.0 * i as f64 / 8.0).collect::<Vec<_>>());
        let n = driver_norms(&q, &lift_geometric(&lin), 1.0).unwrap();
        assert!((n.c_a1 - 6.0).abs() < 1e-12);
    }

    #[test]
    fn chen_defect_detects_faults() {
        let p = sample_brownian(2, 1.0, 16, 4);
        let lift = lift_geometric(&p);
        assert!(chen_defect(&lift) < 1e-12);
        assert!(chen_defect(&lift.clone().with_ito_shift(0.5)) < 1e-12);
        assert!(chen_defect(&lift.with_fault(2, 9, 1, 0.1)) >= 0.1 - 1e-12);
    }
}
