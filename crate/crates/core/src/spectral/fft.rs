use std::cell::RefCell;

use rustfft::num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place unnormalized N-d transform of a row-major cube with `n` points per axis.
fn transform(n: usize, dim: usize, data: &mut [Complex64], direction: FftDirection) {
    debug_assert_eq!(data.len(), n.pow(dim as u32));
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft(n, direction));
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let mut line = vec![Complex64::default(); n];
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        if stride == 1 {
            fft.process_with_scratch(data, &mut scratch);
            continue;
        }
        let block = stride * n;
        for outer in (0..data.len()).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + j * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (j, value) in line.iter().enumerate() {
                    data[base + j * stride] = *value;
                }
            }
        }
    }
}

/// Samples to coefficients, normalized by `1/n^dim`.
pub(crate) fn forward(n: usize, dim: usize, data: &mut [Complex64]) {
    transform(n, dim, data, FftDirection::Forward);
    let scale = 1.0 / data.len() as f64;
    for c in data.iter_mut() {
        *c *= scale;
    }
}

/// Coefficients to samples.
pub(crate) fn inverse(n: usize, dim: usize, data: &mut [Complex64]) {
    transform(n, dim, data, FftDirection::Inverse);
}
