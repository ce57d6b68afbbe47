//! Multi-dimensional FFT plumbing on flat, row-major complex buffers.
//!
//! Plans are cached process-wide; rustfft's planner already memoizes per
//! (length, direction), so the lock is only held for a table lookup.

use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::{Fft, FftPlanner};
use std::sync::{Arc, Mutex};

static PLANNER: Lazy<Mutex<FftPlanner<f64>>> = Lazy::new(|| Mutex::new(FftPlanner::new()));

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut planner = PLANNER.lock().unwrap();
    if inverse {
        planner.plan_fft_inverse(len)
    } else {
        planner.plan_fft_forward(len)
    }
}

/// In-place 1-D transforms along `axis` of a row-major array with shape `dims`.
///
/// Unnormalized in both directions; callers divide by the total point count
/// after a full inverse pass.
pub fn transform_axis(data: &mut [Complex64], dims: &[usize], axis: usize, inverse: bool) {
    let n = dims[axis];
    let inner: usize = dims[axis + 1..].iter().product();
    let outer: usize = dims[..axis].iter().product();
    let fft = plan(n, inverse);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];

    if inner == 1 {
        for chunk in data.chunks_exact_mut(n) {
            fft.process_with_scratch(chunk, &mut scratch);
        }
        return;
    }

    // Strided axis: gather each line into a contiguous buffer, transform,
    // scatter back.
    let mut line = vec![Complex64::default(); n];
    for o in 0..outer {
        let base_o = o * n * inner;
        for i in 0..inner {
            let base = base_o + i;
            for (j, v) in line.iter_mut().enumerate() {
                *v = data[base + j * inner];
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for (j, v) in line.iter().enumerate() {
                data[base + j * inner] = *v;
            }
        }
    }
}

/// Forward transform over every axis (physical -> spectral), unnormalized.
pub fn forward(data: &mut [Complex64], dims: &[usize]) {
    for axis in 0..dims.len() {
        transform_axis(data, dims, axis, false);
    }
}

/// Inverse transform over every axis (spectral -> physical), normalized by
/// the total point count.
pub fn inverse(data: &mut [Complex64], dims: &[usize]) {
    for axis in 0..dims.len() {
        transform_axis(data, dims, axis, true);
    }
    let scale = 1.0 / dims.iter().product::<usize>() as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_3d() {
        let dims = [8usize, 4, 16];
        let total: usize = dims.iter().product();
        let orig: Vec<Complex64> = (0..total)
            .map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.7).cos()))
            .collect();
        let mut data = orig.clone();
        forward(&mut data, &dims);
        inverse(&mut data, &dims);
        for (a, b) in data.iter().zip(orig.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn single_mode_lands_in_one_bin() {
        // e^{3ix} on 16 points -> coefficient n at index 3, zero elsewhere.
        let n = 16usize;
        let mut data: Vec<Complex64> = (0..n)
            .map(|i| {
                let x = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                Complex64::new((3.0 * x).cos(), (3.0 * x).sin())
            })
            .collect();
        forward(&mut data, &[n]);
        for (j, c) in data.iter().enumerate() {
            let expect = if j == 3 { n as f64 } else { 0.0 };
            assert!((c - Complex64::new(expect, 0.0)).norm() < 1e-9, "bin {j}");
        }
    }
}
